//! Local search over fixed-size selections of candidate separations, and an
//! exhaustive oracle for small models.

mod eval;
mod fast;

use std::cmp::Ordering;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use eval::{
    area_spread, clusters_per_region, eval_f_clust, eval_f_cross, eval_objective, evaluate, noncrossing_prefix,
    regions, separation_length, Evaluation,
};

use crate::separation::{Constraint, EfopModel, Objective};
use fast::FastEvaluator;

/// Iterations that stand in for 100 ms of nominal budget in deterministic mode.
pub const ITERATIONS_PER_100_MS: u64 = 20_000;
pub const BRUTE_FORCE_LIMIT: u128 = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetMode {
    WallClock,
    /// Iteration counts replace the wall-clock timeout.
    Deterministic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub base_timeout_ms_per_cluster: u64,
    pub max_retries_with_doubling: u32,
    pub seed: u64,
    pub plateau_walk_probability: f64,
    pub stall_restart_iterations: u32,
    pub sample_size: usize,
    pub mode: BudgetMode,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            base_timeout_ms_per_cluster: 100,
            max_retries_with_doubling: 2,
            seed: 0,
            plateau_walk_probability: 0.1,
            stall_restart_iterations: 500,
            sample_size: 64,
            mode: BudgetMode::WallClock,
        }
    }
}

impl SolverConfig {
    pub fn deterministic(seed: u64) -> Self {
        SolverConfig { seed, mode: BudgetMode::Deterministic, ..Default::default() }
    }

    /// Wall-clock budget of one attempt, in milliseconds.
    pub fn attempt_timeout_ms(&self, n_clusters: usize, attempt: u32) -> u64 {
        (n_clusters as u64 * self.base_timeout_ms_per_cluster) << attempt
    }

    /// Iteration budget of one attempt in deterministic mode.
    pub fn attempt_iterations(&self, n_clusters: usize, attempt: u32) -> u64 {
        (n_clusters as u64 * self.base_timeout_ms_per_cluster * ITERATIONS_PER_100_MS / 100) << attempt
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttemptStats {
    pub budget_ms: Option<u64>,
    pub budget_iterations: Option<u64>,
    pub elapsed_ms: f64,
    pub iterations: u64,
    pub feasible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    /// Sorted candidate ids.
    pub assignment: Vec<usize>,
    pub constraint_error: u32,
    pub objective_value: f64,
    pub feasible: bool,
    pub wall_time_ms: f64,
    pub retries_used: u32,
    pub iterations: u64,
    pub attempts: Vec<AttemptStats>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("model has {available} candidates, {required} must be selected")]
    TooFewCandidates { available: usize, required: usize },
    #[error("exhaustive search over {subsets} subsets exceeds the limit")]
    InstanceTooLarge { subsets: u128 },
}

/// A sampled swap (out, in) and its score, if evaluated.
type ScoredSwap = (u32, u32, Option<(u32, f64)>);

fn lex(a: (u32, f64), b: (u32, f64)) -> Ordering {
    a.0.cmp(&b.0).then(a.1.total_cmp(&b.1))
}

fn zone_rng(seed: u64, zone: u32) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (zone as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Finds `n - 1` separations with zero constraint error and a small
/// objective, doubling the budget on failure up to the retry limit.
pub fn solve(model: &EfopModel, config: &SolverConfig) -> Result<Solution, SolveError> {
    let k = model.candidates.len();
    let c = model.required_selected;
    if k < c || c == 0 {
        return Err(SolveError::TooFewCandidates { available: k, required: c });
    }
    let started = Instant::now();
    let mut rng = zone_rng(config.seed, model.zone_id);
    let mut search = Search::new(model, config);
    let mut best: Option<(Vec<u32>, (u32, f64))> = None;
    let mut attempts = Vec::new();
    for attempt in 0..=config.max_retries_with_doubling {
        let t0 = Instant::now();
        let (budget_ms, budget_iterations) = match config.mode {
            BudgetMode::WallClock => (Some(config.attempt_timeout_ms(model.n_clusters, attempt)), None),
            BudgetMode::Deterministic => (None, Some(config.attempt_iterations(model.n_clusters, attempt))),
        };
        let (sel, score, iterations) = search.run(&mut rng, budget_ms, budget_iterations);
        let feasible = score.0 == 0;
        attempts.push(AttemptStats {
            budget_ms,
            budget_iterations,
            elapsed_ms: t0.elapsed().as_secs_f64() * 1e3,
            iterations,
            feasible,
        });
        if best.as_ref().is_none_or(|b| lex(score, b.1) == Ordering::Less) {
            best = Some((sel, score));
        }
        if feasible {
            break;
        }
    }
    let (sel, _) = best.expect("at least one attempt runs");
    let assignment: Vec<usize> = sel.iter().map(|&i| i as usize).collect();
    let e = evaluate(&assignment, model);
    let error = e.error(&model.constraints);
    Ok(Solution {
        assignment,
        constraint_error: error,
        objective_value: e.objective,
        feasible: error == 0,
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
        retries_used: attempts.len() as u32 - 1,
        iterations: attempts.iter().map(|a| a.iterations).sum(),
        attempts,
    })
}

struct Search<'m> {
    model: &'m EfopModel,
    config: &'m SolverConfig,
    eval: FastEvaluator<'m>,
    selected: Vec<bool>,
}

impl<'m> Search<'m> {
    fn new(model: &'m EfopModel, config: &'m SolverConfig) -> Self {
        Search { model, config, eval: FastEvaluator::new(model), selected: vec![false; model.candidates.len()] }
    }

    fn score(&mut self, sel: &[u32]) -> (u32, f64) {
        let e = self.eval.evaluate(sel);
        (e.error(&self.model.constraints), e.objective)
    }

    fn random_assignment(&mut self, rng: &mut ChaCha8Rng) -> Vec<u32> {
        let k = self.model.candidates.len();
        let mut sel: Vec<u32> =
            rand::seq::index::sample(rng, k, self.model.required_selected).into_iter().map(|i| i as u32).collect();
        sel.sort_unstable();
        self.selected.iter_mut().for_each(|s| *s = false);
        for &i in &sel {
            self.selected[i as usize] = true;
        }
        sel
    }

    /// A random sample of unselected candidates, written into `out`.
    fn sample_unselected(&self, rng: &mut ChaCha8Rng, out: &mut Vec<u32>) {
        out.clear();
        out.extend((0..self.model.candidates.len() as u32).filter(|&i| !self.selected[i as usize]));
        let n = self.config.sample_size.min(out.len());
        let skip = out.len() - n;
        // The chosen elements end up at the tail.
        out.partial_shuffle(rng, n);
        out.drain(..skip);
    }

    /// Error attributable to each selected candidate.
    fn contributions(&mut self, cur: &[u32], f_clust: u32) -> Vec<u32> {
        let cons = self.model.constraints.clone();
        let mut out = Vec::with_capacity(cur.len());
        let mut rest = Vec::with_capacity(cur.len());
        for (i, &s) in cur.iter().enumerate() {
            let mut v = 0;
            if cons.contains(&Constraint::NoCrossings) {
                v += cur.iter().filter(|&&t| t != s && self.eval.crosses(s as usize, t as usize)).count() as u32;
            }
            if cons.contains(&Constraint::MaxOneClusterPerRegion) {
                rest.clear();
                rest.extend(cur.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &t)| t));
                let without = self.eval.evaluate(&rest).f_clust;
                v += f_clust.saturating_sub(without);
            }
            out.push(v);
        }
        out
    }

    fn swapped(cur: &[u32], out: usize, inn: u32) -> Vec<u32> {
        let mut v = Vec::with_capacity(cur.len());
        Self::swap_into(cur, out, inn, &mut v);
        v
    }

    fn swap_into(cur: &[u32], out: usize, inn: u32, v: &mut Vec<u32>) {
        v.clear();
        v.extend(cur.iter().enumerate().filter(|&(j, _)| j != out).map(|(_, &t)| t));
        let at = v.partition_point(|&t| t < inn);
        v.insert(at, inn);
    }

    /// One budgeted attempt; returns the best selection, its score and the
    /// iterations performed.
    fn run(
        &mut self,
        rng: &mut ChaCha8Rng,
        budget_ms: Option<u64>,
        budget_iterations: Option<u64>,
    ) -> (Vec<u32>, (u32, f64), u64) {
        let start = Instant::now();
        let mut cur = self.random_assignment(rng);
        let mut cur_score = self.score(&cur);
        let mut best = (cur.clone(), cur_score);
        let mut stall = 0u32;
        let mut iterations = 0u64;
        let mut rest = Vec::with_capacity(cur.len());
        let mut cand = Vec::with_capacity(cur.len());
        let mut sample = Vec::new();
        let mut scored: Vec<ScoredSwap> = Vec::new();
        loop {
            if let Some(n) = budget_iterations {
                if iterations >= n {
                    break;
                }
            }
            if let Some(ms) = budget_ms {
                if start.elapsed().as_secs_f64() * 1e3 >= ms as f64 {
                    break;
                }
            }
            iterations += 1;

            let cur_eval = self.eval.evaluate(&cur);
            let f_clust = cur_eval.f_clust;
            let contrib = self.contributions(&cur, f_clust);
            let top = *contrib.iter().max().expect("selection is non-empty");
            let tied: Vec<usize> = (0..cur.len()).filter(|&i| contrib[i] == top).collect();
            let out = tied[rng.gen_range(0..tied.len())];

            self.sample_unselected(rng, &mut sample);
            let counts_crossings = self.model.constraints.contains(&Constraint::NoCrossings);
            let min_sep = self.model.objective == Objective::MinSeparationLength;
            rest.clear();
            rest.extend(cur.iter().enumerate().filter(|&(j, _)| j != out).map(|(_, &t)| t));
            let rest_crossings = cur_eval.f_cross - self.eval.cross_count(cur[out] as usize, &rest);
            let rest_length = cur_eval.objective - self.model.candidates[cur[out] as usize].length;
            // Only a swap that beats the current state can be taken, so the
            // current score is the initial bound.
            let mut best_move: Option<u32> = None;
            let mut bound = cur_score;
            // Per sampled swap: its exact score, or its crossing count when a
            // full evaluation was skipped.
            scored.clear();
            for &u in &sample {
                let crossings = rest_crossings + self.eval.cross_count(u as usize, &rest);
                // Crossings bound the error from below and the min-sep
                // objective is a plain sum, so either can rule a swap out.
                let lower = if counts_crossings { crossings } else { 0 };
                let length = rest_length + self.model.candidates[u as usize].length;
                let not_shorter = min_sep && (length > bound.1 || same_objective(length, bound.1));
                if lower > bound.0 || (lower == bound.0 && not_shorter) {
                    scored.push((u, crossings, None));
                    continue;
                }
                Self::swap_into(&cur, out, u, &mut cand);
                let s = self.score(&cand);
                if lex(s, bound) == Ordering::Less {
                    best_move = Some(u);
                    bound = s;
                }
                scored.push((u, crossings, Some(s)));
            }
            let mut moved_to = None;
            match best_move {
                Some(u) => {
                    moved_to = Some(u);
                    stall = 0;
                }
                None => {
                    stall += 1;
                    if rng.gen_bool(self.config.plateau_walk_probability) {
                        let mut plateau: Vec<u32> = Vec::new();
                        for &(u, crossings, s) in &scored {
                            let err = match s {
                                Some(s) => s.0,
                                None if counts_crossings && crossings > cur_score.0 => continue,
                                None => {
                                    Self::swap_into(&cur, out, u, &mut cand);
                                    self.score(&cand).0
                                }
                            };
                            if err == cur_score.0 {
                                plateau.push(u);
                            }
                        }
                        if !plateau.is_empty() {
                            moved_to = Some(plateau[rng.gen_range(0..plateau.len())]);
                        }
                    }
                }
            }
            if let Some(u) = moved_to {
                self.selected[cur[out] as usize] = false;
                self.selected[u as usize] = true;
                cur = Self::swapped(&cur, out, u);
                cur_score = self.score(&cur);
                if lex(cur_score, best.1) == Ordering::Less {
                    best = (cur.clone(), cur_score);
                }
            }
            if stall >= self.config.stall_restart_iterations {
                cur = self.random_assignment(rng);
                cur_score = self.score(&cur);
                if lex(cur_score, best.1) == Ordering::Less {
                    best = (cur.clone(), cur_score);
                }
                stall = 0;
            }
        }
        (best.0, best.1, iterations)
    }
}

/// Objective equality up to floating-point noise (relative 1e-9).
pub fn same_objective(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Number of `r`-subsets of `n` items, saturating.
pub fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Exhaustive search over every selection of `n - 1` candidates. Selections
/// containing a crossing pair are skipped, since they are never feasible.
pub fn brute_force_solve(model: &EfopModel) -> Result<Solution, SolveError> {
    let k = model.candidates.len();
    let c = model.required_selected;
    if k < c || c == 0 {
        return Err(SolveError::TooFewCandidates { available: k, required: c });
    }
    let subsets = binomial(k, c);
    if subsets > BRUTE_FORCE_LIMIT {
        return Err(SolveError::InstanceTooLarge { subsets });
    }
    let started = Instant::now();
    let segs: Vec<_> = model.candidates.iter().map(|s| s.segment()).collect();
    let mut best: Option<(Vec<usize>, (u32, f64))> = None;
    let mut evaluated = 0u64;
    let mut stack: Vec<usize> = Vec::with_capacity(c);
    fn rec(
        model: &EfopModel,
        segs: &[crate::geometry::Segment],
        c: usize,
        from: usize,
        stack: &mut Vec<usize>,
        best: &mut Option<(Vec<usize>, (u32, f64))>,
        evaluated: &mut u64,
    ) {
        if stack.len() == c {
            *evaluated += 1;
            let e = evaluate(stack, model);
            let s = (e.error(&model.constraints), e.objective);
            if best.as_ref().is_none_or(|b| lex(s, b.1) == Ordering::Less) {
                *best = Some((stack.clone(), s));
            }
            return;
        }
        let k = model.candidates.len();
        for i in from..=k - (c - stack.len()) {
            if stack.iter().any(|&j| crate::geometry::segments_properly_cross(&segs[i], &segs[j])) {
                continue;
            }
            stack.push(i);
            rec(model, segs, c, i + 1, stack, best, evaluated);
            stack.pop();
        }
    }
    rec(model, &segs, c, 0, &mut stack, &mut best, &mut evaluated);
    let (assignment, score) = best.unwrap_or_else(|| {
        let a: Vec<usize> = (0..c).collect();
        let e = evaluate(&a, model);
        (a, (e.error(&model.constraints), e.objective))
    });
    Ok(Solution {
        assignment,
        constraint_error: score.0,
        objective_value: score.1,
        feasible: score.0 == 0,
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
        retries_used: 0,
        iterations: evaluated,
        attempts: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(20, 3), 1140);
        assert_eq!(binomial(2, 1), 2);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn budgets_double() {
        let c = SolverConfig::deterministic(1);
        assert_eq!(c.attempt_iterations(2, 0), 40_000);
        assert_eq!(c.attempt_iterations(2, 2), 160_000);
        assert_eq!(SolverConfig::default().attempt_timeout_ms(3, 1), 600);
    }
}
