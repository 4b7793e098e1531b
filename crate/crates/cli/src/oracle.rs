//! Solver versus exhaustive search on every zone small enough to enumerate.

use std::fmt;

use terrasect::map::MapData;
use terrasect::regions::{build_zone_models, AnalysisConfig};
use terrasect::separation::Objective;
use terrasect::solver::{binomial, brute_force_solve, same_objective, solve, BRUTE_FORCE_LIMIT};

#[derive(Clone, Debug, PartialEq)]
pub enum ZoneCheck {
    /// Too many subsets to enumerate.
    Skipped { subsets: u128 },
    /// Model could not be built.
    NoModel { reason: String },
    Checked {
        oracle_feasible: bool,
        optimum: f64,
        runs: usize,
        feasible_runs: usize,
        optimal_runs: usize,
        within_10_percent: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZoneOracleReport {
    pub zone: u32,
    pub objective: Objective,
    pub clusters: usize,
    pub variables: usize,
    pub check: ZoneCheck,
}

pub fn oracle_check(
    map: &MapData,
    seeds: u64,
    objectives: &[Objective],
    base: &AnalysisConfig,
) -> Vec<ZoneOracleReport> {
    let mut out = Vec::new();
    for &objective in objectives {
        let mut config = base.clone();
        config.objective = objective;
        for zm in build_zone_models(map, &config) {
            let clusters = zm.zone.clusters.len();
            let model = match zm.model {
                Ok(m) => m,
                Err(e) => {
                    out.push(ZoneOracleReport {
                        zone: zm.zone.id,
                        objective,
                        clusters,
                        variables: 0,
                        check: ZoneCheck::NoModel { reason: e.to_string() },
                    });
                    continue;
                }
            };
            let variables = model.candidates.len();
            let subsets = binomial(variables, model.required_selected);
            let check = if subsets > BRUTE_FORCE_LIMIT {
                ZoneCheck::Skipped { subsets }
            } else {
                let oracle = brute_force_solve(&model).expect("within the enumeration limit");
                let (mut feasible_runs, mut optimal_runs, mut within) = (0, 0, 0);
                for seed in 0..seeds {
                    let mut sc = config.solver.clone();
                    sc.seed = seed;
                    let sol = solve(&model, &sc).expect("model has enough candidates");
                    if sol.feasible {
                        feasible_runs += 1;
                    }
                    if sol.feasible == oracle.feasible {
                        if same_objective(sol.objective_value, oracle.objective_value) {
                            optimal_runs += 1;
                        }
                        if sol.objective_value <= oracle.objective_value + 0.1 * oracle.objective_value.abs() + 1e-9 {
                            within += 1;
                        }
                    }
                }
                ZoneCheck::Checked {
                    oracle_feasible: oracle.feasible,
                    optimum: oracle.objective_value,
                    runs: seeds as usize,
                    feasible_runs,
                    optimal_runs,
                    within_10_percent: within,
                }
            };
            out.push(ZoneOracleReport { zone: zm.zone.id, objective, clusters, variables, check });
        }
    }
    out
}

impl fmt::Display for ZoneOracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let obj = match self.objective {
            Objective::MinSeparationLength => "min-sep",
            Objective::LeastSquaresAreas => "areas",
        };
        write!(f, "zone {:<4} {:<8} n={} k={:<5} ", self.zone, obj, self.clusters, self.variables)?;
        match &self.check {
            ZoneCheck::Skipped { subsets } => write!(f, "skipped ({subsets} subsets)"),
            ZoneCheck::NoModel { reason } => write!(f, "no model: {reason}"),
            ZoneCheck::Checked { oracle_feasible, optimum, runs, feasible_runs, optimal_runs, within_10_percent } => {
                write!(
                    f,
                    "oracle {} {:.6}; optimal {}/{}, within 10% {}/{}, feasible {}/{}",
                    if *oracle_feasible { "feasible" } else { "infeasible" },
                    optimum,
                    optimal_runs,
                    runs,
                    within_10_percent,
                    runs,
                    feasible_runs,
                    runs
                )
            }
        }
    }
}
