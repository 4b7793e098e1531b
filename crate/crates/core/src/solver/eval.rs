//! Reference evaluation of the error functions and objectives by explicit,
//! exact polygon splitting.

use num_traits::Zero;

use crate::geometry::{
    point_in_polygon, polygon_area, rational_to_f64, segments_properly_cross, split_by_chords, Location, Polygon,
    Rational, Segment,
};
use crate::separation::{Constraint, EfopModel, Objective};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub f_cross: u32,
    pub f_clust: u32,
    pub objective: f64,
}

impl Evaluation {
    /// Sum of the error functions of the model's constraints.
    pub fn error(&self, constraints: &[Constraint]) -> u32 {
        constraints
            .iter()
            .map(|c| match c {
                Constraint::NoCrossings => self.f_cross,
                Constraint::MaxOneClusterPerRegion => self.f_clust,
            })
            .sum()
    }
}

fn segments(selected: &[usize], model: &EfopModel) -> Vec<Segment> {
    selected.iter().map(|&i| model.candidates[i].segment()).collect()
}

/// Number of unordered selected pairs that properly cross.
pub fn eval_f_cross(selected: &[usize], model: &EfopModel) -> u32 {
    let segs = segments(selected, model);
    let mut n = 0;
    for i in 0..segs.len() {
        for j in i + 1..segs.len() {
            if segments_properly_cross(&segs[i], &segs[j]) {
                n += 1;
            }
        }
    }
    n
}

/// Longest id-ordered prefix of the selection whose chords pairwise do not
/// cross. Regions are only defined for such a set.
pub fn noncrossing_prefix(selected: &[usize], model: &EfopModel) -> Vec<usize> {
    let mut ids = selected.to_vec();
    ids.sort_unstable();
    let mut out: Vec<usize> = Vec::with_capacity(ids.len());
    for id in ids {
        let s = model.candidates[id].segment();
        if out.iter().any(|&o| segments_properly_cross(&model.candidates[o].segment(), &s)) {
            break;
        }
        out.push(id);
    }
    out
}

/// Regions produced by the non-crossing prefix of the selection.
pub fn regions(selected: &[usize], model: &EfopModel) -> Vec<Polygon> {
    let prefix = noncrossing_prefix(selected, model);
    split_by_chords(&model.polygon, &segments(&prefix, model)).expect("filtered candidates split the zone cleanly")
}

/// Anchors per region, in region order.
pub fn clusters_per_region(regions: &[Polygon], model: &EfopModel) -> Vec<usize> {
    regions
        .iter()
        .map(|r| model.anchors.iter().filter(|&&a| point_in_polygon(a, r) == Location::Inside).count())
        .collect()
}

fn f_clust_of(counts: &[usize]) -> u32 {
    let max = counts.iter().copied().max().unwrap_or(0);
    let empty = counts.iter().filter(|&&c| c == 0).count();
    (max.saturating_sub(1) + empty) as u32
}

pub fn eval_f_clust(selected: &[usize], model: &EfopModel) -> u32 {
    f_clust_of(&clusters_per_region(&regions(selected, model), model))
}

/// Sum of squared deviations of the region areas from their mean, exact.
pub fn area_spread(areas: &[Rational]) -> Rational {
    if areas.is_empty() {
        return Rational::zero();
    }
    let mean = areas.iter().fold(Rational::zero(), |a, b| a + b) / Rational::from_integer(areas.len() as i128);
    areas.iter().fold(Rational::zero(), |acc, a| {
        let d = mean - a;
        acc + d * d
    })
}

/// Sum of selected lengths, added in ascending order.
pub fn separation_length(selected: &[usize], model: &EfopModel) -> f64 {
    let mut lengths: Vec<f64> = selected.iter().map(|&i| model.candidates[i].length).collect();
    lengths.sort_by(f64::total_cmp);
    lengths.iter().sum()
}

pub fn eval_objective(selected: &[usize], model: &EfopModel) -> f64 {
    match model.objective {
        Objective::MinSeparationLength => separation_length(selected, model),
        Objective::LeastSquaresAreas => {
            let areas: Vec<Rational> = regions(selected, model).iter().map(polygon_area).collect();
            rational_to_f64(&area_spread(&areas))
        }
    }
}

pub fn evaluate(selected: &[usize], model: &EfopModel) -> Evaluation {
    let regs = regions(selected, model);
    let objective = match model.objective {
        Objective::MinSeparationLength => separation_length(selected, model),
        Objective::LeastSquaresAreas => {
            rational_to_f64(&area_spread(&regs.iter().map(polygon_area).collect::<Vec<_>>()))
        }
    };
    Evaluation {
        f_cross: eval_f_cross(selected, model),
        f_clust: f_clust_of(&clusters_per_region(&regs, model)),
        objective,
    }
}
