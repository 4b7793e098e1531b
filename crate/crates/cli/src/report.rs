//! Per-run timing report.

use std::fmt;

use terrasect::regions::{AnalysisResult, StageTimings};

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub map: String,
    pub load_ms: f64,
    pub timings: StageTimings,
    pub zone_solve_ms: Vec<(u32, f64)>,
    /// Mean candidate count over solved zones, `None` when nothing was solved.
    pub mean_candidates: Option<f64>,
    pub regions: usize,
    pub feasible: bool,
}

impl RunReport {
    pub fn new(result: &AnalysisResult, load_ms: f64, timings: StageTimings) -> Self {
        let solved: Vec<usize> = result.stats.zones.iter().filter(|z| z.variables > 0).map(|z| z.variables).collect();
        RunReport {
            map: result.map.clone(),
            load_ms,
            zone_solve_ms: timings.zone_solve_ms.clone(),
            timings,
            mean_candidates: (!solved.is_empty()).then(|| solved.iter().sum::<usize>() as f64 / solved.len() as f64),
            regions: result.regions.len(),
            feasible: result.fully_feasible(),
        }
    }

    /// Named stage times, in pipeline order.
    pub fn stages(&self) -> Vec<(&'static str, f64)> {
        let t = &self.timings;
        vec![
            ("load", self.load_ms),
            ("labeling", t.labeling_ms),
            ("zoning", t.zoning_ms),
            ("clustering", t.clustering_ms),
            ("simplify", t.simplify_ms),
            ("solving", t.solving_ms),
            ("region_build", t.region_build_ms),
        ]
    }

    pub fn total_ms(&self) -> f64 {
        self.load_ms + self.timings.total_ms
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "map: {}", self.map)?;
        for (name, ms) in self.stages() {
            writeln!(f, "  {name:<14}{ms:>10.3} ms")?;
        }
        for (zone, ms) in &self.zone_solve_ms {
            writeln!(f, "    zone {zone:<8}{ms:>10.3} ms")?;
        }
        writeln!(f, "  {:<14}{:>10.3} ms", "total", self.total_ms())?;
        match self.mean_candidates {
            Some(m) => writeln!(f, "  mean candidates per solved zone: {m:.1}")?,
            None => writeln!(f, "  mean candidates per solved zone: 0 (nothing to solve)")?,
        }
        write!(f, "  regions: {}, all zones split: {}", self.regions, if self.feasible { "yes" } else { "no" })
    }
}
