//! Repeated timed runs over a directory of maps.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use anyhow::Result;
use statrs::statistics::{Data, Median, Statistics};
use terrasect::regions::{analyze_timed, AnalysisConfig};

use crate::report::RunReport;
use crate::{load_map_file, map_files};

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub map: String,
    pub rep: usize,
    pub stage: String,
    pub ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub map: String,
    pub runs: usize,
    pub median_ms: f64,
    pub mean_ms: f64,
    pub std_dev_ms: f64,
    pub median_solve_ms: f64,
}

pub struct Summary {
    pub median: f64,
    pub mean: f64,
    pub population_std_dev: f64,
}

pub fn summarize(xs: &[f64]) -> Summary {
    Summary { median: Data::new(xs.to_vec()).median(), mean: xs.mean(), population_std_dev: xs.population_std_dev() }
}

/// Runs every map `seeds x repetitions` times. Each run loads the file and
/// analyses it; the `total` stage covers both.
pub fn run_bench(
    dir: &Path,
    seeds: u64,
    repetitions: usize,
    config: &AnalysisConfig,
) -> Result<(Vec<BenchRow>, Vec<Sample>)> {
    let mut rows = Vec::new();
    let mut samples = Vec::new();
    for path in map_files(dir)? {
        let mut totals = Vec::new();
        let mut solves = Vec::new();
        let mut name = String::new();
        let mut rep = 0;
        for seed in 0..seeds.max(1) {
            for _ in 0..repetitions.max(1) {
                let t = Instant::now();
                let map = load_map_file(&path)?;
                let load_ms = t.elapsed().as_secs_f64() * 1e3;
                let mut cfg = config.clone();
                cfg.solver.seed = seed;
                let (result, timings) = analyze_timed(&map, &cfg);
                let report = RunReport::new(&result, load_ms, timings);
                name = report.map.clone();
                for (stage, ms) in report.stages() {
                    samples.push(Sample { map: name.clone(), rep, stage: stage.to_string(), ms });
                }
                samples.push(Sample { map: name.clone(), rep, stage: "total".into(), ms: report.total_ms() });
                totals.push(report.total_ms());
                solves.push(report.timings.solving_ms);
                rep += 1;
            }
        }
        let s = summarize(&totals);
        rows.push(BenchRow {
            map: name,
            runs: totals.len(),
            median_ms: s.median,
            mean_ms: s.mean,
            std_dev_ms: s.population_std_dev,
            median_solve_ms: summarize(&solves).median,
        });
    }
    Ok((rows, samples))
}

pub fn format_table(rows: &[BenchRow]) -> String {
    let mut out = format!(
        "{:<24}{:>6}{:>14}{:>14}{:>16}{:>16}\n",
        "map", "runs", "median (ms)", "mean (ms)", "pop. std (ms)", "median solve"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<24}{:>6}{:>14.3}{:>14.3}{:>16.3}{:>16.3}\n",
            r.map, r.runs, r.median_ms, r.mean_ms, r.std_dev_ms, r.median_solve_ms
        ));
    }
    out
}

pub fn write_csv(samples: &[Sample], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["map", "rep", "stage", "ms"])?;
    for s in samples {
        w.write_record([s.map.as_str(), &s.rep.to_string(), s.stage.as_str(), &format!("{}", s.ms)])?;
    }
    w.flush()?;
    Ok(())
}
