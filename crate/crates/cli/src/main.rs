use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use terrasect::regions::{analyze_timed, AnalysisConfig};
use terrasect::separation::{ModelConfig, Objective};
use terrasect::solver::{BudgetMode, SolverConfig};
use terrasect_cli::oracle::{oracle_check, ZoneCheck};
use terrasect_cli::report::RunReport;
use terrasect_cli::{bench, load_map_file, svg};

#[derive(Parser)]
#[command(name = "terrasect", version, about = "Region and choke-point analysis for RTS maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyse one map and write the result as JSON and/or SVG.
    Analyze {
        map: PathBuf,
        #[command(flatten)]
        opts: AnalysisOpts,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Time repeated analyses of every map in a directory.
    Bench {
        dir: PathBuf,
        /// Seeds 0..N are used for every map.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[arg(long, default_value_t = 5)]
        repetitions: usize,
        /// Write raw samples as CSV (map,rep,stage,ms).
        #[arg(long)]
        raw_csv: Option<PathBuf>,
        #[command(flatten)]
        opts: AnalysisOpts,
    },
    /// Compare the solver with exhaustive search on small zones.
    OracleCheck {
        map: PathBuf,
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        /// Check only this objective (both by default).
        #[arg(long = "only")]
        only: Option<ObjectiveArg>,
        #[command(flatten)]
        opts: AnalysisOpts,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    MinSep,
    Areas,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::MinSep => Objective::MinSeparationLength,
            ObjectiveArg::Areas => Objective::LeastSquaresAreas,
        }
    }
}

#[derive(Args)]
struct AnalysisOpts {
    #[arg(long, value_enum, default_value = "min-sep")]
    objective: ObjectiveArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    timeout_ms_per_cluster: u64,
    #[arg(long, default_value_t = 2)]
    max_retries: u32,
    #[arg(long, default_value_t = 1.0)]
    epsilon: f64,
    #[arg(long, default_value_t = 12.0)]
    cluster_threshold: f64,
    #[arg(long, default_value_t = 10.0)]
    max_edge: f64,
    /// Replace wall-clock timeouts with iteration budgets.
    #[arg(long)]
    deterministic: bool,
}

impl AnalysisOpts {
    fn config(&self) -> AnalysisConfig {
        AnalysisConfig {
            objective: self.objective.into(),
            solver: SolverConfig {
                base_timeout_ms_per_cluster: self.timeout_ms_per_cluster,
                max_retries_with_doubling: self.max_retries,
                seed: self.seed,
                mode: if self.deterministic { BudgetMode::Deterministic } else { BudgetMode::WallClock },
                ..SolverConfig::default()
            },
            model: ModelConfig { epsilon: self.epsilon, max_edge: self.max_edge },
            cluster_threshold: self.cluster_threshold,
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Analyze { map, opts, json, svg: svg_out } => {
            let t = Instant::now();
            let data = load_map_file(&map)?;
            let load_ms = t.elapsed().as_secs_f64() * 1e3;
            let (result, timings) = analyze_timed(&data, &opts.config());
            if let Some(path) = json {
                fs::write(&path, result.to_json()).with_context(|| format!("cannot write {}", path.display()))?;
            }
            if let Some(path) = svg_out {
                fs::write(&path, svg::render_svg(&result, &data))
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
            for w in &result.warnings {
                eprintln!("warning: {w}");
            }
            println!("{}", RunReport::new(&result, load_ms, timings));
            Ok(if result.fully_feasible() { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::Bench { dir, seeds, repetitions, raw_csv, opts } => {
            let (rows, samples) = bench::run_bench(&dir, seeds, repetitions, &opts.config())?;
            print!("{}", bench::format_table(&rows));
            if let Some(path) = raw_csv {
                let f = fs::File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
                bench::write_csv(&samples, f)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::OracleCheck { map, seeds, only, opts } => {
            let data = load_map_file(&map)?;
            let objectives = match only {
                Some(o) => vec![o.into()],
                None => vec![Objective::MinSeparationLength, Objective::LeastSquaresAreas],
            };
            let reports = oracle_check(&data, seeds, &objectives, &opts.config());
            if reports.is_empty() {
                println!("{}: no zone needs splitting", data.name);
            }
            let mut ok = true;
            for r in &reports {
                println!("{r}");
                if let ZoneCheck::Checked { runs, optimal_runs, .. } = r.check {
                    ok &= optimal_runs * 100 >= runs * 95;
                }
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
    }
}
