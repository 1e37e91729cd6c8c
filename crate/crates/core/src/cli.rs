//! The `tcheby-mobo` command line: `run`, `oracle` and `compare`.
//!
//! Exit status 0 on success, 2 for configuration problems, 1 for failures
//! while running.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{Experiment, ExperimentConfig};
use crate::driver::{run_weight_sweep, summary_json, write_samples_csv, write_trace_csv, RunConfig};
use crate::error::{Error, Result};
use crate::evaluation::{
    compare_architectures, exhaustive_oracle, write_metrics_csv, write_pareto_csv, write_per_weight_csv,
    write_score_flags_csv, write_scores_csv, write_utopia_csv,
};

pub const LOG_ENV: &str = "TCHEBY_MOBO_LOG";

#[derive(Debug, Parser)]
#[command(name = "tcheby-mobo", version, about = "Weighted-Tchebycheff multi-objective Bayesian optimization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weight sweep for every configured architecture; writes traces, samples
    /// and summaries.
    Run(CommonArgs),
    /// Exhaustive search for the true utopia and Pareto points.
    Oracle(CommonArgs),
    /// Metrics and scores of the configured architectures against the oracle.
    Compare(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Master seed, overriding the file.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory, overriding the file.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker thread cap.
    #[arg(long)]
    pub threads: Option<usize>,
}

enum Failure {
    Config(Error),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Configuration(_) => Failure::Config(e),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn load(args: &CommonArgs) -> std::result::Result<Experiment, Failure> {
    let mut cfg = ExperimentConfig::load(&args.config).map_err(Failure::Config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.out = out.clone();
    }
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(Failure::Config(Error::Configuration("--threads must be at least 1".into())));
        }
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    cfg.resolve().map_err(Failure::Config)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> Result<()> {
    let mut f = create(dir, name)?;
    serde_json::to_writer_pretty(&mut f, value).map_err(|e| Error::Parse(e.to_string()))?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(())
}

fn cmd_run(exp: &Experiment) -> std::result::Result<(), Failure> {
    let mut failed = 0;
    for &arch in &exp.architectures {
        let cfg = RunConfig { architecture: arch, ..exp.run.clone() };
        let dir = exp.out.join(arch.tag());
        for (i, r) in run_weight_sweep(exp.problem.as_ref(), &exp.grid, &exp.weights, &cfg).into_iter().enumerate() {
            match r {
                Ok(run) => {
                    write_trace_csv(&run, create(&dir, &format!("w{i:02}_trace.csv"))?)?;
                    write_samples_csv(&run, create(&dir, &format!("w{i:02}_samples.csv"))?)?;
                    write_json(&dir, &format!("w{i:02}_summary.json"), &summary_json(&run))?;
                    log::info!("architecture {arch} weight {:?}: {} evaluations, {}", run.weight, run.evaluations, run.stop.tag());
                }
                Err(e) => {
                    eprintln!("error: architecture {arch}: {e}");
                    failed += 1;
                }
            }
        }
    }
    if failed > 0 {
        return Err(Failure::Runtime(format!("{failed} run(s) failed")));
    }
    Ok(())
}

fn cmd_oracle(exp: &Experiment) -> std::result::Result<(), Failure> {
    let oracle = exhaustive_oracle(exp.problem.as_ref(), &exp.grid, &exp.weights).map_err(|e| Failure::Runtime(e.to_string()))?;
    write_utopia_csv(&oracle, create(&exp.out, "utopia.csv")?)?;
    write_pareto_csv(&oracle, create(&exp.out, "pareto.csv")?)?;
    Ok(())
}

fn cmd_compare(exp: &Experiment) -> std::result::Result<(), Failure> {
    let cmp = compare_architectures(exp.problem.as_ref(), &exp.grid, &exp.architectures, &exp.weights, &exp.run)
        .map_err(|e| Failure::Runtime(e.to_string()))?;
    for cell in &cmp.cells {
        for (w, msg) in &cell.failures {
            eprintln!("warning: architecture {} weight {w:?} failed: {msg}", cell.architecture);
        }
    }
    for (name, s) in &cmp.scores.criteria {
        if s.degenerate {
            log::warn!("criterion {name}: all architectures tie, every score set to 100");
        }
    }
    write_metrics_csv(&cmp, create(&exp.out, "metrics.csv")?)?;
    write_scores_csv(&cmp.scores, create(&exp.out, "scores.csv")?)?;
    write_score_flags_csv(&cmp.scores, create(&exp.out, "score_flags.csv")?)?;
    write_per_weight_csv(&cmp, create(&exp.out, "per_weight.csv")?)?;
    Ok(())
}

pub fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or(LOG_ENV, "warn")).init();
    let cli = Cli::parse();
    let (args, f): (&CommonArgs, fn(&Experiment) -> std::result::Result<(), Failure>) = match &cli.command {
        Command::Run(a) => (a, cmd_run),
        Command::Oracle(a) => (a, cmd_oracle),
        Command::Compare(a) => (a, cmd_compare),
    };
    let outcome = load(args).and_then(|exp| f(&exp));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("tcheby-mobo: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("tcheby-mobo: error: {e}");
            ExitCode::from(1)
        }
    }
}
