//! `tdac`: run the ciphertext distinguishing experiment from the shell.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tdac::experiment::{self, ExperimentConfig, Overrides};
use tdac::Error;

const EXIT_CHECK_FAILED: u8 = 4;

#[derive(Parser)]
#[command(name = "tdac", version, about = "Topological distinguisher for toy GSW ciphertexts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON); defaults apply to anything left out
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overrides the config
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Use the noiseless q = 2 oracle
    #[arg(long, global = true)]
    leaky: bool,
    /// Single run with this lattice dimension
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Single run with this ciphertext side
    #[arg(long, global = true)]
    side: Option<usize>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate ciphertext datasets
    Gen,
    /// Extract persistence features
    Features,
    /// Search filtration directions and centers
    Gridsearch,
    /// Fit the decision tree and random forest
    Train,
    /// Score the models on the test split
    Evaluate,
    /// Write the accuracy table
    Report,
    /// All of the above
    Pipeline {
        /// Exit with status 4 unless a leaky run beats the baseline by 0.2
        #[arg(long)]
        check: bool,
    },
}

fn config(common: &Common) -> tdac::Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.apply(&Overrides {
        seed: common.seed,
        n: common.n,
        side: common.side,
        leaky: common.leaky,
    })?;
    Ok(cfg)
}

fn run(cli: Cli) -> tdac::Result<ExitCode> {
    if let Some(jobs) = cli.common.jobs {
        if jobs == 0 {
            return Err(Error::Config("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    let cfg = config(&cli.common)?;
    let out = &cli.common.out;
    match cli.command {
        Command::Gen => experiment::cmd_gen(&cfg, out)?,
        Command::Features => experiment::cmd_features(&cfg, out)?,
        Command::Gridsearch => {
            for (ctx, r) in cfg
                .run_contexts(out)?
                .iter()
                .zip(experiment::cmd_gridsearch(&cfg, out)?)
            {
                println!(
                    "{}\tdirection ({}, {})\tcenter ({}, {})\tvalidation {:.4}",
                    ctx.label,
                    r.best.direction[0],
                    r.best.direction[1],
                    r.best.center[0],
                    r.best.center[1],
                    r.best.validation_accuracy
                );
            }
        }
        Command::Train => experiment::cmd_train(&cfg, out)?,
        Command::Evaluate => {
            for e in experiment::cmd_evaluate(&cfg, out)? {
                println!(
                    "{}\tdecision tree {:.4}\trandom forest {:.4}",
                    e.run, e.accuracy.decision_tree, e.accuracy.random_forest
                );
            }
        }
        Command::Report => {
            let report = experiment::cmd_report(&cfg, out)?;
            print!("{}", report.markdown());
        }
        Command::Pipeline { check } => {
            let outcome = experiment::pipeline(&cfg, out)?;
            print!("{}", outcome.report.markdown());
            if check {
                let c = &outcome.check;
                let best = c.best.map_or("none".to_string(), |b| format!("{b:.4}"));
                println!(
                    "check: best accuracy {best} over {} (need {:.2}): {}",
                    c.considered.join(", "),
                    c.threshold,
                    if c.passed { "PASS" } else { "FAIL" }
                );
                if !c.passed {
                    return Ok(ExitCode::from(EXIT_CHECK_FAILED));
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
