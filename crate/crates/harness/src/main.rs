use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use rirl_harness::config::parse_seed_range;
use rirl_harness::{check_bounds, run_experiment, ExperimentConfig, ExperimentKind, HarnessError, RunReport};

#[derive(Parser)]
#[command(name = "rirl", version, about = "Repeated reward-learning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Binary-search identification.
    Identify(RunArgs),
    /// Ellipsoid learner against a task stream.
    Mistakes(RunArgs),
    /// Ellipsoid learner against the adversary (mean mistakes).
    Lowerbound(RunArgs),
    /// Fixed environment with the designer.
    Fixedenv(RunArgs),
    /// Trajectory-feedback learner.
    Trajectory(RunArgs),
    /// Bandit -> MDP -> bandit round trips.
    Convert(RunArgs),
    /// Spread of a feature matrix.
    Spread(RunArgs),
    /// Re-check the bounds in a written report.
    Check {
        #[arg(long)]
        report: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Seeds `a..b` (end exclusive), replacing the config's list.
    #[arg(long)]
    seed_range: Option<String>,
    /// Output directory, replacing the config's.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(kind: ExperimentKind, args: RunArgs) -> Result<ExitCode, HarnessError> {
    let mut config = ExperimentConfig::load(&args.config)?;
    if config.kind != kind {
        return Err(HarnessError::Config(format!(
            "config is for {:?}, not {kind:?}",
            config.kind
        )));
    }
    if let Some(range) = &args.seed_range {
        config.seeds = parse_seed_range(range)?;
    }
    if let Some(out) = args.out {
        config.out_dir = Some(out);
    }
    let report = run_experiment(&config)?;
    let agg = &report.aggregate;
    if kind == ExperimentKind::Spread {
        println!("spread = {}", report.runs[0].bound);
    } else {
        println!(
            "{:?}: {} runs, mean mistakes {:.3}, max {}, {} = {:.4}, satisfied {:.3}, max final error {:.3e}",
            kind,
            agg.runs,
            agg.mean_mistakes,
            agg.max_mistakes,
            report.bound_name,
            report.runs[0].bound,
            agg.fraction_satisfied,
            agg.max_final_error
        );
    }
    if let Some(dir) = &config.out_dir {
        info!("outputs written to {}", dir.display());
    }
    Ok(verdict(&report))
}

fn verdict(report: &RunReport) -> ExitCode {
    let outcome = check_bounds(report);
    for m in &outcome.messages {
        eprintln!("bound violation: {m}");
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Identify(a) => run(ExperimentKind::Identify, a),
        Command::Mistakes(a) => run(ExperimentKind::Mistakes, a),
        Command::Lowerbound(a) => run(ExperimentKind::Lowerbound, a),
        Command::Fixedenv(a) => run(ExperimentKind::Fixedenv, a),
        Command::Trajectory(a) => run(ExperimentKind::Trajectory, a),
        Command::Convert(a) => run(ExperimentKind::Convert, a),
        Command::Spread(a) => run(ExperimentKind::Spread, a),
        Command::Check { report } => RunReport::load(&report).map(|r| verdict(&r)),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
