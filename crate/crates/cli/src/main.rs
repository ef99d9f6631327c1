//! Experiment runner for the misspecified social-learning laboratory.
//!
//! Exit codes: 0 success, 1 configuration error, 2 scenario invalid
//! (maintained experiment hypotheses violated at runtime).

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{ArgAction, Parser, Subcommand};

use mislearn::ModelError;
use mislearn_cli::{commands, config};
use mislearn_cli::config::{RunConfig, RunKind};

#[derive(Parser)]
#[command(
    name = "mislearn",
    version,
    about = "Sequential social learning with misspecified beliefs and costly belief correction"
)]
struct Cli {
    /// Configuration file of `key = value` lines (dotted sections).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override any configuration key, e.g. --set model.q0=0.65 (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE", global = true, action = ArgAction::Append)]
    sets: Vec<String>,
    /// Shortcut for sim.seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Shortcut for sim.reps.
    #[arg(long, global = true)]
    reps: Option<usize>,
    /// Shortcut for sim.horizon.
    #[arg(long, global = true)]
    horizon: Option<usize>,
    /// Shortcut for out.path; rows go to stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Shortcut for out.format (csv or json).
    #[arg(long, global = true)]
    format: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate equilibrium paths; one row per (replication, period).
    Simulate,
    /// Evaluate the value of education at a public LLR pair.
    Value {
        /// Uneducated-rule public LLR.
        #[arg(long = "LU", allow_hyphen_values = true)]
        lu: Option<f64>,
        /// Educated-rule public LLR.
        #[arg(long = "LE", allow_hyphen_values = true)]
        le: Option<f64>,
    },
    /// Rational vs. naive baseline: paired time-to-cascade paths.
    Benchmarks,
    /// Break-time experiment from a forced incorrect-cascade prefix.
    Breaktime {
        /// Maintained lower bound on the value of education.
        #[arg(long)]
        delta: Option<f64>,
        /// Maintained lower bound on the educated flip probability.
        #[arg(long)]
        pstar: Option<f64>,
    },
    /// Discounted welfare under the configured subsidy rule vs. none.
    Welfare,
    /// Evaluate myopic and target-break subsidies at a given state.
    Subsidy,
    /// Comparative-statics sweep over one primitive.
    Sweep {
        /// kappa0 | q1 | q0 | rho | runlength
        #[arg(long)]
        target: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        from: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        to: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Closed-form vs. pipeline education values on all short prefixes.
    Earlytable,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let scenario_invalid = err
                .chain()
                .any(|cause| matches!(cause.downcast_ref(), Some(ModelError::ScenarioInvalid { .. })));
            if scenario_invalid {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Ok(threads) = std::env::var("MISLEARN_THREADS") {
        let n: usize = threads
            .parse()
            .map_err(|_| anyhow::anyhow!("invalid MISLEARN_THREADS value `{threads}`"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .ok();
    }

    let kind = match &cli.command {
        Command::Simulate => RunKind::Simulate,
        Command::Value { .. } => RunKind::Value,
        Command::Benchmarks => RunKind::Benchmarks,
        Command::Breaktime { .. } => RunKind::BreakTime,
        Command::Welfare => RunKind::Welfare,
        Command::Subsidy => RunKind::Subsidy,
        Command::Sweep { .. } => RunKind::Sweep,
        Command::Earlytable => RunKind::EarlyTable,
    };

    let mut overrides = Vec::new();
    for set in &cli.sets {
        overrides.push(config::parse_override(set)?);
    }
    let mut config = RunConfig::resolve(kind, cli.config.as_deref(), &overrides)?;

    if let Some(seed) = cli.seed {
        config.set("sim.seed", seed.to_string())?;
    }
    if let Some(reps) = cli.reps {
        config.set("sim.reps", reps.to_string())?;
    }
    if let Some(horizon) = cli.horizon {
        config.set("sim.horizon", horizon.to_string())?;
    }
    if let Some(out) = &cli.out {
        config.set("out.path", out.display().to_string())?;
    }
    if let Some(format) = &cli.format {
        config.set("out.format", format.clone())?;
    }
    match &cli.command {
        Command::Value { lu, le } => {
            if let Some(lu) = lu {
                config.set("value.lu", lu.to_string())?;
            }
            if let Some(le) = le {
                config.set("value.le", le.to_string())?;
            }
        }
        Command::Breaktime { delta, pstar } => {
            if let Some(delta) = delta {
                config.set("breaktime.delta", delta.to_string())?;
            }
            if let Some(pstar) = pstar {
                config.set("breaktime.pstar", pstar.to_string())?;
            }
        }
        Command::Sweep {
            target,
            from,
            to,
            steps,
        } => {
            if let Some(target) = target {
                config.set("sweep.target", target.clone())?;
            }
            if let Some(from) = from {
                config.set("sweep.from", from.to_string())?;
            }
            if let Some(to) = to {
                config.set("sweep.to", to.to_string())?;
            }
            if let Some(steps) = steps {
                config.set("sweep.steps", steps.to_string())?;
            }
        }
        _ => {}
    }

    let result = commands::run(&config)?;
    for line in &result.summary {
        eprintln!("{line}");
    }
    result
        .table
        .write(config.out_path().as_deref(), config.format()?)?;
    Ok(())
}
