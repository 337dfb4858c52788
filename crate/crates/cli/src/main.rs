//! `amalgam`: runs the numerical experiments and writes JSON/CSV reports.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error,
//! 3 numerical error (non-finite values, aliasing).

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod run;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Experiment, RunConfig};
use run::RunError;

#[derive(Parser)]
#[command(name = "amalgam", version, about = "Wiener amalgam norm experiments for the free Schrödinger flow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Numeric vs closed-form W(FL^1, L^inf) norm of chirps
    ChirpNorm(RunConfig),
    /// Small- and large-time decay of the kernel and evolved Gaussians
    Dispersive(RunConfig),
    /// Large-time slopes of W(FL^{r'}, L^r) for several r
    FixedTime(RunConfig),
    /// Local weak-Lorentz norm of the phi_alpha tail
    PhiAlphaTail(RunConfig),
    /// Space-time norms of Gaussian families
    Strichartz(RunConfig),
    /// Hölder duality on random pairs and pointwise control
    Holder(RunConfig),
    /// Partition of unity and its analysis/synthesis operators
    BupuCheck(RunConfig),
    /// Split-step solver with a time-dependent potential
    Potential(RunConfig),
    /// Names, anchors and default parameters of all experiments
    List,
}

/// Sizes the global pool from `AMALGAM_THREADS`.
fn configure_threads() -> Result<(), RunError> {
    let Ok(value) = std::env::var("AMALGAM_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| RunError::Config(format!("AMALGAM_THREADS must be a positive integer, got `{value}`")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| RunError::Config(e.to_string()))?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (exp, args) = match cli.command {
        Command::List => {
            print!("{}", run::list_experiments());
            return ExitCode::SUCCESS;
        }
        Command::ChirpNorm(a) => (Experiment::ChirpNorm, a),
        Command::Dispersive(a) => (Experiment::Dispersive, a),
        Command::FixedTime(a) => (Experiment::FixedTime, a),
        Command::PhiAlphaTail(a) => (Experiment::PhiAlphaTail, a),
        Command::Strichartz(a) => (Experiment::Strichartz, a),
        Command::Holder(a) => (Experiment::Holder, a),
        Command::BupuCheck(a) => (Experiment::BupuCheck, a),
        Command::Potential(a) => (Experiment::Potential, a),
    };
    match configure_threads().and_then(|()| run::run(exp, args)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
