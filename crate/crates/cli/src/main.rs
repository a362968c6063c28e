//! chancap: channel capacity estimation, identity verification and trade-off
//! region export.
//!
//! Exit codes: 0 success, 2 malformed input, 3 resource/dimension overflow,
//! 4 verification failure, 5 infeasible profile.

mod commands;
mod report;

use clap::{Args, Parser, Subcommand};

use chancap_core::Error;

#[derive(Parser)]
#[command(
    name = "chancap",
    about = "Quantum-channel capacity toolkit: capacities, identities and trade-off regions",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct OptimizerArgs {
    /// Optimizer seed; identical seeds give byte-identical outputs.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of ascent restarts.
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    /// Iteration cap per restart.
    #[arg(long, default_value_t = 2000)]
    max_iters: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a capacity functional of a channel by optimization.
    Capacity {
        /// Channel JSON file.
        #[arg(long)]
        channel: std::path::PathBuf,
        /// Objective: coherent, qmi or holevo.
        #[arg(long, default_value = "coherent")]
        objective: String,
        /// Number of channel uses (coherent information only).
        #[arg(short = 'n', long, default_value_t = 1)]
        n: usize,
        /// Ensemble size for the holevo objective (default d^2).
        #[arg(long)]
        ensemble_size: Option<usize>,
        #[command(flatten)]
        opt: OptimizerArgs,
        /// Write the JSON report here as well as to stdout.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Run a randomized verification suite.
    Verify {
        /// Suite: decomposition, entropy-exchange-dual or concavity.
        #[arg(long)]
        suite: String,
        /// System dimension d.
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Register dimension for the decomposition suite.
        #[arg(long, default_value_t = 2)]
        delta: usize,
        /// Channel uses for the decomposition suite.
        #[arg(short = 'n', long, default_value_t = 1)]
        n: usize,
        /// Number of randomized trials.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run the suite against this fixed channel instead of random ones.
        #[arg(long)]
        channel: Option<std::path::PathBuf>,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Sweep trade-off bounds along one axis and export the curve as CSV.
    Region {
        /// Profile JSON file.
        #[arg(long)]
        profile: std::path::PathBuf,
        /// Swept axis: p or y.
        #[arg(long)]
        axis: String,
        /// Feedback dits per use (number or "inf").
        #[arg(long, default_value = "0")]
        x: String,
        /// Forward dits per use (number or "inf").
        #[arg(long, default_value = "0")]
        y: String,
        /// Shared e-dits per use (number or "inf").
        #[arg(long, default_value = "0")]
        p: String,
        /// Sweep grid LO:HI:STEPS.
        #[arg(long)]
        range: String,
        /// Append one sample at the infinite end of the axis.
        #[arg(long, default_value_t = false)]
        end_inf: bool,
        /// Emit violations and continue in bounds-only mode.
        #[arg(long, default_value_t = false)]
        force: bool,
        /// Evaluate under the conjectured saturation threshold E_Q = Q_E - Q.
        #[arg(long, default_value_t = false)]
        bowen: bool,
        /// CSV output path (stdout when omitted).
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Derive a channel profile by running the optimizers.
    ProfileDerive {
        #[arg(long)]
        channel: std::path::PathBuf,
        /// Largest tensor power used for the coherent-information search.
        #[arg(long, default_value_t = 2)]
        n_cap: usize,
        #[command(flatten)]
        opt: OptimizerArgs,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Validate a profile against every constraint family.
    ProfileValidate {
        #[arg(long)]
        profile: std::path::PathBuf,
        /// Check under the conjectured saturation threshold.
        #[arg(long, default_value_t = false)]
        bowen: bool,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
}

/// Error plus the exit code it maps to.
pub(crate) struct CliFailure {
    pub code: i32,
    pub message: String,
}

impl CliFailure {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for CliFailure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::DimensionOverflow { .. } => 3,
            Error::InfeasibleProfile { .. } => 5,
            _ => 2,
        };
        CliFailure::new(code, e.to_string())
    }
}

impl From<std::io::Error> for CliFailure {
    fn from(e: std::io::Error) -> Self {
        CliFailure::new(2, format!("io error: {e}"))
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Capacity {
            channel,
            objective,
            n,
            ensemble_size,
            opt,
            out,
        } => commands::capacity(&channel, &objective, n, ensemble_size, &opt, out.as_deref()),
        Command::Verify {
            suite,
            d,
            delta,
            n,
            trials,
            seed,
            channel,
            out,
        } => commands::verify(&suite, d, delta, n, trials, seed, channel.as_deref(), out.as_deref()),
        Command::Region {
            profile,
            axis,
            x,
            y,
            p,
            range,
            end_inf,
            force,
            bowen,
            out,
        } => commands::region(
            &profile,
            &axis,
            &x,
            &y,
            &p,
            &range,
            end_inf,
            force,
            bowen,
            out.as_deref(),
        ),
        Command::ProfileDerive {
            channel,
            n_cap,
            opt,
            out,
        } => commands::profile_derive(&channel, n_cap, &opt, out.as_deref()),
        Command::ProfileValidate {
            profile,
            bowen,
            out,
        } => commands::profile_validate(&profile, bowen, out.as_deref()),
    };
    if let Err(failure) = result {
        eprintln!("error: {}", failure.message);
        std::process::exit(failure.code);
    }
}

pub(crate) use OptimizerArgs as OptArgs;
