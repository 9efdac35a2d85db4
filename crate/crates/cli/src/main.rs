mod commands;
mod spec;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use halfmap::HalfMapError;

use crate::spec::SpecError;

/// Poincaré half-maps of planar linear systems and crossing orbits of
/// two-zone piecewise linear systems.
#[derive(Debug, Parser)]
#[command(name = "halfmap", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnchorArg {
    /// Maclaurin series of P at y0 = 0 (needs P(0) = 0, a != 0).
    Origin,
    /// Taylor series at y0 = 0 when P(0) = ŷ1 < 0.
    Shifted,
    /// Half-integer series at ŷ0 > 0 where P(ŷ0) = 0.
    Puiseux,
    /// Expansion at y0 = +inf (focus or center).
    Infinity,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON system specification; `-` reads standard input.
    spec: PathBuf,
    /// Write the main output here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Solver tolerance (root tolerance for `orbits`).
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// P, P', P'' and sign(y0 + P) at given points.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Comma-separated points (decimals or p/q).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        y0: Vec<String>,
        /// LO:HI:STEPS
        #[arg(long)]
        range: Option<String>,
        /// Add the flow-oracle value and its deviation.
        #[arg(long)]
        oracle: bool,
    },
    /// Series coefficients at an anchor as (exponent, coefficient) pairs.
    Series {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        anchor: Option<AnchorArg>,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Crossing periodic orbits of a piecewise system.
    Orbits {
        #[command(flatten)]
        common: Common,
        /// Check every orbit for closure under the flow oracle.
        #[arg(long)]
        oracle: bool,
        /// Write displacement samples (CSV) here.
        #[arg(long)]
        samples: Option<PathBuf>,
        /// Range for the displacement samples, LO:HI:STEPS.
        #[arg(long)]
        range: Option<String>,
        /// Skip the analytic certificates and search numerically.
        #[arg(long)]
        no_certificates: bool,
    },
    /// Plot data: (y0, P(y0)) over a range, and optional orbit traces.
    Sample {
        #[command(flatten)]
        common: Common,
        /// LO:HI:STEPS
        #[arg(long)]
        range: Option<String>,
        #[arg(long)]
        oracle: bool,
        /// Start points of left flights to trace (zone specs only).
        #[arg(long, value_delimiter = ',')]
        trace: Vec<f64>,
        /// Where the traces go (CSV: y0, t, x, y).
        #[arg(long)]
        traces_out: Option<PathBuf>,
        /// Points per trace.
        #[arg(long, default_value_t = 200)]
        trace_points: usize,
    },
    /// Reduce raw linear systems to Liénard form.
    Reduce {
        #[command(flatten)]
        common: Common,
    },
}

/// Exit status for an error: 2 invalid spec, 3 nonexistent half-map,
/// 4 search budget exceeded, 1 anything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<SpecError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<HalfMapError>() {
        Some(
            HalfMapError::InvalidParams(_)
            | HalfMapError::PreconditionViolated(_)
            | HalfMapError::WrongSide(_)
            | HalfMapError::NotInvertible(_),
        ) => 2,
        Some(HalfMapError::NonexistentHalfMap(_) | HalfMapError::DomainError(_)) => 3,
        Some(HalfMapError::SearchBudgetExceeded { .. }) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval {
            common,
            y0,
            range,
            oracle,
        } => commands::eval(&common, &y0, range.as_deref(), oracle),
        Command::Series {
            common,
            anchor,
            order,
        } => commands::series(&common, anchor, order),
        Command::Orbits {
            common,
            oracle,
            samples,
            range,
            no_certificates,
        } => commands::orbits(
            &common,
            oracle,
            samples.as_deref(),
            range.as_deref(),
            no_certificates,
        ),
        Command::Sample {
            common,
            range,
            oracle,
            trace,
            traces_out,
            trace_points,
        } => commands::sample(
            &common,
            range.as_deref(),
            oracle,
            &trace,
            traces_out.as_deref(),
            trace_points,
        ),
        Command::Reduce { common } => commands::reduce(&common),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
