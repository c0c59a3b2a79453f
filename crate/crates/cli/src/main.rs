//! `commbound` command-line tool.
//!
//! Exit codes: 0 ok, 1 invalid input, 2 infeasible or over-claimed
//! certificate, 3 digest mismatch, 4 enumeration cap exceeded, 5 solver did
//! not converge.

mod commands;
mod failure;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use commbound::cbox::DEFAULT_ENUMERATION_CAP;

#[derive(Parser)]
#[command(name = "commbound", version, about = "Certified communication-cost lower bounds for two-party boxes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Primal,
    Dual,
    Both,
}

#[derive(Args, Clone, Copy)]
pub struct CapArg {
    /// Largest number of outcome tuples to enumerate.
    #[arg(long, env = "CBOX_CAP", default_value_t = DEFAULT_ENUMERATION_CAP, value_parser = clap::builder::TypedValueParser::map(clap::value_parser!(u64).range(1..), |v| v as usize))]
    pub cap: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Check a box file and print its shape and row-sum diagnostics.
    Validate { path: PathBuf },

    /// Build a box from pure states and two-outcome rank-1 measurements.
    Quantum(QuantumArgs),

    /// Compute the asymptotic communication lower bound of a box.
    Bound(BoundArgs),

    /// Re-check a certificate against a box by exhaustive enumeration.
    Verify {
        certificate: PathBuf,
        #[arg(value_name = "BOX")]
        cbox: PathBuf,
        #[command(flatten)]
        cap: CapArg,
    },

    /// Closed-form bounds for rank-1 measurements on dimensions 2 to 4.
    Analytic(AnalyticArgs),

    /// Monte Carlo checks of Haar overlap moments and cone measures.
    Mc(McArgs),
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("state_source").required(true).args(["states", "haar"]))]
#[command(group = clap::ArgGroup::new("axis_source").required(true).args(["axes", "haar_axes"]))]
pub struct QuantumArgs {
    /// JSON list of states; amplitudes are reals or [re, im] pairs.
    #[arg(long)]
    pub states: Option<PathBuf>,

    /// Draw COUNT Haar-random states in dimension N.
    #[arg(long, num_args = 2, value_names = ["N", "COUNT"])]
    pub haar: Option<Vec<usize>>,

    /// JSON list of measurement axes, same format as the states.
    #[arg(long)]
    pub axes: Option<PathBuf>,

    /// Draw COUNT Haar-random axes in the dimension of the states.
    #[arg(long, value_name = "COUNT")]
    pub haar_axes: Option<usize>,

    /// Seed for the states; axes use seed + 1.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output file; standard output when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct BoundArgs {
    #[arg(value_name = "BOX")]
    pub cbox: PathBuf,

    /// `uniform` or a JSON file `{"weights": [...]}`.
    #[arg(long, default_value = "uniform")]
    pub prior: String,

    #[arg(long, value_enum, default_value_t = Method::Both)]
    pub method: Method,

    /// Required certified gap in nats.
    #[arg(long, default_value_t = 1e-6, value_parser = positive)]
    pub tol: f64,

    #[command(flatten)]
    pub cap: CapArg,

    /// Write the dual certificate here (dual and both methods).
    #[arg(long)]
    pub certificate: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("output").required(true).args(["table", "fig1", "fig2"]))]
pub struct AnalyticArgs {
    /// Approximate, refined and feasible bounds with trivial references.
    #[arg(long)]
    pub table: bool,

    /// F over a θ grid at the refined parameters of dimension N.
    #[arg(long, num_args = 2, value_names = ["N", "GRID"])]
    pub fig1: Option<Vec<usize>>,

    /// Refined and approximate bounds against dimension.
    #[arg(long)]
    pub fig2: bool,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("check").required(true).args(["moments", "cone"]))]
pub struct McArgs {
    /// Second and fourth overlap moments.
    #[arg(long, num_args = 3, value_names = ["N", "SAMPLES", "SEED"])]
    pub moments: Option<Vec<String>>,

    /// Measure of the cone of half-angle THETA.
    #[arg(long, num_args = 4, value_names = ["N", "THETA", "SAMPLES", "SEED"])]
    pub cone: Option<Vec<String>>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

fn main() -> ExitCode {
    // usage errors exit with 1
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(failure::INVALID) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match cli.command {
        Command::Validate { path } => commands::validate(&path),
        Command::Quantum(args) => commands::quantum(&args),
        Command::Bound(args) => commands::bound(&args),
        Command::Verify { certificate, cbox, cap } => commands::verify(&certificate, &cbox, cap.cap),
        Command::Analytic(args) => commands::analytic(&args),
        Command::Mc(args) => commands::mc(&args),
    };
    match outcome {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {f}");
            f.exit_code()
        }
    }
}
