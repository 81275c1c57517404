mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Localized Hermite approximation: kernels, quadrature, frame decompositions and smoothness maps.
#[derive(Debug, Parser)]
#[command(name = "hermloc", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output format; each command has its own default.
    #[arg(long, value_enum, global = true)]
    pub output: Option<Format>,

    /// Write the result to this file (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FilterArg {
    Smooth,
    Linear,
    Sharp,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate psi_0..psi_{J-1} on a grid.
    Basis {
        #[arg(long, default_value_t = 8)]
        max_j: usize,
        #[arg(long, default_value = "-5:5:0.1", allow_hyphen_values = true)]
        grid: String,
    },
    /// Tabulate the localized kernel Phi_n(x, y) and its x-derivative at a fixed y.
    Kernel {
        #[arg(long, default_value_t = 16.0)]
        order: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        center: f64,
        #[arg(long, default_value = "-4:4:0.01", allow_hyphen_values = true)]
        grid: String,
        #[arg(long, value_enum, default_value = "smooth")]
        filter: FilterArg,
        /// Transition sharpness of the filter.
        #[arg(long, default_value_t = 1.0)]
        sharpness: f64,
    },
    /// Solve a quadrature rule on the points of a file.
    Quadrature {
        #[arg(long)]
        points: PathBuf,
        #[arg(long, default_value_t = hermloc::validation::CALIBRATED_ALPHA)]
        alpha: f64,
        /// Solve for this order instead of the admissible one.
        #[arg(long)]
        order: Option<f64>,
    },
    /// Frame decomposition tau_0 f, ..., tau_N f on a grid.
    Project {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value_t = 5)]
        levels: usize,
        #[arg(long, default_value = "-6:6:0.01", allow_hyphen_values = true)]
        grid: String,
    },
    /// Local smoothness map from windowed frame-level decay.
    Analyze {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value_t = 5)]
        levels: usize,
        #[arg(long, default_value_t = hermloc::analysis::DEFAULT_WINDOW_RADIUS)]
        window_radius: f64,
        /// Window centers as `a,b,c`; default is a stride of half the radius over --range.
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        centers: Option<Vec<f64>>,
        #[arg(long, default_value = "-3:3", allow_hyphen_values = true)]
        range: String,
        /// Norm exponent p (`inf` allowed).
        #[arg(long, default_value = "inf")]
        p: f64,
    },
    /// Run validation suites.
    Validate {
        /// Run only this suite.
        #[arg(long)]
        suite: Option<String>,
        #[arg(long, default_value_t = hermloc::validation::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = hermloc::validation::CALIBRATED_ALPHA)]
        alpha: f64,
        /// Point set for the MZ sandwich suite.
        #[arg(long, requires = "order")]
        points: Option<PathBuf>,
        /// Order used with --points.
        #[arg(long)]
        order: Option<f64>,
    },
}

/// The function being decomposed.
#[derive(Debug, Args)]
pub struct SourceArgs {
    /// Built-in function: gaussian, hermite:j, sqrtabs_bump, f1_tapered, f2_tapered.
    #[arg(long = "fn", conflicts_with = "samples")]
    pub function: Option<String>,
    /// Samples `x,f(x)` per line; needs MZ rules on the sample points.
    #[arg(long)]
    pub samples: Option<PathBuf>,
    /// Use MZ rules on these points instead of Lebesgue measure.
    #[arg(long, conflicts_with = "samples")]
    pub points: Option<PathBuf>,
    #[arg(long, default_value_t = hermloc::validation::CALIBRATED_ALPHA)]
    pub alpha: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(commands::Status::Success) => ExitCode::SUCCESS,
        Ok(commands::Status::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
