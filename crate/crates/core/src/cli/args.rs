use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "illposed",
    version,
    about = "Numerical diagnostics for ill-posed problems",
    allow_negative_numbers = true
)]
pub struct Cli {
    /// Output format (each subcommand has its own default).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Exit with status 3 when a diagnostic is inconclusive.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Round table values to this many decimals.
    #[arg(long, global = true)]
    pub round: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fixed-step trajectory of y' = f(x, y) as `n,x_n,y_n`.
    #[command(allow_negative_numbers = true)]
    Euler(EulerArgs),
    /// Blow-up diagnosis by step-size refinement.
    #[command(allow_negative_numbers = true)]
    Blowup(BlowupArgs),
    /// Euler estimates of y(target) for several step sizes.
    #[command(allow_negative_numbers = true)]
    Variability(VariabilityArgs),
    /// Cooling-law fits and feasible data ranges.
    #[command(subcommand)]
    Cooling(CoolingCommand),
    /// Averaging recurrence x_{n+2} = (x_{n+1} + x_n)/2.
    #[command(allow_negative_numbers = true)]
    Recurrence(RecurrenceArgs),
    /// Two-variable limit at the origin along trajectories.
    #[command(allow_negative_numbers = true)]
    Limit(LimitArgs),
    /// max |f| on shrinking circles around the origin.
    #[command(name = "polar-scan", allow_negative_numbers = true)]
    PolarScan(PolarScanArgs),
    /// Sign-change cells of F(x, y) = 0 near the origin.
    #[command(name = "implicit-scan", allow_negative_numbers = true)]
    ImplicitScan(ImplicitScanArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Euler,
    Rk4,
}

#[derive(Debug, Args)]
pub struct EulerArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub rhs: String,
    #[arg(long, default_value_t = 0.0)]
    pub x0: f64,
    #[arg(long, default_value_t = 0.0)]
    pub y0: f64,
    #[arg(long)]
    pub h: f64,
    #[arg(long)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Euler)]
    pub method: MethodArg,
}

#[derive(Debug, Args)]
pub struct BlowupArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub rhs: String,
    #[arg(long, default_value_t = 0.0)]
    pub x0: f64,
    #[arg(long, default_value_t = 0.0)]
    pub y0: f64,
    #[arg(long)]
    pub xmax: f64,
    #[arg(long, default_value_t = crate::blowup::DEFAULT_THRESHOLD)]
    pub threshold: f64,
    #[arg(long, default_value_t = crate::blowup::DEFAULT_H0)]
    pub h0: f64,
    #[arg(long, default_value_t = crate::blowup::DEFAULT_LEVELS)]
    pub levels: usize,
    #[arg(long, default_value_t = crate::blowup::DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    /// Skip the RK4 agreement check.
    #[arg(long)]
    pub no_cross_check: bool,
}

#[derive(Debug, Args)]
pub struct VariabilityArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub rhs: String,
    #[arg(long, default_value_t = 0.0)]
    pub x0: f64,
    #[arg(long, default_value_t = 0.0)]
    pub y0: f64,
    #[arg(long)]
    pub target: f64,
    #[arg(long, value_delimiter = ',', required = true)]
    pub h: Vec<f64>,
}

#[derive(Debug, Subcommand)]
pub enum CoolingCommand {
    /// Fit from readings at 0, t1 and 2*t1.
    #[command(allow_negative_numbers = true)]
    Fit(CoolingFitArgs),
    /// Middle readings that keep the fit physical.
    #[command(allow_negative_numbers = true)]
    Range(CoolingRangeArgs),
}

#[derive(Debug, Args)]
pub struct CoolingFitArgs {
    #[arg(long)]
    pub t1: f64,
    /// T0,T1,T2
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub temps: Vec<f64>,
    #[arg(long, default_value_t = crate::cooling::ABSOLUTE_ZERO)]
    pub floor: f64,
}

#[derive(Debug, Args)]
pub struct CoolingRangeArgs {
    /// T0,T2
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub temps: Vec<f64>,
    #[arg(long, default_value_t = crate::cooling::ABSOLUTE_ZERO)]
    pub floor: f64,
    /// Number of middle readings to sweep inside (T2, T0).
    #[arg(long)]
    pub sweep: Option<usize>,
    /// Reading spacing used for the sweep's rate constants.
    #[arg(long, default_value_t = 0.5)]
    pub t1: f64,
}

#[derive(Debug, Args)]
pub struct RecurrenceArgs {
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub b: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct LimitArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub f: String,
    /// X_EXPR,Y_EXPR in t; several separated by `;`.
    #[arg(long, allow_hyphen_values = true)]
    pub trajectory: Vec<String>,
    /// Add lines, a parabola, a square-root branch and both axes.
    #[arg(long)]
    pub default_set: bool,
    /// Add the level curve xy/(x+y) = A.
    #[arg(long, value_delimiter = ',')]
    pub level_curve: Vec<f64>,
    /// Decreasing parameter values approaching 0.
    #[arg(long, value_delimiter = ',')]
    pub schedule: Option<Vec<f64>>,
    /// Emit `t,x,y,f` plot points for a single trajectory instead of the report.
    #[arg(long)]
    pub points: bool,
}

#[derive(Debug, Args)]
pub struct PolarScanArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub f: String,
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    #[arg(long, default_value_t = 360)]
    pub angles: usize,
}

#[derive(Debug, Args)]
pub struct ImplicitScanArgs {
    #[arg(long = "F", allow_hyphen_values = true)]
    pub f: String,
    #[arg(long)]
    pub radius: f64,
    #[arg(long, default_value_t = 400)]
    pub grid: usize,
}
