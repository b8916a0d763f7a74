use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "chordlab",
    version,
    about = "Distributions of the intersection point of random chords and lines of a circle",
    long_about = None
)]
pub struct Cli {
    /// Worker threads for sampling and enumeration; falls back to the
    /// CHORDLAB_THREADS environment variable, then to all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tabulate the cumulative distribution P(l <= r) on an r-grid.
    Cdf(CurveArgs),
    /// Tabulate the intersection-distance density (endpoints model only).
    Density(CurveArgs),
    /// Draw intersection-distance samples and export them.
    Sample(SampleArgs),
    /// Kolmogorov-Smirnov test of a sampling run against the closed form.
    Kstest(KstestArgs),
    /// Count diagonal intersections of the regular n-gon.
    Ngon(NgonArgs),
    /// Apply the measure-to-intersection-law transform on an r-grid.
    Transform(TransformArgs),
    /// Probability that the intersection lands in an annulus sector.
    Region(RegionArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum ModelArg {
    Radius,
    Midpoint,
    Endpoints,
    Gaussian,
}

impl From<ModelArg> for chordlab::Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Radius => chordlab::Model::UniformRadius,
            ModelArg::Midpoint => chordlab::Model::UniformMidpoint,
            ModelArg::Endpoints => chordlab::Model::UniformEndpoints,
            ModelArg::Gaussian => chordlab::Model::Gaussian,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct GridArgs {
    /// Smallest grid radius.
    #[arg(long)]
    pub rmin: f64,
    /// Largest grid radius; must exceed rmin.
    #[arg(long)]
    pub rmax: f64,
    /// Number of grid points, at least 2.
    #[arg(long)]
    pub steps: usize,
    /// Point spacing; log grids need rmin > 0.
    #[arg(long, value_enum, default_value_t = Spacing::Linear)]
    pub spacing: Spacing,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; data goes to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CurveArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Absolute quadrature tolerance.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    /// Number of trials.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Stream into a fixed log-spaced histogram instead of keeping every
    /// distance in memory.
    #[arg(long)]
    pub histogram: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct KstestArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// PASS/FAIL threshold on the KS statistic.
    #[arg(long, default_value_t = 0.005)]
    pub threshold: f64,
    /// Absolute quadrature tolerance for the reference CDF.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct NgonArgs {
    /// Vertex count of the regular polygon.
    #[arg(long)]
    pub n: u32,
    /// Ascending query radii, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub radii: Vec<f64>,
    /// Count crossing pairs (intersections with multiplicity) per radius.
    #[arg(long)]
    pub multiplicity: bool,
    /// Count the extended-lines variant per radius.
    #[arg(long)]
    pub lines: bool,
    /// Count distinct interior points and compare with the closed formula.
    #[arg(long)]
    pub distinct: bool,
    /// Snapping tolerance for --distinct.
    #[arg(long, default_value_t = 1e-9)]
    pub snap_tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    /// Built-in line measure to transform.
    #[arg(long, value_enum, conflicts_with = "measure_file")]
    pub model: Option<ModelArg>,
    /// Tabulated CDF file (CSV with header `t,F`) to transform.
    #[arg(long)]
    pub measure_file: Option<PathBuf>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct RegionArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(long)]
    pub rlo: f64,
    #[arg(long)]
    pub rhi: f64,
    /// Sector start angle, radians.
    #[arg(long)]
    pub thlo: f64,
    /// Sector end angle, radians.
    #[arg(long)]
    pub thhi: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}
