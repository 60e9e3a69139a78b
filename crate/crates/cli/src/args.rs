use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "cdsphere",
    version,
    about = "Curvature, spectral and sampling checks for |y - x|^{-(n+alpha)} measures on S^n",
    after_help = "JSON output is an object {version, command, config, result}; `config` echoes every resolved flag.\n\
                  Exit codes: 0 success, 1 invalid input or numerical failure, 2 a proven inequality was violated.\n\
                  CDSPHERE_THREADS caps the worker threads."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Angular marginal density on a grid.
    ///
    /// JSON result: {normalization, median, rows: [{theta, pdf, cdf}]}. CSV: theta,pdf,cdf.
    Density(DensityArgs),
    /// Curvature-dimension certificate CD(rho, N).
    ///
    /// JSON result: {params, rho_analytic, N, rho_numeric, argmin, search_radius}. Exit 2 if the
    /// numerical minimum falls below the analytic constant.
    CdCheck(CdCheckArgs),
    /// Minimum of F_p over the disk of the given radius.
    ///
    /// JSON result: {min, argmin}.
    MinF(MinFArgs),
    /// Spectral gap with bound checks, or one sector on one grid when --ell is given.
    ///
    /// JSON result: {lambda, spectrum: {lambda_gap, sector, grids_used, extrapolated, error_estimate,
    /// sectors}, bounds: {lambda, checks}}; with --ell: {lambda, ell, grid}. Exit 2 on a bound violation.
    Spectrum(SpectrumArgs),
    /// Gap across a list of alpha values at fixed (n, s).
    ///
    /// CSV: alpha,s,lambda,sector,rho,lower_bound_cor14,bmz_low,bmz_high. JSON rows add ratio and error.
    AlphaScan(AlphaScanArgs),
    /// Model density phi, its CDF and the isoperimetric profile.
    ///
    /// JSON result: {rho, delta, c_norm, cheeger_lower, rows: [{t, phi, cdf, isop}]} where isop is
    /// evaluated at v = cdf. CSV: t,phi,cdf,isop.
    Profile(ProfileArgs),
    /// Model tail integral of phi beyond --radius.
    ///
    /// JSON result: {r, tail}.
    Tail(TailArgs),
    /// Cap isoperimetry check of both orientations at --grid angles.
    ///
    /// CSV: theta0,v,boundary_measure,lower_bound,slack. JSON result: {worst_slack, worst_theta0,
    /// passed, rows}. Exit 2 if some slack is below -1e-8.
    IsopCheck(IsopCheckArgs),
    /// Inverse-CDF samples of the polar angle.
    ///
    /// CSV: theta. bin: "CDSP", u32 version, u64 count, then little-endian f64.
    /// JSON result: {method, seed, thetas}.
    Sample(SampleArgs),
    /// Walk-on-spheres samples of the Brownian exit angle from x = (s, 0, ..., 0).
    ///
    /// Same formats as `sample`.
    BmSample(BmSampleArgs),
    /// Two-sample Kolmogorov-Smirnov test.
    ///
    /// Compares two batch files (CSV or binary) given by --a and --b, or, without files, walk-on-spheres
    /// against inverse-CDF sampling of the harmonic measure. JSON result: {statistic, p_value}.
    Ks(KsArgs),
    /// Exact, sampled and model tails of enlarged half-mass caps.
    ///
    /// CSV: r,exact,empirical,model_tail,std_error. Exit 2 if an exact tail exceeds the model tail.
    Concentration(ConcentrationArgs),
    /// Curvature constant epsilon of a norm and its implied certificate.
    ///
    /// JSON result: {epsilon, witness_y, witness_theta, samples, certificate: {rho, N},
    /// alpha_upper}.
    NormCheck(NormCheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    /// Binary angle arrays; sampling commands only.
    Bin,
}

#[derive(Debug, Args, Serialize)]
pub struct OutputArgs {
    /// Write here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args, Serialize)]
pub struct MeasureArgs {
    /// Sphere dimension (S^n in R^{n+1}).
    #[arg(long)]
    pub n: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    /// Pole radius |x|.
    #[arg(long, default_value_t = 0.0)]
    pub s: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct DensityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub measure: MeasureArgs,
    /// Number of interior grid angles.
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct CdCheckArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub measure: MeasureArgs,
    /// Search only the disk of radius s, giving a pole-specific constant.
    #[arg(long)]
    pub local: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct MinFArgs {
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub measure: MeasureArgs,
    /// Solve only this harmonic sector.
    #[arg(long)]
    pub ell: Option<usize>,
    /// Cell count for --ell.
    #[arg(long, default_value_t = 2048)]
    pub grid: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct AlphaScanArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.0)]
    pub s: f64,
    /// Comma-separated alphas; defaults to -n, -n/2, 0, 1, n, 2n, 3n - 4.1.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alphas: Option<Vec<f64>>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct ProfileArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    /// Number of t values on [-radius, radius].
    #[arg(long, default_value_t = 201)]
    pub grid: usize,
    #[arg(long, default_value_t = 5.0)]
    pub radius: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct TailArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    /// Distance r >= 0.
    #[arg(long)]
    pub radius: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct IsopCheckArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub measure: MeasureArgs,
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct SampleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub measure: MeasureArgs,
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct BmSampleArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.0)]
    pub s: f64,
    /// Stopping distance from the sphere.
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct KsArgs {
    /// First batch file.
    #[arg(long, requires = "b")]
    pub a: Option<PathBuf>,
    /// Second batch file.
    #[arg(long, requires = "a")]
    pub b: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 0.5)]
    pub s: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
    #[arg(long, default_value_t = 20_000)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct ConcentrationArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub measure: MeasureArgs,
    /// Largest enlargement r.
    #[arg(long, default_value_t = 2.0)]
    pub radius: f64,
    /// Number of r values, evenly spaced on (0, radius].
    #[arg(long, default_value_t = 20)]
    pub grid: usize,
    #[arg(long, default_value_t = 10_000)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct NormCheckArgs {
    #[arg(long)]
    pub n: usize,
    /// Exponent used for the implied certificate.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub alpha: f64,
    /// euclidean, ellipsoid:d0,d1,... (diagonal of A) or lp:p.
    #[arg(long, default_value = "euclidean")]
    pub norm: String,
    /// Random orthonormal pairs scored before descent.
    #[arg(long, default_value_t = 10_000)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Finite-difference step.
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

impl Command {
    pub fn output(&self) -> &OutputArgs {
        match self {
            Command::Density(a) => &a.output,
            Command::CdCheck(a) => &a.output,
            Command::MinF(a) => &a.output,
            Command::Spectrum(a) => &a.output,
            Command::AlphaScan(a) => &a.output,
            Command::Profile(a) => &a.output,
            Command::Tail(a) => &a.output,
            Command::IsopCheck(a) => &a.output,
            Command::Sample(a) => &a.output,
            Command::BmSample(a) => &a.output,
            Command::Ks(a) => &a.output,
            Command::Concentration(a) => &a.output,
            Command::NormCheck(a) => &a.output,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Density(_) => "density",
            Command::CdCheck(_) => "cd-check",
            Command::MinF(_) => "min-f",
            Command::Spectrum(_) => "spectrum",
            Command::AlphaScan(_) => "alpha-scan",
            Command::Profile(_) => "profile",
            Command::Tail(_) => "tail",
            Command::IsopCheck(_) => "isop-check",
            Command::Sample(_) => "sample",
            Command::BmSample(_) => "bm-sample",
            Command::Ks(_) => "ks",
            Command::Concentration(_) => "concentration",
            Command::NormCheck(_) => "norm-check",
        }
    }
}
