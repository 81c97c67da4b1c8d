use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "spectral-rates",
    version,
    about = "Laguerre and Hermite spectral convergence rates"
)]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output file (coeffs, lemma-check) or directory (figures).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expansion coefficients of a singular function, as CSV.
    Coeffs(CoeffsArgs),
    /// Fit the decay rate of a coefficient CSV against the prediction.
    Rates(RatesArgs),
    /// Regenerate the data behind one figure.
    Figures(FiguresArgs),
    /// Decay check of an oscillatory integral family.
    LemmaCheck(LemmaArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    LaguerreEndpoint,
    LaguerreInterior,
    HermiteInterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SmoothArg {
    One,
    ExpNeg,
    Lorentzian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ViewArg {
    Raw,
    Normalized,
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Laguerre parameter.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Singularity exponent (`δ`, `γ` or `s`).
    #[arg(long, visible_aliases = ["delta", "gamma", "s"], allow_negative_numbers = true)]
    pub exponent: f64,
    #[arg(long, default_value_t = 0)]
    pub mu: u32,
    /// Singular point (`x₀` or `z₀`).
    #[arg(long, visible_aliases = ["x0", "z0"], default_value_t = 0.0, allow_negative_numbers = true)]
    pub location: f64,
    #[arg(long, value_enum, default_value_t = SmoothArg::One)]
    pub smooth: SmoothArg,
    /// Degrees: `lo:hi`, `lo:hi:step`, `lo:hi:dyadic` or `n1,n2,...`.
    #[arg(long)]
    pub n: String,
    /// Absolute quadrature tolerance per coefficient.
    #[arg(long, default_value_t = spectral_rates::coefficients::DEFAULT_ABS_TOL)]
    pub tol: f64,
    /// Sample the oscillation window around every requested degree of an
    /// interior family, for envelope fits.
    #[arg(long)]
    pub no_envelope: bool,
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    /// Coefficient CSV written by `coeffs`.
    pub csv: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    pub rate_tol: f64,
    /// Fit window `lo:hi` in degrees.
    #[arg(long)]
    pub window: Option<String>,
    /// Coefficient view (default: raw for Laguerre, normalized for Hermite).
    #[arg(long, value_enum)]
    pub view: Option<ViewArg>,
    /// Override the predicted exponent.
    #[arg(long, allow_negative_numbers = true)]
    pub predicted: Option<f64>,
    /// Override the log power of the model.
    #[arg(long)]
    pub log_power: Option<u32>,
}

#[derive(Debug, Args)]
pub struct FiguresArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=6))]
    pub figure: u8,
    /// Largest degree of coefficient figures; error figures use truncation
    /// orders up to half of it and coefficients up to twice it.
    #[arg(long, default_value_t = 2048)]
    pub n_max: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LemmaFamilyArg {
    LogAtZero,
    LogAtB,
    InteriorLeft,
    InteriorRight,
    Signed,
    LaguerreTransform,
    HermiteTransform,
}

#[derive(Debug, Args)]
pub struct LemmaArgs {
    #[arg(long, value_enum)]
    pub family: LemmaFamilyArg,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub tau: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub mu: u32,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub nu: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long, value_enum, default_value_t = SmoothArg::One)]
    pub psi: SmoothArg,
    /// Odd degrees for the Hermite family.
    #[arg(long)]
    pub odd: bool,
    /// Frequencies or degrees (default `16:16384:dyadic` for frequencies,
    /// `64:2048:dyadic` for degrees).
    #[arg(long)]
    pub range: Option<String>,
    #[arg(long, default_value_t = 0.1)]
    pub rate_tol: f64,
}
