//! Predicted decay rates, empirical rate fits and the Bessel-transform
//! decay harness.

use std::f64::consts::{LN_10, LN_2, PI};
use std::fmt;

use crate::coefficients::{
    power_log, Basis, CoefficientSeries, SingularFunctionSpec, SingularityKind, SmoothFactor,
};
use crate::error::{Error, Result};
use crate::orthopoly::{
    log_gamma_hermite, log_sigma, HermiteRecurrence, LaguerreBasis, LaguerreRecurrence,
};
use crate::quadrature::{integrate_vector_nodes, Oscillation, QuadNode, SingularOscillatoryPlan};
use crate::specfun::{bessel_j_unchecked, log_gamma_pos};

/// Statement a prediction is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TheoremTag {
    LaguerreEndpointCoefficient,
    LaguerreInteriorCoefficient,
    LaguerreEndpointProjection,
    LaguerreInteriorProjection,
    LaguerreEndpointSobolev,
    LaguerreInteriorSobolev,
    HermiteCoefficient,
    HermiteProjection,
    HermiteSobolev,
    BesselLogAtZero,
    BesselLogAtB,
    BesselInteriorLeft,
    BesselInteriorRight,
    BesselSigned,
    LaguerreTransform,
    HermiteTransform,
}

impl TheoremTag {
    pub fn as_str(self) -> &'static str {
        match self {
            TheoremTag::LaguerreEndpointCoefficient => "laguerre-endpoint-coefficient",
            TheoremTag::LaguerreInteriorCoefficient => "laguerre-interior-coefficient",
            TheoremTag::LaguerreEndpointProjection => "laguerre-endpoint-projection",
            TheoremTag::LaguerreInteriorProjection => "laguerre-interior-projection",
            TheoremTag::LaguerreEndpointSobolev => "laguerre-endpoint-sobolev",
            TheoremTag::LaguerreInteriorSobolev => "laguerre-interior-sobolev",
            TheoremTag::HermiteCoefficient => "hermite-coefficient",
            TheoremTag::HermiteProjection => "hermite-projection",
            TheoremTag::HermiteSobolev => "hermite-sobolev",
            TheoremTag::BesselLogAtZero => "bessel-log-at-0",
            TheoremTag::BesselLogAtB => "bessel-log-at-b",
            TheoremTag::BesselInteriorLeft => "bessel-interior-left",
            TheoremTag::BesselInteriorRight => "bessel-interior-right",
            TheoremTag::BesselSigned => "bessel-signed",
            TheoremTag::LaguerreTransform => "laguerre-transform",
            TheoremTag::HermiteTransform => "hermite-transform",
        }
    }
}

impl fmt::Display for TheoremTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Quantity whose decay is predicted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// Expansion coefficient, normalized (`â_n`, `ĥ_n`) or raw (`a_n`).
    Coefficient {
        normalized: bool,
    },
    L2Error,
    WeightedSupError,
    SobolevError(u32),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Coefficient { normalized: true } => write!(f, "coefficient-normalized"),
            Target::Coefficient { normalized: false } => write!(f, "coefficient-raw"),
            Target::L2Error => write!(f, "l2-error"),
            Target::WeightedSupError => write!(f, "sup-error"),
            Target::SobolevError(m) => write!(f, "sobolev-error-m{m}"),
        }
    }
}

/// Decay model `C n^{-p} ln^μ(2√n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePrediction {
    pub exponent_p: f64,
    pub log_power: u32,
    pub target: Target,
    pub source: TheoremTag,
    /// Raw exponent minus normalized exponent for coefficient targets
    /// (`α/2` for Laguerre); `None` where the raw view is not a power law.
    pub raw_shift: Option<f64>,
}

fn guard(ok: bool, tag: TheoremTag, text: String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::hypothesis(tag.as_str(), text))
    }
}

/// Theorem table of decay exponents, with the hypotheses checked first.
pub fn predict_rate(
    spec: &SingularFunctionSpec,
    alpha: Option<f64>,
    target: Target,
) -> Result<RatePrediction> {
    let mu = spec.log_power;
    let e = spec.exponent;
    if let Target::SobolevError(m) = target {
        if m > 3 {
            return Err(Error::domain(format!(
                "Sobolev order m ≤ 3 supported, got {m}"
            )));
        }
    }
    let (p, source, raw_shift) = match spec.kind {
        SingularityKind::LaguerreEndpoint | SingularityKind::LaguerreInterior { .. } => {
            let a = alpha.ok_or_else(|| Error::domain("Laguerre prediction needs α"))?;
            LaguerreBasis::new(a)?;
            let endpoint = matches!(spec.kind, SingularityKind::LaguerreEndpoint);
            if endpoint {
                let tag = TheoremTag::LaguerreEndpointCoefficient;
                guard(
                    a + e > -1.0,
                    tag,
                    format!("α+δ > -1 violated: α+δ = {}", a + e),
                )?;
                match target {
                    Target::Coefficient { normalized } => {
                        let p = 0.5 * a + e + 1.0;
                        (if normalized { p } else { p + 0.5 * a }, tag, Some(0.5 * a))
                    }
                    Target::L2Error => {
                        let tag = TheoremTag::LaguerreEndpointProjection;
                        guard(
                            a + 2.0 * e > -1.0,
                            tag,
                            format!("α+2δ > -1 violated: α+2δ = {}", a + 2.0 * e),
                        )?;
                        ((a + 2.0 * e + 1.0) / 2.0, tag, None)
                    }
                    Target::WeightedSupError => {
                        let tag = TheoremTag::LaguerreEndpointProjection;
                        guard(
                            a + 2.0 * e > -0.5,
                            tag,
                            format!("α+2δ > -1/2 violated: α+2δ = {}", a + 2.0 * e),
                        )?;
                        (0.5 * a + e + 0.25, tag, None)
                    }
                    Target::SobolevError(m) => {
                        let tag = TheoremTag::LaguerreEndpointSobolev;
                        let m = m as f64;
                        guard(
                            a + 2.0 * e > m - 1.0,
                            tag,
                            format!("α+2δ > m-1 violated: α+2δ = {}, m = {m}", a + 2.0 * e),
                        )?;
                        ((a + 2.0 * e + 1.0 - m) / 2.0, tag, None)
                    }
                }
            } else {
                let tag = TheoremTag::LaguerreInteriorCoefficient;
                guard(e > -1.0, tag, format!("γ > -1 violated: γ = {e}"))?;
                match target {
                    Target::Coefficient { normalized } => {
                        let raw = (a + e) / 2.0 + 0.75;
                        (
                            if normalized { raw - 0.5 * a } else { raw },
                            tag,
                            Some(0.5 * a),
                        )
                    }
                    Target::L2Error => {
                        let tag = TheoremTag::LaguerreInteriorProjection;
                        guard(e > -0.5, tag, format!("γ > -1/2 violated: γ = {e}"))?;
                        (e / 2.0 + 0.25, tag, None)
                    }
                    Target::WeightedSupError => {
                        let tag = TheoremTag::LaguerreInteriorProjection;
                        guard(e > 0.0, tag, format!("γ > 0 violated: γ = {e}"))?;
                        (e / 2.0, tag, None)
                    }
                    Target::SobolevError(m) => {
                        let tag = TheoremTag::LaguerreInteriorSobolev;
                        let m = m as f64;
                        guard(
                            e > m - 0.5,
                            tag,
                            format!("γ > m-1/2 violated: γ = {e}, m = {m}"),
                        )?;
                        ((e - m) / 2.0 + 0.25, tag, None)
                    }
                }
            }
        }
        SingularityKind::HermiteInterior { .. } => {
            let tag = TheoremTag::HermiteCoefficient;
            guard(e > 0.0, tag, format!("s > 0 violated: s = {e}"))?;
            match target {
                Target::Coefficient { normalized: true } => (e / 2.0 + 0.75, tag, None),
                Target::Coefficient { normalized: false } => return Err(Error::FitUnavailable(
                    "raw Hermite coefficients decay like n^{-(n+s)/2-1}; use the normalized view"
                        .into(),
                )),
                Target::L2Error => (e / 2.0 + 0.25, TheoremTag::HermiteProjection, None),
                Target::WeightedSupError => (e / 2.0, TheoremTag::HermiteProjection, None),
                Target::SobolevError(m) => {
                    let tag = TheoremTag::HermiteSobolev;
                    let m = m as f64;
                    guard(
                        e > m - 0.5,
                        tag,
                        format!("s > m-1/2 violated: s = {e}, m = {m}"),
                    )?;
                    ((e - m) / 2.0 + 0.25, tag, None)
                }
            }
        }
    };
    Ok(RatePrediction {
        exponent_p: p,
        log_power: mu,
        target,
        source,
        raw_shift,
    })
}

/// Least-squares fit of `log₁₀|c| − μ log₁₀ L(t) = intercept − p log₁₀ t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub exponent_hat: f64,
    pub intercept: f64,
    /// Largest absolute residual in `log₁₀` units.
    pub max_residual: f64,
    pub window: (f64, f64),
    pub n_points: usize,
}

/// Argument of the logarithmic factor in the decay model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogRegressor {
    /// `ln(2√n)` for degree sequences.
    TwoSqrtN,
    /// `ln ω` for frequency sequences.
    Ln,
}

impl LogRegressor {
    fn log10_factor(self, t: f64) -> f64 {
        match self {
            LogRegressor::TwoSqrtN => (2.0 * t.sqrt()).ln().log10(),
            LogRegressor::Ln => t.ln().log10(),
        }
    }
}

/// Minimum number of points for a rate fit.
pub const MIN_FIT_POINTS: usize = 5;

/// Fit `(t, log₁₀|c|)` pairs.
pub fn fit_log_points(
    points: &[(f64, f64)],
    log_power: u32,
    regressor: LogRegressor,
) -> Result<FitResult> {
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::TooFewPoints {
            found: points.len(),
            required: MIN_FIT_POINTS,
        });
    }
    let mu = log_power as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.log10()).collect();
    let ys: Vec<f64> = points
        .iter()
        .map(|&(t, l)| {
            l - if mu > 0.0 {
                mu * regressor.log10_factor(t)
            } else {
                0.0
            }
        })
        .collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::FitUnavailable("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    Ok(FitResult {
        exponent_hat: -slope,
        intercept,
        max_residual,
        window: (lo, hi),
        n_points: points.len(),
    })
}

/// Rate fit of the gated coefficients with `n_min ≤ n ≤ n_max`.
pub fn fit_rate(
    series: &CoefficientSeries,
    log_power: u32,
    window: (usize, usize),
) -> Result<FitResult> {
    let mut pts = Vec::new();
    for (i, &n) in series.n_values.iter().enumerate() {
        if n < window.0 || n > window.1 {
            continue;
        }
        if series.coeff_normalized[i] == 0.0 {
            return Err(Error::ZeroCoefficient { n });
        }
        if n >= 1 && series.gated(i) {
            pts.push((n as f64, series.log10_abs[i]));
        }
    }
    fit_log_points(&pts, log_power, LogRegressor::TwoSqrtN)
}

/// Period in `n` of the oscillation a singular point at `c ≠ 0` imprints on
/// the coefficients; `None` for the Laguerre endpoint.
pub fn oscillation_period(spec: &SingularFunctionSpec, alpha: f64, n: usize) -> Option<f64> {
    let nf = n as f64;
    match spec.kind {
        SingularityKind::LaguerreEndpoint => None,
        SingularityKind::LaguerreInterior { x0 } => {
            Some(2.0 * PI * ((nf + 0.5 * (alpha + 1.0)) / x0).sqrt())
        }
        SingularityKind::HermiteInterior { z0 } => {
            if z0 == 0.0 {
                Some(4.0)
            } else {
                Some(2.0 * PI * (2.0 * nf + 1.0).sqrt() / z0.abs())
            }
        }
    }
}

fn alpha_of(basis: Basis) -> f64 {
    match basis {
        Basis::Laguerre { alpha } => alpha,
        Basis::Hermite => 0.0,
    }
}

/// Degrees sampled around `centre`: consecutive pairs spread over one
/// oscillation period (capped at `centre`), or `centre` alone.
pub fn envelope_window(spec: &SingularFunctionSpec, basis: Basis, centre: usize) -> Vec<usize> {
    let Some(period) = oscillation_period(spec, alpha_of(basis), centre) else {
        return vec![centre];
    };
    let width = period.min(centre as f64);
    let lo = centre as f64 - 0.5 * width;
    let step = width / (ENVELOPE_SAMPLES - 1) as f64;
    let mut out: Vec<usize> = (0..ENVELOPE_SAMPLES)
        .flat_map(|k| {
            let n = (lo + k as f64 * step).round().max(0.0) as usize;
            [n, n + 1]
        })
        .collect();
    out.push(centre);
    out.sort_unstable();
    out.dedup();
    out
}

/// Sorted union of the envelope windows of all `centres`.
pub fn envelope_degrees(
    spec: &SingularFunctionSpec,
    basis: Basis,
    centres: &[usize],
) -> Vec<usize> {
    let mut all: Vec<usize> = centres
        .iter()
        .flat_map(|&c| envelope_window(spec, basis, c))
        .collect();
    all.sort_unstable();
    all.dedup();
    all
}

/// Samples of one envelope window: its centre and `(t, log₁₀|value|)` pairs.
pub type EnvelopeWindow = (f64, Vec<(f64, f64)>);

/// Gated `(k, log₁₀|c_k|)` samples of each centre's window.
pub fn coefficient_windows(
    series: &CoefficientSeries,
    centres: &[usize],
) -> Result<Vec<EnvelopeWindow>> {
    let mut out = Vec::with_capacity(centres.len());
    for &c in centres {
        let mut samples = Vec::new();
        for k in envelope_window(&series.spec, series.basis, c) {
            let i = series.n_values.binary_search(&k).map_err(|_| {
                Error::domain(format!("envelope window of n = {c} needs degree {k}"))
            })?;
            if series.gated(i) && k > 0 {
                samples.push((k as f64, series.log10_abs[i]));
            }
        }
        if !samples.is_empty() {
            out.push((c as f64, samples));
        }
    }
    Ok(out)
}

const ENVELOPE_FIT_ITERATIONS: usize = 50;

fn window_maxima(
    windows: &[EnvelopeWindow],
    p: f64,
    mu: f64,
    regressor: LogRegressor,
) -> Vec<(f64, f64)> {
    windows
        .iter()
        .map(|(c, samples)| {
            let lc = if mu > 0.0 {
                mu * regressor.log10_factor(*c)
            } else {
                0.0
            };
            let best = samples
                .iter()
                .map(|&(t, l)| {
                    let lt = if mu > 0.0 {
                        mu * regressor.log10_factor(t)
                    } else {
                        0.0
                    };
                    l + p * (t / c).log10() - lt + lc
                })
                .fold(f64::NEG_INFINITY, f64::max);
            (*c, best)
        })
        .collect()
}

/// Envelope fit over windows: every sample is carried to its window centre
/// with the current exponent estimate, the maximum is taken, and the fit is
/// repeated to a fixed point. Returns the centred envelope and its fit.
pub fn fit_windowed_envelope(
    windows: &[EnvelopeWindow],
    log_power: u32,
    regressor: LogRegressor,
) -> Result<(Vec<(f64, f64)>, FitResult)> {
    let mu = log_power as f64;
    let mut pts = window_maxima(windows, 0.0, 0.0, regressor);
    let mut fit = fit_log_points(&pts, log_power, regressor)?;
    for _ in 0..ENVELOPE_FIT_ITERATIONS {
        pts = window_maxima(windows, fit.exponent_hat, mu, regressor);
        let next = fit_log_points(&pts, log_power, regressor)?;
        let done = (next.exponent_hat - fit.exponent_hat).abs() < 1e-10;
        fit = next;
        if done {
            break;
        }
    }
    Ok((pts, fit))
}

/// Centred coefficient envelope at `centres`.
pub fn coefficient_envelope(
    series: &CoefficientSeries,
    log_power: u32,
    centres: &[usize],
) -> Result<Vec<(f64, f64)>> {
    Ok(fit_windowed_envelope(
        &coefficient_windows(series, centres)?,
        log_power,
        LogRegressor::TwoSqrtN,
    )?
    .0)
}

/// Rate fit of the windowed coefficient envelope at `centres`.
pub fn fit_rate_envelope(
    series: &CoefficientSeries,
    log_power: u32,
    centres: &[usize],
) -> Result<FitResult> {
    Ok(fit_windowed_envelope(
        &coefficient_windows(series, centres)?,
        log_power,
        LogRegressor::TwoSqrtN,
    )?
    .1)
}

/// `{2^k : lo ≤ 2^k ≤ hi}`.
pub fn dyadic(lo: usize, hi: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut n = 1usize;
    while n <= hi {
        if n >= lo {
            out.push(n);
        }
        n *= 2;
    }
    out
}

// ---------------------------------------------------------------------------
// Bessel-transform decay harness.

/// Integral family of the oscillatory decay harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselFamily {
    /// `∫_0^b ln^μ(x) x^α (b−x)^β J_ν(ωx) ψ(x) dx`
    LogAtZero,
    /// `∫_0^b ln^μ(b−x) x^α (b−x)^β J_ν(ωx) ψ(x) dx`
    LogAtB,
    /// `∫_a^b ln^μ(x−a) (x−a)^β ψ(x) J_ν(ωx) dx`, `0 < a < b`
    InteriorLeft,
    /// `∫_a^b ln^μ(b−x) (b−x)^β ψ(x) J_ν(ωx) dx`, `0 < a < b`
    InteriorRight,
    /// `∫_a^b x^α |x|^δ ln^μ(x−a) (x−a)^β ψ(x) J_ν(ω|x|) dx`, integer `α`
    Signed,
    /// `∫_0^b ln^μ(x) x^τ (b−x)^β e^{−x} L_n^{(α)} ψ dx` when `a = 0`, else
    /// `∫_a^b ln^μ(x−a) (x−a)^β ψ L_n^{(α)} x^α e^{−x} dx`; decay in `n`
    LaguerreTransform,
    /// `∫_a^b ln^μ(b−x) (b−x)^β e^{−x²} H_n ψ dx / (2^n ⌊n/2⌋!)`; decay in `n`
    HermiteTransform,
}

impl BesselFamily {
    pub fn tag(self) -> TheoremTag {
        match self {
            BesselFamily::LogAtZero => TheoremTag::BesselLogAtZero,
            BesselFamily::LogAtB => TheoremTag::BesselLogAtB,
            BesselFamily::InteriorLeft => TheoremTag::BesselInteriorLeft,
            BesselFamily::InteriorRight => TheoremTag::BesselInteriorRight,
            BesselFamily::Signed => TheoremTag::BesselSigned,
            BesselFamily::LaguerreTransform => TheoremTag::LaguerreTransform,
            BesselFamily::HermiteTransform => TheoremTag::HermiteTransform,
        }
    }

    /// Whether the decay variable is a degree `n` rather than a frequency.
    pub fn in_degree(self) -> bool {
        matches!(
            self,
            BesselFamily::LaguerreTransform | BesselFamily::HermiteTransform
        )
    }
}

/// Degree parity for the Hermite family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone)]
pub struct BesselParams {
    pub alpha: f64,
    pub beta: f64,
    pub tau: f64,
    pub delta: f64,
    pub mu: u32,
    pub nu: f64,
    pub a: f64,
    pub b: f64,
    pub psi: SmoothFactor,
    pub parity: Parity,
}

impl Default for BesselParams {
    fn default() -> Self {
        Self {
            alpha: 0.0,
            beta: 0.0,
            tau: 0.0,
            delta: 0.0,
            mu: 0,
            nu: 0.0,
            a: 0.0,
            b: 1.0,
            psi: SmoothFactor::One,
            parity: Parity::Even,
        }
    }
}

/// Outcome of one harness run.
#[derive(Debug, Clone)]
pub struct BesselDecayReport {
    pub family: BesselFamily,
    /// Dominant branch `(p, μ)` of the max-rule.
    pub predicted: (f64, u32),
    /// The other branch.
    pub alternative: (f64, u32),
    /// Branch exponents within `0.1` of each other.
    pub ambiguous: bool,
    /// `(ω or n, log₁₀ of the sampled envelope)`.
    pub samples: Vec<(f64, f64)>,
    pub fit: FitResult,
}

impl BesselDecayReport {
    /// Fitted exponent within `tol` of the prediction (of either branch
    /// exponent when they are within 0.1 of each other).
    pub fn passes(&self, tol: f64) -> bool {
        let p = self.fit.exponent_hat;
        if self.ambiguous {
            let lo = self.predicted.0.min(self.alternative.0) - tol;
            let hi = self.predicted.0.max(self.alternative.0) + tol;
            p >= lo && p <= hi
        } else {
            (p - self.predicted.0).abs() <= tol
        }
    }
}

/// Smaller exponent dominates; ties take the larger log power.
fn dominant(first: (f64, u32), second: (f64, u32)) -> ((f64, u32), (f64, u32)) {
    if first.0 < second.0 || (first.0 == second.0 && first.1 >= second.1) {
        (first, second)
    } else {
        (second, first)
    }
}

/// The two envelope branches `(p, μ)` of the max-rule, after checking the
/// family's hypotheses.
pub fn bessel_branches(family: BesselFamily, p: &BesselParams) -> Result<((f64, u32), (f64, u32))> {
    let tag = family.tag();
    let mu = p.mu;
    let (al, be, nu) = (p.alpha, p.beta, p.nu);
    guard(be > -1.0, tag, format!("β > -1 violated: β = {be}"))?;
    guard(
        p.a < p.b,
        tag,
        format!("a < b violated: a = {}, b = {}", p.a, p.b),
    )?;
    guard(nu > -1.0, tag, format!("ν > -1 violated: ν = {nu}"))?;
    let pair = match family {
        BesselFamily::LogAtZero | BesselFamily::LogAtB => {
            guard(
                p.a == 0.0 && p.b > 0.0,
                tag,
                "interval must be [0, b] with b > 0".into(),
            )?;
            guard(
                al + nu > -1.0,
                tag,
                format!("α+ν > -1 violated: α+ν = {}", al + nu),
            )?;
            let inner = (be + 1.5).min(1.5);
            if family == BesselFamily::LogAtZero {
                ((al + 1.0, mu), (inner, 0))
            } else {
                ((al + 1.0, 0), (inner, mu))
            }
        }
        BesselFamily::InteriorLeft | BesselFamily::InteriorRight => {
            guard(p.a > 0.0, tag, format!("0 < a violated: a = {}", p.a))?;
            ((be + 1.5, mu), (1.5, 0))
        }
        BesselFamily::Signed => {
            guard(
                al == al.round(),
                tag,
                format!("integer α required, got {al}"),
            )?;
            let (a, b, d) = (p.a, p.b, p.delta);
            if a > 0.0 {
                ((be + 1.5, mu), (1.5, 0))
            } else if a == 0.0 {
                guard(
                    al + d + be + nu > -1.0,
                    tag,
                    format!("α+δ+β+ν > -1 violated: {}", al + d + be + nu),
                )?;
                ((al + d + be + 1.0, mu), (1.5, 0))
            } else if b >= 0.0 {
                guard(
                    al + d + nu > -1.0,
                    tag,
                    format!("α+δ+ν > -1 violated: {}", al + d + nu),
                )?;
                ((al + d + 1.0, 0), ((be + 1.5).min(1.5), mu))
            } else {
                ((be + 1.5, mu), (1.5, 0))
            }
        }
        BesselFamily::LaguerreTransform => {
            guard(al > -1.0, tag, format!("α > -1 violated: α = {al}"))?;
            if p.a == 0.0 {
                guard(p.tau > -1.0, tag, format!("τ > -1 violated: τ = {}", p.tau))?;
                let second = ((be - al) / 2.0 + 0.75).min(0.75 - al / 2.0);
                ((p.tau + 1.0 - al, mu), (second, 0))
            } else {
                guard(p.a > 0.0, tag, format!("0 ≤ a violated: a = {}", p.a))?;
                (((be - al) / 2.0 + 0.75, mu), (0.75 - al / 2.0, 0))
            }
        }
        BesselFamily::HermiteTransform => match p.parity {
            Parity::Even => ((be / 2.0 + 1.0, mu), (1.0, mu)),
            Parity::Odd => ((be / 2.0 + 0.5, mu), (0.5, mu)),
        },
    };
    Ok(dominant(pair.0, pair.1))
}

/// Samples per oscillation period for the envelope.
const ENVELOPE_SAMPLES: usize = 12;

/// Non-oscillatory part of the integrand for the frequency families.
fn bessel_weight(family: BesselFamily, p: &BesselParams, node: QuadNode) -> f64 {
    let x = node.x;
    let psi = p.psi.eval(x);
    let (xa, bx) = (node.offset_from(p.a), -node.offset_from(p.b));
    match family {
        BesselFamily::LogAtZero => {
            power_log(x, p.alpha, p.mu, 0.0) * power_log(bx, p.beta, 0, p.b) * psi
        }
        BesselFamily::LogAtB => {
            power_log(x, p.alpha, 0, 0.0) * power_log(bx, p.beta, p.mu, p.b) * psi
        }
        BesselFamily::InteriorLeft => power_log(xa, p.beta, p.mu, p.a) * psi,
        BesselFamily::InteriorRight => power_log(bx, p.beta, p.mu, p.b) * psi,
        BesselFamily::Signed => {
            x.powi(p.alpha as i32)
                * power_log(x, p.delta, 0, 0.0)
                * power_log(xa, p.beta, p.mu, p.a)
                * psi
        }
        _ => unreachable!("degree families have their own integrands"),
    }
}

fn singular_points(family: BesselFamily, p: &BesselParams) -> Vec<f64> {
    let mut s = vec![p.a, p.b];
    if family == BesselFamily::Signed && p.a < 0.0 && p.b > 0.0 {
        s.push(0.0);
    }
    s
}

/// Oscillation period of the endpoint contributions in the decay variable.
fn envelope_period(family: BesselFamily, p: &BesselParams, t: f64) -> f64 {
    let c = [p.a.abs(), p.b.abs()]
        .into_iter()
        .filter(|c| *c > 0.0)
        .fold(f64::INFINITY, f64::min);
    match family {
        BesselFamily::LaguerreTransform => 2.0 * PI * ((t + 0.5 * (p.alpha + 1.0)) / c).sqrt(),
        BesselFamily::HermiteTransform => 2.0 * PI * (2.0 * t + 1.0).sqrt() / c,
        _ => 2.0 * PI / c,
    }
}

fn not_converged_at(t: f64, err: Error) -> Error {
    match err {
        Error::NotConverged {
            err_est,
            tol,
            context,
        } => Error::NotConverged {
            err_est,
            tol,
            context: format!("at {t}: {context}"),
        },
        other => other,
    }
}

/// Window of decay-variable samples around `t`, one period wide.
fn window_samples(family: BesselFamily, p: &BesselParams, t: f64) -> Vec<f64> {
    let period = envelope_period(family, p, t).min(t);
    let lo = t - 0.5 * period;
    let step = period / (ENVELOPE_SAMPLES - 1) as f64;
    let raw = (0..ENVELOPE_SAMPLES).map(|k| lo + k as f64 * step);
    if !family.in_degree() {
        return raw.collect();
    }
    let want_odd = family == BesselFamily::HermiteTransform && p.parity == Parity::Odd;
    let even_only = family == BesselFamily::HermiteTransform && p.parity == Parity::Even;
    let mut out: Vec<f64> = raw
        .map(|v| {
            let mut n = v.round().max(1.0) as i64;
            if (even_only && n % 2 != 0) || (want_odd && n % 2 == 0) {
                n += 1;
            }
            n as f64
        })
        .collect();
    out.dedup();
    out
}

fn frequency_window(family: BesselFamily, p: &BesselParams, omega: f64) -> Result<EnvelopeWindow> {
    let mut samples = Vec::new();
    for w in window_samples(family, p, omega) {
        let plan = SingularOscillatoryPlan::new(p.a, p.b)
            .with_singular_points(singular_points(family, p))
            .with_oscillation(Oscillation::Bessel { omega: w })
            .with_tolerances(1e-16, 1e-8);
        let nu = p.nu;
        let f = |node: QuadNode, out: &mut [f64]| {
            out[0] = bessel_weight(family, p, node) * bessel_j_unchecked(nu, w * node.x.abs())
        };
        let r = integrate_vector_nodes(1, f, &plan)?;
        let v = r.values[0];
        if !r.converged[0] {
            return Err(not_converged_at(
                w,
                Error::NotConverged {
                    err_est: r.err_est[0],
                    tol: plan.abs_tol.max(plan.rel_tol * v.abs()),
                    context: format!("{} panels on [{}, {}]", r.panels, p.a, p.b),
                },
            ));
        }
        if v != 0.0 {
            samples.push((w, v.abs().log10()));
        }
    }
    Ok((omega, samples))
}

/// Envelope windows for every target degree, from one vector integral.
fn degree_windows(
    family: BesselFamily,
    p: &BesselParams,
    targets: &[f64],
) -> Result<Vec<EnvelopeWindow>> {
    let windows: Vec<Vec<usize>> = targets
        .iter()
        .map(|&t| {
            window_samples(family, p, t)
                .into_iter()
                .map(|v| v as usize)
                .collect()
        })
        .collect();
    let mut degrees: Vec<usize> = windows.iter().flatten().copied().collect();
    degrees.sort_unstable();
    degrees.dedup();
    let n_max = *degrees
        .last()
        .ok_or_else(|| Error::domain("no degrees requested"))?;
    let dim = degrees.len();

    let (values, converged, ln_factor): (Vec<f64>, Vec<bool>, Box<dyn Fn(usize) -> f64>) =
        match family {
            BesselFamily::LaguerreTransform => {
                let alpha = p.alpha;
                let rec = LaguerreRecurrence::new(LaguerreBasis::new(alpha)?, n_max);
                let endpoint = p.a == 0.0;
                let weight = |node: QuadNode| -> f64 {
                    let x = node.x;
                    let (xa, bx) = (node.offset_from(p.a), -node.offset_from(p.b));
                    let psi = p.psi.eval(x);
                    if endpoint {
                        // e^{-x} L_n = e^{-x/2} x^{-α/2} √σ_n ℓ̂_n
                        power_log(x, p.tau - 0.5 * alpha, p.mu, 0.0)
                            * power_log(bx, p.beta, 0, p.b)
                            * (-0.5 * x).exp()
                            * psi
                    } else {
                        // x^α e^{-x} L_n = e^{-x/2} x^{α/2} √σ_n ℓ̂_n
                        power_log(xa, p.beta, p.mu, p.a)
                            * power_log(x, 0.5 * alpha, 0, 0.0)
                            * (-0.5 * x).exp()
                            * psi
                    }
                };
                let plan = SingularOscillatoryPlan::new(p.a, p.b)
                    .with_singular_points([p.a, p.b])
                    .with_oscillation(Oscillation::Laguerre {
                        n_tilde: n_max as f64 + 0.5 * (alpha + 1.0),
                    })
                    .with_tolerances(1e-16, 1e-8);
                let degs = &degrees;
                let r = integrate_vector_nodes(
                    dim,
                    |node: QuadNode, out: &mut [f64]| {
                        let x = node.x;
                        let mut row = vec![0.0; n_max + 1];
                        let w = weight(node);
                        if rec.fill(x, &mut row).is_err() {
                            out.fill(f64::NAN);
                            return;
                        }
                        for (o, &n) in out.iter_mut().zip(degs) {
                            *o = w * row[n];
                        }
                    },
                    &plan,
                )?;
                (
                    r.values,
                    r.converged,
                    Box::new(move |n| 0.5 * log_sigma(n, alpha)),
                )
            }
            BesselFamily::HermiteTransform => {
                let rec = HermiteRecurrence::new(n_max);
                let weight = |node: QuadNode| {
                    let x = node.x;
                    power_log(-node.offset_from(p.b), p.beta, p.mu, p.b)
                        * (-0.5 * x * x).exp()
                        * p.psi.eval(x)
                };
                let plan = SingularOscillatoryPlan::new(p.a, p.b)
                    .with_singular_points([p.a, p.b])
                    .with_oscillation(Oscillation::Hermite { n: n_max })
                    .with_tolerances(1e-16, 1e-8);
                let degs = &degrees;
                let r = integrate_vector_nodes(
                    dim,
                    |node: QuadNode, out: &mut [f64]| {
                        let mut row = vec![0.0; n_max + 1];
                        rec.fill(node.x, &mut row);
                        let w = weight(node);
                        for (o, &n) in out.iter_mut().zip(degs) {
                            *o = w * row[n];
                        }
                    },
                    &plan,
                )?;
                // ∫ … e^{-x²} H_n = √γ_n ∫ … e^{-x²/2} ψ_n, then divide by 2^n ⌊n/2⌋!
                (
                    r.values,
                    r.converged,
                    Box::new(|n| {
                        0.5 * log_gamma_hermite(n)
                            - n as f64 * LN_2
                            - log_gamma_pos((n / 2) as f64 + 1.0)
                    }),
                )
            }
            _ => unreachable!("frequency families are sampled one integral at a time"),
        };
    if let Some(i) = converged.iter().position(|c| !c) {
        return Err(Error::NotConverged {
            err_est: f64::NAN,
            tol: 1e-8,
            context: format!("at n = {}", degrees[i]),
        });
    }
    let log10_at = |n: usize| -> f64 {
        let i = degrees.binary_search(&n).unwrap();
        values[i].abs().log10() + ln_factor(n) / LN_10
    };
    Ok(targets
        .iter()
        .zip(&windows)
        .map(|(&t, w)| {
            let samples = w
                .iter()
                .map(|&n| (n as f64, log10_at(n)))
                .filter(|s| s.1.is_finite())
                .collect();
            (t, samples)
        })
        .collect())
}

/// Evaluates the family over one endpoint-oscillation period around each
/// frequency (or degree) in `points` and fits the decay exponent of the
/// windowed envelope with the dominant branch's log power.
pub fn bessel_transform_decay(
    family: BesselFamily,
    params: &BesselParams,
    points: &[f64],
) -> Result<BesselDecayReport> {
    let (predicted, alternative) = bessel_branches(family, params)?;
    if points.windows(2).any(|w| w[0] >= w[1]) || points.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::domain(
            "decay variable must be positive and increasing",
        ));
    }
    let windows = if family.in_degree() {
        degree_windows(family, params, points)?
    } else {
        points
            .iter()
            .map(|&w| frequency_window(family, params, w))
            .collect::<Result<Vec<_>>>()?
    };
    let regressor = if family.in_degree() {
        LogRegressor::TwoSqrtN
    } else {
        LogRegressor::Ln
    };
    let (samples, fit) = fit_windowed_envelope(&windows, predicted.1, regressor)?;
    Ok(BesselDecayReport {
        family,
        predicted,
        alternative,
        ambiguous: (predicted.0 - alternative.0).abs() < 0.1,
        samples,
        fit,
    })
}
