//! Normalized Laguerre and Hermite coefficients of singular functions.
//!
//! The stored quantities are `â_n = a_n √σ_n^{(α)}` and `ĥ_n = h_n √γ_n`,
//! i.e. coefficients against the orthonormal weighted functions `ℓ̂_n`, `ψ_n`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::orthopoly::{
    log_gamma_hermite, log_sigma, HermiteRecurrence, LaguerreBasis, LaguerreRecurrence,
};
use crate::quadrature::{
    integrate_vector_nodes, Envelope, Oscillation, QuadNode, SingularOscillatoryPlan,
};
use crate::specfun::{digamma_pos, log_gamma_pos, trigamma_pos};

/// Location of the algebraic-logarithmic singularity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SingularityKind {
    /// `x^δ ln^μ x · g(x)` on `[0, ∞)`.
    LaguerreEndpoint,
    /// `|x − x₀|^γ ln^μ|x − x₀| · g(x)` on `[0, ∞)`, `x₀ > 0`.
    LaguerreInterior { x0: f64 },
    /// `|x − z₀|^s ln^μ|x − z₀| · g(x)` on `ℝ`.
    HermiteInterior { z0: f64 },
}

/// Smooth factor `g`. Built-ins are bounded by 1 on the relevant domain;
/// custom factors are assumed smooth and at most polynomially growing.
#[derive(Clone, Default)]
pub enum SmoothFactor {
    #[default]
    One,
    ExpNeg,
    Lorentzian,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl SmoothFactor {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            SmoothFactor::One => 1.0,
            SmoothFactor::ExpNeg => (-x).exp(),
            SmoothFactor::Lorentzian => 1.0 / (1.0 + x * x),
            SmoothFactor::Custom(g) => g(x),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SmoothFactor::One => "1",
            SmoothFactor::ExpNeg => "exp(-x)",
            SmoothFactor::Lorentzian => "1/(1+x^2)",
            SmoothFactor::Custom(_) => "custom",
        }
    }
}

impl fmt::Debug for SmoothFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SmoothFactor({})", self.name())
    }
}

#[derive(Debug, Clone)]
pub struct SingularFunctionSpec {
    pub kind: SingularityKind,
    /// `δ`, `γ` or `s` depending on `kind`.
    pub exponent: f64,
    pub log_power: u32,
    pub smooth_factor: SmoothFactor,
}

impl SingularFunctionSpec {
    pub fn laguerre_endpoint(delta: f64, mu: u32) -> Self {
        Self {
            kind: SingularityKind::LaguerreEndpoint,
            exponent: delta,
            log_power: mu,
            smooth_factor: SmoothFactor::One,
        }
    }

    pub fn laguerre_interior(x0: f64, gamma: f64, mu: u32) -> Self {
        Self {
            kind: SingularityKind::LaguerreInterior { x0 },
            exponent: gamma,
            log_power: mu,
            smooth_factor: SmoothFactor::One,
        }
    }

    pub fn hermite_interior(z0: f64, s: f64, mu: u32) -> Self {
        Self {
            kind: SingularityKind::HermiteInterior { z0 },
            exponent: s,
            log_power: mu,
            smooth_factor: SmoothFactor::One,
        }
    }

    pub fn with_smooth_factor(mut self, g: SmoothFactor) -> Self {
        self.smooth_factor = g;
        self
    }

    /// Singular point (0 for the endpoint family).
    pub fn location(&self) -> f64 {
        match self.kind {
            SingularityKind::LaguerreEndpoint => 0.0,
            SingularityKind::LaguerreInterior { x0 } => x0,
            SingularityKind::HermiteInterior { z0 } => z0,
        }
    }

    /// Checks the structural invariants of the family.
    pub fn validate(&self) -> Result<()> {
        if !self.exponent.is_finite() {
            return Err(Error::InvalidSpec("exponent must be finite".into()));
        }
        match self.kind {
            SingularityKind::LaguerreEndpoint => Ok(()),
            SingularityKind::LaguerreInterior { x0 } => {
                if x0 == 0.0 {
                    Err(Error::InvalidSpec(
                        "x0 = 0 is the endpoint family; use a laguerre endpoint spec".into(),
                    ))
                } else if !(x0 > 0.0 && x0.is_finite()) {
                    Err(Error::InvalidSpec(format!(
                        "interior point must satisfy 0 < x0 < ∞, got {x0}"
                    )))
                } else if !(self.exponent > -1.0) {
                    Err(Error::InvalidSpec(format!(
                        "γ > -1 needed for integrability, got {}",
                        self.exponent
                    )))
                } else {
                    Ok(())
                }
            }
            SingularityKind::HermiteInterior { z0 } => {
                if !z0.is_finite() {
                    Err(Error::InvalidSpec("z0 must be finite".into()))
                } else if !(self.exponent > 0.0) {
                    Err(Error::InvalidSpec(format!(
                        "s > 0 required, got {}",
                        self.exponent
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// `f(x)`; zero at the singular point when the exponent is positive.
    pub fn eval(&self, x: f64) -> f64 {
        let c = self.location();
        power_log(x - c, self.exponent, self.log_power, c) * self.smooth_factor.eval(x)
    }

    /// `f` at a quadrature node, using the node's exact offset from the
    /// singular point when it is the node's anchor.
    pub fn eval_node(&self, node: QuadNode) -> f64 {
        let c = self.location();
        power_log(node.offset_from(c), self.exponent, self.log_power, c)
            * self.smooth_factor.eval(node.x)
    }
}

/// `|u|^e ln^μ|u|` for a point at offset `u` from the singular point `c`.
/// An offset that rounded to zero at `c ≠ 0` is replaced by half an ulp of
/// `c`; at the singular point itself the value is `0`, `1` or `∞`.
pub(crate) fn power_log(u: f64, e: f64, mu: u32, c: f64) -> f64 {
    let mut u = u.abs();
    if u == 0.0 && c != 0.0 {
        u = 0.5 * f64::EPSILON * c.abs();
    }
    if u == 0.0 {
        return match (e > 0.0, e == 0.0 && mu == 0) {
            (true, _) => 0.0,
            (_, true) => 1.0,
            _ => f64::INFINITY,
        };
    }
    let mut v = if e == 0.0 { 1.0 } else { u.powf(e) };
    if mu > 0 {
        v *= u.ln().powi(mu as i32);
    }
    v
}

/// Expansion basis of a coefficient series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Basis {
    Laguerre { alpha: f64 },
    Hermite,
}

#[derive(Debug, Clone)]
pub struct CoefficientSeries {
    pub basis: Basis,
    pub n_values: Vec<usize>,
    pub coeff_normalized: Vec<f64>,
    pub log10_abs: Vec<f64>,
    pub err_est: Vec<f64>,
    pub converged: Vec<bool>,
    pub spec: SingularFunctionSpec,
}

impl CoefficientSeries {
    pub fn len(&self) -> usize {
        self.n_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n_values.is_empty()
    }

    /// Accuracy gate for rate fitting: converged and `|ĉ_n| ≥ 10·err_est`.
    pub fn gated(&self, i: usize) -> bool {
        self.converged[i]
            && self.coeff_normalized[i] != 0.0
            && self.coeff_normalized[i].abs() >= 10.0 * self.err_est[i]
    }

    /// `ln` of the factor taking the normalized coefficient to the raw one
    /// (`a_n = â_n/√σ_n`, `h_n = ĥ_n/√γ_n`).
    pub fn ln_raw_factor(&self, n: usize) -> f64 {
        match self.basis {
            Basis::Laguerre { alpha } => -0.5 * log_sigma(n, alpha),
            Basis::Hermite => -0.5 * log_gamma_hermite(n),
        }
    }

    /// `log₁₀` of the raw coefficient magnitude (`-∞` for zero).
    pub fn raw_log10(&self, i: usize) -> f64 {
        self.log10_abs[i] + self.ln_raw_factor(self.n_values[i]) / std::f64::consts::LN_10
    }

    /// Series of raw coefficients `a_n` or `h_n` (may underflow for Hermite).
    pub fn raw(&self) -> CoefficientSeries {
        let mut out = self.clone();
        for (i, &n) in self.n_values.iter().enumerate() {
            let f = self.ln_raw_factor(n).exp();
            out.coeff_normalized[i] *= f;
            out.err_est[i] *= f;
            out.log10_abs[i] = self.raw_log10(i);
        }
        out
    }

    /// Restriction to the entries whose `n` satisfies `keep`.
    pub fn filter(&self, keep: impl Fn(usize) -> bool) -> CoefficientSeries {
        let idx: Vec<usize> = (0..self.len())
            .filter(|&i| keep(self.n_values[i]))
            .collect();
        CoefficientSeries {
            basis: self.basis,
            n_values: idx.iter().map(|&i| self.n_values[i]).collect(),
            coeff_normalized: idx.iter().map(|&i| self.coeff_normalized[i]).collect(),
            log10_abs: idx.iter().map(|&i| self.log10_abs[i]).collect(),
            err_est: idx.iter().map(|&i| self.err_est[i]).collect(),
            converged: idx.iter().map(|&i| self.converged[i]).collect(),
            spec: self.spec.clone(),
        }
    }

    /// Coefficient at degree `n`, if present.
    pub fn get(&self, n: usize) -> Option<f64> {
        self.n_values
            .binary_search(&n)
            .ok()
            .map(|i| self.coeff_normalized[i])
    }
}

/// Absolute truncation level for the infinite-interval integrals.
const TRUNCATION_TOL: f64 = 1e-18;
/// Relative part of the per-coefficient tolerance.
const REL_TOL: f64 = 1e-6;
/// Absolute floor of the per-coefficient tolerance.
pub const DEFAULT_ABS_TOL: f64 = 1e-13;

fn check_sorted(n_values: &[usize]) -> Result<()> {
    if n_values.is_empty() {
        return Err(Error::domain("no degrees requested"));
    }
    if n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("degrees must be strictly increasing"));
    }
    Ok(())
}

fn assemble(
    basis: Basis,
    spec: &SingularFunctionSpec,
    n_values: &[usize],
    values: Vec<f64>,
    err_est: Vec<f64>,
    converged: Vec<bool>,
) -> CoefficientSeries {
    let log10_abs = values.iter().map(|v| v.abs().log10()).collect();
    CoefficientSeries {
        basis,
        n_values: n_values.to_vec(),
        coeff_normalized: values,
        log10_abs,
        err_est,
        converged,
        spec: spec.clone(),
    }
}

/// `â_n = ∫₀^∞ f(x) e^{-x/2} x^{α/2} ℓ̂_n(x) dx` for every requested `n`.
pub fn laguerre_coeffs(
    spec: &SingularFunctionSpec,
    alpha: f64,
    n_values: &[usize],
    tol: f64,
) -> Result<CoefficientSeries> {
    spec.validate()?;
    let basis = LaguerreBasis::new(alpha)?;
    check_sorted(n_values)?;
    let mut singular = vec![0.0];
    match spec.kind {
        SingularityKind::LaguerreEndpoint => {
            if !(alpha + spec.exponent > -1.0) {
                return Err(Error::hypothesis(
                    "laguerre-endpoint-coefficient",
                    format!("α+δ > -1 (α+δ = {})", alpha + spec.exponent),
                ));
            }
        }
        SingularityKind::LaguerreInterior { x0 } => singular.push(x0),
        SingularityKind::HermiteInterior { .. } => {
            return Err(Error::InvalidSpec(
                "Hermite family passed to laguerre_coeffs".into(),
            ))
        }
    }
    let n_max = *n_values.last().unwrap();
    let rec = LaguerreRecurrence::new(basis, n_max);
    let n_tilde = n_max as f64 + 0.5 * (alpha + 1.0);
    let envelope = Envelope::exponential(2.0, (0.5 * alpha + spec.exponent).max(0.0))
        .with_log_power(spec.log_power);
    let plan = SingularOscillatoryPlan::new(0.0, f64::INFINITY)
        .with_singular_points(singular)
        .with_oscillation(Oscillation::Laguerre { n_tilde })
        .with_envelope(envelope, TRUNCATION_TOL)
        .with_tolerances(tol, REL_TOL);

    let integrand = |node: QuadNode, out: &mut [f64]| {
        let x = node.x;
        let mut row = vec![0.0; n_max + 1];
        let fx = spec.eval_node(node) * (-0.5 * x + 0.5 * alpha * x.ln()).exp();
        if rec.fill(x, &mut row).is_err() || !fx.is_finite() {
            out.fill(f64::NAN);
            return;
        }
        for (o, &n) in out.iter_mut().zip(n_values) {
            *o = fx * row[n];
        }
    };
    let r = integrate_vector_nodes(n_values.len(), integrand, &plan)?;
    Ok(assemble(
        Basis::Laguerre { alpha },
        spec,
        n_values,
        r.values,
        r.err_est,
        r.converged,
    ))
}

/// `ĥ_n = ∫_ℝ f(x) e^{-x²/2} ψ_n(x) dx` for every requested `n`.
pub fn hermite_coeffs(
    spec: &SingularFunctionSpec,
    n_values: &[usize],
    tol: f64,
) -> Result<CoefficientSeries> {
    spec.validate()?;
    check_sorted(n_values)?;
    let z0 = match spec.kind {
        SingularityKind::HermiteInterior { z0 } => z0,
        _ => {
            return Err(Error::InvalidSpec(
                "Laguerre family passed to hermite_coeffs".into(),
            ))
        }
    };
    let n_max = *n_values.last().unwrap();
    let rec = HermiteRecurrence::new(n_max);
    let envelope = Envelope::gaussian(spec.exponent + 1.0).with_log_power(spec.log_power);
    let plan = SingularOscillatoryPlan::new(f64::NEG_INFINITY, f64::INFINITY)
        .with_singular_points([z0])
        .with_oscillation(Oscillation::Hermite { n: n_max })
        .with_envelope(envelope, TRUNCATION_TOL)
        .with_tolerances(tol, REL_TOL);
    let integrand = |node: QuadNode, out: &mut [f64]| {
        let x = node.x;
        let mut row = vec![0.0; n_max + 1];
        rec.fill(x, &mut row);
        let fx = spec.eval_node(node) * (-0.5 * x * x).exp();
        for (o, &n) in out.iter_mut().zip(n_values) {
            *o = fx * row[n];
        }
    };
    let r = integrate_vector_nodes(n_values.len(), integrand, &plan)?;
    Ok(assemble(
        Basis::Hermite,
        spec,
        n_values,
        r.values,
        r.err_est,
        r.converged,
    ))
}

// ---------------------------------------------------------------------------
// Closed-form oracle for the endpoint family with g ≡ 1.

/// `(ln|Γ(x)|, sign Γ(x))` for real `x` away from the poles.
pub(crate) fn log_gamma_signed(x: f64) -> Result<(f64, f64)> {
    if x > 0.0 {
        return Ok((log_gamma_pos(x), 1.0));
    }
    if x == x.floor() {
        return Err(Error::domain(format!("Γ has a pole at {x}")));
    }
    // Γ(x) = π / (sin(πx) Γ(1−x))
    let s = sin_pi(x);
    Ok((PI.ln() - s.abs().ln() - log_gamma_pos(1.0 - x), s.signum()))
}

/// `sin(πx)` with exact zeros at the integers.
fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (0.5 * x).round();
    (PI * r).sin()
}

/// `ψ(x)` for real non-pole `x`, by reflection below zero.
fn digamma_signed(x: f64) -> f64 {
    if x > 0.0 {
        digamma_pos(x)
    } else {
        // ψ(x) = ψ(1−x) − π cot(πx)
        let r = x - x.round();
        digamma_pos(1.0 - x) - PI / (PI * r).tan()
    }
}

fn trigamma_signed(x: f64) -> f64 {
    if x > 0.0 {
        trigamma_pos(x)
    } else {
        // ψ'(x) = π²/sin²(πx) − ψ'(1−x)
        let r = x - x.round();
        let s = (PI * r).sin();
        PI * PI / (s * s) - trigamma_pos(1.0 - x)
    }
}

const BERNOULLI: [f64; 21] = [
    1.0,
    -0.5,
    1.0 / 6.0,
    0.0,
    -1.0 / 30.0,
    0.0,
    1.0 / 42.0,
    0.0,
    -1.0 / 30.0,
    0.0,
    5.0 / 66.0,
    0.0,
    -691.0 / 2730.0,
    0.0,
    7.0 / 6.0,
    0.0,
    -3617.0 / 510.0,
    0.0,
    43867.0 / 798.0,
    0.0,
    -174611.0 / 330.0,
];

fn bernoulli_poly(m: usize, a: f64) -> f64 {
    let mut binom = 1.0;
    let mut s = 0.0;
    for (j, b) in BERNOULLI.iter().enumerate().take(m + 1) {
        s += binom * b * a.powi((m - j) as i32);
        binom = binom * (m - j) as f64 / (j + 1) as f64;
    }
    s
}

/// `ln Γ(z+a) − ln Γ(z+b)` for large positive `z`, without cancellation.
fn log_gamma_ratio_large(z: f64, a: f64, b: f64) -> f64 {
    let mut s = (a - b) * z.ln();
    let mut zk = z;
    for k in 1..=18 {
        let term =
            (bernoulli_poly(k + 1, a) - bernoulli_poly(k + 1, b)) / ((k * (k + 1)) as f64 * zk);
        s += if k % 2 == 1 { term } else { -term };
        zk *= z;
    }
    s
}

/// Threshold above which the asymptotic ratio series is used.
const RATIO_SERIES_MIN: f64 = 60.0;

/// `(ln|Γ(n−δ)/Γ(n+α+1)|, sign)`.
fn log_ratio_n(n: usize, alpha: f64, delta: f64) -> Result<(f64, f64)> {
    let z = n as f64;
    if z >= RATIO_SERIES_MIN + delta.abs() + alpha.abs() {
        return Ok((log_gamma_ratio_large(z, -delta, alpha + 1.0), 1.0));
    }
    let (l1, s1) = log_gamma_signed(z - delta)?;
    Ok((l1 - log_gamma_pos(z + alpha + 1.0), s1))
}

fn is_nonneg_integer(x: f64) -> bool {
    x >= 0.0 && x == x.floor()
}

/// `a_n(α)` of `x^δ` (`μ = 0`): `Γ(α+δ+1)Γ(n−δ) / (Γ(n+α+1)Γ(−δ))`.
fn endpoint_coeff_mu0(n: usize, alpha: f64, delta: f64) -> Result<f64> {
    if !(alpha + delta > -1.0) {
        return Err(Error::domain(format!(
            "α+δ > -1 required, got {}",
            alpha + delta
        )));
    }
    let lg_ad = log_gamma_pos(alpha + delta + 1.0);
    if is_nonneg_integer(delta) {
        // Γ(n−δ)/Γ(−δ) = ∏_{k<n}(k−δ): vanishes for n > δ.
        if n as f64 > delta {
            return Ok(0.0);
        }
        let prod: f64 = (0..n).map(|k| k as f64 - delta).product();
        return Ok(prod * (lg_ad - log_gamma_pos(n as f64 + alpha + 1.0)).exp());
    }
    let (lr, sr) = log_ratio_n(n, alpha, delta)?;
    let (lm, sm) = log_gamma_signed(-delta)?;
    Ok(sr * sm * (lg_ad + lr - lm).exp())
}

/// `∂a_n/∂δ` through the digamma logarithmic derivative.
fn endpoint_coeff_mu1(n: usize, alpha: f64, delta: f64) -> Result<f64> {
    let a = endpoint_coeff_mu0(n, alpha, delta)?;
    let nd = n as f64 - delta;
    let d = digamma_pos(alpha + delta + 1.0) - digamma_signed(nd) + digamma_signed(-delta);
    Ok(a * d)
}

/// `∂a_n/∂δ` at integer `δ = k`. For `n > k` only the vanishing factor of
/// `∏_{j<n}(j−δ)` is differentiated:
/// `−(−1)^k k! Γ(α+k+1) Γ(n−k) / Γ(n+α+1)`.
fn endpoint_coeff_mu1_integer(n: usize, alpha: f64, k: usize) -> Result<f64> {
    let kf = k as f64;
    if n <= k {
        let a = endpoint_coeff_mu0(n, alpha, kf)?;
        let d = digamma_pos(alpha + kf + 1.0) + (0..n).map(|j| 1.0 / (kf - j as f64)).sum::<f64>();
        return Ok(a * d);
    }
    let z = (n - k) as f64;
    let lr = if z >= RATIO_SERIES_MIN + alpha.abs() + kf {
        log_gamma_ratio_large(z, 0.0, alpha + kf + 1.0)
    } else {
        log_gamma_pos(z) - log_gamma_pos(n as f64 + alpha + 1.0)
    };
    let sign = if k.is_multiple_of(2) { -1.0 } else { 1.0 };
    Ok(sign * (log_gamma_pos(kf + 1.0) + log_gamma_pos(alpha + kf + 1.0) + lr).exp())
}

/// `∂²a_n/∂δ²` from `(ln a)'` and `(ln a)''` (digamma and trigamma).
fn endpoint_coeff_mu2(n: usize, alpha: f64, delta: f64) -> Result<f64> {
    let a = endpoint_coeff_mu0(n, alpha, delta)?;
    let nd = n as f64 - delta;
    let d1 = digamma_pos(alpha + delta + 1.0) - digamma_signed(nd) + digamma_signed(-delta);
    let d2 = trigamma_pos(alpha + delta + 1.0) + trigamma_signed(nd) - trigamma_signed(-delta);
    Ok(a * (d1 * d1 + d2))
}

/// Finite-difference step in `δ`.
pub const FD_STEP: f64 = 1e-3;

/// Fourth-order central stencils for derivatives 1..=4 (offsets `−3..=3`).
const STENCILS: [([f64; 7], f64); 4] = [
    ([0.0, 1.0, -8.0, 0.0, 8.0, -1.0, 0.0], 12.0),
    ([0.0, -1.0, 16.0, -30.0, 16.0, -1.0, 0.0], 12.0),
    ([1.0, -8.0, 13.0, 0.0, -13.0, 8.0, -1.0], 8.0),
    ([-1.0, 12.0, -39.0, 56.0, -39.0, 12.0, -1.0], 6.0),
];

fn fd_derivative(order: usize, h: f64, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let (w, denom) = STENCILS[order - 1];
    let mut s = 0.0;
    for (i, &wi) in w.iter().enumerate() {
        if wi != 0.0 {
            s += wi * f((i as f64 - 3.0) * h)?;
        }
    }
    Ok(s / (denom * h.powi(order as i32)))
}

/// Closed-form `a_n(α)` of `x^δ ln^μ x` (un-normalized, `g ≡ 1`).
///
/// `μ = 0` is the Gamma ratio, `μ = 1` its digamma derivative (a product
/// derivative at integer `δ`), `μ = 2` adds trigamma terms, and otherwise
/// a fourth-order central difference in `δ` with step [`FD_STEP`], checked
/// against the step `2h`.
pub fn closed_form_endpoint_coeff(n: usize, alpha: f64, delta: f64, mu: u32) -> Result<f64> {
    if !(alpha > -1.0) {
        return Err(Error::domain(format!("α > -1 required, got {alpha}")));
    }
    if !(alpha + delta > -1.0) {
        return Err(Error::domain(format!(
            "α+δ > -1 required, got {}",
            alpha + delta
        )));
    }
    match mu {
        0 => endpoint_coeff_mu0(n, alpha, delta),
        1 if is_nonneg_integer(delta) => endpoint_coeff_mu1_integer(n, alpha, delta as usize),
        1 if !is_nonneg_integer(delta - n as f64) => endpoint_coeff_mu1(n, alpha, delta),
        2 if !is_nonneg_integer(delta) && !is_nonneg_integer(delta - n as f64) => {
            endpoint_coeff_mu2(n, alpha, delta)
        }
        _ => {
            let order = mu as usize;
            if order > STENCILS.len() {
                return Err(Error::domain(format!(
                    "log power μ ≤ {} supported by the oracle",
                    STENCILS.len()
                )));
            }
            if !(alpha + delta - 6.0 * FD_STEP > -1.0) {
                return Err(Error::domain(
                    "α+δ too close to -1 for the difference stencil",
                ));
            }
            let f = |t: f64| endpoint_coeff_mu0(n, alpha, delta + t);
            let d1 = fd_derivative(order, FD_STEP, f)?;
            let d2 = fd_derivative(order, 2.0 * FD_STEP, f)?;
            let scale = d1.abs().max(f(0.0)?.abs());
            let est = (d1 - d2).abs() / 15.0;
            if est > 1e-6 * scale && est > 1e-300 {
                return Err(Error::NotConverged {
                    err_est: est,
                    tol: 1e-6 * scale,
                    context: format!("difference oracle at n = {n}, δ = {delta}, μ = {mu}"),
                });
            }
            Ok(d1)
        }
    }
}

/// Normalized series `â_n = a_n √σ_n` of `x^δ ln^μ x` from the closed form,
/// for degrees where the quadrature floor exceeds `|â_n|`.
pub fn closed_form_endpoint_series(
    spec: &SingularFunctionSpec,
    alpha: f64,
    n_values: &[usize],
) -> Result<CoefficientSeries> {
    check_sorted(n_values)?;
    if spec.kind != SingularityKind::LaguerreEndpoint
        || !matches!(spec.smooth_factor, SmoothFactor::One)
    {
        return Err(Error::InvalidSpec(
            "closed form needs the endpoint family with g ≡ 1".into(),
        ));
    }
    let values = n_values
        .iter()
        .map(|&n| {
            Ok(
                closed_form_endpoint_coeff(n, alpha, spec.exponent, spec.log_power)?
                    * (0.5 * log_sigma(n, alpha)).exp(),
            )
        })
        .collect::<Result<Vec<f64>>>()?;
    let k = n_values.len();
    Ok(assemble(
        Basis::Laguerre { alpha },
        spec,
        n_values,
        values,
        vec![0.0; k],
        vec![true; k],
    ))
}

/// `a_n^{(q)}(α+q) = (−1)^q [σ_{n+q}^{(α)}/σ_n^{(α+q)}] (n+1)⋯(n+q) a_{n+q}(α)`:
/// coefficient of `f^{(q)}` in the `L^{(α+q)}` basis from the coefficients
/// of `f`. Returns the multiplier of `a_{n+q}(α)`.
pub fn derivative_coeff_factor(n: usize, q: usize, alpha: f64) -> f64 {
    let sign = if q.is_multiple_of(2) { 1.0 } else { -1.0 };
    let ln_rising: f64 = (1..=q).map(|j| ((n + j) as f64).ln()).sum();
    sign * (log_sigma(n + q, alpha) - log_sigma(n, alpha + q as f64) + ln_rising).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn signed_log_gamma_reflection() {
        // Γ(−1/2) = −2√π, Γ(−3/2) = 4√π/3
        let (l, s) = log_gamma_signed(-0.5).unwrap();
        assert!(s < 0.0 && rel(l.exp(), 2.0 * PI.sqrt()) < 1e-14);
        let (l, s) = log_gamma_signed(-1.5).unwrap();
        assert!(s > 0.0 && rel(l.exp(), 4.0 * PI.sqrt() / 3.0) < 1e-14);
        assert!(log_gamma_signed(-2.0).is_err());
    }

    #[test]
    fn ratio_series_matches_direct_at_moderate_z() {
        for (z, a, b) in [(80.0, -0.5, 1.0), (100.0, -1.2, 3.0), (70.0, 0.3, 2.5)] {
            let direct = log_gamma_pos(z + a) - log_gamma_pos(z + b);
            let series = log_gamma_ratio_large(z, a, b);
            assert!(
                (direct - series).abs() < 1e-12,
                "{z} {a} {b}: {direct} {series}"
            );
        }
    }

    #[test]
    fn closed_form_trivial_cases() {
        // f = x, α = 0: a_0 = 1, a_1 = −1, rest 0.
        assert!(rel(closed_form_endpoint_coeff(0, 0.0, 1.0, 0).unwrap(), 1.0) < 1e-15);
        assert!(rel(closed_form_endpoint_coeff(1, 0.0, 1.0, 0).unwrap(), -1.0) < 1e-15);
        assert_eq!(closed_form_endpoint_coeff(2, 0.0, 1.0, 0).unwrap(), 0.0);
        // δ → 1 limit from both sides.
        for d in [1.0 - 1e-7, 1.0 + 1e-7] {
            assert!((closed_form_endpoint_coeff(1, 0.0, d, 0).unwrap() + 1.0).abs() < 1e-6);
        }
        let a1 = closed_form_endpoint_coeff(1, 0.0, 0.5, 0).unwrap();
        // Γ(3/2) − Γ(5/2) = −√π/4
        assert!(rel(a1, -PI.sqrt() / 4.0) < 1e-14);
        // Γ(3/2)Γ(4.5)/(Γ(6)Γ(−1/2)) with Γ(4.5) = 11.631728396567448…
        let a5 = closed_form_endpoint_coeff(5, 0.0, 0.5, 0).unwrap();
        let want = 0.5 * PI.sqrt() * 11.631_728_396_567_448 / (120.0 * -2.0 * PI.sqrt());
        assert!(rel(a5, want) < 1e-12);
        assert!(closed_form_endpoint_coeff(3, 0.0, -1.0, 0).is_err());
    }

    #[test]
    fn sign_pattern_for_fractional_power() {
        for delta in [0.1, 0.5, 0.9] {
            for n in 1..300 {
                assert!(closed_form_endpoint_coeff(n, 0.0, delta, 0).unwrap() < 0.0);
            }
        }
    }

    #[test]
    fn log_derivatives_agree_with_differences() {
        for (n, alpha, delta) in [(3usize, 0.0, 0.5), (150, 1.0, 1.2), (40, -0.5, 0.7)] {
            let analytic = closed_form_endpoint_coeff(n, alpha, delta, 1).unwrap();
            let f = |t: f64| endpoint_coeff_mu0(n, alpha, delta + t);
            let fd = fd_derivative(1, FD_STEP, f).unwrap();
            assert!(rel(fd, analytic) < 1e-9, "{n}: {fd} vs {analytic}");
        }
    }

    #[test]
    fn log_power_oracle_matches_direct_integral() {
        // a_n = ∫ e^{-x} x^δ ln^μ x L_n dx / σ_n at small n, via the moments
        // ∫ e^{-x} x^{t} ln^μ x dx = Γ^{(μ)}(t+1); for n = 0, α = 0 this is
        // Γ'(δ+1) = Γ(δ+1)ψ(δ+1).
        let d = 0.5;
        let want = log_gamma_pos(d + 1.0).exp() * digamma_pos(d + 1.0);
        assert!(rel(closed_form_endpoint_coeff(0, 0.0, d, 1).unwrap(), want) < 1e-12);
        // Γ'' = Γ(ψ² + ψ'), with ψ'(3/2) = π²/2 − 4.
        let psi = digamma_pos(d + 1.0);
        let trigamma = PI * PI / 2.0 - 4.0;
        let want2 = log_gamma_pos(d + 1.0).exp() * (psi * psi + trigamma);
        assert!(rel(closed_form_endpoint_coeff(0, 0.0, d, 2).unwrap(), want2) < 1e-13);
    }

    #[test]
    fn second_log_derivative_near_sign_change() {
        // 40-digit second δ-derivative of the Gamma ratio (mpmath), n = 19,
        // α = 0, δ = 1/2, where a_n changes sign between n = 19 and 20.
        let want = 1.859586900460128e-5;
        assert!(rel(closed_form_endpoint_coeff(19, 0.0, 0.5, 2).unwrap(), want) < 1e-9);
        for (n, alpha, delta) in [(3usize, 0.0, 0.5), (150, 1.0, 1.2), (40, -0.5, 0.7)] {
            let analytic = closed_form_endpoint_coeff(n, alpha, delta, 2).unwrap();
            let fd =
                fd_derivative(2, FD_STEP, |t| endpoint_coeff_mu0(n, alpha, delta + t)).unwrap();
            assert!(rel(fd, analytic) < 1e-6, "{n}: {fd} vs {analytic}");
        }
    }

    #[test]
    fn laguerre_coeffs_of_polynomials() {
        let one = SingularFunctionSpec::laguerre_endpoint(0.0, 0);
        let s = laguerre_coeffs(&one, 0.0, &[0, 1, 2, 5, 20], 1e-13).unwrap();
        assert!((s.coeff_normalized[0] - 1.0).abs() < 1e-12);
        for v in &s.coeff_normalized[1..] {
            assert!(v.abs() < 1e-12);
        }
        let x = SingularFunctionSpec::laguerre_endpoint(1.0, 0);
        let s = laguerre_coeffs(&x, 0.0, &[0, 1, 2, 3, 10], 1e-13).unwrap();
        assert!((s.coeff_normalized[0] - 1.0).abs() < 1e-12);
        assert!((s.coeff_normalized[1] + 1.0).abs() < 1e-12);
        for v in &s.coeff_normalized[2..] {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn laguerre_coeffs_match_oracle() {
        let spec = SingularFunctionSpec::laguerre_endpoint(0.5, 0);
        let ns: Vec<usize> = (0..=20).collect();
        let s = laguerre_coeffs(&spec, 0.0, &ns, 1e-14).unwrap();
        for (i, &n) in ns.iter().enumerate() {
            let want = closed_form_endpoint_coeff(n, 0.0, 0.5, 0).unwrap();
            assert!(rel(s.coeff_normalized[i], want) < 1e-10, "n = {n}");
        }
        assert!(rel(s.coeff_normalized[1], -PI.sqrt() / 4.0) < 1e-10);
    }

    #[test]
    fn interior_and_spec_validation() {
        let bad = SingularFunctionSpec::laguerre_interior(0.0, 1.2, 2);
        assert!(matches!(
            laguerre_coeffs(&bad, 0.0, &[1], 1e-13),
            Err(Error::InvalidSpec(_))
        ));
        let endpoint = SingularFunctionSpec::laguerre_endpoint(-1.5, 0);
        assert!(matches!(
            laguerre_coeffs(&endpoint, 0.0, &[1], 1e-13),
            Err(Error::Hypothesis { .. })
        ));
        let herm = SingularFunctionSpec::hermite_interior(0.0, -1.0, 0);
        assert!(hermite_coeffs(&herm, &[1], 1e-13).is_err());
        assert!(laguerre_coeffs(
            &SingularFunctionSpec::laguerre_endpoint(1.0, 0),
            0.0,
            &[3, 2],
            1e-13
        )
        .is_err());
    }

    #[test]
    fn hermite_coeffs_of_square() {
        let spec = SingularFunctionSpec::hermite_interior(0.0, 2.0, 0);
        let s = hermite_coeffs(&spec, &[0, 1, 2, 3, 4, 7], 1e-13).unwrap();
        assert!((s.coeff_normalized[0] - 0.5 * PI.powf(0.25)).abs() < 1e-12);
        assert!(s.coeff_normalized[1].abs() < 1e-12);
        assert!((s.coeff_normalized[2] - 0.25 * (8.0 * PI.sqrt()).sqrt()).abs() < 1e-12);
        for v in &s.coeff_normalized[3..] {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn hermite_parity_nulls() {
        let spec = SingularFunctionSpec::hermite_interior(0.0, 0.7, 2);
        let ns: Vec<usize> = (0..40).collect();
        let s = hermite_coeffs(&spec, &ns, 1e-13).unwrap();
        for (i, &n) in ns.iter().enumerate() {
            if n % 2 == 1 {
                assert!(s.coeff_normalized[i].abs() < 1e-12, "n = {n}");
            }
        }
    }

    #[test]
    fn derivative_identity_first_order() {
        // f = x, α = 0: a_0^{(1)}(1) = factor · a_1(0) = 1.
        let a1 = closed_form_endpoint_coeff(1, 0.0, 1.0, 0).unwrap();
        assert_eq!(derivative_coeff_factor(0, 1, 0.0) * a1, 1.0);
        // Factor is (−1)^q in general.
        for (n, q, a) in [(5usize, 2usize, 0.5), (40, 3, 1.3)] {
            let f = derivative_coeff_factor(n, q, a);
            assert!((f - if q % 2 == 0 { 1.0 } else { -1.0 }).abs() < 1e-12);
        }
    }

    #[test]
    fn integer_delta_log_oracle_matches_quadrature() {
        let spec = SingularFunctionSpec::laguerre_endpoint(2.0, 1);
        let ns = [0usize, 1, 2, 3, 10, 80];
        let q = laguerre_coeffs(&spec, 0.5, &ns, 1e-13).unwrap().raw();
        for (i, &n) in ns.iter().enumerate() {
            let c = closed_form_endpoint_coeff(n, 0.5, 2.0, 1).unwrap();
            assert!(
                (c - q.coeff_normalized[i]).abs() < 1e-10 * c.abs().max(1e-3),
                "n = {n}: {c} vs {}",
                q.coeff_normalized[i]
            );
        }
    }

    #[test]
    fn closed_form_series_matches_quadrature() {
        let spec = SingularFunctionSpec::laguerre_endpoint(1.2, 1);
        let ns = [0usize, 5, 40, 120];
        let q = laguerre_coeffs(&spec, 1.0, &ns, 1e-13).unwrap();
        let c = closed_form_endpoint_series(&spec, 1.0, &ns).unwrap();
        for i in 0..ns.len() {
            assert!(
                rel(c.coeff_normalized[i], q.coeff_normalized[i]) < 1e-8,
                "n = {}",
                ns[i]
            );
            assert!(c.gated(i));
        }
        let interior = SingularFunctionSpec::laguerre_interior(0.3, 1.2, 1);
        assert!(closed_form_endpoint_series(&interior, 0.0, &ns).is_err());
    }

    #[test]
    fn raw_view_undoes_normalization() {
        let spec = SingularFunctionSpec::laguerre_endpoint(0.7, 1);
        let s = laguerre_coeffs(&spec, 1.0, &[3, 10, 40], 1e-13).unwrap();
        let raw = s.raw();
        for (i, &n) in s.n_values.iter().enumerate() {
            let want = closed_form_endpoint_coeff(n, 1.0, 0.7, 1).unwrap();
            assert!(rel(raw.coeff_normalized[i], want) < 1e-8);
            assert!((raw.log10_abs[i] - want.abs().log10()).abs() < 1e-8);
        }
    }
}
