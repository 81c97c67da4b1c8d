//! Generalized Laguerre and Hermite functions.
//!
//! Downstream code works with the orthonormal weighted functions
//!
//! * `ℓ̂_n(x) = e^{-x/2} x^{α/2} L_n^{(α)}(x) / √σ_n^{(α)}`, `σ_n^{(α)} = Γ(n+α+1)/n!`
//! * `ψ_n(x) = e^{-x²/2} H_n(x) / √γ_n`, `γ_n = √π 2^n n!`
//!
//! evaluated by normalized three-term recurrences with a running log-scale,
//! so rows up to `n = 10⁵` neither overflow nor lose the underflowing tail.
//! Raw polynomial values are only provided for small degrees.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specfun::{bessel_j_unchecked, log_gamma_pos};

/// Rescale threshold for the recurrences.
const BIG: f64 = 1e100;
const LN_BIG: f64 = 230.258_509_299_404_57;

/// Laguerre weight parameter `α > -1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaguerreBasis {
    alpha: f64,
}

impl LaguerreBasis {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > -1.0 && alpha.is_finite() {
            Ok(Self { alpha })
        } else {
            Err(Error::domain(format!(
                "Laguerre parameter must satisfy α > -1, got {alpha}"
            )))
        }
    }

    pub fn alpha(self) -> f64 {
        self.alpha
    }
}

/// One entry of an orthonormal row: the represented value is
/// `value · e^{log_scale}`. Underflowed entries are `0` with
/// `log_scale = -∞`; all others carry `log_scale = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedPolyValue {
    pub n: usize,
    pub value: f64,
    pub log_scale: f64,
}

impl WeightedPolyValue {
    fn from_parts(n: usize, v: f64, scale: f64) -> Self {
        if scale == 0.0 {
            Self {
                n,
                value: 0.0,
                log_scale: f64::NEG_INFINITY,
            }
        } else {
            Self {
                n,
                value: v * scale,
                log_scale: 0.0,
            }
        }
    }

    pub fn full(&self) -> f64 {
        if self.log_scale == f64::NEG_INFINITY {
            0.0
        } else {
            self.value * self.log_scale.exp()
        }
    }
}

/// `ln σ_n^{(α)} = ln Γ(n+α+1) − ln n!`.
pub fn log_sigma(n: usize, alpha: f64) -> f64 {
    debug_assert!(alpha > -1.0);
    let n = n as f64;
    if alpha == 0.0 {
        return 0.0;
    }
    log_gamma_pos(n + alpha + 1.0) - log_gamma_pos(n + 1.0)
}

/// `ln γ_n = ½ ln π + n ln 2 + ln n!`.
pub fn log_gamma_hermite(n: usize) -> f64 {
    0.5 * PI.ln() + n as f64 * std::f64::consts::LN_2 + log_gamma_pos(n as f64 + 1.0)
}

/// Precomputed recurrence coefficients for `ℓ̂_0 … ℓ̂_{n_max}`.
#[derive(Debug, Clone)]
pub struct LaguerreRecurrence {
    alpha: f64,
    ln_norm0: f64,
    /// `1/√((k+1)(k+α+1))`
    inv: Vec<f64>,
    /// `√(k(k+α))`
    back: Vec<f64>,
}

impl LaguerreRecurrence {
    pub fn new(basis: LaguerreBasis, n_max: usize) -> Self {
        let alpha = basis.alpha;
        let inv = (0..n_max)
            .map(|k| {
                let k = k as f64;
                1.0 / ((k + 1.0) * (k + alpha + 1.0)).sqrt()
            })
            .collect();
        let back = (0..n_max)
            .map(|k| {
                let k = k as f64;
                (k * (k + alpha)).sqrt()
            })
            .collect();
        Self {
            alpha,
            ln_norm0: -0.5 * log_gamma_pos(alpha + 1.0),
            inv,
            back,
        }
    }

    pub fn n_max(&self) -> usize {
        self.inv.len()
    }

    /// Writes `ℓ̂_k(x)` for `k < out.len()` (at most `n_max + 1` entries).
    pub fn fill(&self, x: f64, out: &mut [f64]) -> Result<()> {
        self.fill_with(x, out.len(), |k, v, scale| out[k] = v * scale)
    }

    fn fill_with(&self, x: f64, len: usize, mut put: impl FnMut(usize, f64, f64)) -> Result<()> {
        assert!(
            len <= self.inv.len() + 1,
            "row longer than the precomputed recurrence"
        );
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::domain(format!(
                "Laguerre functions need finite x ≥ 0, got {x}"
            )));
        }
        if len == 0 {
            return Ok(());
        }
        let alpha = self.alpha;
        let mut ls = if x == 0.0 {
            if alpha < 0.0 {
                return Err(Error::domain("ℓ̂_n diverges at x = 0 for α < 0"));
            }
            if alpha == 0.0 {
                self.ln_norm0
            } else {
                f64::NEG_INFINITY
            }
        } else {
            -0.5 * x + 0.5 * alpha * x.ln() + self.ln_norm0
        };
        let mut scale = ls.exp();
        let mut prev = 0.0;
        let mut cur = 1.0;
        put(0, cur, scale);
        for k in 0..len - 1 {
            let next =
                ((2.0 * k as f64 + alpha + 1.0 - x) * cur - self.back[k] * prev) * self.inv[k];
            prev = cur;
            cur = next;
            if cur.abs() > BIG {
                cur /= BIG;
                prev /= BIG;
                ls += LN_BIG;
                scale = ls.exp();
            }
            put(k + 1, cur, scale);
        }
        Ok(())
    }
}

/// Precomputed recurrence coefficients for `ψ_0 … ψ_{n_max}`.
#[derive(Debug, Clone)]
pub struct HermiteRecurrence {
    /// `√(2/(k+1))`
    lead: Vec<f64>,
    /// `√(k/(k+1))`
    back: Vec<f64>,
}

impl HermiteRecurrence {
    pub fn new(n_max: usize) -> Self {
        let lead = (0..n_max)
            .map(|k| (2.0 / (k as f64 + 1.0)).sqrt())
            .collect();
        let back = (0..n_max)
            .map(|k| (k as f64 / (k as f64 + 1.0)).sqrt())
            .collect();
        Self { lead, back }
    }

    pub fn n_max(&self) -> usize {
        self.lead.len()
    }

    /// Writes `ψ_k(x)` for `k < out.len()` (at most `n_max + 1` entries).
    pub fn fill(&self, x: f64, out: &mut [f64]) {
        self.fill_with(x, out.len(), |k, v, scale| out[k] = v * scale)
    }

    fn fill_with(&self, x: f64, len: usize, mut put: impl FnMut(usize, f64, f64)) {
        assert!(
            len <= self.lead.len() + 1,
            "row longer than the precomputed recurrence"
        );
        if len == 0 {
            return;
        }
        let mut ls = -0.5 * x * x - 0.25 * PI.ln();
        let mut scale = ls.exp();
        let mut prev = 0.0;
        let mut cur = 1.0;
        put(0, cur, scale);
        for k in 0..len - 1 {
            let next = x * self.lead[k] * cur - self.back[k] * prev;
            prev = cur;
            cur = next;
            if cur.abs() > BIG {
                cur /= BIG;
                prev /= BIG;
                ls += LN_BIG;
                scale = ls.exp();
            }
            put(k + 1, cur, scale);
        }
    }
}

/// `ℓ̂_0(x) … ℓ̂_{n_max}(x)`.
pub fn laguerre_orthonormal_row(
    alpha: f64,
    n_max: usize,
    x: f64,
) -> Result<Vec<WeightedPolyValue>> {
    let rec = LaguerreRecurrence::new(LaguerreBasis::new(alpha)?, n_max);
    let mut row = Vec::with_capacity(n_max + 1);
    rec.fill_with(x, n_max + 1, |k, v, s| {
        row.push(WeightedPolyValue::from_parts(k, v, s))
    })?;
    Ok(row)
}

/// `ψ_0(x) … ψ_{n_max}(x)`.
pub fn hermite_orthonormal_row(n_max: usize, x: f64) -> Vec<WeightedPolyValue> {
    let rec = HermiteRecurrence::new(n_max);
    let mut row = Vec::with_capacity(n_max + 1);
    rec.fill_with(x, n_max + 1, |k, v, s| {
        row.push(WeightedPolyValue::from_parts(k, v, s))
    });
    row
}

/// Raw `L_n^{(α)}(x)` by the classical recurrence. Intended for small `n`.
pub fn laguerre_raw(n: usize, alpha: f64, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for k in 0..n {
        let k = k as f64;
        let next = ((2.0 * k + alpha + 1.0 - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Raw physicists' `H_n(x)`. Intended for small `n`.
pub fn hermite_raw(n: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for k in 0..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Right end of the interval on which the Hilb-type main term is evaluated.
pub const HILB_OMEGA_CAP: f64 = 1.0;

/// Hilb-type main term `ñ^{-α/2} Γ(n+α+1)/n! · J_α(2√(ñx))`, `ñ = n + (α+1)/2`.
///
/// At `x = 0` the limit is returned (`σ_n` for `α = 0`, `0` for `α > 0`).
pub fn hilb_approx(alpha: f64, n: usize, x: f64) -> Result<f64> {
    LaguerreBasis::new(alpha)?;
    if n == 0 {
        return Err(Error::domain("Hilb-type formula needs n ≥ 1"));
    }
    if x.is_nan() || !(0.0..=HILB_OMEGA_CAP).contains(&x) || (x == 0.0 && alpha < 0.0) {
        return Err(Error::domain(format!(
            "Hilb-type formula evaluated on (0, {HILB_OMEGA_CAP}], got x = {x}"
        )));
    }
    let n_tilde = n as f64 + 0.5 * (alpha + 1.0);
    let pre = (-0.5 * alpha * n_tilde.ln() + log_sigma(n, alpha)).exp();
    let j = if x == 0.0 {
        if alpha == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        bessel_j_unchecked(alpha, 2.0 * (n_tilde * x).sqrt())
    };
    Ok(pre * j)
}

/// `e^{-x/2} x^{α/2} L_n^{(α)}(x)` at large `n`, via the orthonormal row.
pub fn weighted_laguerre(alpha: f64, n: usize, x: f64) -> Result<f64> {
    let row = laguerre_orthonormal_row(alpha, n, x)?;
    Ok(row[n].full() * (0.5 * log_sigma(n, alpha)).exp())
}

/// Residual of the Hilb-type formula: weighted `L_n^{(α)}` minus the main term.
pub fn hilb_residual(alpha: f64, n: usize, x: f64) -> Result<f64> {
    Ok(weighted_laguerre(alpha, n, x)? - hilb_approx(alpha, n, x)?)
}

/// Polynomial family for [`weighted_max_ratio`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaxRatioKind {
    /// `max e^{-x/2} x^λ |L_n^{(α)}(x)|`
    Laguerre { alpha: f64 },
    /// `max e^{-x²/2} x^λ |H_n(x)| / √(2^n n!)`
    Hermite,
}

/// Sampling region for [`weighted_max_ratio`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxRatioParams {
    pub lambda: f64,
    pub a: f64,
    /// `Some(η)` restricts to `x ≤ (4−η)n` (Laguerre) or `|x| ≤ √((2−η)n)`
    /// (Hermite) and uses the bulk exponent; `None` samples past the turning
    /// point and uses the global exponent.
    pub eta: Option<f64>,
}

impl MaxRatioParams {
    /// Lemma exponent of `n` in the weighted maximum.
    pub fn exponent(&self, kind: MaxRatioKind) -> f64 {
        let l = self.lambda;
        match (kind, self.eta) {
            (MaxRatioKind::Laguerre { alpha }, Some(_)) => (l - 0.5).max(0.5 * alpha - 0.25),
            (MaxRatioKind::Laguerre { alpha }, None) => (l - 1.0 / 3.0).max(0.5 * alpha - 0.25),
            (MaxRatioKind::Hermite, Some(_)) => (0.5 * l - 0.25).max(-0.25),
            (MaxRatioKind::Hermite, None) => (0.5 * l - 1.0 / 12.0).max(-0.25),
        }
    }
}

/// Sampled weighted maximum of a degree-`n` polynomial divided by the lemma's
/// power of `n` (divided by `1` when `n = 0`). The grid resolves every
/// oscillation with at least 20 points per half-wavelength.
pub fn weighted_max_ratio(kind: MaxRatioKind, params: MaxRatioParams, n: usize) -> Result<f64> {
    if !(params.a > 0.0) {
        return Err(Error::domain("weighted maximum needs a > 0"));
    }
    let nf = n as f64;
    let (upper, log_norm) = match kind {
        MaxRatioKind::Laguerre { alpha } => {
            LaguerreBasis::new(alpha)?;
            let up = match params.eta {
                Some(eta) => (4.0 - eta) * nf,
                None => 4.0 * nf + 8.0 * (nf + 1.0).cbrt() + 60.0,
            };
            (up, 0.5 * log_sigma(n, alpha))
        }
        MaxRatioKind::Hermite => {
            let up = match params.eta {
                Some(eta) => ((2.0 - eta) * nf).sqrt(),
                None => (2.0 * nf + 1.0).sqrt() + 12.0,
            };
            // ψ_n √γ_n / √(2^n n!) = ψ_n π^{1/4}
            (up, 0.25 * PI.ln())
        }
    };
    if upper <= params.a {
        return Err(Error::domain(format!(
            "empty sampling interval [{}, {upper}] for n = {n}",
            params.a
        )));
    }
    let mut x = params.a;
    let mut best = 0.0f64;
    let mut row = vec![0.0; n + 1];
    let lag = match kind {
        MaxRatioKind::Laguerre { alpha } => Some((
            alpha,
            LaguerreRecurrence::new(LaguerreBasis::new(alpha)?, n),
        )),
        MaxRatioKind::Hermite => None,
    };
    let herm = HermiteRecurrence::new(n);
    loop {
        let value = match &lag {
            Some((alpha, rec)) => {
                rec.fill(x, &mut row)?;
                row[n].abs() * ((params.lambda - 0.5 * alpha) * x.ln() + log_norm).exp()
            }
            None => {
                herm.fill(x, &mut row);
                row[n].abs() * (params.lambda * x.ln() + log_norm).exp()
            }
        };
        best = best.max(value);
        if x >= upper {
            break;
        }
        let half_wave = match kind {
            MaxRatioKind::Laguerre { alpha } => {
                0.5 * PI * x.sqrt() / (nf + 0.5 * (alpha + 1.0)).sqrt()
            }
            MaxRatioKind::Hermite => 0.5 * PI / (2.0 * nf + 1.0).sqrt(),
        };
        x = (x + half_wave / 20.0).min(upper);
    }
    let power = if n == 0 {
        0.0
    } else {
        params.exponent(kind) * nf.ln()
    };
    Ok(best * (-power).exp())
}

/// Relative discrepancies of the Hermite–Laguerre identities
/// `H_{2n}(x) = (−1)^n 2^{2n} n! L_n^{(−1/2)}(x²)` and
/// `H_{2n+1}(x) = (−1)^n 2^{2n+1} n! x L_n^{(1/2)}(x²)`, from raw values.
pub fn hermite_laguerre_identity_error(n: usize, x: f64) -> (f64, f64) {
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let fact = log_gamma_pos(n as f64 + 1.0).exp();
    let p2 = 2f64.powi(2 * n as i32);
    let even_l = hermite_raw(2 * n, x);
    let even_r = sign * p2 * fact * laguerre_raw(n, -0.5, x * x);
    let odd_l = hermite_raw(2 * n + 1, x);
    let odd_r = sign * 2.0 * p2 * fact * x * laguerre_raw(n, 0.5, x * x);
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    (rel(even_l, even_r), rel(odd_l, odd_r))
}

/// Relative discrepancy of the `k = 1` Rodrigues reduction
/// `d/dx[e^{−x} x^{α+1} L_{n−1}^{(α+1)}] = n e^{−x} x^α L_n^{(α)}`, with the
/// left side expanded through `d/dx L_m^{(β)} = −L_{m−1}^{(β+1)}` and the common
/// factor `e^{−x} x^α` removed.
pub fn rodrigues_k1_error(n: usize, alpha: f64, x: f64) -> f64 {
    assert!(n >= 1);
    let left_deriv = if n >= 2 {
        -laguerre_raw(n - 2, alpha + 2.0, x)
    } else {
        0.0
    };
    let lhs = (alpha + 1.0 - x) * laguerre_raw(n - 1, alpha + 1.0, x) + x * left_deriv;
    let rhs = n as f64 * laguerre_raw(n, alpha, x);
    (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{gauss_rule, RuleKind};
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn log_sigma_trivial_values() {
        assert_eq!(log_sigma(0, 0.0), 0.0);
        assert_eq!(log_sigma(3, 0.0), 0.0);
        for n in [1usize, 10, 100] {
            assert!(close(log_sigma(n, 1.0), (n as f64 + 1.0).ln(), 1e-13));
        }
    }

    #[test]
    fn laguerre_row_examples() {
        let row = laguerre_orthonormal_row(0.0, 1, 0.0).unwrap();
        assert!(close(row[0].full(), 1.0, 1e-15) && close(row[1].full(), 1.0, 1e-15));
        let row = laguerre_orthonormal_row(1.0, 1, 2.0).unwrap();
        assert!(row[1].full().abs() < 1e-15);
        assert!(laguerre_orthonormal_row(-0.5, 3, 0.0).is_err());
        assert!(laguerre_orthonormal_row(-1.0, 3, 1.0).is_err());
    }

    #[test]
    fn hermite_row_examples() {
        let row = hermite_orthonormal_row(1, 0.0);
        assert!(close(row[0].full(), PI.powf(-0.25), 1e-15));
        assert_eq!(row[1].full(), 0.0);
        let row = hermite_orthonormal_row(2, 1.0);
        let want = (-0.5f64).exp() * 2.0 / (PI.sqrt() * 8.0).sqrt();
        assert!(close(row[2].full(), want, 1e-14));
    }

    #[test]
    fn hermite_parity() {
        for x in [0.3, 2.0, 7.0] {
            let p = hermite_orthonormal_row(200, x);
            let m = hermite_orthonormal_row(200, -x);
            for n in 0..=200 {
                let s = if n % 2 == 0 { 1.0 } else { -1.0 };
                assert!(
                    (m[n].full() - s * p[n].full()).abs() <= 1e-14 * p[n].full().abs().max(1e-300)
                );
            }
        }
    }

    #[test]
    fn matches_raw_polynomials_at_small_degree() {
        for alpha in [-0.5, 0.0, 1.3] {
            for x in [0.2, 1.5, 9.0] {
                let row = laguerre_orthonormal_row(alpha, 20, x).unwrap();
                for n in 0..=20 {
                    let raw = (-0.5 * x).exp() * x.powf(0.5 * alpha) * laguerre_raw(n, alpha, x)
                        / (0.5 * log_sigma(n, alpha)).exp();
                    assert!((row[n].full() - raw).abs() < 1e-12, "α={alpha} x={x} n={n}");
                }
            }
        }
        for x in [-2.0, 0.7, 4.0] {
            let row = hermite_orthonormal_row(20, x);
            for n in 0..=20 {
                let raw =
                    (-0.5 * x * x).exp() * hermite_raw(n, x) / (0.5 * log_gamma_hermite(n)).exp();
                assert!((row[n].full() - raw).abs() < 1e-12);
            }
        }
    }

    fn gram_deviation_laguerre(alpha: f64) -> f64 {
        let rule = gauss_rule(RuleKind::Laguerre { alpha }, 200).unwrap();
        let rec = LaguerreRecurrence::new(LaguerreBasis::new(alpha).unwrap(), 50);
        let mut g = vec![[0.0f64; 51]; 51];
        let mut row = vec![0.0; 51];
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights_over_density) {
            rec.fill(x, &mut row).unwrap();
            for i in 0..51 {
                for j in 0..51 {
                    g[i][j] += w * row[i] * row[j];
                }
            }
        }
        let mut dev = 0.0f64;
        for i in 0..51 {
            for j in 0..51 {
                dev = dev.max((g[i][j] - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        dev
    }

    #[test]
    fn laguerre_gram_matrix_is_identity() {
        for alpha in [-0.5, 0.0, 1.0] {
            let dev = gram_deviation_laguerre(alpha);
            assert!(dev <= 1e-10, "α = {alpha}: {dev}");
        }
    }

    #[test]
    fn hermite_gram_matrix_is_identity() {
        let rule = gauss_rule(RuleKind::Hermite, 120).unwrap();
        let rec = HermiteRecurrence::new(50);
        let mut g = vec![[0.0f64; 51]; 51];
        let mut row = vec![0.0; 51];
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights_over_density) {
            rec.fill(x, &mut row);
            for i in 0..51 {
                for j in 0..51 {
                    g[i][j] += w * row[i] * row[j];
                }
            }
        }
        for i in 0..51 {
            for j in 0..51 {
                assert!((g[i][j] - if i == j { 1.0 } else { 0.0 }).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn large_degree_rows_stay_finite() {
        let row = laguerre_orthonormal_row(0.5, 100_000, 1e6).unwrap();
        assert!(row.iter().all(|v| v.full().is_finite()));
        let row = laguerre_orthonormal_row(0.0, 100_000, 3e5).unwrap();
        assert!(row.iter().all(|v| v.full().abs() <= 1.0 + 1e-9));
        let row = hermite_orthonormal_row(100_000, 1e3);
        assert!(row.iter().all(|v| v.full().is_finite()));
        // Deep underflow is reported with the sentinel.
        let row = hermite_orthonormal_row(3, 60.0);
        assert_eq!(row[0].log_scale, f64::NEG_INFINITY);
    }

    #[test]
    fn hilb_limits_and_domain() {
        assert!(close(hilb_approx(0.0, 7, 0.0).unwrap(), 1.0, 1e-15));
        assert_eq!(hilb_approx(1.0, 7, 0.0).unwrap(), 0.0);
        assert!(hilb_approx(0.0, 7, 1.5).is_err());
        assert!(hilb_approx(-0.5, 7, 0.0).is_err());
        assert!(hilb_approx(0.0, 0, 0.5).is_err());
    }

    #[test]
    fn hilb_matches_weighted_polynomial() {
        let exact = weighted_laguerre(0.5, 1000, 0.25).unwrap();
        let approx = hilb_approx(0.5, 1000, 0.25).unwrap();
        assert!((exact - approx).abs() <= 1e-2 * exact.abs());
    }

    #[test]
    fn hermite_laguerre_identities() {
        for n in 0..=30 {
            for x in [0.1, 0.9, 2.5] {
                let (e, o) = hermite_laguerre_identity_error(n, x);
                assert!(e <= 1e-9 && o <= 1e-9, "n={n} x={x}: {e} {o}");
            }
        }
    }

    #[test]
    fn rodrigues_first_step() {
        for n in 1..=50 {
            for x in [0.5, 1.0, 4.0] {
                for alpha in [0.0, 0.5, 2.0] {
                    let e = rodrigues_k1_error(n, alpha, x);
                    assert!(e <= 1e-10, "n={n} x={x} α={alpha}: {e}");
                }
            }
        }
    }

    #[test]
    fn weighted_max_degree_zero_is_bare_weight() {
        let p = MaxRatioParams {
            lambda: 0.0,
            a: 1.0,
            eta: Some(1.0),
        };
        let r = weighted_max_ratio(
            MaxRatioKind::Laguerre { alpha: 0.0 },
            MaxRatioParams { eta: None, ..p },
            0,
        )
        .unwrap();
        assert!(close(r, (-0.5f64).exp(), 1e-15));
        let r = weighted_max_ratio(MaxRatioKind::Hermite, MaxRatioParams { eta: None, ..p }, 0)
            .unwrap();
        assert!(close(r, (-0.5f64).exp(), 1e-15));
    }

    #[test]
    fn weighted_max_ratios_are_bounded() {
        let p = MaxRatioParams {
            lambda: 0.0,
            a: 1.0,
            eta: Some(1.0),
        };
        let hp = MaxRatioParams {
            eta: Some(0.5),
            ..p
        };
        let mut lag = Vec::new();
        let mut her = Vec::new();
        for k in 6..=12 {
            let n = 1usize << k;
            lag.push(weighted_max_ratio(MaxRatioKind::Laguerre { alpha: 0.0 }, p, n).unwrap());
            her.push(weighted_max_ratio(MaxRatioKind::Hermite, hp, n).unwrap());
        }
        for r in [lag, her] {
            let mut s = r.clone();
            s.sort_by(f64::total_cmp);
            let median = s[s.len() / 2];
            assert!(s[s.len() - 1] <= 2.0 * median, "{r:?}");
        }
    }

    proptest! {
        #[test]
        fn laguerre_recurrence_residual(alpha in -0.9f64..3.0, x in 0.01f64..200.0, n in 1usize..400) {
            let row = laguerre_orthonormal_row(alpha, n + 1, x).unwrap();
            let (a, b, c) = (row[n - 1].full(), row[n].full(), row[n + 1].full());
            let nf = n as f64;
            let lhs = ((nf + 1.0) * (nf + alpha + 1.0)).sqrt() * c;
            let rhs = (2.0 * nf + alpha + 1.0 - x) * b - (nf * (nf + alpha)).sqrt() * a;
            let scale = lhs.abs().max((2.0 * nf + alpha + 1.0 + x) * b.abs()).max((nf * (nf + alpha)).sqrt() * a.abs());
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale.max(1e-300));
        }

        #[test]
        fn hermite_recurrence_residual(x in -30.0f64..30.0, n in 1usize..400) {
            let row = hermite_orthonormal_row(n + 1, x);
            let (a, b, c) = (row[n - 1].full(), row[n].full(), row[n + 1].full());
            let nf = n as f64;
            let lhs = c;
            let rhs = x * (2.0 / (nf + 1.0)).sqrt() * b - (nf / (nf + 1.0)).sqrt() * a;
            let scale = lhs.abs().max((x * (2.0 / (nf + 1.0)).sqrt() * b).abs()).max(a.abs());
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale.max(1e-300));
        }

        #[test]
        fn hermite_parity_random(x in 0.0f64..20.0, n in 0usize..300) {
            let p = hermite_orthonormal_row(n, x)[n].full();
            let m = hermite_orthonormal_row(n, -x)[n].full();
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((m - s * p).abs() <= 1e-14 * p.abs().max(1e-300));
        }
    }
}
