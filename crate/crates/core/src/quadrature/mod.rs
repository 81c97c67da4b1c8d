//! Gauss rules and the graded composite rule behind every integral in the
//! crate.
//!
//! [`gauss_rule`] builds Gauss-Laguerre, Gauss-Hermite and Gauss-Legendre
//! rules from the symmetric Jacobi matrix of the weight (Golub-Welsch).
//! [`integrate_singular_oscillatory`] composes Gauss-Legendre panels on a mesh
//! that is graded geometrically toward declared singular points and capped by
//! a local half-wavelength so that oscillatory kernels stay resolved.

mod composite;
mod tridiag;
mod truncation;

use std::f64::consts::PI;
use std::sync::OnceLock;

pub use composite::{
    integrate_singular_oscillatory, integrate_vector, integrate_vector_nodes, Oscillation,
    QuadNode, SingularOscillatoryPlan, VectorIntegral,
};
pub use tridiag::{symmetric_tridiagonal_eigenvalues, MAX_QL_ITERATIONS};
pub use truncation::{truncation_point, Envelope};

use crate::error::{Error, Result};
use crate::specfun::log_gamma_pos;

/// Weight function of a Gauss rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RuleKind {
    /// `x^α e^{-x}` on `[0, ∞)`.
    Laguerre { alpha: f64 },
    /// `e^{-x²}` on `ℝ`.
    Hermite,
    /// `1` on `[a, b]`.
    Legendre { a: f64, b: f64 },
}

impl RuleKind {
    /// Total mass of the weight.
    pub fn mass(&self) -> f64 {
        match *self {
            RuleKind::Laguerre { alpha } => log_gamma_pos(alpha + 1.0).exp(),
            RuleKind::Hermite => PI.sqrt(),
            RuleKind::Legendre { a, b } => b - a,
        }
    }

    fn ln_mass(&self) -> f64 {
        match *self {
            RuleKind::Laguerre { alpha } => log_gamma_pos(alpha + 1.0),
            _ => self.mass().ln(),
        }
    }

    /// `ln` of the weight function at `x` (only meaningful inside the support).
    fn ln_density(&self, x: f64) -> f64 {
        match *self {
            RuleKind::Laguerre { alpha } => alpha * x.ln() - x,
            RuleKind::Hermite => -x * x,
            RuleKind::Legendre { .. } => 0.0,
        }
    }

    /// Jacobi matrix of the monic recurrence on the reference support.
    fn jacobi(&self, m: usize) -> (Vec<f64>, Vec<f64>) {
        let off_len = m.saturating_sub(1);
        match *self {
            RuleKind::Laguerre { alpha } => (
                (0..m).map(|k| 2.0 * k as f64 + alpha + 1.0).collect(),
                (1..=off_len)
                    .map(|k| (k as f64 * (k as f64 + alpha)).sqrt())
                    .collect(),
            ),
            RuleKind::Hermite => (
                vec![0.0; m],
                (1..=off_len).map(|k| (0.5 * k as f64).sqrt()).collect(),
            ),
            RuleKind::Legendre { .. } => (
                vec![0.0; m],
                (1..=off_len)
                    .map(|k| {
                        let k = k as f64;
                        k / (4.0 * k * k - 1.0).sqrt()
                    })
                    .collect(),
            ),
        }
    }
}

/// Nodes and weights of an `M`-point Gauss rule.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `weights[i] / w(nodes[i])`, computed without forming the (possibly
    /// underflowing) weight function. Use these to integrate `∫ g(x) dx`.
    pub weights_over_density: Vec<f64>,
    pub kind: RuleKind,
    pub exactness_degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_i g(x_i)`, approximating `∫ w(x) g(x) dx`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * g(x))
            .sum()
    }
}

/// Orthonormal-recurrence data at `x`: `ln Σ_{k<m} p̂_k(x)²` together with
/// `p̂_m(x) / p̂'_m(x)` (the Newton correction for a zero of `p̂_m`).
fn christoffel(diag: &[f64], off_full: &[f64], ln_mass: f64, x: f64) -> (f64, f64) {
    // p̂_0 = 1/√mass; b_{k+1} p̂_{k+1} = (x - a_k) p̂_k - b_k p̂_{k-1}
    let m = diag.len();
    let mut ln_scale = -0.5 * ln_mass;
    let mut p_prev = 0.0;
    let mut p = 1.0;
    let mut dp_prev = 0.0;
    let mut dp = 0.0;
    let mut sum = 0.0;
    for k in 0..m {
        sum += p * p;
        let b_next = off_full[k];
        let b_k = if k == 0 { 0.0 } else { off_full[k - 1] };
        let p_next = ((x - diag[k]) * p - b_k * p_prev) / b_next;
        let dp_next = (p + (x - diag[k]) * dp - b_k * dp_prev) / b_next;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
        let mag = p.abs().max(p_prev.abs()).max(sum.sqrt());
        if mag > 1e100 {
            let s = 1.0 / mag;
            p *= s;
            p_prev *= s;
            dp *= s;
            dp_prev *= s;
            sum *= s * s;
            ln_scale += mag.ln();
        }
    }
    (sum.ln() + 2.0 * ln_scale, p / dp)
}

/// `M`-point Gauss rule for the given weight.
///
/// Nodes are the eigenvalues of the Jacobi matrix (implicit QL), polished by
/// a Newton step on the orthonormal recurrence. Weights are the Christoffel
/// numbers `1 / Σ_{k<M} p̂_k(x_i)²`, which equal `mass · v_{i,0}²` for the
/// normalized eigenvectors but keep full relative accuracy for the tiny
/// weights at the far end of Laguerre and Hermite rules.
pub fn gauss_rule(kind: RuleKind, m: usize) -> Result<QuadratureRule> {
    if m == 0 {
        return Err(Error::domain("a Gauss rule needs at least one node"));
    }
    match kind {
        RuleKind::Laguerre { alpha } if !(alpha > -1.0) => {
            return Err(Error::domain(format!(
                "Laguerre rule requires alpha > -1, got {alpha}"
            )));
        }
        RuleKind::Legendre { a, b } if !(b > a) => {
            return Err(Error::domain(format!(
                "Legendre rule requires a < b, got [{a}, {b}]"
            )));
        }
        _ => {}
    }
    let (diag, off) = kind.jacobi(m);
    let mut nodes = symmetric_tridiagonal_eigenvalues(&diag, &off)?;
    // Off-diagonal extended by b_M for the degree-M polynomial.
    let (_, off_ext) = kind.jacobi(m + 1);
    let ln_mass = match kind {
        RuleKind::Legendre { .. } => 2f64.ln(),
        _ => kind.ln_mass(),
    };
    let mut weights = Vec::with_capacity(m);
    let mut over_density = Vec::with_capacity(m);
    for x in nodes.iter_mut() {
        for _ in 0..2 {
            let (_, step) = christoffel(&diag, &off_ext, ln_mass, *x);
            if step.is_finite() && step.abs() < 1e-6 * (1.0 + x.abs()) {
                *x -= step;
            }
        }
        let (ln_sum, _) = christoffel(&diag, &off_ext, ln_mass, *x);
        let ln_w = -ln_sum;
        match kind {
            RuleKind::Legendre { a, b } => {
                let half = 0.5 * (b - a);
                weights.push(half * ln_w.exp());
                over_density.push(half * ln_w.exp());
            }
            _ => {
                weights.push(ln_w.exp());
                over_density.push((ln_w - kind.ln_density(*x)).exp());
            }
        }
    }
    if let RuleKind::Legendre { a, b } = kind {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for x in nodes.iter_mut() {
            *x = mid + half * *x;
        }
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        weights_over_density: over_density,
        kind,
        exactness_degree: 2 * m - 1,
    })
}

/// Reference Gauss-Legendre rule on `[-1, 1]`, cached per order.
pub(crate) fn reference_legendre(m: usize) -> &'static QuadratureRule {
    static RULES: OnceLock<Vec<OnceLock<QuadratureRule>>> = OnceLock::new();
    let table = RULES.get_or_init(|| (0..=64).map(|_| OnceLock::new()).collect());
    assert!((1..=64).contains(&m), "cached Legendre orders are 1..=64");
    table[m].get_or_init(|| {
        gauss_rule(RuleKind::Legendre { a: -1.0, b: 1.0 }, m)
            .expect("Legendre Jacobi matrix always converges")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn double_factorial_odd(k: usize) -> f64 {
        // (k-1)!! for even k
        (1..k).step_by(2).map(|v| v as f64).product()
    }

    #[test]
    fn laguerre_one_and_two_points() {
        let r = gauss_rule(RuleKind::Laguerre { alpha: 0.0 }, 1).unwrap();
        assert!((r.nodes[0] - 1.0).abs() < 1e-15 && (r.weights[0] - 1.0).abs() < 1e-15);
        let r = gauss_rule(RuleKind::Laguerre { alpha: 0.0 }, 2).unwrap();
        let s2 = 2f64.sqrt();
        assert!((r.nodes[0] - (2.0 - s2)).abs() < 1e-14);
        assert!((r.nodes[1] - (2.0 + s2)).abs() < 1e-14);
        assert!((r.weights[0] - (2.0 + s2) / 4.0).abs() < 1e-14);
        assert!((r.weights[1] - (2.0 - s2) / 4.0).abs() < 1e-14);
        // Moment oracle ∫ e^{-x} x^k = k! for k ≤ 3.
        for (k, fact) in [1.0, 1.0, 2.0, 6.0].iter().enumerate() {
            assert!((r.integrate(|x| x.powi(k as i32)) - fact).abs() < 1e-13);
        }
    }

    #[test]
    fn hermite_two_points() {
        let r = gauss_rule(RuleKind::Hermite, 2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((r.nodes[0] + h).abs() < 1e-15 && (r.nodes[1] - h).abs() < 1e-15);
        for w in &r.weights {
            assert!((w - PI.sqrt() / 2.0).abs() < 1e-15);
        }
        let moments = [PI.sqrt(), 0.0, PI.sqrt() / 2.0, 0.0];
        for (k, want) in moments.iter().enumerate() {
            assert!((r.integrate(|x| x.powi(k as i32)) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn exactness_against_moment_formulas() {
        for &m in &[5usize, 12, 30] {
            for &alpha in &[-0.5, 0.0, 1.0, 2.5] {
                let r = gauss_rule(RuleKind::Laguerre { alpha }, m).unwrap();
                for k in 0..=(2 * m - 1).min(40) {
                    // ∫ x^{k+α} e^{-x} = Γ(k + α + 1)
                    let want = log_gamma_pos(k as f64 + alpha + 1.0);
                    let got = r.integrate(|x| x.powi(k as i32));
                    assert!((got.ln() - want).abs() < 1e-12, "M={m} α={alpha} k={k}");
                }
            }
            let r = gauss_rule(RuleKind::Hermite, m).unwrap();
            for k in (0..=(2 * m - 1)).step_by(2) {
                // ∫ x^k e^{-x²} = (k-1)!! √π / 2^{k/2}
                let want = double_factorial_odd(k) * PI.sqrt() / 2f64.powi(k as i32 / 2);
                let got = r.integrate(|x| x.powi(k as i32));
                assert!((got - want).abs() <= 1e-12 * want, "M={m} k={k}");
            }
            let r = gauss_rule(RuleKind::Legendre { a: 0.0, b: 2.0 }, m).unwrap();
            for k in 0..=(2 * m - 1) {
                let want = 2f64.powi(k as i32 + 1) / (k as f64 + 1.0);
                assert!((r.integrate(|x| x.powi(k as i32)) - want).abs() <= 1e-12 * want);
            }
        }
    }

    #[test]
    fn structural_invariants() {
        for kind in [
            RuleKind::Laguerre { alpha: -0.5 },
            RuleKind::Laguerre { alpha: 1.0 },
            RuleKind::Hermite,
            RuleKind::Legendre { a: -3.0, b: 4.0 },
        ] {
            let r = gauss_rule(kind, 60).unwrap();
            assert_eq!(r.exactness_degree, 119);
            assert!(r.weights.iter().all(|&w| w > 0.0));
            assert!(r.nodes.windows(2).all(|p| p[0] < p[1]));
            let total: f64 = r.weights.iter().sum();
            assert!((total - kind.mass()).abs() <= 1e-12 * kind.mass());
        }
    }

    #[test]
    fn large_laguerre_rule_keeps_tiny_weights_relative() {
        let r = gauss_rule(RuleKind::Laguerre { alpha: 0.0 }, 200).unwrap();
        // Largest node of the 200-point rule sits near 4M; its weight is far
        // below double range, but the density-scaled weight is O(1).
        let last = *r.nodes.last().unwrap();
        assert!(last > 700.0 && last < 800.0);
        assert!(r
            .weights_over_density
            .iter()
            .all(|w| w.is_finite() && *w > 0.0));
        // ∫ e^{-x} x^5 = 120 using the scaled weights.
        let got: f64 = r
            .nodes
            .iter()
            .zip(&r.weights_over_density)
            .map(|(&x, &w)| w * (-x).exp() * x.powi(5))
            .sum();
        assert!((got - 120.0).abs() < 1e-11);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(gauss_rule(RuleKind::Hermite, 0).is_err());
        assert!(gauss_rule(RuleKind::Laguerre { alpha: -1.0 }, 3).is_err());
        assert!(gauss_rule(RuleKind::Legendre { a: 1.0, b: 1.0 }, 3).is_err());
    }
}
