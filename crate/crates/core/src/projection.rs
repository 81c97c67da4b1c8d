//! Truncation-error norms of the orthogonal projections `S_N`.
//!
//! All series are in normalized form, so the weighted `L²` error is the
//! `ℓ²` norm of the coefficient tail.

use rayon::prelude::*;

use crate::asymptotics::{
    envelope_degrees, envelope_window, fit_log_points, fit_windowed_envelope, predict_rate,
    EnvelopeWindow, LogRegressor, Target,
};
use crate::coefficients::{derivative_coeff_factor, Basis, CoefficientSeries};
use crate::error::{Error, Result};
use crate::orthopoly::{
    log_gamma_hermite, log_sigma, HermiteRecurrence, LaguerreBasis, LaguerreRecurrence,
};

/// Norm in which a truncation error is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    L2Weighted,
    SupWeighted,
    Sobolev(u32),
}

#[derive(Debug, Clone)]
pub struct ErrorCurve {
    pub n_values: Vec<usize>,
    pub errors: Vec<f64>,
    pub norm: NormKind,
    pub basis: Basis,
    /// Extrapolated contribution beyond the last computed coefficient.
    pub tail_completion: Vec<f64>,
    /// Completion exceeded the cap relative to the computed tail.
    pub flagged: Vec<bool>,
}

/// Largest admissible share of the extrapolated tail in a tail sum.
pub const TAIL_COMPLETION_CAP: f64 = 0.05;

fn contiguous(series: &CoefficientSeries) -> Result<usize> {
    let ok = series.n_values.iter().enumerate().all(|(i, &n)| i == n);
    if !ok || series.is_empty() {
        return Err(Error::domain(
            "tail sums need the contiguous series n = 0, 1, …, n_max",
        ));
    }
    Ok(series.len() - 1)
}

/// Beyond this fraction of `n_max` coefficients are treated as tail data.
const FIT_FROM: usize = 8;

/// Block-RMS points `(n, log₁₀ rms(ĉ))` over `[n_max/8, n_max]`, or `None`
/// when every coefficient in the upper half is below its accuracy gate
/// (terminated expansion).
fn rms_points(series: &CoefficientSeries) -> Option<Vec<(f64, f64)>> {
    let n_max = series.len() - 1;
    let lo = (n_max / FIT_FROM).max(1);
    if !(n_max / 2 + 1..=n_max).any(|n| series.gated(n)) {
        return None;
    }
    let ratio = 2f64.powf(0.25);
    let mut pts = Vec::new();
    let mut centre = lo as f64 * 2f64.powf(0.125);
    while centre * 2f64.powf(0.125) <= n_max as f64 + 0.5 {
        let a = (centre / 2f64.powf(0.125)).ceil() as usize;
        let b = ((centre * 2f64.powf(0.125)).floor() as usize).min(n_max);
        let block: Vec<f64> = (a..=b)
            .map(|n| series.coeff_normalized[n].powi(2))
            .collect();
        if !block.is_empty() {
            let ms = block.iter().sum::<f64>() / block.len() as f64;
            if ms > 0.0 {
                pts.push((centre, 0.5 * ms.log10()));
            }
        }
        centre *= ratio;
    }
    Some(pts)
}

/// `Σ_{n>n_max} ĉ_n² w(n)` with `w(n) = n^q` extrapolated from the fitted
/// rate; zero when the expansion has terminated.
fn tail_completion(series: &CoefficientSeries, q: u32) -> Result<f64> {
    let n_max = series.len() - 1;
    let Some(pts) = rms_points(series) else {
        return Ok(0.0);
    };
    let mu = series.spec.log_power;
    let fit = fit_log_points(&pts, mu, LogRegressor::TwoSqrtN)
        .map_err(|e| Error::FitUnavailable(format!("tail fit failed: {e}")))?;
    let p = fit.exponent_hat;
    let decay = 2.0 * p - q as f64 - 1.0;
    if !(decay > 0.0) {
        return Err(Error::FitUnavailable(format!(
            "fitted exponent {p:.3} gives a divergent tail for weight order {q}"
        )));
    }
    let n = n_max as f64;
    let log_factor = (2.0 * n.sqrt()).ln().log10() * mu as f64;
    let c_model = 10f64.powf(fit.intercept - p * n.log10() + log_factor);
    Ok(c_model * c_model * n.powi(q as i32) * n / decay)
}

fn check_range(n_values: &[usize], n_max: usize) -> Result<()> {
    if n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("N values must be strictly increasing"));
    }
    if let Some(&last) = n_values.last() {
        if 4 * last > n_max {
            return Err(Error::domain(format!(
                "series to n_max = {n_max} is too short for N = {last} (need n_max ≥ 4N)"
            )));
        }
    }
    Ok(())
}

/// Tail sums `Σ_{n>N} ĉ_n² w(n)` for each `N`, with tail completion.
fn weighted_tails(
    series: &CoefficientSeries,
    n_values: &[usize],
    weight: impl Fn(usize) -> f64,
    q: u32,
) -> Result<(Vec<f64>, Vec<f64>, Vec<bool>)> {
    let n_max = contiguous(series)?;
    check_range(n_values, n_max)?;
    let completion = tail_completion(series, q)?;
    // suffix[k] = Σ_{n ≥ k} ĉ_n² w(n), summed from the small end.
    let mut suffix = vec![0.0; n_max + 2];
    for n in (0..=n_max).rev() {
        suffix[n] = suffix[n + 1] + series.coeff_normalized[n].powi(2) * weight(n);
    }
    let mut sums = Vec::with_capacity(n_values.len());
    let mut flags = Vec::with_capacity(n_values.len());
    for &nn in n_values {
        let computed = suffix[nn + 1];
        let total = computed + completion;
        flags.push(total > 0.0 && completion > TAIL_COMPLETION_CAP * total);
        sums.push(total);
    }
    Ok((sums, vec![completion; n_values.len()], flags))
}

/// Weighted `L²` truncation error `√(Σ_{n>N} ĉ_n²)`.
pub fn l2_tail_error(series: &CoefficientSeries, n_values: &[usize]) -> Result<ErrorCurve> {
    let (sums, tail_completion, flagged) = weighted_tails(series, n_values, |_| 1.0, 0)?;
    Ok(ErrorCurve {
        n_values: n_values.to_vec(),
        errors: sums.into_iter().map(f64::sqrt).collect(),
        norm: NormKind::L2Weighted,
        basis: series.basis,
        tail_completion,
        flagged,
    })
}

/// Weight of `ĉ_n²` in the order-`q` derivative term of the Sobolev norm.
///
/// Laguerre: `(a_k^{(q)})² σ_k^{(α+q)}` with `k = n − q`, written through the
/// derivative-coefficient identity. Hermite: `(h_k^{(p)})² γ_k` with
/// `h_k^{(p)} = h_{k+p} γ_{k+p}/γ_k`.
fn sobolev_weight(basis: Basis, q: usize, n: usize) -> f64 {
    if n < q {
        return 0.0;
    }
    let k = n - q;
    match basis {
        Basis::Laguerre { alpha } => {
            let factor = derivative_coeff_factor(k, q, alpha);
            let ln_ratio = log_sigma(k, alpha + q as f64) - log_sigma(n, alpha);
            factor * factor * ln_ratio.exp()
        }
        Basis::Hermite => (log_gamma_hermite(n) - log_gamma_hermite(k)).exp(),
    }
}

/// Weighted Sobolev truncation error of order `m ≤ 3`.
pub fn sobolev_error(series: &CoefficientSeries, m: u32, n_values: &[usize]) -> Result<ErrorCurve> {
    let alpha = match series.basis {
        Basis::Laguerre { alpha } => Some(alpha),
        Basis::Hermite => None,
    };
    predict_rate(&series.spec, alpha, Target::SobolevError(m))?;
    let n_max = contiguous(series)?;
    check_range(n_values, n_max)?;
    let mut totals = vec![0.0; n_values.len()];
    let mut completions = vec![0.0; n_values.len()];
    let mut flagged = vec![false; n_values.len()];
    for q in 0..=m as usize {
        let (sums, comp, flags) = weighted_tails(
            series,
            n_values,
            |n| sobolev_weight(series.basis, q, n),
            q as u32,
        )?;
        // Completion is modeled with n^q; rescale to the exact weight at n_max.
        let scale = if q == 0 {
            1.0
        } else {
            sobolev_weight(series.basis, q, n_max) / (n_max as f64).powi(q as i32)
        };
        for i in 0..n_values.len() {
            let c = comp[i] * scale;
            totals[i] += sums[i] - comp[i] + c;
            completions[i] += c;
            flagged[i] |= flags[i];
        }
    }
    Ok(ErrorCurve {
        n_values: n_values.to_vec(),
        errors: totals.into_iter().map(f64::sqrt).collect(),
        norm: NormKind::Sobolev(m),
        basis: series.basis,
        tail_completion: completions,
        flagged,
    })
}

/// Uniform step of the sup-norm grid.
pub const SUP_GRID_STEP: f64 = 0.05;
/// Levels of each geometric cluster.
pub const SUP_GRID_LEVELS: u32 = 40;

/// Grid for [`weighted_sup_error`]: uniform step 0.05 on the region where
/// the weighted function or the basis up to `n_max` is non-negligible,
/// plus geometric clusters (ratio 1/2) at the singular point and at 0.
pub fn sup_grid(series: &CoefficientSeries, n_max: usize) -> Vec<f64> {
    let spec = &series.spec;
    let nf = n_max as f64;
    let (lo, hi, anchors) = match series.basis {
        Basis::Laguerre { alpha } => {
            let basis_end = 4.0 * nf + 2.0 * alpha + 2.0 + 20.0 * (nf + 1.0).cbrt();
            let mut x = 1.0f64;
            while weighted_value(series, x).abs() > 1e-18 || x < 2.0 * spec.location() {
                x *= 1.5;
            }
            (0.0, basis_end.max(x), vec![0.0, spec.location()])
        }
        Basis::Hermite => {
            let basis_end = (2.0 * nf + 1.0).sqrt() + 10.0;
            let mut x = 1.0f64;
            while weighted_value(series, x).abs() > 1e-18
                || weighted_value(series, -x).abs() > 1e-18
                || x < 2.0 * spec.location().abs()
            {
                x *= 1.5;
            }
            let end = basis_end.max(x);
            (-end, end, vec![0.0, spec.location()])
        }
    };
    let steps = ((hi - lo) / SUP_GRID_STEP).ceil() as usize;
    let mut grid: Vec<f64> = (0..=steps).map(|k| lo + k as f64 * SUP_GRID_STEP).collect();
    for a in anchors {
        for k in 0..SUP_GRID_LEVELS {
            let d = 0.5f64.powi(k as i32);
            for x in [a - d, a + d] {
                if x >= lo && x <= hi {
                    grid.push(x);
                }
            }
        }
        grid.push(a);
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// `e^{-x/2} x^{α/2} f(x)` or `e^{-x²/2} f(x)`.
fn weighted_value(series: &CoefficientSeries, x: f64) -> f64 {
    let f = series.spec.eval(x);
    match series.basis {
        Basis::Laguerre { alpha } => {
            if x == 0.0 {
                if alpha == 0.0 {
                    f
                } else {
                    0.0
                }
            } else {
                f * (-0.5 * x + 0.5 * alpha * x.ln()).exp()
            }
        }
        Basis::Hermite => f * (-0.5 * x * x).exp(),
    }
}

/// Weighted sup errors for several `N` at once.
pub fn weighted_sup_errors(
    series: &CoefficientSeries,
    n_values: &[usize],
    grid: &[f64],
) -> Result<ErrorCurve> {
    if n_values.is_empty() {
        return Err(Error::domain("no N values"));
    }
    if n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("N values must be strictly increasing"));
    }
    let n_top = *n_values.last().unwrap();
    let avail = contiguous(series)?;
    if n_top > avail {
        return Err(Error::domain(format!(
            "N = {n_top} exceeds the series length {avail}"
        )));
    }
    enum Rec {
        L(LaguerreRecurrence),
        H(HermiteRecurrence),
    }
    let rec = match series.basis {
        Basis::Laguerre { alpha } => {
            Rec::L(LaguerreRecurrence::new(LaguerreBasis::new(alpha)?, n_top))
        }
        Basis::Hermite => Rec::H(HermiteRecurrence::new(n_top)),
    };
    let c = &series.coeff_normalized;
    let per_point: Vec<Vec<f64>> = grid
        .par_iter()
        .map(|&x| -> Result<Vec<f64>> {
            let mut row = vec![0.0; n_top + 1];
            match &rec {
                Rec::L(r) => r.fill(x, &mut row)?,
                Rec::H(r) => r.fill(x, &mut row),
            }
            let target = weighted_value(series, x);
            let mut partial = 0.0;
            let mut out = Vec::with_capacity(n_values.len());
            let mut next = 0;
            for (n, v) in row.iter().enumerate() {
                partial += c[n] * v;
                if n == n_values[next] {
                    out.push((target - partial).abs());
                    next += 1;
                    if next == n_values.len() {
                        break;
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut errors = vec![0.0f64; n_values.len()];
    for row in &per_point {
        for (e, v) in errors.iter_mut().zip(row) {
            *e = e.max(*v);
        }
    }
    Ok(ErrorCurve {
        n_values: n_values.to_vec(),
        errors,
        norm: NormKind::SupWeighted,
        basis: series.basis,
        tail_completion: vec![0.0; n_values.len()],
        flagged: vec![false; n_values.len()],
    })
}

/// Weighted sup errors over one oscillation period of `N` around each
/// centre, carried to the centre by the self-consistent envelope fit (the
/// centre alone for the Laguerre endpoint).
pub fn weighted_sup_envelope(
    series: &CoefficientSeries,
    centres: &[usize],
    grid: &[f64],
) -> Result<ErrorCurve> {
    let all = envelope_degrees(&series.spec, series.basis, centres);
    let curve = weighted_sup_errors(series, &all, grid)?;
    let windows: Vec<EnvelopeWindow> = centres
        .iter()
        .map(|&c| {
            let samples = envelope_window(&series.spec, series.basis, c)
                .into_iter()
                .filter(|&k| k > 0)
                .map(|k| {
                    (
                        k as f64,
                        curve.errors[all.binary_search(&k).unwrap()].log10(),
                    )
                })
                .collect();
            (c as f64, samples)
        })
        .collect();
    let (pts, _) = fit_windowed_envelope(&windows, series.spec.log_power, LogRegressor::TwoSqrtN)?;
    Ok(ErrorCurve {
        n_values: centres.to_vec(),
        errors: pts.iter().map(|p| 10f64.powf(p.1)).collect(),
        ..curve
    })
}

/// Weighted sup error `max_x |w(x) f(x) − Σ_{n≤N} ĉ_n φ_n(x)|` over `grid`.
pub fn weighted_sup_error(series: &CoefficientSeries, n: usize, grid: &[f64]) -> Result<f64> {
    Ok(weighted_sup_errors(series, &[n], grid)?.errors[0])
}

/// `ln(n!/(n−q)!)`, used by tests as an independent form of the weights.
#[cfg(test)]
fn ln_falling(n: usize, q: usize) -> f64 {
    use crate::specfun::log_gamma_pos;
    log_gamma_pos(n as f64 + 1.0) - log_gamma_pos((n - q) as f64 + 1.0)
}
