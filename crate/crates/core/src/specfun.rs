//! Special functions: `ln Γ`, digamma and Bessel functions of the first kind.
//!
//! Everything here is a pure function of its arguments. Accuracy targets are
//! double precision over the argument ranges the rest of the crate uses:
//! `ln Γ` and `ψ` on `[0.5, 1e6]`, `J_ν` for `-1 < ν ≲ 10` and `0 ≤ x ≤ 1e4`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// `ζ(k) - 1` for `k = 2..=30`.
const ZETA_MINUS_ONE: [f64; 29] = [
    0.644_934_066_848_226_4,
    0.202_056_903_159_594_3,
    0.082_323_233_711_138_19,
    0.036_927_755_143_369_93,
    0.017_343_061_984_449_14,
    0.008_349_277_381_922_827,
    0.004_077_356_197_944_339,
    0.002_008_392_826_082_214,
    0.000_994_575_127_818_085_3,
    0.000_494_188_604_119_464_6,
    0.000_246_086_553_308_048_3,
    0.000_122_713_347_578_489_1,
    6.124_813_505_870_483e-5,
    3.058_823_630_702_049e-5,
    1.528_225_940_865_187e-5,
    7.637_197_637_899_762e-6,
    3.817_293_264_999_84e-6,
    1.908_212_716_553_939e-6,
    9.539_620_338_727_96e-7,
    4.769_329_867_878_065e-7,
    2.384_505_027_277_33e-7,
    1.192_199_259_653_111e-7,
    5.960_818_905_125_948e-8,
    2.980_350_351_465_228e-8,
    1.490_155_482_836_504e-8,
    7.450_711_789_835_429e-9,
    3.725_334_024_788_457e-9,
    1.862_659_723_513_049e-9,
    9.313_274_324_196_682e-10,
];

/// Stirling series coefficients `B_{2k} / (2k (2k - 1))`, `k = 1..=8`.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// `B_{2k} / (2k)`, `k = 1..=8`, for the digamma asymptotic series.
const DIGAMMA_ASYMPTOTIC: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32_760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
];

/// `ln Γ(2 + z)` for `|z| ≤ 0.5` from the Taylor series about 2.
fn log_gamma_near_two(z: f64) -> f64 {
    let mut sum = (1.0 - EULER_GAMMA) * z;
    let mut zk = -z;
    for (i, &c) in ZETA_MINUS_ONE.iter().enumerate() {
        let k = (i + 2) as f64;
        zk *= -z;
        sum += c * zk / k;
    }
    sum
}

fn log_gamma_stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut p = inv;
    for &c in &STIRLING {
        series += c * p;
        p *= inv2;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + series
}

/// Natural logarithm of the Gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(log_gamma_pos(x))
}

pub(crate) fn log_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x
        return log_gamma_pos(x + 1.0) - x.ln();
    }
    if x < 1.5 {
        let z = x - 1.0;
        return log_gamma_near_two(z) - z.ln_1p();
    }
    if x <= 2.5 {
        return log_gamma_near_two(x - 2.0);
    }
    if x < 10.0 {
        // Walk down into [1.5, 2.5].
        let mut y = x;
        let mut prod = 1.0;
        while y > 2.5 {
            y -= 1.0;
            prod *= y;
        }
        return log_gamma_near_two(y - 2.0) + prod.ln();
    }
    log_gamma_stirling(x)
}

/// Digamma function `ψ(x) = Γ'(x)/Γ(x)` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("digamma requires x > 0, got {x}")));
    }
    Ok(digamma_pos(x))
}

pub(crate) fn digamma_pos(mut x: f64) -> f64 {
    let mut shift = 0.0;
    while x < 10.0 {
        shift -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut p = inv2;
    for &c in &DIGAMMA_ASYMPTOTIC {
        series += c * p;
        p *= inv2;
    }
    shift + x.ln() - 0.5 * inv - series
}

/// `ψ'(x)` for `x > 0`: upward recurrence to `x ≥ 10`, then the asymptotic
/// series `1/x + 1/(2x²) + Σ B_{2k}/x^{2k+1}`.
pub(crate) fn trigamma_pos(mut x: f64) -> f64 {
    const B2K: [f64; 7] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
    ];
    let mut shift = 0.0;
    while x < 10.0 {
        shift += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut p = inv2 * inv;
    for &b in &B2K {
        series += b * p;
        p *= inv2;
    }
    shift + inv + 0.5 * inv2 + series
}

/// Order of a Bessel function of the first kind, restricted to `ν > -1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if nu.is_finite() && nu > -1.0 {
            Ok(Self(nu))
        } else {
            Err(Error::domain(format!(
                "Bessel order must satisfy nu > -1, got {nu}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for BesselOrder {
    type Error = Error;

    fn try_from(nu: f64) -> Result<Self> {
        Self::new(nu)
    }
}

/// Below this argument the ascending series is used.
const SERIES_CROSSOVER: f64 = 13.0;

/// Bessel function of the first kind `J_ν(x)` for `x ≥ 0`.
///
/// Ascending series for `x ≤ 13` (or `x ≤ ν`), Hankel's asymptotic expansion
/// for larger arguments and orders below 2.5, and forward recurrence from the
/// two lowest orders of the same fractional part above that.
pub fn bessel_j(nu: BesselOrder, x: f64) -> Result<f64> {
    let nu = nu.value();
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain(format!(
            "bessel_j requires finite x >= 0, got {x}"
        )));
    }
    if x == 0.0 {
        return if nu == 0.0 {
            Ok(1.0)
        } else if nu > 0.0 {
            Ok(0.0)
        } else {
            Err(Error::domain(format!("J_nu(0) diverges for nu = {nu} < 0")))
        };
    }
    Ok(bessel_j_unchecked(nu, x))
}

/// `J_ν(x)` without argument validation; requires `ν > -1`, `x > 0`.
pub(crate) fn bessel_j_unchecked(nu: f64, x: f64) -> f64 {
    if x <= SERIES_CROSSOVER.max(nu) {
        return bessel_series(nu, x);
    }
    if nu < 2.5 {
        return bessel_hankel(nu, x);
    }
    // Forward recurrence J_{v+1} = (2v/x) J_v - J_{v-1} is stable for v < x.
    let steps = (nu - 0.5).floor();
    let base = nu - steps;
    let mut prev = bessel_hankel(base - 1.0, x);
    let mut cur = bessel_hankel(base, x);
    let mut v = base;
    while v < nu - 0.5 {
        let next = 2.0 * v / x * cur - prev;
        prev = cur;
        cur = next;
        v += 1.0;
    }
    cur
}

fn bessel_series(nu: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = half * half;
    let mut term = (nu * half.ln() - log_gamma_pos(nu + 1.0)).exp();
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= -q / (k * (k + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && k > q.sqrt() {
            break;
        }
        if k > 500.0 {
            break;
        }
    }
    sum
}

/// Hankel expansion; valid for any real order once `x` is large compared to
/// `ν²`. Negative orders enter only through the recurrence base.
fn bessel_hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let inv8x = 1.0 / (8.0 * x);
    // a_k = prod_{j=1..k} (mu - (2j-1)^2) / (k! (8x)^k)
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) * inv8x / k as f64;
        let mag = a.abs();
        if mag > last {
            break;
        }
        // Sign pattern: P = a0 - a2 + a4 - ..., Q = a1 - a3 + a5 - ...
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
        if mag < 1e-17 {
            break;
        }
        last = mag;
    }
    // cos(x - φ) and sin(x - φ) with φ = (ν/2 + 1/4)π, split to keep the
    // reduction of the large argument exact.
    let phase = (0.5 * nu + 0.25) * PI;
    let (sx, cx) = x.sin_cos();
    let (sp, cp) = phase.sin_cos();
    let cos_chi = cx * cp + sx * sp;
    let sin_chi = sx * cp - cx * sp;
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// Leading large-argument envelope `√(2/(πx))`.
pub fn bessel_envelope(x: f64) -> f64 {
    (2.0 / (PI * x)).sqrt()
}
