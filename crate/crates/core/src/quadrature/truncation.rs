//! Truncation points for integrals over unbounded intervals.

/// A decaying envelope `e^{-x/q} x^p ln^μ x` or `e^{-x²/2} |x|^p ln^μ |x|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Envelope {
    Exponential {
        scale: f64,
        power: f64,
        log_power: u32,
    },
    Gaussian {
        power: f64,
        log_power: u32,
    },
}

impl Envelope {
    pub fn exponential(scale: f64, power: f64) -> Self {
        Envelope::Exponential {
            scale,
            power,
            log_power: 0,
        }
    }

    pub fn gaussian(power: f64) -> Self {
        Envelope::Gaussian {
            power,
            log_power: 0,
        }
    }

    pub fn with_log_power(self, mu: u32) -> Self {
        match self {
            Envelope::Exponential { scale, power, .. } => Envelope::Exponential {
                scale,
                power,
                log_power: mu,
            },
            Envelope::Gaussian { power, .. } => Envelope::Gaussian {
                power,
                log_power: mu,
            },
        }
    }

    /// Natural log of the envelope at `x > 0`.
    pub fn ln_value(&self, x: f64) -> f64 {
        let (lead, power, mu) = match *self {
            Envelope::Exponential {
                scale,
                power,
                log_power,
            } => (-x / scale, power, log_power),
            Envelope::Gaussian { power, log_power } => (-0.5 * x * x, power, log_power),
        };
        let log_term = if mu == 0 {
            0.0
        } else {
            mu as f64 * x.ln().abs().max(f64::MIN_POSITIVE).ln()
        };
        lead + power * x.ln() + log_term
    }

    /// Point beyond which the envelope is decreasing.
    fn peak(&self) -> f64 {
        match *self {
            Envelope::Exponential {
                scale,
                power,
                log_power,
            } => (scale * (power + log_power as f64)).max(1.0),
            Envelope::Gaussian { power, log_power } => (power + log_power as f64).max(1.0).sqrt(),
        }
    }
}

/// Smallest `X` (up to fixed-point convergence) with `envelope(X) ≤ tol` and
/// the envelope decreasing on `[X, ∞)`.
pub fn truncation_point(envelope: Envelope, tol: f64) -> f64 {
    assert!(tol > 0.0 && tol < 1.0, "tolerance must lie in (0, 1)");
    let ln_inv_tol = -tol.ln();
    let peak = envelope.peak();
    let mut x = match envelope {
        Envelope::Exponential { scale, .. } => scale * ln_inv_tol,
        Envelope::Gaussian { .. } => (2.0 * ln_inv_tol).sqrt(),
    }
    .max(peak);
    for _ in 0..200 {
        let (power, mu) = match envelope {
            Envelope::Exponential {
                power, log_power, ..
            }
            | Envelope::Gaussian { power, log_power } => (power, log_power as f64),
        };
        let growth = power * x.ln() + mu * x.ln().abs().max(f64::MIN_POSITIVE).ln() + ln_inv_tol;
        let next = match envelope {
            Envelope::Exponential { scale, .. } => scale * growth,
            Envelope::Gaussian { .. } => (2.0 * growth.max(0.0)).sqrt(),
        }
        .max(peak);
        if (next - x).abs() <= 1e-14 * x {
            x = next;
            break;
        }
        x = next;
    }
    // The iteration converges from above only approximately; nudge until the
    // bound holds.
    let ln_tol = tol.ln();
    while envelope.ln_value(x) > ln_tol {
        x *= 1.0 + 1e-12;
        x += 1e-12;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_exponential() {
        let x = truncation_point(Envelope::exponential(2.0, 0.0), 1e-16);
        assert!((x - 32.0 * 10f64.ln()).abs() < 1e-9, "{x}");
    }

    #[test]
    fn plain_gaussian() {
        let x = truncation_point(Envelope::gaussian(0.0), 1e-16);
        assert!((x - (32.0 * 10f64.ln()).sqrt()).abs() < 1e-9);
        assert!((x - 8.58).abs() < 0.01);
    }

    #[test]
    fn exponential_with_power_brackets_the_bisection_root() {
        let env = Envelope::exponential(2.0, 3.0);
        let tol = 1e-14;
        let x = truncation_point(env, tol);
        let f = |t: f64| (-t / 2.0).exp() * t.powi(3);
        assert!(f(x) <= tol * (1.0 + 1e-12));
        assert!(f(x - 1.0) >= tol);
        // Independent root by bisection on [peak, 200].
        let (mut lo, mut hi) = (6.0, 200.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > tol {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((x - hi).abs() < 1e-8, "{x} vs {hi}");
    }
}
