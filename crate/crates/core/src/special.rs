//! Special functions used by the gain families and the rate oracles.
//!
//! The incomplete gamma routines use the series expansion below `x = s + 1`
//! and a modified-Lentz continued fraction above it. The exponential integral
//! uses its power series for `x <= 1` and the continued fraction otherwise.

use crate::error::{Error, Result};

const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const MAX_ITER: usize = 2000;

/// Euler-Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

fn check_gamma_args(s: f64, x: f64) -> Result<()> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::Domain {
            function: "incomplete gamma",
            reason: format!("shape must be positive and finite, got {s}"),
        });
    }
    if !(x >= 0.0) {
        return Err(Error::Domain {
            function: "incomplete gamma",
            reason: format!("argument must be nonnegative, got {x}"),
        });
    }
    Ok(())
}

/// Regularized lower incomplete gamma `P(s, x) = γ(s, x) / Γ(s)`.
pub fn lower_incomplete_gamma_regularized(s: f64, x: f64) -> Result<f64> {
    check_gamma_args(s, x)?;
    Ok(gamma_pq(s, x).0)
}

/// Regularized upper incomplete gamma `Q(s, x) = 1 - P(s, x)`, computed
/// without cancellation in the upper tail.
pub fn upper_incomplete_gamma_regularized(s: f64, x: f64) -> Result<f64> {
    check_gamma_args(s, x)?;
    Ok(gamma_pq(s, x).1)
}

/// Returns `(P, Q)`. Arguments are assumed valid.
pub(crate) fn gamma_pq(s: f64, x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (0.0, 1.0);
    }
    if x.is_infinite() {
        return (1.0, 0.0);
    }
    let log_prefactor = -x + s * x.ln() - ln_gamma(s);
    if x < s + 1.0 {
        let mut term = 1.0 / s;
        let mut sum = term;
        let mut denom = s;
        for _ in 0..MAX_ITER {
            denom += 1.0;
            term *= x / denom;
            sum += term;
            if term.abs() < sum.abs() * EPS {
                break;
            }
        }
        let p = (sum.ln() + log_prefactor).exp().min(1.0);
        (p, 1.0 - p)
    } else {
        let mut b = x + 1.0 - s;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_ITER {
            let an = -(i as f64) * (i as f64 - s);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < EPS {
                break;
            }
        }
        let q = (h.ln() + log_prefactor).exp().min(1.0);
        (1.0 - q, q)
    }
}

/// Exponential integral `E1(x) = ∫_x^∞ e^{-t}/t dt` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain {
            function: "E1",
            reason: format!("argument must be positive, got {x}"),
        });
    }
    if x <= 1.0 {
        Ok(e1_series(x))
    } else {
        Ok((-x).exp() * e1_continued_fraction_scaled(x))
    }
}

/// `e^x · E1(x)`, finite for every `x > 0` (no overflow for large `x`).
pub fn exp_scaled_e1(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain {
            function: "E1",
            reason: format!("argument must be positive, got {x}"),
        });
    }
    if x <= 1.0 {
        Ok(x.exp() * e1_series(x))
    } else {
        Ok(e1_continued_fraction_scaled(x))
    }
}

fn e1_series(x: f64) -> f64 {
    // E1(x) = -γ - ln x - Σ_{k≥1} (-x)^k / (k · k!)
    let mut sum = 0.0;
    let mut fact_term = 1.0;
    for k in 1..MAX_ITER {
        fact_term *= -x / k as f64;
        let term = fact_term / k as f64;
        sum += term;
        if term.abs() < EPS * sum.abs().max(1e-300) {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

fn e1_continued_fraction_scaled(x: f64) -> f64 {
    // Modified Lentz on E1(x) e^x = 1/(x+1- 1/(x+3- 4/(x+5- ...)))
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}
