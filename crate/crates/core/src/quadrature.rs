//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 4000;

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integrates `f` over the finite interval `[a, b]`.
///
/// Subdivides the interval with the largest error estimate until the total
/// estimate falls below `max(abs_tol, rel_tol · |value|)`. Endpoints are
/// never evaluated, so integrable endpoint singularities are allowed.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Integral {
    if a == b {
        return Integral {
            value: 0.0,
            error: 0.0,
        };
    }
    let (v, e) = gk15(&f, a, b);
    let mut intervals = vec![(a, b, v, e)];
    let mut value = v;
    let mut error = e;
    while error > abs_tol.max(rel_tol * value.abs()) && intervals.len() < MAX_INTERVALS {
        let (worst, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty");
        let (lo, hi, wv, we) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // interval exhausted at machine precision
            intervals.push((lo, hi, wv, 0.0));
            error -= we;
            continue;
        }
        let (lv, le) = gk15(&f, lo, mid);
        let (rv, re) = gk15(&f, mid, hi);
        value += lv + rv - wv;
        error += le + re - we;
        intervals.push((lo, mid, lv, le));
        intervals.push((mid, hi, rv, re));
    }
    // re-sum to shed accumulated rounding from the running updates
    let value = intervals.iter().map(|iv| iv.2).sum();
    let error = intervals.iter().map(|iv| iv.3).sum();
    Integral { value, error }
}

/// Integrates `f` over `[a, ∞)` through the map `x = a + t / (1 - t)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, abs_tol: f64, rel_tol: f64) -> Integral {
    let mapped = |t: f64| {
        let one_minus = 1.0 - t;
        let x = a + t / one_minus;
        let v = f(x);
        if v == 0.0 {
            0.0
        } else {
            v / (one_minus * one_minus)
        }
    };
    integrate(mapped, 0.0, 1.0, abs_tol, rel_tol)
}

/// Integrates over `[0, ∞)` splitting at the supplied interior breakpoints.
pub fn integrate_half_line<F: Fn(f64) -> f64>(f: F, breakpoints: &[f64], abs_tol: f64) -> Integral {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|b| b.is_finite() && *b > 0.0)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let pieces = cuts.len() + 1;
    let tol = abs_tol / pieces as f64;
    let mut total = Integral {
        value: 0.0,
        error: 0.0,
    };
    let mut lo = 0.0;
    for &hi in &cuts {
        let part = integrate(&f, lo, hi, tol, 0.0);
        total.value += part.value;
        total.error += part.error;
        lo = hi;
    }
    let tail = integrate_to_infinity(&f, lo, tol, 0.0);
    total.value += tail.value;
    total.error += tail.error;
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-14, 0.0);
        assert!((r.value - 0.0).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let r = integrate(|x| x.powf(-0.5), 0.0, 1.0, 1e-11, 0.0);
        assert!((r.value - 2.0).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn kink_is_resolved() {
        // ∫_0^∞ min(e^{-x}, e^{-x/2}/2) dx = 0.75
        let c = 2.0 * std::f64::consts::LN_2;
        let f = |x: f64| (-x).exp().min(0.5 * (-x / 2.0).exp());
        let r = integrate_half_line(f, &[1.0, 5.0], 1e-12);
        assert!((r.value - 0.75).abs() < 1e-11, "{r:?} crossing {c}");
    }

    #[test]
    fn semi_infinite_gaussian() {
        let r = integrate_to_infinity(|x| (-x * x).exp(), 0.0, 1e-13, 0.0);
        assert!((r.value - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-12);
    }
}
