//! Scalar channel-gain distributions.
//!
//! Every family lives on `[0, ∞)`. Quantiles are generalized inverses
//! `inf{x : F(x) >= u}`, so inverse-transform sampling works for the discrete
//! families too and coupling constructions can share uniform variates.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quadrature;
use crate::special::{gamma_pq, ln_gamma};

/// Upper tail mass left beyond the default truncation point of a grid.
pub const DEFAULT_TRUNCATION_TAIL: f64 = 1e-9;

/// Number of points in the default log-spaced evaluation grid.
pub const DEFAULT_GRID_POINTS: usize = 4096;

/// A nonnegative channel-gain (power) distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GainDistribution {
    /// Rayleigh-faded power gain with the given mean.
    Exponential { mean: f64 },
    /// Nakagami-m power gain: gamma with shape `m` and scale `w / m`.
    NakagamiGain { m: f64, w: f64 },
    /// On/off gain taking value 1 with probability `q`.
    #[serde(rename = "bernoulli")]
    BernoulliGain { q: f64 },
    /// Deterministic gain (perfect CSIT).
    PointMass { value: f64 },
    /// `X / (1 + power · Y)` with independent exponentials `X`, `Y`.
    RatioExpExp {
        num_mean: f64,
        den_mean: f64,
        power: f64,
    },
    /// Right-continuous step distribution of a sorted sample.
    Empirical { samples: Vec<f64> },
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be positive and finite, got {v}")))
    }
}

fn nonnegative(name: &'static str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be nonnegative and finite, got {v}")))
    }
}

impl GainDistribution {
    pub fn exponential(mean: f64) -> Result<Self> {
        positive("mean", mean)?;
        Ok(Self::Exponential { mean })
    }

    pub fn nakagami_gain(m: f64, w: f64) -> Result<Self> {
        positive("m", m)?;
        positive("w", w)?;
        Ok(Self::NakagamiGain { m, w })
    }

    pub fn bernoulli(q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(invalid("q", format!("must lie in [0, 1], got {q}")));
        }
        Ok(Self::BernoulliGain { q })
    }

    pub fn point_mass(value: f64) -> Result<Self> {
        nonnegative("value", value)?;
        Ok(Self::PointMass { value })
    }

    /// Distribution of `X / (1 + power · Y)` for independent exponential
    /// `X` (mean `numerator_mean`) and `Y` (mean `denominator_mean`).
    ///
    /// `P(Z > h) = σx² e^{-h/σx²} / (σx² + h · power · σy²)`.
    pub fn build_ratio(numerator_mean: f64, denominator_mean: f64, interferer_power: f64) -> Result<Self> {
        positive("num_mean", numerator_mean)?;
        positive("den_mean", denominator_mean)?;
        nonnegative("power", interferer_power)?;
        Ok(Self::RatioExpExp {
            num_mean: numerator_mean,
            den_mean: denominator_mean,
            power: interferer_power,
        })
    }

    pub fn empirical(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(bad) = samples.iter().find(|v| !v.is_finite()) {
            return Err(invalid("samples", format!("non-finite entry {bad}")));
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self::Empirical { samples })
    }

    /// Re-checks parameters, e.g. after deserialization. Empirical samples
    /// are sorted in the returned value.
    pub fn validated(self) -> Result<Self> {
        match self {
            Self::Exponential { mean } => Self::exponential(mean),
            Self::NakagamiGain { m, w } => Self::nakagami_gain(m, w),
            Self::BernoulliGain { q } => Self::bernoulli(q),
            Self::PointMass { value } => Self::point_mass(value),
            Self::RatioExpExp {
                num_mean,
                den_mean,
                power,
            } => Self::build_ratio(num_mean, den_mean, power),
            Self::Empirical { samples } => Self::empirical(samples),
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            Self::Exponential { .. } => "exponential",
            Self::NakagamiGain { .. } => "nakagami_gain",
            Self::BernoulliGain { .. } => "bernoulli",
            Self::PointMass { .. } => "point_mass",
            Self::RatioExpExp { .. } => "ratio_exp_exp",
            Self::Empirical { .. } => "empirical",
        }
    }

    /// True for the families with a density.
    pub fn is_continuous(&self) -> bool {
        matches!(
            self,
            Self::Exponential { .. } | Self::NakagamiGain { .. } | Self::RatioExpExp { .. }
        )
    }

    pub fn is_empirical(&self) -> bool {
        matches!(self, Self::Empirical { .. })
    }

    /// `P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Self::Exponential { mean } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-x / mean).exp_m1()
                }
            }
            Self::NakagamiGain { m, w } => {
                if x <= 0.0 {
                    0.0
                } else {
                    gamma_pq(*m, m * x / w).0
                }
            }
            Self::RatioExpExp { .. } => {
                if x <= 0.0 {
                    0.0
                } else {
                    1.0 - self.ccdf(x)
                }
            }
            Self::BernoulliGain { q } => {
                if x < 0.0 {
                    0.0
                } else if x < 1.0 {
                    1.0 - q
                } else {
                    1.0
                }
            }
            Self::PointMass { value } => {
                if x < *value {
                    0.0
                } else {
                    1.0
                }
            }
            Self::Empirical { samples } => {
                let count = samples.partition_point(|s| *s <= x);
                count as f64 / samples.len() as f64
            }
        }
    }

    /// `P(X > x)`, evaluated directly where a closed form exists.
    pub fn ccdf(&self, x: f64) -> f64 {
        match self {
            Self::Exponential { mean } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-x / mean).exp()
                }
            }
            Self::NakagamiGain { m, w } => {
                if x <= 0.0 {
                    1.0
                } else {
                    gamma_pq(*m, m * x / w).1
                }
            }
            Self::RatioExpExp {
                num_mean,
                den_mean,
                power,
            } => {
                if x <= 0.0 {
                    1.0
                } else {
                    num_mean * (-x / num_mean).exp() / (num_mean + x * power * den_mean)
                }
            }
            _ => 1.0 - self.cdf(x),
        }
    }

    /// `P(X < x)`, the left limit of the CDF.
    pub fn cdf_left(&self, x: f64) -> f64 {
        match self {
            Self::BernoulliGain { q } => {
                if x <= 0.0 {
                    0.0
                } else if x <= 1.0 {
                    1.0 - q
                } else {
                    1.0
                }
            }
            Self::PointMass { value } => {
                if x <= *value {
                    0.0
                } else {
                    1.0
                }
            }
            Self::Empirical { samples } => {
                let count = samples.partition_point(|s| *s < x);
                count as f64 / samples.len() as f64
            }
            _ => self.cdf(x),
        }
    }

    /// Density at `x`; fails for the discrete families.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        if !self.is_continuous() {
            return Err(Error::NotContinuous("pdf"));
        }
        Ok(self.density(x))
    }

    /// Density of a continuous family (0 for discrete ones).
    pub(crate) fn density(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match self {
            Self::Exponential { mean } => (-x / mean).exp() / mean,
            Self::NakagamiGain { m, w } => {
                if x == 0.0 {
                    return if *m < 1.0 {
                        f64::INFINITY
                    } else if *m == 1.0 {
                        1.0 / w
                    } else {
                        0.0
                    };
                }
                let rate = m / w;
                ((m - 1.0) * x.ln() + m * rate.ln() - rate * x - ln_gamma(*m)).exp()
            }
            Self::RatioExpExp {
                num_mean,
                den_mean,
                power,
            } => {
                let k = power * den_mean;
                let denom = num_mean + x * k;
                (-x / num_mean).exp() * (1.0 / denom + num_mean * k / (denom * denom))
            }
            _ => 0.0,
        }
    }

    /// Mass points `(value, probability)` of the discrete families, sorted
    /// by value. Empty for continuous families.
    pub fn atoms(&self) -> Vec<(f64, f64)> {
        match self {
            Self::BernoulliGain { q } => [(0.0, 1.0 - q), (1.0, *q)]
                .into_iter()
                .filter(|(_, p)| *p > 0.0)
                .collect(),
            Self::PointMass { value } => vec![(*value, 1.0)],
            Self::Empirical { samples } => {
                let n = samples.len() as f64;
                let mut out: Vec<(f64, f64)> = Vec::new();
                for &s in samples {
                    match out.last_mut() {
                        Some((v, c)) if *v == s => *c += 1.0,
                        _ => out.push((s, 1.0)),
                    }
                }
                out.iter_mut().for_each(|a| a.1 /= n);
                out
            }
            _ => Vec::new(),
        }
    }

    /// Points where the CDF jumps.
    pub fn jump_points(&self) -> Vec<f64> {
        self.atoms().into_iter().map(|(v, _)| v).collect()
    }

    pub fn support_inf(&self) -> f64 {
        match self {
            Self::BernoulliGain { q } => {
                if *q < 1.0 {
                    0.0
                } else {
                    1.0
                }
            }
            Self::PointMass { value } => *value,
            Self::Empirical { samples } => samples[0],
            _ => 0.0,
        }
    }

    pub fn support_sup(&self) -> f64 {
        match self {
            Self::BernoulliGain { q } => {
                if *q > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Self::PointMass { value } => *value,
            Self::Empirical { samples } => samples[samples.len() - 1],
            _ => f64::INFINITY,
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::Exponential { mean } => *mean,
            Self::NakagamiGain { w, .. } => *w,
            Self::BernoulliGain { q } => *q,
            Self::PointMass { value } => *value,
            Self::Empirical { samples } => samples.iter().sum::<f64>() / samples.len() as f64,
            Self::RatioExpExp { num_mean, .. } => {
                quadrature::integrate_half_line(|x| self.ccdf(x), &[*num_mean, 10.0 * num_mean], 1e-12).value
            }
        }
    }

    /// Generalized inverse `inf{x : F(x) >= u}` for `u ∈ [0, 1]`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::Domain {
                function: "quantile",
                reason: format!("probability must lie in [0, 1], got {u}"),
            });
        }
        Ok(self.quantile_unchecked(u))
    }

    /// Inverse-transform sample at the supplied uniform variate in `(0, 1)`.
    /// Variates outside `[0, 1]` are clamped.
    pub fn sample(&self, u: f64) -> f64 {
        self.quantile_unchecked(u.clamp(0.0, 1.0))
    }

    fn quantile_unchecked(&self, u: f64) -> f64 {
        if u == 0.0 {
            return self.support_inf();
        }
        if u == 1.0 {
            return self.support_sup();
        }
        match self {
            Self::Exponential { mean } => -mean * (-u).ln_1p(),
            Self::NakagamiGain { .. } | Self::RatioExpExp { .. } => self.invert_continuous(u),
            Self::BernoulliGain { q } => {
                if u <= 1.0 - q {
                    0.0
                } else {
                    1.0
                }
            }
            Self::PointMass { value } => *value,
            Self::Empirical { samples } => {
                let n = samples.len();
                let idx = ((u * n as f64).ceil() as usize).clamp(1, n);
                samples[idx - 1]
            }
        }
    }

    /// Safeguarded Newton on a strictly increasing continuous CDF.
    fn invert_continuous(&self, u: f64) -> f64 {
        // Work with the upper tail when u is large to keep relative precision.
        let upper = u > 0.5;
        let tail = 1.0 - u;
        let residual = |x: f64| if upper { tail - self.ccdf(x) } else { self.cdf(x) - u };

        let scale = self.mean().max(f64::MIN_POSITIVE);
        let mut lo = 0.0;
        let mut hi = scale;
        while residual(hi) < 0.0 {
            lo = hi;
            hi *= 2.0;
            if !hi.is_finite() {
                return f64::INFINITY;
            }
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..200 {
            let r = residual(x);
            if r == 0.0 {
                return x;
            }
            if r < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let d = self.density(x);
            let newton = x - r / d;
            let next = if d > 0.0 && d.is_finite() && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs() || hi - lo <= 4.0 * f64::EPSILON * hi {
                return next;
            }
            x = next;
        }
        x
    }

    /// Point beyond which at most `tail` probability remains.
    pub fn upper_truncation(&self, tail: f64) -> f64 {
        if self.is_continuous() {
            self.quantile_unchecked(1.0 - tail)
        } else {
            self.support_sup()
        }
    }
}

/// Ordered abscissae on which "for all x" statements are checked.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationGrid {
    points: Vec<f64>,
}

impl EvaluationGrid {
    /// Requires at least three strictly increasing nonnegative points.
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 3 {
            return Err(invalid("grid", "needs at least three points"));
        }
        if points.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(invalid("grid", "points must be finite and nonnegative"));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("grid", "points must be strictly increasing"));
        }
        Ok(Self { points })
    }

    pub fn log_spaced(x_min: f64, x_max: f64, count: usize) -> Result<Self> {
        if !(x_min > 0.0 && x_max > x_min) {
            return Err(invalid("grid", format!("need 0 < x_min < x_max, got {x_min}, {x_max}")));
        }
        let (a, b) = (x_min.ln(), x_max.ln());
        let last = count.saturating_sub(1).max(1) as f64;
        let mut points: Vec<f64> = (0..count).map(|i| (a + (b - a) * i as f64 / last).exp()).collect();
        if let Some(p) = points.last_mut() {
            *p = x_max;
        }
        Self::new(points)
    }

    /// `count` equally spaced points `x_max · i / count`, `i = 1..=count`.
    pub fn linear(x_max: f64, count: usize) -> Result<Self> {
        positive("x_max", x_max)?;
        Self::new((1..=count).map(|i| x_max * i as f64 / count as f64).collect())
    }

    /// Default grid for comparing the given distributions: log-spaced up to
    /// the largest `1 - 1e-9` quantile among them.
    pub fn covering(dists: &[&GainDistribution]) -> Result<Self> {
        let mut x_max = dists
            .iter()
            .map(|d| d.upper_truncation(DEFAULT_TRUNCATION_TAIL))
            .fold(0.0_f64, f64::max);
        if !x_max.is_finite() {
            return Err(Error::GridCoverage("unbounded truncation point".into()));
        }
        if x_max <= 0.0 {
            x_max = 1.0;
        }
        Self::log_spaced(x_max * 1e-9, x_max, DEFAULT_GRID_POINTS)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn x_max(&self) -> f64 {
        self.points[self.points.len() - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn cdf_examples() {
        let e1 = GainDistribution::exponential(1.0).unwrap();
        assert_eq!(e1.cdf(0.0), 0.0);
        let e2 = GainDistribution::exponential(2.0).unwrap();
        assert!(close(e2.cdf(2.0 * std::f64::consts::LN_2), 0.5, 1e-15));
        let nak = GainDistribution::nakagami_gain(1.0, 2.0).unwrap();
        for x in [0.0, 0.1, 1.0, 3.0, 25.0] {
            assert!(close(nak.cdf(x), e2.cdf(x), 1e-12));
        }
    }

    #[test]
    fn quantile_examples() {
        let e1 = GainDistribution::exponential(1.0).unwrap();
        let u = 1.0 - (-1.0f64).exp();
        assert!(close(e1.quantile(u).unwrap(), 1.0, 1e-14));
        assert_eq!(e1.quantile(0.0).unwrap(), 0.0);
        let b = GainDistribution::bernoulli(0.7).unwrap();
        assert_eq!(b.quantile(0.3).unwrap(), 0.0);
        assert_eq!(b.quantile(0.31).unwrap(), 1.0);
        assert!(e1.quantile(-0.1).is_err());
        assert!(e1.quantile(1.1).is_err());
        assert!(e1.quantile(f64::NAN).is_err());
        assert_eq!(GainDistribution::point_mass(2.0).unwrap().quantile(0.0).unwrap(), 2.0);
    }

    #[test]
    fn sample_examples() {
        let e1 = GainDistribution::exponential(1.0).unwrap();
        assert!(close(e1.sample(0.5), std::f64::consts::LN_2, 1e-15));
        let pm = GainDistribution::point_mass(2.0).unwrap();
        for u in [0.01, 0.5, 0.99] {
            assert_eq!(pm.sample(u), 2.0);
        }
        assert_eq!(GainDistribution::bernoulli(0.7).unwrap().sample(0.9), 1.0);
    }

    #[test]
    fn ratio_examples() {
        let z = GainDistribution::build_ratio(1.0, 0.1, 1.0).unwrap();
        assert_eq!(z.cdf(0.0), 0.0);
        assert!(close(z.ccdf(1.0), (-1.0f64).exp() / 1.1, 1e-15));
        assert!(close(z.ccdf(1.0), 0.334_44, 1e-5));
        let z0 = GainDistribution::build_ratio(1.7, 0.3, 0.0).unwrap();
        let e = GainDistribution::exponential(1.7).unwrap();
        for x in [0.0, 0.2, 1.0, 4.0, 30.0] {
            assert!(close(z0.cdf(x), e.cdf(x), 1e-15));
            assert!(close(z0.density(x), e.density(x), 1e-15));
        }
        assert!(GainDistribution::build_ratio(0.0, 1.0, 1.0).is_err());
        assert!(GainDistribution::build_ratio(1.0, -1.0, 1.0).is_err());
        assert!(GainDistribution::build_ratio(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn ratio_density_matches_cdf_slope() {
        let z = GainDistribution::build_ratio(1.0, 0.5, 3.0).unwrap();
        for x in [0.05, 0.5, 2.0] {
            let h = 1e-6;
            let slope = (z.cdf(x + h) - z.cdf(x - h)) / (2.0 * h);
            assert!(close(slope, z.density(x), 1e-7));
        }
    }

    #[test]
    fn nakagami_density_integrates_to_one() {
        for (m, w) in [(0.5, 1.0), (2.0, 1.0), (4.5, 3.0)] {
            let d = GainDistribution::nakagami_gain(m, w).unwrap();
            let r = quadrature::integrate_half_line(|x| d.density(x), &[w], 1e-11);
            assert!(close(r.value, 1.0, 1e-9), "m = {m}: {r:?}");
        }
    }

    #[test]
    fn empirical_step_function() {
        let d = GainDistribution::empirical(vec![3.0, 1.0, 2.0, 2.0]).unwrap();
        assert_eq!(d.cdf(0.5), 0.0);
        assert_eq!(d.cdf(1.0), 0.25);
        assert_eq!(d.cdf(2.0), 0.75);
        assert_eq!(d.cdf_left(2.0), 0.25);
        assert_eq!(d.quantile(0.25).unwrap(), 1.0);
        assert_eq!(d.quantile(0.26).unwrap(), 2.0);
        assert_eq!(d.quantile(1.0).unwrap(), 3.0);
        assert_eq!(d.atoms(), vec![(1.0, 0.25), (2.0, 0.5), (3.0, 0.25)]);
        assert!(GainDistribution::empirical(vec![]).is_err());
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(GainDistribution::exponential(0.0).is_err());
        assert!(GainDistribution::nakagami_gain(-1.0, 1.0).is_err());
        assert!(GainDistribution::bernoulli(1.5).is_err());
        assert!(GainDistribution::point_mass(-0.5).is_err());
        let raw = GainDistribution::Exponential { mean: -2.0 };
        assert!(raw.validated().is_err());
    }

    #[test]
    fn json_descriptors() {
        let d: GainDistribution = serde_json::from_str(r#"{"family": "nakagami_gain", "m": 0.5, "w": 1.0}"#).unwrap();
        assert_eq!(d, GainDistribution::NakagamiGain { m: 0.5, w: 1.0 });
        let d: GainDistribution = serde_json::from_str(r#"{"family": "bernoulli", "q": 0.7}"#).unwrap();
        assert_eq!(d, GainDistribution::BernoulliGain { q: 0.7 });
        let d: GainDistribution = serde_json::from_str(
            r#"{"family": "ratio_exp_exp", "num_mean": 1.0, "den_mean": 0.1, "power": 1.0}"#,
        )
        .unwrap();
        assert!(matches!(d, GainDistribution::RatioExpExp { .. }));
        let err = serde_json::from_str::<GainDistribution>(r#"{"mean": 1.0}"#).unwrap_err();
        assert!(err.to_string().contains("family"));
    }

    #[test]
    fn grid_validation() {
        assert!(EvaluationGrid::new(vec![0.0, 1.0]).is_err());
        assert!(EvaluationGrid::new(vec![0.0, 2.0, 1.0]).is_err());
        assert!(EvaluationGrid::new(vec![-1.0, 0.0, 1.0]).is_err());
        let g = EvaluationGrid::log_spaced(1e-3, 10.0, 50).unwrap();
        assert_eq!(g.points().len(), 50);
        assert_eq!(g.x_max(), 10.0);
        let e = GainDistribution::exponential(1.0).unwrap();
        let g = EvaluationGrid::covering(&[&e]).unwrap();
        assert!(e.ccdf(g.x_max()) <= 1.01e-9);
    }
}
