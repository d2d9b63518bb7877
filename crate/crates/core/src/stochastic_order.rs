//! Usual stochastic order, total variation and overlap mass.
//!
//! `X ≤st Y` iff `P(X > x) ≤ P(Y > x)` for all `x`. "For all" is decided on an
//! [`EvaluationGrid`] plus every jump point of the discrete families; between
//! jumps the CCDFs of the implemented families are smooth.

use serde::{Deserialize, Serialize};

use crate::distributions::{EvaluationGrid, GainDistribution};
use crate::error::{invalid, Error, Result};
use crate::quadrature;
use crate::verify::ks_critical_value_1pct;

/// Default tolerance for CCDF comparisons between analytic families.
pub const ANALYTIC_TOLERANCE: f64 = 1e-9;

/// Tolerance for comparing two probability vectors.
pub const DISCRETE_TOLERANCE: f64 = 1e-12;

/// A grid covers a distribution when the CCDF at its last point is below this.
pub const COVERAGE_TAIL: f64 = 1e-8;

const MAX_WITNESSES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderRelation {
    /// First argument is smaller in the usual stochastic order.
    FirstLeq,
    /// Second argument is smaller.
    SecondLeq,
    Equal,
    Incomparable,
}

/// Abscissae where each strict direction was observed.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Witnesses {
    /// Points with `ccdf1 > ccdf2 + tol`.
    pub first_above: Vec<f64>,
    /// Points with `ccdf2 > ccdf1 + tol`.
    pub second_above: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderVerdict {
    pub relation: OrderRelation,
    pub witnesses: Witnesses,
    /// Largest CCDF gap against the declared relation.
    pub max_violation: f64,
}

impl OrderVerdict {
    /// First argument `≤st` second (including equality).
    pub fn first_leq(&self) -> bool {
        matches!(self.relation, OrderRelation::FirstLeq | OrderRelation::Equal)
    }

    pub fn second_leq(&self) -> bool {
        matches!(self.relation, OrderRelation::SecondLeq | OrderRelation::Equal)
    }

    /// Builds a verdict from `gap_i = ccdf1(x_i) - ccdf2(x_i)`.
    pub(crate) fn from_gaps(points: &[f64], gaps: &[f64], tol: f64) -> Self {
        let mut above1: Vec<(f64, f64)> = Vec::new();
        let mut above2: Vec<(f64, f64)> = Vec::new();
        let (mut max_pos, mut max_neg) = (0.0_f64, 0.0_f64);
        for (&x, &g) in points.iter().zip(gaps) {
            max_pos = max_pos.max(g);
            max_neg = max_neg.max(-g);
            if g > tol {
                above1.push((x, g));
            } else if -g > tol {
                above2.push((x, -g));
            }
        }
        let relation = match (above1.is_empty(), above2.is_empty()) {
            (true, true) => OrderRelation::Equal,
            (true, false) => OrderRelation::FirstLeq,
            (false, true) => OrderRelation::SecondLeq,
            (false, false) => OrderRelation::Incomparable,
        };
        let max_violation = match relation {
            OrderRelation::FirstLeq => max_pos,
            OrderRelation::SecondLeq => max_neg,
            OrderRelation::Equal | OrderRelation::Incomparable => max_pos.max(max_neg),
        };
        OrderVerdict {
            relation,
            witnesses: Witnesses {
                first_above: strongest(above1),
                second_above: strongest(above2),
            },
            max_violation,
        }
    }
}

fn strongest(mut hits: Vec<(f64, f64)>) -> Vec<f64> {
    hits.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut xs: Vec<f64> = hits.into_iter().take(MAX_WITNESSES).map(|h| h.0).collect();
    xs.sort_by(f64::total_cmp);
    xs
}

/// Decides the usual stochastic order between `d1` and `d2`.
///
/// Gaps within `±tol` count toward both directions, so two distributions
/// closer than `tol` everywhere are reported [`OrderRelation::Equal`].
pub fn check_usual_order(
    d1: &GainDistribution,
    d2: &GainDistribution,
    grid: &EvaluationGrid,
    tol: f64,
) -> Result<OrderVerdict> {
    if !(tol >= 0.0) {
        return Err(invalid("tol", format!("must be nonnegative, got {tol}")));
    }
    let x_max = grid.x_max();
    for (name, d) in [("first", d1), ("second", d2)] {
        let tail = d.ccdf(x_max);
        if tail > COVERAGE_TAIL {
            return Err(Error::GridCoverage(format!(
                "{name} distribution ({}) keeps mass {tail:.3e} beyond x_max = {x_max}",
                d.family_name()
            )));
        }
    }
    let mut points: Vec<f64> = grid.points().to_vec();
    points.push(0.0);
    points.extend(d1.jump_points());
    points.extend(d2.jump_points());
    points.sort_by(f64::total_cmp);
    points.dedup();
    let gaps: Vec<f64> = points.iter().map(|&x| d1.ccdf(x) - d2.ccdf(x)).collect();
    Ok(OrderVerdict::from_gaps(&points, &gaps, tol))
}

/// Tolerance used when no explicit one is supplied: [`ANALYTIC_TOLERANCE`]
/// for analytic families, twice the 1% KS critical value for empirical ones.
pub fn default_tolerance(d1: &GainDistribution, d2: &GainDistribution) -> f64 {
    let sizes = [d1, d2].into_iter().filter_map(|d| match d {
        GainDistribution::Empirical { samples } => Some(samples.len()),
        _ => None,
    });
    match sizes.min() {
        Some(n) => 2.0 * ks_critical_value_1pct(n),
        None => ANALYTIC_TOLERANCE,
    }
}

/// [`check_usual_order`] on the default covering grid and tolerance.
pub fn check_usual_order_default(d1: &GainDistribution, d2: &GainDistribution) -> Result<OrderVerdict> {
    let grid = EvaluationGrid::covering(&[d1, d2])?;
    check_usual_order(d1, d2, &grid, default_tolerance(d1, d2))
}

fn check_stochastic(name: &'static str, p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(invalid(name, "empty probability vector"));
    }
    if p.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
        return Err(invalid(name, "entries must be finite and nonnegative"));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > DISCRETE_TOLERANCE {
        return Err(invalid(name, format!("entries sum to {total}, not 1")));
    }
    Ok(())
}

/// Tail sums `Σ_{j>n} p_j` for `n = 1..=len` (1-based state index).
pub fn tail_sums(p: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len()];
    let mut acc = 0.0;
    for n in (0..p.len()).rev() {
        out[n] = acc;
        acc += p[n];
    }
    out
}

/// Usual stochastic order between two distributions on a shared, increasing
/// state grid. Witnesses are 1-based state indices `n` of the failing tails.
pub fn check_usual_order_discrete(p: &[f64], q: &[f64]) -> Result<OrderVerdict> {
    if p.len() != q.len() {
        return Err(Error::Shape(format!("vectors of length {} and {}", p.len(), q.len())));
    }
    check_stochastic("p", p)?;
    check_stochastic("q", q)?;
    let (tp, tq) = (tail_sums(p), tail_sums(q));
    let index: Vec<f64> = (1..=p.len()).map(|n| n as f64).collect();
    let gaps: Vec<f64> = tp.iter().zip(&tq).map(|(a, b)| a - b).collect();
    Ok(OrderVerdict::from_gaps(&index, &gaps, DISCRETE_TOLERANCE))
}

fn require_continuous(op: &'static str, d1: &GainDistribution, d2: &GainDistribution) -> Result<()> {
    if d1.is_continuous() && d2.is_continuous() {
        Ok(())
    } else {
        Err(Error::NotContinuous(op))
    }
}

/// `∫ min(f1, f2)` by adaptive quadrature over the union support.
pub fn overlap_mass(d1: &GainDistribution, d2: &GainDistribution) -> Result<f64> {
    require_continuous("overlap_mass", d1, d2)?;
    let mut breaks = Vec::new();
    for d in [d1, d2] {
        for u in [1e-4, 0.01, 0.1, 0.5, 0.9, 0.99, 0.9999] {
            breaks.push(d.quantile(u)?);
        }
    }
    let f = |x: f64| d1.density(x).min(d2.density(x));
    let r = quadrature::integrate_half_line(f, &breaks, 1e-13);
    Ok(r.value.clamp(0.0, 1.0))
}

/// `1 - ∫ min(f1, f2)`.
pub fn total_variation(d1: &GainDistribution, d2: &GainDistribution) -> Result<f64> {
    Ok(1.0 - overlap_mass(d1, d2)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn exp(m: f64) -> GainDistribution {
        GainDistribution::exponential(m).unwrap()
    }

    #[test]
    fn exponential_means_order() {
        let v = check_usual_order_default(&exp(1.0), &exp(2.0)).unwrap();
        assert_eq!(v.relation, OrderRelation::FirstLeq);
        assert!(v.witnesses.first_above.is_empty());
        assert!(!v.witnesses.second_above.is_empty());
        let v = check_usual_order_default(&exp(2.0), &exp(1.0)).unwrap();
        assert_eq!(v.relation, OrderRelation::SecondLeq);
    }

    #[test]
    fn identical_is_equal() {
        for d in [
            exp(1.3),
            GainDistribution::nakagami_gain(0.5, 1.0).unwrap(),
            GainDistribution::bernoulli(0.4).unwrap(),
            GainDistribution::point_mass(2.0).unwrap(),
        ] {
            let v = check_usual_order_default(&d, &d).unwrap();
            assert_eq!(v.relation, OrderRelation::Equal);
            assert!(v.witnesses.first_above.is_empty() && v.witnesses.second_above.is_empty());
        }
    }

    #[test]
    fn binary_fading_order() {
        let pd = GainDistribution::bernoulli(0.3).unwrap();
        let pc = GainDistribution::bernoulli(0.7).unwrap();
        let v = check_usual_order_default(&pd, &pc).unwrap();
        assert_eq!(v.relation, OrderRelation::FirstLeq);
        assert!(!v.witnesses.second_above.is_empty());
        assert!(v.witnesses.second_above.iter().all(|&x| (0.0..1.0).contains(&x)));
    }

    #[test]
    fn crossing_ccdfs_are_incomparable() {
        let nak = GainDistribution::nakagami_gain(2.0, 1.0).unwrap();
        let v = check_usual_order_default(&exp(1.0), &nak).unwrap();
        assert_eq!(v.relation, OrderRelation::Incomparable);
        assert!(!v.witnesses.first_above.is_empty());
        assert!(!v.witnesses.second_above.is_empty());
        assert!(v.witnesses.first_above.len() <= 3);
    }

    #[test]
    fn grid_must_cover_support() {
        let short = EvaluationGrid::linear(2.0, 100).unwrap();
        let err = check_usual_order(&exp(1.0), &exp(2.0), &short, 1e-9).unwrap_err();
        assert!(matches!(err, Error::GridCoverage(_)));
        let grid = EvaluationGrid::covering(&[&exp(2.0)]).unwrap();
        assert!(check_usual_order(&exp(1.0), &exp(2.0), &grid, -1.0).is_err());
    }

    #[test]
    fn discrete_examples() {
        let v = check_usual_order_discrete(&[0.5, 0.25, 0.25], &[0.25, 0.375, 0.375]).unwrap();
        assert_eq!(v.relation, OrderRelation::FirstLeq);
        assert_eq!(tail_sums(&[0.5, 0.25, 0.25]), vec![0.5, 0.25, 0.0]);
        assert_eq!(tail_sums(&[0.25, 0.375, 0.375]), vec![0.75, 0.375, 0.0]);
        let p = [0.2, 0.3, 0.5];
        assert_eq!(check_usual_order_discrete(&p, &p).unwrap().relation, OrderRelation::Equal);
        let v = check_usual_order_discrete(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert_eq!(v.relation, OrderRelation::FirstLeq);
        assert_eq!(tail_sums(&[1.0, 0.0]), vec![0.0, 0.0]);
        assert_eq!(tail_sums(&[0.0, 1.0]), vec![1.0, 0.0]);
    }

    #[test]
    fn discrete_errors() {
        assert!(matches!(
            check_usual_order_discrete(&[1.0], &[0.5, 0.5]),
            Err(Error::Shape(_))
        ));
        assert!(check_usual_order_discrete(&[0.6, 0.6], &[0.5, 0.5]).is_err());
        assert!(check_usual_order_discrete(&[1.5, -0.5], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn overlap_and_tv_for_exponentials() {
        // densities cross at 2 ln 2: ∫ min = (1 - 1/2) + 1/4
        let p = overlap_mass(&exp(1.0), &exp(2.0)).unwrap();
        assert!((p - 0.75).abs() < 1e-10, "{p}");
        let tv = total_variation(&exp(1.0), &exp(2.0)).unwrap();
        assert!((tv - 0.25).abs() < 1e-10);
        assert!((p + tv - 1.0).abs() < 1e-12);
        assert!(total_variation(&exp(1.7), &exp(1.7)).unwrap().abs() < 1e-10);
        let far = total_variation(&exp(1.0), &exp(1e6)).unwrap();
        assert!(far > 0.999 && far < 1.0, "{far}");
    }

    #[test]
    fn overlap_rejects_discrete() {
        let b = GainDistribution::bernoulli(0.5).unwrap();
        assert!(matches!(overlap_mass(&b, &exp(1.0)), Err(Error::NotContinuous(_))));
        let e = GainDistribution::empirical(vec![1.0, 2.0]).unwrap();
        assert!(total_variation(&exp(1.0), &e).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn antisymmetry_at_zero_tolerance(a in 0.1f64..5.0, b in 0.1f64..5.0) {
            let (d1, d2) = (exp(a), exp(b));
            let grid = EvaluationGrid::covering(&[&d1, &d2]).unwrap();
            let v = check_usual_order(&d1, &d2, &grid, 0.0).unwrap();
            let w = check_usual_order(&d2, &d1, &grid, 0.0).unwrap();
            prop_assert_eq!(v.first_leq(), w.second_leq());
            if v.first_leq() && v.second_leq() {
                prop_assert_eq!(v.relation, OrderRelation::Equal);
            }
        }

        #[test]
        fn tv_plus_overlap_is_one(m1 in 0.3f64..4.0, w1 in 0.2f64..3.0, mean in 0.2f64..3.0) {
            let d1 = GainDistribution::nakagami_gain(m1, w1).unwrap();
            let d2 = exp(mean);
            let p = overlap_mass(&d1, &d2).unwrap();
            let tv = total_variation(&d1, &d2).unwrap();
            prop_assert!((p + tv - 1.0).abs() < 1e-8);
            prop_assert!((0.0..=1.0).contains(&p));
        }
    }
}
