//! Equivalent-channel couplings of two gain distributions.
//!
//! Three constructions are provided:
//!
//! * maximal coupling: with probability `p = ∫ min(f1, f2)` both gains are a
//!   single draw from `min(f1, f2) / p`; otherwise they are drawn from the
//!   residual densities `(f_k - min(f1, f2)) / (1 - p)`;
//! * comonotone coupling: both gains are generalized-inverse transforms of a
//!   shared uniform, which keeps `h1 <= h2` pathwise whenever `d1 ≤st d2`;
//! * the Fréchet–Hoeffding upper copula `min(u, v)`, whose joint CDF
//!   `min{F1(h1), F2(h2)}` is exactly the joint law of the comonotone pair.
//!
//! The maximal-coupling pieces are tabulated from the density crossing
//! points: between two crossings `min(f1, f2)` is one of the two densities,
//! so every partial mass is a difference of the source CDFs.

use serde::{Deserialize, Serialize};

use crate::distributions::GainDistribution;
use crate::error::{invalid, Error, Result};

/// Relative resolution at which two density values are treated as equal.
const DENSITY_TIE: f64 = 1e-12;
const SCAN_POINTS: usize = 4096;
const DEGENERATE_MASS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingSample {
    pub h1: f64,
    pub h2: f64,
    /// Outcome of the "draw equal values" selector; maximal coupling only.
    pub equal_flag: Option<bool>,
}

/// Which density is larger on a segment between consecutive crossings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Lead {
    First,
    Second,
    Tied,
}

#[derive(Debug, Clone)]
struct Segment {
    lo: f64,
    hi: f64,
    lead: Lead,
}

/// Sign of `f1 - f2` with ties inside the relative tolerance.
fn lead_at(d1: &GainDistribution, d2: &GainDistribution, x: f64) -> Lead {
    let (f1, f2) = (d1.density(x), d2.density(x));
    let scale = f1.max(f2);
    if scale == 0.0 || (f1 - f2).abs() <= DENSITY_TIE * scale || (f1.is_infinite() && f2.is_infinite()) {
        Lead::Tied
    } else if f1 > f2 {
        Lead::First
    } else {
        Lead::Second
    }
}

fn refine_crossing(d1: &GainDistribution, d2: &GainDistribution, mut lo: f64, mut hi: f64) -> f64 {
    let lead_lo = lead_at(d1, d2, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-12 * hi.max(1.0) || mid <= lo || mid >= hi {
            break;
        }
        if lead_at(d1, d2, mid) == lead_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Partitions `[0, ∞)` at the sign changes of `f1 - f2`.
fn density_segments(d1: &GainDistribution, d2: &GainDistribution) -> Vec<Segment> {
    let x_max = 2.0 * d1.upper_truncation(1e-13).max(d2.upper_truncation(1e-13));
    let mut xs: Vec<f64> = (1..=SCAN_POINTS)
        .map(|i| x_max * i as f64 / SCAN_POINTS as f64)
        .collect();
    let (a, b) = ((x_max * 1e-12).ln(), x_max.ln());
    xs.extend((0..SCAN_POINTS).map(|i| (a + (b - a) * i as f64 / SCAN_POINTS as f64).exp()));
    xs.sort_by(f64::total_cmp);
    xs.dedup();

    let signed: Vec<(f64, Lead)> = xs
        .into_iter()
        .map(|x| (x, lead_at(d1, d2, x)))
        .filter(|(_, l)| *l != Lead::Tied)
        .collect();
    if signed.is_empty() {
        return vec![Segment {
            lo: 0.0,
            hi: f64::INFINITY,
            lead: Lead::Tied,
        }];
    }
    let mut segments = Vec::new();
    let mut lo = 0.0;
    for pair in signed.windows(2) {
        let ((xa, la), (xb, lb)) = (pair[0], pair[1]);
        if la != lb {
            let c = refine_crossing(d1, d2, xa, xb);
            segments.push(Segment { lo, hi: c, lead: la });
            lo = c;
        }
    }
    segments.push(Segment {
        lo,
        hi: f64::INFINITY,
        lead: signed[signed.len() - 1].1,
    });
    segments
}

fn mass_between(d: &GainDistribution, a: f64, b: f64) -> f64 {
    let upper = if b.is_infinite() { 0.0 } else { d.ccdf(b) };
    (d.ccdf(a) - upper).max(0.0)
}

/// Which cumulative piece a quantile is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Piece {
    Shared,
    Residual1,
    Residual2,
}

/// Precomputed maximal coupling of two continuous gain distributions.
#[derive(Debug, Clone)]
pub struct MaximalCouplingSpec {
    d1: GainDistribution,
    d2: GainDistribution,
    overlap: f64,
    segments: Vec<Segment>,
}

impl MaximalCouplingSpec {
    pub fn new(d1: GainDistribution, d2: GainDistribution) -> Result<Self> {
        if !(d1.is_continuous() && d2.is_continuous()) {
            return Err(Error::NotContinuous("maximal coupling"));
        }
        let segments = density_segments(&d1, &d2);
        let mut spec = Self {
            d1,
            d2,
            overlap: 0.0,
            segments,
        };
        spec.overlap = spec.piece_mass_up_to(Piece::Shared, f64::INFINITY);
        Ok(spec)
    }

    pub fn first(&self) -> &GainDistribution {
        &self.d1
    }

    pub fn second(&self) -> &GainDistribution {
        &self.d2
    }

    /// `p = ∫ min(f1, f2)`, the probability of drawing equal gains.
    pub fn overlap(&self) -> f64 {
        self.overlap.clamp(0.0, 1.0)
    }

    /// Interior points where the two densities cross.
    pub fn crossings(&self) -> Vec<f64> {
        self.segments.iter().skip(1).map(|s| s.lo).collect()
    }

    /// Supports of the residual densities, as `[lo, hi)` segments.
    pub fn residual_supports(&self) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
        let pick = |lead| {
            self.segments
                .iter()
                .filter(|s| s.lead == lead)
                .map(|s| (s.lo, s.hi))
                .collect()
        };
        (pick(Lead::First), pick(Lead::Second))
    }

    /// Mass of a piece over `[seg.lo, min(x, seg.hi))` of one segment.
    fn segment_piece(&self, seg: &Segment, piece: Piece, x: f64) -> f64 {
        let hi = x.min(seg.hi);
        if hi <= seg.lo {
            return 0.0;
        }
        let m1 = || mass_between(&self.d1, seg.lo, hi);
        let m2 = || mass_between(&self.d2, seg.lo, hi);
        match (piece, seg.lead) {
            (Piece::Shared, Lead::First) => m2(),
            (Piece::Shared, _) => m1(),
            (Piece::Residual1, Lead::First) => (m1() - m2()).max(0.0),
            (Piece::Residual2, Lead::Second) => (m2() - m1()).max(0.0),
            _ => 0.0,
        }
    }

    fn piece_mass_up_to(&self, piece: Piece, x: f64) -> f64 {
        self.segments.iter().map(|s| self.segment_piece(s, piece, x)).sum()
    }

    /// Generalized inverse of the piece's cumulative mass at `target`.
    fn piece_inverse(&self, piece: Piece, target: f64) -> f64 {
        let mut acc = 0.0;
        for seg in &self.segments {
            let total = self.segment_piece(seg, piece, f64::INFINITY);
            if total <= 0.0 {
                continue;
            }
            if acc + total < target {
                acc += total;
                continue;
            }
            let want = target - acc;
            let mut lo = seg.lo;
            let mut hi = seg.hi;
            if hi.is_infinite() {
                hi = (2.0 * lo).max(lo + 1.0);
                while self.segment_piece(seg, piece, hi) < want {
                    lo = hi;
                    hi *= 2.0;
                    if !hi.is_finite() {
                        return f64::MAX;
                    }
                }
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if self.segment_piece(seg, piece, mid) < want {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return hi;
        }
        // target at the very top of the piece: last point of its support
        self.segments
            .iter()
            .rev()
            .find(|s| self.segment_piece(s, piece, f64::INFINITY) > 0.0)
            .map(|s| s.hi.min(f64::MAX))
            .unwrap_or(0.0)
    }

    /// Quantile of the normalized shared density `min(f1, f2) / p`.
    pub fn shared_quantile(&self, u: f64) -> f64 {
        self.piece_inverse(Piece::Shared, u * self.overlap)
    }

    /// Quantile of the residual density of the first (`k = 1`) or second
    /// (`k = 2`) distribution.
    pub fn residual_quantile(&self, k: usize, u: f64) -> f64 {
        let piece = if k == 1 { Piece::Residual1 } else { Piece::Residual2 };
        let total = self.piece_mass_up_to(piece, f64::INFINITY);
        self.piece_inverse(piece, u * total)
    }

    /// One draw of the maximal coupling from two uniforms in `(0, 1)`.
    ///
    /// Both residual draws reuse `u_value`, so the sampler is a pure function
    /// of its inputs.
    pub fn sample(&self, u_select: f64, u_value: f64) -> CouplingSample {
        self.sample_inner(u_select, u_value, false)
    }

    /// Negative control: draws each residual branch from the *other*
    /// distribution's residual density, which breaks the marginals.
    pub fn sample_with_swapped_residuals(&self, u_select: f64, u_value: f64) -> CouplingSample {
        self.sample_inner(u_select, u_value, true)
    }

    fn sample_inner(&self, u_select: f64, u_value: f64, swap: bool) -> CouplingSample {
        let p = self.overlap();
        if 1.0 - p < DEGENERATE_MASS {
            let h = self.d1.sample(u_value);
            return CouplingSample {
                h1: h,
                h2: h,
                equal_flag: Some(true),
            };
        }
        if p < DEGENERATE_MASS {
            let (h1, h2) = (self.d1.sample(u_value), self.d2.sample(u_value));
            let (h1, h2) = if swap { (h2, h1) } else { (h1, h2) };
            return CouplingSample {
                h1,
                h2,
                equal_flag: Some(false),
            };
        }
        if u_select <= p {
            let h = self.shared_quantile(u_value);
            CouplingSample {
                h1: h,
                h2: h,
                equal_flag: Some(true),
            }
        } else {
            let (k1, k2) = if swap { (2, 1) } else { (1, 2) };
            CouplingSample {
                h1: self.residual_quantile(k1, u_value),
                h2: self.residual_quantile(k2, u_value),
                equal_flag: Some(false),
            }
        }
    }
}

/// Convenience wrapper matching the free-function form of the sampler.
pub fn maximal_coupling_sample(spec: &MaximalCouplingSpec, u_select: f64, u_value: f64) -> CouplingSample {
    spec.sample(u_select, u_value)
}

/// `(F1^{-1}(u), F2^{-1}(u))` for a shared uniform `u`.
pub fn comonotone_sample(d1: &GainDistribution, d2: &GainDistribution, u: f64) -> CouplingSample {
    CouplingSample {
        h1: d1.sample(u),
        h2: d2.sample(u),
        equal_flag: None,
    }
}

/// Joint CDF of the comonotone pair, `min{F1(h1), F2(h2)}`.
pub fn copula_joint_cdf(d1: &GainDistribution, d2: &GainDistribution, h1: f64, h2: f64) -> f64 {
    d1.cdf(h1).min(d2.cdf(h2))
}

/// Joint CCDF of the comonotone pair, `min{F̄1(h1), F̄2(h2)}`.
pub fn copula_joint_ccdf(d1: &GainDistribution, d2: &GainDistribution, h1: f64, h2: f64) -> f64 {
    d1.ccdf(h1).min(d2.ccdf(h2))
}

/// The Fréchet–Hoeffding upper bound copula.
pub fn min_copula(u: f64, v: f64) -> f64 {
    u.min(v)
}

/// First failed copula axiom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CopulaViolation {
    /// A boundary condition `C(u,0) = 0`, `C(0,v) = 0`, `C(u,1) = u` or
    /// `C(1,v) = v` failed.
    Boundary { u: f64, v: f64, expected: f64, got: f64 },
    /// `C(u2,v2) - C(u2,v1) - C(u1,v2) + C(u1,v1) < 0`.
    Rectangle { u1: f64, u2: f64, v1: f64, v2: f64, volume: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CopulaAxiomReport {
    pub pass: bool,
    pub rectangles_checked: usize,
    pub first_violation: Option<CopulaViolation>,
}

/// `n` equally spaced points on `[0, 1]`, endpoints included.
pub fn unit_grid(n: usize) -> Vec<f64> {
    let last = n.saturating_sub(1).max(1) as f64;
    (0..n).map(|i| i as f64 / last).collect()
}

/// Checks the axioms for `min(u, v)` on the supplied grid.
pub fn verify_copula_axioms(grid_u: &[f64]) -> Result<CopulaAxiomReport> {
    verify_copula_axioms_for(grid_u, min_copula)
}

/// Checks the boundary conditions and the 2-increasing property of a
/// candidate copula over every rectangle spanned by grid points.
pub fn verify_copula_axioms_for<C: Fn(f64, f64) -> f64>(grid_u: &[f64], c: C) -> Result<CopulaAxiomReport> {
    if grid_u.iter().any(|u| !(0.0..=1.0).contains(u)) {
        return Err(invalid("grid_u", "points must lie in [0, 1]"));
    }
    if grid_u.windows(2).any(|w| w[0] > w[1]) {
        return Err(invalid("grid_u", "points must be sorted"));
    }
    const TOL: f64 = 1e-12;
    let fail = |v: CopulaViolation, checked| {
        Ok(CopulaAxiomReport {
            pass: false,
            rectangles_checked: checked,
            first_violation: Some(v),
        })
    };
    for &u in grid_u {
        let checks = [(u, 0.0, 0.0), (0.0, u, 0.0), (u, 1.0, u), (1.0, u, u)];
        for (a, b, expected) in checks {
            let got = c(a, b);
            if (got - expected).abs() > TOL {
                return fail(CopulaViolation::Boundary { u: a, v: b, expected, got }, 0);
            }
        }
    }
    let values: Vec<Vec<f64>> = grid_u.iter().map(|&u| grid_u.iter().map(|&v| c(u, v)).collect()).collect();
    let n = grid_u.len();
    let mut checked = 0;
    for i1 in 0..n {
        for i2 in i1 + 1..n {
            for j1 in 0..n {
                for j2 in j1 + 1..n {
                    checked += 1;
                    let volume = values[i2][j2] - values[i2][j1] - values[i1][j2] + values[i1][j1];
                    if volume < -TOL {
                        return fail(
                            CopulaViolation::Rectangle {
                                u1: grid_u[i1],
                                u2: grid_u[i2],
                                v1: grid_u[j1],
                                v2: grid_u[j2],
                                volume,
                            },
                            checked,
                        );
                    }
                }
            }
        }
    }
    Ok(CopulaAxiomReport {
        pass: true,
        rectangles_checked: checked,
        first_violation: None,
    })
}

/// Whether the residual of `d1` lives entirely below the residual of `d2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportSeparation {
    pub separated: bool,
    /// Boundary between the two residual supports when separated and both
    /// are nonempty.
    pub split_point: Option<f64>,
}

/// `sup supp(f1 - min) <= inf supp(f2 - min)`, resolved on the crossing grid.
pub fn residual_supports_separated(d1: &GainDistribution, d2: &GainDistribution) -> Result<SupportSeparation> {
    if !(d1.is_continuous() && d2.is_continuous()) {
        return Err(Error::NotContinuous("residual_supports_separated"));
    }
    let segments = density_segments(d1, d2);
    let sup_first = segments
        .iter()
        .filter(|s| s.lead == Lead::First)
        .map(|s| s.hi)
        .fold(f64::NEG_INFINITY, f64::max);
    let inf_second = segments
        .iter()
        .filter(|s| s.lead == Lead::Second)
        .map(|s| s.lo)
        .fold(f64::INFINITY, f64::min);
    let both = sup_first.is_finite() && inf_second.is_finite();
    Ok(SupportSeparation {
        separated: sup_first <= inf_second,
        split_point: if both && sup_first <= inf_second {
            Some(sup_first)
        } else {
            None
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic_order::{check_usual_order_default, overlap_mass};

    fn exp(m: f64) -> GainDistribution {
        GainDistribution::exponential(m).unwrap()
    }

    const CROSS: f64 = 2.0 * std::f64::consts::LN_2;

    #[test]
    fn exponential_pair_overlap_and_crossing() {
        let spec = MaximalCouplingSpec::new(exp(1.0), exp(2.0)).unwrap();
        assert!((spec.overlap() - 0.75).abs() < 1e-12);
        let c = spec.crossings();
        assert_eq!(c.len(), 1);
        assert!((c[0] - CROSS).abs() < 1e-11);
        let quad = overlap_mass(&exp(1.0), &exp(2.0)).unwrap();
        assert!((spec.overlap() - quad).abs() < 1e-10);
    }

    #[test]
    fn residual_branch_is_ordered() {
        let spec = MaximalCouplingSpec::new(exp(1.0), exp(2.0)).unwrap();
        for i in 1..200 {
            let u = i as f64 / 200.0;
            let s = spec.sample(0.99, u);
            assert_eq!(s.equal_flag, Some(false));
            assert!(s.h1 < s.h2, "u = {u}: {s:?}");
            assert!(s.h1 <= CROSS + 1e-9 && s.h2 >= CROSS - 1e-9);
        }
        let s = spec.sample(0.1, 0.3);
        assert_eq!(s.equal_flag, Some(true));
        assert_eq!(s.h1, s.h2);
    }

    #[test]
    fn identical_distributions_always_equal() {
        let d = GainDistribution::nakagami_gain(2.5, 1.5).unwrap();
        let spec = MaximalCouplingSpec::new(d.clone(), d).unwrap();
        assert!((spec.overlap() - 1.0).abs() < 1e-12);
        for i in 1..50 {
            let s = spec.sample(0.999, i as f64 / 50.0);
            assert_eq!(s.h1, s.h2);
            assert_eq!(s.equal_flag, Some(true));
        }
    }

    #[test]
    fn shared_quantile_inverts_shared_mass() {
        let spec = MaximalCouplingSpec::new(exp(1.0), exp(2.0)).unwrap();
        // shared CDF below the crossing follows F2 (the smaller density there)
        let x = spec.shared_quantile(0.2);
        let expected = exp(2.0).quantile(0.2 * 0.75).unwrap();
        assert!((x - expected).abs() < 1e-9);
    }

    #[test]
    fn maximal_coupling_rejects_discrete() {
        let b = GainDistribution::bernoulli(0.5).unwrap();
        assert!(MaximalCouplingSpec::new(b, exp(1.0)).is_err());
    }

    #[test]
    fn comonotone_examples() {
        let s = comonotone_sample(&exp(1.0), &exp(2.0), 0.5);
        assert!((s.h1 - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((s.h2 - CROSS).abs() < 1e-15);
        assert_eq!(s.equal_flag, None);
        let b = comonotone_sample(
            &GainDistribution::bernoulli(0.3).unwrap(),
            &GainDistribution::bernoulli(0.7).unwrap(),
            0.5,
        );
        assert_eq!((b.h1, b.h2), (0.0, 1.0));
        let d = exp(3.0);
        let s = comonotone_sample(&d, &d, 0.77);
        assert_eq!(s.h1, s.h2);
    }

    #[test]
    fn copula_joint_cdf_examples() {
        let (d1, d2) = (exp(1.0), exp(2.0));
        assert!((copula_joint_cdf(&d1, &d2, f64::INFINITY, 1.3) - d2.cdf(1.3)).abs() < 1e-15);
        assert_eq!(copula_joint_cdf(&d1, &d2, 0.7, 0.0), 0.0);
        let v = copula_joint_cdf(&d1, &d2, 1.0, 1.0);
        assert!((v - (1.0 - (-0.5f64).exp())).abs() < 1e-15);
        assert!((v - 0.3935).abs() < 1e-4);
        assert!((copula_joint_ccdf(&d1, &d2, 1.0, 1.0) - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn copula_axioms() {
        let grid = unit_grid(64);
        assert!(verify_copula_axioms(&grid).unwrap().pass);
        let bad = verify_copula_axioms_for(&grid, |u, v| 0.5 * (u + v)).unwrap();
        assert!(!bad.pass);
        assert!(matches!(bad.first_violation, Some(CopulaViolation::Boundary { .. })));
        let product = verify_copula_axioms_for(&grid, |u, v| u * v).unwrap();
        assert!(product.pass);
        assert_eq!(product.rectangles_checked, (64 * 63 / 2) * (64 * 63 / 2));
        // lower Fréchet bound is a copula; a non-2-increasing surface is not
        assert!(verify_copula_axioms_for(&grid, |u, v| (u + v - 1.0).max(0.0)).unwrap().pass);
        let wavy = verify_copula_axioms_for(&grid, |u, v| {
            u * v + 0.2 * (std::f64::consts::PI * u).sin() * (std::f64::consts::PI * v).sin()
        })
        .unwrap();
        assert!(matches!(wavy.first_violation, Some(CopulaViolation::Rectangle { .. })));
    }

    #[test]
    fn copula_grid_validation() {
        assert!(verify_copula_axioms(&[0.0, 1.5]).is_err());
        assert!(verify_copula_axioms(&[0.5, 0.1]).is_err());
    }

    #[test]
    fn separation_examples() {
        let s = residual_supports_separated(&exp(1.0), &exp(2.0)).unwrap();
        assert!(s.separated);
        assert!((s.split_point.unwrap() - CROSS).abs() < 1e-11);
        let d = exp(1.4);
        let s = residual_supports_separated(&d, &d).unwrap();
        assert!(s.separated && s.split_point.is_none());
        let nak = GainDistribution::nakagami_gain(2.0, 1.0).unwrap();
        assert!(!residual_supports_separated(&exp(1.0), &nak).unwrap().separated);
    }

    #[test]
    fn separation_agrees_with_order() {
        let family = [
            exp(0.5),
            exp(1.0),
            exp(2.5),
            GainDistribution::nakagami_gain(0.5, 1.0).unwrap(),
            GainDistribution::nakagami_gain(2.0, 1.0).unwrap(),
            GainDistribution::nakagami_gain(1.0, 3.0).unwrap(),
            GainDistribution::nakagami_gain(3.0, 3.0).unwrap(),
            GainDistribution::build_ratio(1.0, 0.1, 1.0).unwrap(),
        ];
        for a in &family {
            for b in &family {
                let sep = residual_supports_separated(a, b).unwrap().separated;
                let ord = check_usual_order_default(a, b).unwrap().first_leq();
                assert_eq!(sep, ord, "{a:?} vs {b:?}");
            }
        }
    }
}
