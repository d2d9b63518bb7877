//! Ergodic rates and the capacity regions attached to each classification.
//!
//! Rates are in bits per channel use with `C(x) = ½·log2(1 + x)`, the same
//! convention for every topology (including the complex-noise interference
//! model).

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::classifier::{classify_ic_strong, classify_ic_very_strong, classify_wtc, require_verdict, ClassifyOptions, IcScenario, WtcScenario};
use crate::distributions::GainDistribution;
use crate::error::{invalid, Error, Result};
use crate::quadrature;
use crate::special::exp_scaled_e1;

/// Absolute accuracy targeted by the quadrature rates.
pub const RATE_TOLERANCE: f64 = 1e-9;

/// Feasibility and vertex-merging tolerance for rate regions.
pub const REGION_TOLERANCE: f64 = 1e-9;

/// `C(x) = ½·log2(1 + x)`.
pub fn c_of(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain {
            function: "C",
            reason: format!("argument must be nonnegative, got {x}"),
        });
    }
    Ok(c_unchecked(x))
}

pub(crate) fn c_unchecked(x: f64) -> f64 {
    0.5 * x.ln_1p() / LN_2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateMethod {
    Quadrature,
    ClosedForm,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateValue {
    pub bits: f64,
    pub method: RateMethod,
    /// Quadrature error bound, or the standard error for Monte Carlo.
    pub error_estimate: f64,
}

fn check_power(power: f64) -> Result<()> {
    if power >= 0.0 && power.is_finite() {
        Ok(())
    } else {
        Err(invalid("power", format!("must be nonnegative and finite, got {power}")))
    }
}

/// `E[ln(1 + P·H)]` for exponential `H` of mean `mean`:
/// `e^{1/(P·mean)} · E1(1/(P·mean))`.
pub fn exponential_log_moment(mean: f64, power: f64) -> f64 {
    if power == 0.0 {
        return 0.0;
    }
    exp_scaled_e1(1.0 / (power * mean)).expect("positive argument")
}

fn exponential_mean(d: &GainDistribution) -> Option<f64> {
    match d {
        GainDistribution::Exponential { mean } => Some(*mean),
        GainDistribution::NakagamiGain { m, w } if *m == 1.0 => Some(*w),
        GainDistribution::RatioExpExp { num_mean, power, .. } if *power == 0.0 => Some(*num_mean),
        _ => None,
    }
}

/// `E[C(offset + power · H)]`.
///
/// Discrete laws are summed exactly; continuous ones use
/// `C(offset) + ∫ power · F̄(h) / (2 ln 2 · (1 + offset + power·h)) dh`.
fn shifted_rate(d: &GainDistribution, offset: f64, power: f64, tol: f64) -> (f64, f64) {
    if !d.is_continuous() {
        let v = d.atoms().iter().map(|(h, p)| p * c_unchecked(offset + power * h)).sum();
        return (v, 0.0);
    }
    let base = c_unchecked(offset);
    if power == 0.0 {
        return (base, 0.0);
    }
    let breaks: Vec<f64> = [0.1, 0.5, 0.9, 0.99, 0.999_999]
        .iter()
        .map(|&u| d.sample(u))
        .collect();
    let scale = 0.5 / LN_2;
    let r = quadrature::integrate_half_line(|h| power * d.ccdf(h) / (1.0 + offset + power * h), &breaks, tol / scale);
    (base + scale * r.value, scale * r.error)
}

/// `E[C(H·power)]`.
///
/// `Quadrature` integrates against the CCDF (discrete laws are summed
/// exactly and tagged `ClosedForm`). `ClosedForm` is available for
/// exponential gains and the discrete families. `MonteCarlo` draws
/// [`crate::verify::DEFAULT_MC_RATE_SAMPLES`] samples with seed 0; use
/// [`crate::verify::mc_ergodic_rate`] to control both.
pub fn ergodic_rate(d: &GainDistribution, power: f64, method: RateMethod) -> Result<RateValue> {
    check_power(power)?;
    if power == 0.0 {
        return Ok(RateValue {
            bits: 0.0,
            method,
            error_estimate: 0.0,
        });
    }
    if !d.is_continuous() {
        if method == RateMethod::MonteCarlo {
            return crate::verify::mc_ergodic_rate(d, power, crate::verify::DEFAULT_MC_RATE_SAMPLES, 0);
        }
        let (bits, _) = shifted_rate(d, 0.0, power, RATE_TOLERANCE);
        return Ok(RateValue {
            bits,
            method: RateMethod::ClosedForm,
            error_estimate: 0.0,
        });
    }
    match method {
        RateMethod::Quadrature => {
            let (bits, err) = shifted_rate(d, 0.0, power, RATE_TOLERANCE);
            Ok(RateValue {
                bits,
                method,
                error_estimate: err,
            })
        }
        RateMethod::ClosedForm => {
            let mean = exponential_mean(d).ok_or_else(|| Error::Domain {
                function: "ergodic_rate",
                reason: format!("no closed form for the {} family", d.family_name()),
            })?;
            Ok(RateValue {
                bits: exponential_log_moment(mean, power) / (2.0 * LN_2),
                method,
                error_estimate: 1e-12,
            })
        }
        RateMethod::MonteCarlo => crate::verify::mc_ergodic_rate(d, power, crate::verify::DEFAULT_MC_RATE_SAMPLES, 0),
    }
}

/// `E[C(X·p1 + Y·p2)]` for independent `X`, `Y`.
///
/// Mass points are split off exactly; a continuous-continuous pair is an
/// outer quadrature over the density of `X` of the inner CCDF integral.
pub fn sum_rate(x: &GainDistribution, p1: f64, y: &GainDistribution, p2: f64) -> Result<RateValue> {
    check_power(p1)?;
    check_power(p2)?;
    let tol = RATE_TOLERANCE;
    let (bits, err) = if !x.is_continuous() {
        x.atoms().iter().fold((0.0, 0.0), |(v, e), (h, p)| {
            let (r, re) = shifted_rate(y, h * p1, p2, tol);
            (v + p * r, e + p * re)
        })
    } else if !y.is_continuous() {
        y.atoms().iter().fold((0.0, 0.0), |(v, e), (h, p)| {
            let (r, re) = shifted_rate(x, h * p2, p1, tol);
            (v + p * r, e + p * re)
        })
    } else if p1 == 0.0 {
        shifted_rate(y, 0.0, p2, tol)
    } else {
        let breaks: Vec<f64> = [0.01, 0.1, 0.5, 0.9, 0.99, 0.999_999]
            .iter()
            .map(|&u| x.sample(u))
            .collect();
        let inner = |h: f64| {
            let f = x.density(h);
            if f == 0.0 || !f.is_finite() {
                return if f.is_finite() { 0.0 } else { f64::MAX };
            }
            f * shifted_rate(y, h * p1, p2, tol * 0.1).0
        };
        let r = quadrature::integrate_half_line(inner, &breaks, tol);
        (r.value, r.error)
    };
    Ok(RateValue {
        bits,
        method: RateMethod::Quadrature,
        error_estimate: err,
    })
}

/// `a1·R1 + a2·R2 ≤ b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateConstraint {
    pub a1: f64,
    pub a2: f64,
    pub b: f64,
}

impl RateConstraint {
    pub fn r1(b: f64) -> Self {
        Self { a1: 1.0, a2: 0.0, b }
    }

    pub fn r2(b: f64) -> Self {
        Self { a1: 0.0, a2: 1.0, b }
    }

    pub fn sum(b: f64) -> Self {
        Self { a1: 1.0, a2: 1.0, b }
    }

    pub fn holds(&self, r1: f64, r2: f64, tol: f64) -> bool {
        self.a1 * r1 + self.a2 * r2 <= self.b + tol
    }
}

/// Bounded polygon `{R1, R2 ≥ 0} ∩ constraints` with its vertices listed
/// counterclockwise starting from the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRegion {
    pub constraints: Vec<RateConstraint>,
    pub vertices: Vec<[f64; 2]>,
    /// Set when the region was computed without a positive classification.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub forced: bool,
}

impl RateRegion {
    pub fn from_constraints(constraints: Vec<RateConstraint>) -> Result<Self> {
        if let Some(c) = constraints.iter().find(|c| !(c.b >= 0.0) || !c.b.is_finite()) {
            return Err(invalid("constraint", format!("bound must be finite and nonnegative, got {}", c.b)));
        }
        if !constraints.iter().any(|c| c.a1 > 0.0) || !constraints.iter().any(|c| c.a2 > 0.0) {
            return Err(invalid("constraints", "region is unbounded"));
        }
        let vertices = enumerate_vertices(&constraints);
        Ok(Self {
            constraints,
            vertices,
            forced: false,
        })
    }

    pub fn contains(&self, r1: f64, r2: f64) -> bool {
        r1 >= -REGION_TOLERANCE
            && r2 >= -REGION_TOLERANCE
            && self.constraints.iter().all(|c| c.holds(r1, r2, REGION_TOLERANCE))
    }

    /// Vertex table with header `R1,R2`.
    pub fn vertices_csv(&self) -> String {
        let mut out = String::from("R1,R2\n");
        for [a, b] in &self.vertices {
            out.push_str(&format!("{a},{b}\n"));
        }
        out
    }
}

fn enumerate_vertices(constraints: &[RateConstraint]) -> Vec<[f64; 2]> {
    let mut lines: Vec<RateConstraint> = constraints.to_vec();
    lines.push(RateConstraint { a1: -1.0, a2: 0.0, b: 0.0 });
    lines.push(RateConstraint { a1: 0.0, a2: -1.0, b: 0.0 });
    let feasible = |r1: f64, r2: f64| {
        r1 >= -REGION_TOLERANCE && r2 >= -REGION_TOLERANCE && constraints.iter().all(|c| c.holds(r1, r2, REGION_TOLERANCE))
    };
    let mut pts: Vec<[f64; 2]> = Vec::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let (p, q) = (lines[i], lines[j]);
            let det = p.a1 * q.a2 - p.a2 * q.a1;
            if det.abs() < 1e-15 {
                continue;
            }
            let r1 = (p.b * q.a2 - p.a2 * q.b) / det;
            let r2 = (p.a1 * q.b - p.b * q.a1) / det;
            if !feasible(r1, r2) {
                continue;
            }
            let clean = |v: f64| if v.abs() <= REGION_TOLERANCE { 0.0 } else { v };
            let v = [clean(r1), clean(r2)];
            if !pts
                .iter()
                .any(|w| (w[0] - v[0]).abs() <= REGION_TOLERANCE && (w[1] - v[1]).abs() <= REGION_TOLERANCE)
            {
                pts.push(v);
            }
        }
    }
    if pts.len() <= 1 {
        return pts;
    }
    let n = pts.len() as f64;
    let cx = pts.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = pts.iter().map(|p| p[1]).sum::<f64>() / n;
    let angle = |p: &[f64; 2]| (p[1] - cy).atan2(p[0] - cx);
    pts.sort_by(|a, b| angle(a).total_cmp(&angle(b)));
    if let Some(origin) = pts.iter().position(|p| p[0] == 0.0 && p[1] == 0.0) {
        pts.rotate_left(origin);
    }
    pts
}

/// `C_j`: the MAC region seen at receiver `j ∈ {1, 2}`.
pub fn mac_constraints(s: &IcScenario, j: usize) -> Result<Vec<RateConstraint>> {
    let (own1, own2) = match j {
        1 => (&s.h11, &s.h12),
        2 => (&s.h21, &s.h22),
        _ => return Err(invalid("receiver", format!("must be 1 or 2, got {j}"))),
    };
    Ok(vec![
        RateConstraint::r1(ergodic_rate(own1, s.p1, RateMethod::Quadrature)?.bits),
        RateConstraint::r2(ergodic_rate(own2, s.p2, RateMethod::Quadrature)?.bits),
        RateConstraint::sum(sum_rate(own1, s.p1, own2, s.p2)?.bits),
    ])
}

/// Ergodic capacity region under strong interference: `C_1 ∩ C_2`.
pub fn strong_ic_region(s: &IcScenario, force: bool) -> Result<RateRegion> {
    strong_ic_region_with(s, &ClassifyOptions::default(), force)
}

pub fn strong_ic_region_with(s: &IcScenario, opts: &ClassifyOptions, force: bool) -> Result<RateRegion> {
    let report = classify_ic_strong(s, opts)?;
    require_verdict(&report, force)?;
    let mut constraints = mac_constraints(s, 1)?;
    constraints.extend(mac_constraints(s, 2)?);
    let mut region = RateRegion::from_constraints(constraints)?;
    region.forced = !report.verdict;
    Ok(region)
}

/// Ergodic capacity region under very strong interference: the rectangle
/// `R1 ≤ E[C(H11 P1)]`, `R2 ≤ E[C(H22 P2)]`.
pub fn very_strong_ic_region(s: &IcScenario, force: bool) -> Result<RateRegion> {
    very_strong_ic_region_with(s, &ClassifyOptions::default(), force)
}

pub fn very_strong_ic_region_with(s: &IcScenario, opts: &ClassifyOptions, force: bool) -> Result<RateRegion> {
    let report = classify_ic_very_strong(s, opts)?;
    require_verdict(&report, force)?;
    let mut region = RateRegion::from_constraints(vec![
        RateConstraint::r1(ergodic_rate(&s.h11, s.p1, RateMethod::Quadrature)?.bits),
        RateConstraint::r2(ergodic_rate(&s.h22, s.p2, RateMethod::Quadrature)?.bits),
    ])?;
    region.forced = !report.verdict;
    Ok(region)
}

/// Ergodic secrecy capacity `E[C(H P)] - E[C(G P)]` of a degraded wiretap
/// channel. The value is not clamped at zero.
pub fn wtc_secrecy_capacity(s: &WtcScenario, force: bool) -> Result<RateValue> {
    wtc_secrecy_capacity_with(s, &ClassifyOptions::default(), force)
}

pub fn wtc_secrecy_capacity_with(s: &WtcScenario, opts: &ClassifyOptions, force: bool) -> Result<RateValue> {
    let report = classify_wtc(s, opts)?;
    require_verdict(&report, force)?;
    let legit = ergodic_rate(&s.legit, s.power, RateMethod::Quadrature)?;
    let eaves = ergodic_rate(&s.eaves, s.power, RateMethod::Quadrature)?;
    let bits = legit.bits - eaves.bits;
    let error_estimate = legit.error_estimate + eaves.error_estimate;
    if report.verdict {
        debug_assert!(bits >= -1e-9, "degraded wiretap channel with negative secrecy rate {bits}");
    }
    Ok(RateValue {
        bits,
        method: legit.method,
        error_estimate,
    })
}
