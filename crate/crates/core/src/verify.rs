//! Monte Carlo checks of the coupling constructions and the rate
//! evaluators.
//!
//! Every check owns a ChaCha8 stream seeded from `(master seed, test id)`,
//! so a report is reproducible from the seed it records.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::capacity::{c_unchecked, ergodic_rate, RateMethod, RateValue};
use crate::classifier::{Dependence, IcScenario};
use crate::coupling::{comonotone_sample, MaximalCouplingSpec};
use crate::distributions::GainDistribution;
use crate::error::{invalid, Error, Result};

/// Asymptotic one-sample KS coefficient at the 1% level.
pub const KS_COEFFICIENT_1PCT: f64 = 1.628;

pub const DEFAULT_MC_RATE_SAMPLES: usize = 1_000_000;
pub const DEFAULT_SUITE_SAMPLES: usize = 100_000;
pub const MIN_RATE_SAMPLES: usize = 10_000;

/// `1.628 / √n`.
pub fn ks_critical_value_1pct(n: usize) -> f64 {
    KS_COEFFICIENT_1PCT / (n as f64).sqrt()
}

/// `1.5 · √(ln(2/0.01) / (2n))`.
pub fn dkw_threshold(n: usize) -> f64 {
    1.5 * ((2.0f64 / 0.01).ln() / (2.0 * n as f64)).sqrt()
}

/// Seed of the stream owned by `test_id` under `master`.
pub fn derive_seed(master: u64, test_id: &str) -> u64 {
    // FNV-1a of the id, then a splitmix64 finalizer over the combination.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in test_id.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = master ^ h.rotate_left(17);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform on the open interval `(0, 1)`.
fn open_uniform(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            return u;
        }
    }
}

/// `sup_x |F_n(x) - F(x)|` for the empirical CDF `F_n` of `samples`.
///
/// Both one-sided limits are compared at every distinct sample value and at
/// every atom of `d`, which gives the exact supremum for continuous and
/// discrete `d` alike.
pub fn ks_statistic(samples: &[f64], d: &GainDistribution) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(invalid("samples", "contains NaN"));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut stat: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let x = xs[i];
        let mut j = i;
        while j < xs.len() && xs[j] == x {
            j += 1;
        }
        stat = stat
            .max((j as f64 / n - d.cdf(x)).abs())
            .max((i as f64 / n - d.cdf_left(x)).abs());
        i = j;
    }
    for (a, _) in d.atoms() {
        let below = xs.partition_point(|&x| x < a) as f64 / n;
        let upto = xs.partition_point(|&x| x <= a) as f64 / n;
        stat = stat.max((upto - d.cdf(a)).abs()).max((below - d.cdf_left(a)).abs());
    }
    Ok(stat)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub sample_size: usize,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
    pub seed: u64,
    /// Negative controls are expected to fail.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub negative_control: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl VerificationReport {
    fn new(name: impl Into<String>, sample_size: usize, statistic: f64, threshold: f64, seed: u64) -> Self {
        Self {
            name: name.into(),
            sample_size,
            statistic,
            threshold,
            pass: statistic <= threshold,
            seed,
            negative_control: false,
            note: None,
        }
    }

    fn negative(mut self) -> Self {
        self.negative_control = true;
        self
    }

    /// Whether the outcome is the expected one: a pass for positive checks,
    /// a failure for negative controls.
    pub fn as_expected(&self) -> bool {
        self.pass != self.negative_control
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Maximal,
    Comonotone,
    /// Maximal coupling with the residual densities swapped.
    CorruptedMaximal,
}

impl Construction {
    fn label(self) -> &'static str {
        match self {
            Construction::Maximal => "maximal",
            Construction::Comonotone => "comonotone",
            Construction::CorruptedMaximal => "corrupted_maximal",
        }
    }
}

/// Draws `n` coupled pairs and KS-tests each marginal against its source
/// at the 1% level.
pub fn verify_same_marginals(
    construction: Construction,
    d1: &GainDistribution,
    d2: &GainDistribution,
    n: usize,
    seed: u64,
) -> Result<(VerificationReport, VerificationReport)> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let mut rng = rng_for(seed);
    let mut h1 = Vec::with_capacity(n);
    let mut h2 = Vec::with_capacity(n);
    match construction {
        Construction::Comonotone => {
            for _ in 0..n {
                let s = comonotone_sample(d1, d2, open_uniform(&mut rng));
                h1.push(s.h1);
                h2.push(s.h2);
            }
        }
        Construction::Maximal | Construction::CorruptedMaximal => {
            let spec = MaximalCouplingSpec::new(d1.clone(), d2.clone())?;
            for _ in 0..n {
                let (a, b) = (open_uniform(&mut rng), open_uniform(&mut rng));
                let s = if construction == Construction::Maximal {
                    spec.sample(a, b)
                } else {
                    spec.sample_with_swapped_residuals(a, b)
                };
                h1.push(s.h1);
                h2.push(s.h2);
            }
        }
    }
    let threshold = ks_critical_value_1pct(n);
    let label = construction.label();
    let mut r1 = VerificationReport::new(format!("{label}_marginal_1"), n, ks_statistic(&h1, d1)?, threshold, seed);
    let mut r2 = VerificationReport::new(format!("{label}_marginal_2"), n, ks_statistic(&h2, d2)?, threshold, seed);
    if construction == Construction::CorruptedMaximal {
        r1 = r1.negative();
        r2 = r2.negative();
    }
    Ok((r1, r2))
}

fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        None
    } else {
        Some(sxy / (sxx * syy).sqrt())
    }
}

fn independence_check(s: &IcScenario, n: usize, seed: u64, shared_u: bool) -> Result<VerificationReport> {
    if s.dependence != Dependence::Independent {
        return Err(invalid("dependence", "independence check needs independent gains"));
    }
    if n < 2 {
        return Err(invalid("n", "need at least two samples"));
    }
    let mut rng = rng_for(seed);
    let mut t21 = Vec::with_capacity(n);
    let mut t22 = Vec::with_capacity(n);
    for _ in 0..n {
        let u1 = open_uniform(&mut rng);
        let u2 = if shared_u { u1 } else { open_uniform(&mut rng) };
        t21.push(s.h21.cdf(s.h21.sample(u1)));
        t22.push(s.h22.cdf(s.h22.sample(u2)));
    }
    let threshold = 3.0 / (n as f64).sqrt();
    let name = if shared_u { "strong_ic_independence_shared_u" } else { "strong_ic_independence" };
    let report = match pearson(&t21, &t22) {
        Some(rho) => VerificationReport::new(name, n, rho.abs(), threshold, seed),
        None => {
            let mut r = VerificationReport::new(name, n, 0.0, threshold, seed);
            r.note = Some("zero variance: vacuous pass".into());
            r
        }
    };
    Ok(if shared_u { report.negative() } else { report })
}

/// Rank correlation of the coupled cross gains `(H21', H22')` built from
/// independent uniforms; passes when `|ρ| ≤ 3/√n`.
pub fn verify_strong_ic_independence(s: &IcScenario, n: usize, seed: u64) -> Result<VerificationReport> {
    independence_check(s, n, seed, false)
}

/// Negative control for [`verify_strong_ic_independence`]: both gains reuse
/// one uniform.
pub fn strong_ic_independence_shared_u(s: &IcScenario, n: usize, seed: u64) -> Result<VerificationReport> {
    independence_check(s, n, seed, true)
}

/// Sample mean of `C(h·power)` with its standard error.
pub fn mc_ergodic_rate(d: &GainDistribution, power: f64, n: usize, seed: u64) -> Result<RateValue> {
    if !(power >= 0.0 && power.is_finite()) {
        return Err(invalid("power", format!("must be nonnegative and finite, got {power}")));
    }
    if n < MIN_RATE_SAMPLES {
        return Err(invalid("n", format!("need at least {MIN_RATE_SAMPLES} samples, got {n}")));
    }
    if power == 0.0 {
        return Ok(RateValue {
            bits: 0.0,
            method: RateMethod::MonteCarlo,
            error_estimate: 0.0,
        });
    }
    let mut rng = rng_for(seed);
    let (mut mean, mut m2) = (0.0f64, 0.0f64);
    for k in 1..=n {
        let x = c_unchecked(power * d.sample(open_uniform(&mut rng)));
        let delta = x - mean;
        mean += delta / k as f64;
        m2 += delta * (x - mean);
    }
    let var = m2 / (n - 1) as f64;
    Ok(RateValue {
        bits: mean,
        method: RateMethod::MonteCarlo,
        error_estimate: (var / n as f64).sqrt(),
    })
}

/// `(F1^{-1}(u_i), F2^{-1}(u_j))` for every pair of levels in `grid`.
fn quantile_pairs(d1: &GainDistribution, d2: &GainDistribution, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(grid.len() * grid.len());
    for &u in grid {
        for &v in grid {
            out.push((d1.quantile(u)?, d2.quantile(v)?));
        }
    }
    Ok(out)
}

fn copula_check(
    d1: &GainDistribution,
    d2: &GainDistribution,
    n: usize,
    grid: &[f64],
    seed: u64,
    independent: bool,
) -> Result<VerificationReport> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    if grid.is_empty() {
        return Err(invalid("grid", "needs at least one level"));
    }
    let points = quantile_pairs(d1, d2, grid)?;
    let mut rng = rng_for(seed);
    let mut pairs = Vec::with_capacity(n);
    for _ in 0..n {
        let u = open_uniform(&mut rng);
        let v = if independent { open_uniform(&mut rng) } else { u };
        pairs.push((d1.sample(u), d2.sample(v)));
    }
    let mut stat: f64 = 0.0;
    for &(x, y) in &points {
        let hits = pairs.iter().filter(|(a, b)| *a <= x && *b <= y).count();
        let emp = hits as f64 / n as f64;
        stat = stat.max((emp - d1.cdf(x).min(d2.cdf(y))).abs());
    }
    let name = if independent { "copula_equivalence_independent" } else { "copula_equivalence" };
    let r = VerificationReport::new(name, n, stat, dkw_threshold(n), seed);
    Ok(if independent { r.negative() } else { r })
}

/// Compares the empirical joint CDF of comonotone samples with
/// `min{F1, F2}` at the quantile pairs of `grid`.
pub fn verify_copula_equivalence(
    d1: &GainDistribution,
    d2: &GainDistribution,
    n: usize,
    grid: &[f64],
    seed: u64,
) -> Result<VerificationReport> {
    copula_check(d1, d2, n, grid, seed, false)
}

/// Negative control for [`verify_copula_equivalence`]: independent uniforms.
pub fn copula_equivalence_independent(
    d1: &GainDistribution,
    d2: &GainDistribution,
    n: usize,
    grid: &[f64],
    seed: u64,
) -> Result<VerificationReport> {
    copula_check(d1, d2, n, grid, seed, true)
}

/// Interior levels `i/(m+1)`, `i = 1..=m`.
pub fn interior_levels(m: usize) -> Vec<f64> {
    (1..=m).map(|i| i as f64 / (m + 1) as f64).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptions {
    pub master_seed: u64,
    pub samples: usize,
    pub include_negative_controls: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            master_seed: 0,
            samples: DEFAULT_SUITE_SAMPLES,
            include_negative_controls: false,
        }
    }
}

/// Runs the full verification suite.
pub fn run_suite(opts: &SuiteOptions) -> Result<Vec<VerificationReport>> {
    let n = opts.samples;
    let seed = |id: &str| derive_seed(opts.master_seed, id);
    let e1 = GainDistribution::exponential(1.0)?;
    let e2 = GainDistribution::exponential(2.0)?;
    let nak = GainDistribution::nakagami_gain(2.0, 1.0)?;
    let ic = IcScenario::exponential([1.0, 2.0, 2.0, 1.0], 1.0, 1.0)?;
    let levels = interior_levels(20);
    let mut out = Vec::new();

    let mut rng = rng_for(seed("ks_self"));
    let own: Vec<f64> = (0..n).map(|_| e1.sample(open_uniform(&mut rng))).collect();
    out.push(VerificationReport::new(
        "ks_self_exponential",
        n,
        ks_statistic(&own, &e1)?,
        ks_critical_value_1pct(n),
        seed("ks_self"),
    ));

    for (id, c, a, b) in [
        ("comonotone_exp", Construction::Comonotone, &e1, &e2),
        ("maximal_exp", Construction::Maximal, &e1, &e2),
        ("maximal_exp_nakagami", Construction::Maximal, &e1, &nak),
    ] {
        let (mut r1, mut r2) = verify_same_marginals(c, a, b, n, seed(id))?;
        r1.name = format!("{id}_marginal_1");
        r2.name = format!("{id}_marginal_2");
        out.push(r1);
        out.push(r2);
    }

    out.push(verify_strong_ic_independence(&ic, n, seed("independence"))?);

    let rate_n = n.max(MIN_RATE_SAMPLES);
    let mc = mc_ergodic_rate(&e1, 1.0, rate_n, seed("mc_rate"))?;
    let exact = ergodic_rate(&e1, 1.0, RateMethod::ClosedForm)?;
    let mut r = VerificationReport::new(
        "mc_rate_vs_closed_form",
        rate_n,
        (mc.bits - exact.bits).abs() / mc.error_estimate,
        3.0,
        seed("mc_rate"),
    );
    r.note = Some("statistic in standard errors".into());
    out.push(r);

    out.push(verify_copula_equivalence(&e1, &e2, n, &levels, seed("copula"))?);

    if opts.include_negative_controls {
        let (r1, r2) = verify_same_marginals(Construction::CorruptedMaximal, &e1, &e2, n, seed("corrupted"))?;
        out.push(r1);
        out.push(r2);
        out.push(strong_ic_independence_shared_u(&ic, n, seed("shared_u"))?);
        out.push(copula_equivalence_independent(&e1, &e2, n, &levels, seed("copula_independent"))?);
    }
    Ok(out)
}

/// True when every positive check passed and every negative control failed.
pub fn suite_ok(reports: &[VerificationReport]) -> bool {
    reports.iter().all(VerificationReport::as_expected)
}
