//! Degradedness certificates for two-user broadcast channels whose fading
//! gains are k-th order finite-state Markov chains.
//!
//! A k-th order chain over `N` state values is handled through its
//! super-states: the `N^k` tuples of consecutive states, numbered `1..=N^k`
//! in lexicographic order. Row `l` of the transition matrix is the law of
//! the next super-state given super-state `l`.
//!
//! Probabilities may be given as JSON numbers or as fraction strings such
//! as `"3/8"`; when every entry of a table is a fraction the checks on that
//! table run in exact rational arithmetic.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use rand::Rng;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};

/// Row-sum and comparison tolerance for floating-point tables.
pub const MARKOV_TOLERANCE: f64 = 1e-12;

/// Largest denominator kept in exact form; larger fractions fall back to
/// floating point so tail sums cannot overflow.
const MAX_EXACT_DENOM: i64 = 1 << 20;

/// A probability with an optional exact value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prob {
    pub value: f64,
    pub exact: Option<Rational64>,
}

impl Prob {
    pub fn float(value: f64) -> Self {
        Self { value, exact: None }
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        let r = Rational64::new(num, den);
        Self {
            value: *r.numer() as f64 / *r.denom() as f64,
            exact: Some(r),
        }
    }

    fn from_rational(r: Rational64) -> Self {
        if r.denom().abs() > MAX_EXACT_DENOM || r.numer().abs() > MAX_EXACT_DENOM {
            Self::float(*r.numer() as f64 / *r.denom() as f64)
        } else {
            Self::ratio(*r.numer(), *r.denom())
        }
    }
}

impl From<f64> for Prob {
    fn from(value: f64) -> Self {
        Self::float(value)
    }
}

impl Serialize for Prob {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.exact {
            Some(r) if *r.denom() == 1 => s.serialize_i64(*r.numer()),
            Some(r) => s.serialize_str(&format!("{}/{}", r.numer(), r.denom())),
            None => s.serialize_f64(self.value),
        }
    }
}

impl<'de> Deserialize<'de> for Prob {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct ProbVisitor;

        impl<'de> Visitor<'de> for ProbVisitor {
            type Value = Prob;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a probability as a number or a fraction string like \"3/8\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Prob, E> {
                Ok(Prob::float(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Prob, E> {
                Ok(Prob::ratio(v, 1))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Prob, E> {
                i64::try_from(v).map(|v| Prob::ratio(v, 1)).map_err(E::custom)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Prob, E> {
                let t = v.trim();
                if let Ok(r) = Rational64::from_str(t) {
                    return Ok(Prob::from_rational(r));
                }
                t.parse::<f64>()
                    .map(Prob::float)
                    .map_err(|_| E::custom(format!("cannot parse probability {v:?}")))
            }
        }

        d.deserialize_any(ProbVisitor)
    }
}

/// Tail sums of one probability row, exact when every entry is exact.
#[derive(Debug, Clone, PartialEq)]
enum Tails {
    Exact(Vec<Rational64>),
    Float(Vec<f64>),
}

impl Tails {
    /// Entry `n - 1` is `Σ_{j > n} row[j - 1]`.
    fn of(row: &[Prob]) -> Self {
        if let Some(exact) = row.iter().map(|p| p.exact).collect::<Option<Vec<_>>>() {
            let mut out = vec![Rational64::from_integer(0); row.len()];
            for n in (0..row.len().saturating_sub(1)).rev() {
                out[n] = out[n + 1] + exact[n + 1];
            }
            Tails::Exact(out)
        } else {
            let mut out = vec![0.0; row.len()];
            for n in (0..row.len().saturating_sub(1)).rev() {
                out[n] = out[n + 1] + row[n + 1].value;
            }
            Tails::Float(out)
        }
    }

    fn floats(&self) -> Vec<f64> {
        match self {
            Tails::Exact(v) => v.iter().map(|r| *r.numer() as f64 / *r.denom() as f64).collect(),
            Tails::Float(v) => v.clone(),
        }
    }

    /// 1-based indices `n` where `self(n) > other(n)`.
    fn violations(&self, other: &Tails) -> Vec<usize> {
        match (self, other) {
            (Tails::Exact(a), Tails::Exact(b)) => (0..a.len()).filter(|&i| a[i] > b[i]).map(|i| i + 1).collect(),
            _ => {
                let (a, b) = (self.floats(), other.floats());
                (0..a.len())
                    .filter(|&i| a[i] > b[i] + MARKOV_TOLERANCE)
                    .map(|i| i + 1)
                    .collect()
            }
        }
    }

    fn is_exact(&self) -> bool {
        matches!(self, Tails::Exact(_))
    }
}

fn row_sum_ok(row: &[Prob]) -> bool {
    match row.iter().map(|p| p.exact).collect::<Option<Vec<_>>>() {
        Some(exact) => exact.into_iter().sum::<Rational64>() == Rational64::from_integer(1),
        None => (row.iter().map(|p| p.value).sum::<f64>() - 1.0).abs() <= MARKOV_TOLERANCE,
    }
}

fn check_stochastic(name: &'static str, rows: &[Vec<Prob>], width: usize) -> Result<()> {
    for (i, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(Error::Shape(format!(
                "{name}: row {} has {} entries, expected {width}",
                i + 1,
                row.len()
            )));
        }
        if let Some(p) = row.iter().find(|p| !(p.value >= 0.0 && p.value <= 1.0)) {
            return Err(invalid(name, format!("row {} has entry {} outside [0, 1]", i + 1, p.value)));
        }
        if !row_sum_ok(row) {
            let sum: f64 = row.iter().map(|p| p.value).sum();
            return Err(invalid(name, format!("row {} sums to {sum}", i + 1)));
        }
    }
    Ok(())
}

/// One k-th order Markov fading process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct MarkovChannelSpec {
    pub k: usize,
    /// Strictly increasing state values.
    pub states: Vec<f64>,
    /// `N^k × N^k` super-state transition matrix.
    pub matrix: Vec<Vec<Prob>>,
    /// Law of `H(0)` over the `N` states.
    pub initial: Vec<Prob>,
    /// `early_conditionals[m - 1]` is the `N^m × N` table of
    /// `[H(m) | H(0..m)]`, rows in lexicographic order of the history.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub early_conditionals: Vec<Vec<Vec<Prob>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    k: usize,
    states: Vec<f64>,
    matrix: Vec<Vec<Prob>>,
    initial: Vec<Prob>,
    #[serde(default)]
    early_conditionals: Option<Vec<Vec<Vec<Prob>>>>,
}

impl TryFrom<RawSpec> for MarkovChannelSpec {
    type Error = Error;

    fn try_from(r: RawSpec) -> Result<Self> {
        Self::new(r.k, r.states, r.matrix, r.initial, r.early_conditionals.unwrap_or_default())
    }
}

fn pow(n: usize, k: usize) -> Result<usize> {
    u32::try_from(k)
        .ok()
        .and_then(|k| n.checked_pow(k))
        .ok_or_else(|| invalid("k", "N^k overflows"))
}

impl MarkovChannelSpec {
    pub fn new(
        k: usize,
        states: Vec<f64>,
        matrix: Vec<Vec<Prob>>,
        initial: Vec<Prob>,
        early_conditionals: Vec<Vec<Vec<Prob>>>,
    ) -> Result<Self> {
        let spec = Self {
            k,
            states,
            matrix,
            initial,
            early_conditionals,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Builds a spec from floating-point tables.
    pub fn from_f64(k: usize, states: Vec<f64>, matrix: Vec<Vec<f64>>, initial: Vec<f64>) -> Result<Self> {
        let conv = |row: Vec<f64>| row.into_iter().map(Prob::float).collect::<Vec<_>>();
        Self::new(k, states, matrix.into_iter().map(conv).collect(), conv(initial), Vec::new())
    }

    pub fn with_early_conditionals(mut self, early: Vec<Vec<Vec<Prob>>>) -> Result<Self> {
        self.early_conditionals = early;
        self.validate()?;
        Ok(self)
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn n_super_states(&self) -> usize {
        self.matrix.len()
    }

    pub fn is_exact(&self) -> bool {
        self.matrix.iter().flatten().all(|p| p.exact.is_some())
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(invalid("k", "order must be at least 1"));
        }
        let n = self.states.len();
        if n == 0 {
            return Err(invalid("states", "at least one state is required"));
        }
        if self.states.iter().any(|v| !v.is_finite()) || self.states.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("states", "values must be finite and strictly increasing"));
        }
        let size = pow(n, self.k)?;
        if self.matrix.len() != size {
            return Err(Error::Shape(format!(
                "matrix has {} rows, expected N^k = {size}",
                self.matrix.len()
            )));
        }
        check_stochastic("matrix", &self.matrix, size)?;
        if self.k >= 2 {
            for (l, row) in self.matrix.iter().enumerate() {
                for (j, p) in row.iter().enumerate() {
                    // suffix of row state must equal prefix of column state
                    if l % (size / n) != j / n && p.value != 0.0 {
                        return Err(invalid(
                            "matrix",
                            format!(
                                "entry ({}, {}) must be zero: super-states {:?} and {:?} do not overlap",
                                l + 1,
                                j + 1,
                                super_state_unchecked(l, self.k, n),
                                super_state_unchecked(j, self.k, n)
                            ),
                        ));
                    }
                }
            }
        }
        if self.initial.len() != n {
            return Err(Error::Shape(format!(
                "initial has {} entries, expected N = {n}",
                self.initial.len()
            )));
        }
        check_stochastic("initial", std::slice::from_ref(&self.initial), n)?;
        if self.early_conditionals.len() > self.k {
            return Err(Error::Shape(format!(
                "{} early conditional tables supplied, at most k = {} allowed",
                self.early_conditionals.len(),
                self.k
            )));
        }
        for (i, table) in self.early_conditionals.iter().enumerate() {
            let rows = pow(n, i + 1)?;
            if table.len() != rows {
                return Err(Error::Shape(format!(
                    "early conditional table for m = {} has {} rows, expected N^m = {rows}",
                    i + 1,
                    table.len()
                )));
            }
            check_stochastic("early_conditionals", table, n)?;
        }
        Ok(())
    }

    /// State values of super-state `l` (1-based).
    pub fn super_state_values(&self, l: usize) -> Result<Vec<f64>> {
        Ok(super_state(l, self.k, self.n_states())?
            .into_iter()
            .map(|i| self.states[i])
            .collect())
    }

    /// Law of the next single state given super-state `l` (0-based): the
    /// row marginalized onto the last coordinate.
    fn next_state_row(&self, l: usize) -> Vec<Prob> {
        let n = self.n_states();
        let row = &self.matrix[l];
        match row.iter().map(|p| p.exact).collect::<Option<Vec<_>>>() {
            Some(exact) => {
                let mut out = vec![Rational64::from_integer(0); n];
                for (j, r) in exact.into_iter().enumerate() {
                    out[j % n] += r;
                }
                out.into_iter().map(Prob::from_rational).collect()
            }
            None => {
                let mut out = vec![0.0; n];
                for (j, p) in row.iter().enumerate() {
                    out[j % n] += p.value;
                }
                out.into_iter().map(Prob::float).collect()
            }
        }
    }

    /// Table of `[H(m) | H(0..m)]` for `m ≤ k`: supplied, or derived from
    /// the matrix when `m = k`.
    fn conditional_table(&self, m: usize) -> Option<Vec<Vec<Prob>>> {
        if let Some(t) = self.early_conditionals.get(m - 1) {
            return Some(t.clone());
        }
        (m == self.k).then(|| (0..self.n_super_states()).map(|l| self.next_state_row(l)).collect())
    }
}

fn super_state_unchecked(l0: usize, k: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    let mut rest = l0;
    for slot in out.iter_mut().rev() {
        *slot = rest % n;
        rest /= n;
    }
    out
}

/// 0-based state indices of super-state `l` (1-based), most distant state
/// first.
pub fn super_state(l: usize, k: usize, n: usize) -> Result<Vec<usize>> {
    let size = pow(n, k)?;
    if k == 0 || n == 0 {
        return Err(invalid("k", "k and N must be at least 1"));
    }
    if l == 0 || l > size {
        return Err(invalid("l", format!("must lie in 1..={size}, got {l}")));
    }
    Ok(super_state_unchecked(l - 1, k, n))
}

/// Inverse of [`super_state`].
pub fn super_state_index(tuple: &[usize], n: usize) -> Result<usize> {
    if tuple.is_empty() {
        return Err(invalid("tuple", "must be nonempty"));
    }
    let mut l = 0usize;
    for &i in tuple {
        if i >= n {
            return Err(invalid("tuple", format!("state index {i} out of range for N = {n}")));
        }
        l = l * n + i;
    }
    Ok(l + 1)
}

/// `N^k × N^k` tail-sum matrix: entry `(l, n)` is `Σ_{j>n} P[l][j]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CcdfMatrix {
    pub values: Vec<Vec<f64>>,
    #[serde(skip)]
    pub exact: Option<Vec<Vec<Rational64>>>,
}

pub fn ccdf_matrix(spec: &MarkovChannelSpec) -> CcdfMatrix {
    let tails: Vec<Tails> = spec.matrix.iter().map(|r| Tails::of(r)).collect();
    let exact = tails
        .iter()
        .map(|t| match t {
            Tails::Exact(v) => Some(v.clone()),
            Tails::Float(_) => None,
        })
        .collect();
    CcdfMatrix {
        values: tails.iter().map(Tails::floats).collect(),
        exact,
    }
}

/// Pairs `(l, s)` (1-based) whose super-states compare element-wise `≤`.
pub fn comparable_pairs(k: usize, n: usize) -> Vec<(usize, usize)> {
    let Ok(size) = pow(n, k) else { return Vec::new() };
    if k == 0 || n == 0 {
        return Vec::new();
    }
    let tuples: Vec<Vec<usize>> = (0..size).map(|l| super_state_unchecked(l, k, n)).collect();
    let mut out = Vec::new();
    for l in 0..size {
        for s in 0..size {
            if tuples[l].iter().zip(&tuples[s]).all(|(a, b)| a <= b) {
                out.push((l + 1, s + 1));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionStatus {
    Satisfied,
    Violated,
    Unverified,
}

/// A failed comparison: row `l` of the weak chain against row `s` of the
/// strong chain at tail index `n`, all 1-based. Rows are history indices
/// for the early conditions and `1` for the initial condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkovWitness {
    pub l: usize,
    pub s: usize,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub condition: String,
    pub status: ConditionStatus,
    /// Comparisons were made in exact rational arithmetic.
    pub exact: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<MarkovWitness>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkovVerdict {
    Degraded,
    NotDegraded,
    /// No condition failed but at least one could not be checked.
    Conditional,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovCertificate {
    pub verdict: MarkovVerdict,
    /// The user whose fading process is stochastically smaller.
    pub degraded_user: usize,
    pub conditions: Vec<ConditionResult>,
    pub weak_indecomposable: bool,
    pub strong_indecomposable: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl MarkovCertificate {
    pub fn is_degraded(&self) -> bool {
        self.verdict == MarkovVerdict::Degraded
    }
}

const MAX_WITNESSES: usize = 8;

/// Compares every `(l, s)` in `pairs` and collects violations.
fn compare_rows(
    name: String,
    weak: &[Vec<Prob>],
    strong: &[Vec<Prob>],
    pairs: &[(usize, usize)],
) -> ConditionResult {
    let wt: Vec<Tails> = weak.iter().map(|r| Tails::of(r)).collect();
    let st: Vec<Tails> = strong.iter().map(|r| Tails::of(r)).collect();
    let mut witnesses = Vec::new();
    let mut exact = true;
    for &(l, s) in pairs {
        let (a, b) = (&wt[l - 1], &st[s - 1]);
        exact &= a.is_exact() && b.is_exact();
        for n in a.violations(b) {
            if witnesses.len() < MAX_WITNESSES {
                witnesses.push(MarkovWitness { l, s, n });
            }
        }
    }
    ConditionResult {
        condition: name,
        status: if witnesses.is_empty() {
            ConditionStatus::Satisfied
        } else {
            ConditionStatus::Violated
        },
        exact,
        witnesses,
    }
}

/// Checks that `weak` (user 1) is a degraded version of `strong` (user 2):
///
/// 1. `H1(0) ≤st H2(0)`;
/// 2. for `1 ≤ m ≤ k`, `[H1(m) | h1(0..m)] ≤st [H2(m) | h2(0..m)]` whenever
///    `h1(j) ≤ h2(j)` for all `j < m`;
/// 3. tail sums of weak row `l` are at most those of strong row `s` for
///    every comparable super-state pair `(l, s)`.
///
/// The `m = k` tables come from the transition matrices; for `m < k` they
/// must be supplied, otherwise the verdict is at most `Conditional`.
pub fn check_markov_degraded(weak: &MarkovChannelSpec, strong: &MarkovChannelSpec) -> Result<MarkovCertificate> {
    if weak.k != strong.k || weak.n_states() != strong.n_states() {
        return Err(Error::Shape(format!(
            "chains differ in shape: (k, N) = ({}, {}) vs ({}, {})",
            weak.k,
            weak.n_states(),
            strong.k,
            strong.n_states()
        )));
    }
    if weak.states != strong.states {
        return Err(Error::Shape("chains must share the same state values".into()));
    }
    let (k, n) = (weak.k, weak.n_states());
    let mut conditions = vec![compare_rows(
        "initial".into(),
        std::slice::from_ref(&weak.initial),
        std::slice::from_ref(&strong.initial),
        &[(1, 1)],
    )];
    let mut notes = Vec::new();
    for m in 1..=k {
        let name = format!("early_m{m}");
        match (weak.conditional_table(m), strong.conditional_table(m)) {
            (Some(w), Some(s)) => {
                conditions.push(compare_rows(name, &w, &s, &comparable_pairs(m, n)));
                if m == k && weak.early_conditionals.len() == k {
                    notes.push(format!("m = {k} tables taken from the supplied early conditionals"));
                }
            }
            _ => {
                notes.push(format!("conditional laws for m = {m} were not supplied"));
                conditions.push(ConditionResult {
                    condition: name,
                    status: ConditionStatus::Unverified,
                    exact: false,
                    witnesses: Vec::new(),
                });
            }
        }
    }
    conditions.push(compare_rows(
        "transition".into(),
        &weak.matrix,
        &strong.matrix,
        &comparable_pairs(k, n),
    ));
    let verdict = if conditions.iter().any(|c| c.status == ConditionStatus::Violated) {
        MarkovVerdict::NotDegraded
    } else if conditions.iter().any(|c| c.status == ConditionStatus::Unverified) {
        MarkovVerdict::Conditional
    } else {
        MarkovVerdict::Degraded
    };
    let weak_indecomposable = check_indecomposable(weak);
    let strong_indecomposable = check_indecomposable(strong);
    if !(weak_indecomposable && strong_indecomposable) {
        notes.push("a chain failed the positive-column indecomposability test".into());
    }
    Ok(MarkovCertificate {
        verdict,
        degraded_user: 1,
        conditions,
        weak_indecomposable,
        strong_indecomposable,
        notes,
    })
}

/// Smallest `t ≤ M(M-1)+1` (with `M = N^k`) for which `P^t` has a column
/// of strictly positive entries.
pub fn indecomposability_power(spec: &MarkovChannelSpec) -> Option<usize> {
    let m = spec.n_super_states();
    let adj: Vec<Vec<bool>> = spec
        .matrix
        .iter()
        .map(|r| r.iter().map(|p| p.value > 0.0).collect())
        .collect();
    let bound = m * (m - 1) + 1;
    let mut cur = adj.clone();
    for t in 1..=bound {
        if (0..m).any(|j| (0..m).all(|i| cur[i][j])) {
            return Some(t);
        }
        let next: Vec<Vec<bool>> = (0..m)
            .map(|i| (0..m).map(|j| (0..m).any(|r| cur[i][r] && adj[r][j])).collect())
            .collect();
        if next == cur {
            return None;
        }
        cur = next;
    }
    None
}

pub fn check_indecomposable(spec: &MarkovChannelSpec) -> bool {
    indecomposability_power(spec).is_some()
}

/// Stationary law over super-states, by iterating the lazy chain.
pub fn stationary_super_state(spec: &MarkovChannelSpec) -> Vec<f64> {
    let m = spec.n_super_states();
    let mut pi = vec![1.0 / m as f64; m];
    for _ in 0..100_000 {
        let mut next = vec![0.0; m];
        for (i, row) in spec.matrix.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                next[j] += pi[i] * p.value;
            }
        }
        let lazy: Vec<f64> = pi.iter().zip(&next).map(|(a, b)| 0.5 * (a + b)).collect();
        let change: f64 = lazy.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        pi = lazy;
        if change < 1e-15 {
            break;
        }
    }
    pi
}

/// Stationary occupancy of the single states (last super-state coordinate).
pub fn stationary_distribution(spec: &MarkovChannelSpec) -> Vec<f64> {
    let n = spec.n_states();
    let mut out = vec![0.0; n];
    for (l, p) in stationary_super_state(spec).into_iter().enumerate() {
        out[l % n] += p;
    }
    out
}

/// Generalized inverse of a law given by its tail sums, evaluated at `u`:
/// the number of indices whose tail exceeds `1 - u`. Pointwise smaller
/// tails give a pointwise smaller index for the same `u`.
fn inverse_from_tails(tails: &[f64], u: f64) -> usize {
    let v = 1.0 - u;
    tails.iter().filter(|&&t| t > v).count()
}

/// Per-step sampler state for one chain.
struct Walker<'a> {
    spec: &'a MarkovChannelSpec,
    initial: Vec<f64>,
    early: Vec<Vec<Vec<f64>>>,
    next: Vec<Vec<f64>>,
}

impl<'a> Walker<'a> {
    fn new(spec: &'a MarkovChannelSpec) -> Result<Self> {
        if spec.early_conditionals.len() + 1 < spec.k {
            return Err(invalid(
                "early_conditionals",
                format!("simulation needs conditional laws for m = 1..{}", spec.k - 1),
            ));
        }
        let tails = |rows: &[Vec<Prob>]| rows.iter().map(|r| Tails::of(r).floats()).collect::<Vec<_>>();
        let next_rows: Vec<Vec<Prob>> = (0..spec.n_super_states()).map(|l| spec.next_state_row(l)).collect();
        Ok(Self {
            spec,
            initial: Tails::of(&spec.initial).floats(),
            early: spec.early_conditionals[..spec.k - 1].iter().map(|t| tails(t)).collect(),
            next: tails(&next_rows),
        })
    }

    /// Next state index given the path so far and a uniform.
    fn step(&self, path: &[usize], u: f64) -> usize {
        let (k, n) = (self.spec.k, self.spec.n_states());
        let m = path.len();
        if m == 0 {
            return inverse_from_tails(&self.initial, u);
        }
        let (table, history) = if m < k {
            (&self.early[m - 1], path)
        } else {
            (&self.next, &path[m - k..])
        };
        let row = history.iter().fold(0, |acc, &i| acc * n + i);
        inverse_from_tails(&table[row], u)
    }
}

/// One path of `steps` state indices.
pub fn simulate_path<R: Rng + ?Sized>(spec: &MarkovChannelSpec, steps: usize, rng: &mut R) -> Result<Vec<usize>> {
    let walker = Walker::new(spec)?;
    let mut path = Vec::with_capacity(steps);
    for _ in 0..steps {
        let u: f64 = rng.gen();
        let next = walker.step(&path, u);
        path.push(next);
    }
    Ok(path)
}

/// Coupled weak and strong paths, as state values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathPair {
    pub weak: Vec<f64>,
    pub strong: Vec<f64>,
}

impl PathPair {
    /// Whether `weak(m) ≤ strong(m)` at every step.
    pub fn ordered(&self) -> bool {
        self.weak.iter().zip(&self.strong).all(|(a, b)| a <= b)
    }
}

/// Both chains driven by one shared uniform per step through their
/// conditional generalized inverses. Refuses a pair without a `Degraded`
/// certificate unless `force` is set.
pub fn coupled_paths<R: Rng + ?Sized>(
    weak: &MarkovChannelSpec,
    strong: &MarkovChannelSpec,
    steps: usize,
    rng: &mut R,
    force: bool,
) -> Result<PathPair> {
    let cert = check_markov_degraded(weak, strong)?;
    if !cert.is_degraded() && !force {
        return Err(Error::Unclassified(format!(
            "Markov pair is {:?}; coupled paths need a degraded certificate",
            cert.verdict
        )));
    }
    let (w, s) = (Walker::new(weak)?, Walker::new(strong)?);
    let (mut pw, mut ps) = (Vec::with_capacity(steps), Vec::with_capacity(steps));
    for _ in 0..steps {
        let u: f64 = rng.gen();
        let a = w.step(&pw, u);
        let b = s.step(&ps, u);
        pw.push(a);
        ps.push(b);
    }
    Ok(PathPair {
        weak: pw.into_iter().map(|i| weak.states[i]).collect(),
        strong: ps.into_iter().map(|i| strong.states[i]).collect(),
    })
}
