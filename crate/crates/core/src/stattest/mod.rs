//! One- and two-sample tests built on generalized spacing statistics.
//!
//! Null distributions are prepared once per configuration (`TwoSampleTest`,
//! `OneSampleTest`) and then evaluated on many samples; the free functions
//! `two_sample_test` and `one_sample_test` do both steps for a single call.

pub mod baselines;
mod null_cdf;

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::moments::{continuous_moments, discrete_moments, statistic_scale, StatisticSpec, WeightVector};
use crate::numeric::{format_rational, rational_to_f64};
use crate::oracle::{exact_pmf, seeded_rng, DEFAULT_PMF_CAP};
use crate::reconstruct::{reconstruct_cdf, CdfEstimate};

pub use null_cdf::{CdfTable, NullCdfSpec};

/// Default moment count for discrete (two-sample) reconstructions.
pub const DEFAULT_DISCRETE_MOMENTS: usize = 400;
/// Default moment count for continuous (one-sample) reconstructions; the
/// generic certificate is then `12 / 1201`.
pub const DEFAULT_CONTINUOUS_MOMENTS: usize = 1200;
/// Largest packed series size `(2n+1)(2M+1)` the automatic method selection
/// hands to the exact-moment engine.
pub const EXACT_MOMENTS_WORKLOAD_CAP: u64 = 1 << 22;
/// Below this many bins a CLT p-value carries a warning.
pub const CLT_MIN_BINS: usize = 20;

const ASSUMED_DENSITY_BOUND: &str =
    "certified_error assumes f_sup + 2 f'_sup + 2 <= 12 for the normalized null density; \
     sharply peaked nulls can exceed it";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Left,
    Right,
    TwoSided,
}

impl Side {
    /// Combines one-sided tail probabilities; two-sided is `min(1, 2 min)`.
    pub fn combine(self, left: f64, right: f64) -> f64 {
        let p = match self {
            Side::Left => left,
            Side::Right => right,
            Side::TwoSided => 2.0 * left.min(right),
        };
        p.clamp(0.0, 1.0)
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "left" | "less" => Ok(Side::Left),
            "right" | "greater" => Ok(Side::Right),
            "two-sided" | "two_sided" | "both" => Ok(Side::TwoSided),
            other => Err(Error::InvalidArgument(format!("unknown side {other:?}"))),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::TwoSided => "two-sided",
        })
    }
}

/// How a p-value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactMoments,
    Clt,
    OraclePmf,
    /// Classical large-sample approximation (baseline tests).
    Asymptotic,
    /// Exact finite-sample null law (baseline tests).
    ExactDistribution,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ExactMoments => "exact-moments",
            Method::Clt => "clt",
            Method::OraclePmf => "oracle-pmf",
            Method::Asymptotic => "asymptotic",
            Method::ExactDistribution => "exact-distribution",
        })
    }
}

/// Requested method for the two-sample spacing test.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodChoice {
    #[default]
    Auto,
    ExactMoments,
    Clt,
    OraclePmf,
}

impl FromStr for MethodChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "auto" => Ok(MethodChoice::Auto),
            "exact-moments" | "exact_moments" | "moments" => Ok(MethodChoice::ExactMoments),
            "clt" => Ok(MethodChoice::Clt),
            "oracle-pmf" | "oracle_pmf" | "oracle" => Ok(MethodChoice::OraclePmf),
            other => Err(Error::InvalidArgument(format!("unknown method {other:?}"))),
        }
    }
}

/// Outcome of one hypothesis test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub test: String,
    pub raw_statistic: f64,
    /// Exact value as a lowest-terms rational, when available.
    pub exact_statistic: Option<String>,
    pub normalized_statistic: f64,
    pub p_value: f64,
    pub side: Side,
    pub method: Method,
    pub moments_used: usize,
    pub certified_error: f64,
    pub alpha: f64,
    pub reject: bool,
    pub seed: u64,
    pub warnings: Vec<String>,
}

/// Bin counts (two-sample) or gaps (one-sample).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpacingVector {
    Counts(Vec<u64>),
    Gaps(Vec<f64>),
}

impl SpacingVector {
    pub fn len(&self) -> usize {
        match self {
            SpacingVector::Counts(c) => c.len(),
            SpacingVector::Gaps(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn counts(&self) -> Option<&[u64]> {
        match self {
            SpacingVector::Counts(c) => Some(c),
            SpacingVector::Gaps(_) => None,
        }
    }

    pub fn gaps(&self) -> Option<&[f64]> {
        match self {
            SpacingVector::Gaps(g) => Some(g),
            SpacingVector::Counts(_) => None,
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidArgument(format!("alpha {alpha} outside (0, 1]")));
    }
    Ok(())
}

fn check_finite(values: &[f64], what: &'static str) -> Result<()> {
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidArgument(format!("{what} contains NaN")));
    }
    Ok(())
}

/// Counts of `y` values falling between consecutive order statistics of `x`,
/// with sentinels at `-inf` and `+inf`. Equal values are ordered by a seeded
/// random permutation.
pub fn two_sample_spacings(x: &[f64], y: &[f64], seed: u64) -> Result<SpacingVector> {
    Ok(SpacingVector::Counts(spacing_counts(x, y, seed)?))
}

fn spacing_counts(x: &[f64], y: &[f64], seed: u64) -> Result<Vec<u64>> {
    if x.is_empty() {
        return Err(Error::EmptyInput("first sample"));
    }
    check_finite(x, "first sample")?;
    check_finite(y, "second sample")?;
    let mut rng = seeded_rng(seed);
    // Adding 0.0 maps -0.0 to 0.0 so that the two compare as a tie.
    let mut items: Vec<(f64, u64, bool)> = x
        .iter()
        .map(|&v| (v + 0.0, true))
        .chain(y.iter().map(|&v| (v + 0.0, false)))
        .map(|(v, is_x)| (v, rng.random::<u64>(), is_x))
        .collect();
    items.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut counts = vec![0u64; x.len() + 1];
    let mut bin = 0;
    for (_, _, is_x) in items {
        if is_x {
            bin += 1;
        } else {
            counts[bin] += 1;
        }
    }
    Ok(counts)
}

/// Gaps between `0, F(z_(1)), ..., F(z_(N)), 1`; `k = N + 1` entries.
pub fn one_sample_spacings(z: &[f64], null_cdf: &NullCdfSpec) -> Result<SpacingVector> {
    Ok(SpacingVector::Gaps(spacing_gaps(z, null_cdf)?))
}

fn spacing_gaps(z: &[f64], null_cdf: &NullCdfSpec) -> Result<Vec<f64>> {
    if z.is_empty() {
        return Err(Error::EmptyInput("sample"));
    }
    check_finite(z, "sample")?;
    let mut u = z.iter().map(|&v| null_cdf.cdf(v)).collect::<Result<Vec<_>>>()?;
    u.sort_by(f64::total_cmp);
    let mut gaps = Vec::with_capacity(u.len() + 1);
    let mut prev = 0.0;
    for v in u {
        gaps.push(v - prev);
        prev = v;
    }
    gaps.push(1.0 - prev);
    Ok(gaps)
}

/// Standardized statistic and its normal tail probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CltOutcome {
    pub z: f64,
    pub p_value: f64,
}

/// Mean and standard deviation per bin of the unit-weight statistic, used to
/// standardize `sum w_i S_i^p` for large `n` and `k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CltParameters {
    pub mean: f64,
    pub sd: f64,
    pub weight_sum: f64,
    pub weight_norm: f64,
}

impl CltParameters {
    pub fn new(spec: &StatisticSpec) -> Result<Self> {
        let Some(n) = spec.n() else {
            return Err(Error::WrongMode { expected: "discrete" });
        };
        if spec.weights.entries().iter().any(|w| !w.is_positive()) {
            return Err(Error::InvalidArgument(
                "the normal approximation needs strictly positive weights".into(),
            ));
        }
        let k = spec.k();
        let (mean, var) = if n == 0 {
            (0.0, 0.0)
        } else {
            let unit = StatisticSpec::discrete(n, spec.p, WeightVector::ones(k)?)?;
            let mom = discrete_moments(&unit, 2)?;
            let m1 = mom.raw_moment(1);
            let var = mom.raw_moment(2) - &m1 * &m1;
            if var.is_zero() {
                return Err(Error::Unsupported(
                    "the unit-weight statistic has zero variance, so the normal approximation is degenerate".into(),
                ));
            }
            let kk = BigRational::from_integer(k.into());
            (rational_to_f64(&(m1 / &kk)), rational_to_f64(&(var / kk)))
        };
        let w = spec.weights.to_f64();
        Ok(Self {
            mean,
            sd: var.sqrt(),
            weight_sum: w.iter().sum(),
            weight_norm: w.iter().map(|x| x * x).sum::<f64>().sqrt(),
        })
    }

    pub fn standardize(&self, statistic: f64) -> f64 {
        (statistic - self.mean * self.weight_sum) / (self.sd * self.weight_norm)
    }

    pub fn outcome(&self, statistic: f64, side: Side) -> CltOutcome {
        if self.sd == 0.0 {
            return CltOutcome { z: 0.0, p_value: 1.0 };
        }
        let z = self.standardize(statistic);
        let normal = Normal::standard();
        CltOutcome {
            z,
            p_value: side.combine(normal.cdf(z), normal.sf(z)),
        }
    }
}

/// Normal-approximation p-value for a discrete statistic with positive weights.
pub fn clt_pvalue(spec: &StatisticSpec, statistic: f64, side: Side) -> Result<CltOutcome> {
    Ok(CltParameters::new(spec)?.outcome(statistic, side))
}

/// Settings of the two-sample spacing test.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoSampleConfig {
    pub p: u32,
    pub weights: WeightVector,
    pub side: Side,
    pub method: MethodChoice,
    pub moments: Option<usize>,
    pub alpha: f64,
}

impl TwoSampleConfig {
    pub fn new(p: u32, weights: WeightVector) -> Self {
        Self {
            p,
            weights,
            side: Side::TwoSided,
            method: MethodChoice::Auto,
            moments: None,
            alpha: 0.05,
        }
    }

    pub fn side(mut self, side: Side) -> Self {
        self.side = side;
        self
    }

    pub fn method(mut self, method: MethodChoice) -> Self {
        self.method = method;
        self
    }

    pub fn moments(mut self, m: usize) -> Self {
        self.moments = Some(m);
        self
    }

    pub fn alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }
}

/// Method the automatic selection picks for `n` second-sample points.
pub fn select_method(spec: &StatisticSpec, moments: usize) -> Method {
    let n = spec.n().unwrap_or(0);
    let count = spec.composition_count().unwrap_or_default();
    if count <= DEFAULT_PMF_CAP.into() {
        return Method::OraclePmf;
    }
    let workload = (2 * n + 1).saturating_mul(2 * moments as u64 + 1);
    let normal_ok = spec.p > 1 && spec.weights.entries().iter().all(Signed::is_positive);
    if workload <= EXACT_MOMENTS_WORKLOAD_CAP || !normal_ok {
        Method::ExactMoments
    } else {
        Method::Clt
    }
}

#[derive(Clone, Debug)]
struct OracleTable {
    values: Vec<BigRational>,
    cumulative: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Clone, Debug)]
enum DiscreteNull {
    /// Statistic identically zero (`n = 0` or all weights zero).
    Constant,
    Oracle(OracleTable),
    Moments(Box<CdfEstimate>),
    Clt(CltParameters),
}

/// Two-sample spacing test with its null distribution prepared for a fixed
/// `(n, k, p, w)`.
#[derive(Clone, Debug)]
pub struct TwoSampleTest {
    spec: StatisticSpec,
    scale: BigRational,
    side: Side,
    alpha: f64,
    method: Method,
    moments_used: usize,
    certified_error: f64,
    warnings: Vec<String>,
    null: DiscreteNull,
}

impl TwoSampleTest {
    /// Prepares the null law for `n` second-sample points; `k` is the weight
    /// vector length.
    pub fn prepare(config: &TwoSampleConfig, n: u64) -> Result<Self> {
        check_alpha(config.alpha)?;
        let spec = StatisticSpec::discrete(n, config.p, config.weights.clone())?;
        if spec.k() < 2 {
            return Err(Error::InvalidSpec("two-sample tests need k >= 2 bins".into()));
        }
        let m = config.moments.unwrap_or(DEFAULT_DISCRETE_MOMENTS);
        let method = match config.method {
            MethodChoice::Auto => select_method(&spec, m),
            MethodChoice::ExactMoments => Method::ExactMoments,
            MethodChoice::Clt => Method::Clt,
            MethodChoice::OraclePmf => Method::OraclePmf,
        };
        let mut warnings = Vec::new();
        let constant = n == 0 || spec.weights.is_degenerate();
        let scale = if constant { BigRational::from_integer(1.into()) } else { statistic_scale(&spec)? };
        let mut moments_used = 0;
        let mut certified_error = 0.0;
        let null = match method {
            _ if constant => DiscreteNull::Constant,
            Method::OraclePmf => {
                let pmf = exact_pmf(&spec)?;
                let probs: Vec<BigRational> = pmf.entries().values().cloned().collect();
                let mut cumulative = Vec::with_capacity(probs.len());
                let mut acc = BigRational::zero();
                for p in &probs {
                    acc += p;
                    cumulative.push(rational_to_f64(&acc));
                }
                let mut upper = vec![0.0; probs.len()];
                let mut acc = BigRational::zero();
                for (i, p) in probs.iter().enumerate().rev() {
                    acc += p;
                    upper[i] = rational_to_f64(&acc);
                }
                DiscreteNull::Oracle(OracleTable {
                    values: pmf.entries().keys().cloned().collect(),
                    cumulative,
                    upper,
                })
            }
            Method::ExactMoments => {
                if m == 0 {
                    return Err(Error::InvalidArgument("exact-moments needs M >= 1".into()));
                }
                let est = reconstruct_cdf(&discrete_moments(&spec, m)?, m)?;
                moments_used = m;
                certified_error = est.error_bound();
                DiscreteNull::Moments(Box::new(est))
            }
            Method::Clt => {
                if spec.k() < CLT_MIN_BINS {
                    warnings.push(format!(
                        "normal approximation used with k = {} < {CLT_MIN_BINS} bins",
                        spec.k()
                    ));
                }
                // The normal approximation carries no finite-sample certificate.
                certified_error = 1.0;
                DiscreteNull::Clt(CltParameters::new(&spec)?)
            }
            Method::Asymptotic | Method::ExactDistribution => unreachable!("not a spacing method"),
        };
        Ok(Self {
            spec,
            scale,
            side: config.side,
            alpha: config.alpha,
            method,
            moments_used,
            certified_error,
            warnings,
            null,
        })
    }

    pub fn spec(&self) -> &StatisticSpec {
        &self.spec
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn certified_error(&self) -> f64 {
        self.certified_error
    }

    /// Left and right tail probabilities `P(T <= t)`, `P(T >= t)` of an exact
    /// statistic value. The moment path evaluates the reconstructed CDF half a
    /// lattice step away from `t`, where its certificate applies.
    pub fn tail_probabilities(&self, statistic: &BigRational) -> (f64, f64) {
        match &self.null {
            DiscreteNull::Constant => (1.0, 1.0),
            DiscreteNull::Oracle(t) => {
                let below = t.values.partition_point(|v| v <= statistic);
                let from = t.values.partition_point(|v| v < statistic);
                let left = if below == 0 { 0.0 } else { t.cumulative[below - 1] };
                let right = t.upper.get(from).copied().unwrap_or(0.0);
                (left, right)
            }
            DiscreteNull::Moments(est) => {
                let m = BigRational::from_integer(est.order().into());
                let lattice = est.lattice().expect("discrete reconstruction");
                let half = BigRational::new(1.into(), lattice * 2);
                let v = statistic / &self.scale;
                let index = |x: &BigRational| (x * &m).floor().to_integer().to_usize();
                let hi = &v + &half;
                let lo = &v - &half;
                let left = if hi.is_negative() { 0.0 } else { est.cumulative_at(index(&hi).unwrap_or(usize::MAX)) };
                let right = if lo.is_negative() {
                    1.0
                } else {
                    index(&lo).map_or(0.0, |j| est.upper_tail_at(j + 1))
                };
                (left, right)
            }
            DiscreteNull::Clt(c) => {
                let z = c.standardize(rational_to_f64(statistic));
                let normal = Normal::standard();
                (normal.cdf(z), normal.sf(z))
            }
        }
    }

    /// p-value of a bin-count vector for the configured side.
    pub fn p_value(&self, counts: &[u64]) -> Result<f64> {
        self.p_value_side(counts, self.side)
    }

    pub fn p_value_side(&self, counts: &[u64], side: Side) -> Result<f64> {
        let stat = self.statistic(counts)?;
        let (l, r) = self.tail_probabilities(&stat);
        Ok(side.combine(l, r))
    }

    fn statistic(&self, counts: &[u64]) -> Result<BigRational> {
        let total: u64 = counts.iter().sum();
        if Some(total) != self.spec.n() {
            return Err(Error::InvalidArgument(format!(
                "counts sum to {total}, expected n = {}",
                self.spec.n().unwrap_or(0)
            )));
        }
        self.spec.evaluate_counts(counts)
    }

    /// Full result for a bin-count vector.
    pub fn evaluate_counts(&self, counts: &[u64], seed: u64) -> Result<TestResult> {
        let stat = self.statistic(counts)?;
        let (l, r) = self.tail_probabilities(&stat);
        let p_value = self.side.combine(l, r);
        Ok(TestResult {
            test: "spacing-two-sample".into(),
            raw_statistic: rational_to_f64(&stat),
            exact_statistic: Some(format_rational(&stat)),
            normalized_statistic: rational_to_f64(&(&stat / &self.scale)),
            p_value,
            side: self.side,
            method: self.method,
            moments_used: self.moments_used,
            certified_error: self.certified_error,
            alpha: self.alpha,
            reject: p_value <= self.alpha,
            seed,
            warnings: self.warnings.clone(),
        })
    }

    /// Full result for raw samples; `x` has `k - 1` points, `y` has `n`.
    pub fn evaluate(&self, x: &[f64], y: &[f64], seed: u64) -> Result<TestResult> {
        if x.len() + 1 != self.spec.k() {
            return Err(Error::InvalidSpec(format!(
                "first sample has {} points, the weights need k - 1 = {}",
                x.len(),
                self.spec.k() - 1
            )));
        }
        self.evaluate_counts(&spacing_counts(x, y, seed)?, seed)
    }
}

/// Two-sample spacing test of `H0: x and y share one continuous law`.
pub fn two_sample_test(x: &[f64], y: &[f64], config: &TwoSampleConfig, seed: u64) -> Result<TestResult> {
    TwoSampleTest::prepare(config, y.len() as u64)?.evaluate(x, y, seed)
}

/// Settings of the one-sample spacing test; `k = N + 1` weights for `N` points.
#[derive(Clone, Debug, PartialEq)]
pub struct OneSampleConfig {
    pub p: u32,
    pub weights: WeightVector,
    pub side: Side,
    pub moments: Option<usize>,
    pub alpha: f64,
}

impl OneSampleConfig {
    pub fn new(p: u32, weights: WeightVector) -> Self {
        Self {
            p,
            weights,
            side: Side::TwoSided,
            moments: None,
            alpha: 0.05,
        }
    }

    /// Greenwood's statistic for `n_points` observations.
    pub fn greenwood(n_points: usize) -> Result<Self> {
        Ok(Self::new(2, WeightVector::ones(n_points + 1)?))
    }

    pub fn side(mut self, side: Side) -> Self {
        self.side = side;
        self
    }

    pub fn moments(mut self, m: usize) -> Self {
        self.moments = Some(m);
        self
    }

    pub fn alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }
}

/// One-sample spacing test with a prepared continuous null law.
#[derive(Clone, Debug)]
pub struct OneSampleTest {
    spec: StatisticSpec,
    side: Side,
    alpha: f64,
    null: Option<CdfEstimate>,
}

impl OneSampleTest {
    pub fn prepare(config: &OneSampleConfig) -> Result<Self> {
        check_alpha(config.alpha)?;
        let spec = StatisticSpec::continuous(config.p, config.weights.clone())?;
        if spec.k() < 2 {
            return Err(Error::InvalidSpec("one-sample tests need at least one observation".into()));
        }
        let null = if spec.weights.is_degenerate() {
            None
        } else {
            let m = config.moments.unwrap_or(DEFAULT_CONTINUOUS_MOMENTS);
            if m == 0 {
                return Err(Error::InvalidArgument("reconstruction needs M >= 1".into()));
            }
            Some(reconstruct_cdf(&continuous_moments(&spec, m)?, m)?)
        };
        Ok(Self {
            spec,
            side: config.side,
            alpha: config.alpha,
            null,
        })
    }

    pub fn spec(&self) -> &StatisticSpec {
        &self.spec
    }

    pub fn null_estimate(&self) -> Option<&CdfEstimate> {
        self.null.as_ref()
    }

    /// Grid-cell tail probabilities of a normalized statistic value: the
    /// left tail includes the cell containing it, and so does the right.
    pub fn tail_probabilities(&self, normalized: f64) -> (f64, f64) {
        match &self.null {
            None => (1.0, 1.0),
            Some(est) => match est.grid_index(normalized) {
                None => (0.0, 1.0),
                Some(j) => (est.cumulative_at(j), est.upper_tail_at(j)),
            },
        }
    }

    /// Result for a vector of `k` gaps summing to one.
    pub fn evaluate_gaps(&self, gaps: &[f64]) -> Result<TestResult> {
        let raw = self.spec.evaluate(gaps)?;
        let scale = match &self.null {
            Some(est) => rational_to_f64(est.scale()),
            None => 1.0,
        };
        let normalized = raw / scale;
        let (l, r) = self.tail_probabilities(normalized);
        let p_value = self.side.combine(l, r);
        let (moments_used, certified_error) = match &self.null {
            Some(est) => (est.order(), est.error_bound()),
            None => (0, 0.0),
        };
        let warnings = match &self.null {
            Some(_) => vec![ASSUMED_DENSITY_BOUND.to_string()],
            None => Vec::new(),
        };
        Ok(TestResult {
            test: "spacing-one-sample".into(),
            raw_statistic: raw,
            exact_statistic: None,
            normalized_statistic: normalized,
            p_value,
            side: self.side,
            method: Method::ExactMoments,
            moments_used,
            certified_error,
            alpha: self.alpha,
            reject: p_value <= self.alpha,
            seed: 0,
            warnings,
        })
    }

    /// Result for raw observations under the given null CDF.
    pub fn evaluate(&self, z: &[f64], null_cdf: &NullCdfSpec) -> Result<TestResult> {
        if z.len() + 1 != self.spec.k() {
            return Err(Error::InvalidSpec(format!(
                "sample has {} points, the weights need k - 1 = {}",
                z.len(),
                self.spec.k() - 1
            )));
        }
        self.evaluate_gaps(&spacing_gaps(z, null_cdf)?)
    }
}

/// One-sample spacing test of `H0: z_i i.i.d. from null_cdf`.
pub fn one_sample_test(z: &[f64], null_cdf: &NullCdfSpec, config: &OneSampleConfig) -> Result<TestResult> {
    OneSampleTest::prepare(config)?.evaluate(z, null_cdf)
}

#[cfg(test)]
mod tests;
