//! Exact moment sequences of generalized spacing statistics.
//!
//! A statistic is `sum_i w_i S_i^p` where `S` is either a uniform weak
//! composition of `n` balls into `k` bins (discrete mode) or a uniform point
//! of the `(k-1)`-simplex (continuous mode). Moments are returned for the
//! statistic divided by its natural range `max|w| n^p` (or `max|w|`).

pub mod engine;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::{
    binomial, common_denominator, factorial, format_rational, parse_rational, product_tree,
    product_tree1, ratio_to_f64, rising_range, TruncatedPoly1, TruncatedPoly2,
};

/// Exact rational weights `w_1..w_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightVector(Vec<BigRational>);

impl WeightVector {
    pub fn new(entries: Vec<BigRational>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidSpec("weight vector must have at least one entry".into()));
        }
        Ok(Self(entries))
    }

    pub fn from_integers(entries: &[i64]) -> Result<Self> {
        Self::new(entries.iter().map(|&w| BigRational::from_integer(w.into())).collect())
    }

    /// Unit weights of length `k`.
    pub fn ones(k: usize) -> Result<Self> {
        Self::new(vec![BigRational::one(); k])
    }

    /// Parses comma-separated exact entries such as `"1,1/2,0.25"`.
    pub fn parse(text: &str) -> Result<Self> {
        let entries = text
            .split(',')
            .map(|t| {
                parse_rational(t)
                    .ok_or_else(|| Error::InvalidSpec(format!("cannot parse weight {:?}", t.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_degenerate(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn has_negative(&self) -> bool {
        self.0.iter().any(Signed::is_negative)
    }

    pub fn max_abs(&self) -> BigRational {
        self.0.iter().map(|w| w.abs()).max().unwrap_or_else(BigRational::zero)
    }

    /// Number of entries equal to one.
    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|w| w.is_one()).count()
    }

    /// `(W, d)` with integer `W_i = d * w_i` and `d` the least common denominator.
    pub fn integer_form(&self) -> (Vec<BigInt>, BigInt) {
        let d = common_denominator(&self.0);
        let ints = self.0.iter().map(|w| (w * &d).to_integer()).collect();
        (ints, d)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(crate::numeric::rational_to_f64).collect()
    }

    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().cloned().collect())
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(format_rational).collect();
        write!(f, "{}", parts.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Discrete { n: u64 },
    Continuous,
}

/// One generalized spacing statistic `(mode, k, p, w)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StatisticSpec {
    pub mode: Mode,
    pub p: u32,
    pub weights: WeightVector,
}

impl StatisticSpec {
    pub fn new(mode: Mode, p: u32, weights: WeightVector) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidSpec("p must be a positive integer".into()));
        }
        Ok(Self { mode, p, weights })
    }

    pub fn discrete(n: u64, p: u32, weights: WeightVector) -> Result<Self> {
        Self::new(Mode::Discrete { n }, p, weights)
    }

    pub fn continuous(p: u32, weights: WeightVector) -> Result<Self> {
        Self::new(Mode::Continuous, p, weights)
    }

    /// Unit-weight statistic with `p = 2`.
    pub fn greenwood(k: usize) -> Result<Self> {
        Self::continuous(2, WeightVector::ones(k)?)
    }

    pub fn k(&self) -> usize {
        self.weights.len()
    }

    pub fn n(&self) -> Option<u64> {
        match self.mode {
            Mode::Discrete { n } => Some(n),
            Mode::Continuous => None,
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.mode, Mode::Discrete { .. })
    }

    /// Exact value on a bin-count vector.
    pub fn evaluate_counts(&self, counts: &[u64]) -> Result<BigRational> {
        self.check_len(counts.len())?;
        Ok(counts
            .iter()
            .zip(self.weights.entries())
            .filter(|(c, _)| **c > 0)
            .map(|(&c, w)| w * BigRational::from_integer(BigInt::from(c).pow(self.p)))
            .sum())
    }

    /// Value on a vector of real gaps.
    pub fn evaluate(&self, gaps: &[f64]) -> Result<f64> {
        self.check_len(gaps.len())?;
        Ok(gaps
            .iter()
            .zip(self.weights.to_f64())
            .map(|(g, w)| w * g.powi(self.p as i32))
            .sum())
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.k() {
            return Err(Error::InvalidSpec(format!(
                "expected {} bins to match the weights, got {len}",
                self.k()
            )));
        }
        Ok(())
    }

    /// Number of weak compositions `binom(n+k-1, k-1)` (discrete mode).
    pub fn composition_count(&self) -> Option<BigInt> {
        self.n()
            .map(|n| binomial(n + self.k() as u64 - 1, self.k() as i64 - 1))
    }
}

/// `max|w| n^p` (discrete) or `max|w|` (continuous).
pub fn statistic_scale(spec: &StatisticSpec) -> Result<BigRational> {
    if spec.weights.is_degenerate() {
        return Err(Error::DegenerateWeights);
    }
    let w = spec.weights.max_abs();
    Ok(match spec.mode {
        Mode::Discrete { n } => w * BigRational::from_integer(BigInt::from(n).pow(spec.p)),
        Mode::Continuous => w,
    })
}

/// Exact normalized moments `mu_0..mu_M` sharing one common denominator.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSequence {
    spec: StatisticSpec,
    scale: BigRational,
    numerators: Vec<BigInt>,
    denominator: BigInt,
}

impl MomentSequence {
    /// Builds a sequence from raw common-denominator data (fixtures, tests).
    pub fn from_parts(
        spec: StatisticSpec,
        scale: BigRational,
        numerators: Vec<BigInt>,
        denominator: BigInt,
    ) -> Result<Self> {
        if numerators.is_empty() || !denominator.is_positive() {
            return Err(Error::InvalidArgument("moment sequence needs mu_0 and a positive denominator".into()));
        }
        Ok(Self {
            spec,
            scale,
            numerators,
            denominator,
        })
    }

    /// Builds a sequence from explicit rational moments.
    pub fn from_rationals(spec: StatisticSpec, scale: BigRational, moments: &[BigRational]) -> Result<Self> {
        let d = common_denominator(moments);
        let numerators = moments.iter().map(|m| (m * &d).to_integer()).collect();
        Self::from_parts(spec, scale, numerators, d)
    }

    pub fn spec(&self) -> &StatisticSpec {
        &self.spec
    }

    /// Normalization constant: the statistic divided by `scale` is the variable
    /// whose moments are stored.
    pub fn scale(&self) -> &BigRational {
        &self.scale
    }

    /// Highest stored order `M`.
    pub fn max_order(&self) -> usize {
        self.numerators.len() - 1
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.numerators
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    pub fn moment(&self, m: usize) -> BigRational {
        BigRational::new(self.numerators[m].clone(), self.denominator.clone())
    }

    pub fn moments(&self) -> Vec<BigRational> {
        (0..=self.max_order()).map(|m| self.moment(m)).collect()
    }

    pub fn moment_f64(&self, m: usize) -> f64 {
        ratio_to_f64(&self.numerators[m], &self.denominator)
    }

    /// `E[statistic^m]` without normalization.
    pub fn raw_moment(&self, m: usize) -> BigRational {
        self.moment(m) * num_traits::pow(self.scale.clone(), m)
    }

    /// The first `order + 1` moments.
    pub fn truncated(&self, order: usize) -> Result<Self> {
        if order > self.max_order() {
            return Err(Error::NotEnoughMoments {
                requested: order,
                available: self.max_order(),
            });
        }
        Ok(Self {
            spec: self.spec.clone(),
            scale: self.scale.clone(),
            numerators: self.numerators[..=order].to_vec(),
            denominator: self.denominator.clone(),
        })
    }

    /// Removes the common factor shared by all numerators and the denominator.
    pub fn reduced(&self) -> Self {
        let g = self
            .numerators
            .iter()
            .fold(self.denominator.clone(), |g, x| g.gcd(x));
        Self {
            spec: self.spec.clone(),
            scale: self.scale.clone(),
            numerators: self.numerators.iter().map(|x| x / &g).collect(),
            denominator: &self.denominator / &g,
        }
    }
}

fn effective_scale(spec: &StatisticSpec) -> Result<BigRational> {
    let s = statistic_scale(spec)?;
    // With n = 0 the statistic is identically zero; keep the identity scale.
    Ok(if s.is_zero() { BigRational::one() } else { s })
}

fn compute(spec: &StatisticSpec, max_order: usize, allow_negative: bool) -> Result<MomentSequence> {
    if spec.weights.is_degenerate() {
        return Err(Error::DegenerateWeights);
    }
    if !allow_negative && spec.weights.has_negative() {
        return Err(Error::NegativeWeights);
    }
    let scale = effective_scale(spec)?;
    let (w_int, w_den) = spec.weights.integer_form();
    // Integer range of the scaled statistic `w_den * statistic`.
    let s_int = (&scale * BigRational::from_integer(w_den)).to_integer();
    let k = spec.k() as u64;
    let p = spec.p as u64;
    let mut numerators = vec![BigInt::zero(); max_order + 1];
    let denominator;
    match spec.mode {
        Mode::Discrete { n } => {
            let sums = engine::discrete_power_sums(&w_int, n as usize, spec.p, max_order);
            let count = binomial(n + k - 1, k as i64 - 1);
            let mut s_pow = BigInt::one();
            for m in (0..=max_order).rev() {
                numerators[m] = &sums[m] * &s_pow;
                s_pow *= &s_int;
            }
            denominator = count * num_traits::pow(s_int.clone(), max_order);
        }
        Mode::Continuous => {
            let sums = engine::continuous_power_sums(&w_int, spec.p, max_order);
            let top = p * max_order as u64 + k - 1;
            let base = factorial(k - 1);
            // ratio = (pM+k-1)! / (pm+k-1)!, built downward from m = M.
            let mut ratio = BigInt::one();
            let mut s_pow = BigInt::one();
            for m in (0..=max_order).rev() {
                numerators[m] = &base * &sums[m] * &ratio * &s_pow;
                if m > 0 {
                    let hi = p * m as u64 + k - 1;
                    ratio *= rising_range(hi - p + 1, hi);
                    s_pow *= &s_int;
                }
            }
            denominator = factorial(top) * num_traits::pow(s_int.clone(), max_order);
        }
    }
    Ok(MomentSequence {
        spec: spec.clone(),
        scale,
        numerators,
        denominator,
    })
}

/// Normalized moments `mu_0..mu_M` of the discrete statistic.
pub fn discrete_moments(spec: &StatisticSpec, max_order: usize) -> Result<MomentSequence> {
    if !spec.is_discrete() {
        return Err(Error::WrongMode { expected: "discrete" });
    }
    compute(spec, max_order, false)
}

/// Normalized moments `mu_0..mu_M` of the continuous statistic.
pub fn continuous_moments(spec: &StatisticSpec, max_order: usize) -> Result<MomentSequence> {
    if spec.is_discrete() {
        return Err(Error::WrongMode { expected: "continuous" });
    }
    compute(spec, max_order, false)
}

/// Moments for either mode with non-negative weights.
pub fn moments(spec: &StatisticSpec, max_order: usize) -> Result<MomentSequence> {
    compute(spec, max_order, false)
}

/// Moments for either mode, allowing negative weights. The stored values are
/// moments of `statistic / max|w|...`, which then lies in `[-1, 1]`.
pub fn raw_moments(spec: &StatisticSpec, max_order: usize) -> Result<MomentSequence> {
    compute(spec, max_order, true)
}

/// Per-bin series `1 + sum_{s>=1} sum_t s^{pt} (w y)^t / t! x^s`, truncated at `(n, M)`.
pub fn bin_series(n: usize, max_order: usize, p: u32, w: &BigRational) -> TruncatedPoly2<BigRational> {
    let inv_fact: Vec<BigRational> = (0..=max_order as u64)
        .map(|t| BigRational::new(BigInt::one(), factorial(t)))
        .collect();
    TruncatedPoly2::from_fn(n, max_order, |s, t| {
        if s == 0 {
            return if t == 0 { BigRational::one() } else { BigRational::zero() };
        }
        let base = w * BigRational::from_integer(BigInt::from(s).pow(p));
        num_traits::pow(base, t) * &inv_fact[t]
    })
}

/// Unnormalized discrete moments `E[statistic^m]` via schoolbook rational
/// series products. Slow; used to cross-check the modular engine.
pub fn discrete_raw_moments_reference(spec: &StatisticSpec, max_order: usize) -> Result<Vec<BigRational>> {
    let Mode::Discrete { n } = spec.mode else {
        return Err(Error::WrongMode { expected: "discrete" });
    };
    let factors: Vec<_> = spec
        .weights
        .entries()
        .iter()
        .map(|w| bin_series(n as usize, max_order, spec.p, w))
        .collect();
    let product = product_tree(&factors, n as usize, max_order)?;
    let count = BigRational::from_integer(spec.composition_count().expect("discrete"));
    Ok((0..=max_order)
        .map(|m| {
            product.coeff(n as usize, m) * BigRational::from_integer(factorial(m as u64)) / &count
        })
        .collect())
}

/// Unnormalized continuous moments via schoolbook rational series products.
pub fn continuous_raw_moments_reference(spec: &StatisticSpec, max_order: usize) -> Result<Vec<BigRational>> {
    if spec.is_discrete() {
        return Err(Error::WrongMode { expected: "continuous" });
    }
    let p = spec.p as u64;
    let k = spec.k() as u64;
    let factors: Vec<_> = spec
        .weights
        .entries()
        .iter()
        .map(|w| {
            TruncatedPoly1::from_coeffs(
                max_order,
                (0..=max_order as u64).map(|i| {
                    BigRational::new(factorial(p * i), factorial(i)) * num_traits::pow(w.clone(), i as usize)
                }),
            )
        })
        .collect();
    let product = product_tree1(&factors, max_order)?;
    Ok((0..=max_order as u64)
        .map(|m| {
            product.coeff(m as usize)
                * BigRational::new(factorial(k - 1) * factorial(m), factorial(p * m + k - 1))
        })
        .collect())
}

/// Limit of `m^{k-1} E[statistic^m]` as `m` grows, `(k-1)! W / p^{k-1}`
/// where `W` counts weights equal to one.
pub fn moment_decay_limit(spec: &StatisticSpec) -> Result<BigRational> {
    if spec.is_discrete() {
        return Err(Error::WrongMode { expected: "continuous" });
    }
    let k = spec.k();
    if spec.p < 2 || k < 2 {
        return Err(Error::InvalidArgument("decay limit needs p >= 2 and k >= 2".into()));
    }
    if spec
        .weights
        .entries()
        .iter()
        .any(|w| w.is_negative() || *w > BigRational::one())
    {
        return Err(Error::InvalidArgument("decay limit needs weights in [0, 1]".into()));
    }
    let ones = spec.weights.count_ones() as u64;
    Ok(BigRational::new(
        factorial(k as u64 - 1) * ones,
        BigInt::from(spec.p).pow(k as u32 - 1),
    ))
}
