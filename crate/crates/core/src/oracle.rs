//! Ground truth for small instances: composition enumeration, exact
//! probability mass functions by recursion, and seeded samplers.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::moments::{statistic_scale, Mode, StatisticSpec};
use crate::numeric::{binomial, rational_to_f64};

/// Default bound on `binom(n+k-1, k-1)` for exact pmf computations.
pub const DEFAULT_PMF_CAP: u64 = 1_000_000;

/// The generator behind every stochastic routine.
pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Decorrelated child seed for stream `index` (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A weak composition: `k` non-negative parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition(pub Vec<u64>);

impl Composition {
    pub fn parts(&self) -> &[u64] {
        &self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }
}

/// Iterator over all weak compositions of `n` into `k` parts, in reverse
/// lexicographic order starting from `(n, 0, ..., 0)`.
#[derive(Clone, Debug)]
pub struct Compositions {
    current: Option<Vec<u64>>,
}

impl Iterator for Compositions {
    type Item = Composition;

    fn next(&mut self) -> Option<Composition> {
        let cur = self.current.as_mut()?;
        let out = Composition(cur.clone());
        let k = cur.len();
        // Move one unit out of the rightmost non-last nonzero part, and pile
        // everything after it into the next slot.
        match (0..k.saturating_sub(1)).rev().find(|&i| cur[i] > 0) {
            None => self.current = None,
            Some(i) => {
                let tail: u64 = cur[i + 1..].iter().sum();
                cur[i] -= 1;
                for x in cur[i + 1..].iter_mut() {
                    *x = 0;
                }
                cur[i + 1] = tail + 1;
            }
        }
        Some(out)
    }
}

pub fn enumerate_compositions(n: u64, k: usize) -> Compositions {
    assert!(k >= 1, "at least one part");
    let mut first = vec![0u64; k];
    first[0] = n;
    Compositions {
        current: Some(first),
    }
}

/// Exact finite distribution over rational values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pmf {
    entries: BTreeMap<BigRational, BigRational>,
}

impl Pmf {
    /// Builds a pmf from raw entries, dropping zeros and checking total mass.
    pub fn new(entries: BTreeMap<BigRational, BigRational>) -> Result<Self> {
        let entries: BTreeMap<_, _> = entries.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        let total: BigRational = entries.values().sum();
        if !total.is_one() || entries.values().any(|p| p < &BigRational::zero()) {
            return Err(Error::InvalidArgument("probabilities must be positive and sum to one".into()));
        }
        Ok(Self { entries })
    }

    fn from_counts(counts: BTreeMap<BigRational, BigUint>, total: &BigUint) -> Self {
        let total = BigInt::from(total.clone());
        Self {
            entries: counts
                .into_iter()
                .map(|(v, c)| (v, BigRational::new(BigInt::from(c), total.clone())))
                .collect(),
        }
    }

    pub fn point(value: BigRational) -> Self {
        Self {
            entries: BTreeMap::from([(value, BigRational::one())]),
        }
    }

    pub fn entries(&self) -> &BTreeMap<BigRational, BigRational> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn prob(&self, value: &BigRational) -> BigRational {
        self.entries.get(value).cloned().unwrap_or_else(BigRational::zero)
    }

    /// `P(X <= x)`.
    pub fn cdf(&self, x: &BigRational) -> BigRational {
        self.entries.range(..=x.clone()).map(|(_, p)| p).sum()
    }

    /// `P(X >= x)`.
    pub fn sf(&self, x: &BigRational) -> BigRational {
        self.entries.range(x.clone()..).map(|(_, p)| p).sum()
    }

    /// `E[X^m]` for `m = 0..=max_order`.
    pub fn raw_moments(&self, max_order: usize) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); max_order + 1];
        for (v, p) in &self.entries {
            let mut pw = p.clone();
            for slot in out.iter_mut() {
                *slot += &pw;
                pw *= v;
            }
        }
        out
    }

    /// Pmf of `X / c` for a positive constant.
    pub fn scaled(&self, c: &BigRational) -> Self {
        Self {
            entries: self.entries.iter().map(|(v, p)| (v / c, p.clone())).collect(),
        }
    }

    /// Minimum gap between consecutive support points.
    pub fn mesh(&self) -> Option<BigRational> {
        let keys: Vec<_> = self.entries.keys().collect();
        keys.windows(2).map(|w| w[1] - w[0]).min()
    }

    /// Support points and probabilities as floats.
    pub fn to_f64(&self) -> Vec<(f64, f64)> {
        self.entries
            .iter()
            .map(|(v, p)| (rational_to_f64(v), rational_to_f64(p)))
            .collect()
    }
}

fn check_cap(spec: &StatisticSpec, cap: u64) -> Result<(u64, BigInt)> {
    let Mode::Discrete { n } = spec.mode else {
        return Err(Error::WrongMode { expected: "discrete" });
    };
    let count = spec.composition_count().expect("discrete");
    if count > BigInt::from(cap) {
        return Err(Error::SizeCap {
            what: "number of compositions",
            size: count.to_string(),
            cap: cap.to_string(),
        });
    }
    Ok((n, count))
}

/// Pmf by listing every composition. Reference only.
pub fn pmf_by_enumeration(spec: &StatisticSpec, cap: u64) -> Result<Pmf> {
    let (n, count) = check_cap(spec, cap)?;
    let mut counts: BTreeMap<BigRational, BigUint> = BTreeMap::new();
    for c in enumerate_compositions(n, spec.k()) {
        *counts.entry(spec.evaluate_counts(c.parts())?).or_default() += 1u32;
    }
    Ok(Pmf::from_counts(counts, count.magnitude()))
}

/// Exact pmf of the discrete statistic by conditioning on bin occupancies one
/// bin at a time. Fails when `binom(n+k-1, k-1)` exceeds `cap`.
pub fn exact_pmf_with_cap(spec: &StatisticSpec, cap: u64) -> Result<Pmf> {
    let (n, count) = check_cap(spec, cap)?;
    let (w_int, w_den) = spec.weights.integer_form();
    let too_big = || Error::Unsupported("weights too fine-grained for the pmf recursion".into());
    let weights: Vec<i128> = w_int
        .iter()
        .map(|w| w.to_i128().ok_or_else(too_big))
        .collect::<Result<_>>()?;
    let n = n as usize;
    let powers: Vec<i128> = (0..=n as i128).map(|j| j.pow(spec.p)).collect();
    if powers[n].checked_mul(weights.iter().map(|w| w.abs()).max().unwrap_or(0)).is_none() {
        return Err(too_big());
    }

    // layer[b] maps the partial statistic to the number of ways to place b
    // balls in the bins seen so far.
    let mut layer: Vec<HashMap<i128, u128>> = vec![HashMap::new(); n + 1];
    for (j, &p) in powers.iter().enumerate() {
        layer[j].insert(weights[0] * p, 1);
    }
    for &w in &weights[1..] {
        let mut next: Vec<HashMap<i128, u128>> = vec![HashMap::new(); n + 1];
        for (b, states) in layer.iter().enumerate() {
            for (&v, &c) in states {
                for j in 0..=n - b {
                    *next[b + j].entry(v + w * powers[j]).or_default() += c;
                }
            }
        }
        layer = next;
    }
    let den = BigRational::from_integer(w_den);
    let counts: BTreeMap<BigRational, BigUint> = layer[n]
        .iter()
        .map(|(&v, &c)| (BigRational::from_integer(v.into()) / &den, BigUint::from(c)))
        .collect();
    Ok(Pmf::from_counts(counts, count.magnitude()))
}

pub fn exact_pmf(spec: &StatisticSpec) -> Result<Pmf> {
    exact_pmf_with_cap(spec, DEFAULT_PMF_CAP)
}

/// Pmf of `sum_i (k-i) S_i` by the two-term recursion
/// `C(n,k,x) = C(n-1,k,x) + C(n,k-1,x-n)`.
pub fn mann_whitney_pmf(n: u64, k: usize) -> Pmf {
    let counts = mann_whitney_counts(n as usize, k);
    let total: BigUint = counts.iter().sum();
    let counts = counts
        .into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(x, c)| (BigRational::from_integer(x.into()), c))
        .collect();
    Pmf::from_counts(counts, &total)
}

/// Composition counts indexed by statistic value, `0..=n(k-1)`.
pub fn mann_whitney_counts(n: usize, k: usize) -> Vec<BigUint> {
    assert!(k >= 1);
    // rows[a][x] holds C(a, j, x) for the current number of bins j.
    let mut rows: Vec<Vec<BigUint>> = (0..=n).map(|_| vec![BigUint::one()]).collect();
    for j in 2..=k {
        let mut next: Vec<Vec<BigUint>> = Vec::with_capacity(n + 1);
        for a in 0..=n {
            let len = a * (j - 1) + 1;
            let mut row = vec![BigUint::zero(); len];
            if a > 0 {
                for (x, c) in next[a - 1].iter().enumerate() {
                    row[x] += c;
                }
            }
            for (x, c) in rows[a].iter().enumerate() {
                row[x + a] += c;
            }
            next.push(row);
        }
        rows = next;
    }
    rows.swap_remove(n)
}

/// Offset between the rank sum of the `k-1` first-sample points and the
/// weighted spacing statistic with weights `(k-1, ..., 1, 0)`.
pub fn rank_sum_shift(k: usize) -> u64 {
    binomial(k as u64, 2).to_u64().expect("small")
}

/// Uniform draw from the weak compositions of `n` into `k` parts.
pub fn sample_composition<R: Rng + ?Sized>(n: u64, k: usize, rng: &mut R) -> Composition {
    assert!(k >= 1);
    if k == 1 {
        return Composition(vec![n]);
    }
    let slots = n as usize + k - 1;
    let mut bars = index::sample(rng, slots, k - 1).into_vec();
    bars.sort_unstable();
    let mut parts = Vec::with_capacity(k);
    let mut prev = 0usize;
    for &b in &bars {
        parts.push((b - prev) as u64);
        prev = b + 1;
    }
    parts.push((slots - prev) as u64);
    Composition(parts)
}

/// Uniform draw from the simplex: gaps of `k-1` sorted uniforms on `[0,1]`.
pub fn sample_spacings<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    assert!(k >= 1);
    let mut u: Vec<f64> = (0..k - 1).map(|_| rng.random::<f64>()).collect();
    u.sort_by(f64::total_cmp);
    let mut out = Vec::with_capacity(k);
    let mut prev = 0.0;
    for x in u {
        out.push(x - prev);
        prev = x;
    }
    out.push(1.0 - prev);
    out
}

/// Simplex draw through normalized exponentials; used by the large-`k` paths.
pub fn sample_spacings_exp<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let e: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = e.iter().sum();
    e.into_iter().map(|x| x / total).collect()
}

/// Sample mean and its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentEstimate {
    pub mean: f64,
    pub std_error: f64,
}

/// Monte-Carlo estimates of the normalized moments `mu_0..mu_M`.
pub fn monte_carlo_moments(
    spec: &StatisticSpec,
    max_order: usize,
    reps: usize,
    seed: u64,
) -> Result<Vec<MomentEstimate>> {
    if reps == 0 {
        return Err(Error::InvalidArgument("at least one replicate".into()));
    }
    let scale = statistic_scale(spec)?;
    let scale = if scale.is_zero() { 1.0 } else { rational_to_f64(&scale) };
    let weights = spec.weights.to_f64();
    let mut rng = seeded_rng(seed);
    let mut sum = vec![0.0f64; max_order + 1];
    let mut sum_sq = vec![0.0f64; max_order + 1];
    for _ in 0..reps {
        let value = match spec.mode {
            Mode::Discrete { n } => {
                let c = sample_composition(n, spec.k(), &mut rng);
                c.parts()
                    .iter()
                    .zip(&weights)
                    .map(|(&s, w)| w * (s as f64).powi(spec.p as i32))
                    .sum::<f64>()
            }
            Mode::Continuous => spec.evaluate(&sample_spacings(spec.k(), &mut rng))?,
        } / scale;
        let mut pw = 1.0;
        for m in 0..=max_order {
            sum[m] += pw;
            sum_sq[m] += pw * pw;
            pw *= value;
        }
    }
    let r = reps as f64;
    Ok(sum
        .iter()
        .zip(&sum_sq)
        .map(|(s, sq)| {
            let mean = s / r;
            let var = if reps > 1 { ((sq / r - mean * mean) * r / (r - 1.0)).max(0.0) } else { 0.0 };
            MomentEstimate {
                mean,
                std_error: (var / r).sqrt(),
            }
        })
        .collect())
}
