use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::IndexedRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{StatisticSpec, WeightVector};
use crate::numeric::{binomial, rational_to_f64};
use crate::oracle::{derive_seed, exact_pmf_with_cap, seeded_rng, Pmf};

/// Composition-count cap for the pmf behind [`heteroskedastic_objective`].
pub const OBJECTIVE_PMF_CAP: u64 = 1_000_000_000;

/// Null probability that the statistic falls outside the interval spanned
/// by its values at the two degenerate scale limits.
///
/// As `sigma -> infinity` the second sample piles into the outer bins,
/// `(N_inf, 0, ..., 0, n - N_inf)` with `N_inf ~ Bin(n, F0)`. As
/// `sigma -> 0` it piles into the single bin `N_0 + 1` holding `F^{-1}(F0)`,
/// where `N_0 ~ Bin(k - 1, F0)` counts reference points below it.
pub fn heteroskedastic_objective(p: u32, weights: &WeightVector, n: u64, f0: &BigRational) -> Result<BigRational> {
    Ok(objective_parts(p, weights, n, f0)?.0)
}

/// Objective value and the number of support points of the null statistic.
fn objective_parts(p: u32, weights: &WeightVector, n: u64, f0: &BigRational) -> Result<(BigRational, usize)> {
    let k = weights.len();
    if k < 2 {
        return Err(Error::InvalidArgument("the objective needs k >= 2 bins".into()));
    }
    if !(f0 > &BigRational::zero() && f0 < &BigRational::one()) {
        return Err(Error::InvalidArgument("F0 must lie strictly between 0 and 1".into()));
    }
    let spec = StatisticSpec::discrete(n, p, weights.clone())?;
    if weights.is_degenerate() {
        return Ok((BigRational::zero(), 1));
    }
    let table = TailTable::new(&exact_pmf_with_cap(&spec, OBJECTIVE_PMF_CAP)?);

    let mut spread = vec![0u64; k];
    let far: Vec<BigRational> = (0..=n)
        .map(|i| {
            spread[0] = i;
            spread[k - 1] = n - i;
            spec.evaluate_counts(&spread)
        })
        .collect::<Result<_>>()?;
    let near: Vec<BigRational> = (0..k)
        .map(|j| {
            let mut c = vec![0u64; k];
            c[j] = n;
            spec.evaluate_counts(&c)
        })
        .collect::<Result<_>>()?;

    let p_far = binomial_pmf(n, f0);
    let p_near = binomial_pmf(k as u64 - 1, f0);
    let mut total = BigRational::zero();
    for (a, pa) in far.iter().zip(&p_far) {
        let mut inner = BigRational::zero();
        for (b, pb) in near.iter().zip(&p_near) {
            inner += table.outside(a.min(b), a.max(b)) * pb;
        }
        total += inner * pa;
    }
    Ok((total, table.values.len()))
}

/// `P(X = i)` for `X ~ Bin(n, q)`, `i = 0..=n`.
fn binomial_pmf(n: u64, q: &BigRational) -> Vec<BigRational> {
    let r = BigRational::one() - q;
    (0..=n)
        .map(|i| {
            let c = BigRational::from_integer(binomial(n, i as i64));
            c * num_traits::pow(q.clone(), i as usize) * num_traits::pow(r.clone(), (n - i) as usize)
        })
        .collect()
}

struct TailTable {
    values: Vec<BigRational>,
    /// `cumulative[i] = P(X < values[i])`, with the total mass appended.
    cumulative: Vec<BigRational>,
}

impl TailTable {
    fn new(pmf: &Pmf) -> Self {
        let mut cumulative = vec![BigRational::zero()];
        let mut acc = BigRational::zero();
        for p in pmf.entries().values() {
            acc += p;
            cumulative.push(acc.clone());
        }
        Self {
            values: pmf.entries().keys().cloned().collect(),
            cumulative,
        }
    }

    /// `P(X < lo) + P(X > hi)`.
    fn outside(&self, lo: &BigRational, hi: &BigRational) -> BigRational {
        let below = self.values.partition_point(|v| v < lo);
        let through = self.values.partition_point(|v| v <= hi);
        &self.cumulative[below] + (BigRational::one() - &self.cumulative[through])
    }
}

/// Shape constraint on the weight vector explored by [`search_parameters`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightTemplate {
    /// `w_i = w_{k+1-i}`; suited to scale alternatives.
    Symmetric,
    /// `w_1 >= w_2 >= ... >= w_k`; suited to location alternatives.
    Monotone,
    Free,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightSearchConfig {
    pub k: usize,
    pub template: WeightTemplate,
    /// Candidate values for each free coordinate.
    pub grid: Vec<BigRational>,
    /// Random starting points in addition to the all-maximal start.
    pub restarts: usize,
    pub max_sweeps: usize,
}

impl WeightSearchConfig {
    /// Grid `{0, 1/steps, ..., 1}`.
    pub fn new(k: usize, template: WeightTemplate, steps: u32) -> Self {
        let grid = (0..=steps)
            .map(|i| BigRational::new(BigInt::from(i), BigInt::from(steps.max(1))))
            .collect();
        Self {
            k,
            template,
            grid,
            restarts: 2,
            max_sweeps: 8,
        }
    }

    fn free_coordinates(&self) -> usize {
        match self.template {
            WeightTemplate::Symmetric => self.k.div_ceil(2),
            WeightTemplate::Monotone | WeightTemplate::Free => self.k,
        }
    }

    fn expand(&self, theta: &[usize]) -> Result<WeightVector> {
        let value = |i: usize| self.grid[theta[i]].clone();
        let entries = match self.template {
            WeightTemplate::Symmetric => (0..self.k).map(|i| value(i.min(self.k - 1 - i))).collect(),
            _ => (0..self.k).map(value).collect(),
        };
        WeightVector::new(entries)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    pub p: u32,
    pub weights: WeightVector,
    pub objective: f64,
    pub evaluations: usize,
}

/// Coordinate descent over `p_grid` and a templated rational weight grid.
///
/// Candidates equal to the zero vector are skipped, as are candidates whose
/// objective is not finite. Ties keep the earlier point, so the outcome is a
/// function of the inputs and `seed` alone.
pub fn search_parameters<F>(
    mut objective: F,
    p_grid: &[u32],
    config: &WeightSearchConfig,
    seed: u64,
) -> Result<SearchOutcome>
where
    F: FnMut(u32, &WeightVector) -> Result<f64>,
{
    if p_grid.is_empty() || config.grid.is_empty() {
        return Err(Error::InvalidArgument("search grids must be non-empty".into()));
    }
    if config.k == 0 {
        return Err(Error::InvalidArgument("search needs k >= 1".into()));
    }
    let mut order: Vec<usize> = (0..config.grid.len()).collect();
    order.sort_by(|&a, &b| config.grid[a].cmp(&config.grid[b]));
    let dims = config.free_coordinates();
    let top = *order.last().expect("non-empty");

    let mut cache: HashMap<(u32, Vec<usize>), f64> = HashMap::new();
    let mut evaluate = |p: u32, theta: &[usize]| -> Result<f64> {
        if let Some(v) = cache.get(&(p, theta.to_vec())) {
            return Ok(*v);
        }
        let w = config.expand(theta)?;
        let v = if w.entries().iter().all(Zero::is_zero) {
            f64::INFINITY
        } else {
            objective(p, &w)?
        };
        let v = if v.is_nan() { f64::INFINITY } else { v };
        cache.insert((p, theta.to_vec()), v);
        Ok(v)
    };

    let mut rng = seeded_rng(derive_seed(seed, 0));
    let mut starts: Vec<Vec<usize>> = vec![vec![top; dims]];
    for _ in 0..config.restarts {
        let mut theta: Vec<usize> = (0..dims).map(|_| *order.choose(&mut rng).expect("non-empty")).collect();
        if config.template == WeightTemplate::Monotone {
            theta.sort_by(|&a, &b| config.grid[b].cmp(&config.grid[a]));
        }
        starts.push(theta);
    }

    let mut best: Option<(u32, Vec<usize>, f64)> = None;
    for &p in p_grid {
        for start in &starts {
            let mut theta = start.clone();
            let mut current = evaluate(p, &theta)?;
            for _ in 0..config.max_sweeps.max(1) {
                let mut improved = false;
                for d in 0..dims {
                    for &g in &order {
                        if g == theta[d] || !admissible(config, &theta, d, g) {
                            continue;
                        }
                        let mut trial = theta.clone();
                        trial[d] = g;
                        let v = evaluate(p, &trial)?;
                        if v < current {
                            current = v;
                            theta = trial;
                            improved = true;
                        }
                    }
                }
                if !improved {
                    break;
                }
            }
            if current.is_finite() && best.as_ref().is_none_or(|b| current < b.2) {
                best = Some((p, theta, current));
            }
        }
    }
    let evaluations = cache.len();
    let (p, theta, value) =
        best.ok_or_else(|| Error::InvalidArgument("no admissible candidate has a finite objective".into()))?;
    Ok(SearchOutcome {
        p,
        weights: config.expand(&theta)?,
        objective: value,
        evaluations,
    })
}

/// Whether coordinate `d` may take grid index `g` under the template.
fn admissible(config: &WeightSearchConfig, theta: &[usize], d: usize, g: usize) -> bool {
    if config.template != WeightTemplate::Monotone {
        return true;
    }
    let v = &config.grid[g];
    (d == 0 || v <= &config.grid[theta[d - 1]]) && (d + 1 == theta.len() || v >= &config.grid[theta[d + 1]])
}

/// Minimizes [`heteroskedastic_objective`] over symmetric or monotone
/// templates. Candidates whose null statistic is constant are skipped, since
/// they trivially score zero.
pub fn heteroskedastic_search(
    n: u64,
    f0: &BigRational,
    p_grid: &[u32],
    config: &WeightSearchConfig,
    seed: u64,
) -> Result<SearchOutcome> {
    search_parameters(
        |p, w| {
            let (value, support) = objective_parts(p, w, n, f0)?;
            Ok(if support <= 1 { f64::INFINITY } else { rational_to_f64(&value) })
        },
        p_grid,
        config,
        seed,
    )
}
