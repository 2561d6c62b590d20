//! Monte-Carlo power studies: alternative samplers, a shared seed schedule,
//! power and ROC estimates, Bonferroni ensembles, and `(p, w)` selection.
//!
//! Every replicate `r` draws its data from `derive_seed(seed, r)` and breaks
//! ties with a second stream derived from that seed, so all tests compared in
//! one study see identical data and results do not depend on worker count.

mod alternative;
mod objective;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{derive_seed, seeded_rng};
use crate::stattest::baselines::{
    chi2_uniformity, cvm_one_sample, cvm_two_sample, ks_one_sample, ks_two_sample, mann_whitney,
};
use crate::stattest::{NullCdfSpec, OneSampleTest, Side, TestResult, TwoSampleConfig, TwoSampleTest};

pub use alternative::{AlternativeSpec, ArrivalLaw, Design, Sample};
pub use objective::{
    heteroskedastic_objective, heteroskedastic_search, search_parameters, SearchOutcome, WeightSearchConfig,
    WeightTemplate, OBJECTIVE_PMF_CAP,
};

/// Fraction of replicates rejected at level `alpha`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerEstimate {
    pub power: f64,
    pub standard_error: f64,
    pub alpha: f64,
    pub replicates: usize,
    pub seed: u64,
}

impl PowerEstimate {
    pub fn from_p_values(p_values: &[f64], alpha: f64, seed: u64) -> Self {
        let replicates = p_values.len();
        let hits = p_values.iter().filter(|&&p| p <= alpha).count();
        let power = if replicates == 0 { 0.0 } else { hits as f64 / replicates as f64 };
        Self {
            power,
            standard_error: (power * (1.0 - power) / replicates.max(1) as f64).sqrt(),
            alpha,
            replicates,
            seed,
        }
    }
}

/// A test usable in power studies.
pub trait PowerTest: Sync {
    fn name(&self) -> String;
    /// P-value on one data set; `seed` drives tie-breaking.
    fn p_value(&self, sample: &Sample, seed: u64) -> Result<f64>;
}

fn wrong_sample(test: &str) -> Error {
    Error::InvalidArgument(format!("{test} does not accept this kind of sample"))
}

impl PowerTest for TwoSampleTest {
    fn name(&self) -> String {
        format!("spacing(p={}, w={})", self.spec().p, self.spec().weights)
    }

    fn p_value(&self, sample: &Sample, seed: u64) -> Result<f64> {
        match sample {
            Sample::TwoSample { x, y } => Ok(self.evaluate(x, y, seed)?.p_value),
            Sample::OneSample { .. } => Err(wrong_sample("a two-sample spacing test")),
        }
    }
}

impl PowerTest for OneSampleTest {
    fn name(&self) -> String {
        format!("spacing(p={}, w={})", self.spec().p, self.spec().weights)
    }

    fn p_value(&self, sample: &Sample, _seed: u64) -> Result<f64> {
        match sample {
            Sample::OneSample { z } => Ok(self.evaluate(z, &NullCdfSpec::Uniform)?.p_value),
            Sample::TwoSample { .. } => Err(wrong_sample("a one-sample spacing test")),
        }
    }
}

/// Classical comparison tests. One-sample variants test uniformity on `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Baseline {
    KolmogorovSmirnov,
    CramerVonMises,
    MannWhitney,
    /// Pearson chi-squared on equal-width bins; `bins = 0` picks `round(sqrt(N))`, at least 2.
    ChiSquared { bins: usize },
}

impl Baseline {
    fn chi2_bins(self, points: usize) -> usize {
        match self {
            Baseline::ChiSquared { bins } if bins > 0 => bins,
            _ => ((points as f64).sqrt().round() as usize).max(2),
        }
    }
}

impl PowerTest for Baseline {
    fn name(&self) -> String {
        self.to_string()
    }

    fn p_value(&self, sample: &Sample, _seed: u64) -> Result<f64> {
        let r = match (self, sample) {
            (Baseline::KolmogorovSmirnov, Sample::TwoSample { x, y }) => ks_two_sample(x, y, 0.05)?,
            (Baseline::CramerVonMises, Sample::TwoSample { x, y }) => cvm_two_sample(x, y, 0.05)?,
            (Baseline::MannWhitney, Sample::TwoSample { x, y }) => mann_whitney(x, y, Side::TwoSided, 0.05)?,
            (Baseline::KolmogorovSmirnov, Sample::OneSample { z }) => ks_one_sample(z, &NullCdfSpec::Uniform, 0.05)?,
            (Baseline::CramerVonMises, Sample::OneSample { z }) => cvm_one_sample(z, &NullCdfSpec::Uniform, 0.05)?,
            (Baseline::ChiSquared { .. }, Sample::OneSample { z }) => {
                chi2_uniformity(z, self.chi2_bins(z.len()), 0.05)?
            }
            _ => return Err(wrong_sample(&self.to_string())),
        };
        Ok(r.p_value)
    }
}

impl fmt::Display for Baseline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Baseline::KolmogorovSmirnov => write!(f, "ks"),
            Baseline::CramerVonMises => write!(f, "cvm"),
            Baseline::MannWhitney => write!(f, "mw"),
            Baseline::ChiSquared { bins: 0 } => write!(f, "chi2"),
            Baseline::ChiSquared { bins } => write!(f, "chi2:{bins}"),
        }
    }
}

impl FromStr for Baseline {
    type Err = Error;

    /// `ks`, `cvm`, `mw`, `chi2` or `chi2:<bins>`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        Ok(match t.as_str() {
            "ks" => Baseline::KolmogorovSmirnov,
            "cvm" => Baseline::CramerVonMises,
            "mw" => Baseline::MannWhitney,
            "chi2" => Baseline::ChiSquared { bins: 0 },
            _ => match t.strip_prefix("chi2:").map(str::parse::<usize>) {
                Some(Ok(bins)) if bins >= 2 => Baseline::ChiSquared { bins },
                _ => return Err(Error::InvalidArgument(format!("unknown baseline {s:?}"))),
            },
        })
    }
}

/// Bonferroni combination of two-sample spacing tests.
pub struct EnsembleTest {
    members: Vec<TwoSampleTest>,
    alpha: f64,
}

impl EnsembleTest {
    /// Prepares every member for a second sample of size `n`.
    pub fn prepare(configs: &[TwoSampleConfig], n: u64, alpha: f64) -> Result<Self> {
        if configs.is_empty() {
            return Err(Error::InvalidArgument("an ensemble needs at least one member".into()));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        let members = configs
            .iter()
            .map(|c| TwoSampleTest::prepare(&c.clone().alpha(alpha), n))
            .collect::<Result<_>>()?;
        Ok(Self { members, alpha })
    }

    pub fn members(&self) -> &[TwoSampleTest] {
        &self.members
    }

    /// Rejects when some member has `p <= alpha / |members|`; reports
    /// `min(1, |members| * min p)`. A single member reproduces its plain result.
    pub fn evaluate(&self, x: &[f64], y: &[f64], seed: u64) -> Result<TestResult> {
        let results = self
            .members
            .iter()
            .map(|m| m.evaluate(x, y, seed))
            .collect::<Result<Vec<_>>>()?;
        let size = results.len();
        let mut best = results
            .iter()
            .min_by(|a, b| a.p_value.total_cmp(&b.p_value))
            .cloned()
            .expect("non-empty");
        if size > 1 {
            let threshold = self.alpha / size as f64;
            best.test = format!("ensemble of {size}");
            best.reject = results.iter().any(|r| r.p_value <= threshold);
            best.p_value = (size as f64 * best.p_value).min(1.0);
            best.certified_error = (size as f64 * best.certified_error).min(1.0);
            best.warnings = results.into_iter().flat_map(|r| r.warnings).collect();
            best.warnings.dedup();
        }
        Ok(best)
    }
}

impl PowerTest for EnsembleTest {
    fn name(&self) -> String {
        let names: Vec<String> = self.members.iter().map(PowerTest::name).collect();
        format!("ensemble[{}]", names.join("; "))
    }

    fn p_value(&self, sample: &Sample, seed: u64) -> Result<f64> {
        match sample {
            Sample::TwoSample { x, y } => Ok(self.evaluate(x, y, seed)?.p_value),
            Sample::OneSample { .. } => Err(wrong_sample("an ensemble")),
        }
    }
}

/// One-shot Bonferroni ensemble over `(p, w)` configurations with default
/// method selection and two-sided p-values.
pub fn ensemble_test(
    configs: &[(u32, crate::WeightVector)],
    x: &[f64],
    y: &[f64],
    alpha: f64,
    seed: u64,
) -> Result<TestResult> {
    let configs: Vec<TwoSampleConfig> = configs.iter().map(|(p, w)| TwoSampleConfig::new(*p, w.clone())).collect();
    EnsembleTest::prepare(&configs, y.len() as u64, alpha)?.evaluate(x, y, seed)
}

/// P-values of each test on `replicates` shared data sets; indexed `[test][replicate]`.
pub fn simulate_p_values(
    tests: &[&dyn PowerTest],
    design: &Design,
    alt: &AlternativeSpec,
    replicates: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    alt.validate(design)?;
    let one = |r: usize| -> Result<Vec<f64>> {
        let data_seed = derive_seed(seed, r as u64);
        let sample = alt.draw(design, &mut seeded_rng(data_seed));
        let tie_seed = derive_seed(data_seed, 0);
        tests.iter().map(|t| t.p_value(&sample, tie_seed)).collect()
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        (0..replicates).into_par_iter().map(one).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Vec<f64>> = (0..replicates).map(one).collect::<Result<_>>()?;

    Ok((0..tests.len()).map(|t| rows.iter().map(|row| row[t]).collect()).collect())
}

pub fn estimate_power(
    test: &dyn PowerTest,
    design: &Design,
    alt: &AlternativeSpec,
    replicates: usize,
    alpha: f64,
    seed: u64,
) -> Result<PowerEstimate> {
    check_replicates(replicates)?;
    check_level(alpha)?;
    let p = simulate_p_values(&[test], design, alt, replicates, seed)?;
    Ok(PowerEstimate::from_p_values(&p[0], alpha, seed))
}

/// Power at each level in `alphas`, from one set of simulated p-values.
pub fn roc_curve(
    test: &dyn PowerTest,
    design: &Design,
    alt: &AlternativeSpec,
    replicates: usize,
    alphas: &[f64],
    seed: u64,
) -> Result<Vec<PowerEstimate>> {
    check_replicates(replicates)?;
    alphas.iter().try_for_each(|&a| check_level(a))?;
    let p = simulate_p_values(&[test], design, alt, replicates, seed)?;
    Ok(roc_from_p_values(&p[0], alphas, seed))
}

pub fn roc_from_p_values(p_values: &[f64], alphas: &[f64], seed: u64) -> Vec<PowerEstimate> {
    alphas.iter().map(|&a| PowerEstimate::from_p_values(p_values, a, seed)).collect()
}

/// Levels `0.01, 0.02, ..., 1`.
pub fn default_alpha_grid() -> Vec<f64> {
    (1..=100).map(|i| i as f64 / 100.0).collect()
}

/// `alpha,power,se` lines with a header.
pub fn to_csv(curve: &[PowerEstimate]) -> String {
    let mut out = String::from("alpha,power,se\n");
    for e in curve {
        out.push_str(&format!("{},{},{}\n", e.alpha, e.power, e.standard_error));
    }
    out
}

/// Sizes the global worker pool; only the first call takes effect.
#[cfg(feature = "parallel")]
pub fn configure_threads(threads: usize) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::InvalidArgument(format!("cannot configure worker threads: {e}")))
}

fn check_replicates(replicates: usize) -> Result<()> {
    if replicates == 0 {
        return Err(Error::InvalidArgument("replicates must be >= 1".into()));
    }
    Ok(())
}

fn check_level(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("level {alpha} outside [0, 1]")));
    }
    Ok(())
}
