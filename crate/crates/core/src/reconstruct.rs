//! Distribution functions recovered from exact moment sequences.
//!
//! With `M` moments of a variable `X` on `[0, 1]`, the estimator
//! `F(x) = sum_{j <= Mx} C(M, j) (-1)^{M-j} (Delta^{M-j} mu)_j` is the CDF of
//! `J / M` where `J | X ~ Binomial(M, X)`. All differences are taken in exact
//! integer arithmetic over the sequence's common denominator.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::moments::{MomentSequence, StatisticSpec};
use crate::numeric::{binomial, ratio_to_f64, rational_to_f64};

/// Constant `f_sup + 2 f'_sup + 2` assumed when no density bounds are known.
pub const DEFAULT_CONTINUOUS_CONSTANT: f64 = 12.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistributionKind {
    Continuous,
    Discrete,
}

/// Regularity information used to certify the reconstruction error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ErrorProfile {
    Continuous { f_sup: f64, fprime_sup: f64 },
    Discrete { support_size: u64, mesh: f64 },
}

/// Sup-norm error certificate for `M` moments.
///
/// Continuous: `(f_sup + 2 f'_sup + 2) / (M + 1)`. Discrete, away from an
/// `epsilon`-neighbourhood of the atoms: `2 e^{-2 M eps^2} + (|supp| - 2) e^{-2 M h^2}`.
pub fn error_bound(profile: ErrorProfile, m: usize, epsilon: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidArgument("error bound needs M >= 1".into()));
    }
    let mf = m as f64;
    match profile {
        ErrorProfile::Continuous { f_sup, fprime_sup } => {
            if !(f_sup >= 0.0 && fprime_sup >= 0.0 && f_sup.is_finite() && fprime_sup.is_finite()) {
                return Err(Error::InvalidArgument("density bounds must be finite and non-negative".into()));
            }
            Ok((f_sup + 2.0 * fprime_sup + 2.0) / (mf + 1.0))
        }
        ErrorProfile::Discrete { support_size, mesh } => {
            if support_size == 0 || !(mesh > 0.0) || !(epsilon > 0.0) || epsilon >= mesh / 2.0 {
                return Err(Error::InvalidArgument(
                    "discrete bound needs a non-empty support, mesh h > 0 and 0 < epsilon < h/2".into(),
                ));
            }
            let extra = support_size.saturating_sub(2) as f64;
            Ok(2.0 * (-2.0 * mf * epsilon * epsilon).exp() + extra * (-2.0 * mf * mesh * mesh).exp())
        }
    }
}

/// Moment count `ceil(C / epsilon)` reaching a target continuous sup error.
pub fn moments_for_tolerance(epsilon: f64, constant: Option<f64>) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument("target error must lie in (0, 1)".into()));
    }
    Ok((constant.unwrap_or(DEFAULT_CONTINUOUS_CONSTANT) / epsilon).ceil() as usize)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuantileSide {
    Lower,
    Upper,
}

/// Reconstructed step CDF on `[0, 1]` with jumps at `j / M`.
#[derive(Clone, Debug)]
pub struct CdfEstimate {
    spec: StatisticSpec,
    scale: BigRational,
    kind: DistributionKind,
    order: usize,
    masses: Vec<f64>,
    cumulative: Vec<f64>,
    upper: Vec<f64>,
    error_bound: f64,
    lattice: Option<BigInt>,
}

impl CdfEstimate {
    pub fn spec(&self) -> &StatisticSpec {
        &self.spec
    }

    pub fn scale(&self) -> &BigRational {
        &self.scale
    }

    pub fn kind(&self) -> DistributionKind {
        self.kind
    }

    /// Number of moments `M` used.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Mass placed at `j / M`, for `j = 0..=M`.
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn error_bound(&self) -> f64 {
        self.error_bound
    }

    /// For discrete statistics, the integer `L` such that every atom of the
    /// normalized statistic is a multiple of `1 / L`.
    pub fn lattice(&self) -> Option<&BigInt> {
        self.lattice.as_ref()
    }

    /// Replaces the certificate, e.g. with one built from known density bounds.
    pub fn with_error_bound(mut self, bound: f64) -> Self {
        self.error_bound = bound;
        self
    }

    /// Largest grid index `j` with `j / M <= x`, or `None` for `x < 0`.
    pub fn grid_index(&self, x: f64) -> Option<usize> {
        if x.is_nan() || x < 0.0 {
            return None;
        }
        let j = (self.order as f64 * x + 1e-9).floor();
        Some((j as usize).min(self.order))
    }

    /// `F(x)` for the normalized variable.
    pub fn cdf(&self, x: f64) -> f64 {
        match self.grid_index(x) {
            None => 0.0,
            Some(j) => self.cumulative_at(j),
        }
    }

    /// `F` evaluated at `value / scale`.
    pub fn cdf_raw(&self, value: f64) -> f64 {
        self.cdf(value / rational_to_f64(&self.scale))
    }

    /// `sum_{i <= j} mass_i`.
    pub fn cumulative_at(&self, j: usize) -> f64 {
        self.cumulative[j.min(self.order)]
    }

    /// `sum_{i >= j} mass_i`, accurate in the right tail.
    pub fn upper_tail_at(&self, j: usize) -> f64 {
        self.upper.get(j).copied().unwrap_or(0.0)
    }

    /// Lower: `inf{x : F(x) >= q}`. Upper: `sup{x : F(x) <= q}`.
    pub fn quantile(&self, q: f64, side: QuantileSide) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidArgument(format!("quantile level {q} outside (0, 1)")));
        }
        let m = self.order as f64;
        Ok(match side {
            QuantileSide::Lower => {
                let j = self.cumulative.partition_point(|&c| c < q);
                (j.min(self.order)) as f64 / m.max(1.0)
            }
            QuantileSide::Upper => {
                let j = self.cumulative.partition_point(|&c| c <= q);
                if j > self.order {
                    1.0
                } else {
                    j as f64 / m.max(1.0)
                }
            }
        })
    }
}

/// Bernstein masses `C(M, j) (-1)^{M-j} (Delta^{M-j} mu)_j` as exact integers
/// over the sequence denominator. Fails if any finite difference has the
/// wrong sign.
pub fn bernstein_numerators(moments: &MomentSequence, m: usize) -> Result<Vec<BigInt>> {
    if m > moments.max_order() {
        return Err(Error::NotEnoughMoments {
            requested: m,
            available: moments.max_order(),
        });
    }
    let mut row: Vec<BigInt> = moments.numerators()[..=m].to_vec();
    let mut diag = vec![BigInt::zero(); m + 1];
    for r in 0..=m {
        if let Some(j) = row.iter().position(Signed::is_negative) {
            return Err(Error::InvalidMoments { order: r, index: j });
        }
        // Row r has entries j = 0..=M-r; its last one is (-Delta)^r mu_{M-r}.
        let j = m - r;
        diag[j] = binomial(m as u64, j as i64) * &row[j];
        for i in 0..row.len() - 1 {
            let (head, tail) = row.split_at_mut(i + 1);
            head[i] -= &tail[0];
        }
        row.pop();
    }
    let total: BigInt = diag.iter().sum();
    if &total != moments.numerators().first().expect("mu_0") || &total != moments.denominator() {
        return Err(Error::InvalidMoments { order: 0, index: 0 });
    }
    Ok(diag)
}

fn lattice_of(moments: &MomentSequence) -> BigInt {
    let (_, den) = moments.spec().weights.integer_form();
    (moments.scale() * BigRational::from_integer(den)).to_integer()
}

/// Reconstructs the CDF of the normalized statistic from its first `m` moments.
pub fn reconstruct_cdf(moments: &MomentSequence, m: usize) -> Result<CdfEstimate> {
    if m == 0 {
        return Err(Error::InvalidArgument("reconstruction needs M >= 1".into()));
    }
    let numerators = bernstein_numerators(moments, m)?;
    let den = moments.denominator();
    let masses: Vec<f64> = numerators.iter().map(|x| ratio_to_f64(x, den)).collect();
    let mut cumulative = Vec::with_capacity(m + 1);
    let mut acc = 0.0;
    for &x in &masses {
        acc += x;
        cumulative.push(acc.min(1.0));
    }
    cumulative[m] = 1.0;
    let mut upper = vec![0.0; m + 1];
    let mut acc = 0.0;
    for j in (0..=m).rev() {
        acc += masses[j];
        upper[j] = acc.min(1.0);
    }
    upper[0] = 1.0;

    let spec = moments.spec().clone();
    let (kind, lattice, bound) = if spec.is_discrete() {
        let l = lattice_of(moments);
        let lf = ratio_to_f64(&l, &BigInt::from(1));
        let mesh = 1.0 / lf;
        let eps = mesh / 2.0 * (1.0 - 1e-9);
        let support = (&l + 1u32).to_u64().unwrap_or(u64::MAX);
        let b = error_bound(ErrorProfile::Discrete { support_size: support, mesh }, m, eps)?;
        (DistributionKind::Discrete, Some(l), b.min(1.0))
    } else {
        let b = DEFAULT_CONTINUOUS_CONSTANT / (m as f64 + 1.0);
        (DistributionKind::Continuous, None, b.min(1.0))
    };
    Ok(CdfEstimate {
        spec,
        scale: moments.scale().clone(),
        kind,
        order: m,
        masses,
        cumulative,
        upper,
        error_bound: bound,
        lattice,
    })
}

/// Leading coefficient `c` in `f(x) ~ c (1 - x)^{k-2}` near the top of the
/// support: `(k-1) W / p^{k-1}` with `W` the number of unit weights.
pub fn tail_leading_coefficient(spec: &StatisticSpec) -> Result<BigRational> {
    if spec.is_discrete() {
        return Err(Error::WrongMode { expected: "continuous" });
    }
    let k = spec.k();
    if k < 2 {
        return Err(Error::InvalidArgument("tail expansion needs k >= 2".into()));
    }
    let one = BigRational::from_integer(1.into());
    if spec.weights.entries().iter().any(|w| w.is_negative() || *w > one) {
        return Err(Error::InvalidArgument("tail expansion needs weights in [0, 1]".into()));
    }
    let ones = spec.weights.count_ones();
    if ones == 0 {
        return Err(Error::Unsupported("no weight equals one, so the density vanishes to higher order at 1".into()));
    }
    Ok(BigRational::new(
        BigInt::from((k - 1) * ones),
        BigInt::from(spec.p).pow(k as u32 - 1),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{continuous_moments, discrete_moments, WeightVector};
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn fixture(moments: Vec<BigRational>) -> MomentSequence {
        let spec = StatisticSpec::greenwood(2).unwrap();
        MomentSequence::from_rationals(spec, q(1, 1), &moments).unwrap()
    }

    fn uniform(m: usize) -> MomentSequence {
        fixture((0..=m as i64).map(|i| q(1, i + 1)).collect())
    }

    #[test]
    fn uniform_fixture_is_within_certificate() {
        let est = reconstruct_cdf(&uniform(50), 50).unwrap();
        let bound = error_bound(ErrorProfile::Continuous { f_sup: 1.0, fprime_sup: 0.0 }, 50, 0.0).unwrap();
        assert!((bound - 3.0 / 51.0).abs() < 1e-15);
        let worst = (0..=1000)
            .map(|i| i as f64 / 1000.0)
            .map(|x| (est.cdf(x) - x).abs())
            .fold(0.0, f64::max);
        assert!(worst <= bound, "sup error {worst}");
        // Every Bernstein mass of the uniform law equals 1/(M+1).
        assert!(est.masses().iter().all(|m| (m - 1.0 / 51.0).abs() < 1e-15));
        let median = est.quantile(0.5, QuantileSide::Lower).unwrap();
        assert!((median - 0.5).abs() <= bound);
    }

    #[test]
    fn point_masses() {
        let at_one = reconstruct_cdf(&fixture(vec![q(1, 1); 11]), 10).unwrap();
        for i in 0..100 {
            assert_eq!(at_one.cdf(i as f64 / 100.0), 0.0);
        }
        assert_eq!(at_one.cdf(1.0), 1.0);
        assert_eq!(at_one.quantile(0.99, QuantileSide::Lower).unwrap(), 1.0);

        let mut zero = vec![q(0, 1); 11];
        zero[0] = q(1, 1);
        let at_zero = reconstruct_cdf(&fixture(zero), 10).unwrap();
        for i in 0..=100 {
            assert_eq!(at_zero.cdf(i as f64 / 100.0), 1.0);
        }
        assert_eq!(at_zero.cdf(-0.1), 0.0);
    }

    #[test]
    fn quantile_edges() {
        let est = reconstruct_cdf(&uniform(10), 10).unwrap();
        // First jump is 1/11 at x = 0.
        assert_eq!(est.quantile(0.05, QuantileSide::Lower).unwrap(), 0.0);
        assert_eq!(est.quantile(0.05, QuantileSide::Upper).unwrap(), 0.0);
        assert_eq!(est.quantile(0.10, QuantileSide::Upper).unwrap(), 0.1);
        assert!(est.quantile(0.0, QuantileSide::Lower).is_err());
        assert!(est.quantile(1.0, QuantileSide::Upper).is_err());
    }

    #[test]
    fn error_bound_formulas() {
        let d = error_bound(ErrorProfile::Discrete { support_size: 2, mesh: 0.5 }, 500, 0.1).unwrap();
        assert!((d - 2.0 * (-10.0f64).exp()).abs() < 1e-18);
        let c = |m| error_bound(ErrorProfile::Continuous { f_sup: 2.0, fprime_sup: 1.0 }, m, 0.0).unwrap();
        assert!((c(500) / c(50) - 51.0 / 501.0).abs() < 1e-12);
        assert!(error_bound(ErrorProfile::Discrete { support_size: 3, mesh: 0.1 }, 10, 0.06).is_err());
        assert!(error_bound(ErrorProfile::Continuous { f_sup: -1.0, fprime_sup: 0.0 }, 10, 0.0).is_err());
        assert!(error_bound(ErrorProfile::Continuous { f_sup: 1.0, fprime_sup: 0.0 }, 0, 0.0).is_err());
        assert_eq!(moments_for_tolerance(0.01, None).unwrap(), 1200);
    }

    #[test]
    fn invalid_sequences_are_rejected() {
        // mu_2 > mu_1 is impossible on [0, 1].
        let bad = fixture(vec![q(1, 1), q(1, 4), q(1, 2)]);
        assert!(matches!(reconstruct_cdf(&bad, 2), Err(Error::InvalidMoments { .. })));
        assert!(matches!(reconstruct_cdf(&uniform(3), 4), Err(Error::NotEnoughMoments { .. })));
    }

    #[test]
    fn discrete_reconstruction_recovers_atoms() {
        let spec = StatisticSpec::discrete(4, 2, WeightVector::ones(3).unwrap()).unwrap();
        let est = reconstruct_cdf(&discrete_moments(&spec, 400).unwrap(), 400).unwrap();
        assert_eq!(est.kind(), DistributionKind::Discrete);
        assert_eq!(est.lattice(), Some(&BigInt::from(16)));
        let true_cdf = |x: f64| -> f64 {
            [(6.0, 3.0), (8.0, 3.0), (10.0, 6.0), (16.0, 3.0)]
                .iter()
                .filter(|(v, _)| v / 16.0 <= x)
                .map(|(_, c)| c / 15.0)
                .sum()
        };
        for x in [0.2, 0.44, 0.56, 0.8, 0.95] {
            assert!((est.cdf(x) - true_cdf(x)).abs() < 0.05, "x={x}");
        }
    }

    #[test]
    fn tail_coefficients() {
        assert_eq!(tail_leading_coefficient(&StatisticSpec::greenwood(4).unwrap()).unwrap(), q(3, 2));
        let half = StatisticSpec::continuous(2, WeightVector::parse("1,1/2").unwrap()).unwrap();
        assert_eq!(tail_leading_coefficient(&half).unwrap(), q(1, 2));
        for k in 2..=10usize {
            let c = tail_leading_coefficient(&StatisticSpec::greenwood(k).unwrap()).unwrap();
            let kk = k as i64;
            assert_eq!(c, q(kk * (kk - 1) / 2, 1 << (k - 2)));
        }
        let none = StatisticSpec::continuous(2, WeightVector::parse("1/2,1/2").unwrap()).unwrap();
        assert!(matches!(tail_leading_coefficient(&none), Err(Error::Unsupported(_))));
        // p = 3, k = 2: 1 - S = 3u(1-u), so the density at the top is 2/3.
        let cube = StatisticSpec::continuous(3, WeightVector::ones(2).unwrap()).unwrap();
        assert_eq!(tail_leading_coefficient(&cube).unwrap(), q(2, 3));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn estimates_are_monotone_distributions(
            k in 2usize..6, p in 1u32..4, raw in prop::collection::vec(0i64..4, 6), m in 1usize..40,
        ) {
            let w: Vec<i64> = raw.into_iter().take(k).collect();
            prop_assume!(w.iter().any(|x| *x != 0));
            let spec = StatisticSpec::continuous(p, WeightVector::from_integers(&w).unwrap()).unwrap();
            let est = reconstruct_cdf(&continuous_moments(&spec, m).unwrap(), m).unwrap();
            prop_assert!(est.masses().iter().all(|x| *x >= 0.0));
            prop_assert!((est.masses().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let mut last = 0.0;
            for i in 0..=200 {
                let v = est.cdf(i as f64 / 200.0);
                prop_assert!(v >= last && (0.0..=1.0).contains(&v));
                last = v;
            }
            prop_assert_eq!(est.cdf(1.0), 1.0);
        }
    }
}
