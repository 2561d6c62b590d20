use super::*;
use proptest::prelude::*;

fn counts(v: &SpacingVector) -> Vec<u64> {
    v.counts().unwrap().to_vec()
}

#[test]
fn two_sample_spacing_examples() {
    assert_eq!(counts(&two_sample_spacings(&[0.5], &[0.1, 0.9], 0).unwrap()), vec![1, 1]);
    assert_eq!(
        counts(&two_sample_spacings(&[1.0, 2.0], &[0.5, 1.5, 1.7, 3.0], 0).unwrap()),
        vec![1, 2, 1]
    );
    let a = counts(&two_sample_spacings(&[1.0], &[1.0, 1.0], 42).unwrap());
    assert_eq!(a.iter().sum::<u64>(), 2);
    assert_eq!(a.len(), 2);
    assert_eq!(a, counts(&two_sample_spacings(&[1.0], &[1.0, 1.0], 42).unwrap()));
    // Different seeds eventually produce different tie resolutions.
    let outcomes: std::collections::BTreeSet<Vec<u64>> = (0..64)
        .map(|s| counts(&two_sample_spacings(&[1.0], &[1.0, 1.0], s).unwrap()))
        .collect();
    assert_eq!(outcomes.len(), 3);
    assert!(matches!(two_sample_spacings(&[], &[1.0], 0), Err(Error::EmptyInput(_))));
    assert!(two_sample_spacings(&[f64::NAN], &[1.0], 0).is_err());
    assert_eq!(counts(&two_sample_spacings(&[0.0], &[-0.0], 3).unwrap()).iter().sum::<u64>(), 1);
}

#[test]
fn one_sample_spacing_examples() {
    let normal = NullCdfSpec::normal(2.0, 3.0).unwrap();
    let g = one_sample_spacings(&[2.0], &normal).unwrap();
    assert_eq!(g.gaps().unwrap(), &[0.5, 0.5]);
    let g = one_sample_spacings(&[0.7, 0.2], &NullCdfSpec::Uniform).unwrap();
    let g = g.gaps().unwrap();
    for (a, b) in g.iter().zip([0.2, 0.5, 0.3]) {
        assert!((a - b).abs() < 1e-15);
    }
    assert_eq!(one_sample_spacings(&[1.0], &NullCdfSpec::Uniform).unwrap().gaps().unwrap(), &[1.0, 0.0]);
    assert!(matches!(
        one_sample_spacings(&[-0.1], &NullCdfSpec::exponential(1.0).unwrap()),
        Err(Error::OutsideSupport { .. })
    ));
    assert!(one_sample_spacings(&[], &NullCdfSpec::Uniform).is_err());
}

#[test]
fn empty_second_sample_gives_p_one() {
    for method in [MethodChoice::Auto, MethodChoice::OraclePmf, MethodChoice::ExactMoments] {
        let cfg = TwoSampleConfig::new(2, WeightVector::ones(3).unwrap()).method(method);
        let r = two_sample_test(&[0.2, 0.4], &[], &cfg, 1).unwrap();
        assert_eq!(r.raw_statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert!(!r.reject);
    }
}

#[test]
fn maximal_statistic_tail_is_single_bin_probability() {
    let (n, k) = (6u64, 4usize);
    let cfg = TwoSampleConfig::new(2, WeightVector::ones(k).unwrap())
        .side(Side::Right)
        .method(MethodChoice::OraclePmf);
    let x = [1.0, 2.0, 3.0];
    let y = vec![10.0; n as usize];
    let r = two_sample_test(&x, &y, &cfg, 0).unwrap();
    assert_eq!(r.method, Method::OraclePmf);
    assert_eq!(r.raw_statistic, 36.0);
    let single_bin = k as f64 / crate::numeric::rational_to_f64(&BigRational::from_integer(crate::numeric::binomial(n + k as u64 - 1, k as i64 - 1)));
    assert!(r.p_value <= single_bin + 1e-15);
    assert!((r.p_value - single_bin).abs() < 1e-15);
    assert_eq!(r.normalized_statistic, 1.0);
}

#[test]
fn tail_probabilities_follow_the_oracle() {
    let spec = StatisticSpec::discrete(5, 2, WeightVector::from_integers(&[1, 2, 1]).unwrap()).unwrap();
    let cfg = TwoSampleConfig::new(2, spec.weights.clone()).method(MethodChoice::OraclePmf);
    let test = TwoSampleTest::prepare(&cfg, 5).unwrap();
    let pmf = exact_pmf(&spec).unwrap();
    for c in crate::oracle::enumerate_compositions(5, 3) {
        let s = spec.evaluate_counts(c.parts()).unwrap();
        let (l, r) = test.tail_probabilities(&s);
        assert_eq!(l, rational_to_f64(&pmf.cdf(&s)));
        assert_eq!(r, rational_to_f64(&pmf.sf(&s)));
    }
}

#[test]
fn exact_moments_agree_with_oracle_within_certificate() {
    // Small lattices keep the discrete certificate informative.
    let cases: [(u64, u32, &[i64]); 6] = [
        (3, 1, &[1, 0]),
        (4, 1, &[2, 1, 0]),
        (2, 2, &[1, 1]),
        (3, 2, &[1, 0, 1]),
        (8, 2, &[1, 1, 1, 1]),
        (6, 1, &[3, 2, 1, 0]),
    ];
    let m = 600;
    let mut informative = 0;
    for (n, p, w) in cases {
        let weights = WeightVector::from_integers(w).unwrap();
        let exact = TwoSampleTest::prepare(
            &TwoSampleConfig::new(p, weights.clone()).method(MethodChoice::ExactMoments).moments(m),
            n,
        )
        .unwrap();
        let oracle =
            TwoSampleTest::prepare(&TwoSampleConfig::new(p, weights.clone()).method(MethodChoice::OraclePmf), n)
                .unwrap();
        let bound = exact.certified_error();
        if bound < 0.05 {
            informative += 1;
        }
        for c in crate::oracle::enumerate_compositions(n, w.len()) {
            let s = exact.spec().evaluate_counts(c.parts()).unwrap();
            let (el, er) = exact.tail_probabilities(&s);
            let (ol, or) = oracle.tail_probabilities(&s);
            assert!((el - ol).abs() <= bound + 1e-12, "n={n} w={w:?} left {el} vs {ol}, bound {bound}");
            assert!((er - or).abs() <= bound + 1e-12, "n={n} w={w:?} right {er} vs {or}, bound {bound}");
        }
    }
    assert!(informative >= 3);
}

#[test]
fn automatic_method_selection() {
    let small = StatisticSpec::discrete(8, 2, WeightVector::ones(4).unwrap()).unwrap();
    assert_eq!(select_method(&small, 400), Method::OraclePmf);
    let scale_w = WeightVector::parse("1,1/5,1/10,0,0,0,0,1/10,1/5,1").unwrap();
    let spec = StatisticSpec::discrete(30, 1, scale_w.clone()).unwrap();
    assert_eq!(select_method(&spec, 400), Method::ExactMoments);
    let big = StatisticSpec::discrete(20_000, 2, WeightVector::ones(30).unwrap()).unwrap();
    assert_eq!(select_method(&big, 400), Method::Clt);
    // A zero weight rules out the normal approximation.
    let big_zero = StatisticSpec::discrete(20_000, 1, scale_w).unwrap();
    assert_eq!(select_method(&big_zero, 400), Method::ExactMoments);
}

#[test]
fn oracle_beyond_cap_is_an_error() {
    let cfg = TwoSampleConfig::new(1, WeightVector::ones(10).unwrap()).method(MethodChoice::OraclePmf);
    assert!(matches!(TwoSampleTest::prepare(&cfg, 30), Err(Error::SizeCap { .. })));
}

#[test]
fn clt_with_few_bins_warns() {
    let cfg = TwoSampleConfig::new(2, WeightVector::ones(5).unwrap()).method(MethodChoice::Clt);
    let r = two_sample_test(&[0.1, 0.2, 0.3, 0.4], &[0.15, 0.5, 0.9], &cfg, 0).unwrap();
    assert_eq!(r.method, Method::Clt);
    assert_eq!(r.warnings.len(), 1);
    let cfg = TwoSampleConfig::new(2, WeightVector::from_integers(&[1, 0, 1]).unwrap()).method(MethodChoice::Clt);
    assert!(two_sample_test(&[0.1, 0.2], &[0.3], &cfg, 0).is_err());
    // p = 1 with unit weights is constant, so the standardization is undefined.
    let cfg = TwoSampleConfig::new(1, WeightVector::ones(25).unwrap()).method(MethodChoice::Clt);
    assert!(matches!(TwoSampleTest::prepare(&cfg, 40), Err(Error::Unsupported(_))));
}

#[test]
fn clt_pvalue_examples() {
    let spec = StatisticSpec::discrete(50, 2, WeightVector::ones(40).unwrap()).unwrap();
    let params = CltParameters::new(&spec).unwrap();
    let mean = params.mean * params.weight_sum;
    let sd = params.sd * params.weight_norm;
    let at_mean = clt_pvalue(&spec, mean, Side::TwoSided).unwrap();
    assert_eq!(at_mean.z, 0.0);
    assert_eq!(at_mean.p_value, 1.0);
    let shifted = clt_pvalue(&spec, mean + 1.959963984540054 * sd, Side::TwoSided).unwrap();
    assert!((shifted.p_value - 0.05).abs() < 1e-9);
    // Unit weights: mean and variance are those of the statistic itself.
    let exact = discrete_moments(&spec, 2).unwrap();
    assert!((mean - rational_to_f64(&exact.raw_moment(1))).abs() < 1e-9);
    let zero = StatisticSpec::discrete(5, 2, WeightVector::from_integers(&[1, 0]).unwrap()).unwrap();
    assert!(clt_pvalue(&zero, 1.0, Side::Right).is_err());
    let cont = StatisticSpec::greenwood(3).unwrap();
    assert!(clt_pvalue(&cont, 1.0, Side::Right).is_err());
}

#[test]
fn one_sample_support_floor_and_hand_values() {
    let cfg = OneSampleConfig::greenwood(9).unwrap().side(Side::Left).moments(600);
    let test = OneSampleTest::prepare(&cfg).unwrap();
    let z: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let r = test.evaluate(&z, &NullCdfSpec::Uniform).unwrap();
    assert!((r.raw_statistic - 0.1).abs() < 1e-15);
    assert!(r.p_value <= r.certified_error, "p {} bound {}", r.p_value, r.certified_error);
    assert!((r.certified_error - 12.0 / 601.0).abs() < 1e-15);

    let cfg = OneSampleConfig::greenwood(1).unwrap().moments(50);
    let r = one_sample_test(&[0.0], &NullCdfSpec::normal(0.0, 1.0).unwrap(), &cfg).unwrap();
    assert!((r.raw_statistic - 0.5).abs() < 1e-15);
    assert_eq!(r.method, Method::ExactMoments);
    assert!(one_sample_test(&[0.1, 0.2], &NullCdfSpec::Uniform, &cfg).is_err());
}

#[test]
fn one_sample_greenwood_k2_tails() {
    // For k = 2 the normalized Greenwood statistic 1 - 2U(1-U) has
    // P(T <= t) = sqrt(2t - 1) on [1/2, 1].
    let cfg = OneSampleConfig::greenwood(1).unwrap().side(Side::Right).moments(400);
    let test = OneSampleTest::prepare(&cfg).unwrap();
    for u in [0.05, 0.2, 0.4] {
        let r = test.evaluate(&[u], &NullCdfSpec::Uniform).unwrap();
        let t = r.normalized_statistic;
        let truth = 1.0 - (2.0 * t - 1.0).sqrt();
        assert!((r.p_value - truth).abs() < 0.05, "u={u}: {} vs {truth}", r.p_value);
    }
}

#[test]
fn degenerate_weights_give_p_one() {
    let w = WeightVector::from_integers(&[0, 0, 0]).unwrap();
    let r = two_sample_test(&[0.1, 0.6], &[0.2, 0.3, 0.9], &TwoSampleConfig::new(2, w.clone()), 5).unwrap();
    assert_eq!(r.p_value, 1.0);
    let r = one_sample_test(&[0.1, 0.6], &NullCdfSpec::Uniform, &OneSampleConfig::new(2, w)).unwrap();
    assert_eq!(r.p_value, 1.0);
}

#[test]
fn results_are_deterministic() {
    let cfg = TwoSampleConfig::new(2, WeightVector::parse("1,1/2,1/3,1").unwrap()).method(MethodChoice::ExactMoments).moments(60);
    let x = [0.3, 0.3, 0.9];
    let y = [0.3, 0.1, 0.5, 0.95, 0.3, 0.6];
    let a = two_sample_test(&x, &y, &cfg, 11).unwrap();
    let b = two_sample_test(&x, &y, &cfg, 11).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.p_value.to_bits(), b.p_value.to_bits());
    assert_eq!(a.seed, 11);
    assert!(a.exact_statistic.is_some());
}

#[test]
fn wrong_sample_sizes_are_rejected() {
    let cfg = TwoSampleConfig::new(2, WeightVector::ones(3).unwrap());
    let test = TwoSampleTest::prepare(&cfg, 2).unwrap();
    assert!(test.evaluate(&[0.1], &[0.2, 0.3], 0).is_err());
    assert!(test.evaluate_counts(&[1, 0, 0], 0).is_err());
    assert!(TwoSampleTest::prepare(&cfg.clone().alpha(0.0), 2).is_err());
    assert!(TwoSampleTest::prepare(&TwoSampleConfig::new(2, WeightVector::ones(1).unwrap()), 2).is_err());
}

#[test]
fn parse_sides_and_methods() {
    assert_eq!("two-sided".parse::<Side>().unwrap(), Side::TwoSided);
    assert_eq!("left".parse::<Side>().unwrap(), Side::Left);
    assert!("up".parse::<Side>().is_err());
    assert_eq!("exact-moments".parse::<MethodChoice>().unwrap(), MethodChoice::ExactMoments);
    assert_eq!("oracle-pmf".parse::<MethodChoice>().unwrap(), MethodChoice::OraclePmf);
    assert!("bootstrap".parse::<MethodChoice>().is_err());
    assert_eq!(Side::TwoSided.combine(0.3, 0.8), 0.6);
    assert_eq!(Side::TwoSided.combine(0.7, 0.8), 1.0);
}

#[test]
fn big_statistics_stay_exact() {
    let w = WeightVector::parse("1/3,1/7").unwrap();
    let cfg = TwoSampleConfig::new(3, w).method(MethodChoice::OraclePmf);
    let r = two_sample_test(&[0.5], &[0.1, 0.2, 0.7], &cfg, 0).unwrap();
    // 2^3 / 3 + 1 / 7
    assert_eq!(r.exact_statistic.as_deref(), Some("59/21"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn increasing_transforms_leave_results_unchanged(
        x in prop::collection::vec(-5i32..5, 1..5),
        y in prop::collection::vec(-5i32..5, 0..7),
        seed in any::<u64>(),
    ) {
        let xf: Vec<f64> = x.iter().map(|&v| v as f64 / 2.0).collect();
        let yf: Vec<f64> = y.iter().map(|&v| v as f64 / 2.0).collect();
        let t = |v: &f64| v.exp() * 3.0 + v.powi(3);
        let xt: Vec<f64> = xf.iter().map(t).collect();
        let yt: Vec<f64> = yf.iter().map(t).collect();
        let a = two_sample_spacings(&xf, &yf, seed).unwrap();
        let b = two_sample_spacings(&xt, &yt, seed).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.counts().unwrap().iter().sum::<u64>(), y.len() as u64);
        let cfg = TwoSampleConfig::new(2, WeightVector::ones(x.len() + 1).unwrap());
        let ra = two_sample_test(&xf, &yf, &cfg, seed).unwrap();
        let rb = two_sample_test(&xt, &yt, &cfg, seed).unwrap();
        prop_assert_eq!(ra, rb);
    }

    #[test]
    fn gaps_sum_to_one(z in prop::collection::vec(-4.0f64..4.0, 1..30)) {
        let g = one_sample_spacings(&z, &NullCdfSpec::normal(0.0, 1.0).unwrap()).unwrap();
        let g = g.gaps().unwrap();
        prop_assert_eq!(g.len(), z.len() + 1);
        prop_assert!(g.iter().all(|v| *v >= 0.0));
        prop_assert!((g.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn p_values_are_probabilities(
        c in prop::collection::vec(0u64..4, 3),
        side in prop_oneof![Just(Side::Left), Just(Side::Right), Just(Side::TwoSided)],
    ) {
        let n: u64 = c.iter().sum();
        for method in [MethodChoice::OraclePmf, MethodChoice::ExactMoments] {
            let cfg = TwoSampleConfig::new(2, WeightVector::from_integers(&[1, 2, 1]).unwrap())
                .side(side).method(method).moments(40);
            let test = TwoSampleTest::prepare(&cfg, n).unwrap();
            let r = test.evaluate_counts(&c, 0).unwrap();
            prop_assert!((0.0..=1.0).contains(&r.p_value));
            prop_assert!(r.certified_error >= 0.0);
        }
    }
}
