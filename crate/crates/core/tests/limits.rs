use mochis_core::moments::discrete_moments;
use mochis_core::numeric::{rational_to_f64, BigInt, BigRational};
use mochis_core::oracle::seeded_rng;
use mochis_core::{StatisticSpec, WeightVector};
use rand::Rng;

/// With `w_i = (i/k)^2` and `k` large, three balls behave like three
/// independent uniforms and the statistic like their summed squares.
#[test]
fn fixed_n_limit_matches_sum_of_squared_uniforms() {
    let k = 2000i64;
    let w: Vec<BigRational> = (1..=k).map(|i| BigRational::new(BigInt::from(i * i), BigInt::from(k * k))).collect();
    let spec = StatisticSpec::discrete(3, 1, WeightVector::new(w).unwrap()).unwrap();
    let seq = discrete_moments(&spec, 4).unwrap();

    let reps = 1_000_000;
    let mut rng = seeded_rng(55);
    let mut sums = [0.0f64; 5];
    let mut squares = [0.0f64; 5];
    for _ in 0..reps {
        let v: f64 = (0..3).map(|_| rng.random::<f64>().powi(2)).sum();
        let mut pw = 1.0;
        for m in 0..5 {
            sums[m] += pw;
            squares[m] += pw * pw;
            pw *= v;
        }
    }
    let r = reps as f64;
    for m in 1..=4 {
        let mean = sums[m] / r;
        let se = ((squares[m] / r - mean * mean) / (r - 1.0)).sqrt();
        let exact = rational_to_f64(&seq.raw_moment(m));
        assert!((exact - mean).abs() <= 4.0 * se, "m={m}: exact {exact} vs MC {mean} +- {se}");
    }
}
