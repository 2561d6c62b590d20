//! Classical comparators: Kolmogorov-Smirnov, Cramer-von Mises,
//! Mann-Whitney and Pearson's chi-squared.

use num_bigint::BigUint;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};
use statrs::function::gamma::ln_gamma;

use super::{check_alpha, check_finite, Method, NullCdfSpec, Side, TestResult};
use crate::error::{Error, Result};
use crate::numeric::ratio_to_f64;
use crate::oracle::mann_whitney_counts;

/// Largest `m * n` for which the two-sample KS p-value uses the exact path count.
pub const KS_EXACT_CAP: usize = 1_000_000;
/// Largest sample sizes for the exact Mann-Whitney law.
pub const MANN_WHITNEY_EXACT_MAX: usize = 50;

fn result(test: &str, stat: f64, p: f64, side: Side, method: Method, alpha: f64) -> TestResult {
    let p_value = p.clamp(0.0, 1.0);
    TestResult {
        test: test.into(),
        raw_statistic: stat,
        exact_statistic: None,
        normalized_statistic: stat,
        p_value,
        side,
        method,
        moments_used: 0,
        certified_error: if method == Method::Asymptotic { 1.0 } else { 0.0 },
        alpha,
        reject: p_value <= alpha,
        seed: 0,
        warnings: Vec::new(),
    }
}

fn sorted(values: &[f64], what: &'static str) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::EmptyInput(what));
    }
    check_finite(values, what)?;
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// `P(K > lambda)` for the Kolmogorov distribution.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Theta-function form converges fast for small arguments.
        let c = std::f64::consts::PI * std::f64::consts::PI / (8.0 * lambda * lambda);
        let s: f64 = (1..=20)
            .map(|j| (-((2 * j - 1) as f64).powi(2) * c).exp())
            .sum();
        return (1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s).clamp(0.0, 1.0);
    }
    let s: f64 = (1..=100)
        .map(|j| {
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            sign * (-2.0 * (j * j) as f64 * lambda * lambda).exp()
        })
        .sum();
    (2.0 * s).clamp(0.0, 1.0)
}

/// Limiting CDF of the Cramer-von Mises `omega^2` statistic.
pub fn cvm_limit_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let pi15 = std::f64::consts::PI.powf(1.5);
    let mut total = 0.0;
    for k in 0..500 {
        let kf = k as f64;
        let u = (ln_gamma(kf + 0.5) - ln_gamma(kf + 1.0)).exp() / (pi15 * x.sqrt());
        let y = 4.0 * kf + 1.0;
        let q = y * y / (16.0 * x);
        let term = u * y.sqrt() * (-2.0 * q).exp() * scaled_bessel_k_quarter(q);
        total += term;
        if term.abs() < 1e-14 {
            break;
        }
    }
    total.clamp(0.0, 1.0)
}

/// `e^q K_{1/4}(q)` from `int_0^inf exp(-q (cosh t - 1)) cosh(t / 4) dt`
/// by the trapezoid rule, which converges geometrically here.
fn scaled_bessel_k_quarter(q: f64) -> f64 {
    let end = (1.0 + 60.0 / q).acosh();
    let steps = 800;
    let h = end / steps as f64;
    let f = |t: f64| (-q * (t.cosh() - 1.0)).exp() * (t / 4.0).cosh();
    let inner: f64 = (1..steps).map(|i| f(i as f64 * h)).sum();
    h * (0.5 * (f(0.0) + f(end)) + inner)
}

/// Two-sided two-sample Kolmogorov-Smirnov test.
pub fn ks_two_sample(x: &[f64], y: &[f64], alpha: f64) -> Result<TestResult> {
    check_alpha(alpha)?;
    let xs = sorted(x, "first sample")?;
    let ys = sorted(y, "second sample")?;
    let (m, n) = (xs.len(), ys.len());
    // D * m * n as an integer: max |i n - j m| over the merged ECDF steps.
    let (mut i, mut j) = (0usize, 0usize);
    let mut d_int: u64 = 0;
    while i < m || j < n {
        let v = match (xs.get(i), ys.get(j)) {
            (Some(a), Some(b)) => a.min(*b),
            (Some(a), None) => *a,
            (None, Some(b)) => *b,
            (None, None) => unreachable!(),
        };
        while i < m && xs[i] == v {
            i += 1;
        }
        while j < n && ys[j] == v {
            j += 1;
        }
        d_int = d_int.max((i as i64 * n as i64 - j as i64 * m as i64).unsigned_abs());
    }
    let d = d_int as f64 / (m * n) as f64;
    let (p, method) = if m * n <= KS_EXACT_CAP {
        (ks_exact_sf(m, n, d_int), Method::ExactDistribution)
    } else {
        let en = ((m * n) as f64 / (m + n) as f64).sqrt();
        (kolmogorov_sf((en + 0.12 + 0.11 / en) * d), Method::Asymptotic)
    };
    Ok(result("ks-two-sample", d, p, Side::TwoSided, method, alpha))
}

/// `P(D >= d)` by counting monotone lattice paths that stay strictly inside
/// the band `|i n - j m| < d m n`.
fn ks_exact_sf(m: usize, n: usize, d_int: u64) -> f64 {
    if d_int == 0 {
        return 1.0;
    }
    let inside = |i: usize, j: usize| ((i * n) as i64 - (j * m) as i64).unsigned_abs() < d_int;
    // w[j] holds (paths to (i, j) inside the band) / C(i + j, i).
    let mut w = vec![0.0f64; n + 1];
    for i in 0..=m {
        for j in 0..=n {
            let v = if i == 0 && j == 0 {
                1.0
            } else if !inside(i, j) {
                0.0
            } else {
                let s = (i + j) as f64;
                let from_left = if i > 0 { w[j] * i as f64 / s } else { 0.0 };
                let from_below = if j > 0 { w[j - 1] * j as f64 / s } else { 0.0 };
                from_left + from_below
            };
            w[j] = v;
        }
    }
    (1.0 - w[n]).clamp(0.0, 1.0)
}

fn average_ranks(pooled: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&a, &b| pooled[a].total_cmp(&pooled[b]));
    let mut ranks = vec![0.0; pooled.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && pooled[order[end]] == pooled[order[start]] {
            end += 1;
        }
        let r = (start + end + 1) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = r;
        }
        start = end;
    }
    ranks
}

/// Anderson's two-sample Cramer-von Mises test with the usual moment-matched
/// asymptotic p-value.
pub fn cvm_two_sample(x: &[f64], y: &[f64], alpha: f64) -> Result<TestResult> {
    check_alpha(alpha)?;
    let xs = sorted(x, "first sample")?;
    let ys = sorted(y, "second sample")?;
    let (m, n) = (xs.len() as f64, ys.len() as f64);
    let pooled: Vec<f64> = xs.iter().chain(&ys).copied().collect();
    let ranks = average_ranks(&pooled);
    let (rx, ry) = ranks.split_at(xs.len());
    let ssq = |r: &[f64]| -> f64 { r.iter().enumerate().map(|(i, v)| (v - (i + 1) as f64).powi(2)).sum() };
    let u = m * ssq(rx) + n * ssq(ry);
    let (k, total) = (m * n, m + n);
    let t = u / (k * total) - (4.0 * k - 1.0) / (6.0 * total);
    let et = (1.0 + 1.0 / total) / 6.0;
    let vt = (total + 1.0) * (4.0 * k * total - 3.0 * (m * m + n * n) - 2.0 * k) / (45.0 * total * total * 4.0 * k);
    let tn = 1.0 / 6.0 + (t - et) / (45.0 * vt).sqrt();
    let p = if tn < 0.003 { 1.0 } else { 1.0 - cvm_limit_cdf(tn) };
    Ok(result("cvm-two-sample", t, p, Side::Right, Method::Asymptotic, alpha))
}

/// Mann-Whitney test on `U = #{(i, j) : x_i > y_j}` (ties count one half).
/// Untied samples of at most `MANN_WHITNEY_EXACT_MAX` points use the exact law.
pub fn mann_whitney(x: &[f64], y: &[f64], side: Side, alpha: f64) -> Result<TestResult> {
    check_alpha(alpha)?;
    let xs = sorted(x, "first sample")?;
    let ys = sorted(y, "second sample")?;
    let (m, n) = (xs.len(), ys.len());
    let pooled: Vec<f64> = xs.iter().chain(&ys).copied().collect();
    let ranks = average_ranks(&pooled);
    let rank_sum: f64 = ranks[..m].iter().sum();
    let u = rank_sum - (m * (m + 1)) as f64 / 2.0;

    let mut tie_term = 0.0;
    let mut sorted_pool = pooled.clone();
    sorted_pool.sort_by(f64::total_cmp);
    let mut ties = false;
    let mut s = 0;
    while s < sorted_pool.len() {
        let mut e = s + 1;
        while e < sorted_pool.len() && sorted_pool[e] == sorted_pool[s] {
            e += 1;
        }
        let t = (e - s) as f64;
        if e - s > 1 {
            ties = true;
            tie_term += t * t * t - t;
        }
        s = e;
    }

    if !ties && m <= MANN_WHITNEY_EXACT_MAX && n <= MANN_WHITNEY_EXACT_MAX {
        // U equals the weighted spacing statistic with weights (k-1, ..., 1, 0).
        let counts = mann_whitney_counts(n, m + 1);
        let total: BigUint = counts.iter().sum();
        let ui = u.round() as usize;
        let left: BigUint = counts[..=ui].iter().sum();
        let right: BigUint = counts[ui..].iter().sum();
        let den = total.into();
        let p = side.combine(ratio_to_f64(&left.into(), &den), ratio_to_f64(&right.into(), &den));
        return Ok(result("mann-whitney", u, p, side, Method::OraclePmf, alpha));
    }

    let (mf, nf) = (m as f64, n as f64);
    let big_n = mf + nf;
    let mean = mf * nf / 2.0;
    let var = mf * nf / 12.0 * ((big_n + 1.0) - tie_term / (big_n * (big_n - 1.0)));
    let p = if var <= 0.0 || var.is_nan() {
        1.0
    } else {
        let sd = var.sqrt();
        let normal = Normal::standard();
        let left = normal.cdf((u - mean + 0.5) / sd);
        let right = normal.sf((u - mean - 0.5) / sd);
        side.combine(left, right)
    };
    Ok(result("mann-whitney", u, p, side, Method::Asymptotic, alpha))
}

fn transformed(z: &[f64], null_cdf: &NullCdfSpec) -> Result<Vec<f64>> {
    if z.is_empty() {
        return Err(Error::EmptyInput("sample"));
    }
    check_finite(z, "sample")?;
    let mut u = z.iter().map(|&v| null_cdf.cdf(v)).collect::<Result<Vec<_>>>()?;
    u.sort_by(f64::total_cmp);
    Ok(u)
}

/// One-sample Kolmogorov-Smirnov test with Stephens' finite-sample scaling.
pub fn ks_one_sample(z: &[f64], null_cdf: &NullCdfSpec, alpha: f64) -> Result<TestResult> {
    check_alpha(alpha)?;
    let u = transformed(z, null_cdf)?;
    let nf = u.len() as f64;
    let d = u
        .iter()
        .enumerate()
        .map(|(i, &v)| ((i + 1) as f64 / nf - v).max(v - i as f64 / nf))
        .fold(0.0, f64::max);
    let en = nf.sqrt();
    let p = kolmogorov_sf((en + 0.12 + 0.11 / en) * d);
    Ok(result("ks-one-sample", d, p, Side::TwoSided, Method::Asymptotic, alpha))
}

/// One-sample Cramer-von Mises test with Stephens' modified statistic.
pub fn cvm_one_sample(z: &[f64], null_cdf: &NullCdfSpec, alpha: f64) -> Result<TestResult> {
    check_alpha(alpha)?;
    let u = transformed(z, null_cdf)?;
    let nf = u.len() as f64;
    let w2 = 1.0 / (12.0 * nf)
        + u.iter()
            .enumerate()
            .map(|(i, &v)| (v - (2 * i + 1) as f64 / (2.0 * nf)).powi(2))
            .sum::<f64>();
    let modified = (w2 - 0.4 / nf + 0.6 / (nf * nf)) * (1.0 + 1.0 / nf);
    let p = 1.0 - cvm_limit_cdf(modified);
    Ok(result("cvm-one-sample", w2, p, Side::Right, Method::Asymptotic, alpha))
}

/// Pearson's chi-squared test of uniformity on `[0, 1]` with equal-width bins.
pub fn chi2_uniformity(u: &[f64], bins: usize, alpha: f64) -> Result<TestResult> {
    check_alpha(alpha)?;
    if bins < 2 {
        return Err(Error::InvalidArgument("chi-squared test needs at least two bins".into()));
    }
    if u.is_empty() {
        return Err(Error::EmptyInput("sample"));
    }
    let mut observed = vec![0usize; bins];
    for &v in u {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::OutsideSupport { value: v });
        }
        observed[((v * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let expected = u.len() as f64 / bins as f64;
    let stat: f64 = observed
        .iter()
        .map(|&o| (o as f64 - expected).powi(2) / expected)
        .sum();
    let chi = ChiSquared::new((bins - 1) as f64).expect("positive degrees of freedom");
    Ok(result("chi2-uniformity", stat, chi.sf(stat), Side::Right, Method::Asymptotic, alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::mann_whitney_pmf;
    use num_rational::BigRational;

    #[test]
    fn identical_samples_have_zero_ks() {
        let x = [0.3, 1.2, -0.5, 2.0];
        let r = ks_two_sample(&x, &x, 0.05).unwrap();
        assert_eq!(r.raw_statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn ks_exact_matches_reference_values() {
        // Fully separated samples of sizes 3 and 3: P(D = 1) = 2 / C(6, 3).
        let r = ks_two_sample(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], 0.05).unwrap();
        assert_eq!(r.raw_statistic, 1.0);
        assert!((r.p_value - 0.1).abs() < 1e-12);
        // Brute force over all interleavings of sizes 4 and 5.
        let (m, n) = (4usize, 5usize);
        let mut hits = 0u32;
        let mut total = 0u32;
        let target = ks_two_sample(&[0.1, 0.5, 0.6, 0.9], &[0.2, 0.3, 0.4, 0.7, 0.8], 0.05).unwrap();
        for mask in 0u32..(1 << (m + n)) {
            if mask.count_ones() as usize != m {
                continue;
            }
            let x: Vec<f64> = (0..m + n).filter(|b| mask >> b & 1 == 1).map(|b| b as f64).collect();
            let y: Vec<f64> = (0..m + n).filter(|b| mask >> b & 1 == 0).map(|b| b as f64).collect();
            total += 1;
            if ks_two_sample(&x, &y, 0.05).unwrap().raw_statistic >= target.raw_statistic - 1e-12 {
                hits += 1;
            }
        }
        assert!((target.p_value - hits as f64 / total as f64).abs() < 1e-12);
    }

    #[test]
    fn kolmogorov_tail_is_continuous_and_known() {
        assert!((kolmogorov_sf(1.3580986) - 0.05).abs() < 1e-6);
        let a = kolmogorov_sf(1.18 - 1e-9);
        let b = kolmogorov_sf(1.18 + 1e-9);
        assert!((a - b).abs() < 1e-8);
        assert_eq!(kolmogorov_sf(0.0), 1.0);
    }

    #[test]
    fn cvm_limit_critical_values() {
        assert!((cvm_limit_cdf(0.461) - 0.95).abs() < 2e-3);
        assert!((cvm_limit_cdf(0.743) - 0.99).abs() < 1e-3);
        assert!((cvm_limit_cdf(0.347) - 0.90).abs() < 2e-3);
        let mut last = 0.0;
        for i in 1..200 {
            let v = cvm_limit_cdf(i as f64 / 100.0);
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn cvm_two_sample_matches_reference() {
        // Hand-evaluated Anderson statistic for x = (1, 3), y = (2, 4): T = 1/8.
        let r = cvm_two_sample(&[1.0, 3.0], &[2.0, 4.0], 0.05).unwrap();
        assert!((r.raw_statistic - 0.125).abs() < 1e-12);
        assert!(r.p_value > 0.5);
    }

    #[test]
    fn mann_whitney_exact_path_is_the_recursion_law() {
        let x = [0.15, 0.55, 0.95];
        let y = [0.1, 0.2, 0.3, 0.6, 0.7];
        let r = mann_whitney(&x, &y, Side::Right, 0.05).unwrap();
        assert_eq!(r.method, Method::OraclePmf);
        // U counts pairs with x above y: 1 + 3 + 5.
        assert_eq!(r.raw_statistic, 9.0);
        let pmf = mann_whitney_pmf(5, 4);
        let tail = pmf.sf(&BigRational::from_integer(9.into()));
        assert!((r.p_value - crate::numeric::rational_to_f64(&tail)).abs() < 1e-15);
    }

    #[test]
    fn mann_whitney_normal_path_with_ties() {
        let x: Vec<f64> = (0..60).map(|i| (i % 7) as f64).collect();
        let y: Vec<f64> = (0..60).map(|i| (i % 5) as f64 + 0.5).collect();
        let r = mann_whitney(&x, &y, Side::TwoSided, 0.05).unwrap();
        assert_eq!(r.method, Method::Asymptotic);
        assert!((0.0..=1.0).contains(&r.p_value));
    }

    #[test]
    fn ks_one_sample_stairstep() {
        let n = 8;
        let f = NullCdfSpec::normal(0.0, 1.0).unwrap();
        let z: Vec<f64> = (1..=n).map(|i| f.quantile((i as f64 - 0.5) / n as f64).unwrap()).collect();
        let r = ks_one_sample(&z, &f, 0.05).unwrap();
        assert!((r.raw_statistic - 0.5 / n as f64).abs() < 1e-9);
        assert!(r.p_value > 1.0 - 1e-9);
    }

    #[test]
    fn cvm_one_sample_minimum() {
        let n = 10;
        let z: Vec<f64> = (1..=n).map(|i| (i as f64 - 0.5) / n as f64).collect();
        let r = cvm_one_sample(&z, &NullCdfSpec::Uniform, 0.05).unwrap();
        assert!((r.raw_statistic - 1.0 / 120.0).abs() < 1e-12);
        assert!(r.p_value > 0.99);
    }

    #[test]
    fn chi2_counts() {
        let u = [0.1, 0.2, 0.3, 0.9];
        let r = chi2_uniformity(&u, 2, 0.05).unwrap();
        assert!((r.raw_statistic - 1.0).abs() < 1e-12);
        assert!((r.p_value - 0.3173105).abs() < 1e-6);
        assert!(chi2_uniformity(&[1.2], 2, 0.05).is_err());
        assert!(chi2_uniformity(&u, 1, 0.05).is_err());
    }
}
