//! Power sums of integer-weighted statistics via multi-modular convolution.
//!
//! For integer weights `W` the discrete routine returns
//! `c_m = sum over compositions s of n into k parts of (sum_i W_i s_i^p)^m`,
//! and the continuous routine returns `c_m = m! [x^m] prod_j Q_p(W_j x)`.
//! Both are exact: residues modulo enough 62-bit primes are lifted by CRT.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::numeric::modular::{ntt_primes, CrtBasis, Modulus, NttPrime};
use crate::numeric::binomial;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

fn group_weights(weights: &[BigInt]) -> Vec<(BigInt, u64)> {
    let mut groups: BTreeMap<BigInt, u64> = BTreeMap::new();
    for w in weights {
        *groups.entry(w.clone()).or_default() += 1;
    }
    groups.into_iter().collect()
}

fn primes_for_bits(bits: u64) -> Vec<Arc<NttPrime>> {
    // Each prime exceeds 2^61; one spare bit covers the sign.
    ntt_primes(((bits + 2).div_ceil(61)).max(1) as usize)
}

fn per_prime<F>(primes: &[Arc<NttPrime>], f: F) -> Vec<Vec<u64>>
where
    F: Fn(&NttPrime) -> Vec<u64> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        primes.par_iter().map(|p| f(p)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        primes.iter().map(|p| f(p)).collect()
    }
}

fn lift(primes: &[Arc<NttPrime>], residues: &[Vec<u64>], len: usize) -> Vec<BigInt> {
    let values: Vec<u64> = primes.iter().map(|p| p.modulus.value()).collect();
    let basis = CrtBasis::new(&values);
    let one = |m: usize| basis.reconstruct(&residues.iter().map(|r| r[m]).collect::<Vec<_>>());
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(one).collect()
    }
}

struct Factorials {
    fact: Vec<u64>,
    inv_fact: Vec<u64>,
}

impl Factorials {
    fn new(m: &Modulus, upto: usize) -> Self {
        let mut fact = Vec::with_capacity(upto + 1);
        let mut acc = m.one();
        fact.push(acc);
        for i in 1..=upto {
            acc = m.mul(acc, m.to_mont(i as u64));
            fact.push(acc);
        }
        let mut inv_fact = vec![0; upto + 1];
        inv_fact[upto] = m.inv(fact[upto]);
        for i in (1..=upto).rev() {
            inv_fact[i - 1] = m.mul(inv_fact[i], m.to_mont(i as u64));
        }
        Self { fact, inv_fact }
    }
}

fn pow_truncated<F>(base: Vec<u64>, mut e: u64, one: Vec<u64>, mul: &F) -> Vec<u64>
where
    F: Fn(&[u64], &[u64]) -> Vec<u64>,
{
    let mut acc: Option<Vec<u64>> = None;
    let mut b = base;
    loop {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => b.clone(),
                Some(a) => mul(&a, &b),
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        b = mul(&b, &b);
    }
    acc.unwrap_or(one)
}

/// Coefficients `[x^n y^t]` (`t < cols`) of the product of two packed bivariate
/// series, computed row by row in the transform domain.
fn x_row_product(prime: &NttPrime, a: &[u64], b: &[u64], n: usize, stride: usize, cols: usize) -> Vec<u64> {
    let m = &prime.modulus;
    let row = |p: &[u64], s: usize| -> Vec<u64> { (0..cols).map(|t| p[t * stride + s]).collect() };
    if cols <= 32 {
        let mut out = vec![0u64; cols];
        for s in 0..=n {
            let conv = prime.convolve(&row(a, s), &row(b, n - s));
            for (o, c) in out.iter_mut().zip(conv) {
                *o = m.add(*o, c);
            }
        }
        return out;
    }
    let size = (2 * cols - 1).next_power_of_two();
    let transformed = |p: &[u64], s: usize| -> Vec<u64> {
        let mut v = row(p, s);
        v.resize(size, 0);
        prime.transform(&mut v, false);
        v
    };
    let mut acc = vec![0u64; size];
    for s in 0..=n {
        let (fa, fb) = (transformed(a, s), transformed(b, n - s));
        for ((o, x), y) in acc.iter_mut().zip(&fa).zip(&fb) {
            *o = m.add(*o, m.mul(*x, *y));
        }
    }
    prime.transform(&mut acc, true);
    acc.truncate(cols);
    acc
}

/// `sum_s (sum_i W_i s_i^p)^m` over weak compositions `s` of `n` into
/// `weights.len()` parts, for `m = 0..=max_order`.
pub fn discrete_power_sums(weights: &[BigInt], n: usize, p: u32, max_order: usize) -> Vec<BigInt> {
    let k = weights.len();
    assert!(k >= 1);
    let count = binomial((n + k - 1) as u64, (k - 1) as i64);
    let max_w = weights.iter().map(|w| w.abs()).max().unwrap_or_default();
    let range: BigInt = &max_w * num_traits::pow(BigInt::from(n), p as usize);
    let mut out = vec![BigInt::zero(); max_order + 1];
    out[0] = count.clone();
    if max_order == 0 || range.is_zero() {
        return out;
    }
    let bits = count.bits() + max_order as u64 * range.bits();
    let primes = primes_for_bits(bits);
    let groups = group_weights(weights);
    let stride = 2 * n + 1;
    let cols = max_order + 1;

    let residues = per_prime(&primes, |prime| {
        let m = prime.modulus;
        let f = Factorials::new(&m, max_order.max(n + k));
        let s_pow: Vec<u64> = (0..=n as u64).map(|s| m.pow(m.to_mont(s), p as u64)).collect();

        // Packed layout: coefficient of x^s y^t lives at t * stride + s.
        let mul = |a: &[u64], b: &[u64]| -> Vec<u64> {
            let full = prime.convolve(a, b);
            let mut out = vec![0u64; cols * stride];
            for t in 0..cols {
                let row = t * stride;
                for s in 0..=n {
                    if let Some(&v) = full.get(row + s) {
                        out[row + s] = v;
                    }
                }
            }
            out
        };
        let mut one = vec![0u64; cols * stride];
        one[0] = m.one();

        let mut powers: Vec<Vec<u64>> = Vec::new();
        let mut zero_bins = 0usize;
        for (w, mult) in &groups {
            if w.is_zero() {
                zero_bins = *mult as usize;
                continue;
            }
            let wm = m.from_bigint(w);
            let mut factor = vec![0u64; cols * stride];
            for (s, &sp) in s_pow.iter().enumerate() {
                let ws = m.mul(wm, sp);
                let mut pw = m.one();
                for t in 0..cols {
                    factor[t * stride + s] = m.mul(pw, f.inv_fact[t]);
                    pw = m.mul(pw, ws);
                }
            }
            powers.push(pow_truncated(factor, *mult, one.clone(), &mul));
        }
        let last = powers.pop().expect("at least one nonzero weight");
        let rest = powers.into_iter().reduce(|acc, p| mul(&acc, &p));

        // Zero-weight bins contribute (1 - x)^{-e} = sum_s C(s+e-1, e-1) x^s,
        // an x-only factor that is folded into the first operand row by row.
        let mut left = rest.unwrap_or(one);
        if zero_bins > 0 {
            let e = zero_bins;
            let series: Vec<u64> = (0..=n)
                .map(|s| m.mul(m.mul(f.fact[s + e - 1], f.inv_fact[s]), f.inv_fact[e - 1]))
                .collect();
            for t in 0..cols {
                let row = &mut left[t * stride..t * stride + n + 1];
                for s in (0..=n).rev() {
                    let mut acc = 0u64;
                    for j in 0..=s {
                        acc = m.add(acc, m.mul(row[j], series[s - j]));
                    }
                    row[s] = acc;
                }
            }
        }
        let row_n = x_row_product(prime, &left, &last, n, stride, cols);
        row_n
            .iter()
            .enumerate()
            .map(|(t, &v)| m.from_mont(m.mul(v, f.fact[t])))
            .collect()
    });
    let lifted = lift(&primes, &residues, cols);
    for (slot, v) in out.iter_mut().zip(lifted).skip(1) {
        *slot = v;
    }
    out
}

/// `m! [x^m] prod_j Q_p(W_j x)` with `Q_p(x) = sum_i (p i)! x^i / i!`, for
/// `m = 0..=max_order`.
pub fn continuous_power_sums(weights: &[BigInt], p: u32, max_order: usize) -> Vec<BigInt> {
    let k = weights.len();
    assert!(k >= 1);
    let max_w = weights.iter().map(|w| w.abs()).max().unwrap_or_default();
    let mut out = vec![BigInt::zero(); max_order + 1];
    out[0] = BigInt::from(1);
    if max_order == 0 || max_w.is_zero() {
        return out;
    }
    let p_us = p as usize;
    let top = p_us * max_order + k - 1;
    let log_fact: f64 = (k..=top).map(|i| (i as f64).log2()).sum();
    let bits = max_order as u64 * max_w.bits() + log_fact.ceil() as u64 + 2;
    let primes = primes_for_bits(bits);
    let groups = group_weights(weights);
    let cols = max_order + 1;

    let residues = per_prime(&primes, |prime| {
        let m = prime.modulus;
        let f = Factorials::new(&m, p_us * max_order);
        let mul = |a: &[u64], b: &[u64]| -> Vec<u64> {
            let mut full = prime.convolve(a, b);
            full.resize(cols, 0);
            full
        };
        let mut one = vec![0u64; cols];
        one[0] = m.one();
        let mut product: Option<Vec<u64>> = None;
        for (w, mult) in &groups {
            let wm = m.from_bigint(w);
            let mut pw = m.one();
            let factor: Vec<u64> = (0..cols)
                .map(|i| {
                    let c = m.mul(m.mul(f.fact[p_us * i], f.inv_fact[i]), pw);
                    pw = m.mul(pw, wm);
                    c
                })
                .collect();
            let powered = pow_truncated(factor, *mult, one.clone(), &mul);
            product = Some(match product {
                None => powered,
                Some(acc) => mul(&acc, &powered),
            });
        }
        let product = product.expect("at least one weight");
        (0..cols)
            .map(|t| m.from_mont(m.mul(product[t], f.fact[t])))
            .collect()
    });
    let lifted = lift(&primes, &residues, cols);
    for (slot, v) in out.iter_mut().zip(lifted).skip(1) {
        *slot = v;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::factorial;

    fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 1 {
            return vec![vec![n]];
        }
        (0..=n)
            .flat_map(|first| {
                compositions(n - first, k - 1).into_iter().map(move |mut rest| {
                    rest.insert(0, first);
                    rest
                })
            })
            .collect()
    }

    fn brute(weights: &[i64], n: usize, p: u32, max_order: usize) -> Vec<BigInt> {
        let values: Vec<BigInt> = compositions(n, weights.len())
            .iter()
            .map(|s| {
                s.iter()
                    .zip(weights)
                    .map(|(&si, &w)| BigInt::from(w) * BigInt::from(si).pow(p))
                    .sum()
            })
            .collect();
        (0..=max_order)
            .map(|m| values.iter().map(|v| v.pow(m as u32)).sum())
            .collect()
    }

    #[test]
    fn discrete_matches_enumeration() {
        for (weights, n, p, order) in [
            (vec![1i64, 1], 2usize, 2u32, 4usize),
            (vec![3, 1], 2, 1, 3),
            (vec![2, 0, 5, 2], 6, 3, 7),
            (vec![-3, 4, 1], 5, 2, 6),
            (vec![7], 3, 2, 3),
            (vec![1, 1, 1], 0, 2, 3),
        ] {
            let w: Vec<BigInt> = weights.iter().map(|&x| BigInt::from(x)).collect();
            assert_eq!(discrete_power_sums(&w, n, p, order), brute(&weights, n, p, order), "{weights:?} n={n} p={p}");
        }
    }

    #[test]
    fn discrete_large_order_needs_many_primes() {
        let w: Vec<BigInt> = [10i64, 2, 1, 0, 0, 1, 2, 10].iter().map(|&x| BigInt::from(x)).collect();
        let got = discrete_power_sums(&w, 5, 1, 60);
        assert_eq!(got, brute(&[10, 2, 1, 0, 0, 1, 2, 10], 5, 1, 60));
    }

    #[test]
    fn continuous_small_cases() {
        // k = 1: Q_p coefficient times m! is (pm)! W^m.
        let got = continuous_power_sums(&[BigInt::from(3)], 2, 5);
        for (m, v) in got.iter().enumerate() {
            assert_eq!(v, &(factorial(2 * m as u64) * BigInt::from(3).pow(m as u32)));
        }
        // k = 2, p = 2, unit weights, m = 1: 2 * 2! = 4.
        let got = continuous_power_sums(&[BigInt::from(1), BigInt::from(1)], 2, 3);
        assert_eq!(got[1], BigInt::from(4));
    }
}
