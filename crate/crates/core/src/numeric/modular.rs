//! Multi-modular number-theoretic transforms.
//!
//! Exact integer convolutions are computed modulo a family of 62-bit
//! NTT-friendly primes `c * 2^24 + 1` and lifted back with Garner's
//! algorithm. Results are bit-identical to schoolbook big-integer products
//! as long as enough primes are used to cover the coefficient bound.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};

const TWO_ADICITY: u32 = 24;

/// A prime modulus with Montgomery arithmetic (R = 2^64).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Modulus {
    q: u64,
    neg_inv: u64,
    r2: u64,
}

impl Modulus {
    pub fn new(q: u64) -> Self {
        assert!(q % 2 == 1 && q < 1 << 62, "modulus must be odd and below 2^62");
        let mut inv: u64 = 1;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(q.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % q as u128) as u64;
        let r2 = ((r as u128 * r as u128) % q as u128) as u64;
        Self {
            q,
            neg_inv: inv.wrapping_neg(),
            r2,
        }
    }

    pub fn value(&self) -> u64 {
        self.q
    }

    #[inline]
    fn reduce(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.neg_inv);
        let u = ((t + m as u128 * self.q as u128) >> 64) as u64;
        if u >= self.q {
            u - self.q
        } else {
            u
        }
    }

    /// Montgomery product of two Montgomery-form residues.
    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a as u128 * b as u128)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    pub fn to_mont(&self, a: u64) -> u64 {
        self.mul(a % self.q, self.r2)
    }

    pub fn from_mont(&self, a: u64) -> u64 {
        self.reduce(a as u128)
    }

    pub fn one(&self) -> u64 {
        self.to_mont(1)
    }

    pub fn pow(&self, base: u64, mut e: u64) -> u64 {
        let mut acc = self.one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> u64 {
        self.pow(a, self.q - 2)
    }

    /// Montgomery form of an arbitrary signed integer.
    pub fn from_bigint(&self, a: &BigInt) -> u64 {
        let r = (a.magnitude() % self.q).iter_u64_digits().next().unwrap_or(0);
        let r = if a.is_negative() && r != 0 { self.q - r } else { r };
        self.to_mont(r)
    }
}

fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, q: u64) -> u64 {
    let mut acc = 1u64;
    b %= q;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, q);
        }
        b = mul_mod(b, b, q);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// NTT tables for one prime.
#[derive(Debug)]
pub struct NttPrime {
    pub modulus: Modulus,
    /// Montgomery form of a primitive `2^24`-th root of unity.
    root: u64,
    tables: Mutex<HashMap<(u32, bool), Arc<Vec<u64>>>>,
}

fn prime_cache() -> &'static Mutex<Vec<Arc<NttPrime>>> {
    static CACHE: OnceLock<Mutex<Vec<Arc<NttPrime>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(Vec::new()))
}

/// The first `count` NTT primes, in decreasing order below `2^62`.
pub fn ntt_primes(count: usize) -> Vec<Arc<NttPrime>> {
    let mut cache = prime_cache().lock().expect("prime cache poisoned");
    let mut c = match cache.last() {
        Some(p) => (p.modulus.value() - 1) >> TWO_ADICITY,
        None => (1u64 << (62 - TWO_ADICITY)) - 1,
    };
    while cache.len() < count {
        c -= 1;
        assert!(c > 1 << (61 - TWO_ADICITY), "ran out of 62-bit NTT primes");
        let q = (c << TWO_ADICITY) + 1;
        if !is_prime(q) {
            continue;
        }
        let modulus = Modulus::new(q);
        let root = (2..)
            .map(|a| pow_mod(a, (q - 1) >> TWO_ADICITY, q))
            .find(|w| pow_mod(*w, 1 << (TWO_ADICITY - 1), q) != 1)
            .expect("a generator exists");
        cache.push(Arc::new(NttPrime {
            modulus,
            root: modulus.to_mont(root),
            tables: Mutex::new(HashMap::new()),
        }));
    }
    cache[..count].to_vec()
}

impl NttPrime {
    /// Twiddles for every stage of a length-`2^log_len` transform: entry
    /// `half + i` holds `w_len^i` for the stage of length `len = 2 * half`.
    fn twiddles(&self, log_len: u32, inverse: bool) -> Arc<Vec<u64>> {
        let key = (log_len, inverse);
        if let Some(t) = self.tables.lock().expect("twiddle cache poisoned").get(&key) {
            return t.clone();
        }
        let m = &self.modulus;
        let n = 1usize << log_len;
        let mut table = vec![0u64; n.max(2)];
        let mut half = 1;
        while half < n {
            let len_log = (2 * half).trailing_zeros();
            let mut w = m.pow(self.root, 1 << (TWO_ADICITY - len_log));
            if inverse {
                w = m.inv(w);
            }
            let mut cur = m.one();
            for i in 0..half {
                table[half + i] = cur;
                cur = m.mul(cur, w);
            }
            half *= 2;
        }
        let table = Arc::new(table);
        self.tables
            .lock()
            .expect("twiddle cache poisoned")
            .insert(key, table.clone());
        table
    }

    /// In-place transform of a Montgomery-form vector whose length is a power of two.
    pub fn transform(&self, a: &mut [u64], inverse: bool) {
        let n = a.len();
        assert!(n.is_power_of_two() && n.trailing_zeros() <= TWO_ADICITY);
        if n == 1 {
            return;
        }
        let m = &self.modulus;
        let mut j = 0usize;
        for i in 1..n {
            let mut bit = n >> 1;
            while j & bit != 0 {
                j ^= bit;
                bit >>= 1;
            }
            j |= bit;
            if i < j {
                a.swap(i, j);
            }
        }
        let table = self.twiddles(n.trailing_zeros(), inverse);
        let mut half = 1;
        while half < n {
            let tw = &table[half..2 * half];
            for chunk in a.chunks_exact_mut(2 * half) {
                let (lo, hi) = chunk.split_at_mut(half);
                for ((x, y), &w) in lo.iter_mut().zip(hi.iter_mut()).zip(tw) {
                    let u = *x;
                    let v = m.mul(*y, w);
                    *x = m.add(u, v);
                    *y = m.sub(u, v);
                }
            }
            half *= 2;
        }
        if inverse {
            let n_inv = m.inv(m.to_mont(n as u64));
            for x in a.iter_mut() {
                *x = m.mul(*x, n_inv);
            }
        }
    }

    /// Full cyclic-free convolution of two Montgomery-form sequences.
    pub fn convolve(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let out_len = a.len() + b.len() - 1;
        let m = &self.modulus;
        if a.len().min(b.len()) <= 32 {
            let mut out = vec![0u64; out_len];
            for (i, &x) in a.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (j, &y) in b.iter().enumerate() {
                    out[i + j] = m.add(out[i + j], m.mul(x, y));
                }
            }
            return out;
        }
        let size = out_len.next_power_of_two();
        let mut fa = a.to_vec();
        fa.resize(size, 0);
        self.transform(&mut fa, false);
        if std::ptr::eq(a, b) {
            for x in fa.iter_mut() {
                *x = m.mul(*x, *x);
            }
        } else {
            let mut fb = b.to_vec();
            fb.resize(size, 0);
            self.transform(&mut fb, false);
            for (x, y) in fa.iter_mut().zip(&fb) {
                *x = m.mul(*x, *y);
            }
        }
        self.transform(&mut fa, true);
        fa.truncate(out_len);
        fa
    }
}

/// Garner reconstruction over a fixed list of primes.
#[derive(Debug)]
pub struct CrtBasis {
    primes: Vec<u64>,
    moduli: Vec<Modulus>,
    /// Montgomery form of `primes[j]^{-1} mod primes[i]` for `j < i`.
    inv: Vec<Vec<u64>>,
    product: BigUint,
    half: BigUint,
}

impl CrtBasis {
    pub fn new(primes: &[u64]) -> Self {
        let inv = primes
            .iter()
            .enumerate()
            .map(|(i, &qi)| {
                let m = Modulus::new(qi);
                primes[..i]
                    .iter()
                    .map(|&qj| m.to_mont(pow_mod(qj % qi, qi - 2, qi)))
                    .collect()
            })
            .collect();
        let product = primes.iter().fold(BigUint::from(1u32), |acc, &q| acc * q);
        let half = &product >> 1;
        Self {
            primes: primes.to_vec(),
            moduli: primes.iter().map(|&q| Modulus::new(q)).collect(),
            inv,
            product,
            half,
        }
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Number of bits the basis can represent in symmetric form.
    pub fn capacity_bits(&self) -> u64 {
        self.product.bits().saturating_sub(1)
    }

    /// The unique integer in `(-P/2, P/2]` with the given residues (plain form).
    pub fn reconstruct(&self, residues: &[u64]) -> BigInt {
        assert_eq!(residues.len(), self.primes.len());
        let mut digits: Vec<u64> = Vec::with_capacity(residues.len());
        for (i, &r) in residues.iter().enumerate() {
            let qi = self.primes[i];
            let m = &self.moduli[i];
            let mut x = r % qi;
            for (j, &dj) in digits.iter().enumerate() {
                let d = if dj >= qi { dj - qi } else { dj };
                // Plain times Montgomery-form inverse yields a plain product.
                x = m.mul(m.sub(x, d), self.inv[i][j]);
            }
            digits.push(x);
        }
        // Mixed-radix digits back to an integer via Horner.
        let mut value = BigUint::zero();
        for (i, &d) in digits.iter().enumerate().rev() {
            value = value * self.primes[i] + d;
        }
        if value > self.half {
            BigInt::from(value) - BigInt::from(self.product.clone())
        } else {
            BigInt::from(value)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn miller_rabin_agrees_with_trial_division() {
        let trial = |n: u64| n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0);
        for n in 0..5000u64 {
            assert_eq!(is_prime(n), trial(n), "{n}");
        }
        assert!(is_prime((1 << 61) - 1));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn primes_are_ntt_friendly_and_distinct() {
        let primes = ntt_primes(5);
        for (i, p) in primes.iter().enumerate() {
            let q = p.modulus.value();
            assert!(q > 1 << 61 && q < 1 << 62);
            assert_eq!((q - 1) % (1 << 24), 0);
            assert!(is_prime(q));
            let m = &p.modulus;
            assert_eq!(m.from_mont(m.pow(p.root, 1 << 24)), 1);
            assert_ne!(m.from_mont(m.pow(p.root, 1 << 23)), 1);
            for other in &primes[..i] {
                assert_ne!(other.modulus.value(), q);
            }
        }
    }

    #[test]
    fn montgomery_round_trip_and_product() {
        let p = &ntt_primes(1)[0];
        let m = p.modulus;
        let q = m.value();
        for (a, b) in [(0, 5), (1, q - 1), (q - 2, q - 3), (123456789, 987654321012)] {
            let am = m.to_mont(a);
            assert_eq!(m.from_mont(am), a);
            assert_eq!(m.from_mont(m.mul(am, m.to_mont(b))), mul_mod(a, b, q));
        }
        assert_eq!(m.from_mont(m.from_bigint(&BigInt::from(-1))), q - 1);
    }

    #[test]
    fn convolution_matches_schoolbook() {
        let p = &ntt_primes(1)[0];
        let m = p.modulus;
        let a: Vec<u64> = (0..100).map(|i| m.to_mont(i * i + 3)).collect();
        let b: Vec<u64> = (0..77).map(|i| m.to_mont(7 * i + 1)).collect();
        let got: Vec<u64> = p.convolve(&a, &b).into_iter().map(|x| m.from_mont(x)).collect();
        let mut want = vec![0u64; 176];
        for i in 0..100u64 {
            for j in 0..77u64 {
                want[(i + j) as usize] += (i * i + 3) * (7 * j + 1);
            }
        }
        assert_eq!(got, want);
        let sq: Vec<u64> = p.convolve(&a, &a).into_iter().map(|x| m.from_mont(x)).collect();
        assert_eq!(sq[0], 9);
        assert_eq!(sq[198], (99u64 * 99 + 3).pow(2));
    }

    #[test]
    fn garner_recovers_signed_values() {
        let primes: Vec<u64> = ntt_primes(4).iter().map(|p| p.modulus.value()).collect();
        let basis = CrtBasis::new(&primes);
        assert!(basis.capacity_bits() >= 4 * 61);
        let x: BigInt = "-12345678901234567890123456789012345678901234567890".parse().unwrap();
        for value in [x.clone(), -x, BigInt::zero(), BigInt::from(1)] {
            let residues: Vec<u64> = primes
                .iter()
                .map(|&q| Modulus::new(q).from_mont(Modulus::new(q).from_bigint(&value)))
                .collect();
            assert_eq!(basis.reconstruct(&residues), value);
        }
    }
}
