//! Exact arithmetic: big integers and rationals, truncated power series,
//! and a multi-modular convolution engine.

pub mod modular;
mod poly;

pub use num_bigint::{BigInt, BigUint, Sign};
pub use num_rational::BigRational;
pub use poly::{
    poly1_mul, poly2_mul, product_tree, product_tree1, Coefficient, TruncatedPoly1, TruncatedPoly2,
};

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact binomial coefficient `C(a, b)`; zero when `b < 0` or `b > a`.
pub fn binomial(a: u64, b: i64) -> BigInt {
    if b < 0 || b as u64 > a {
        return BigInt::zero();
    }
    let b = b as u64;
    let b = b.min(a - b);
    let mut acc = BigInt::one();
    for i in 1..=b {
        acc *= a - b + i;
        acc /= i;
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// `lo * (lo+1) * ... * hi`, or one for an empty range.
pub fn rising_range(lo: u64, hi: u64) -> BigInt {
    if lo > hi {
        return BigInt::one();
    }
    // Split recursively so the operands stay balanced.
    if hi - lo < 16 {
        return (lo..=hi).fold(BigInt::one(), |acc, i| acc * i);
    }
    let mid = lo + (hi - lo) / 2;
    rising_range(lo, mid) * rising_range(mid + 1, hi)
}

/// Nearest-ish `f64` to `num / den` without overflowing the intermediate
/// conversions. Relative error is a few ulps.
pub fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    assert!(!den.is_zero(), "division by zero");
    if num.is_zero() {
        return 0.0;
    }
    let negative = num.is_negative() != den.is_negative();
    let (n, d) = (num.abs(), den.abs());
    let shift = n.bits() as i64 - d.bits() as i64 - 64;
    let q = if shift >= 0 {
        &n / (&d << shift as usize)
    } else {
        (&n << (-shift) as usize) / &d
    };
    let mantissa = q.to_f64().unwrap_or(f64::INFINITY);
    let value = scale_by_pow2(mantissa, shift);
    if negative {
        -value
    } else {
        value
    }
}

pub fn rational_to_f64(value: &BigRational) -> f64 {
    ratio_to_f64(value.numer(), value.denom())
}

fn scale_by_pow2(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

/// Least common multiple of the denominators of `values`.
pub fn common_denominator<'a, I>(values: I) -> BigInt
where
    I: IntoIterator<Item = &'a BigRational>,
{
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Parse an exact rational from `"3"`, `"-2/7"`, `"0.125"` or `"1e-3"`.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: BigInt = format!("{int_part}{frac_part}0").parse().ok()?;
    let all = all / 10;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(all * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(all, num_traits::pow(ten, (-scale) as usize))
    };
    Some(if sign < 0 { -value } else { value })
}

/// Lowest-terms `"num/den"` rendering (`"num"` for integers).
pub fn format_rational(value: &BigRational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}
