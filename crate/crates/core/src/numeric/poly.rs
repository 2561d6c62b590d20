use std::fmt::Debug;
use std::ops::{AddAssign, Mul};

use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exact ring element usable as a polynomial coefficient.
pub trait Coefficient: Clone + Debug + PartialEq + Zero + One + Send + Sync {
    /// `acc += a * b`
    fn mul_add(acc: &mut Self, a: &Self, b: &Self);
}

impl<T> Coefficient for T
where
    T: Clone + Debug + PartialEq + Zero + One + Send + Sync + AddAssign,
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    fn mul_add(acc: &mut Self, a: &Self, b: &Self) {
        *acc += a * b;
    }
}

/// Univariate power series truncated after `x^max_deg`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedPoly1<T> {
    max_deg: usize,
    coeffs: Vec<T>,
}

impl<T: Coefficient> TruncatedPoly1<T> {
    pub fn zero(max_deg: usize) -> Self {
        Self {
            max_deg,
            coeffs: vec![T::zero(); max_deg + 1],
        }
    }

    pub fn one(max_deg: usize) -> Self {
        let mut p = Self::zero(max_deg);
        p.coeffs[0] = T::one();
        p
    }

    /// Builds a series from leading coefficients; missing ones are zero and
    /// extra ones are dropped.
    pub fn from_coeffs(max_deg: usize, coeffs: impl IntoIterator<Item = T>) -> Self {
        let mut p = Self::zero(max_deg);
        for (slot, c) in p.coeffs.iter_mut().zip(coeffs) {
            *slot = c;
        }
        p
    }

    pub fn max_deg(&self) -> usize {
        self.max_deg
    }

    pub fn coeff(&self, d: usize) -> &T {
        &self.coeffs[d]
    }

    pub fn set(&mut self, d: usize, value: T) {
        self.coeffs[d] = value;
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn truncate(&self, max_deg: usize) -> Self {
        Self::from_coeffs(max_deg, self.coeffs.iter().take(max_deg + 1).cloned())
    }
}

/// Bivariate power series truncated after `x^max_deg_x` and `y^max_deg_y`,
/// stored row-major by x-degree.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedPoly2<T> {
    max_deg_x: usize,
    max_deg_y: usize,
    coeffs: Vec<T>,
}

impl<T: Coefficient> TruncatedPoly2<T> {
    pub fn zero(max_deg_x: usize, max_deg_y: usize) -> Self {
        Self {
            max_deg_x,
            max_deg_y,
            coeffs: vec![T::zero(); (max_deg_x + 1) * (max_deg_y + 1)],
        }
    }

    pub fn one(max_deg_x: usize, max_deg_y: usize) -> Self {
        let mut p = Self::zero(max_deg_x, max_deg_y);
        p.coeffs[0] = T::one();
        p
    }

    /// Builds a series from a coefficient function over the truncation box.
    pub fn from_fn(max_deg_x: usize, max_deg_y: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut coeffs = Vec::with_capacity((max_deg_x + 1) * (max_deg_y + 1));
        for dx in 0..=max_deg_x {
            for dy in 0..=max_deg_y {
                coeffs.push(f(dx, dy));
            }
        }
        Self {
            max_deg_x,
            max_deg_y,
            coeffs,
        }
    }

    pub fn max_deg_x(&self) -> usize {
        self.max_deg_x
    }

    pub fn max_deg_y(&self) -> usize {
        self.max_deg_y
    }

    fn index(&self, dx: usize, dy: usize) -> usize {
        dx * (self.max_deg_y + 1) + dy
    }

    pub fn coeff(&self, dx: usize, dy: usize) -> &T {
        &self.coeffs[self.index(dx, dy)]
    }

    pub fn set(&mut self, dx: usize, dy: usize, value: T) {
        let i = self.index(dx, dy);
        self.coeffs[i] = value;
    }

    pub fn truncate(&self, max_deg_x: usize, max_deg_y: usize) -> Self {
        Self::from_fn(max_deg_x, max_deg_y, |dx, dy| {
            if dx <= self.max_deg_x && dy <= self.max_deg_y {
                self.coeff(dx, dy).clone()
            } else {
                T::zero()
            }
        })
    }
}

/// Truncated product of two univariate series.
pub fn poly1_mul<T: Coefficient>(
    a: &TruncatedPoly1<T>,
    b: &TruncatedPoly1<T>,
    max_deg: usize,
) -> Result<TruncatedPoly1<T>> {
    if a.max_deg < max_deg || b.max_deg < max_deg {
        return Err(Error::InvalidArgument(format!(
            "factors truncated at degrees {} and {} cannot give a product exact to degree {max_deg}",
            a.max_deg, b.max_deg
        )));
    }
    let mut out = TruncatedPoly1::zero(max_deg);
    for (i, ai) in a.coeffs.iter().enumerate().take(max_deg + 1) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.coeffs.iter().enumerate().take(max_deg + 1 - i) {
            T::mul_add(&mut out.coeffs[i + j], ai, bj);
        }
    }
    Ok(out)
}

/// Truncated product of two bivariate series. Both factors must be known at
/// least up to the requested degrees.
pub fn poly2_mul<T: Coefficient>(
    a: &TruncatedPoly2<T>,
    b: &TruncatedPoly2<T>,
    max_deg_x: usize,
    max_deg_y: usize,
) -> Result<TruncatedPoly2<T>> {
    for p in [a, b] {
        if p.max_deg_x < max_deg_x || p.max_deg_y < max_deg_y {
            return Err(Error::InvalidArgument(format!(
                "factor truncated at ({}, {}) cannot give a product exact to ({max_deg_x}, {max_deg_y})",
                p.max_deg_x, p.max_deg_y
            )));
        }
    }
    let mut out = TruncatedPoly2::zero(max_deg_x, max_deg_y);
    for ax in 0..=max_deg_x {
        for ay in 0..=max_deg_y {
            let ac = a.coeff(ax, ay);
            if ac.is_zero() {
                continue;
            }
            for bx in 0..=max_deg_x - ax {
                for by in 0..=max_deg_y - ay {
                    let bc = b.coeff(bx, by);
                    if bc.is_zero() {
                        continue;
                    }
                    let i = out.index(ax + bx, ay + by);
                    T::mul_add(&mut out.coeffs[i], ac, bc);
                }
            }
        }
    }
    Ok(out)
}

fn balanced_product<P, F>(items: &[P], mul: &F) -> Result<P>
where
    P: Clone + Send + Sync,
    F: Fn(&P, &P) -> Result<P> + Sync,
{
    match items {
        [] => Err(Error::EmptyInput("product of an empty list")),
        [single] => Ok(single.clone()),
        _ => {
            let (left, right) = items.split_at(items.len() / 2);
            #[cfg(feature = "parallel")]
            let (l, r) = rayon::join(|| balanced_product(left, mul), || balanced_product(right, mul));
            #[cfg(not(feature = "parallel"))]
            let (l, r) = (balanced_product(left, mul), balanced_product(right, mul));
            mul(&l?, &r?)
        }
    }
}

/// Product of all factors through a balanced binary tree.
pub fn product_tree<T: Coefficient>(
    polys: &[TruncatedPoly2<T>],
    max_deg_x: usize,
    max_deg_y: usize,
) -> Result<TruncatedPoly2<T>> {
    let truncated: Vec<_> = polys
        .iter()
        .map(|p| {
            if p.max_deg_x < max_deg_x || p.max_deg_y < max_deg_y {
                Err(Error::InvalidArgument(
                    "factor truncated below the requested degrees".into(),
                ))
            } else {
                Ok(p.truncate(max_deg_x, max_deg_y))
            }
        })
        .collect::<Result<_>>()?;
    balanced_product(&truncated, &|a, b| poly2_mul(a, b, max_deg_x, max_deg_y))
}

pub fn product_tree1<T: Coefficient>(
    polys: &[TruncatedPoly1<T>],
    max_deg: usize,
) -> Result<TruncatedPoly1<T>> {
    if polys.iter().any(|p| p.max_deg < max_deg) {
        return Err(Error::InvalidArgument(
            "factor truncated below the requested degree".into(),
        ));
    }
    let truncated: Vec<_> = polys.iter().map(|p| p.truncate(max_deg)).collect();
    balanced_product(&truncated, &|a, b| poly1_mul(a, b, max_deg))
}
