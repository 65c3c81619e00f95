//! Scalar fields and coefficient rings.
//!
//! Every computation in this crate is exact. The scalar field is any
//! characteristic-zero field that supports exact equality; the bundled
//! implementations are the rationals `Ratio<T>` over a signed integer type.
//! Floating-point types are deliberately not `Scalar` because they are not
//! `Eq`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

/// An exact field of characteristic zero.
pub trait Scalar:
    Clone
    + Eq
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Signed
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_int(n: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    /// Multiplicative inverse; panics on zero like integer division would.
    fn recip(&self) -> Self {
        Self::one() / self.clone()
    }
}

impl<T> Scalar for Ratio<T>
where
    T: Clone + Integer + Signed + From<i64> + fmt::Debug + fmt::Display + Send + Sync + 'static,
{
    fn from_int(n: i64) -> Self {
        Ratio::from_integer(T::from(n))
    }
}

/// A commutative ring of coefficients that is also a vector space over `F`.
///
/// Implemented by the scalars themselves, by differential polynomials and by
/// polynomials in the time variables, so that Laurent series can carry any of
/// them.
pub trait Coefficient<F: Scalar>: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_scalar(c: F) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, c: &F) -> Self;

    fn neg(&self) -> Self {
        self.scale(&(-F::one()))
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Sign and absolute rendering; the body is parenthesized when it is a
    /// sum, so it can stand as a factor.
    fn signed_parts(&self) -> (bool, String);
}

impl<F: Scalar> Coefficient<F> for F {
    fn zero() -> Self {
        <F as Zero>::zero()
    }
    fn one() -> Self {
        <F as One>::one()
    }
    fn from_scalar(c: F) -> Self {
        c
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self.clone() + other.clone()
    }
    fn mul(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }
    fn scale(&self, c: &F) -> Self {
        self.clone() * c.clone()
    }
    fn signed_parts(&self) -> (bool, String) {
        (self.is_negative(), self.abs().to_string())
    }
}

/// Exact falling-factorial binomial `top (top-1) ... (top-k+1) / k!`,
/// defined for negative `top`.
pub fn binomial<F: Scalar>(top: i64, k: u32) -> F {
    let mut acc = F::one();
    for j in 0..k as i64 {
        acc = acc * F::from_int(top - j) / F::from_int(j + 1);
    }
    acc
}

pub fn factorial<F: Scalar>(k: u32) -> F {
    (1..=k as i64).fold(F::one(), |acc, j| acc * F::from_int(j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn binomial_matches_pascal_for_small_entries() {
        for top in -8i64..=8 {
            for k in 1u32..=8 {
                let lhs: Rational = binomial(top, k);
                let rhs: Rational = binomial::<Rational>(top - 1, k) + binomial::<Rational>(top - 1, k - 1);
                assert_eq!(lhs, rhs, "C({top},{k})");
            }
        }
    }

    #[test]
    fn minus_one_choose_k_alternates() {
        for k in 0..7u32 {
            let v: Rational = binomial(-1, k);
            assert_eq!(v, Rational::from_int(if k % 2 == 0 { 1 } else { -1 }));
        }
    }

    #[test]
    fn small_ratio_types_are_scalars() {
        let a = Ratio::<i128>::from_ratio(3, 4);
        assert_eq!(a.recip(), Ratio::<i128>::from_ratio(4, 3));
        let b: Ratio<i64> = binomial(5, 2);
        assert_eq!(b, Ratio::from_int(10));
    }
}
