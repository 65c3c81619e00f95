//! Multi-indices in `Z^n`.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::scalar::{binomial, Scalar};

/// An element of `Z^n`: exponent of a `∂`- or `z`-monomial, or the label of
/// a time variable `t_α`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(SmallVec<[i32; 4]>);

impl MultiIndex {
    pub fn new(components: impl IntoIterator<Item = i32>) -> Self {
        MultiIndex(components.into_iter().collect())
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(SmallVec::from_elem(0, n))
    }

    /// `(1, ..., 1)`.
    pub fn ones(n: usize) -> Self {
        MultiIndex(SmallVec::from_elem(1, n))
    }

    /// The standard basis vector `e_i` (zero-based `i`).
    pub fn unit(n: usize, i: usize) -> Self {
        let mut m = Self::zero(n);
        m.0[i] = 1;
        m
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[i32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> i32 {
        self.0[i]
    }

    pub fn with(&self, i: usize, value: i32) -> Self {
        let mut m = self.clone();
        m.0[i] = value;
        m
    }

    /// `|α| = α_1 + ... + α_n`.
    pub fn total(&self) -> i64 {
        self.0.iter().map(|&a| a as i64).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&a| a >= 0)
    }

    /// Membership in `Z^n_+`: `α ≥ 0` and `|α| ≥ 1`.
    pub fn in_zplus(&self) -> bool {
        self.is_nonnegative() && self.total() >= 1
    }

    /// `α ≥ 1` componentwise.
    pub fn all_positive(&self) -> bool {
        self.0.iter().all(|&a| a >= 1)
    }

    /// If this is a standard basis vector, its position.
    pub fn unit_direction(&self) -> Option<usize> {
        let mut found = None;
        for (i, &a) in self.0.iter().enumerate() {
            match a {
                0 => {}
                1 if found.is_none() => found = Some(i),
                _ => return None,
            }
        }
        found
    }

    /// Componentwise `self ≤ other`.
    pub fn leq(&self, other: &Self) -> Result<bool> {
        check_dims(self, other)?;
        Ok(self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b))
    }

    /// Product of generalized binomials `C(α_i, γ_i)`.
    pub fn binomial<F: Scalar>(&self, gamma: &Self) -> Result<F> {
        check_dims(self, gamma)?;
        if !gamma.is_nonnegative() {
            return Err(Error::NegativeBinomialIndex(gamma.clone()));
        }
        let mut acc = F::one();
        for (&a, &g) in self.0.iter().zip(gamma.0.iter()) {
            acc = acc * binomial::<F>(a as i64, g as u32);
            if acc.is_zero() {
                break;
            }
        }
        Ok(acc)
    }

    /// `α⁻¹ = (α_1 ⋯ α_n)⁻¹`; `None` when some component is zero.
    pub fn inverse_product<F: Scalar>(&self) -> Option<F> {
        let mut acc = F::one();
        for &a in self.0.iter() {
            if a == 0 {
                return None;
            }
            acc = acc * F::from_int(a as i64);
        }
        Some(acc.recip())
    }

    pub fn componentwise_max(&self, other: &Self) -> Self {
        MultiIndex(self.0.iter().zip(other.0.iter()).map(|(&a, &b)| a.max(b)).collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = i32> + '_ {
        self.0.iter().copied()
    }

    pub fn concat(&self, other: &Self) -> Self {
        MultiIndex(self.0.iter().chain(other.0.iter()).copied().collect())
    }

    pub fn slice(&self, start: usize, len: usize) -> Self {
        MultiIndex(self.0[start..start + len].iter().copied().collect())
    }
}

fn check_dims(a: &MultiIndex, b: &MultiIndex) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    Ok(())
}

impl Add for &MultiIndex {
    type Output = MultiIndex;
    fn add(self, rhs: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), rhs.dim());
        MultiIndex(self.0.iter().zip(rhs.0.iter()).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &MultiIndex {
    type Output = MultiIndex;
    fn sub(self, rhs: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), rhs.dim());
        MultiIndex(self.0.iter().zip(rhs.0.iter()).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &MultiIndex {
    type Output = MultiIndex;
    fn neg(self) -> MultiIndex {
        MultiIndex(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl From<&[i32]> for MultiIndex {
    fn from(v: &[i32]) -> Self {
        MultiIndex(v.iter().copied().collect())
    }
}

impl<const N: usize> From<[i32; N]> for MultiIndex {
    fn from(v: [i32; N]) -> Self {
        MultiIndex(v.iter().copied().collect())
    }
}

/// All `γ` with `0 ≤ γ ≤ upper` componentwise.
pub fn box_below(upper: &[u32]) -> Vec<MultiIndex> {
    let mut out = vec![MultiIndex::new(std::iter::empty())];
    for &u in upper {
        let mut next = Vec::with_capacity(out.len() * (u as usize + 1));
        for m in &out {
            for g in 0..=u as i32 {
                let mut v = m.0.clone();
                v.push(g);
                next.push(MultiIndex(v));
            }
        }
        out = next;
    }
    out
}

/// All nonnegative multi-indices of dimension `n` with `|β| ≤ max_total`,
/// in graded order.
pub fn nonnegative_up_to(n: usize, max_total: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for d in 0..=max_total {
        compositions(n, d, &mut Vec::new(), &mut out);
    }
    out
}

/// Nonnegative multi-indices with `|β| = total`, lexicographically descending.
pub fn compositions_of(n: usize, total: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    compositions(n, total, &mut Vec::new(), &mut out);
    out
}

fn compositions(n: usize, remaining: u32, prefix: &mut Vec<i32>, out: &mut Vec<MultiIndex>) {
    if prefix.len() + 1 == n {
        prefix.push(remaining as i32);
        out.push(MultiIndex::new(prefix.iter().copied()));
        prefix.pop();
        return;
    }
    if n == 0 {
        if remaining == 0 {
            out.push(MultiIndex::new(std::iter::empty()));
        }
        return;
    }
    for k in (0..=remaining).rev() {
        prefix.push(k as i32);
        compositions(n, remaining - k, prefix, out);
        prefix.pop();
    }
}
