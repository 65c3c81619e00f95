//! Box windows: per-component lower bounds below which terms are unknown.

use std::fmt;

use smallvec::SmallVec;

use crate::multi_index::MultiIndex;

/// Stand-in for `+∞` in bounds and windows; arithmetic saturates at it.
pub const UNBOUNDED: i32 = i32::MAX / 4;

pub(crate) fn sat_add(a: i32, b: i32) -> i32 {
    if a >= UNBOUNDED || b >= UNBOUNDED {
        UNBOUNDED
    } else {
        (a as i64 + b as i64).clamp(-(UNBOUNDED as i64), UNBOUNDED as i64) as i32
    }
}

/// `μ ∈ (Z ∪ {exact})^n`. An exponent `e` is known iff `e_i ≥ μ_i` for every
/// component with a bound.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Window(SmallVec<[Option<i32>; 4]>);

impl Window {
    pub fn exact(n: usize) -> Self {
        Window(SmallVec::from_elem(None, n))
    }

    pub fn new(bounds: impl IntoIterator<Item = Option<i32>>) -> Self {
        Window(bounds.into_iter().collect())
    }

    /// Bounded in component `i` only.
    pub fn single(n: usize, i: usize, lower: i32) -> Self {
        let mut w = Self::exact(n);
        w.0[i] = Some(lower);
        w
    }

    /// Every component bounded below by `lower`.
    pub fn uniform(n: usize, lower: i32) -> Self {
        Window(SmallVec::from_elem(Some(lower), n))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, i: usize) -> Option<i32> {
        self.0[i]
    }

    pub fn with(&self, i: usize, value: Option<i32>) -> Self {
        let mut w = self.clone();
        w.0[i] = value;
        w
    }

    pub fn iter(&self) -> impl Iterator<Item = Option<i32>> + '_ {
        self.0.iter().copied()
    }

    pub fn is_exact(&self) -> bool {
        self.0.iter().all(Option::is_none)
    }

    pub fn contains(&self, e: &MultiIndex) -> bool {
        self.0.iter().zip(e.iter()).all(|(m, a)| m.map_or(true, |m| a >= m))
    }

    /// The coarser of two windows: componentwise max, exact being lowest.
    pub fn meet(&self, other: &Self) -> Self {
        Window(self.0.iter().zip(other.0.iter()).map(|(a, b)| max_opt(*a, *b)).collect())
    }

    /// `μ + v` on bounded components.
    pub fn shifted(&self, v: &MultiIndex) -> Self {
        Window(self.0.iter().zip(v.iter()).map(|(m, a)| m.map(|m| sat_add(m, a))).collect())
    }

    /// `μ − v` on bounded components.
    pub fn lowered(&self, v: &MultiIndex) -> Self {
        Window(self.0.iter().zip(v.iter()).map(|(m, a)| m.map(|m| sat_add(m, -a.min(UNBOUNDED)))).collect())
    }

    /// Window of a product: `max(μa + νb, μb + νa)` componentwise.
    pub fn of_product(mu_a: &Self, nu_a: &MultiIndex, mu_b: &Self, nu_b: &MultiIndex) -> Self {
        mu_a.shifted(nu_b).meet(&mu_b.shifted(nu_a))
    }

    /// Combines a derived window with an optional requested one.
    pub fn with_request(&self, requested: Option<&Self>) -> Self {
        match requested {
            Some(r) => self.meet(r),
            None => self.clone(),
        }
    }
}

pub(crate) fn max_opt(a: Option<i32>, b: Option<i32>) -> Option<i32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            match m {
                Some(v) if *v >= UNBOUNDED => write!(f, "inf")?,
                Some(v) => write!(f, "{v}")?,
                None => write!(f, "*")?,
            }
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
