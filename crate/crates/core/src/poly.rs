//! Sparse commutative polynomials with exact coefficients.
//!
//! `Poly<V, F>` is kept in canonical form at all times: monomials are the
//! keys of a `BTreeMap` under a graded order, like monomials are merged, and
//! zero coefficients are never stored. Two polynomials are equal iff their
//! maps are equal.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::Hash;

use smallvec::SmallVec;

use crate::error::Result;
use crate::scalar::{Coefficient, Scalar};

pub trait Variable: Clone + Ord + Eq + Hash + fmt::Debug + fmt::Display + Send + Sync {}

impl<T: Clone + Ord + Eq + Hash + fmt::Debug + fmt::Display + Send + Sync> Variable for T {}

/// A power product of variables, sorted by variable, all powers positive.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial<V>(SmallVec<[(V, u32); 2]>);

impl<V: Variable> Monomial<V> {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(v: V) -> Self {
        let mut s = SmallVec::new();
        s.push((v, 1));
        Monomial(s)
    }

    pub fn from_factors(factors: impl IntoIterator<Item = (V, u32)>) -> Self {
        let mut map: BTreeMap<V, u32> = BTreeMap::new();
        for (v, k) in factors {
            if k > 0 {
                *map.entry(v).or_default() += k;
            }
        }
        Monomial(map.into_iter().collect())
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, k)| k).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(V, u32)] {
        &self.0
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = SmallVec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.0[i..].iter().cloned());
        out.extend(other.0[j..].iter().cloned());
        Monomial(out)
    }

    /// The monomial with one power of `factors[index]` removed.
    fn without_one(&self, index: usize) -> Self {
        let mut out = self.0.clone();
        if out[index].1 == 1 {
            out.remove(index);
        } else {
            out[index].1 -= 1;
        }
        Monomial(out)
    }

    pub fn power_of(&self, v: &V) -> u32 {
        self.0.iter().find(|(w, _)| w == v).map_or(0, |(_, k)| *k)
    }
}

impl<V: Variable> Ord for Monomial<V> {
    /// Graded: higher total degree first, then lexicographic on the factor
    /// list.
    fn cmp(&self, other: &Self) -> Ordering {
        other.degree().cmp(&self.degree()).then_with(|| self.0.as_slice().cmp(other.0.as_slice()))
    }
}

impl<V: Variable> PartialOrd for Monomial<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<V: Variable> fmt::Display for Monomial<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, (v, k)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *k == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{k}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly<V: Variable, F: Scalar> {
    terms: BTreeMap<Monomial<V>, F>,
}

impl<V: Variable, F: Scalar> Default for Poly<V, F> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<V: Variable, F: Scalar> Poly<V, F> {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn constant(c: F) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn one() -> Self {
        Self::constant(F::one())
    }

    pub fn var(v: V) -> Self {
        Self::monomial(Monomial::var(v), F::one())
    }

    pub fn monomial(m: Monomial<V>, c: F) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial<V>, F)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The value when the polynomial is a constant.
    pub fn as_constant(&self) -> Option<F> {
        if self.is_zero() {
            return Some(F::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn constant_term(&self) -> F {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(F::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial<V>, &F)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial<V>) -> F {
        self.terms.get(m).cloned().unwrap_or_else(F::zero)
    }

    /// The variable if the polynomial is exactly one variable with
    /// coefficient one.
    pub fn as_variable(&self) -> Option<&V> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next()?;
        if !c.is_one() || m.factors().len() != 1 || m.factors()[0].1 != 1 {
            return None;
        }
        Some(&m.factors()[0].0)
    }

    pub fn variables(&self) -> std::collections::BTreeSet<V> {
        self.terms.keys().flat_map(|m| m.factors().iter().map(|(v, _)| v.clone())).collect()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial<V>, c: F) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_assign_scaled(&mut self, other: &Self, c: &F) {
        if c.is_zero() {
            return;
        }
        for (m, d) in &other.terms {
            self.add_term(m.clone(), d.clone() * c.clone());
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_scaled(other, &F::one());
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_scaled(other, &(-F::one()));
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&(-F::one()))
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, d)| (m.clone(), d.clone() * c.clone())).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = Self::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial<V>, c: &F) -> Self {
        Poly { terms: self.terms.iter().map(|(k, d)| (k.mul(m), d.clone() * c.clone())).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Applies the derivation determined by its values on variables,
    /// extended by linearity and the Leibniz rule.
    pub fn derive_with(&self, mut on_var: impl FnMut(&V) -> Result<Self>) -> Result<Self> {
        let mut cache: BTreeMap<V, Self> = BTreeMap::new();
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            for (idx, (v, k)) in m.factors().iter().enumerate() {
                if !cache.contains_key(v) {
                    let d = on_var(v)?;
                    cache.insert(v.clone(), d);
                }
                let dv = &cache[v];
                if dv.is_zero() {
                    continue;
                }
                let rest = m.without_one(idx);
                let coeff = c.clone() * F::from_int(*k as i64);
                for (dm, dc) in &dv.terms {
                    out.add_term(rest.mul(dm), dc.clone() * coeff.clone());
                }
            }
        }
        Ok(out)
    }

    /// Ring homomorphism sending each variable to `on_var(v)` when it
    /// returns `Some`, and to itself otherwise.
    pub fn substitute(&self, mut on_var: impl FnMut(&V) -> Option<Self>) -> Self {
        let mut cache: BTreeMap<V, Option<Self>> = BTreeMap::new();
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut acc = Self::constant(c.clone());
            let mut kept: Vec<(V, u32)> = Vec::new();
            for (v, k) in m.factors() {
                let image = cache.entry(v.clone()).or_insert_with(|| on_var(v)).clone();
                match image {
                    Some(p) => acc = acc.mul(&p.pow(*k)),
                    None => kept.push((v.clone(), *k)),
                }
                if acc.is_zero() {
                    break;
                }
            }
            if !kept.is_empty() && !acc.is_zero() {
                acc = acc.mul_monomial(&Monomial::from_factors(kept), &F::one());
            }
            out.add_assign_scaled(&acc, &F::one());
        }
        out
    }

    pub fn eval(&self, mut value: impl FnMut(&V) -> Option<F>) -> Result<F> {
        let mut acc = F::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (v, k) in m.factors() {
                let x = value(v).ok_or_else(|| crate::Error::UnassignedVariable(v.to_string()))?;
                for _ in 0..*k {
                    term = term * x.clone();
                }
            }
            acc = acc + term;
        }
        Ok(acc)
    }

    /// Keeps only monomials for which `keep` holds.
    pub fn filter(&self, mut keep: impl FnMut(&Monomial<V>) -> bool) -> Self {
        Poly { terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }

    /// Divides out a common nonzero scalar so that the leading coefficient is 1.
    pub fn monic(&self) -> Self {
        match self.terms.values().next() {
            Some(c) => self.scale(&c.recip()),
            None => Self::zero(),
        }
    }

    /// True when `self = c · other` for some nonzero scalar `c`.
    pub fn proportional_to(&self, other: &Self) -> bool {
        self.monic() == other.monic()
    }
}

impl<V: Variable, F: Scalar> fmt::Display for Poly<V, F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

impl<V: Variable, F: Scalar> Coefficient<F> for Poly<V, F> {
    fn zero() -> Self {
        Poly::zero()
    }
    fn one() -> Self {
        Poly::one()
    }
    fn from_scalar(c: F) -> Self {
        Poly::constant(c)
    }
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        Poly::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        Poly::mul(self, other)
    }
    fn scale(&self, c: &F) -> Self {
        Poly::scale(self, c)
    }
    fn sub(&self, other: &Self) -> Self {
        Poly::sub(self, other)
    }
    fn neg(&self) -> Self {
        Poly::neg(self)
    }
    fn signed_parts(&self) -> (bool, String) {
        if self.terms.len() != 1 {
            return (false, format!("({self})"));
        }
        let (m, c) = self.terms.iter().next().expect("one term");
        let abs = c.abs();
        let body = if m.is_one() {
            abs.to_string()
        } else if abs.is_one() {
            m.to_string()
        } else {
            format!("{abs}*{m}")
        };
        (c.is_negative(), body)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use crate::scalar::Scalar;
    use proptest::prelude::*;

    type P = Poly<&'static str, Rational>;

    fn v(name: &'static str) -> P {
        P::var(name)
    }

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn identities() {
        let p = v("a").add(&v("b").scale(&q(3)));
        assert_eq!(p.add(&P::zero()), p);
        assert_eq!(p.mul(&P::one()), p);
        let lhs = v("a").add(&v("b")).mul(&v("c"));
        assert_eq!(lhs, v("a").mul(&v("c")).add(&v("b").mul(&v("c"))));
    }

    #[test]
    fn cancellation_precedes_evaluation() {
        let p = v("a").sub(&v("a"));
        assert!(p.is_zero());
        assert_eq!(p.eval(|_| None).unwrap(), q(0));
        let ac = v("a").mul(&v("c"));
        let val = ac.eval(|x| match *x {
            "a" => Some(q(2)),
            "c" => Some(q(3)),
            _ => None,
        });
        assert_eq!(val.unwrap(), q(6));
        assert!(ac.eval(|_| None).is_err());
    }

    #[test]
    fn rendering() {
        let p = v("a").mul(&v("c")).scale(&Rational::from_ratio(3, 2)).sub(&P::constant(q(2)));
        assert_eq!(p.to_string(), "3/2*a*c - 2");
        assert_eq!(v("a").pow(2).neg().to_string(), "-a^2");
    }

    fn arb_poly() -> impl Strategy<Value = P> {
        let names = ["a", "b", "c"];
        prop::collection::vec((prop::collection::vec((0usize..3, 1u32..3), 0..3), -5i64..5), 0..5).prop_map(
            move |terms| {
                P::from_terms(terms.into_iter().map(|(fs, c)| {
                    (Monomial::from_factors(fs.into_iter().map(|(i, k)| (names[i], k))), q(c))
                }))
            },
        )
    }

    proptest! {
        #[test]
        fn ring_axioms(p in arb_poly(), r in arb_poly(), s in arb_poly()) {
            prop_assert_eq!(p.mul(&r).mul(&s), p.mul(&r.mul(&s)));
            prop_assert_eq!(p.mul(&r), r.mul(&p));
            prop_assert_eq!(p.add(&r), r.add(&p));
            prop_assert_eq!(p.mul(&r.add(&s)), p.mul(&r).add(&p.mul(&s)));
            prop_assert_eq!(p.add(&r).sub(&r), p.clone());
        }

        #[test]
        fn canonical_form_is_idempotent(p in arb_poly()) {
            let again = P::from_terms(p.terms().map(|(m, c)| (m.clone(), c.clone())));
            prop_assert_eq!(&again, &p);
            prop_assert!(p.terms().all(|(_, c)| !c.is_zero()));
            let keys: Vec<_> = p.terms().map(|(m, _)| m.clone()).collect();
            let mut sorted = keys.clone();
            sorted.sort();
            prop_assert_eq!(keys, sorted);
        }
    }
}
