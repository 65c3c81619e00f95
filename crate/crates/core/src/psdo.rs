//! Pseudodifferential operators `Σ f_α ∂^α` with box-window truncation.
//!
//! Coefficients sit to the left of `∂`-monomials. Each operator carries a
//! window `μ` (terms with some `α_i < μ_i` are unknown and never stored) and
//! an upper bound `ν` on the support of the full, untruncated operator. All
//! products derive the window of their result from these two, so every
//! stored coefficient is exact.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::jet::{derive_free, DiffPoly};
use crate::multi_index::MultiIndex;
use crate::poly::Poly;
use crate::scalar::{Coefficient, Scalar};
use crate::window::{sat_add, Window, UNBOUNDED};

#[derive(Clone, PartialEq)]
pub struct PsdOp<F: Scalar> {
    n: usize,
    terms: BTreeMap<MultiIndex, DiffPoly<F>>,
    window: Window,
    bound: MultiIndex,
}

/// First exponent at which two operators differ inside their common window.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness<F: Scalar> {
    pub exponent: MultiIndex,
    pub left: DiffPoly<F>,
    pub right: DiffPoly<F>,
}

impl<F: Scalar> fmt::Display for Witness<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at d^{}: {} vs {}", self.exponent, self.left, self.right)
    }
}

fn support_max(n: usize, terms: &BTreeMap<MultiIndex, impl Sized>) -> MultiIndex {
    let mut it = terms.keys();
    match it.next() {
        None => MultiIndex::zero(n),
        Some(first) => it.fold(first.clone(), |acc, e| acc.componentwise_max(e)),
    }
}

fn bound_add(a: &MultiIndex, b: &MultiIndex) -> MultiIndex {
    MultiIndex::new(a.iter().zip(b.iter()).map(|(x, y)| sat_add(x, y)))
}

impl<F: Scalar> PsdOp<F> {
    pub fn zero(n: usize) -> Self {
        PsdOp { n, terms: BTreeMap::new(), window: Window::exact(n), bound: MultiIndex::zero(n) }
    }

    pub fn one(n: usize) -> Self {
        Self::monomial(MultiIndex::zero(n), Poly::one())
    }

    /// `c ∂^e`, exact.
    pub fn monomial(e: MultiIndex, c: DiffPoly<F>) -> Self {
        let n = e.dim();
        Self::from_terms(n, [(e, c)], Window::exact(n))
    }

    /// `∂_i` (zero-based `i`).
    pub fn d(n: usize, i: usize) -> Self {
        Self::monomial(MultiIndex::unit(n, i), Poly::one())
    }

    /// Multiplication by a coefficient.
    pub fn coefficient(n: usize, c: DiffPoly<F>) -> Self {
        Self::monomial(MultiIndex::zero(n), c)
    }

    /// Builds an operator from terms; like exponents are merged and terms
    /// outside the window are discarded. The bound is the support maximum.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (MultiIndex, DiffPoly<F>)>, window: Window) -> Self {
        assert_eq!(window.dim(), n, "window dimension");
        let mut map: BTreeMap<MultiIndex, DiffPoly<F>> = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.dim(), n, "exponent dimension");
            if !window.contains(&e) {
                continue;
            }
            let entry = map.entry(e).or_default();
            *entry = entry.add(&c);
        }
        map.retain(|_, c| !c.is_zero());
        let bound = support_max(n, &map);
        PsdOp { n, terms: map, window, bound }
    }

    /// Declares an upper bound for the full operator, which must dominate
    /// the stored support.
    pub fn with_bound(mut self, bound: MultiIndex) -> Result<Self> {
        if bound.dim() != self.n {
            return Err(Error::DimensionMismatch { left: self.n, right: bound.dim() });
        }
        for e in self.terms.keys() {
            if !e.leq(&bound)? {
                return Err(Error::Invalid(format!("term at {e} exceeds the declared bound {bound}")));
            }
        }
        self.bound = bound;
        Ok(self)
    }

    /// Replaces the window by a coarser one and drops terms outside it.
    pub fn truncated(&self, window: &Window) -> Self {
        let w = self.window.meet(window);
        PsdOp {
            n: self.n,
            terms: self.terms.iter().filter(|(e, _)| w.contains(e)).map(|(e, c)| (e.clone(), c.clone())).collect(),
            window: w,
            bound: self.bound.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn bound(&self) -> &MultiIndex {
        &self.bound
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &DiffPoly<F>)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.window.is_exact()
    }

    /// Coefficient at `e`; an error if `e` lies outside the window.
    pub fn coeff(&self, e: &MultiIndex) -> Result<DiffPoly<F>> {
        if e.dim() != self.n {
            return Err(Error::DimensionMismatch { left: self.n, right: e.dim() });
        }
        if !self.window.contains(e) {
            return Err(Error::OutsideWindow { exponent: e.clone(), window: self.window.to_string() });
        }
        Ok(self.terms.get(e).cloned().unwrap_or_default())
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let window = self.window.meet(&other.window);
        let mut terms: BTreeMap<MultiIndex, DiffPoly<F>> = BTreeMap::new();
        for (e, c) in self.terms.iter().chain(other.terms.iter()) {
            if window.contains(e) {
                terms.entry(e.clone()).or_default().add_assign_scaled(c, &F::one());
            }
        }
        terms.retain(|_, c| !c.is_zero());
        let bound = if self.is_zero() && self.is_exact() {
            other.bound.clone()
        } else if other.is_zero() && other.is_exact() {
            self.bound.clone()
        } else {
            self.bound.componentwise_max(&other.bound)
        };
        Ok(PsdOp { n: self.n, terms, window, bound })
    }

    pub fn neg(&self) -> Self {
        self.scale(&(-F::one()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &F) -> Self {
        let terms = if c.is_zero() {
            BTreeMap::new()
        } else {
            self.terms.iter().map(|(e, p)| (e.clone(), p.scale(c))).collect()
        };
        PsdOp { n: self.n, terms, window: self.window.clone(), bound: self.bound.clone() }
    }

    /// Applies `g` to every coefficient, keeping window and bound.
    pub fn map_coefficients(&self, mut g: impl FnMut(&DiffPoly<F>) -> Result<DiffPoly<F>>) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let v = g(c)?;
            if !v.is_zero() {
                terms.insert(e.clone(), v);
            }
        }
        Ok(PsdOp { n: self.n, terms, window: self.window.clone(), bound: self.bound.clone() })
    }

    /// Leibniz product `self ∘ other`.
    ///
    /// The result is exact on `max(μa + νb, μb + νa)`, coarsened further by
    /// `requested`. A component that stays exact while an infinite Leibniz
    /// tail arises in it is an error.
    pub fn mul(&self, other: &Self, requested: Option<&Window>) -> Result<Self> {
        self.check_dim(other)?;
        if let Some(r) = requested {
            if r.dim() != self.n {
                return Err(Error::DimensionMismatch { left: self.n, right: r.dim() });
            }
        }
        let n = self.n;
        let window = Window::of_product(&self.window, &self.bound, &other.window, &other.bound).with_request(requested);
        let bound = bound_add(&self.bound, &other.bound);
        if self.is_zero() || other.is_zero() {
            return Ok(PsdOp { n, terms: BTreeMap::new(), window, bound });
        }
        for i in 0..n {
            if window.get(i).is_none()
                && self.terms.keys().any(|a| a.get(i) < 0)
                && other.terms.values().any(|h| !h.is_constant())
            {
                return Err(Error::NoWindow { component: i });
            }
        }
        let mut derivs = DerivativeCache::default();
        let mut out: BTreeMap<MultiIndex, DiffPoly<F>> = BTreeMap::new();
        for (alpha, f) in &self.terms {
            for (beta, h) in &other.terms {
                let constant = h.is_constant();
                let mut upper = Vec::with_capacity(n);
                let mut skip = false;
                for i in 0..n {
                    let (a, b) = (alpha.get(i) as i64, beta.get(i) as i64);
                    let mut u = if constant { 0 } else if a >= 0 { a } else { i64::MAX };
                    if let Some(m) = window.get(i) {
                        u = u.min(a + b - m as i64);
                    }
                    if u < 0 {
                        skip = true;
                        break;
                    }
                    upper.push(u as u32);
                }
                if skip {
                    continue;
                }
                for gamma in crate::multi_index::box_below(&upper) {
                    let c: F = alpha.binomial(&gamma)?;
                    if c.is_zero() {
                        continue;
                    }
                    let dh = derivs.get(beta, h, &gamma)?;
                    if dh.is_zero() {
                        continue;
                    }
                    let e = &(alpha + beta) - &gamma;
                    out.entry(e).or_default().add_assign_scaled(&f.mul(&dh), &c);
                }
            }
        }
        out.retain(|e, c| !c.is_zero() && window.contains(e));
        Ok(PsdOp { n, terms: out, window, bound })
    }

    /// Ordered product of several factors, exact on `requested` where the
    /// inputs allow it.
    pub fn product(factors: &[&Self], n: usize, requested: Option<&Window>) -> Result<Self> {
        let mut acc = Self::one(n);
        for (k, f) in factors.iter().enumerate() {
            let req = requested.map(|w| {
                factors[k + 1..].iter().fold(w.clone(), |acc, g| lowered_keep(&acc, g.bound()))
            });
            acc = acc.mul(f, req.as_ref())?;
        }
        Ok(acc)
    }

    /// `L_1^{α_1} ⋯ L_n^{α_n}`, multiplied left to right.
    pub fn power_multi(ls: &[Self], alpha: &MultiIndex, requested: Option<&Window>) -> Result<Self> {
        if ls.len() != alpha.dim() {
            return Err(Error::DimensionMismatch { left: ls.len(), right: alpha.dim() });
        }
        if !alpha.is_nonnegative() {
            return Err(Error::NegativePower(alpha.clone()));
        }
        let n = ls.first().map_or(alpha.dim(), |l| l.n);
        let mut factors = Vec::new();
        for (l, k) in ls.iter().zip(alpha.iter()) {
            for _ in 0..k {
                factors.push(l);
            }
        }
        Self::product(&factors, n, requested)
    }

    pub fn commutator(&self, other: &Self, requested: Option<&Window>) -> Result<Self> {
        self.mul(other, requested)?.sub(&other.mul(self, requested)?)
    }

    /// `Σ (−1)^{|α|} ∂^α ∘ f_α`, re-expanded with coefficients on the left.
    pub fn adjoint(&self, requested: Option<&Window>) -> Result<Self> {
        let n = self.n;
        let window = self.window.with_request(requested);
        for i in 0..n {
            if window.get(i).is_none() && self.terms.iter().any(|(a, f)| a.get(i) < 0 && !f.is_constant()) {
                return Err(Error::NoWindow { component: i });
            }
        }
        let mut derivs = DerivativeCache::default();
        let mut out: BTreeMap<MultiIndex, DiffPoly<F>> = BTreeMap::new();
        for (alpha, f) in &self.terms {
            let sign = if alpha.total().rem_euclid(2) == 0 { F::one() } else { -F::one() };
            let mut upper = Vec::with_capacity(n);
            let mut skip = false;
            for i in 0..n {
                let a = alpha.get(i) as i64;
                let mut u = if f.is_constant() { 0 } else if a >= 0 { a } else { i64::MAX };
                if let Some(m) = window.get(i) {
                    u = u.min(a - m as i64);
                }
                if u < 0 {
                    skip = true;
                    break;
                }
                upper.push(u as u32);
            }
            if skip {
                continue;
            }
            for gamma in crate::multi_index::box_below(&upper) {
                let c: F = alpha.binomial(&gamma)?;
                if c.is_zero() {
                    continue;
                }
                let df = derivs.get(alpha, f, &gamma)?;
                let e = alpha - &gamma;
                out.entry(e).or_default().add_assign_scaled(&df, &(c * sign.clone()));
            }
        }
        out.retain(|e, c| !c.is_zero() && window.contains(e));
        Ok(PsdOp { n, terms: out, window, bound: self.bound.clone() })
    }

    /// `Res_∂ ψ`: the coefficient of `∂^{(−1,…,−1)}`.
    pub fn res_partial(&self) -> Result<DiffPoly<F>> {
        self.coeff(&(-&MultiIndex::ones(self.n)))
    }

    /// `(ψ_+, ψ_−)` by the sign of the last exponent.
    pub fn split(&self) -> (Self, Self) {
        let last = self.n - 1;
        let (plus, minus): (BTreeMap<_, _>, BTreeMap<_, _>) =
            self.terms.iter().map(|(e, c)| (e.clone(), c.clone())).partition(|(e, _)| e.get(last) >= 0);
        let plus_window = match self.window.get(last) {
            Some(m) if m <= 0 => self.window.with(last, None),
            _ => self.window.clone(),
        };
        let minus_bound = self.bound.with(last, self.bound.get(last).min(-1));
        (
            PsdOp { n: self.n, terms: plus, window: plus_window, bound: self.bound.clone() },
            PsdOp { n: self.n, terms: minus, window: self.window.clone(), bound: minus_bound },
        )
    }

    pub fn plus(&self) -> Self {
        self.split().0
    }

    pub fn minus(&self) -> Self {
        self.split().1
    }

    /// Inverse of `1 + r` with every exponent of `r` having last component
    /// `≤ −1`, by the Neumann series `Σ (−r)^k`.
    pub fn inverse(&self, requested: Option<&Window>) -> Result<Self> {
        let n = self.n;
        let last = n - 1;
        let zero = MultiIndex::zero(n);
        let one = Poly::one();
        if !self.window.contains(&zero) || self.terms.get(&zero) != Some(&one) {
            return Err(Error::NotUnital(self.to_string()));
        }
        if self.terms.keys().any(|e| *e != zero && e.get(last) >= 0) {
            return Err(Error::NotUnital(self.to_string()));
        }
        let mut r = self.clone();
        r.terms.remove(&zero);
        r.bound = r.bound.with(last, r.bound.get(last).min(-1));
        let target = self.window.with_request(requested);
        let m = match target.get(last) {
            Some(m) => m,
            None if r.is_zero() && r.is_exact() => return Ok(Self::one(n)),
            None => return Err(Error::NoWindow { component: last }),
        };
        let k_max = (-(m as i64)).max(0) as usize;
        let neg_r = r.neg();
        let mut sum = Self::one(n).truncated(&target);
        let mut power = Self::one(n);
        for k in 1..=k_max {
            // Known on the target itself and as deep as later powers need.
            let mut req = target.clone();
            let mut step = target.clone();
            for _ in 0..(k_max - k) {
                step = lowered_keep(&step, &r.bound);
                req = finer(&req, &step);
            }
            power = neg_r.mul(&power, Some(&req))?;
            sum = sum.add(&power)?;
        }
        let mut bound = MultiIndex::zero(n);
        for i in 0..last {
            if r.bound.get(i) > 0 {
                bound = bound.with(i, UNBOUNDED);
            }
        }
        sum.bound = bound;
        sum.window = sum.window.meet(&target);
        sum.terms.retain(|e, _| target.contains(e));
        Ok(sum)
    }

    /// First exponent inside both windows where the operators differ.
    pub fn first_difference(&self, other: &Self) -> Option<Witness<F>> {
        let window = self.window.meet(&other.window);
        let mut keys: Vec<&MultiIndex> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.sort_by(|a, b| display_order(a, b));
        keys.dedup();
        for e in keys {
            if !window.contains(e) {
                continue;
            }
            let l = self.terms.get(e).cloned().unwrap_or_default();
            let r = other.terms.get(e).cloned().unwrap_or_default();
            if l != r {
                return Some(Witness { exponent: e.clone(), left: l, right: r });
            }
        }
        None
    }

    /// Agreement on every exponent inside both windows.
    pub fn window_eq(&self, other: &Self) -> bool {
        self.n == other.n && self.first_difference(other).is_none()
    }

    /// Every stored exponent has last component `≤ −1`.
    pub fn in_pminus(&self) -> bool {
        self.terms.keys().all(|e| e.get(self.n - 1) <= -1)
    }

    /// Every stored exponent is `≤ −𝟙`.
    pub fn in_phat(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|a| a <= -1))
    }

    /// Exponents in rendering order.
    pub fn sorted_terms(&self) -> Vec<(&MultiIndex, &DiffPoly<F>)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| display_order(a.0, b.0));
        v
    }
}

/// `μ − v` where `v` is finite; components with an unbounded `v` keep `μ`.
fn lowered_keep(w: &Window, v: &MultiIndex) -> Window {
    let finite = MultiIndex::new(v.iter().map(|a| if a.abs() >= UNBOUNDED { 0 } else { a }));
    w.lowered(&finite)
}

/// Componentwise minimum, exact being lowest.
fn finer(a: &Window, b: &Window) -> Window {
    Window::new(a.iter().zip(b.iter()).map(|(x, y)| match (x, y) {
        (Some(x), Some(y)) => Some(x.min(y)),
        _ => None,
    }))
}

/// Descending in the last component, then the one before, and so on.
pub fn display_order(a: &MultiIndex, b: &MultiIndex) -> std::cmp::Ordering {
    let n = a.dim();
    for i in (0..n).rev() {
        match b.get(i).cmp(&a.get(i)) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

struct DerivativeCache<F: Scalar> {
    memo: HashMap<(MultiIndex, MultiIndex), DiffPoly<F>>,
}

impl<F: Scalar> Default for DerivativeCache<F> {
    fn default() -> Self {
        DerivativeCache { memo: HashMap::new() }
    }
}

impl<F: Scalar> DerivativeCache<F> {
    fn get(&mut self, key: &MultiIndex, h: &DiffPoly<F>, gamma: &MultiIndex) -> Result<DiffPoly<F>> {
        if gamma.is_zero() {
            return Ok(h.clone());
        }
        let k = (key.clone(), gamma.clone());
        if let Some(v) = self.memo.get(&k) {
            return Ok(v.clone());
        }
        let i = gamma.iter().position(|g| g > 0).expect("nonzero gamma");
        let prev = self.get(key, h, &gamma.with(i, gamma.get(i) - 1))?;
        let v = derive_free(&prev, &MultiIndex::unit(gamma.dim(), i))?;
        self.memo.insert(k, v.clone());
        Ok(v)
    }
}

/// `d1^2*d2^-1`; empty for the zero exponent.
pub fn render_monomial(e: &MultiIndex) -> String {
    let mut parts = Vec::new();
    for (i, a) in e.iter().enumerate() {
        match a {
            0 => {}
            1 => parts.push(format!("d{}", i + 1)),
            _ => parts.push(format!("d{}^{}", i + 1, a)),
        }
    }
    parts.join("*")
}

/// Renders `Σ c_e X^e` with coefficients on the left; shared with series.
pub(crate) fn render_sum<'a, F: Scalar, C: Coefficient<F> + 'a>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (String, &'a C)>,
) -> fmt::Result {
    let mut first = true;
    for (mono, c) in terms {
        let (negative, coeff) = c.signed_parts();
        let coeff = if coeff == "1" && !mono.is_empty() { String::new() } else { coeff };
        let body = join_factor(&coeff, &mono);
        if first {
            if negative {
                write!(f, "-")?;
            }
            first = false;
        } else if negative {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        write!(f, "{body}")?;
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

fn join_factor(coeff: &str, mono: &str) -> String {
    match (coeff.is_empty(), mono.is_empty()) {
        (true, true) => "1".to_string(),
        (true, false) => mono.to_string(),
        (false, true) => coeff.to_string(),
        (false, false) => format!("{coeff}*{mono}"),
    }
}

impl<F: Scalar> fmt::Display for PsdOp<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render_sum::<F, DiffPoly<F>>(f, self.sorted_terms().into_iter().map(|(e, c)| (render_monomial(e), c)))
    }
}

impl<F: Scalar> fmt::Debug for PsdOp<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} [window {}, bound {}]", self.window, self.bound)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{jet_poly, Alphabet, Jet};
    use crate::Rational;

    type Op = PsdOp<Rational>;

    fn al() -> Alphabet {
        Alphabet::from_names(["a", "b", "c", "d", "f", "w"]).unwrap()
    }

    fn s(name: &str) -> DiffPoly<Rational> {
        jet_poly(Jet::base(al().get(name).unwrap()))
    }

    fn dx(p: &DiffPoly<Rational>, n: usize, i: usize) -> DiffPoly<Rational> {
        derive_free(p, &MultiIndex::unit(n, i)).unwrap()
    }

    fn mono(e: &[i32], c: DiffPoly<Rational>) -> Op {
        Op::monomial(MultiIndex::from(e), c)
    }

    fn sum(ops: &[Op]) -> Op {
        ops.iter().skip(1).fold(ops[0].clone(), |acc, o| acc.add(o).unwrap())
    }

    fn one() -> DiffPoly<Rational> {
        Poly::one()
    }

    #[test]
    fn inverse_pair() {
        let p = mono(&[0, 1], one()).mul(&mono(&[0, -1], one()), None).unwrap();
        assert_eq!(p, Op::one(2));
        assert_eq!(p.to_string(), "1");
    }

    #[test]
    fn left_multiplication_by_inverse_derivative() {
        let w = Window::single(2, 1, -3);
        let p = mono(&[0, -1], one()).mul(&Op::coefficient(2, s("c")), Some(&w)).unwrap();
        let c = s("c");
        let cy = dx(&c, 2, 1);
        let cyy = dx(&cy, 2, 1);
        let expected = Op::from_terms(
            2,
            [(MultiIndex::from([0, -1]), c.clone()), (MultiIndex::from([0, -2]), cy.neg()), (MultiIndex::from([0, -3]), cyy)],
            w.clone(),
        );
        assert!(p.window_eq(&expected));
        assert_eq!(p.window(), &w);
        // ∂₂ applied back gives c, exactly down to the window the product allows.
        let back = mono(&[0, 1], one()).mul(&p, None).unwrap();
        assert_eq!(back.window(), &Window::single(2, 1, -2));
        assert!(back.window_eq(&Op::coefficient(2, c)));
    }

    #[test]
    fn missing_window_is_an_error() {
        let r = mono(&[0, -1], one()).mul(&Op::coefficient(2, s("c")), None);
        assert_eq!(r, Err(Error::NoWindow { component: 1 }));
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(Op::d(2, 0).adjoint(None).unwrap(), Op::d(2, 0).neg());
        let w = Window::single(2, 1, -3);
        let a = mono(&[0, -1], s("c")).adjoint(Some(&w)).unwrap();
        let c = s("c");
        let cy = dx(&c, 2, 1);
        let expected = Op::from_terms(
            2,
            [
                (MultiIndex::from([0, -1]), c.neg()),
                (MultiIndex::from([0, -2]), cy.clone()),
                (MultiIndex::from([0, -3]), dx(&cy, 2, 1).neg()),
            ],
            w,
        );
        assert!(a.window_eq(&expected));
    }

    #[test]
    fn residues() {
        assert_eq!(mono(&[-1, -1], s("c")).res_partial().unwrap(), s("c"));
        assert!(Op::d(2, 0).res_partial().unwrap().is_zero());
        let w = Window::uniform(2, -3);
        let p = Op::d(2, 0).mul(&mono(&[-2, -1], s("f")), Some(&w)).unwrap();
        assert_eq!(p.res_partial().unwrap(), s("f"));
        assert_eq!(p.coeff(&MultiIndex::from([-2, -1])).unwrap(), dx(&s("f"), 2, 0));
        let narrow = p.truncated(&Window::uniform(2, 0));
        assert!(matches!(narrow.res_partial(), Err(Error::OutsideWindow { .. })));
    }

    #[test]
    fn split_and_membership() {
        let op = mono(&[1, -1], one());
        let (p, m) = op.split();
        assert!(p.is_zero());
        assert_eq!(m, op);
        let a = mono(&[1, -1], s("a"));
        assert!(a.in_pminus() && !a.in_phat());
        assert!(mono(&[-1, -1], s("f")).in_phat());
        assert!(!Op::one(2).add(&a).unwrap().in_pminus());
    }

    fn example_l(window: &Window) -> (Op, Op) {
        let l1 = sum(&[mono(&[0, 1], one()), mono(&[1, -1], s("a")), mono(&[0, -2], s("b"))]).truncated(window);
        let l2 = sum(&[mono(&[0, 1], one()), mono(&[0, -1], s("c")), mono(&[1, -2], s("d"))]).truncated(window);
        (l1, l2)
    }

    #[test]
    fn example_products_on_their_windows() {
        let w = Window::single(2, 1, -2);
        let (l1, l2) = example_l(&w);
        let l12 = l1.mul(&l2, None).unwrap();
        assert_eq!(l12.window(), &Window::single(2, 1, -1));
        let expected = sum(&[mono(&[0, 2], one()), mono(&[1, 0], s("a")), Op::coefficient(2, s("c"))]);
        assert!(l12.truncated(&Window::single(2, 1, 0)).window_eq(&expected));
        let l1l2l2 = Op::power_multi(&[l1, l2], &MultiIndex::from([1, 2]), None).unwrap();
        let plus = l1l2l2.plus();
        assert!(plus.is_exact());
        let c = s("c");
        let expected = sum(&[
            mono(&[0, 3], one()),
            mono(&[1, 1], s("a")),
            mono(&[0, 1], c.scale(&Rational::from_integer(2.into()))),
            mono(&[1, 0], s("d").scale(&Rational::from_integer(2.into()))),
            Op::coefficient(2, dx(&c, 2, 1).scale(&Rational::from_integer(3.into())).add(&s("b"))),
        ]);
        assert!(plus.window_eq(&expected) && plus.num_terms() == expected.num_terms());
        assert_eq!(plus.to_string(), "d2^3 + a*d1*d2 + 2*c*d2 + 2*d*d1 + (b + 3*c_{y})");
    }

    #[test]
    fn unital_inverse() {
        assert_eq!(Op::one(2).inverse(None).unwrap(), Op::one(2));
        let w = Window::single(2, 1, -2);
        let phi = Op::one(2).add(&mono(&[0, -1], s("w"))).unwrap();
        let inv = phi.inverse(Some(&w)).unwrap();
        let prod = phi.mul(&inv, Some(&w)).unwrap();
        assert!(prod.window_eq(&Op::one(2)));
        assert_eq!(prod.window(), &w);
        assert_eq!(inv.coeff(&MultiIndex::from([0, -1])).unwrap(), s("w").neg());
        assert_eq!(inv.coeff(&MultiIndex::from([0, -2])).unwrap(), s("w").pow(2));
        let left = inv.mul(&phi, Some(&w)).unwrap();
        assert!(left.window_eq(&Op::one(2)));
        assert!(Op::d(2, 1).inverse(None).is_err());
        let hat = Op::one(2).add(&mono(&[-1, -1], s("f"))).unwrap();
        let hinv = hat.inverse(Some(&Window::uniform(2, -4))).unwrap();
        assert!(hinv.sub(&Op::one(2)).unwrap().in_phat());
    }

    #[test]
    fn displayed_form() {
        let op = sum(&[mono(&[0, 1], one()), mono(&[1, -1], s("a")), mono(&[0, -2], s("b").neg())]);
        assert_eq!(op.to_string(), "d2 + a*d1*d2^-1 - b*d2^-2");
        assert_eq!(Op::zero(2).to_string(), "0");
        assert_eq!(Op::coefficient(1, Poly::constant(Rational::new((-3).into(), 2.into()))).to_string(), "-3/2");
    }
}
