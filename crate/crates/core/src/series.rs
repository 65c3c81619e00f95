//! Truncated multivariate Laurent series over named variable groups.
//!
//! The exponent of a term is the concatenation of one block per group
//! (`z`, `s`, `s′`). Every group carries its own precision: a box window,
//! and optional lower and upper cut-offs on the total degree. A term is
//! known when it passes the conditions of every group. Bounds on the
//! support of the full series (componentwise maximum and minimal total
//! degree) make products, merges and derivatives derive their precision.

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;

use crate::error::{Error, Result};
use crate::multi_index::MultiIndex;
use crate::psdo::{display_order, render_sum};
use crate::scalar::{Coefficient, Scalar};
use crate::window::{sat_add, Window, UNBOUNDED};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum GroupKind {
    Z,
    S,
    SPrime,
}

impl GroupKind {
    pub fn prefix(self) -> &'static str {
        match self {
            GroupKind::Z => "z",
            GroupKind::S => "s",
            GroupKind::SPrime => "sp",
        }
    }
}

/// Precision and support bounds of one variable group.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Group {
    pub kind: GroupKind,
    pub window: Window,
    /// Terms with total degree below this are unknown.
    pub min_total: Option<i64>,
    /// Terms with total degree above this are unknown.
    pub max_total: Option<i64>,
    /// Componentwise upper bound on the support of the full series.
    pub bound: MultiIndex,
    /// Lower bound on the total degree of the full support; `None` is `−∞`.
    pub low_total: Option<i64>,
}

impl Group {
    pub fn exact(kind: GroupKind, n: usize) -> Self {
        Group {
            kind,
            window: Window::exact(n),
            min_total: None,
            max_total: None,
            bound: MultiIndex::zero(n),
            low_total: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.window.dim()
    }

    pub fn with_window(mut self, w: Window) -> Self {
        self.window = w;
        self
    }

    pub fn with_min_total(mut self, m: i64) -> Self {
        self.min_total = Some(m);
        self
    }

    pub fn with_max_total(mut self, m: i64) -> Self {
        self.max_total = Some(m);
        self
    }

    fn contains(&self, e: &MultiIndex) -> bool {
        let t = e.total();
        self.window.contains(e) && self.min_total.map_or(true, |m| t >= m) && self.max_total.map_or(true, |m| t <= m)
    }

    fn bound_total(&self) -> i64 {
        self.bound.iter().map(|a| if a >= UNBOUNDED { UNBOUNDED as i64 } else { a as i64 }).sum::<i64>().min(UNBOUNDED as i64)
    }

    /// Precision of a product or merge of two groups with these bounds.
    fn combined(&self, other: &Self) -> Group {
        let min_total = max_opt64(
            self.min_total.map(|m| m + other.bound_total()),
            other.min_total.map(|m| m + self.bound_total()),
        );
        let max_total = min_opt64(
            self.max_total.map(|m| other.low_total.map_or(i64::MIN / 4, |l| m + l)),
            other.max_total.map(|m| self.low_total.map_or(i64::MIN / 4, |l| m + l)),
        );
        Group {
            kind: self.kind,
            window: Window::of_product(&self.window, &self.bound, &other.window, &other.bound),
            min_total,
            max_total,
            bound: MultiIndex::new(self.bound.iter().zip(other.bound.iter()).map(|(a, b)| sat_add(a, b))),
            low_total: match (self.low_total, other.low_total) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            },
        }
    }

    fn same_shape(&self, other: &Self) -> bool {
        self.kind == other.kind && self.dim() == other.dim()
    }

    fn describe(&self) -> String {
        let mut parts = vec![format!("{} window {}", self.kind.prefix(), self.window)];
        if let Some(m) = self.min_total {
            parts.push(format!("degree >= {m}"));
        }
        if let Some(m) = self.max_total {
            parts.push(format!("degree <= {m}"));
        }
        parts.join(", ")
    }
}

fn max_opt64(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn min_opt64(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

#[derive(Clone, PartialEq)]
pub struct LaurentSeries<F: Scalar, C: Coefficient<F>> {
    groups: Vec<Group>,
    terms: BTreeMap<MultiIndex, C>,
    _field: PhantomData<F>,
}

impl<F: Scalar, C: Coefficient<F>> LaurentSeries<F, C> {
    pub fn zero(groups: Vec<Group>) -> Self {
        LaurentSeries { groups, terms: BTreeMap::new(), _field: PhantomData }
    }

    pub fn one(groups: Vec<Group>) -> Self {
        let dim: usize = groups.iter().map(Group::dim).sum();
        Self::from_terms(groups, [(MultiIndex::zero(dim), C::one())])
    }

    /// Builds a series; terms outside the known region are dropped and the
    /// support bounds are taken from the stored terms.
    pub fn from_terms(groups: Vec<Group>, terms: impl IntoIterator<Item = (MultiIndex, C)>) -> Self {
        let mut s = Self::zero(groups);
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s.retain_known();
        s.reset_bounds();
        s
    }

    fn add_term(&mut self, e: MultiIndex, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v = v.add(&c);
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    fn retain_known(&mut self) {
        let groups = self.groups.clone();
        self.terms.retain(|e, c| !c.is_zero() && known(&groups, e));
    }

    /// Support bounds from the stored terms.
    pub fn reset_bounds(&mut self) {
        let mut offset = 0;
        for g in &mut self.groups {
            let n = g.dim();
            let blocks: Vec<MultiIndex> = self.terms.keys().map(|e| e.slice(offset, n)).collect();
            // A truncated tail lies beyond the cut-off, so the stored terms
            // only bound the side that is not truncated.
            g.bound = if g.max_total.is_some() {
                MultiIndex::new(std::iter::repeat(UNBOUNDED).take(n))
            } else {
                blocks.iter().skip(1).fold(
                    blocks.first().cloned().unwrap_or_else(|| MultiIndex::zero(n)),
                    |acc, b| acc.componentwise_max(b),
                )
            };
            g.low_total = if g.min_total.is_some() || !g.window.is_exact() {
                None
            } else {
                Some(blocks.iter().map(MultiIndex::total).min().unwrap_or(0))
            };
            offset += n;
        }
    }

    /// Overrides the support bounds of group `g`.
    pub fn with_bounds(mut self, g: usize, bound: MultiIndex, low_total: Option<i64>) -> Self {
        self.groups[g].bound = bound;
        self.groups[g].low_total = low_total;
        self
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn group_index(&self, kind: GroupKind) -> Result<usize> {
        self.groups
            .iter()
            .position(|g| g.kind == kind)
            .ok_or_else(|| Error::GroupMismatch(format!("no {} group", kind.prefix())))
    }

    fn offset(&self, g: usize) -> usize {
        self.groups[..g].iter().map(Group::dim).sum()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_known(&self, e: &MultiIndex) -> bool {
        known(&self.groups, e)
    }

    pub fn coeff(&self, e: &MultiIndex) -> Result<C> {
        if !self.is_known(e) {
            return Err(Error::OutsideWindow { exponent: e.clone(), window: self.describe_precision() });
        }
        Ok(self.terms.get(e).cloned().unwrap_or_else(C::zero))
    }

    pub fn describe_precision(&self) -> String {
        self.groups.iter().map(Group::describe).collect::<Vec<_>>().join("; ")
    }

    fn check_groups(&self, other: &Self) -> Result<()> {
        if self.groups.len() != other.groups.len() || !self.groups.iter().zip(&other.groups).all(|(a, b)| a.same_shape(b))
        {
            return Err(Error::GroupMismatch("operands have different variable groups".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_groups(other)?;
        let groups: Vec<Group> = self
            .groups
            .iter()
            .zip(&other.groups)
            .map(|(a, b)| Group {
                kind: a.kind,
                window: a.window.meet(&b.window),
                min_total: max_opt64(a.min_total, b.min_total),
                max_total: min_opt64(a.max_total, b.max_total),
                bound: a.bound.componentwise_max(&b.bound),
                low_total: match (a.low_total, b.low_total) {
                    (Some(x), Some(y)) => Some(x.min(y)),
                    _ => None,
                },
            })
            .collect();
        let mut out = Self::zero(groups);
        for (e, c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(e.clone(), c.clone());
        }
        out.retain_known();
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        self.scale(&(-F::one()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &F) -> Self {
        let mut out = Self::zero(self.groups.clone());
        if !c.is_zero() {
            out.terms = self.terms.iter().map(|(e, v)| (e.clone(), v.scale(c))).collect();
        }
        out
    }

    pub fn mul_coeff(&self, c: &C) -> Self {
        let mut out = Self::zero(self.groups.clone());
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v.mul(c));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_groups(other)?;
        let groups: Vec<Group> = self.groups.iter().zip(&other.groups).map(|(a, b)| a.combined(b)).collect();
        let mut out = Self::zero(groups);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1 + e2;
                if known(&out.groups, &e) {
                    out.add_term(e, c1.mul(c2));
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut acc = Self::one(self.groups.clone());
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Maps coefficients into another ring, keeping exponents and precision.
    pub fn map_coeffs<D: Coefficient<F>>(&self, mut g: impl FnMut(&C) -> Result<D>) -> Result<LaurentSeries<F, D>> {
        let mut out = LaurentSeries::<F, D>::zero(self.groups.clone());
        for (e, c) in &self.terms {
            out.add_term(e.clone(), g(c)?);
        }
        Ok(out)
    }

    /// Coefficient of `X^{−𝟙}` in group `kind`, as a series in the remaining
    /// groups.
    pub fn residue(&self, kind: GroupKind) -> Result<Self> {
        let g = self.group_index(kind)?;
        let n = self.groups[g].dim();
        let target = -&MultiIndex::ones(n);
        if !self.groups[g].contains(&target) {
            return Err(Error::OutsideWindow { exponent: target, window: self.groups[g].describe() });
        }
        let off = self.offset(g);
        let mut groups = self.groups.clone();
        groups.remove(g);
        let mut out = Self::zero(groups);
        for (e, c) in &self.terms {
            if e.slice(off, n) == target {
                let rest = MultiIndex::new(e.iter().take(off).chain(e.iter().skip(off + n)));
                out.add_term(rest, c.clone());
            }
        }
        Ok(out)
    }

    /// The constant coefficient of a series without groups, or the
    /// coefficient of the zero exponent otherwise.
    pub fn constant(&self) -> Result<C> {
        let dim: usize = self.groups.iter().map(Group::dim).sum();
        self.coeff(&MultiIndex::zero(dim))
    }

    /// Substitutes the variables of group `from` by those of `into`
    /// (`X^a Y^b ↦ Y^{a+b}`), removing `from`.
    pub fn merge_group(&self, from: GroupKind, into: GroupKind) -> Result<Self> {
        let gf = self.group_index(from)?;
        let gi = self.group_index(into)?;
        let n = self.groups[gf].dim();
        if self.groups[gi].dim() != n {
            return Err(Error::GroupMismatch("merged groups differ in dimension".into()));
        }
        let (of, oi) = (self.offset(gf), self.offset(gi));
        let mut merged = self.groups[gi].combined(&self.groups[gf]);
        merged.kind = into;
        let mut groups = self.groups.clone();
        groups[gi] = merged;
        let mut out_groups = groups.clone();
        out_groups.remove(gf);
        let mut out = Self::zero(out_groups);
        for (e, c) in &self.terms {
            let mut v: Vec<i32> = e.iter().collect();
            for k in 0..n {
                v[oi + k] += v[of + k];
            }
            v.drain(of..of + n);
            out.add_term(MultiIndex::new(v), c.clone());
        }
        out.retain_known();
        Ok(out)
    }

    /// `∂/∂X_k` for the variables of group `kind` (zero-based `k`).
    pub fn derivative(&self, kind: GroupKind, k: usize) -> Result<Self> {
        let g = self.group_index(kind)?;
        let idx = self.offset(g) + k;
        let n = self.groups[g].dim();
        let mut groups = self.groups.clone();
        let unit = MultiIndex::unit(n, k);
        let gr = &mut groups[g];
        gr.window = gr.window.lowered(&unit);
        gr.min_total = gr.min_total.map(|m| m - 1);
        gr.max_total = gr.max_total.map(|m| m - 1);
        gr.bound = &gr.bound - &unit;
        gr.low_total = gr.low_total.map(|m| m - 1);
        let mut out = Self::zero(groups);
        for (e, c) in &self.terms {
            let a = e.get(idx);
            if a != 0 {
                out.add_term(e.with(idx, a - 1), c.scale(&F::from_int(a as i64)));
            }
        }
        Ok(out)
    }

    /// Forgets every term of group `kind` below total degree `m`.
    pub fn restrict_min_total(&self, kind: GroupKind, m: i64) -> Result<Self> {
        let g = self.group_index(kind)?;
        let mut out = self.clone();
        let gr = &mut out.groups[g];
        gr.min_total = Some(gr.min_total.map_or(m, |x| x.max(m)));
        gr.low_total = None;
        out.retain_known();
        Ok(out)
    }

    /// Multiplies by `c X^e`, shifting precision accordingly.
    pub fn mul_monomial(&self, e: &MultiIndex, c: &C) -> Self {
        let mut groups = self.groups.clone();
        let mut off = 0;
        for g in &mut groups {
            let n = g.dim();
            let b = e.slice(off, n);
            g.window = g.window.shifted(&b);
            g.min_total = g.min_total.map(|m| m + b.total());
            g.max_total = g.max_total.map(|m| m + b.total());
            g.bound = &g.bound + &b;
            g.low_total = g.low_total.map(|m| m + b.total());
            off += n;
        }
        let mut out = Self::zero(groups);
        for (k, v) in &self.terms {
            out.add_term(k + e, v.mul(c));
        }
        out
    }

    /// A group in which `self` minus its constant term is topologically
    /// nilpotent, with the number of powers needed to leave the known region.
    fn nilpotency(&self) -> Option<usize> {
        let mut off = 0;
        let mut best: Option<usize> = None;
        for g in &self.groups {
            let n = g.dim();
            let nonconst: Vec<i64> = self.terms.keys().filter(|e| !e.is_zero()).map(|e| e.slice(off, n).total()).collect();
            off += n;
            if let Some(m) = g.min_total {
                let top = nonconst.iter().copied().max().unwrap_or(-1).max(g.bound_total().min(-1)).min(-1);
                if nonconst.iter().all(|t| *t <= -1) && g.bound_total() <= 0 {
                    let k = if m >= 0 { 1 } else { (-m / -top) as usize + 1 };
                    best = Some(best.map_or(k, |b| b.min(k)));
                }
            }
            if let Some(m) = g.max_total {
                let bottom = nonconst.iter().copied().min().unwrap_or(1).max(1);
                if nonconst.iter().all(|t| *t >= 1) && g.low_total.map_or(false, |l| l >= 0) {
                    let k = if m <= 0 { 1 } else { (m / bottom) as usize + 1 };
                    best = Some(best.map_or(k, |b| b.min(k)));
                }
            }
        }
        best
    }

    fn split_constant(&self) -> (C, Self) {
        let dim: usize = self.groups.iter().map(Group::dim).sum();
        let zero = MultiIndex::zero(dim);
        let c = self.terms.get(&zero).cloned().unwrap_or_else(C::zero);
        let mut rest = self.clone();
        rest.terms.remove(&zero);
        (c, rest)
    }

    /// `Σ_{m ≥ 0} coeffs[m] f^m` for the non-constant part `f`, summed until
    /// the powers leave the known region.
    fn power_sum(rest: &Self, coeffs: impl Fn(usize) -> C) -> Result<Self> {
        let k = rest.nilpotency().ok_or(Error::NotInvertible)?;
        let mut acc = Self::one(rest.groups.clone()).mul_coeff(&coeffs(0));
        let mut power = Self::one(rest.groups.clone());
        for m in 1..=k {
            power = power.mul(rest)?;
            acc = acc.add(&power.mul_coeff(&coeffs(m)))?;
        }
        Ok(acc)
    }

    /// `exp(f)` for `f` with zero constant term.
    pub fn exp(&self) -> Result<Self> {
        let (c, rest) = self.split_constant();
        if !c.is_zero() {
            return Err(Error::Invalid("exp needs a series without constant term".into()));
        }
        let mut fact = F::one();
        let mut table = vec![C::one()];
        for m in 1..64 {
            fact = fact * F::from_int(m);
            table.push(C::from_scalar(fact.recip()));
        }
        Self::power_sum(&rest, |m| table.get(m).cloned().unwrap_or_else(C::zero))
    }
}

impl<F: Scalar> LaurentSeries<F, F> {
    /// Multiplicative inverse of `c (1 + f)` with `c` a nonzero scalar and
    /// `f` nilpotent in the known region.
    pub fn inverse(&self) -> Result<Self> {
        let (c, rest) = self.split_constant();
        if c.is_zero() {
            return Err(Error::NotInvertible);
        }
        let ci = c.recip();
        let f = rest.scale(&ci);
        let inv = Self::power_sum(&f, |m| if m % 2 == 0 { F::one() } else { -F::one() })?;
        Ok(inv.scale(&ci))
    }
}

fn known(groups: &[Group], e: &MultiIndex) -> bool {
    let mut off = 0;
    for g in groups {
        let n = g.dim();
        if !g.contains(&e.slice(off, n)) {
            return false;
        }
        off += n;
    }
    true
}

/// `z1^-1*s2^2`; empty for the zero exponent.
pub fn render_exponent(groups: &[Group], e: &MultiIndex) -> String {
    let mut parts = Vec::new();
    let mut off = 0;
    for g in groups {
        for i in 0..g.dim() {
            let a = e.get(off + i);
            let name = format!("{}{}", g.kind.prefix(), i + 1);
            match a {
                0 => {}
                1 => parts.push(name),
                _ => parts.push(format!("{name}^{a}")),
            }
        }
        off += g.dim();
    }
    parts.join("*")
}

impl<F: Scalar, C: Coefficient<F>> LaurentSeries<F, C> {
    pub fn sorted_terms(&self) -> Vec<(&MultiIndex, &C)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| b.0.total().cmp(&a.0.total()).then_with(|| display_order(a.0, b.0)));
        v
    }
}

impl<F: Scalar, C: Coefficient<F>> fmt::Display for LaurentSeries<F, C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render_sum::<F, C>(f, self.sorted_terms().into_iter().map(|(e, c)| (render_exponent(&self.groups, e), c)))
    }
}

impl<F: Scalar, C: Coefficient<F>> fmt::Debug for LaurentSeries<F, C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} [{}]", self.describe_precision())
    }
}
