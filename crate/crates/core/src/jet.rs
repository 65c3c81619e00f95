//! Jet variables and the differential polynomial ring.
//!
//! A coefficient function `a(t)` depends on the times `t_α`, `α ∈ Z^n_+`,
//! with `t_{e_i} = x_i`. A jet is `a` together with a finite multiset of
//! derivative directions; `DiffPoly` is the polynomial ring over those.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::multi_index::MultiIndex;
use crate::poly::Poly;
use crate::scalar::Scalar;

/// A named coefficient function. Symbols sort by declaration rank, then name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    rank: u32,
    name: Arc<str>,
}

impl Symbol {
    pub fn new(rank: u32, name: &str) -> Self {
        Symbol { rank, name: Arc::from(name) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// Declared function symbols, in declaration order.
#[derive(Clone, Debug, Default)]
pub struct Alphabet {
    symbols: Vec<Symbol>,
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares each name once; repeats are an error.
    pub fn from_names<'a>(names: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let mut a = Self::new();
        for name in names {
            a.declare(name)?;
        }
        Ok(a)
    }

    pub fn declare(&mut self, name: &str) -> Result<Symbol> {
        if self.get(name).is_some() {
            return Err(Error::RepeatedSymbol(name.to_string()));
        }
        let s = Symbol::new(self.symbols.len() as u32, name);
        self.symbols.push(s.clone());
        Ok(s)
    }

    pub fn get(&self, name: &str) -> Option<Symbol> {
        self.symbols.iter().find(|s| s.name() == name).cloned()
    }

    /// The declared symbol, declaring it on first use.
    pub fn intern(&mut self, name: &str) -> Symbol {
        match self.get(name) {
            Some(s) => s,
            None => self.declare(name).expect("name was just checked"),
        }
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }
}

/// A derivative `∂^{k_1}_{t_{α_1}} ⋯ a` of a base symbol.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Jet {
    symbol: Symbol,
    profile: SmallVec<[(MultiIndex, u32); 2]>,
}

impl Jet {
    pub fn base(symbol: Symbol) -> Self {
        Jet { symbol, profile: SmallVec::new() }
    }

    pub fn with_profile(symbol: Symbol, profile: impl IntoIterator<Item = (MultiIndex, u32)>) -> Self {
        let mut map: BTreeMap<MultiIndex, u32> = BTreeMap::new();
        for (dir, k) in profile {
            if k > 0 {
                *map.entry(dir).or_default() += k;
            }
        }
        Jet { symbol, profile: map.into_iter().collect() }
    }

    pub fn symbol(&self) -> &Symbol {
        &self.symbol
    }

    pub fn profile(&self) -> &[(MultiIndex, u32)] {
        &self.profile
    }

    pub fn is_base(&self) -> bool {
        self.profile.is_empty()
    }

    pub fn order(&self) -> u32 {
        self.profile.iter().map(|(_, k)| k).sum()
    }

    /// The order of differentiation along `dir`.
    pub fn order_along(&self, dir: &MultiIndex) -> u32 {
        self.profile.iter().find(|(d, _)| d == dir).map_or(0, |(_, k)| *k)
    }

    /// This jet differentiated once more along `dir`.
    pub fn derived(&self, dir: &MultiIndex) -> Self {
        let mut profile = self.profile.clone();
        match profile.binary_search_by(|(d, _)| d.cmp(dir)) {
            Ok(i) => profile[i].1 += 1,
            Err(i) => profile.insert(i, (dir.clone(), 1)),
        }
        Jet { symbol: self.symbol.clone(), profile }
    }
}

/// Renders one derivative direction: `x`, `y` for `n = 2`, `x` for `n = 1`,
/// `t[..]` otherwise.
pub fn direction_label(dir: &MultiIndex) -> String {
    match (dir.dim(), dir.unit_direction()) {
        (1, Some(0)) | (2, Some(0)) => "x".to_string(),
        (2, Some(1)) => "y".to_string(),
        _ => {
            let parts: Vec<String> = dir.iter().map(|a| a.to_string()).collect();
            format!("t[{}]", parts.join(","))
        }
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol)?;
        if self.profile.is_empty() {
            return Ok(());
        }
        write!(f, "_{{")?;
        // x before y: directions in decreasing order.
        for (dir, k) in self.profile.iter().rev() {
            let label = direction_label(dir);
            for _ in 0..*k {
                write!(f, "{label}")?;
            }
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

pub type DiffPoly<F> = Poly<Jet, F>;

pub fn jet_poly<F: Scalar>(j: Jet) -> DiffPoly<F> {
    Poly::var(j)
}

/// Prescribed `t_α`-derivatives of base symbols for non-`x` directions.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowRules<F: Scalar> {
    rules: BTreeMap<(Symbol, MultiIndex), DiffPoly<F>>,
}

impl<F: Scalar> Default for FlowRules<F> {
    fn default() -> Self {
        FlowRules { rules: BTreeMap::new() }
    }
}

impl<F: Scalar> FlowRules<F> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `∂_{t_α} symbol = value`. `x`-directions are always free and
    /// cannot be overridden.
    pub fn insert(&mut self, symbol: Symbol, direction: MultiIndex, value: DiffPoly<F>) -> Result<()> {
        if !direction.in_zplus() {
            return Err(Error::NotATimeIndex(direction));
        }
        if direction.unit_direction().is_some() {
            return Err(Error::Invalid(format!("{direction} is an x-direction and stays a free derivation")));
        }
        self.rules.insert((symbol, direction), value);
        Ok(())
    }

    pub fn get(&self, symbol: &Symbol, direction: &MultiIndex) -> Option<&DiffPoly<F>> {
        self.rules.get(&(symbol.clone(), direction.clone()))
    }

    pub fn extend(&mut self, other: &Self) {
        for (k, v) in &other.rules {
            self.rules.insert(k.clone(), v.clone());
        }
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &MultiIndex, &DiffPoly<F>)> {
        self.rules.iter().map(|((s, d), v)| (s, d, v))
    }
}

fn check_direction(dir: &MultiIndex) -> Result<()> {
    if !dir.in_zplus() {
        return Err(Error::NotATimeIndex(dir.clone()));
    }
    Ok(())
}

/// Free derivation along `t_dir`: every jet gains one order along `dir`.
pub fn derive_free<F: Scalar>(p: &DiffPoly<F>, dir: &MultiIndex) -> Result<DiffPoly<F>> {
    check_direction(dir)?;
    p.derive_with(|j| Ok(Poly::var(j.derived(dir))))
}

/// Iterated free derivative `∂^γ p` with `γ ≥ 0` in the `x`-directions.
pub fn derive_x_multi<F: Scalar>(p: &DiffPoly<F>, gamma: &MultiIndex) -> Result<DiffPoly<F>> {
    let n = gamma.dim();
    let mut acc = p.clone();
    for i in 0..n {
        let e = MultiIndex::unit(n, i);
        for _ in 0..gamma.get(i) {
            if acc.is_zero() {
                return Ok(acc);
            }
            acc = derive_free(&acc, &e)?;
        }
    }
    Ok(acc)
}

/// Evolutionary derivation along `t_dir`.
///
/// `x`-directions act freely. Along other directions a base symbol takes its
/// prescribed value and a derived jet `∂^P a` becomes `∂^P (rule)`, with the
/// profile derivations themselves evolutionary.
pub fn derive_evolutionary<F: Scalar>(p: &DiffPoly<F>, dir: &MultiIndex, rules: &FlowRules<F>) -> Result<DiffPoly<F>> {
    check_direction(dir)?;
    let mut memo: BTreeMap<Jet, DiffPoly<F>> = BTreeMap::new();
    derive_evo_inner(p, dir, rules, &mut memo)
}

fn derive_evo_inner<F: Scalar>(
    p: &DiffPoly<F>,
    dir: &MultiIndex,
    rules: &FlowRules<F>,
    memo: &mut BTreeMap<Jet, DiffPoly<F>>,
) -> Result<DiffPoly<F>> {
    if dir.unit_direction().is_some() {
        return derive_free(p, dir);
    }
    p.derive_with(|j| jet_flow(j, dir, rules, memo))
}

fn jet_flow<F: Scalar>(
    j: &Jet,
    dir: &MultiIndex,
    rules: &FlowRules<F>,
    memo: &mut BTreeMap<Jet, DiffPoly<F>>,
) -> Result<DiffPoly<F>> {
    if let Some(v) = memo.get(j) {
        return Ok(v.clone());
    }
    let base = rules
        .get(j.symbol(), dir)
        .ok_or_else(|| Error::MissingRule { symbol: j.symbol().to_string(), direction: dir.clone() })?;
    let mut acc = base.clone();
    for (d, k) in j.profile() {
        for _ in 0..*k {
            acc = if d.unit_direction().is_some() {
                derive_free(&acc, d)?
            } else {
                let mut inner = BTreeMap::new();
                derive_evo_inner(&acc, d, rules, &mut inner)?
            };
        }
    }
    memo.insert(j.clone(), acc.clone());
    Ok(acc)
}

/// Either derivation mode, chosen by whether rules are supplied.
pub fn derive<F: Scalar>(p: &DiffPoly<F>, dir: &MultiIndex, rules: Option<&FlowRules<F>>) -> Result<DiffPoly<F>> {
    match rules {
        Some(r) => derive_evolutionary(p, dir, r),
        None => derive_free(p, dir),
    }
}

/// Substitutes jets by polynomials; unmapped jets stay.
pub fn substitute_jets<F: Scalar>(p: &DiffPoly<F>, map: &BTreeMap<Jet, DiffPoly<F>>) -> DiffPoly<F> {
    p.substitute(|j| map.get(j).cloned())
}
