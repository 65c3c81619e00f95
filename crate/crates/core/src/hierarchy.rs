//! Dressing, flows, Lax and Zakharov–Shabat checks, and PDE extraction.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::jet::{derive, derive_evolutionary, jet_poly, Alphabet, DiffPoly, FlowRules, Jet, Symbol};
use crate::multi_index::MultiIndex;
use crate::poly::Poly;
use crate::psdo::{display_order, render_monomial, PsdOp, Witness};
use crate::scalar::Scalar;
use crate::window::Window;

/// `L = (L_1, …, L_n)` with `L_i = ∂_i + u_i`, `u_i ∈ P_−`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaxTuple<F: Scalar> {
    pub components: Vec<PsdOp<F>>,
}

impl<F: Scalar> LaxTuple<F> {
    /// Checks the leading form of every component.
    pub fn new(components: Vec<PsdOp<F>>) -> Result<Self> {
        let n = components.len();
        for (i, l) in components.iter().enumerate() {
            if l.dim() != n {
                return Err(Error::DimensionMismatch { left: n, right: l.dim() });
            }
            let e = MultiIndex::unit(n, i);
            if l.window().contains(&e) && l.coeff(&e)? != Poly::one() {
                return Err(Error::LeadingForm { component: i, detail: format!("coefficient of d{} is not 1", i + 1) });
            }
            if let Some((bad, _)) = l.terms().find(|(x, _)| **x != e && x.get(n - 1) >= 0) {
                return Err(Error::LeadingForm { component: i, detail: format!("remainder has a term at {bad}") });
            }
        }
        Ok(LaxTuple { components })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    /// `(L^α)_+`, exact on `requested` where possible.
    pub fn power_plus(&self, alpha: &MultiIndex, requested: Option<&Window>) -> Result<PsdOp<F>> {
        Ok(PsdOp::power_multi(&self.components, alpha, requested)?.plus())
    }
}

/// `L_i = φ ∂_i φ^{-1}`, each known on `window`.
pub fn dress<F: Scalar>(phi: &PsdOp<F>, window: &Window) -> Result<LaxTuple<F>> {
    let n = phi.dim();
    let mut comps = Vec::with_capacity(n);
    let inv = phi.inverse(Some(&deeper(window, phi.bound(), &MultiIndex::ones(n))))?;
    for i in 0..n {
        let d = PsdOp::d(n, i);
        let l = PsdOp::product(&[phi, &d, &inv], n, Some(window))?;
        comps.push(l);
    }
    LaxTuple::new(comps)
}

/// A window deep enough that products with factors bounded by `a` and `b`
/// remain known on `w`.
fn deeper(w: &Window, a: &MultiIndex, b: &MultiIndex) -> Window {
    let lower = w.lowered(&MultiIndex::new(a.iter().zip(b.iter()).map(|(x, y)| x.max(0) + y.max(0))));
    Window::new(w.iter().zip(lower.iter()).map(|(x, y)| match (x, y) {
        (Some(x), Some(y)) => Some(x.min(y)),
        _ => None,
    }))
}

/// The symbols of a generic dressing `φ = 1 + Σ w_e ∂^e`, by exponent.
pub fn generic_symbols<F: Scalar>(phi: &PsdOp<F>) -> Result<BTreeMap<MultiIndex, Symbol>> {
    let zero = MultiIndex::zero(phi.dim());
    let mut out = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for (e, c) in phi.terms() {
        if *e == zero {
            if *c != Poly::one() {
                return Err(Error::NotUnital(phi.to_string()));
            }
            continue;
        }
        let j = c.as_variable().filter(|j| j.is_base()).ok_or(Error::NotSymbolic { exponent: e.clone() })?;
        if !seen.insert(j.symbol().clone()) {
            return Err(Error::RepeatedSymbol(j.symbol().to_string()));
        }
        out.insert(e.clone(), j.symbol().clone());
    }
    Ok(out)
}

/// `φ = 1 + Σ name ∂^e` with the names declared in `alphabet`.
pub fn generic_dressing<F: Scalar>(alphabet: &mut Alphabet, n: usize, entries: &[(&str, MultiIndex)]) -> PsdOp<F> {
    let mut terms = vec![(MultiIndex::zero(n), Poly::one())];
    for (name, e) in entries {
        terms.push((e.clone(), jet_poly(Jet::base(alphabet.intern(name)))));
    }
    PsdOp::from_terms(n, terms, Window::exact(n))
}

/// Result of reading `∂_{t_α} φ = −(φ ∂^α φ^{-1})_− φ` on a generic dressing.
#[derive(Clone, Debug)]
pub struct W4Rules<F: Scalar> {
    pub direction: MultiIndex,
    pub rules: FlowRules<F>,
    /// The right-hand side on the window.
    pub rhs: PsdOp<F>,
    /// Nonzero right-hand-side coefficients at exponents without a symbol:
    /// the flow leaves the ansatz there.
    pub off_ansatz: Vec<(MultiIndex, DiffPoly<F>)>,
}

/// `−(φ ∂^α φ^{-1})_− φ` on `window`.
pub fn w4_rhs<F: Scalar>(phi: &PsdOp<F>, alpha: &MultiIndex, window: &Window) -> Result<PsdOp<F>> {
    let n = phi.dim();
    if !alpha.in_zplus() {
        return Err(Error::NotATimeIndex(alpha.clone()));
    }
    let da = PsdOp::monomial(alpha.clone(), Poly::one());
    let inner_w = deeper(window, phi.bound(), alpha);
    let inv = phi.inverse(Some(&deeper(&inner_w, phi.bound(), alpha)))?;
    let conj = PsdOp::product(&[phi, &da, &inv], n, Some(&inner_w))?;
    Ok(conj.minus().mul(phi, Some(window))?.neg())
}

/// Flow rules for every symbol of a generic dressing along `t_α`, read on
/// `window`. For an `x`-direction the flow is the free derivation and no
/// rules are produced.
pub fn w4_rules<F: Scalar>(phi: &PsdOp<F>, alpha: &MultiIndex, window: &Window) -> Result<W4Rules<F>> {
    let symbols = generic_symbols(phi)?;
    let rhs = w4_rhs(phi, alpha, window)?;
    let mut rules = FlowRules::new();
    let unit = alpha.unit_direction().is_some();
    for (e, sym) in &symbols {
        let v = rhs.coeff(e)?;
        if !unit {
            rules.insert(sym.clone(), alpha.clone(), v)?;
        }
    }
    let off_ansatz = rhs
        .sorted_terms()
        .into_iter()
        .filter(|(e, _)| !symbols.contains_key(*e))
        .map(|(e, c)| (e.clone(), c.clone()))
        .collect();
    Ok(W4Rules { direction: alpha.clone(), rules, rhs, off_ansatz })
}

/// Outcome of a window-equality check.
#[derive(Clone, Debug)]
pub struct CheckReport<F: Scalar> {
    pub holds: bool,
    pub window: Window,
    /// Component of `L` (Lax check) where the first difference occurs.
    pub component: Option<usize>,
    pub witness: Option<Witness<F>>,
    /// Exponents where the flow leaves the dressing ansatz.
    pub off_ansatz: Vec<(MultiIndex, DiffPoly<F>)>,
}

impl<F: Scalar> fmt::Display for CheckReport<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.holds {
            write!(f, "holds on window {}", self.window)?;
        } else {
            write!(f, "fails on window {}", self.window)?;
            if let Some(i) = self.component {
                write!(f, " in component {}", i + 1)?;
            }
            if let Some(w) = &self.witness {
                write!(f, ": {w}")?;
            }
        }
        for (e, c) in &self.off_ansatz {
            write!(f, "\nflow leaves the ansatz at d^{e}: {c}")?;
        }
        Ok(())
    }
}

/// Internal working window for checks on `w` along `α`.
fn working_window(w: &Window, alpha: &MultiIndex) -> Window {
    let n = w.dim();
    let depth = MultiIndex::new(std::iter::repeat(alpha.total() as i32 + 1).take(n));
    w.lowered(&depth)
}

/// Every stored exponent must be inside the claimed window of the check.
fn ensure_covers<F: Scalar>(op: &PsdOp<F>, w: &Window) -> Result<()> {
    if op.window().meet(w) != *w {
        return Err(Error::TruncationTooSmall {
            have: op.window().iter().flatten().map(i64::from).max().unwrap_or(0),
            need: w.iter().flatten().map(i64::from).max().unwrap_or(0),
        });
    }
    Ok(())
}

/// `∂_{t_α} L_i = [L^α_+, L_i]` on `window`, with flows from `w4_rules` on a generic
/// dressing `φ`.
pub fn lax_check<F: Scalar>(phi: &PsdOp<F>, alpha: &MultiIndex, window: &Window) -> Result<CheckReport<F>> {
    let work = working_window(window, alpha);
    let w4 = w4_rules(phi, alpha, &work)?;
    let l = dress(phi, &work)?;
    let mut report = lax_check_with(&l, alpha, &w4.rules, window)?;
    report.off_ansatz = w4.off_ansatz.into_iter().filter(|(e, _)| window.contains(e)).collect();
    Ok(report)
}

/// `∂_{t_α} L_i = [L^α_+, L_i]` for given `L` and flow rules.
pub fn lax_check_with<F: Scalar>(
    l: &LaxTuple<F>,
    alpha: &MultiIndex,
    rules: &FlowRules<F>,
    window: &Window,
) -> Result<CheckReport<F>> {
    let n = l.dim();
    let b = l.power_plus(alpha, Some(&working_window(window, &MultiIndex::zero(n))))?;
    for (i, li) in l.components.iter().enumerate() {
        let lhs = li.map_coefficients(|c| derive_evolutionary(c, alpha, rules))?.truncated(window);
        let rhs = b.commutator(li, Some(window))?.truncated(window);
        ensure_covers(&lhs, window)?;
        ensure_covers(&rhs, window)?;
        if let Some(w) = lhs.first_difference(&rhs) {
            return Ok(CheckReport {
                holds: false,
                window: window.clone(),
                component: Some(i),
                witness: Some(w),
                off_ansatz: vec![],
            });
        }
    }
    Ok(CheckReport { holds: true, window: window.clone(), component: None, witness: None, off_ansatz: vec![] })
}

/// `∂_{t_α} L^β_+ − ∂_{t_β} L^α_+ = [L^α_+, L^β_+]` on `window`.
pub fn zs_check<F: Scalar>(
    l: &LaxTuple<F>,
    alpha: &MultiIndex,
    beta: &MultiIndex,
    rules: &FlowRules<F>,
    window: &Window,
) -> Result<CheckReport<F>> {
    let n = l.dim();
    let work = working_window(window, &MultiIndex::zero(n));
    let ba = l.power_plus(alpha, Some(&work))?;
    let bb = l.power_plus(beta, Some(&work))?;
    let lhs = bb
        .map_coefficients(|c| derive(c, alpha, Some(rules)))?
        .sub(&ba.map_coefficients(|c| derive(c, beta, Some(rules)))?)?
        .truncated(window);
    let rhs = ba.commutator(&bb, Some(window))?.truncated(window);
    ensure_covers(&lhs, window)?;
    ensure_covers(&rhs, window)?;
    let witness = lhs.first_difference(&rhs);
    Ok(CheckReport { holds: witness.is_none(), window: window.clone(), component: None, witness, off_ansatz: vec![] })
}

/// Flow rules of a generic dressing for several directions at once.
pub fn flow_rules<F: Scalar>(phi: &PsdOp<F>, alphas: &[MultiIndex], window: &Window) -> Result<(FlowRules<F>, Vec<W4Rules<F>>)> {
    let mut all = FlowRules::new();
    let mut reports = Vec::new();
    for a in alphas {
        let r = w4_rules(phi, a, &working_window(window, a))?;
        all.extend(&r.rules);
        reports.push(r);
    }
    Ok((all, reports))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PdeEquation<F: Scalar> {
    /// The `∂`-exponent whose coefficient produced the equation.
    pub monomial: MultiIndex,
    /// Required to vanish.
    pub equation: DiffPoly<F>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PdeSystem<F: Scalar> {
    pub equations: Vec<PdeEquation<F>>,
}

impl<F: Scalar> PdeSystem<F> {
    pub fn get(&self, monomial: &MultiIndex) -> Option<&DiffPoly<F>> {
        self.equations.iter().find(|e| e.monomial == *monomial).map(|e| &e.equation)
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }
}

impl<F: Scalar> fmt::Display for PdeSystem<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, eq) in self.equations.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            let m = render_monomial(&eq.monomial);
            let m = if m.is_empty() { "1".to_string() } else { m };
            write!(f, "{m}: {} = 0", eq.equation)?;
        }
        Ok(())
    }
}

/// One equation per nonzero coefficient of
/// `∂_{t_α} L^β_+ − ∂_{t_β} L^α_+ − [L^α_+, L^β_+]`, with free jets.
pub fn extract_pdes<F: Scalar>(la: &PsdOp<F>, lb: &PsdOp<F>, ta: &MultiIndex, tb: &MultiIndex) -> Result<PdeSystem<F>> {
    let n = la.dim();
    for op in [la, lb] {
        if let Some((e, _)) = op.terms().find(|(e, _)| e.get(n - 1) < 0) {
            return Err(Error::Invalid(format!("{e} is not a differential-operator exponent")));
        }
    }
    let lhs = lb
        .map_coefficients(|c| derive(c, ta, None))?
        .sub(&la.map_coefficients(|c| derive(c, tb, None))?)?;
    let total = lhs.sub(&la.commutator(lb, None)?)?;
    let equations = total
        .sorted_terms()
        .into_iter()
        .map(|(e, c)| PdeEquation { monomial: e.clone(), equation: c.clone() })
        .collect();
    Ok(PdeSystem { equations })
}

/// A substitution applied by `reduce_system`.
#[derive(Clone, Debug)]
pub enum Relation<F: Scalar> {
    /// Replace one jet.
    Replace(Jet, DiffPoly<F>),
    /// Every jet of `symbol` differentiated at least once along `direction`
    /// vanishes.
    Vanish { symbol: Symbol, direction: MultiIndex },
}

/// Substitutes the relations, re-normalizes and drops zero equations.
pub fn reduce_system<F: Scalar>(sys: &PdeSystem<F>, relations: &[Relation<F>]) -> PdeSystem<F> {
    let image = |j: &Jet| -> Option<DiffPoly<F>> {
        for r in relations {
            match r {
                Relation::Replace(k, v) if k == j => return Some(v.clone()),
                Relation::Vanish { symbol, direction } if j.symbol() == symbol && j.order_along(direction) > 0 => {
                    return Some(Poly::zero())
                }
                _ => {}
            }
        }
        None
    };
    let mut equations: Vec<PdeEquation<F>> = sys
        .equations
        .iter()
        .map(|e| PdeEquation { monomial: e.monomial.clone(), equation: e.equation.substitute(image) })
        .filter(|e| !e.equation.is_zero())
        .collect();
    equations.sort_by(|a, b| display_order(&a.monomial, &b.monomial));
    PdeSystem { equations }
}
