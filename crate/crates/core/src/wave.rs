//! Wave functions `ĝ(t, z) e^{±ξ(t, z)}` and the operator–symbol bridge.
//!
//! The exponential is never expanded: `∂_i` acts on `ĝ e^{σξ}` as
//! `∂_i ĝ + σ z_i ĝ`, which is all the identities below need.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::jet::{derive_evolutionary, derive_x_multi, DiffPoly, FlowRules};
use crate::multi_index::{box_below, MultiIndex};
use crate::poly::Poly;
use crate::psdo::PsdOp;
use crate::scalar::Scalar;
use crate::series::{Group, GroupKind, LaurentSeries};
use crate::window::Window;

pub type ZSeries<F> = LaurentSeries<F, DiffPoly<F>>;

#[derive(Clone, PartialEq, Debug)]
pub struct WaveSymbol<F: Scalar> {
    pub hat: ZSeries<F>,
    sign: i8,
}

impl<F: Scalar> WaveSymbol<F> {
    pub fn new(hat: ZSeries<F>, sign: i8) -> Result<Self> {
        if sign != 1 && sign != -1 {
            return Err(Error::Invalid(format!("exponential sign must be +1 or -1, got {sign}")));
        }
        if hat.groups().len() != 1 || hat.groups()[0].kind != GroupKind::Z {
            return Err(Error::GroupMismatch("a wave hat is a series in z only".into()));
        }
        Ok(WaveSymbol { hat, sign })
    }

    /// `e^{±ξ}` itself.
    pub fn plain(n: usize, sign: i8) -> Result<Self> {
        Self::new(LaurentSeries::one(vec![Group::exact(GroupKind::Z, n)]), sign)
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn dim(&self) -> usize {
        self.hat.groups()[0].dim()
    }

    /// `z^e · w`.
    pub fn times_z(&self, e: &MultiIndex) -> Self {
        WaveSymbol { hat: self.hat.mul_monomial(e, &Poly::one()), sign: self.sign }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.sign != other.sign {
            return Err(Error::Invalid("wave functions carry different exponentials".into()));
        }
        Ok(WaveSymbol { hat: self.hat.sub(&other.hat)?, sign: self.sign })
    }

    /// `∂_{t_α} w = (∂_{t_α} ŵ ± z^α ŵ) e^{±ξ}` under the given flows.
    pub fn time_derivative(&self, alpha: &MultiIndex, rules: &FlowRules<F>) -> Result<Self> {
        let dhat = self.hat.map_coeffs(|c| derive_evolutionary(c, alpha, rules))?;
        let shifted = self.hat.mul_monomial(alpha, &Poly::constant(F::from_int(self.sign as i64)));
        Ok(WaveSymbol { hat: dhat.add(&shifted)?, sign: self.sign })
    }
}

impl<F: Scalar> fmt::Display for WaveSymbol<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign > 0 { '+' } else { '-' };
        write!(f, "({})*exp({s}xi)", self.hat)
    }
}

fn z_group_of<F: Scalar>(op: &PsdOp<F>) -> Group {
    let mut g = Group::exact(GroupKind::Z, op.dim()).with_window(op.window().clone());
    g.bound = op.bound().clone();
    g
}

/// `ψ e^{σξ} = (Σ f_α (σz)^α) e^{σξ}`.
pub fn symbol_of<F: Scalar>(op: &PsdOp<F>, sign: i8) -> ZSeries<F> {
    let terms = op.terms().map(|(e, c)| {
        let c = if sign < 0 && e.total().rem_euclid(2) == 1 { c.neg() } else { c.clone() };
        (e.clone(), c)
    });
    let g = z_group_of(op);
    let (bound, low) = (g.bound.clone(), g.low_total);
    LaurentSeries::from_terms(vec![g], terms).with_bounds(0, bound, low)
}

/// `ψ (ĝ e^{σξ})` with `∂^α(ĝ e^{σξ}) = Σ_γ C(α,γ)(∂^γ ĝ)(σz)^{α−γ} e^{σξ}`.
pub fn apply_to_wave<F: Scalar>(op: &PsdOp<F>, w: &WaveSymbol<F>, requested: Option<&Window>) -> Result<WaveSymbol<F>> {
    let n = op.dim();
    if w.dim() != n {
        return Err(Error::DimensionMismatch { left: n, right: w.dim() });
    }
    let g = &w.hat.groups()[0];
    if g.min_total.is_some() || g.max_total.is_some() {
        return Err(Error::Invalid("wave hats are truncated by box windows only".into()));
    }
    let window = Window::of_product(op.window(), op.bound(), &g.window, &g.bound).with_request(requested);
    for i in 0..n {
        if window.get(i).is_none()
            && op.terms().any(|(a, _)| a.get(i) < 0)
            && w.hat.terms().any(|(_, c)| !c.is_constant())
        {
            return Err(Error::NoWindow { component: i });
        }
    }
    let mut out: BTreeMap<MultiIndex, DiffPoly<F>> = BTreeMap::new();
    for (alpha, f) in op.terms() {
        for (e, h) in w.hat.terms() {
            let constant = h.is_constant();
            let mut upper = Vec::with_capacity(n);
            let mut skip = false;
            for i in 0..n {
                let a = alpha.get(i) as i64;
                let mut u = if constant { 0 } else if a >= 0 { a } else { i64::MAX };
                if let Some(m) = window.get(i) {
                    u = u.min(a + e.get(i) as i64 - m as i64);
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
            for gamma in box_below(&upper) {
                let c: F = alpha.binomial(&gamma)?;
                if c.is_zero() {
                    continue;
                }
                let power = alpha - &gamma;
                let sign = if w.sign < 0 && power.total().rem_euclid(2) == 1 { -F::one() } else { F::one() };
                let dh = derive_x_multi(h, &gamma)?;
                let exp = &power + e;
                let entry = out.entry(exp).or_default();
                *entry = entry.add(&f.mul(&dh).scale(&(c * sign)));
            }
        }
    }
    let mut group = Group::exact(GroupKind::Z, n).with_window(window);
    group.bound = MultiIndex::new(op.bound().iter().zip(g.bound.iter()).map(|(a, b)| crate::window::sat_add(a, b)));
    let bound = group.bound.clone();
    let hat = LaurentSeries::from_terms(vec![group], out).with_bounds(0, bound, None);
    WaveSymbol::new(hat, w.sign)
}

/// `Res_z h`: the coefficient of `z^{−𝟙}` of a series in `z` alone.
pub fn res_z<F: Scalar>(h: &ZSeries<F>) -> Result<DiffPoly<F>> {
    h.residue(GroupKind::Z)?.constant()
}

/// `w = φ e^{ξ}`.
pub fn baker_from_phi<F: Scalar>(phi: &PsdOp<F>) -> Result<WaveSymbol<F>> {
    check_unital(phi)?;
    WaveSymbol::new(symbol_of(phi, 1), 1)
}

/// `w* = (φ*)^{-1} e^{−ξ}`.
pub fn adjoint_baker<F: Scalar>(phi: &PsdOp<F>, requested: Option<&Window>) -> Result<WaveSymbol<F>> {
    check_unital(phi)?;
    let adj = phi.adjoint(requested)?;
    let inv = adj.inverse(requested)?;
    WaveSymbol::new(symbol_of(&inv, -1), -1)
}

fn check_unital<F: Scalar>(phi: &PsdOp<F>) -> Result<()> {
    let zero = MultiIndex::zero(phi.dim());
    let ok = phi.coeff(&zero).map(|c| c == Poly::one()).unwrap_or(false)
        && phi.terms().all(|(e, _)| *e == zero || e.get(phi.dim() - 1) < 0);
    if ok {
        Ok(())
    } else {
        Err(Error::NotUnital(phi.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairResidue<F: Scalar> {
    pub lhs: DiffPoly<F>,
    pub rhs: DiffPoly<F>,
    pub equal: bool,
}

/// `Res_z (ψ e^{ξ})(η e^{−ξ})` against `Res_∂ ψ η*`.
pub fn pair_residue_check<F: Scalar>(psi: &PsdOp<F>, eta: &PsdOp<F>) -> Result<PairResidue<F>> {
    let n = psi.dim();
    let prod = symbol_of(psi, 1).mul(&symbol_of(eta, -1))?;
    let lhs = res_z(&prod)?;
    let target = Window::uniform(n, -1);
    let eta_adj = eta.adjoint(Some(&target.lowered(psi.bound())))?;
    let rhs = psi.mul(&eta_adj, Some(&target))?.res_partial()?;
    let equal = lhs == rhs;
    Ok(PairResidue { lhs, rhs, equal })
}
