//! Miwa shifts `G(s)`, the residue kernels, `𝒟_k(z)` and wave hats from
//! polynomial tau functions.
//!
//! Shifts use the indices `α ≥ 𝟙` only: `α⁻¹ = (α_1 ⋯ α_n)⁻¹` has no value
//! when a component vanishes.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::jet::{derive, DiffPoly, FlowRules};
use crate::multi_index::{box_below, nonnegative_up_to, MultiIndex};
use crate::poly::Poly;
use crate::psdo::PsdOp;
use crate::scalar::{factorial, Coefficient, Scalar};
use crate::series::{render_exponent, Group, GroupKind, LaurentSeries};
use crate::time_poly::{eval_at, time_derivative, TimePoly};
use crate::wave::{adjoint_baker, symbol_of};
use crate::window::Window;

pub type TauSeries<F> = LaurentSeries<F, TimePoly<F>>;
pub type NumSeries<F> = LaurentSeries<F, F>;

/// `t_α ↦ t_α − α⁻¹ s^{−α}` (`Minus`, the operator `G(s)`) or `+`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftSign {
    Minus,
    Plus,
}

/// The indices `α ≥ 𝟙` with `|α| ≤ T` and the weights `α⁻¹`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftKernel {
    n: usize,
    degree: u32,
    indices: Vec<MultiIndex>,
}

impl ShiftKernel {
    pub fn new(n: usize, degree: u32) -> Self {
        let mut indices: Vec<MultiIndex> = if degree as usize >= n {
            nonnegative_up_to(n, degree - n as u32).into_iter().map(|b| &b + &MultiIndex::ones(n)).collect()
        } else {
            Vec::new()
        };
        indices.sort_by(|a, b| a.total().cmp(&b.total()).then_with(|| a.cmp(b)));
        ShiftKernel { n, degree, indices }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn weight<F: Scalar>(alpha: &MultiIndex) -> Result<F> {
        alpha.inverse_product().ok_or_else(|| Error::UnsupportedShiftIndex(alpha.clone()))
    }

    /// `Σ α⁻¹ u^α` in `u_r = z_r / s_r`.
    pub fn series<F: Scalar>(&self) -> Result<NumSeries<F>> {
        let terms = self.indices.iter().map(|a| Ok((a.clone(), Self::weight::<F>(a)?))).collect::<Result<Vec<_>>>()?;
        Ok(LaurentSeries::from_terms(vec![u_group(self.n, self.degree)], terms))
    }
}

/// A group standing for `u_r = z_r / s_r`, truncated above total degree `T`.
fn u_group(n: usize, t: u32) -> Group {
    Group::exact(GroupKind::Z, n).with_max_total(t as i64)
}

/// `z1*s1^-1` for `u^β`.
pub fn render_ratio(beta: &MultiIndex) -> String {
    let mut parts = Vec::new();
    for (i, b) in beta.iter().enumerate() {
        if b == 0 {
            continue;
        }
        let p = |v: &str, e: i32| if e == 1 { format!("{v}{}", i + 1) } else { format!("{v}{}^{e}", i + 1) };
        parts.push(p("z", b));
        parts.push(p("s", -b));
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

fn check_time_dims<F: Scalar>(p: &TimePoly<F>, n: usize) -> Result<()> {
    for v in p.variables() {
        if v.index().dim() != n {
            return Err(Error::DimensionMismatch { left: n, right: v.index().dim() });
        }
    }
    Ok(())
}

/// `p(t_α ∓ α⁻¹ X^{−α})` as a series in group `kind`, known to total degree `−T`.
pub fn miwa_shift<F: Scalar>(p: &TimePoly<F>, n: usize, kind: GroupKind, t: u32, sign: ShiftSign) -> Result<TauSeries<F>> {
    check_time_dims(p, n)?;
    let group = Group::exact(kind, n).with_min_total(-(t as i64));
    let mut images = BTreeMap::new();
    for v in p.variables() {
        let a = v.index();
        if !a.all_positive() {
            return Err(Error::UnsupportedShiftIndex(a.clone()));
        }
        let w: F = ShiftKernel::weight(a)?;
        let w = if sign == ShiftSign::Minus { -w } else { w };
        let img = LaurentSeries::from_terms(
            vec![group.clone()],
            [(MultiIndex::zero(n), Poly::var(v.clone())), (-a, Poly::constant(w))],
        );
        images.insert(v.clone(), img);
    }
    let mut out = LaurentSeries::zero(vec![group.clone()]);
    for (m, c) in p.terms() {
        let mut term = LaurentSeries::one(vec![group.clone()]).mul_coeff(&Poly::constant(c.clone()));
        for (v, k) in m.factors() {
            term = term.mul(&images[v].pow(*k)?)?;
        }
        out = out.add(&term)?;
    }
    Ok(out.restrict_min_total(kind, -(t as i64))?)
}

/// `G`-type shift of every coefficient of `f`, adding a trailing group `kind`.
pub fn shift_series<F: Scalar>(f: &TauSeries<F>, n: usize, kind: GroupKind, t: u32, sign: ShiftSign) -> Result<TauSeries<F>> {
    let mut groups = f.groups().to_vec();
    groups.push(Group::exact(kind, n).with_min_total(-(t as i64)));
    let mut terms = Vec::new();
    for (e, c) in f.terms() {
        for (s, d) in miwa_shift(c, n, kind, t, sign)?.terms() {
            terms.push((e.concat(s), d.clone()));
        }
    }
    Ok(LaurentSeries::from_terms(groups, terms))
}

/// Coefficients evaluated at a rational time point.
pub fn eval_series<F: Scalar>(f: &TauSeries<F>, point: &[(MultiIndex, F)]) -> Result<NumSeries<F>> {
    f.map_coeffs(|c| eval_at(c, point))
}

fn multinomial<F: Scalar>(beta: &MultiIndex) -> F {
    let top: F = factorial(beta.total() as u32);
    beta.iter().fold(top, |acc, b| acc / factorial::<F>(b as u32))
}

/// Expansion of `(1 − Σ z_r/s_r)^{-1}` used by the residue lemmas.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kernel {
    /// `Σ_{β ≥ 𝟘} s^{−β} z^β`.
    Product,
    /// `Σ_m (Σ_r z_r/s_r)^m`, with multinomial weights.
    Multinomial,
}

impl Kernel {
    pub fn coefficient<F: Scalar>(self, beta: &MultiIndex) -> F {
        match self {
            Kernel::Product => F::one(),
            Kernel::Multinomial => multinomial(beta),
        }
    }

    /// The kernel in `u_r = z_r / s_r` to total degree `T`.
    pub fn series<F: Scalar>(self, n: usize, t: u32) -> NumSeries<F> {
        let terms = nonnegative_up_to(n, t).into_iter().map(|b| {
            let c = self.coefficient::<F>(&b);
            (b, c)
        });
        LaurentSeries::from_terms(vec![u_group(n, t)], terms)
    }
}

/// `Σ_m (Σ z_r/s_r)^m` to total degree `T`.
pub fn geometric_inverse<F: Scalar>(n: usize, t: u32) -> NumSeries<F> {
    Kernel::Multinomial.series(n, t)
}

/// Exponents `(β, −β)` or `(β, 0, −β)` style kernels over several groups.
fn kernel_over<F: Scalar, C: Coefficient<F>>(
    kernel: Kernel,
    n: usize,
    t: u32,
    groups: &[Group],
    slot: usize,
) -> LaurentSeries<F, C> {
    let mut terms = Vec::new();
    for b in nonnegative_up_to(n, t) {
        let mut v: Vec<i32> = b.iter().collect();
        for (k, _) in groups.iter().enumerate().skip(1) {
            if k == slot {
                v.extend((-&b).iter());
            } else {
                v.extend(std::iter::repeat(0).take(n));
            }
        }
        terms.push((MultiIndex::new(v), C::from_scalar(kernel.coefficient(&b))));
    }
    LaurentSeries::from_terms(groups.to_vec(), terms)
}

/// Places a one-group series into slot 0 of `groups`.
fn lift_first<F: Scalar, C: Coefficient<F>>(s: &LaurentSeries<F, C>, groups: &[Group]) -> LaurentSeries<F, C> {
    let pad: usize = groups.iter().skip(1).map(Group::dim).sum();
    let mut gs = groups.to_vec();
    gs[0] = s.groups()[0].clone();
    LaurentSeries::from_terms(
        gs,
        s.terms().map(|(e, c)| (e.concat(&MultiIndex::zero(pad)), c.clone())),
    )
}

/// The tail `f_α` of `η = 1 + Σ_{α ≤ −𝟙} f_α z^α`.
fn tail<F: Scalar, C: Coefficient<F>>(eta: &LaurentSeries<F, C>) -> Result<Vec<(MultiIndex, C)>> {
    let g = eta.groups();
    if g.len() != 1 || g[0].kind != GroupKind::Z {
        return Err(Error::GroupMismatch("expected a series in z".into()));
    }
    let n = g[0].dim();
    let zero = MultiIndex::zero(n);
    if eta.coeff(&zero)? != C::one() {
        return Err(Error::Invalid("the constant term must be 1".into()));
    }
    let mut out = Vec::new();
    for (e, c) in eta.terms() {
        if *e == zero {
            continue;
        }
        if e.iter().any(|a| a > -1) {
            return Err(Error::Invalid(format!("exponent {e} is not <= -1")));
        }
        out.push((e.clone(), c.clone()));
    }
    Ok(out)
}

fn needed_degree<C>(tail: &[(MultiIndex, C)], n: usize) -> i64 {
    tail.iter().map(|(a, _)| -a.total() - n as i64).max().unwrap_or(0)
}

fn same_terms<F: Scalar, C: Coefficient<F>>(a: &LaurentSeries<F, C>, b: &LaurentSeries<F, C>) -> bool {
    a.terms().eq(b.terms())
}

#[derive(Clone, Debug)]
pub struct Lemma41Report<F: Scalar, C: Coefficient<F>> {
    pub kernel: Kernel,
    pub lhs: LaurentSeries<F, C>,
    pub rhs: LaurentSeries<F, C>,
    pub equal: bool,
}

/// `Res_z η(z) K(z, s)` against `s^𝟙 (η(s) − 1)`.
pub fn lemma41_check<F: Scalar, C: Coefficient<F>>(
    eta: &LaurentSeries<F, C>,
    kernel: Kernel,
    t: u32,
) -> Result<Lemma41Report<F, C>> {
    let f = tail(eta)?;
    let n = eta.groups()[0].dim();
    let need = needed_degree(&f, n);
    if need > t as i64 {
        return Err(Error::TruncationTooSmall { have: t as i64, need });
    }
    let groups = vec![
        Group::exact(GroupKind::Z, n).with_max_total(t as i64),
        Group::exact(GroupKind::S, n).with_min_total(-(t as i64)),
    ];
    let k: LaurentSeries<F, C> = kernel_over(kernel, n, t, &groups, 1);
    let lhs = lift_first(eta, &groups).mul(&k)?.residue(GroupKind::Z)?;
    let one = MultiIndex::ones(n);
    let rhs = LaurentSeries::from_terms(
        vec![Group::exact(GroupKind::S, n)],
        f.iter().map(|(a, c)| (a + &one, c.clone())),
    );
    let equal = same_terms(&lhs, &rhs);
    Ok(Lemma41Report { kernel, lhs, rhs, equal })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lemma42Mode {
    /// Inner sums limited to `γ ≤ −α−𝟙` (resp. `β ≤ −α−𝟙`).
    Constrained,
    /// The unconstrained sums `Σ_{γ ≥ 𝟘}`.
    Paper,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Discrepancy<C> {
    /// 1 for the `(η(s) − 1)` form, 2 for the `(η(s′) − 1)` form.
    pub form: u8,
    /// Exponent in `(s, s′)`.
    pub exponent: MultiIndex,
    /// Total degree of the summation index at this monomial.
    pub degree: i64,
    pub lhs: C,
    pub rhs: C,
}

#[derive(Clone, Debug)]
pub struct Lemma42Report<F: Scalar, C: Coefficient<F>> {
    pub mode: Lemma42Mode,
    pub kernel: Kernel,
    pub lhs: LaurentSeries<F, C>,
    pub rhs_s: LaurentSeries<F, C>,
    pub rhs_sp: LaurentSeries<F, C>,
    pub discrepancies: Vec<Discrepancy<C>>,
}

impl<F: Scalar, C: Coefficient<F>> Lemma42Report<F, C> {
    pub fn equal(&self) -> bool {
        self.discrepancies.is_empty()
    }

    pub fn first_discrepancy_degree(&self) -> Option<i64> {
        self.discrepancies.iter().map(|d| d.degree).min()
    }
}

impl<F: Scalar, C: Coefficient<F>> fmt::Display for Lemma42Report<F, C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lhs: {}", self.lhs)?;
        writeln!(f, "rhs (s form): {}", self.rhs_s)?;
        write!(f, "rhs (sp form): {}", self.rhs_sp)?;
        let groups = self.lhs.groups();
        for d in &self.discrepancies {
            let m = render_exponent(groups, &d.exponent);
            let m = if m.is_empty() { "1".to_string() } else { m };
            write!(f, "\nform {} degree {}: {m}: lhs {} rhs {}", d.form, d.degree, show(&d.lhs), show(&d.rhs))?;
        }
        Ok(())
    }
}

fn show<F: Scalar, C: Coefficient<F>>(c: &C) -> String {
    if c.is_zero() {
        return "0".into();
    }
    let (neg, body) = c.signed_parts();
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// `Res_z η K(z,s) K(z,s′)` against the two regrouped forms.
pub fn lemma42_check<F: Scalar, C: Coefficient<F>>(
    eta: &LaurentSeries<F, C>,
    kernel: Kernel,
    t: u32,
    mode: Lemma42Mode,
) -> Result<Lemma42Report<F, C>> {
    let f = tail(eta)?;
    let n = eta.groups()[0].dim();
    let need = needed_degree(&f, n);
    if need > t as i64 {
        return Err(Error::TruncationTooSmall { have: t as i64, need });
    }
    let ti = t as i64;
    let groups = vec![
        Group::exact(GroupKind::Z, n).with_max_total(ti),
        Group::exact(GroupKind::S, n).with_min_total(-ti),
        Group::exact(GroupKind::SPrime, n).with_min_total(-ti),
    ];
    let ks: LaurentSeries<F, C> = kernel_over(kernel, n, t, &groups, 1);
    let ksp: LaurentSeries<F, C> = kernel_over(kernel, n, t, &groups, 2);
    let lhs = lift_first(eta, &groups).mul(&ks)?.mul(&ksp)?.residue(GroupKind::Z)?;
    let out_groups = vec![groups[1].clone(), groups[2].clone()];
    let one = MultiIndex::ones(n);
    // Σ_α f_α X^α Σ_γ X^{γ+𝟙} Y^{−γ}, with (X, Y) = (s, s′) or (s′, s).
    let form = |first: bool| {
        let mut terms = Vec::new();
        for (a, c) in &f {
            let gammas: Vec<MultiIndex> = match mode {
                Lemma42Mode::Constrained => {
                    let top: Vec<u32> = a.iter().map(|x| (-x - 1) as u32).collect();
                    box_below(&top)
                }
                Lemma42Mode::Paper => nonnegative_up_to(n, t),
            };
            for g in gammas {
                let x = &(a + &g) + &one;
                let y = -&g;
                let e = if first { x.concat(&y) } else { y.concat(&x) };
                terms.push((e, c.clone()));
            }
        }
        LaurentSeries::from_terms(out_groups.clone(), terms)
    };
    let rhs_s = form(true);
    let rhs_sp = form(false);
    let mut discrepancies = Vec::new();
    for (k, rhs) in [(1u8, &rhs_s), (2u8, &rhs_sp)] {
        let mut exps: Vec<&MultiIndex> = lhs.terms().map(|(e, _)| e).chain(rhs.terms().map(|(e, _)| e)).collect();
        exps.sort();
        exps.dedup();
        for e in exps {
            // Index of the inner sum: the s′ part for form 1, the s part for form 2.
            let degree = if k == 1 { -e.slice(n, n).total() } else { -e.slice(0, n).total() };
            if degree > ti {
                continue;
            }
            let (l, r) = (lhs.coeff(e)?, rhs.coeff(e)?);
            if l != r {
                discrepancies.push(Discrepancy { form: k, exponent: e.clone(), degree, lhs: l, rhs: r });
            }
        }
    }
    discrepancies.sort_by(|a, b| (a.form, a.degree, &a.exponent).cmp(&(b.form, b.degree, &b.exponent)));
    Ok(Lemma42Report { mode, kernel, lhs, rhs_s, rhs_sp, discrepancies })
}

/// Reads `f_α` back from `Res_z η K(z,s) K(z,s′)` built on the product
/// kernel: it is the coefficient of `s^{α+𝟙} s′^{𝟘}`.
pub fn recover_tail<F: Scalar, C: Coefficient<F>>(lhs: &LaurentSeries<F, C>) -> Vec<(MultiIndex, C)> {
    let n = lhs.groups()[0].dim();
    let one = MultiIndex::ones(n);
    lhs.terms()
        .filter(|(e, _)| e.slice(n, n).is_zero())
        .map(|(e, c)| (&e.slice(0, n) - &one, c.clone()))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mismatch<F> {
    pub monomial: MultiIndex,
    pub kernel: F,
    pub geometric: F,
}

#[derive(Clone, Debug)]
pub struct KernelReport<F: Scalar> {
    pub n: usize,
    pub degree: u32,
    /// `exp(−Σ α⁻¹ u^α)` against `1 − Σ u_r`.
    pub exp_mismatches: Vec<Mismatch<F>>,
    /// `−Σ α⁻¹ u^α` against `log(1 − Σ u_r)`.
    pub log_mismatches: Vec<Mismatch<F>>,
    /// Nonzero monomials where the logarithms agree.
    pub log_agreeing: Vec<MultiIndex>,
}

impl<F: Scalar> KernelReport<F> {
    pub fn agree(&self) -> bool {
        self.exp_mismatches.is_empty() && self.log_mismatches.is_empty()
    }

    pub fn first_mismatch(&self) -> Option<&Mismatch<F>> {
        self.exp_mismatches.first()
    }
}

impl<F: Scalar> fmt::Display for KernelReport<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.agree() {
            return write!(f, "n={} degree {}: kernel and geometric forms agree", self.n, self.degree);
        }
        write!(f, "n={} degree {}: {} exp mismatches, {} log mismatches", self.n, self.degree, self.exp_mismatches.len(), self.log_mismatches.len())?;
        for (label, list) in [("exp", &self.exp_mismatches), ("log", &self.log_mismatches)] {
            if let Some(m) = list.first() {
                write!(f, "\nfirst {label} mismatch at {}: kernel {} geometric {}", render_ratio(&m.monomial), m.kernel, m.geometric)?;
            }
        }
        if !self.log_agreeing.is_empty() {
            let names: Vec<String> = self.log_agreeing.iter().map(render_ratio).collect();
            write!(f, "\nlog agrees at {}", names.join(", "))?;
        }
        Ok(())
    }
}

fn by_degree(a: &MultiIndex, b: &MultiIndex) -> std::cmp::Ordering {
    a.total().cmp(&b.total()).then_with(|| b.cmp(a))
}

/// Compares the shift kernel with the geometric series up to degree `T`.
pub fn kernel_vs_geometric<F: Scalar>(n: usize, t: u32) -> Result<KernelReport<F>> {
    let k = ShiftKernel::new(n, t).series::<F>()?;
    let lhs_exp = k.neg().exp()?;
    let rhs_exp = geometric_inverse::<F>(n, t).inverse()?;
    let sum_u = LaurentSeries::from_terms(
        vec![u_group(n, t)],
        (0..n).map(|i| (MultiIndex::unit(n, i), F::one())),
    );
    let mut log = LaurentSeries::zero(vec![u_group(n, t)]);
    let mut power = LaurentSeries::one(vec![u_group(n, t)]);
    for m in 1..=t as i64 {
        power = power.mul(&sum_u)?;
        log = log.sub(&power.scale(&F::from_ratio(1, m)))?;
    }
    let lhs_log = k.neg();
    let mut all = nonnegative_up_to(n, t);
    all.sort_by(by_degree);
    let compare = |a: &NumSeries<F>, b: &NumSeries<F>| -> Result<Vec<Mismatch<F>>> {
        let mut out = Vec::new();
        for e in &all {
            let (x, y) = (a.coeff(e)?, b.coeff(e)?);
            if x != y {
                out.push(Mismatch { monomial: e.clone(), kernel: x, geometric: y });
            }
        }
        Ok(out)
    };
    let exp_mismatches = compare(&lhs_exp, &rhs_exp)?;
    let log_mismatches = compare(&lhs_log, &log)?;
    let mut log_agreeing = Vec::new();
    for e in &all {
        let c = lhs_log.coeff(e)?;
        if !c.is_zero() && c == log.coeff(e)? {
            log_agreeing.push(e.clone());
        }
    }
    Ok(KernelReport { n, degree: t, exp_mismatches, log_mismatches, log_agreeing })
}

/// `𝒟_k(z) F = Σ α_k α⁻¹ z^{−α−e_k} ∂_α F − ∂F/∂z_k`, with `k` zero-based and
/// `α ≥ 𝟙`, `|α| ≤ T`. Known to total degree `−(T+1)` at best: larger `α`
/// only contribute below it.
pub fn dk_apply<F: Scalar>(k: usize, f: &TauSeries<F>, t: u32) -> Result<TauSeries<F>> {
    let g = f.group_index(GroupKind::Z)?;
    let n = f.groups()[g].dim();
    if k >= n {
        return Err(Error::Invalid(format!("direction {} out of range 1..{n}", k + 1)));
    }
    let mut out = f.derivative(GroupKind::Z, k)?.neg();
    for a in ShiftKernel::new(n, t).indices() {
        let w: F = ShiftKernel::weight(a)?;
        let c = w * F::from_int(a.get(k) as i64);
        let da = f.map_coeffs(|p| Ok(time_derivative(p, a)))?;
        let e = -&(a + &MultiIndex::unit(n, k));
        out = out.add(&da.mul_monomial(&e, &Poly::constant(c)))?;
    }
    out.restrict_min_total(GroupKind::Z, -(t as i64) - 1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DkReport<F: Scalar> {
    pub holds: bool,
    /// Total degree down to which the result is exact.
    pub sound_degree: i64,
    pub witness: Option<(MultiIndex, TimePoly<F>)>,
}

/// `𝒟_k(z) G(z) τ = 0` down to the sound degree.
pub fn dk_annihilation_check<F: Scalar>(tau: &TimePoly<F>, n: usize, k: usize, t: u32) -> Result<DkReport<F>> {
    let g = miwa_shift(tau, n, GroupKind::Z, t, ShiftSign::Minus)?;
    let r = dk_apply(k, &g, t)?;
    let witness = r.sorted_terms().first().map(|(e, c)| ((*e).clone(), (*c).clone()));
    Ok(DkReport { holds: witness.is_none(), sound_degree: -(t as i64) - 1, witness })
}

fn tau_value<F: Scalar>(tau: &TimePoly<F>, point: &[(MultiIndex, F)]) -> Result<F> {
    let v = eval_at(tau, point)?;
    if v.is_zero() {
        return Err(Error::TauPole);
    }
    Ok(v)
}

/// `G(X)τ` at a point, as a series in group `kind`.
fn shifted_at<F: Scalar>(tau: &TimePoly<F>, n: usize, kind: GroupKind, t: u32, point: &[(MultiIndex, F)]) -> Result<NumSeries<F>> {
    eval_series(&miwa_shift(tau, n, kind, t, ShiftSign::Minus)?, point)
}

/// `ŵ = G(z)τ / τ` at a rational time point, to total degree `−T`.
pub fn wavehat_from_tau<F: Scalar>(tau: &TimePoly<F>, n: usize, point: &[(MultiIndex, F)], t: u32) -> Result<NumSeries<F>> {
    let v = tau_value(tau, point)?;
    Ok(shifted_at(tau, n, GroupKind::Z, t, point)?.scale(&v.recip()))
}

#[derive(Clone, Debug)]
pub struct R1Report<F: Scalar> {
    /// `ŵ(t,s)^{-1}`.
    pub lhs: NumSeries<F>,
    /// `G(s) ŵ*(t,s)` with `ŵ*(t,z) = τ(t + [z^{-1}]) / τ(t)`.
    pub rhs: NumSeries<F>,
    pub equal: bool,
}

/// `ŵ(t,s)^{-1} = G(s) ŵ*(t,s)` for `n = 1` at a rational point.
pub fn r1_check_n1<F: Scalar>(tau: &TimePoly<F>, point: &[(MultiIndex, F)], t: u32) -> Result<R1Report<F>> {
    check_time_dims(tau, 1)?;
    let v = tau_value(tau, point)?;
    let g_s = shifted_at(tau, 1, GroupKind::S, t, point)?;
    if g_s.constant()?.is_zero() {
        return Err(Error::TauPole);
    }
    let g_s_inv = g_s.inverse()?;
    let lhs = g_s_inv.scale(&v).restrict_min_total(GroupKind::S, -(t as i64))?;
    let plus = miwa_shift(tau, 1, GroupKind::Z, t, ShiftSign::Plus)?;
    let both = shift_series(&plus, 1, GroupKind::S, t, ShiftSign::Minus)?;
    let merged = eval_series(&both.merge_group(GroupKind::Z, GroupKind::S)?, point)?;
    let rhs = merged.mul(&g_s_inv)?.restrict_min_total(GroupKind::S, -(t as i64))?;
    let equal = same_terms(&lhs, &rhs);
    Ok(R1Report { lhs, rhs, equal })
}

#[derive(Clone, Debug)]
pub struct BilinearReport<F: Scalar> {
    /// `Res_z (G(s)w)(t,z) w*(t,z)` as a series in `s`.
    pub residue: LaurentSeries<F, DiffPoly<F>>,
    pub vanishes: bool,
}

/// `Res_z w(t′,z) w*(t,z)` with `t′ = t − [s^{-1}]`, realized as
/// `G(s) ŵ · ŵ* · exp(−Σ α⁻¹ s^{−α} z^α)`; `G(s)` acts on jets through the
/// flows `rules` as `exp(−Σ α⁻¹ s^{−α} ∂_{t_α})`. `T = 0` is the unshifted case.
pub fn bilinear_check<F: Scalar>(phi: &PsdOp<F>, rules: &FlowRules<F>, t: u32) -> Result<BilinearReport<F>> {
    let n = phi.dim();
    let ti = t as i64;
    let window = Window::uniform(n, -(t as i32) - 1);
    let hat = symbol_of(phi, 1);
    let star = adjoint_baker(phi, Some(&window))?.hat;
    let s_group = Group::exact(GroupKind::S, n).with_min_total(-ti);
    let lift = |x: &LaurentSeries<F, DiffPoly<F>>| -> LaurentSeries<F, DiffPoly<F>> {
        let gs = vec![x.groups()[0].clone(), s_group.clone()];
        let bound = x.groups()[0].bound.clone();
        let low = x.groups()[0].low_total;
        LaurentSeries::from_terms(gs, x.terms().map(|(e, c)| (e.concat(&MultiIndex::zero(n)), c.clone())))
            .with_bounds(0, bound, low)
    };
    let kernel = ShiftKernel::new(n, t);
    // One application of −Σ α⁻¹ s^{−α} ∂_{t_α}.
    let step = |x: &LaurentSeries<F, DiffPoly<F>>| -> Result<LaurentSeries<F, DiffPoly<F>>> {
        let mut acc = LaurentSeries::zero(x.groups().to_vec());
        for a in kernel.indices() {
            let w: F = ShiftKernel::weight(a)?;
            let d = x.map_coeffs(|c| derive(c, a, Some(rules)))?;
            acc = acc.add(&d.mul_monomial(&MultiIndex::zero(n).concat(&-a), &Poly::constant(-w)))?;
        }
        Ok(acc.restrict_min_total(GroupKind::S, -ti)?)
    };
    let mut term = lift(&hat);
    let mut shifted = term.clone();
    for m in 1..=t as i64 {
        term = step(&term)?.scale(&F::from_int(m).recip());
        shifted = shifted.add(&term)?;
    }
    let k_terms = kernel
        .indices()
        .iter()
        .map(|a| Ok((a.concat(&-a), Poly::constant(-ShiftKernel::weight::<F>(a)?))))
        .collect::<Result<Vec<_>>>()?;
    let k = LaurentSeries::from_terms(vec![Group::exact(GroupKind::Z, n), s_group.clone()], k_terms);
    let mut e = k.exp().unwrap_or_else(|_| LaurentSeries::one(k.groups().to_vec()));
    // Every known term of the exponential has z-degree at most T.
    e.reset_bounds();
    let prod = shifted.mul(&lift(&star))?.mul(&e)?;
    let residue = prod.residue(GroupKind::Z)?;
    Ok(BilinearReport { vanishes: residue.is_zero(), residue })
}
