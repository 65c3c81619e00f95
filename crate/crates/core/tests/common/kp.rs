//! A small single-variable operator calculus written from scratch, used to
//! cross-check dressing, flows and the Lax equations of the n = 1 engine.
//!
//! Differential polynomials here are maps from sorted factor lists
//! `(symbol, x-order)` to rationals; operators are maps from the exponent of
//! `∂` to such polynomials, cut below a fixed exponent.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use psdo_core::hierarchy::generic_dressing;
use psdo_core::jet::{jet_poly, DiffPoly};
use psdo_core::{Alphabet, Jet, MultiIndex, Poly, PsdOp, Rational};

pub type Mono = Vec<(usize, u32)>;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Dp(pub BTreeMap<Mono, Rational>);

impl Dp {
    pub fn constant(c: i64) -> Dp {
        let mut m = BTreeMap::new();
        if c != 0 {
            m.insert(vec![], Rational::from_integer(c.into()));
        }
        Dp(m)
    }

    pub fn var(s: usize, j: u32) -> Dp {
        Dp(BTreeMap::from([(vec![(s, j)], Rational::one())]))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, m: Mono, c: Rational) {
        let e = self.0.entry(m.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.0.remove(&m);
        }
    }

    pub fn add(&self, o: &Dp) -> Dp {
        let mut r = self.clone();
        for (m, c) in &o.0 {
            r.push(m.clone(), c.clone());
        }
        r
    }

    pub fn scale(&self, c: &Rational) -> Dp {
        let mut r = Dp::default();
        for (m, d) in &self.0 {
            r.push(m.clone(), d * c);
        }
        r
    }

    pub fn mul(&self, o: &Dp) -> Dp {
        let mut r = Dp::default();
        for (m1, c1) in &self.0 {
            for (m2, c2) in &o.0 {
                let mut m = m1.clone();
                m.extend(m2.iter().copied());
                m.sort();
                r.push(m, c1 * c2);
            }
        }
        r
    }

    /// Applies the derivation sending the factor `(s, j)` to `image(s, j)`.
    pub fn derive(&self, image: &dyn Fn(usize, u32) -> Dp) -> Dp {
        let mut r = Dp::default();
        for (m, c) in &self.0 {
            for i in 0..m.len() {
                let mut rest = m.clone();
                let (s, j) = rest.remove(i);
                let term = Dp(BTreeMap::from([(rest, c.clone())])).mul(&image(s, j));
                r = r.add(&term);
            }
        }
        r
    }

    pub fn dx(&self) -> Dp {
        self.derive(&|s, j| Dp::var(s, j + 1))
    }

    pub fn dx_n(&self, k: u32) -> Dp {
        (0..k).fold(self.clone(), |p, _| p.dx())
    }
}

/// Generalized binomial `a choose k`.
pub fn choose(a: i32, k: u32) -> Rational {
    let mut r = Rational::one();
    for i in 0..k as i32 {
        r = r * Rational::from_integer((a - i).into()) / Rational::from_integer((i + 1).into());
    }
    r
}

/// An operator known for exponents `≥ cut`.
#[derive(Clone, Debug)]
pub struct Pd {
    pub terms: BTreeMap<i32, Dp>,
    pub cut: i32,
}

impl Pd {
    pub fn new(cut: i32) -> Pd {
        Pd { terms: BTreeMap::new(), cut }
    }

    pub fn mono(e: i32, c: Dp, cut: i32) -> Pd {
        let mut p = Pd::new(cut);
        p.put(e, c);
        p
    }

    pub fn put(&mut self, e: i32, c: Dp) {
        if e < self.cut || c.is_zero() {
            return;
        }
        let v = self.terms.entry(e).or_default().add(&c);
        if v.is_zero() {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, v);
        }
    }

    pub fn coeff(&self, e: i32) -> Dp {
        self.terms.get(&e).cloned().unwrap_or_default()
    }

    pub fn top(&self) -> i32 {
        self.terms.keys().next_back().copied().unwrap_or(self.cut)
    }

    pub fn add(&self, o: &Pd) -> Pd {
        let mut r = Pd::new(self.cut.max(o.cut));
        for (e, c) in self.terms.iter().chain(o.terms.iter()) {
            r.put(*e, c.clone());
        }
        r
    }

    pub fn neg(&self) -> Pd {
        let mut r = Pd::new(self.cut);
        for (e, c) in &self.terms {
            r.put(*e, c.scale(&-Rational::one()));
        }
        r
    }

    /// `f ∂^a ∘ g ∂^b = Σ_k C(a,k) f g^{(k)} ∂^{a+b−k}`, kept above `cut`.
    pub fn mul(&self, o: &Pd, cut: i32) -> Pd {
        let mut r = Pd::new(cut);
        for (&a, f) in &self.terms {
            for (&b, g) in &o.terms {
                let mut k = 0u32;
                while a + b - k as i32 >= cut && (a < 0 || k as i32 <= a) {
                    let term = f.mul(&g.dx_n(k)).scale(&choose(a, k));
                    r.put(a + b - k as i32, term);
                    k += 1;
                }
            }
        }
        r
    }

    pub fn plus(&self) -> Pd {
        let mut r = Pd::new(0);
        for (e, c) in self.terms.range(0..) {
            r.put(*e, c.clone());
        }
        r
    }

    pub fn minus(&self) -> Pd {
        let mut r = Pd::new(self.cut);
        for (e, c) in self.terms.range(..0) {
            r.put(*e, c.clone());
        }
        r
    }

    pub fn map(&self, g: impl Fn(&Dp) -> Dp) -> Pd {
        let mut r = Pd::new(self.cut);
        for (e, c) in &self.terms {
            r.put(*e, g(c));
        }
        r
    }

    pub fn truncate(&self, cut: i32) -> Pd {
        let mut r = Pd::new(cut);
        for (e, c) in &self.terms {
            r.put(*e, c.clone());
        }
        r
    }
}

/// Enough room below every checked exponent for all the products involved.
pub const DEEP: i32 = -8;

pub struct Kp {
    pub depth: usize,
    pub phi: Pd,
    pub l: Pd,
}

impl Kp {
    /// `φ = 1 + w1 ∂^-1 + … + wD ∂^-D` and `L = φ ∂ φ^-1`.
    pub fn new(depth: usize) -> Kp {
        let mut phi = Pd::mono(0, Dp::constant(1), DEEP);
        for k in 1..=depth {
            phi.put(-(k as i32), Dp::var(k - 1, 0));
        }
        // φ^-1 = Σ (1 − φ)^m, the tail being strictly negative.
        let tail = phi.add(&Pd::mono(0, Dp::constant(-1), DEEP)).neg();
        let mut inv = Pd::mono(0, Dp::constant(1), DEEP);
        let mut pow = inv.clone();
        for _ in 0..(-DEEP) {
            pow = pow.mul(&tail, DEEP);
            inv = inv.add(&pow);
        }
        let l = phi.mul(&Pd::mono(1, Dp::constant(1), DEEP), DEEP).mul(&inv, DEEP);
        Kp { depth, phi, l }
    }

    pub fn l_power(&self, k: u32) -> Pd {
        (0..k).fold(Pd::mono(0, Dp::constant(1), DEEP), |p, _| p.mul(&self.l, DEEP))
    }

    /// `∂_{t_k} w_j`, read from `−(L^k)_− φ` at `∂^{-j}`.
    pub fn flows(&self, k: u32) -> Vec<Dp> {
        let rhs = self.l_power(k).minus().mul(&self.phi, DEEP).neg();
        (1..=self.depth).map(|j| rhs.coeff(-(j as i32))).collect()
    }

    /// `∂_{t_k}` on differential polynomials in the dressing symbols.
    pub fn time_derivative(&self, k: u32, p: &Dp) -> Dp {
        derive_along(&self.flows(k), p)
    }

    /// Both sides of `∂_{t_k} L = [(L^k)_+, L]` for exponents `≥ cut`.
    pub fn lax_sides(&self, k: u32, cut: i32) -> (Pd, Pd) {
        let f = self.flows(k);
        let lhs = self.l.truncate(cut).map(|c| derive_along(&f, c));
        let b = self.l_power(k).plus();
        let rhs = b.mul(&self.l, DEEP).add(&self.l.mul(&b, DEEP).neg()).truncate(cut);
        (lhs, rhs)
    }
}

pub fn derive_along(flows: &[Dp], p: &Dp) -> Dp {
    p.derive(&|s, j| flows[s].dx_n(j))
}

pub fn names(depth: usize) -> Vec<String> {
    (1..=depth).map(|k| format!("w{k}")).collect()
}

pub fn to_engine(al: &Alphabet, p: &Dp) -> DiffPoly<Rational> {
    let x = MultiIndex::unit(1, 0);
    let mut out = Poly::zero();
    for (m, c) in &p.0 {
        let mut t = Poly::constant(c.clone());
        for (s, j) in m {
            let mut jet = Jet::base(al.symbols()[*s].clone());
            for _ in 0..*j {
                jet = jet.derived(&x);
            }
            t = t.mul(&jet_poly(jet));
        }
        out = out.add(&t);
    }
    out
}

pub fn engine_dressing(depth: usize) -> (Alphabet, PsdOp<Rational>) {
    let mut al = Alphabet::new();
    let ns = names(depth);
    let entries: Vec<(&str, MultiIndex)> =
        ns.iter().enumerate().map(|(k, s)| (s.as_str(), MultiIndex::from([-(k as i32) - 1]))).collect();
    let phi = generic_dressing(&mut al, 1, &entries);
    (al, phi)
}

pub const DEPTH: usize = 3;
pub const WINDOW: i32 = -3;

