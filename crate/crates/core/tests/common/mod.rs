//! Shared generators and helpers for the integration suites.
#![allow(dead_code)]

pub mod kp;
pub mod ring;
pub mod tau;

use proptest::prelude::*;
use psdo_core::jet::{jet_poly, DiffPoly};
use psdo_core::{Alphabet, Jet, MultiIndex, Poly, PsdOp, Rational, Window};

pub type Op = PsdOp<Rational>;

pub fn q(a: i64, b: i64) -> Rational {
    Rational::new(a.into(), b.into())
}

pub fn alphabet() -> Alphabet {
    Alphabet::from_names(["u", "v", "w"]).unwrap()
}

/// `(symbol, derivative directions)` per factor, `(num, den)` per term.
pub type CoeffSpec = Vec<((i64, i64), Vec<(usize, Vec<usize>)>)>;

pub fn coeff_spec(n: usize) -> impl Strategy<Value = CoeffSpec> {
    coeff_spec_with(n, 2)
}

/// At most `factors` jet factors per term.
pub fn coeff_spec_with(n: usize, factors: usize) -> impl Strategy<Value = CoeffSpec> {
    let factor = (0usize..3, prop::collection::vec(0..n, 0..2));
    prop::collection::vec(((-4i64..5, 1i64..4), prop::collection::vec(factor, 0..=factors)), 1..3)
}

pub fn build_coeff(al: &Alphabet, n: usize, spec: &CoeffSpec) -> DiffPoly<Rational> {
    let mut p = Poly::zero();
    for ((a, b), factors) in spec {
        let mut m = Poly::constant(q(*a, *b));
        for (s, dirs) in factors {
            let mut j = Jet::base(al.symbols()[*s].clone());
            for d in dirs {
                j = j.derived(&MultiIndex::unit(n, *d));
            }
            m = m.mul(&jet_poly(j));
        }
        p = p.add(&m);
    }
    p
}

pub type OpSpec = Vec<(Vec<i32>, CoeffSpec)>;

/// One to three terms with exponents in `[lo, hi]`.
pub fn op_spec(n: usize, lo: i32, hi: i32) -> impl Strategy<Value = OpSpec> {
    op_spec_with(n, lo, hi, 2)
}

pub fn op_spec_with(n: usize, lo: i32, hi: i32, factors: usize) -> impl Strategy<Value = OpSpec> {
    prop::collection::vec((prop::collection::vec(lo..=hi, n), coeff_spec_with(n, factors)), 1..4)
}

pub fn build_op(al: &Alphabet, n: usize, spec: &OpSpec) -> Op {
    Op::from_terms(
        n,
        spec.iter().map(|(e, c)| (MultiIndex::new(e.iter().copied()), build_coeff(al, n, c))),
        Window::exact(n),
    )
}

/// `w` lowered by the positive part of `v`.
pub fn below(w: &Window, v: &MultiIndex) -> Window {
    w.lowered(&MultiIndex::new(v.iter().map(|a| a.max(0))))
}

/// True when `op` is known on all of `w`.
pub fn covers(op: &Op, w: &Window) -> bool {
    op.window().meet(w) == *w
}

/// `a` and `b` agree on `w`, both being known there.
pub fn agree_on(a: &Op, b: &Op, w: &Window) -> bool {
    covers(a, w) && covers(b, w) && a.truncated(w).sorted_terms() == b.truncated(w).sorted_terms()
}
