//! Random and generic inputs for the tau-function checks.

use proptest::prelude::*;
use psdo_core::jet::{jet_poly, DiffPoly};
use psdo_core::multi_index::box_below;
use psdo_core::series::Group;
use psdo_core::time_poly::{time_var, TimePoly};
use psdo_core::{Alphabet, GroupKind, Jet, LaurentSeries, MultiIndex, Poly, Rational};

use super::q;

pub type Eta = LaurentSeries<Rational, DiffPoly<Rational>>;

/// `η = 1 + Σ f_α z^α` over `−(3,…,3) ≤ α ≤ −𝟙`, one free symbol per `α`.
pub fn generic_eta(n: usize) -> (Eta, Vec<(MultiIndex, DiffPoly<Rational>)>) {
    let exps: Vec<MultiIndex> =
        box_below(&vec![2; n]).into_iter().map(|g| -&(&g + &MultiIndex::ones(n))).collect();
    let mut al = Alphabet::new();
    let tail: Vec<(MultiIndex, DiffPoly<Rational>)> = exps
        .into_iter()
        .enumerate()
        .map(|(k, e)| (e, jet_poly(Jet::base(al.intern(&format!("f{k}"))))))
        .collect();
    let mut terms = vec![(MultiIndex::zero(n), Poly::one())];
    terms.extend(tail.iter().cloned());
    (LaurentSeries::from_terms(vec![Group::exact(GroupKind::Z, n)], terms), tail)
}

/// Indices `≥ 𝟙` with total degree at most `max`.
pub fn shift_indices(n: usize, max: i32) -> Vec<MultiIndex> {
    box_below(&vec![(max - n as i32) as u32; n])
        .into_iter()
        .map(|b| &b + &MultiIndex::ones(n))
        .filter(|a| a.total() <= max as i64)
        .collect()
}

/// Up to four terms, each of degree at most three.
pub fn tau_spec(n: usize) -> impl Strategy<Value = Vec<((i64, i64), Vec<usize>)>> {
    let count = shift_indices(n, 4).len();
    prop::collection::vec(((-3i64..4, 1i64..3), prop::collection::vec(0..count, 0..=3)), 1..5)
}

pub fn build_tau(n: usize, spec: &[((i64, i64), Vec<usize>)]) -> TimePoly<Rational> {
    let idx = shift_indices(n, 4);
    let mut p = Poly::zero();
    for ((a, b), vars) in spec {
        let mut m = Poly::constant(q(*a, *b));
        for v in vars {
            m = m.mul(&time_var(idx[*v].clone()).unwrap());
        }
        p = p.add(&m);
    }
    p
}

