//! Ring-law properties shared by the property suites.

use psdo_core::{MultiIndex, Window};

use super::*;

pub fn window(n: usize, depth: i32) -> Window {
    Window::uniform(n, -depth)
}

pub fn assoc(n: usize, a: &OpSpec, b: &OpSpec, c: &OpSpec, depth: i32) -> bool {
    let al = alphabet();
    let (a, b, c) = (build_op(&al, n, a), build_op(&al, n, b), build_op(&al, n, c));
    let w = window(n, depth);
    let ab = a.mul(&b, Some(&below(&w, c.bound()))).unwrap();
    let left = ab.mul(&c, Some(&w)).unwrap();
    let bc = b.mul(&c, Some(&below(&w, a.bound()))).unwrap();
    let right = a.mul(&bc, Some(&w)).unwrap();
    agree_on(&left, &right, &w)
}

pub fn distrib(n: usize, a: &OpSpec, b: &OpSpec, c: &OpSpec, depth: i32) -> bool {
    let al = alphabet();
    let (a, b, c) = (build_op(&al, n, a), build_op(&al, n, b), build_op(&al, n, c));
    let w = window(n, depth);
    let bc = b.add(&c).unwrap();
    let left = a.mul(&bc, Some(&w)).unwrap();
    let right = a.mul(&b, Some(&w)).unwrap().add(&a.mul(&c, Some(&w)).unwrap()).unwrap();
    let ab = a.add(&b).unwrap();
    let left2 = ab.mul(&c, Some(&w)).unwrap();
    let right2 = a.mul(&c, Some(&w)).unwrap().add(&b.mul(&c, Some(&w)).unwrap()).unwrap();
    agree_on(&left, &right, &w) && agree_on(&left2, &right2, &w)
}

pub fn anti_hom(n: usize, a: &OpSpec, b: &OpSpec, depth: i32) -> bool {
    let al = alphabet();
    let (a, b) = (build_op(&al, n, a), build_op(&al, n, b));
    let w = window(n, depth);
    let left = a.mul(&b, Some(&w)).unwrap().adjoint(Some(&w)).unwrap();
    let bs = b.adjoint(Some(&below(&w, a.bound()))).unwrap();
    let as_ = a.adjoint(Some(&below(&w, b.bound()))).unwrap();
    let right = bs.mul(&as_, Some(&w)).unwrap();
    agree_on(&left, &right, &w)
}

pub fn involution(n: usize, a: &OpSpec, depth: i32) -> bool {
    let al = alphabet();
    let a = build_op(&al, n, a);
    let w = window(n, depth);
    let twice = a.adjoint(Some(&w)).unwrap().adjoint(Some(&w)).unwrap();
    agree_on(&twice, &a, &w)
}

pub fn split(n: usize, a: &OpSpec, b: &OpSpec, depth: i32) -> bool {
    let al = alphabet();
    let p = build_op(&al, n, a).mul(&build_op(&al, n, b), Some(&window(n, depth))).unwrap();
    let (plus, minus) = p.split();
    let last = n - 1;
    let sum_ok = plus.add(&minus).unwrap().sorted_terms() == p.sorted_terms();
    let plus_ok = plus.terms().all(|(e, _)| e.get(last) >= 0) && plus.plus().sorted_terms() == plus.sorted_terms();
    let minus_ok = minus.terms().all(|(e, _)| e.get(last) < 0)
        && minus.minus().sorted_terms() == minus.sorted_terms()
        && minus.plus().is_zero()
        && plus.minus().is_zero();
    sum_ok && plus_ok && minus_ok
}

/// A product on `w` equals the truncation of a deeper product.
pub fn soundness(n: usize, a: &OpSpec, b: &OpSpec, depth: i32) -> bool {
    let al = alphabet();
    let (a, b) = (build_op(&al, n, a), build_op(&al, n, b));
    let w = window(n, depth);
    let shallow = a.mul(&b, Some(&w)).unwrap();
    let deep = a.mul(&b, Some(&w.lowered(&MultiIndex::new(std::iter::repeat(2).take(n))))).unwrap();
    if !agree_on(&shallow, &deep, &w) {
        return false;
    }
    // Differential operators multiply exactly; the window is a pure cut.
    let (ap, bp) = (a.plus().truncated(&Window::single(n, 0, 0)), b.plus().truncated(&Window::single(n, 0, 0)));
    let diff_a = psdo_core::PsdOp::from_terms(n, ap.terms().filter(|(e, _)| e.is_nonnegative()).map(|(e, c)| (e.clone(), c.clone())), Window::exact(n));
    let diff_b = psdo_core::PsdOp::from_terms(n, bp.terms().filter(|(e, _)| e.is_nonnegative()).map(|(e, c)| (e.clone(), c.clone())), Window::exact(n));
    let exact = diff_a.mul(&diff_b, None).unwrap();
    let cut = diff_a.mul(&diff_b, Some(&w)).unwrap();
    exact.truncated(&w).sorted_terms() == cut.sorted_terms()
}
