//! Cross-checks of the n = 1 engine against the from-scratch calculus in
//! `common::kp`.

mod common;

use common::kp::*;
use num_traits::{One, Zero};
use psdo_core::hierarchy::{dress, lax_check, w4_rules};
use psdo_core::{MultiIndex, Rational, Window};

#[test]
fn lax_operator_matches() {
    let kp = Kp::new(DEPTH);
    let (al, phi) = engine_dressing(DEPTH);
    let l = dress(&phi, &Window::uniform(1, WINDOW)).unwrap().components.remove(0);
    for e in WINDOW..=1 {
        let ours = to_engine(&al, &kp.l.coeff(e));
        assert_eq!(l.coeff(&MultiIndex::from([e])).unwrap(), ours, "coefficient of d^{e}");
    }
    // The classical form: u = -w1_x.
    assert_eq!(kp.l.coeff(-1), Dp::var(0, 1).scale(&-Rational::one()));
    assert_eq!(kp.l.coeff(0), Dp::default());
}

#[test]
fn flow_rules_match() {
    let kp = Kp::new(DEPTH);
    let (al, phi) = engine_dressing(DEPTH);
    // Along t1 the flow is the x-derivative.
    for (j, f) in kp.flows(1).iter().enumerate() {
        assert_eq!(*f, Dp::var(j, 1));
    }
    for k in 2..=3u32 {
        let alpha = MultiIndex::from([k as i32]);
        let rules = w4_rules(&phi, &alpha, &Window::uniform(1, -(DEPTH as i32))).unwrap();
        for (j, f) in kp.flows(k).iter().enumerate() {
            let sym = &al.symbols()[j];
            assert_eq!(rules.rules.get(sym, &alpha), Some(&to_engine(&al, f)), "w{}_t{k}", j + 1);
        }
    }
}

#[test]
fn lax_equations_hold_in_both() {
    let kp = Kp::new(DEPTH);
    let (al, phi) = engine_dressing(DEPTH);
    for k in 1..=3u32 {
        let (lhs, rhs) = kp.lax_sides(k, WINDOW);
        for e in WINDOW..=lhs.top().max(rhs.top()) {
            assert_eq!(lhs.coeff(e), rhs.coeff(e), "oracle, t{k}, d^{e}");
        }
        let report = lax_check(&phi, &MultiIndex::from([k as i32]), &Window::uniform(1, WINDOW)).unwrap();
        assert!(report.holds, "engine, t{k}: {report}");
        // The engine's commutator agrees with the oracle's one.
        let l = dress(&phi, &Window::uniform(1, WINDOW - k as i32 - 2)).unwrap();
        let b = l.power_plus(&MultiIndex::from([k as i32]), Some(&Window::uniform(1, -1))).unwrap();
        let c = b.commutator(&l.components[0], Some(&Window::uniform(1, WINDOW))).unwrap();
        for e in WINDOW..=k as i32 {
            assert_eq!(c.coeff(&MultiIndex::from([e])).unwrap(), to_engine(&al, &rhs.coeff(e)), "t{k}, d^{e}");
        }
    }
}

#[test]
fn kp_second_flow_in_classical_form() {
    // L = ∂ + u ∂^-1 + v ∂^-2 + …  gives  u_{t2} = u_xx + 2 v_x.
    let kp = Kp::new(DEPTH);
    let (u, v) = (kp.l.coeff(-1), kp.l.coeff(-2));
    let lhs = kp.time_derivative(2, &u);
    let rhs = u.dx_n(2).add(&v.dx().scale(&Rational::from_integer(2.into())));
    assert_eq!(lhs, rhs);
    assert!(!lhs.is_zero());
}

#[test]
fn oracle_binomials() {
    assert_eq!(choose(-1, 3), Rational::from_integer((-1).into()));
    assert_eq!(choose(-2, 2), Rational::from_integer(3.into()));
    assert_eq!(choose(4, 2), Rational::from_integer(6.into()));
    assert_eq!(choose(2, 3), Rational::zero());
}
