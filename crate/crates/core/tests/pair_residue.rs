//! Residue pairing between symbols and operators on random finite operators.

mod common;

use common::*;
use proptest::prelude::*;
use psdo_core::wave::pair_residue_check;

fn pairing(n: usize, a: &OpSpec, b: &OpSpec) -> bool {
    let al = alphabet();
    let (psi, eta) = (build_op(&al, n, a), build_op(&al, n, b));
    let r = pair_residue_check(&psi, &eta).unwrap();
    r.equal && r.lhs == r.rhs
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn one_variable(a in op_spec(1, -3, 2), b in op_spec(1, -3, 2)) {
        prop_assert!(pairing(1, &a, &b));
    }

    #[test]
    fn two_variables(a in op_spec(2, -3, 2), b in op_spec(2, -3, 2)) {
        prop_assert!(pairing(2, &a, &b));
    }
}

#[test]
fn residue_picks_the_inverse_corner() {
    let al = alphabet();
    let spec: OpSpec = vec![(vec![-1, -1], vec![((1, 1), vec![(0, vec![])])]), (vec![1, 0], vec![((2, 1), vec![])])];
    let psi = build_op(&al, 2, &spec);
    let r = pair_residue_check(&psi, &Op::one(2)).unwrap();
    assert!(r.equal);
    assert_eq!(r.lhs.to_string(), "u");
}

#[test]
fn derivative_against_inverse() {
    // d1 paired with d1^-2 * d2^-1 leaves -d1^-1 d2^-1 after the adjoint.
    let psi = Op::d(2, 0);
    let eta = Op::monomial(psdo_core::MultiIndex::from([-2, -1]), psdo_core::Poly::one());
    let r = pair_residue_check(&psi, &eta).unwrap();
    assert!(r.equal);
    assert_eq!(r.lhs.to_string(), "-1");
}
