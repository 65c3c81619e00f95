//! Residue lemmas, kernel audit, `𝒟_k` annihilation, wave hats, the n = 1
//! inverse relation and the bilinear identity.

mod common;

use common::q;
use common::tau::*;
use proptest::prelude::*;
use psdo_core::hierarchy::{flow_rules, generic_dressing};
use psdo_core::jet::jet_poly;
use psdo_core::series::Group;
use psdo_core::tau::{
    bilinear_check, dk_annihilation_check, kernel_vs_geometric, lemma41_check, lemma42_check, r1_check_n1,
    recover_tail, wavehat_from_tau, Kernel, Lemma42Mode,
};
use psdo_core::time_poly::{time_var, TimePoly};
use psdo_core::{Alphabet, GroupKind, Jet, LaurentSeries, MultiIndex, Poly, Rational, Window};

fn degree_for(n: usize) -> u32 {
    2 * n as u32
}

#[test]
fn residue_against_product_kernel() {
    for n in 1..=3 {
        let (eta, _) = generic_eta(n);
        let r = lemma41_check(&eta, Kernel::Product, degree_for(n)).unwrap();
        assert!(r.equal, "n={n}: {} vs {}", r.lhs, r.rhs);
        assert_eq!(r.rhs.num_terms(), 3usize.pow(n as u32));
    }
}

#[test]
fn multinomial_kernel_only_agrees_in_one_variable() {
    let (eta, _) = generic_eta(1);
    assert!(lemma41_check(&eta, Kernel::Multinomial, 2).unwrap().equal);
    for n in 2..=3 {
        let (eta, _) = generic_eta(n);
        assert!(!lemma41_check(&eta, Kernel::Multinomial, degree_for(n)).unwrap().equal, "n={n}");
    }
}

#[test]
fn truncation_must_cover_the_tail() {
    let (eta, _) = generic_eta(2);
    assert!(lemma41_check(&eta, Kernel::Product, 3).is_err());
}

#[test]
fn double_residue_constrained() {
    for n in 1..=3 {
        let (eta, tail) = generic_eta(n);
        let r = lemma42_check(&eta, Kernel::Product, degree_for(n), Lemma42Mode::Constrained).unwrap();
        assert!(r.equal(), "n={n}: {r}");
        // The tail is read back from the s′-free part of the residue.
        let mut back = recover_tail(&r.lhs);
        back.sort_by(|a, b| a.0.cmp(&b.0));
        let mut want = tail.clone();
        want.sort_by(|a, b| a.0.cmp(&b.0));
        assert_eq!(back, want, "n={n}");
    }
}

#[test]
fn double_residue_unconstrained_sums() {
    let mut al = Alphabet::new();
    let f = jet_poly::<Rational>(Jet::base(al.intern("f")));
    for n in 1..=3 {
        let eta: Eta = LaurentSeries::from_terms(
            vec![Group::exact(GroupKind::Z, n)],
            [(MultiIndex::zero(n), Poly::one()), (-&MultiIndex::ones(n), f.clone())],
        );
        let t = degree_for(n).max(2);
        let r = lemma42_check(&eta, Kernel::Product, t, Lemma42Mode::Paper).unwrap();
        assert!(!r.equal(), "n={n}");
        assert_eq!(r.first_discrepancy_degree(), Some(1), "n={n}");
        let again = lemma42_check(&eta, Kernel::Product, t, Lemma42Mode::Paper).unwrap();
        assert_eq!(r.discrepancies, again.discrepancies);
        assert_eq!(r.to_string(), again.to_string());
        assert!(lemma42_check(&eta, Kernel::Product, t, Lemma42Mode::Constrained).unwrap().equal());
    }
}

#[test]
fn kernel_audit() {
    let one = kernel_vs_geometric::<Rational>(1, 6).unwrap();
    assert!(one.agree(), "{one}");
    let two = kernel_vs_geometric::<Rational>(2, 3).unwrap();
    assert!(!two.agree());
    assert_eq!(two.first_mismatch().unwrap().monomial, MultiIndex::from([1, 0]));
    let again = kernel_vs_geometric::<Rational>(2, 3).unwrap();
    assert_eq!(two.to_string(), again.to_string());
    assert!(two.to_string().contains("first exp mismatch at z1*s1^-1"));
}

fn tv(a: &[i32]) -> TimePoly<Rational> {
    time_var(MultiIndex::from(a)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn dk_annihilates_shifted_tau_one_variable(spec in tau_spec(1)) {
        let tau = build_tau(1, &spec);
        let r = dk_annihilation_check(&tau, 1, 0, 6).unwrap();
        prop_assert!(r.holds, "{tau}: {:?}", r.witness);
    }

    #[test]
    fn dk_annihilates_shifted_tau_two_variables(spec in tau_spec(2), k in 0usize..2) {
        let tau = build_tau(2, &spec);
        let r = dk_annihilation_check(&tau, 2, k, 6).unwrap();
        prop_assert!(r.holds, "{tau}: {:?}", r.witness);
    }

    #[test]
    fn inverse_hat_is_shifted_adjoint_hat(spec in tau_spec(1), p in prop::collection::vec((-4i64..5, 1i64..4), 4)) {
        let tau = build_tau(1, &spec);
        let point: Vec<(MultiIndex, Rational)> =
            (1..=4).zip(p.iter()).map(|(k, (a, b))| (MultiIndex::from([k]), q(*a, *b))).collect();
        let value = psdo_core::time_poly::eval_at(&tau, &point).unwrap();
        prop_assume!(value != q(0, 1));
        let r = r1_check_n1(&tau, &point, 5).unwrap();
        prop_assert!(r.equal, "{tau}: {} vs {}", r.lhs, r.rhs);
    }
}

#[test]
fn dk_on_fixed_tau() {
    let tau = tv(&[1]).pow(3).add(&tv(&[2]).mul(&tv(&[1]))).add(&tv(&[3]));
    assert!(dk_annihilation_check(&tau, 1, 0, 6).unwrap().holds);
    let tau2 = tv(&[1, 1]).pow(2).add(&tv(&[1, 2]));
    for k in 0..2 {
        assert!(dk_annihilation_check(&tau2, 2, k, 6).unwrap().holds);
    }
}

#[test]
fn wave_hats() {
    let one = Poly::one();
    for n in 1..=3 {
        let h = wavehat_from_tau::<Rational>(&one, n, &[], 4).unwrap();
        assert_eq!(h.to_string(), "1");
    }
    let h = wavehat_from_tau(&tv(&[1]), 1, &[(MultiIndex::from([1]), q(3, 1))], 4).unwrap();
    assert_eq!(h.to_string(), "1 - 1/3*z1^-1");
    // τ = t1^2 + t2 at t = (1, 0): (1 − 1/z)^2 − 1/(2z^2) over 1.
    let tau = tv(&[1]).pow(2).add(&tv(&[2]));
    let h = wavehat_from_tau(&tau, 1, &[(MultiIndex::from([1]), q(1, 1)), (MultiIndex::from([2]), q(0, 1))], 4).unwrap();
    assert_eq!(h.to_string(), "1 - 2*z1^-1 + 1/2*z1^-2");
    assert!(wavehat_from_tau(&tv(&[1]), 1, &[(MultiIndex::from([1]), q(0, 1))], 4).is_err());
}

#[test]
fn bilinear_identity_one_variable() {
    for t in 0..=3u32 {
        let depth = t as i32 + 1;
        let mut al = Alphabet::new();
        let names: Vec<String> = (1..=depth).map(|k| format!("w{k}")).collect();
        let entries: Vec<(&str, MultiIndex)> =
            names.iter().zip(1..).map(|(s, k)| (s.as_str(), MultiIndex::from([-k]))).collect();
        let phi = generic_dressing::<Rational>(&mut al, 1, &entries);
        let dirs: Vec<MultiIndex> = (2..=t.max(2) as i32).map(|k| MultiIndex::from([k])).collect();
        let (rules, _) = flow_rules(&phi, &dirs, &Window::uniform(1, -depth)).unwrap();
        let r = bilinear_check(&phi, &rules, t).unwrap();
        assert!(r.vanishes, "T={t}: {}", r.residue);
    }
}
