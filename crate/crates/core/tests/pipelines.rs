//! End-to-end invariants of the spectral, Whittaker and period pipelines.

use std::collections::BTreeSet;

use toda_core::arith::parse::parse_ratfn;
use toda_core::arith::{MPoly, QSeries, Rat, RatFn, Var};
use toda_core::lattice::Weight;
use toda_core::period::{invert_a_of_u, residue_identity_check, verify_inversion, CurveSpec};
use toda_core::spectral::{
    classical_limit_check, full_prepotential, prepotential, solve_classical, solve_stationary_quantum, Convention,
};
use toda_core::toda::{Algebra, TodaSpec};
use toda_core::whittaker::{instanton_from_whittaker, verify_b_relation, whittaker, KappaConvention};

fn preset(alg: Algebra) -> TodaSpec {
    TodaSpec::preset(alg, Rat::from_integer(2.into()))
}

fn r(s: &str) -> RatFn {
    parse_ratfn(s).unwrap()
}

#[test]
fn rank_one_eigenvalues_are_even_in_a() {
    let sr = solve_stationary_quantum(&preset(Algebra::A1), 6).unwrap();
    let minus_a = MPoly::var(Var::a(1)).neg();
    for n in 0..=6 {
        let b = sr.b.coeff(n);
        assert_eq!(&b.substitute(Var::a(1), &minus_a).unwrap(), b, "order {n}");
    }
    assert_eq!(sr.b.coeff(2), &r("8/(4*a1^2-hbar^2)"));
}

#[test]
fn eigenfunction_support_is_bounded_by_order() {
    for (alg, order) in [(Algebra::A1, 6), (Algebra::A2, 4)] {
        let sr = solve_stationary_quantum(&preset(alg), order).unwrap();
        let rank = sr.spec.rank();
        let steps: Vec<Weight> = sr.spec.terms().iter().map(|t| t.weight.clone()).collect();
        let mut reach: BTreeSet<Weight> = [Weight::zero(rank)].into();
        for n in 0..=order {
            for w in sr.psi.coeff(n).terms().keys() {
                assert!(reach.contains(w), "{alg:?}: weight {w} at order {n}");
            }
            let next: BTreeSet<Weight> = reach.iter().flat_map(|w| steps.iter().map(move |s| w.add(s))).collect();
            reach.extend(next);
        }
    }
}

#[test]
fn classical_data_is_the_quantum_limit_and_grading_holds() {
    for (alg, h, order) in [(Algebra::A1, 2, 8), (Algebra::A2, 3, 6)] {
        let spec = preset(alg);
        let v = solve_classical(&spec, order).unwrap().v;
        for m in 0..=order {
            if m % h != 0 {
                assert!(v.coeff(m).is_zero(), "{alg:?}: v_{m} should vanish");
            }
        }
        if order <= 6 {
            let b = solve_stationary_quantum(&spec, order).unwrap().b;
            classical_limit_check(&b, &v).unwrap();
        }
    }
}

#[test]
fn prepotential_renormalization() {
    let spec = preset(Algebra::A1);
    let v = solve_classical(&spec, 8).unwrap().v;
    let f = prepotential(&v, 2, Convention::SmallQ).unwrap();
    assert_eq!(f.qdq(), v);
    assert_eq!(f.coeff(2), &r("1/a1^2"));
    let fq = prepotential(&v, 2, Convention::BigQ).unwrap();
    let full = full_prepotential(&spec, &fq);
    let u = full.u_series();
    for k in 1..=4 {
        assert_eq!(u.coeff(k), v.coeff(2 * k), "Q^{k}");
    }
    assert_eq!(u.coeff(0), &RatFn::from_mpoly(&MPoly::var(Var::a(1)).pow(2)));
}

#[test]
fn whittaker_reproduces_eigenvalues_and_prepotential() {
    let spec = preset(Algebra::A1);
    let w = whittaker(&spec, 4, KappaConvention::OperatorScale).unwrap();
    let b = solve_stationary_quantum(&spec, 4).unwrap().b;
    verify_b_relation(&w.phi, &b, KappaConvention::OperatorScale).unwrap();
    let inst = instanton_from_whittaker(&w.phi, KappaConvention::OperatorScale).unwrap();
    let v = solve_classical(&spec, 4).unwrap().v;
    assert_eq!(inst, prepotential(&v, 2, Convention::SmallQ).unwrap());
}

#[test]
fn period_identities_for_laurent_curves() {
    let spec = preset(Algebra::A1);
    let curve = CurveSpec::from_spec(&spec).unwrap();
    let v = solve_classical(&spec, 6).unwrap().v;
    assert_eq!(residue_identity_check(&v, &curve, 6).unwrap(), Ok(()));
    let a = invert_a_of_u(&v, 6).unwrap();
    assert_eq!(verify_inversion(&v, &a).unwrap(), Ok(()));

    let other = CurveSpec::parse("w + 1/w + w^2").unwrap();
    let v2 = other.classical_v(4).unwrap();
    assert_eq!(residue_identity_check(&v2, &other, 4).unwrap(), Ok(()));
    let mut bent = v2.coeffs().to_vec();
    bent[3] = bent[3].add(&RatFn::one());
    assert_eq!(residue_identity_check(&QSeries::new(bent), &other, 4).unwrap(), Err(3));
}

#[test]
fn pipelines_are_deterministic() {
    let run = || {
        let spec = preset(Algebra::A2);
        let b = solve_stationary_quantum(&spec, 3).unwrap().b;
        let w = whittaker(&spec, 3, KappaConvention::PaperScale).unwrap();
        format!("{:?}|{:?}|{:?}", b, w.phi, w.psi)
    };
    assert_eq!(run(), run());
}
