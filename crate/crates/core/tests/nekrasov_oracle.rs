//! Self-validation of the combinatorial partition function: closed forms,
//! symmetries, regularity of the limit and golden coefficients.

use std::fmt::Write as _;
use std::path::PathBuf;

use toda_core::arith::parse::parse_ratfn;
use toda_core::arith::{MPoly, QSeries, RatFn, Var};
use toda_core::nekrasov::{eps_log, f_inst_from_z, nekrasov_z};

fn r(s: &str) -> RatFn {
    parse_ratfn(s).unwrap()
}

fn swap(f: &RatFn, x: Var, y: Var) -> RatFn {
    let tmp = Var::U;
    f.substitute(x, &MPoly::var(tmp))
        .and_then(|g| g.substitute(y, &MPoly::var(x)))
        .and_then(|g| g.substitute(tmp, &MPoly::var(y)))
        .unwrap()
}

#[test]
fn rank_one_log_is_exactly_q() {
    let z = nekrasov_z(1, 5).unwrap();
    let mut fact = 1i64;
    for d in 1..=5 {
        fact *= d as i64;
        let expected = RatFn::from_int(fact)
            .mul(&r("e1*e2").pow(d as u32))
            .inv()
            .unwrap();
        assert_eq!(z.coeff(d), &expected, "d = {d}");
    }
    let l = eps_log(&z).unwrap();
    assert_eq!(l, QSeries::new(vec![RatFn::zero(), RatFn::one(), RatFn::zero(), RatFn::zero(), RatFn::zero(), RatFn::zero()]));
}

#[test]
fn rank_two_symmetries() {
    let z = nekrasov_z(2, 3).unwrap();
    let a3 = MPoly::var(Var::a(3));
    for d in 0..=3 {
        let c = z.coeff(d);
        assert_eq!(&swap(c, Var::E1, Var::E2), c, "e1 <-> e2 at d = {d}");
        assert_eq!(&swap(c, Var::a(1), Var::a(2)), c, "a1 <-> a2 at d = {d}");
        let shifted = c
            .substitute(Var::a(1), &MPoly::var(Var::a(1)).add(&a3))
            .and_then(|g| g.substitute(Var::a(2), &MPoly::var(Var::a(2)).add(&a3)))
            .unwrap();
        assert_eq!(&shifted, c, "translation invariance at d = {d}");
    }
}

#[test]
fn rank_three_permutation_symmetry() {
    let z = nekrasov_z(3, 2).unwrap();
    for d in 1..=2 {
        let c = z.coeff(d);
        assert_eq!(&swap(c, Var::a(1), Var::a(3)), c);
        assert_eq!(&swap(c, Var::a(2), Var::a(3)), c);
    }
}

#[test]
fn rank_two_limit_is_regular_and_matches_known_coefficients() {
    // Standard SU(2) instanton coefficients 2, 5, 48 over powers of
    // (a1 - a2)^2, with the sign of the negative-definite invariant form.
    let f = f_inst_from_z(&nekrasov_z(2, 3).unwrap()).unwrap();
    assert!(f.coeff(0).is_zero());
    assert_eq!(f.coeff(1), &r("-2/(a1-a2)^2"));
    assert_eq!(f.coeff(2), &r("-5/(a1-a2)^6"));
    assert_eq!(f.coeff(3), &r("-48/(a1-a2)^10"));
    // the first coefficient is even in a1 - a2
    assert_eq!(&swap(f.coeff(1), Var::a(1), Var::a(2)), f.coeff(1));
}

#[test]
fn iterated_and_reversed_limits_agree() {
    let l = eps_log(&nekrasov_z(2, 3).unwrap()).unwrap();
    let zero = MPoly::zero();
    for d in 1..=3 {
        let c = l.coeff(d);
        let a = c.substitute(Var::E2, &zero).and_then(|g| g.substitute(Var::E1, &zero)).unwrap();
        let b = c.substitute(Var::E1, &zero).and_then(|g| g.substitute(Var::E2, &zero)).unwrap();
        assert_eq!(a, b, "d = {d}");
    }
}

fn golden_text() -> String {
    let mut out = String::new();
    for n in 1..=2 {
        let z = nekrasov_z(n, 3).unwrap();
        let f = f_inst_from_z(&z).unwrap();
        for d in 0..=3 {
            writeln!(out, "n={n} d={d} Z = {}", z.coeff(d)).unwrap();
        }
        for d in 0..=3 {
            writeln!(out, "n={n} d={d} F = {}", f.coeff(d)).unwrap();
        }
    }
    out
}

#[test]
fn golden_coefficients() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/nekrasov.txt");
    let text = golden_text();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &text).unwrap();
    }
    let stored = std::fs::read_to_string(&path).expect("golden file present; regenerate with UPDATE_GOLDEN=1");
    assert_eq!(stored, text);
    // stored strings parse back to the same functions
    for line in stored.lines() {
        let (_, value) = line.split_once(" = ").unwrap();
        assert_eq!(r(value).to_string(), value);
    }
}
