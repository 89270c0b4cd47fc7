//! Property tests for the exact arithmetic and the trigonometric operators.

use std::sync::Arc;

use proptest::prelude::*;
use toda_core::arith::{MPoly, QSeries, Rat, RatFn, Var, ZPoly};
use toda_core::arith::gcd;
use toda_core::lattice::{LatticeData, TrigPoly, Weight};

fn poly_from(terms: &[(i64, u32, u32)]) -> MPoly {
    terms.iter().fold(MPoly::zero(), |acc, &(c, i, j)| {
        let m = MPoly::var(Var::a(1)).pow(i).mul(&MPoly::var(Var::HBAR).pow(j));
        acc.add(&m.scale(&Rat::from_integer(c.into())))
    })
}

fn arb_poly() -> impl Strategy<Value = MPoly> {
    prop::collection::vec((-5i64..=5, 0u32..=3, 0u32..=2), 0..5).prop_map(|t| poly_from(&t))
}

fn arb_nonzero_poly() -> impl Strategy<Value = MPoly> {
    arb_poly().prop_filter("nonzero", |p| !p.is_zero())
}

fn arb_ratfn() -> impl Strategy<Value = RatFn> {
    (arb_poly(), arb_nonzero_poly()).prop_map(|(n, d)| RatFn::from_polys(&n, &d).unwrap())
}

fn to_z(p: &MPoly) -> ZPoly {
    p.integer_primitive().1
}

fn arb_trig() -> impl Strategy<Value = TrigPoly> {
    let lat = Arc::new(LatticeData::cartan_a(2).unwrap());
    prop::collection::vec(((-2i32..=2, -2i32..=2), -4i64..=4, 0u32..=1), 0..5).prop_map(move |ts| {
        let terms = ts
            .into_iter()
            .map(|((x, y), c, k)| {
                let coeff = RatFn::from_mpoly(&MPoly::var(Var::a(1)).pow(k).scale(&Rat::from_integer(c.into())));
                (Weight(vec![x, y]), coeff)
            })
            .collect::<Vec<_>>();
        let mut acc = TrigPoly::zero(&lat);
        for (w, c) in terms {
            acc = acc.try_add(&TrigPoly::monomial(&lat, w, c)).unwrap();
        }
        acc
    })
}

fn arb_unit_series() -> impl Strategy<Value = QSeries<RatFn>> {
    prop::collection::vec(arb_ratfn(), 3).prop_map(|cs| {
        let mut v = vec![RatFn::one()];
        v.extend(cs);
        QSeries::new(v)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms(f in arb_ratfn(), g in arb_ratfn(), h in arb_ratfn()) {
        prop_assert_eq!(f.add(&g), g.add(&f));
        prop_assert_eq!(f.mul(&g), g.mul(&f));
        prop_assert_eq!(f.add(&g).add(&h), f.add(&g.add(&h)));
        prop_assert_eq!(f.mul(&g).mul(&h), f.mul(&g.mul(&h)));
        prop_assert_eq!(f.mul(&g.add(&h)), f.mul(&g).add(&f.mul(&h)));
        prop_assert!(f.sub(&f).is_zero());
        if !f.is_zero() {
            prop_assert!(f.div(&f).unwrap().is_one());
        }
    }

    #[test]
    fn gcd_contains_common_factor(p in arb_nonzero_poly(), q in arb_nonzero_poly(), g in arb_nonzero_poly()) {
        let (pz, qz, gz) = (to_z(&p), to_z(&q), to_z(&g));
        let d = gcd(&pz.mul(&gz), &qz.mul(&gz));
        prop_assert!(d.div_exact(&gz).is_some(), "gcd {} misses factor {}", d, gz);
        prop_assert!(pz.mul(&gz).div_exact(&d).is_some());
        prop_assert!(qz.mul(&gz).div_exact(&d).is_some());
    }

    #[test]
    fn exp_inverts_log_and_sqrt_squares(s in arb_unit_series()) {
        prop_assert_eq!(s.log().unwrap().exp().unwrap(), s.clone());
        let r = s.sqrt().unwrap();
        prop_assert_eq!(r.mul(&r), s);
    }

    #[test]
    fn substitution_is_a_homomorphism(f in arb_ratfn(), g in arb_ratfn(), v in arb_poly()) {
        let sub = |x: &RatFn| x.substitute(Var::HBAR, &v);
        if let (Ok(sf), Ok(sg)) = (sub(&f), sub(&g)) {
            prop_assert_eq!(sub(&f.add(&g)).unwrap(), sf.add(&sg));
            prop_assert_eq!(sub(&f.mul(&g)).unwrap(), sf.mul(&sg));
        }
    }

    #[test]
    fn shifted_operator_inverts(t in arb_trig(), n in 1u32..=4) {
        prop_assert_eq!(t.invert_d(n).unwrap().apply_d(n), t.clone());
        prop_assert_eq!(t.apply_d(n).invert_d(n).unwrap(), t);
    }

    #[test]
    fn gradient_pairing_symmetric_bilinear(f in arb_trig(), g in arb_trig(), h in arb_trig()) {
        let fg = f.gradient_pairing(&g).unwrap();
        prop_assert_eq!(&fg, &g.gradient_pairing(&f).unwrap());
        let lhs = f.gradient_pairing(&g.try_add(&h).unwrap()).unwrap();
        let rhs = fg.try_add(&f.gradient_pairing(&h).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        // constants are in the kernel
        let c = TrigPoly::constant(f.lattice(), RatFn::from_int(7));
        prop_assert!(f.gradient_pairing(&c).unwrap().is_zero());
    }
}
