//! Rank-one period identities on the spectral curve `z^2 + q P(w) = u`.
//!
//! Laurent polynomials in `w = e^x` are trigonometric polynomials on the
//! rank-one lattice with unit form, so the contour integral over the unit
//! circle is the constant term.

use std::sync::Arc;

use thiserror::Error;

use crate::arith::{ArithError, MPoly, QSeries, Rat, RatFn, Var};
use crate::lattice::{LatticeData, LatticeError, TrigPoly, Weight};
use crate::spectral::{solve_classical, SpectralError};
use crate::toda::{PotentialTerm, TodaError, TodaSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PeriodError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Toda(#[from] TodaError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("period checks need a rank-one potential with unit form")]
    NotRankOne,
    #[error("not a Laurent polynomial in w with rational coefficients: {0}")]
    BadCurve(String),
    #[error("v must vanish at q^0")]
    NonzeroConstant,
}

/// The rank-one lattice of exponents of `w`.
pub fn laurent_lattice() -> Arc<LatticeData> {
    Arc::new(LatticeData::from_rows(&[vec![1]]).expect("unit form"))
}

/// The curve data: `P(w)` as a Laurent polynomial with rational coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveSpec {
    pub p: TrigPoly,
}

impl CurveSpec {
    /// `P(w) = U(x)` for a rank-one potential with unit form.
    pub fn from_spec(spec: &TodaSpec) -> Result<CurveSpec, PeriodError> {
        let spec = spec.uniform()?;
        if spec.rank() != 1 || spec.lattice().as_ref() != laurent_lattice().as_ref() {
            return Err(PeriodError::NotRankOne);
        }
        let u = spec.potential()?;
        Ok(CurveSpec {
            p: TrigPoly::from_terms(&laurent_lattice(), u.terms().iter().map(|(w, c)| (w.clone(), c.clone())))?,
        })
    }

    /// Parses an expression such as `w + 1/w + w^2`.
    pub fn parse(text: &str) -> Result<CurveSpec, PeriodError> {
        let f: RatFn = text.parse()?;
        let bad = || PeriodError::BadCurve(text.to_string());
        let den = f.den();
        if !den.is_monomial() || den.vars().iter().any(|&v| v != Var::W) {
            return Err(bad());
        }
        let shift = den.degree(Var::W) as i32;
        let den_c = den.lc();
        let mut terms = Vec::new();
        for (m, c) in f.num().terms() {
            if m.vars().any(|(v, _)| v != Var::W) {
                return Err(bad());
            }
            terms.push((Weight(vec![m.exp(Var::W) as i32 - shift]), RatFn::from_rat(c / &den_c)));
        }
        Ok(CurveSpec {
            p: TrigPoly::from_terms(&laurent_lattice(), terms)?,
        })
    }

    /// The potential `U(x) = P(e^x)` carrying `q^1`.
    pub fn to_spec(&self, name: &str) -> Result<TodaSpec, PeriodError> {
        let terms = self
            .p
            .terms()
            .iter()
            .map(|(w, c)| {
                Ok(PotentialTerm {
                    weight: w.clone(),
                    coeff: c.as_rat().ok_or_else(|| PeriodError::BadCurve(c.to_string()))?,
                    q_power: 1,
                })
            })
            .collect::<Result<Vec<_>, PeriodError>>()?;
        Ok(TodaSpec::new(name, (*laurent_lattice()).clone(), terms, 1, vec![])?)
    }

    /// `v` of the classical problem for this potential.
    pub fn classical_v(&self, order: usize) -> Result<QSeries<RatFn>, PeriodError> {
        Ok(solve_classical(&self.to_spec("curve")?, order)?.v)
    }
}

fn a() -> RatFn {
    RatFn::var(Var::a(1))
}

/// `sqrt(a^2 + v - q P(w))` with the branch equal to `a` at `q = 0`.
fn root(v: &QSeries<RatFn>, p: &TrigPoly, order: usize) -> Result<QSeries<TrigPoly>, PeriodError> {
    if !v.coeff(0).is_zero() {
        return Err(PeriodError::NonzeroConstant);
    }
    let lat = laurent_lattice();
    let inv_a2 = a().pow(2).inv()?;
    let n = order.min(v.order());
    let mut x = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut t = TrigPoly::constant(&lat, v.coeff(k).clone());
        if k == 1 {
            t = t.try_add(&p.neg())?;
        }
        x.push(t.scale(&inv_a2));
    }
    x[0] = TrigPoly::constant(&lat, RatFn::one());
    let s = QSeries::new(x).sqrt()?;
    Ok(s.map(|t| t.scale(&a())))
}

/// `dphi/dx = -a + sqrt(a^2 + v - q P(w))` as a series of Laurent polynomials.
pub fn classical_momentum(v: &QSeries<RatFn>, curve: &CurveSpec, order: usize) -> Result<QSeries<TrigPoly>, PeriodError> {
    let r = root(v, &curve.p, order)?;
    let mut c = r.into_coeffs();
    c[0] = c[0].try_add(&TrigPoly::constant(&laurent_lattice(), a().neg()))?;
    Ok(QSeries::new(c))
}

/// Checks that the `w^0` coefficient of `sqrt(a^2 + v - q P(w))` is `a` at
/// `q^0` and vanishes at every higher order; returns the first failing order.
pub fn residue_identity_check(v: &QSeries<RatFn>, curve: &CurveSpec, order: usize) -> Result<Result<(), usize>, PeriodError> {
    let r = root(v, &curve.p, order)?;
    for (k, t) in r.coeffs().iter().enumerate() {
        let expected = if k == 0 { a() } else { RatFn::zero() };
        if t.constant_term() != expected {
            return Ok(Err(k));
        }
    }
    Ok(Ok(()))
}

/// Rewrites a rational function of `a0` (and other variables) using
/// `a0^2 = u`, leaving `a0` only linearly in the numerator.
pub fn reduce_branch(f: &RatFn) -> Result<RatFn, ArithError> {
    if !f.contains(Var::A0) {
        return Ok(f.clone());
    }
    let minus_a0 = MPoly::var(Var::A0).neg();
    let num = f.num();
    let den = f.den();
    let conj = den.substitute(Var::A0, &minus_a0);
    let n = reduce_poly(&num.mul(&conj));
    let d = reduce_poly(&den.mul(&conj));
    RatFn::from_polys(&n, &d)
}

fn reduce_poly(p: &MPoly) -> MPoly {
    MPoly::from_terms(p.terms().iter().map(|(m, c)| {
        let e = m.exp(Var::A0);
        let k = m.exp(Var::U) + e / 2;
        let m2 = (*m).with_exp(Var::A0, e % 2).with_exp(Var::U, k);
        (m2, c.clone())
    }))
}

/// Solves `u = a^2 + v(a, q)` for `a(u, q) = a0 + sum_i a_i q^i` with
/// `a0^2 = u`; the coefficients are returned in terms of `a0`.
pub fn invert_a_of_u(v: &QSeries<RatFn>, order: usize) -> Result<QSeries<RatFn>, PeriodError> {
    if !v.coeff(0).is_zero() {
        return Err(PeriodError::NonzeroConstant);
    }
    let n = order.min(v.order());
    let a0 = MPoly::var(Var::A0);
    let va0: Vec<RatFn> = v
        .coeffs()
        .iter()
        .map(|c| c.substitute(Var::a(1), &a0))
        .collect::<Result<_, _>>()?;
    let two_a0 = RatFn::var(Var::A0).scale_rat(&Rat::from_integer(2.into()));
    let mut coeffs = vec![RatFn::var(Var::A0)];
    for m in 1..=n {
        let mut trial = coeffs.clone();
        trial.push(RatFn::zero());
        let residual = a_squared_plus_v(&va0, &QSeries::new(trial), m);
        coeffs.push(residual.neg().div(&two_a0)?);
    }
    Ok(QSeries::new(coeffs))
}

/// The `q^m` coefficient of `a(q)^2 + sum_n v_n(a(q)) q^n` by Taylor
/// expansion of `v_n` around `a0` (entries of `va0` are functions of `a0`).
fn a_squared_plus_v(va0: &[RatFn], a: &QSeries<RatFn>, m: usize) -> RatFn {
    let mut delta = a.coeffs().to_vec();
    delta[0] = RatFn::zero();
    let delta = QSeries::new(delta);
    let mut acc = a.mul(a).coeff(m).clone();
    // powers of delta / k! up to q^m
    let mut pow = QSeries::constant(RatFn::one(), a.order());
    let mut derivs: Vec<RatFn> = va0[..=m.min(va0.len() - 1)].to_vec();
    for k in 0..m {
        if k > 0 {
            pow = pow.mul(&delta).scale(&Rat::new(1.into(), (k as i64).into()));
            derivs = derivs.iter().map(|d| d.derivative(Var::A0)).collect();
        }
        for (nidx, d) in derivs.iter().enumerate().skip(1) {
            if nidx + k > m || d.is_zero() {
                continue;
            }
            let c = pow.coeff(m - nidx);
            if !c.is_zero() {
                acc = acc.add(&d.mul(c));
            }
        }
    }
    acc
}

/// Checks `a(u,q)^2 + v(a(u,q), q) = u` modulo `q^{N+1}` after the rewriting
/// `a0^2 = u`; returns the first failing order.
pub fn verify_inversion(v: &QSeries<RatFn>, a: &QSeries<RatFn>) -> Result<Result<(), usize>, PeriodError> {
    let va0: Vec<RatFn> = v
        .coeffs()
        .iter()
        .map(|c| c.substitute(Var::a(1), &MPoly::var(Var::A0)))
        .collect::<Result<_, _>>()?;
    for m in 0..=a.order().min(v.order()) {
        let got = reduce_branch(&a_squared_plus_v(&va0, a, m))?;
        let expected = if m == 0 { RatFn::var(Var::U) } else { RatFn::zero() };
        if got != expected {
            return Ok(Err(m));
        }
    }
    Ok(Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse::parse_ratfn;
    use crate::toda::Algebra;

    fn r(s: &str) -> RatFn {
        parse_ratfn(s).unwrap()
    }

    fn a1() -> TodaSpec {
        TodaSpec::preset(Algebra::A1, Rat::from_integer(2.into()))
    }

    #[test]
    fn momentum_matches_classical_solution() {
        let spec = a1();
        let curve = CurveSpec::from_spec(&spec).unwrap();
        let cr = solve_classical(&spec, 5).unwrap();
        let mom = classical_momentum(&cr.v, &curve, 5).unwrap();
        assert!(mom.coeff(0).is_zero());
        let lat = laurent_lattice();
        let first = TrigPoly::from_terms(&lat, [(Weight(vec![1]), r("-1/a1")), (Weight(vec![-1]), r("-1/a1"))]).unwrap();
        assert_eq!(mom.coeff(1), &first);
        for k in 0..=5 {
            let dphi = cr.phi.coeff(k).directional_derivative(&Weight(vec![1]));
            let dphi = TrigPoly::from_terms(&lat, dphi.terms().iter().map(|(w, c)| (w.clone(), c.clone()))).unwrap();
            assert_eq!(mom.coeff(k), &dphi, "order {k}");
        }
        let zero_curve = CurveSpec { p: TrigPoly::zero(&lat) };
        assert!(classical_momentum(&QSeries::zero(3, &RatFn::zero()), &zero_curve, 3).unwrap().is_zero());
    }

    #[test]
    fn residue_identity() {
        let curve = CurveSpec::from_spec(&a1()).unwrap();
        let v = solve_classical(&a1(), 8).unwrap().v;
        assert_eq!(residue_identity_check(&v, &curve, 8).unwrap(), Ok(()));
        let mut bad = v.clone().into_coeffs();
        bad[2] = bad[2].add(&RatFn::one());
        assert_eq!(residue_identity_check(&QSeries::new(bad), &curve, 8).unwrap(), Err(2));
        let one_sided = CurveSpec::parse("w").unwrap();
        assert_eq!(
            residue_identity_check(&QSeries::zero(6, &RatFn::zero()), &one_sided, 6).unwrap(),
            Ok(())
        );
    }

    #[test]
    fn generic_laurent_curve() {
        let curve = CurveSpec::parse("w + 1/w + w^2").unwrap();
        assert_eq!(curve.p.len(), 3);
        assert_eq!(curve.p.coeff(&Weight(vec![-1])), RatFn::one());
        let v = curve.classical_v(6).unwrap();
        assert_eq!(residue_identity_check(&v, &curve, 6).unwrap(), Ok(()));
        assert!(CurveSpec::parse("a1*w").is_err());
        assert!(CurveSpec::parse("1/(w+1)").is_err());
    }

    #[test]
    fn inversion() {
        let v = solve_classical(&a1(), 6).unwrap().v;
        let a = invert_a_of_u(&v, 6).unwrap();
        assert_eq!(a.coeff(0), &RatFn::var(Var::A0));
        assert!(a.coeff(1).is_zero());
        assert_eq!(a.coeff(2), &r("-1/a0^3"));
        assert_eq!(reduce_branch(a.coeff(2)).unwrap(), r("-a0/u^2"));
        assert_eq!(verify_inversion(&v, &a).unwrap(), Ok(()));
        let zero = QSeries::zero(4, &RatFn::zero());
        let trivial = invert_a_of_u(&zero, 4).unwrap();
        assert!(trivial.coeffs()[1..].iter().all(|c| c.is_zero()));
    }

    #[test]
    fn branch_rewriting() {
        assert_eq!(reduce_branch(&r("a0^3 + a0^2")).unwrap(), r("a0*u + u"));
        assert_eq!(reduce_branch(&r("1/(a0 + 1)")).unwrap(), r("(1 - a0)/(1 - u)"));
    }
}
