//! The non-stationary equation `(T^a - kappa q d/dq) Psi = 0`: its unique
//! solution with `Psi_0 = 1`, the simple kappa-pole of `log Psi`, and the
//! relations between its residue, the eigenvalue and the prepotential.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{laurent_at_kappa, ArithError, MPoly, QSeries, RatFn, SeriesCoeff, Var};
use crate::lattice::{DiagonalOperator, LatticeError, TrigPoly, Weight};
use crate::toda::{TodaError, TodaSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WhittakerError {
    #[error(transparent)]
    Toda(#[from] TodaError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("log Psi at q^{order}, weight {weight}: pole of order {pole} at kappa = 0 (at most 1 expected)")]
    ExcessPole { order: usize, weight: String, pole: u32 },
    #[error("log Psi at q^{order}: the kappa^-1 part depends on x (weight {weight}, coefficient {coeff})")]
    XDependentResidue { order: usize, weight: String, coeff: String },
    #[error("Psi must start with 1")]
    NotNormalized,
}

/// How the time derivative enters the non-stationary operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KappaConvention {
    /// `T^a - kappa q d/dq`.
    OperatorScale,
    /// `T^a - hbar kappa q d/dq`.
    PaperScale,
}

impl KappaConvention {
    pub fn name(self) -> &'static str {
        match self {
            KappaConvention::OperatorScale => "operator",
            KappaConvention::PaperScale => "paper",
        }
    }

    fn operator(self, n: u32) -> DiagonalOperator {
        match self {
            KappaConvention::OperatorScale => DiagonalOperator::quantum(n),
            KappaConvention::PaperScale => DiagonalOperator::quantum_hbar_kappa(n),
        }
    }

    /// The factor relating `q dPhi/dq` to `b`.
    fn factor(self) -> RatFn {
        match self {
            KappaConvention::OperatorScale => RatFn::one(),
            KappaConvention::PaperScale => RatFn::var(Var::HBAR),
        }
    }
}

impl fmt::Display for KappaConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct WhittakerResult {
    pub psi: QSeries<TrigPoly>,
    /// The kappa^-1 coefficient of `log Psi`, independent of x.
    pub phi: QSeries<RatFn>,
    /// `log Psi - Phi / kappa`, regular at kappa = 0.
    pub g_regular: QSeries<TrigPoly>,
    pub kappa_convention: KappaConvention,
    pub order: usize,
}

/// `Psi_n = D_n^{-1}(-U Psi_{n-1})` with `D_n = hbar^2 Laplacian + 2 hbar
/// <grad, a> - n kappa` (or `- n hbar kappa` in the `paper` scale).
pub fn solve_nonstationary(
    spec: &TodaSpec,
    order: usize,
    convention: KappaConvention,
) -> Result<QSeries<TrigPoly>, WhittakerError> {
    let spec = spec.uniform()?;
    let lat = spec.lattice().clone();
    let u = spec.potential()?;
    let mut psi = vec![TrigPoly::constant(&lat, RatFn::one())];
    for n in 1..=order {
        let rhs = u.trig_mul(&psi[n - 1])?.neg();
        psi.push(rhs.invert_diagonal(&convention.operator(n as u32))?);
    }
    Ok(QSeries::new(psi))
}

/// Splits `log Psi` at kappa = 0 into `Phi / kappa + g`, verifying that the
/// pole is simple and that its residue has weight 0 only.
pub fn extract_phi(psi: &QSeries<TrigPoly>) -> Result<(QSeries<RatFn>, QSeries<TrigPoly>), WhittakerError> {
    if !psi.coeff(0).is_one() {
        return Err(WhittakerError::NotNormalized);
    }
    let log = psi.log()?;
    let lat = psi.coeff(0).lattice().clone();
    let zero = Weight::zero(lat.rank());
    let mut phi = Vec::with_capacity(log.order() + 1);
    let mut g = Vec::with_capacity(log.order() + 1);
    for (n, f) in log.coeffs().iter().enumerate() {
        let split = f
            .terms()
            .par_iter()
            .map(|(w, c)| {
                laurent_at_kappa(c, 1)
                    .map(|l| (w.clone(), l))
                    .map_err(|e| match e {
                        ArithError::ExcessPole { order, .. } => WhittakerError::ExcessPole {
                            order: n,
                            weight: w.to_string(),
                            pole: order,
                        },
                        other => WhittakerError::Arith(other),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut residue = RatFn::zero();
        let mut regular = Vec::new();
        for (w, l) in split {
            let res = l.pole(1).clone();
            if !res.is_zero() {
                if w != zero {
                    return Err(WhittakerError::XDependentResidue {
                        order: n,
                        weight: w.to_string(),
                        coeff: res.to_string(),
                    });
                }
                residue = res;
            }
            regular.push((w, l.regular));
        }
        phi.push(residue);
        g.push(TrigPoly::from_terms(&lat, regular)?);
    }
    Ok((QSeries::new(phi), QSeries::new(g)))
}

/// Solves the non-stationary equation and extracts `Phi`.
pub fn whittaker(spec: &TodaSpec, order: usize, convention: KappaConvention) -> Result<WhittakerResult, WhittakerError> {
    let psi = solve_nonstationary(spec, order, convention)?;
    let (phi, g_regular) = extract_phi(&psi)?;
    Ok(WhittakerResult {
        psi,
        phi,
        g_regular,
        kappa_convention: convention,
        order,
    })
}

/// Checks `q dPhi/dq = b` (operator scale) or `hbar q dPhi/dq = b` (`paper`
/// scale); returns the first failing order.
pub fn verify_b_relation(phi: &QSeries<RatFn>, b: &QSeries<RatFn>, convention: KappaConvention) -> Result<(), usize> {
    let factor = convention.factor();
    let lhs = phi.qdq().map(|c| c.mul(&factor));
    match lhs.first_difference(b) {
        None => Ok(()),
        Some(n) => Err(n),
    }
}

/// `F^inst = Phi|_{hbar=0}` (operator scale) or `(hbar Phi)|_{hbar=0}`
/// (`paper` scale); a pole at hbar = 0 is reported with its order.
pub fn instanton_from_whittaker(
    phi: &QSeries<RatFn>,
    convention: KappaConvention,
) -> Result<QSeries<RatFn>, (usize, ArithError)> {
    let factor = convention.factor();
    let zero = MPoly::zero();
    let mut out = Vec::with_capacity(phi.order() + 1);
    for (n, c) in phi.coeffs().iter().enumerate() {
        out.push(c.mul(&factor).substitute(Var::HBAR, &zero).map_err(|e| (n, e))?);
    }
    Ok(QSeries::new(out))
}

/// `(T^a - kappa q d/dq) Psi` order by order (the time derivative scaled by
/// `hbar` in the `paper` scale).
pub fn nonstationary_residual(
    spec: &TodaSpec,
    psi: &QSeries<TrigPoly>,
    convention: KappaConvention,
) -> Result<QSeries<TrigPoly>, WhittakerError> {
    let spec = spec.uniform()?;
    let u = spec.potential()?;
    let mut out = Vec::with_capacity(psi.order() + 1);
    for n in 0..=psi.order() {
        let mut r = psi.coeff(n).apply_diagonal(&convention.operator(n as u32));
        if n >= 1 {
            r = r.try_add(&u.trig_mul(psi.coeff(n - 1))?)?;
        }
        out.push(r);
    }
    Ok(QSeries::new(out))
}

/// Paper-scale `Phi` from operator-scale `Phi`: divide by `hbar`.
pub fn phi_to_paper_scale(phi: &QSeries<RatFn>) -> QSeries<RatFn> {
    let inv = RatFn::var(Var::HBAR).inv().expect("hbar is nonzero");
    phi.map(|c| c.mul(&inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse::parse_ratfn;
    use crate::arith::Rat;
    use crate::spectral::{prepotential, solve_classical, solve_stationary_quantum, Convention};
    use crate::toda::Algebra;

    fn r(s: &str) -> RatFn {
        parse_ratfn(s).unwrap()
    }

    fn a1() -> TodaSpec {
        TodaSpec::preset(Algebra::A1, Rat::from_integer(2.into()))
    }

    #[test]
    fn first_order_solution() {
        let psi = solve_nonstationary(&a1(), 1, KappaConvention::OperatorScale).unwrap();
        let lat = psi.coeff(0).lattice().clone();
        let expected = TrigPoly::from_terms(
            &lat,
            [
                (Weight(vec![1]), r("-2/(hbar^2+2*hbar*a1-kappa)")),
                (Weight(vec![-1]), r("-2/(hbar^2-2*hbar*a1-kappa)")),
            ],
        )
        .unwrap();
        assert_eq!(psi.coeff(1), &expected);
        let single = TodaSpec::from_text("gram 1\nterm 1 : 2 1\nh 1\n").unwrap();
        let psi = solve_nonstationary(&single, 1, KappaConvention::OperatorScale).unwrap();
        assert_eq!(
            psi.coeff(1),
            &TrigPoly::monomial(&lat, Weight(vec![1]), r("-2/(hbar^2+2*hbar*a1-kappa)"))
        );
        let trivial = solve_nonstationary(&a1(), 0, KappaConvention::OperatorScale).unwrap();
        assert_eq!(trivial.order(), 0);
        assert!(trivial.coeff(0).is_one());
    }

    #[test]
    fn phi_a1() {
        let w = whittaker(&a1(), 3, KappaConvention::OperatorScale).unwrap();
        assert!(w.phi.coeff(1).is_zero());
        assert_eq!(w.phi.coeff(2), &r("4/(4*a1^2-hbar^2)"));
        let sr = solve_stationary_quantum(&a1(), 3).unwrap();
        assert_eq!(verify_b_relation(&w.phi, &sr.b, KappaConvention::OperatorScale), Ok(()));
        assert_eq!(verify_b_relation(&w.phi, &sr.b, KappaConvention::PaperScale), Err(2));
        let f = instanton_from_whittaker(&w.phi, KappaConvention::OperatorScale).unwrap();
        assert_eq!(f.coeff(2), &r("1/a1^2"));
        let cr = solve_classical(&a1(), 3).unwrap();
        assert_eq!(f, prepotential(&cr.v, 2, Convention::SmallQ).unwrap());
    }

    #[test]
    fn trivial_psi() {
        let lat = a1().lattice().clone();
        let psi = QSeries::new(vec![TrigPoly::constant(&lat, RatFn::one()), TrigPoly::zero(&lat)]);
        let (phi, g) = extract_phi(&psi).unwrap();
        assert!(phi.is_zero());
        assert!(g.is_zero());
    }

    #[test]
    fn structural_errors_are_loud() {
        let lat = a1().lattice().clone();
        let one = TrigPoly::constant(&lat, RatFn::one());
        let double = QSeries::new(vec![one.clone(), TrigPoly::constant(&lat, r("1/kappa^2"))]);
        assert!(matches!(extract_phi(&double), Err(WhittakerError::ExcessPole { order: 1, pole: 2, .. })));
        let moving = QSeries::new(vec![one, TrigPoly::monomial(&lat, Weight(vec![1]), r("1/kappa"))]);
        assert!(matches!(extract_phi(&moving), Err(WhittakerError::XDependentResidue { order: 1, .. })));
    }

    #[test]
    fn paper_scale_relations() {
        let op = whittaker(&a1(), 4, KappaConvention::OperatorScale).unwrap();
        let paper = whittaker(&a1(), 4, KappaConvention::PaperScale).unwrap();
        // the `paper`-scale residue times hbar is the operator-scale residue
        let scaled = paper.phi.map(|c| c.mul(&RatFn::var(Var::HBAR)));
        assert_eq!(scaled, op.phi);
        assert_eq!(phi_to_paper_scale(&op.phi), paper.phi);
        let sr = solve_stationary_quantum(&a1(), 4).unwrap();
        assert_eq!(verify_b_relation(&paper.phi, &sr.b, KappaConvention::PaperScale), Ok(()));
        assert_eq!(
            instanton_from_whittaker(&paper.phi, KappaConvention::PaperScale).unwrap(),
            instanton_from_whittaker(&op.phi, KappaConvention::OperatorScale).unwrap()
        );
        for conv in [KappaConvention::OperatorScale, KappaConvention::PaperScale] {
            let w = whittaker(&a1(), 4, conv).unwrap();
            assert!(nonstationary_residual(&a1(), &w.psi, conv).unwrap().is_zero());
        }
    }
}
