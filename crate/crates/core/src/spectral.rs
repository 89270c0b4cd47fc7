//! The stationary eigenvalue problem `T^a psi = b psi` in its quantum,
//! logarithmic and classical forms, and the prepotential assembled from the
//! classical eigenvalue.

use std::fmt;

use thiserror::Error;

use crate::arith::{ArithError, MPoly, QSeries, Rat, RatFn, SeriesCoeff, Var};
use crate::lattice::{DiagonalOperator, LatticeError, TrigPoly};
use crate::toda::{TodaError, TodaSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpectralError {
    #[error(transparent)]
    Toda(#[from] TodaError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("grading violation: v has a nonzero coefficient at q^{order}, which h = {h} does not divide")]
    GradingViolation { order: usize, h: u32 },
    #[error("the series must vanish at q^0")]
    NonzeroConstant,
}

/// Quantum solution: `psi` normalized to `psi_0 = 1` and zero constant term
/// at every positive order, with eigenvalue `b`.
#[derive(Clone, Debug)]
pub struct StationaryResult {
    pub psi: QSeries<TrigPoly>,
    pub b: QSeries<RatFn>,
    pub spec: TodaSpec,
    pub order: usize,
}

/// `phi = hbar log psi` normalized to zero constant term, with eigenvalue `b`.
#[derive(Clone, Debug)]
pub struct LogResult {
    pub phi: QSeries<TrigPoly>,
    pub b: QSeries<RatFn>,
    pub order: usize,
}

/// Classical limit `phi` (over the field of `a` only) with eigenvalue `v`.
#[derive(Clone, Debug)]
pub struct ClassicalResult {
    pub phi: QSeries<TrigPoly>,
    pub v: QSeries<RatFn>,
    pub order: usize,
}

/// Which expansion variable a prepotential is written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    /// The uniform coupling `q` itself.
    SmallQ,
    /// The instanton counting parameter `Q = q^h`.
    BigQ,
}

impl Convention {
    pub fn name(self) -> &'static str {
        match self {
            Convention::SmallQ => "q",
            Convention::BigQ => "Q",
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn sum_series_terms<T: SeriesCoeff>(parts: impl IntoIterator<Item = T>, zero: T) -> T {
    parts.into_iter().fold(zero, |acc, x| acc.add(&x))
}

/// Order-by-order solution of `T^a psi = b psi`, `T^a = hbar^2 Laplacian +
/// 2 hbar <grad, a> + q U`. At order n,
/// `D psi_n = sum_{i=1}^n b_i psi_{n-i} - U psi_{n-1}` and `b_n` is fixed by
/// the vanishing of the constant term of the right-hand side.
pub fn solve_stationary_quantum(spec: &TodaSpec, order: usize) -> Result<StationaryResult, SpectralError> {
    let spec = spec.uniform()?;
    let lat = spec.lattice().clone();
    let u = spec.potential()?;
    let d0 = DiagonalOperator::quantum(0);
    let mut psi = vec![TrigPoly::constant(&lat, RatFn::one())];
    let mut b = vec![RatFn::zero()];
    for n in 1..=order {
        let mut rhs = u.trig_mul(&psi[n - 1])?.neg();
        for i in 1..n {
            if !b[i].is_zero() {
                rhs = rhs.try_add(&psi[n - i].scale(&b[i]))?;
            }
        }
        let bn = rhs.constant_term().neg();
        let rhs = rhs.without_constant_term();
        psi.push(rhs.invert_diagonal(&d0)?);
        b.push(bn);
    }
    Ok(StationaryResult {
        psi: QSeries::new(psi),
        b: QSeries::new(b),
        spec,
        order,
    })
}

/// Shared recursion for the logarithmic and classical forms:
/// `L phi_n = e_n - delta_{n1} U - sum_{i=1}^{n-1} <grad phi_i, grad phi_{n-i}>`.
fn solve_riccati(
    spec: &TodaSpec,
    order: usize,
    op: &DiagonalOperator,
) -> Result<(QSeries<TrigPoly>, QSeries<RatFn>), SpectralError> {
    let lat = spec.lattice().clone();
    let u = spec.potential()?;
    let mut phi = vec![TrigPoly::zero(&lat)];
    let mut e = vec![RatFn::zero()];
    for n in 1..=order {
        let mut known = if n == 1 { u.clone() } else { TrigPoly::zero(&lat) };
        for i in 1..n {
            known = known.try_add(&phi[i].gradient_pairing(&phi[n - i])?)?;
        }
        let en = known.constant_term();
        let rhs = known.without_constant_term().neg();
        phi.push(rhs.invert_diagonal(op)?);
        e.push(en);
    }
    Ok((QSeries::new(phi), QSeries::new(e)))
}

/// `phi = hbar log psi` from `hbar Laplacian phi + |grad phi|^2 + 2 <a, grad phi> + q U = b`.
pub fn solve_log_quantum(spec: &TodaSpec, order: usize) -> Result<LogResult, SpectralError> {
    let spec = spec.uniform()?;
    let (phi, b) = solve_riccati(&spec, order, &DiagonalOperator::log_quantum())?;
    Ok(LogResult { phi, b, order })
}

/// The classical equation `|grad phi|^2 + 2 <a, grad phi> = v - q U`.
pub fn solve_classical(spec: &TodaSpec, order: usize) -> Result<ClassicalResult, SpectralError> {
    let spec = spec.uniform()?;
    let (phi, v) = solve_riccati(&spec, order, &DiagonalOperator::classical())?;
    Ok(ClassicalResult { phi, v, order })
}

/// First order at which `b|_{hbar=0}` differs from `v` or fails to exist.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitFailure {
    pub order: usize,
    pub detail: String,
}

/// Checks `lim_{hbar -> 0} b_n = v_n` for every order up to the common truncation.
pub fn classical_limit_check(b: &QSeries<RatFn>, v: &QSeries<RatFn>) -> Result<(), LimitFailure> {
    let n = b.order().min(v.order());
    for k in 0..=n {
        match b.coeff(k).substitute(Var::HBAR, &MPoly::zero()) {
            Ok(x) if &x == v.coeff(k) => {}
            Ok(x) => {
                return Err(LimitFailure {
                    order: k,
                    detail: format!("b|hbar=0 = {x} but v = {}", v.coeff(k)),
                })
            }
            Err(e) => {
                return Err(LimitFailure {
                    order: k,
                    detail: e.to_string(),
                })
            }
        }
    }
    Ok(())
}

/// The instanton prepotential from `Q dF/dQ = v`.
///
/// In the `q` convention `F_m = v_m / m`. In the `Q` convention the result
/// is indexed by powers of `Q = q^h` with coefficient `h v_{hk} / (hk)` at
/// `Q^k`; a nonzero `v_m` with `h` not dividing `m` is a grading violation.
pub fn prepotential(v: &QSeries<RatFn>, h: u32, convention: Convention) -> Result<QSeries<RatFn>, SpectralError> {
    if !v.coeff(0).is_zero() {
        return Err(SpectralError::NonzeroConstant);
    }
    let n = v.order();
    match convention {
        Convention::SmallQ => {
            let mut f = vec![RatFn::zero()];
            for m in 1..=n {
                f.push(v.coeff(m).scale_rat(&Rat::new(1.into(), (m as i64).into())));
            }
            Ok(QSeries::new(f))
        }
        Convention::BigQ => {
            let h = h.max(1);
            for m in 1..=n {
                if m % h as usize != 0 && !v.coeff(m).is_zero() {
                    return Err(SpectralError::GradingViolation { order: m, h });
                }
            }
            let mut f = vec![RatFn::zero()];
            for k in 1..=(n / h as usize) {
                f.push(v.coeff(k * h as usize).scale_rat(&Rat::new(1.into(), (k as i64).into())));
            }
            Ok(QSeries::new(f))
        }
    }
}

/// `F = log_coeff * ln X + F^inst(X)` with `X` the expansion variable of the
/// instanton series.
#[derive(Clone, Debug, PartialEq)]
pub struct FullPrepotential {
    pub log_coeff: RatFn,
    pub inst: QSeries<RatFn>,
}

impl FullPrepotential {
    /// `u = X dF/dX = log_coeff + X dF^inst/dX`.
    pub fn u_series(&self) -> QSeries<RatFn> {
        let mut u = self.inst.qdq().into_coeffs();
        u[0] = u[0].add(&self.log_coeff);
        QSeries::new(u)
    }
}

/// Pairs the instanton series with the perturbative term `<a, a> ln X`.
pub fn full_prepotential(spec: &TodaSpec, f_inst: &QSeries<RatFn>) -> FullPrepotential {
    FullPrepotential {
        log_coeff: RatFn::from_mpoly(&spec.lattice().norm_of_a()),
        inst: f_inst.clone(),
    }
}

/// `(hbar^2 Laplacian + 2 hbar <grad, a> + q U - b) psi`, order by order.
pub fn eigen_residual(sr: &StationaryResult) -> Result<QSeries<TrigPoly>, SpectralError> {
    let u = sr.spec.potential()?;
    let lat = sr.spec.lattice().clone();
    let d0 = DiagonalOperator::quantum(0);
    let mut out = Vec::with_capacity(sr.order + 1);
    for n in 0..=sr.order {
        let mut r = sr.psi.coeff(n).apply_diagonal(&d0);
        if n >= 1 {
            r = r.try_add(&u.trig_mul(sr.psi.coeff(n - 1))?)?;
        }
        let bpsi = sum_series_terms(
            (1..=n).map(|i| sr.psi.coeff(n - i).scale(sr.b.coeff(i))),
            TrigPoly::zero(&lat),
        );
        out.push(r.try_add(&bpsi.neg())?);
    }
    Ok(QSeries::new(out))
}

/// Rescales the constant term of a series of trigonometric polynomials to 1
/// by dividing through by it, as a series in q.
pub fn normalize_constant_term(s: &QSeries<TrigPoly>) -> Result<QSeries<TrigPoly>, SpectralError> {
    let lat = s.coeff(0).lattice().clone();
    let c: QSeries<RatFn> = s.map(|t| t.constant_term());
    // 1/c by the recursion c * r = 1
    let n = s.order();
    let mut r = vec![RatFn::one()];
    let c0 = c.coeff(0);
    if !c0.is_one() {
        return Err(SpectralError::Arith(ArithError::SeriesPrecondition(
            "constant term must start with 1".into(),
        )));
    }
    for m in 1..=n {
        let acc = (1..=m).fold(RatFn::zero(), |acc, k| acc.add(&c.coeff(k).mul(&r[m - k])));
        r.push(acc.neg());
    }
    let inv = QSeries::new(r.into_iter().map(|x| TrigPoly::constant(&lat, x)).collect());
    Ok(s.mul(&inv))
}
