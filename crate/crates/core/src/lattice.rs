//! Weight lattices, trigonometric polynomials on the torus and the diagonal
//! operators built from the Laplacian and the derivative along `a`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::var::MAX_RANK;
use crate::arith::{ArithError, MPoly, Rat, RatFn, SeriesCoeff, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("Gram matrix must be square and nonempty")]
    NotSquare,
    #[error("rank {0} exceeds the supported maximum {MAX_RANK}")]
    RankTooLarge(usize),
    #[error("Gram matrix is not symmetric")]
    NotSymmetric,
    #[error("Gram matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("Gram matrix has non-integral entry at ({0}, {1})")]
    NonIntegral(usize, usize),
    #[error("weight {0} has length {1}, lattice rank is {2}")]
    WeightLength(String, usize, usize),
    #[error("operands live on different lattices")]
    LatticeMismatch,
    #[error("not in the image of the operator: weight {weight} has zero eigenvalue but coefficient {coeff}")]
    NotInImage { weight: String, coeff: String },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// A lattice with a positive definite integral bilinear form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeData {
    gram: Vec<Vec<Rat>>,
}

/// Sylvester's criterion via Gaussian elimination over the rationals.
fn is_positive_definite(g: &[Vec<Rat>]) -> bool {
    let n = g.len();
    let mut m: Vec<Vec<Rat>> = g.to_vec();
    for k in 0..n {
        if !m[k][k].is_positive() {
            return false;
        }
        for i in (k + 1)..n {
            let f = &m[i][k] / &m[k][k];
            for j in k..n {
                let t = &f * &m[k][j];
                m[i][j] -= t;
            }
        }
    }
    true
}

impl LatticeData {
    pub fn new(gram: Vec<Vec<Rat>>) -> Result<LatticeData, LatticeError> {
        let n = gram.len();
        if n == 0 || gram.iter().any(|row| row.len() != n) {
            return Err(LatticeError::NotSquare);
        }
        if n > MAX_RANK {
            return Err(LatticeError::RankTooLarge(n));
        }
        for i in 0..n {
            for j in 0..n {
                if gram[i][j] != gram[j][i] {
                    return Err(LatticeError::NotSymmetric);
                }
                if !gram[i][j].is_integer() {
                    return Err(LatticeError::NonIntegral(i, j));
                }
            }
        }
        if !is_positive_definite(&gram) {
            return Err(LatticeError::NotPositiveDefinite);
        }
        Ok(LatticeData { gram })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<LatticeData, LatticeError> {
        LatticeData::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rat::from_integer(x.into())).collect())
                .collect(),
        )
    }

    /// Cartan matrix of type A_r.
    pub fn cartan_a(r: usize) -> Result<LatticeData, LatticeError> {
        let rows: Vec<Vec<i64>> = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| match i.abs_diff(j) {
                        0 => 2,
                        1 => -1,
                        _ => 0,
                    })
                    .collect()
            })
            .collect();
        LatticeData::from_rows(&rows)
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<Rat>] {
        &self.gram
    }

    pub fn check_weight(&self, w: &Weight) -> Result<(), LatticeError> {
        if w.0.len() == self.rank() {
            Ok(())
        } else {
            Err(LatticeError::WeightLength(w.to_string(), w.0.len(), self.rank()))
        }
    }

    /// `<mu, nu> = mu^T G nu`.
    pub fn pairing(&self, mu: &Weight, nu: &Weight) -> Rat {
        let mut acc = Rat::zero();
        for (i, &x) in mu.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in nu.0.iter().enumerate() {
                if y != 0 {
                    acc += &self.gram[i][j] * Rat::from_integer((x as i64 * y as i64).into());
                }
            }
        }
        acc
    }

    /// The linear form `<mu, a> = mu^T G a` in the variables `a1..ar`.
    pub fn pairing_with_a(&self, mu: &Weight) -> MPoly {
        let mut acc = MPoly::zero();
        for j in 0..self.rank() {
            let mut c = Rat::zero();
            for (i, &x) in mu.0.iter().enumerate() {
                c += &self.gram[i][j] * Rat::from_integer(x.into());
            }
            if !c.is_zero() {
                acc = acc.add(&MPoly::var(Var::a(j + 1)).scale(&c));
            }
        }
        acc
    }
}

impl LatticeData {
    /// The quadratic form `<a, a> = a^T G a` in the variables `a1..ar`.
    pub fn norm_of_a(&self) -> MPoly {
        let mut acc = MPoly::zero();
        for i in 0..self.rank() {
            for j in 0..self.rank() {
                if !self.gram[i][j].is_zero() {
                    let t = MPoly::var(Var::a(i + 1)).mul(&MPoly::var(Var::a(j + 1)));
                    acc = acc.add(&t.scale(&self.gram[i][j]));
                }
            }
        }
        acc
    }
}

/// An exponent `mu` of `e^<mu, x>`, in coordinates of the lattice basis.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Weight(pub Vec<i32>);

impl Weight {
    pub fn zero(rank: usize) -> Weight {
        Weight(vec![0; rank])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, o: &Weight) -> Weight {
        Weight(self.0.iter().zip(&o.0).map(|(x, y)| x + y).collect())
    }

    pub fn neg(&self) -> Weight {
        Weight(self.0.iter().map(|x| -x).collect())
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// A diagonal operator acting on `e^<mu, x>` by
/// `laplace * <mu, mu> + along_a * <mu, a> + shift`.
#[derive(Clone, Debug)]
pub struct DiagonalOperator {
    pub laplace: MPoly,
    pub along_a: MPoly,
    pub shift: MPoly,
}

impl DiagonalOperator {
    /// `D_n = hbar^2 Laplacian + 2 hbar <grad, a> - n kappa`.
    pub fn quantum(n: u32) -> DiagonalOperator {
        let hbar = MPoly::var(Var::HBAR);
        DiagonalOperator {
            laplace: hbar.mul(&hbar),
            along_a: hbar.scale(&Rat::from_integer(2.into())),
            shift: MPoly::var(Var::KAPPA).scale(&Rat::from_integer((-(n as i64)).into())),
        }
    }

    /// `D_n` with the time derivative scaled by `hbar`: shift `-n hbar kappa`.
    pub fn quantum_hbar_kappa(n: u32) -> DiagonalOperator {
        let mut d = DiagonalOperator::quantum(n);
        d.shift = d.shift.mul(&MPoly::var(Var::HBAR));
        d
    }

    /// `D / hbar = hbar Laplacian + 2 <grad, a>`, the linear part of the
    /// equation for `hbar log psi`.
    pub fn log_quantum() -> DiagonalOperator {
        DiagonalOperator {
            laplace: MPoly::var(Var::HBAR),
            along_a: MPoly::constant(Rat::from_integer(2.into())),
            shift: MPoly::zero(),
        }
    }

    /// `2 <grad, a>`, the linear part of the classical equation.
    pub fn classical() -> DiagonalOperator {
        DiagonalOperator {
            laplace: MPoly::zero(),
            along_a: MPoly::constant(Rat::from_integer(2.into())),
            shift: MPoly::zero(),
        }
    }

    pub fn eigenvalue(&self, lat: &LatticeData, mu: &Weight) -> MPoly {
        let norm = lat.pairing(mu, mu);
        let mut e = self.shift.clone();
        if !norm.is_zero() {
            e = e.add(&self.laplace.scale(&norm));
        }
        e.add(&self.along_a.mul(&lat.pairing_with_a(mu)))
    }
}

/// A finite sum `sum_mu c_mu e^<mu, x>` with rational-function coefficients.
#[derive(Clone, PartialEq)]
pub struct TrigPoly {
    lattice: Arc<LatticeData>,
    terms: BTreeMap<Weight, RatFn>,
}

impl fmt::Debug for TrigPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for TrigPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "[{c}]e^{w}")?;
        }
        Ok(())
    }
}

fn sum_all(parts: Vec<RatFn>) -> RatFn {
    parts.iter().fold(RatFn::zero(), |acc, x| acc.add(x))
}

impl TrigPoly {
    pub fn zero(lattice: &Arc<LatticeData>) -> TrigPoly {
        TrigPoly {
            lattice: lattice.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(lattice: &Arc<LatticeData>, c: RatFn) -> TrigPoly {
        TrigPoly::monomial(lattice, Weight::zero(lattice.rank()), c)
    }

    pub fn monomial(lattice: &Arc<LatticeData>, w: Weight, c: RatFn) -> TrigPoly {
        assert_eq!(w.0.len(), lattice.rank(), "weight length must match rank");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(w, c);
        }
        TrigPoly {
            lattice: lattice.clone(),
            terms,
        }
    }

    pub fn from_terms(
        lattice: &Arc<LatticeData>,
        terms: impl IntoIterator<Item = (Weight, RatFn)>,
    ) -> Result<TrigPoly, LatticeError> {
        let mut out = TrigPoly::zero(lattice);
        for (w, c) in terms {
            lattice.check_weight(&w)?;
            out.add_term(w, &c);
        }
        Ok(out)
    }

    fn add_term(&mut self, w: Weight, c: &RatFn) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(x) => {
                let s = x.add(c);
                if s.is_zero() {
                    self.terms.remove(&w);
                } else {
                    *x = s;
                }
            }
            None => {
                self.terms.insert(w, c.clone());
            }
        }
    }

    pub fn lattice(&self) -> &Arc<LatticeData> {
        &self.lattice
    }

    pub fn terms(&self) -> &BTreeMap<Weight, RatFn> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &Weight) -> RatFn {
        self.terms.get(w).cloned().unwrap_or_else(RatFn::zero)
    }

    /// The coefficient of the zero weight.
    pub fn constant_term(&self) -> RatFn {
        self.coeff(&Weight::zero(self.lattice.rank()))
    }

    /// Drops the zero-weight coefficient.
    pub fn without_constant_term(&self) -> TrigPoly {
        let mut out = self.clone();
        out.terms.remove(&Weight::zero(self.lattice.rank()));
        out
    }

    fn same_lattice(&self, o: &TrigPoly) -> Result<(), LatticeError> {
        if Arc::ptr_eq(&self.lattice, &o.lattice) || self.lattice == o.lattice {
            Ok(())
        } else {
            Err(LatticeError::LatticeMismatch)
        }
    }

    pub fn try_add(&self, o: &TrigPoly) -> Result<TrigPoly, LatticeError> {
        self.same_lattice(o)?;
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.add_term(w.clone(), c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> TrigPoly {
        self.map_coeffs(|c| c.neg())
    }

    pub fn scale(&self, r: &RatFn) -> TrigPoly {
        if r.is_zero() {
            return TrigPoly::zero(&self.lattice);
        }
        self.map_coeffs(|c| c.mul(r))
    }

    /// Applies `f` to every coefficient, dropping zeros.
    pub fn map_coeffs(&self, f: impl Fn(&RatFn) -> RatFn + Sync) -> TrigPoly {
        let terms = self
            .terms
            .par_iter()
            .map(|(w, c)| (w.clone(), f(c)))
            .filter(|(_, c)| !c.is_zero())
            .collect::<Vec<_>>();
        TrigPoly {
            lattice: self.lattice.clone(),
            terms: terms.into_iter().collect(),
        }
    }

    pub fn try_map_coeffs<E: Send>(
        &self,
        f: impl Fn(&Weight, &RatFn) -> Result<RatFn, E> + Sync,
    ) -> Result<TrigPoly, E> {
        let terms = self
            .terms
            .par_iter()
            .map(|(w, c)| f(w, c).map(|x| (w.clone(), x)))
            .collect::<Result<Vec<_>, E>>()?;
        Ok(TrigPoly {
            lattice: self.lattice.clone(),
            terms: terms.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    /// Convolution of `self` and `o` with the pairwise products weighted by
    /// `factor(mu, nu)`; the sums for distinct output weights run in parallel.
    fn convolve(&self, o: &TrigPoly, factor: impl Fn(&Weight, &Weight) -> Rat + Sync) -> TrigPoly {
        let mut buckets: BTreeMap<Weight, Vec<(Rat, &RatFn, &RatFn)>> = BTreeMap::new();
        for (mu, x) in &self.terms {
            for (nu, y) in &o.terms {
                let k = factor(mu, nu);
                if !k.is_zero() {
                    buckets.entry(mu.add(nu)).or_default().push((k, x, y));
                }
            }
        }
        let terms: Vec<(Weight, RatFn)> = buckets
            .into_par_iter()
            .map(|(w, prods)| {
                let parts = prods
                    .into_iter()
                    .map(|(k, x, y)| {
                        let p = x.mul(y);
                        if k.is_one() {
                            p
                        } else {
                            p.scale_rat(&k)
                        }
                    })
                    .collect();
                (w, sum_all(parts))
            })
            .filter(|(_, c)| !c.is_zero())
            .collect();
        TrigPoly {
            lattice: self.lattice.clone(),
            terms: terms.into_iter().collect(),
        }
    }

    /// Product of trigonometric polynomials.
    pub fn trig_mul(&self, o: &TrigPoly) -> Result<TrigPoly, LatticeError> {
        self.same_lattice(o)?;
        Ok(self.convolve(o, |_, _| Rat::one()))
    }

    /// `<grad f, grad g>`.
    pub fn gradient_pairing(&self, o: &TrigPoly) -> Result<TrigPoly, LatticeError> {
        self.same_lattice(o)?;
        let lat = self.lattice.clone();
        Ok(self.convolve(o, move |mu, nu| lat.pairing(mu, nu)))
    }

    /// The Laplacian: `e^<mu,x>` scaled by `<mu, mu>`.
    pub fn laplacian(&self) -> TrigPoly {
        let lat = &self.lattice;
        let terms = self
            .terms
            .iter()
            .map(|(w, c)| (w.clone(), c.scale_rat(&lat.pairing(w, w))))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        TrigPoly {
            lattice: lat.clone(),
            terms,
        }
    }

    /// Derivative along a lattice direction `lambda`: `e^<mu,x>` scaled by `<mu, lambda>`.
    pub fn directional_derivative(&self, lambda: &Weight) -> TrigPoly {
        let lat = &self.lattice;
        let terms = self
            .terms
            .iter()
            .map(|(w, c)| (w.clone(), c.scale_rat(&lat.pairing(w, lambda))))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        TrigPoly {
            lattice: lat.clone(),
            terms,
        }
    }

    /// `<grad f, a>`: `e^<mu,x>` scaled by the linear form `<mu, a>`.
    pub fn derivative_along_a(&self) -> TrigPoly {
        let lat = self.lattice.clone();
        self.try_map_coeffs::<()>(|w, c| Ok(c.mul(&RatFn::from_mpoly(&lat.pairing_with_a(w)))))
            .expect("infallible")
    }

    /// Applies a diagonal operator.
    pub fn apply_diagonal(&self, op: &DiagonalOperator) -> TrigPoly {
        let lat = self.lattice.clone();
        self.try_map_coeffs::<()>(|w, c| Ok(c.mul(&RatFn::from_mpoly(&op.eigenvalue(&lat, w)))))
            .expect("infallible")
    }

    /// The unique preimage under a diagonal operator that has no component
    /// along its kernel.
    pub fn invert_diagonal(&self, op: &DiagonalOperator) -> Result<TrigPoly, LatticeError> {
        let lat = self.lattice.clone();
        self.try_map_coeffs(|w, c| {
            let e = op.eigenvalue(&lat, w);
            if e.is_zero() {
                return Err(LatticeError::NotInImage {
                    weight: w.to_string(),
                    coeff: c.to_string(),
                });
            }
            Ok(c.div(&RatFn::from_mpoly(&e))?)
        })
    }

    /// `D_n = hbar^2 Laplacian + 2 hbar <grad, a> - n kappa`.
    pub fn apply_d(&self, n: u32) -> TrigPoly {
        self.apply_diagonal(&DiagonalOperator::quantum(n))
    }

    /// Inverse of `D_n`; for `n = 0` the input must have zero constant term
    /// and the preimage is normalized to zero constant term.
    pub fn invert_d(&self, n: u32) -> Result<TrigPoly, LatticeError> {
        self.invert_diagonal(&DiagonalOperator::quantum(n))
    }

    /// Specializes a variable in every coefficient.
    pub fn substitute(&self, v: Var, value: &MPoly) -> Result<TrigPoly, ArithError> {
        self.try_map_coeffs(|_, c| c.substitute(v, value))
    }

    /// True if no coefficient involves `v`.
    pub fn is_free_of(&self, v: Var) -> bool {
        self.terms.values().all(|c| !c.contains(v))
    }
}

impl SeriesCoeff for TrigPoly {
    fn zero_like(&self) -> Self {
        TrigPoly::zero(&self.lattice)
    }
    fn one_like(&self) -> Self {
        TrigPoly::constant(&self.lattice, RatFn::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.constant_term().is_one()
    }
    fn add(&self, o: &Self) -> Self {
        self.try_add(o).expect("series coefficients share a lattice")
    }
    fn sub(&self, o: &Self) -> Self {
        self.try_add(&o.neg()).expect("series coefficients share a lattice")
    }
    fn mul(&self, o: &Self) -> Self {
        self.trig_mul(o).expect("series coefficients share a lattice")
    }
    fn scale(&self, r: &Rat) -> Self {
        if r.is_zero() {
            return TrigPoly::zero(&self.lattice);
        }
        self.map_coeffs(|c| c.scale_rat(r))
    }
}
