//! Sparse multivariate polynomials over the integers and the rationals.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rustc_hash::FxHashMap;

use super::var::{Mono, Var};
use super::Rat;

/// Coefficient ring of a [`Poly`].
pub trait Ring: Clone + PartialEq + Eq + fmt::Debug + Send + Sync {
    fn rzero() -> Self;
    fn rone() -> Self;
    fn is_rzero(&self) -> bool;
    fn radd(&self, o: &Self) -> Self;
    fn rsub(&self, o: &Self) -> Self;
    fn rmul(&self, o: &Self) -> Self;
    fn rneg(&self) -> Self;
    fn radd_assign(&mut self, o: &Self);
    /// Exact quotient when it exists in the ring.
    fn rdiv_exact(&self, o: &Self) -> Option<Self>;
    fn is_rnegative(&self) -> bool;
}

impl Ring for BigInt {
    fn rzero() -> Self {
        Zero::zero()
    }
    fn rone() -> Self {
        One::one()
    }
    fn is_rzero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn radd(&self, o: &Self) -> Self {
        self + o
    }
    fn rsub(&self, o: &Self) -> Self {
        self - o
    }
    fn rmul(&self, o: &Self) -> Self {
        self * o
    }
    fn rneg(&self) -> Self {
        -self
    }
    fn radd_assign(&mut self, o: &Self) {
        *self += o;
    }
    fn rdiv_exact(&self, o: &Self) -> Option<Self> {
        if Zero::is_zero(o) {
            return None;
        }
        let (q, r) = self.div_rem(o);
        Zero::is_zero(&r).then_some(q)
    }
    fn is_rnegative(&self) -> bool {
        Signed::is_negative(self)
    }
}

impl Ring for BigRational {
    fn rzero() -> Self {
        Zero::zero()
    }
    fn rone() -> Self {
        One::one()
    }
    fn is_rzero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn radd(&self, o: &Self) -> Self {
        self + o
    }
    fn rsub(&self, o: &Self) -> Self {
        self - o
    }
    fn rmul(&self, o: &Self) -> Self {
        self * o
    }
    fn rneg(&self) -> Self {
        -self
    }
    fn radd_assign(&mut self, o: &Self) {
        *self += o;
    }
    fn rdiv_exact(&self, o: &Self) -> Option<Self> {
        (!Zero::is_zero(o)).then(|| self / o)
    }
    fn is_rnegative(&self) -> bool {
        Signed::is_negative(self)
    }
}

/// Sparse polynomial; terms sorted by descending monomial, no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<C> {
    terms: Vec<(Mono, C)>,
}

/// Integer polynomial, used for gcd computations and canonical forms.
pub type ZPoly = Poly<BigInt>;
/// Rational polynomial.
pub type MPoly = Poly<Rat>;

impl<C: Ring> Poly<C> {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(C::rone())
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(Mono::ONE, c)
    }

    pub fn monomial(m: Mono, c: C) -> Self {
        if c.is_rzero() {
            Self::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    pub fn var(v: Var) -> Self {
        Self::monomial(Mono::var(v, 1), C::rone())
    }

    /// Builds a polynomial from arbitrary (possibly repeated, unsorted) terms.
    pub fn from_terms<I: IntoIterator<Item = (Mono, C)>>(it: I) -> Self {
        let mut map: BTreeMap<Mono, C> = BTreeMap::new();
        for (m, c) in it {
            match map.get_mut(&m) {
                Some(e) => e.radd_assign(&c),
                None => {
                    map.insert(m, c);
                }
            }
        }
        let mut terms: Vec<_> = map.into_iter().filter(|(_, c)| !c.is_rzero()).collect();
        terms.reverse();
        Poly { terms }
    }

    fn from_sorted_unchecked(terms: Vec<(Mono, C)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        debug_assert!(terms.iter().all(|(_, c)| !c.is_rzero()));
        Poly { terms }
    }

    pub fn terms(&self) -> &[(Mono, C)] {
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

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1 == C::rone()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// The coefficient of the monomial 1.
    pub fn constant_coeff(&self) -> C {
        match self.terms.last() {
            Some((m, c)) if m.is_one() => c.clone(),
            _ => C::rzero(),
        }
    }

    pub fn coeff(&self, m: &Mono) -> C {
        self.terms
            .binary_search_by(|(t, _)| m.cmp(t))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_else(|_| C::rzero())
    }

    pub fn leading(&self) -> Option<&(Mono, C)> {
        self.terms.first()
    }

    pub fn lc(&self) -> C {
        self.terms.first().map(|t| t.1.clone()).unwrap_or_else(C::rzero)
    }

    pub fn degree(&self, v: Var) -> u16 {
        self.terms.iter().map(|(m, _)| m.exp(v)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.first().map(|(m, _)| m.degree()).unwrap_or(0)
    }

    /// Lowest power of `v` dividing every term.
    pub fn valuation(&self, v: Var) -> u16 {
        self.terms.iter().map(|(m, _)| m.exp(v)).min().unwrap_or(0)
    }

    pub fn contains(&self, v: Var) -> bool {
        self.terms.iter().any(|(m, _)| m.exp(v) > 0)
    }

    /// Variables occurring in the polynomial, ascending.
    pub fn vars(&self) -> Vec<Var> {
        Var::all().filter(|&v| self.contains(v)).collect()
    }

    /// Gcd of all monomials (componentwise minimum exponent).
    pub fn monomial_content(&self) -> Mono {
        let mut it = self.terms.iter();
        match it.next() {
            None => Mono::ONE,
            Some((m, _)) => it.fold(*m, |acc, (t, _)| acc.gcd(t)),
        }
    }

    pub fn neg(&self) -> Self {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, c.rneg())).collect(),
        }
    }

    pub fn scale(&self, s: &C) -> Self {
        if s.is_rzero() {
            return Self::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, c.rmul(s))).collect(),
        }
    }

    pub fn mul_mono(&self, mono: &Mono, s: &C) -> Self {
        if s.is_rzero() {
            return Self::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.mul(mono), c.rmul(s))).collect(),
        }
    }

    fn merge(&self, o: &Self, negate: bool) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + o.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &o.terms);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    let c = if negate { b[j].1.rneg() } else { b[j].1.clone() };
                    out.push((b[j].0, c));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate {
                        a[i].1.rsub(&b[j].1)
                    } else {
                        a[i].1.radd(&b[j].1)
                    };
                    if !c.is_rzero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for t in &b[j..] {
            let c = if negate { t.1.rneg() } else { t.1.clone() };
            out.push((t.0, c));
        }
        Self::from_sorted_unchecked(out)
    }

    pub fn add(&self, o: &Self) -> Self {
        self.merge(o, false)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.merge(o, true)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if o.terms.len() == 1 {
            return self.mul_mono(&o.terms[0].0, &o.terms[0].1);
        }
        if self.terms.len() == 1 {
            return o.mul_mono(&self.terms[0].0, &self.terms[0].1);
        }
        let mut acc: FxHashMap<Mono, C> = FxHashMap::default();
        acc.reserve(self.terms.len() * o.terms.len());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let m = m1.mul(m2);
                let c = c1.rmul(c2);
                match acc.get_mut(&m) {
                    Some(e) => e.radd_assign(&c),
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_rzero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Self::from_sorted_unchecked(terms)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        if d.terms.len() == 1 {
            let (dm, dc) = &d.terms[0];
            let mut out = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                out.push((dm.div_into(m)?, c.rdiv_exact(dc)?));
            }
            return Some(Self::from_sorted_unchecked(out));
        }
        let (dlm, dlc) = d.terms[0].clone();
        if !dlm.divides(&self.terms[0].0) {
            return None;
        }
        // quick rejection on the trailing terms
        let (slm, _) = self.terms.last().unwrap();
        let (dtm, _) = d.terms.last().unwrap();
        if !dtm.divides(slm) {
            return None;
        }
        let mut rem: BTreeMap<Mono, C> = self.terms.iter().cloned().collect();
        let mut quot = Vec::new();
        while let Some((&lm, lc)) = rem.iter().next_back() {
            let qm = dlm.div_into(&lm)?;
            let qc = lc.rdiv_exact(&dlc)?;
            for (m, c) in &d.terms {
                let key = m.mul(&qm);
                let delta = c.rmul(&qc);
                match rem.get_mut(&key) {
                    Some(e) => {
                        *e = e.rsub(&delta);
                        if e.is_rzero() {
                            rem.remove(&key);
                        }
                    }
                    None => {
                        rem.insert(key, delta.rneg());
                    }
                }
            }
            quot.push((qm, qc));
        }
        Some(Self::from_sorted_unchecked(quot))
    }

    /// Partial derivative; integer exponents become coefficients.
    pub fn derivative(&self, v: Var, from_int: impl Fn(u16) -> C) -> Self {
        Self::from_terms(self.terms.iter().filter_map(|(m, c)| {
            let e = m.exp(v);
            (e > 0).then(|| (m.with_exp(v, e - 1), c.rmul(&from_int(e))))
        }))
    }

    /// Writes the polynomial as `sum_k coeffs[k] * v^k`.
    pub fn to_univariate(&self, v: Var) -> Vec<Self> {
        let deg = self.degree(v) as usize;
        let mut parts: Vec<Vec<(Mono, C)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            let e = m.exp(v) as usize;
            parts[e].push((m.with_exp(v, 0), c.clone()));
        }
        // stripping a variable can reorder terms under grlex
        parts
            .into_iter()
            .map(|mut t| {
                t.sort_unstable_by(|a, b| b.0.cmp(&a.0));
                Self::from_sorted_unchecked(t)
            })
            .collect()
    }

    pub fn from_univariate(v: Var, coeffs: &[Self]) -> Self {
        Self::from_terms(coeffs.iter().enumerate().flat_map(|(k, p)| {
            let vm = Mono::var(v, k as u16);
            p.terms.iter().map(move |(m, c)| (m.mul(&vm), c.clone()))
        }))
    }

    /// Substitutes a polynomial for a variable.
    pub fn substitute(&self, v: Var, value: &Self) -> Self {
        if !self.contains(v) {
            return self.clone();
        }
        let parts = self.to_univariate(v);
        // Horner
        let mut acc = Self::zero();
        for p in parts.iter().rev() {
            acc = acc.mul(value).add(p);
        }
        acc
    }

    pub fn map_coeffs<D: Ring>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        Poly::from_sorted_unchecked(
            self.terms
                .iter()
                .filter_map(|(m, c)| {
                    let d = f(c);
                    (!d.is_rzero()).then_some((*m, d))
                })
                .collect(),
        )
    }
}

impl ZPoly {
    /// Gcd of the integer coefficients, carrying the sign of the leading coefficient.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        if self.lc().is_negative() {
            -g
        } else {
            g
        }
    }

    /// Splits into signed content and primitive part with positive leading coefficient.
    pub fn primitive(&self) -> (BigInt, ZPoly) {
        if self.is_zero() {
            return (BigInt::zero(), ZPoly::zero());
        }
        let c = self.content();
        if c.is_one() {
            return (c, self.clone());
        }
        let p = self.map_coeffs(|x| x / &c);
        (c, p)
    }

    pub fn max_norm(&self) -> BigInt {
        self.terms
            .iter()
            .map(|(_, c)| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// Evaluates `v` at an integer.
    pub fn eval_int(&self, v: Var, x: &BigInt) -> ZPoly {
        let deg = self.degree(v) as usize;
        let mut pows = Vec::with_capacity(deg + 1);
        pows.push(BigInt::one());
        for k in 1..=deg {
            let p = &pows[k - 1] * x;
            pows.push(p);
        }
        ZPoly::from_terms(
            self.terms
                .iter()
                .map(|(m, c)| (m.with_exp(v, 0), c * &pows[m.exp(v) as usize])),
        )
    }

    pub fn to_rational(&self) -> MPoly {
        self.map_coeffs(|c| BigRational::from_integer(c.clone()))
    }

    pub fn derivative_int(&self, v: Var) -> ZPoly {
        self.derivative(v, BigInt::from)
    }
}

impl MPoly {
    /// Writes `self = k * p` with `p` an integer primitive polynomial with
    /// positive leading coefficient and `k` rational (zero for the zero polynomial).
    pub fn integer_primitive(&self) -> (Rat, ZPoly) {
        if self.is_zero() {
            return (Rat::zero(), ZPoly::zero());
        }
        let mut den = BigInt::one();
        for (_, c) in &self.terms {
            den = den.lcm(c.denom());
        }
        let z = self.map_coeffs(|c| (c * BigRational::from_integer(den.clone())).to_integer());
        let (cont, prim) = z.primitive();
        (BigRational::new(cont, den), prim)
    }

    pub fn derivative_rat(&self, v: Var) -> MPoly {
        self.derivative(v, |e| BigRational::from_integer(BigInt::from(e)))
    }
}

impl<C: Ring + fmt::Display> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_rnegative();
            let abs = if neg { c.rneg() } else { c.clone() };
            if neg {
                f.write_str("-")?;
            } else if i > 0 {
                f.write_str("+")?;
            }
            let unit = abs == C::rone();
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if unit {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

impl<C: Ring + fmt::Display> fmt::Debug for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn a() -> ZPoly {
        ZPoly::var(Var::a(1))
    }

    fn h() -> ZPoly {
        ZPoly::var(Var::HBAR)
    }

    #[test]
    fn multiply_and_divide() {
        let p = a().sub(&h());
        let q = a().add(&h());
        let prod = p.mul(&q);
        assert_eq!(prod, a().mul(&a()).sub(&h().mul(&h())));
        assert_eq!(prod.div_exact(&q), Some(p.clone()));
        assert_eq!(prod.div_exact(&p), Some(q));
        assert_eq!(prod.div_exact(&a()), None);
        assert_eq!(p.div_exact(&ZPoly::constant(z(2))), None);
    }

    #[test]
    fn univariate_round_trip() {
        let k = ZPoly::var(Var::KAPPA);
        let p = a().mul(&k).add(&h().mul(&h())).add(&k.pow(3));
        let parts = p.to_univariate(Var::KAPPA);
        assert_eq!(parts.len(), 4);
        assert_eq!(ZPoly::from_univariate(Var::KAPPA, &parts), p);
    }

    #[test]
    fn substitute_and_eval() {
        let p = a().pow(2).sub(&h().pow(2));
        assert_eq!(p.substitute(Var::HBAR, &ZPoly::zero()), a().pow(2));
        assert_eq!(p.eval_int(Var::a(1), &z(3)), ZPoly::constant(z(9)).sub(&h().pow(2)));
    }

    #[test]
    fn display_is_ordered() {
        let p = ZPoly::constant(z(4)).mul(&a().pow(2)).sub(&h().pow(2));
        assert_eq!(p.to_string(), "-hbar^2+4*a1^2");
    }
}
