//! Reduced rational functions over the rationals.
//!
//! A [`RatFn`] is stored as `scale * num / prod(atom^mult)` where `num` is an
//! integer primitive polynomial with positive leading coefficient and the
//! denominator is kept as a list of pairwise coprime atoms. Most atoms met in
//! practice (eigenvalues of diagonal operators, Nekrasov weights) are linear
//! in some variable and therefore irreducible, so cancellation against them
//! is a trial division. Atoms of unknown factorization are refined with full
//! gcds. The expanded denominator is primitive with positive leading
//! coefficient, which makes the reduced form unique.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::gcd::gcd;
use super::poly::{MPoly, ZPoly};
use super::var::{Mono, Var};
use super::{ArithError, Rat};

#[derive(Clone, PartialEq, Eq)]
struct Atom {
    poly: ZPoly,
    irreducible: bool,
}

impl Atom {
    /// `p` primitive, positive leading coefficient, no monomial content
    /// unless it is a single variable.
    fn new(poly: ZPoly) -> Atom {
        let irreducible = is_irreducible(&poly);
        Atom { poly, irreducible }
    }
}

fn is_irreducible(p: &ZPoly) -> bool {
    if p.total_degree() <= 1 {
        return true;
    }
    // linear in some variable with a constant coefficient and primitive
    p.vars().into_iter().any(|v| {
        p.degree(v) == 1 && {
            let parts = p.to_univariate(v);
            parts[1].is_constant() || gcd(&parts[0], &parts[1]).is_constant()
        }
    })
}

fn cmp_poly(a: &ZPoly, b: &ZPoly) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        for ((ma, ca), (mb, cb)) in a.terms().iter().zip(b.terms()) {
            let o = ma.cmp(mb).then_with(|| ca.cmp(cb));
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    })
}

type Factors = Vec<(Atom, u32)>;

fn sort_factors(f: &mut Factors) {
    f.sort_by(|a, b| cmp_poly(&a.0.poly, &b.0.poly));
}

/// Splits a nonzero polynomial into integer content and atoms.
fn atomize(p: &ZPoly) -> (BigInt, Factors) {
    let (c, prim) = p.primitive();
    let mono = prim.monomial_content();
    let mut out = Vec::new();
    for (v, e) in mono.vars() {
        out.push((Atom::new(ZPoly::var(v)), e as u32));
    }
    let rest = if mono.is_one() {
        prim
    } else {
        prim.div_exact(&ZPoly::monomial(mono, BigInt::one()))
            .expect("monomial content divides")
    };
    if !rest.is_constant() {
        out.push((Atom::new(rest), 1));
    }
    (c, out)
}

/// Merges factor lists into a pairwise coprime list.
fn refine(mut f: Factors) -> Factors {
    sort_factors(&mut f);
    let mut merged: Factors = Vec::with_capacity(f.len());
    for (a, e) in f {
        match merged.last_mut() {
            Some((b, eb)) if b.poly == a.poly => *eb += e,
            _ => merged.push((a, e)),
        }
    }
    if merged.iter().all(|(a, _)| a.irreducible) {
        return merged;
    }
    'outer: loop {
        for i in 0..merged.len() {
            for j in (i + 1)..merged.len() {
                let (ai, aj) = (&merged[i].0, &merged[j].0);
                if ai.irreducible && aj.irreducible {
                    continue;
                }
                let g = gcd(&ai.poly, &aj.poly);
                if g.is_constant() {
                    continue;
                }
                let (ei, ej) = (merged[i].1, merged[j].1);
                let qi = ai.poly.div_exact(&g).expect("gcd divides");
                let qj = aj.poly.div_exact(&g).expect("gcd divides");
                let mut next: Factors = merged
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != i && k != j)
                    .map(|(_, x)| x.clone())
                    .collect();
                for (poly, e) in [(g, ei + ej), (qi, ei), (qj, ej)] {
                    if !poly.is_constant() {
                        next.extend(atomize(&poly).1.into_iter().map(|(a, m)| (a, m * e)));
                    }
                }
                sort_factors(&mut next);
                merged = Vec::with_capacity(next.len());
                for (a, e) in next {
                    match merged.last_mut() {
                        Some((b, eb)) if b.poly == a.poly => *eb += e,
                        _ => merged.push((a, e)),
                    }
                }
                continue 'outer;
            }
        }
        return merged;
    }
}

fn expand(f: &Factors) -> ZPoly {
    let mut acc = ZPoly::one();
    for (a, e) in f {
        acc = acc.mul(&a.poly.pow(*e));
    }
    acc
}

/// Cancels the common part of `num` and the factors; `num` primitive.
fn cancel(mut num: ZPoly, mut den: Factors) -> (ZPoly, Factors) {
    'restart: loop {
        for i in 0..den.len() {
            while den[i].1 > 0 {
                match num.div_exact(&den[i].0.poly) {
                    Some(q) => {
                        num = q;
                        den[i].1 -= 1;
                    }
                    None => break,
                }
            }
            if den[i].1 > 0 && !den[i].0.irreducible {
                let g = gcd(&num, &den[i].0.poly);
                if !g.is_constant() {
                    let (a, e) = den.remove(i);
                    let rest = a.poly.div_exact(&g).expect("gcd divides");
                    let mut f = den;
                    f.extend(atomize(&g).1.into_iter().map(|(x, m)| (x, m * e)));
                    if !rest.is_constant() {
                        f.extend(atomize(&rest).1.into_iter().map(|(x, m)| (x, m * e)));
                    }
                    den = refine(f);
                    continue 'restart;
                }
            }
        }
        den.retain(|(_, e)| *e > 0);
        return (num, den);
    }
}

/// Rewrites two factor lists over a common coprime basis.
fn align(x: &Factors, y: &Factors) -> (Vec<ZPoly>, Vec<u32>, Vec<u32>) {
    let all_irreducible = x.iter().chain(y).all(|(a, _)| a.irreducible);
    let basis: Vec<Atom> = if all_irreducible {
        let mut b: Vec<Atom> = x.iter().chain(y).map(|(a, _)| a.clone()).collect();
        b.sort_by(|p, q| cmp_poly(&p.poly, &q.poly));
        b.dedup_by(|p, q| p.poly == q.poly);
        b
    } else {
        refine(x.iter().chain(y).map(|(a, _)| (a.clone(), 1)).collect())
            .into_iter()
            .map(|(a, _)| a)
            .collect()
    };
    let mult = |f: &Factors, b: &Atom| -> u32 {
        f.iter()
            .map(|(a, e)| {
                if a.poly == b.poly {
                    *e
                } else if all_irreducible {
                    0
                } else {
                    let mut p = a.poly.clone();
                    let mut k = 0;
                    while let Some(q) = p.div_exact(&b.poly) {
                        p = q;
                        k += 1;
                    }
                    k * e
                }
            })
            .sum()
    };
    let ex = basis.iter().map(|b| mult(x, b)).collect();
    let ey = basis.iter().map(|b| mult(y, b)).collect();
    (basis.into_iter().map(|a| a.poly).collect(), ex, ey)
}

fn factors_from(basis: &[ZPoly], exps: impl Iterator<Item = u32>) -> Factors {
    basis
        .iter()
        .zip(exps)
        .filter(|(_, e)| *e > 0)
        .map(|(p, e)| (Atom::new(p.clone()), e))
        .collect()
}

/// Exact, reduced rational function.
#[derive(Clone)]
pub struct RatFn {
    scale: Rat,
    num: ZPoly,
    den: Factors,
}

impl PartialEq for RatFn {
    fn eq(&self, o: &Self) -> bool {
        if self.scale != o.scale || self.num != o.num {
            return false;
        }
        if self.den.len() == o.den.len()
            && self.den.iter().zip(&o.den).all(|(a, b)| a.1 == b.1 && a.0.poly == b.0.poly)
        {
            return true;
        }
        expand(&self.den) == expand(&o.den)
    }
}

impl Eq for RatFn {}

impl RatFn {
    pub fn zero() -> RatFn {
        RatFn {
            scale: Rat::zero(),
            num: ZPoly::one(),
            den: Vec::new(),
        }
    }

    pub fn one() -> RatFn {
        RatFn::from_rat(Rat::one())
    }

    pub fn from_rat(r: Rat) -> RatFn {
        if r.is_zero() {
            return RatFn::zero();
        }
        RatFn {
            scale: r,
            num: ZPoly::one(),
            den: Vec::new(),
        }
    }

    pub fn from_int(n: i64) -> RatFn {
        RatFn::from_rat(Rat::from_integer(BigInt::from(n)))
    }

    pub fn var(v: Var) -> RatFn {
        RatFn::from_zpoly(&ZPoly::var(v))
    }

    pub fn from_zpoly(p: &ZPoly) -> RatFn {
        if p.is_zero() {
            return RatFn::zero();
        }
        let (c, prim) = p.primitive();
        RatFn {
            scale: Rat::from_integer(c),
            num: prim,
            den: Vec::new(),
        }
    }

    pub fn from_mpoly(p: &MPoly) -> RatFn {
        if p.is_zero() {
            return RatFn::zero();
        }
        let (k, prim) = p.integer_primitive();
        RatFn {
            scale: k,
            num: prim,
            den: Vec::new(),
        }
    }

    /// `num / den`, reduced.
    pub fn from_polys(num: &MPoly, den: &MPoly) -> Result<RatFn, ArithError> {
        if den.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        RatFn::from_mpoly(num).div(&RatFn::from_mpoly(den))
    }

    fn build(scale: Rat, num: ZPoly, den: Factors) -> RatFn {
        if scale.is_zero() || num.is_zero() {
            return RatFn::zero();
        }
        RatFn { scale, num, den }
    }

    pub fn is_zero(&self) -> bool {
        self.scale.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.scale.is_one() && self.num.is_one() && self.den.is_empty()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.den.is_empty() && self.num.is_constant()
    }

    /// The value if the function is a rational constant.
    pub fn as_rat(&self) -> Option<Rat> {
        self.is_constant().then(|| self.scale.clone())
    }

    /// Numerator with rational coefficients (`scale * num`).
    pub fn num(&self) -> MPoly {
        if self.is_zero() {
            return MPoly::zero();
        }
        self.num.to_rational().scale(&self.scale)
    }

    /// Expanded denominator: integer primitive, positive leading coefficient.
    pub fn den(&self) -> MPoly {
        expand(&self.den).to_rational()
    }

    pub fn den_factors(&self) -> Vec<(MPoly, u32)> {
        self.den
            .iter()
            .map(|(a, e)| (a.poly.to_rational(), *e))
            .collect()
    }

    pub fn contains(&self, v: Var) -> bool {
        !self.is_zero() && (self.num.contains(v) || self.den.iter().any(|(a, _)| a.poly.contains(v)))
    }

    pub fn neg(&self) -> RatFn {
        RatFn {
            scale: -&self.scale,
            num: self.num.clone(),
            den: self.den.clone(),
        }
    }

    pub fn scale_rat(&self, r: &Rat) -> RatFn {
        if r.is_zero() || self.is_zero() {
            return RatFn::zero();
        }
        RatFn {
            scale: &self.scale * r,
            num: self.num.clone(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, o: &RatFn) -> RatFn {
        if self.is_zero() || o.is_zero() {
            return RatFn::zero();
        }
        let scale = &self.scale * &o.scale;
        if self.is_constant() {
            return RatFn::build(scale, o.num.clone(), o.den.clone());
        }
        if o.is_constant() {
            return RatFn::build(scale, self.num.clone(), self.den.clone());
        }
        let (n1, d2) = cancel(self.num.clone(), o.den.clone());
        let (n2, d1) = cancel(o.num.clone(), self.den.clone());
        let mut den = d1;
        den.extend(d2);
        let den = refine(den);
        RatFn::build(scale, n1.mul(&n2), den)
    }

    pub fn inv(&self) -> Result<RatFn, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        let (c, den) = atomize(&self.num);
        debug_assert!(c.is_one());
        Ok(RatFn {
            scale: self.scale.recip(),
            num: expand(&self.den),
            den,
        })
    }

    pub fn div(&self, o: &RatFn) -> Result<RatFn, ArithError> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn add(&self, o: &RatFn) -> RatFn {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let (basis, ex, ey) = align(&self.den, &o.den);
        // Henrici: only the common part of the denominators can cancel
        let common: Vec<u32> = ex.iter().zip(&ey).map(|(a, b)| *a.min(b)).collect();
        let rest_x = factors_from(&basis, ex.iter().zip(&common).map(|(a, c)| a - c));
        let rest_y = factors_from(&basis, ey.iter().zip(&common).map(|(a, c)| a - c));
        let (p1, q1) = (self.scale.numer(), self.scale.denom());
        let (p2, q2) = (o.scale.numer(), o.scale.denom());
        let l = q1.lcm(q2);
        let k1 = p1 * (&l / q1);
        let k2 = p2 * (&l / q2);
        let t1 = self.num.mul(&expand(&rest_y)).scale(&k1);
        let t2 = o.num.mul(&expand(&rest_x)).scale(&k2);
        let t = t1.add(&t2);
        if t.is_zero() {
            return RatFn::zero();
        }
        let (c, t) = t.primitive();
        let scale = Rat::new(c, l);
        let g = factors_from(&basis, common.iter().copied());
        let (t, g) = cancel(t, g);
        let mut den = rest_x;
        den.extend(rest_y);
        den.extend(g);
        let den = refine(den);
        RatFn::build(scale, t, den)
    }

    pub fn sub(&self, o: &RatFn) -> RatFn {
        self.add(&o.neg())
    }

    pub fn pow(&self, e: u32) -> RatFn {
        if e == 0 {
            return RatFn::one();
        }
        if self.is_zero() {
            return RatFn::zero();
        }
        RatFn {
            scale: num_traits::pow(self.scale.clone(), e as usize),
            num: self.num.pow(e),
            den: self.den.iter().map(|(a, m)| (a.clone(), m * e)).collect(),
        }
    }

    /// Specializes `v := value`.
    pub fn substitute(&self, v: Var, value: &MPoly) -> Result<RatFn, ArithError> {
        if !self.contains(v) {
            return Ok(self.clone());
        }
        let mut scale = self.scale.clone();
        let mut den: Factors = Vec::new();
        for (a, e) in &self.den {
            if !a.poly.contains(v) {
                den.push((a.clone(), *e));
                continue;
            }
            let s = a.poly.to_rational().substitute(v, value);
            if s.is_zero() {
                return Err(ArithError::PoleAtSpecialization {
                    var: v.name().to_string(),
                    value: value.to_string(),
                    factor: a.poly.to_string(),
                    multiplicity: *e,
                });
            }
            let (k, prim) = s.integer_primitive();
            scale /= num_traits::pow(k, *e as usize);
            if !prim.is_constant() {
                let (_, f) = atomize(&prim);
                den.extend(f.into_iter().map(|(x, m)| (x, m * e)));
            }
        }
        let n = self.num.to_rational().substitute(v, value);
        if n.is_zero() {
            return Ok(RatFn::zero());
        }
        let (k, n) = n.integer_primitive();
        scale *= k;
        let den = refine(den);
        let (n, den) = cancel(n, den);
        Ok(RatFn::build(scale, n, den))
    }

    /// Specializes `v := value` for a rational constant.
    pub fn substitute_rat(&self, v: Var, value: &Rat) -> Result<RatFn, ArithError> {
        self.substitute(v, &MPoly::constant(value.clone()))
    }

    pub fn derivative(&self, v: Var) -> RatFn {
        if !self.contains(v) {
            return RatFn::zero();
        }
        let inv_den = RatFn {
            scale: Rat::one(),
            num: ZPoly::one(),
            den: self.den.clone(),
        };
        let numer = RatFn::from_zpoly(&self.num);
        let mut acc = RatFn::from_zpoly(&self.num.derivative_int(v)).mul(&inv_den);
        for (a, e) in &self.den {
            let da = a.poly.derivative_int(v);
            if da.is_zero() {
                continue;
            }
            let term = RatFn::from_zpoly(&da.scale(&BigInt::from(*e)))
                .mul(&RatFn::from_zpoly(&a.poly).inv().expect("atom is nonzero"));
            acc = acc.sub(&numer.mul(&inv_den).mul(&term));
        }
        acc.scale_rat(&self.scale)
    }

    /// Multiplicity of `v` as a factor of the denominator (pole order at v = 0).
    pub fn pole_order(&self, v: Var) -> u32 {
        let target = ZPoly::var(v);
        self.den
            .iter()
            .find(|(a, _)| a.poly == target)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    /// Splits off `v^k` from the denominator: returns `self * v^k`.
    pub fn mul_var_pow(&self, v: Var, k: u32) -> RatFn {
        self.mul(&RatFn::from_zpoly(&ZPoly::monomial(
            Mono::var(v, k as u16),
            BigInt::one(),
        )))
    }

    /// Total degree of numerator and expanded denominator.
    pub fn degrees(&self) -> (u32, u32) {
        let dd = self.den.iter().map(|(a, e)| a.poly.total_degree() * e).sum();
        (self.num.total_degree(), dd)
    }

}

impl fmt::Display for RatFn {
    /// Canonical `num/den` with integer coefficients on both sides; a part
    /// is parenthesized unless it is a single term (and, for the
    /// denominator, a single factor).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = self.num();
        if self.den.is_empty() {
            return write!(f, "{num}");
        }
        let l = num
            .terms()
            .iter()
            .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
        let lr = Rat::from_integer(l);
        let num = num.scale(&lr);
        let den = expand(&self.den).to_rational().scale(&lr);
        if num.len() == 1 {
            write!(f, "{num}")?;
        } else {
            write!(f, "({num})")?;
        }
        let ds = den.to_string();
        if den.len() == 1 && !ds.contains('*') {
            write!(f, "/{ds}")
        } else {
            write!(f, "/({ds})")
        }
    }
}

impl fmt::Debug for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<i64> for RatFn {
    fn from(n: i64) -> Self {
        RatFn::from_int(n)
    }
}

impl std::ops::Add for &RatFn {
    type Output = RatFn;
    fn add(self, o: &RatFn) -> RatFn {
        RatFn::add(self, o)
    }
}

impl std::ops::Sub for &RatFn {
    type Output = RatFn;
    fn sub(self, o: &RatFn) -> RatFn {
        RatFn::sub(self, o)
    }
}

impl std::ops::Mul for &RatFn {
    type Output = RatFn;
    fn mul(self, o: &RatFn) -> RatFn {
        RatFn::mul(self, o)
    }
}

impl std::ops::Neg for &RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        RatFn::neg(self)
    }
}
