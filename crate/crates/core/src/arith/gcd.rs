//! Multivariate polynomial gcd over the integers.
//!
//! The driver strips integer and monomial content, reduces on variables that
//! occur in only one argument, tries exact trial division, then runs the
//! heuristic gcd (evaluation at a large integer and balanced-digit
//! interpolation) on small inputs and falls back to a recursive primitive
//! pseudo-remainder sequence.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::poly::{MPoly, ZPoly};
use super::var::{Mono, Var};
use super::Rat;

const HEU_ATTEMPTS: usize = 6;

/// Greatest common divisor with nonnegative integer content and positive
/// leading coefficient. `gcd(p, 0)` is `p` normalized.
pub fn gcd(p: &ZPoly, q: &ZPoly) -> ZPoly {
    if p.is_zero() {
        return normalize(q);
    }
    if q.is_zero() {
        return normalize(p);
    }
    let (cp, pp) = p.primitive();
    let (cq, qp) = q.primitive();
    let c = cp.gcd(&cq);
    gcd_primitive(&pp, &qp).scale(&c)
}

/// Gcd of a list; stops early once it reaches 1.
pub fn gcd_many<'a, I: IntoIterator<Item = &'a ZPoly>>(polys: I) -> ZPoly {
    let mut g = ZPoly::zero();
    for p in polys {
        g = gcd(&g, p);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Gcd of rational polynomials: rational content gcd times primitive gcd.
/// `gcd(4*a1, 6*hbar) = 2`.
pub fn gcd_rational(p: &MPoly, q: &MPoly) -> MPoly {
    if p.is_zero() && q.is_zero() {
        return MPoly::zero();
    }
    let (kp, pp) = p.integer_primitive();
    let (kq, qp) = q.integer_primitive();
    let k = rat_gcd(&kp, &kq);
    let g = if p.is_zero() {
        qp
    } else if q.is_zero() {
        pp
    } else {
        gcd_primitive(&pp, &qp)
    };
    g.to_rational().scale(&k)
}

fn rat_gcd(x: &Rat, y: &Rat) -> Rat {
    let n = x.numer().gcd(y.numer());
    let d = x.denom().lcm(y.denom());
    Rat::new(n, d)
}

fn normalize(p: &ZPoly) -> ZPoly {
    if p.lc().is_negative() {
        p.neg()
    } else {
        p.clone()
    }
}

/// Both arguments primitive with positive leading coefficient.
fn gcd_primitive(p: &ZPoly, q: &ZPoly) -> ZPoly {
    let mp = p.monomial_content();
    let mq = q.monomial_content();
    let mc = mp.gcd(&mq);
    let one = BigInt::one();
    let p = strip_mono(p, &mp);
    let q = strip_mono(q, &mq);
    let g = gcd_core(&p, &q);
    if mc.is_one() {
        g
    } else {
        g.mul_mono(&mc, &one)
    }
}

fn strip_mono(p: &ZPoly, m: &Mono) -> ZPoly {
    if m.is_one() {
        p.clone()
    } else {
        p.div_exact(&ZPoly::monomial(*m, BigInt::one()))
            .expect("monomial content divides")
    }
}

/// Primitive, monomial-content-free, positive leading coefficient.
fn gcd_core(p: &ZPoly, q: &ZPoly) -> ZPoly {
    if p.is_constant() || q.is_constant() {
        return ZPoly::one();
    }
    if p == q {
        return p.clone();
    }
    let vp = p.vars();
    let vq = q.vars();
    if let Some(&v) = vp.iter().find(|v| !vq.contains(v)) {
        return gcd_with_coefficients(q, p, v);
    }
    if let Some(&v) = vq.iter().find(|v| !vp.contains(v)) {
        return gcd_with_coefficients(p, q, v);
    }
    let (small, large) = if p.len() <= q.len() { (p, q) } else { (q, p) };
    if large.div_exact(small).is_some() {
        return small.clone();
    }
    if small.len() != large.len() && small.div_exact(large).is_some() {
        return large.clone();
    }
    if heuristic_is_cheap(p, q) {
        if let Some((h, _, _)) = heu_gcd(p, q) {
            return normalize(&h.primitive().1);
        }
    }
    prs_gcd(p, q)
}

// gcd(a, b) where `v` occurs in b but not in a: gcd(a, coefficients of b in v)
fn gcd_with_coefficients(a: &ZPoly, b: &ZPoly, v: Var) -> ZPoly {
    let mut g = a.clone();
    for c in b.to_univariate(v) {
        if c.is_zero() {
            continue;
        }
        g = gcd(&g, &c);
        if g.is_constant() {
            return ZPoly::one();
        }
    }
    normalize(&g.primitive().1)
}

fn heuristic_is_cheap(p: &ZPoly, q: &ZPoly) -> bool {
    let nv = p.vars().len();
    let deg = p.total_degree().max(q.total_degree()) as usize;
    // evaluation points grow like norm^(deg^(nv-1))
    nv <= 1 || (nv == 2 && deg <= 12) || (nv == 3 && deg <= 4)
}

fn heu_gcd(f: &ZPoly, g: &ZPoly) -> Option<(ZPoly, ZPoly, ZPoly)> {
    if f.is_zero() || g.is_zero() {
        return None;
    }
    if f.is_constant() || g.is_constant() {
        let c = f.content().abs().gcd(&g.content().abs());
        let cz = ZPoly::constant(c.clone());
        return Some((cz, f.map_coeffs(|x| x / &c), g.map_coeffs(|x| x / &c)));
    }
    // evaluate the most significant variable present
    let v = *f
        .vars()
        .iter()
        .chain(g.vars().iter())
        .max()
        .expect("non-constant");
    let (cf, f1) = f.primitive();
    let (cg, g1) = g.primitive();
    let common = cf.abs().gcd(&cg.abs());
    let fnorm = f1.max_norm();
    let gnorm = g1.max_norm();
    let b = BigInt::from(2) * (&fnorm).min(&gnorm) + BigInt::from(29);
    let sqrt_b = b.sqrt();
    let lead_bound = (&fnorm / f1.lc().abs()).min(&gnorm / g1.lc().abs());
    let mut x = (&b)
        .min(&(BigInt::from(99) * &sqrt_b))
        .clone()
        .max(BigInt::from(2) * lead_bound + BigInt::from(4));
    for _ in 0..HEU_ATTEMPTS {
        let ff = f1.eval_int(v, &x);
        let gg = g1.eval_int(v, &x);
        if !ff.is_zero() && !gg.is_zero() {
            if let Some((h, cff, cfg)) = heu_gcd(&ff, &gg) {
                let hh = interpolate(&h, &x, v).primitive().1;
                if let (Some(a), Some(b)) = (f1.div_exact(&hh), g1.div_exact(&hh)) {
                    return Some(finish(hh, a, b, &common, &cf, &cg));
                }
                let cffi = interpolate(&cff, &x, v);
                if let Some(h2) = f1.div_exact(&cffi) {
                    if let Some(b) = g1.div_exact(&h2) {
                        return Some(finish(h2, cffi, b, &common, &cf, &cg));
                    }
                }
                let cfgi = interpolate(&cfg, &x, v);
                if let Some(h2) = g1.div_exact(&cfgi) {
                    if let Some(a) = f1.div_exact(&h2) {
                        return Some(finish(h2, a, cfgi, &common, &cf, &cg));
                    }
                }
            }
        }
        let r = x.sqrt().sqrt();
        x = BigInt::from(73794) * &x * r / BigInt::from(27011);
    }
    None
}

fn finish(
    h: ZPoly,
    a: ZPoly,
    b: ZPoly,
    common: &BigInt,
    cf: &BigInt,
    cg: &BigInt,
) -> (ZPoly, ZPoly, ZPoly) {
    let sa = cf / common;
    let sb = cg / common;
    (h.scale(common), a.scale(&sa), b.scale(&sb))
}

// balanced base-x digits of each integer coefficient become powers of v
fn interpolate(h: &ZPoly, x: &BigInt, v: Var) -> ZPoly {
    let half = x / BigInt::from(2);
    let mut terms = Vec::new();
    for (m, c) in h.terms() {
        let mut c = c.clone();
        let mut k: u16 = 0;
        while !c.is_zero() {
            let mut d = c.mod_floor(x);
            if d > half {
                d -= x;
            }
            c = (&c - &d) / x;
            if !d.is_zero() {
                terms.push((m.with_exp(v, k), d));
            }
            k += 1;
        }
    }
    ZPoly::from_terms(terms)
}

/// Recursive primitive pseudo-remainder sequence.
fn prs_gcd(p: &ZPoly, q: &ZPoly) -> ZPoly {
    // main variable: the shared variable of least degree keeps the sequence short
    let vars = p.vars();
    let v = *vars
        .iter()
        .min_by_key(|&&v| (p.degree(v).max(q.degree(v)), std::cmp::Reverse(v)))
        .expect("non-constant");
    let mut f = p.to_univariate(v);
    let mut g = q.to_univariate(v);
    let cf = gcd_many(f.iter());
    let cg = gcd_many(g.iter());
    let c = gcd(&cf, &cg);
    f = f.iter().map(|x| x.div_exact(&cf).unwrap()).collect();
    g = g.iter().map(|x| x.div_exact(&cg).unwrap()).collect();
    if f.len() < g.len() {
        std::mem::swap(&mut f, &mut g);
    }
    loop {
        let r = pseudo_rem(&f, &g);
        if r.is_empty() {
            break;
        }
        if r.len() == 1 {
            g = vec![ZPoly::one()];
            break;
        }
        let cr = gcd_many(r.iter());
        let r: Vec<ZPoly> = r.iter().map(|x| x.div_exact(&cr).unwrap()).collect();
        f = g;
        g = r;
    }
    let g = ZPoly::from_univariate(v, &g);
    let g = normalize(&g.primitive().1);
    normalize(&g.mul(&c))
}

// coefficient vectors indexed by degree, trailing zeros trimmed
fn pseudo_rem(f: &[ZPoly], g: &[ZPoly]) -> Vec<ZPoly> {
    let dg = g.len() - 1;
    let lg = &g[dg];
    let mut r: Vec<ZPoly> = f.to_vec();
    while r.len() > dg {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - dg;
        for c in r.iter_mut() {
            *c = c.mul(lg);
        }
        for (i, gc) in g.iter().enumerate() {
            let t = gc.mul(&lr);
            r[i + shift] = r[i + shift].sub(&t);
        }
        debug_assert!(r[dr].is_zero());
        r.pop();
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
    }
    r
}
