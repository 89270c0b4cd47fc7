//! The combinatorial instanton partition function of pure U(n) gauge theory
//! as an independent oracle for the Toda prepotential.
//!
//! Each n-tuple of Young diagrams contributes
//! `prod_{i,j} prod_{s in Y_i} 1 / (E (e1 + e2 - E))` with
//! `E = a_i - a_j - e1 leg_{Y_j}(s) + e2 (arm_{Y_i}(s) + 1)`.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{ArithError, MPoly, QSeries, Rat, RatFn, Var};
use crate::arith::var::MAX_RANK;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NekrasovError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("gauge rank n = {0} is outside 1..={MAX_RANK}")]
    Rank(usize),
    #[error("e1 e2 log Z has a pole at e1 = e2 = 0 at Q^{order}: {detail}")]
    PoleAtZero { order: usize, detail: String },
    #[error("comparison needs n = 2, got n = {0}")]
    CompareRank(usize),
    #[error("the Toda series reaches q^{have}, comparison to Q^{want} needs q^{need}")]
    TooShort { have: usize, want: usize, need: usize },
}

/// A Young diagram as a weakly decreasing list of positive row lengths.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Partition {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    pub fn empty() -> Partition {
        Partition::default()
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn size(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Length of row `i` (0-based), zero beyond the diagram.
    pub fn row(&self, i: usize) -> i64 {
        self.parts.get(i).copied().unwrap_or(0) as i64
    }

    /// Length of column `j` (0-based).
    pub fn col(&self, j: usize) -> i64 {
        self.parts.iter().filter(|&&p| p as usize > j).count() as i64
    }

    /// Arm length of box `(i, j)`; negative outside the diagram.
    pub fn arm(&self, i: usize, j: usize) -> i64 {
        self.row(i) - j as i64 - 1
    }

    /// Leg length of box `(i, j)`; negative outside the diagram.
    pub fn leg(&self, i: usize, j: usize) -> i64 {
        self.col(j) - i as i64 - 1
    }

    pub fn boxes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| (0..p as usize).map(move |j| (i, j)))
    }

    /// All partitions of `d`, in reverse lexicographic order.
    pub fn all(d: u32) -> Vec<Partition> {
        fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if rest == 0 {
                out.push(Partition { parts: cur.clone() });
                return;
            }
            for p in (1..=rest.min(max)).rev() {
                cur.push(p);
                rec(rest - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(d, d, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

/// All n-tuples of partitions with total size `d`.
pub fn partition_tuples(n: usize, d: u32) -> Vec<Vec<Partition>> {
    if n == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for p in Partition::all(first) {
            for rest in partition_tuples(n - 1, d - first) {
                let mut t = vec![p.clone()];
                t.extend(rest);
                out.push(t);
            }
        }
    }
    out
}

fn int(x: i64) -> Rat {
    Rat::from_integer(x.into())
}

/// The contribution of one tuple, a product of inverse linear forms.
pub fn contribution(tuple: &[Partition]) -> RatFn {
    let n = tuple.len();
    let e1 = MPoly::var(Var::E1);
    let e2 = MPoly::var(Var::E2);
    let e12 = e1.add(&e2);
    let mut acc = RatFn::one();
    for i in 0..n {
        for j in 0..n {
            let aij = MPoly::var(Var::a(i + 1)).sub(&MPoly::var(Var::a(j + 1)));
            for (r, c) in tuple[i].boxes() {
                let e = aij
                    .sub(&e1.scale(&int(tuple[j].leg(r, c))))
                    .add(&e2.scale(&int(tuple[i].arm(r, c) + 1)));
                let other = e12.sub(&e);
                let f = RatFn::from_mpoly(&e).mul(&RatFn::from_mpoly(&other));
                acc = acc.div(&f).expect("weights of a partition tuple are nonzero");
            }
        }
    }
    acc
}

fn sum_in_order(parts: Vec<RatFn>) -> RatFn {
    // pairwise summation keeps intermediate denominators balanced
    let mut layer = parts;
    if layer.is_empty() {
        return RatFn::zero();
    }
    while layer.len() > 1 {
        layer = layer
            .par_chunks(2)
            .map(|c| if c.len() == 2 { c[0].add(&c[1]) } else { c[0].clone() })
            .collect();
    }
    layer.pop().expect("nonempty")
}

/// `Z = sum_d Q^d sum_{|Y| = d} contribution(Y)` up to `Q^order`.
pub fn nekrasov_z(n: usize, order: usize) -> Result<QSeries<RatFn>, NekrasovError> {
    if n == 0 || n > MAX_RANK {
        return Err(NekrasovError::Rank(n));
    }
    let coeffs = (0..=order)
        .map(|d| {
            let terms: Vec<RatFn> = partition_tuples(n, d as u32).par_iter().map(|t| contribution(t)).collect();
            sum_in_order(terms)
        })
        .collect();
    Ok(QSeries::new(coeffs))
}

/// `lim_{e1 -> 0} lim_{e2 -> 0} e1 e2 log Z`.
pub fn f_inst_from_z(z: &QSeries<RatFn>) -> Result<QSeries<RatFn>, NekrasovError> {
    let eps = eps_log(z)?;
    let zero = MPoly::zero();
    let mut out = Vec::with_capacity(eps.order() + 1);
    for (d, c) in eps.coeffs().iter().enumerate() {
        let lim = c
            .substitute(Var::E2, &zero)
            .and_then(|x| x.substitute(Var::E1, &zero))
            .map_err(|e| NekrasovError::PoleAtZero {
                order: d,
                detail: e.to_string(),
            })?;
        out.push(lim);
    }
    Ok(QSeries::new(out))
}

/// `e1 e2 log Z` before any limit.
pub fn eps_log(z: &QSeries<RatFn>) -> Result<QSeries<RatFn>, NekrasovError> {
    let e1e2 = RatFn::var(Var::E1).mul(&RatFn::var(Var::E2));
    Ok(z.log()?.map(|c| c.mul(&e1e2)))
}

/// Outcome of one convention choice in the calibration search.
#[derive(Clone, Debug, PartialEq)]
pub struct Attempt {
    /// `a = s (a1 - a2)`, or `a = i s (a1 - a2)` when `imaginary` is set.
    pub s: Rat,
    pub imaginary: bool,
    /// `Q_Z = c Q`, solved from the first order.
    pub c: Option<Rat>,
    /// First order of disagreement, if any.
    pub first_mismatch: Option<usize>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Calibration {
    pub order: usize,
    pub attempts: Vec<Attempt>,
}

impl Attempt {
    /// The variable map, e.g. `a = i*1/2*(a1-a2)`.
    pub fn variable_map(&self) -> String {
        let i = if self.imaginary { "i*" } else { "" };
        format!("a = {i}{}*(a1-a2)", self.s)
    }
}

impl Calibration {
    /// The first convention choice that makes every order agree.
    pub fn matched(&self) -> Option<&Attempt> {
        self.attempts.iter().find(|a| a.first_mismatch.is_none())
    }
}

/// The scale factors tried for the identification `a = s (a1 - a2)`.
pub fn scale_candidates() -> Vec<Rat> {
    vec![int(1), Rat::new(1.into(), 2.into()), int(2)]
}

/// Compares a rank-one Toda prepotential (a series in the uniform `q` with
/// `F_m = v_m / m`) against the `n = 2` oracle limit (a series in the
/// counting parameter), orders `1..=order` in `Q = q^h`.
///
/// The Toda series is converted to `Q` by `Q dF/dQ = v`, i.e. coefficient
/// `h F_{hd}` at `Q^d`. The oracle side is restricted to `a1 + a2 = 0`. For
/// each `s` the coupling scale `c` with `Q_Z = c Q` is solved from the first
/// order and every higher order is then compared exactly.
///
/// The imaginary maps `a = i s (a1 - a2)` account for the Coulomb parameter
/// living in the compact form, where the invariant pairing is negative
/// definite; they require the Toda coefficients to be even in `a`.
pub fn calibrate_and_compare(
    f_toda_q: &QSeries<RatFn>,
    h: u32,
    f_z: &QSeries<RatFn>,
    order: usize,
) -> Result<Calibration, NekrasovError> {
    let need = h as usize * order;
    if f_toda_q.order() < need {
        return Err(NekrasovError::TooShort {
            have: f_toda_q.order(),
            want: order,
            need,
        });
    }
    let order = order.min(f_z.order());
    let a1 = MPoly::var(Var::a(1));
    let sl = |c: &RatFn| c.substitute(Var::a(2), &a1.neg());
    let z: Vec<RatFn> = (0..=order).map(|d| sl(f_z.coeff(d))).collect::<Result<_, _>>()?;
    let hr = int(h as i64);
    let toda_big_q: Vec<RatFn> = (0..=order)
        .map(|d| f_toda_q.coeff(h as usize * d).scale_rat(&hr))
        .collect();
    let mut attempts = Vec::new();
    for imaginary in [false, true] {
        for s in scale_candidates() {
            // a -> s (a1 - a2) = 2 s a1 on the slice a2 = -a1
            let image = a1.scale(&(int(2) * &s));
            let mut t: Vec<RatFn> = toda_big_q
                .iter()
                .map(|c| c.substitute(Var::a(1), &image))
                .collect::<Result<_, _>>()?;
            if imaginary {
                match t.iter().map(|c| quarter_turn(c, Var::a(1))).collect::<Option<Vec<_>>>() {
                    Some(r) => t = r,
                    None => {
                        attempts.push(Attempt {
                            s,
                            imaginary,
                            c: None,
                            first_mismatch: Some(1),
                            detail: "toda coefficients are not even in a".into(),
                        });
                        continue;
                    }
                }
            }
            attempts.push(compare_with_scale(s, imaginary, &t, &z, order));
        }
    }
    Ok(Calibration { order, attempts })
}

/// `f(i x)` for a rational function `f` even in `x`; `None` if `f` is not even.
fn quarter_turn(f: &RatFn, x: Var) -> Option<RatFn> {
    let (n, np) = quarter_turn_poly(&f.num(), x)?;
    let (d, dp) = quarter_turn_poly(&f.den(), x)?;
    if np != dp {
        return None;
    }
    RatFn::from_polys(&n, &d).ok()
}

/// Multiplies the `x^k` terms by `i^k` (up to a common factor `i` when every
/// `k` is odd); returns the parity of the exponents, `None` if it is mixed.
fn quarter_turn_poly(p: &MPoly, x: Var) -> Option<(MPoly, u16)> {
    let parity = p.terms().first().map_or(0, |(m, _)| m.exp(x) % 2);
    if p.terms().iter().any(|(m, _)| m.exp(x) % 2 != parity) {
        return None;
    }
    let turned = MPoly::from_terms(p.terms().iter().map(|(m, c)| {
        let k = (m.exp(x) - parity) / 2;
        (*m, if k.is_multiple_of(2) { c.clone() } else { -c.clone() })
    }));
    Some((turned, parity))
}

fn compare_with_scale(s: Rat, imaginary: bool, t: &[RatFn], z: &[RatFn], order: usize) -> Attempt {
    if order == 0 {
        return Attempt {
            s,
            imaginary,
            c: None,
            first_mismatch: None,
            detail: "nothing to compare".into(),
        };
    }
    let c = if z[1].is_zero() {
        None
    } else {
        t[1].div(&z[1]).ok().and_then(|x| x.as_rat()).filter(|x| *x != int(0))
    };
    let Some(c) = c else {
        return Attempt {
            s,
            imaginary,
            c: None,
            first_mismatch: Some(1),
            detail: format!("order 1: toda {} vs oracle {} have no constant nonzero ratio", t[1], z[1]),
        };
    };
    let cr = RatFn::from_rat(c.clone());
    let mut cd = RatFn::one();
    for d in 1..=order {
        cd = cd.mul(&cr);
        let rhs = z[d].mul(&cd);
        if t[d] != rhs {
            return Attempt {
                s,
                imaginary,
                c: Some(c),
                first_mismatch: Some(d),
                detail: format!("order {d}: toda {} vs scaled oracle {}", t[d], rhs),
            };
        }
    }
    Attempt {
        s,
        imaginary,
        c: Some(c),
        first_mismatch: None,
        detail: format!("orders 1..={order} agree"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse::parse_ratfn;

    fn r(s: &str) -> RatFn {
        parse_ratfn(s).unwrap()
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (0..=7).map(|d| Partition::all(d).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15]);
        // n = 2: sum_k p(k) p(d - k)
        let pairs: Vec<usize> = (0..=4).map(|d| partition_tuples(2, d).len()).collect();
        assert_eq!(pairs, vec![1, 2, 5, 10, 20]);
        for p in Partition::all(6) {
            assert_eq!(p.size(), 6);
            assert!(p.parts().windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn arms_and_legs() {
        let p = Partition::new(vec![3, 1]);
        assert_eq!(p.arm(0, 0), 2);
        assert_eq!(p.leg(0, 0), 1);
        assert_eq!(p.leg(0, 2), 0);
        assert_eq!(p.arm(1, 1), -1);
        assert_eq!(p.boxes().count(), 4);
        assert_eq!(p.to_string(), "[3,1]");
    }

    #[test]
    fn rank_one_closed_form() {
        let z = nekrasov_z(1, 3).unwrap();
        assert!(z.coeff(0).is_one());
        assert_eq!(z.coeff(1), &r("1/(e1*e2)"));
        assert_eq!(z.coeff(2), &r("1/(2*e1^2*e2^2)"));
        assert_eq!(z.coeff(3), &r("1/(6*e1^3*e2^3)"));
        let f = f_inst_from_z(&z).unwrap();
        assert_eq!(f.coeff(1), &RatFn::one());
        assert!(f.coeff(2).is_zero() && f.coeff(3).is_zero());
    }

    #[test]
    fn two_one_box_configurations() {
        let z = nekrasov_z(2, 1).unwrap();
        // 1/(e1 e2 (e1+e2+a12)(-a12)) + 1/(e1 e2 (e1+e2-a12) a12)
        assert_eq!(z.coeff(1), &r("2/(e1*e2*((e1+e2)^2-(a1-a2)^2))"));
        let f = f_inst_from_z(&z).unwrap();
        assert_eq!(f.coeff(1), &r("-2/(a1-a2)^2"));
        assert!(f_inst_from_z(&QSeries::constant(RatFn::one(), 3)).unwrap().is_zero());
    }

    #[test]
    fn calibration_edge_cases() {
        let z = f_inst_from_z(&nekrasov_z(2, 1).unwrap()).unwrap();
        let toda = QSeries::new(vec![RatFn::zero(), RatFn::zero(), r("1/a1^2")]);
        let cal = calibrate_and_compare(&toda, 2, &z, 1).unwrap();
        assert!(cal.attempts.iter().all(|a| a.first_mismatch.is_none()));
        let zero = QSeries::zero(2, &RatFn::zero());
        let cal = calibrate_and_compare(&zero, 2, &z, 1).unwrap();
        assert!(cal.matched().is_none());
        assert!(cal.attempts.iter().all(|a| a.first_mismatch == Some(1)));
        assert!(matches!(
            calibrate_and_compare(&zero, 2, &z, 2),
            Err(NekrasovError::TooShort { .. })
        ));
    }
}
