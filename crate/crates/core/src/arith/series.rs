//! Power series in q truncated at an explicit inclusive order.

use num_bigint::BigInt;
use num_traits::One;

use super::{ArithError, Rat, RatFn};

/// Coefficients a [`QSeries`] can carry.
pub trait SeriesCoeff: Clone + PartialEq + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, r: &Rat) -> Self;
}

impl SeriesCoeff for RatFn {
    fn zero_like(&self) -> Self {
        RatFn::zero()
    }
    fn one_like(&self) -> Self {
        RatFn::one()
    }
    fn is_zero(&self) -> bool {
        RatFn::is_zero(self)
    }
    fn is_one(&self) -> bool {
        RatFn::is_one(self)
    }
    fn add(&self, o: &Self) -> Self {
        RatFn::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        RatFn::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        RatFn::mul(self, o)
    }
    fn scale(&self, r: &Rat) -> Self {
        self.scale_rat(r)
    }
}

/// `sum_{n=0}^{order} coeffs[n] q^n`; everything beyond `order` is unknown.
#[derive(Clone, PartialEq, Debug)]
pub struct QSeries<T> {
    coeffs: Vec<T>,
}

fn int(n: usize) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

impl<T: SeriesCoeff> QSeries<T> {
    /// `coeffs` must be nonempty; its length fixes the order.
    pub fn new(coeffs: Vec<T>) -> QSeries<T> {
        assert!(!coeffs.is_empty(), "a series carries at least its q^0 coefficient");
        QSeries { coeffs }
    }

    pub fn zero(order: usize, like: &T) -> QSeries<T> {
        QSeries {
            coeffs: vec![like.zero_like(); order + 1],
        }
    }

    pub fn constant(c: T, order: usize) -> QSeries<T> {
        let mut coeffs = vec![c.zero_like(); order + 1];
        coeffs[0] = c;
        QSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &T {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn truncate(&self, order: usize) -> QSeries<T> {
        QSeries {
            coeffs: self.coeffs[..=order.min(self.order())].to_vec(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &QSeries<T>) -> QSeries<T> {
        let n = self.order().min(o.order());
        QSeries {
            coeffs: (0..=n).map(|i| self.coeffs[i].add(&o.coeffs[i])).collect(),
        }
    }

    pub fn sub(&self, o: &QSeries<T>) -> QSeries<T> {
        let n = self.order().min(o.order());
        QSeries {
            coeffs: (0..=n).map(|i| self.coeffs[i].sub(&o.coeffs[i])).collect(),
        }
    }

    pub fn mul(&self, o: &QSeries<T>) -> QSeries<T> {
        let n = self.order().min(o.order());
        let mut coeffs = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut acc = self.coeffs[0].zero_like();
            for i in 0..=k {
                let (x, y) = (&self.coeffs[i], &o.coeffs[k - i]);
                if !x.is_zero() && !y.is_zero() {
                    acc = acc.add(&x.mul(y));
                }
            }
            coeffs.push(acc);
        }
        QSeries { coeffs }
    }

    pub fn scale(&self, r: &Rat) -> QSeries<T> {
        QSeries {
            coeffs: self.coeffs.iter().map(|c| c.scale(r)).collect(),
        }
    }

    pub fn map<U: SeriesCoeff>(&self, f: impl Fn(&T) -> U) -> QSeries<U> {
        QSeries {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn try_map<U: SeriesCoeff, E>(&self, f: impl Fn(&T) -> Result<U, E>) -> Result<QSeries<U>, E> {
        Ok(QSeries {
            coeffs: self.coeffs.iter().map(f).collect::<Result<_, _>>()?,
        })
    }

    /// The Euler operator q d/dq.
    pub fn qdq(&self) -> QSeries<T> {
        QSeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| c.scale(&int(n)))
                .collect(),
        }
    }

    /// Index of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    fn require_unit(&self, what: &str) -> Result<(), ArithError> {
        if self.coeffs[0].is_one() {
            Ok(())
        } else {
            Err(ArithError::SeriesPrecondition(format!(
                "{what} needs constant term 1"
            )))
        }
    }

    /// Formal logarithm of a series with constant term 1.
    pub fn log(&self) -> Result<QSeries<T>, ArithError> {
        self.require_unit("log")?;
        let n = self.order();
        let zero = self.coeffs[0].zero_like();
        let mut out = vec![zero.clone(); n + 1];
        // n L_n = n s_n - sum_{k=1}^{n-1} k L_k s_{n-k}
        for m in 1..=n {
            let mut acc = self.coeffs[m].scale(&int(m));
            for k in 1..m {
                let (l, s) = (&out[k], &self.coeffs[m - k]);
                if !l.is_zero() && !s.is_zero() {
                    acc = acc.sub(&l.mul(s).scale(&int(k)));
                }
            }
            out[m] = acc.scale(&int(m).recip());
        }
        Ok(QSeries { coeffs: out })
    }

    /// Formal exponential of a series with constant term 0.
    pub fn exp(&self) -> Result<QSeries<T>, ArithError> {
        if !self.coeffs[0].is_zero() {
            return Err(ArithError::SeriesPrecondition(
                "exp needs constant term 0".into(),
            ));
        }
        let n = self.order();
        let one = self.coeffs[0].one_like();
        let mut out = vec![one.zero_like(); n + 1];
        out[0] = one;
        // n E_n = sum_{k=1}^{n} k s_k E_{n-k}
        for m in 1..=n {
            let mut acc = out[0].zero_like();
            for k in 1..=m {
                let (s, e) = (&self.coeffs[k], &out[m - k]);
                if !s.is_zero() && !e.is_zero() {
                    acc = acc.add(&s.mul(e).scale(&int(k)));
                }
            }
            out[m] = acc.scale(&int(m).recip());
        }
        Ok(QSeries { coeffs: out })
    }

    /// Square root with constant term 1 (the branch equal to 1 at q = 0).
    pub fn sqrt(&self) -> Result<QSeries<T>, ArithError> {
        self.require_unit("sqrt")?;
        let n = self.order();
        let one = self.coeffs[0].one_like();
        let mut out = vec![one.zero_like(); n + 1];
        out[0] = one;
        let half = Rat::new(BigInt::one(), BigInt::from(2));
        // 2 R_m = s_m - sum_{k=1}^{m-1} R_k R_{m-k}
        for m in 1..=n {
            let mut acc = self.coeffs[m].clone();
            for k in 1..m {
                let (x, y) = (&out[k], &out[m - k]);
                if !x.is_zero() && !y.is_zero() {
                    acc = acc.sub(&x.mul(y));
                }
            }
            out[m] = acc.scale(&half);
        }
        Ok(QSeries { coeffs: out })
    }
}

/// Composition with one of the supported elementary functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Elementary {
    Log,
    Exp,
    Sqrt,
}

pub fn series_compose<T: SeriesCoeff>(
    s: &QSeries<T>,
    f: Elementary,
) -> Result<QSeries<T>, ArithError> {
    match f {
        Elementary::Log => s.log(),
        Elementary::Exp => s.exp(),
        Elementary::Sqrt => s.sqrt(),
    }
}

impl QSeries<RatFn> {
    pub fn from_rats(rs: &[Rat]) -> QSeries<RatFn> {
        QSeries::new(rs.iter().map(|r| RatFn::from_rat(r.clone())).collect())
    }
}

impl<T: SeriesCoeff> QSeries<T> {
    /// First index where the two series differ, up to the common order.
    pub fn first_difference(&self, o: &QSeries<T>) -> Option<usize> {
        let n = self.order().min(o.order());
        (0..=n).find(|&i| self.coeffs[i] != o.coeffs[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn series(rs: &[(i64, i64)]) -> QSeries<RatFn> {
        QSeries::from_rats(&rs.iter().map(|&(n, d)| rat(n, d)).collect::<Vec<_>>())
    }

    #[test]
    fn mercator() {
        let s = series(&[(1, 1), (1, 1), (0, 1), (0, 1), (0, 1)]);
        let l = s.log().unwrap();
        assert_eq!(l, series(&[(0, 1), (1, 1), (-1, 2), (1, 3), (-1, 4)]));
    }

    #[test]
    fn binomial_sqrt() {
        let s = series(&[(1, 1), (1, 1), (0, 1), (0, 1)]);
        assert_eq!(s.sqrt().unwrap(), series(&[(1, 1), (1, 2), (-1, 8), (1, 16)]));
    }

    #[test]
    fn exp_of_log_is_identity() {
        let s = series(&[(1, 1), (1, 1), (1, 1), (0, 1), (0, 1), (0, 1)]);
        let back = series_compose(&series_compose(&s, Elementary::Log).unwrap(), Elementary::Exp).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn preconditions() {
        let s = series(&[(2, 1), (1, 1)]);
        assert!(matches!(s.log(), Err(ArithError::SeriesPrecondition(_))));
        assert!(matches!(s.sqrt(), Err(ArithError::SeriesPrecondition(_))));
        assert!(matches!(s.exp(), Err(ArithError::SeriesPrecondition(_))));
    }

    #[test]
    fn euler_operator() {
        let s = series(&[(5, 1), (1, 1), (0, 1), (1, 1)]);
        assert_eq!(s.qdq(), series(&[(0, 1), (1, 1), (0, 1), (3, 1)]));
        assert!(series(&[(7, 1)]).qdq().is_zero());
    }

    #[test]
    fn mixed_orders_truncate_to_min() {
        let a = series(&[(1, 1), (1, 1), (1, 1)]);
        let b = series(&[(1, 1), (2, 1)]);
        assert_eq!(a.add(&b).order(), 1);
        assert_eq!(a.mul(&b), series(&[(1, 1), (3, 1)]));
    }
}
