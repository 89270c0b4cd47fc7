//! Variables and monomials.
//!
//! Every polynomial in the crate lives in one fixed variable universe so that
//! rational functions produced by different pipelines can be combined without
//! renaming. Variables are ordered a1 < a2 < a3 < a4 < hbar < kappa < u < a0 <
//! w < e1 < e2, and monomials are compared graded-lexicographically with the
//! largest variable most significant.

use std::cmp::Ordering;
use std::fmt;

/// Number of variables in the universe.
pub const NVARS: usize = 11;

/// Maximum rank supported for the symbolic parameters a1..a_r.
pub const MAX_RANK: usize = 4;

const NAMES: [&str; NVARS] = [
    "a1", "a2", "a3", "a4", "hbar", "kappa", "u", "a0", "w", "e1", "e2",
];

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Var(u8);

impl Var {
    pub const HBAR: Var = Var(4);
    pub const KAPPA: Var = Var(5);
    pub const U: Var = Var(6);
    pub const A0: Var = Var(7);
    pub const W: Var = Var(8);
    pub const E1: Var = Var(9);
    pub const E2: Var = Var(10);

    /// The i-th Coulomb/Cartan parameter, 1-based.
    pub fn a(i: usize) -> Var {
        assert!((1..=MAX_RANK).contains(&i), "a{i} is outside a1..a{MAX_RANK}");
        Var((i - 1) as u8)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn name(self) -> &'static str {
        NAMES[self.index()]
    }

    pub fn from_name(name: &str) -> Option<Var> {
        NAMES.iter().position(|n| *n == name).map(|i| Var(i as u8))
    }

    pub fn all() -> impl Iterator<Item = Var> {
        (0..NVARS as u8).map(Var)
    }

    // slot in the exponent array; most significant variable first
    #[inline]
    fn slot(self) -> usize {
        NVARS - 1 - self.index()
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A monomial: total degree plus exponents stored most-significant first, so
/// the derived ordering is graded lexicographic.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Mono {
    deg: u32,
    exps: [u16; NVARS],
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.deg
            .cmp(&other.deg)
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Mono {
    pub const ONE: Mono = Mono {
        deg: 0,
        exps: [0; NVARS],
    };

    pub fn var(v: Var, e: u16) -> Mono {
        let mut m = Mono::ONE;
        m.exps[v.slot()] = e;
        m.deg = e as u32;
        m
    }

    #[inline]
    pub fn exp(&self, v: Var) -> u16 {
        self.exps[v.slot()]
    }

    pub fn with_exp(mut self, v: Var, e: u16) -> Mono {
        let s = v.slot();
        self.deg = self.deg - self.exps[s] as u32 + e as u32;
        self.exps[s] = e;
        self
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn is_one(&self) -> bool {
        self.deg == 0
    }

    #[inline]
    pub fn mul(&self, o: &Mono) -> Mono {
        let mut exps = self.exps;
        for (e, f) in exps.iter_mut().zip(o.exps.iter()) {
            *e += *f;
        }
        Mono {
            deg: self.deg + o.deg,
            exps,
        }
    }

    pub fn divides(&self, o: &Mono) -> bool {
        self.deg <= o.deg && self.exps.iter().zip(o.exps.iter()).all(|(a, b)| a <= b)
    }

    /// `o / self`, assuming divisibility.
    pub fn div_into(&self, o: &Mono) -> Option<Mono> {
        if !self.divides(o) {
            return None;
        }
        let mut exps = o.exps;
        for (e, f) in exps.iter_mut().zip(self.exps.iter()) {
            *e -= *f;
        }
        Some(Mono {
            deg: o.deg - self.deg,
            exps,
        })
    }

    /// Componentwise minimum.
    pub fn gcd(&self, o: &Mono) -> Mono {
        let mut exps = self.exps;
        for (e, f) in exps.iter_mut().zip(o.exps.iter()) {
            *e = (*e).min(*f);
        }
        Mono {
            deg: exps.iter().map(|&e| e as u32).sum(),
            exps,
        }
    }

    /// Variables with a nonzero exponent, in ascending variable order.
    pub fn vars(&self) -> impl Iterator<Item = (Var, u16)> + '_ {
        Var::all().filter_map(move |v| {
            let e = self.exp(v);
            (e > 0).then_some((v, e))
        })
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let mut first = true;
        for (v, e) in self.vars() {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grlex_order() {
        let a = Mono::var(Var::a(1), 1);
        let h = Mono::var(Var::HBAR, 1);
        let k = Mono::var(Var::KAPPA, 1);
        assert!(a < h && h < k);
        // degree dominates
        assert!(k < Mono::var(Var::a(1), 2));
        // a1*kappa > hbar^2 since kappa is the most significant
        assert!(a.mul(&k) > h.mul(&h));
    }

    #[test]
    fn names_round_trip() {
        for v in Var::all() {
            assert_eq!(Var::from_name(v.name()), Some(v));
        }
        assert_eq!(Var::from_name("b"), None);
    }
}
