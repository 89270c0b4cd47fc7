//! Affine Toda potentials: presets, custom definitions, the cone condition
//! and the change of variables to the uniform-q form.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::{Rat, RatFn};
use crate::lattice::{LatticeData, LatticeError, TrigPoly, Weight};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TodaError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("term weights do not satisfy a single positive affine relation: {0}")]
    NoAffineRelation(String),
    #[error("no shift makes every term carry the same power of q")]
    InconsistentShift,
    #[error("grading exponent: {0}")]
    Grading(String),
    #[error("the potential must be in uniform-q form (every term carrying q^1)")]
    NotUniform,
    #[error("a Toda potential needs at least one term")]
    NoTerms,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// `coeff * Q^q_power * e^<weight, x>` (or `q^q_power` in uniform form).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PotentialTerm {
    pub weight: Weight,
    pub coeff: Rat,
    pub q_power: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algebra {
    A1,
    A2,
    A3,
}

impl Algebra {
    pub fn from_name(s: &str) -> Option<Algebra> {
        match s {
            "A1" | "a1" => Some(Algebra::A1),
            "A2" | "a2" => Some(Algebra::A2),
            "A3" | "a3" => Some(Algebra::A3),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Algebra::A1 => "A1",
            Algebra::A2 => "A2",
            Algebra::A3 => "A3",
        }
    }
}

/// A Toda potential on a lattice together with its grading and cone data.
#[derive(Clone, Debug, PartialEq)]
pub struct TodaSpec {
    pub name: String,
    lattice: Arc<LatticeData>,
    terms: Vec<PotentialTerm>,
    grading_h: u32,
    cone: Vec<Vec<i32>>,
}

/// Diagnostics of the cone condition on the `q^0` part of the potential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeReport {
    pub valid: bool,
    pub diagnostics: Vec<String>,
}

/// Result of the change of variables `x -> x + shift * ln Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct Conversion {
    /// `Q = q^h`.
    pub h: u32,
    /// Positive integer marks `m_j` of the relation `sum_j m_j mu_j = 0`.
    pub marks: Vec<u32>,
    /// The shift vector in lattice coordinates.
    pub shift: Vec<Rat>,
}

fn int(x: i64) -> Rat {
    Rat::from_integer(x.into())
}

/// Row-reduces `m` in place; returns the pivot columns.
fn row_reduce(m: &mut [Vec<Rat>]) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

/// Basis of `{ x : m x = 0 }`.
fn nullspace(m: &[Vec<Rat>], cols: usize) -> Vec<Vec<Rat>> {
    let mut a = m.to_vec();
    let pivots = row_reduce(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); cols];
            v[f] = Rat::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -a[r][f].clone();
            }
            v
        })
        .collect()
}

/// Solves `m x = b`, if consistent.
fn solve(m: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<Rat>> = m
        .iter()
        .zip(b)
        .map(|(row, x)| {
            let mut r = row.clone();
            r.push(x.clone());
            r
        })
        .collect();
    let pivots = row_reduce(&mut a);
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![Rat::zero(); cols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = a[r][cols].clone();
    }
    Some(x)
}

impl TodaSpec {
    /// Builds and checks a spec.
    pub fn new(
        name: impl Into<String>,
        lattice: LatticeData,
        terms: Vec<PotentialTerm>,
        grading_h: u32,
        cone: Vec<Vec<i32>>,
    ) -> Result<TodaSpec, TodaError> {
        if terms.is_empty() {
            return Err(TodaError::NoTerms);
        }
        for t in &terms {
            lattice.check_weight(&t.weight)?;
        }
        for row in &cone {
            lattice.check_weight(&Weight(row.clone()))?;
        }
        if grading_h == 0 {
            return Err(TodaError::Grading("must be at least 1".into()));
        }
        Ok(TodaSpec {
            name: name.into(),
            lattice: Arc::new(lattice),
            terms,
            grading_h,
            cone,
        })
    }

    /// The periodic Toda potential of type A with every coefficient `coeff`,
    /// before the change of variables: the simple roots at `Q^0` and the
    /// affine root at `Q^1`.
    ///
    /// A1 uses the one-dimensional operator `hbar^2 d^2/dx^2 + 2 hbar a d/dx`
    /// with `U = coeff (e^x + e^-x)`; A2 and A3 use simple-root coordinates
    /// with the Cartan matrix as Gram matrix.
    pub fn preset(alg: Algebra, coeff: Rat) -> TodaSpec {
        let (lattice, r) = match alg {
            Algebra::A1 => (LatticeData::from_rows(&[vec![1]]).expect("valid"), 1),
            Algebra::A2 => (LatticeData::cartan_a(2).expect("valid"), 2),
            Algebra::A3 => (LatticeData::cartan_a(3).expect("valid"), 3),
        };
        let mut terms: Vec<PotentialTerm> = (0..r)
            .map(|i| {
                let mut w = vec![0; r];
                w[i] = 1;
                PotentialTerm {
                    weight: Weight(w),
                    coeff: coeff.clone(),
                    q_power: 0,
                }
            })
            .collect();
        terms.push(PotentialTerm {
            weight: Weight(vec![-1; r]),
            coeff,
            q_power: 1,
        });
        let cone = (0..r)
            .map(|i| {
                let mut w = vec![0; r];
                w[i] = 1;
                w
            })
            .collect();
        TodaSpec::new(alg.name(), lattice, terms, r as u32 + 1, cone).expect("presets are valid")
    }

    /// A user-defined spec in pre-change form; the grading exponent is read
    /// off the affine relation among the term weights.
    pub fn custom(
        name: impl Into<String>,
        lattice: LatticeData,
        terms: Vec<PotentialTerm>,
        cone: Vec<Vec<i32>>,
    ) -> Result<TodaSpec, TodaError> {
        let mut spec = TodaSpec::new(name, lattice, terms, 1, cone)?;
        if !spec.is_uniform() {
            spec.grading_h = spec.conversion()?.h;
        }
        Ok(spec)
    }

    pub fn lattice(&self) -> &Arc<LatticeData> {
        &self.lattice
    }

    pub fn terms(&self) -> &[PotentialTerm] {
        &self.terms
    }

    pub fn grading_h(&self) -> u32 {
        self.grading_h
    }

    pub fn cone(&self) -> &[Vec<i32>] {
        &self.cone
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    /// Every term carries exactly one power of q.
    pub fn is_uniform(&self) -> bool {
        self.terms.iter().all(|t| t.q_power == 1)
    }

    /// Checks that every `q^0` term has a nonzero weight inside the cone.
    pub fn validate_cone(&self) -> ConeReport {
        let mut diagnostics = Vec::new();
        for t in self.terms.iter().filter(|t| t.q_power == 0) {
            if t.weight.is_zero() {
                diagnostics.push(format!("q^0 term with coefficient {} has weight 0", t.coeff));
                continue;
            }
            for row in &self.cone {
                let s: i64 = row.iter().zip(&t.weight.0).map(|(&x, &y)| x as i64 * y as i64).sum();
                if s < 0 {
                    diagnostics.push(format!(
                        "q^0 term at weight {} violates cone row {}",
                        t.weight,
                        Weight(row.clone())
                    ));
                }
            }
        }
        ConeReport {
            valid: diagnostics.is_empty(),
            diagnostics,
        }
    }

    /// The affine relation `sum_j m_j mu_j = 0` with positive integer marks.
    pub fn affine_relation(&self) -> Result<Vec<u32>, TodaError> {
        let r = self.rank();
        let k = self.terms.len();
        // columns are the term weights
        let m: Vec<Vec<Rat>> = (0..r)
            .map(|i| self.terms.iter().map(|t| int(t.weight.0[i] as i64)).collect())
            .collect();
        let ns = nullspace(&m, k);
        if ns.len() != 1 {
            return Err(TodaError::NoAffineRelation(format!(
                "relation space has dimension {}",
                ns.len()
            )));
        }
        let v = &ns[0];
        let sign = if v[0].is_negative() { -Rat::one() } else { Rat::one() };
        if v.iter().any(|x| !(x * &sign).is_positive()) {
            return Err(TodaError::NoAffineRelation(
                "relation coefficients are not all positive".into(),
            ));
        }
        let den = v.iter().fold(num_bigint::BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<num_bigint::BigInt> =
            v.iter().map(|x| (x * &sign * Rat::from_integer(den.clone())).to_integer()).collect();
        let g = ints.iter().fold(num_bigint::BigInt::zero(), |acc, x| acc.gcd(x));
        ints.iter()
            .map(|x| {
                u32::try_from(x / &g)
                    .map_err(|_| TodaError::NoAffineRelation("marks too large".into()))
            })
            .collect()
    }

    /// Data of the change of variables to the uniform-q form.
    pub fn conversion(&self) -> Result<Conversion, TodaError> {
        if self.is_uniform() {
            return Ok(Conversion {
                h: self.grading_h,
                marks: self.affine_relation().unwrap_or_default(),
                shift: vec![Rat::zero(); self.rank()],
            });
        }
        let marks = self.affine_relation()?;
        let total: u64 = marks.iter().map(|&m| m as u64).sum();
        let weighted: u64 = marks
            .iter()
            .zip(&self.terms)
            .map(|(&m, t)| m as u64 * t.q_power as u64)
            .sum();
        if weighted == 0 {
            return Err(TodaError::Grading("no term carries a power of Q".into()));
        }
        if total % weighted != 0 {
            return Err(TodaError::Grading(format!(
                "sum of marks {total} is not a multiple of {weighted}"
            )));
        }
        let h = (total / weighted) as u32;
        // <mu_j, shift> = 1/h - p_j; solve for tau = G shift first
        let m: Vec<Vec<Rat>> = self
            .terms
            .iter()
            .map(|t| t.weight.0.iter().map(|&x| int(x as i64)).collect())
            .collect();
        let b: Vec<Rat> = self
            .terms
            .iter()
            .map(|t| Rat::new(1.into(), h.into()) - int(t.q_power as i64))
            .collect();
        let tau = solve(&m, &b).ok_or(TodaError::InconsistentShift)?;
        let shift = solve(self.lattice.gram(), &tau).ok_or(TodaError::InconsistentShift)?;
        Ok(Conversion { h, marks, shift })
    }

    /// The same operator in shifted coordinates, where every term carries
    /// `q^1` and `Q = q^h`.
    pub fn change_of_variables(&self) -> Result<(TodaSpec, Conversion), TodaError> {
        let conv = self.conversion()?;
        let terms = self
            .terms
            .iter()
            .map(|t| PotentialTerm {
                q_power: 1,
                ..t.clone()
            })
            .collect();
        let spec = TodaSpec {
            name: self.name.clone(),
            lattice: self.lattice.clone(),
            terms,
            grading_h: conv.h,
            cone: self.cone.clone(),
        };
        Ok((spec, conv))
    }

    /// Converts to uniform form if needed.
    pub fn uniform(&self) -> Result<TodaSpec, TodaError> {
        if self.is_uniform() {
            Ok(self.clone())
        } else {
            Ok(self.change_of_variables()?.0)
        }
    }

    /// The potential `U(x)` of a uniform-q spec as a trigonometric polynomial.
    pub fn potential(&self) -> Result<TrigPoly, TodaError> {
        if !self.is_uniform() {
            return Err(TodaError::NotUniform);
        }
        Ok(TrigPoly::from_terms(
            &self.lattice,
            self.terms
                .iter()
                .map(|t| (t.weight.clone(), RatFn::from_rat(t.coeff.clone()))),
        )?)
    }

    /// Parses the declarative text format:
    ///
    /// ```text
    /// # comment
    /// name A2-by-hand
    /// gram 2 -1
    /// gram -1 2
    /// term 1 0 : 2 0        # weight : coefficient q-power
    /// term 0 1 : 2 0
    /// term -1 -1 : 2 1
    /// cone 1 0
    /// cone 0 1
    /// h 3                   # only for uniform specs; otherwise derived
    /// ```
    pub fn from_text(text: &str) -> Result<TodaSpec, TodaError> {
        let mut name = String::from("custom");
        let mut gram: Vec<Vec<i64>> = Vec::new();
        let mut raw_terms: Vec<(usize, Vec<i32>, Rat, u32)> = Vec::new();
        let mut cone: Vec<Vec<i32>> = Vec::new();
        let mut h: Option<u32> = None;
        let err = |line: usize, msg: String| TodaError::Parse { line, msg };
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let ints = |s: &str| -> Result<Vec<i64>, TodaError> {
                s.split_whitespace()
                    .map(|x| x.parse::<i64>().map_err(|e| err(line_no, format!("'{x}': {e}"))))
                    .collect()
            };
            match key {
                "name" => name = rest.trim().to_string(),
                "gram" => gram.push(ints(rest)?),
                "cone" => cone.push(ints(rest)?.into_iter().map(|x| x as i32).collect()),
                "h" => {
                    let v = ints(rest)?;
                    if v.len() != 1 || v[0] < 1 {
                        return Err(err(line_no, "h takes one positive integer".into()));
                    }
                    h = Some(v[0] as u32);
                }
                "term" => {
                    let (w, data) = rest
                        .split_once(':')
                        .ok_or_else(|| err(line_no, "expected 'term <weight> : <coeff> <q-power>'".into()))?;
                    let w: Vec<i32> = ints(w)?.into_iter().map(|x| x as i32).collect();
                    let data: Vec<&str> = data.split_whitespace().collect();
                    if data.len() != 2 {
                        return Err(err(line_no, "expected '<coeff> <q-power>' after ':'".into()));
                    }
                    let coeff: Rat = data[0]
                        .parse()
                        .map_err(|_| err(line_no, format!("bad coefficient '{}'", data[0])))?;
                    let qp: u32 = data[1]
                        .parse()
                        .map_err(|_| err(line_no, format!("bad q-power '{}'", data[1])))?;
                    raw_terms.push((line_no, w, coeff, qp));
                }
                other => return Err(err(line_no, format!("unknown keyword '{other}'"))),
            }
        }
        let lattice = LatticeData::from_rows(&gram)?;
        let terms: Vec<PotentialTerm> = raw_terms
            .into_iter()
            .map(|(_, w, coeff, q_power)| PotentialTerm {
                weight: Weight(w),
                coeff,
                q_power,
            })
            .collect();
        let uniform = !terms.is_empty() && terms.iter().all(|t| t.q_power == 1);
        if uniform {
            let h = h.ok_or_else(|| err(0, "uniform specs must state h".into()))?;
            TodaSpec::new(name, lattice, terms, h, cone)
        } else {
            let spec = TodaSpec::custom(name, lattice, terms, cone)?;
            if let Some(h) = h {
                if h != spec.grading_h {
                    return Err(TodaError::Grading(format!(
                        "stated h = {h} but the affine relation gives {}",
                        spec.grading_h
                    )));
                }
            }
            Ok(spec)
        }
    }
}

impl fmt::Display for TodaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (rank {}, h = {}): U =", self.name, self.rank(), self.grading_h)?;
        for (i, t) in self.terms.iter().enumerate() {
            let q = match (self.is_uniform(), t.q_power) {
                (true, _) => " q".to_string(),
                (false, 0) => String::new(),
                (false, 1) => " Q".to_string(),
                (false, p) => format!(" Q^{p}"),
            };
            let sep = if i == 0 { " " } else { " + " };
            write!(f, "{sep}{}{q} e^{}", t.coeff, t.weight)?;
        }
        Ok(())
    }
}
