//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Variables are indexed from 0, so the coordinate `x^i` of a chart is variable `i - 1`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{ForgeError, Result};
use crate::scalar::{self, Q};

/// Exponent vector of a monomial.
pub type Mono = Vec<u16>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Mono, Q>,
}

fn mono_degree(m: &[u16]) -> u32 {
    m.iter().map(|&e| e as u32).sum()
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    /// The coordinate function of variable `i` (0-based).
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable {i} out of range for {nvars} variables");
        let mut m = vec![0; nvars];
        m[i] = 1;
        Poly::monomial(nvars, m, Q::one())
    }

    pub fn monomial(nvars: usize, exps: Mono, coef: Q) -> Self {
        assert_eq!(exps.len(), nvars, "exponent vector length");
        let mut p = Poly::zero(nvars);
        if !coef.is_zero() {
            p.terms.insert(exps, coef);
        }
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging duplicates.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Mono, Q)>) -> Result<Self> {
        let mut p = Poly::zero(nvars);
        for (m, c) in terms {
            if m.len() != nvars {
                return Err(ForgeError::Dimension(format!(
                    "exponent vector of length {} in a {nvars}-variable polynomial",
                    m.len()
                )));
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| mono_degree(m)).max()
    }

    /// Smallest total degree among the terms; `None` for the zero polynomial.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| mono_degree(m)).min()
    }

    /// Indices of the variables that occur in some term.
    pub fn support(&self) -> Vec<usize> {
        let mut seen = vec![false; self.nvars];
        for m in self.terms.keys() {
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    seen[i] = true;
                }
            }
        }
        (0..self.nvars).filter(|&i| seen[i]).collect()
    }

    fn add_term(&mut self, m: Mono, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_compatible(&self, other: &Poly) {
        assert_eq!(self.nvars, other.nvars, "polynomials over different variable counts");
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Partial derivative with respect to variable `var` (0-based).
    pub fn partial(&self, var: usize) -> Result<Poly> {
        if var >= self.nvars {
            return Err(ForgeError::Index(format!(
                "variable {var} out of range for {} variables",
                self.nvars
            )));
        }
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m[var];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2[var] = e - 1;
            out.add_term(m2, c * Q::from_integer(e.into()));
        }
        Ok(out)
    }

    /// Partial derivative, panicking on an out-of-range variable.
    pub fn d(&self, var: usize) -> Poly {
        self.partial(var).expect("variable index in range")
    }

    /// Value at the origin, i.e. the constant term.
    pub fn eval_origin(&self) -> Q {
        self.terms.get(&vec![0; self.nvars]).cloned().unwrap_or_else(Q::zero)
    }

    pub fn eval(&self, point: &[Q]) -> Q {
        assert_eq!(point.len(), self.nvars, "evaluation point dimension");
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.iter()) {
                for _ in 0..e {
                    t *= x;
                }
            }
            acc += t;
        }
        acc
    }

    /// Drops every term of total degree above `max_deg`.
    pub fn truncate(&self, max_deg: u32) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| mono_degree(m) <= max_deg)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Product with all terms of total degree above `max_deg` discarded.
    pub fn mul_trunc(&self, other: &Poly, max_deg: u32) -> Poly {
        self.mul_impl(other, Some(max_deg))
    }

    fn mul_impl(&self, other: &Poly, max_deg: Option<u32>) -> Poly {
        self.check_compatible(other);
        let mut out = Poly::zero(self.nvars);
        if self.is_zero() || other.is_zero() {
            return out;
        }
        let rhs: Vec<(&Mono, &Q, u32)> =
            other.terms.iter().map(|(m, c)| (m, c, mono_degree(m))).collect();
        for (ma, ca) in &self.terms {
            let da = mono_degree(ma);
            for &(mb, cb, db) in &rhs {
                if let Some(cap) = max_deg {
                    if da + db > cap {
                        continue;
                    }
                }
                let m: Mono = ma.iter().zip(mb.iter()).map(|(a, b)| a + b).collect();
                out.add_term(m, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::constant(self.nvars, Q::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }
}

/// One term in JSON: exponent vector and canonical coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyTerm(pub Mono, #[serde(with = "scalar::serde_q")] pub Q);

impl Poly {
    pub fn to_json_terms(&self) -> Vec<PolyTerm> {
        self.terms.iter().map(|(m, c)| PolyTerm(m.clone(), c.clone())).collect()
    }

    pub fn from_json_terms(nvars: usize, terms: &[PolyTerm]) -> Result<Self> {
        Poly::from_terms(nvars, terms.iter().map(|t| (t.0.clone(), t.1.clone())))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", scalar::to_canonical(c))?;
            for (i, &e) in m.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{}", i + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.mul_impl(rhs, None)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        self.check_compatible(rhs);
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        self.check_compatible(rhs);
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self += &rhs;
        self
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(mut self, rhs: Poly) -> Poly {
        self -= &rhs;
        self
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}
