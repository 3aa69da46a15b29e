//! Named subspaces and subalgebras of the stabilizer of `span{p1, p2}` in `u(1, n+1)`.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::ambient::SevenTuple;
use crate::error::{ForgeError, Result};
use crate::lie::LieAlgebra;
use crate::linalg::Matrix;
use crate::scalar::{q, qr, Q};

/// Tags of the standard subalgebras. Ranges are 1-based and inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StandardTag {
    A1,
    A2,
    TildeA2 { m: usize },
    N1 { k: usize, l: usize },
    N2 { k: usize, l: usize },
    C,
    /// `u(n)` acting on `E`.
    Un,
    Sun,
    /// `u(e_k, ..., e_l)`.
    UBlock { k: usize, l: usize },
    SuBlock { k: usize, l: usize },
    Sod { k: usize, l: usize },
    J { k: usize, l: usize },
    I0,
    Full,
    SuFull,
}

impl fmt::Display for StandardTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StandardTag::A1 => write!(f, "A1"),
            StandardTag::A2 => write!(f, "A2"),
            StandardTag::TildeA2 { m } => write!(f, "tildeA2({m})"),
            StandardTag::N1 { k, l } => write!(f, "N1({k}..{l})"),
            StandardTag::N2 { k, l } => write!(f, "N2({k}..{l})"),
            StandardTag::C => write!(f, "C"),
            StandardTag::Un => write!(f, "u(n)"),
            StandardTag::Sun => write!(f, "su(n)"),
            StandardTag::UBlock { k, l } => write!(f, "u({k}..{l})"),
            StandardTag::SuBlock { k, l } => write!(f, "su({k}..{l})"),
            StandardTag::Sod { k, l } => write!(f, "sod({k}..{l})"),
            StandardTag::J { k, l } => write!(f, "J({k}..{l})"),
            StandardTag::I0 => write!(f, "I0"),
            StandardTag::Full => write!(f, "full"),
            StandardTag::SuFull => write!(f, "su_full"),
        }
    }
}

fn parse_range(s: &str) -> Option<(usize, usize)> {
    let (a, b) = s.split_once("..").or_else(|| s.split_once(','))?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

impl FromStr for StandardTag {
    type Err = ForgeError;

    /// Accepts e.g. `A1`, `tildeA2(1)`, `N1(1..2)`, `sod(2,3)`, `u(n)`, `u(1..2)`, `su_full`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || ForgeError::Parse(format!("unknown standard subalgebra tag {s:?}"));
        let s = s.trim();
        let simple = match s {
            "A1" => Some(StandardTag::A1),
            "A2" => Some(StandardTag::A2),
            "C" => Some(StandardTag::C),
            "u(n)" => Some(StandardTag::Un),
            "su(n)" => Some(StandardTag::Sun),
            "I0" => Some(StandardTag::I0),
            "full" => Some(StandardTag::Full),
            "su_full" => Some(StandardTag::SuFull),
            _ => None,
        };
        if let Some(t) = simple {
            return Ok(t);
        }
        let (head, rest) = s.split_once('(').ok_or_else(bad)?;
        let args = rest.strip_suffix(')').ok_or_else(bad)?;
        if head == "tildeA2" {
            return Ok(StandardTag::TildeA2 { m: args.trim().parse().map_err(|_| bad())? });
        }
        let (k, l) = parse_range(args).ok_or_else(bad)?;
        Ok(match head {
            "N1" => StandardTag::N1 { k, l },
            "N2" => StandardTag::N2 { k, l },
            "u" => StandardTag::UBlock { k, l },
            "su" => StandardTag::SuBlock { k, l },
            "sod" => StandardTag::Sod { k, l },
            "J" => StandardTag::J { k, l },
            _ => return Err(bad()),
        })
    }
}

fn check_range(n: usize, k: usize, l: usize) -> Result<()> {
    if 1 <= k && k <= l && l <= n {
        Ok(())
    } else {
        Err(ForgeError::Constraint(format!("range {k}..{l} must satisfy 1 <= k <= l <= n = {n}")))
    }
}

fn matrices(n: usize, tuples: &[SevenTuple]) -> Vec<Matrix> {
    tuples.iter().map(|t| t.to_matrix(n).expect("consistent tuple size")).collect()
}

// Generators below accept empty ranges (`k > l`) and return no elements for them.

pub fn a1_elem(n: usize) -> SevenTuple {
    let mut t = SevenTuple::zero(n);
    t.a1 = Q::one();
    t
}

pub fn a2_elem(n: usize) -> SevenTuple {
    let mut t = SevenTuple::zero(n);
    t.a2 = Q::one();
    t
}

pub fn c_elem(n: usize) -> SevenTuple {
    let mut t = SevenTuple::zero(n);
    t.c = Q::one();
    t
}

/// `J_{k..l}`; the identity `C` block on `E_{k..l}`.
pub fn j_range_elem(n: usize, k: usize, l: usize) -> SevenTuple {
    let mut t = SevenTuple::zero(n);
    for i in k..=l.min(n) {
        t.c_sym[i - 1][i - 1] = Q::one();
    }
    t
}

/// `(0, 1, 0, 0, ...) + J_{m+1..n}`.
pub fn tilde_a2_elem(n: usize, m: usize) -> SevenTuple {
    let mut t = j_range_elem(n, m + 1, n);
    t.a2 = Q::one();
    t
}

/// The full complex structure `J = (0, 1, 0, I, 0, 0, 0)`.
pub fn j_elem(n: usize) -> SevenTuple {
    tilde_a2_elem(n, 0)
}

pub fn i0_elem(n: usize) -> SevenTuple {
    let d = n as i64 + 2;
    let mut t = SevenTuple::zero(n);
    t.a2 = -qr(n as i64, d);
    for i in 0..n {
        t.c_sym[i][i] = qr(2, d);
    }
    t
}

pub fn n1_elems(n: usize, k: usize, l: usize) -> Vec<SevenTuple> {
    (k.max(1)..=l.min(n))
        .map(|i| {
            let mut t = SevenTuple::zero(n);
            t.z1[i - 1] = Q::one();
            t
        })
        .collect()
}

pub fn n2_elems(n: usize, k: usize, l: usize) -> Vec<SevenTuple> {
    (k.max(1)..=l.min(n))
        .map(|i| {
            let mut t = SevenTuple::zero(n);
            t.z2[i - 1] = Q::one();
            t
        })
        .collect()
}

/// `so` generators acting diagonally on `E^1_{k..l}` and `E^2_{k..l}`.
pub fn sod_elems(n: usize, k: usize, l: usize) -> Vec<SevenTuple> {
    let mut out = Vec::new();
    for i in k.max(1)..=l.min(n) {
        for j in i + 1..=l.min(n) {
            let mut t = SevenTuple::zero(n);
            t.b[i - 1][j - 1] = -Q::one();
            t.b[j - 1][i - 1] = Q::one();
            out.push(t);
        }
    }
    out
}

/// Symmetric `C` generators on `E_{k..l}` (off-diagonal and diagonal).
fn csym_elems(n: usize, k: usize, l: usize) -> Vec<SevenTuple> {
    let mut out = Vec::new();
    for i in k.max(1)..=l.min(n) {
        for j in i..=l.min(n) {
            let mut t = SevenTuple::zero(n);
            t.c_sym[i - 1][j - 1] = Q::one();
            t.c_sym[j - 1][i - 1] = Q::one();
            out.push(t);
        }
    }
    out
}

pub fn u_block_elems(n: usize, k: usize, l: usize) -> Vec<SevenTuple> {
    let mut out = sod_elems(n, k, l);
    out.extend(csym_elems(n, k, l));
    out
}

/// `su(e_k..e_l)`: the traceless part of `u(e_k..e_l)`.
pub fn su_block_elems(n: usize, k: usize, l: usize) -> Vec<SevenTuple> {
    let mut out = sod_elems(n, k, l);
    let (lo, hi) = (k.max(1), l.min(n));
    for i in lo..=hi {
        for j in i + 1..=hi {
            let mut t = SevenTuple::zero(n);
            t.c_sym[i - 1][j - 1] = Q::one();
            t.c_sym[j - 1][i - 1] = Q::one();
            out.push(t);
        }
    }
    for i in lo..hi {
        let mut t = SevenTuple::zero(n);
        t.c_sym[i - 1][i - 1] = Q::one();
        t.c_sym[i][i] = -Q::one();
        out.push(t);
    }
    out
}

pub fn full_elems(n: usize) -> Vec<SevenTuple> {
    let mut out = vec![a1_elem(n), a2_elem(n), c_elem(n)];
    out.extend(u_block_elems(n, 1, n));
    out.extend(n1_elems(n, 1, n));
    out.extend(n2_elems(n, 1, n));
    out
}

/// Elements of the full algebra with `2 a2 + tr C = 0`.
pub fn su_full_elems(n: usize) -> Vec<SevenTuple> {
    let mut out = vec![a1_elem(n), c_elem(n)];
    out.extend(su_block_elems(n, 1, n));
    out.extend(n1_elems(n, 1, n));
    out.extend(n2_elems(n, 1, n));
    if n >= 1 {
        let mut t = a2_elem(n);
        t.c_sym[0][0] = q(-2);
        out.push(t);
    }
    out
}

/// The listed generators of the standard subalgebra named by `tag`, in a fixed order.
pub fn standard_tuples(tag: StandardTag, n: usize) -> Result<Vec<SevenTuple>> {
    Ok(match tag {
        StandardTag::A1 => vec![a1_elem(n)],
        StandardTag::A2 => vec![a2_elem(n)],
        StandardTag::TildeA2 { m } => {
            if m > n {
                return Err(ForgeError::Constraint(format!("m = {m} exceeds n = {n}")));
            }
            vec![tilde_a2_elem(n, m)]
        }
        StandardTag::N1 { k, l } => {
            check_range(n, k, l)?;
            n1_elems(n, k, l)
        }
        StandardTag::N2 { k, l } => {
            check_range(n, k, l)?;
            n2_elems(n, k, l)
        }
        StandardTag::C => vec![c_elem(n)],
        StandardTag::Un => u_block_elems(n, 1, n),
        StandardTag::Sun => su_block_elems(n, 1, n),
        StandardTag::UBlock { k, l } => {
            check_range(n, k, l)?;
            u_block_elems(n, k, l)
        }
        StandardTag::SuBlock { k, l } => {
            check_range(n, k, l)?;
            su_block_elems(n, k, l)
        }
        StandardTag::Sod { k, l } => {
            check_range(n, k, l)?;
            sod_elems(n, k, l)
        }
        StandardTag::J { k, l } => {
            check_range(n, k, l)?;
            vec![j_range_elem(n, k, l)]
        }
        StandardTag::I0 => vec![i0_elem(n)],
        StandardTag::Full => full_elems(n),
        StandardTag::SuFull => su_full_elems(n),
    })
}

/// Builds the standard subalgebra named by `tag` inside the model space of size `2n+4`.
pub fn standard_subalgebra(tag: StandardTag, n: usize) -> Result<LieAlgebra> {
    LieAlgebra::from_spanning(2 * n + 4, &matrices(n, &standard_tuples(tag, n)?))
}

/// Span of seven-tuples as a subalgebra (fails if not closed).
pub fn algebra_of(n: usize, tuples: &[SevenTuple]) -> Result<LieAlgebra> {
    LieAlgebra::from_spanning(2 * n + 4, &matrices(n, tuples))
}

/// Complex trace `2 a2 + tr C` of a seven-tuple, up to the factor `i`.
pub fn complex_trace(t: &SevenTuple) -> Q {
    q(2) * &t.a2 + t.trace_c()
}

pub fn is_zero_tuple(t: &SevenTuple) -> bool {
    t.a1.is_zero()
        && t.a2.is_zero()
        && t.c.is_zero()
        && t.z1.iter().all(Zero::is_zero)
        && t.z2.iter().all(Zero::is_zero)
        && t.b.iter().flatten().all(Zero::is_zero)
        && t.c_sym.iter().flatten().all(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_round_trip() {
        for s in ["A1", "tildeA2(1)", "N1(1..2)", "sod(2..3)", "u(n)", "u(1..2)", "J(1..1)", "su_full"] {
            let t: StandardTag = s.parse().unwrap();
            assert_eq!(t.to_string().parse::<StandardTag>().unwrap(), t);
        }
        assert!("bogus(1)".parse::<StandardTag>().is_err());
    }

    #[test]
    fn dimensions() {
        for n in 0..=3 {
            let full = standard_subalgebra(StandardTag::Full, n).unwrap();
            assert_eq!(full.dim(), n * n + 2 * n + 3);
            assert_eq!(standard_subalgebra(StandardTag::SuFull, n).unwrap().dim(), n * n + 2 * n + 2);
        }
        assert_eq!(standard_subalgebra(StandardTag::Sod { k: 1, l: 3 }, 3).unwrap().dim(), 3);
        assert!(standard_subalgebra(StandardTag::Sod { k: 2, l: 1 }, 3).is_err());
    }

    #[test]
    fn tilde_a2_at_m_equal_n_is_a2() {
        let a = standard_subalgebra(StandardTag::TildeA2 { m: 2 }, 2).unwrap();
        assert_eq!(a, standard_subalgebra(StandardTag::A2, 2).unwrap());
    }

    #[test]
    fn n0_full_is_solvable_with_derived_c() {
        // [(a + ib, 0), (0, c)] = (0, 2ac): the derived algebra is C and ad(A1) has eigenvalue 2 on it.
        let g = standard_subalgebra(StandardTag::Full, 0).unwrap();
        assert_eq!(g.dim(), 3);
        assert_eq!(g.derived(), standard_subalgebra(StandardTag::C, 0).unwrap().span());
        assert!(g.is_solvable());
        assert!(!g.is_nilpotent());
    }
}
