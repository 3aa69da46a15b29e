//! Matrix Lie algebras: closure, structure constants, derived algebra, center, conjugation.

use num_traits::Zero;
use serde::Serialize;

use crate::ambient::{Ambient, SevenTuple};
use crate::error::{ForgeError, Result};
use crate::linalg::{Matrix, Subspace};
use crate::scalar::{self, Q};

/// A Lie subalgebra of `gl(size)`, stored as a canonical subspace of flattened matrices.
#[derive(Clone, PartialEq, Eq)]
pub struct LieAlgebra {
    size: usize,
    span: Subspace,
    basis: Vec<Matrix>,
    /// `structure[i][j]` holds the coordinates of `[b_i, b_j]`.
    structure: Vec<Vec<Vec<Q>>>,
    derived: Subspace,
    center: Subspace,
}

impl std::fmt::Debug for LieAlgebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LieAlgebra(dim {} in gl({}))", self.dim(), self.size)
    }
}

fn flatten_all(size: usize, mats: &[Matrix]) -> Result<Vec<Vec<Q>>> {
    mats.iter()
        .map(|m| {
            if m.rows() != size || m.cols() != size {
                Err(ForgeError::Dimension(format!(
                    "{}x{} matrix in gl({size})",
                    m.rows(),
                    m.cols()
                )))
            } else {
                Ok(m.flatten())
            }
        })
        .collect()
}

fn unflatten(size: usize, v: &[Q]) -> Matrix {
    Matrix::from_flat(size, size, v.to_vec()).expect("square flattening")
}

impl LieAlgebra {
    pub fn zero(size: usize) -> Self {
        LieAlgebra::from_span(size, Subspace::zero(size * size)).expect("zero algebra is closed")
    }

    /// The span of `mats`, which must already be closed under the bracket.
    pub fn from_spanning(size: usize, mats: &[Matrix]) -> Result<Self> {
        let vecs = flatten_all(size, mats)?;
        LieAlgebra::from_span(size, Subspace::from_spanning(size * size, vecs))
    }

    /// The smallest subalgebra containing `mats`.
    pub fn generated_by(size: usize, mats: &[Matrix]) -> Result<Self> {
        let vecs = flatten_all(size, mats)?;
        let mut span = Subspace::from_spanning(size * size, vecs);
        loop {
            let basis: Vec<Matrix> = span.basis().iter().map(|v| unflatten(size, v)).collect();
            let mut grew = false;
            for i in 0..basis.len() {
                for j in i + 1..basis.len() {
                    grew |= span.insert(&basis[i].commutator(&basis[j]).flatten());
                }
            }
            if !grew {
                break;
            }
        }
        LieAlgebra::from_span(size, span)
    }

    /// Wraps a subspace of flattened matrices, failing with the offending bracket if it is not closed.
    pub fn from_span(size: usize, span: Subspace) -> Result<Self> {
        if span.ambient() != size * size {
            return Err(ForgeError::Dimension(format!(
                "subspace of dimension-{} space used as a subalgebra of gl({size})",
                span.ambient()
            )));
        }
        let basis: Vec<Matrix> = span.basis().iter().map(|v| unflatten(size, v)).collect();
        let d = basis.len();
        let mut structure = vec![vec![Vec::new(); d]; d];
        let mut derived = Subspace::zero(size * size);
        for i in 0..d {
            for j in 0..d {
                if j < i {
                    structure[i][j] = structure[j][i].iter().map(|x: &Q| -x).collect();
                    continue;
                }
                let br = basis[i].commutator(&basis[j]).flatten();
                let coords = span.coordinates(&br).ok_or_else(|| {
                    ForgeError::NotClosed(format!(
                        "[b{}, b{}] = {} lies outside the span",
                        i + 1,
                        j + 1,
                        format_flat(size, &br)
                    ))
                })?;
                derived.insert(&br);
                structure[i][j] = coords;
            }
        }
        // z(g): kernel of X -> ([X, b_1], ..., [X, b_d]) on coordinates.
        let mut rows: Vec<Vec<Q>> = Vec::new();
        for j in 0..d {
            for k in 0..d {
                rows.push((0..d).map(|i| structure[i][j][k].clone()).collect());
            }
        }
        let center_coords = if d == 0 {
            Subspace::zero(0)
        } else if rows.is_empty() {
            Subspace::full(d)
        } else {
            Matrix::from_rows(rows).expect("rectangular").nullspace()
        };
        let center = Subspace::from_spanning(
            size * size,
            center_coords.basis().iter().map(|c| combine(&span, c)).collect(),
        );
        Ok(LieAlgebra { size, span, basis, structure, derived, center })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `n` for an algebra acting on the `(2n+4)`-dimensional model space.
    pub fn ambient_n(&self) -> Option<usize> {
        (self.size >= 4 && self.size.is_multiple_of(2)).then(|| (self.size - 4) / 2)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Matrix] {
        &self.basis
    }

    pub fn span(&self) -> &Subspace {
        &self.span
    }

    pub fn structure_constants(&self) -> &[Vec<Vec<Q>>] {
        &self.structure
    }

    pub fn derived(&self) -> &Subspace {
        &self.derived
    }

    pub fn center(&self) -> &Subspace {
        &self.center
    }

    pub fn derived_algebra(&self) -> LieAlgebra {
        LieAlgebra::from_span(self.size, self.derived.clone()).expect("derived algebra is an ideal")
    }

    pub fn center_algebra(&self) -> LieAlgebra {
        LieAlgebra::from_span(self.size, self.center.clone()).expect("center is abelian")
    }

    pub fn contains_matrix(&self, m: &Matrix) -> bool {
        m.rows() == self.size && m.cols() == self.size && self.span.contains_vec(&m.flatten())
    }

    pub fn coordinates(&self, m: &Matrix) -> Option<Vec<Q>> {
        self.span.coordinates(&m.flatten())
    }

    pub fn element(&self, coords: &[Q]) -> Matrix {
        unflatten(self.size, &combine(&self.span, coords))
    }

    pub fn is_subalgebra_of(&self, other: &LieAlgebra) -> bool {
        self.size == other.size && other.span.contains(&self.span).unwrap_or(false)
    }

    pub fn is_abelian(&self) -> bool {
        self.derived.is_zero()
    }

    /// Lower central series reaches zero.
    pub fn is_nilpotent(&self) -> bool {
        let mut cur = self.span.clone();
        loop {
            let mut next = Subspace::zero(self.size * self.size);
            for v in cur.basis() {
                let x = unflatten(self.size, v);
                for b in &self.basis {
                    next.insert(&x.commutator(b).flatten());
                }
            }
            if next.is_zero() {
                return true;
            }
            if next == cur {
                return false;
            }
            cur = next;
        }
    }

    /// Derived series reaches zero.
    pub fn is_solvable(&self) -> bool {
        let mut cur = self.clone();
        loop {
            if cur.dim() == 0 {
                return true;
            }
            let next = cur.derived_algebra();
            if next.dim() == cur.dim() {
                return false;
            }
            cur = next;
        }
    }

    /// `g = g' + z(g)` with trivial intersection, as for every compact algebra.
    pub fn is_reductive_split(&self) -> bool {
        let meet = self.derived.intersect(&self.center).expect("same ambient");
        meet.is_zero() && self.derived.dim() + self.center.dim() == self.dim()
    }

    /// `{P^{-1} b P}`. With `check_eta`, also requires `P` to preserve the Gram matrix of the model space.
    pub fn conjugate(&self, p: &Matrix, check_eta: bool) -> Result<LieAlgebra> {
        let p_inv = p.inverse()?;
        if check_eta {
            let n = self.ambient_n().ok_or_else(|| {
                ForgeError::Dimension("metric check needs the (2n+4)-dimensional model space".into())
            })?;
            let g = crate::ambient::gram(n);
            if p.transpose().mul(&g).mul(p) != g {
                return Err(ForgeError::Constraint("basis change does not preserve eta".into()));
            }
        }
        let mats: Vec<Matrix> = self.basis.iter().map(|b| p_inv.mul(b).mul(p)).collect();
        LieAlgebra::from_spanning(self.size, &mats)
    }

    pub fn sum(&self, other: &LieAlgebra) -> Result<LieAlgebra> {
        let mut mats = self.basis.clone();
        mats.extend(other.basis.iter().cloned());
        LieAlgebra::generated_by(self.size, &mats)
    }

    pub fn intersect(&self, other: &LieAlgebra) -> Result<LieAlgebra> {
        LieAlgebra::from_span(self.size, self.span.intersect(&other.span)?)
    }

    /// Seven-tuple views of the basis (model-space algebras inside the stabilizer only).
    pub fn seven_tuples(&self) -> Option<Vec<SevenTuple>> {
        let n = self.ambient_n()?;
        self.basis.iter().map(|b| SevenTuple::from_matrix(n, b).ok()).collect()
    }

    /// Every basis element is skew for the metric, commutes with `J` and preserves `span{p1,p2}`.
    pub fn inside_stabilizer(&self) -> bool {
        let Some(n) = self.ambient_n() else { return false };
        let amb = crate::ambient::build_ambient(n);
        self.basis.iter().all(|b| in_stabilizer(&amb, b))
    }

    /// Bracket table: entry `(i, j)` holds the coordinates of `[b_i, b_j]` as canonical strings.
    pub fn bracket_table(&self) -> Vec<Vec<Vec<String>>> {
        self.structure
            .iter()
            .map(|row| row.iter().map(|c| c.iter().map(scalar::to_canonical).collect()).collect())
            .collect()
    }

    pub fn to_json(&self) -> AlgebraJson {
        AlgebraJson {
            size: self.size,
            n: self.ambient_n(),
            dim: self.dim(),
            basis: self.basis.iter().map(matrix_strings).collect(),
            seven_tuples: self.seven_tuples(),
            derived_dim: self.derived.dim(),
            center_dim: self.center.dim(),
        }
    }
}

pub fn in_stabilizer(amb: &Ambient, m: &Matrix) -> bool {
    amb.is_eta_skew(m) && amb.commutes_with_j(m) && amb.preserves_p_plane(m)
}

fn combine(span: &Subspace, coords: &[Q]) -> Vec<Q> {
    let mut out = vec![Q::zero(); span.ambient()];
    for (c, b) in coords.iter().zip(span.basis()) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(b) {
            if !x.is_zero() {
                *o += c * x;
            }
        }
    }
    out
}

pub fn matrix_strings(m: &Matrix) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| r.iter().map(scalar::to_canonical).collect()).collect()
}

fn format_flat(size: usize, v: &[Q]) -> String {
    let rows: Vec<String> = v
        .chunks(size)
        .map(|r| r.iter().map(scalar::to_canonical).collect::<Vec<_>>().join(" "))
        .collect();
    format!("[{}]", rows.join("; "))
}

/// Serializable summary of an algebra.
#[derive(Clone, Debug, Serialize)]
pub struct AlgebraJson {
    pub size: usize,
    pub n: Option<usize>,
    pub dim: usize,
    pub basis: Vec<Vec<Vec<String>>>,
    pub seven_tuples: Option<Vec<SevenTuple>>,
    pub derived_dim: usize,
    pub center_dim: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn diag(vals: &[i64]) -> Matrix {
        let mut m = Matrix::zeros(vals.len(), vals.len());
        for (i, v) in vals.iter().enumerate() {
            m.set(i, i, q(*v));
        }
        m
    }

    #[test]
    fn abelian_algebra() {
        let g = LieAlgebra::from_spanning(3, &[diag(&[1, 0, 0]), diag(&[0, 1, 0])]).unwrap();
        assert!(g.is_abelian());
        assert_eq!(g.center(), g.span());
    }

    #[test]
    fn not_closed_reports_witness() {
        let e12 = Matrix::from_i64(&[&[0, 1], &[0, 0]]);
        let e21 = Matrix::from_i64(&[&[0, 0], &[1, 0]]);
        let err = LieAlgebra::from_spanning(2, &[e12.clone(), e21.clone()]).unwrap_err();
        assert!(matches!(err, ForgeError::NotClosed(_)));
        assert_eq!(LieAlgebra::generated_by(2, &[e12, e21]).unwrap().dim(), 3);
    }

    #[test]
    fn conjugation_by_identity() {
        let g = LieAlgebra::from_spanning(2, &[diag(&[1, -1])]).unwrap();
        assert_eq!(g.conjugate(&Matrix::identity(2), false).unwrap(), g);
    }
}
