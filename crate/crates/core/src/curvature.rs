//! Spaces of algebraic curvature tensors `R(g)` and weak curvature tensors `P(u)`,
//! the Berger test, and the structural checks on them.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::ambient::{gram, WedgeSpace};
use crate::error::{ForgeError, Result};
use crate::lie::{matrix_strings, LieAlgebra};
use crate::linalg::{Matrix, SparseEchelon, Subspace};
use crate::scalar::{to_canonical, Q};
use crate::standard::{self as st};

/// A linear map `Lambda^2 V -> g`, stored by its values on the wedge basis `e_a ^ e_b` (a < b)
/// as coordinates in the basis of `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvatureMap {
    pub size: usize,
    pub values: Vec<Vec<Q>>,
}

impl CurvatureMap {
    /// The endomorphism `R(e_a ^ e_b)` for a wedge-basis index.
    pub fn endo(&self, g: &LieAlgebra, pair: usize) -> Matrix {
        g.element(&self.values[pair])
    }

    /// All wedge-basis values as matrices.
    pub fn endos(&self, g: &LieAlgebra) -> Vec<Matrix> {
        (0..self.values.len()).map(|p| self.endo(g, p)).collect()
    }

    /// `R(e_a ^ e_b)` for any ordered pair, with `R(e_b ^ e_a) = -R(e_a ^ e_b)`.
    pub fn at(&self, g: &LieAlgebra, ws: &WedgeSpace, a: usize, b: usize) -> Matrix {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => self.endo(g, ws.pair_index(a, b)),
            std::cmp::Ordering::Greater => self.endo(g, ws.pair_index(b, a)).scale(&-Q::one()),
            std::cmp::Ordering::Equal => Matrix::zeros(self.size, self.size),
        }
    }

    /// Flattened `(R(e_a ^ e_b))_{a<b}` as one vector, for comparing maps into different algebras.
    pub fn flat_values(&self, g: &LieAlgebra) -> Vec<Q> {
        self.endos(g).iter().flat_map(Matrix::flatten).collect()
    }

    /// Nonzero values keyed `"a^b"` (1-based), as coordinates in the basis of `g`.
    pub fn to_json(&self) -> BTreeMap<String, Vec<String>> {
        let ws = WedgeSpace::for_ambient((self.size - 4) / 2);
        ws.pairs()
            .iter()
            .zip(&self.values)
            .filter(|(_, v)| v.iter().any(|x| !x.is_zero()))
            .map(|(&(a, b), v)| (WedgeSpace::key(a, b), v.iter().map(to_canonical).collect()))
            .collect()
    }
}

fn unknown(pair: usize, k: usize, dim_g: usize) -> usize {
    pair * dim_g + k
}

/// Canonical basis of `R(g)`: maps `Lambda^2 V -> g` satisfying the first Bianchi identity
/// on all strictly increasing frame triples.
pub fn curvature_space(g: &LieAlgebra) -> Vec<CurvatureMap> {
    let d = g.size();
    let ws = WedgeSpace::for_ambient((d - 4) / 2);
    let dg = g.dim();
    if dg == 0 {
        return vec![];
    }
    let cols = ws.dim() * dg;
    let mut triples = Vec::new();
    for a in 0..d {
        for b in a + 1..d {
            for c in b + 1..d {
                triples.push((a, b, c));
            }
        }
    }
    let rows: Vec<Vec<(usize, Q)>> = triples
        .par_iter()
        .flat_map_iter(|&(a, b, c)| {
            // R(a^b)c + R(b^c)a + R(c^a)b, with R(c^a) = -R(a^c).
            let terms = [(ws.pair_index(a, b), c, 1i64), (ws.pair_index(b, c), a, 1), (ws.pair_index(a, c), b, -1)];
            (0..d).map(move |i| {
                let mut row = Vec::new();
                for &(pair, w, s) in &terms {
                    for (k, x) in g.basis().iter().enumerate() {
                        let v = x.get(i, w);
                        if !v.is_zero() {
                            row.push((unknown(pair, k, dg), if s > 0 { v.clone() } else { -v.clone() }));
                        }
                    }
                }
                row
            })
        })
        .filter(|r| !r.is_empty())
        .collect();
    let mut sys = SparseEchelon::new(cols);
    for r in rows {
        sys.push(r);
    }
    sys.nullspace()
        .basis()
        .iter()
        .map(|v| CurvatureMap { size: d, values: v.chunks(dg).map(<[Q]>::to_vec).collect() })
        .collect()
}

/// Independent check of the first Bianchi identity on every frame triple, in matrix form.
pub fn bianchi_holds(g: &LieAlgebra, r: &CurvatureMap) -> bool {
    let d = g.size();
    let ws = WedgeSpace::for_ambient((d - 4) / 2);
    let endos = r.endos(g);
    let val = |a: usize, b: usize, w: usize| -> Vec<Q> {
        if a == b {
            return vec![Q::zero(); d];
        }
        let (lo, hi, s) = if a < b { (a, b, 1) } else { (b, a, -1) };
        let m = &endos[ws.pair_index(lo, hi)];
        (0..d).map(|i| if s > 0 { m.get(i, w).clone() } else { -m.get(i, w).clone() }).collect()
    };
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                let (x, y, z) = (val(a, b, c), val(b, c, a), val(c, a, b));
                if (0..d).any(|i| !(x[i].clone() + &y[i] + &z[i]).is_zero()) {
                    return false;
                }
            }
        }
    }
    true
}

/// Pairing symmetry `eta(R(u^v)z, w) = eta(R(z^w)u, v)` on all frame pairs.
pub fn pairing_symmetric(g: &LieAlgebra, r: &CurvatureMap) -> bool {
    let d = g.size();
    let ws = WedgeSpace::new(gram_for_size(d));
    let endos = r.endos(g);
    let pairs = ws.pairs().to_vec();
    for (i, &(u, v)) in pairs.iter().enumerate() {
        for (j, &(z, w)) in pairs.iter().enumerate().skip(i + 1) {
            if ws.pairing(&endos[i], z, w) != ws.pairing(&endos[j], u, v) {
                return false;
            }
        }
    }
    true
}

fn gram_for_size(d: usize) -> Matrix {
    gram((d - 4) / 2)
}

/// `R` vanishes on the `eta^eta`-orthogonal complement of `g` inside `Lambda^2 V`.
pub fn vanishes_off_algebra(g: &LieAlgebra, r: &CurvatureMap) -> bool {
    let d = g.size();
    let ws = WedgeSpace::new(gram_for_size(d));
    // Pairing rows: <g_k, e_a ^ e_b> for each basis element.
    let rows: Vec<Vec<Q>> = g
        .basis()
        .iter()
        .map(|x| ws.pairs().iter().map(|&(a, b)| ws.pairing(x, a, b)).collect())
        .collect();
    let complement = if rows.is_empty() {
        Subspace::full(ws.dim())
    } else {
        Matrix::from_rows(rows).expect("rectangular").nullspace()
    };
    complement.basis().iter().all(|omega| {
        let mut acc = vec![Q::zero(); g.dim()];
        for (p, c) in omega.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (k, x) in r.values[p].iter().enumerate() {
                acc[k] += c * x;
            }
        }
        acc.iter().all(Zero::is_zero)
    })
}

/// `L(R(g))`: the span of all values of all curvature maps.
pub fn curvature_image(g: &LieAlgebra, rs: &[CurvatureMap]) -> Subspace {
    let d = g.size();
    let mut l = Subspace::zero(d * d);
    for r in rs {
        for m in r.endos(g) {
            l.insert(&m.flatten());
        }
    }
    l
}

#[derive(Clone, Debug)]
pub struct BergerReport {
    pub dim_r: usize,
    pub dim_l: usize,
    pub berger: bool,
    /// Basis elements of `g` spanning a complement of `L(R(g))`.
    pub defect: Vec<Matrix>,
    pub curvature: Vec<CurvatureMap>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BergerJson {
    pub dim_g: usize,
    pub dim_r: usize,
    pub dim_l: usize,
    pub berger: bool,
    pub defect: Vec<Vec<Vec<String>>>,
    pub curvature_basis: Vec<BTreeMap<String, Vec<String>>>,
}

impl BergerReport {
    pub fn to_json(&self, g: &LieAlgebra) -> BergerJson {
        BergerJson {
            dim_g: g.dim(),
            dim_r: self.dim_r,
            dim_l: self.dim_l,
            berger: self.berger,
            defect: self.defect.iter().map(matrix_strings).collect(),
            curvature_basis: self.curvature.iter().map(CurvatureMap::to_json).collect(),
        }
    }
}

pub fn berger_check(g: &LieAlgebra) -> BergerReport {
    let d = g.size();
    let rs = curvature_space(g);
    let l = curvature_image(g, &rs);
    let defect: Vec<Matrix> = l
        .complement_in(g.span())
        .expect("same ambient")
        .into_iter()
        .map(|v| Matrix::from_flat(d, d, v).expect("square"))
        .collect();
    BergerReport { dim_r: rs.len(), dim_l: l.dim(), berger: defect.is_empty(), defect, curvature: rs }
}

/// A weak curvature map `P: E -> u`, by coordinates of `P(x_i)` in the basis of `u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakCurvatureMap {
    pub values: Vec<Vec<Q>>,
}

/// `P(u)` for `u` acting on a Euclidean space (identity Gram matrix), given by matrices on it.
pub fn weak_curvature_space_on(ops: &[Matrix]) -> Vec<WeakCurvatureMap> {
    let Some(first) = ops.first() else { return vec![] };
    let e = first.rows();
    let du = ops.len();
    let mut sys = SparseEchelon::new(e * du);
    // eta(P(x_a) x_b, x_c) = (A_k)_{c b} summed with coefficients y_{a k}.
    for a in 0..e {
        for b in 0..e {
            for c in 0..e {
                let mut row = Vec::new();
                for &(x, y, z) in &[(a, b, c), (b, c, a), (c, a, b)] {
                    for (k, op) in ops.iter().enumerate() {
                        let v = op.get(z, y);
                        if !v.is_zero() {
                            row.push((x * du + k, v.clone()));
                        }
                    }
                }
                sys.push(row);
            }
        }
    }
    sys.nullspace()
        .basis()
        .iter()
        .map(|v| WeakCurvatureMap { values: v.chunks(du).map(<[Q]>::to_vec).collect() })
        .collect()
}

/// Restriction of each basis element of `u ⊂ u(n)` to `E = span{e_i, f_i}`.
pub fn e_block(u: &LieAlgebra) -> Vec<Matrix> {
    let d = u.size();
    let n = (d - 4) / 2;
    u.basis().iter().map(|x| x.block(2, 2 + 2 * n, 2, 2 + 2 * n)).collect()
}

pub fn weak_curvature_space(u: &LieAlgebra) -> Vec<WeakCurvatureMap> {
    weak_curvature_space_on(&e_block(u))
}

fn flat_span(g: &LieAlgebra, rs: &[CurvatureMap]) -> Subspace {
    let d = g.size();
    let w = d * (d - 1) / 2;
    Subspace::from_spanning(w * d * d, rs.iter().map(|r| r.flat_values(g)).collect())
}

fn weak_flat_span(u: &LieAlgebra, ps: &[WeakCurvatureMap]) -> Subspace {
    let ops = e_block(u);
    let e = u.size() - 4;
    let len = e * e * e;
    let vecs = ps
        .iter()
        .map(|p| {
            let mut out = Vec::with_capacity(len);
            for coords in &p.values {
                let mut m = Matrix::zeros(e, e);
                for (c, op) in coords.iter().zip(&ops) {
                    if !c.is_zero() {
                        m = m.add(&op.scale(c));
                    }
                }
                out.extend(m.flatten());
            }
            out
        })
        .collect();
    Subspace::from_spanning(len, vecs)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionReport {
    pub dim_r: usize,
    pub dim_r_um: usize,
    pub dim_r_sod: usize,
    pub r_holds: bool,
    pub dim_p: usize,
    pub dim_p_um: usize,
    pub dim_p_sod: usize,
    pub p_holds: bool,
}

/// Checks `R(u) = R(u ∩ u(m)) + R(u ∩ sod(m+1..n))` as a direct sum, and the same for `P`.
pub fn decomposition_check(u: &LieAlgebra, m: usize) -> Result<DecompositionReport> {
    let n = u.ambient_n().ok_or_else(|| ForgeError::Dimension("not an ambient algebra".into()))?;
    if m > n {
        return Err(ForgeError::Constraint("0 <= m <= n".into()));
    }
    let mut outer = st::u_block_elems(n, 1, m);
    outer.extend(st::sod_elems(n, m + 1, n));
    let um = st::algebra_of(n, &st::u_block_elems(n, 1, m))?;
    let sod = st::algebra_of(n, &st::sod_elems(n, m + 1, n))?;
    if !st::algebra_of(n, &outer)?.span().contains(u.span())? {
        return Err(ForgeError::Constraint("u must lie in u(m) + sod(m+1..n)".into()));
    }
    let u1 = u.intersect(&um)?;
    let u2 = u.intersect(&sod)?;

    let r = flat_span(u, &curvature_space(u));
    let r1 = flat_span(&u1, &curvature_space(&u1));
    let r2 = flat_span(&u2, &curvature_space(&u2));
    // Direct: dim(r1 + r2) = dim r1 + dim r2.
    let r12 = r1.sum(&r2)?;
    let r_holds = r12.dim() == r1.dim() + r2.dim() && r12 == r;

    let p = weak_flat_span(u, &weak_curvature_space(u));
    let p1 = weak_flat_span(&u1, &weak_curvature_space(&u1));
    let p2 = weak_flat_span(&u2, &weak_curvature_space(&u2));
    let p12 = p1.sum(&p2)?;
    let p_holds = p12.dim() == p1.dim() + p2.dim() && p12 == p;
    Ok(DecompositionReport {
        dim_r: r.dim(),
        dim_r_um: r1.dim(),
        dim_r_sod: r2.dim(),
        r_holds,
        dim_p: p.dim(),
        dim_p_um: p1.dim(),
        dim_p_sod: p2.dim(),
        p_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::standard::{standard_subalgebra, StandardTag};

    #[test]
    fn c_has_one_curvature_tensor_on_q1_q2() {
        let g = standard_subalgebra(StandardTag::C, 0).unwrap();
        let rs = curvature_space(&g);
        assert_eq!(rs.len(), 1);
        let ws = WedgeSpace::for_ambient(0);
        for (p, v) in rs[0].values.iter().enumerate() {
            assert_eq!(!v[0].is_zero(), p == ws.pair_index(2, 3));
        }
    }

    #[test]
    fn zero_algebra_has_no_curvature() {
        let g = LieAlgebra::zero(6);
        assert!(curvature_space(&g).is_empty());
        assert!(berger_check(&g).berger);
    }

    #[test]
    fn trivial_u_has_no_weak_curvature() {
        assert!(weak_curvature_space_on(&[]).is_empty());
    }

    #[test]
    fn decomposition_with_zero_sod_part() {
        let u = standard_subalgebra(StandardTag::UBlock { k: 1, l: 1 }, 2).unwrap();
        let rep = decomposition_check(&u, 1).unwrap();
        assert!(rep.r_holds && rep.p_holds, "{rep:?}");
        assert_eq!((rep.dim_r_sod, rep.dim_p_sod), (0, 0));
    }
}
