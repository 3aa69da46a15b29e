//! Dense exact matrices, reduced row echelon form and the subspace lattice.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{ForgeError, Result};
use crate::scalar::{self, Q};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Q::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(ForgeError::Dimension("ragged rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Row-major flattening; inverse of [`Matrix::flatten`].
    pub fn from_flat(rows: usize, cols: usize, data: Vec<Q>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(ForgeError::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let v = rows.iter().map(|r| r.iter().map(|&x| scalar::q(x)).collect()).collect();
        Matrix::from_rows(v).expect("rectangular literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Q {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Q) {
        self.data[r * self.cols + c] = v;
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &Q) {
        self.data[r * self.cols + c] += v;
    }

    pub fn row(&self, r: usize) -> &[Q] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Q>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn flatten(&self) -> Vec<Q> {
        self.data.clone()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.add_to(i, j, &(a * b));
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows)
            .map(|i| {
                let mut acc = Q::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix sum shape");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix difference shape");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    /// `self * other - other * self`
    pub fn commutator(&self, other: &Matrix) -> Matrix {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn trace(&self) -> Q {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).sum()
    }

    /// Reduced row echelon form with unit pivots; returns the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut rows = self.to_rows();
        let pivots = rref_in_place(&mut rows, self.cols);
        rows.truncate(pivots.len());
        let mut full = rows;
        full.resize(self.rows, vec![Q::zero(); self.cols]);
        (Matrix::from_rows_or_empty(full, self.rows, self.cols), pivots)
    }

    fn from_rows_or_empty(rows: Vec<Vec<Q>>, r: usize, c: usize) -> Matrix {
        if r == 0 {
            return Matrix::zeros(0, c);
        }
        Matrix::from_rows(rows).expect("rectangular")
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.to_rows();
        rref_in_place(&mut rows, self.cols).len()
    }

    /// Canonical basis of `{v : self * v = 0}`.
    pub fn nullspace(&self) -> Subspace {
        let mut rows = self.to_rows();
        let pivots = rref_in_place(&mut rows, self.cols);
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![Q::zero(); self.cols];
            v[free] = Q::one();
            for (r, &p) in pivots.iter().enumerate() {
                let a = &rows[r][free];
                if !a.is_zero() {
                    v[p] = -a.clone();
                }
            }
            basis.push(v);
        }
        Subspace::from_spanning(self.cols, basis)
    }

    pub fn determinant(&self) -> Q {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.to_rows();
        let mut det = Q::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return Q::zero();
            };
            if p != col {
                a.swap(p, col);
                det = -det;
            }
            let piv = a[col][col].clone();
            det *= &piv;
            for r in col + 1..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let f = &a[r][col] / &piv;
                for c in col..n {
                    let t = &f * &a[col][c];
                    a[r][c] -= t;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(ForgeError::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug: Vec<Vec<Q>> = (0..n)
            .map(|i| {
                let mut row = self.row(i).to_vec();
                row.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
                row
            })
            .collect();
        let pivots = rref_in_place(&mut aug, 2 * n);
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return Err(ForgeError::Singular(format!("{n}x{n} matrix is not invertible")));
        }
        let rows = aug.into_iter().map(|r| r[n..].to_vec()).collect();
        Matrix::from_rows(rows)
    }

    /// Columns `c0..c1` of rows `r0..r1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix {
        let mut m = Matrix::zeros(r1 - r0, c1 - c0);
        for r in r0..r1 {
            for c in c0..c1 {
                m.set(r - r0, c - c0, self.get(r, c).clone());
            }
        }
        m
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Gauss-Jordan elimination in place. Nonzero rows end up first, in echelon order,
/// with unit pivots; the returned vector lists pivot columns row by row.
pub fn rref_in_place(rows: &mut [Vec<Q>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        if !inv.is_one() {
            for x in rows[r][c..].iter_mut() {
                if !x.is_zero() {
                    *x *= &inv;
                }
            }
        }
        let pivot_row = rows[r].clone();
        let nz: Vec<usize> = (c..cols).filter(|&j| !pivot_row[j].is_zero()).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for &j in &nz {
                let t = &f * &pivot_row[j];
                row[j] -= t;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    let mut acc = Q::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

/// Coefficients `c` with `sum_i c_i * vectors[i] = target`, or `None` if `target` is outside the span.
/// Free coefficients are set to zero.
pub fn solve_combination(vectors: &[Vec<Q>], target: &[Q]) -> Option<Vec<Q>> {
    let k = vectors.len();
    let mut rows: Vec<Vec<Q>> = (0..target.len())
        .map(|j| {
            let mut r: Vec<Q> = vectors.iter().map(|v| v[j].clone()).collect();
            r.push(target[j].clone());
            r
        })
        .collect();
    let pivots = rref_in_place(&mut rows, k + 1);
    if pivots.contains(&k) {
        return None;
    }
    let mut c = vec![Q::zero(); k];
    for (r, &p) in pivots.iter().enumerate() {
        c[p] = rows[r][k].clone();
    }
    Some(c)
}

/// Incremental row echelon form over sparse rows, for large homogeneous systems.
#[derive(Clone, Debug, Default)]
pub struct SparseEchelon {
    cols: usize,
    /// Pivot column to row; each row has its smallest column at the pivot with value 1.
    rows: BTreeMap<usize, BTreeMap<usize, Q>>,
}

impl SparseEchelon {
    pub fn new(cols: usize) -> Self {
        SparseEchelon { cols, rows: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds the equation `sum row[j] x_j = 0`; returns whether the rank grew.
    pub fn push(&mut self, entries: impl IntoIterator<Item = (usize, Q)>) -> bool {
        let mut row: BTreeMap<usize, Q> = BTreeMap::new();
        for (j, v) in entries {
            assert!(j < self.cols, "column {j} out of range");
            if v.is_zero() {
                continue;
            }
            let e = row.entry(j).or_insert_with(Q::zero);
            *e += v;
            if e.is_zero() {
                row.remove(&j);
            }
        }
        let mut cursor = 0;
        loop {
            let next = row.range(cursor..).map(|(&j, _)| j).find(|j| self.rows.contains_key(j));
            let Some(p) = next else { break };
            let f = row.remove(&p).expect("present");
            for (&j, v) in self.rows[&p].range(p + 1..) {
                let e = row.entry(j).or_insert_with(Q::zero);
                *e -= &f * v;
                if e.is_zero() {
                    row.remove(&j);
                }
            }
            cursor = p + 1;
        }
        let Some((&lead, lv)) = row.iter().next() else {
            return false;
        };
        let inv = lv.recip();
        for v in row.values_mut() {
            *v *= &inv;
        }
        self.rows.insert(lead, row);
        true
    }

    /// Canonical basis of the solution space.
    pub fn nullspace(&self) -> Subspace {
        if self.rows.is_empty() {
            return Subspace::full(self.cols);
        }
        let dense: Vec<Vec<Q>> = self
            .rows
            .values()
            .map(|r| {
                let mut v = vec![Q::zero(); self.cols];
                for (&j, x) in r {
                    v[j] = x.clone();
                }
                v
            })
            .collect();
        Subspace::from_spanning(self.cols, dense).annihilator()
    }
}

/// A linear subspace of `Q^ambient`, stored as its reduced row echelon basis.
///
/// The stored basis is canonical: two spanning sets of the same subspace give
/// identical values, so `==` is subspace equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<Q>>,
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Subspace(dim {} in {})", self.dim(), self.ambient)?;
        for b in &self.basis {
            let row: Vec<String> = b.iter().map(|x| x.to_string()).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        Ok(())
    }
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace::from_spanning(ambient, Matrix::identity(ambient).to_rows())
    }

    pub fn from_spanning(ambient: usize, mut vectors: Vec<Vec<Q>>) -> Self {
        for v in &vectors {
            assert_eq!(v.len(), ambient, "vector length differs from ambient dimension");
        }
        let pivots = rref_in_place(&mut vectors, ambient);
        vectors.truncate(pivots.len());
        Subspace { ambient, basis: vectors, pivots }
    }

    pub fn try_from_spanning(ambient: usize, vectors: Vec<Vec<Q>>) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient) {
            return Err(ForgeError::Dimension(format!(
                "vector of length {} in ambient dimension {ambient}",
                v.len()
            )));
        }
        Ok(Subspace::from_spanning(ambient, vectors))
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Q>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    /// Remainder of `v` after eliminating the pivot coordinates; zero iff `v` lies in the subspace.
    pub fn reduce(&self, v: &[Q]) -> Vec<Q> {
        let mut w = v.to_vec();
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            if w[p].is_zero() {
                continue;
            }
            let f = w[p].clone();
            for (x, y) in w.iter_mut().zip(b) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        w
    }

    pub fn contains_vec(&self, v: &[Q]) -> bool {
        assert_eq!(v.len(), self.ambient, "vector length differs from ambient dimension");
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Adds `v` to the subspace, keeping the basis canonical. Returns whether the dimension grew.
    pub fn insert(&mut self, v: &[Q]) -> bool {
        let mut w = self.reduce(v);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = w[p].recip();
        for x in w.iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        for b in self.basis.iter_mut() {
            if b[p].is_zero() {
                continue;
            }
            let f = b[p].clone();
            for (x, y) in b.iter_mut().zip(&w) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        let pos = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(pos, p);
        self.basis.insert(pos, w);
        true
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(ForgeError::Dimension(format!(
                "ambient dimensions {} and {} differ",
                self.ambient, other.ambient
            )));
        }
        Ok(())
    }

    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        self.check_ambient(other)?;
        Ok(other.basis.iter().all(|v| self.contains_vec(v)))
    }

    pub fn equals(&self, other: &Subspace) -> Result<bool> {
        self.check_ambient(other)?;
        Ok(self == other)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let mut s = self.clone();
        for v in &other.basis {
            s.insert(v);
        }
        Ok(s)
    }

    /// Annihilator with respect to the standard dot product.
    pub fn annihilator(&self) -> Subspace {
        if self.basis.is_empty() {
            return Subspace::full(self.ambient);
        }
        Matrix::from_rows(self.basis.clone()).expect("rectangular").nullspace()
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        Ok(self.annihilator().sum(&other.annihilator())?.annihilator())
    }

    /// Canonical vectors spanning a complement of `self` inside `outer`
    /// (the residues of `outer`'s basis, re-echelonized).
    pub fn complement_in(&self, outer: &Subspace) -> Result<Vec<Vec<Q>>> {
        self.check_ambient(outer)?;
        let residues: Vec<Vec<Q>> = outer
            .basis
            .iter()
            .map(|v| self.reduce(v))
            .filter(|w| w.iter().any(|x| !x.is_zero()))
            .collect();
        Ok(Subspace::from_spanning(self.ambient, residues).basis)
    }

    /// Image under a linear map given as a matrix acting on column vectors.
    pub fn image(&self, m: &Matrix) -> Subspace {
        Subspace::from_spanning(m.rows(), self.basis.iter().map(|v| m.apply(v)).collect())
    }

    pub fn basis_matrix(&self) -> Matrix {
        if self.basis.is_empty() {
            return Matrix::zeros(0, self.ambient);
        }
        Matrix::from_rows(self.basis.clone()).expect("rectangular")
    }

    /// Coordinates of `v` in the stored basis, or `None` if `v` is outside the subspace.
    pub fn coordinates(&self, v: &[Q]) -> Option<Vec<Q>> {
        if !self.contains_vec(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }
}
