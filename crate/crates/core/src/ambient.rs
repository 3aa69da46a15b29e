//! The pseudo-Hermitian model space of signature (2, 2n+2).
//!
//! Frame order is fixed as `p1, p2, e_1..e_n, f_1..f_n, q1, q2`, which is also the
//! order of the chart coordinates `x^1..x^{2n+4}` at the origin.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{ForgeError, Result};
use crate::linalg::{Matrix, Subspace};
use crate::scalar::{self, Q};

/// Index bookkeeping for the frame of a given `n` (all indices 0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Frame {
    pub n: usize,
}

impl Frame {
    pub fn new(n: usize) -> Self {
        Frame { n }
    }
    pub fn dim(&self) -> usize {
        2 * self.n + 4
    }
    pub fn p1(&self) -> usize {
        0
    }
    pub fn p2(&self) -> usize {
        1
    }
    /// `e_i` for `i` in `1..=n`.
    pub fn e(&self, i: usize) -> usize {
        assert!((1..=self.n).contains(&i), "e_{i} outside 1..={}", self.n);
        1 + i
    }
    /// `f_i` for `i` in `1..=n`.
    pub fn f(&self, i: usize) -> usize {
        assert!((1..=self.n).contains(&i), "f_{i} outside 1..={}", self.n);
        1 + self.n + i
    }
    pub fn q1(&self) -> usize {
        2 * self.n + 2
    }
    pub fn q2(&self) -> usize {
        2 * self.n + 3
    }
    pub fn label(&self, idx: usize) -> String {
        let n = self.n;
        match idx {
            0 => "p1".into(),
            1 => "p2".into(),
            i if i < 2 + n => format!("e{}", i - 1),
            i if i < 2 + 2 * n => format!("f{}", i - 1 - n),
            i if i == 2 * n + 2 => "q1".into(),
            i if i == 2 * n + 3 => "q2".into(),
            _ => panic!("frame index {idx} out of range"),
        }
    }
    pub fn unit(&self, idx: usize) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.dim()];
        v[idx] = Q::one();
        v
    }
}

/// Frame, Gram matrix of the metric and the complex structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ambient {
    pub frame: Frame,
    pub gram: Matrix,
    pub j: Matrix,
}

pub fn gram(n: usize) -> Matrix {
    let fr = Frame::new(n);
    let mut g = Matrix::zeros(fr.dim(), fr.dim());
    for (a, b) in [(fr.p1(), fr.q1()), (fr.p2(), fr.q2())] {
        g.set(a, b, Q::one());
        g.set(b, a, Q::one());
    }
    for i in 1..=n {
        g.set(fr.e(i), fr.e(i), Q::one());
        g.set(fr.f(i), fr.f(i), Q::one());
    }
    g
}

pub fn complex_structure(n: usize) -> Matrix {
    let fr = Frame::new(n);
    let mut j = Matrix::zeros(fr.dim(), fr.dim());
    // Columns are images: J p1 = p2, J p2 = -p1, J e_i = f_i, J f_i = -e_i, J q1 = q2, J q2 = -q1.
    let mut pair = |from: usize, to: usize| {
        j.set(to, from, Q::one());
        j.set(from, to, -Q::one());
    };
    pair(fr.p1(), fr.p2());
    for i in 1..=n {
        pair(fr.e(i), fr.f(i));
    }
    pair(fr.q1(), fr.q2());
    j
}

pub fn build_ambient(n: usize) -> Ambient {
    Ambient { frame: Frame::new(n), gram: gram(n), j: complex_structure(n) }
}

impl Ambient {
    pub fn n(&self) -> usize {
        self.frame.n
    }
    pub fn dim(&self) -> usize {
        self.frame.dim()
    }
    pub fn eta(&self, u: &[Q], v: &[Q]) -> Q {
        crate::linalg::dot(u, &self.gram.apply(v))
    }
    pub fn is_eta_skew(&self, m: &Matrix) -> bool {
        is_skew_for(&self.gram, m)
    }
    pub fn commutes_with_j(&self, m: &Matrix) -> bool {
        m.commutator(&self.j).is_zero()
    }
    /// Whether `m` maps `span{p1, p2}` into itself.
    pub fn preserves_p_plane(&self, m: &Matrix) -> bool {
        let fr = self.frame;
        (0..self.dim())
            .filter(|&r| r != fr.p1() && r != fr.p2())
            .all(|r| m.get(r, fr.p1()).is_zero() && m.get(r, fr.p2()).is_zero())
    }
    /// Restricted Gram rank of a subspace: rank of `B G B^T` for a basis `B`.
    pub fn restricted_gram_rank(&self, w: &Subspace) -> usize {
        restricted_gram_rank(&self.gram, w)
    }
    /// The `eta`-orthogonal complement.
    pub fn orthogonal(&self, w: &Subspace) -> Subspace {
        let lowered: Vec<Vec<Q>> = w.basis().iter().map(|v| self.gram.apply(v)).collect();
        Subspace::from_spanning(self.dim(), lowered).annihilator()
    }
}

/// `m^T G + G m == 0`
pub fn is_skew_for(gram: &Matrix, m: &Matrix) -> bool {
    m.transpose().mul(gram).add(&gram.mul(m)).is_zero()
}

pub fn restricted_gram_rank(gram: &Matrix, w: &Subspace) -> usize {
    if w.is_zero() {
        return 0;
    }
    let b = w.basis_matrix();
    b.mul(gram).mul(&b.transpose()).rank()
}

/// Coordinates `(a1, a2, B, C, z1, z2, c)` on the stabilizer of `span{p1, p2}` in `u(1, n+1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SevenTuple {
    #[serde(with = "scalar::serde_q")]
    pub a1: Q,
    #[serde(with = "scalar::serde_q")]
    pub a2: Q,
    #[serde(rename = "B", with = "scalar::serde_qmat")]
    pub b: Vec<Vec<Q>>,
    #[serde(rename = "C", with = "scalar::serde_qmat")]
    pub c_sym: Vec<Vec<Q>>,
    #[serde(with = "scalar::serde_qvec")]
    pub z1: Vec<Q>,
    #[serde(with = "scalar::serde_qvec")]
    pub z2: Vec<Q>,
    #[serde(with = "scalar::serde_q")]
    pub c: Q,
}

impl SevenTuple {
    pub fn zero(n: usize) -> Self {
        SevenTuple {
            a1: Q::zero(),
            a2: Q::zero(),
            b: vec![vec![Q::zero(); n]; n],
            c_sym: vec![vec![Q::zero(); n]; n],
            z1: vec![Q::zero(); n],
            z2: vec![Q::zero(); n],
            c: Q::zero(),
        }
    }

    /// The size `n` implied by the vector parts, if they agree.
    pub fn inferred_n(&self) -> Result<usize> {
        let n = self.z1.len();
        let square = |m: &Vec<Vec<Q>>| m.len() == n && m.iter().all(|r| r.len() == n);
        if self.z2.len() != n || !square(&self.b) || !square(&self.c_sym) {
            return Err(ForgeError::Dimension(
                "seven-tuple blocks have inconsistent sizes".into(),
            ));
        }
        Ok(n)
    }

    /// `B` skew-symmetric and `C` symmetric.
    pub fn satisfies_block_constraints(&self) -> bool {
        let n = self.b.len();
        (0..n).all(|i| {
            (0..n).all(|j| self.b[i][j] == -self.b[j][i].clone() && self.c_sym[i][j] == self.c_sym[j][i])
        })
    }

    pub fn to_matrix(&self, n: usize) -> Result<Matrix> {
        if self.inferred_n()? != n {
            return Err(ForgeError::Dimension(format!(
                "seven-tuple of size {} used with n = {n}",
                self.z1.len()
            )));
        }
        let fr = Frame::new(n);
        let mut m = Matrix::zeros(fr.dim(), fr.dim());
        let (p1, p2, q1, q2) = (fr.p1(), fr.p2(), fr.q1(), fr.q2());
        m.set(p1, p1, self.a1.clone());
        m.set(p1, p2, -self.a2.clone());
        m.set(p2, p1, self.a2.clone());
        m.set(p2, p2, self.a1.clone());
        m.set(p1, q2, -self.c.clone());
        m.set(p2, q1, self.c.clone());
        m.set(q1, q1, -self.a1.clone());
        m.set(q1, q2, -self.a2.clone());
        m.set(q2, q1, self.a2.clone());
        m.set(q2, q2, -self.a1.clone());
        for i in 1..=n {
            let (z1, z2) = (&self.z1[i - 1], &self.z2[i - 1]);
            m.set(p1, fr.e(i), -z1.clone());
            m.set(p1, fr.f(i), -z2.clone());
            m.set(p2, fr.e(i), z2.clone());
            m.set(p2, fr.f(i), -z1.clone());
            m.set(fr.e(i), q1, z1.clone());
            m.set(fr.e(i), q2, -z2.clone());
            m.set(fr.f(i), q1, z2.clone());
            m.set(fr.f(i), q2, z1.clone());
            for j in 1..=n {
                let (b, c) = (&self.b[i - 1][j - 1], &self.c_sym[i - 1][j - 1]);
                m.set(fr.e(i), fr.e(j), b.clone());
                m.set(fr.e(i), fr.f(j), -c.clone());
                m.set(fr.f(i), fr.e(j), c.clone());
                m.set(fr.f(i), fr.f(j), b.clone());
            }
        }
        Ok(m)
    }

    /// Reads the coordinates back from a matrix, failing if the matrix is not of the block form.
    pub fn from_matrix(n: usize, m: &Matrix) -> Result<Self> {
        let fr = Frame::new(n);
        if m.rows() != fr.dim() || m.cols() != fr.dim() {
            return Err(ForgeError::Dimension(format!(
                "{}x{} matrix for n = {n}",
                m.rows(),
                m.cols()
            )));
        }
        let t = SevenTuple {
            a1: m.get(fr.p1(), fr.p1()).clone(),
            a2: m.get(fr.p2(), fr.p1()).clone(),
            b: (1..=n).map(|i| (1..=n).map(|j| m.get(fr.e(i), fr.e(j)).clone()).collect()).collect(),
            c_sym: (1..=n)
                .map(|i| (1..=n).map(|j| m.get(fr.f(i), fr.e(j)).clone()).collect())
                .collect(),
            z1: (1..=n).map(|i| m.get(fr.e(i), fr.q1()).clone()).collect(),
            z2: (1..=n).map(|i| m.get(fr.f(i), fr.q1()).clone()).collect(),
            c: m.get(fr.p2(), fr.q1()).clone(),
        };
        if &t.to_matrix(n)? != m || !t.satisfies_block_constraints() {
            return Err(ForgeError::Constraint(
                "matrix is not an element of the stabilizer of span{p1,p2} in u(1,n+1)".into(),
            ));
        }
        Ok(t)
    }

    /// `self += s * other`, blockwise.
    pub fn add_scaled(&mut self, s: &Q, other: &SevenTuple) {
        self.a1 += s * &other.a1;
        self.a2 += s * &other.a2;
        self.c += s * &other.c;
        for (x, y) in self.z1.iter_mut().zip(&other.z1) {
            *x += s * y;
        }
        for (x, y) in self.z2.iter_mut().zip(&other.z2) {
            *x += s * y;
        }
        for (rx, ry) in self.b.iter_mut().zip(&other.b) {
            for (x, y) in rx.iter_mut().zip(ry) {
                *x += s * y;
            }
        }
        for (rx, ry) in self.c_sym.iter_mut().zip(&other.c_sym) {
            for (x, y) in rx.iter_mut().zip(ry) {
                *x += s * y;
            }
        }
    }

    /// Real trace of the `C` block.
    pub fn trace_c(&self) -> Q {
        (0..self.c_sym.len()).map(|i| self.c_sym[i][i].clone()).sum()
    }
}

/// An element of `so(2, 2n+2)` with an optional seven-tuple view.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraElement {
    pub n: usize,
    pub matrix: Matrix,
    pub seven_tuple: Option<SevenTuple>,
}

impl AlgebraElement {
    pub fn from_matrix(n: usize, matrix: Matrix) -> Self {
        let seven_tuple = SevenTuple::from_matrix(n, &matrix).ok();
        AlgebraElement { n, matrix, seven_tuple }
    }
}

/// Builds the matrix of a seven-tuple; the boolean reports whether `(B, C)` lies in `u(n)`.
pub fn seven_tuple_to_matrix(t: &SevenTuple, n: usize) -> Result<(AlgebraElement, bool)> {
    let matrix = t.to_matrix(n)?;
    let ok = t.satisfies_block_constraints();
    Ok((AlgebraElement { n, matrix, seven_tuple: Some(t.clone()) }, ok))
}

pub fn bracket(x: &Matrix, y: &Matrix) -> Matrix {
    x.commutator(y)
}

fn mat_vec(m: &[Vec<Q>], v: &[Q]) -> Vec<Q> {
    m.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn mat_mul(a: &[Vec<Q>], b: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| &a[i][k] * &b[k][j]).sum()).collect()).collect()
}

fn mat_comb(terms: &[(&Vec<Vec<Q>>, i64)]) -> Vec<Vec<Q>> {
    let n = terms[0].0.len();
    (0..n)
        .map(|i| (0..n).map(|j| terms.iter().map(|(m, s)| &m[i][j] * Q::from_integer((*s).into())).sum()).collect())
        .collect()
}

/// Action of the `A^1 + A^2 + u(n)` part of `x` on `(w1, w2) in N^1 + N^2`.
fn act_on_n(x: &SevenTuple, w1: &[Q], w2: &[Q]) -> (Vec<Q>, Vec<Q>) {
    let (bw1, bw2, cw1, cw2) = (mat_vec(&x.b, w1), mat_vec(&x.b, w2), mat_vec(&x.c_sym, w1), mat_vec(&x.c_sym, w2));
    let v1 = (0..w1.len()).map(|i| &x.a1 * &w1[i] + &x.a2 * &w2[i] + &bw1[i] - &cw2[i]).collect();
    let v2 = (0..w1.len()).map(|i| &x.a1 * &w2[i] - &x.a2 * &w1[i] + &cw1[i] + &bw2[i]).collect();
    (v1, v2)
}

/// Bracket in seven-tuple coordinates, from the bracket relations of the graded decomposition
/// `(A^1 + A^2 + u(n)) x (N^1 + N^2 + C)`.
pub fn bracket_tuples(x: &SevenTuple, y: &SevenTuple) -> SevenTuple {
    let mut out = SevenTuple::zero(x.z1.len());
    let (bb, cc) = (mat_mul(&x.b, &y.b), mat_mul(&x.c_sym, &y.c_sym));
    let (bb_, cc_) = (mat_mul(&y.b, &x.b), mat_mul(&y.c_sym, &x.c_sym));
    out.b = mat_comb(&[(&bb, 1), (&cc, -1), (&bb_, -1), (&cc_, 1)]);
    let (cb, bc) = (mat_mul(&x.c_sym, &y.b), mat_mul(&x.b, &y.c_sym));
    let (cb_, bc_) = (mat_mul(&y.c_sym, &x.b), mat_mul(&y.b, &x.c_sym));
    out.c_sym = mat_comb(&[(&cb, 1), (&bc, 1), (&cb_, -1), (&bc_, -1)]);
    let (xy1, xy2) = act_on_n(x, &y.z1, &y.z2);
    let (yx1, yx2) = act_on_n(y, &x.z1, &x.z2);
    out.z1 = xy1.iter().zip(&yx1).map(|(a, b)| a - b).collect();
    out.z2 = xy2.iter().zip(&yx2).map(|(a, b)| a - b).collect();
    let two = Q::from_integer(2.into());
    let zw: Q = (0..x.z1.len()).map(|i| -(&x.z1[i] * &y.z2[i]) + &x.z2[i] * &y.z1[i]).sum();
    out.c = &two * (&x.a1 * &y.c - &y.a1 * &x.c + zw);
    out
}

/// Identification of bivectors with skew endomorphisms: `(u^v) w = <u,w> v - <v,w> u`.
#[derive(Clone, Debug)]
pub struct WedgeSpace {
    pub gram: Matrix,
    gram_inv: Matrix,
    pairs: Vec<(usize, usize)>,
}

impl WedgeSpace {
    pub fn new(gram: Matrix) -> Self {
        let gram_inv = gram.inverse().expect("nondegenerate Gram matrix");
        let d = gram.rows();
        let pairs = (0..d).flat_map(|a| (a + 1..d).map(move |b| (a, b))).collect();
        WedgeSpace { gram, gram_inv, pairs }
    }

    pub fn for_ambient(n: usize) -> Self {
        WedgeSpace::new(gram(n))
    }

    pub fn base_dim(&self) -> usize {
        self.gram.rows()
    }

    /// Basis pairs `(a, b)` with `a < b`, in lexicographic order.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn dim(&self) -> usize {
        self.pairs.len()
    }

    pub fn pair_index(&self, a: usize, b: usize) -> usize {
        assert!(a < b);
        let d = self.base_dim();
        a * d - a * (a + 1) / 2 + (b - a - 1)
    }

    /// `"a^b"` with 1-based indices.
    pub fn key(a: usize, b: usize) -> String {
        format!("{}^{}", a + 1, b + 1)
    }

    pub fn wedge_endo(&self, u: &[Q], v: &[Q]) -> Matrix {
        let d = self.base_dim();
        let gu = self.gram.apply(u);
        let gv = self.gram.apply(v);
        let mut m = Matrix::zeros(d, d);
        for x in 0..d {
            for y in 0..d {
                let val = &v[x] * &gu[y] - &u[x] * &gv[y];
                if !val.is_zero() {
                    m.set(x, y, val);
                }
            }
        }
        m
    }

    /// Endomorphism of the basis bivector `e_a ^ e_b`.
    pub fn basis_endo(&self, a: usize, b: usize) -> Matrix {
        let d = self.base_dim();
        let mut ea = vec![Q::zero(); d];
        let mut eb = vec![Q::zero(); d];
        ea[a] = Q::one();
        eb[b] = Q::one();
        self.wedge_endo(&ea, &eb)
    }

    /// Coordinates on the basis `{e_a ^ e_b : a < b}` of a skew endomorphism.
    pub fn endo_to_wedge(&self, m: &Matrix) -> Result<Vec<Q>> {
        if !is_skew_for(&self.gram, m) {
            return Err(ForgeError::Constraint("endomorphism is not skew for the metric".into()));
        }
        let lowered = m.mul(&self.gram_inv);
        Ok(self.pairs.iter().map(|&(a, b)| lowered.get(b, a).clone()).collect())
    }

    pub fn wedge_to_endo(&self, w: &[Q]) -> Matrix {
        let d = self.base_dim();
        let mut m = Matrix::zeros(d, d);
        for (coef, &(a, b)) in w.iter().zip(&self.pairs) {
            if !coef.is_zero() {
                m = m.add(&self.basis_endo(a, b).scale(coef));
            }
        }
        m
    }

    /// `eta^eta(A, z^w) = <A z, w>` for a skew endomorphism `A`.
    pub fn pairing(&self, a: &Matrix, z: usize, w: usize) -> Q {
        let col: Vec<Q> = (0..self.base_dim()).map(|r| a.get(r, z).clone()).collect();
        let gw: Vec<Q> = (0..self.base_dim()).map(|r| self.gram.get(r, w).clone()).collect();
        crate::linalg::dot(&col, &gw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qr};

    #[test]
    fn n0_gram_and_j() {
        let a = build_ambient(0);
        let expected_gram = Matrix::from_i64(&[&[0, 0, 1, 0], &[0, 0, 0, 1], &[1, 0, 0, 0], &[0, 1, 0, 0]]);
        assert_eq!(a.gram, expected_gram);
        let expected_j =
            Matrix::from_i64(&[&[0, -1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, -1], &[0, 0, 1, 0]]);
        assert_eq!(a.j, expected_j);
    }

    #[test]
    fn j_squares_to_minus_one_and_preserves_eta() {
        for n in 0..4 {
            let a = build_ambient(n);
            let d = a.dim();
            assert_eq!(a.j.mul(&a.j), Matrix::identity(d).scale(&q(-1)));
            assert_eq!(a.j.transpose().mul(&a.gram).mul(&a.j), a.gram);
        }
    }

    #[test]
    fn n0_seven_tuple_display() {
        let mut t = SevenTuple::zero(0);
        t.a1 = q(2);
        t.a2 = q(3);
        t.c = q(5);
        let m = t.to_matrix(0).unwrap();
        let expected = Matrix::from_i64(&[&[2, -3, 0, -5], &[3, 2, 5, 0], &[0, 0, -2, -3], &[0, 0, 3, -2]]);
        assert_eq!(m, expected);
    }

    #[test]
    fn seven_tuple_round_trip() {
        let mut t = SevenTuple::zero(2);
        t.a1 = qr(1, 2);
        t.b[0][1] = q(1);
        t.b[1][0] = q(-1);
        t.c_sym[0][1] = q(4);
        t.c_sym[1][0] = q(4);
        t.z1 = vec![q(1), q(2)];
        t.z2 = vec![q(-3), q(0)];
        t.c = q(7);
        let m = t.to_matrix(2).unwrap();
        assert_eq!(SevenTuple::from_matrix(2, &m).unwrap(), t);
        let a = build_ambient(2);
        assert!(a.is_eta_skew(&m));
        assert!(a.commutes_with_j(&m));
    }

    #[test]
    fn wedge_basic_images() {
        let a = build_ambient(0);
        let ws = WedgeSpace::for_ambient(0);
        let fr = a.frame;
        let p1p2 = ws.wedge_endo(&fr.unit(fr.p1()), &fr.unit(fr.p2()));
        assert_eq!(p1p2.apply(&fr.unit(fr.q1())), fr.unit(fr.p2()));
        let minus_p1: Vec<Q> = fr.unit(fr.p1()).iter().map(|x| -x).collect();
        assert_eq!(p1p2.apply(&fr.unit(fr.q2())), minus_p1);
    }

    #[test]
    fn wedge_round_trip_on_basis() {
        let ws = WedgeSpace::for_ambient(1);
        for (i, &(a, b)) in ws.pairs().iter().enumerate() {
            assert_eq!(ws.pair_index(a, b), i);
            let m = ws.basis_endo(a, b);
            let w = ws.endo_to_wedge(&m).unwrap();
            let mut expected = vec![Q::zero(); ws.dim()];
            expected[i] = Q::one();
            assert_eq!(w, expected);
        }
    }
}
