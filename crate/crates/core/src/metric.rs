//! Polynomial metrics on `R^{2n+4}` of the form
//! `2dx^1dx^{2n+3} + 2dx^2dx^{2n+4} + sum (dx^i)^2 + 2 sum u^i dx^i dx^{2n+4} +
//! f_1 (dx^{2n+3})^2 + f_2 (dx^{2n+4})^2 + 2 f_3 dx^{2n+3} dx^{2n+4}`,
//! and the function blocks that realize each holonomy family.
//!
//! Coordinates are written with the 1-based chart index `x^k`; `Poly` variables are `k - 1`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::ambient::gram;
use crate::error::{ForgeError, Result};
use crate::family::{build_family, BuiltFamily, FamilySpec, FamilyTag};
use crate::linalg::Matrix;
use crate::poly::{Poly, PolyTerm};
use crate::scalar::{inv_factorial, q, qr, QValue, Q};

/// The functions `f_1, f_2, f_3` and `u^3..u^{2n+2}` (stored at `u[i - 3]`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricBlocks {
    pub n: usize,
    pub f: [Poly; 3],
    pub u: Vec<Poly>,
}

impl MetricBlocks {
    pub fn zero(n: usize) -> Self {
        let d = 2 * n + 4;
        MetricBlocks { n, f: [Poly::zero(d), Poly::zero(d), Poly::zero(d)], u: vec![Poly::zero(d); 2 * n] }
    }

    fn add_f(&mut self, f: [Poly; 3]) {
        for (a, b) in self.f.iter_mut().zip(f.iter()) {
            *a += b;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricModel {
    pub n: usize,
    pub blocks: MetricBlocks,
    /// Symmetric coefficient matrix `g_ab` (0-based).
    pub g: Vec<Vec<Poly>>,
    /// The family whose holonomy this metric is meant to realize.
    pub family: Option<FamilySpec>,
    /// Readings and flags recorded while building the blocks.
    pub notes: Vec<String>,
}

impl MetricModel {
    pub fn dim(&self) -> usize {
        2 * self.n + 4
    }

    pub fn value_at_origin(&self) -> Matrix {
        let d = self.dim();
        let mut m = Matrix::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                m.set(a, b, self.g[a][b].eval_origin());
            }
        }
        m
    }

    /// Inverse metric from the block form `[[U^T U - F, -U^T, I], [-U, I, 0], [I, 0, 0]]`,
    /// with the product `g g^{-1} = I` checked exactly.
    pub fn inverse(&self) -> Result<Vec<Vec<Poly>>> {
        let n = self.n;
        let d = self.dim();
        let (s, t) = (2 * n + 2, 2 * n + 3);
        let zero = Poly::zero(d);
        let one = Poly::constant(d, Q::one());
        let mut h = vec![vec![zero.clone(); d]; d];
        h[0][s] = one.clone();
        h[s][0] = one.clone();
        h[1][t] = one.clone();
        h[t][1] = one.clone();
        for i in 2..2 + 2 * n {
            h[i][i] = one.clone();
            let ui = &self.g[i][t];
            h[1][i] = -ui;
            h[i][1] = -ui;
        }
        let mut uu = Poly::zero(d);
        for i in 2..2 + 2 * n {
            uu += &(&self.g[i][t] * &self.g[i][t]);
        }
        // U^T U - F on the p-block: F = [[f1, f3], [f3, f2]].
        h[0][0] = -&self.g[s][s];
        h[0][1] = -&self.g[s][t];
        h[1][0] = -&self.g[s][t];
        h[1][1] = &uu - &self.g[t][t];
        for a in 0..d {
            for b in 0..d {
                let mut acc = Poly::zero(d);
                for c in 0..d {
                    if !self.g[a][c].is_zero() && !h[c][b].is_zero() {
                        acc += &(&self.g[a][c] * &h[c][b]);
                    }
                }
                let expect = if a == b { &one } else { &zero };
                if &acc != expect {
                    return Err(ForgeError::Singular(format!(
                        "metric does not have the expected block form (entry ({}, {}) of g g^-1)",
                        a + 1,
                        b + 1
                    )));
                }
            }
        }
        Ok(h)
    }

    /// Whether `f_i` and `u^i` avoid `x^{2n+4}`, and `u^i` also avoids `x^1, x^2`.
    pub fn has_dependency_pattern(&self) -> bool {
        let t = 2 * self.n + 3;
        self.blocks.f.iter().all(|p| !p.support().contains(&t))
            && self.blocks.u.iter().all(|p| p.support().iter().all(|&v| v != t && v != 0 && v != 1))
    }

    pub fn to_json(&self) -> MetricJson {
        let d = self.dim();
        let mut g = BTreeMap::new();
        for a in 0..d {
            for b in a..d {
                if !self.g[a][b].is_zero() {
                    g.insert(format!("{},{}", a + 1, b + 1), self.g[a][b].to_json_terms());
                }
            }
        }
        MetricJson {
            n: self.n,
            f1: self.blocks.f[0].to_json_terms(),
            f2: self.blocks.f[1].to_json_terms(),
            f3: self.blocks.f[2].to_json_terms(),
            u: self
                .blocks
                .u
                .iter()
                .enumerate()
                .filter(|(_, p)| !p.is_zero())
                .map(|(i, p)| ((i + 3).to_string(), p.to_json_terms()))
                .collect(),
            g: Some(g),
            family: self.family.clone(),
            notes: self.notes.clone(),
        }
    }

    pub fn from_json(j: &MetricJson) -> Result<Self> {
        let n = j.n;
        let d = 2 * n + 4;
        let mut blocks = MetricBlocks::zero(n);
        blocks.f = [
            Poly::from_json_terms(d, &j.f1)?,
            Poly::from_json_terms(d, &j.f2)?,
            Poly::from_json_terms(d, &j.f3)?,
        ];
        for (k, terms) in &j.u {
            let i: usize = k.parse().map_err(|_| ForgeError::Parse(format!("u index {k:?} is not an integer")))?;
            if !(3..=2 * n + 2).contains(&i) {
                return Err(ForgeError::Index(format!("u^{i} outside 3..={}", 2 * n + 2)));
            }
            blocks.u[i - 3] = Poly::from_json_terms(d, terms)?;
        }
        let mut m = assemble_metric(blocks)?;
        m.family = j.family.clone();
        m.notes = j.notes.clone();
        if let Some(g) = &j.g {
            let again = m.to_json().g.expect("always present");
            if *g != again {
                return Err(ForgeError::Constraint("listed g does not match the one assembled from f and u".into()));
            }
        }
        Ok(m)
    }
}

/// Metric file format. `g` is informative on output and verified on input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricJson {
    pub n: usize,
    pub f1: Vec<PolyTerm>,
    pub f2: Vec<PolyTerm>,
    pub f3: Vec<PolyTerm>,
    #[serde(default)]
    pub u: BTreeMap<String, Vec<PolyTerm>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<BTreeMap<String, Vec<PolyTerm>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Places the blocks into the metric template; every block must vanish at the origin.
pub fn assemble_metric(blocks: MetricBlocks) -> Result<MetricModel> {
    let n = blocks.n;
    let d = 2 * n + 4;
    if blocks.u.len() != 2 * n {
        return Err(ForgeError::Dimension(format!("{} functions u^i for n = {n}", blocks.u.len())));
    }
    for p in blocks.f.iter().chain(&blocks.u) {
        if p.nvars() != d {
            return Err(ForgeError::Dimension(format!("block in {} variables, expected {d}", p.nvars())));
        }
        if !p.eval_origin().is_zero() {
            return Err(ForgeError::Constraint(format!("metric block does not vanish at 0: {p}")));
        }
    }
    let (s, t) = (2 * n + 2, 2 * n + 3);
    let one = Poly::constant(d, Q::one());
    let mut g = vec![vec![Poly::zero(d); d]; d];
    g[0][s] = one.clone();
    g[s][0] = one.clone();
    g[1][t] = one.clone();
    g[t][1] = one.clone();
    for i in 2..2 + 2 * n {
        g[i][i] = one.clone();
        g[i][t] = blocks.u[i - 2].clone();
        g[t][i] = blocks.u[i - 2].clone();
    }
    g[s][s] = blocks.f[0].clone();
    g[t][t] = blocks.f[1].clone();
    g[s][t] = blocks.f[2].clone();
    g[t][s] = blocks.f[2].clone();
    let m = MetricModel { n, blocks, g, family: None, notes: vec![] };
    debug_assert_eq!(m.value_at_origin(), gram(n));
    Ok(m)
}

/// Polynomial builder in the chart coordinates of a fixed `n`.
struct Chart {
    n: usize,
    d: usize,
}

impl Chart {
    fn new(n: usize) -> Self {
        Chart { n, d: 2 * n + 4 }
    }
    /// `x^k`, 1-based.
    fn x(&self, k: usize) -> Poly {
        Poly::var(self.d, k - 1)
    }
    /// `c * prod (x^k)^e`.
    fn mono(&self, c: Q, factors: &[(usize, u32)]) -> Poly {
        let mut e = vec![0u16; self.d];
        for &(k, p) in factors {
            e[k - 1] += p as u16;
        }
        Poly::monomial(self.d, e, c)
    }
    fn zero(&self) -> Poly {
        Poly::zero(self.d)
    }
    /// Index of `x^{2n+3}`.
    fn s(&self) -> usize {
        2 * self.n + 3
    }
    /// `e_i` and `f_i` coordinates.
    fn xe(&self, i: usize) -> usize {
        i + 2
    }
    fn xf(&self, i: usize) -> usize {
        self.n + i + 2
    }
    fn triple(&self) -> [Poly; 3] {
        [self.zero(), self.zero(), self.zero()]
    }
}

/// The four rows of the `n = 0` table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum N0Row {
    Hol1,
    Hol2,
    Gamma(Q, Q),
    C,
}

pub fn n0_blocks(row: &N0Row) -> MetricBlocks {
    let ch = Chart::new(0);
    let mut b = MetricBlocks::zero(0);
    let x = |k| ch.x(k);
    match row {
        N0Row::Hol1 => {
            // f1 = -2x^2x^3 - x^1(x^3)^2, f2 = -f1, f3 = 2x^1x^3 - x^2(x^3)^2
            let f1 = ch.mono(q(-2), &[(2, 1), (3, 1)]) - ch.mono(q(1), &[(1, 1), (3, 2)]);
            let f3 = ch.mono(q(2), &[(1, 1), (3, 1)]) - ch.mono(q(1), &[(2, 1), (3, 2)]);
            b.f = [f1.clone(), -&f1, f3];
        }
        N0Row::Hol2 => {
            let f1 = &x(1) * &x(1) - &x(2) * &x(2);
            b.f = [f1.clone(), -&f1, ch.mono(q(2), &[(1, 1), (2, 1)])];
        }
        N0Row::Gamma(g1, g2) => {
            let f1 = ch.mono(q(-2) * g1, &[(2, 1), (3, 1)]) + ch.mono(q(-2) * g2, &[(1, 1), (3, 1)]);
            let f3 = ch.mono(q(2) * g1, &[(1, 1), (3, 1)]) + ch.mono(q(-2) * g2, &[(2, 1), (3, 1)]);
            b.f = [f1.clone(), -&f1, f3];
        }
        N0Row::C => {
            b.f = [ch.mono(q(1), &[(4, 2)]), ch.zero(), ch.zero()];
        }
    }
    b
}

/// Parameters of the family read off a built family, in the indexing of the block formulas.
struct Params<'a> {
    ch: Chart,
    built: &'a BuiltFamily,
    readings: &'a Readings,
    /// `N = dim u`.
    big_n: usize,
    n1: usize,
    n0: usize,
}

impl Params<'_> {
    fn b(&self, alpha: usize, i: usize, j: usize) -> &Q {
        &self.built.u_basis[alpha - 1].b[i - 1][j - 1]
    }
    fn c(&self, alpha: usize, i: usize, j: usize) -> &Q {
        &self.built.u_basis[alpha - 1].c_sym[i - 1][j - 1]
    }
    /// `(x^{2n+3})^p / p!` times `c`.
    fn s_pow(&self, c: Q, p: u32) -> Poly {
        self.ch.mono(c * inv_factorial(p), &[(self.ch.s(), p)])
    }

    fn f0(&self) -> [Poly; 3] {
        let ch = &self.ch;
        let n0 = self.n0;
        let mut f1 = ch.zero();
        for alpha in 1..=self.big_n {
            let mut inner = ch.zero();
            for i in 1..=n0 {
                for j in 1..=n0 {
                    let b = self.b(alpha, i, j);
                    let c = self.c(alpha, i, j) * qr(1, 2);
                    inner += &ch.mono(b.clone(), &[(ch.xe(i), 1), (ch.xf(j), 1)]);
                    inner += &ch.mono(c.clone(), &[(ch.xe(i), 1), (ch.xe(j), 1)]);
                    inner += &ch.mono(c, &[(ch.xf(i), 1), (ch.xf(j), 1)]);
                }
            }
            f1 += &(&inner * &self.s_pow(q(1), alpha as u32 - 1));
        }
        let mut f2 = f1.clone();
        let (ue, uf) = self.u_block();
        for i in 1..=n0 {
            f2 += &(&ue[i - 1] * &ue[i - 1]);
            f2 += &(&uf[i - 1] * &uf[i - 1]);
        }
        [f1, f2, ch.zero()]
    }

    /// `u^{i+2}` and `u^{n+i+2}` for `i = 1..n` from the `u`-basis.
    fn u_block(&self) -> (Vec<Poly>, Vec<Poly>) {
        let ch = &self.ch;
        let n = ch.n;
        let mut ue = vec![ch.zero(); n];
        let mut uf = vec![ch.zero(); n];
        for i in 1..=self.n0 {
            for alpha in 1..=self.big_n {
                let mut a = ch.zero();
                let mut b = ch.zero();
                for j in 1..=self.n0 {
                    let bij = self.b(alpha, i, j).clone();
                    let cij = self.c(alpha, i, j).clone();
                    a += &ch.mono(bij.clone(), &[(ch.xe(j), 1)]);
                    a += &ch.mono(-cij.clone(), &[(ch.xf(j), 1)]);
                    b += &ch.mono(bij, &[(ch.xf(j), 1)]);
                    b += &ch.mono(cij, &[(ch.xe(j), 1)]);
                }
                let sp = self.s_pow(q(1), alpha as u32);
                ue[i - 1] += &(&a * &sp);
                uf[i - 1] += &(&b * &sp);
            }
        }
        (ue, uf)
    }

    fn center(&self) -> std::ops::RangeInclusive<usize> {
        self.n1 + 1..=self.big_n
    }

    fn f_varphi(&self) -> [Poly; 3] {
        let ch = &self.ch;
        let mut out = ch.triple();
        for alpha in self.center() {
            let v = &self.built.varphi[alpha - 1];
            let sp = self.s_pow(v.clone(), alpha as u32);
            let f1 = &(&ch.x(2) * &sp) * &Poly::constant(ch.d, q(-2));
            out[0] += &f1;
            out[1] -= &f1;
            out[2] += &(&(&ch.x(1) * &sp) * &Poly::constant(ch.d, q(2)));
        }
        out
    }

    /// The `A~^2`-type block with weight `w` and exponent `k`, and the `(x^{2n+3})^2` coefficient
    /// written `1/((k+1)k)`.
    fn tilde_a2_like(&self, w: &Q, k: u32, m: usize) -> [Poly; 3] {
        let ch = &self.ch;
        let n = ch.n;
        let s = ch.s();
        let pre = self.s_pow(w.clone(), k - 1);
        let kq = q(k as i64);
        let mut sum_e = ch.zero();
        let mut sum_f = ch.zero();
        let mut sum_ef = ch.zero();
        for i in m + 1..=n {
            sum_e += &ch.mono(q(1), &[(ch.xe(i), 2)]);
            sum_f += &ch.mono(q(1), &[(ch.xf(i), 2)]);
            sum_ef += &ch.mono(q(1), &[(ch.xe(i), 1), (ch.xf(i), 1)]);
        }
        let two_over_k = q(2) / &kq;
        let f1 = ch.mono(-two_over_k.clone(), &[(1, 1), (s, 1)]) + sum_e.clone();
        let f2 = ch.mono(two_over_k.clone(), &[(1, 1), (s, 1)])
            + sum_f.clone()
            + &ch.mono(q(1) / ((&kq + q(1)) * &kq), &[(s, 2)]) * &(&sum_e + &sum_f);
        let f3 = ch.mono(-two_over_k, &[(2, 1), (s, 1)]) + sum_ef;
        [&pre * &f1, &pre * &f2, &pre * &f3]
    }

    fn f_phi(&self, m: usize) -> [Poly; 3] {
        let mut out = self.ch.triple();
        for alpha in self.center() {
            let part = self.tilde_a2_like(&self.built.phi[alpha - 1], alpha as u32, m);
            for (o, p) in out.iter_mut().zip(part.iter()) {
                *o += p;
            }
        }
        out
    }

    fn f_a1(&self, k: u32) -> [Poly; 3] {
        let ch = &self.ch;
        let sp = self.s_pow(q(1), k);
        let f1 = &(&ch.x(2) * &sp) * &Poly::constant(ch.d, q(-2));
        let f3 = &(&ch.x(1) * &sp) * &Poly::constant(ch.d, q(2));
        [f1.clone(), -&f1, f3]
    }

    fn f_tilde(&self, m1: usize, m2: usize) -> [Poly; 3] {
        let ch = &self.ch;
        let mut f1 = ch.zero();
        let mut f3 = ch.zero();
        for i in m1.max(1)..=m2 {
            f1 += &ch.mono(q(1), &[(ch.xe(i), 2)]);
            f1 -= &ch.mono(q(1), &[(ch.xf(i), 2)]);
            f3 += &ch.mono(q(2), &[(ch.xe(i), 1), (ch.xf(i), 1)]);
        }
        [f1.clone(), -&f1, f3]
    }

    fn f_breve(&self, m1: usize, k: u32, m2: usize) -> [Poly; 3] {
        let ch = &self.ch;
        let s = ch.s();
        let mut f1 = ch.zero();
        let mut f3 = ch.zero();
        for i in m1.max(1)..=m2 {
            let p = k + (i - m1) as u32;
            let c = q(-2) * inv_factorial(p);
            f1 += &ch.mono(c.clone(), &[(ch.xf(i), 1), (s, p)]);
            if self.readings.literal_breve_sign {
                f3 += &ch.mono(c, &[(ch.xe(i), 1), (s, p)]);
            } else {
                f3 -= &ch.mono(c, &[(ch.xe(i), 1), (s, p)]);
            }
        }
        [f1.clone(), -&f1, f3]
    }

    /// The `psi` block in `E`-coordinates (`z1` along `e_i`, `z2` along `f_i`).
    fn f_psi(&self) -> [Poly; 3] {
        let ch = &self.ch;
        let n = ch.n;
        let mut f1 = ch.zero();
        let mut f3 = ch.zero();
        for alpha in self.center() {
            let (z1, z2) = &self.built.psi[alpha - 1];
            let mut a = ch.zero();
            let mut b = ch.zero();
            for i in 1..=n {
                a += &ch.mono(z1[i - 1].clone(), &[(ch.xf(i), 1)]);
                a -= &ch.mono(z2[i - 1].clone(), &[(ch.xe(i), 1)]);
                b -= &ch.mono(z1[i - 1].clone(), &[(ch.xe(i), 1)]);
                b -= &ch.mono(z2[i - 1].clone(), &[(ch.xf(i), 1)]);
            }
            let sp = self.s_pow(q(2), alpha as u32);
            f1 += &(&a * &sp);
            f3 += &(&b * &sp);
        }
        [f1.clone(), -&f1, f3]
    }

    /// Extra `u^i = -c x^{n+i} ..., u^{n+i} = c x^i ...` for `e`-indices `m+1..n`, summed over
    /// `(coefficient, exponent)` pairs.
    fn u_extra(&self, m: usize, weights: &[(Q, u32)]) -> (Vec<Poly>, Vec<Poly>) {
        let ch = &self.ch;
        let n = ch.n;
        let mut ue = vec![ch.zero(); n];
        let mut uf = vec![ch.zero(); n];
        for i in m + 1..=n {
            for (c, p) in weights {
                let sp = self.s_pow(c.clone(), *p);
                ue[i - 1] -= &(&ch.x(ch.xf(i)) * &sp);
                uf[i - 1] += &(&ch.x(ch.xe(i)) * &sp);
            }
        }
        (ue, uf)
    }
}

fn sum3(parts: &[[Poly; 3]], d: usize) -> [Poly; 3] {
    let mut out = [Poly::zero(d), Poly::zero(d), Poly::zero(d)];
    for p in parts {
        for (o, x) in out.iter_mut().zip(p.iter()) {
            *o += x;
        }
    }
    out
}

/// Choices where the block formulas admit more than one reading.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Readings {
    /// Use `breve f_3 = -sum 2/(K+i-m_1)! x^{i+2} (x^{2n+3})^{K+i-m_1}` as printed. The default flips
    /// the sign so that `R^1_{i,2n+3,2n+4} = R^2_{n+i,2n+3,2n+4}` holds for the breve indices; the
    /// printed sign makes the holonomy leave `u(1,n+1)`.
    pub literal_breve_sign: bool,
}

/// Blocks realizing the holonomy family `built`, following the table of the metric construction.
pub fn metric_blocks(built: &BuiltFamily) -> Result<(MetricBlocks, Vec<String>)> {
    metric_blocks_with(built, &Readings::default())
}

pub fn metric_blocks_with(built: &BuiltFamily, readings: &Readings) -> Result<(MetricBlocks, Vec<String>)> {
    let n = built.n;
    let mut notes = Vec::new();
    match built.tag {
        FamilyTag::Hol1N0 => return Ok((n0_blocks(&N0Row::Hol1), notes)),
        FamilyTag::Hol2N0 => return Ok((n0_blocks(&N0Row::Hol2), notes)),
        FamilyTag::HolGammaN0 => {
            let g = built.spec.gamma.clone().unwrap_or_default();
            let (g1, g2) = (g[0].0.clone(), g[1].0.clone());
            let row = if g1.is_zero() && g2.is_zero() { N0Row::C } else { N0Row::Gamma(g1, g2) };
            return Ok((n0_blocks(&row), notes));
        }
        t if !t.is_hol() => {
            return Err(ForgeError::Unsupported(format!("no metric construction for the non-holonomy family {t}")));
        }
        _ => {}
    }
    let n0 = built.n0.ok_or_else(|| {
        ForgeError::Constraint(
            "the subspace of E annihilated by u must be span{e_i, f_i : i > n0} for some n0".into(),
        )
    })?;
    let p = Params { ch: Chart::new(n), built, readings, big_n: built.dim_u(), n1: built.n1, n0 };
    let big_n = p.big_n as u32;
    let d = 2 * n + 4;
    let m = built.m();
    let k = built.spec.k.unwrap_or(0);
    let l = built.spec.l.unwrap_or(0);
    let r = built.spec.r.unwrap_or(0);
    let (mut ue, mut uf) = p.u_block();
    let one = Q::one();
    let f = match built.tag {
        FamilyTag::HolA1TildeA2 => {
            let (a, b) = p.u_extra(m, &[(one.clone(), big_n + 2)]);
            add_u(&mut ue, &mut uf, a, b);
            sum3(
                &[
                    p.f_a1(big_n + 1),
                    p.tilde_a2_like(&one, big_n + 2, m),
                    p.f0(),
                    p.f_tilde(n0 + 1, m),
                    p.f_breve(m + 1, big_n + 3, n),
                ],
                d,
            )
        }
        FamilyTag::HolA1Phi => {
            let w: Vec<(Q, u32)> = p.center().map(|a| (built.phi[a - 1].clone(), a as u32)).collect();
            let (a, b) = p.u_extra(m, &w);
            add_u(&mut ue, &mut uf, a, b);
            sum3(&[p.f_a1(big_n + 1), p.f_phi(m), p.f0(), p.f_tilde(n0 + 1, m), p.f_breve(m + 1, big_n + 2, n)], d)
        }
        FamilyTag::HolVarphiTildeA2 => {
            let (a, b) = p.u_extra(m, &[(one.clone(), big_n + 2)]);
            add_u(&mut ue, &mut uf, a, b);
            sum3(
                &[
                    p.f_varphi(),
                    p.tilde_a2_like(&one, big_n + 1, m),
                    p.f0(),
                    p.f_tilde(n0 + 1, m),
                    p.f_breve(m + 1, big_n + 2, n),
                ],
                d,
            )
        }
        FamilyTag::HolVarphiPhi => {
            let w: Vec<(Q, u32)> = p.center().map(|a| (built.phi[a - 1].clone(), a as u32)).collect();
            let (a, b) = p.u_extra(m, &w);
            add_u(&mut ue, &mut uf, a, b);
            if m < n {
                notes.push(format!(
                    "breve blocks with K = {} and K = {} are added; their powers of x^{} overlap",
                    big_n + 2,
                    big_n + 1,
                    2 * n + 3
                ));
            }
            sum3(
                &[
                    p.f_varphi(),
                    p.f_phi(m),
                    p.f0(),
                    p.f_tilde(n0 + 1, m),
                    p.f_breve(m + 1, big_n + 2, n),
                    p.f_breve(m + 1, big_n + 1, n),
                ],
                d,
            )
        }
        FamilyTag::HolLambda => {
            let lambda = built.spec.lambda.clone().map(|v: QValue| v.0).unwrap_or_default();
            let (a, b) = p.u_extra(m, &[(lambda.clone(), big_n + 1)]);
            add_u(&mut ue, &mut uf, a, b);
            let mut ta2 = p.tilde_a2_like(&one, big_n + 1, m);
            for x in ta2.iter_mut() {
                *x = x.scale(&lambda);
            }
            sum3(&[p.f_a1(big_n + 1), ta2, p.f0(), p.f_tilde(n0 + 1, m), p.f_breve(m + 1, big_n + 2, n)], d)
        }
        FamilyTag::HolNPsi => sum3(&[p.f0(), p.f_tilde(n0 + 1, k), p.f_psi(), p.f_breve(l + 1, big_n + 1, n)], d),
        FamilyTag::HolMPsi => sum3(&[p.f0(), p.f_tilde(n0 + 1, k), p.f_psi(), p.f_breve(l + 1, big_n + 1, r)], d),
        _ => unreachable!("non-holonomy and n = 0 tags handled above"),
    };
    let mut blocks = MetricBlocks::zero(n);
    blocks.add_f(f);
    blocks.u[..n].clone_from_slice(&ue[..n]);
    blocks.u[n..2 * n].clone_from_slice(&uf[..n]);
    Ok((blocks, notes))
}

fn add_u(ue: &mut [Poly], uf: &mut [Poly], a: Vec<Poly>, b: Vec<Poly>) {
    for (x, y) in ue.iter_mut().zip(&a) {
        *x += y;
    }
    for (x, y) in uf.iter_mut().zip(&b) {
        *x += y;
    }
}

/// Builds the family and its metric.
pub fn metric_for_family(spec: &FamilySpec) -> Result<(BuiltFamily, MetricModel)> {
    let built = build_family(spec)?;
    let (blocks, notes) = metric_blocks(&built)?;
    let mut model = assemble_metric(blocks)?;
    model.family = Some(spec.clone());
    model.notes = notes;
    Ok((built, model))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_metric_is_eta() {
        let m = assemble_metric(MetricBlocks::zero(2)).unwrap();
        assert_eq!(m.value_at_origin(), gram(2));
        assert!(m.inverse().is_ok());
    }

    #[test]
    fn row_c_puts_x4_squared_in_g33() {
        let m = assemble_metric(n0_blocks(&N0Row::C)).unwrap();
        assert_eq!(m.g[2][2], Poly::var(4, 3).pow(2));
        assert!(m.g[3][3].is_zero() && m.g[2][3].is_zero());
    }

    #[test]
    fn nonvanishing_block_is_rejected() {
        let mut b = MetricBlocks::zero(0);
        b.f[0] = Poly::constant(4, q(1));
        assert!(assemble_metric(b).is_err());
    }

    #[test]
    fn json_round_trip() {
        let m = assemble_metric(n0_blocks(&N0Row::Hol1)).unwrap();
        let j = m.to_json();
        assert_eq!(MetricModel::from_json(&j).unwrap(), m);
    }
}
