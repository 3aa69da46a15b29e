//! Levi-Civita connection, curvature and its covariant derivatives for polynomial metrics,
//! and the holonomy algebra at the origin spanned by `nabla^r R (0)`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ambient::build_ambient;
use crate::error::Result;
use crate::lie::{matrix_strings, LieAlgebra};
use crate::linalg::{Matrix, Subspace};
use crate::metric::MetricModel;
use crate::poly::Poly;
use crate::scalar::{qr, Q};

/// Sparse polynomial tensor of type `(1, rank)`; keys are `[a, b_1, .., b_rank]`, 0-based.
///
/// With `antisym = Some(j)` only keys with `b_j < b_{j+1}` are stored and the tensor is
/// antisymmetric in that slot pair. Zero components are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyTensor {
    pub dim: usize,
    pub rank: usize,
    pub antisym: Option<usize>,
    pub comps: BTreeMap<Vec<u8>, Poly>,
}

impl PolyTensor {
    pub fn new(dim: usize, rank: usize, antisym: Option<usize>) -> Self {
        PolyTensor { dim, rank, antisym, comps: BTreeMap::new() }
    }

    pub fn nnz(&self) -> usize {
        self.comps.len()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// Component for any key, resolving the antisymmetric slot pair.
    pub fn get(&self, key: &[u8]) -> Poly {
        let nvars = self.dim;
        if let Some(j) = self.antisym {
            let (x, y) = (key[1 + j], key[2 + j]);
            if x == y {
                return Poly::zero(nvars);
            }
            if x > y {
                let mut k = key.to_vec();
                k.swap(1 + j, 2 + j);
                return self.comps.get(&k).map(|p| -p).unwrap_or_else(|| Poly::zero(nvars));
            }
        }
        self.comps.get(key).cloned().unwrap_or_else(|| Poly::zero(nvars))
    }

    fn insert(&mut self, key: Vec<u8>, p: Poly) {
        if !p.is_zero() {
            self.comps.insert(key, p);
        }
    }

    /// Every component with both orientations of the antisymmetric pair, with signs.
    fn full_iter(&self) -> impl Iterator<Item = (Vec<u8>, Q, &Poly)> + '_ {
        let j = self.antisym;
        self.comps.iter().flat_map(move |(k, p)| {
            let mut out = vec![(k.clone(), Q::one(), p)];
            if let Some(j) = j {
                let mut s = k.clone();
                s.swap(1 + j, 2 + j);
                out.push((s, -Q::one(), p));
            }
            out
        })
    }

    fn keeps(&self, key: &[u8]) -> bool {
        match self.antisym {
            Some(j) => key[1 + j] < key[2 + j],
            None => true,
        }
    }

    /// Values at the origin.
    pub fn at_origin(&self) -> BTreeMap<Vec<u8>, Q> {
        self.comps
            .iter()
            .map(|(k, p)| (k.clone(), p.eval_origin()))
            .filter(|(_, v)| !v.is_zero())
            .collect()
    }

    pub fn truncate(&self, deg: u32) -> PolyTensor {
        let mut out = PolyTensor::new(self.dim, self.rank, self.antisym);
        for (k, p) in &self.comps {
            out.insert(k.clone(), p.truncate(deg));
        }
        out
    }

    pub fn add(&self, other: &PolyTensor) -> PolyTensor {
        let mut out = self.clone();
        for (k, p) in &other.comps {
            let s = &out.get(k) + p;
            if s.is_zero() {
                out.comps.remove(k);
            } else {
                out.comps.insert(k.clone(), s);
            }
        }
        out
    }
}

fn mul_opt(a: &Poly, b: &Poly, trunc: Option<u32>) -> Poly {
    match trunc {
        Some(t) => a.mul_trunc(b, t),
        None => a * b,
    }
}

fn trunc_opt(p: Poly, trunc: Option<u32>) -> Poly {
    match trunc {
        Some(t) => p.truncate(t),
        None => p,
    }
}

/// `Gamma^a_{bc} = 1/2 g^{ad} (d_b g_{dc} + d_c g_{db} - d_d g_{bc})`, optionally truncated.
pub fn christoffel(metric: &MetricModel, trunc: Option<u32>) -> Result<PolyTensor> {
    let d = metric.dim();
    let ginv = metric.inverse()?;
    let g = &metric.g;
    let half = qr(1, 2);
    let mut lowered = vec![vec![vec![Poly::zero(d); d]; d]; d];
    for (l, row) in lowered.iter_mut().enumerate() {
        for b in 0..d {
            for c in b..d {
                let p = &(&g[l][c].d(b) + &g[l][b].d(c)) - &g[b][c].d(l);
                let p = p.scale(&half);
                row[b][c] = p.clone();
                row[c][b] = p;
            }
        }
    }
    let rows: Vec<Vec<(Vec<u8>, Poly)>> = (0..d)
        .into_par_iter()
        .map(|a| {
            let mut out = Vec::new();
            for b in 0..d {
                for c in b..d {
                    let mut acc = Poly::zero(d);
                    for (l, low) in lowered.iter().enumerate() {
                        if !ginv[a][l].is_zero() && !low[b][c].is_zero() {
                            acc += &mul_opt(&ginv[a][l], &low[b][c], trunc);
                        }
                    }
                    if !acc.is_zero() {
                        out.push((vec![a as u8, b as u8, c as u8], acc.clone()));
                        if b != c {
                            out.push((vec![a as u8, c as u8, b as u8], acc));
                        }
                    }
                }
            }
            out
        })
        .collect();
    let mut t = PolyTensor::new(d, 2, None);
    for (k, p) in rows.into_iter().flatten() {
        t.insert(k, p);
    }
    Ok(t)
}

/// `R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb} + Gamma^a_{ce} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb}`.
pub fn riemann(gamma: &PolyTensor, trunc: Option<u32>) -> PolyTensor {
    let d = gamma.dim;
    let gm = |a: usize, b: usize, c: usize| gamma.get(&[a as u8, b as u8, c as u8]);
    let rows: Vec<Vec<(Vec<u8>, Poly)>> = (0..d)
        .into_par_iter()
        .map(|a| {
            let mut out = Vec::new();
            for b in 0..d {
                for c in 0..d {
                    for dd in c + 1..d {
                        let mut acc = &gm(a, dd, b).d(c) - &gm(a, c, b).d(dd);
                        for e in 0..d {
                            let (x1, y1) = (gm(a, c, e), gm(e, dd, b));
                            if !x1.is_zero() && !y1.is_zero() {
                                acc += &mul_opt(&x1, &y1, trunc);
                            }
                            let (x2, y2) = (gm(a, dd, e), gm(e, c, b));
                            if !x2.is_zero() && !y2.is_zero() {
                                acc -= &mul_opt(&x2, &y2, trunc);
                            }
                        }
                        let acc = trunc_opt(acc, trunc);
                        if !acc.is_zero() {
                            out.push((vec![a as u8, b as u8, c as u8, dd as u8], acc));
                        }
                    }
                }
            }
            out
        })
        .collect();
    let mut t = PolyTensor::new(d, 3, Some(1));
    for (k, p) in rows.into_iter().flatten() {
        t.insert(k, p);
    }
    t
}

/// `(nabla T)^a_{L e} = d_e T^a_L + Gamma^a_{ef} T^f_L - sum_j Gamma^f_{e L_j} T^a_{L[j -> f]}`,
/// appending the new index last.
pub fn covariant_derivative(t: &PolyTensor, gamma: &PolyTensor, trunc: Option<u32>) -> PolyTensor {
    let d = t.dim;
    // Gamma^x_{e y} as lists indexed by e.
    let mut by_e: Vec<Vec<(u8, u8, &Poly)>> = vec![Vec::new(); d];
    for (k, p) in &gamma.comps {
        by_e[k[1] as usize].push((k[0], k[2], p));
    }
    let full: Vec<(Vec<u8>, Q, &Poly)> = t.full_iter().collect();
    let parts: Vec<BTreeMap<Vec<u8>, Poly>> = (0..d)
        .into_par_iter()
        .map(|e| {
            let mut acc: BTreeMap<Vec<u8>, Poly> = BTreeMap::new();
            let mut push = |mut key: Vec<u8>, p: Poly| {
                key.push(e as u8);
                if p.is_zero() || !t.keeps(&key) {
                    return;
                }
                match acc.get_mut(&key) {
                    Some(x) => *x += &p,
                    None => {
                        acc.insert(key, p);
                    }
                }
            };
            for (key, sign, p) in &full {
                if sign.is_one() {
                    push(key.clone(), trunc_opt(p.d(e), trunc));
                }
                for &(x, y, gp) in &by_e[e] {
                    // Gamma^x_{e y} T^y_L feeds (x, L).
                    if y == key[0] {
                        let mut k = key.clone();
                        k[0] = x;
                        push(k, mul_opt(gp, p, trunc).scale(sign));
                    }
                    // -Gamma^y_{e z} T^a_{..y..} feeds slot value z; here x plays y.
                    for slot in 1..key.len() {
                        if key[slot] == x {
                            let mut k = key.clone();
                            k[slot] = y;
                            push(k, mul_opt(gp, p, trunc).scale(&-sign.clone()));
                        }
                    }
                }
            }
            acc.retain(|_, p| !p.is_zero());
            acc
        })
        .collect();
    let mut out = PolyTensor::new(d, t.rank + 1, t.antisym);
    for part in parts {
        out.comps.extend(part);
    }
    out
}

/// Christoffel symbols from their closed forms, valid when `f_i, u^i` do not depend on
/// `x^{2n+4}` and `u^i` does not depend on `x^1, x^2`.
pub fn closed_form_christoffel(metric: &MetricModel) -> PolyTensor {
    let n = metric.n;
    let d = metric.dim();
    let f = &metric.blocks.f;
    let u = |i: usize| metric.blocks.u[i - 3].clone();
    // 1-based partial derivative.
    let dd = |p: &Poly, k: usize| p.d(k - 1);
    let (s, t) = (2 * n + 3, 2 * n + 4);
    let es = 3..=2 * n + 2;
    let half = qr(1, 2);
    let mut uu = Poly::zero(d);
    for i in es.clone() {
        uu += &(&u(i) * &u(i));
    }
    let f2u = &f[1] - &uu;
    let mut out = PolyTensor::new(d, 2, None);
    let mut set = |a: usize, b: usize, c: usize, p: Poly| {
        let p = p.scale(&half);
        out.insert(vec![(a - 1) as u8, (b - 1) as u8, (c - 1) as u8], p.clone());
        if b != c {
            out.insert(vec![(a - 1) as u8, (c - 1) as u8, (b - 1) as u8], p);
        }
    };
    let (f1, f2, f3) = (&f[0], &f[1], &f[2]);

    set(1, 1, s, dd(f1, 1));
    set(1, 1, t, dd(f3, 1));
    set(1, 2, s, dd(f1, 2));
    set(1, 2, t, dd(f3, 2));
    for i in es.clone() {
        set(1, i, s, dd(f1, i));
        set(1, i, t, &dd(f3, i) - &dd(&u(i), s));
    }
    set(1, s, s, dd(f1, s) + f3 * &dd(f1, 2) + f1 * &dd(f1, 1));
    set(1, s, t, f3 * &dd(f3, 2) + f1 * &dd(f3, 1));
    set(1, t, t, -dd(f2, s) + f3 * &dd(f2, 2) + f1 * &dd(f2, 1));

    set(2, 1, s, dd(f3, 1));
    set(2, 1, t, dd(f2, 1));
    set(2, 2, s, dd(f3, 2));
    set(2, 2, t, dd(f2, 2));
    for i in es.clone() {
        for j in es.clone().filter(|&j| j >= i) {
            set(2, i, j, &dd(&u(i), j) + &dd(&u(j), i));
        }
        set(2, i, s, &dd(&u(i), s) + &dd(f3, i));
        let mut acc = dd(f2, i);
        for j in es.clone() {
            acc += &(&u(j) * &(&dd(&u(i), j) - &dd(&u(j), i)));
        }
        set(2, i, t, acc);
    }
    let mut ss = dd(f3, s).scale(&Q::from_integer(2.into())) + &f2u * &dd(f1, 2) + f3 * &dd(f1, 1);
    let mut st = dd(f2, s) + &f2u * &dd(f3, 2) + f3 * &dd(f3, 1);
    let mut tt = &f2u * &dd(f2, 2) + f3 * &dd(f2, 1);
    for i in es.clone() {
        ss += &(&u(i) * &dd(f1, i));
        st += &(&u(i) * &(&dd(f3, i) - &dd(&u(i), s)));
        tt += &(&u(i) * &dd(f2, i));
    }
    set(2, s, s, ss);
    set(2, s, t, st);
    set(2, t, t, tt);

    for i in es.clone() {
        for j in es.clone() {
            set(i, j, t, &dd(&u(i), j) - &dd(&u(j), i));
        }
        set(i, s, s, -dd(f1, i) + &u(i) * &dd(f1, 2));
        set(i, s, t, &dd(&u(i), s) - &dd(f3, i) + &u(i) * &dd(f3, 2));
        set(i, t, t, -dd(f2, i) + &u(i) * &dd(f2, 2));
    }

    set(s, s, s, -dd(f1, 1));
    set(s, s, t, -dd(f3, 1));
    set(s, t, t, -dd(f2, 1));
    set(t, s, s, -dd(f1, 2));
    set(t, s, t, -dd(f3, 2));
    set(t, t, t, -dd(f2, 2));
    out
}

/// Components (1-based labels) where two connections differ.
pub fn christoffel_mismatches(a: &PolyTensor, b: &PolyTensor) -> Vec<String> {
    let mut keys: Vec<&Vec<u8>> = a.comps.keys().chain(b.comps.keys()).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .filter(|k| a.get(k) != b.get(k))
        .map(|k| format!("Gamma^{}_{{{},{}}}", k[0] + 1, k[1] + 1, k[2] + 1))
        .collect()
}

/// `R = R^ + R-bar` for a metric whose blocks split into two sums over disjoint coordinates.
pub fn curvature_is_additive(
    whole: &MetricModel,
    hat: &MetricModel,
    bar: &MetricModel,
) -> Result<bool> {
    let r = riemann(&christoffel(whole, None)?, None);
    let rh = riemann(&christoffel(hat, None)?, None);
    let rb = riemann(&christoffel(bar, None)?, None);
    Ok(r == rh.add(&rb))
}

/// Default derivative cap `max(2n+6, N+4)`.
pub fn default_cap(n: usize, dim_u: Option<usize>) -> usize {
    (2 * n + 6).max(dim_u.unwrap_or(0) + 4)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum StopReason {
    /// The span did not change at orders `order - 1` and `order`.
    Stabilized { order: usize },
    CapReached { order: usize },
}

#[derive(Clone, Debug)]
pub struct OrderInfo {
    pub order: usize,
    /// Stored (nonzero) components of `nabla^r R` after truncation.
    pub components: usize,
    /// Generators at this order that enlarged the span.
    pub new_generators: Vec<Matrix>,
    pub span_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonVerdict {
    Equal,
    ComputedInTarget,
    TargetInComputed,
    Incomparable,
}

#[derive(Clone, Debug)]
pub struct Comparison {
    pub verdict: ComparisonVerdict,
    /// Complement of the intersection inside the computed span.
    pub computed_excess: Vec<Matrix>,
    /// Complement of the intersection inside the target.
    pub target_excess: Vec<Matrix>,
}

fn unflatten(v: &[Q], size: usize) -> Matrix {
    Matrix::from_flat(size, size, v.to_vec()).expect("square")
}

pub fn compare_algebras(computed: &Subspace, target: &LieAlgebra) -> Result<Comparison> {
    let size = target.size();
    let inter = computed.intersect(target.span())?;
    let computed_excess: Vec<Matrix> =
        inter.complement_in(computed)?.iter().map(|v| unflatten(v, size)).collect();
    let target_excess: Vec<Matrix> =
        inter.complement_in(target.span())?.iter().map(|v| unflatten(v, size)).collect();
    let verdict = match (computed_excess.is_empty(), target_excess.is_empty()) {
        (true, true) => ComparisonVerdict::Equal,
        (true, false) => ComparisonVerdict::ComputedInTarget,
        (false, true) => ComparisonVerdict::TargetInComputed,
        (false, false) => ComparisonVerdict::Incomparable,
    };
    Ok(Comparison { verdict, computed_excess, target_excess })
}

#[derive(Clone, Debug)]
pub struct GeneratorChecks {
    pub eta_skew: bool,
    pub commutes_with_j: bool,
    pub preserves_p_plane: bool,
}

#[derive(Clone, Debug)]
pub struct HolonomyReport {
    pub n: usize,
    pub cap: usize,
    pub orders: Vec<OrderInfo>,
    pub stop: StopReason,
    /// Span of all evaluated `nabla^r R (0)`, flattened row-major.
    pub span: Subspace,
    /// Lie algebra generated by the span.
    pub algebra: LieAlgebra,
    pub closure_added: bool,
    pub checks: GeneratorChecks,
    /// `R(0)` as `[a, b, c, d]` with `c < d`, 0-based.
    pub curvature_at_origin: BTreeMap<Vec<u8>, Q>,
    pub comparison: Option<Comparison>,
}

impl HolonomyReport {
    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn to_json(&self) -> HolonomyJson {
        HolonomyJson {
            n: self.n,
            cap: self.cap,
            stop: self.stop.clone(),
            orders: self
                .orders
                .iter()
                .map(|o| OrderJson {
                    order: o.order,
                    components: o.components,
                    span_dim: o.span_dim,
                    new_generators: o.new_generators.iter().map(matrix_strings).collect(),
                })
                .collect(),
            dim: self.algebra.dim(),
            basis: self.algebra.basis().iter().map(matrix_strings).collect(),
            closure_added: self.closure_added,
            eta_skew: self.checks.eta_skew,
            commutes_with_j: self.checks.commutes_with_j,
            preserves_p_plane: self.checks.preserves_p_plane,
            comparison: self.comparison.as_ref().map(|c| ComparisonJson {
                verdict: c.verdict.clone(),
                computed_excess: c.computed_excess.iter().map(matrix_strings).collect(),
                target_excess: c.target_excess.iter().map(matrix_strings).collect(),
            }),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderJson {
    pub order: usize,
    pub components: usize,
    pub span_dim: usize,
    pub new_generators: Vec<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonJson {
    pub verdict: ComparisonVerdict,
    pub computed_excess: Vec<Vec<Vec<String>>>,
    pub target_excess: Vec<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HolonomyJson {
    pub n: usize,
    pub cap: usize,
    pub stop: StopReason,
    pub orders: Vec<OrderJson>,
    pub dim: usize,
    pub basis: Vec<Vec<Vec<String>>>,
    pub closure_added: bool,
    pub eta_skew: bool,
    pub commutes_with_j: bool,
    pub preserves_p_plane: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ComparisonJson>,
}

/// Endomorphisms `v -> nabla^r R(X, Y; Z..)_0 v` for every frame choice, i.e. the matrices
/// `M[a][b] = T^a_{b c d e_1 .. e_r}(0)` grouped by `(c, d, e_1, .., e_r)`.
fn generators_at_origin(t: &PolyTensor) -> Vec<Matrix> {
    let d = t.dim;
    let mut groups: BTreeMap<Vec<u8>, Matrix> = BTreeMap::new();
    for (k, v) in t.at_origin() {
        let m = groups.entry(k[2..].to_vec()).or_insert_with(|| Matrix::zeros(d, d));
        m.set(k[0] as usize, k[1] as usize, v);
    }
    groups.into_values().collect()
}

/// Holonomy algebra at 0 from `nabla^r R (0)`, `r = 0..=cap`, stopping early once two
/// consecutive orders leave the span unchanged.
///
/// `nabla^r R` is kept to degree `cap - r`, which is exact for every value at 0 used.
pub fn holonomy_at_origin(
    metric: &MetricModel,
    cap: usize,
    target: Option<&LieAlgebra>,
) -> Result<HolonomyReport> {
    let d = metric.dim();
    let cap32 = cap as u32;
    let gamma = christoffel(metric, Some(cap32 + 1))?;
    let mut t = riemann(&gamma, Some(cap32));
    let curvature_at_origin = t.at_origin();
    let mut span = Subspace::zero(d * d);
    let mut orders = Vec::new();
    let mut unchanged = 0usize;
    let mut stop = StopReason::CapReached { order: cap };
    for r in 0..=cap {
        let mut new_generators = Vec::new();
        for g in generators_at_origin(&t) {
            if span.insert(&g.flatten()) {
                new_generators.push(g);
            }
        }
        unchanged = if new_generators.is_empty() { unchanged + 1 } else { 0 };
        orders.push(OrderInfo { order: r, components: t.nnz(), new_generators, span_dim: span.dim() });
        if unchanged >= 2 {
            stop = StopReason::Stabilized { order: r };
            break;
        }
        if r < cap {
            t = covariant_derivative(&t, &gamma, Some(cap32 - r as u32 - 1));
        }
    }
    let all: Vec<Matrix> = span.basis().iter().map(|v| unflatten(v, d)).collect();
    let algebra = LieAlgebra::generated_by(d, &all)?;
    let closure_added = algebra.dim() != span.dim();
    let amb = build_ambient(metric.n);
    let checks = GeneratorChecks {
        eta_skew: all.iter().all(|m| amb.is_eta_skew(m)),
        commutes_with_j: all.iter().all(|m| amb.commutes_with_j(m)),
        preserves_p_plane: all.iter().all(|m| amb.preserves_p_plane(m)),
    };
    let comparison = match target {
        Some(tg) => Some(compare_algebras(algebra.span(), tg)?),
        None => None,
    };
    Ok(HolonomyReport {
        n: metric.n,
        cap,
        orders,
        stop,
        span,
        algebra,
        closure_added,
        checks,
        curvature_at_origin,
        comparison,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{assemble_metric, n0_blocks, MetricBlocks, N0Row};
    use crate::scalar::q;

    #[test]
    fn flat_has_no_connection() {
        let m = assemble_metric(MetricBlocks::zero(1)).unwrap();
        let g = christoffel(&m, None).unwrap();
        assert!(g.is_zero());
        let rep = holonomy_at_origin(&m, 8, None).unwrap();
        assert_eq!(rep.dim(), 0);
        assert_eq!(rep.stop, StopReason::Stabilized { order: 1 });
    }

    #[test]
    fn row_c_anchors() {
        let m = assemble_metric(n0_blocks(&N0Row::C)).unwrap();
        let g = christoffel(&m, None).unwrap();
        let x4 = Poly::var(4, 3);
        assert_eq!(g.get(&[0, 2, 3]), x4);
        assert_eq!(g.get(&[1, 2, 2]), -&x4);
        assert_eq!(g.nnz(), 3);
        let r = riemann(&g, None).at_origin();
        assert_eq!(r.get(&vec![1, 2, 2, 3]), Some(&q(1)));
        assert_eq!(r.get(&vec![0, 3, 2, 3]), Some(&q(-1)));
    }

    #[test]
    fn derivative_of_zero_is_zero() {
        let m = assemble_metric(n0_blocks(&N0Row::Hol2)).unwrap();
        let g = christoffel(&m, None).unwrap();
        let z = PolyTensor::new(4, 3, Some(1));
        assert!(covariant_derivative(&z, &g, None).is_zero());
    }
}
