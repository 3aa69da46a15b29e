//! Search for proper nondegenerate invariant subspaces, with classification-backed certificates
//! for the negative outcome.

use std::collections::BTreeSet;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ambient::{build_ambient, Ambient, Frame};
use crate::lie::LieAlgebra;
use crate::linalg::{Matrix, Subspace};
use crate::scalar::{q, to_canonical, Q};

pub const DEFAULT_PROBES: usize = 64;
pub const DEFAULT_LATTICE_CAP: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Number of seeded random probe vectors.
    pub probes: usize,
    pub seed: u64,
    /// Maximum number of distinct invariant subspaces kept during lattice exploration.
    pub lattice_cap: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { probes: DEFAULT_PROBES, seed: 0, lattice_cap: DEFAULT_LATTICE_CAP }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    NotWeaklyIrreducible,
    WeaklyIrreducible,
    Unknown,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ProbeLog {
    pub seed: u64,
    pub frame_probes: usize,
    pub structured_probes: usize,
    pub random_probes: usize,
    pub commutant_dim: usize,
    pub commutant_probes: usize,
    /// Distinct proper invariant subspaces examined.
    pub invariant_subspaces: usize,
    pub lattice_cap: usize,
    pub cap_reached: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvarianceVerdict {
    pub status: Status,
    pub witness: Option<Subspace>,
    /// Name of the matched catalog entry.
    pub certificate: Option<String>,
    pub log: ProbeLog,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictJson {
    pub status: Status,
    pub witness: Option<Vec<Vec<String>>>,
    pub witness_dim: Option<usize>,
    pub certificate: Option<String>,
    pub log: ProbeLog,
}

impl InvarianceVerdict {
    pub fn to_json(&self) -> VerdictJson {
        VerdictJson {
            status: self.status,
            witness: self.witness.as_ref().map(|w| vectors_to_strings(w.basis())),
            witness_dim: self.witness.as_ref().map(Subspace::dim),
            certificate: self.certificate.clone(),
            log: self.log.clone(),
        }
    }
}

pub fn vectors_to_strings(vs: &[Vec<Q>]) -> Vec<Vec<String>> {
    vs.iter().map(|v| v.iter().map(to_canonical).collect()).collect()
}

/// Smallest `g`-invariant subspace containing `seeds`.
pub fn invariant_closure(g: &LieAlgebra, seeds: &[Vec<Q>]) -> Subspace {
    let d = g.size();
    let mut w = Subspace::zero(d);
    let mut queue: Vec<Vec<Q>> = Vec::new();
    for s in seeds {
        if w.insert(s) {
            queue.push(s.clone());
        }
    }
    while let Some(v) = queue.pop() {
        for x in g.basis() {
            let xv = x.apply(&v);
            if w.insert(&xv) {
                queue.push(xv);
            }
        }
    }
    w
}

pub fn is_invariant(g: &LieAlgebra, w: &Subspace) -> bool {
    g.basis().iter().all(|x| w.basis().iter().all(|v| w.contains_vec(&x.apply(v))))
}

/// Checks every witness condition: invariant, proper, nonzero, nondegenerate.
pub fn is_witness(amb: &Ambient, g: &LieAlgebra, w: &Subspace) -> bool {
    let d = amb.dim();
    w.ambient() == d
        && 0 < w.dim()
        && w.dim() < d
        && amb.restricted_gram_rank(w) == w.dim()
        && is_invariant(g, w)
}

fn axis(d: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); d];
    v[i] = q(1);
    v
}

fn combo(d: usize, terms: &[(usize, i64)]) -> Vec<Q> {
    let mut v = vec![Q::zero(); d];
    for &(i, c) in terms {
        v[i] += q(c);
    }
    v
}

/// Probes modelled on the explicit witnesses: `p_1 +- q_1`, `p_2 +- q_2`, `e_i +- f_i`,
/// and the diagonal sums `p1 +- p2 + sum (e_i +- f_i) + q1 +- q2`.
fn structured_probes(n: usize) -> Vec<Vec<Q>> {
    let fr = Frame::new(n);
    let d = fr.dim();
    let mut out = Vec::new();
    for s in [1, -1] {
        out.push(combo(d, &[(fr.p1(), 1), (fr.q1(), s)]));
        out.push(combo(d, &[(fr.p2(), 1), (fr.q2(), s)]));
        out.push(combo(d, &[(fr.p1(), 1), (fr.p2(), s)]));
        out.push(combo(d, &[(fr.q1(), 1), (fr.q2(), s)]));
        for i in 1..=n {
            out.push(combo(d, &[(fr.e(i), 1), (fr.f(i), s)]));
        }
        let mut diag = vec![(fr.p1(), 1), (fr.p2(), s), (fr.q1(), 1), (fr.q2(), s)];
        for i in 1..=n {
            diag.push((fr.e(i), 1));
            diag.push((fr.f(i), s));
        }
        out.push(combo(d, &diag));
    }
    out
}

fn random_probes(d: usize, count: usize, seed: u64) -> Vec<Vec<Q>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..d).map(|_| q(rng.gen_range(-3..=3))).collect())
        .collect()
}

/// Basis of `{T : [T, X] = 0 for all X in g}`.
pub fn commutant(g: &LieAlgebra) -> Vec<Matrix> {
    let d = g.size();
    let mut rows = Vec::new();
    for x in g.basis() {
        // (T X - X T)_{ij} = sum_k T_ik X_kj - X_ik T_kj, unknown T_ab at index a*d+b.
        for i in 0..d {
            for j in 0..d {
                let mut row = vec![Q::zero(); d * d];
                for k in 0..d {
                    if !x.get(k, j).is_zero() {
                        row[i * d + k] += x.get(k, j);
                    }
                    if !x.get(i, k).is_zero() {
                        row[k * d + j] -= x.get(i, k);
                    }
                }
                if row.iter().any(|v| !v.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    let sol = if rows.is_empty() {
        Subspace::full(d * d)
    } else {
        Matrix::from_rows(rows).expect("rectangular").nullspace()
    };
    sol.basis().iter().map(|v| Matrix::from_flat(d, d, v.clone()).expect("square")).collect()
}

/// Kernels and images of `T - lambda` for commutant elements `T`; all are invariant.
fn commutant_subspaces(g: &LieAlgebra) -> (usize, Vec<Subspace>) {
    let d = g.size();
    let basis = commutant(g);
    let mut ts = basis.clone();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            ts.push(basis[i].add(&basis[j]));
        }
    }
    let mut out = Vec::new();
    for t in &ts {
        for lam in -2..=2 {
            let shifted = t.sub(&Matrix::identity(d).scale(&q(lam)));
            let ker = shifted.nullspace();
            if ker.dim() > 0 && ker.dim() < d {
                out.push(Subspace::full(d).image(&shifted));
                out.push(ker);
            }
        }
    }
    (basis.len(), out)
}

/// Falsification search for a witness of non-weak-irreducibility.
pub fn find_nondeg_invariant(g: &LieAlgebra, cfg: &SearchConfig) -> (Option<Subspace>, ProbeLog) {
    let d = g.size();
    let n = (d - 4) / 2;
    let amb = build_ambient(n);
    let mut log = ProbeLog { seed: cfg.seed, lattice_cap: cfg.lattice_cap, ..Default::default() };

    let frame: Vec<Vec<Q>> = (0..d).map(|i| axis(d, i)).collect();
    let structured = structured_probes(n);
    let random = random_probes(d, cfg.probes, cfg.seed);
    log.frame_probes = frame.len();
    log.structured_probes = structured.len();
    log.random_probes = random.len();

    let seeds: Vec<Vec<Q>> = frame.into_iter().chain(structured).chain(random).collect();
    let mut candidates: Vec<Subspace> =
        seeds.par_iter().map(|s| invariant_closure(g, std::slice::from_ref(s))).collect();
    let (cdim, comm) = commutant_subspaces(g);
    log.commutant_dim = cdim;
    log.commutant_probes = comm.len();
    candidates.extend(comm);

    let mut seen: BTreeSet<Vec<Vec<Q>>> = BTreeSet::new();
    let mut found: Vec<Subspace> = Vec::new();
    let mut push = |w: Subspace, found: &mut Vec<Subspace>, log: &mut ProbeLog| -> Option<Subspace> {
        if w.dim() == 0 || w.dim() == d || !seen.insert(w.basis().to_vec()) {
            return None;
        }
        if found.len() >= cfg.lattice_cap {
            log.cap_reached = true;
            return None;
        }
        found.push(w.clone());
        log.invariant_subspaces = found.len();
        is_witness(&amb, g, &w).then_some(w)
    };

    for w in candidates {
        let perp = amb.orthogonal(&w);
        for c in [w, perp] {
            if let Some(hit) = push(c, &mut found, &mut log) {
                return (Some(hit), log);
            }
        }
    }
    // Lattice exploration: sums and intersections of discovered subspaces.
    let mut i = 0;
    while i < found.len() && !log.cap_reached {
        for j in 0..i {
            let a = found[i].clone();
            let b = found[j].clone();
            for c in [a.sum(&b).expect("same ambient"), a.intersect(&b).expect("same ambient")] {
                if let Some(hit) = push(c, &mut found, &mut log) {
                    return (Some(hit), log);
                }
            }
        }
        i += 1;
    }
    (None, log)
}

/// A classified (or proven) weakly-irreducible algebra, optionally conjugated by `conj`.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub algebra: LieAlgebra,
    pub conj: Option<Matrix>,
}

impl CatalogEntry {
    pub fn new(name: impl Into<String>, algebra: LieAlgebra) -> Self {
        CatalogEntry { name: name.into(), algebra, conj: None }
    }

    pub fn matches(&self, g: &LieAlgebra) -> bool {
        if g.size() != self.algebra.size() {
            return false;
        }
        match &self.conj {
            None => self.algebra == *g,
            Some(p) => self.algebra.conjugate(p, false).map(|c| c == *g).unwrap_or(false),
        }
    }
}

/// Witness if the search finds one; a certificate only when the search fails and `g` is in the catalog.
pub fn check_weak_irreducibility(g: &LieAlgebra, catalog: &[CatalogEntry], cfg: &SearchConfig) -> InvarianceVerdict {
    let (witness, log) = find_nondeg_invariant(g, cfg);
    if witness.is_some() {
        return InvarianceVerdict { status: Status::NotWeaklyIrreducible, witness, certificate: None, log };
    }
    let certificate = catalog.iter().find(|e| e.matches(g)).map(|e| e.name.clone());
    let status = if certificate.is_some() { Status::WeaklyIrreducible } else { Status::Unknown };
    InvarianceVerdict { status, witness: None, certificate, log }
}
