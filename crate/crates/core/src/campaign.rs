//! Declarative verification campaigns: cases with expected verdicts, and the certificates
//! produced by running them.

use std::collections::BTreeSet;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::{berger_check, BergerJson};
use crate::error::{ForgeError, Result};
use crate::family::{build_family, is_special_su, BuiltFamily, FamilySpec, FamilyTag, SubalgebraInput};
use crate::holonomy::{default_cap, holonomy_at_origin, ComparisonVerdict, HolonomyJson};
use crate::invariance::{check_weak_irreducibility, CatalogEntry, SearchConfig, Status, VerdictJson, DEFAULT_LATTICE_CAP};
use crate::lie::{AlgebraJson, LieAlgebra};
use crate::metric::{metric_for_family, MetricModel};
use crate::standard::{self as st, standard_subalgebra, StandardTag};

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// An algebra given directly by a basis inside the model space of size `2n+4`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraInput {
    pub n: usize,
    pub basis: SubalgebraInput,
}

impl AlgebraInput {
    pub fn build(&self) -> Result<LieAlgebra> {
        st::algebra_of(self.n, &self.basis.resolve(self.n)?)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub berger: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_r: Option<usize>,
    /// `true`: certified weakly irreducible; `false`: a witness is found.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weakly_irreducible: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub special: Option<bool>,
    /// Comparison of the computed holonomy of the family metric with the family algebra.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holonomy: Option<ComparisonVerdict>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationCase {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraInput>,
    /// Path of a `FamilySpec` file, relative to the campaign file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family_file: Option<String>,
    /// Path of an `AlgebraInput` file, relative to the campaign file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra_file: Option<String>,
    #[serde(default)]
    pub expect: Expectations,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_order: Option<usize>,
}

impl VerificationCase {
    pub fn for_family(id: impl Into<String>, spec: FamilySpec, expect: Expectations) -> Self {
        VerificationCase {
            id: id.into(),
            family: Some(spec),
            algebra: None,
            family_file: None,
            algebra_file: None,
            expect,
            seed: None,
            probes: None,
            max_order: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Campaign {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub cases: Vec<VerificationCase>,
}

/// Defaults applied to cases that do not set their own.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub probes: usize,
    pub seed: u64,
    pub max_order: Option<usize>,
    /// Record wall-clock time in certificates.
    pub timings: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { probes: crate::invariance::DEFAULT_PROBES, seed: 0, max_order: None, timings: true }
    }
}

/// A validated case with its algebra (and metric, when holonomy is expected) built.
#[derive(Clone, Debug)]
pub struct PreparedCase {
    pub case: VerificationCase,
    pub algebra: LieAlgebra,
    pub built: Option<BuiltFamily>,
    pub metric: Option<MetricModel>,
}

fn case_err(id: &str, e: ForgeError) -> ForgeError {
    match e {
        ForgeError::Parse(m) => ForgeError::Parse(format!("case {id}: {m}")),
        ForgeError::Dimension(m) => ForgeError::Dimension(format!("case {id}: {m}")),
        ForgeError::Index(m) => ForgeError::Index(format!("case {id}: {m}")),
        ForgeError::Constraint(m) => ForgeError::Constraint(format!("case {id}: {m}")),
        ForgeError::Singular(m) => ForgeError::Singular(format!("case {id}: {m}")),
        ForgeError::NotClosed(m) => ForgeError::NotClosed(format!("case {id}: {m}")),
        ForgeError::Unsupported(m) => ForgeError::Unsupported(format!("case {id}: {m}")),
    }
}

pub fn prepare_case(case: &VerificationCase) -> Result<PreparedCase> {
    let id = case.id.as_str();
    let (algebra, built) = match (&case.family, &case.algebra) {
        (Some(spec), None) => {
            let b = build_family(spec).map_err(|e| case_err(id, e))?;
            (b.algebra.clone(), Some(b))
        }
        (None, Some(a)) => (a.build().map_err(|e| case_err(id, e))?, None),
        _ if case.family_file.is_some() || case.algebra_file.is_some() => {
            return Err(ForgeError::Parse(format!("case {id}: referenced files are not resolved")))
        }
        _ => return Err(ForgeError::Parse(format!("case {id}: give exactly one of `family`, `algebra`"))),
    };
    let metric = match (&case.expect.holonomy, &case.family) {
        (None, _) => None,
        (Some(_), Some(spec)) => Some(metric_for_family(spec).map_err(|e| case_err(id, e))?.1),
        (Some(_), None) => {
            return Err(ForgeError::Parse(format!("case {id}: a holonomy expectation needs a `family`")))
        }
    };
    Ok(PreparedCase { case: case.clone(), algebra, built, metric })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ForgeError::Parse(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| ForgeError::Parse(format!("{}: {e}", path.display())))
}

/// Loads the files referenced by the cases, relative to `base`, into the inline fields.
pub fn resolve_files(c: &mut Campaign, base: &Path) -> Result<()> {
    for case in &mut c.cases {
        if let Some(f) = case.family_file.take() {
            if case.family.is_some() {
                return Err(ForgeError::Parse(format!("case {}: both `family` and `family_file`", case.id)));
            }
            case.family = Some(read_json(&base.join(f)).map_err(|e| case_err(&case.id, e))?);
        }
        if let Some(f) = case.algebra_file.take() {
            if case.algebra.is_some() {
                return Err(ForgeError::Parse(format!("case {}: both `algebra` and `algebra_file`", case.id)));
            }
            case.algebra = Some(read_json(&base.join(f)).map_err(|e| case_err(&case.id, e))?);
        }
    }
    Ok(())
}

/// Validates every case before anything runs.
pub fn prepare_campaign(c: &Campaign) -> Result<Vec<PreparedCase>> {
    let mut ids = BTreeSet::new();
    for case in &c.cases {
        if case.id.is_empty() || !ids.insert(case.id.as_str()) {
            return Err(ForgeError::Parse(format!("case id {:?} is empty or repeated", case.id)));
        }
    }
    c.cases.par_iter().map(prepare_case).collect()
}

/// Named weakly-irreducible algebras used to certify negative search outcomes.
pub fn default_catalog(n: usize) -> Vec<CatalogEntry> {
    let mut out = Vec::new();
    let mut push = |name: &str, tuples: Vec<crate::ambient::SevenTuple>| {
        if let Ok(g) = st::algebra_of(n, &tuples) {
            out.push(CatalogEntry::new(name, g));
        }
    };
    push("u(1,n+1)_<p1,p2>", st::full_elems(n));
    push("su(1,n+1)_<p1,p2>", st::su_full_elems(n));
    if n == 0 {
        push("C", vec![st::c_elem(0)]);
        push("A1+A2", vec![st::a1_elem(0), st::a2_elem(0)]);
    } else {
        let mut nc = st::n1_elems(n, 1, n);
        nc.push(st::c_elem(n));
        push("N1+C", nc);
        let mut nj = st::n1_elems(n, 1, n);
        nj.push(st::j_elem(n));
        push("N1+RJ", nj);
    }
    out
}

/// Whether the family belongs to the classification (every tag except the witness constructor).
pub fn is_classified(tag: FamilyTag) -> bool {
    tag != FamilyTag::G0A1Zeta
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub check: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub case_id: String,
    pub tool_version: String,
    pub seed: u64,
    pub probes: usize,
    pub algebra: AlgebraJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub berger: Option<BergerJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weak_irreducibility: Option<VerdictJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub special: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holonomy: Option<HolonomyJson>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub metric_notes: Vec<String>,
    pub checks: Vec<CheckOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub pass: bool,
    /// `None` when timings are suppressed for byte-identical output.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<u64>,
}

fn outcome<T: std::fmt::Debug + PartialEq>(check: &str, expected: &T, actual: &T) -> CheckOutcome {
    CheckOutcome {
        check: check.into(),
        expected: format!("{expected:?}"),
        actual: format!("{actual:?}"),
        pass: expected == actual,
    }
}

pub fn run_case(p: &PreparedCase, opts: &RunOptions) -> Certificate {
    let t0 = Instant::now();
    let case = &p.case;
    let g = &p.algebra;
    let n = g.ambient_n().unwrap_or(0);
    let seed = case.seed.unwrap_or(opts.seed);
    let probes = case.probes.unwrap_or(opts.probes);
    let e = &case.expect;
    let mut checks = Vec::new();
    let mut error = None;

    if let Some(d) = e.dim {
        checks.push(outcome("dim", &d, &g.dim()));
    }
    let berger = (e.berger.is_some() || e.dim_r.is_some()).then(|| {
        let r = berger_check(g);
        if let Some(b) = e.berger {
            checks.push(outcome("berger", &b, &r.berger));
        }
        if let Some(d) = e.dim_r {
            checks.push(outcome("dim_r", &d, &r.dim_r));
        }
        r.to_json(g)
    });
    let weak_irreducibility = e.weakly_irreducible.map(|want| {
        let mut catalog = default_catalog(n);
        if let Some(b) = p.built.as_ref().filter(|b| is_classified(b.tag)) {
            catalog.push(CatalogEntry::new(format!("family {}", b.tag), b.algebra.clone()));
        }
        let cfg = SearchConfig { probes, seed, lattice_cap: DEFAULT_LATTICE_CAP };
        let v = check_weak_irreducibility(g, &catalog, &cfg);
        let want = if want { Status::WeaklyIrreducible } else { Status::NotWeaklyIrreducible };
        checks.push(outcome("weakly_irreducible", &want, &v.status));
        v.to_json()
    });
    let special = e.special.map(|want| {
        let s = is_special_su(g);
        checks.push(outcome("special", &want, &s));
        s
    });
    let mut holonomy = None;
    let mut metric_notes = Vec::new();
    if let (Some(want), Some(metric)) = (&e.holonomy, &p.metric) {
        metric_notes = metric.notes.clone();
        let cap = case
            .max_order
            .or(opts.max_order)
            .unwrap_or_else(|| default_cap(n, p.built.as_ref().map(BuiltFamily::dim_u)));
        match holonomy_at_origin(metric, cap, Some(g)) {
            Ok(rep) => {
                let got = rep.comparison.as_ref().map(|c| c.verdict.clone());
                checks.push(outcome("holonomy", &Some(want.clone()), &got));
                holonomy = Some(rep.to_json());
            }
            Err(err) => error = Some(err.to_string()),
        }
    }
    let pass = error.is_none() && checks.iter().all(|c| c.pass);
    Certificate {
        case_id: case.id.clone(),
        tool_version: TOOL_VERSION.into(),
        seed,
        probes,
        algebra: g.to_json(),
        berger,
        weak_irreducibility,
        special,
        holonomy,
        metric_notes,
        checks,
        error,
        pass,
        wall_clock_ms: opts.timings.then(|| t0.elapsed().as_millis() as u64),
    }
}

/// Runs all cases on up to `jobs` threads; certificates are ordered by case id.
pub fn run_campaign(cases: &[PreparedCase], opts: &RunOptions, jobs: Option<usize>) -> Vec<Certificate> {
    let run = || {
        let mut certs: Vec<Certificate> = cases.par_iter().map(|p| run_case(p, opts)).collect();
        certs.sort_by(|a, b| a.case_id.cmp(&b.case_id));
        certs
    };
    match jobs.and_then(|j| rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build().ok()) {
        Some(pool) => pool.install(run),
        None => run(),
    }
}

/// A standard subalgebra as a campaign algebra input.
pub fn standard_input(tag: StandardTag, n: usize) -> Result<AlgebraInput> {
    standard_subalgebra(tag, n)?;
    Ok(AlgebraInput { n, basis: SubalgebraInput::standard(&tag.to_string()) })
}
