//! Command-line front end: builds algebras and metrics, runs the checks and verifies campaigns.
//!
//! Exit codes: 0 success, 1 verdict mismatch, 2 input or validation error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use holonomy_forge::campaign::{
    default_catalog, is_classified, prepare_campaign, resolve_files, run_campaign, AlgebraInput, Campaign,
    RunOptions, TOOL_VERSION,
};
use holonomy_forge::curvature::berger_check;
use holonomy_forge::family::{build_family, BuiltFamily, FamilySpec};
use holonomy_forge::holonomy::{default_cap, holonomy_at_origin};
use holonomy_forge::invariance::{check_weak_irreducibility, CatalogEntry, SearchConfig, DEFAULT_LATTICE_CAP};
use holonomy_forge::lie::{matrix_strings, LieAlgebra};
use holonomy_forge::metric::{metric_for_family, MetricJson, MetricModel};

#[derive(Parser)]
#[command(name = "holonomy-forge", version, about = "Exact holonomy algebras of pseudo-Kähler metrics of signature (2, 2n+2)")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a family algebra or print its bracket table.
    Algebra {
        #[command(subcommand)]
        cmd: AlgebraCmd,
    },
    /// Curvature-tensor space and Berger verdict.
    Berger {
        #[command(subcommand)]
        cmd: BergerCmd,
    },
    /// Weak-irreducibility search.
    Wirr {
        #[command(subcommand)]
        cmd: WirrCmd,
    },
    /// Metric realizing a holonomy family.
    Metric {
        #[command(subcommand)]
        cmd: MetricCmd,
    },
    /// Holonomy algebra at the origin of a metric.
    Holonomy {
        #[command(subcommand)]
        cmd: HolonomyCmd,
    },
    /// Run a campaign of verification cases.
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
}

#[derive(Subcommand)]
enum AlgebraCmd {
    /// Family spec file -> basis and structure data.
    Build { spec: PathBuf },
    /// Algebra file -> bracket table in the canonical basis.
    BracketTable { file: PathBuf },
}

#[derive(Subcommand)]
enum BergerCmd {
    Check { file: PathBuf },
}

#[derive(Args)]
struct SearchArgs {
    /// Number of seeded random probe vectors.
    #[arg(long, default_value_t = 64)]
    probes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum WirrCmd {
    Check {
        file: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
}

#[derive(Subcommand)]
enum MetricCmd {
    Build { spec: PathBuf },
}

#[derive(Subcommand)]
enum HolonomyCmd {
    Compute {
        metric: PathBuf,
        /// Highest covariant-derivative order (default 2n+6, or max(2n+6, N+4) for a family metric).
        #[arg(long)]
        max_order: Option<usize>,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    Campaign {
        file: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        max_order: Option<usize>,
        /// Maximum number of cases run concurrently.
        #[arg(long)]
        jobs: Option<usize>,
        /// Omit wall-clock times so that repeated runs give byte-identical output.
        #[arg(long)]
        no_timings: bool,
    },
}

enum Failure {
    Input(String),
    Mismatch(String),
}

type Outcome = Result<(), Failure>;

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: invalid JSON: {e}", path.display())))
}

fn decode<T: serde::de::DeserializeOwned>(v: Value, path: &Path) -> Result<T, Failure> {
    serde_json::from_value(v).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit<T: Serialize>(v: &T) -> Outcome {
    let text = serde_json::to_string_pretty(v).map_err(input)?;
    println!("{text}");
    Ok(())
}

fn load_family(path: &Path) -> Result<BuiltFamily, Failure> {
    let spec: FamilySpec = decode(read_json(path)?, path)?;
    build_family(&spec).map_err(input)
}

/// A family spec (has `family`) or an algebra input (has `n` and `basis`; other keys are ignored,
/// so the output of `algebra build` is accepted).
fn load_algebra(path: &Path) -> Result<(LieAlgebra, Option<BuiltFamily>), Failure> {
    let v = read_json(path)?;
    let obj = v.as_object().ok_or_else(|| Failure::Input(format!("{}: expected a JSON object", path.display())))?;
    if obj.contains_key("family") {
        let spec: FamilySpec = decode(v, path)?;
        let b = build_family(&spec).map_err(input)?;
        return Ok((b.algebra.clone(), Some(b)));
    }
    if obj.contains_key("basis") {
        let a: AlgebraInput = decode(json!({ "n": obj.get("n"), "basis": obj.get("basis") }), path)?;
        return Ok((a.build().map_err(input)?, None));
    }
    Err(Failure::Input(format!("{}: expected a family spec (`family`) or an algebra (`n`, `basis`)", path.display())))
}

fn algebra_build(spec: &Path) -> Outcome {
    let b = load_family(spec)?;
    let g = &b.algebra;
    emit(&json!({
        "n": b.n,
        "dim": g.dim(),
        "basis": { "seven_tuples": g.seven_tuples() },
        "matrices": g.basis().iter().map(matrix_strings).collect::<Vec<_>>(),
        "derived_dim": g.derived().dim(),
        "center_dim": g.center().dim(),
        "spec": b.spec,
    }))
}

fn bracket_table(file: &Path) -> Outcome {
    let (g, _) = load_algebra(file)?;
    emit(&json!({
        "dim": g.dim(),
        "basis": g.basis().iter().map(matrix_strings).collect::<Vec<_>>(),
        "bracket_table": g.bracket_table(),
    }))
}

fn berger(file: &Path) -> Outcome {
    let (g, _) = load_algebra(file)?;
    emit(&berger_check(&g).to_json(&g))
}

fn wirr(file: &Path, s: &SearchArgs) -> Outcome {
    let (g, built) = load_algebra(file)?;
    let mut catalog = default_catalog(g.ambient_n().unwrap_or(0));
    if let Some(b) = built.filter(|b| is_classified(b.tag)) {
        catalog.push(CatalogEntry::new(format!("family {}", b.tag), b.algebra));
    }
    let cfg = SearchConfig { probes: s.probes, seed: s.seed, lattice_cap: DEFAULT_LATTICE_CAP };
    emit(&check_weak_irreducibility(&g, &catalog, &cfg).to_json())
}

fn metric(spec: &Path) -> Outcome {
    let spec: FamilySpec = decode(read_json(spec)?, spec)?;
    let (_, m) = metric_for_family(&spec).map_err(input)?;
    emit(&m.to_json())
}

fn holonomy(path: &Path, max_order: Option<usize>) -> Outcome {
    let j: MetricJson = decode(read_json(path)?, path)?;
    let m = MetricModel::from_json(&j).map_err(input)?;
    let built = match &m.family {
        Some(spec) => Some(build_family(spec).map_err(input)?),
        None => None,
    };
    let cap = max_order.unwrap_or_else(|| default_cap(m.n, built.as_ref().map(BuiltFamily::dim_u)));
    let rep = holonomy_at_origin(&m, cap, built.as_ref().map(|b| &b.algebra)).map_err(input)?;
    emit(&rep.to_json())
}

fn verify(file: &Path, s: &SearchArgs, max_order: Option<usize>, jobs: Option<usize>, timings: bool) -> Outcome {
    let mut c: Campaign = decode(read_json(file)?, file)?;
    resolve_files(&mut c, file.parent().unwrap_or(Path::new("."))).map_err(input)?;
    let cases = prepare_campaign(&c).map_err(input)?;
    let opts = RunOptions { probes: s.probes, seed: s.seed, max_order, timings };
    let certs = run_campaign(&cases, &opts, jobs);
    let failed: Vec<&str> = certs.iter().filter(|c| !c.pass).map(|c| c.case_id.as_str()).collect();
    for cert in &certs {
        if cert.pass {
            eprintln!("PASS {}", cert.case_id);
        } else {
            let why: Vec<String> = cert
                .checks
                .iter()
                .filter(|k| !k.pass)
                .map(|k| format!("{}: expected {}, got {}", k.check, k.expected, k.actual))
                .chain(cert.error.iter().cloned())
                .collect();
            eprintln!("FAIL {} ({})", cert.case_id, why.join("; "));
        }
    }
    emit(&json!({
        "campaign": c.name,
        "tool_version": TOOL_VERSION,
        "passed": certs.len() - failed.len(),
        "failed": failed,
        "certificates": certs,
    }))?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!("{} of {} cases failed", failed.len(), certs.len())))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match &cli.cmd {
        Cmd::Algebra { cmd: AlgebraCmd::Build { spec } } => algebra_build(spec),
        Cmd::Algebra { cmd: AlgebraCmd::BracketTable { file } } => bracket_table(file),
        Cmd::Berger { cmd: BergerCmd::Check { file } } => berger(file),
        Cmd::Wirr { cmd: WirrCmd::Check { file, search } } => wirr(file, search),
        Cmd::Metric { cmd: MetricCmd::Build { spec } } => metric(spec),
        Cmd::Holonomy { cmd: HolonomyCmd::Compute { metric, max_order } } => holonomy(metric, *max_order),
        Cmd::Verify { cmd: VerifyCmd::Campaign { file, search, max_order, jobs, no_timings } } => {
            verify(file, search, *max_order, *jobs, !no_timings)
        }
    };
    match out {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch(m)) => {
            eprintln!("mismatch: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
