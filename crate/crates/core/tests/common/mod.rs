//! Shared family instances for the integration tests.
#![allow(dead_code)]

use holonomy_forge::family::{FamilySpec, FamilyTag, PsiValue, SubalgebraInput};
use holonomy_forge::metric::{assemble_metric, MetricBlocks, MetricModel};
use holonomy_forge::poly::Poly;
use holonomy_forge::scalar::{parse, QValue};

pub fn qv(s: &str) -> QValue {
    QValue(parse(s).unwrap())
}

pub fn qvs(xs: &[&str]) -> Vec<QValue> {
    xs.iter().map(|s| qv(s)).collect()
}

/// `u` given by a standard tag, or `"0"` for the zero subalgebra.
pub fn spec(tag: FamilyTag, n: usize, m: Option<usize>, u: &str) -> FamilySpec {
    let mut s = FamilySpec::new(tag, n);
    s.m = m;
    s.u = Some(if u == "0" { SubalgebraInput::tuples(vec![]) } else { SubalgebraInput::standard(u) });
    s
}

pub fn gamma(g1: &str, g2: &str) -> FamilySpec {
    let mut s = FamilySpec::new(FamilyTag::HolGammaN0, 0);
    s.gamma = Some(qvs(&[g1, g2]));
    s
}

pub fn a1_phi(n: usize, m: usize, u: &str, phi: &[&str]) -> FamilySpec {
    let mut s = spec(FamilyTag::HolA1Phi, n, Some(m), u);
    s.phi = Some(qvs(phi));
    s
}

pub fn varphi_phi(n: usize, m: usize, u: &str, varphi: &[&str], phi: &[&str]) -> FamilySpec {
    let mut s = spec(FamilyTag::HolVarphiPhi, n, Some(m), u);
    s.varphi = Some(qvs(varphi));
    s.phi = Some(qvs(phi));
    s
}

pub fn varphi_tilde(n: usize, m: usize, u: &str, varphi: &[&str]) -> FamilySpec {
    let mut s = spec(FamilyTag::HolVarphiTildeA2, n, Some(m), u);
    s.varphi = Some(qvs(varphi));
    s
}

pub fn lambda(n: usize, m: usize, u: &str, l: &str) -> FamilySpec {
    let mut s = spec(FamilyTag::HolLambda, n, Some(m), u);
    s.lambda = Some(qv(l));
    s
}

/// `psi` values as `(z1, z2)` per basis element of `u`.
pub fn psi_vals(vals: &[(&[&str], &[&str])]) -> Vec<PsiValue> {
    vals.iter().map(|(a, b)| PsiValue { z1: qvs(a), z2: qvs(b) }).collect()
}

pub fn n_psi(n: usize, k: usize, l: usize, u: &str, psi: Vec<PsiValue>) -> FamilySpec {
    let mut s = spec(FamilyTag::HolNPsi, n, None, u);
    s.k = Some(k);
    s.l = Some(l);
    s.psi = Some(psi);
    s
}

pub fn m_psi(n: usize, m: usize, k: usize, l: usize, r: usize, u: &str, psi: Vec<PsiValue>) -> FamilySpec {
    let mut s = spec(FamilyTag::HolMPsi, n, Some(m), u);
    s.k = Some(k);
    s.l = Some(l);
    s.r = Some(r);
    s.psi = Some(psi);
    s
}

/// Built holonomy families at `n <= 2`, by id.
pub fn hol_families() -> Vec<(&'static str, FamilySpec)> {
    use FamilyTag::*;
    vec![
        ("n0_hol1", FamilySpec::new(Hol1N0, 0)),
        ("n0_hol2", FamilySpec::new(Hol2N0, 0)),
        ("n0_gamma_1_0", gamma("1", "0")),
        ("n0_gamma_0_1", gamma("0", "1")),
        ("n0_gamma_1_1", gamma("1", "1")),
        ("n0_gamma_0_0", gamma("0", "0")),
        ("n1_A1_tildeA2_m1", spec(HolA1TildeA2, 1, Some(1), "u(1..1)")),
        ("n1_A1_tildeA2_m0", spec(HolA1TildeA2, 1, Some(0), "0")),
        ("n1_A1_phi_m1", a1_phi(1, 1, "u(1..1)", &["1"])),
        ("n1_A1_phi_m1_su", a1_phi(1, 1, "u(1..1)", &["-1/2"])),
        ("n1_A1_phi_m0", a1_phi(1, 0, "0", &[])),
        ("n1_varphi_phi_m1", varphi_phi(1, 1, "u(1..1)", &["1"], &["1"])),
        ("n1_varphi_phi_m1_su", varphi_phi(1, 1, "u(1..1)", &["1"], &["-1/2"])),
        ("n1_varphi_tildeA2_m1", varphi_tilde(1, 1, "u(1..1)", &["1"])),
        ("n1_lambda_m1", lambda(1, 1, "0", "1")),
        ("n1_npsi_u1", n_psi(1, 1, 1, "u(1..1)", psi_vals(&[(&[], &[])]))),
        ("n1_npsi_u0", n_psi(1, 1, 1, "0", vec![])),
        ("n2_A1_tildeA2_m2", spec(HolA1TildeA2, 2, Some(2), "u(1..2)")),
        ("n2_A1_tildeA2_m1", spec(HolA1TildeA2, 2, Some(1), "u(1..1)")),
        ("n2_A1_phi_m2", a1_phi(2, 2, "u(1..2)", &["0", "1", "0", "1"])),
        ("n2_A1_phi_m2_su", a1_phi(2, 2, "u(1..2)", &["0", "-1/2", "0", "-1/2"])),
        ("n2_A1_phi_m1", a1_phi(2, 1, "u(1..1)", &["1"])),
        ("n2_varphi_phi_m2_su", varphi_phi(2, 2, "u(1..2)", &["0", "1", "0", "1"], &["0", "-1/2", "0", "-1/2"])),
        ("n2_varphi_phi_m1", varphi_phi(2, 1, "u(1..1)", &["1"], &["1"])),
        ("n2_varphi_tildeA2_m2", varphi_tilde(2, 2, "u(1..2)", &["0", "1", "0", "1"])),
        ("n2_lambda_m2", lambda(2, 2, "0", "2")),
        ("n2_lambda_m1", lambda(2, 1, "0", "1")),
        ("n2_npsi_k1", n_psi(2, 1, 1, "u(1..1)", psi_vals(&[(&[], &["0", "1"])]))),
        ("n2_npsi_k2_su", n_psi(2, 2, 2, "su(1..2)", psi_vals(&[(&[], &[]), (&[], &[]), (&[], &[])]))),
        ("n2_mpsi_r1", m_psi(2, 1, 1, 1, 1, "u(1..1)", psi_vals(&[(&["0", "1"], &[])]))),
        ("n2_mpsi_r2_u0", m_psi(2, 1, 1, 1, 2, "0", vec![])),
    ]
}

/// Splits the `hol_n_u_psi_k_l` metric at n = 2, k = l = 1, u = u(1) into its hat and bar parts.
/// `u` acts on `E_1` only, so the hat part lives on `x^3, x^5` and the bar part on `x^4, x^6`
/// (both also on `x^{2n+3}`).
pub fn split_npsi_n2(m: &MetricModel) -> (MetricModel, MetricModel) {
    let d = m.dim();
    let (hat_vars, bar_vars) = ([2usize, 4], [3usize, 5]);
    let mut hat = MetricBlocks::zero(2);
    let mut bar = MetricBlocks::zero(2);
    for (i, f) in m.blocks.f.iter().enumerate() {
        for (mono, c) in f.terms() {
            let on_bar = bar_vars.iter().any(|&v| mono[v] > 0);
            let on_hat = hat_vars.iter().any(|&v| mono[v] > 0);
            assert!(!(on_bar && on_hat), "mixed monomial in f_{}", i + 1);
            let target = if on_bar { &mut bar.f[i] } else { &mut hat.f[i] };
            *target += &Poly::monomial(d, mono.clone(), c.clone());
        }
    }
    for u in &m.blocks.u {
        assert!(u.support().iter().all(|v| !bar_vars.contains(v)));
    }
    hat.u = m.blocks.u.clone();
    assert!(!bar.f.iter().all(Poly::is_zero), "split must be nontrivial");
    (assemble_metric(hat).unwrap(), assemble_metric(bar).unwrap())
}
