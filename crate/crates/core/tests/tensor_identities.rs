//! Identities of the tensor engine on the constructed metrics.

mod common;

use holonomy_forge::ambient::gram;
use holonomy_forge::curvature::berger_check;
use holonomy_forge::holonomy::{
    christoffel, christoffel_mismatches, closed_form_christoffel, covariant_derivative, curvature_is_additive,
    holonomy_at_origin, riemann, PolyTensor,
};
use holonomy_forge::metric::{metric_for_family, MetricModel};
use holonomy_forge::poly::Poly;
use holonomy_forge::scalar::{inv_factorial, Q};

fn metric(id: &str) -> (holonomy_forge::family::BuiltFamily, MetricModel) {
    let (_, spec) = common::hol_families().into_iter().find(|(i, _)| *i == id).expect("known id");
    metric_for_family(&spec).unwrap()
}

#[test]
fn metrics_are_eta_at_origin_with_exact_inverse() {
    for (id, spec) in common::hol_families() {
        let (_, m) = metric_for_family(&spec).unwrap();
        assert_eq!(m.value_at_origin(), gram(spec.n), "{id}");
        assert!(m.inverse().is_ok(), "{id}");
    }
}

#[test]
fn closed_form_christoffels_match() {
    for (id, spec) in common::hol_families() {
        if spec.n == 0 {
            continue;
        }
        let (_, m) = metric_for_family(&spec).unwrap();
        assert!(m.has_dependency_pattern(), "{id}");
        let g = christoffel(&m, None).unwrap();
        assert_eq!(christoffel_mismatches(&g, &closed_form_christoffel(&m)), Vec::<String>::new(), "{id}");
    }
}

/// `R^i_{j,2n+3,2n+4} = sum_alpha A^i_{alpha j} (x^{2n+3})^{alpha-1} / (alpha-1)!` for `i, j` in `E`.
#[test]
fn u_block_curvature() {
    for id in ["n1_A1_tildeA2_m1", "n2_npsi_k1", "n2_lambda_m2"] {
        let (built, m) = metric(id);
        let n = built.n;
        let d = 2 * n + 4;
        let (s, t) = (2 * n + 2, 2 * n + 3);
        let r = riemann(&christoffel(&m, None).unwrap(), None);
        let mats: Vec<_> = built.u_basis.iter().map(|a| a.to_matrix(n).unwrap()).collect();
        for i in 2..2 * n + 2 {
            for j in 2..2 * n + 2 {
                let mut want = Poly::zero(d);
                for (k, a) in mats.iter().enumerate() {
                    let mut e = vec![0u16; d];
                    e[s] = k as u16;
                    want += &Poly::monomial(d, e, a.get(i, j) * inv_factorial(k as u32));
                }
                assert_eq!(r.get(&[i as u8, j as u8, s as u8, t as u8]), want, "{id} R^{}_{}", i + 1, j + 1);
            }
        }
    }
}

fn second_bianchi_violations(d: &PolyTensor, dim: usize) -> usize {
    let mut bad = 0;
    for a in 0..dim as u8 {
        for b in 0..dim as u8 {
            for c in 0..dim as u8 {
                for e in c + 1..dim as u8 {
                    for f in e + 1..dim as u8 {
                        let s = &(&d.get(&[a, b, c, e, f]) + &d.get(&[a, b, e, f, c])) + &d.get(&[a, b, f, c, e]);
                        if !s.is_zero() {
                            bad += 1;
                        }
                    }
                }
            }
        }
    }
    bad
}

#[test]
fn second_bianchi_identity() {
    for id in ["n1_A1_phi_m0", "n1_varphi_tildeA2_m1", "n2_npsi_k1"] {
        let (_, m) = metric(id);
        let cap = 6;
        let g = christoffel(&m, Some(cap + 1)).unwrap();
        let r = riemann(&g, Some(cap));
        let dr = covariant_derivative(&r, &g, Some(cap - 1));
        assert_eq!(second_bianchi_violations(&dr, m.dim()), 0, "{id}");
    }
}

#[test]
fn curvature_splits_over_disjoint_blocks() {
    let (_, m) = metric("n2_npsi_k1");
    let (hat, bar) = common::split_npsi_n2(&m);
    assert!(curvature_is_additive(&m, &hat, &bar).unwrap());
}

#[test]
fn metric_json_round_trip() {
    let (_, m) = metric("n2_mpsi_r1");
    let text = serde_json::to_string(&m.to_json()).unwrap();
    let back = MetricModel::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back.g, m.g);
    assert_eq!(serde_json::to_string(&back.to_json()).unwrap(), text);
}

#[test]
fn computed_holonomy_is_berger() {
    for id in ["n0_hol1", "n0_gamma_1_1", "n0_gamma_0_0", "n1_lambda_m1", "n1_npsi_u0"] {
        let (_, m) = metric(id);
        let rep = holonomy_at_origin(&m, 8, None).unwrap();
        assert!(berger_check(&rep.algebra).berger, "{id}");
        let zero = Q::from_integer(0.into());
        assert!(rep.curvature_at_origin.values().all(|v| *v != zero));
    }
}
