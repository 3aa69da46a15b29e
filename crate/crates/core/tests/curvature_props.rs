use holonomy_forge::ambient::SevenTuple;
use holonomy_forge::curvature::*;
use holonomy_forge::lie::LieAlgebra;
use holonomy_forge::scalar::q;
use holonomy_forge::standard::{self as st, standard_subalgebra, StandardTag};

fn line(g1: i64, g2: i64, c: i64) -> LieAlgebra {
    let mut t = SevenTuple::zero(0);
    t.a1 = q(g1);
    t.a2 = q(g2);
    t.c = q(c);
    st::algebra_of(0, &[t]).unwrap()
}

#[test]
fn n0_case_analysis() {
    assert!(curvature_space(&line(1, 1, 0)).is_empty());
    assert!(curvature_space(&line(2, -3, 0)).is_empty());
    let r = berger_check(&line(1, 2, 1));
    assert!(!r.berger);
    assert_eq!(r.dim_r, 0);
    let c = standard_subalgebra(StandardTag::C, 0).unwrap();
    assert_eq!(curvature_space(&c).len(), 1);
    assert!(berger_check(&standard_subalgebra(StandardTag::Full, 0).unwrap()).berger);
    let a12 = st::algebra_of(0, &[st::a1_elem(0), st::a2_elem(0)]).unwrap();
    assert!(berger_check(&a12).berger);
}

#[test]
fn sod_has_no_curvature() {
    for n in 2..=4 {
        let g = standard_subalgebra(StandardTag::Sod { k: 1, l: n }, n).unwrap();
        assert!(curvature_space(&g).is_empty(), "n = {n}");
        assert!(weak_curvature_space(&g).is_empty(), "n = {n}");
    }
}

#[test]
fn full_n2_berger() {
    let g = standard_subalgebra(StandardTag::Full, 2).unwrap();
    let r = berger_check(&g);
    assert!(r.berger);
    for c in &r.curvature {
        assert!(bianchi_holds(&g, c));
        assert!(pairing_symmetric(&g, c));
        assert!(vanishes_off_algebra(&g, c));
    }
}
