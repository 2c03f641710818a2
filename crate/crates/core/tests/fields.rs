use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use fce_core::basis::BasisKind;
use fce_core::constraints::{apply_boundary_1d, apply_boundary_2d, BcKind, BoundaryCondition, Enforcement, Side};
use fce_core::fce1d::{build_field_1d, materialize_1d, Partition1D};
use fce_core::fce2d::{build_field_2d, Mesh2D};
use fce_core::field::{BasisFamily, FceKind, Field};
use fce_core::layout::Param;
use fce_core::Error;
use proptest::prelude::*;

fn field_1d(kind: FceKind, p: usize) -> fce_core::fce1d::FceField1D {
    let part = Partition1D::new(vec![0.0, 0.3, 0.45, 1.0, 1.7]).unwrap();
    let basis = BasisFamily::Legendre.kind_for(kind.blend(0));
    build_field_1d(part, kind, basis, p, &HashMap::new()).unwrap()
}

fn theta_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0..1.0f64, n)
}

#[test]
fn c1_layout_count_with_dirichlet_and_neumann() {
    let part = Partition1D::uniform(0.0, 1.0, 4).unwrap();
    let field = build_field_1d(part, FceKind::C1, BasisKind::LegendreC1, 5, &HashMap::new()).unwrap();
    // Two interior coefficients per element plus α and β at five nodes.
    assert_eq!(field.n_free(), 4 * 2 + 5 + 5);
    let bcs = vec![
        BoundaryCondition::constant(Side::Left, BcKind::Dirichlet, Enforcement::Exact, 0.3),
        BoundaryCondition::constant(Side::Right, BcKind::Neumann, Enforcement::Exact, -1.0),
    ];
    let applied = apply_boundary_1d(&field, &bcs).unwrap();
    assert_eq!(applied.field.n_free(), 16);
    assert_eq!(applied.field.layout().index_of(&Param::alpha(0)), None);
    assert_eq!(applied.field.layout().index_of(&Param::beta(4)), None);
}

#[test]
fn exact_dirichlet_holds_for_any_theta() {
    let field = field_1d(FceKind::C0, 5);
    let bcs = vec![
        BoundaryCondition::constant(Side::Left, BcKind::Dirichlet, Enforcement::Exact, 0.25),
        BoundaryCondition::constant(Side::Right, BcKind::Dirichlet, Enforcement::Exact, -2.0),
    ];
    let f = apply_boundary_1d(&field, &bcs).unwrap().field;
    let theta: Vec<f64> = (0..f.n_free()).map(|i| (i as f64 * 0.7).sin()).collect();
    let v = materialize_1d(&f, &theta, &[0.0, 1.7]).unwrap();
    assert!((v[0] - 0.25).abs() < 1e-14 && (v[1] + 2.0).abs() < 1e-14);
}

#[test]
fn exact_neumann_needs_c1() {
    let field = field_1d(FceKind::C0, 5);
    let bcs = vec![BoundaryCondition::constant(Side::Left, BcKind::Neumann, Enforcement::Exact, 1.0)];
    assert!(matches!(apply_boundary_1d(&field, &bcs), Err(Error::Mode(_))));
}

#[test]
fn conflicting_prescriptions_are_rejected() {
    let field = field_1d(FceKind::C1, 5);
    let bcs = vec![
        BoundaryCondition::constant(Side::Left, BcKind::Dirichlet, Enforcement::Exact, 1.0),
        BoundaryCondition::constant(Side::Left, BcKind::Dirichlet, Enforcement::Exact, 2.0),
    ];
    assert!(matches!(apply_boundary_1d(&field, &bcs), Err(Error::Data(_))));
}

#[test]
fn bad_partitions_are_rejected() {
    assert!(Partition1D::new(vec![0.0]).is_err());
    assert!(Partition1D::new(vec![0.0, 0.5, 0.5]).is_err());
    assert!(Partition1D::uniform(0.0, 1.0, 0).is_err());
    assert!(Mesh2D::new(vec![0.0, 1.0], vec![1.0, 0.0]).is_err());
}

#[test]
fn locate_breaks_ties_to_the_lower_element() {
    let field = field_1d(FceKind::C0, 4);
    assert_eq!(field.locate([0.3, 0.0]).unwrap(), 0);
    assert_eq!(field.locate([0.31, 0.0]).unwrap(), 1);
    assert!(matches!(field.locate([2.0, 0.0]), Err(Error::Domain(_))));
}

#[test]
fn exact_dirichlet_2d_reproduces_trace() {
    let mesh = Mesh2D::uniform([0.0, 1.0], [0.0, 2.0], 2, 3).unwrap();
    let field = build_field_2d(mesh, FceKind::C1, BasisFamily::Legendre, 5, 5).unwrap();
    let bcs = vec![BoundaryCondition::new(
        Side::Bottom,
        BcKind::Dirichlet,
        Enforcement::Exact,
        Arc::new(|x: f64| [(PI * x).sin(), PI * (PI * x).cos(), -PI * PI * (PI * x).sin()]),
    )];
    let f = apply_boundary_2d(&field, &bcs).unwrap().field;
    let theta: Vec<f64> = (0..f.n_free()).map(|i| (i as f64 * 1.3).cos()).collect();
    for k in 0..=20 {
        let x = k as f64 / 20.0;
        let v = f.functional([x, 0.0], 0, 0).unwrap().eval(&theta);
        assert!((v - (PI * x).sin()).abs() < 1e-13, "x={x}: {v}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn c0_1d_values_match_across_interfaces(theta in theta_strategy(field_1d(FceKind::C0, 6).n_free())) {
        let f = field_1d(FceKind::C0, 6);
        for e in 1..f.n_elements() {
            let x = f.element_bounds(e)[0];
            let l = f.form(e - 1, [x, 0.0]).component(0, 0).eval(&theta);
            let r = f.form(e, [x, 0.0]).component(0, 0).eval(&theta);
            prop_assert!((l - r).abs() < 1e-12);
        }
    }

    #[test]
    fn c1_1d_values_and_slopes_match_across_interfaces(theta in theta_strategy(field_1d(FceKind::C1, 6).n_free())) {
        let f = field_1d(FceKind::C1, 6);
        for e in 1..f.n_elements() {
            let x = f.element_bounds(e)[0];
            for k in 0..2 {
                let l = f.form(e - 1, [x, 0.0]).component(k, 0).eval(&theta);
                let r = f.form(e, [x, 0.0]).component(k, 0).eval(&theta);
                prop_assert!((l - r).abs() < 1e-11, "derivative {k}: {l} vs {r}");
            }
        }
    }

    #[test]
    fn fields_2d_are_continuous_across_interfaces(
        kind in prop_oneof![Just(FceKind::C0), Just(FceKind::C1), Just(FceKind::MixedC1x), Just(FceKind::MixedC1y)],
        seed in proptest::collection::vec(-1.0..1.0f64, 64),
        t in 0.02..0.98f64,
    ) {
        let mesh = Mesh2D::new(vec![0.0, 0.4, 1.0, 1.3], vec![-1.0, 0.2, 1.0]).unwrap();
        let f = build_field_2d(mesh.clone(), kind, BasisFamily::Legendre, 5, 4).unwrap();
        let theta: Vec<f64> = (0..f.n_free()).map(|i| seed[i % seed.len()] * (1.0 + (i / seed.len()) as f64 * 0.1)).collect();
        for j in 0..mesh.ny() {
            for i in 1..mesh.nx() {
                let y = mesh.ys[j] + t * (mesh.ys[j + 1] - mesh.ys[j]);
                let (a, b) = (mesh.element_index(i - 1, j), mesh.element_index(i, j));
                for k in 0..=kind.continuity(0).unwrap() {
                    let l = f.form(a, [mesh.xs[i], y]).component(k, 0).eval(&theta);
                    let r = f.form(b, [mesh.xs[i], y]).component(k, 0).eval(&theta);
                    prop_assert!((l - r).abs() < 1e-10, "{kind:?} x-interface d{k}: {l} vs {r}");
                }
            }
        }
        for j in 1..mesh.ny() {
            for i in 0..mesh.nx() {
                let x = mesh.xs[i] + t * (mesh.xs[i + 1] - mesh.xs[i]);
                let (a, b) = (mesh.element_index(i, j - 1), mesh.element_index(i, j));
                for k in 0..=kind.continuity(1).unwrap() {
                    let l = f.form(a, [x, mesh.ys[j]]).component(0, k).eval(&theta);
                    let r = f.form(b, [x, mesh.ys[j]]).component(0, k).eval(&theta);
                    prop_assert!((l - r).abs() < 1e-10, "{kind:?} y-interface d{k}: {l} vs {r}");
                }
            }
        }
    }
}
