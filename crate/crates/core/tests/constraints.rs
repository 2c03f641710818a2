use std::collections::HashMap;
use std::sync::Arc;

use fce_core::basis::BasisKind;
use fce_core::constraints::{build_reparameterization, Elimination};
use fce_core::fce1d::{build_field_1d, FceField1D, Partition1D};
use fce_core::field::{FceKind, Field};
use fce_core::layout::Param;
use fce_core::Error;
use proptest::prelude::*;

fn c1_field() -> FceField1D {
    let part = Partition1D::uniform(0.0, 1.0, 2).unwrap();
    build_field_1d(part, FceKind::C1, BasisKind::LegendreC1, 6, &HashMap::new()).unwrap()
}

/// α_2 = α_0³ and β_0 = 2 β_1 + α_2, a chain through a nonlinear rule.
fn chained() -> Vec<Elimination> {
    vec![
        Elimination::Nonlinear {
            target: Param::alpha(2),
            args: vec![Param::alpha(0)],
            f: Arc::new(|a: &[f64]| (a[0].powi(3), vec![3.0 * a[0] * a[0]])),
        },
        Elimination::Affine { target: Param::beta(0), sources: vec![(Param::beta(1), 2.0), (Param::alpha(2), 1.0)], offset: 0.5 },
    ]
}

#[test]
fn eliminated_entries_follow_their_rules() {
    let field = c1_field();
    let r = build_reparameterization(field.layout(), &chained()).unwrap();
    assert_eq!(r.n_theta() + 2, r.n_full());
    assert!(!r.is_affine());
    let theta: Vec<f64> = (0..r.n_theta()).map(|i| 0.1 * i as f64 - 0.4).collect();
    let full = r.expand(&theta).unwrap();
    let at = |p: Param| full[field.layout().index_of(&p).unwrap()];
    assert!((at(Param::alpha(2)) - at(Param::alpha(0)).powi(3)).abs() < 1e-15);
    assert!((at(Param::beta(0)) - (2.0 * at(Param::beta(1)) + at(Param::alpha(2)) + 0.5)).abs() < 1e-15);
    assert_eq!(r.restrict(&full), theta);
}

#[test]
fn cycles_and_duplicates_are_rejected() {
    let layout = c1_field().layout().clone();
    let a = |t: usize, s: usize| Elimination::Affine { target: Param::alpha(t), sources: vec![(Param::alpha(s), 1.0)], offset: 0.0 };
    assert!(matches!(build_reparameterization(&layout, &[a(0, 1), a(1, 0)]), Err(Error::Constraint(_))));
    assert!(matches!(build_reparameterization(&layout, &[a(0, 1), a(0, 2)]), Err(Error::Constraint(_))));
    let stranger = Elimination::Affine { target: Param::alpha(9), sources: Vec::new(), offset: 0.0 };
    assert!(matches!(build_reparameterization(&layout, &[stranger]), Err(Error::Constraint(_))));
}

#[test]
fn fixed_targets_are_rejected() {
    let field = c1_field();
    let fixed: HashMap<Param, f64> = [(Param::alpha(0), 1.0)].into_iter().collect();
    let f = field.with_fixed(&fixed).unwrap();
    let e = Elimination::Affine { target: Param::alpha(0), sources: vec![(Param::alpha(1), 1.0)], offset: 0.0 };
    assert!(matches!(build_reparameterization(f.layout(), &[e]), Err(Error::Constraint(_))));
}

#[test]
fn expand_checks_length() {
    let r = build_reparameterization(c1_field().layout(), &chained()).unwrap();
    assert!(matches!(r.expand(&[0.0]), Err(Error::Shape { .. })));
}

proptest! {
    #[test]
    fn reparameterization_jacobian_matches_finite_differences(seed in proptest::collection::vec(-1.0..1.0f64, 16)) {
        let r = build_reparameterization(c1_field().layout(), &chained()).unwrap();
        let theta: Vec<f64> = (0..r.n_theta()).map(|i| seed[i % seed.len()]).collect();
        let jac = r.jacobian(&theta).unwrap();
        let h = 1e-6;
        for j in 0..r.n_theta() {
            let mut tp = theta.clone();
            let mut tm = theta.clone();
            tp[j] += h;
            tm[j] -= h;
            let (fp, fm) = (r.expand(&tp).unwrap(), r.expand(&tm).unwrap());
            for (i, row) in jac.iter().enumerate() {
                let analytic: f64 = row.iter().filter(|t| t.0 == j).map(|t| t.1).sum();
                let fd = (fp[i] - fm[i]) / (2.0 * h);
                prop_assert!((fd - analytic).abs() < 1e-7, "d{i}/d{j}: {fd} vs {analytic}");
            }
        }
    }
}
