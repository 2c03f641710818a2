use std::f64::consts::PI;
use std::sync::Arc;

use fce_core::basis::Jet;
use fce_core::tfc::{
    bivariate_lift_c0, bivariate_lift_c1, build_constrained_expression, hermite_switch, linear_switch, EdgeTraces,
    Jet2, PointConstraint, PointOp, Rect,
};
use fce_core::Error;
use proptest::prelude::*;

fn op_index(op: PointOp) -> usize {
    match op {
        PointOp::Value => 0,
        PointOp::Derivative => 1,
    }
}

/// `A sin(w x + c)` and its derivatives.
fn sine(a: f64, w: f64, c: f64) -> impl Fn(f64) -> Jet {
    move |x| [a * (w * x + c).sin(), a * w * (w * x + c).cos(), -a * w * w * (w * x + c).sin()]
}

/// `sin(a x + c) cos(b y + d)` with mixed derivatives up to order two.
fn wave(a: f64, b: f64, c: f64, d: f64) -> Arc<dyn Fn(f64, f64) -> Jet2 + Send + Sync> {
    Arc::new(move |x, y| {
        let mut j = [[0.0; 3]; 3];
        for (kx, row) in j.iter_mut().enumerate() {
            for (ky, v) in row.iter_mut().enumerate() {
                let fx = a.powi(kx as i32) * (a * x + c + kx as f64 * PI / 2.0).sin();
                let fy = b.powi(ky as i32) * (b * y + d + ky as f64 * PI / 2.0).cos();
                *v = fx * fy;
            }
        }
        j
    })
}

#[test]
fn linear_pair_is_cardinal() {
    let s = linear_switch(0.2, 1.4).unwrap();
    let [a0, a1] = s.eval(0.2);
    let [b0, b1] = s.eval(1.4);
    assert_eq!((a0[0], a1[0], b0[0], b1[0]), (1.0, 0.0, 0.0, 1.0));
    assert!(linear_switch(1.0, 1.0).is_err());
}

#[test]
fn hermite_quad_is_cardinal() {
    let (a, b) = (-0.4, 0.35);
    let h = hermite_switch(a, b).unwrap();
    // Rows: value at a, value at b, slope at a, slope at b.
    let want = [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]];
    let at_a = h.eval(a);
    let at_b = h.eval(b);
    for k in 0..4 {
        assert!((at_a[k][0] - want[0][k]).abs() < 1e-14);
        assert!((at_b[k][0] - want[1][k]).abs() < 1e-14);
        assert!((at_a[k][1] - want[2][k]).abs() < 1e-13);
        assert!((at_b[k][1] - want[3][k]).abs() < 1e-13);
    }
    assert!(hermite_switch(2.0, 1.0).is_err());
}

#[test]
fn degenerate_constraints_are_rejected() {
    let c = |x, op| PointConstraint { x, op, target: 0.0 };
    let err = build_constrained_expression(vec![c(0.5, PointOp::Value), c(0.5, PointOp::Value)], None).unwrap_err();
    assert!(matches!(err, Error::SupportBasis(_)));
    assert!(matches!(build_constrained_expression(Vec::new(), None), Err(Error::Config(_))));
}

#[test]
fn lift_rejects_inconsistent_corners() {
    let rect = Rect::new(0.0, 1.0, 0.0, 1.0).unwrap();
    let mut traces = EdgeTraces::of(wave(1.0, 1.0, 0.3, 0.1), rect, false);
    traces.left = Arc::new(|_| [5.0, 0.0, 0.0]);
    assert!(matches!(bivariate_lift_c0(rect, traces), Err(Error::Data(_))));
}

proptest! {
    #[test]
    fn switching_functions_are_kronecker(
        x0 in -1.0..-0.4f64,
        x1 in -0.3..0.3f64,
        x2 in 0.4..1.0f64,
        ops in proptest::collection::vec(prop_oneof![Just(PointOp::Value), Just(PointOp::Derivative)], 3),
        targets in proptest::collection::vec(-2.0..2.0f64, 3),
        (a, w, c) in (-2.0..2.0f64, 0.3..3.0f64, -1.0..1.0f64),
    ) {
        // Two derivative-only constraints leave constants unconstrained.
        prop_assume!(ops.contains(&PointOp::Value));
        let cons: Vec<PointConstraint> = [x0, x1, x2]
            .iter()
            .zip(&ops)
            .zip(&targets)
            .map(|((&x, &op), &target)| PointConstraint { x, op, target })
            .collect();
        // Values at x0, x2 with a slope at their midpoint is a singular configuration.
        let ce = match build_constrained_expression(cons.clone(), None) {
            Ok(ce) if ce.cond < 1e6 => ce,
            _ => return Ok(()),
        };
        let g = sine(a, w, c);
        for (i, ci) in cons.iter().enumerate() {
            let d = op_index(ci.op);
            for (j, s) in ce.switching(ci.x).iter().enumerate() {
                let delta = if i == j { 1.0 } else { 0.0 };
                prop_assert!((s[d] - delta).abs() < 1e-10);
            }
            prop_assert!((ce.apply(&g, ci.x)[d] - ci.target).abs() < 1e-10);
        }
    }

    #[test]
    fn lifts_reproduce_traces(
        (a, b) in (0.3..2.5f64, 0.3..2.5f64),
        (c, d) in (0.0..PI, 0.0..PI),
        t in 0.0..1.0f64,
    ) {
        let f = wave(a, b, c, d);
        let rect = Rect::new(-0.5, 0.7, 0.1, 1.2).unwrap();
        let c0 = bivariate_lift_c0(rect, EdgeTraces::of(f.clone(), rect, false)).unwrap();
        let c1 = bivariate_lift_c1(rect, EdgeTraces::of(f.clone(), rect, false), EdgeTraces::of(f.clone(), rect, true)).unwrap();
        let x = rect.x0 + t * (rect.x1 - rect.x0);
        let y = rect.y0 + t * (rect.y1 - rect.y0);
        for (px, py, vertical) in [(rect.x0, y, true), (rect.x1, y, true), (x, rect.y0, false), (x, rect.y1, false)] {
            let ex = f(px, py);
            prop_assert!((c0.eval(px, py)[0][0] - ex[0][0]).abs() < 1e-12);
            let l1 = c1.eval(px, py);
            prop_assert!((l1[0][0] - ex[0][0]).abs() < 1e-12);
            let (got, want) = if vertical { (l1[1][0], ex[1][0]) } else { (l1[0][1], ex[0][1]) };
            prop_assert!((got - want).abs() < 1e-11);
        }
    }

    #[test]
    fn hermite_lift_reproduces_bicubics(coef in proptest::collection::vec(-1.0..1.0f64, 16), tx in 0.0..1.0f64, ty in 0.0..1.0f64) {
        let coef = Arc::new(coef);
        let cf = coef.clone();
        let f: Arc<dyn Fn(f64, f64) -> Jet2 + Send + Sync> = Arc::new(move |x, y| {
            let mut j = [[0.0; 3]; 3];
            for i in 0..4 {
                for k in 0..4 {
                    let c = cf[4 * i + k];
                    for (dx, row) in j.iter_mut().enumerate() {
                        for (dy, v) in row.iter_mut().enumerate() {
                            let mono = |p: usize, d: usize, t: f64| -> f64 {
                                if d > p { return 0.0; }
                                let fall: f64 = (0..d).map(|r| (p - r) as f64).product();
                                fall * t.powi((p - d) as i32)
                            };
                            *v += c * mono(i, dx, x) * mono(k, dy, y);
                        }
                    }
                }
            }
            j
        });
        let rect = Rect::new(0.0, 1.0, -1.0, 0.5).unwrap();
        let lift = bivariate_lift_c1(rect, EdgeTraces::of(f.clone(), rect, false), EdgeTraces::of(f.clone(), rect, true)).unwrap();
        let (x, y) = (tx, -1.0 + 1.5 * ty);
        let got = lift.eval(x, y);
        let want = f(x, y);
        for dx in 0..3 {
            for dy in 0..3 {
                prop_assert!((got[dx][dy] - want[dx][dy]).abs() < 1e-10);
            }
        }
    }
}
