//! Error norms of a solved field against an exact solution.

use fce_core::basis::gll_rule;
use fce_core::field::Field;
use fce_core::Result;

use crate::cases::ExactFn;

/// Uniform sample points per element and direction for the maximum norm.
pub const LINF_SAMPLES: usize = 20;
/// GLL quadrature points per element and direction for the L2 norms.
pub const L2_POINTS: usize = 12;

/// Error measures of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    /// Maximum pointwise error over uniform samples in every element.
    pub linf: f64,
    /// Quadrature L2 norm including the element Jacobian.
    pub l2: f64,
    /// The same quadrature with reference-element weights only.
    pub l2_ref: f64,
}

fn value(field: &dyn Field, full: &[f64], e: usize, pt: [f64; 2]) -> f64 {
    field.form(e, pt).component(0, 0).eval(full)
}

fn samples(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| a + (b - a) * k as f64 / (n - 1) as f64)
}

/// Computes both norms, evaluating every element with its own representation.
pub fn error_norms(field: &dyn Field, full: &[f64], exact: &ExactFn) -> Result<ErrorNorms> {
    let rule = gll_rule(L2_POINTS)?;
    let two_d = field.dim() == 2;
    let mut linf: f64 = 0.0;
    let mut sq = 0.0;
    let mut sq_ref = 0.0;
    for e in 0..field.n_elements() {
        let [x0, x1, y0, y1] = field.element_bounds(e);
        let ys: Vec<f64> = if two_d { samples(y0, y1, LINF_SAMPLES).collect() } else { vec![0.0] };
        for x in samples(x0, x1, LINF_SAMPLES) {
            for &y in &ys {
                let err = value(field, full, e, [x, y]) - exact([x, y])[0][0];
                linf = linf.max(err.abs());
            }
        }
        let jx = 0.5 * (x1 - x0);
        let jy = if two_d { 0.5 * (y1 - y0) } else { 1.0 };
        let yq: Vec<(f64, f64)> = if two_d {
            rule.nodes.iter().zip(&rule.weights).map(|(&t, &w)| (y0 + jy * (t + 1.0), w)).collect()
        } else {
            vec![(0.0, 1.0)]
        };
        for (&t, &wx) in rule.nodes.iter().zip(&rule.weights) {
            let x = x0 + jx * (t + 1.0);
            for &(y, wy) in &yq {
                let err = value(field, full, e, [x, y]) - exact([x, y])[0][0];
                sq_ref += wx * wy * err * err;
                sq += jx * jy * wx * wy * err * err;
            }
        }
    }
    Ok(ErrorNorms { linf, l2: sq.sqrt(), l2_ref: sq_ref.sqrt() })
}
