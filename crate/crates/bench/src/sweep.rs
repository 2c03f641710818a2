//! Convergence sweeps over the mesh size or the polynomial order.

use fce_core::{Error, Result};

use crate::cases::find_case;
use crate::report::CsvRow;
use crate::runner::{run_settings, Overrides, RunRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Values are element counts per direction.
    H,
    /// Values are polynomial orders.
    P,
}

impl SweepAxis {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "h" => Some(Self::H),
            "p" => Some(Self::P),
            _ => None,
        }
    }
}

/// One sweep point; failed points keep the error text and a NaN row.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: usize,
    pub row: CsvRow,
    pub record: Option<RunRecord>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub case: String,
    pub axis: SweepAxis,
    pub points: Vec<SweepPoint>,
    /// Fitted slope of log(linf): against log(h) for h sweeps, against p for p sweeps.
    pub rate_linf: Option<f64>,
    pub rate_l2: Option<f64>,
}

/// Least-squares slope of `ys` against `xs`; `None` with fewer than two points.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Runs the case at each value of the swept quantity. Failing points are
/// recorded and the sweep continues.
pub fn sweep(id: &str, axis: SweepAxis, values: &[usize], overrides: &Overrides) -> Result<SweepReport> {
    if values.is_empty() || values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("sweep values must be non-empty and strictly increasing".into()));
    }
    let case = find_case(id)?;
    let base = case.defaults.with(overrides);
    let mut points = Vec::new();
    for &v in values {
        let mut s = base;
        match axis {
            SweepAxis::H => {
                s.nx = v;
                if case.dim == 2 {
                    s.ny = v;
                }
            }
            SweepAxis::P => s.p = v,
        }
        match run_settings(&case, &s) {
            Ok(rec) => points.push(SweepPoint { value: v, row: CsvRow::from(&rec), record: Some(rec), error: None }),
            Err(e) => {
                let row = CsvRow {
                    case: case.id.to_string(),
                    kind: s.kind,
                    nx: s.nx,
                    ny: if case.dim == 1 { 1 } else { s.ny },
                    p: s.p,
                    m: s.m.unwrap_or(s.p),
                    q: s.q.unwrap_or(s.p + case.q_offset),
                    colloc: s.colloc,
                    linf: f64::NAN,
                    l2: f64::NAN,
                    residual: f64::NAN,
                    cond_est: f64::NAN,
                    wall_ms: f64::NAN,
                };
                points.push(SweepPoint { value: v, row, record: None, error: Some(e.to_string()) });
            }
        }
    }
    let width = case.domain[0][1] - case.domain[0][0];
    let fit = |metric: fn(&RunRecord) -> f64| {
        let (xs, ys): (Vec<f64>, Vec<f64>) = points
            .iter()
            .filter_map(|pt| pt.record.as_ref().map(|r| (pt.value, metric(r))))
            .filter(|(_, e)| *e > 0.0 && e.is_finite())
            .map(|(v, e)| {
                let x = match axis {
                    SweepAxis::H => (width / v as f64).ln(),
                    SweepAxis::P => v as f64,
                };
                (x, e.ln())
            })
            .unzip();
        fit_slope(&xs, &ys)
    };
    let rate_linf = fit(|r| r.linf);
    let rate_l2 = fit(|r| r.l2);
    Ok(SweepReport { case: case.id.to_string(), axis, points, rate_linf, rate_l2 })
}
