//! Damped Gauss–Newton for nonlinear least squares.

use faer::Mat;

use crate::error::{Error, Result};
use crate::solver::lsq::{lstsq_dense, LsqOptions};

/// A residual map with a Jacobian.
pub trait LeastSquaresProblem {
    fn n_params(&self) -> usize;
    fn residual(&self, theta: &[f64]) -> Result<Vec<f64>>;
    fn jacobian(&self, theta: &[f64]) -> Result<Mat<f64>>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussNewtonOptions {
    pub max_iter: usize,
    /// Stop when `‖step‖ ≤ tol_step · max(1, ‖θ‖)`.
    pub tol_step: f64,
    /// Stop when `‖r‖ ≤ tol_residual`.
    pub tol_residual: f64,
    /// Maximum number of step halvings per iteration (0 disables damping).
    pub max_halvings: usize,
    /// Consecutive residual increases tolerated before giving up.
    pub max_growth: usize,
    pub lsq: LsqOptions,
}

impl Default for GaussNewtonOptions {
    fn default() -> Self {
        Self { max_iter: 50, tol_step: 1e-12, tol_residual: 0.0, max_halvings: 8, max_growth: 5, lsq: LsqOptions::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    StepTolerance,
    ResidualTolerance,
    Stagnation,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussNewtonReport {
    pub theta: Vec<f64>,
    /// Number of accepted steps larger than the step tolerance.
    pub iterations: usize,
    /// Residual norm before the first step and after every accepted step.
    pub residual_norms: Vec<f64>,
    pub reason: StopReason,
    pub cond_est: f64,
}

impl GaussNewtonReport {
    pub fn residual_norm(&self) -> f64 {
        *self.residual_norms.last().expect("at least the initial residual")
    }

    pub fn converged(&self) -> bool {
        self.reason != StopReason::MaxIterations
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Relative slack under which a non-decreasing residual counts as stagnation.
const STAGNATION: f64 = 1e-10;

/// Iterates `θ ← θ + λ δ`, with `δ` the least-squares solution of `J δ ≈ −r`
/// and `λ` halved until the residual decreases.
pub fn solve_gauss_newton<P: LeastSquaresProblem + ?Sized>(
    problem: &P,
    theta0: &[f64],
    opts: &GaussNewtonOptions,
) -> Result<GaussNewtonReport> {
    if theta0.len() != problem.n_params() {
        return Err(Error::Shape { expected: problem.n_params(), got: theta0.len() });
    }
    let mut theta = theta0.to_vec();
    let mut r = problem.residual(&theta)?;
    let mut rn = norm(&r);
    let mut norms = vec![rn];
    let mut growth = 0;
    let mut iterations = 0;
    let mut cond_est = f64::NAN;
    for _ in 0..opts.max_iter {
        if rn <= opts.tol_residual {
            return Ok(GaussNewtonReport { theta, iterations, residual_norms: norms, reason: StopReason::ResidualTolerance, cond_est });
        }
        let jac = problem.jacobian(&theta)?;
        let neg: Vec<f64> = r.iter().map(|v| -v).collect();
        let sol = lstsq_dense(jac.as_ref(), &neg, &opts.lsq)?;
        cond_est = sol.cond_est;
        let step = sol.x;
        if norm(&step) <= opts.tol_step * norm(&theta).max(1.0) {
            return Ok(GaussNewtonReport { theta, iterations, residual_norms: norms, reason: StopReason::StepTolerance, cond_est });
        }
        let mut lambda = 1.0;
        let mut trial;
        let mut trial_r;
        let mut trial_n;
        let mut halvings = 0;
        loop {
            trial = theta.iter().zip(&step).map(|(t, s)| t + lambda * s).collect::<Vec<_>>();
            trial_r = problem.residual(&trial)?;
            trial_n = norm(&trial_r);
            if trial_n < rn || halvings >= opts.max_halvings {
                break;
            }
            lambda *= 0.5;
            halvings += 1;
        }
        if !trial_n.is_finite() {
            return Err(Error::Convergence { iterations, reason: "non-finite residual".into(), trace: norms });
        }
        if trial_n >= rn {
            if trial_n <= rn * (1.0 + STAGNATION) {
                return Ok(GaussNewtonReport { theta, iterations: iterations + 1, residual_norms: norms, reason: StopReason::Stagnation, cond_est });
            }
            growth += 1;
            if growth >= opts.max_growth {
                norms.push(trial_n);
                return Err(Error::Convergence {
                    iterations,
                    reason: format!("residual grew in {growth} consecutive damped iterations"),
                    trace: norms,
                });
            }
        } else {
            growth = 0;
        }
        theta = trial;
        r = trial_r;
        rn = trial_n;
        norms.push(rn);
        iterations += 1;
    }
    Ok(GaussNewtonReport { theta, iterations, residual_norms: norms, reason: StopReason::MaxIterations, cond_est })
}
