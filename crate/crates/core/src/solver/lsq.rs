//! Dense linear least squares with a rank-revealing fallback, and CGLS for large sparse systems.
//!
//! The dense path factors `A = QR` with blocked Householder reflections. When
//! the estimated condition number of `R` is moderate the solution is a plain
//! back substitution. Otherwise `R` (square, much smaller than `A`) is
//! refactored with column pivoting, truncated to its numerical rank, and the
//! minimum-norm solution is recovered through a complete orthogonal
//! decomposition. Since `Qᵀ` is orthogonal, the minimizers of `‖Ax − b‖` and
//! `‖Rx − Qᵀb‖` coincide, so the result is the minimum-norm minimizer of the
//! original problem.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::householder;
use faer::{Conj, Mat, MatRef, Par};

use crate::error::{Error, Result};

/// Condition estimate above which the rank-revealing path is used.
pub const COND_SWITCH: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsqOptions {
    /// Relative threshold on pivoted diagonal entries for rank truncation.
    pub rcond: f64,
    /// Systems with more rows or columns than this use CGLS.
    pub dense_limit: usize,
    pub cgls_tol: f64,
    pub cgls_max_iter: usize,
}

impl Default for LsqOptions {
    fn default() -> Self {
        Self { rcond: 1e-13, dense_limit: 20_000, cgls_tol: 1e-14, cgls_max_iter: 100_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsqMethod {
    Qr,
    RankRevealing,
    Cgls,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LsqSolution {
    pub x: Vec<f64>,
    /// `‖Ax − b‖₂`.
    pub residual_norm: f64,
    /// 1-norm condition estimate of `R` (infinite for an exactly singular factor).
    pub cond_est: f64,
    pub rank: usize,
    pub method: LsqMethod,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Solves `U x = b` in place for upper-triangular `U` (k×k leading block).
fn solve_upper(u: MatRef<'_, f64>, b: &mut [f64]) {
    let k = b.len();
    for i in (0..k).rev() {
        let mut s = b[i];
        for j in i + 1..k {
            s -= u[(i, j)] * b[j];
        }
        b[i] = s / u[(i, i)];
    }
}

/// Solves `Uᵀ x = b` in place for upper-triangular `U`.
fn solve_upper_transpose(u: MatRef<'_, f64>, b: &mut [f64]) {
    let k = b.len();
    for i in 0..k {
        let mut s = b[i];
        for j in 0..i {
            s -= u[(j, i)] * b[j];
        }
        b[i] = s / u[(i, i)];
    }
}

/// Estimate of the 1-norm condition number of an upper-triangular matrix
/// (Hager's method with Higham's refinements).
pub fn cond_upper_triangular(u: MatRef<'_, f64>) -> f64 {
    let n = u.ncols().min(u.nrows());
    if n == 0 {
        return 1.0;
    }
    if (0..n).any(|i| u[(i, i)] == 0.0 || !u[(i, i)].is_finite()) {
        return f64::INFINITY;
    }
    let norm_u = (0..n).map(|j| (0..=j).map(|i| u[(i, j)].abs()).sum::<f64>()).fold(0.0, f64::max);
    let mut x = vec![1.0 / n as f64; n];
    let mut est = 0.0;
    for _ in 0..5 {
        let mut y = x.clone();
        solve_upper(u, &mut y);
        est = y.iter().map(|v| v.abs()).sum::<f64>();
        let mut z: Vec<f64> = y.iter().map(|v| if *v >= 0.0 { 1.0 } else { -1.0 }).collect();
        solve_upper_transpose(u, &mut z);
        let (jmax, zmax) = z.iter().enumerate().fold((0, 0.0), |acc, (i, v)| if v.abs() > acc.1 { (i, v.abs()) } else { acc });
        let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
        if zmax <= ztx {
            break;
        }
        x = vec![0.0; n];
        x[jmax] = 1.0;
    }
    // Higham's alternative vector guards against underestimates.
    let mut alt: Vec<f64> = (0..n)
        .map(|i| {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            s * (1.0 + i as f64 / (n.max(2) - 1) as f64)
        })
        .collect();
    solve_upper(u, &mut alt);
    let alt_est = 2.0 * alt.iter().map(|v| v.abs()).sum::<f64>() / (3.0 * n as f64);
    norm_u * est.max(alt_est)
}

/// Applies `Qᵀ` of a Householder QR to a column in place.
fn apply_qt(basis: MatRef<'_, f64>, coeff: MatRef<'_, f64>, rhs: &mut Mat<f64>) {
    let mut mem = MemBuffer::new(householder::apply_block_householder_sequence_transpose_on_the_left_in_place_scratch::<f64>(
        basis.nrows(),
        coeff.nrows(),
        rhs.ncols(),
    ));
    householder::apply_block_householder_sequence_transpose_on_the_left_in_place_with_conj(
        basis,
        coeff,
        Conj::No,
        rhs.as_mut(),
        Par::Seq,
        MemStack::new(&mut mem),
    );
}

/// Applies `Q` of a Householder QR to a column in place.
fn apply_q(basis: MatRef<'_, f64>, coeff: MatRef<'_, f64>, rhs: &mut Mat<f64>) {
    let mut mem = MemBuffer::new(householder::apply_block_householder_sequence_on_the_left_in_place_scratch::<f64>(
        basis.nrows(),
        coeff.nrows(),
        rhs.ncols(),
    ));
    householder::apply_block_householder_sequence_on_the_left_in_place_with_conj(
        basis,
        coeff,
        Conj::No,
        rhs.as_mut(),
        Par::Seq,
        MemStack::new(&mut mem),
    );
}

fn column(v: &[f64]) -> Mat<f64> {
    Mat::from_fn(v.len(), 1, |i, _| v[i])
}

/// Minimum-norm least-squares solution of `A x ≈ b` for a dense `A`.
pub fn lstsq_dense(a: MatRef<'_, f64>, b: &[f64], opts: &LsqOptions) -> Result<LsqSolution> {
    let (m, n) = (a.nrows(), a.ncols());
    if b.len() != m {
        return Err(Error::Shape { expected: m, got: b.len() });
    }
    if a.has_nan() || b.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("least-squares data contains non-finite values".into()));
    }
    if n == 0 {
        return Ok(LsqSolution { x: Vec::new(), residual_norm: norm(b), cond_est: 1.0, rank: 0, method: LsqMethod::Qr });
    }
    // Pad to at least n rows so that R is square.
    let padded;
    let (a, b_pad) = if m < n {
        padded = Mat::from_fn(n, n, |i, j| if i < m { a[(i, j)] } else { 0.0 });
        let mut bb = b.to_vec();
        bb.resize(n, 0.0);
        (padded.as_ref(), bb)
    } else {
        (a, b.to_vec())
    };

    let qr = a.qr();
    let mut c = column(&b_pad);
    apply_qt(qr.Q_basis(), qr.Q_coeff(), &mut c);
    let r = qr.thin_R();
    let cond_est = cond_upper_triangular(r);
    let cvec: Vec<f64> = (0..n).map(|i| c[(i, 0)]).collect();

    let (x, rank, method) = if cond_est <= COND_SWITCH {
        let mut x = cvec;
        solve_upper(r, &mut x);
        (x, n, LsqMethod::Qr)
    } else {
        let (x, rank) = min_norm_square(r, &cvec, opts.rcond);
        (x, rank, LsqMethod::RankRevealing)
    };

    let residual_norm = residual(a.get(..m, ..), &x, b);
    Ok(LsqSolution { x, residual_norm, cond_est, rank, method })
}

fn residual(a: MatRef<'_, f64>, x: &[f64], b: &[f64]) -> f64 {
    let mut r: Vec<f64> = b.iter().map(|v| -v).collect();
    for (j, &xj) in x.iter().enumerate() {
        if xj != 0.0 {
            let col = a.col(j);
            for (i, ri) in r.iter_mut().enumerate() {
                *ri += col[i] * xj;
            }
        }
    }
    norm(&r)
}

/// Minimum-norm solution of `R x ≈ c` for a square `R` via column-pivoted QR
/// and a complete orthogonal decomposition of the rank-`k` block.
fn min_norm_square(r: MatRef<'_, f64>, c: &[f64], rcond: f64) -> (Vec<f64>, usize) {
    let n = r.ncols();
    let full = r.to_owned();
    let cp = full.col_piv_qr();
    let (fwd, _) = cp.P().arrays();
    let r2 = cp.thin_R();
    let mut d = column(c);
    apply_qt(cp.Q_basis(), cp.Q_coeff(), &mut d);
    let r00 = r2[(0, 0)].abs();
    let rank = if r00 == 0.0 { 0 } else { (0..n).take_while(|&k| r2[(k, k)].abs() > rcond * r00).count() };
    let mut z = vec![0.0; n];
    if rank == n {
        z = (0..n).map(|i| d[(i, 0)]).collect();
        solve_upper(r2, &mut z);
    } else if rank > 0 {
        // T = R2[..k, ..] = [T1 T2]; min-norm solution through QR of Tᵀ = Q3 R3.
        let t_transpose = Mat::from_fn(n, rank, |i, j| if i >= j { r2[(j, i)] } else { 0.0 });
        let qr3 = t_transpose.qr();
        let r3 = qr3.thin_R();
        let mut y: Vec<f64> = (0..rank).map(|i| d[(i, 0)]).collect();
        solve_upper_transpose(r3, &mut y);
        let mut w = Mat::from_fn(n, 1, |i, _| if i < rank { y[i] } else { 0.0 });
        apply_q(qr3.Q_basis(), qr3.Q_coeff(), &mut w);
        z = (0..n).map(|i| w[(i, 0)]).collect();
    }
    let mut x = vec![0.0; n];
    for (j, &p) in fwd.iter().enumerate() {
        x[p] = z[j];
    }
    (x, rank)
}

/// Sparse rows over `ncols` unknowns.
pub type SparseRows = [Vec<(usize, f64)>];

/// Conjugate gradients on the normal equations (CGLS) for a sparse system.
pub fn lstsq_cgls(rows: &SparseRows, ncols: usize, b: &[f64], opts: &LsqOptions) -> Result<LsqSolution> {
    if b.len() != rows.len() {
        return Err(Error::Shape { expected: rows.len(), got: b.len() });
    }
    let apply = |x: &[f64]| -> Vec<f64> { rows.iter().map(|r| r.iter().map(|&(j, v)| v * x[j]).sum()).collect() };
    let apply_t = |y: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; ncols];
        for (r, &yi) in rows.iter().zip(y) {
            for &(j, v) in r {
                out[j] += v * yi;
            }
        }
        out
    };
    let mut x = vec![0.0; ncols];
    let mut r = b.to_vec();
    let mut s = apply_t(&r);
    let mut p = s.clone();
    let mut gamma: f64 = s.iter().map(|v| v * v).sum();
    let gamma0 = gamma;
    let mut it = 0;
    while it < opts.cgls_max_iter && gamma > opts.cgls_tol * opts.cgls_tol * gamma0 && gamma > 0.0 {
        let q = apply(&p);
        let qq: f64 = q.iter().map(|v| v * v).sum();
        if qq == 0.0 {
            break;
        }
        let alpha = gamma / qq;
        for (xi, pi) in x.iter_mut().zip(&p) {
            *xi += alpha * pi;
        }
        for (ri, qi) in r.iter_mut().zip(&q) {
            *ri -= alpha * qi;
        }
        s = apply_t(&r);
        let g_new: f64 = s.iter().map(|v| v * v).sum();
        let beta = g_new / gamma;
        gamma = g_new;
        for (pi, si) in p.iter_mut().zip(&s) {
            *pi = si + beta * *pi;
        }
        it += 1;
    }
    if it >= opts.cgls_max_iter {
        return Err(Error::Convergence {
            iterations: it,
            reason: "CGLS reached its iteration cap".into(),
            trace: vec![gamma.sqrt()],
        });
    }
    Ok(LsqSolution { x, residual_norm: norm(&r), cond_est: f64::NAN, rank: ncols, method: LsqMethod::Cgls })
}
