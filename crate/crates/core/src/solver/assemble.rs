//! The problem description and the collocation residual system.

use std::sync::Arc;

use faer::Mat;

use crate::constraints::{BoundaryCondition, Reparameterization};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::functional::{deriv_index, AffineFunctional};
use crate::solver::collocation::CollocationSet;
use crate::solver::gauss_newton::LeastSquaresProblem;
use crate::solver::lsq::{lstsq_cgls, lstsq_dense, LsqMethod, LsqOptions};

/// A scalar function of position.
pub type Coef = Arc<dyn Fn([f64; 2]) -> f64 + Send + Sync>;

/// A pointwise nonlinearity `N(u)` with its derivative.
#[derive(Clone)]
pub struct Nonlinearity {
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub df: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

/// `Σ c_k(x) ∂^k u + N(u) = S(x)`.
#[derive(Clone)]
pub struct ProblemSpec {
    pub dim: usize,
    /// `(kx, ky, c)` operator terms.
    pub terms: Vec<(usize, usize, Coef)>,
    pub nonlinear: Option<Nonlinearity>,
    pub source: Coef,
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let orders: Vec<(usize, usize)> = self.terms.iter().map(|t| (t.0, t.1)).collect();
        f.debug_struct("ProblemSpec")
            .field("dim", &self.dim)
            .field("terms", &orders)
            .field("nonlinear", &self.nonlinear.is_some())
            .finish()
    }
}

impl ProblemSpec {
    pub fn new(dim: usize, source: Coef) -> Self {
        Self { dim, terms: Vec::new(), nonlinear: None, source }
    }

    /// Adds a constant-coefficient term `c ∂x^kx ∂y^ky u`.
    pub fn term(self, kx: usize, ky: usize, c: f64) -> Self {
        self.term_fn(kx, ky, Arc::new(move |_| c))
    }

    pub fn term_fn(mut self, kx: usize, ky: usize, c: Coef) -> Self {
        self.terms.push((kx, ky, c));
        self
    }

    pub fn with_nonlinear(mut self, n: Nonlinearity) -> Self {
        self.nonlinear = Some(n);
        self
    }

    /// Highest derivative order along `axis`.
    pub fn order(&self, axis: usize) -> usize {
        self.terms.iter().map(|t| if axis == 0 { t.0 } else { t.1 }).max().unwrap_or(0)
    }

    /// Continuity a solution must have across boundaries normal to `axis`:
    /// `C^{k−1}` for an operator of order `k` along that axis.
    pub fn continuity_required(&self, axis: usize) -> Option<usize> {
        self.order(axis).checked_sub(1)
    }

    pub fn is_linear(&self) -> bool {
        self.nonlinear.is_none()
    }
}

/// Positive weights on boundary (`sigma`), value-continuity (`sigma0`) and
/// derivative-continuity (`sigma1`) rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingSpec {
    pub sigma: f64,
    pub sigma0: f64,
    pub sigma1: f64,
}

impl Default for ScalingSpec {
    fn default() -> Self {
        Self::unit()
    }
}

impl ScalingSpec {
    pub fn new(sigma: f64, sigma0: f64, sigma1: f64) -> Result<Self> {
        if [sigma, sigma0, sigma1].iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::Config(format!("scalings must be positive, got ({sigma}, {sigma0}, {sigma1})")));
        }
        Ok(Self { sigma, sigma0, sigma1 })
    }

    pub fn unit() -> Self {
        Self { sigma: 1.0, sigma0: 1.0, sigma1: 1.0 }
    }

    /// `σ = h^-e, σ0 = h^-e0, σ1 = h^-e1`.
    pub fn powers_of_h(h: f64, e: i32, e0: i32, e1: i32) -> Result<Self> {
        Self::new(h.powi(-e), h.powi(-e0), h.powi(-e1))
    }
}

/// A linear relation between point values, e.g. `u(1, y) − u(0.5, y) = g(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRelation {
    /// `(point, kx, ky, coefficient)`.
    pub terms: Vec<([f64; 2], usize, usize, f64)>,
    pub rhs: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowKind {
    Pde,
    Continuity { order: usize },
    Boundary,
    Relation,
}

/// One residual `lin(Θ) + weight·N(u(Θ))`.
#[derive(Debug, Clone)]
pub struct ResidualRow {
    pub lin: AffineFunctional,
    /// `(u functional, weight)` when the row carries the nonlinearity.
    pub nonlinear: Option<(AffineFunctional, f64)>,
    pub kind: RowKind,
}

/// The rectangular collocation system in the unknowns θ.
#[derive(Clone)]
pub struct ResidualSystem {
    pub rows: Vec<ResidualRow>,
    pub reparam: Reparameterization,
    nonlinearity: Option<Nonlinearity>,
}

impl std::fmt::Debug for ResidualSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ResidualSystem")
            .field("rows", &self.rows.len())
            .field("n_theta", &self.reparam.n_theta())
            .field("affine", &self.is_affine())
            .finish()
    }
}

fn kind_cont(c: Option<usize>) -> i64 {
    c.map_or(-1, |v| v as i64)
}

/// Builds the residual rows: PDE rows at every collocation point, continuity
/// rows wherever the field lacks the required smoothness, boundary rows for
/// conditions not enforced exactly, and extra relation rows.
pub fn assemble(
    problem: &ProblemSpec,
    field: &dyn Field,
    reparam: &Reparameterization,
    colloc: &CollocationSet,
    scaling: &ScalingSpec,
    boundary: &[BoundaryCondition],
    relations: &[LinearRelation],
) -> Result<ResidualSystem> {
    if problem.dim != field.dim() || colloc.dim != field.dim() {
        return Err(Error::Config(format!(
            "dimension mismatch: problem {}, field {}, collocation {}",
            problem.dim,
            field.dim(),
            colloc.dim
        )));
    }
    if colloc.element_points.len() != field.n_elements() {
        return Err(Error::Config("collocation set does not match the field's mesh".into()));
    }
    if reparam.n_full() != field.n_free() {
        return Err(Error::Shape { expected: field.n_free(), got: reparam.n_full() });
    }
    if problem.terms.iter().any(|t| t.0 > 2 || t.1 > 2 || (problem.dim == 1 && t.1 > 0)) {
        return Err(Error::Config("operator terms must have derivative orders ≤ 2 in existing directions".into()));
    }
    let mut rows = Vec::new();
    for (e, (pts, ws)) in colloc.element_points.iter().zip(&colloc.weights).enumerate() {
        for (&pt, &w) in pts.iter().zip(ws) {
            let form = field.form(e, pt);
            let coefs: Vec<(usize, f64)> =
                problem.terms.iter().map(|(kx, ky, c)| (deriv_index(*kx, *ky), w * c(pt))).collect();
            let mut lin = form.combine(&coefs);
            lin.offset -= w * (problem.source)(pt);
            let nonlinear = problem.nonlinear.as_ref().map(|_| (form.component(0, 0), w));
            rows.push(ResidualRow { lin, nonlinear, kind: RowKind::Pde });
        }
    }
    for axis in 0..field.dim() {
        let need = kind_cont(problem.continuity_required(axis));
        let have = kind_cont(field.kind().continuity(axis));
        for order in (have + 1).max(0)..=need {
            let order = order as usize;
            let w = if order == 0 { scaling.sigma0 } else { scaling.sigma1 };
            let (kx, ky) = if axis == 0 { (order, 0) } else { (0, order) };
            for ip in colloc.shared(axis) {
                let mut lin = field.form(ip.left, ip.point).component(kx, ky);
                lin.add_scaled(&field.form(ip.right, ip.point).component(kx, ky), -1.0);
                lin.scale(w);
                lin.compact();
                rows.push(ResidualRow { lin, nonlinear: None, kind: RowKind::Continuity { order } });
            }
        }
    }
    for bc in boundary {
        let (a, b) = bc.kind.weights();
        let axis = bc.side.axis();
        let (kx, ky) = if axis == 0 { (1, 0) } else { (0, 1) };
        for bp in colloc.side_points(bc.side) {
            let form = field.form(bp.elem, bp.point);
            let mut coefs = Vec::new();
            if a != 0.0 {
                coefs.push((deriv_index(0, 0), a));
            }
            if b != 0.0 {
                coefs.push((deriv_index(kx, ky), b));
            }
            let mut lin = form.combine(&coefs);
            lin.offset -= (bc.data)(bp.tangential(colloc.dim))[0];
            lin.scale(scaling.sigma);
            rows.push(ResidualRow { lin, nonlinear: None, kind: RowKind::Boundary });
        }
    }
    for rel in relations {
        let mut lin = AffineFunctional::constant(-rel.rhs);
        for &(pt, kx, ky, c) in &rel.terms {
            lin.add_scaled(&field.functional(pt, kx, ky)?, c);
        }
        lin.scale(rel.weight);
        lin.compact();
        rows.push(ResidualRow { lin, nonlinear: None, kind: RowKind::Relation });
    }
    Ok(ResidualSystem { rows, reparam: reparam.clone(), nonlinearity: problem.nonlinear.clone() })
}

/// Result of a linear least-squares solve.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSolution {
    pub theta: Vec<f64>,
    pub residual_norm: f64,
    pub cond_est: f64,
    pub rank: usize,
    pub method: LsqMethod,
}

impl ResidualSystem {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_theta(&self) -> usize {
        self.reparam.n_theta()
    }

    /// True when the residual is affine in θ.
    pub fn is_affine(&self) -> bool {
        self.reparam.is_affine() && self.rows.iter().all(|r| r.nonlinear.is_none())
    }

    pub fn count(&self, kind: RowKind) -> usize {
        self.rows.iter().filter(|r| r.kind == kind).count()
    }

    /// `r(θ)`.
    pub fn residual(&self, theta: &[f64]) -> Result<Vec<f64>> {
        let full = self.reparam.expand(theta)?;
        Ok(self.residual_full(&full))
    }

    fn residual_full(&self, full: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| {
                let mut v = row.lin.eval(full);
                if let (Some((u, w)), Some(n)) = (&row.nonlinear, &self.nonlinearity) {
                    v += w * (n.f)(u.eval(full));
                }
                v
            })
            .collect()
    }

    /// Sparse Jacobian rows `∂r/∂θ` at θ.
    pub fn jacobian_rows(&self, theta: &[f64]) -> Result<Vec<Vec<(usize, f64)>>> {
        let full = self.reparam.expand(theta)?;
        let chain = if self.reparam.is_identity() { None } else { Some(self.reparam.jacobian(theta)?) };
        let mut out = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let mut terms: Vec<(usize, f64)> = row.lin.terms.clone();
            if let (Some((u, w)), Some(n)) = (&row.nonlinear, &self.nonlinearity) {
                let d = w * (n.df)(u.eval(&full));
                terms.extend(u.terms.iter().map(|&(i, c)| (i, d * c)));
            }
            let mut terms = match &chain {
                None => terms,
                Some(jac) => terms
                    .iter()
                    .flat_map(|&(k, a)| jac[k].iter().map(move |&(t, v)| (t, a * v)))
                    .collect(),
            };
            crate::functional::compact_terms(&mut terms);
            out.push(terms);
        }
        Ok(out)
    }

    /// Dense Jacobian `∂r/∂θ` at θ.
    pub fn jacobian_dense(&self, theta: &[f64]) -> Result<Mat<f64>> {
        let rows = self.jacobian_rows(theta)?;
        let mut jac = Mat::zeros(rows.len(), self.n_theta());
        for (i, r) in rows.iter().enumerate() {
            for &(j, v) in r {
                jac[(i, j)] += v;
            }
        }
        Ok(jac)
    }

    /// Minimizes `‖r(θ)‖₂` for an affine system.
    pub fn solve_linear(&self) -> Result<LinearSolution> {
        self.solve_linear_with(&LsqOptions::default())
    }

    pub fn solve_linear_with(&self, opts: &LsqOptions) -> Result<LinearSolution> {
        if !self.is_affine() {
            return Err(Error::Mode("the residual system is not affine; use Gauss-Newton".into()));
        }
        let zero = vec![0.0; self.n_theta()];
        let rhs: Vec<f64> = self.residual(&zero)?.iter().map(|v| -v).collect();
        let big = self.n_rows().max(self.n_theta()) > opts.dense_limit;
        let sol = if big {
            lstsq_cgls(&self.jacobian_rows(&zero)?, self.n_theta(), &rhs, opts)?
        } else {
            lstsq_dense(self.jacobian_dense(&zero)?.as_ref(), &rhs, opts)?
        };
        Ok(LinearSolution {
            theta: sol.x,
            residual_norm: sol.residual_norm,
            cond_est: sol.cond_est,
            rank: sol.rank,
            method: sol.method,
        })
    }
}

/// Free functional form of `solve_linear`.
pub fn solve_linear(system: &ResidualSystem) -> Result<LinearSolution> {
    system.solve_linear()
}

impl LeastSquaresProblem for ResidualSystem {
    fn n_params(&self) -> usize {
        self.n_theta()
    }

    fn residual(&self, theta: &[f64]) -> Result<Vec<f64>> {
        ResidualSystem::residual(self, theta)
    }

    fn jacobian(&self, theta: &[f64]) -> Result<Mat<f64>> {
        self.jacobian_dense(theta)
    }
}
