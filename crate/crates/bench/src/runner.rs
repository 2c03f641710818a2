//! Running one case at one set of discretization settings.

use std::collections::HashMap;
use std::time::Instant;

use fce_core::constraints::{
    apply_boundary_1d, apply_boundary_2d, apply_relative_2d, build_reparameterization, BcKind, BoundaryCondition,
    Enforcement, Reparameterization, RelativeConstraint, Side, TraceDebug,
};
use fce_core::fce1d::{build_field_1d, Partition1D};
use fce_core::fce2d::{build_field_2d, Mesh2D};
use fce_core::field::{FceKind, Field};
use fce_core::solver::{
    assemble, make_collocation_1d, make_collocation_2d, solve_gauss_newton, CollocationKind, GaussNewtonOptions,
    LinearRelation, LsqMethod, ResidualSystem, RowWeights, ScalingSpec,
};
use fce_core::{Error, Result};

use crate::cases::{find_case, ProblemCase, Relative, ScalingChoice, Settings};
use crate::metrics::error_norms;

/// Optional replacements for a case's default settings.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub kind: Option<FceKind>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub p: Option<usize>,
    pub m: Option<usize>,
    pub q: Option<usize>,
    pub colloc: Option<CollocationKind>,
    pub scaling: Option<ScalingChoice>,
    pub relative: Option<Enforcement>,
    pub weights: Option<RowWeights>,
}

impl Settings {
    /// Settings with every present override applied.
    pub fn with(mut self, o: &Overrides) -> Self {
        self.kind = o.kind.unwrap_or(self.kind);
        self.nx = o.nx.unwrap_or(self.nx);
        self.ny = o.ny.unwrap_or(self.ny);
        self.p = o.p.unwrap_or(self.p);
        self.m = o.m.or(self.m);
        self.q = o.q.or(self.q);
        self.colloc = o.colloc.unwrap_or(self.colloc);
        self.scaling = o.scaling.unwrap_or(self.scaling);
        self.relative = o.relative.unwrap_or(self.relative);
        self.weights = o.weights.unwrap_or(self.weights);
        self
    }
}

/// Outcome of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub case: String,
    pub kind: FceKind,
    pub nx: usize,
    /// 1 for 1D cases.
    pub ny: usize,
    pub p: usize,
    pub m: usize,
    pub q: usize,
    pub colloc: CollocationKind,
    pub linf: f64,
    pub l2: f64,
    pub l2_ref: f64,
    /// Final residual 2-norm of the collocation system.
    pub residual: f64,
    pub cond_est: f64,
    pub wall_ms: f64,
    pub n_theta: usize,
    pub n_rows: usize,
    /// Gauss-Newton iterations; 0 for linear solves.
    pub iterations: usize,
    pub method: Option<LsqMethod>,
    /// Directly measured relative-constraint violation, when the case has one.
    pub constraint_residual: Option<f64>,
    pub scaling: ScalingSpec,
}

/// Whether a nominal boundary condition can be built into a field of this kind.
pub fn exact_available(kind: FceKind, dim: usize, bc: &BoundaryCondition) -> bool {
    match bc.kind {
        BcKind::Dirichlet => kind != FceKind::Nc,
        BcKind::Neumann => kind.continuity(bc.side.axis()) == Some(1),
        BcKind::Robin { .. } => dim == 1 && kind == FceKind::C1,
    }
}

fn resolved_boundary(case: &ProblemCase, kind: FceKind) -> Vec<BoundaryCondition> {
    case.boundary
        .iter()
        .map(|bc| {
            let mut bc = bc.clone();
            if bc.mode == Enforcement::Exact && !exact_available(kind, case.dim, &bc) {
                bc.mode = Enforcement::LeastSquares;
            }
            bc
        })
        .collect()
}

fn scaling_for(case: &ProblemCase, s: &Settings, h: f64) -> Result<ScalingSpec> {
    match s.scaling {
        ScalingChoice::None => Ok(ScalingSpec::unit()),
        ScalingChoice::Custom(sc) => Ok(sc),
        ScalingChoice::Auto if s.kind == FceKind::Nc => {
            let (e, e0, e1) = case.nc_scaling;
            ScalingSpec::powers_of_h(h, e, e0, e1)
        }
        ScalingChoice::Auto => Ok(ScalingSpec::unit()),
    }
}

fn mesh_line(xs: &[f64], x: f64) -> Result<usize> {
    let tol = 1e-12 * (xs[xs.len() - 1] - xs[0]);
    xs.iter()
        .position(|&v| (v - x).abs() <= tol)
        .ok_or_else(|| Error::Config(format!("x = {x} is not a mesh line")))
}

/// Runs case `id` with `overrides` applied to its defaults.
pub fn run_case(id: &str, overrides: &Overrides) -> Result<RunRecord> {
    let case = find_case(id)?;
    run_settings(&case, &case.defaults.with(overrides))
}

/// A discretized case, ready to solve.
pub struct Prepared {
    pub field: Box<dyn Field>,
    pub reparam: Reparameterization,
    pub system: ResidualSystem,
    pub scaling: ScalingSpec,
    /// Collocation points per element per direction.
    pub q: usize,
    /// Edge order used (equal to `p` in 1D).
    pub m: usize,
}

/// Builds the field, constraints and collocation system of `case` at `s`.
pub fn prepare(case: &ProblemCase, s: &Settings) -> Result<Prepared> {
    let q = s.q.unwrap_or(s.p + case.q_offset);
    let m = s.m.unwrap_or(s.p);
    let boundary = resolved_boundary(case, s.kind);
    let [[x0, x1], [y0, y1]] = case.domain;
    let mut relations = Vec::new();
    let (field, reparam, colloc, lsq_bcs, scaling): (Box<dyn Field>, _, _, _, _) = if case.dim == 1 {
        if s.m.is_some_and(|m| m != s.p) {
            return Err(Error::Config("1D fields have no separate edge order".into()));
        }
        let partition = Partition1D::uniform(x0, x1, s.nx)?;
        let basis = case.family.kind_for(s.kind.blend(0));
        let field = build_field_1d(partition, s.kind, basis, s.p, &HashMap::new())?;
        let applied = apply_boundary_1d(&field, &boundary)?;
        let mut elims = applied.eliminations;
        match &case.relative {
            Relative::None => {}
            Relative::Params1D(make) => elims.extend(make(&applied.field)?),
            Relative::VerticalJump { .. } => return Err(Error::Config("edge constraints need a 2D case".into())),
        }
        let reparam = build_reparameterization(applied.field.layout(), &elims)?;
        let colloc = make_collocation_1d(&applied.field.partition, s.colloc, q)?;
        let scaling = scaling_for(case, s, (x1 - x0) / s.nx as f64)?;
        (Box::new(applied.field), reparam, colloc, applied.lsq, scaling)
    } else {
        let mesh = Mesh2D::uniform([x0, x1], [y0, y1], s.nx, s.ny)?;
        let field = build_field_2d(mesh, s.kind, case.family, s.p, m)?;
        let applied = apply_boundary_2d(&field, &boundary)?;
        let h = ((x1 - x0) / s.nx as f64).max((y1 - y0) / s.ny as f64);
        let scaling = scaling_for(case, s, h)?;
        let colloc = make_collocation_2d(&applied.field.mesh, s.colloc, q)?;
        let mut elims = applied.eliminations;
        let field = match &case.relative {
            Relative::None => applied.field,
            Relative::Params1D(_) => return Err(Error::Config("parameter constraints need a 1D case".into())),
            Relative::VerticalJump { dependent_x, source_x, jump } => {
                if (dependent_x - x1).abs() > 1e-12 {
                    return Err(Error::Config("the dependent line must be the right boundary".into()));
                }
                match s.relative {
                    Enforcement::Exact => {
                        let c = RelativeConstraint::VerticalJump {
                            dependent: mesh_line(&applied.field.mesh.xs, *dependent_x)?,
                            source: mesh_line(&applied.field.mesh.xs, *source_x)?,
                            jump: TraceDebug(jump.clone()),
                        };
                        let (f, e) = apply_relative_2d(&applied.field, &[c])?;
                        elims.extend(e);
                        f
                    }
                    Enforcement::LeastSquares => {
                        for bp in colloc.side_points(Side::Right) {
                            let y = bp.point[1];
                            relations.push(LinearRelation {
                                terms: vec![([*dependent_x, y], 0, 0, 1.0), ([*source_x, y], 0, 0, -1.0)],
                                rhs: jump(y)[0],
                                weight: scaling.sigma,
                            });
                        }
                        applied.field
                    }
                }
            }
        };
        let reparam = build_reparameterization(field.layout(), &elims)?;
        (Box::new(field), reparam, colloc, applied.lsq, scaling)
    };
    let sizes: Vec<[f64; 2]> = (0..field.n_elements())
        .map(|e| {
            let b = field.element_bounds(e);
            [b[1] - b[0], b[3] - b[2]]
        })
        .collect();
    let colloc = colloc.with_row_weights(s.weights, &sizes)?;
    let system = assemble(&case.problem, field.as_ref(), &reparam, &colloc, &scaling, &lsq_bcs, &relations)?;
    Ok(Prepared { field, reparam, system, scaling, q, m })
}

/// Runs `case` at fully specified settings.
pub fn run_settings(case: &ProblemCase, s: &Settings) -> Result<RunRecord> {
    let start = Instant::now();
    let Prepared { field, reparam, system, scaling, q, m } = prepare(case, s)?;
    let (theta, residual, cond_est, iterations, method) = if system.is_affine() {
        let sol = system.solve_linear()?;
        (sol.theta, sol.residual_norm, sol.cond_est, 0, Some(sol.method))
    } else {
        let theta0 = vec![0.0; system.n_theta()];
        let rep = solve_gauss_newton(&system, &theta0, &GaussNewtonOptions::default())?;
        let r = rep.residual_norm();
        (rep.theta, r, rep.cond_est, rep.iterations, None)
    };
    let full = reparam.expand(&theta)?;
    let norms = error_norms(field.as_ref(), &full, &case.exact)?;
    let constraint_residual = match &case.constraint_probe {
        Some(probe) => Some(probe(field.as_ref(), &full)?),
        None => None,
    };
    Ok(RunRecord {
        case: case.id.to_string(),
        kind: s.kind,
        nx: s.nx,
        ny: if case.dim == 1 { 1 } else { s.ny },
        p: s.p,
        m,
        q,
        colloc: s.colloc,
        linf: norms.linf,
        l2: norms.l2,
        l2_ref: norms.l2_ref,
        residual,
        cond_est,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
        n_theta: system.n_theta(),
        n_rows: system.n_rows(),
        iterations,
        method,
        constraint_residual,
        scaling,
    })
}
