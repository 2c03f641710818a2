//! The benchmark problem catalog.

use std::f64::consts::PI;
use std::sync::Arc;

use fce_core::basis::Jet;
use fce_core::constraints::{
    param_at_1d, BcKind, BoundaryCondition, Elimination, Enforcement, Side,
};
use fce_core::fce1d::FceField1D;
use fce_core::field::{BasisFamily, FceKind, Field};
use fce_core::layout::Param;
use fce_core::solver::{CollocationKind, Nonlinearity, ProblemSpec, RowWeights, ScalingSpec};
use fce_core::tfc::{Jet2, Trace};
use fce_core::{Error, Result};

/// Exact solution with all mixed derivatives up to order two per direction.
pub type ExactFn = Arc<dyn Fn([f64; 2]) -> Jet2 + Send + Sync>;

/// Maximum of `|u − u_ex|`-style scalar over probe points, given the field and Θ.
pub type Probe = Arc<dyn Fn(&dyn Field, &[f64]) -> Result<f64> + Send + Sync>;

/// Relative constraints of a case.
#[derive(Clone)]
pub enum Relative {
    None,
    /// Parameter eliminations built from the 1D field (C1 kinds only).
    Params1D(Arc<dyn Fn(&FceField1D) -> Result<Vec<Elimination>> + Send + Sync>),
    /// `u(x_dep, y) = u(x_src, y) + jump(y)`; `x_dep` must be the right boundary.
    VerticalJump { dependent_x: f64, source_x: f64, jump: Trace },
}

/// Run settings; every field can be overridden.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub kind: FceKind,
    pub nx: usize,
    pub ny: usize,
    pub p: usize,
    /// Edge order; defaults to `p`.
    pub m: Option<usize>,
    /// Collocation points per direction; defaults to `p + q_offset`.
    pub q: Option<usize>,
    pub colloc: CollocationKind,
    pub scaling: ScalingChoice,
    /// Enforcement of relative constraints that support both modes.
    pub relative: Enforcement,
    pub weights: RowWeights,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalingChoice {
    /// The case's own scaling for NC runs, unit otherwise.
    Auto,
    None,
    Custom(ScalingSpec),
}

/// A registered problem.
#[derive(Clone)]
pub struct ProblemCase {
    pub id: &'static str,
    pub summary: &'static str,
    pub dim: usize,
    /// `[[x0, x1], [y0, y1]]`; 1D cases ignore the second range.
    pub domain: [[f64; 2]; 2],
    pub problem: ProblemSpec,
    pub exact: ExactFn,
    /// Nominal boundary conditions; each is enforced exactly when the field allows it.
    pub boundary: Vec<BoundaryCondition>,
    pub relative: Relative,
    pub family: BasisFamily,
    pub q_offset: usize,
    pub defaults: Settings,
    /// Scaling `(σ, σ0, σ1)` as powers `h^-e` for NC runs under `ScalingChoice::Auto`.
    pub nc_scaling: (i32, i32, i32),
    /// Direct measurement of the relative-constraint residual.
    pub constraint_probe: Option<Probe>,
}

impl std::fmt::Debug for ProblemCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemCase").field("id", &self.id).field("defaults", &self.defaults).finish()
    }
}

fn jet1(f: impl Fn(f64) -> Jet + Send + Sync + 'static) -> ExactFn {
    Arc::new(move |pt| {
        let j = f(pt[0]);
        [[j[0], 0.0, 0.0], [j[1], 0.0, 0.0], [j[2], 0.0, 0.0]]
    })
}

/// Jets of `exact` along the side, in the tangential coordinate.
fn side_trace(exact: &ExactFn, side: Side, at: f64, normal_derivative: bool) -> Trace {
    let exact = exact.clone();
    let k = usize::from(normal_derivative);
    Arc::new(move |t| match side {
        Side::Left | Side::Right => {
            let j = exact([at, t]);
            [j[k][0], j[k][1], j[k][2]]
        }
        Side::Bottom | Side::Top => {
            let j = exact([t, at]);
            [j[0][k], j[1][k], j[2][k]]
        }
    })
}

fn value_bc_1d(exact: &ExactFn, side: Side, x: f64, kind: BcKind) -> BoundaryCondition {
    let jet = exact([x, 0.0]);
    let v = match kind {
        BcKind::Dirichlet => jet[0][0],
        BcKind::Neumann => jet[1][0],
        BcKind::Robin { a, b } => a * jet[0][0] + b * jet[1][0],
    };
    BoundaryCondition::constant(side, kind, Enforcement::Exact, v)
}

fn dirichlet_2d(exact: &ExactFn, domain: [[f64; 2]; 2], sides: &[Side]) -> Vec<BoundaryCondition> {
    sides
        .iter()
        .map(|&side| {
            let at = match side {
                Side::Left => domain[0][0],
                Side::Right => domain[0][1],
                Side::Bottom => domain[1][0],
                Side::Top => domain[1][1],
            };
            BoundaryCondition::new(side, BcKind::Dirichlet, Enforcement::Exact, side_trace(exact, side, at, false))
        })
        .collect()
}

fn settings(kind: FceKind, nx: usize, ny: usize, p: usize, colloc: CollocationKind) -> Settings {
    Settings {
        kind,
        nx,
        ny,
        p,
        m: None,
        q: None,
        colloc,
        scaling: ScalingChoice::Auto,
        relative: Enforcement::Exact,
        weights: RowWeights::Quadrature,
    }
}

fn source_from(f: impl Fn([f64; 2]) -> f64 + Send + Sync + 'static) -> fce_core::solver::Coef {
    Arc::new(f)
}

const UNIT: [[f64; 2]; 2] = [[0.0, 1.0], [0.0, 1.0]];

fn helmholtz1d() -> ProblemCase {
    let exact = jet1(|x| {
        let (s, c) = (PI * x).sin_cos();
        [c, -PI * s, -PI * PI * c]
    });
    let problem = ProblemSpec::new(1, source_from(|p| -(1.0 + PI * PI) * (PI * p[0]).cos())).term(2, 0, 1.0).term(0, 0, -1.0);
    let boundary = vec![
        value_bc_1d(&exact, Side::Left, 0.0, BcKind::Dirichlet),
        value_bc_1d(&exact, Side::Right, 1.0, BcKind::Neumann),
    ];
    ProblemCase {
        id: "helmholtz1d",
        summary: "u'' - u = -(1+pi^2) cos(pi x), u(0) = 1, u'(1) = 0",
        dim: 1,
        domain: UNIT,
        problem,
        exact,
        boundary,
        relative: Relative::None,
        family: BasisFamily::Legendre,
        q_offset: 2,
        defaults: settings(FceKind::C1, 4, 1, 6, CollocationKind::Gll),
        nc_scaling: (0, 0, 0),
        constraint_probe: None,
    }
}

fn ivp1d() -> ProblemCase {
    let exact = jet1(|t| {
        let (s, c) = (PI * t).sin_cos();
        let u = s.exp();
        [u, PI * c * u, PI * PI * (c * c - s) * u]
    });
    let problem = ProblemSpec::new(
        1,
        source_from(|p| {
            let (s, c) = (PI * p[0]).sin_cos();
            s.exp() * (1.0 + PI * c)
        }),
    )
    .term(1, 0, 1.0)
    .term(0, 0, 1.0);
    let boundary = vec![value_bc_1d(&exact, Side::Left, 0.0, BcKind::Dirichlet)];
    ProblemCase {
        id: "ivp1d",
        summary: "u' + u = exp(sin(pi t)) (1 + pi cos(pi t)), u(0) = 1",
        dim: 1,
        domain: UNIT,
        problem,
        exact,
        boundary,
        relative: Relative::None,
        family: BasisFamily::Legendre,
        q_offset: 2,
        defaults: settings(FceKind::C0, 4, 1, 5, CollocationKind::Gll),
        nc_scaling: (0, 0, 0),
        constraint_probe: None,
    }
}

fn half_sine() -> ExactFn {
    jet1(|x| {
        let (s, c) = (PI * x).sin_cos();
        [1.0 + 0.5 * s, 0.5 * PI * c, -0.5 * PI * PI * s]
    })
}

fn nl_helmholtz1d() -> ProblemCase {
    let exact = half_sine();
    let problem = ProblemSpec::new(
        1,
        source_from(|p| {
            let s = (PI * p[0]).sin();
            let u = 1.0 + 0.5 * s;
            -0.5 * PI * PI * s - u + u.sin()
        }),
    )
    .term(2, 0, 1.0)
    .term(0, 0, -1.0)
    .with_nonlinear(Nonlinearity { f: Arc::new(f64::sin), df: Arc::new(f64::cos) });
    let boundary = vec![
        value_bc_1d(&exact, Side::Left, 0.0, BcKind::Dirichlet),
        value_bc_1d(&exact, Side::Right, 1.0, BcKind::Dirichlet),
    ];
    ProblemCase {
        id: "nl-helmholtz1d",
        summary: "u'' - u + sin(u) = f, u(0) = u(1) = 1, exact 1 + sin(pi x)/2",
        dim: 1,
        domain: UNIT,
        problem,
        exact,
        boundary,
        relative: Relative::None,
        family: BasisFamily::Legendre,
        q_offset: 2,
        defaults: settings(FceKind::C1, 4, 1, 8, CollocationKind::Uniform),
        nc_scaling: (0, 0, 0),
        constraint_probe: None,
    }
}

fn sin_cos_2d() -> ExactFn {
    Arc::new(|p: [f64; 2]| {
        let (sx, cx) = (PI * p[0]).sin_cos();
        let (sy, cy) = (PI * p[1]).sin_cos();
        let fx = [sx, PI * cx, -PI * PI * sx];
        let fy = [cy, -PI * sy, -PI * PI * cy];
        let mut j = [[0.0; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                j[a][b] = fx[a] * fy[b];
            }
        }
        j
    })
}

fn helmholtz2d() -> ProblemCase {
    let exact = sin_cos_2d();
    let problem = ProblemSpec::new(
        2,
        source_from(|p| -(1.0 + 2.0 * PI * PI) * (PI * p[0]).sin() * (PI * p[1]).cos()),
    )
    .term(2, 0, 1.0)
    .term(0, 2, 1.0)
    .term(0, 0, -1.0);
    let boundary = dirichlet_2d(&exact, UNIT, &[Side::Left, Side::Right, Side::Bottom, Side::Top]);
    ProblemCase {
        id: "helmholtz2d",
        summary: "lap(u) - u = f on the unit square, Dirichlet on all sides, exact sin(pi x) cos(pi y)",
        dim: 2,
        domain: UNIT,
        problem,
        exact,
        boundary,
        relative: Relative::None,
        family: BasisFamily::Legendre,
        q_offset: 2,
        defaults: settings(FceKind::C1, 2, 1, 7, CollocationKind::Gll),
        nc_scaling: (0, 0, 0),
        constraint_probe: None,
    }
}

fn advection2d() -> ProblemCase {
    let exact: ExactFn = Arc::new(|p: [f64; 2]| {
        let (sx, cx) = (PI * p[0]).sin_cos();
        let (st, ct) = (PI * p[1]).sin_cos();
        let e = cx.exp();
        // g(x) = exp(cos pi x), h(t) = sin pi t
        let g = [e, -PI * sx * e, PI * PI * (sx * sx - cx) * e];
        let h = [st, PI * ct, -PI * PI * st];
        let mut j = [[0.0; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                j[a][b] = g[a] * h[b];
            }
        }
        j
    });
    let problem = ProblemSpec::new(
        2,
        source_from(|p| {
            let (sx, cx) = (PI * p[0]).sin_cos();
            let (st, ct) = (PI * p[1]).sin_cos();
            cx.exp() * (PI * ct - 2.0 * PI * sx * st)
        }),
    )
    .term(0, 1, 1.0)
    .term(1, 0, 2.0);
    let boundary = dirichlet_2d(&exact, UNIT, &[Side::Left, Side::Bottom]);
    ProblemCase {
        id: "advection2d",
        summary: "u_t + 2 u_x = f in space-time, inflow and initial data, exact exp(cos(pi x)) sin(pi t)",
        dim: 2,
        domain: UNIT,
        problem,
        exact,
        boundary,
        relative: Relative::None,
        family: BasisFamily::Legendre,
        q_offset: 2,
        defaults: settings(FceKind::C0, 4, 4, 5, CollocationKind::Gll),
        nc_scaling: (0, 0, 0),
        constraint_probe: None,
    }
}

fn sin_poisson1d() -> ProblemCase {
    let exact = jet1(|x| {
        let t = x.tanh();
        let s2 = 1.0 - t * t;
        [t, s2, -2.0 * t * s2]
    });
    let problem = ProblemSpec::new(
        1,
        source_from(|p| {
            let t = p[0].tanh();
            -2.0 * t * (1.0 - t * t)
        }),
    )
    .term(2, 0, 1.0);
    let boundary = vec![
        value_bc_1d(&exact, Side::Left, 0.0, BcKind::Dirichlet),
        value_bc_1d(&exact, Side::Right, 1.0, BcKind::Dirichlet),
    ];
    ProblemCase {
        id: "sin-poisson1d",
        summary: "u'' = f with sinusoidal bases, Dirichlet data, exact tanh(x)",
        dim: 1,
        domain: UNIT,
        problem,
        exact,
        boundary,
        relative: Relative::None,
        family: BasisFamily::Sinusoid,
        q_offset: 3,
        defaults: settings(FceKind::C1, 5, 1, 11, CollocationKind::Gll),
        nc_scaling: (4, 4, 2),
        constraint_probe: None,
    }
}

fn sin_ivp1d() -> ProblemCase {
    let exact = jet1(|t| {
        let th = (t * t).tanh();
        let s2 = 1.0 - th * th;
        [th, 2.0 * t * s2, 2.0 * s2 - 8.0 * t * t * th * s2]
    });
    let problem = ProblemSpec::new(
        1,
        source_from(|p| {
            let t = p[0];
            let th = (t * t).tanh();
            2.0 * t * (1.0 - th * th) + th
        }),
    )
    .term(1, 0, 1.0)
    .term(0, 0, 1.0);
    let boundary = vec![value_bc_1d(&exact, Side::Left, 0.0, BcKind::Dirichlet)];
    ProblemCase {
        id: "sin-ivp1d",
        summary: "u' + u = f with sinusoidal bases, u(0) = 0, exact tanh(t^2)",
        dim: 1,
        domain: UNIT,
        problem,
        exact,
        boundary,
        relative: Relative::None,
        family: BasisFamily::Sinusoid,
        q_offset: 3,
        defaults: settings(FceKind::C0, 5, 1, 11, CollocationKind::Gll),
        nc_scaling: (2, 2, 0),
        constraint_probe: None,
    }
}

fn eval_at(field: &dyn Field, full: &[f64], x: f64, k: usize) -> Result<f64> {
    Ok(field.functional([x, 0.0], k, 0)?.eval(full))
}

fn relbc1d_linear() -> ProblemCase {
    let exact = jet1(|x| {
        let (s, c) = (PI * x).sin_cos();
        [c, -PI * s, -PI * PI * c]
    });
    let problem = ProblemSpec::new(1, source_from(|p| -(1.0 + PI * PI) * (PI * p[0]).cos())).term(2, 0, 1.0).term(0, 0, -1.0);
    let relative = Relative::Params1D(Arc::new(|field: &FceField1D| {
        let n = field.partition.n_elements();
        Ok(vec![
            Elimination::Affine {
                target: param_at_1d(field, 0.0, 0)?,
                sources: vec![(param_at_1d(field, 0.5, 0)?, 1.0)],
                offset: 1.0,
            },
            Elimination::Affine {
                target: Param::beta(n),
                sources: vec![(param_at_1d(field, 0.5, 1)?, 1.0)],
                offset: PI,
            },
        ])
    }));
    let probe: Probe = Arc::new(|field, full| {
        let a = eval_at(field, full, 0.0, 0)? - eval_at(field, full, 0.5, 0)? - 1.0;
        let b = eval_at(field, full, 1.0, 1)? - eval_at(field, full, 0.5, 1)? - PI;
        Ok(a.abs().max(b.abs()))
    });
    ProblemCase {
        id: "relbc1d-linear",
        summary: "u'' - u = -(1+pi^2) cos(pi x), u(0) = u(0.5) + 1, u'(1) = u'(0.5) + pi",
        dim: 1,
        domain: UNIT,
        problem,
        exact,
        boundary: Vec::new(),
        relative,
        family: BasisFamily::Legendre,
        q_offset: 2,
        defaults: settings(FceKind::C1, 2, 1, 8, CollocationKind::Gll),
        nc_scaling: (0, 0, 0),
        constraint_probe: Some(probe),
    }
}

fn relbc1d_nonlinear() -> ProblemCase {
    let exact = half_sine();
    let problem = ProblemSpec::new(1, source_from(|p| -0.5 * (1.0 + PI * PI) * (PI * p[0]).sin() - 1.0))
        .term(2, 0, 1.0)
        .term(0, 0, -1.0);
    let relative = Relative::Params1D(Arc::new(|field: &FceField1D| {
        let n = field.partition.n_elements();
        Ok(vec![
            Elimination::Nonlinear {
                target: Param::alpha(n),
                args: vec![Param::alpha(0)],
                f: Arc::new(|a: &[f64]| (a[0].powi(3), vec![3.0 * a[0] * a[0]])),
            },
            Elimination::Affine {
                target: Param::beta(0),
                sources: vec![(param_at_1d(field, 0.5, 1)?, 2.0)],
                offset: PI / 2.0,
            },
        ])
    }));
    let probe: Probe = Arc::new(|field, full| {
        let a = eval_at(field, full, 0.0, 0)?.powi(3) - eval_at(field, full, 1.0, 0)?;
        let b = eval_at(field, full, 0.0, 1)? - 2.0 * eval_at(field, full, 0.5, 1)? - PI / 2.0;
        Ok(a.abs().max(b.abs()))
    });
    let mut defaults = settings(FceKind::C1, 2, 1, 8, CollocationKind::Uniform);
    defaults.q = Some(20);
    ProblemCase {
        id: "relbc1d-nonlinear",
        summary: "u'' - u = f, u(0)^3 = u(1), u'(0) = 2 u'(0.5) + pi/2",
        dim: 1,
        domain: UNIT,
        problem,
        exact,
        boundary: Vec::new(),
        relative,
        family: BasisFamily::Legendre,
        q_offset: 2,
        defaults,
        nc_scaling: (0, 0, 0),
        constraint_probe: Some(probe),
    }
}

/// Jump `g(y) = −cos(πy)` of the 2D relative condition, with derivatives.
fn relbc2d_jump() -> Trace {
    Arc::new(|y: f64| {
        let (s, c) = (PI * y).sin_cos();
        [-c, PI * s, PI * PI * c]
    })
}

fn relbc2d() -> ProblemCase {
    let exact = sin_cos_2d();
    let problem = ProblemSpec::new(2, source_from(|p| -2.0 * PI * PI * (PI * p[0]).sin() * (PI * p[1]).cos()))
        .term(2, 0, 1.0)
        .term(0, 2, 1.0);
    let boundary = dirichlet_2d(&exact, UNIT, &[Side::Left, Side::Bottom, Side::Top]);
    let jump = relbc2d_jump();
    let g = jump.clone();
    let probe: Probe = Arc::new(move |field, full| {
        let mut worst: f64 = 0.0;
        for k in 0..20 {
            let y = k as f64 / 19.0;
            let r = field.functional([1.0, y], 0, 0)?.eval(full) - field.functional([0.5, y], 0, 0)?.eval(full) - g(y)[0];
            worst = worst.max(r.abs());
        }
        Ok(worst)
    });
    ProblemCase {
        id: "relbc2d",
        summary: "lap(u) = f, u(1, y) = u(0.5, y) + g(y), Dirichlet elsewhere, exact sin(pi x) cos(pi y)",
        dim: 2,
        domain: UNIT,
        problem,
        exact,
        boundary,
        relative: Relative::VerticalJump { dependent_x: 1.0, source_x: 0.5, jump },
        family: BasisFamily::Legendre,
        q_offset: 2,
        defaults: settings(FceKind::C0, 2, 1, 7, CollocationKind::Gll),
        nc_scaling: (0, 0, 0),
        constraint_probe: Some(probe),
    }
}

/// Every registered case, in catalog order.
pub fn catalog() -> Vec<ProblemCase> {
    vec![
        helmholtz1d(),
        ivp1d(),
        nl_helmholtz1d(),
        helmholtz2d(),
        advection2d(),
        sin_poisson1d(),
        sin_ivp1d(),
        relbc1d_linear(),
        relbc1d_nonlinear(),
        relbc2d(),
    ]
}

/// Looks up a case by id.
pub fn find_case(id: &str) -> Result<ProblemCase> {
    catalog()
        .into_iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Error::Config(format!("unknown case '{id}'")))
}

/// Largest PDE residual of the exact solution at `n` pseudo-random points,
/// relative to `1 + |S|`.
pub fn manufactured_residual(case: &ProblemCase, n: usize) -> f64 {
    let mut worst: f64 = 0.0;
    // Weyl sequences give deterministic, well-spread sample points.
    let (a1, a2) = (0.754_877_666_246_692_7, 0.569_840_290_998_053_3);
    for k in 1..=n {
        let u = (k as f64 * a1).fract();
        let v = (k as f64 * a2).fract();
        let d = case.domain;
        let pt = [d[0][0] + u * (d[0][1] - d[0][0]), if case.dim == 2 { d[1][0] + v * (d[1][1] - d[1][0]) } else { 0.0 }];
        let j = (case.exact)(pt);
        let mut lhs: f64 = case.problem.terms.iter().map(|(kx, ky, c)| c(pt) * j[*kx][*ky]).sum();
        if let Some(nl) = &case.problem.nonlinear {
            lhs += (nl.f)(j[0][0]);
        }
        let s = (case.problem.source)(pt);
        worst = worst.max((lhs - s).abs() / (1.0 + s.abs()));
    }
    worst
}
