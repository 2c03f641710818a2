//! Boundary conditions and relative constraints.
//!
//! Exact conditions become fixed parameters or known edge parts of a field;
//! least-squares conditions are handed to assembly as residual rows. Relative
//! constraints eliminate unknowns through a [`Reparameterization`] `θ → Θ`,
//! which may be nonlinear.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::basis::Jet;
use crate::error::{Error, Result};
use crate::fce1d::FceField1D;
use crate::fce2d::{EdgeInstall, EdgeSlot, FceField2D};
use crate::field::{FceKind, Field};
use crate::functional::compact_terms;
use crate::layout::{Param, Slot, ThetaLayout};
use crate::tfc::Trace;

/// Corner and relative-constraint compatibility tolerance.
pub const COMPAT_TOL: f64 = 1e-10;

/// A side of the domain; 1D problems use `Left` (x = a) and `Right` (x = b).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    /// Axis normal to the side (0 = x, 1 = y).
    pub fn axis(self) -> usize {
        match self {
            Side::Left | Side::Right => 0,
            Side::Bottom | Side::Top => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BcKind {
    /// `u = C`.
    Dirichlet,
    /// `∂u = C`, the derivative along the coordinate normal to the side.
    Neumann,
    /// `a·u + b·∂u = C`.
    Robin { a: f64, b: f64 },
}

impl BcKind {
    /// Weights on `(u, ∂u)`.
    pub fn weights(self) -> (f64, f64) {
        match self {
            BcKind::Dirichlet => (1.0, 0.0),
            BcKind::Neumann => (0.0, 1.0),
            BcKind::Robin { a, b } => (a, b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Enforcement {
    Exact,
    LeastSquares,
}

/// One boundary condition. `data(t)` returns the jets of the target along the
/// side's tangential coordinate; in 1D it is called with the boundary point.
#[derive(Clone)]
pub struct BoundaryCondition {
    pub side: Side,
    pub kind: BcKind,
    pub mode: Enforcement,
    pub data: Trace,
}

impl std::fmt::Debug for BoundaryCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BoundaryCondition")
            .field("side", &self.side)
            .field("kind", &self.kind)
            .field("mode", &self.mode)
            .finish()
    }
}

impl BoundaryCondition {
    pub fn new(side: Side, kind: BcKind, mode: Enforcement, data: Trace) -> Self {
        Self { side, kind, mode, data }
    }

    /// A condition with a constant target.
    pub fn constant(side: Side, kind: BcKind, mode: Enforcement, value: f64) -> Self {
        Self::new(side, kind, mode, Arc::new(move |_| [value, 0.0, 0.0]))
    }
}

/// All boundary conditions of a problem.
pub type BoundarySpec = Vec<BoundaryCondition>;

/// Scalar map of a few parameters returning its value and gradient.
pub type NonlinearMap = Arc<dyn Fn(&[f64]) -> (f64, Vec<f64>) + Send + Sync>;

/// A parameter expressed through other parameters.
#[derive(Clone)]
pub enum Elimination {
    /// `target = Σ c·source + offset`.
    Affine { target: Param, sources: Vec<(Param, f64)>, offset: f64 },
    /// `target = f(args)`.
    Nonlinear { target: Param, args: Vec<Param>, f: NonlinearMap },
}

impl std::fmt::Debug for Elimination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Elimination::Affine { target, sources, offset } => f
                .debug_struct("Affine")
                .field("target", target)
                .field("sources", sources)
                .field("offset", offset)
                .finish(),
            Elimination::Nonlinear { target, args, .. } => {
                f.debug_struct("Nonlinear").field("target", target).field("args", args).finish()
            }
        }
    }
}

impl Elimination {
    pub fn target(&self) -> Param {
        match self {
            Elimination::Affine { target, .. } | Elimination::Nonlinear { target, .. } => *target,
        }
    }

    fn inputs(&self) -> Vec<Param> {
        match self {
            Elimination::Affine { sources, .. } => sources.iter().map(|s| s.0).collect(),
            Elimination::Nonlinear { args, .. } => args.clone(),
        }
    }
}

/// A relative constraint between distant parts of the solution.
#[derive(Clone, Debug)]
pub enum RelativeConstraint {
    /// A parameter-level relation, e.g. `α_0 = α_2 + 1` or `α_N = α_0³`.
    Param(Elimination),
    /// `u(X_dependent, y) = u(X_source, y) + jump(y)` along whole mesh lines.
    VerticalJump { dependent: usize, source: usize, jump: TraceDebug },
}

/// A [`Trace`] with a placeholder `Debug` impl.
#[derive(Clone)]
pub struct TraceDebug(pub Trace);

impl std::fmt::Debug for TraceDebug {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Trace")
    }
}

/// Result of applying boundary conditions to a field.
#[derive(Debug, Clone)]
pub struct Applied<F> {
    pub field: F,
    /// Conditions left to the least-squares residual.
    pub lsq: Vec<BoundaryCondition>,
    /// Parameter eliminations produced by exact Robin conditions.
    pub eliminations: Vec<Elimination>,
}

fn fix(map: &mut HashMap<Param, f64>, p: Param, v: f64) -> Result<()> {
    match map.get(&p) {
        Some(&old) if (old - v).abs() > COMPAT_TOL => {
            Err(Error::Data(format!("{p} prescribed twice with different values ({old} vs {v})")))
        }
        _ => {
            map.insert(p, v);
            Ok(())
        }
    }
}

/// The interface parameter `α_i` or `β_i` sitting at breakpoint `x`.
pub fn param_at_1d(field: &FceField1D, x: f64, deriv: usize) -> Result<Param> {
    let i = field
        .partition
        .node_at(x)
        .ok_or_else(|| Error::Config(format!("x = {x} is not a breakpoint")))?;
    match (field.kind, deriv) {
        (FceKind::C0 | FceKind::C1, 0) => Ok(Param::alpha(i)),
        (FceKind::C1, 1) => Ok(Param::beta(i)),
        _ => Err(Error::Mode(format!("{:?} fields carry no interface parameter for derivative {deriv}", field.kind))),
    }
}

/// Installs exact conditions on a 1D field and collects the rest.
pub fn apply_boundary_1d(field: &FceField1D, bcs: &[BoundaryCondition]) -> Result<Applied<FceField1D>> {
    let mut fixed = field.fixed().clone();
    let mut lsq = Vec::new();
    let mut eliminations = Vec::new();
    let n = field.partition.n_elements();
    for bc in bcs {
        let node = match bc.side {
            Side::Left => 0,
            Side::Right => n,
            _ => return Err(Error::Config(format!("side {:?} does not exist in 1D", bc.side))),
        };
        if bc.mode == Enforcement::LeastSquares {
            lsq.push(bc.clone());
            continue;
        }
        let c = (bc.data)(field.partition.breakpoints[node])[0];
        match (bc.kind, field.kind) {
            (BcKind::Dirichlet, FceKind::C0 | FceKind::C1) => fix(&mut fixed, Param::alpha(node), c)?,
            (BcKind::Neumann, FceKind::C1) => fix(&mut fixed, Param::beta(node), c)?,
            (BcKind::Robin { a, b }, FceKind::C1) => {
                if b != 0.0 {
                    eliminations.push(Elimination::Affine {
                        target: Param::beta(node),
                        sources: vec![(Param::alpha(node), -a / b)],
                        offset: c / b,
                    });
                } else if a != 0.0 {
                    fix(&mut fixed, Param::alpha(node), c / a)?;
                } else {
                    return Err(Error::Config("Robin condition with a = b = 0".into()));
                }
            }
            (kind, fk) => {
                return Err(Error::Mode(format!("exact {kind:?} condition is not available on a {fk:?} field")))
            }
        }
    }
    Ok(Applied { field: field.with_fixed(&fixed)?, lsq, eliminations })
}

/// Installs exact conditions on a 2D field and collects the rest.
///
/// Exact Dirichlet data replaces the value edges of a side by the trace and
/// fixes the corner values and tangential derivatives along it; exact Neumann
/// data does the same for the normal-derivative edges, which exist only in a
/// Hermite direction.
pub fn apply_boundary_2d(field: &FceField2D, bcs: &[BoundaryCondition]) -> Result<Applied<FceField2D>> {
    let mut data = field.data().clone();
    let mut lsq = Vec::new();
    let mesh = &field.mesh;
    let (nx, ny) = (mesh.nx(), mesh.ny());
    for bc in bcs {
        if bc.mode == Enforcement::LeastSquares {
            lsq.push(bc.clone());
            continue;
        }
        let Some(blends) = field.blends() else {
            return Err(Error::Mode("exact boundary conditions need a continuous field kind".into()));
        };
        let role = match bc.kind {
            BcKind::Dirichlet => 0,
            BcKind::Neumann => 1,
            BcKind::Robin { .. } => {
                return Err(Error::Mode("exact Robin conditions are not supported in 2D".into()))
            }
        };
        let axis = bc.side.axis();
        if role > blends[axis].max_order() {
            return Err(Error::Mode(format!(
                "exact Neumann on {:?} needs C1 continuity across that direction",
                bc.side
            )));
        }
        let tangential_orders = blends[1 - axis].max_order() + 1;
        match bc.side {
            Side::Left | Side::Right => {
                let i = if bc.side == Side::Left { 0 } else { nx };
                for j in 0..ny {
                    data.edges.insert(
                        EdgeSlot::vertical(i, j, role),
                        EdgeInstall { trace: bc.data.clone(), keep_coefficients: false },
                    );
                }
                for j in 0..=ny {
                    let jet = (bc.data)(mesh.ys[j]);
                    for dy in 0..tangential_orders {
                        fix(&mut data.corners, Param::Corner { i, j, dx: role, dy }, jet[dy])?;
                    }
                }
            }
            Side::Bottom | Side::Top => {
                let j = if bc.side == Side::Bottom { 0 } else { ny };
                for i in 0..nx {
                    data.edges.insert(
                        EdgeSlot::horizontal(i, j, role),
                        EdgeInstall { trace: bc.data.clone(), keep_coefficients: false },
                    );
                }
                for i in 0..=nx {
                    let jet = (bc.data)(mesh.xs[i]);
                    for dx in 0..tangential_orders {
                        fix(&mut data.corners, Param::Corner { i, j, dx, dy: role }, jet[dx])?;
                    }
                }
            }
        }
    }
    Ok(Applied { field: field.with_data(data)?, lsq, eliminations: Vec::new() })
}

/// Installs the jump traces of exact vertical-line constraints and returns the
/// field together with the eliminations that tie the dependent line to its source.
///
/// The dependent value edges keep their coefficients, which become aliases of
/// the source coefficients; dependent corner values become source values plus
/// the jump data.
pub fn apply_relative_2d(
    field: &FceField2D,
    constraints: &[RelativeConstraint],
) -> Result<(FceField2D, Vec<Elimination>)> {
    let mut data = field.data().clone();
    let mut jumps = Vec::new();
    let mut elims = Vec::new();
    for c in constraints {
        match c {
            RelativeConstraint::Param(e) => elims.push(e.clone()),
            RelativeConstraint::VerticalJump { dependent, source, jump } => {
                let Some([_, by]) = field.blends() else {
                    return Err(Error::Mode("exact relative edge constraints need a continuous field".into()));
                };
                let (dep, src) = (*dependent, *source);
                if dep > field.mesh.nx() || src > field.mesh.nx() || dep == src {
                    return Err(Error::Constraint(format!("invalid mesh lines {dep} and {src}")));
                }
                for j in 0..field.mesh.ny() {
                    let s = EdgeSlot::vertical(dep, j, 0);
                    if data.edges.contains_key(&s) {
                        return Err(Error::Constraint(format!("edge {s:?} already carries boundary data")));
                    }
                    data.edges.insert(s, EdgeInstall { trace: jump.0.clone(), keep_coefficients: true });
                }
                jumps.push((dep, src, jump.0.clone(), by.max_order() + 1));
            }
        }
    }
    let out = field.with_data(data)?;
    let layout = out.layout();
    for (dep, src, jump, ry) in jumps {
        for j in 0..out.mesh.ny() {
            let n = out.edge_len(&EdgeSlot::vertical(dep, j, 0));
            for k in 0..n {
                elims.push(Elimination::Affine {
                    target: Param::VerticalEdge { i: dep, j, role: 0, k },
                    sources: vec![(Param::VerticalEdge { i: src, j, role: 0, k }, 1.0)],
                    offset: 0.0,
                });
            }
        }
        for j in 0..=out.mesh.ny() {
            let jet: Jet = jump(out.mesh.ys[j]);
            for dy in 0..ry {
                let target = Param::Corner { i: dep, j, dx: 0, dy };
                let source = Param::Corner { i: src, j, dx: 0, dy };
                match (layout.slot(&target), layout.slot(&source)) {
                    (Some(Slot::Fixed(t)), Some(Slot::Fixed(s))) => {
                        if (t - s - jet[dy]).abs() > COMPAT_TOL {
                            return Err(Error::Data(format!(
                                "relative constraint incompatible with boundary data at {target}"
                            )));
                        }
                    }
                    (Some(Slot::Fixed(_)), _) => {
                        return Err(Error::Constraint(format!("{target} is fixed but its source is free")));
                    }
                    _ => elims.push(Elimination::Affine {
                        target,
                        sources: vec![(source, 1.0)],
                        offset: jet[dy],
                    }),
                }
            }
        }
    }
    Ok((out, elims))
}

/// Affine map of one Θ entry: sparse row over θ plus a constant.
type Row = (Vec<(usize, f64)>, f64);

#[derive(Clone)]
enum Source {
    Free(usize),
    Const(f64),
    Elim(usize),
}

#[derive(Clone)]
enum Rule {
    Affine(Vec<(Source, f64)>, f64),
    Nonlinear(Vec<Source>, NonlinearMap),
}

/// The map `θ → Θ` produced by eliminating parameters.
///
/// Independent entries of Θ copy an entry of θ; eliminated entries are
/// evaluated in dependency order.
#[derive(Clone)]
pub struct Reparameterization {
    n_full: usize,
    /// For each Θ index: `Ok(θ index)` or `Err(elimination index)`.
    map: Vec<std::result::Result<usize, usize>>,
    /// Eliminations in evaluation order: `(Θ index, rule)`.
    rules: Vec<(usize, Rule)>,
    n_theta: usize,
    affine: bool,
}

impl std::fmt::Debug for Reparameterization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Reparameterization")
            .field("n_full", &self.n_full)
            .field("n_theta", &self.n_theta)
            .field("eliminated", &self.rules.len())
            .field("affine", &self.affine)
            .finish()
    }
}

impl Reparameterization {
    pub fn identity(n: usize) -> Self {
        Self { n_full: n, map: (0..n).map(Ok).collect(), rules: Vec::new(), n_theta: n, affine: true }
    }

    /// Length of θ.
    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    /// Length of Θ.
    pub fn n_full(&self) -> usize {
        self.n_full
    }

    pub fn is_affine(&self) -> bool {
        self.affine
    }

    pub fn is_identity(&self) -> bool {
        self.rules.is_empty()
    }

    /// Θ index of each θ entry.
    pub fn theta_positions(&self) -> Vec<usize> {
        let mut out = vec![0; self.n_theta];
        for (k, m) in self.map.iter().enumerate() {
            if let Ok(t) = m {
                out[*t] = k;
            }
        }
        out
    }

    fn source_value(s: &Source, theta: &[f64], vals: &[f64]) -> f64 {
        match s {
            Source::Free(t) => theta[*t],
            Source::Const(c) => *c,
            Source::Elim(r) => vals[*r],
        }
    }

    /// Values of the eliminated entries, in rule order.
    fn eliminated_values(&self, theta: &[f64]) -> Vec<f64> {
        let mut vals = Vec::with_capacity(self.rules.len());
        for (_, rule) in &self.rules {
            let v = match rule {
                Rule::Affine(src, off) => {
                    src.iter().map(|(s, c)| c * Self::source_value(s, theta, &vals)).sum::<f64>() + off
                }
                Rule::Nonlinear(args, f) => {
                    let a: Vec<f64> = args.iter().map(|s| Self::source_value(s, theta, &vals)).collect();
                    f(&a).0
                }
            };
            vals.push(v);
        }
        vals
    }

    /// Θ = R(θ).
    pub fn expand(&self, theta: &[f64]) -> Result<Vec<f64>> {
        if theta.len() != self.n_theta {
            return Err(Error::Shape { expected: self.n_theta, got: theta.len() });
        }
        let vals = self.eliminated_values(theta);
        Ok(self
            .map
            .iter()
            .map(|m| match m {
                Ok(t) => theta[*t],
                Err(r) => vals[*r],
            })
            .collect())
    }

    /// θ from Θ (drops the eliminated entries).
    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        let mut theta = vec![0.0; self.n_theta];
        for (k, m) in self.map.iter().enumerate() {
            if let Ok(t) = m {
                theta[*t] = full[k];
            }
        }
        theta
    }

    /// Linearization of R at θ: each Θ entry as a sparse row over θ plus a constant,
    /// so that `Θ ≈ row·θ' + const` near θ and exactly for affine maps.
    pub fn linearize(&self, theta: &[f64]) -> Result<Vec<Row>> {
        if theta.len() != self.n_theta {
            return Err(Error::Shape { expected: self.n_theta, got: theta.len() });
        }
        let vals = self.eliminated_values(theta);
        let mut rows: Vec<Row> = Vec::with_capacity(self.rules.len());
        let src_row = |s: &Source, rows: &[Row]| -> Row {
            match s {
                Source::Free(t) => (vec![(*t, 1.0)], 0.0),
                Source::Const(c) => (Vec::new(), *c),
                Source::Elim(r) => rows[*r].clone(),
            }
        };
        for (_, rule) in &self.rules {
            let row = match rule {
                Rule::Affine(src, off) => {
                    let mut terms = Vec::new();
                    let mut c0 = *off;
                    for (s, c) in src {
                        let (t, k) = src_row(s, &rows);
                        terms.extend(t.into_iter().map(|(i, v)| (i, c * v)));
                        c0 += c * k;
                    }
                    compact_terms(&mut terms);
                    (terms, c0)
                }
                Rule::Nonlinear(args, f) => {
                    let a: Vec<f64> = args.iter().map(|s| Self::source_value(s, theta, &vals)).collect();
                    let (v, grad) = f(&a);
                    // Tangent plane: v + Σ g_k (row_k·θ' + c_k − a_k).
                    let mut terms = Vec::new();
                    let mut c0 = v;
                    for ((s, g), ak) in args.iter().zip(&grad).zip(&a) {
                        let (t, k) = src_row(s, &rows);
                        terms.extend(t.into_iter().map(|(i, x)| (i, g * x)));
                        c0 += g * (k - ak);
                    }
                    compact_terms(&mut terms);
                    (terms, c0)
                }
            };
            rows.push(row);
        }
        Ok(self
            .map
            .iter()
            .map(|m| match m {
                Ok(t) => (vec![(*t, 1.0)], 0.0),
                Err(r) => rows[*r].clone(),
            })
            .collect())
    }

    /// Jacobian `∂Θ/∂θ` at θ, as sparse rows (one per Θ entry).
    pub fn jacobian(&self, theta: &[f64]) -> Result<Vec<Vec<(usize, f64)>>> {
        Ok(self.linearize(theta)?.into_iter().map(|r| r.0).collect())
    }
}

/// Builds `θ → Θ` for a layout and a list of eliminations.
///
/// Targets must be free parameters of the layout and appear once; sources may
/// be free, fixed (folded in as constants) or themselves eliminated, as long
/// as the dependency graph is acyclic.
pub fn build_reparameterization(layout: &ThetaLayout, eliminations: &[Elimination]) -> Result<Reparameterization> {
    let n_full = layout.n_free();
    let mut by_target: HashMap<usize, usize> = HashMap::new();
    for (e, el) in eliminations.iter().enumerate() {
        let t = el.target();
        let idx = match layout.slot(&t) {
            Some(Slot::Free(i)) => i,
            Some(Slot::Fixed(_)) => return Err(Error::Constraint(format!("{t} is already fixed"))),
            None => return Err(Error::Constraint(format!("{t} is not a parameter of the field"))),
        };
        if by_target.insert(idx, e).is_some() {
            return Err(Error::Constraint(format!("{t} is eliminated twice")));
        }
        for p in el.inputs() {
            if layout.slot(&p).is_none() {
                return Err(Error::Constraint(format!("{p} is not a parameter of the field")));
            }
        }
    }

    // Depth-first topological order over eliminated Θ indices.
    let mut order: Vec<usize> = Vec::new();
    let mut done: HashSet<usize> = HashSet::new();
    let mut active: HashSet<usize> = HashSet::new();
    let mut targets: Vec<usize> = by_target.keys().copied().collect();
    targets.sort_unstable();
    fn visit(
        idx: usize,
        layout: &ThetaLayout,
        elims: &[Elimination],
        by_target: &HashMap<usize, usize>,
        done: &mut HashSet<usize>,
        active: &mut HashSet<usize>,
        order: &mut Vec<usize>,
    ) -> Result<()> {
        if done.contains(&idx) {
            return Ok(());
        }
        if !active.insert(idx) {
            return Err(Error::Constraint(format!(
                "cyclic eliminations through {}",
                layout.free_params()[idx]
            )));
        }
        for p in elims[by_target[&idx]].inputs() {
            if let Some(Slot::Free(j)) = layout.slot(&p) {
                if by_target.contains_key(&j) {
                    visit(j, layout, elims, by_target, done, active, order)?;
                }
            }
        }
        active.remove(&idx);
        done.insert(idx);
        order.push(idx);
        Ok(())
    }
    for t in targets {
        visit(t, layout, eliminations, &by_target, &mut done, &mut active, &mut order)?;
    }

    let mut map = vec![Ok(0); n_full];
    let mut n_theta = 0;
    let rank: HashMap<usize, usize> = order.iter().enumerate().map(|(r, &i)| (i, r)).collect();
    for (k, m) in map.iter_mut().enumerate() {
        *m = match rank.get(&k) {
            Some(&r) => Err(r),
            None => {
                n_theta += 1;
                Ok(n_theta - 1)
            }
        };
    }
    let source = |p: &Param| -> Source {
        match layout.slot(p).expect("checked above") {
            Slot::Fixed(v) => Source::Const(v),
            Slot::Free(j) => match map[j] {
                Ok(t) => Source::Free(t),
                Err(r) => Source::Elim(r),
            },
        }
    };
    let mut affine = true;
    let rules = order
        .iter()
        .map(|&idx| {
            let rule = match &eliminations[by_target[&idx]] {
                Elimination::Affine { sources, offset, .. } => {
                    Rule::Affine(sources.iter().map(|(p, c)| (source(p), *c)).collect(), *offset)
                }
                Elimination::Nonlinear { args, f, .. } => {
                    affine = false;
                    Rule::Nonlinear(args.iter().map(source).collect(), f.clone())
                }
            };
            (idx, rule)
        })
        .collect();
    Ok(Reparameterization { n_full, map, rules, n_theta, affine })
}
