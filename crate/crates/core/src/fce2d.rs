//! 2D functionally connected elements on tensor meshes.
//!
//! Every element of a continuous kind is written as a hierarchical patch:
//!
//! ```text
//! u = Σ ĝ_k Ã_k(x) B̃_k(y)                      interior bubbles
//!   + Σ_a hx_a(x) T̃_a(y)                       vertical edge residuals
//!   + Σ_b hy_b(y) S̃_b(x)                       horizontal edge residuals
//!   + Σ_ab hx_a(x) hy_b(y) C_ab                corner parameters
//! ```
//!
//! `hx`, `hy` are the blend members of each direction (linear switches for C0,
//! cubic Hermite switches for C1), a tilde marks the part of a function not
//! reproduced by blending its endpoint data, and `C_ab` is a corner value or
//! derivative. An edge function is `Ĝ = Σ c_k Φ_k + trace`, where the optional
//! trace carries boundary data or an interface jump. Adjacent elements share
//! edge functions and corners, so continuity holds for every Θ.

use std::collections::HashMap;

use crate::basis::{AffineMap, BasisSet, Jet};
use crate::error::{Error, Result};
use crate::field::{locate_sorted, BasisFamily, FceKind, Field};
use crate::functional::{along_x, outer, AffineFunctional, Form};
use crate::layout::{Param, Slot, ThetaLayout};
use crate::tfc::{blend_eval, blend_member, blend_remainder, Blend, Trace};

/// Tensor mesh with breakpoints `xs` and `ys`; element `(i, j)` has index `i·Ny + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh2D {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

fn check_breakpoints(v: &[f64], axis: &str) -> Result<()> {
    if v.len() < 2 {
        return Err(Error::Config(format!("{axis}-breakpoints need at least one element")));
    }
    if v.iter().any(|x| !x.is_finite()) || v.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(format!("{axis}-breakpoints must be strictly increasing")));
    }
    Ok(())
}

fn uniform_points(a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / n as f64;
    let mut v: Vec<f64> = (0..=n).map(|i| a + h * i as f64).collect();
    v[n] = b;
    v
}

impl Mesh2D {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        check_breakpoints(&xs, "x")?;
        check_breakpoints(&ys, "y")?;
        Ok(Self { xs, ys })
    }

    /// `nx × ny` equal elements on `[x0, x1] × [y0, y1]`.
    pub fn uniform(x: [f64; 2], y: [f64; 2], nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::Config("a mesh needs at least one element per direction".into()));
        }
        Self::new(uniform_points(x[0], x[1], nx), uniform_points(y[0], y[1], ny))
    }

    pub fn nx(&self) -> usize {
        self.xs.len() - 1
    }

    pub fn ny(&self) -> usize {
        self.ys.len() - 1
    }

    pub fn n_elements(&self) -> usize {
        self.nx() * self.ny()
    }

    pub fn element_index(&self, i: usize, j: usize) -> usize {
        i * self.ny() + j
    }

    /// `(i, j)` of element `e`.
    pub fn element_ij(&self, e: usize) -> (usize, usize) {
        (e / self.ny(), e % self.ny())
    }

    /// `[x0, x1, y0, y1]` of element `e`.
    pub fn element_rect(&self, e: usize) -> [f64; 4] {
        let (i, j) = self.element_ij(e);
        [self.xs[i], self.xs[i + 1], self.ys[j], self.ys[j + 1]]
    }

    /// Element containing the point; shared edges resolve to the lower index.
    pub fn locate(&self, pt: [f64; 2]) -> Result<usize> {
        match (locate_sorted(&self.xs, pt[0]), locate_sorted(&self.ys, pt[1])) {
            (Some(i), Some(j)) => Ok(self.element_index(i, j)),
            _ => Err(Error::Domain(format!("point ({}, {}) outside the mesh", pt[0], pt[1]))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    /// The edge `x = X_i`, `y ∈ [Y_j, Y_{j+1}]`.
    Vertical,
    /// The edge `y = Y_j`, `x ∈ [X_i, X_{i+1}]`.
    Horizontal,
}

/// One edge function: orientation, position and role (0 = value, 1 = normal derivative).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeSlot {
    pub orientation: Orientation,
    pub i: usize,
    pub j: usize,
    pub role: usize,
}

impl EdgeSlot {
    pub fn vertical(i: usize, j: usize, role: usize) -> Self {
        Self { orientation: Orientation::Vertical, i, j, role }
    }

    pub fn horizontal(i: usize, j: usize, role: usize) -> Self {
        Self { orientation: Orientation::Horizontal, i, j, role }
    }

    fn param(&self, k: usize) -> Param {
        let Self { i, j, role, .. } = *self;
        match self.orientation {
            Orientation::Vertical => Param::VerticalEdge { i, j, role, k },
            Orientation::Horizontal => Param::HorizontalEdge { i, j, role, k },
        }
    }
}

/// A known function added to an edge function.
#[derive(Clone)]
pub struct EdgeInstall {
    /// Jets of the known part along the edge coordinate.
    pub trace: Trace,
    /// Whether the edge also keeps its free coefficients (interface jumps do,
    /// boundary data does not).
    pub keep_coefficients: bool,
}

impl std::fmt::Debug for EdgeInstall {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EdgeInstall").field("keep_coefficients", &self.keep_coefficients).finish()
    }
}

/// Known edge parts and prescribed corner values folded into a field.
#[derive(Debug, Clone, Default)]
pub struct FieldData2D {
    pub edges: HashMap<EdgeSlot, EdgeInstall>,
    /// Prescribed corner parameters (`Param::Corner`).
    pub corners: HashMap<Param, f64>,
}

#[derive(Clone)]
struct EdgeRt {
    slots: Vec<Slot>,
    trace: Option<Trace>,
}

/// A 2D field of any kind.
#[derive(Clone)]
pub struct FceField2D {
    pub mesh: Mesh2D,
    pub kind: FceKind,
    pub family: BasisFamily,
    pub p: usize,
    pub m: usize,
    blends: Option<[Blend; 2]>,
    layout: ThetaLayout,
    data: FieldData2D,
    /// Interior member families per column (x) and per row (y).
    xb: Vec<BasisSet>,
    yb: Vec<BasisSet>,
    /// Edge member families: along y for vertical edges (per row), along x for horizontal (per column).
    vb: Vec<BasisSet>,
    hb: Vec<BasisSet>,
    interior: Vec<Vec<Slot>>,
    vedges: Vec<EdgeRt>,
    hedges: Vec<EdgeRt>,
    corners: Vec<Slot>,
}

impl std::fmt::Debug for FceField2D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FceField2D")
            .field("mesh", &self.mesh)
            .field("kind", &self.kind)
            .field("family", &self.family)
            .field("p", &self.p)
            .field("m", &self.m)
            .field("n_free", &self.layout.n_free())
            .finish()
    }
}

/// Builds a 2D field with no boundary data installed.
pub fn build_field_2d(mesh: Mesh2D, kind: FceKind, family: BasisFamily, p: usize, m: usize) -> Result<FceField2D> {
    build_field_2d_with(mesh, kind, family, p, m, FieldData2D::default())
}

/// Builds a 2D field with known edge parts and corner values.
///
/// Layout: ĝ (element-major), vertical edge coefficients by role, horizontal
/// edge coefficients by role, then α̂, β̂⁽¹⁾, β̂⁽²⁾, γ̂; lexicographic within each block.
pub fn build_field_2d_with(
    mesh: Mesh2D,
    kind: FceKind,
    family: BasisFamily,
    p: usize,
    m: usize,
    data: FieldData2D,
) -> Result<FceField2D> {
    let (nx, ny) = (mesh.nx(), mesh.ny());
    let blends = match (kind.blend(0), kind.blend(1)) {
        (Some(bx), Some(by)) => Some([bx, by]),
        _ => None,
    };
    let kx = family.kind_for(blends.map(|b| b[0]));
    let ky = family.kind_for(blends.map(|b| b[1]));
    let interval = |v: &[f64], i: usize| AffineMap::new(v[i], v[i + 1]);
    let xb = (0..nx)
        .map(|i| BasisSet::new_allow_empty(kx, p, interval(&mesh.xs, i)?))
        .collect::<Result<Vec<_>>>()?;
    let yb = (0..ny)
        .map(|j| BasisSet::new_allow_empty(ky, p, interval(&mesh.ys, j)?))
        .collect::<Result<Vec<_>>>()?;
    if blends.is_none() && xb[0].is_empty() {
        return Err(Error::Config("NC elements need a non-empty basis".into()));
    }
    let (vb, hb) = match blends {
        Some([bx, by]) => {
            let ek_y = family.kind_for(Some(by));
            let ek_x = family.kind_for(Some(bx));
            (
                (0..ny)
                    .map(|j| BasisSet::new_allow_empty(ek_y, m, interval(&mesh.ys, j)?))
                    .collect::<Result<Vec<_>>>()?,
                (0..nx)
                    .map(|i| BasisSet::new_allow_empty(ek_x, m, interval(&mesh.xs, i)?))
                    .collect::<Result<Vec<_>>>()?,
            )
        }
        None => (Vec::new(), Vec::new()),
    };

    let (rx, ry) = match blends {
        Some([bx, by]) => (bx.max_order() + 1, by.max_order() + 1),
        None => (0, 0),
    };
    for e in data.edges.keys() {
        let ok = match e.orientation {
            Orientation::Vertical => e.i <= nx && e.j < ny && e.role < rx,
            Orientation::Horizontal => e.i < nx && e.j <= ny && e.role < ry,
        };
        if !ok {
            return Err(Error::Config(format!("edge {e:?} does not exist in this field")));
        }
    }

    let mut params = Vec::new();
    let mut interior_len = Vec::with_capacity(nx * ny);
    for e in 0..nx * ny {
        let (i, j) = mesh.element_ij(e);
        let n = xb[i].len() * yb[j].len();
        interior_len.push(n);
        params.extend((0..n).map(|k| Param::Interior { elem: e, k }));
    }
    let edge_len = |s: &EdgeSlot| -> usize {
        if data.edges.get(s).is_some_and(|d| !d.keep_coefficients) {
            return 0;
        }
        match s.orientation {
            Orientation::Vertical => vb[s.j].len(),
            Orientation::Horizontal => hb[s.i].len(),
        }
    };
    for role in 0..rx {
        for i in 0..=nx {
            for j in 0..ny {
                let s = EdgeSlot::vertical(i, j, role);
                params.extend((0..edge_len(&s)).map(|k| s.param(k)));
            }
        }
    }
    for role in 0..ry {
        for i in 0..nx {
            for j in 0..=ny {
                let s = EdgeSlot::horizontal(i, j, role);
                params.extend((0..edge_len(&s)).map(|k| s.param(k)));
            }
        }
    }
    for (dx, dy) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
        if dx < rx && dy < ry {
            for i in 0..=nx {
                for j in 0..=ny {
                    params.push(Param::Corner { i, j, dx, dy });
                }
            }
        }
    }
    if let Some(p) = data.corners.keys().find(|p| !matches!(p, Param::Corner { .. }) || !params.contains(p)) {
        return Err(Error::Config(format!("fixed entry {p} is not a corner parameter of this field")));
    }
    let layout = ThetaLayout::new(params, &data.corners);
    let slot = |p: Param| layout.slot(&p).expect("listed parameter");

    let interior = (0..nx * ny)
        .map(|e| (0..interior_len[e]).map(|k| slot(Param::Interior { elem: e, k })).collect())
        .collect();
    let edge_rt = |s: EdgeSlot| EdgeRt {
        slots: (0..edge_len(&s)).map(|k| slot(s.param(k))).collect(),
        trace: data.edges.get(&s).map(|d| d.trace.clone()),
    };
    let mut vedges = Vec::new();
    for i in 0..=nx {
        for j in 0..ny {
            for role in 0..rx {
                vedges.push(edge_rt(EdgeSlot::vertical(i, j, role)));
            }
        }
    }
    let mut hedges = Vec::new();
    for i in 0..nx {
        for j in 0..=ny {
            for role in 0..ry {
                hedges.push(edge_rt(EdgeSlot::horizontal(i, j, role)));
            }
        }
    }
    let mut corners = Vec::new();
    for i in 0..=nx {
        for j in 0..=ny {
            for dx in 0..rx {
                for dy in 0..ry {
                    corners.push(slot(Param::Corner { i, j, dx, dy }));
                }
            }
        }
    }
    Ok(FceField2D {
        mesh,
        kind,
        family,
        p,
        m,
        blends,
        layout,
        data,
        xb,
        yb,
        vb,
        hb,
        interior,
        vedges,
        hedges,
        corners,
    })
}

impl FceField2D {
    /// Blends along x and y, or `None` for NC fields.
    pub fn blends(&self) -> Option<[Blend; 2]> {
        self.blends
    }

    /// The known edge parts and corner values this field was built with.
    pub fn data(&self) -> &FieldData2D {
        &self.data
    }

    /// A copy of this field with different edge and corner data.
    pub fn with_data(&self, data: FieldData2D) -> Result<Self> {
        build_field_2d_with(self.mesh.clone(), self.kind, self.family, self.p, self.m, data)
    }

    /// Number of free coefficients an uninstalled edge carries.
    pub fn edge_len(&self, s: &EdgeSlot) -> usize {
        match s.orientation {
            Orientation::Vertical => self.vb.get(s.j).map_or(0, BasisSet::len),
            Orientation::Horizontal => self.hb.get(s.i).map_or(0, BasisSet::len),
        }
    }

    fn ranks(&self) -> (usize, usize) {
        match self.blends {
            Some([bx, by]) => (bx.max_order() + 1, by.max_order() + 1),
            None => (0, 0),
        }
    }

    fn corner_slot(&self, i: usize, j: usize, dx: usize, dy: usize) -> Slot {
        let (rx, ry) = self.ranks();
        self.corners[((i * (self.mesh.ny() + 1) + j) * rx + dx) * ry + dy]
    }

    fn edge_rt(&self, s: &EdgeSlot) -> &EdgeRt {
        let (rx, ry) = self.ranks();
        match s.orientation {
            Orientation::Vertical => &self.vedges[(s.i * self.mesh.ny() + s.j) * rx + s.role],
            Orientation::Horizontal => &self.hedges[(s.i * (self.mesh.ny() + 1) + s.j) * ry + s.role],
        }
    }

    /// Segment `[t0, t1]`, edge-member family and along-edge blend of an edge.
    fn edge_geometry(&self, s: &EdgeSlot) -> (f64, f64, &BasisSet, Blend) {
        let [bx, by] = self.blends.expect("edges exist only for continuous kinds");
        match s.orientation {
            Orientation::Vertical => (self.mesh.ys[s.j], self.mesh.ys[s.j + 1], &self.vb[s.j], by),
            Orientation::Horizontal => (self.mesh.xs[s.i], self.mesh.xs[s.i + 1], &self.hb[s.i], bx),
        }
    }

    /// `Ĝ − I Ĝ` at `t`, as `(slot, jet)` terms plus a known jet.
    fn edge_residual(&self, s: &EdgeSlot, t: f64, out: &mut Vec<(Slot, Jet)>) -> Jet {
        let (t0, t1, set, blend) = self.edge_geometry(s);
        let rt = self.edge_rt(s);
        let h = blend_eval(blend, t0, t1, t);
        out.clear();
        if !rt.slots.is_empty() {
            let (v, v0, v1) = (set.eval(t), set.eval(t0), set.eval(t1));
            for (k, sl) in rt.slots.iter().enumerate() {
                out.push((*sl, blend_remainder(blend, &h, v[k], [v0[k], v1[k]])));
            }
        }
        match &rt.trace {
            Some(f) => blend_remainder(blend, &h, f(t), [f(t0), f(t1)]),
            None => [0.0; 3],
        }
    }

    /// The full edge function (residual plus blended corner data) as a 1D form.
    fn edge_form(&self, s: &EdgeSlot, t: f64) -> Form {
        let (t0, t1, _, blend) = self.edge_geometry(s);
        let mut terms = Vec::new();
        let known = self.edge_residual(s, t, &mut terms);
        let mut form = Form::default();
        for (sl, jet) in terms {
            form.push_slot(sl, along_x(&jet));
        }
        form.add_offset(along_x(&known));
        let h = blend_eval(blend, t0, t1, t);
        for (b, hb) in h.iter().enumerate().take(blend.len()) {
            let (end, d) = blend_member(b);
            let slot = match s.orientation {
                Orientation::Vertical => self.corner_slot(s.i, s.j + end, s.role, d),
                Orientation::Horizontal => self.corner_slot(s.i + end, s.j, d, s.role),
            };
            form.push_slot(slot, along_x(hb));
        }
        form
    }

    fn element_form(&self, e: usize, x: f64, y: f64) -> Form {
        let (i, j) = self.mesh.element_ij(e);
        let (xs, ys) = (&self.xb[i], &self.yb[j]);
        let mut form = Form::default();
        let Some([bx, by]) = self.blends else {
            let (ax, ay) = (xs.eval(x), ys.eval(y));
            let mut k = 0;
            for a in &ax {
                for b in &ay {
                    form.push_slot(self.interior[e][k], outer(a, b));
                    k += 1;
                }
            }
            return form;
        };
        let [x0, x1, y0, y1] = self.mesh.element_rect(e);
        let hx = blend_eval(bx, x0, x1, x);
        let hy = blend_eval(by, y0, y1, y);

        if !self.interior[e].is_empty() {
            let bubbles = |set: &BasisSet, blend: Blend, h: &[Jet; 4], a: f64, b: f64, t: f64| -> Vec<Jet> {
                let (v, va, vb) = (set.eval(t), set.eval(a), set.eval(b));
                (0..v.len()).map(|k| blend_remainder(blend, h, v[k], [va[k], vb[k]])).collect()
            };
            let ax = bubbles(xs, bx, &hx, x0, x1, x);
            let ay = bubbles(ys, by, &hy, y0, y1, y);
            let mut k = 0;
            for a in &ax {
                for b in &ay {
                    form.push_slot(self.interior[e][k], outer(a, b));
                    k += 1;
                }
            }
        }

        let mut terms = Vec::new();
        for (a, ha) in hx.iter().enumerate().take(bx.len()) {
            let (end, d) = blend_member(a);
            let known = self.edge_residual(&EdgeSlot::vertical(i + end, j, d), y, &mut terms);
            for (sl, jet) in &terms {
                form.push_slot(*sl, outer(ha, jet));
            }
            form.add_offset(outer(ha, &known));
        }
        for (b, hb) in hy.iter().enumerate().take(by.len()) {
            let (end, d) = blend_member(b);
            let known = self.edge_residual(&EdgeSlot::horizontal(i, j + end, d), x, &mut terms);
            for (sl, jet) in &terms {
                form.push_slot(*sl, outer(jet, hb));
            }
            form.add_offset(outer(&known, hb));
        }
        for (a, ha) in hx.iter().enumerate().take(bx.len()) {
            let (ex, dx) = blend_member(a);
            for (b, hb) in hy.iter().enumerate().take(by.len()) {
                let (ey, dy) = blend_member(b);
                form.push_slot(self.corner_slot(i + ex, j + ey, dx, dy), outer(ha, hb));
            }
        }
        form
    }
}

impl Field for FceField2D {
    fn dim(&self) -> usize {
        2
    }

    fn kind(&self) -> FceKind {
        self.kind
    }

    fn layout(&self) -> &ThetaLayout {
        &self.layout
    }

    fn n_elements(&self) -> usize {
        self.mesh.n_elements()
    }

    fn element_bounds(&self, e: usize) -> [f64; 4] {
        self.mesh.element_rect(e)
    }

    fn locate(&self, pt: [f64; 2]) -> Result<usize> {
        self.mesh.locate(pt)
    }

    fn form(&self, e: usize, pt: [f64; 2]) -> Form {
        self.element_form(e, pt[0], pt[1])
    }
}

/// Derivative `deriv` of an edge function at `t` along its edge.
///
/// Value edges collapse to the corner values at the segment ends; role-1
/// edges collapse to the corner normal derivatives.
pub fn edge_eval(field: &FceField2D, slot: EdgeSlot, t: f64, deriv: usize) -> Result<AffineFunctional> {
    let Some([bx, by]) = field.blends else {
        return Err(Error::Config("NC fields have no edge functions".into()));
    };
    let (nx, ny) = (field.mesh.nx(), field.mesh.ny());
    let ok = match slot.orientation {
        Orientation::Vertical => slot.i <= nx && slot.j < ny && slot.role <= bx.max_order(),
        Orientation::Horizontal => slot.i < nx && slot.j <= ny && slot.role <= by.max_order(),
    };
    if !ok {
        return Err(Error::Config(format!("edge {slot:?} does not exist in this field")));
    }
    if deriv > 2 {
        return Err(Error::Config(format!("derivative order {deriv} > 2")));
    }
    let (t0, t1, _, _) = field.edge_geometry(&slot);
    let tol = 1e-12 * (t1 - t0);
    if !(t >= t0 - tol && t <= t1 + tol) {
        return Err(Error::Domain(format!("t = {t} outside the edge segment [{t0}, {t1}]")));
    }
    Ok(field.edge_form(&slot, t).component(deriv, 0))
}

/// `∂x^kx ∂y^ky u` at `(x, y)` as an affine functional of Θ.
pub fn eval_affine_2d(field: &FceField2D, pt: [f64; 2], kx: usize, ky: usize) -> Result<AffineFunctional> {
    if kx > 2 || ky > 2 {
        return Err(Error::Config(format!("derivative orders ({kx}, {ky}) exceed 2")));
    }
    field.functional(pt, kx, ky)
}

/// Field values at `pts` for a given Θ.
pub fn materialize_2d(field: &FceField2D, theta: &[f64], pts: &[[f64; 2]]) -> Result<Vec<f64>> {
    if theta.len() != field.n_free() {
        return Err(Error::Shape { expected: field.n_free(), got: theta.len() });
    }
    pts.iter().map(|&pt| Ok(eval_affine_2d(field, pt, 0, 0)?.eval(theta))).collect()
}
