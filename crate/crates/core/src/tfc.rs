//! Switching functions and constrained expressions.
//!
//! A constrained expression turns an arbitrary free function `g` into a function
//! `u = g + Σ_i (κ_i − L_i g) S_i` that meets every point constraint `L_i u = κ_i`,
//! where the switching functions satisfy `L_i S_j = δ_ij`.
//!
//! The bivariate lifts interpolate boundary data on a rectangle: the C0 lift uses
//! linear switches in both directions, the C1 lift cubic Hermite switches.

use std::sync::Arc;

use faer::linalg::solvers::DenseSolveCore;
use faer::Mat;

use crate::basis::Jet;
use crate::error::{Error, Result};

/// Mixed partial derivatives `J[kx][ky] = ∂x^kx ∂y^ky f`, orders up to 2 each.
pub type Jet2 = [[f64; 3]; 3];

/// A univariate function returning its value and two derivatives.
pub type Trace = Arc<dyn Fn(f64) -> Jet + Send + Sync>;

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite()) || b <= a {
        return Err(Error::Config(format!("switching interval [{a}, {b}] must satisfy a < b")));
    }
    Ok(())
}

/// The pair φ0 = (b−x)/(b−a), φ1 = (x−a)/(b−a).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSwitchPair {
    pub a: f64,
    pub b: f64,
}

pub fn linear_switch(a: f64, b: f64) -> Result<LinearSwitchPair> {
    check_interval(a, b)?;
    Ok(LinearSwitchPair { a, b })
}

impl LinearSwitchPair {
    /// `[φ0, φ1]` with derivatives.
    pub fn eval(&self, x: f64) -> [Jet; 2] {
        let h = self.b - self.a;
        let s = (x - self.a) / h;
        [[1.0 - s, -1.0 / h, 0.0], [s, 1.0 / h, 0.0]]
    }
}

/// Cubic Hermite cardinal functions ψ0, ψ1, φ̃0, φ̃1 on `[a, b]`.
///
/// ψ0, ψ1 carry unit value at `a` resp. `b`; φ̃0, φ̃1 carry unit slope there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteSwitchQuad {
    pub a: f64,
    pub b: f64,
}

pub fn hermite_switch(a: f64, b: f64) -> Result<HermiteSwitchQuad> {
    check_interval(a, b)?;
    Ok(HermiteSwitchQuad { a, b })
}

impl HermiteSwitchQuad {
    /// `[ψ0, ψ1, φ̃0, φ̃1]` with derivatives.
    pub fn eval(&self, x: f64) -> [Jet; 4] {
        let h = self.b - self.a;
        let s = (x - self.a) / h;
        let t = 1.0 - s;
        let psi0 = [3.0 * t * t - 2.0 * t * t * t, -(6.0 * t - 6.0 * t * t) / h, (6.0 - 12.0 * t) / (h * h)];
        let psi1 = [3.0 * s * s - 2.0 * s * s * s, (6.0 * s - 6.0 * s * s) / h, (6.0 - 12.0 * s) / (h * h)];
        // The prefactors −h and h normalize the slopes at the matching endpoint to one.
        let tilde0 = [-h * (t * t * t - t * t), 3.0 * t * t - 2.0 * t, -(6.0 * t - 2.0) / h];
        let tilde1 = [h * (s * s * s - s * s), 3.0 * s * s - 2.0 * s, (6.0 * s - 2.0) / h];
        [psi0, psi1, tilde0, tilde1]
    }
}

/// How a patch interpolates along one direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Blend {
    /// Values at both ends (linear switches).
    Linear,
    /// Values and first derivatives at both ends (cubic Hermite switches).
    Hermite,
}

impl Blend {
    /// Number of endpoint data carried: 2 or 4.
    pub fn len(self) -> usize {
        match self {
            Blend::Linear => 2,
            Blend::Hermite => 4,
        }
    }

    /// Highest derivative order interpolated at the ends.
    pub fn max_order(self) -> usize {
        match self {
            Blend::Linear => 0,
            Blend::Hermite => 1,
        }
    }
}

/// Endpoint datum interpolated by blend member `k`: `(end, derivative order)`.
///
/// Members are ordered value-at-a, value-at-b, slope-at-a, slope-at-b.
pub fn blend_member(k: usize) -> (usize, usize) {
    (k % 2, k / 2)
}

/// Blend members on `[a, b]` at `x`; the first [`Blend::len`] entries are valid.
pub fn blend_eval(blend: Blend, a: f64, b: f64, x: f64) -> [Jet; 4] {
    match blend {
        Blend::Linear => {
            let [p0, p1] = LinearSwitchPair { a, b }.eval(x);
            [p0, p1, [0.0; 3], [0.0; 3]]
        }
        Blend::Hermite => HermiteSwitchQuad { a, b }.eval(x),
    }
}

/// `f − I f`, the part of `f` not captured by blending its endpoint data.
///
/// `ends[e][d]` is the d-th derivative of `f` at end `e`.
pub fn blend_remainder(blend: Blend, members: &[Jet; 4], f: Jet, ends: [Jet; 2]) -> Jet {
    let mut out = f;
    for (k, h) in members.iter().enumerate().take(blend.len()) {
        let (e, d) = blend_member(k);
        let c = ends[e][d];
        for (o, hv) in out.iter_mut().zip(h) {
            *o -= c * hv;
        }
    }
    out
}

/// Type of a point constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointOp {
    Value,
    Derivative,
}

/// `L u(x) = target` with `L` the identity or d/dx.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointConstraint {
    pub x: f64,
    pub op: PointOp,
    pub target: f64,
}

impl PointConstraint {
    fn apply(&self, jet: Jet) -> f64 {
        match self.op {
            PointOp::Value => jet[0],
            PointOp::Derivative => jet[1],
        }
    }
}

/// A support function for deriving switching functions.
pub type Support = Arc<dyn Fn(f64) -> Jet + Send + Sync>;

/// Monomials `(x − c)^k`, k = 0..n−1, centered at `c`.
pub fn monomial_support(n: usize, c: f64) -> Vec<Support> {
    (0..n)
        .map(|k| {
            let f: Support = Arc::new(move |x: f64| {
                let t = x - c;
                let kf = k as f64;
                let pw = |e: i32| if e < 0 { 0.0 } else { t.powi(e) };
                [pw(k as i32), kf * pw(k as i32 - 1), kf * (kf - 1.0) * pw(k as i32 - 2)]
            });
            f
        })
        .collect()
}

/// Switching functions `S_j(x) = Σ_k p_k(x) (P⁻¹)_kj` for a set of point constraints.
#[derive(Clone)]
pub struct ConstrainedExpression1D {
    pub constraints: Vec<PointConstraint>,
    support: Vec<Support>,
    /// `P⁻¹`, with `P_ij = L_i p_j(x_i)`.
    p_inv: Vec<Vec<f64>>,
    /// 2-norm condition number of `P`.
    pub cond: f64,
}

impl std::fmt::Debug for ConstrainedExpression1D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ConstrainedExpression1D")
            .field("constraints", &self.constraints)
            .field("cond", &self.cond)
            .finish()
    }
}

/// Builds switching functions; `support = None` uses monomials centered at the
/// midpoint of the constraint locations.
pub fn build_constrained_expression(
    constraints: Vec<PointConstraint>,
    support: Option<Vec<Support>>,
) -> Result<ConstrainedExpression1D> {
    let n = constraints.len();
    if n == 0 {
        return Err(Error::Config("no constraints given".into()));
    }
    let support = support.unwrap_or_else(|| {
        let lo = constraints.iter().map(|c| c.x).fold(f64::INFINITY, f64::min);
        let hi = constraints.iter().map(|c| c.x).fold(f64::NEG_INFINITY, f64::max);
        monomial_support(n, 0.5 * (lo + hi))
    });
    if support.len() != n {
        return Err(Error::Shape { expected: n, got: support.len() });
    }
    let p = Mat::<f64>::from_fn(n, n, |i, j| constraints[i].apply(support[j](constraints[i].x)));
    let sv = p
        .singular_values()
        .map_err(|_| Error::Numeric("SVD of the constraint matrix failed".into()))?;
    let cond = if sv[n - 1] > 0.0 { sv[0] / sv[n - 1] } else { f64::INFINITY };
    if cond.is_nan() || cond > 1e12 {
        return Err(Error::SupportBasis(format!(
            "constraint matrix is singular (cond = {cond:.3e}) for constraints {constraints:?}"
        )));
    }
    let inv = p.full_piv_lu().inverse();
    let p_inv = (0..n).map(|k| (0..n).map(|j| inv[(k, j)]).collect()).collect();
    Ok(ConstrainedExpression1D { constraints, support, p_inv, cond })
}

impl ConstrainedExpression1D {
    /// All switching functions at `x`.
    pub fn switching(&self, x: f64) -> Vec<Jet> {
        let pk: Vec<Jet> = self.support.iter().map(|p| p(x)).collect();
        (0..self.constraints.len())
            .map(|j| {
                let mut s = [0.0; 3];
                for (k, pv) in pk.iter().enumerate() {
                    for d in 0..3 {
                        s[d] += pv[d] * self.p_inv[k][j];
                    }
                }
                s
            })
            .collect()
    }

    /// `u(x) = g(x) + Σ_i (κ_i − L_i g(x_i)) S_i(x)`.
    pub fn apply(&self, g: &dyn Fn(f64) -> Jet, x: f64) -> Jet {
        let mut u = g(x);
        for (c, s) in self.constraints.iter().zip(self.switching(x)) {
            let w = c.target - c.apply(g(c.x));
            for d in 0..3 {
                u[d] += w * s[d];
            }
        }
        u
    }
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        check_interval(x0, x1)?;
        check_interval(y0, y1)?;
        Ok(Self { x0, x1, y0, y1 })
    }

    fn xs(&self) -> [f64; 2] {
        [self.x0, self.x1]
    }

    fn ys(&self) -> [f64; 2] {
        [self.y0, self.y1]
    }
}

/// Traces on the four sides: `left`/`right` are functions of y, `bottom`/`top` of x.
#[derive(Clone)]
pub struct EdgeTraces {
    pub left: Trace,
    pub right: Trace,
    pub bottom: Trace,
    pub top: Trace,
}

impl EdgeTraces {
    /// Traces of a bivariate function; with `normal` set, the normal derivatives
    /// (∂x on vertical sides, ∂y on horizontal sides) are traced instead of values.
    pub fn of(f: Arc<dyn Fn(f64, f64) -> Jet2 + Send + Sync>, rect: Rect, normal: bool) -> Self {
        let k = usize::from(normal);
        let vert = |x: f64| -> Trace {
            let f = f.clone();
            Arc::new(move |y| f(x, y)[k])
        };
        let horiz = |y: f64| -> Trace {
            let f = f.clone();
            Arc::new(move |x| {
                let j = f(x, y);
                [j[0][k], j[1][k], j[2][k]]
            })
        };
        Self { left: vert(rect.x0), right: vert(rect.x1), bottom: horiz(rect.y0), top: horiz(rect.y1) }
    }

    fn vertical(&self, end: usize) -> &Trace {
        if end == 0 {
            &self.left
        } else {
            &self.right
        }
    }

    fn horizontal(&self, end: usize) -> &Trace {
        if end == 0 {
            &self.bottom
        } else {
            &self.top
        }
    }
}

const CORNER_TOL: f64 = 1e-10;

fn agree(a: f64, b: f64, what: &str) -> Result<()> {
    if (a - b).abs() > CORNER_TOL {
        return Err(Error::Data(format!("inconsistent corner data for {what}: {a} vs {b}")));
    }
    Ok(())
}

/// Lift operator on a rectangle; see [`bivariate_lift_c0`] and [`bivariate_lift_c1`].
#[derive(Clone)]
pub struct Lift {
    rect: Rect,
    blend: Blend,
    value: EdgeTraces,
    normal: Option<EdgeTraces>,
    /// `corner[ex][ey][dx][dy]`.
    corner: [[[[f64; 2]; 2]; 2]; 2],
}

/// Bilinear (Coons) lift: reproduces the four value traces.
pub fn bivariate_lift_c0(rect: Rect, value: EdgeTraces) -> Result<Lift> {
    let mut corner = [[[[0.0; 2]; 2]; 2]; 2];
    for ex in 0..2 {
        for ey in 0..2 {
            let v = value.vertical(ex)(rect.ys()[ey])[0];
            agree(v, value.horizontal(ey)(rect.xs()[ex])[0], "f")?;
            corner[ex][ey][0][0] = v;
        }
    }
    Ok(Lift { rect, blend: Blend::Linear, value, normal: None, corner })
}

/// Hermite lift: reproduces value traces and normal-derivative traces on every side.
///
/// Corner values of f, f_x, f_y and f_xy are read off the traces and must agree
/// between the two sides meeting at each corner.
pub fn bivariate_lift_c1(rect: Rect, value: EdgeTraces, normal: EdgeTraces) -> Result<Lift> {
    let mut corner = [[[[0.0; 2]; 2]; 2]; 2];
    for ex in 0..2 {
        for ey in 0..2 {
            let (x, y) = (rect.xs()[ex], rect.ys()[ey]);
            let vv = value.vertical(ex)(y);
            let vh = value.horizontal(ey)(x);
            let nv = normal.vertical(ex)(y);
            let nh = normal.horizontal(ey)(x);
            agree(vv[0], vh[0], "f")?;
            agree(vh[1], nv[0], "f_x")?;
            agree(vv[1], nh[0], "f_y")?;
            agree(nv[1], nh[1], "f_xy")?;
            corner[ex][ey] = [[vv[0], vv[1]], [nv[0], nv[1]]];
        }
    }
    Ok(Lift { rect, blend: Blend::Hermite, value, normal: Some(normal), corner })
}

impl Lift {
    fn side_trace(&self, vertical: bool, end: usize, d: usize) -> &Trace {
        let traces = if d == 0 { &self.value } else { self.normal.as_ref().expect("Hermite lift") };
        if vertical {
            traces.vertical(end)
        } else {
            traces.horizontal(end)
        }
    }

    /// `Af(x, y)` with all mixed derivatives up to order 2 in each direction.
    pub fn eval(&self, x: f64, y: f64) -> Jet2 {
        let r = self.rect;
        let hx = blend_eval(self.blend, r.x0, r.x1, x);
        let hy = blend_eval(self.blend, r.y0, r.y1, y);
        let n = self.blend.len();
        let mut out = [[0.0; 3]; 3];
        let mut add = |a: &Jet, b: &Jet, c: f64| {
            for kx in 0..3 {
                for ky in 0..3 {
                    out[kx][ky] += c * a[kx] * b[ky];
                }
            }
        };
        for (a, ha) in hx.iter().enumerate().take(n) {
            let (e, d) = blend_member(a);
            add(ha, &self.side_trace(true, e, d)(y), 1.0);
        }
        for (b, hb) in hy.iter().enumerate().take(n) {
            let (e, d) = blend_member(b);
            // Horizontal traces depend on x, so they sit in the x slot.
            add(&self.side_trace(false, e, d)(x), hb, 1.0);
        }
        for (a, ha) in hx.iter().enumerate().take(n) {
            let (ex, dx) = blend_member(a);
            for (b, hb) in hy.iter().enumerate().take(n) {
                let (ey, dy) = blend_member(b);
                add(ha, hb, -self.corner[ex][ey][dx][dy]);
            }
        }
        out
    }
}
