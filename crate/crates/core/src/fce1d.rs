//! 1D functionally connected elements.
//!
//! On element `[X_i, X_{i+1}]` a C0 field reads
//!
//! ```text
//! u_i = Σ_j ĝ_ij [Φ_ij − Φ_ij(X_i) φ0 − Φ_ij(X_{i+1}) φ1] + α_i φ0 + α_{i+1} φ1
//! ```
//!
//! and a C1 field replaces the linear switches by the cubic Hermite ones, with
//! interface slopes β_i next to the values α_i. Because neighbouring elements
//! share α (and β), continuity holds for every parameter vector.

use std::collections::HashMap;

use crate::basis::{AffineMap, BasisKind, BasisSet, Jet};
use crate::error::{Error, Result};
use crate::field::{locate_sorted, FceKind, Field};
use crate::functional::{along_x, AffineFunctional, Form};
use crate::layout::{Param, Slot, ThetaLayout};
use crate::tfc::{blend_eval, blend_member, blend_remainder, Blend};

/// Breakpoints `X_0 < X_1 < ... < X_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition1D {
    pub breakpoints: Vec<f64>,
}

impl Partition1D {
    pub fn new(breakpoints: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::Config("a partition needs at least one element".into()));
        }
        if breakpoints.iter().any(|x| !x.is_finite()) || breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("breakpoints must be finite and strictly increasing".into()));
        }
        Ok(Self { breakpoints })
    }

    /// `n` equal elements on `[a, b]`.
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("a partition needs at least one element".into()));
        }
        let h = (b - a) / n as f64;
        let mut bps: Vec<f64> = (0..=n).map(|i| a + h * i as f64).collect();
        bps[n] = b;
        Self::new(bps)
    }

    pub fn n_elements(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn element(&self, i: usize) -> (f64, f64) {
        (self.breakpoints[i], self.breakpoints[i + 1])
    }

    pub fn locate(&self, x: f64) -> Result<usize> {
        locate_sorted(&self.breakpoints, x)
            .ok_or_else(|| Error::Domain(format!("x = {x} outside the partition")))
    }

    /// Index of the breakpoint equal to `x` (to 1e-12 relative), if any.
    pub fn node_at(&self, x: f64) -> Option<usize> {
        let span = self.breakpoints[self.n_elements()] - self.breakpoints[0];
        self.breakpoints.iter().position(|&b| (b - x).abs() <= 1e-12 * span)
    }
}

fn blend_of(kind: FceKind) -> Option<Blend> {
    kind.blend(0)
}

/// Whether `basis` can serve as the free-function family for `kind`.
pub(crate) fn admissible(kind: FceKind, basis: BasisKind) -> bool {
    matches!(
        (kind, basis),
        (_, BasisKind::SinusoidQuasiRandom)
            | (FceKind::C0, BasisKind::LegendreC0)
            | (FceKind::C1, BasisKind::LegendreC1)
            | (FceKind::Nc, BasisKind::LegendreFull | BasisKind::LegendreC0)
    )
}

/// The Legendre family matching a field kind.
pub fn legendre_for(kind: FceKind) -> BasisKind {
    match kind {
        FceKind::C1 => BasisKind::LegendreC1,
        FceKind::Nc => BasisKind::LegendreFull,
        _ => BasisKind::LegendreC0,
    }
}

/// A 1D field of kind C0, C1 or NC.
#[derive(Debug, Clone)]
pub struct FceField1D {
    pub partition: Partition1D,
    pub kind: FceKind,
    pub basis: BasisKind,
    pub p: usize,
    layout: ThetaLayout,
    fixed: HashMap<Param, f64>,
    bases: Vec<BasisSet>,
    /// `g_slots[e][k]`.
    g_slots: Vec<Vec<Slot>>,
    /// `nodes[i][d]`: α_i (d = 0) and, for C1, β_i (d = 1).
    nodes: Vec<Vec<Slot>>,
}

/// Builds a 1D field; `fixed` prescribes values of selected parameters.
///
/// Layout: all ĝ (element-major), then α_0..α_N, then β_0..β_N (C1 only),
/// minus the fixed entries.
pub fn build_field_1d(
    partition: Partition1D,
    kind: FceKind,
    basis: BasisKind,
    p: usize,
    fixed: &HashMap<Param, f64>,
) -> Result<FceField1D> {
    if !matches!(kind, FceKind::C0 | FceKind::C1 | FceKind::Nc) {
        return Err(Error::Config(format!("{kind:?} is not a 1D field kind")));
    }
    if !admissible(kind, basis) {
        return Err(Error::Config(format!("basis {basis:?} cannot be used with a {kind:?} field")));
    }
    let n = partition.n_elements();
    let bases = (0..n)
        .map(|e| {
            let (a, b) = partition.element(e);
            let set = BasisSet::new_allow_empty(basis, p, AffineMap::new(a, b)?)?;
            if kind == FceKind::Nc && set.is_empty() {
                return Err(Error::Config("NC elements need a non-empty basis".into()));
            }
            Ok(set)
        })
        .collect::<Result<Vec<_>>>()?;
    let nd = blend_of(kind).map_or(0, |b| b.max_order() + 1);
    let mut params: Vec<Param> = Vec::new();
    for (e, set) in bases.iter().enumerate() {
        params.extend((0..set.len()).map(|k| Param::Interior { elem: e, k }));
    }
    for d in 0..nd {
        params.extend((0..=n).map(|i| Param::Corner { i, j: 0, dx: d, dy: 0 }));
    }
    if let Some(p) = fixed.keys().find(|p| !params.contains(p)) {
        return Err(Error::Config(format!("fixed entry {p} is not a parameter of this field")));
    }
    let layout = ThetaLayout::new(params, fixed);
    let slot = |p: Param| layout.slot(&p).expect("listed parameter");
    let g_slots = bases
        .iter()
        .enumerate()
        .map(|(e, set)| (0..set.len()).map(|k| slot(Param::Interior { elem: e, k })).collect())
        .collect();
    let nodes = (0..=n)
        .map(|i| (0..nd).map(|d| slot(Param::Corner { i, j: 0, dx: d, dy: 0 })).collect())
        .collect();
    Ok(FceField1D { partition, kind, basis, p, layout, fixed: fixed.clone(), bases, g_slots, nodes })
}

impl FceField1D {
    /// The prescribed parameter values this field was built with.
    pub fn fixed(&self) -> &HashMap<Param, f64> {
        &self.fixed
    }

    /// A copy of this field with a different fixed set.
    pub fn with_fixed(&self, fixed: &HashMap<Param, f64>) -> Result<Self> {
        build_field_1d(self.partition.clone(), self.kind, self.basis, self.p, fixed)
    }

    pub fn basis_set(&self, e: usize) -> &BasisSet {
        &self.bases[e]
    }

    /// Jets `[u, u', u'']` of element `e` at `x` as linear forms (x-components only).
    fn element_form(&self, e: usize, x: f64) -> Form {
        let set = &self.bases[e];
        let phi = set.eval(x);
        let mut form = Form::default();
        match blend_of(self.kind) {
            None => {
                for (k, v) in phi.iter().enumerate() {
                    form.push_slot(self.g_slots[e][k], along_x(v));
                }
            }
            Some(blend) => {
                let (a, b) = self.partition.element(e);
                let h = blend_eval(blend, a, b, x);
                let (pa, pb) = (set.eval(a), set.eval(b));
                for (k, v) in phi.iter().enumerate() {
                    let r = blend_remainder(blend, &h, *v, [pa[k], pb[k]]);
                    form.push_slot(self.g_slots[e][k], along_x(&r));
                }
                for (m, hm) in h.iter().enumerate().take(blend.len()) {
                    let (end, d) = blend_member(m);
                    form.push_slot(self.nodes[e + end][d], along_x(hm));
                }
            }
        }
        form
    }
}

impl Field for FceField1D {
    fn dim(&self) -> usize {
        1
    }

    fn kind(&self) -> FceKind {
        self.kind
    }

    fn layout(&self) -> &ThetaLayout {
        &self.layout
    }

    fn n_elements(&self) -> usize {
        self.partition.n_elements()
    }

    fn element_bounds(&self, e: usize) -> [f64; 4] {
        let (a, b) = self.partition.element(e);
        [a, b, 0.0, 0.0]
    }

    fn locate(&self, pt: [f64; 2]) -> Result<usize> {
        self.partition.locate(pt[0])
    }

    fn form(&self, e: usize, pt: [f64; 2]) -> Form {
        self.element_form(e, pt[0])
    }
}

/// `d^deriv u / dx^deriv` at `x` as an affine functional of Θ.
pub fn eval_affine_1d(field: &FceField1D, x: f64, deriv: usize) -> Result<AffineFunctional> {
    if deriv > 2 {
        return Err(Error::Config(format!("derivative order {deriv} > 2")));
    }
    field.functional([x, 0.0], deriv, 0)
}

/// Field values at `xs` for a given Θ.
pub fn materialize_1d(field: &FceField1D, theta: &[f64], xs: &[f64]) -> Result<Vec<f64>> {
    if theta.len() != field.n_free() {
        return Err(Error::Shape { expected: field.n_free(), got: theta.len() });
    }
    xs.iter().map(|&x| Ok(eval_affine_1d(field, x, 0)?.eval(theta))).collect()
}

/// All three jets of element `e` at `x` for a given Θ; handy for two-sided checks.
pub fn element_jet(field: &FceField1D, e: usize, x: f64, theta: &[f64]) -> Jet {
    let v = field.form(e, [x, 0.0]).eval(theta);
    [v[0], v[3], v[6]]
}
