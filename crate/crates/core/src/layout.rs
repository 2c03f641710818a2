//! Deterministic index maps from named element parameters to the unknown vector Θ.

use std::collections::HashMap;
use std::fmt;

/// Named parameter of a 1D or 2D field.
///
/// Corner parameters cover interface values and derivatives: `(dx, dy) = (0, 0)`
/// is α̂, `(1, 0)` is β̂⁽¹⁾ (∂x), `(0, 1)` is β̂⁽²⁾ (∂y) and `(1, 1)` is γ̂.
/// 1D fields use `j = 0`, so α_i is `Corner { i, 0, 0, 0 }` and β_i is
/// `Corner { i, 0, 1, 0 }`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    /// Coefficient `k` of the free function `g` in element `elem`.
    Interior { elem: usize, k: usize },
    /// Coefficient `k` of the edge function on `x = X_i`, `y ∈ [Y_j, Y_{j+1}]`;
    /// `role` 0 is the value trace, 1 the ∂x trace.
    VerticalEdge { i: usize, j: usize, role: usize, k: usize },
    /// Coefficient `k` of the edge function on `y = Y_j`, `x ∈ [X_i, X_{i+1}]`;
    /// `role` 0 is the value trace, 1 the ∂y trace.
    HorizontalEdge { i: usize, j: usize, role: usize, k: usize },
    /// Derivative `(dx, dy)` of the field at the vertex `(X_i, Y_j)`.
    Corner { i: usize, j: usize, dx: usize, dy: usize },
}

impl Param {
    pub const fn alpha(i: usize) -> Self {
        Param::Corner { i, j: 0, dx: 0, dy: 0 }
    }

    pub const fn beta(i: usize) -> Self {
        Param::Corner { i, j: 0, dx: 1, dy: 0 }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Param::Interior { elem, k } => write!(f, "g[{elem},{k}]"),
            Param::VerticalEdge { i, j, role, k } => write!(f, "G{}[{i},{j},{k}]", role + 1),
            Param::HorizontalEdge { i, j, role, k } => write!(f, "H{}[{i},{j},{k}]", role + 1),
            Param::Corner { i, j, dx, dy } => {
                let name = match (dx, dy) {
                    (0, 0) => "alpha",
                    (1, 0) => "beta1",
                    (0, 1) => "beta2",
                    _ => "gamma",
                };
                write!(f, "{name}[{i},{j}]")
            }
        }
    }
}

/// Where a parameter lives: an index into Θ, or a prescribed constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Slot {
    Free(usize),
    Fixed(f64),
}

/// Index map from parameters to positions in Θ.
///
/// Free entries are numbered contiguously in the order the parameters were
/// listed, skipping fixed ones, so the layout is reproducible from the
/// parameter list and the fixed set alone.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ThetaLayout {
    free: Vec<Param>,
    slots: HashMap<Param, Slot>,
    order: Vec<Param>,
}

impl ThetaLayout {
    pub fn new(params: impl IntoIterator<Item = Param>, fixed: &HashMap<Param, f64>) -> Self {
        let mut out = Self::default();
        for p in params {
            let slot = match fixed.get(&p) {
                Some(&v) => Slot::Fixed(v),
                None => {
                    out.free.push(p);
                    Slot::Free(out.free.len() - 1)
                }
            };
            if out.slots.insert(p, slot).is_none() {
                out.order.push(p);
            }
        }
        out
    }

    pub fn n_free(&self) -> usize {
        self.free.len()
    }

    /// Free parameters in Θ order.
    pub fn free_params(&self) -> &[Param] {
        &self.free
    }

    /// Every parameter (free and fixed) in listing order.
    pub fn params(&self) -> &[Param] {
        &self.order
    }

    pub fn slot(&self, p: &Param) -> Option<Slot> {
        self.slots.get(p).copied()
    }

    /// Position of a free parameter in Θ.
    pub fn index_of(&self, p: &Param) -> Option<usize> {
        match self.slots.get(p) {
            Some(Slot::Free(i)) => Some(*i),
            _ => None,
        }
    }

    /// Fixed parameters and their values, in listing order.
    pub fn fixed_entries(&self) -> Vec<(Param, f64)> {
        self.order
            .iter()
            .filter_map(|p| match self.slots[p] {
                Slot::Fixed(v) => Some((*p, v)),
                Slot::Free(_) => None,
            })
            .collect()
    }
}
