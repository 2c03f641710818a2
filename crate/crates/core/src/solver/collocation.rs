//! Collocation points per element, shared-interface points and outer-boundary points.

use crate::basis::{gll_rule, AffineMap};
use crate::constraints::Side;
use crate::error::{Error, Result};
use crate::fce1d::Partition1D;
use crate::fce2d::Mesh2D;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CollocationKind {
    /// Gauss–Lobatto–Legendre nodes.
    Gll,
    /// Equispaced nodes including both endpoints.
    Uniform,
}

impl CollocationKind {
    pub fn name(self) -> &'static str {
        match self {
            CollocationKind::Gll => "gll",
            CollocationKind::Uniform => "uniform",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gll" => Some(CollocationKind::Gll),
            "uniform" => Some(CollocationKind::Uniform),
            _ => None,
        }
    }
}

/// `q` reference nodes on `[-1, 1]`, endpoints included.
pub fn reference_nodes(kind: CollocationKind, q: usize) -> Result<Vec<f64>> {
    if q < 2 {
        return Err(Error::Config(format!("need at least 2 collocation points, got {q}")));
    }
    Ok(match kind {
        CollocationKind::Gll => gll_rule(q)?.nodes,
        CollocationKind::Uniform => {
            (0..q).map(|i| if i + 1 == q { 1.0 } else { -1.0 + 2.0 * i as f64 / (q - 1) as f64 }).collect()
        }
    })
}

/// A point on an interior interface, seen from both adjacent elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfacePoint {
    /// Element on the lower side (smaller coordinate along `axis`).
    pub left: usize,
    /// Element on the upper side.
    pub right: usize,
    pub point: [f64; 2],
    /// Axis normal to the interface (0 = x, 1 = y).
    pub axis: usize,
}

/// A collocation point on the outer boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub elem: usize,
    pub point: [f64; 2],
    pub side: Side,
}

impl BoundaryPoint {
    /// Coordinate along the side (y on vertical sides, x on horizontal ones and in 1D).
    pub fn tangential(&self, dim: usize) -> f64 {
        if dim == 2 && self.side.axis() == 0 {
            self.point[1]
        } else {
            self.point[0]
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollocationSet {
    pub kind: CollocationKind,
    pub q: usize,
    pub dim: usize,
    pub element_points: Vec<Vec<[f64; 2]>>,
    /// Weight of the PDE row at each element point, parallel to `element_points`.
    pub weights: Vec<Vec<f64>>,
    pub interfaces: Vec<InterfacePoint>,
    pub boundary: Vec<BoundaryPoint>,
}

/// Weighting of the PDE rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RowWeights {
    /// Every PDE row has weight 1.
    Unit,
    /// GLL rows carry `sqrt(w_i)` (tensor products in 2D), so the residual
    /// norm is the quadrature approximation of the L2 norm of `Lu - f` on the
    /// reference element. Uniform rows keep weight 1.
    #[default]
    Quadrature,
    /// As `Quadrature`, with the element Jacobian included in the weight.
    QuadratureJacobian,
}

impl RowWeights {
    pub fn name(self) -> &'static str {
        match self {
            RowWeights::Unit => "unit",
            RowWeights::Quadrature => "quadrature",
            RowWeights::QuadratureJacobian => "quadrature-jacobian",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "unit" => Some(RowWeights::Unit),
            "quadrature" => Some(RowWeights::Quadrature),
            "quadrature-jacobian" => Some(RowWeights::QuadratureJacobian),
            _ => None,
        }
    }
}

impl CollocationSet {
    /// The same points with PDE row weights chosen by `w`.
    pub fn with_row_weights(mut self, w: RowWeights, element_sizes: &[[f64; 2]]) -> Result<Self> {
        if element_sizes.len() != self.element_points.len() {
            return Err(Error::Shape { expected: self.element_points.len(), got: element_sizes.len() });
        }
        let q = self.q;
        let rule = match (w, self.kind) {
            (RowWeights::Unit, _) | (_, CollocationKind::Uniform) => None,
            (_, CollocationKind::Gll) => Some(gll_rule(q)?.weights),
        };
        for (e, ws) in self.weights.iter_mut().enumerate() {
            for (k, v) in ws.iter_mut().enumerate() {
                *v = match &rule {
                    None => 1.0,
                    Some(r) => {
                        let (wx, wy) = if self.dim == 1 { (r[k], 1.0) } else { (r[k / q], r[k % q]) };
                        let jac = if w == RowWeights::QuadratureJacobian {
                            let [hx, hy] = element_sizes[e];
                            if self.dim == 1 { 0.5 * hx } else { 0.25 * hx * hy }
                        } else {
                            1.0
                        };
                        (wx * wy * jac).sqrt()
                    }
                };
            }
        }
        Ok(self)
    }

    pub fn n_points(&self) -> usize {
        self.element_points.iter().map(Vec::len).sum()
    }

    /// Boundary points on one side.
    pub fn side_points(&self, side: Side) -> impl Iterator<Item = &BoundaryPoint> {
        self.boundary.iter().filter(move |b| b.side == side)
    }

    /// Interface points normal to `axis`.
    pub fn shared(&self, axis: usize) -> impl Iterator<Item = &InterfacePoint> {
        self.interfaces.iter().filter(move |p| p.axis == axis)
    }
}

fn mapped(nodes: &[f64], a: f64, b: f64) -> Result<Vec<f64>> {
    let map = AffineMap::new(a, b)?;
    Ok(nodes
        .iter()
        .enumerate()
        .map(|(i, &xi)| match i {
            0 => a,
            _ if i + 1 == nodes.len() => b,
            _ => map.inverse(xi),
        })
        .collect())
}

/// Collocation on a 1D partition.
pub fn make_collocation_1d(partition: &Partition1D, kind: CollocationKind, q: usize) -> Result<CollocationSet> {
    let nodes = reference_nodes(kind, q)?;
    let n = partition.n_elements();
    let element_points = (0..n)
        .map(|e| {
            let (a, b) = partition.element(e);
            Ok(mapped(&nodes, a, b)?.into_iter().map(|x| [x, 0.0]).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    let interfaces = (1..n)
        .map(|i| InterfacePoint { left: i - 1, right: i, point: [partition.breakpoints[i], 0.0], axis: 0 })
        .collect();
    let boundary = vec![
        BoundaryPoint { elem: 0, point: [partition.breakpoints[0], 0.0], side: Side::Left },
        BoundaryPoint { elem: n - 1, point: [partition.breakpoints[n], 0.0], side: Side::Right },
    ];
    let weights = element_points.iter().map(|p: &Vec<[f64; 2]>| vec![1.0; p.len()]).collect();
    Ok(CollocationSet { kind, q, dim: 1, element_points, weights, interfaces, boundary })
}

/// Tensor collocation on a 2D mesh: `q × q` points per element.
pub fn make_collocation_2d(mesh: &Mesh2D, kind: CollocationKind, q: usize) -> Result<CollocationSet> {
    let nodes = reference_nodes(kind, q)?;
    let (nx, ny) = (mesh.nx(), mesh.ny());
    let px = (0..nx).map(|i| mapped(&nodes, mesh.xs[i], mesh.xs[i + 1])).collect::<Result<Vec<_>>>()?;
    let py = (0..ny).map(|j| mapped(&nodes, mesh.ys[j], mesh.ys[j + 1])).collect::<Result<Vec<_>>>()?;
    let mut element_points = Vec::with_capacity(nx * ny);
    for e in 0..nx * ny {
        let (i, j) = mesh.element_ij(e);
        let mut pts = Vec::with_capacity(q * q);
        for &x in &px[i] {
            for &y in &py[j] {
                pts.push([x, y]);
            }
        }
        element_points.push(pts);
    }
    let mut interfaces = Vec::new();
    for i in 1..nx {
        for j in 0..ny {
            for &y in &py[j] {
                interfaces.push(InterfacePoint {
                    left: mesh.element_index(i - 1, j),
                    right: mesh.element_index(i, j),
                    point: [mesh.xs[i], y],
                    axis: 0,
                });
            }
        }
    }
    for i in 0..nx {
        for j in 1..ny {
            for &x in &px[i] {
                interfaces.push(InterfacePoint {
                    left: mesh.element_index(i, j - 1),
                    right: mesh.element_index(i, j),
                    point: [x, mesh.ys[j]],
                    axis: 1,
                });
            }
        }
    }
    let mut boundary = Vec::new();
    for (side, i) in [(Side::Left, 0), (Side::Right, nx - 1)] {
        let x = if side == Side::Left { mesh.xs[0] } else { mesh.xs[nx] };
        for j in 0..ny {
            for &y in &py[j] {
                boundary.push(BoundaryPoint { elem: mesh.element_index(i, j), point: [x, y], side });
            }
        }
    }
    for (side, j) in [(Side::Bottom, 0), (Side::Top, ny - 1)] {
        let y = if side == Side::Bottom { mesh.ys[0] } else { mesh.ys[ny] };
        for i in 0..nx {
            for &x in &px[i] {
                boundary.push(BoundaryPoint { elem: mesh.element_index(i, j), point: [x, y], side });
            }
        }
    }
    let weights = element_points.iter().map(|p| vec![1.0; p.len()]).collect();
    Ok(CollocationSet { kind, q, dim: 2, element_points, weights, interfaces, boundary })
}
