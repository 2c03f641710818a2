//! Reference-domain basis families, Gauss-Lobatto-Legendre rules and affine maps.
//!
//! Every basis member is evaluated together with its first two derivatives and
//! returned as a [`Jet`] in *physical* coordinates, so callers never deal with
//! the chain rule of the reference map.

use crate::error::{Error, Result};

/// Value and first two derivatives `[f, f', f'']` of a univariate function.
pub type Jet = [f64; 3];

/// Tolerance on `|ξ| - 1` accepted by [`legendre_eval`].
const XI_SLACK: f64 = 1e-12;

/// Affine map from a physical interval `[a, b]` onto the reference interval `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    pub a: f64,
    pub b: f64,
}

impl AffineMap {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(Error::Config(format!("interval [{a}, {b}] must satisfy a < b")));
        }
        Ok(Self { a, b })
    }

    /// ξ(x) = 2(x − a)/(b − a) − 1; maps the endpoints to exactly ∓1.
    pub fn forward(&self, x: f64) -> f64 {
        if x == self.a {
            -1.0
        } else if x == self.b {
            1.0
        } else {
            2.0 * (x - self.a) / (self.b - self.a) - 1.0
        }
    }

    pub fn inverse(&self, xi: f64) -> f64 {
        if xi == -1.0 {
            self.a
        } else if xi == 1.0 {
            self.b
        } else {
            self.a + 0.5 * (xi + 1.0) * (self.b - self.a)
        }
    }

    /// dξ/dx = 2/(b − a).
    pub fn jacobian(&self) -> f64 {
        2.0 / (self.b - self.a)
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }
}

/// `[P_n(ξ), P_n'(ξ), P_n''(ξ)]` for `n = 0..=n_max`, no range checks.
pub(crate) fn legendre_jets(n_max: usize, xi: f64) -> Vec<Jet> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push([1.0, 0.0, 0.0]);
    if n_max == 0 {
        return out;
    }
    out.push([xi, 1.0, 0.0]);
    for n in 1..n_max {
        let nf = n as f64;
        let (pn, pm) = (out[n], out[n - 1]);
        let v = ((2.0 * nf + 1.0) * xi * pn[0] - nf * pm[0]) / (nf + 1.0);
        // P'_{n+1} = P'_{n-1} + (2n+1) P_n, and the same relation one derivative up.
        let d1 = pm[1] + (2.0 * nf + 1.0) * pn[0];
        let d2 = pm[2] + (2.0 * nf + 1.0) * pn[1];
        out.push([v, d1, d2]);
    }
    out
}

/// Legendre polynomial `P_n` and its derivatives at ξ.
///
/// Entries above `max_deriv` are returned as zero.
///
/// ```
/// let [v, d1, d2] = fce_core::basis::legendre_eval(2, 0.5, 2).unwrap();
/// assert!((v + 0.125).abs() < 1e-15 && (d1 - 1.5).abs() < 1e-15 && (d2 - 3.0).abs() < 1e-15);
/// ```
pub fn legendre_eval(n: usize, xi: f64, max_deriv: usize) -> Result<Jet> {
    if !xi.is_finite() || xi.abs() > 1.0 + XI_SLACK {
        return Err(Error::Domain(format!("legendre argument {xi} outside [-1, 1]")));
    }
    if max_deriv > 2 {
        return Err(Error::Config(format!("derivative order {max_deriv} > 2")));
    }
    let mut jet = legendre_jets(n, xi)[n];
    for d in jet.iter_mut().skip(max_deriv + 1) {
        *d = 0.0;
    }
    Ok(jet)
}

/// Nodes and weights of a quadrature rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes mapped onto `[a, b]`, endpoints reproduced exactly.
    pub fn mapped_nodes(&self, map: &AffineMap) -> Vec<f64> {
        self.nodes.iter().map(|&xi| map.inverse(xi)).collect()
    }
}

/// Gauss-Lobatto-Legendre rule with `q` nodes.
///
/// Interior nodes are the roots of `P'_{q-1}`, found by Newton's method
/// started from the Chebyshev-Gauss-Lobatto points.
pub fn gll_rule(q: usize) -> Result<QuadratureRule> {
    if q < 2 {
        return Err(Error::Config(format!("GLL rule needs q >= 2, got {q}")));
    }
    let n = q - 1;
    let mut nodes: Vec<f64> = (0..q)
        .map(|i| -(std::f64::consts::PI * i as f64 / n as f64).cos())
        .collect();
    for (i, x) in nodes.iter_mut().enumerate() {
        if i == 0 || i == n {
            continue;
        }
        let mut converged = false;
        for _ in 0..100 {
            let p = legendre_jets(n, *x);
            // (1 − x²) P'_n = n (P_{n−1} − x P_n); Newton on that polynomial.
            let dx = (*x * p[n][0] - p[n - 1][0]) / (q as f64 * p[n][0]);
            *x -= dx;
            if dx.abs() < 1e-14 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Numeric(format!("GLL Newton iteration stalled for q = {q}")));
        }
    }
    nodes[0] = -1.0;
    nodes[n] = 1.0;
    for i in 0..q / 2 {
        let s = 0.5 * (nodes[n - i] - nodes[i]);
        nodes[i] = -s;
        nodes[n - i] = s;
    }
    if q % 2 == 1 {
        nodes[q / 2] = 0.0;
    }
    let scale = 2.0 / (q as f64 * n as f64);
    let weights = nodes
        .iter()
        .map(|&x| {
            let pn = legendre_jets(n, x)[n][0];
            scale / (pn * pn)
        })
        .collect();
    Ok(QuadratureRule { nodes, weights })
}

/// Families of univariate basis functions used for the free functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKind {
    /// `P_{n+2}`, n = 0..p−2: complements the linear switches.
    LegendreC0,
    /// `P_{n+4}`, n = 0..p−4: complements the cubic Hermite switches.
    LegendreC1,
    /// `P_n`, n = 0..p: the full local basis of discontinuous elements.
    LegendreFull,
    /// `sin(2√(i+1)·φ1 + sin(i+1) + 0.1)`, i = 0..p−1.
    SinusoidQuasiRandom,
}

impl BasisKind {
    /// Number of members at order `p`; `None` when `p` is too small to make sense.
    pub fn count(self, p: usize) -> Option<usize> {
        match self {
            BasisKind::LegendreC0 => p.checked_sub(1),
            BasisKind::LegendreC1 => p.checked_sub(3),
            BasisKind::LegendreFull => Some(p + 1),
            BasisKind::SinusoidQuasiRandom => Some(p),
        }
    }

    fn first_degree(self) -> usize {
        match self {
            BasisKind::LegendreC0 => 2,
            BasisKind::LegendreC1 => 4,
            _ => 0,
        }
    }
}

/// An ordered family of basis functions on an interval.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSet {
    pub kind: BasisKind,
    pub p: usize,
    pub map: AffineMap,
    len: usize,
}

impl BasisSet {
    /// Builds a non-empty basis; `p` below the minimum of the kind is rejected.
    pub fn new(kind: BasisKind, p: usize, map: AffineMap) -> Result<Self> {
        match kind.count(p) {
            Some(n) if n > 0 => Ok(Self { kind, p, map, len: n }),
            _ => Err(Error::Config(format!("order p = {p} too small for {kind:?}"))),
        }
    }

    /// Like [`BasisSet::new`] but accepts an empty family (e.g. C1 elements at p = 3).
    pub fn new_allow_empty(kind: BasisKind, p: usize, map: AffineMap) -> Result<Self> {
        match kind.count(p) {
            Some(n) => Ok(Self { kind, p, map, len: n }),
            None => Err(Error::Config(format!("order p = {p} too small for {kind:?}"))),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// All members with physical derivatives at `x`, written into `out`.
    pub fn eval_into(&self, x: f64, out: &mut Vec<Jet>) {
        out.clear();
        if self.len == 0 {
            return;
        }
        match self.kind {
            BasisKind::SinusoidQuasiRandom => {
                let s = (x - self.map.a) / self.map.length();
                for i in 0..self.len {
                    let k = (i + 1) as f64;
                    let w = 2.0 * k.sqrt();
                    let arg = w * s + k.sin() + 0.1;
                    let c = w / self.map.length();
                    let (sn, cs) = arg.sin_cos();
                    out.push([sn, c * cs, -c * c * sn]);
                }
            }
            _ => {
                let j = self.map.jacobian();
                let first = self.kind.first_degree();
                let p = legendre_jets(first + self.len - 1, self.map.forward(x));
                out.extend(p[first..].iter().map(|v| [v[0], v[1] * j, v[2] * j * j]));
            }
        }
    }

    pub fn eval(&self, x: f64) -> Vec<Jet> {
        let mut out = Vec::with_capacity(self.len);
        self.eval_into(x, &mut out);
        out
    }
}

/// Tensor product of two univariate families; member `(ix, iy)` has flat index `ix·ny + iy`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorBasis {
    pub x: BasisSet,
    pub y: BasisSet,
}

impl TensorBasis {
    /// `LegendreTensorC0` / `LegendreTensorC1` style products over a rectangle.
    pub fn new(kind: BasisKind, p: usize, mx: AffineMap, my: AffineMap) -> Result<Self> {
        Ok(Self { x: BasisSet::new(kind, p, mx)?, y: BasisSet::new(kind, p, my)? })
    }

    pub fn len(&self) -> usize {
        self.x.len() * self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Value of member `(ix, iy)` with derivative orders `(kx, ky)`.
    pub fn eval_member(&self, ix: usize, iy: usize, x: f64, y: f64, kx: usize, ky: usize) -> f64 {
        self.x.eval(x)[ix][kx] * self.y.eval(y)[iy][ky]
    }
}
