//! The interface shared by 1D and 2D fields, used by assembly and error metrics.

use crate::basis::BasisKind;
use crate::error::Result;
use crate::functional::{Form, AffineFunctional};
use crate::layout::ThetaLayout;
use crate::tfc::Blend;

/// Inter-element continuity built into a field representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FceKind {
    /// Value and first derivatives continuous across every element boundary.
    C1,
    /// Values continuous across element boundaries.
    C0,
    /// C1 across boundaries normal to x, C0 across boundaries normal to y.
    MixedC1x,
    /// C0 across boundaries normal to x, C1 across boundaries normal to y.
    MixedC1y,
    /// No continuity; all coupling is left to the residual.
    Nc,
}

impl FceKind {
    /// Continuity order across boundaries normal to `axis` (0 = x, 1 = y);
    /// `None` means not even values are shared.
    pub fn continuity(self, axis: usize) -> Option<usize> {
        match (self, axis) {
            (FceKind::Nc, _) => None,
            (FceKind::C1, _) | (FceKind::MixedC1x, 0) | (FceKind::MixedC1y, 1) => Some(1),
            _ => Some(0),
        }
    }

    /// Blending along `axis`, or `None` for NC elements.
    pub fn blend(self, axis: usize) -> Option<Blend> {
        self.continuity(axis).map(|c| if c == 1 { Blend::Hermite } else { Blend::Linear })
    }

    pub fn name(self) -> &'static str {
        match self {
            FceKind::C1 => "c1",
            FceKind::C0 => "c0",
            FceKind::MixedC1x => "mixed-x",
            FceKind::MixedC1y => "mixed-y",
            FceKind::Nc => "nc",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s.to_ascii_lowercase().as_str() {
            "c1" => FceKind::C1,
            "c0" => FceKind::C0,
            "mixed-x" | "mixedc1x" => FceKind::MixedC1x,
            "mixed-y" | "mixedc1y" => FceKind::MixedC1y,
            "nc" => FceKind::Nc,
            _ => return None,
        })
    }
}

/// Which basis family represents the free functions; the exact member set
/// follows from the field kind and direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisFamily {
    Legendre,
    Sinusoid,
}

impl BasisFamily {
    /// Member family for a direction carrying `blend` (`None` for NC elements).
    pub fn kind_for(self, blend: Option<Blend>) -> BasisKind {
        match (self, blend) {
            (BasisFamily::Sinusoid, _) => BasisKind::SinusoidQuasiRandom,
            (BasisFamily::Legendre, None) => BasisKind::LegendreFull,
            (BasisFamily::Legendre, Some(Blend::Linear)) => BasisKind::LegendreC0,
            (BasisFamily::Legendre, Some(Blend::Hermite)) => BasisKind::LegendreC1,
        }
    }
}

/// A piecewise field on a tensor mesh, affine in its free unknowns.
///
/// Points are `[x, y]`; 1D fields ignore `y`.
pub trait Field: Send + Sync {
    fn dim(&self) -> usize;
    fn kind(&self) -> FceKind;
    fn layout(&self) -> &ThetaLayout;
    fn n_elements(&self) -> usize;
    /// `[x0, x1, y0, y1]` of element `e`; 1D fields report `y0 = y1 = 0`.
    fn element_bounds(&self, e: usize) -> [f64; 4];
    /// Element containing the point; shared boundaries resolve to the lower index.
    fn locate(&self, pt: [f64; 2]) -> Result<usize>;
    /// All derivative components at `pt`, evaluated with element `e`'s representation.
    fn form(&self, e: usize, pt: [f64; 2]) -> Form;

    fn n_free(&self) -> usize {
        self.layout().n_free()
    }

    /// Largest element edge length.
    fn max_element_size(&self) -> f64 {
        (0..self.n_elements())
            .map(|e| {
                let b = self.element_bounds(e);
                (b[1] - b[0]).max(b[3] - b[2])
            })
            .fold(0.0, f64::max)
    }

    /// Derivative `(kx, ky)` at a point, located with the tie-break rule.
    fn functional(&self, pt: [f64; 2], kx: usize, ky: usize) -> Result<AffineFunctional> {
        let e = self.locate(pt)?;
        Ok(self.form(e, pt).component(kx, ky))
    }
}

/// Element index containing `x` in sorted breakpoints; ties go to the left element.
pub(crate) fn locate_sorted(bps: &[f64], x: f64) -> Option<usize> {
    let n = bps.len() - 1;
    let (lo, hi) = (bps[0], bps[n]);
    let tol = 1e-12 * (hi - lo);
    if !(x >= lo - tol && x <= hi + tol) {
        return None;
    }
    // Smallest i with x <= X_{i+1}.
    let i = bps[1..].partition_point(|&b| b < x);
    Some(i.min(n - 1))
}
