//! Functionally connected elements: piecewise representations with built-in
//! C0/C1 inter-element continuity, solved by least-squares collocation.
//!
//! The crate is organized bottom-up:
//!
//! - [`basis`]: Legendre and sinusoidal families, GLL quadrature, affine maps.
//! - [`tfc`]: switching functions, constrained expressions and bivariate lifts.
//! - [`fce1d`], [`fce2d`]: element fields affine in their unknowns Θ.
//! - [`constraints`]: boundary conditions and relative constraints.
//! - [`solver`]: collocation, residual assembly, least squares, Gauss–Newton.

pub mod basis;
pub mod constraints;
pub mod error;
pub mod fce1d;
pub mod fce2d;
pub mod field;
pub mod functional;
pub mod layout;
pub mod solver;
pub mod tfc;

pub use error::{Error, Result};
pub use field::{BasisFamily, FceKind, Field};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/bases.md")]
    mod bases {}
    #[doc = include_str!("../../../book/src/switching.md")]
    mod switching {}
    #[doc = include_str!("../../../book/src/elements.md")]
    mod elements {}
    #[doc = include_str!("../../../book/src/constraints.md")]
    mod constraints {}
    #[doc = include_str!("../../../book/src/solving.md")]
    mod solving {}
}
