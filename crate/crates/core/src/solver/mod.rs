//! Collocation, residual assembly, linear least squares and Gauss–Newton.

pub mod assemble;
pub mod collocation;
pub mod gauss_newton;
pub mod lsq;

pub use assemble::{
    assemble, solve_linear, Coef, LinearRelation, LinearSolution, Nonlinearity, ProblemSpec, ResidualRow,
    ResidualSystem, RowKind, ScalingSpec,
};
pub use collocation::{
    make_collocation_1d, make_collocation_2d, reference_nodes, BoundaryPoint, CollocationKind, CollocationSet, RowWeights,
    InterfacePoint,
};
pub use gauss_newton::{solve_gauss_newton, GaussNewtonOptions, GaussNewtonReport, LeastSquaresProblem, StopReason};
pub use lsq::{cond_upper_triangular, lstsq_cgls, lstsq_dense, LsqMethod, LsqOptions, LsqSolution};
