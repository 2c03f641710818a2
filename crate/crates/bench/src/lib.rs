//! Benchmark problems for `fce-core`, with error norms, convergence sweeps,
//! CSV reports and the `fce` command-line driver.
//!
//! ```no_run
//! use fce_bench::runner::{run_case, Overrides};
//!
//! let rec = run_case("helmholtz1d", &Overrides { p: Some(6), ..Default::default() }).unwrap();
//! println!("{} {}", rec.linf, rec.l2);
//! ```

pub mod cases;
pub mod config;
pub mod metrics;
pub mod report;
pub mod runner;
pub mod sweep;

pub use cases::{catalog, find_case, ProblemCase, ScalingChoice, Settings};
pub use runner::{run_case, Overrides, RunRecord};
pub use sweep::{sweep, SweepAxis, SweepReport};

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/benchmarks.md")]
mod book_benchmarks {}
