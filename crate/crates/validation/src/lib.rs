//! Acceptance checks comparing the solver against reference error levels.
//!
//! The checks live in the `acceptance` test target, which prints one
//! PASS/FAIL line per criterion:
//!
//! ```text
//! cargo test --release -p fce-validation --test acceptance
//! ```
