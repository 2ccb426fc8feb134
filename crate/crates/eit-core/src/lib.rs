//! Numerical core for planar inverse-conductivity reconstruction and for the
//! algebraic-curve stationary-phase toolbox that extends it.
//!
//! The crate is organised around the reconstruction chain
//!
//! ```text
//! conductivity -> Dirichlet-to-Neumann matrix -> boundary CGO traces
//!              -> scattering transform b(lambda) -> dbar equation in lambda
//!              -> interior CGO fields -> potential q -> conductivity
//! ```
//!
//! plus a `curve` module working on affine algebraic curves in C^2 at the
//! level of explicit kernels: critical points, stationary-phase models,
//! Vandermonde recovery of the potential at critical points, determinant
//! asymptotics and exponential-polynomial lower bounds.
//!
//! Everything here is `no_std + alloc` compatible; IO, file formats and the
//! command-line pipeline live in the companion `eit-cli` crate.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod cgo;
pub mod curve;
pub mod dtn;
pub mod exppoly;
pub mod faddeev;
pub mod linalg;
pub mod mesh;
pub mod num;
pub mod phantom;
pub mod poly;
pub mod recon;
pub mod scattering;
pub mod special;

pub use num::{c64, C64};

/// Errors shared across the numerical modules.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A size or parameter precondition was violated.
    InvalidArgument(&'static str),
    /// Input field contained NaN or infinity.
    NonFinite(&'static str),
    /// A linear solve failed; carries the residual or condition diagnostic.
    SolveFailure { what: &'static str, diagnostic: f64 },
    /// The spectral parameter was flagged numerically exceptional.
    ExceptionalLambda { lambda: C64, condition: f64 },
    /// Requested tolerance is unreachable at the configured truncation.
    ToleranceUnreachable { what: &'static str, achieved: f64 },
    /// Oscillation too fast for the configured grid.
    OscillationBudget { what: &'static str, tau: f64 },
    /// Too little usable data (masking removed too much).
    InsufficientCoverage { usable: usize, needed: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
