//! # lame-navier
//!
//! Numerical calculus for the plane Lamé-Navier system written in complex form,
//!
//! ```text
//! L[f] = α ∂z̄∂z̄ f̄ + β ∂z̄∂z f = g,    α = (μ+λ)/2,  β = (3μ+λ)/2,
//! ```
//!
//! where `f = u + iv` is the displacement and `g = -(X + iY)/2` the body force.
//!
//! The crate is organised bottom-up:
//!
//! - [`lame`]: elastic parameters, Wirtinger calculus on closed-form fields,
//!   the operator `L` (exact and finite-difference) and universal displacements.
//! - [`geometry`]: closed polylines (circles, Koch snowflakes, user input),
//!   point inclusion, box counting, d-summability and Whitney decompositions.
//! - [`quadrature`]: contour and area integrals for the kernels
//!   `1/(ξ-z)`, `1/conj(ξ-z)`, `(ξ-z)/conj(ξ-z)` and `ln|ξ-z|²`.
//! - [`whitney`]: Whitney jets `{f0, f1, f2}` on a curve, their compatibility
//!   check and a compactly supported `C^{1,ν}` extension.
//! - [`operators`]: the Teodorescu-type right inverse of `L`, the
//!   Borel-Pompeiu and Cauchy representations, the Lamé-Cauchy transform,
//!   one-sided boundary limits and the jump-problem solver.
//! - [`io`]: CSV readers/writers for polylines, decompositions, jets and fields.

pub mod geometry;
pub mod io;
pub mod lame;
pub mod operators;
pub mod quadrature;
pub mod whitney;

mod autodiff;
mod sum;

pub use num_complex::Complex64;

pub use geometry::{Curve, CurveKind, DomainDecomposition, Location, Square};
pub use lame::{ClosedFormField, LameParams};
pub use operators::{
    solve_jump_problem, teodorescu, teodorescu_dz, JumpMethod, JumpProblemSolution, LameCauchyTransform, SolveOptions,
};
pub use quadrature::{AreaCells, Domain};
pub use whitney::{check_jet, extend, ExtendOptions, Extension, JetReport, WhitneyJet};

/// Crate-level error, wrapping the per-module error types.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Lame(#[from] lame::LameError),
    #[error(transparent)]
    Geometry(#[from] geometry::GeometryError),
    #[error(transparent)]
    Quadrature(#[from] quadrature::QuadratureError),
    #[error(transparent)]
    Whitney(#[from] whitney::WhitneyError),
    #[error(transparent)]
    Operator(#[from] operators::OperatorError),
    #[error(transparent)]
    Io(#[from] io::IoError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
