//! Numerical companion for the pair of Dirichlet problems
//!
//! ```text
//! -Δ_p u = β(u)|∇u|^p + λ f       (gradient source)
//! -Δ_p v = λ f (1 + g(v))^{p-1}   (zero-order source)
//! ```
//!
//! linked by the change of unknown `v = Ψ(u)`, `u = H(v)`, on intervals and
//! radial balls.
//!
//! * [`nonlinearity`]: the `β ↔ g` dictionary, `Ψ`, `H`, endpoint
//!   classification, Dirac-mass transfer.
//! * [`discretization`]: radial grids, the conservative discrete
//!   p-Laplacian, quadrature, norms, and the energy `J_λ`.
//! * [`solver`]: inner p-Laplacian solves, minimal solutions by monotone
//!   iteration, Dirac-at-origin solves, mountain-pass second solutions.
//! * [`analysis`]: `λ₁(f)`, the critical parameter `λ*`, the extremal
//!   branch, regularity exponents, and the uniqueness probe.

pub mod analysis;
pub mod discretization;
pub mod error;
pub mod extended;
pub mod nonlinearity;
pub mod quadrature;
pub mod solver;

pub use error::{Error, Result};
pub use extended::ExtReal;
