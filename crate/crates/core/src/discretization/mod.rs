//! Radial grids, the conservative discrete p-Laplacian, quadrature on the
//! grid, norms, residuals and the Euler energy.

mod energy;
mod field;
mod grid;
mod norms;
mod operator;
mod residual;
mod tridiag;

pub use energy::energy_functional;
pub(crate) use energy::energy_values;
pub use field::{fmt17, FieldKind, GridField};
pub use grid::{build_grid, sphere_area, RadialDomain, RadialGrid};
pub use norms::{compute_norms, integrate, integrate_product, seminorm, LkNorm, NormReport};
pub use operator::{apply_p_laplacian, apply_p_laplacian_with, PLaplacian, DEFAULT_EPS};
pub use residual::{residual, residual_as, Equation, ResidualReport};
pub use tridiag::Tridiagonal;
