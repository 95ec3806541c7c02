use crate::error::{Error, Result};
use crate::solver::ProblemSpec;

use super::field::{FieldKind, GridField};
use super::operator::PLaplacian;

/// `J_λ(v) = ∫ Φ(|∇v|) − λ ∫ f Ĝ(v) − c v(0)`, where `Φ` is the regularized
/// `|s|^p/p` and `Ĝ` the primitive of the zero-order source.
pub fn energy_functional(field: &GridField, spec: &ProblemSpec) -> Result<f64> {
    if field.kind() == FieldKind::U {
        return Err(Error::validation("the energy is defined on v-fields"));
    }
    if field.grid().as_ref() != spec.grid.as_ref() {
        return Err(Error::validation("field and problem use different grids"));
    }
    let weights = spec.weight_values()?;
    energy_values(field.values(), spec, &weights)
}

pub(crate) fn energy_values(v: &[f64], spec: &ProblemSpec, weights: &[f64]) -> Result<f64> {
    let grid = &spec.grid;
    let op = PLaplacian::new(spec.p, spec.options.eps)?;
    let mut source = 0.0;
    if spec.lambda != 0.0 {
        for i in grid.active() {
            if weights[i] != 0.0 {
                source += grid.volumes()[i] * weights[i] * spec.source_primitive(v[i])?;
            }
        }
    }
    let omega = grid.angular_factor();
    let dirac = if grid.domain().is_ball() { spec.dirac_mass * v[0] } else { 0.0 };
    Ok(omega * (op.stored_energy(grid, v) - spec.lambda * source) - dirac)
}
