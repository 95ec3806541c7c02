use serde::Serialize;

use crate::error::{Error, Result};
use crate::nonlinearity::singular_mass_transfer;
use crate::solver::ProblemSpec;

use super::field::{FieldKind, GridField};
use super::operator::PLaplacian;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Equation {
    /// `−Δ_p u = β(u)|∇u|^p + λ f w(u)`.
    U,
    /// `−Δ_p v = λ f w(H(v)) (1 + g(v))^{p−1}`.
    V,
}

/// Pointwise residual `−Δ_p^h field − right side` on the unknown nodes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub equation: Equation,
    /// Node index of each entry of `nodal`.
    pub first_node: usize,
    pub nodal: Vec<f64>,
    /// Sup over the admissible nodes.
    pub sup: f64,
    /// `Σ V_i |r_i|` over the admissible nodes, times `ω_N`.
    pub l1: f64,
    /// Innermost nodes left out of `sup` and `l1` in singular runs.
    pub excluded: usize,
    pub excluded_sup: f64,
}

/// Residual of `field` in the equation matching its tag. In singular runs
/// (`c > 0`) the `K` innermost nodes are reported separately, with `K` from
/// the solver options.
pub fn residual(field: &GridField, spec: &ProblemSpec) -> Result<ResidualReport> {
    let equation = match field.kind() {
        FieldKind::U => Equation::U,
        FieldKind::V => Equation::V,
        FieldKind::Generic => {
            return Err(Error::validation("a residual needs a u-field or a v-field"));
        }
    };
    residual_as(field, spec, equation)
}

/// As [`residual`], failing when the field tag does not match `equation`.
pub fn residual_as(field: &GridField, spec: &ProblemSpec, equation: Equation) -> Result<ResidualReport> {
    let expected = match equation {
        Equation::U => FieldKind::U,
        Equation::V => FieldKind::V,
    };
    if field.kind() != expected {
        return Err(Error::validation(format!(
            "{:?}-equation residual requested for a {:?}-field",
            equation,
            field.kind()
        )));
    }
    if field.grid().as_ref() != spec.grid.as_ref() {
        return Err(Error::validation("field and problem use different grids"));
    }
    let grid = &spec.grid;
    let op = PLaplacian::new(spec.p, spec.options.eps)?;
    let weights = spec.weight_values()?;
    let x = field.values();
    let pair = &spec.pair;
    let mass = match equation {
        Equation::V => spec.dirac_mass,
        Equation::U if spec.dirac_mass > 0.0 => {
            singular_mass_transfer(pair, spec.dirac_mass)?.u_mass.unwrap_or(0.0)
        }
        Equation::U => 0.0,
    };
    let lhs = op.apply_values(grid, x, mass);
    let h = grid.spacing();
    let active = grid.active();
    let mut nodal = Vec::with_capacity(active.len());
    for i in active.clone() {
        let rhs = match equation {
            Equation::V => spec.lambda * weights[i] * spec.source_density(x[i])?,
            Equation::U => {
                let grad = if i == 0 { 0.0 } else { (x[i + 1] - x[i - 1]) / (2.0 * h) };
                let w = match pair.u_weight() {
                    Some(w) => w.eval(x[i].max(0.0))?,
                    None => 1.0,
                };
                pair.beta(x[i].max(0.0))? * grad.abs().powf(spec.p) + spec.lambda * weights[i] * w
            }
        };
        nodal.push(lhs[i] - rhs);
    }
    let excluded = if spec.dirac_mass > 0.0 {
        spec.options.residual_exclusion.min(nodal.len())
    } else {
        0
    };
    let vols = &grid.volumes()[active.clone()];
    let sup = nodal[excluded..].iter().fold(0.0_f64, |m, r| m.max(r.abs()));
    let l1 = grid.angular_factor()
        * nodal[excluded..]
            .iter()
            .zip(&vols[excluded..])
            .map(|(r, v)| r.abs() * v)
            .sum::<f64>();
    let excluded_sup = nodal[..excluded].iter().fold(0.0_f64, |m, r| m.max(r.abs()));
    Ok(ResidualReport {
        equation,
        first_node: active.start,
        nodal,
        sup,
        l1,
        excluded,
        excluded_sup,
    })
}
