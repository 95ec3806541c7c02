use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::grid::RadialGrid;

/// What a nodal array represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    /// Solution of the gradient-source equation.
    U,
    /// Solution of the zero-order-source equation.
    V,
    /// Anything else: source terms, eigen iterates, operator outputs.
    Generic,
}

/// Nodal values on a radial grid. `U` and `V` fields vanish on Dirichlet
/// nodes; generic fields are unconstrained there.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
    kind: FieldKind,
}

impl GridField {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>, kind: FieldKind) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::validation(format!(
                "field has {} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::validation(format!("field value at node {i} is not finite")));
        }
        for i in 0..grid.len() {
            if kind != FieldKind::Generic && grid.is_dirichlet(i) && values[i] != 0.0 {
                return Err(Error::validation(format!(
                    "Dirichlet node {i} carries {} instead of 0",
                    values[i]
                )));
            }
        }
        Ok(GridField { grid, values, kind })
    }

    /// Samples `f` at the nodes; Dirichlet nodes of `U`/`V` fields get 0.
    pub fn from_fn(grid: Arc<RadialGrid>, kind: FieldKind, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                if kind != FieldKind::Generic && grid.is_dirichlet(i) {
                    0.0
                } else {
                    f(r)
                }
            })
            .collect();
        GridField::new(grid, values, kind)
    }

    pub fn zeros(grid: Arc<RadialGrid>, kind: FieldKind) -> Self {
        let n = grid.len();
        GridField {
            grid,
            values: vec![0.0; n],
            kind,
        }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn with_kind(mut self, kind: FieldKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max_i |a_i − b_i|`.
    pub fn sup_distance(&self, other: &GridField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// CSV with header `r,value`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,value\n");
        for (r, v) in self.grid.nodes().iter().zip(&self.values) {
            let _ = writeln!(out, "{},{}", fmt17(*r), fmt17(*v));
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

/// Decimal with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::{build_grid, RadialDomain};

    #[test]
    fn dirichlet_nodes_must_vanish() {
        let g = Arc::new(build_grid(RadialDomain::interval(0.0, 1.0).unwrap(), 5).unwrap());
        assert!(GridField::new(g.clone(), vec![1.0, 0.0, 0.0, 0.0, 0.0], FieldKind::V).is_err());
        assert!(GridField::new(g.clone(), vec![0.0, f64::NAN, 0.0, 0.0, 0.0], FieldKind::V).is_err());
        let f = GridField::from_fn(g, FieldKind::U, |x| x * (1.0 - x)).unwrap();
        assert_eq!(f.values()[0], 0.0);
    }

    #[test]
    fn csv_has_seventeen_digits() {
        let g = Arc::new(build_grid(RadialDomain::interval(0.0, 1.0).unwrap(), 3).unwrap());
        let f = GridField::from_fn(g, FieldKind::V, |_| 1.0 / 3.0).unwrap();
        let csv = f.to_csv();
        let line = csv.lines().nth(2).unwrap();
        assert_eq!(line, "5.0000000000000000e-1,3.3333333333333331e-1");
        let parsed: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(parsed, 1.0 / 3.0);
    }
}
