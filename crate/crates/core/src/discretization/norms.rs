use serde::Serialize;

use crate::error::{Error, Result};
use crate::nonlinearity::ScalarFunction;

use super::field::GridField;
use super::grid::RadialGrid;

/// `ω_N ∫ w r^{N−1} dr` for nodal values `w`, exact when `w` is piecewise
/// linear between nodes.
pub fn integrate(values: &[f64], grid: &RadialGrid) -> Result<f64> {
    if values.len() != grid.len() {
        return Err(Error::validation(format!(
            "integrand has {} values for a grid of {} nodes",
            values.len(),
            grid.len()
        )));
    }
    let sum: f64 = values.iter().zip(grid.p1_weights()).map(|(v, w)| v * w).sum();
    Ok(grid.angular_factor() * sum)
}

/// Nodewise product, integrated.
pub fn integrate_product(a: &GridField, b: &GridField) -> Result<f64> {
    if a.grid() != b.grid() {
        return Err(Error::validation("fields live on different grids"));
    }
    let prod: Vec<f64> = a.values().iter().zip(b.values()).map(|(x, y)| x * y).collect();
    integrate(&prod, a.grid())
}

/// `(ω_N Σ_i r_{i+1/2}^{N−1} h |D_i U|^p)^{1/p}` with `D_i` the cell slopes.
pub fn seminorm(values: &[f64], grid: &RadialGrid, p: f64) -> f64 {
    let h = grid.spacing();
    let sum: f64 = grid
        .face_weights()
        .iter()
        .enumerate()
        .map(|(i, w)| w * h * ((values[i + 1] - values[i]) / h).abs().powf(p))
        .sum();
    (grid.angular_factor() * sum).powf(1.0 / p)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LkNorm {
    pub k: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormReport {
    pub sup: f64,
    pub lk: Vec<LkNorm>,
    /// `(∫|∇U|^p)^{1/p}`.
    pub w1p_seminorm: f64,
    /// `∫ f |U|^p`.
    pub weighted: f64,
    /// Measure of the domain, for normalizing the `L^k` norms.
    pub measure: f64,
}

impl NormReport {
    pub fn lk(&self, k: f64) -> Option<f64> {
        self.lk.iter().find(|n| n.k == k).map(|n| n.value)
    }
}

/// Sup norm, `L^k` norms for each `k` in `k_list` (`k = ∞` gives the sup),
/// the `W^{1,p}` seminorm and `∫ f|U|^p` with `f` a function of the radius.
pub fn compute_norms(field: &GridField, p: f64, k_list: &[f64], f: &ScalarFunction) -> Result<NormReport> {
    if !(p > 1.0) {
        return Err(Error::validation(format!("p must exceed 1, got {p}")));
    }
    let grid = field.grid();
    let values = field.values();
    let mut lk = Vec::with_capacity(k_list.len());
    for &k in k_list {
        if !(k >= 1.0) {
            return Err(Error::validation(format!("L^k norm needs k >= 1, got {k}")));
        }
        let value = if k.is_infinite() {
            field.sup_norm()
        } else {
            let pow: Vec<f64> = values.iter().map(|v| v.abs().powf(k)).collect();
            integrate(&pow, grid)?.powf(1.0 / k)
        };
        lk.push(LkNorm { k, value });
    }
    let mut weighted = Vec::with_capacity(values.len());
    for (v, &r) in values.iter().zip(grid.nodes()) {
        weighted.push(f.eval(r)? * v.abs().powf(p));
    }
    Ok(NormReport {
        sup: field.sup_norm(),
        lk,
        w1p_seminorm: seminorm(values, grid, p),
        weighted: integrate(&weighted, grid)?,
        measure: integrate(&vec![1.0; values.len()], grid)?,
    })
}
