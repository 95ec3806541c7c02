use std::sync::Arc;

use serde::Serialize;

use crate::discretization::{build_grid, FieldKind, GridField, RadialDomain, RadialGrid, DEFAULT_EPS};
use crate::error::{Error, Result};
use crate::nonlinearity::ScalarFunction;
use crate::solver::{inner_solve_values, SolverOptions};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenOptions {
    pub eps: f64,
    /// Stop when successive quotients differ by at most this, relatively.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            eps: DEFAULT_EPS,
            tol: 1e-10,
            max_iterations: 10_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EigenResult {
    pub lambda1: f64,
    /// Positive inside, with `∫ f |w|^p = 1`.
    pub eigenfield: GridField,
    pub iterations: usize,
    /// Rayleigh quotient after each step.
    pub history: Vec<f64>,
}

/// `Σ_i w_i h |D_i w|^p / Σ_i V_i f_i |w_i|^p`, the discrete quotient whose
/// critical points solve `−Δ_p^h w = λ f |w|^{p−2} w`.
pub fn rayleigh_quotient(values: &[f64], grid: &RadialGrid, p: f64, f: &[f64]) -> f64 {
    let h = grid.spacing();
    let top: f64 = grid
        .face_weights()
        .iter()
        .enumerate()
        .map(|(i, w)| w * h * ((values[i + 1] - values[i]) / h).abs().powf(p))
        .sum();
    let bottom: f64 = grid
        .active()
        .map(|i| grid.volumes()[i] * f[i] * values[i].abs().powf(p))
        .sum();
    top / bottom
}

/// First eigenvalue `λ₁(f)` of `−Δ_p` with weight `f(r)` by inverse power
/// iteration.
pub fn first_eigenvalue(f: &ScalarFunction, p: f64, domain: RadialDomain, n: usize) -> Result<EigenResult> {
    let grid = Arc::new(build_grid(domain, n)?);
    first_eigenvalue_on(f, p, grid, &EigenOptions::default())
}

pub fn first_eigenvalue_on(f: &ScalarFunction, p: f64, grid: Arc<RadialGrid>, options: &EigenOptions) -> Result<EigenResult> {
    let fvals = grid.nodes().iter().map(|&r| f.eval(r)).collect::<Result<Vec<_>>>()?;
    if let Some(i) = fvals.iter().position(|v| !(*v >= 0.0) || !v.is_finite()) {
        return Err(Error::validation(format!("weight is {} at node {i}", fvals[i])));
    }
    if grid.active().all(|i| fvals[i] == 0.0) {
        return Err(Error::precondition("weight vanishes identically; the infimum is +inf"));
    }
    let solver = SolverOptions {
        eps: options.eps,
        ..SolverOptions::default()
    };
    let normalize = |w: &mut Vec<f64>| {
        let mass: f64 = grid
            .active()
            .map(|i| grid.volumes()[i] * fvals[i] * w[i].abs().powf(p))
            .sum::<f64>()
            * grid.angular_factor();
        let s = mass.powf(-1.0 / p);
        w.iter_mut().for_each(|x| *x *= s);
    };
    let mut rhs: Vec<f64> = fvals.clone();
    let mut history = Vec::new();
    for it in 1..=options.max_iterations {
        let mut w = inner_solve_values(&grid, &rhs, p, 0.0, &solver)?;
        normalize(&mut w);
        let q = rayleigh_quotient(&w, &grid, p, &fvals);
        let done = history
            .last()
            .map(|&prev: &f64| (prev - q).abs() <= options.tol * q)
            .unwrap_or(false);
        history.push(q);
        if done {
            let eigenfield = GridField::new(grid.clone(), w, FieldKind::Generic)?;
            return Ok(EigenResult {
                lambda1: q,
                eigenfield,
                iterations: it,
                history,
            });
        }
        for i in grid.active() {
            rhs[i] = fvals[i] * w[i].abs().powf(p - 1.0);
        }
    }
    Err(Error::solver(format!(
        "inverse power iteration did not settle within {} steps",
        options.max_iterations
    )))
}
