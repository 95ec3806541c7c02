use serde::Serialize;

use crate::discretization::GridField;
use crate::error::{Error, Result};
use crate::nonlinearity::ClosedForm;
use crate::solver::{iterate, ProblemSpec, SolveStatus};

use super::eigen::first_eigenvalue_on;
use super::eigen::EigenOptions;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProbeRun {
    pub status: SolveStatus,
    pub sup_norm: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniquenessReport {
    pub runs: Vec<ProbeRun>,
    /// Pairwise sup distances between limits; `NaN` when either run failed.
    pub distances: Vec<Vec<f64>>,
    /// All converged limits agree to `1e−8`.
    pub unique: bool,
    pub lambda1: Option<f64>,
}

/// Fixed-point iteration from each start; compares the limits.
///
/// Meant for `g(v) = v` below `λ₁(f)`, where the solution is unique; other
/// pairs need `force`.
pub fn uniqueness_probe(spec: &ProblemSpec, starts: &[GridField], force: bool) -> Result<UniquenessReport> {
    spec.validate()?;
    let linear = spec.pair.closed_form() == Some(ClosedForm::Linear) && spec.pair.u_weight().is_none();
    if !linear && !force {
        return Err(Error::precondition("the uniqueness probe targets g(v) = v; pass force for other pairs"));
    }
    let lambda1 = if linear {
        let options = EigenOptions {
            eps: spec.options.eps,
            ..EigenOptions::default()
        };
        let l1 = first_eigenvalue_on(&spec.weight, spec.p, spec.grid.clone(), &options)?.lambda1;
        if spec.lambda >= l1 && !force {
            return Err(Error::precondition(format!(
                "lambda = {} is not below lambda_1 = {l1}",
                spec.lambda
            )));
        }
        Some(l1)
    } else {
        None
    };
    let mut runs = Vec::with_capacity(starts.len());
    let mut limits = Vec::with_capacity(starts.len());
    for start in starts {
        if start.grid().as_ref() != spec.grid.as_ref() {
            return Err(Error::validation("start field lives on another grid"));
        }
        let it = iterate(spec, spec.dirac_mass, Some(start.values()), false)?;
        let sup = it.values.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        runs.push(ProbeRun {
            status: it.status,
            sup_norm: sup,
            iterations: it.iterations,
        });
        limits.push((it.status == SolveStatus::Converged).then_some(it.values));
    }
    let k = limits.len();
    let mut distances = vec![vec![0.0; k]; k];
    let mut unique = true;
    for i in 0..k {
        for j in 0..k {
            distances[i][j] = match (&limits[i], &limits[j]) {
                (Some(a), Some(b)) => a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs())),
                _ => f64::NAN,
            };
            if distances[i][j] > 1e-8 {
                unique = false;
            }
        }
    }
    Ok(UniquenessReport {
        runs,
        distances,
        unique,
        lambda1,
    })
}
