use crate::discretization::{compute_norms, energy_functional, residual, FieldKind, GridField};
use crate::error::{Error, Result};
use crate::nonlinearity::{singular_mass_transfer, TransferCase};

use super::inner::inner_solve_values;
use super::outcome::{SolveOutcome, SolveStatus};
use super::spec::ProblemSpec;
use super::transform::{transform_solution, Direction};

/// Monotone iteration `v^{n+1} = (−Δ_p^h)^{-1}(λ f (1 + g(v^n))^{p−1})` from
/// `v^0 = 0`. Its limit is the minimal nonnegative discrete solution.
pub fn minimal_solution(spec: &ProblemSpec) -> Result<SolveOutcome> {
    spec.validate()?;
    let v = iterate(spec, 0.0, None, true)?;
    finish(spec, v)
}

/// As [`minimal_solution`] but started from `start`, which must lie below
/// the minimal solution for the limit to be minimal.
pub fn minimal_solution_from(spec: &ProblemSpec, start: &GridField) -> Result<SolveOutcome> {
    spec.validate()?;
    if start.grid().as_ref() != spec.grid.as_ref() {
        return Err(Error::validation("start field lives on another grid"));
    }
    let v = iterate(spec, 0.0, Some(start.values()), true)?;
    finish(spec, v)
}

/// The monotone iteration with the Dirac flux `c` pinned at the center.
/// The outcome carries `u_s = H(v_s)` and the mass-transfer rule.
pub fn dirac_solve(spec: &ProblemSpec) -> Result<SolveOutcome> {
    spec.validate()?;
    let c = spec.dirac_mass;
    let rule = singular_mass_transfer(&spec.pair, c)?;
    if rule.case == TransferCase::ForbidVSide {
        return Err(Error::Forbidden(format!(
            "Lambda = {} is finite, so a Dirac mass on the v-equation admits no solution",
            spec.pair.lambda_endpoint().to_f64()
        )));
    }
    let v = iterate(spec, c, None, true)?;
    let mut out = finish(spec, v)?;
    out.transfer = Some(rule);
    if out.is_converged() {
        out.companion = Some(transform_solution(&out.field, &spec.pair, Direction::VToU)?);
    }
    Ok(out)
}

pub(crate) struct Iterate {
    pub status: SolveStatus,
    pub values: Vec<f64>,
    pub iterations: usize,
    pub message: Option<String>,
}

/// Fixed-point iteration; with `monotone` set, a decrease is reported as an
/// error, and a cap hit counts as divergence.
pub(crate) fn iterate(spec: &ProblemSpec, c: f64, start: Option<&[f64]>, monotone: bool) -> Result<Iterate> {
    let o = &spec.options;
    let grid = &spec.grid;
    let weights = spec.weight_values()?;
    let lambda_end = spec.pair.lambda_endpoint();
    let mut v = start.map(<[f64]>::to_vec).unwrap_or_else(|| vec![0.0; grid.len()]);
    let stop = |status, values, iterations, message: &str| Iterate {
        status,
        values,
        iterations,
        message: Some(message.to_string()),
    };
    for n in 1..=o.max_iterations {
        let rhs = match spec.rhs(&weights, &v) {
            Ok(r) if r.iter().all(|x| x.is_finite()) => r,
            _ => return Ok(stop(SolveStatus::Diverged, v, n - 1, "right side overflowed")),
        };
        let next = inner_solve_values(grid, &rhs, spec.p, c, o)?;
        let scale = 1.0 + v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if monotone && next.iter().zip(&v).any(|(a, b)| *a < b - 1e-8 * scale) {
            return Ok(stop(SolveStatus::Error, next, n, "iterates failed to increase monotonically"));
        }
        let delta = next.iter().zip(&v).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        let sup = next.iter().fold(0.0_f64, |m, x| m.max(*x));
        v = next;
        if !(sup <= o.blowup_cap) {
            return Ok(stop(SolveStatus::Diverged, v, n, "sup norm exceeded the blow-up cap"));
        }
        if lambda_end.is_finite() && sup >= lambda_end.to_f64() - o.fixed_point_tol {
            return Ok(stop(SolveStatus::Diverged, v, n, "iterate reached the endpoint Lambda"));
        }
        if delta <= o.fixed_point_tol {
            return Ok(Iterate {
                status: SolveStatus::Converged,
                values: v,
                iterations: n,
                message: None,
            });
        }
    }
    Ok(if monotone {
        stop(SolveStatus::Diverged, v, o.max_iterations, "iteration cap reached with monotone growth")
    } else {
        stop(SolveStatus::MaxIter, v, o.max_iterations, "iteration cap reached")
    })
}

pub(crate) fn finish(spec: &ProblemSpec, it: Iterate) -> Result<SolveOutcome> {
    let mut values = it.values;
    let grid = &spec.grid;
    let end = spec.pair.lambda_endpoint();
    if end.is_finite() {
        // keep a diverged dump inside the field domain
        let cap = end.to_f64() * (1.0 - f64::EPSILON);
        values.iter_mut().for_each(|x| *x = x.min(cap));
    }
    values.iter_mut().for_each(|x| {
        if !x.is_finite() {
            *x = spec.options.blowup_cap;
        }
    });
    for i in 0..grid.len() {
        if grid.is_dirichlet(i) {
            values[i] = 0.0;
        }
    }
    let field = GridField::new(grid.clone(), values, FieldKind::V)?;
    let mut out = SolveOutcome {
        status: it.status,
        field,
        iterations: it.iterations,
        residual: None,
        norms: None,
        companion: None,
        transfer: None,
        energy: None,
        experimental: false,
        message: it.message,
        lambda: spec.lambda,
        p: spec.p,
    };
    out.norms = Some(compute_norms(&out.field, spec.p, &[1.0, 2.0], &spec.weight)?);
    if out.status == SolveStatus::Converged {
        let res = residual(&out.field, spec)?;
        let weights = spec.weight_values()?;
        let rhs = spec.rhs(&weights, out.field.values())?;
        let scale = 1.0 + rhs.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if res.sup > spec.options.residual_tol * scale {
            out.status = SolveStatus::Error;
            out.message = Some(format!("residual {:e} above tolerance after convergence", res.sup));
        }
        out.residual = Some(res);
        out.energy = energy_functional(&out.field, spec).ok();
    }
    Ok(out)
}
