//! Second solutions through a discrete mountain pass.
//!
//! The path is a ray from the minimal solution through a state of lower
//! energy, sampled at `P` nodes. Its highest point is pushed down the
//! component of the Sobolev gradient of `J_λ` (the gradient in the `H¹₀`
//! inner product of the `p = 2` stiffness matrix) normal to the path, and the
//! path is redrawn through the moved point. Once that normal component
//! vanishes, Newton's method polishes the summit into a critical point.

use crate::discretization::{energy_values, residual, FieldKind, GridField, PLaplacian, Tridiagonal};
use crate::error::{Error, Result};
use crate::nonlinearity::sampled_superlinear;

use super::inner::inner_solve_values;
use super::iteration::{finish, Iterate};
use super::outcome::{SolveOutcome, SolveStatus};
use super::spec::ProblemSpec;

pub fn mountain_pass_solve(spec: &ProblemSpec, v_low: &GridField) -> Result<SolveOutcome> {
    spec.validate()?;
    if v_low.grid().as_ref() != spec.grid.as_ref() {
        return Err(Error::validation("v_low lives on another grid"));
    }
    if !spec.pair.lambda_endpoint().is_finite() && !sampled_superlinear(&spec.pair)? {
        return Err(Error::precondition("g is not superlinear; no mountain-pass geometry"));
    }
    if spec.pair.lambda_endpoint().is_finite() {
        return Err(Error::precondition("mountain pass needs Lambda = inf"));
    }
    if let Some(star) = spec.options.lambda_star_estimate {
        if spec.lambda >= star {
            let mut out = refuse(spec, v_low, format!("lambda = {} is not below the lambda* estimate {star}", spec.lambda))?;
            out.experimental = spec.p != 2.0;
            return Ok(out);
        }
    }
    let low_check = residual(&v_low.clone().with_kind(FieldKind::V), spec)?;
    if !(low_check.sup <= 1e-6 * (1.0 + spec.lambda)) {
        return refuse(spec, v_low, format!("v_low is not a converged solution (residual {:e})", low_check.sup));
    }
    let mp = MountainPass::new(spec)?;
    let mut out = match mp.run(v_low.values())? {
        Ok((values, iterations)) => {
            let it = Iterate {
                status: SolveStatus::Converged,
                values,
                iterations,
                message: None,
            };
            finish(spec, it)?
        }
        Err(message) => refuse(spec, v_low, message)?,
    };
    if out.is_converged() {
        let distance = out.field.sup_distance(v_low);
        if distance < 10.0 * spec.options.fixed_point_tol {
            out.status = SolveStatus::Error;
            out.message = Some("the mountain pass collapsed onto v_low".into());
        }
    }
    out.experimental = spec.p != 2.0;
    Ok(out)
}

fn refuse(spec: &ProblemSpec, v_low: &GridField, message: String) -> Result<SolveOutcome> {
    let mut out = finish(
        spec,
        Iterate {
            status: SolveStatus::Error,
            values: v_low.values().to_vec(),
            iterations: 0,
            message: None,
        },
    )?;
    out.message = Some(message);
    Ok(out)
}

struct MountainPass<'a> {
    spec: &'a ProblemSpec,
    op: PLaplacian,
    weights: Vec<f64>,
    stiffness: Tridiagonal,
}

impl<'a> MountainPass<'a> {
    fn new(spec: &'a ProblemSpec) -> Result<Self> {
        let op = PLaplacian::new(spec.p, spec.options.eps)?;
        let zero = vec![0.0; spec.grid.len()];
        let stiffness = PLaplacian::new(2.0, 0.0)?.hessian(&spec.grid, &zero);
        Ok(MountainPass {
            spec,
            op,
            weights: spec.weight_values()?,
            stiffness,
        })
    }

    fn energy(&self, v: &[f64]) -> Result<f64> {
        let j = energy_values(v, self.spec, &self.weights)?;
        if j.is_finite() {
            Ok(j)
        } else {
            Err(Error::InfiniteValue("energy"))
        }
    }

    /// Nodal gradient of `J_λ / ω_N` on the active nodes.
    fn gradient(&self, v: &[f64]) -> Result<Vec<f64>> {
        let rhs = self.spec.rhs(&self.weights, v)?;
        Ok(self.op.imbalance(&self.spec.grid, v, &rhs, self.spec.dirac_mass))
    }

    fn sobolev(&self, g: &[f64]) -> Result<Vec<f64>> {
        self.stiffness.solve(g).ok_or_else(|| Error::solver("singular stiffness matrix"))
    }

    fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        let kb = self.stiffness.mul(b);
        a.iter().zip(&kb).map(|(x, y)| x * y).sum()
    }

    fn active(&self, v: &[f64]) -> Vec<f64> {
        v[self.spec.grid.active()].to_vec()
    }

    fn full(&self, x: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; self.spec.grid.len()];
        v[self.spec.grid.active()].copy_from_slice(x);
        v
    }

    /// `Ok(Err(_))` reports a refusal rather than a failure.
    fn run(&self, v_low: &[f64]) -> Result<std::result::Result<(Vec<f64>, usize), String>> {
        let o = &self.spec.options;
        let low = self.active(v_low);
        let j_low = self.energy(v_low)?;
        let high = match self.high_state(v_low, j_low)? {
            Some(h) => h,
            None => return Ok(Err("no mountain geometry detected".into())),
        };
        let diff: Vec<f64> = high.iter().zip(&low).map(|(b, a)| b - a).collect();
        let mut reach = self.inner(&diff, &diff).sqrt();
        let mut dir: Vec<f64> = diff.iter().map(|x| x / reach).collect();
        let mut summit = match self.summit(&low, &dir, &mut reach, j_low)? {
            Some(s) => s,
            None => return Ok(Err("the path has no energy barrier above v_low".into())),
        };
        let mut step = o.path_step;
        let mut iterations = 0;
        loop {
            let (t, j_top) = summit;
            let x: Vec<f64> = low.iter().zip(&dir).map(|(a, w)| a + t * w).collect();
            let g = self.sobolev(&self.gradient(&self.full(&x))?)?;
            let along = self.inner(&g, &dir);
            let normal: Vec<f64> = g.iter().zip(&dir).map(|(g, w)| g - along * w).collect();
            let size = self.inner(&normal, &normal).sqrt();
            if size <= o.path_tol {
                break;
            }
            if iterations >= o.path_max_iterations || step < 1e-12 {
                return Ok(Err(format!(
                    "path deformation stalled with projected gradient {size:e}"
                )));
            }
            iterations += 1;
            // move the summit down the normal gradient and redraw the path through it
            let moved: Vec<f64> = x.iter().zip(&normal).map(|(x, g)| x - step * g).collect();
            let d: Vec<f64> = moved.iter().zip(&low).map(|(m, a)| m - a).collect();
            let len = self.inner(&d, &d).sqrt();
            let trial_dir: Vec<f64> = d.iter().map(|x| x / len).collect();
            let mut trial_reach = reach.max(2.0 * len);
            // near convergence the summit energy changes below roundoff
            let noise = 1e-12 * (1.0 + j_top.abs());
            match self.summit(&low, &trial_dir, &mut trial_reach, j_low)? {
                Some(next) if next.1 < j_top - noise => {
                    dir = trial_dir;
                    reach = trial_reach;
                    summit = next;
                    step = (1.5 * step).min(1.0);
                }
                Some(next) if next.1 <= j_top + noise => {
                    dir = trial_dir;
                    reach = trial_reach;
                    summit = next;
                }
                _ => step *= 0.5,
            }
        }
        let top: Vec<f64> = low.iter().zip(&dir).map(|(a, w)| a + summit.0 * w).collect();
        match self.newton(self.full(&top))? {
            Some(v) => Ok(Ok((v, iterations))),
            None => Ok(Err("Newton polish from the path summit failed".into())),
        }
    }

    /// Highest point of `J` on the ray `low + t·dir`, sampled at the path
    /// nodes `t ∈ [0, reach]` and refined by bisection on the slope. `reach`
    /// grows until the far end lies below `J(v_low)`.
    fn summit(&self, low: &[f64], dir: &[f64], reach: &mut f64, j_low: f64) -> Result<Option<(f64, f64)>> {
        let at = |t: f64| -> Vec<f64> { self.full(&low.iter().zip(dir).map(|(a, w)| a + t * w).collect::<Vec<_>>()) };
        loop {
            match self.energy(&at(*reach)) {
                Ok(j) if j < j_low => break,
                Ok(_) if *reach < 1e6 => *reach *= 2.0,
                _ => return Ok(None),
            }
        }
        let count = self.spec.options.path_nodes;
        let ts: Vec<f64> = (0..count).map(|k| *reach * k as f64 / (count - 1) as f64).collect();
        let mut energies = Vec::with_capacity(count);
        for &t in &ts {
            energies.push(self.energy(&at(t))?);
        }
        let k = (1..count - 1)
            .max_by(|&a, &b| energies[a].total_cmp(&energies[b]))
            .unwrap_or(1);
        if !(energies[k] > j_low) {
            return Ok(None);
        }
        let slope = |t: f64| -> Result<f64> {
            let g = self.gradient(&at(t))?;
            Ok(g.iter().zip(dir).map(|(g, w)| g * w).sum())
        };
        let (mut lo, mut hi) = (ts[k - 1], ts[k + 1]);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if slope(mid)? > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        Ok(Some((t, self.energy(&at(t))?)))
    }

    /// `v_low + tφ` with `t` doubled until the energy falls below `J(v_low)`;
    /// `φ` solves `−Δ_p φ = 1`, scaled to unit sup norm.
    fn high_state(&self, v_low: &[f64], j_low: f64) -> Result<Option<Vec<f64>>> {
        let grid = &self.spec.grid;
        let ones: Vec<f64> = (0..grid.len()).map(|i| if grid.is_dirichlet(i) { 0.0 } else { 1.0 }).collect();
        let phi = inner_solve_values(grid, &ones, self.spec.p, 0.0, &self.spec.options)?;
        let sup = phi.iter().fold(0.0_f64, |m, x| m.max(*x));
        let mut t = 1.0;
        while t <= self.spec.options.blowup_cap {
            let v: Vec<f64> = v_low.iter().zip(&phi).map(|(a, b)| a + t * b / sup).collect();
            match self.energy(&v) {
                Ok(j) if j < j_low => return Ok(Some(self.active(&v))),
                Ok(_) => {}
                Err(_) => return Ok(None),
            }
            t *= 2.0;
        }
        Ok(None)
    }

    /// Newton on the full nonlinear system with residual-norm backtracking.
    fn newton(&self, mut v: Vec<f64>) -> Result<Option<Vec<f64>>> {
        let o = &self.spec.options;
        let grid = &self.spec.grid;
        let first = grid.active().start;
        let norm = |g: &[f64]| g.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut g = self.gradient(&v)?;
        for _ in 0..o.max_newton_iterations {
            let rhs = self.spec.rhs(&self.weights, &v)?;
            let scale = 1.0 + rhs.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            let floor = self.op.imbalance_floor(grid, &v, &rhs, self.spec.dirac_mass);
            let vols = &grid.volumes()[grid.active()];
            let done = g
                .iter()
                .zip(vols)
                .zip(&floor)
                .all(|((r, vol), f)| r.abs() <= (o.newton_tol * vol * scale).max(*f));
            if done {
                return Ok(Some(v));
            }
            let mut jac = self.op.hessian(grid, &v);
            for (k, i) in grid.active().enumerate() {
                if self.weights[i] != 0.0 {
                    jac.diag[k] -= grid.volumes()[i] * self.spec.lambda * self.weights[i]
                        * self.spec.source_density_derivative(v[i])?;
                }
            }
            let step = match jac.solve(&g) {
                Some(s) if s.iter().all(|x| x.is_finite()) => s,
                _ => return Ok(None),
            };
            let n0 = norm(&g);
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..=o.max_halvings {
                let mut w = v.clone();
                for (k, s) in step.iter().enumerate() {
                    w[first + k] -= t * s;
                }
                if let Ok(gw) = self.gradient(&w) {
                    if norm(&gw) < n0 {
                        v = w;
                        g = gw;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                return Ok(None);
            }
        }
        Ok(None)
    }
}
