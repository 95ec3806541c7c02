use crate::discretization::{FieldKind, GridField, PLaplacian, RadialGrid, Tridiagonal};
use crate::error::{Error, Result};

use super::spec::SolverOptions;

/// Solves `−Δ_p^h U = F` with `U = 0` on the Dirichlet nodes and, for
/// `c > 0`, the flux `−c/ω_N` pinned at the ball center.
pub fn inner_solve(rhs: &GridField, p: f64, c: f64) -> Result<GridField> {
    let options = SolverOptions::default();
    let u = inner_solve_values(rhs.grid(), rhs.values(), p, c, &options)?;
    GridField::new(rhs.grid().clone(), u, FieldKind::Generic)
}

/// Damped Newton on the strictly convex energy
/// `E(U) = Σ_i w_i h Φ(D_i U) − Σ_i V_i F_i U_i − (c/ω_N) U_0`,
/// started from the flux-integrated solution.
pub(crate) fn inner_solve_values(
    grid: &RadialGrid,
    rhs: &[f64],
    p: f64,
    c: f64,
    options: &SolverOptions,
) -> Result<Vec<f64>> {
    if rhs.len() != grid.len() {
        return Err(Error::validation("right side and grid lengths differ"));
    }
    if let Some(i) = grid.active().find(|&i| !(rhs[i] >= 0.0) || !rhs[i].is_finite()) {
        return Err(Error::validation(format!("right side is {} at node {i}", rhs[i])));
    }
    if !(c >= 0.0) {
        return Err(Error::validation(format!("Dirac mass must be >= 0, got {c}")));
    }
    if c > 0.0 && !grid.domain().is_ball() {
        return Err(Error::precondition("a Dirac mass needs a ball domain"));
    }
    let op = PLaplacian::new(p, options.eps)?;
    let newton = Newton { op, grid, rhs, c, options };
    newton.run()
}

struct Newton<'a> {
    op: PLaplacian,
    grid: &'a RadialGrid,
    rhs: &'a [f64],
    c: f64,
    options: &'a SolverOptions,
}

impl Newton<'_> {
    /// `Σ_i V_i F_i U_i + (c/ω_N) U_0`.
    fn load(&self, u: &[f64]) -> f64 {
        let vols = self.grid.volumes();
        let load: f64 = self.grid.active().map(|i| vols[i] * self.rhs[i] * u[i]).sum();
        let dirac = if self.c > 0.0 { self.c / self.grid.angular_factor() * u[0] } else { 0.0 };
        load + dirac
    }

    fn energy(&self, u: &[f64]) -> f64 {
        self.op.stored_energy(self.grid, u) - self.load(u)
    }

    fn gradient(&self, u: &[f64]) -> Vec<f64> {
        self.op.imbalance(self.grid, u, self.rhs, self.c)
    }

    fn converged(&self, u: &[f64], g: &[f64]) -> bool {
        let scale = 1.0 + self.rhs.iter().fold(0.0_f64, |m, f| m.max(f.abs()));
        let floor = self.op.imbalance_floor(self.grid, u, self.rhs, self.c);
        let vols = &self.grid.volumes()[self.grid.active()];
        g.iter()
            .zip(vols)
            .zip(&floor)
            .all(|((r, v), f)| r.abs() <= (self.options.newton_tol * v * scale).max(*f))
    }

    /// The exact discrete solution, up to roundoff: in one radial variable
    /// the fluxes follow from the balance `F_{i+1/2} = F_{i−1/2} − V_i F_i`,
    /// starting from the center flux on a ball and from the flux that
    /// closes `U_{n−1} = U_0` on an interval.
    fn flux_integration(&self) -> Result<Vec<f64>> {
        let grid = self.grid;
        let n = grid.len();
        let h = grid.spacing();
        let vols = grid.volumes();
        let weights = grid.face_weights();
        // partial loads: flux through face i+1/2 is `a − load[i]`
        let mut load = vec![0.0; n - 1];
        let mut acc = 0.0;
        let first = grid.active().start;
        for i in 0..n - 1 {
            if i >= first {
                acc += vols[i] * self.rhs[i];
            }
            load[i] = acc;
        }
        let slopes = |a: f64| -> Vec<f64> {
            (0..n - 1)
                .map(|i| {
                    let flux = if i == 0 && first == 1 { a } else { a - load[i] };
                    self.op.phi_inverse(flux / weights[i])
                })
                .collect()
        };
        let a = if grid.domain().is_ball() {
            -self.c / grid.angular_factor()
        } else {
            // closure(a) = Σ D_i is increasing in a; its derivative is Σ 1/(w_i φ'(D_i))
            let closure = |a: f64| -> (f64, f64) {
                let d = slopes(a);
                let slope = d.iter().zip(weights).map(|(d, w)| 1.0 / (w * self.op.phi_prime(*d))).sum();
                (d.iter().sum(), slope)
            };
            let (mut lo, mut hi) = (0.0, load[n - 2]);
            if closure(lo).0 > 0.0 || closure(hi).0 < 0.0 {
                return Err(Error::solver("flux closure is not bracketed"));
            }
            let mut a = 0.5 * (lo + hi);
            for _ in 0..400 {
                let (value, slope) = closure(a);
                if value == 0.0 {
                    break;
                }
                if value < 0.0 {
                    lo = a;
                } else {
                    hi = a;
                }
                let newton = a - value / slope;
                let next = if newton > lo && newton < hi && slope.is_finite() {
                    newton
                } else {
                    0.5 * (lo + hi)
                };
                if (next - a).abs() <= 2.0 * f64::EPSILON * a.abs() || hi - lo <= 2.0 * f64::EPSILON * hi {
                    a = next;
                    break;
                }
                a = next;
            }
            a
        };
        let d = slopes(a);
        let mut u = vec![0.0; n];
        if grid.domain().is_ball() {
            for i in (0..n - 1).rev() {
                u[i] = u[i + 1] - h * d[i];
            }
        } else {
            // integrate from both ends and blend to keep the Dirichlet values exact
            let mut left = vec![0.0; n];
            let mut right = vec![0.0; n];
            for i in 0..n - 1 {
                left[i + 1] = left[i] + h * d[i];
            }
            for i in (0..n - 1).rev() {
                right[i] = right[i + 1] - h * d[i];
            }
            for i in 1..n - 1 {
                let t = i as f64 / (n - 1) as f64;
                u[i] = (1.0 - t) * left[i] + t * right[i];
            }
        }
        if u.iter().all(|x| x.is_finite()) {
            Ok(u)
        } else {
            Err(Error::solver("flux integration overflowed"))
        }
    }

    fn run(&self) -> Result<Vec<f64>> {
        if self.c == 0.0 && self.grid.active().all(|i| self.rhs[i] == 0.0) {
            return Ok(vec![0.0; self.grid.len()]);
        }
        let mut u = self.flux_integration()?;
        let mut e = self.energy(&u);
        let mut g = self.gradient(&u);
        let start = self.grid.active().start;
        for _ in 0..self.options.max_newton_iterations {
            if self.converged(&u, &g) {
                return Ok(u);
            }
            let h = self.op.hessian(self.grid, &u);
            let step = solve_or_regularize(&h, &g)?;
            let slope: f64 = -g.iter().zip(&step).map(|(a, b)| a * b).sum::<f64>();
            let trial = |t: f64| {
                let mut w = u.clone();
                for (k, s) in step.iter().enumerate() {
                    w[start + k] -= t * s;
                }
                w
            };
            let mut accepted = None;
            let mut t = 1.0;
            for _ in 0..=self.options.max_halvings {
                let w = trial(t);
                let ew = self.energy(&w);
                if ew.is_finite() && ew < e && ew <= e + 1e-4 * t * slope {
                    accepted = Some((w, ew));
                    break;
                }
                t *= 0.5;
            }
            if accepted.is_none() {
                // energy differences are below roundoff: fall back on the residual
                accepted = self.residual_step(&u, &g, &h, &step);
            }
            match accepted {
                Some((w, ew)) => {
                    u = w;
                    e = ew;
                    g = self.gradient(&u);
                }
                None => {
                    if self.converged_loose(&u, &g) {
                        return Ok(u);
                    }
                    return Err(Error::solver("Newton stagnated after maximal damping"));
                }
            }
        }
        if self.converged(&u, &g) {
            Ok(u)
        } else {
            Err(Error::solver("Newton did not converge within the iteration cap"))
        }
    }

    /// A step that decreases the residual norm: the full Newton step, then
    /// Levenberg-Marquardt shifts for nodes where `φ'` degenerates, then
    /// damped Newton steps.
    fn residual_step(&self, u: &[f64], g: &[f64], h: &Tridiagonal, step: &[f64]) -> Option<(Vec<f64>, f64)> {
        let start = self.grid.active().start;
        let norm0 = norm(g);
        let apply = |s: &[f64], t: f64| {
            let mut w = u.to_vec();
            for (k, d) in s.iter().enumerate() {
                w[start + k] -= t * d;
            }
            w
        };
        let accept = |w: Vec<f64>, factor: f64| {
            if norm(&self.gradient(&w)) < factor * norm0 {
                let e = self.energy(&w);
                Some((w, e))
            } else {
                None
            }
        };
        if let Some(found) = accept(apply(step, 1.0), 1.0 - 1e-4) {
            return Some(found);
        }
        let scale = h.diag.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
        let mut mu = 1e-12 * scale;
        while mu <= scale {
            let mut shifted = h.clone();
            for d in &mut shifted.diag {
                *d += mu;
            }
            if let Some(s) = shifted.solve(g).filter(|s| s.iter().all(|x| x.is_finite())) {
                if let Some(found) = accept(apply(&s, 1.0), 1.0 - 1e-4) {
                    return Some(found);
                }
            }
            mu *= 10.0;
        }
        let mut t = 0.5;
        for _ in 0..self.options.max_halvings {
            if let Some(found) = accept(apply(step, t), 1.0) {
                return Some(found);
            }
            t *= 0.5;
        }
        None
    }

    // no descent left and the residual is at roundoff level
    fn converged_loose(&self, u: &[f64], g: &[f64]) -> bool {
        let floor = self.op.imbalance_floor(self.grid, u, self.rhs, self.c);
        g.iter().zip(&floor).all(|(r, f)| r.abs() <= 16.0 * f)
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn solve_or_regularize(h: &Tridiagonal, g: &[f64]) -> Result<Vec<f64>> {
    if let Some(s) = h.solve(g) {
        if s.iter().all(|x| x.is_finite()) {
            return Ok(s);
        }
    }
    let mut shifted = h.clone();
    let scale = h.diag.iter().fold(0.0_f64, |m, d| m.max(d.abs())).max(1.0);
    for d in &mut shifted.diag {
        *d += 1e-12 * scale;
    }
    shifted
        .solve(g)
        .filter(|s| s.iter().all(|x| x.is_finite()))
        .ok_or_else(|| Error::solver("singular Newton matrix"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::{build_grid, RadialDomain};
    use std::sync::Arc;

    fn unit(n: usize) -> Arc<RadialGrid> {
        Arc::new(build_grid(RadialDomain::interval(0.0, 1.0).unwrap(), n).unwrap())
    }

    #[test]
    fn poisson_is_exact_at_nodes() {
        let g = unit(11);
        let f = GridField::from_fn(g, FieldKind::Generic, |_| 1.0).unwrap();
        let u = inner_solve(&f, 2.0, 0.0).unwrap();
        for (x, v) in u.grid().nodes().iter().zip(u.values()) {
            assert!((v - 0.5 * x * (1.0 - x)).abs() < 1e-14);
        }
    }

    #[test]
    fn symmetric_profile_for_general_p() {
        // −(|U'|^{p−2}U')' = 1: U(1/2) = ((p−1)/p)(1/2)^{p/(p−1)}
        for p in [1.5, 3.0, 4.0] {
            let g = unit(401);
            let f = GridField::from_fn(g, FieldKind::Generic, |_| 1.0).unwrap();
            let u = inner_solve(&f, p, 0.0).unwrap();
            let exact = (p - 1.0) / p * 0.5_f64.powf(p / (p - 1.0));
            assert!((u.values()[200] / exact - 1.0).abs() < 1e-3, "p={p}: {}", u.values()[200]);
        }
    }

    #[test]
    fn zero_source_gives_zero() {
        let f = GridField::zeros(unit(9), FieldKind::Generic);
        assert!(inner_solve(&f, 3.0, 0.0).unwrap().values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn negative_source_is_rejected() {
        let f = GridField::from_fn(unit(9), FieldKind::Generic, |_| -1.0).unwrap();
        assert!(inner_solve(&f, 2.0, 0.0).is_err());
    }
}
