//! The discrete p-Laplacian in conservative flux form.
//!
//! With `D_i = (U_{i+1} − U_i)/h` and face weights `w_i = r_{i+1/2}^{N−1}`,
//! the half-node fluxes are `F_{i+1/2} = w_i φ(D_i)` and
//!
//! ```text
//! (−Δ_p^h U)_i = (F_{i−1/2} − F_{i+1/2}) / V_i
//! ```
//!
//! where `V_i` is the control volume of node `i`. At the ball center the
//! inner flux is `−c/ω_N` (zero without a Dirac mass). The operator is the
//! gradient of `Σ_i w_i h Φ(D_i)` with respect to the `V`-weighted inner
//! product, which is what the Newton solver exploits.

use std::sync::Arc;

use crate::error::{Error, Result};

use super::field::{FieldKind, GridField};
use super::grid::RadialGrid;
use super::tridiag::Tridiagonal;

/// Default regularization inside `φ(s) = (s² + ε²)^{(p−2)/2} s`.
pub const DEFAULT_EPS: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PLaplacian {
    p: f64,
    eps: f64,
}

impl PLaplacian {
    pub fn new(p: f64, eps: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::validation(format!("p must lie in (1, inf), got {p}")));
        }
        if !(eps >= 0.0) {
            return Err(Error::validation(format!("eps must be >= 0, got {eps}")));
        }
        Ok(PLaplacian { p, eps })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    fn is_quadratic(&self) -> bool {
        self.p == 2.0
    }

    /// `φ(s)`.
    pub fn phi(&self, s: f64) -> f64 {
        if self.is_quadratic() {
            s
        } else {
            (s * s + self.eps * self.eps).powf(0.5 * (self.p - 2.0)) * s
        }
    }

    /// `φ'(s) = (s² + ε²)^{(p−4)/2} ((p−1)s² + ε²)`.
    pub fn phi_prime(&self, s: f64) -> f64 {
        if self.is_quadratic() {
            1.0
        } else {
            let q = s * s + self.eps * self.eps;
            q.powf(0.5 * (self.p - 4.0)) * ((self.p - 1.0) * s * s + self.eps * self.eps)
        }
    }

    /// The `s` with `φ(s) = y`.
    pub fn phi_inverse(&self, y: f64) -> f64 {
        if self.is_quadratic() || y == 0.0 {
            return y;
        }
        let target = y.abs();
        let guess = target.powf(1.0 / (self.p - 1.0));
        if self.eps == 0.0 {
            return guess.copysign(y);
        }
        let (mut lo, mut hi) = (0.0, guess.max(self.eps));
        while self.phi(hi) < target {
            lo = hi;
            hi *= 2.0;
        }
        let mut s = guess.clamp(lo, hi);
        for _ in 0..200 {
            let r = self.phi(s) - target;
            if r == 0.0 {
                break;
            }
            if r > 0.0 {
                hi = s;
            } else {
                lo = s;
            }
            let newton = s - r / self.phi_prime(s);
            let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if (next - s).abs() <= 4.0 * f64::EPSILON * s || hi - lo <= 4.0 * f64::EPSILON * hi {
                s = next;
                break;
            }
            s = next;
        }
        s.copysign(y)
    }

    /// `Φ(s) = ((s² + ε²)^{p/2} − ε^p)/p`, the primitive of `φ` vanishing at 0.
    pub fn potential(&self, s: f64) -> f64 {
        if self.is_quadratic() {
            0.5 * s * s
        } else {
            let e2 = self.eps * self.eps;
            ((s * s + e2).powf(0.5 * self.p) - e2.powf(0.5 * self.p)) / self.p
        }
    }

    /// Half-node fluxes `F_{i+1/2}`, `i = 0..n−1`.
    pub fn fluxes(&self, grid: &RadialGrid, u: &[f64]) -> Vec<f64> {
        let h = grid.spacing();
        grid.face_weights()
            .iter()
            .enumerate()
            .map(|(i, w)| w * self.phi((u[i + 1] - u[i]) / h))
            .collect()
    }

    /// Flux entering node 0 from the center: `−c/ω_N` on balls, unused on
    /// intervals.
    pub fn center_flux(grid: &RadialGrid, dirac: f64) -> f64 {
        if grid.domain().is_ball() {
            -dirac / grid.angular_factor()
        } else {
            0.0
        }
    }

    /// Nodal values of `−Δ_p^h U`; Dirichlet rows return `U_i`.
    pub fn apply_values(&self, grid: &RadialGrid, u: &[f64], dirac: f64) -> Vec<f64> {
        let flux = self.fluxes(grid, u);
        let vols = grid.volumes();
        (0..grid.len())
            .map(|i| {
                if grid.is_dirichlet(i) {
                    u[i]
                } else {
                    let inner = if i == 0 { Self::center_flux(grid, dirac) } else { flux[i - 1] };
                    (inner - flux[i]) / vols[i]
                }
            })
            .collect()
    }

    /// Gradient of the discrete energy on the active nodes:
    /// `F_{i−1/2} − F_{i+1/2} − V_i rhs_i`, i.e. `V_i((−Δ_p^h U)_i − rhs_i)`.
    pub fn imbalance(&self, grid: &RadialGrid, u: &[f64], rhs: &[f64], dirac: f64) -> Vec<f64> {
        let flux = self.fluxes(grid, u);
        let vols = grid.volumes();
        grid.active()
            .map(|i| {
                let inner = if i == 0 { Self::center_flux(grid, dirac) } else { flux[i - 1] };
                inner - flux[i] - vols[i] * rhs[i]
            })
            .collect()
    }

    /// Roundoff scale of [`Self::imbalance`] at each active node: flux
    /// magnitudes plus the flux response to a last-bit change of `U`.
    pub fn imbalance_floor(&self, grid: &RadialGrid, u: &[f64], rhs: &[f64], dirac: f64) -> Vec<f64> {
        let h = grid.spacing();
        let face: Vec<f64> = grid
            .face_weights()
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let d = (u[i + 1] - u[i]) / h;
                w * (self.phi(d).abs() + self.phi_prime(d) * (u[i].abs() + u[i + 1].abs()) / h)
            })
            .collect();
        let vols = grid.volumes();
        grid.active()
            .map(|i| {
                let inner = if i == 0 { Self::center_flux(grid, dirac).abs() } else { face[i - 1] };
                64.0 * f64::EPSILON * (inner + face[i] + vols[i] * rhs[i].abs())
            })
            .collect()
    }

    /// `Σ_i w_i h Φ(D_i)`, per unit solid angle.
    pub fn stored_energy(&self, grid: &RadialGrid, u: &[f64]) -> f64 {
        let h = grid.spacing();
        grid.face_weights()
            .iter()
            .enumerate()
            .map(|(i, w)| w * h * self.potential((u[i + 1] - u[i]) / h))
            .sum()
    }

    /// Hessian of [`Self::stored_energy`] restricted to the active nodes.
    pub fn hessian(&self, grid: &RadialGrid, u: &[f64]) -> Tridiagonal {
        let h = grid.spacing();
        let active = grid.active();
        let first = active.start;
        let mut t = Tridiagonal::zeros(active.len());
        for (i, w) in grid.face_weights().iter().enumerate() {
            let k = w * self.phi_prime((u[i + 1] - u[i]) / h) / h;
            let left = i >= first && i < active.end;
            let right = i + 1 >= first && i + 1 < active.end;
            if left {
                t.diag[i - first] += k;
            }
            if right {
                t.diag[i + 1 - first] += k;
            }
            if left && right {
                t.off[i - first] = -k;
            }
        }
        t
    }
}

/// `−Δ_p^h` applied to a field, as a generic field.
pub fn apply_p_laplacian(field: &GridField, p: f64) -> Result<GridField> {
    apply_p_laplacian_with(field, p, DEFAULT_EPS, 0.0)
}

/// As [`apply_p_laplacian`] with explicit `ε` and Dirac mass at the center.
pub fn apply_p_laplacian_with(field: &GridField, p: f64, eps: f64, dirac: f64) -> Result<GridField> {
    let op = PLaplacian::new(p, eps)?;
    let grid: &Arc<RadialGrid> = field.grid();
    let values = op.apply_values(grid, field.values(), dirac);
    GridField::new(grid.clone(), values, FieldKind::Generic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::{build_grid, RadialDomain};

    fn interval(n: usize) -> Arc<RadialGrid> {
        Arc::new(build_grid(RadialDomain::interval(0.0, 1.0).unwrap(), n).unwrap())
    }

    #[test]
    fn quadratic_is_exact_on_interval() {
        let g = interval(11);
        let u = GridField::from_fn(g, FieldKind::U, |x| 0.5 * x * (1.0 - x)).unwrap();
        let out = apply_p_laplacian(&u, 2.0).unwrap();
        for i in 1..10 {
            assert!((out.values()[i] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_source_profile_is_exact_on_ball() {
        // −ΔU = 1 in the unit ball of ℝ³: U = (1 − r²)/6
        let g = Arc::new(build_grid(RadialDomain::ball(1.0, 3).unwrap(), 21).unwrap());
        let u = GridField::from_fn(g, FieldKind::U, |r| (1.0 - r * r) / 6.0).unwrap();
        let out = apply_p_laplacian(&u, 2.0).unwrap();
        for i in 0..20 {
            assert!((out.values()[i] - 1.0).abs() < 1e-12, "node {i}: {}", out.values()[i]);
        }
    }

    #[test]
    fn zero_maps_to_zero() {
        let g = interval(7);
        let u = GridField::zeros(g, FieldKind::V);
        for p in [1.5, 2.0, 3.0] {
            let out = apply_p_laplacian(&u, p).unwrap();
            assert!(out.values().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn phi_inverse_round_trips() {
        for p in [1.2, 1.5, 2.0, 3.0, 6.0] {
            for eps in [0.0, 1e-10, 1e-3] {
                let op = PLaplacian::new(p, eps).unwrap();
                for s in [-3.0, -1e-6, 1e-12, 0.5, 40.0] {
                    let back = op.phi_inverse(op.phi(s));
                    assert!((back - s).abs() <= 1e-12 * s.abs().max(eps), "p={p} eps={eps} s={s}: {back}");
                }
            }
        }
    }

    #[test]
    fn rejects_p_at_most_one() {
        let u = GridField::zeros(interval(5), FieldKind::V);
        assert!(apply_p_laplacian(&u, 1.0).is_err());
    }

    #[test]
    fn hessian_matches_finite_difference_of_gradient() {
        let g = Arc::new(build_grid(RadialDomain::ball(1.0, 3).unwrap(), 9).unwrap());
        let u: Vec<f64> = g.nodes().iter().map(|r| (1.0 - r * r) * (1.0 + r)).collect();
        let zero = vec![0.0; g.len()];
        for p in [1.5, 3.0] {
            let op = PLaplacian::new(p, 1e-10).unwrap();
            let hess = op.hessian(&g, &u);
            let base = op.imbalance(&g, &u, &zero, 0.0);
            for (k, i) in g.active().enumerate() {
                let mut up = u.clone();
                let d = 1e-7;
                up[i] += d;
                let shifted = op.imbalance(&g, &up, &zero, 0.0);
                let col: Vec<f64> = shifted.iter().zip(&base).map(|(a, b)| (a - b) / d).collect();
                let mut e = vec![0.0; hess.len()];
                e[k] = 1.0;
                let exact = hess.mul(&e);
                for (a, b) in col.iter().zip(&exact) {
                    assert!((a - b).abs() < 1e-5 * (1.0 + b.abs()), "p={p}: {a} vs {b}");
                }
            }
        }
    }
}
