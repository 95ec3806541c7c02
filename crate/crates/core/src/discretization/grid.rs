use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An interval `(a, b)` or a ball of radius `R` in `ℝ^N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RadialDomain {
    Interval { a: f64, b: f64 },
    Ball { radius: f64, dim: usize },
}

impl RadialDomain {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        let d = RadialDomain::Interval { a, b };
        d.validate()?;
        Ok(d)
    }

    pub fn ball(radius: f64, dim: usize) -> Result<Self> {
        let d = RadialDomain::Ball { radius, dim };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            RadialDomain::Interval { a, b } if a < b && a.is_finite() && b.is_finite() => Ok(()),
            RadialDomain::Interval { a, b } => {
                Err(Error::validation(format!("interval needs a < b, got ({a}, {b})")))
            }
            RadialDomain::Ball { radius, dim } if radius > 0.0 && radius.is_finite() && dim >= 2 => Ok(()),
            RadialDomain::Ball { radius, dim } => Err(Error::validation(format!(
                "ball needs R > 0 and N >= 2, got R = {radius}, N = {dim}"
            ))),
        }
    }

    /// Spatial dimension `N` (1 for intervals).
    pub fn dim(&self) -> usize {
        match self {
            RadialDomain::Interval { .. } => 1,
            RadialDomain::Ball { dim, .. } => *dim,
        }
    }

    pub fn is_ball(&self) -> bool {
        matches!(self, RadialDomain::Ball { .. })
    }

    /// Angular factor of the radial measure: `ω_N = |S^{N-1}|` for balls,
    /// 1 for intervals (integration runs over `(a, b)` directly).
    pub fn angular_factor(&self) -> f64 {
        match self {
            RadialDomain::Interval { .. } => 1.0,
            RadialDomain::Ball { dim, .. } => sphere_area(*dim),
        }
    }
}

/// Area of the unit sphere `S^{N-1}`: `ω₁ = 2`, `ω₂ = 2π`,
/// `ω_{N+2} = 2π ω_N / N`.
pub fn sphere_area(dim: usize) -> f64 {
    let (mut n, mut w) = if dim % 2 == 1 { (1, 2.0) } else { (2, 2.0 * PI) };
    while n < dim {
        w *= 2.0 * PI / n as f64;
        n += 2;
    }
    w
}

/// Uniform grid; for balls the first node is the center and only the last
/// node carries the Dirichlet condition.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialGrid {
    domain: RadialDomain,
    nodes: Vec<f64>,
    h: f64,
    // r_{i+1/2}^{N-1}
    face_weights: Vec<f64>,
    // control volume of node i, per unit solid angle
    volumes: Vec<f64>,
    // ∫ hat_i(r) r^{N-1} dr
    p1_weights: Vec<f64>,
}

pub fn build_grid(domain: RadialDomain, n: usize) -> Result<RadialGrid> {
    RadialGrid::new(domain, n)
}

impl RadialGrid {
    pub fn new(domain: RadialDomain, n: usize) -> Result<Self> {
        domain.validate()?;
        if n < 3 {
            return Err(Error::validation(format!("grid needs n >= 3 nodes, got {n}")));
        }
        let (a, b) = match domain {
            RadialDomain::Interval { a, b } => (a, b),
            RadialDomain::Ball { radius, .. } => (0.0, radius),
        };
        let h = (b - a) / (n - 1) as f64;
        let mut nodes: Vec<f64> = (0..n).map(|i| a + h * i as f64).collect();
        nodes[n - 1] = b;
        let dim = domain.dim() as i32;
        let pow = |r: f64| if dim == 1 { 1.0 } else { r.powi(dim - 1) };
        let face_weights = (0..n - 1).map(|i| pow(0.5 * (nodes[i] + nodes[i + 1]))).collect();
        let cell = |lo: f64, hi: f64| {
            if dim == 1 {
                hi - lo
            } else {
                (hi.powi(dim) - lo.powi(dim)) / dim as f64
            }
        };
        let volumes = (0..n)
            .map(|i| {
                let lo = if i == 0 { nodes[0] } else { 0.5 * (nodes[i - 1] + nodes[i]) };
                let hi = if i == n - 1 { nodes[n - 1] } else { 0.5 * (nodes[i] + nodes[i + 1]) };
                cell(lo, hi)
            })
            .collect();
        let mut p1_weights = vec![0.0; n];
        for i in 0..n - 1 {
            let (ra, rb) = (nodes[i], nodes[i + 1]);
            let moment = |k: i32| (rb.powi(k + 1) - ra.powi(k + 1)) / (k + 1) as f64;
            let (m0, m1) = (moment(dim - 1), moment(dim));
            p1_weights[i] += (rb * m0 - m1) / h;
            p1_weights[i + 1] += (m1 - ra * m0) / h;
        }
        Ok(RadialGrid {
            domain,
            nodes,
            h,
            face_weights,
            volumes,
            p1_weights,
        })
    }

    pub fn domain(&self) -> RadialDomain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn angular_factor(&self) -> f64 {
        self.domain.angular_factor()
    }

    pub fn face_weights(&self) -> &[f64] {
        &self.face_weights
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    pub fn p1_weights(&self) -> &[f64] {
        &self.p1_weights
    }

    pub fn is_dirichlet(&self, i: usize) -> bool {
        i == self.nodes.len() - 1 || (i == 0 && !self.domain.is_ball())
    }

    /// Indices of the unknowns (non-Dirichlet nodes), in increasing order.
    pub fn active(&self) -> std::ops::Range<usize> {
        let n = self.nodes.len();
        if self.domain.is_ball() {
            0..n - 1
        } else {
            1..n - 1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_nodes() {
        let g = build_grid(RadialDomain::interval(0.0, 1.0).unwrap(), 5).unwrap();
        assert_eq!(g.nodes(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(g.is_dirichlet(0) && g.is_dirichlet(4) && !g.is_dirichlet(2));
    }

    #[test]
    fn ball_grid_has_center() {
        let g = build_grid(RadialDomain::ball(1.0, 3).unwrap(), 101).unwrap();
        assert!((g.spacing() - 0.01).abs() < 1e-15);
        assert_eq!(g.nodes()[0], 0.0);
        assert!(!g.is_dirichlet(0));
        // control volumes tile the ball exactly
        let total: f64 = g.volumes().iter().sum();
        assert!((total - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn too_few_nodes() {
        assert!(build_grid(RadialDomain::interval(0.0, 1.0).unwrap(), 2).is_err());
        assert!(RadialDomain::ball(1.0, 1).is_err());
        assert!(RadialDomain::interval(1.0, 1.0).is_err());
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }
}
