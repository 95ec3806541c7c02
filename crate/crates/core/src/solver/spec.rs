use std::sync::Arc;

use serde::Serialize;

use crate::discretization::{build_grid, RadialDomain, RadialGrid, DEFAULT_EPS};
use crate::error::{Error, Result};
use crate::nonlinearity::{NonlinearityPair, ScalarFunction};

/// Tolerances and caps shared by every solve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverOptions {
    /// Regularization inside the flux.
    pub eps: f64,
    /// Stop when `‖v^{n+1} − v^n‖_∞` falls below this.
    pub fixed_point_tol: f64,
    /// Newton stops when every conserved residual is below
    /// `newton_tol · V_i · (1 + ‖F‖_∞)`.
    pub newton_tol: f64,
    pub max_newton_iterations: usize,
    pub max_halvings: usize,
    /// Blow-up cap `M` on `‖v‖_∞`.
    pub blowup_cap: f64,
    pub max_iterations: usize,
    /// A converged outcome must have a residual sup below
    /// `residual_tol · (1 + ‖λ f S(v)‖_∞)`.
    pub residual_tol: f64,
    /// Innermost nodes reported separately in singular runs.
    pub residual_exclusion: usize,
    /// Mountain-pass path nodes, endpoints included.
    pub path_nodes: usize,
    /// Mountain-pass step in the `H¹₀` metric.
    pub path_step: f64,
    pub path_tol: f64,
    pub path_max_iterations: usize,
    /// Mountain-pass refuses `λ` at or above this.
    pub lambda_star_estimate: Option<f64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            eps: DEFAULT_EPS,
            fixed_point_tol: 1e-10,
            newton_tol: 1e-11,
            max_newton_iterations: 200,
            max_halvings: 60,
            blowup_cap: 1e6,
            max_iterations: 10_000,
            residual_tol: 1e-6,
            residual_exclusion: 3,
            path_nodes: 21,
            path_step: 0.2,
            path_tol: 1e-7,
            path_max_iterations: 20_000,
            lambda_star_estimate: None,
        }
    }
}

/// Every parameter of the `u`/`v` problems on one grid.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub p: f64,
    pub grid: Arc<RadialGrid>,
    /// `f` as a function of the radius.
    pub weight: ScalarFunction,
    pub lambda: f64,
    pub pair: Arc<NonlinearityPair>,
    pub dirac_mass: f64,
    pub options: SolverOptions,
}

impl ProblemSpec {
    /// `f ≡ 1`, no Dirac mass, default options; `p` is taken from the pair.
    pub fn new(domain: RadialDomain, n: usize, lambda: f64, pair: NonlinearityPair) -> Result<Self> {
        let grid = Arc::new(build_grid(domain, n)?);
        let spec = ProblemSpec {
            p: pair.p(),
            grid,
            weight: ScalarFunction::Constant(1.0),
            lambda,
            pair: Arc::new(pair),
            dirac_mass: 0.0,
            options: SolverOptions::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_weight(mut self, weight: ScalarFunction) -> Result<Self> {
        self.weight = weight;
        self.validate()?;
        Ok(self)
    }

    pub fn with_lambda(mut self, lambda: f64) -> Result<Self> {
        self.lambda = lambda;
        self.validate()?;
        Ok(self)
    }

    pub fn with_dirac(mut self, c: f64) -> Result<Self> {
        self.dirac_mass = c;
        self.validate()?;
        Ok(self)
    }

    pub fn with_options(mut self, options: SolverOptions) -> Result<Self> {
        self.options = options;
        self.validate()?;
        Ok(self)
    }

    pub fn with_eps(mut self, eps: f64) -> Result<Self> {
        self.options.eps = eps;
        self.validate()?;
        Ok(self)
    }

    pub fn with_grid_size(mut self, n: usize) -> Result<Self> {
        self.grid = Arc::new(build_grid(self.grid.domain(), n)?);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0) || !self.p.is_finite() {
            return Err(Error::validation(format!("p must lie in (1, inf), got {}", self.p)));
        }
        if (self.pair.p() - self.p).abs() > 1e-15 {
            return Err(Error::validation(format!(
                "pair was built for p = {} but the problem has p = {}",
                self.pair.p(),
                self.p
            )));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::validation(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if !(self.dirac_mass >= 0.0) || !self.dirac_mass.is_finite() {
            return Err(Error::validation(format!("Dirac mass must be >= 0, got {}", self.dirac_mass)));
        }
        if self.dirac_mass > 0.0 {
            match self.grid.domain() {
                RadialDomain::Ball { dim, .. } if self.p < dim as f64 => {}
                RadialDomain::Ball { dim, .. } => {
                    return Err(Error::precondition(format!(
                        "a Dirac mass needs p < N, got p = {} and N = {dim}",
                        self.p
                    )))
                }
                RadialDomain::Interval { .. } => {
                    return Err(Error::precondition("a Dirac mass needs a ball domain"))
                }
            }
        }
        let o = &self.options;
        if !(o.eps >= 0.0) || !(o.fixed_point_tol > 0.0) || !(o.newton_tol > 0.0) || !(o.blowup_cap > 0.0) {
            return Err(Error::validation("tolerances must be positive"));
        }
        if o.path_nodes < 3 {
            return Err(Error::validation("a mountain-pass path needs at least 3 nodes"));
        }
        for (i, &r) in self.grid.nodes().iter().enumerate() {
            let f = self.weight.eval(r)?;
            if !(f >= 0.0) || !f.is_finite() {
                return Err(Error::validation(format!("weight f is {f} at node {i}")));
            }
        }
        Ok(())
    }

    /// `f(r_i)` at every node.
    pub fn weight_values(&self) -> Result<Vec<f64>> {
        self.grid.nodes().iter().map(|&r| self.weight.eval(r)).collect()
    }

    /// `w(H(v)) (1 + g(v))^{p−1}`, held at its value at 0 for `v < 0`.
    pub fn source_density(&self, v: f64) -> Result<f64> {
        let v = v.max(0.0);
        let base = (1.0 + self.pair.g(v)?).powf(self.p - 1.0);
        let w = match self.pair.u_weight() {
            Some(w) => w.eval(self.pair.h(v)?)?,
            None => 1.0,
        };
        Ok(w * base)
    }

    /// Derivative of [`Self::source_density`] in `v`; zero for `v < 0`.
    pub fn source_density_derivative(&self, v: f64) -> Result<f64> {
        if v < 0.0 {
            return Ok(0.0);
        }
        let e = self.p - 1.0;
        let one_g = 1.0 + self.pair.g(v)?;
        let base = one_g.powf(e);
        let dbase = e * one_g.powf(e - 1.0) * self.pair.g_prime(v)?;
        match self.pair.u_weight() {
            None => Ok(dbase),
            Some(w) => {
                let u = self.pair.h(v)?;
                let dw = match w.derivative(u) {
                    Ok(d) => d,
                    Err(_) => {
                        let du = 1e-8 * (1.0 + u);
                        (w.eval(u + du)? - w.eval(u)?) / du
                    }
                };
                // dH/dv = 1/(1 + g)
                Ok(w.eval(u)? * dbase + dw / one_g * base)
            }
        }
    }

    /// Primitive of [`Self::source_density`] vanishing at 0.
    pub fn source_primitive(&self, v: f64) -> Result<f64> {
        if v <= 0.0 {
            return Ok(v * self.source_density(0.0)?);
        }
        match self.pair.u_weight() {
            None => self.pair.source_primitive(v),
            Some(_) => Ok(crate::quadrature::integrate(
                |t| self.source_density(t).unwrap_or(f64::NAN),
                0.0,
                v,
            )?
            .value),
        }
    }

    /// Nodal right side `λ f_i S(v_i)`, zero on Dirichlet nodes.
    pub fn rhs(&self, weights: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; v.len()];
        for i in self.grid.active() {
            out[i] = if self.lambda == 0.0 || weights[i] == 0.0 {
                0.0
            } else {
                self.lambda * weights[i] * self.source_density(v[i])?
            };
        }
        Ok(out)
    }
}
