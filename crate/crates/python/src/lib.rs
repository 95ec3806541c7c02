use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use quasilin::analysis::{critical_lambda, first_eigenvalue_on, report, EigenOptions, RegularityInputs};
use quasilin::discretization::RadialDomain;
use quasilin::nonlinearity::{eval_h, eval_psi, parse_pair, ScalarFunction};
use quasilin::solver::{
    dirac_solve, minimal_solution, mountain_pass_solve, transform_solution, Direction, ProblemSpec, SolveOutcome,
};

fn to_py(e: quasilin::Error) -> PyErr {
    if e.is_precondition() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn json_to_py<'py>(py: Python<'py>, value: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A discrete solution and its summary.
#[pyclass(module = "quasilin_py", frozen)]
struct Solution {
    outcome: SolveOutcome,
}

#[pymethods]
impl Solution {
    #[getter]
    fn status(&self) -> String {
        self.outcome.to_json(None)["status"].as_str().unwrap_or_default().to_owned()
    }

    #[getter]
    fn converged(&self) -> bool {
        self.outcome.is_converged()
    }

    #[getter]
    fn nodes(&self) -> Vec<f64> {
        self.outcome.field.grid().nodes().to_vec()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.outcome.field.values().to_vec()
    }

    #[getter]
    fn sup_norm(&self) -> f64 {
        self.outcome.field.sup_norm()
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.outcome.iterations
    }

    #[getter]
    fn energy(&self) -> Option<f64> {
        self.outcome.energy
    }

    /// Values of `u` on the grid, from the solve or by `u = H(v)`.
    fn companion(&self, problem: &Problem) -> PyResult<Vec<f64>> {
        match &self.outcome.companion {
            Some(u) => Ok(u.values().to_vec()),
            None => transform_solution(&self.outcome.field, &problem.spec.pair, Direction::VToU)
                .map(|u| u.values().to_vec())
                .map_err(to_py),
        }
    }

    fn summary<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        json_to_py(py, &self.outcome.to_json(None))
    }

    fn __repr__(&self) -> String {
        format!(
            "Solution(status={}, sup_norm={:.6e}, iterations={})",
            self.status(),
            self.sup_norm(),
            self.outcome.iterations
        )
    }
}

/// A radial Dirichlet problem for the zero-order-source form.
#[pyclass(module = "quasilin_py", frozen)]
struct Problem {
    spec: ProblemSpec,
}

#[pymethods]
impl Problem {
    #[new]
    #[pyo3(signature = (lam, p=2.0, pair="linear-g", n=201, interval=None, ball=None, weight=1.0, dirac=0.0, eps=None))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        lam: f64,
        p: f64,
        pair: &str,
        n: usize,
        interval: Option<(f64, f64)>,
        ball: Option<(f64, usize)>,
        weight: f64,
        dirac: f64,
        eps: Option<f64>,
    ) -> PyResult<Self> {
        let domain = match (interval, ball) {
            (Some(_), Some(_)) => return Err(PyValueError::new_err("give either interval or ball")),
            (_, Some((radius, dim))) => RadialDomain::ball(radius, dim),
            (Some((a, b)), None) => RadialDomain::interval(a, b),
            (None, None) => RadialDomain::interval(0.0, 1.0),
        }
        .map_err(to_py)?;
        let pair = parse_pair(pair, p).map_err(to_py)?;
        let mut spec = ProblemSpec::new(domain, n, lam, pair)
            .and_then(|s| s.with_weight(ScalarFunction::Constant(weight)))
            .and_then(|s| s.with_dirac(dirac))
            .map_err(to_py)?;
        if let Some(eps) = eps {
            spec = spec.with_eps(eps).map_err(to_py)?;
        }
        Ok(Problem { spec })
    }

    #[getter]
    fn lam(&self) -> f64 {
        self.spec.lambda
    }

    #[getter]
    fn p(&self) -> f64 {
        self.spec.p
    }

    /// Same problem at another `λ`.
    fn with_lambda(&self, lam: f64) -> PyResult<Problem> {
        Ok(Problem { spec: self.spec.clone().with_lambda(lam).map_err(to_py)? })
    }

    /// Minimal solution; uses the Dirac solver when a point mass is set.
    fn solve(&self, py: Python<'_>) -> PyResult<Solution> {
        let spec = &self.spec;
        let outcome = py
            .detach(|| if spec.dirac_mass > 0.0 { dirac_solve(spec) } else { minimal_solution(spec) })
            .map_err(to_py)?;
        Ok(Solution { outcome })
    }

    /// Second solution above the minimal one.
    fn mountain_pass(&self, py: Python<'_>, minimal: &Solution) -> PyResult<Solution> {
        let spec = &self.spec;
        let low = &minimal.outcome.field;
        let outcome = py.detach(|| mountain_pass_solve(spec, low)).map_err(to_py)?;
        Ok(Solution { outcome })
    }

    /// `(λ_lo, λ_hi)` bracketing the critical parameter.
    fn critical_lambda(&self, py: Python<'_>) -> PyResult<(f64, f64)> {
        let spec = &self.spec;
        let trace = py.detach(|| critical_lambda(spec)).map_err(to_py)?;
        Ok((trace.lambda_lo, trace.lambda_hi))
    }

    /// First eigenvalue of the p-Laplacian with this problem's weight and grid.
    fn first_eigenvalue(&self) -> PyResult<f64> {
        let options = EigenOptions { eps: self.spec.options.eps, ..EigenOptions::default() };
        first_eigenvalue_on(&self.spec.weight, self.spec.p, self.spec.grid.clone(), &options)
            .map(|r| r.lambda1)
            .map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Problem(lam={}, p={}, n={})", self.spec.lambda, self.spec.p, self.spec.grid.nodes().len())
    }
}

/// `Ψ(u)` for a catalog pair.
#[pyfunction]
#[pyo3(signature = (pair, u, p=2.0))]
fn psi(pair: &str, u: f64, p: f64) -> PyResult<f64> {
    eval_psi(&parse_pair(pair, p).map_err(to_py)?, u).map_err(to_py)
}

/// `H(v)`, the inverse of `Ψ`, for a catalog pair.
#[pyfunction]
#[pyo3(signature = (pair, v, p=2.0))]
fn h(pair: &str, v: f64, p: f64) -> PyResult<f64> {
    eval_h(&parse_pair(pair, p).map_err(to_py)?, v).map_err(to_py)
}

/// Regularity exponents and growth predicates as a dict.
#[pyfunction]
#[pyo3(signature = (p, n, m=None, r=None, q=None, big_q=None))]
fn exponents<'py>(
    py: Python<'py>,
    p: f64,
    n: usize,
    m: Option<f64>,
    r: Option<f64>,
    q: Option<f64>,
    big_q: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let rep = report(RegularityInputs { m, p, n, r, q, big_q }).map_err(to_py)?;
    let value = serde_json::to_value(&rep).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    json_to_py(py, &value)
}

#[pymodule]
fn quasilin_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Problem>()?;
    m.add_class::<Solution>()?;
    m.add_function(wrap_pyfunction!(psi, m)?)?;
    m.add_function(wrap_pyfunction!(h, m)?)?;
    m.add_function(wrap_pyfunction!(exponents, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
