//! TOML experiment configuration.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use quasilin::analysis::{first_eigenvalue_on, EigenOptions, RegularityInputs};
use quasilin::discretization::RadialDomain;
use quasilin::nonlinearity::{parse_pair, ScalarFunction, Table};
use quasilin::solver::{ProblemSpec, SolverOptions};

use crate::CliError;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: Option<ProblemConfig>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    /// Grid sizes for refinement studies; strictly increasing.
    pub refinement: Option<Vec<usize>>,
    /// Seed for the random starts of the uniqueness probe.
    #[serde(default)]
    pub seed: u64,
    pub scan: Option<ScanConfig>,
    pub transform: Option<TransformConfig>,
    pub branch: Option<BranchConfig>,
    #[serde(default)]
    pub exponents: Vec<ExponentRow>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub p: f64,
    pub lambda: LambdaConfig,
    pub domain: DomainConfig,
    #[serde(default = "default_n")]
    pub n: usize,
    /// Catalog pair, e.g. `"ex5"` or `"ex4:q=3"`.
    #[serde(default = "default_pair")]
    pub pair: String,
    /// `f` as a constant, or a CSV file `r,f` relative to the config.
    #[serde(default)]
    pub weight: WeightConfig,
    #[serde(default)]
    pub dirac: f64,
    /// Random starts for the uniqueness probe after `solve`.
    #[serde(default)]
    pub probe_starts: usize,
}

/// `λ` as a number, or as a multiple of `λ₁(f)` on the run's grid.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged)]
pub enum LambdaConfig {
    Value(f64),
    Factor { lambda1_factor: f64 },
}

/// Repeats `solve` over exponents and multiples of `λ₁(f)`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub p: Vec<f64>,
    pub lambda1_factors: Vec<f64>,
    #[serde(default)]
    pub eps: Vec<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DomainConfig {
    Interval { a: f64, b: f64 },
    Ball { radius: f64, dim: usize },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum WeightConfig {
    Constant(f64),
    Table { csv: PathBuf },
}

impl Default for WeightConfig {
    fn default() -> Self {
        WeightConfig::Constant(1.0)
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub eps: Option<f64>,
    pub max_iterations: Option<usize>,
    pub residual_tol: Option<f64>,
    pub lambda_star_estimate: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformConfig {
    pub pairs: Option<Vec<String>>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchConfig {
    #[serde(default = "default_levels")]
    pub levels: usize,
    /// `f ∈ L^r`; omit for bounded `f`.
    pub r: Option<f64>,
    #[serde(default = "default_rel_width")]
    pub rel_width: f64,
    #[serde(default = "default_start")]
    pub start: f64,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentRow {
    pub m: Option<f64>,
    pub p: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub r: Option<f64>,
    pub q: Option<f64>,
    #[serde(rename = "Q")]
    pub big_q: Option<f64>,
}

fn default_n() -> usize {
    201
}

fn default_pair() -> String {
    "linear-g".into()
}

fn default_samples() -> usize {
    40
}

fn default_levels() -> usize {
    8
}

fn default_rel_width() -> f64 {
    1e-4
}

fn default_start() -> f64 {
    1e-2
}

impl ExponentRow {
    pub fn inputs(&self) -> RegularityInputs {
        RegularityInputs {
            m: self.m,
            p: self.p,
            n: self.n,
            r: self.r,
            q: self.q,
            big_q: self.big_q,
        }
    }
}

/// Reads, parses and validates a configuration file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut config: ExperimentConfig =
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    config.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    config.validate()?;
    Ok(config)
}

impl ExperimentConfig {
    fn validate(&self) -> Result<(), CliError> {
        if let Some(schedule) = &self.refinement {
            if schedule.is_empty() || schedule.windows(2).any(|w| w[1] <= w[0]) {
                return Err(CliError::Config(format!(
                    "refinement must be nonempty and strictly increasing, got {schedule:?}"
                )));
            }
        }
        if let Some(WeightConfig::Table { csv }) = self.problem.as_ref().map(|p| &p.weight) {
            let path = self.base_dir.join(csv);
            if !path.is_file() {
                return Err(CliError::Config(format!("weight table {} does not exist", path.display())));
            }
        }
        Ok(())
    }

    pub fn problem(&self) -> Result<&ProblemConfig, CliError> {
        self.problem
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [problem] section".into()))
    }

    pub fn domain(&self) -> Result<RadialDomain, CliError> {
        let domain = match self.problem()?.domain {
            DomainConfig::Interval { a, b } => RadialDomain::interval(a, b),
            DomainConfig::Ball { radius, dim } => RadialDomain::ball(radius, dim),
        };
        Ok(domain?)
    }

    pub fn weight(&self) -> Result<ScalarFunction, CliError> {
        Ok(match &self.problem()?.weight {
            WeightConfig::Constant(c) => ScalarFunction::Constant(*c),
            WeightConfig::Table { csv } => ScalarFunction::Tabulated(Table::from_csv(self.base_dir.join(csv))?),
        })
    }

    pub fn options(&self) -> SolverOptions {
        let mut o = SolverOptions::default();
        let s = &self.solver;
        if let Some(x) = s.eps {
            o.eps = x;
        }
        if let Some(x) = s.max_iterations {
            o.max_iterations = x;
        }
        if let Some(x) = s.residual_tol {
            o.residual_tol = x;
        }
        o.lambda_star_estimate = s.lambda_star_estimate;
        o
    }

    /// The problem on `n` nodes (the config's `n` when `None`), with `p`
    /// and `ε` optionally overridden.
    pub fn spec_with(&self, n: Option<usize>, p: Option<f64>, eps: Option<f64>, lambda: Option<LambdaConfig>) -> Result<ProblemSpec, CliError> {
        let prob = self.problem()?;
        let p = p.unwrap_or(prob.p);
        let pair = parse_pair(&prob.pair, p)?;
        let mut options = self.options();
        if let Some(eps) = eps {
            options.eps = eps;
        }
        let weight = self.weight()?;
        let spec = ProblemSpec::new(self.domain()?, n.unwrap_or(prob.n), 0.0, pair)?
            .with_weight(weight.clone())?
            .with_options(options.clone())?;
        let lambda = match lambda.unwrap_or(prob.lambda) {
            LambdaConfig::Value(x) => x,
            LambdaConfig::Factor { lambda1_factor } => {
                let eigen = EigenOptions { eps: options.eps, ..EigenOptions::default() };
                lambda1_factor * first_eigenvalue_on(&weight, p, spec.grid.clone(), &eigen)?.lambda1
            }
        };
        Ok(spec.with_lambda(lambda)?.with_dirac(prob.dirac)?)
    }

    pub fn spec(&self, n: Option<usize>) -> Result<ProblemSpec, CliError> {
        self.spec_with(n, None, None, None)
    }
}
