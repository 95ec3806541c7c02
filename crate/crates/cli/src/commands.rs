//! One function per subcommand. Each writes its files under `out` and
//! returns the paths written together with a one-line summary.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use quasilin::analysis::{
    critical_lambda_with, extremal_branch, first_eigenvalue_on, report as regularity_report, uniqueness_probe,
    CriticalOptions, EigenOptions, ExtremalOptions,
};
use quasilin::discretization::{fmt17, residual, seminorm, FieldKind, GridField};
use quasilin::nonlinearity::{parse_pair, singular_mass_transfer, CatalogId, NonlinearityPair};
use quasilin::solver::{
    dirac_solve, minimal_solution, mountain_pass_solve, transform_solution, Direction, ProblemSpec, SolveOutcome,
    SolveStatus,
};

use crate::config::{ExperimentConfig, LambdaConfig};
use crate::report::{ensure_dir, write_json, write_outcome, write_text, write_trace};
use crate::CliError;

pub struct Run {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

fn status_str(status: SolveStatus) -> String {
    serde_json::to_value(status)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default()
}

fn fail_on(outcome: &SolveOutcome) -> Result<(), CliError> {
    match outcome.status {
        SolveStatus::Error | SolveStatus::MaxIter => Err(CliError::Status(format!(
            "solver returned {}: {}",
            status_str(outcome.status),
            outcome.message.clone().unwrap_or_default()
        ))),
        _ => Ok(()),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if b.abs() > 1e-12 {
        ((a - b) / b).abs()
    } else {
        (a - b).abs()
    }
}

struct Fidelity {
    worst: f64,
    rows: String,
}

fn fidelity(pair: &NonlinearityPair, name: &str, samples: usize) -> Result<Fidelity, CliError> {
    let numeric = pair.numeric_from_g()?;
    let top = pair.l_endpoint().finite().map(|l| 0.95 * l).unwrap_or(5.0);
    let mut worst: f64 = 0.0;
    let mut rows = String::new();
    for k in 1..=samples {
        let u = top * k as f64 / samples as f64;
        let v = pair.psi(u)?;
        let back = pair.h(v)?;
        let beta = pair.beta(u)?;
        let from_g = (pair.p() - 1.0) * pair.g_prime(v)?;
        let psi_q = pair.psi_quadrature(u)?;
        let h_q = pair.h_quadrature(v)?;
        let beta_n = numeric.beta(u)?;
        for (a, b) in [(beta, from_g), (back, u), (v, psi_q), (u, h_q), (beta, beta_n)] {
            worst = worst.max(rel(a, b));
        }
        let _ = writeln!(
            rows,
            "{name},{},{},{},{},{}",
            fmt17(u),
            fmt17(v),
            fmt17(back),
            fmt17(beta),
            fmt17(from_g)
        );
    }
    Ok(Fidelity { worst, rows })
}

/// Catalog round trip: `β = (p−1) g'(Ψ)`, `H∘Ψ = id`, closed forms against
/// quadrature.
pub fn transform(config: &ExperimentConfig, out: &Path) -> Result<Run, CliError> {
    ensure_dir(out)?;
    let p = config.problem.as_ref().map(|p| p.p).unwrap_or(2.0);
    let (names, samples) = match &config.transform {
        Some(t) => (t.pairs.clone(), t.samples),
        None => (None, 40),
    };
    let names = names.unwrap_or_else(|| {
        [CatalogId::Ex1, CatalogId::Ex2, CatalogId::Ex3, CatalogId::Ex4, CatalogId::Ex5, CatalogId::Ex6]
            .iter()
            .map(|id| id.as_str().to_string())
            .collect()
    });
    if samples == 0 {
        return Err(CliError::Config("transform.samples must be positive".into()));
    }
    let mut csv = String::from("pair,u,v,h_of_v,beta,beta_from_g\n");
    let mut entries = Vec::new();
    let mut worst: f64 = 0.0;
    for name in &names {
        let pair = parse_pair(name, p)?;
        let f = fidelity(&pair, name, samples)?;
        csv.push_str(&f.rows);
        worst = worst.max(f.worst);
        let flags = pair.flags();
        entries.push(json!({
            "pair": name,
            "label": pair.label(),
            "worst_relative_deviation": f.worst,
            "L": pair.l_endpoint().to_f64(),
            "Lambda": pair.lambda_endpoint().to_f64(),
            "flags": flags,
            "mass_transfer": singular_mass_transfer(&pair, 1.0)?,
        }));
    }
    let summary = json!({ "p": p, "samples": samples, "worst_relative_deviation": worst, "pairs": entries });
    let files = vec![
        write_json(&out.join("summary.json"), &summary)?,
        write_text(&out.join("transform.csv"), &csv)?,
    ];
    Ok(Run {
        files,
        summary: format!("{} pairs, worst relative deviation {worst:.3e}", names.len()),
    })
}

fn solve_once(spec: &ProblemSpec) -> Result<SolveOutcome, CliError> {
    Ok(if spec.dirac_mass > 0.0 {
        dirac_solve(spec)?
    } else {
        minimal_solution(spec)?
    })
}

/// `ω_N r^{N−1} φ(U')` at node `k` by a centered difference.
fn node_flux(field: &GridField, k: usize, p: f64) -> Option<f64> {
    let grid = field.grid();
    if k == 0 || k + 1 >= grid.len() {
        return None;
    }
    let (h, r, u) = (grid.spacing(), grid.nodes()[k], field.values());
    let slope = (u[k + 1] - u[k - 1]) / (2.0 * h);
    Some(grid.angular_factor() * r.powi(grid.dim() as i32 - 1) * slope.abs().powf(p - 2.0) * slope)
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt17).unwrap_or_default()
}

/// Minimal or Dirac solve; with a `refinement` schedule, one run per grid
/// size; with a `scan`, one run per `(ε, p, λ₁-factor)`.
pub fn solve(config: &ExperimentConfig, out: &Path, n: Option<usize>) -> Result<Run, CliError> {
    ensure_dir(out)?;
    if let Some(scan) = &config.scan {
        return solve_scan(config, out, n, scan);
    }
    let schedule = match (n, &config.refinement) {
        (None, Some(s)) => s.clone(),
        _ => Vec::new(),
    };
    if schedule.is_empty() {
        let spec = config.spec(n)?;
        let outcome = solve_once(&spec)?;
        let mut files = write_outcome(&outcome, out)?;
        if config.problem()?.probe_starts > 0 {
            files.push(probe(config, &spec, &outcome, out)?);
        }
        fail_on(&outcome)?;
        return Ok(Run {
            files,
            summary: format!(
                "{} after {} iterations, sup {:.6e}",
                status_str(outcome.status),
                outcome.iterations,
                outcome.field.sup_norm()
            ),
        });
    }
    let mut csv = String::from(
        "n,status,sup_norm,w1p_seminorm,residual_sup,companion_w1p_seminorm,companion_residual_sup,companion_flux_r3h\n",
    );
    let mut files = Vec::new();
    let mut runs = Vec::new();
    let mut worst = None;
    for &size in &schedule {
        let spec = config.spec(Some(size))?;
        let outcome = solve_once(&spec)?;
        let dir = out.join(format!("n{size}"));
        files.extend(write_outcome(&outcome, &dir)?);
        let res = outcome.residual.as_ref().map(|r| r.sup);
        let companion = match &outcome.companion {
            Some(u) => Some(u.clone()),
            None if outcome.is_converged() => transform_solution(&outcome.field, &spec.pair, Direction::VToU).ok(),
            None => None,
        };
        let (cs, cr, cf) = match &companion {
            Some(u) => (
                Some(seminorm(u.values(), &spec.grid, spec.p)),
                residual(u, &spec).ok().map(|r| r.sup),
                if spec.grid.domain().is_ball() { node_flux(u, 3, spec.p) } else { None },
            ),
            None => (None, None, None),
        };
        let _ = writeln!(
            csv,
            "{size},{},{},{},{},{},{},{}",
            status_str(outcome.status),
            fmt17(outcome.field.sup_norm()),
            fmt17(seminorm(outcome.field.values(), &spec.grid, spec.p)),
            opt(res),
            opt(cs),
            opt(cr),
            opt(cf)
        );
        runs.push(json!({ "n": size, "dir": format!("n{size}"), "status": outcome.status }));
        if worst.is_none() && fail_on(&outcome).is_err() {
            worst = Some(fail_on(&outcome));
        }
    }
    files.push(write_text(&out.join("refinement.csv"), &csv)?);
    files.push(write_json(&out.join("summary.json"), &json!({ "refinement": runs }))?);
    if let Some(e) = worst {
        e?;
    }
    Ok(Run {
        files,
        summary: format!("refinement over {schedule:?}"),
    })
}

fn solve_scan(
    config: &ExperimentConfig,
    out: &Path,
    n: Option<usize>,
    scan: &crate::config::ScanConfig,
) -> Result<Run, CliError> {
    let eps_list = if scan.eps.is_empty() { vec![config.options().eps] } else { scan.eps.clone() };
    let mut csv = String::from("eps,p,lambda1_factor,lambda1,lambda,status,sup_norm,iterations\n");
    let mut rows = Vec::new();
    for &eps in &eps_list {
        for &p in &scan.p {
            let base = config.spec_with(n, Some(p), Some(eps), Some(LambdaConfig::Value(0.0)))?;
            let options = EigenOptions { eps, ..EigenOptions::default() };
            let lambda1 = first_eigenvalue_on(&base.weight, p, base.grid.clone(), &options)?.lambda1;
            for &factor in &scan.lambda1_factors {
                let spec = base.clone().with_lambda(factor * lambda1)?;
                let outcome = solve_once(&spec)?;
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{},{}",
                    fmt17(eps),
                    fmt17(p),
                    fmt17(factor),
                    fmt17(lambda1),
                    fmt17(spec.lambda),
                    status_str(outcome.status),
                    fmt17(outcome.field.sup_norm()),
                    outcome.iterations
                );
                rows.push(json!({
                    "eps": eps, "p": p, "lambda1_factor": factor, "lambda1": lambda1,
                    "lambda": spec.lambda, "status": outcome.status, "iterations": outcome.iterations,
                }));
            }
        }
    }
    let files = vec![
        write_text(&out.join("scan.csv"), &csv)?,
        write_json(&out.join("summary.json"), &json!({ "scan": rows }))?,
    ];
    Ok(Run {
        files,
        summary: format!("{} scan runs", rows.len()),
    })
}

fn probe(config: &ExperimentConfig, spec: &ProblemSpec, outcome: &SolveOutcome, out: &Path) -> Result<PathBuf, CliError> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(config.seed);
    let scale = 1.0 + outcome.field.sup_norm();
    let count = config.problem()?.probe_starts;
    let mut starts = vec![GridField::zeros(spec.grid.clone(), FieldKind::V)];
    for _ in 1..count {
        let values: Vec<f64> = (0..spec.grid.len())
            .map(|i| if spec.grid.is_dirichlet(i) { 0.0 } else { rng.random_range(0.0..2.0 * scale) })
            .collect();
        starts.push(GridField::new(spec.grid.clone(), values, FieldKind::V)?);
    }
    let report = uniqueness_probe(spec, &starts, false)?;
    write_json(&out.join("uniqueness.json"), &serde_json::to_value(&report).map_err(|e| CliError::Output(e.to_string()))?)
}

/// `λ₁(f)` by inverse power iteration.
pub fn eigen(config: &ExperimentConfig, out: &Path, n: Option<usize>) -> Result<Run, CliError> {
    ensure_dir(out)?;
    let spec = config.spec_with(n, None, None, Some(LambdaConfig::Value(0.0)))?;
    let options = EigenOptions { eps: spec.options.eps, ..EigenOptions::default() };
    let result = first_eigenvalue_on(&spec.weight, spec.p, spec.grid.clone(), &options)?;
    let files = vec![
        write_text(&out.join("eigenfield.csv"), &result.eigenfield.to_csv())?,
        write_json(
            &out.join("summary.json"),
            &json!({
                "lambda1": result.lambda1,
                "p": spec.p,
                "n": spec.grid.len(),
                "iterations": result.iterations,
                "history": result.history,
                "field_csv": "eigenfield.csv",
            }),
        )?,
    ];
    Ok(Run {
        files,
        summary: format!("lambda1 = {}", fmt17(result.lambda1)),
    })
}

/// `λ*` by doubling and bisection, then the extremal branch.
pub fn branch(config: &ExperimentConfig, out: &Path, n: Option<usize>) -> Result<Run, CliError> {
    ensure_dir(out)?;
    let spec = config.spec(n)?;
    let b = config.branch.clone();
    let critical = CriticalOptions {
        start: b.as_ref().map(|b| b.start).unwrap_or(1e-2),
        rel_width: b.as_ref().map(|b| b.rel_width).unwrap_or(1e-4),
        ..CriticalOptions::default()
    };
    let trace = critical_lambda_with(&spec, &critical)?;
    let mut files = vec![write_trace(&trace, out)?];
    let extremal_options = ExtremalOptions {
        levels: b.as_ref().map(|b| b.levels).unwrap_or(8),
        r: b.as_ref().and_then(|b| b.r).unwrap_or(f64::INFINITY),
        max_rel_width: critical.rel_width.max(1e-3),
    };
    let ext = extremal_branch(&spec, &trace, &extremal_options)?;
    files.push(write_text(&out.join("extremal.csv"), &ext.extremal.to_csv())?);
    let approach = quasilin::analysis::BranchTrace {
        rows: ext.rows.clone(),
        lambda_lo: trace.lambda_lo,
        lambda_hi: trace.lambda_hi,
        extremal: None,
    };
    files.push(write_text(&out.join("approach.csv"), &approach.to_csv())?);
    let summary = json!({
        "lambda_star": trace.lambda_star(),
        "lambda_lo": trace.lambda_lo,
        "lambda_hi": trace.lambda_hi,
        "relative_width": trace.relative_width(),
        "sup_extrapolated": ext.sup_extrapolated,
        "increment_ratio": ext.ratio,
        "seminorm_bounded": ext.seminorm_bounded,
        "expected_bounded": ext.expected_bounded,
        "predicates": ext.predicates,
        "branch_csv": "branch.csv",
        "approach_csv": "approach.csv",
        "extremal_csv": "extremal.csv",
    });
    files.insert(0, write_json(&out.join("summary.json"), &summary)?);
    Ok(Run {
        files,
        summary: format!("lambda* in [{}, {}]", fmt17(trace.lambda_lo), fmt17(trace.lambda_hi)),
    })
}

/// Minimal solution, then the mountain-pass solution above it.
pub fn mpass(config: &ExperimentConfig, out: &Path, n: Option<usize>) -> Result<Run, CliError> {
    ensure_dir(out)?;
    let spec = config.spec(n)?;
    let low = minimal_solution(&spec)?;
    fail_on(&low)?;
    if !low.is_converged() {
        return Err(CliError::Status(format!("minimal solution {}", status_str(low.status))));
    }
    let high = mountain_pass_solve(&spec, &low.field)?;
    let mut files = write_outcome(&high, out)?;
    files.extend(write_outcome(&low, &out.join("minimal"))?);
    fail_on(&high)?;
    Ok(Run {
        files,
        summary: format!(
            "{}: sup {:.6e} (minimal {:.6e}), J {:.6e} (minimal {:.6e})",
            status_str(high.status),
            high.field.sup_norm(),
            low.field.sup_norm(),
            high.energy.unwrap_or(f64::NAN),
            low.energy.unwrap_or(f64::NAN)
        ),
    })
}

/// Regularity exponents and growth predicates for each `[[exponents]]` row.
pub fn exponents(config: &ExperimentConfig, out: &Path) -> Result<Run, CliError> {
    ensure_dir(out)?;
    if config.exponents.is_empty() {
        return Err(CliError::Config("no [[exponents]] rows".into()));
    }
    let mut reports = Vec::new();
    let mut csv = String::from("m,p,N,r,q,Q,m_bar,p_star,case,k,gradient_case,tau\n");
    for row in &config.exponents {
        let rep = regularity_report(row.inputs())?;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            opt(row.m),
            fmt17(row.p),
            row.n,
            opt(row.r),
            opt(row.q),
            opt(row.big_q),
            fmt17(rep.m_bar),
            fmt17(rep.p_star),
            rep.integrability.map(|c| c.as_str()).unwrap_or(""),
            opt(rep.k),
            rep.gradient.map(|c| c.as_str()).unwrap_or(""),
            opt(rep.tau)
        );
        reports.push(serde_json::to_value(&rep).map_err(|e| CliError::Output(e.to_string()))?);
    }
    let first = reports[0].get("case").cloned().unwrap_or(Value::Null);
    let files = vec![
        write_json(&out.join("summary.json"), &json!({ "reports": reports }))?,
        write_text(&out.join("exponents.csv"), &csv)?,
    ];
    Ok(Run {
        files,
        summary: format!("{} rows, first case {first}", reports.len()),
    })
}
