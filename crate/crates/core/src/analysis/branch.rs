use std::fmt::Write as _;

use serde::Serialize;

use crate::discretization::{fmt17, FieldKind, GridField};
use crate::error::{Error, Result};
use crate::nonlinearity::{sampled_convex_near_infinity, sampled_superlinear, ClosedForm};
use crate::solver::{minimal_solution, minimal_solution_from, ProblemSpec, SolveOutcome, SolveStatus};

use super::exponents::{admissibility_predicates, RegularityReport};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BranchRow {
    pub lambda: f64,
    pub status: SolveStatus,
    pub sup_norm: f64,
    pub w1p_seminorm: f64,
    pub iterations: usize,
}

impl BranchRow {
    fn from_outcome(out: &SolveOutcome) -> Self {
        BranchRow {
            lambda: out.lambda,
            status: out.status,
            sup_norm: out.field.sup_norm(),
            w1p_seminorm: out.norms.as_ref().map(|n| n.w1p_seminorm).unwrap_or(f64::NAN),
            iterations: out.iterations,
        }
    }
}

/// Probes of the minimal-solution branch and the bracket `[λ_lo, λ_hi]` on
/// `λ*`: every probe at or below `λ_lo` converged, every probe at or above
/// `λ_hi` did not.
#[derive(Clone, Debug)]
pub struct BranchTrace {
    pub rows: Vec<BranchRow>,
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub extremal: Option<GridField>,
}

impl BranchTrace {
    pub fn lambda_star(&self) -> f64 {
        0.5 * (self.lambda_lo + self.lambda_hi)
    }

    pub fn relative_width(&self) -> f64 {
        (self.lambda_hi - self.lambda_lo) / self.lambda_hi
    }

    /// Columns `lambda,status,sup_norm,w1p_seminorm,iterations`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,status,sup_norm,w1p_seminorm,iterations\n");
        for r in &self.rows {
            let status = serde_json::to_value(r.status).ok().and_then(|v| v.as_str().map(String::from));
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                fmt17(r.lambda),
                status.unwrap_or_default(),
                fmt17(r.sup_norm),
                fmt17(r.w1p_seminorm),
                r.iterations
            );
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalOptions {
    /// First probe.
    pub start: f64,
    /// Bisection stops at `(λ_hi − λ_lo)/λ_hi` below this.
    pub rel_width: f64,
    pub max_doublings: usize,
}

impl Default for CriticalOptions {
    fn default() -> Self {
        CriticalOptions {
            start: 1e-2,
            rel_width: 1e-4,
            max_doublings: 64,
        }
    }
}

pub fn critical_lambda(spec: &ProblemSpec) -> Result<BranchTrace> {
    critical_lambda_with(spec, &CriticalOptions::default())
}

/// Doubling search for the first `λ` without a minimal solution, then
/// bisection. Each converged probe warm-starts the next one above it.
pub fn critical_lambda_with(spec: &ProblemSpec, options: &CriticalOptions) -> Result<BranchTrace> {
    spec.validate()?;
    let pair = &spec.pair;
    if pair.closed_form() == Some(ClosedForm::Linear) && pair.u_weight().is_none() {
        return Err(Error::precondition(
            "g(v) = v has threshold lambda_1(f); use the first eigenvalue instead",
        ));
    }
    if pair.lambda_endpoint().is_finite() {
        return Err(Error::precondition("lambda* search needs Lambda = inf"));
    }
    if !sampled_superlinear(pair)? {
        return Err(Error::precondition("g(s)/s does not grow without bound on the samples"));
    }
    if !sampled_convex_near_infinity(pair)? {
        return Err(Error::precondition("g is not convex on the top sampled decade"));
    }
    if !(options.start > 0.0) || !(options.rel_width > 0.0) {
        return Err(Error::validation("start and rel_width must be positive"));
    }
    let mut rows = Vec::new();
    let mut below: Option<SolveOutcome> = None;
    let probe = |lambda: f64, below: &Option<SolveOutcome>| -> Result<SolveOutcome> {
        let s = spec.clone().with_lambda(lambda)?;
        match below {
            Some(b) => minimal_solution_from(&s, &b.field),
            None => minimal_solution(&s),
        }
    };
    let mut lo = 0.0;
    let mut hi = None;
    let mut lambda = options.start;
    for _ in 0..options.max_doublings {
        let out = probe(lambda, &below)?;
        rows.push(BranchRow::from_outcome(&out));
        if out.is_converged() {
            lo = lambda;
            below = Some(out);
            lambda *= 2.0;
        } else {
            hi = Some(lambda);
            break;
        }
    }
    let mut hi = hi.ok_or_else(|| Error::solver("no divergence found while doubling lambda"))?;
    while (hi - lo) / hi > options.rel_width {
        let mid = 0.5 * (lo + hi);
        let out = probe(mid, &below)?;
        rows.push(BranchRow::from_outcome(&out));
        if out.is_converged() {
            lo = mid;
            below = Some(out);
        } else {
            hi = mid;
        }
    }
    rows.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    Ok(BranchTrace {
        rows,
        lambda_lo: lo,
        lambda_hi: hi,
        extremal: below.map(|b| b.field),
    })
}

/// Approach to the extremal function along `λ_j = λ*(1 − 2^{−j})`.
#[derive(Clone, Debug)]
pub struct ExtremalReport {
    pub lambda_star: f64,
    pub rows: Vec<BranchRow>,
    /// Nodewise extrapolation of the last three minimal solutions.
    pub extremal: GridField,
    pub sup_extrapolated: f64,
    /// Estimated ratio of successive sup-norm increments.
    pub ratio: f64,
    /// Whether the `W^{1,p}` seminorms settle along the approach.
    pub seminorm_bounded: bool,
    /// Boundedness predicted by the integrability predicates, or by `N < p`.
    pub expected_bounded: Option<bool>,
    pub predicates: Option<RegularityReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtremalOptions {
    /// Number of levels `J`.
    pub levels: usize,
    /// `f ∈ L^r`.
    pub r: f64,
    /// Refuse brackets wider than this, relatively.
    pub max_rel_width: f64,
}

impl Default for ExtremalOptions {
    fn default() -> Self {
        ExtremalOptions {
            levels: 8,
            r: f64::INFINITY,
            max_rel_width: 1e-3,
        }
    }
}

pub fn extremal_branch(spec: &ProblemSpec, trace: &BranchTrace, options: &ExtremalOptions) -> Result<ExtremalReport> {
    if !(trace.lambda_lo > 0.0) || trace.relative_width() > options.max_rel_width {
        return Err(Error::precondition(format!(
            "lambda* bracket [{}, {}] is wider than {} relative",
            trace.lambda_lo, trace.lambda_hi, options.max_rel_width
        )));
    }
    if options.levels < 3 {
        return Err(Error::validation("extrapolation needs at least three levels"));
    }
    let star = trace.lambda_lo;
    let mut rows = Vec::new();
    let mut fields: Vec<GridField> = Vec::new();
    for j in 1..=options.levels {
        let lambda = star * (1.0 - 0.5f64.powi(j as i32));
        let s = spec.clone().with_lambda(lambda)?;
        let out = match fields.last() {
            Some(prev) => minimal_solution_from(&s, prev)?,
            None => minimal_solution(&s)?,
        };
        rows.push(BranchRow::from_outcome(&out));
        if !out.is_converged() {
            return Err(Error::solver(format!("no minimal solution at lambda = {lambda}")));
        }
        fields.push(out.field);
    }
    let sups: Vec<f64> = rows.iter().map(|r| r.sup_norm).collect();
    let l = sups.len();
    let (d1, d2) = (sups[l - 2] - sups[l - 3], sups[l - 1] - sups[l - 2]);
    let ratio = if d1 > 0.0 { d2 / d1 } else { 0.0 };
    let (a, b) = (&fields[l - 2], &fields[l - 1]);
    let gain = if ratio > 0.0 && ratio < 1.0 { ratio / (1.0 - ratio) } else { 0.0 };
    let values: Vec<f64> = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| y + gain * (y - x))
        .collect();
    let extremal = GridField::new(b.grid().clone(), values, FieldKind::V)?;
    let semis: Vec<f64> = rows.iter().map(|r| r.w1p_seminorm).collect();
    let (e1, e2) = (semis[l - 2] - semis[l - 3], semis[l - 1] - semis[l - 2]);
    let seminorm_bounded = e2 <= 1e-3 * semis[l - 1] || (e1 > 0.0 && e2 / e1 < 0.9);
    let dim = spec.grid.dim();
    let p = spec.p;
    let (expected_bounded, predicates) = if (dim as f64) < p {
        (Some(true), None)
    } else if (dim as f64) == p {
        (None, None)
    } else {
        let rep = admissibility_predicates(p, dim, options.r, None, None)?;
        let w1p = rep.limi_w1p.map(|x| x.holds).unwrap_or(false);
        (if w1p { Some(true) } else { None }, Some(rep))
    };
    Ok(ExtremalReport {
        lambda_star: star,
        rows,
        sup_extrapolated: extremal.sup_norm(),
        extremal,
        ratio,
        seminorm_bounded,
        expected_bounded,
        predicates,
    })
}
