//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p quasilin --test acceptance`.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use quasilin::analysis::{critical_lambda, extremal_branch, first_eigenvalue, ExtremalOptions};
use quasilin::discretization::{
    build_grid, energy_functional, residual, seminorm, FieldKind, GridField, PLaplacian, RadialDomain, RadialGrid,
};
use quasilin::nonlinearity::{catalog_pair, CatalogId, ScalarFunction};
use quasilin::solver::{
    dirac_solve, inner_solve, minimal_solution, mountain_pass_solve, transform_solution, Direction, ProblemSpec,
    SolveStatus,
};

type Outcome = Result<String, String>;

fn interval() -> RadialDomain {
    RadialDomain::interval(0.0, 1.0).unwrap()
}

fn bratu(n: usize, lambda: f64) -> ProblemSpec {
    ProblemSpec::new(interval(), n, lambda, catalog_pair(CatalogId::Ex5, 2.0, None).unwrap()).unwrap()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit: Duration, detail: String) -> Outcome {
    check(elapsed < limit, format!("{detail}; {:.2?} of {limit:?}", elapsed))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn dictionary_fidelity() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut samples = 0;
    for id in [CatalogId::Ex1, CatalogId::Ex2, CatalogId::Ex3, CatalogId::Ex4, CatalogId::Ex5, CatalogId::Ex6] {
        let pair = catalog_pair(id, 2.0, None).map_err(|e| e.to_string())?;
        let numeric = pair.numeric_from_g().map_err(|e| e.to_string())?;
        match (pair.l_endpoint().finite(), numeric.l_endpoint().finite()) {
            (Some(a), Some(b)) => worst = worst.max(rel(b, a)),
            (None, None) => {}
            (a, b) => return Err(format!("{id:?}: L is {a:?} closed, {b:?} by quadrature")),
        }
        let top = pair.l_endpoint().finite().map(|l| 0.95 * l).unwrap_or(5.0);
        for k in 1..=40 {
            let u = top * k as f64 / 40.0;
            let e = |r: quasilin::Result<f64>| r.map_err(|e| format!("{id:?} at u = {u}: {e}"));
            let v = e(pair.psi(u))?;
            let beta = e(pair.beta(u))?;
            let from_g = (pair.p() - 1.0) * e(pair.g_prime(v))?;
            let back = e(pair.h(v))?;
            let psi_q = e(pair.psi_quadrature(u))?;
            let h_q = e(pair.h_quadrature(v))?;
            let beta_n = e(numeric.beta(u))?;
            for (a, b) in [(beta, from_g), (back, u), (v, psi_q), (u, h_q), (beta, beta_n)] {
                let err = if b.abs() > 1e-12 { rel(a, b) } else { (a - b).abs() };
                worst = worst.max(err);
            }
            samples += 1;
        }
    }
    let detail = format!("{samples} samples over six pairs, worst relative deviation {worst:.2e} (limit 1e-6)");
    if worst > 1e-6 {
        return Err(detail);
    }
    within(start.elapsed(), Duration::from_secs(5), detail)
}

fn threshold() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;
    for eps in [1e-10, 1e-8] {
        for p in [1.5, 2.0, 3.0] {
            let lambda1 = first_eigenvalue(&ScalarFunction::Constant(1.0), p, interval(), 401)
                .map_err(|e| e.to_string())?
                .lambda1;
            if p == 2.0 && eps == 1e-10 {
                let dev = rel(lambda1, PI * PI);
                ok &= dev < 5e-3;
                notes.push(format!("λ₁(p=2) = {lambda1:.6} ({:.3}% from π²)", 100.0 * dev));
            }
            let pair = catalog_pair(CatalogId::LinearG, p, None).unwrap();
            for (factor, want) in [(0.95, SolveStatus::Converged), (1.05, SolveStatus::Diverged)] {
                let spec = ProblemSpec::new(interval(), 401, factor * lambda1, pair.clone())
                    .and_then(|s| s.with_eps(eps))
                    .map_err(|e| e.to_string())?;
                let status = minimal_solution(&spec).map_err(|e| e.to_string())?.status;
                if status != want {
                    ok = false;
                    notes.push(format!("p={p} ε={eps:e} at {factor}·λ₁: {status:?}"));
                }
            }
        }
    }
    notes.push("p ∈ {1.5, 2, 3}, ε ∈ {1e-10, 1e-8}: converged at 0.95·λ₁, diverged at 1.05·λ₁".into());
    if !ok {
        return Err(notes.join("; "));
    }
    within(start.elapsed(), Duration::from_secs(60), notes.join("; "))
}

fn critical_parameter() -> Outcome {
    let (oracle, _) = common::bratu_turning_point();
    let start = Instant::now();
    let trace = critical_lambda(&bratu(401, 1.0)).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let (lo, hi) = (trace.lambda_lo, trace.lambda_hi);
    let inside = |x: f64| (3.5128..=3.5148).contains(&x);
    let detail = format!(
        "λ* ∈ [{lo:.6}, {hi:.6}] at n = 401, shooting oracle {oracle:.9}, window [3.5128, 3.5148]"
    );
    if !(inside(lo) && inside(hi) && inside(oracle)) {
        return Err(detail);
    }
    within(elapsed, Duration::from_secs(300), detail)
}

fn correspondence() -> Outcome {
    let mut sups = Vec::new();
    for n in [101, 201, 401] {
        let spec = bratu(n, 1.0);
        let v = minimal_solution(&spec).map_err(|e| e.to_string())?;
        if !v.is_converged() {
            return Err(format!("minimal solution at n = {n}: {:?}", v.status));
        }
        let u = transform_solution(&v.field, &spec.pair, Direction::VToU).map_err(|e| e.to_string())?;
        sups.push(residual(&u, &spec).map_err(|e| e.to_string())?.sup);
    }
    let factors: Vec<f64> = sups.windows(2).map(|w| w[0] / w[1]).collect();
    check(
        factors.iter().all(|f| *f >= 1.8),
        format!(
            "u-residual sups [{}] over n = 101, 201, 401; factors {factors:.2?} (need >= 1.8)",
            sups.iter().map(|s| format!("{s:.2e}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

/// `ω_N r^{N−1} φ(U'(r))` at node `k` by a centered difference.
fn node_flux(field: &GridField, k: usize, p: f64) -> f64 {
    let grid = field.grid();
    let (h, r) = (grid.spacing(), grid.nodes()[k]);
    let u = field.values();
    let slope = (u[k + 1] - u[k - 1]) / (2.0 * h);
    grid.angular_factor() * r.powi(grid.dim() as i32 - 1) * slope.abs().powf(p - 2.0) * slope
}

fn singular_multiplicity() -> Outcome {
    let ball = RadialDomain::ball(1.0, 3).unwrap();
    let lambda1 = first_eigenvalue(&ScalarFunction::Constant(1.0), 2.0, ball, 801)
        .map_err(|e| e.to_string())?
        .lambda1;
    let pair = catalog_pair(CatalogId::LinearG, 2.0, None).unwrap();
    let (mut sv, mut su) = (Vec::new(), Vec::new());
    let mut flux = f64::NAN;
    for n in [201, 401, 801] {
        let spec = ProblemSpec::new(ball, n, 0.1 * lambda1, pair.clone())
            .and_then(|s| s.with_dirac(1.0))
            .map_err(|e| e.to_string())?;
        let out = dirac_solve(&spec).map_err(|e| e.to_string())?;
        if !out.is_converged() {
            return Err(format!("Dirac solve at n = {n}: {:?} {:?}", out.status, out.message));
        }
        let u = out.companion.ok_or("no companion u-field")?;
        sv.push(seminorm(out.field.values(), &spec.grid, 2.0));
        su.push(seminorm(u.values(), &spec.grid, 2.0));
        if n == 801 {
            // r_3 = 3h
            flux = node_flux(&u, 3, 2.0).abs();
        }
    }
    let growth: Vec<f64> = sv.windows(2).map(|w| w[1] / w[0]).collect();
    let (lo, hi) = su.iter().fold((f64::MAX, f64::MIN), |(a, b), x| (a.min(*x), b.max(*x)));
    let spread = (hi - lo) / lo;
    check(
        growth.iter().all(|g| *g >= 1.3) && spread <= 0.05 && flux < 0.05,
        format!(
            "|v_s| seminorm {sv:.3?} (growth {growth:.3?}, need >= 1.3); |u_s| seminorm {su:.4?} (spread {:.2}%, need <= 5%); u_s flux at r = 3h, n = 801: {flux:.4} (need < 0.05)",
            100.0 * spread
        ),
    )
}

fn second_solution() -> Outcome {
    let (low_oracle, high_oracle) = common::bratu_roots(1.0);
    let start = Instant::now();
    let spec = bratu(401, 1.0);
    let low = minimal_solution(&spec).map_err(|e| e.to_string())?;
    let high = mountain_pass_solve(&spec, &low.field).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if !high.is_converged() {
        return Err(format!("mountain pass: {:?} {:?}", high.status, high.message));
    }
    let j_low = energy_functional(&low.field, &spec).map_err(|e| e.to_string())?;
    let j_high = energy_functional(&high.field, &spec).map_err(|e| e.to_string())?;
    let (s_low, s_high) = (low.field.sup_norm(), high.field.sup_norm());
    let dev = rel(s_high, high_oracle);
    let detail = format!(
        "sup {s_high:.6} vs oracle {high_oracle:.6} ({dev:.1e} rel); minimal sup {s_low:.6} (oracle {low_oracle:.6}); J {j_high:.4} > {j_low:.4}"
    );
    if !(dev <= 1e-2 && high.field.sup_distance(&low.field) > 1e-2 && j_high > j_low) {
        return Err(detail);
    }
    within(elapsed, Duration::from_secs(600), detail)
}

fn exponent_table() -> Outcome {
    let rows = common::check_golden_table()?;
    check(rows >= 20, format!("{rows} golden rows, case tags exact, exponents to 1e-12"))
}

fn random_field(rng: &mut ChaCha8Rng, grid: &RadialGrid, amplitude: f64) -> Vec<f64> {
    (0..grid.len())
        .map(|i| if grid.is_dirichlet(i) { 0.0 } else { rng.random_range(-amplitude..amplitude) })
        .collect()
}

fn operator_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let grids = [
        Arc::new(build_grid(interval(), 41).unwrap()),
        Arc::new(build_grid(RadialDomain::ball(1.0, 3).unwrap(), 41).unwrap()),
    ];
    let mut worst_ibp: f64 = 0.0;
    let mut comparisons = 0;
    for p in [1.5, 2.0, 3.0] {
        let op = PLaplacian::new(p, 1e-10).unwrap();
        for trial in 0..1000 {
            let grid = &grids[trial % 2];
            let u = random_field(&mut rng, grid, 2.0);
            let w = random_field(&mut rng, grid, 2.0);
            let au = op.apply_values(grid, &u, 0.0);
            let fluxes = op.fluxes(grid, &u);
            let lhs: f64 = grid.active().map(|i| grid.volumes()[i] * au[i] * w[i]).sum();
            let rhs: f64 = fluxes.iter().enumerate().map(|(i, f)| f * (w[i + 1] - w[i])).sum();
            let scale: f64 = 1.0 + fluxes.iter().map(|f| f.abs()).sum::<f64>();
            worst_ibp = worst_ibp.max((lhs - rhs).abs() / scale);

            let f: Vec<f64> = (0..grid.len()).map(|_| rng.random_range(0.0..5.0)).collect();
            let g: Vec<f64> = f.iter().map(|x| x + rng.random_range(0.0..5.0)).collect();
            let a = inner_solve(&GridField::new(grid.clone(), f, FieldKind::Generic).unwrap(), p, 0.0);
            let b = inner_solve(&GridField::new(grid.clone(), g, FieldKind::Generic).unwrap(), p, 0.0);
            let (a, b) = match (a, b) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => return Err(format!("inner solve failed for p = {p}: {e}")),
            };
            let tol = 1e-9 * (1.0 + b.sup_norm());
            if a.values().iter().zip(b.values()).any(|(x, y)| *x > y + tol) {
                return Err(format!("comparison violated for p = {p}, trial {trial}"));
            }
            comparisons += 1;
        }
    }
    if worst_ibp > 1e-12 {
        return Err(format!("summation by parts off by {worst_ibp:.2e}"));
    }
    let sizes = [51, 101, 201, 401];
    let o2 = common::observed_order(&sizes, &common::manufactured_errors(2.0, &sizes));
    let o3 = common::observed_order(&sizes, &common::manufactured_errors(3.0, &sizes));
    check(
        (o2 - 2.0).abs() <= 0.1 && o3 >= 0.9,
        format!(
            "summation by parts on 3000 fields (worst {worst_ibp:.1e}), comparison on {comparisons} ordered pairs; manufactured orders {o2:.3} (p=2), {o3:.3} (p=3)"
        ),
    )
}

fn extremal() -> Outcome {
    let (_, alpha_star) = common::bratu_turning_point();
    let spec = bratu(401, 1.0);
    let trace = critical_lambda(&spec).map_err(|e| e.to_string())?;
    let report = extremal_branch(&spec, &trace, &ExtremalOptions::default()).map_err(|e| e.to_string())?;
    let sups: Vec<f64> = report.rows.iter().map(|r| r.sup_norm).collect();
    let increasing = sups.windows(2).all(|w| w[1] > w[0]);
    let dev = rel(report.sup_extrapolated, alpha_star);
    // condition (iii) with f bounded: N < p p'/(1 + 1/((p−1) r)), r = ∞
    let (p, n) = (spec.p, spec.grid.dim() as f64);
    let predicted = n < p * p / (p - 1.0);
    let bounded_ok = !predicted || report.seminorm_bounded;
    check(
        increasing && dev <= 1e-2 && bounded_ok,
        format!(
            "sup norms {:.4?} → extrapolated {:.5} vs turning point {alpha_star:.5} ({:.2}%); predicate predicts bounded: {predicted}, seminorms bounded: {}",
            sups,
            report.sup_extrapolated,
            100.0 * dev,
            report.seminorm_bounded
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("dictionary fidelity", dictionary_fidelity),
        ("threshold", threshold),
        ("critical parameter", critical_parameter),
        ("correspondence", correspondence),
        ("singular multiplicity", singular_multiplicity),
        ("second solution", second_solution),
        ("exponent calculator", exponent_table),
        ("operator properties", operator_properties),
        ("extremal branch", extremal),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail})", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
