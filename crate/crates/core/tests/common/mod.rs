#![allow(dead_code)]

//! Shooting oracle for the one-dimensional Bratu problem
//! `−v'' = λ e^v` on `(0, 1)`, `v(0) = v(1) = 0`.
//!
//! With `w'' = −e^w`, `w(0) = α`, `w'(0) = 0`, the symmetric solution is
//! `v(x) = w(√λ (x − ½))`, so `λ(α) = (2 s₀)²` where `w(s₀) = 0`.

fn rk4(y: [f64; 2], ds: f64) -> [f64; 2] {
    let f = |y: [f64; 2]| [y[1], -y[0].exp()];
    let k1 = f(y);
    let k2 = f([y[0] + 0.5 * ds * k1[0], y[1] + 0.5 * ds * k1[1]]);
    let k3 = f([y[0] + 0.5 * ds * k2[0], y[1] + 0.5 * ds * k2[1]]);
    let k4 = f([y[0] + ds * k3[0], y[1] + ds * k3[1]]);
    [
        y[0] + ds / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + ds / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// First zero of `w` started at `w(0) = α`, located by a secant step on the
/// last RK4 interval followed by a short refinement.
pub fn zero_crossing(alpha: f64) -> f64 {
    let ds = 1e-4;
    let mut s = 0.0;
    let mut y = [alpha, 0.0];
    loop {
        let next = rk4(y, ds);
        if next[0] <= 0.0 {
            // refine inside [s, s + ds] by bisection on the step length
            let (mut lo, mut hi) = (0.0, ds);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if rk4(y, mid)[0] > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return s + 0.5 * (lo + hi);
        }
        y = next;
        s += ds;
    }
}

pub fn bratu_lambda(alpha: f64) -> f64 {
    let s0 = zero_crossing(alpha);
    4.0 * s0 * s0
}

/// `(λ*, α*)`: the maximum of `λ(α)` by golden-section search.
pub fn bratu_turning_point() -> (f64, f64) {
    let phi = 0.5 * (5.0_f64.sqrt() - 1.0);
    let (mut a, mut b) = (0.5, 2.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (bratu_lambda(c), bratu_lambda(d));
    while b - a > 1e-7 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = bratu_lambda(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = bratu_lambda(d);
        }
    }
    let alpha = 0.5 * (a + b);
    (bratu_lambda(alpha), alpha)
}

/// The two sup norms `α` with `λ(α) = λ`, for `0 < λ < λ*`.
pub fn bratu_roots(lambda: f64) -> (f64, f64) {
    let (_, alpha_star) = bratu_turning_point();
    let solve = |mut lo: f64, mut hi: f64, rising: bool| {
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let below = bratu_lambda(mid) < lambda;
            if below == rising {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    (solve(0.0, alpha_star, true), solve(alpha_star, 20.0, false))
}

use std::f64::consts::PI;
use std::sync::Arc;

use quasilin::analysis::{report, RegularityInputs};
use quasilin::discretization::{build_grid, FieldKind, GridField, RadialDomain};
use quasilin::solver::inner_solve;

/// Sup errors of the discrete solution of `−Δ_p U = F` with
/// `U = sin(πx)` on `(0, 1)`, for each grid size.
pub fn manufactured_errors(p: f64, sizes: &[usize]) -> Vec<f64> {
    // −(|U'|^{p−2}U')' = (p−1) π^p |cos πx|^{p−2} sin πx
    let source = move |x: f64| (p - 1.0) * PI.powf(p) * (PI * x).cos().abs().powf(p - 2.0) * (PI * x).sin();
    sizes
        .iter()
        .map(|&n| {
            let grid = Arc::new(build_grid(RadialDomain::interval(0.0, 1.0).unwrap(), n).unwrap());
            let f = GridField::from_fn(grid, FieldKind::Generic, source).unwrap();
            let u = inner_solve(&f, p, 0.0).unwrap();
            u.grid()
                .nodes()
                .iter()
                .zip(u.values())
                .map(|(x, v)| (v - (PI * x).sin()).abs())
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Least-squares slope of `log e` against `log h`.
pub fn observed_order(sizes: &[usize], errors: &[f64]) -> f64 {
    let xs: Vec<f64> = sizes.iter().map(|&n| (1.0 / (n - 1) as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

const GOLDEN_TABLE: &str = include_str!("../data/exponents_golden.csv");

fn number(s: &str) -> Option<f64> {
    match s {
        "" => None,
        "inf" => Some(f64::INFINITY),
        _ => Some(s.parse().unwrap()),
    }
}

fn flag(s: &str) -> bool {
    s == "true"
}

fn close(a: Option<f64>, b: Option<f64>, what: &str, line: usize) -> Result<(), String> {
    let ok = match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) if x.is_infinite() || y.is_infinite() => x == y,
        (Some(x), Some(y)) => (x - y).abs() <= 1e-12 * y.abs().max(1.0),
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(format!("line {line} {what}: {a:?} vs {b:?}"))
    }
}

fn same<T: PartialEq + std::fmt::Debug>(a: T, b: T, what: &str, line: usize) -> Result<(), String> {
    if a == b {
        Ok(())
    } else {
        Err(format!("line {line} {what}: {a:?} vs {b:?}"))
    }
}

/// Checks every row of the golden exponent table; returns the row count.
pub fn check_golden_table() -> Result<usize, String> {
    let mut lines = GOLDEN_TABLE.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let mut rows = 0;
    for (line, text) in lines.enumerate() {
        let cells: Vec<&str> = text.split(',').collect();
        let get = |name: &str| cells[col(name)];
        let inputs = RegularityInputs {
            m: number(get("m")),
            p: number(get("p")).unwrap(),
            n: number(get("N")).unwrap() as usize,
            r: number(get("r")),
            q: number(get("q")),
            big_q: number(get("Q")),
        };
        let rep = report(inputs).map_err(|e| e.to_string())?;
        let line = line + 2;
        close(Some(rep.m_bar), number(get("m_bar")), "m_bar", line)?;
        close(Some(rep.p_star), number(get("p_star")), "p_star", line)?;
        same(rep.integrability.unwrap().as_str(), get("case"), "case", line)?;
        close(rep.k, number(get("k")), "k", line)?;
        same(rep.gradient.unwrap().as_str(), get("gradient_case"), "gradient_case", line)?;
        close(rep.tau, number(get("tau")), "tau", line)?;
        let maja = rep.maja.unwrap();
        close(Some(maja.lhs), number(get("maja_lhs")), "maja", line)?;
        same(maja.holds, flag(get("maja_holds")), "maja", line)?;
        let majet = rep.majet.unwrap();
        close(Some(majet.lhs), number(get("majet_lhs")), "majet", line)?;
        same(majet.holds, flag(get("majet_holds")), "majet", line)?;
        let w1p = rep.limi_w1p.unwrap();
        close(Some(w1p.rhs), number(get("limi_w1p_rhs")), "limi_w1p", line)?;
        same(w1p.holds, flag(get("limi_w1p_holds")), "limi_w1p", line)?;
        let iii = rep.limi_iii.unwrap();
        close(Some(iii.rhs), number(get("limi_iii_rhs")), "limi_iii", line)?;
        same(iii.holds, flag(get("limi_iii_holds")), "limi_iii", line)?;
        rows += 1;
    }
    Ok(rows)
}
