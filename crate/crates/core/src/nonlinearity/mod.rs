//! The `β ↔ g` dictionary: the change of unknown `Ψ`, its inverse `H`,
//! endpoint classification, and singular-mass transfer.

mod catalog;
mod function;
mod pair;
mod transfer;

pub use catalog::{builtin_catalog, catalog_pair, parse_pair, CatalogId};
pub use function::{ScalarFunction, Table};
pub use pair::{ClosedForm, EndpointFlags, NonlinearityPair, INVERSE_TOL};
pub use transfer::{singular_mass_transfer, MassTransferRule, TransferCase};

use crate::error::Result;

/// `γ(t) = ∫₀ᵗ β`.
pub fn eval_gamma(pair: &NonlinearityPair, t: f64) -> Result<f64> {
    pair.gamma(t)
}

/// `Ψ(u) = ∫₀ᵘ exp(γ/(p−1))`.
pub fn eval_psi(pair: &NonlinearityPair, u: f64) -> Result<f64> {
    pair.psi(u)
}

/// `H(v) = ∫₀ᵛ ds/(1+g(s))`.
pub fn eval_h(pair: &NonlinearityPair, v: f64) -> Result<f64> {
    pair.h(v)
}

pub fn derive_beta_from_g(g: ScalarFunction, p: f64) -> Result<NonlinearityPair> {
    NonlinearityPair::from_g(g, p)
}

pub fn derive_g_from_beta(beta: ScalarFunction, p: f64) -> Result<NonlinearityPair> {
    NonlinearityPair::from_beta(beta, p)
}

pub fn classify_endpoints(pair: &NonlinearityPair) -> EndpointFlags {
    pair.flags()
}

/// Sampled test of `g(s)/s → ∞`: the ratio is nondecreasing over decades of
/// `s` (or toward a finite `Λ`) and grows at least twofold.
pub fn sampled_superlinear(pair: &NonlinearityPair) -> Result<bool> {
    let end = pair.lambda_endpoint();
    let samples: Vec<f64> = if end.is_finite() {
        let l = end.to_f64();
        (1..=8).map(|k| l * (1.0 - 10f64.powi(-k))).collect()
    } else {
        (-1..=8).map(|k| 10f64.powi(k)).collect()
    };
    let mut ratios = Vec::new();
    for s in samples {
        match pair.g(s) {
            Ok(g) if g.is_finite() => ratios.push(g / s),
            _ => break,
        }
    }
    if ratios.len() < 3 {
        return Ok(false);
    }
    let monotone = ratios.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12));
    Ok(monotone && ratios[ratios.len() - 1] >= 2.0 * ratios[0])
}

/// Sampled convexity of `g` on the top decade `[S/10, S]`, where `S` is the
/// largest power of ten (at most `10⁸`) with `g(S)` finite.
pub fn sampled_convex_near_infinity(pair: &NonlinearityPair) -> Result<bool> {
    let end = pair.lambda_endpoint();
    let mut top = None;
    for k in (0..=8).rev() {
        let s = 10f64.powi(k);
        if end.contains(s) && pair.g(s).map(f64::is_finite).unwrap_or(false) {
            top = Some(s);
            break;
        }
    }
    let Some(top) = top else { return Ok(false) };
    let count = 41;
    let lo = 0.1 * top;
    let h = (top - lo) / (count - 1) as f64;
    let vals = (0..count).map(|k| pair.g(lo + h * k as f64)).collect::<Result<Vec<_>>>()?;
    Ok(vals
        .windows(3)
        .all(|w| w[2] - 2.0 * w[1] + w[0] >= -1e-10 * (1.0 + w[1].abs())))
}
