//! Transfer of a Dirac mass between the `v`-equation and the `u`-equation.

use serde::Serialize;

use crate::error::{Error, Result};

use super::pair::NonlinearityPair;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransferCase {
    /// `μ_s = e^{γ(∞)} α_s`.
    Transfer,
    /// A `v`-side mass leaves no mass on the `u`-side (`α_s = 0`).
    AnnihilateUSide,
    /// A singular mass on the `u`-equation admits no solution.
    ForbidUSide,
    /// A singular mass on the `v`-equation admits no solution (`Λ < ∞`).
    ForbidVSide,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MassTransferRule {
    pub case: TransferCase,
    /// `e^{γ(∞)}`, defined only when `L = ∞` and `β ∈ L¹`.
    pub multiplier: Option<f64>,
    /// The `v`-side mass `c`.
    pub v_mass: f64,
    /// The corresponding `u`-side mass, when the case determines one.
    pub u_mass: Option<f64>,
}

/// Classifies a Dirac mass `c ≥ 0` posed on the `v`-equation.
///
/// Precedence for `c > 0`: `Λ < ∞` forbids the `v`-side; otherwise `L < ∞`
/// forbids the `u`-side; otherwise `β ∉ L¹` annihilates the `u`-side mass;
/// otherwise the mass transfers with multiplier `e^{γ(∞)}`. `c = 0` is the
/// zero-mass transfer for every pair.
pub fn singular_mass_transfer(pair: &NonlinearityPair, c: f64) -> Result<MassTransferRule> {
    if !(c >= 0.0) || !c.is_finite() {
        return Err(Error::validation(format!("Dirac mass must be >= 0, got {c}")));
    }
    let flags = pair.flags();
    let undecided = || Error::precondition("endpoint behaviour of this pair is undecidable");
    let l_finite = flags.l_finite.ok_or_else(undecided)?;
    let in_l1 = flags.beta_in_l1.ok_or_else(undecided)?;
    let lambda_finite = flags.lambda_finite.ok_or_else(undecided)?;
    let multiplier = if !l_finite && in_l1 {
        let gamma = flags.gamma_at_end.ok_or_else(undecided)?;
        Some(gamma.exp().to_f64())
    } else {
        None
    };
    let rule = |case, u_mass| MassTransferRule {
        case,
        multiplier,
        v_mass: c,
        u_mass,
    };
    if c == 0.0 {
        return Ok(rule(TransferCase::Transfer, Some(0.0)));
    }
    Ok(if lambda_finite {
        rule(TransferCase::ForbidVSide, None)
    } else if l_finite {
        rule(TransferCase::ForbidUSide, Some(0.0))
    } else if !in_l1 {
        rule(TransferCase::AnnihilateUSide, Some(0.0))
    } else {
        rule(TransferCase::Transfer, multiplier.map(|m| c / m))
    })
}
