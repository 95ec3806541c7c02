use serde::Serialize;
use serde_json::{json, Value};

use crate::discretization::{GridField, NormReport, ResidualReport};
use crate::nonlinearity::MassTransferRule;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Converged,
    Diverged,
    MaxIter,
    Error,
}

/// Result of a nonlinear solve.
#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub field: GridField,
    pub iterations: usize,
    pub residual: Option<ResidualReport>,
    pub norms: Option<NormReport>,
    /// `u = H(v)` for Dirac solves.
    pub companion: Option<GridField>,
    pub transfer: Option<MassTransferRule>,
    /// `J_λ` of the field, when computed.
    pub energy: Option<f64>,
    /// Set for results whose theory is open (mountain pass with `p ≠ 2`).
    pub experimental: bool,
    pub message: Option<String>,
    pub lambda: f64,
    pub p: f64,
}

impl SolveOutcome {
    pub fn is_converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    /// JSON summary; `csv` is the path of the field dump, if written.
    pub fn to_json(&self, csv: Option<&str>) -> Value {
        let residual = self.residual.as_ref().map(|r| {
            json!({
                "equation": r.equation,
                "sup": r.sup,
                "l1": r.l1,
                "excluded_nodes": r.excluded,
                "excluded_sup": r.excluded_sup,
            })
        });
        let companion = self.companion.as_ref().map(|c| json!({ "sup": c.sup_norm() }));
        json!({
            "status": self.status,
            "iterations": self.iterations,
            "lambda": self.lambda,
            "p": self.p,
            "field_kind": self.field.kind(),
            "sup_norm": self.field.sup_norm(),
            "norms": self.norms,
            "residual": residual,
            "energy": self.energy,
            "companion": companion,
            "mass_transfer": self.transfer,
            "experimental": self.experimental,
            "message": self.message,
            "field_csv": csv,
        })
    }
}
