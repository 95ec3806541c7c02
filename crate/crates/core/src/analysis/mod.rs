//! The spectral threshold, the critical parameter and its extremal branch,
//! exponent bookkeeping, and a multi-start uniqueness probe.

mod branch;
mod eigen;
mod exponents;
mod uniqueness;

pub use branch::{
    critical_lambda, critical_lambda_with, extremal_branch, BranchRow, BranchTrace, CriticalOptions,
    ExtremalOptions, ExtremalReport,
};
pub use eigen::{first_eigenvalue, first_eigenvalue_on, rayleigh_quotient, EigenOptions, EigenResult};
pub use exponents::{
    admissibility_predicates, conjugate, k_exponent, m_bar, regularity_exponents, report, tau_exponent,
    GradientCase, IntegrabilityCase, Predicate, RegularityInputs, RegularityReport,
};
pub use uniqueness::{uniqueness_probe, ProbeRun, UniquenessReport};
