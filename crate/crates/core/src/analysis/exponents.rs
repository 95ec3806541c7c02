//! Exponent bookkeeping for `−Δ_p U = F` with `F ∈ L^m`, and the growth and
//! integrability predicates on `g` and `f ∈ L^r`.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum IntegrabilityCase {
    /// `U^{p−1} ∈ L^k`, `k = Nm/(N − pm)`.
    Lk,
    /// `U^{p−1} ∈ L^k` for every finite `k`.
    AllLk,
    #[serde(rename = "Linfinity")]
    LInfinity,
    NotCovered,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GradientCase {
    /// `|∇U|^{p−1} ∈ L^τ`, `τ = Nm/(N − m)`.
    #[serde(rename = "Ltau")]
    LTau,
    W1p,
    NotCovered,
}

impl IntegrabilityCase {
    pub fn as_str(self) -> &'static str {
        match self {
            IntegrabilityCase::Lk => "Lk",
            IntegrabilityCase::AllLk => "AllLk",
            IntegrabilityCase::LInfinity => "Linfinity",
            IntegrabilityCase::NotCovered => "NotCovered",
        }
    }
}

impl GradientCase {
    pub fn as_str(self) -> &'static str {
        match self {
            GradientCase::LTau => "Ltau",
            GradientCase::W1p => "W1p",
            GradientCase::NotCovered => "NotCovered",
        }
    }
}

/// One strict inequality `lhs < rhs`, together with the range condition on
/// its growth parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Predicate {
    pub lhs: f64,
    pub rhs: f64,
    pub in_range: bool,
    pub holds: bool,
}

impl Predicate {
    fn new(lhs: f64, rhs: f64, in_range: bool) -> Self {
        Predicate {
            lhs,
            rhs,
            in_range,
            holds: in_range && lhs < rhs,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegularityInputs {
    pub m: Option<f64>,
    pub p: f64,
    pub n: usize,
    /// `f ∈ L^r`; `f64::INFINITY` for bounded `f`.
    pub r: Option<f64>,
    /// Growth `g(τ) ≲ τ^q`.
    pub q: Option<f64>,
    /// Growth `g^{p−1}(τ) ≲ τ^Q`.
    #[serde(rename = "Q")]
    pub big_q: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularityReport {
    pub inputs: RegularityInputs,
    pub m_bar: f64,
    pub p_star: f64,
    pub p_prime: f64,
    pub r_prime: Option<f64>,
    #[serde(rename = "case")]
    pub integrability: Option<IntegrabilityCase>,
    pub k: Option<f64>,
    #[serde(rename = "gradient_case")]
    pub gradient: Option<GradientCase>,
    pub tau: Option<f64>,
    pub maja: Option<Predicate>,
    pub majet: Option<Predicate>,
    pub limi_w1p: Option<Predicate>,
    pub limi_i: Option<Predicate>,
    pub limi_ii: Option<Predicate>,
    pub limi_iii: Option<Predicate>,
}

/// `m̄ = Np/(Np − N + p)`.
pub fn m_bar(p: f64, n: usize) -> f64 {
    let n = n as f64;
    n * p / (n * p - n + p)
}

/// `k(m) = Nm/(N − pm)`, for `1 < m < N/p`.
pub fn k_exponent(m: f64, p: f64, n: usize) -> f64 {
    let n = n as f64;
    n * m / (n - p * m)
}

/// `τ(m) = Nm/(N − m)`.
pub fn tau_exponent(m: f64, n: usize) -> f64 {
    let n = n as f64;
    n * m / (n - m)
}

/// `r' = r/(r − 1)`, with `r' = 1` for `r = ∞` and `r' = ∞` for `r = 1`.
pub fn conjugate(r: f64) -> f64 {
    if r.is_infinite() {
        1.0
    } else if r == 1.0 {
        f64::INFINITY
    } else {
        r / (r - 1.0)
    }
}

fn check(p: f64, n: usize) -> Result<()> {
    if !(p > 1.0) || !(p < n as f64) {
        return Err(Error::precondition(format!("exponents need 1 < p < N, got p = {p}, N = {n}")));
    }
    Ok(())
}

fn base(inputs: RegularityInputs) -> RegularityReport {
    let (p, n) = (inputs.p, inputs.n as f64);
    RegularityReport {
        inputs,
        m_bar: m_bar(p, inputs.n),
        p_star: n * p / (n - p),
        p_prime: p / (p - 1.0),
        r_prime: inputs.r.map(conjugate),
        integrability: None,
        k: None,
        gradient: None,
        tau: None,
        maja: None,
        majet: None,
        limi_w1p: None,
        limi_i: None,
        limi_ii: None,
        limi_iii: None,
    }
}

/// Integrability of `U` and of `∇U` when `F ∈ L^m`.
pub fn regularity_exponents(m: f64, p: f64, n: usize) -> Result<RegularityReport> {
    report(RegularityInputs {
        m: Some(m),
        p,
        n,
        r: None,
        q: None,
        big_q: None,
    })
}

/// The growth predicates and the extremal-function conditions.
pub fn admissibility_predicates(p: f64, n: usize, r: f64, q: Option<f64>, big_q: Option<f64>) -> Result<RegularityReport> {
    report(RegularityInputs {
        m: None,
        p,
        n,
        r: Some(r),
        q,
        big_q,
    })
}

/// Every quantity the inputs determine.
pub fn report(inputs: RegularityInputs) -> Result<RegularityReport> {
    check(inputs.p, inputs.n)?;
    let mut rep = base(inputs);
    let (p, nn) = (inputs.p, inputs.n);
    let n = nn as f64;
    if let Some(m) = inputs.m {
        if !(m >= 1.0) {
            return Err(Error::validation(format!("m must be >= 1, got {m}")));
        }
        let critical = n / p;
        let (case, k) = if m == 1.0 {
            (IntegrabilityCase::NotCovered, None)
        } else if m < critical {
            (IntegrabilityCase::Lk, Some(k_exponent(m, p, nn)))
        } else if m == critical {
            (IntegrabilityCase::AllLk, None)
        } else {
            (IntegrabilityCase::LInfinity, None)
        };
        rep.integrability = Some(case);
        rep.k = k;
        let (case, tau) = if m == 1.0 {
            (GradientCase::NotCovered, None)
        } else if m < rep.m_bar {
            (GradientCase::LTau, Some(tau_exponent(m, nn)))
        } else {
            (GradientCase::W1p, None)
        };
        rep.gradient = Some(case);
        rep.tau = tau;
    }
    if let Some(r) = inputs.r {
        if !(r >= 1.0) {
            return Err(Error::validation(format!("r must be >= 1, got {r}")));
        }
        let rp = conjugate(r);
        let pp = rep.p_prime;
        let sobolev_ratio = n / (n - p);
        if let Some(q) = inputs.q {
            let pred = Predicate::new(q * rp, sobolev_ratio, q > 1.0 && q < sobolev_ratio);
            rep.maja = Some(pred);
            rep.limi_ii = Some(pred);
        }
        if let Some(big_q) = inputs.big_q {
            let pred = Predicate::new((big_q + 1.0) * rp, rep.p_star, big_q > 1.0 && big_q < rep.p_star - 1.0);
            rep.majet = Some(pred);
            rep.limi_i = Some(pred);
        }
        let inv_r = if r.is_infinite() { 0.0 } else { 1.0 / r };
        rep.limi_w1p = Some(Predicate::new(n, p * (1.0 + pp) / (1.0 + pp * inv_r), true));
        rep.limi_iii = Some(Predicate::new(n, p * pp / (1.0 + inv_r / (p - 1.0)), true));
    }
    Ok(rep)
}
