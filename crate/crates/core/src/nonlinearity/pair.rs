use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extended::ExtReal;
use crate::quadrature;

use super::function::ScalarFunction;

/// Tolerance for inverting `Ψ` or `H`.
pub const INVERSE_TOL: f64 = 1e-12;

/// Closed-form families of the catalog, parameterised by the growth of
/// `1 + g`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum ClosedForm {
    /// `1 + g(v) = 1 + v`
    Linear,
    /// `1 + g(v) = (1 + v)^q`, `q > 0`, `q ≠ 1`
    Power { q: f64 },
    /// `1 + g(v) = (1 + v)(1 + ln(1 + v))`
    LogProduct,
    /// `1 + g(v) = e^v`
    Exponential,
    /// `1 + g(v) = (1 - v)^{-q}`, `q > 0`
    InversePower { q: f64 },
}

#[derive(Clone, Debug)]
enum Repr {
    Closed(ClosedForm),
    FromBeta,
    FromG,
}

/// Endpoint data. `l` and `lambda` are the working domains of `u` and `v`;
/// the `Option` fields are `None` when the tail cannot be decided (tabulated
/// input), in which case the domains are the finite table ranges.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EndpointFlags {
    pub l: ExtReal,
    pub lambda: ExtReal,
    pub l_finite: Option<bool>,
    pub lambda_finite: Option<bool>,
    pub beta_in_l1: Option<bool>,
    /// `lim γ` at `L`.
    pub gamma_at_end: Option<ExtReal>,
    /// `lim g` at `Λ`.
    pub g_at_end: Option<ExtReal>,
}

/// A `β`/`g` pair linked by `β(u) = (p−1) g'(v)`, `v = Ψ(u)`, `u = H(v)`.
///
/// Immutable once built; every evaluator is a pure function.
#[derive(Clone, Debug)]
pub struct NonlinearityPair {
    label: String,
    p: f64,
    beta: Option<ScalarFunction>,
    g: Option<ScalarFunction>,
    repr: Repr,
    u_weight: Option<ScalarFunction>,
    flags: EndpointFlags,
}

impl NonlinearityPair {
    pub(crate) fn closed(label: String, p: f64, form: ClosedForm) -> Result<Self> {
        check_p(p)?;
        let s = p - 1.0;
        let scaled = |f: ScalarFunction| ScalarFunction::Scaled(s, Box::new(f));
        let (beta, g) = match form {
            ClosedForm::Linear => (ScalarFunction::Constant(s), ScalarFunction::Linear(1.0)),
            ClosedForm::Power { q } => {
                if q <= 0.0 || q == 1.0 {
                    return Err(Error::validation(format!("power form needs q > 0, q != 1, got {q}")));
                }
                (
                    scaled(ScalarFunction::Rational { q, a: 1.0 - q }),
                    ScalarFunction::PowerShift(q),
                )
            }
            ClosedForm::LogProduct => (scaled(ScalarFunction::OnePlusExp), ScalarFunction::LogProduct),
            ClosedForm::Exponential => (
                scaled(ScalarFunction::Rational { q: 1.0, a: -1.0 }),
                ScalarFunction::ExpShift,
            ),
            ClosedForm::InversePower { q } => {
                if q <= 0.0 {
                    return Err(Error::validation(format!("inverse power form needs q > 0, got {q}")));
                }
                (
                    scaled(ScalarFunction::Rational { q, a: -(q + 1.0) }),
                    ScalarFunction::InversePowerShift(q),
                )
            }
        };
        let l = beta.endpoint();
        let lambda = g.endpoint();
        let flags = EndpointFlags {
            l,
            lambda,
            l_finite: Some(l.is_finite()),
            lambda_finite: Some(lambda.is_finite()),
            beta_in_l1: beta.integrable_to_endpoint(),
            gamma_at_end: beta.integral_to_endpoint(),
            g_at_end: g.limit_at_endpoint(),
        };
        Ok(NonlinearityPair {
            label,
            p,
            beta: Some(beta),
            g: Some(g),
            repr: Repr::Closed(form),
            u_weight: None,
            flags,
        })
    }

    /// Builds the pair determined by `g`, with `β(u) = (p−1) g'(H⁻¹(u))`
    /// and `L = H(Λ)`.
    pub fn from_g(g: ScalarFunction, p: f64) -> Result<Self> {
        check_p(p)?;
        g.validate_as_g()?;
        let lambda = g.endpoint();
        let mut pair = NonlinearityPair {
            label: "from-g".into(),
            p,
            beta: None,
            g: Some(g),
            repr: Repr::FromG,
            u_weight: None,
            flags: EndpointFlags {
                l: ExtReal::Infinity,
                lambda,
                l_finite: None,
                lambda_finite: None,
                beta_in_l1: None,
                gamma_at_end: None,
                g_at_end: None,
            },
        };
        let g = pair.g.as_ref().unwrap();
        let tabulated = g.is_tabulated();
        let l_finite = g.reciprocal_shift_integrable();
        let l = match (l_finite, lambda) {
            (Some(false), _) => ExtReal::Infinity,
            (None, ExtReal::Infinity) => {
                return Err(Error::validation(
                    "cannot decide whether H(Λ) is finite for this g",
                ))
            }
            (_, end) => ExtReal::Finite(pair.h_quadrature(end.to_f64())?),
        };
        let g_at_end = g.limit_at_endpoint();
        let gamma_at_end = g_at_end.map(|ge| match ge {
            ExtReal::Finite(x) => ExtReal::Finite((p - 1.0) * x.ln_1p()),
            ExtReal::Infinity => ExtReal::Infinity,
        });
        pair.flags = EndpointFlags {
            l,
            lambda,
            l_finite,
            lambda_finite: if tabulated { None } else { Some(lambda.is_finite()) },
            beta_in_l1: g_at_end.map(|x| x.is_finite()),
            gamma_at_end,
            g_at_end,
        };
        Ok(pair)
    }

    /// Builds the pair determined by `β`, with
    /// `g(v) = exp(γ(Ψ⁻¹(v))/(p−1)) − 1` and `Λ = Ψ(L)`.
    pub fn from_beta(beta: ScalarFunction, p: f64) -> Result<Self> {
        check_p(p)?;
        beta.validate_nonnegative("beta")?;
        let l = beta.endpoint();
        let tabulated = beta.is_tabulated();
        let beta_in_l1 = beta.integrable_to_endpoint();
        let gamma_at_end = beta.integral_to_endpoint();
        let pole = beta.pole_exponent(p);
        let mut pair = NonlinearityPair {
            label: "from-beta".into(),
            p,
            beta: Some(beta),
            g: None,
            repr: Repr::FromBeta,
            u_weight: None,
            flags: EndpointFlags {
                l,
                lambda: ExtReal::Infinity,
                l_finite: if tabulated { None } else { Some(l.is_finite()) },
                lambda_finite: None,
                beta_in_l1,
                gamma_at_end,
                g_at_end: gamma_at_end.map(|ge| match ge {
                    ExtReal::Finite(x) => ExtReal::Finite((x / (p - 1.0)).exp_m1()),
                    ExtReal::Infinity => ExtReal::Infinity,
                }),
            },
        };
        let (lambda, lambda_finite) = match l {
            // Ψ(u) ≥ u, so an unbounded u-range gives an unbounded v-range.
            ExtReal::Infinity => (ExtReal::Infinity, Some(false)),
            ExtReal::Finite(end) => {
                if tabulated {
                    (ExtReal::Finite(pair.psi_quadrature(end)?), None)
                } else if beta_in_l1 == Some(true) {
                    (ExtReal::Finite(pair.psi_quadrature(end)?), Some(true))
                } else if let Some(e) = pole {
                    if e > -1.0 {
                        (ExtReal::Finite(end / (e + 1.0)), Some(true))
                    } else {
                        (ExtReal::Infinity, Some(false))
                    }
                } else {
                    return Err(Error::validation(
                        "cannot decide whether Ψ(L) is finite for this beta",
                    ));
                }
            }
        };
        pair.flags.lambda = lambda;
        pair.flags.lambda_finite = lambda_finite;
        Ok(pair)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Attaches a source weight depending on the unknown `u`, as in
    /// `-Δ_p u = (p−1)|∇u|^p + λ u^b`.
    pub fn with_u_weight(mut self, weight: ScalarFunction) -> Self {
        self.u_weight = Some(weight);
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn closed_form(&self) -> Option<ClosedForm> {
        match self.repr {
            Repr::Closed(f) => Some(f),
            _ => None,
        }
    }

    pub fn beta_function(&self) -> Option<&ScalarFunction> {
        self.beta.as_ref()
    }

    pub fn g_function(&self) -> Option<&ScalarFunction> {
        self.g.as_ref()
    }

    pub fn u_weight(&self) -> Option<&ScalarFunction> {
        self.u_weight.as_ref()
    }

    pub fn flags(&self) -> EndpointFlags {
        self.flags
    }

    /// `L`, the endpoint of the `u`-range.
    pub fn l_endpoint(&self) -> ExtReal {
        self.flags.l
    }

    /// `Λ`, the endpoint of the `v`-range.
    pub fn lambda_endpoint(&self) -> ExtReal {
        self.flags.lambda
    }

    fn check_u(&self, u: f64, what: &'static str) -> Result<()> {
        if self.flags.l.contains(u) {
            Ok(())
        } else {
            Err(Error::Domain {
                what,
                value: u,
                endpoint: self.flags.l.to_f64(),
            })
        }
    }

    fn check_v(&self, v: f64, what: &'static str) -> Result<()> {
        if self.flags.lambda.contains(v) {
            Ok(())
        } else {
            Err(Error::Domain {
                what,
                value: v,
                endpoint: self.flags.lambda.to_f64(),
            })
        }
    }

    fn finite(x: f64, what: &'static str) -> Result<f64> {
        if x.is_finite() {
            Ok(x)
        } else {
            Err(Error::InfiniteValue(what))
        }
    }

    /// `γ(t) = ∫₀ᵗ β`.
    pub fn gamma(&self, t: f64) -> Result<f64> {
        self.check_u(t, "gamma")?;
        let s = self.p - 1.0;
        let v = match self.repr {
            Repr::Closed(ClosedForm::Linear) => s * t,
            Repr::Closed(ClosedForm::Power { q }) => s * q / (1.0 - q) * ((1.0 - q) * t).ln_1p(),
            Repr::Closed(ClosedForm::LogProduct) => s * (t.exp_m1() + t),
            Repr::Closed(ClosedForm::Exponential) => -s * (-t).ln_1p(),
            Repr::Closed(ClosedForm::InversePower { q }) => {
                -s * q / (q + 1.0) * (-(q + 1.0) * t).ln_1p()
            }
            Repr::FromBeta => self.beta.as_ref().unwrap().antiderivative(t)?,
            Repr::FromG => {
                let v = self.psi(t)?;
                s * self.g(v)?.ln_1p()
            }
        };
        Self::finite(v, "gamma")
    }

    /// `β(u)`.
    pub fn beta(&self, u: f64) -> Result<f64> {
        self.check_u(u, "beta")?;
        match self.repr {
            Repr::FromG => {
                let v = self.psi(u)?;
                Ok((self.p - 1.0) * self.g_prime(v)?)
            }
            _ => self.beta.as_ref().unwrap().eval(u),
        }
    }

    /// `Ψ(u) = ∫₀ᵘ exp(γ(θ)/(p−1)) dθ`.
    pub fn psi(&self, u: f64) -> Result<f64> {
        self.check_u(u, "psi")?;
        let v = match self.repr {
            Repr::Closed(ClosedForm::Linear) => u.exp_m1(),
            Repr::Closed(ClosedForm::Power { q }) => {
                (((1.0 - q) * u).ln_1p() / (1.0 - q)).exp_m1()
            }
            Repr::Closed(ClosedForm::LogProduct) => u.exp_m1().exp_m1(),
            Repr::Closed(ClosedForm::Exponential) => -(-u).ln_1p(),
            Repr::Closed(ClosedForm::InversePower { q }) => {
                -((-(q + 1.0) * u).ln_1p() / (q + 1.0)).exp_m1()
            }
            Repr::FromBeta => self.psi_quadrature(u)?,
            Repr::FromG => {
                let this = self;
                invert_increasing(|x| this.h(x), |x| Ok(1.0 / (1.0 + this.g(x)?)), u, self.flags.lambda)?
            }
        };
        Self::finite(v, "psi")
    }

    /// `Ψ'(u) = exp(γ(u)/(p−1))`.
    pub fn psi_prime(&self, u: f64) -> Result<f64> {
        Self::finite((self.gamma(u)? / (self.p - 1.0)).exp(), "psi derivative")
    }

    /// `H(v) = ∫₀ᵛ ds / (1 + g(s))`.
    pub fn h(&self, v: f64) -> Result<f64> {
        self.check_v(v, "H")?;
        let u = match self.repr {
            Repr::Closed(ClosedForm::Linear) => v.ln_1p(),
            Repr::Closed(ClosedForm::Power { q }) => ((1.0 - q) * v.ln_1p()).exp_m1() / (1.0 - q),
            Repr::Closed(ClosedForm::LogProduct) => v.ln_1p().ln_1p(),
            Repr::Closed(ClosedForm::Exponential) => -(-v).exp_m1(),
            Repr::Closed(ClosedForm::InversePower { q }) => {
                -((q + 1.0) * (-v).ln_1p()).exp_m1() / (q + 1.0)
            }
            Repr::FromG => self.h_quadrature(v)?,
            Repr::FromBeta => {
                let this = self;
                invert_increasing(|x| this.psi(x), |x| this.psi_prime(x), v, self.flags.l)?
            }
        };
        Self::finite(u, "H")
    }

    /// `g(v)`.
    pub fn g(&self, v: f64) -> Result<f64> {
        self.check_v(v, "g")?;
        match self.repr {
            Repr::FromBeta => {
                let u = self.h(v)?;
                Self::finite((self.gamma(u)? / (self.p - 1.0)).exp_m1(), "g")
            }
            _ => self.g.as_ref().unwrap().eval(v),
        }
    }

    /// `g'(v)`; equals `β(H(v))/(p−1)`.
    pub fn g_prime(&self, v: f64) -> Result<f64> {
        self.check_v(v, "g derivative")?;
        match self.repr {
            Repr::FromBeta => Ok(self.beta(self.h(v)?)? / (self.p - 1.0)),
            _ => self.g.as_ref().unwrap().derivative(v),
        }
    }

    /// `Ĝ(s) = ∫₀ˢ (1 + g(t))^{p−1} dt`, the primitive of the zero-order
    /// source.
    pub fn source_primitive(&self, s: f64) -> Result<f64> {
        self.check_v(s, "source primitive")?;
        let e = self.p - 1.0;
        let closed = match self.repr {
            Repr::Closed(ClosedForm::Linear) => Some((self.p * s.ln_1p()).exp_m1() / self.p),
            Repr::Closed(ClosedForm::Power { q }) => {
                let k = q * e + 1.0;
                Some((k * s.ln_1p()).exp_m1() / k)
            }
            Repr::Closed(ClosedForm::Exponential) => Some((e * s).exp_m1() / e),
            Repr::Closed(ClosedForm::InversePower { q }) => {
                let k = q * e;
                let l = (-s).ln_1p();
                if (k - 1.0).abs() < 1e-14 {
                    Some(-l)
                } else {
                    Some(((1.0 - k) * l).exp_m1() / (k - 1.0))
                }
            }
            Repr::Closed(ClosedForm::LogProduct) if (self.p - 2.0).abs() < 1e-15 => {
                let y = 1.0 + s;
                let l = s.ln_1p();
                Some(0.25 * (y * y - 1.0) + 0.5 * y * y * l)
            }
            _ => None,
        };
        let v = match closed {
            Some(v) => v,
            None => quadrature::integrate(
                |t| (1.0 + self.g(t).unwrap_or(f64::NAN)).powf(e),
                0.0,
                s,
            )?
            .value,
        };
        Self::finite(v, "source primitive")
    }

    /// `Ψ(u)` by adaptive quadrature, independent of any closed form.
    pub fn psi_quadrature(&self, u: f64) -> Result<f64> {
        let s = self.p - 1.0;
        let beta = self.beta.as_ref();
        let integrand = |t: f64| -> f64 {
            let gamma = match (&self.repr, beta) {
                (Repr::FromG, _) | (_, None) => self.gamma(t),
                (_, Some(b)) => b.antiderivative(t),
            };
            gamma.map(|g| (g / s).exp()).unwrap_or(f64::NAN)
        };
        let r = quadrature::integrate(integrand, 0.0, u)?;
        Self::finite(r.value, "psi")
    }

    /// `H(v)` by adaptive quadrature, independent of any closed form.
    pub fn h_quadrature(&self, v: f64) -> Result<f64> {
        let g = self.g.as_ref();
        let integrand = |s: f64| -> f64 {
            let gs = match g {
                Some(g) => g.eval(s),
                None => self.g(s),
            };
            match gs {
                Ok(x) => 1.0 / (1.0 + x),
                // g overflowed to +∞
                Err(Error::InfiniteValue(_)) => 0.0,
                Err(_) => f64::NAN,
            }
        };
        let r = quadrature::integrate(integrand, 0.0, v)?;
        Self::finite(r.value, "H")
    }

    /// The quadrature-backed twin built from this pair's `g`.
    pub fn numeric_from_g(&self) -> Result<NonlinearityPair> {
        let g = match &self.g {
            Some(g) => g.clone(),
            None => ScalarFunction::PairG(Arc::new(self.clone())),
        };
        Ok(NonlinearityPair::from_g(g, self.p)?.with_label(format!("{}/numeric-g", self.label)))
    }

    /// The quadrature-backed twin built from this pair's `β`.
    pub fn numeric_from_beta(&self) -> Result<NonlinearityPair> {
        let beta = match &self.beta {
            Some(b) => b.clone(),
            None => ScalarFunction::PairBeta(Arc::new(self.clone())),
        };
        Ok(NonlinearityPair::from_beta(beta, self.p)?.with_label(format!("{}/numeric-beta", self.label)))
    }

    /// Sampled check that `β` is nondecreasing; mirrors convexity of `g`.
    pub fn beta_nondecreasing(&self, samples: usize) -> Result<bool> {
        let top = sample_top(self.flags.l, 10.0);
        let mut prev = self.beta(0.0)?;
        for k in 1..samples {
            let b = self.beta(top * k as f64 / (samples - 1) as f64)?;
            if b < prev - 1e-12 * (1.0 + prev.abs()) {
                return Ok(false);
            }
            prev = b;
        }
        Ok(true)
    }

    /// Sampled check that `g` has nonnegative second differences (`≥ -tol`).
    pub fn g_convex(&self, samples: usize, tol: f64) -> Result<bool> {
        let top = sample_top(self.flags.lambda, 10.0);
        let h = top / (samples - 1) as f64;
        let vals = (0..samples)
            .map(|k| self.g(h * k as f64))
            .collect::<Result<Vec<_>>>()?;
        Ok(vals
            .windows(3)
            .all(|w| w[2] - 2.0 * w[1] + w[0] >= -tol * (1.0 + w[1].abs())))
    }
}

fn sample_top(end: ExtReal, cap: f64) -> f64 {
    match end {
        ExtReal::Finite(e) => 0.99 * e.min(cap),
        ExtReal::Infinity => cap,
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(format!("p must lie in (1, inf), got {p}")))
    }
}

/// Solves `f(x) = target` for increasing `f` on `[0, end)` with `f(0) = 0`:
/// bracket by doubling (or halving the gap to a finite `end`), then
/// Newton steps safeguarded by bisection.
pub(crate) fn invert_increasing<F, D>(f: F, df: D, target: f64, end: ExtReal) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
    D: Fn(f64) -> Result<f64>,
{
    if target == 0.0 {
        return Ok(0.0);
    }
    // Overflow above the target counts as "above".
    let above = |x: f64| -> Result<bool> {
        match f(x) {
            Ok(v) => Ok(v >= target),
            Err(Error::InfiniteValue(_)) | Err(Error::Quadrature { .. }) => Ok(true),
            Err(e) => Err(e),
        }
    };
    let mut lo = 0.0;
    let mut hi = match end {
        ExtReal::Finite(e) => 0.5 * e,
        ExtReal::Infinity => 1.0,
    };
    let mut steps = 0;
    while !above(hi)? {
        lo = hi;
        hi = match end {
            ExtReal::Finite(e) => 0.5 * (hi + e),
            ExtReal::Infinity => 2.0 * hi,
        };
        steps += 1;
        if steps > 2000 || !hi.is_finite() || ExtReal::Finite(hi) >= end {
            return Err(Error::solver(format!("cannot bracket inverse for target {target}")));
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..300 {
        let fx = match f(x) {
            Ok(v) => v - target,
            Err(Error::InfiniteValue(_)) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        if fx == 0.0 {
            return Ok(x);
        }
        if fx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let scale = x.abs().max(1.0);
        if hi - lo <= 4.0 * f64::EPSILON * scale {
            return Ok(0.5 * (lo + hi));
        }
        let d = df(x).unwrap_or(f64::NAN);
        let newton = x - fx / d;
        if newton > lo && newton < hi && newton.is_finite() {
            if (newton - x).abs() <= INVERSE_TOL * scale {
                return Ok(newton);
            }
            x = newton;
        } else {
            x = 0.5 * (lo + hi);
        }
    }
    Err(Error::solver(format!("inverse did not converge for target {target}")))
}
