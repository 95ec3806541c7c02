//! Scalar functions on `[0, endpoint)`: a fixed catalog of closed forms,
//! tabulated samples, and the `β`/`g` members of an existing pair.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::extended::ExtReal;
use crate::quadrature;

use super::pair::NonlinearityPair;

/// Piecewise-linear interpolant through samples `(x_i, y_i)` with
/// `x_0 = 0` and strictly increasing abscissae.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Table {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::validation(format!(
                "table has {} abscissae but {} values",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::validation("table needs at least two samples"));
        }
        if xs[0] != 0.0 {
            return Err(Error::validation(format!(
                "table abscissae must start at 0, found {}",
                xs[0]
            )));
        }
        if let Some(i) = xs.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::validation(format!(
                "table abscissae not strictly increasing at row {}",
                i + 1
            )));
        }
        if let Some(i) = xs.iter().chain(&ys).position(|v| !v.is_finite()) {
            return Err(Error::validation(format!("non-finite table entry #{i}")));
        }
        Ok(Table { xs, ys })
    }

    /// Reads a two-column CSV `(abscissa, value)` with a header row.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let shown = path.display().to_string();
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| match e.kind() {
                csv::ErrorKind::Io(_) => Error::Io {
                    path: shown.clone(),
                    source: std::io::Error::new(std::io::ErrorKind::NotFound, e.to_string()),
                },
                _ => Error::Csv {
                    path: shown.clone(),
                    message: e.to_string(),
                },
            })?;
        let headers = reader.headers().map_err(|e| Error::Csv {
            path: shown.clone(),
            message: e.to_string(),
        })?;
        if headers.len() != 2 || headers.iter().any(|h| h.parse::<f64>().is_ok()) {
            return Err(Error::Csv {
                path: shown,
                message: "expected a two-column header row".into(),
            });
        }
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::Csv {
                path: shown.clone(),
                message: e.to_string(),
            })?;
            let parse = |k: usize| -> Result<f64> {
                record
                    .get(k)
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| Error::Csv {
                        path: shown.clone(),
                        message: format!("line {}: column {} is not a number", line + 2, k + 1),
                    })
            };
            xs.push(parse(0)?);
            ys.push(parse(1)?);
        }
        Table::new(xs, ys).map_err(|e| Error::Csv {
            path: shown,
            message: e.to_string(),
        })
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.ys
    }

    fn end(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    fn segment(&self, t: f64) -> usize {
        match self.xs.partition_point(|&x| x <= t) {
            0 => 0,
            k => (k - 1).min(self.xs.len() - 2),
        }
    }

    fn eval(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let w = (t - x0) / (x1 - x0);
        self.ys[i] * (1.0 - w) + self.ys[i + 1] * w
    }

    // Exact integral of the interpolant over [0, t].
    fn integral(&self, t: f64) -> f64 {
        let k = self.segment(t);
        let mut acc = 0.0;
        for i in 0..k {
            acc += 0.5 * (self.ys[i] + self.ys[i + 1]) * (self.xs[i + 1] - self.xs[i]);
        }
        acc + 0.5 * (self.ys[k] + self.eval(t)) * (t - self.xs[k])
    }
}

/// A real function on `[0, endpoint)`.
///
/// Closed-form kinds know their own derivative, antiderivative, and tail
/// behaviour; tabulated kinds answer tail questions with "unknown".
#[derive(Clone)]
pub enum ScalarFunction {
    /// `c`
    Constant(f64),
    /// `a t`
    Linear(f64),
    /// `t^b`, `b ≥ 0`
    Power(f64),
    /// `q / (1 + a t)`; the endpoint is `-1/a` when `a < 0`.
    Rational { q: f64, a: f64 },
    /// `1 + e^t`
    OnePlusExp,
    /// `e^{-a t}`
    ExpDecay(f64),
    /// `(1 + t)^q - 1`
    PowerShift(f64),
    /// `(1 - t)^{-q} - 1` on `[0, 1)`
    InversePowerShift(f64),
    /// `e^t - 1`
    ExpShift,
    /// `(1 + t)(1 + ln(1 + t)) - 1`
    LogProduct,
    /// `factor · inner(t)`
    Scaled(f64, Box<ScalarFunction>),
    Tabulated(Table),
    /// The `β` member of an existing pair.
    PairBeta(Arc<NonlinearityPair>),
    /// The `g` member of an existing pair.
    PairG(Arc<NonlinearityPair>),
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarFunction::Constant(c) => write!(f, "Constant({c})"),
            ScalarFunction::Linear(a) => write!(f, "Linear({a})"),
            ScalarFunction::Power(b) => write!(f, "Power({b})"),
            ScalarFunction::Rational { q, a } => write!(f, "Rational {{ q: {q}, a: {a} }}"),
            ScalarFunction::OnePlusExp => f.write_str("OnePlusExp"),
            ScalarFunction::ExpDecay(a) => write!(f, "ExpDecay({a})"),
            ScalarFunction::PowerShift(q) => write!(f, "PowerShift({q})"),
            ScalarFunction::InversePowerShift(q) => write!(f, "InversePowerShift({q})"),
            ScalarFunction::ExpShift => f.write_str("ExpShift"),
            ScalarFunction::LogProduct => f.write_str("LogProduct"),
            ScalarFunction::Scaled(c, inner) => write!(f, "Scaled({c}, {inner:?})"),
            ScalarFunction::Tabulated(t) => write!(f, "Tabulated({} samples)", t.xs.len()),
            ScalarFunction::PairBeta(p) => write!(f, "PairBeta({})", p.label()),
            ScalarFunction::PairG(p) => write!(f, "PairG({})", p.label()),
        }
    }
}

impl ScalarFunction {
    pub fn endpoint(&self) -> ExtReal {
        match self {
            ScalarFunction::Rational { a, .. } if *a < 0.0 => ExtReal::Finite(-1.0 / a),
            ScalarFunction::InversePowerShift(_) => ExtReal::Finite(1.0),
            ScalarFunction::Scaled(_, inner) => inner.endpoint(),
            ScalarFunction::Tabulated(t) => ExtReal::Finite(t.end()),
            ScalarFunction::PairBeta(p) => p.l_endpoint(),
            ScalarFunction::PairG(p) => p.lambda_endpoint(),
            _ => ExtReal::Infinity,
        }
    }

    pub fn is_tabulated(&self) -> bool {
        match self {
            ScalarFunction::Tabulated(_) => true,
            ScalarFunction::Scaled(_, inner) => inner.is_tabulated(),
            _ => false,
        }
    }

    fn check(&self, t: f64, what: &'static str) -> Result<()> {
        let end = self.endpoint();
        // Tabulated data is defined on the closed interval.
        let inside = match (self.is_tabulated(), end) {
            (true, ExtReal::Finite(e)) => (0.0..=e).contains(&t),
            _ => end.contains(t),
        };
        if inside {
            Ok(())
        } else {
            Err(Error::Domain {
                what,
                value: t,
                endpoint: end.to_f64(),
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

    pub fn eval(&self, t: f64) -> Result<f64> {
        self.check(t, "function evaluation")?;
        let v = match self {
            ScalarFunction::Constant(c) => *c,
            ScalarFunction::Linear(a) => a * t,
            ScalarFunction::Power(b) => {
                if *b == 0.0 {
                    1.0
                } else {
                    t.powf(*b)
                }
            }
            ScalarFunction::Rational { q, a } => q / (1.0 + a * t),
            ScalarFunction::OnePlusExp => 1.0 + t.exp(),
            ScalarFunction::ExpDecay(a) => (-a * t).exp(),
            ScalarFunction::PowerShift(q) => (q * t.ln_1p()).exp_m1(),
            ScalarFunction::InversePowerShift(q) => (-q * (-t).ln_1p()).exp_m1(),
            ScalarFunction::ExpShift => t.exp_m1(),
            ScalarFunction::LogProduct => {
                let l = t.ln_1p();
                t + l + t * l
            }
            ScalarFunction::Scaled(c, inner) => c * inner.eval(t)?,
            ScalarFunction::Tabulated(tab) => tab.eval(t),
            ScalarFunction::PairBeta(p) => p.beta(t)?,
            ScalarFunction::PairG(p) => p.g(t)?,
        };
        Self::finite(v, "function value")
    }

    pub fn derivative(&self, t: f64) -> Result<f64> {
        self.check(t, "function derivative")?;
        let d = match self {
            ScalarFunction::Constant(_) => 0.0,
            ScalarFunction::Linear(a) => *a,
            ScalarFunction::Power(b) => {
                if *b == 0.0 {
                    0.0
                } else {
                    b * t.powf(b - 1.0)
                }
            }
            ScalarFunction::Rational { q, a } => -q * a / (1.0 + a * t).powi(2),
            ScalarFunction::OnePlusExp => t.exp(),
            ScalarFunction::ExpDecay(a) => -a * (-a * t).exp(),
            ScalarFunction::PowerShift(q) => q * ((q - 1.0) * t.ln_1p()).exp(),
            ScalarFunction::InversePowerShift(q) => q * (-(q + 1.0) * (-t).ln_1p()).exp(),
            ScalarFunction::ExpShift => t.exp(),
            ScalarFunction::LogProduct => 2.0 + t.ln_1p(),
            ScalarFunction::Scaled(c, inner) => c * inner.derivative(t)?,
            ScalarFunction::Tabulated(tab) => {
                // Centered difference of the interpolant, one-sided at the ends.
                let end = tab.end();
                let h = 1e-6 * (1.0 + t.abs());
                let lo = (t - h).max(0.0);
                let hi = (t + h).min(end);
                (tab.eval(hi) - tab.eval(lo)) / (hi - lo)
            }
            ScalarFunction::PairBeta(p) => {
                let h = 1e-5 * (1.0 + t);
                let lo = (t - h).max(0.0);
                let hi = t + h;
                if p.l_endpoint().contains(hi) {
                    (p.beta(hi)? - p.beta(lo)?) / (hi - lo)
                } else {
                    (p.beta(t)? - p.beta(lo)?) / (t - lo)
                }
            }
            ScalarFunction::PairG(p) => p.g_prime(t)?,
        };
        Self::finite(d, "function derivative")
    }

    /// `∫₀ᵗ f`, in closed form wherever the kind allows it.
    pub fn antiderivative(&self, t: f64) -> Result<f64> {
        self.check(t, "function antiderivative")?;
        self.antiderivative_unchecked(t)
    }

    fn antiderivative_unchecked(&self, t: f64) -> Result<f64> {
        let v = match self {
            ScalarFunction::Constant(c) => c * t,
            ScalarFunction::Linear(a) => 0.5 * a * t * t,
            ScalarFunction::Power(b) => t.powf(b + 1.0) / (b + 1.0),
            ScalarFunction::Rational { q, a } => {
                if *a == 0.0 {
                    q * t
                } else {
                    q / a * (a * t).ln_1p()
                }
            }
            ScalarFunction::OnePlusExp => t + t.exp_m1(),
            ScalarFunction::ExpDecay(a) => {
                if *a == 0.0 {
                    t
                } else {
                    -(-a * t).exp_m1() / a
                }
            }
            ScalarFunction::PowerShift(q) => {
                ((q + 1.0) * t.ln_1p()).exp_m1() / (q + 1.0) - t
            }
            ScalarFunction::InversePowerShift(q) => {
                let l = (-t).ln_1p();
                if (q - 1.0).abs() < 1e-14 {
                    -l - t
                } else {
                    ((1.0 - q) * l).exp_m1() / (q - 1.0) - t
                }
            }
            ScalarFunction::ExpShift => t.exp_m1() - t,
            ScalarFunction::LogProduct => {
                let y = 1.0 + t;
                let l = t.ln_1p();
                // ∫₁^y s(1 + ln s) ds = y²/4 + y² ln(y)/2 − 1/4
                0.25 * (y * y - 1.0) + 0.5 * y * y * l - t
            }
            ScalarFunction::Scaled(c, inner) => c * inner.antiderivative_unchecked(t)?,
            ScalarFunction::Tabulated(tab) => tab.integral(t),
            ScalarFunction::PairBeta(p) => p.gamma(t)?,
            ScalarFunction::PairG(p) => {
                let p = p.clone();
                quadrature::integrate(move |s| p.g(s).unwrap_or(f64::NAN), 0.0, t)?.value
            }
        };
        Self::finite(v, "function antiderivative")
    }

    /// Whether `∫₀^endpoint f` converges; `None` when undecidable.
    pub fn integrable_to_endpoint(&self) -> Option<bool> {
        Some(match self {
            ScalarFunction::Constant(c) | ScalarFunction::Linear(c) => *c == 0.0,
            ScalarFunction::Power(_) => false,
            ScalarFunction::Rational { q, .. } => *q == 0.0,
            ScalarFunction::OnePlusExp => false,
            ScalarFunction::ExpDecay(a) => *a > 0.0,
            ScalarFunction::PowerShift(q) => *q == 0.0,
            ScalarFunction::InversePowerShift(q) => *q < 1.0,
            ScalarFunction::ExpShift | ScalarFunction::LogProduct => false,
            ScalarFunction::Scaled(c, inner) => *c == 0.0 || inner.integrable_to_endpoint()?,
            ScalarFunction::Tabulated(_) => return None,
            ScalarFunction::PairBeta(p) => p.flags().beta_in_l1?,
            ScalarFunction::PairG(_) => return None,
        })
    }

    /// `∫₀^endpoint f` as an extended real; `None` when undecidable.
    pub fn integral_to_endpoint(&self) -> Option<ExtReal> {
        if !self.integrable_to_endpoint()? {
            return Some(ExtReal::Infinity);
        }
        let end = self.endpoint().to_f64();
        match self {
            ScalarFunction::PairBeta(p) => p.flags().gamma_at_end,
            _ => self.antiderivative_unchecked(end).ok().map(ExtReal::Finite),
        }
    }

    /// Limit of `f` at the endpoint; `None` when undecidable.
    pub fn limit_at_endpoint(&self) -> Option<ExtReal> {
        Some(match self {
            ScalarFunction::Constant(c) => ExtReal::from_f64(*c),
            ScalarFunction::Linear(a) => {
                if *a == 0.0 {
                    ExtReal::ZERO
                } else {
                    ExtReal::Infinity
                }
            }
            ScalarFunction::Power(b) => {
                if *b == 0.0 {
                    ExtReal::Finite(1.0)
                } else {
                    ExtReal::Infinity
                }
            }
            ScalarFunction::Rational { q, a } => {
                if *a < 0.0 {
                    ExtReal::Infinity
                } else if *a == 0.0 {
                    ExtReal::from_f64(*q)
                } else {
                    ExtReal::ZERO
                }
            }
            ScalarFunction::OnePlusExp
            | ScalarFunction::ExpShift
            | ScalarFunction::LogProduct => ExtReal::Infinity,
            ScalarFunction::ExpDecay(a) => {
                if *a > 0.0 {
                    ExtReal::ZERO
                } else {
                    ExtReal::Finite(1.0)
                }
            }
            ScalarFunction::PowerShift(q) | ScalarFunction::InversePowerShift(q) => {
                if *q == 0.0 {
                    ExtReal::ZERO
                } else {
                    ExtReal::Infinity
                }
            }
            ScalarFunction::Scaled(c, inner) => ExtReal::Finite(*c).mul(inner.limit_at_endpoint()?),
            ScalarFunction::Tabulated(_) => return None,
            ScalarFunction::PairBeta(_) => return None,
            ScalarFunction::PairG(p) => p.flags().g_at_end?,
        })
    }

    /// Whether `∫₀^endpoint ds / (1 + f(s))` converges; `None` when
    /// undecidable. Bounded integrands on finite intervals always converge.
    pub fn reciprocal_shift_integrable(&self) -> Option<bool> {
        if self.endpoint().is_finite() {
            return if self.is_tabulated() { None } else { Some(true) };
        }
        Some(match self {
            ScalarFunction::Constant(_) | ScalarFunction::Linear(_) => false,
            ScalarFunction::Power(b) => *b > 1.0,
            ScalarFunction::Rational { .. } | ScalarFunction::ExpDecay(_) => false,
            ScalarFunction::OnePlusExp | ScalarFunction::ExpShift => true,
            ScalarFunction::PowerShift(q) => *q > 1.0,
            ScalarFunction::LogProduct => false,
            ScalarFunction::Scaled(c, inner) => *c > 0.0 && inner.reciprocal_shift_integrable()?,
            ScalarFunction::PairG(p) => p.flags().l_finite?,
            _ => return None,
        })
    }

    /// For `Rational` with a pole (`a < 0`): the exponent `e` in
    /// `exp(γ(t)/(p−1)) = (1 + a t)^e`.
    pub(crate) fn pole_exponent(&self, p: f64) -> Option<f64> {
        match self {
            ScalarFunction::Rational { q, a } if *a < 0.0 => Some(q / (a * (p - 1.0))),
            ScalarFunction::Scaled(c, inner) => match inner.as_ref() {
                ScalarFunction::Rational { q, a } if *a < 0.0 => Some(c * q / (a * (p - 1.0))),
                _ => None,
            },
            _ => None,
        }
    }

    /// Sample points spread over `[0, min(endpoint, cap))`.
    pub(crate) fn sample_points(&self, count: usize, cap: f64) -> Vec<f64> {
        let end = self.endpoint().to_f64();
        let top = if self.is_tabulated() {
            end
        } else if end.is_finite() {
            0.999 * end
        } else {
            cap
        };
        (0..count)
            .map(|k| top * k as f64 / (count - 1) as f64)
            .collect()
    }

    /// Checks `f(0) = 0` and `f` nondecreasing at sampled points.
    pub(crate) fn validate_as_g(&self) -> Result<()> {
        let g0 = self.eval(0.0)?;
        if g0.abs() > 1e-12 {
            return Err(Error::validation(format!("g(0) = {g0}, expected 0")));
        }
        let pts = self.sample_points(401, 50.0);
        let mut prev = g0;
        for &t in &pts[1..] {
            let v = self.eval(t)?;
            if v < prev - 1e-12 * (1.0 + prev.abs()) {
                return Err(Error::validation(format!(
                    "g is not nondecreasing near {t}: {v} < {prev}"
                )));
            }
            prev = v;
        }
        Ok(())
    }

    /// Checks `f ≥ 0` at sampled points.
    pub(crate) fn validate_nonnegative(&self, name: &str) -> Result<()> {
        for t in self.sample_points(401, 50.0) {
            let v = self.eval(t)?;
            if v < 0.0 {
                return Err(Error::validation(format!("{name}({t}) = {v} is negative")));
            }
        }
        Ok(())
    }
}
