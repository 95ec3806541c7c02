//! Built-in pairs addressable by string identifier.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::function::ScalarFunction;
use super::pair::{ClosedForm, NonlinearityPair};

/// Catalog identifiers. The six numbered entries are the standard `p = 2`
/// examples; for other `p` the same `g` is kept and `β` scales by `p−1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CatalogId {
    Ex1,
    Ex2,
    Ex3,
    Ex4,
    Ex5,
    Ex6,
    LinearG,
    RemarkLog,
}

impl CatalogId {
    pub const ALL: [CatalogId; 8] = [
        CatalogId::Ex1,
        CatalogId::Ex2,
        CatalogId::Ex3,
        CatalogId::Ex4,
        CatalogId::Ex5,
        CatalogId::Ex6,
        CatalogId::LinearG,
        CatalogId::RemarkLog,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CatalogId::Ex1 => "ex1",
            CatalogId::Ex2 => "ex2",
            CatalogId::Ex3 => "ex3",
            CatalogId::Ex4 => "ex4",
            CatalogId::Ex5 => "ex5",
            CatalogId::Ex6 => "ex6",
            CatalogId::LinearG => "linear-g",
            CatalogId::RemarkLog => "remark-log",
        }
    }

    /// Default `q` (or `b` for `remark-log`) when the caller gives none.
    pub fn default_parameter(self) -> Option<f64> {
        match self {
            CatalogId::Ex2 => Some(0.5),
            CatalogId::Ex4 => Some(2.0),
            CatalogId::Ex6 => Some(1.0),
            CatalogId::RemarkLog => Some(1.0),
            _ => None,
        }
    }
}

impl FromStr for CatalogId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CatalogId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::validation(format!("unknown catalog pair {s:?}")))
    }
}

/// Builds a catalog pair. `param` is `q` for ex2/ex4/ex6 and `b` for
/// remark-log; it is ignored elsewhere.
pub fn catalog_pair(id: CatalogId, p: f64, param: Option<f64>) -> Result<NonlinearityPair> {
    let param = param.or(id.default_parameter());
    let q = param.unwrap_or(f64::NAN);
    let form = match id {
        CatalogId::Ex1 | CatalogId::LinearG | CatalogId::RemarkLog => ClosedForm::Linear,
        CatalogId::Ex2 => {
            if !(0.0 < q && q < 1.0) {
                return Err(Error::validation(format!("ex2 needs q in (0, 1), got {q}")));
            }
            ClosedForm::Power { q }
        }
        CatalogId::Ex3 => ClosedForm::LogProduct,
        CatalogId::Ex4 => {
            if q <= 1.0 {
                return Err(Error::validation(format!("ex4 needs q > 1, got {q}")));
            }
            ClosedForm::Power { q }
        }
        CatalogId::Ex5 => ClosedForm::Exponential,
        CatalogId::Ex6 => ClosedForm::InversePower { q },
    };
    let label = match (id, param) {
        (CatalogId::Ex2 | CatalogId::Ex4 | CatalogId::Ex6, Some(q)) => format!("{}(q={q})", id.as_str()),
        (CatalogId::RemarkLog, Some(b)) => format!("remark-log(b={b})"),
        _ => id.as_str().to_string(),
    };
    let pair = NonlinearityPair::closed(label, p, form)?;
    if id == CatalogId::RemarkLog {
        let b = q;
        if b < 0.0 {
            return Err(Error::validation(format!("remark-log needs b >= 0, got {b}")));
        }
        // f(u) = u^b, i.e. ln^b(1 + v) on the v-side.
        return Ok(pair.with_u_weight(ScalarFunction::Power(b)));
    }
    Ok(pair)
}

/// Parses `"ex4"`, `"ex4:q=3"`, `"remark-log:b=0.5"`.
pub fn parse_pair(spec: &str, p: f64) -> Result<NonlinearityPair> {
    let (name, rest) = match spec.split_once(':') {
        Some((n, r)) => (n, Some(r)),
        None => (spec, None),
    };
    let id: CatalogId = name.trim().parse()?;
    let param = match rest {
        None => None,
        Some(r) => {
            let (key, value) = r
                .split_once('=')
                .ok_or_else(|| Error::validation(format!("expected key=value in {spec:?}")))?;
            let expected = if id == CatalogId::RemarkLog { "b" } else { "q" };
            if key.trim() != expected {
                return Err(Error::validation(format!(
                    "pair {name} takes parameter {expected}, got {key}"
                )));
            }
            Some(value.trim().parse::<f64>().map_err(|_| {
                Error::validation(format!("parameter {key} is not a decimal: {value:?}"))
            })?)
        }
    };
    catalog_pair(id, p, param)
}

/// All catalog entries at `p = 2` with default parameters.
pub fn builtin_catalog() -> Vec<NonlinearityPair> {
    CatalogId::ALL
        .into_iter()
        .map(|id| catalog_pair(id, 2.0, None).expect("catalog defaults are valid"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extended::ExtReal;

    #[test]
    fn parses_identifiers() {
        let p = parse_pair("ex4:q=3", 2.0).unwrap();
        assert_eq!(p.closed_form(), Some(ClosedForm::Power { q: 3.0 }));
        assert_eq!(p.l_endpoint(), ExtReal::Finite(0.5));
        assert!(parse_pair("ex7", 2.0).is_err());
        assert!(parse_pair("ex2:q=1.5", 2.0).is_err());
        assert!(parse_pair("ex2:b=0.5", 2.0).is_err());
        assert!(parse_pair("remark-log:b=0", 2.0).is_ok());
    }

    #[test]
    fn entry_four_is_rational_beta() {
        // β(u) = q/(1 − (q−1)u), 1 + g(v) = (1 + v)^q
        let pair = catalog_pair(CatalogId::Ex4, 2.0, Some(3.0)).unwrap();
        for &u in &[0.0, 0.1, 0.3, 0.45] {
            let expected = 3.0 / (1.0 - 2.0 * u);
            assert!((pair.beta(u).unwrap() - expected).abs() < 1e-14);
        }
        for &v in &[0.0, 0.5, 4.0] {
            let expected: f64 = (1.0f64 + v).powf(3.0) - 1.0;
            assert!((pair.g(v).unwrap() - expected).abs() < 1e-12 * (1.0 + expected));
        }
    }

    #[test]
    fn entry_one_is_identity_g() {
        let pair = catalog_pair(CatalogId::Ex1, 2.0, None).unwrap();
        assert_eq!(pair.beta(3.0).unwrap(), 1.0);
        assert_eq!(pair.g(2.5).unwrap(), 2.5);
    }

    #[test]
    fn remark_pair_with_zero_exponent_has_unit_weight() {
        let pair = catalog_pair(CatalogId::RemarkLog, 2.0, Some(0.0)).unwrap();
        let w = pair.u_weight().unwrap();
        for &u in &[0.0, 0.5, 7.0] {
            assert_eq!(w.eval(u).unwrap(), 1.0);
        }
    }

    #[test]
    fn numeric_twins_keep_the_endpoint() {
        for id in CatalogId::ALL {
            let pair = catalog_pair(id, 2.0, None).unwrap();
            let twin = pair.numeric_from_g().unwrap();
            match (pair.l_endpoint().finite(), twin.l_endpoint().finite()) {
                (Some(a), Some(b)) => assert!((a - b).abs() < 1e-9, "{id:?}: {a} vs {b}"),
                (a, b) => assert_eq!(a, b, "{id:?}"),
            }
        }
    }
}
