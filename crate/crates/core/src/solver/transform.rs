use serde::{Deserialize, Serialize};

use crate::discretization::{FieldKind, GridField};
use crate::error::{Error, Result};
use crate::nonlinearity::NonlinearityPair;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// `v = Ψ(u)`.
    UToV,
    /// `u = H(v)`.
    VToU,
}

/// Applies `Ψ` or `H` nodewise and flips the field tag.
pub fn transform_solution(field: &GridField, pair: &NonlinearityPair, direction: Direction) -> Result<GridField> {
    let (from, to, end, what) = match direction {
        Direction::UToV => (FieldKind::U, FieldKind::V, pair.l_endpoint(), "psi"),
        Direction::VToU => (FieldKind::V, FieldKind::U, pair.lambda_endpoint(), "H"),
    };
    if field.kind() != from && field.kind() != FieldKind::Generic {
        return Err(Error::validation(format!(
            "{direction:?} needs a {from:?}-field, got a {:?}-field",
            field.kind()
        )));
    }
    let mut out = Vec::with_capacity(field.values().len());
    for (node, &x) in field.values().iter().enumerate() {
        if !end.contains(x) {
            return Err(Error::NodeDomain {
                what,
                node,
                value: x,
                endpoint: end.to_f64(),
            });
        }
        let y = match direction {
            Direction::UToV => pair.psi(x),
            Direction::VToU => pair.h(x),
        };
        out.push(y.map_err(|e| match e {
            Error::Domain { what, value, endpoint } => Error::NodeDomain { what, node, value, endpoint },
            other => other,
        })?);
    }
    GridField::new(field.grid().clone(), out, to)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::{build_grid, RadialDomain};
    use crate::nonlinearity::{catalog_pair, CatalogId, ScalarFunction};
    use std::sync::Arc;

    fn grid() -> Arc<crate::discretization::RadialGrid> {
        Arc::new(build_grid(RadialDomain::interval(0.0, 1.0).unwrap(), 11).unwrap())
    }

    #[test]
    fn zero_g_is_identity() {
        let pair = NonlinearityPair::from_g(ScalarFunction::Constant(0.0), 2.0).unwrap();
        let v = GridField::from_fn(grid(), FieldKind::V, |x| x * (1.0 - x)).unwrap();
        let u = transform_solution(&v, &pair, Direction::VToU).unwrap();
        assert_eq!(u.kind(), FieldKind::U);
        for (a, b) in u.values().iter().zip(v.values()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn round_trip() {
        for id in CatalogId::ALL {
            let pair = catalog_pair(id, 2.0, None).unwrap();
            let v = GridField::from_fn(grid(), FieldKind::V, |x| 0.9 * 4.0 * x * (1.0 - x) * 0.25).unwrap();
            let u = transform_solution(&v, &pair, Direction::VToU).unwrap();
            let back = transform_solution(&u, &pair, Direction::UToV).unwrap();
            assert!(back.sup_distance(&v) < 1e-10, "{id:?}");
        }
    }

    #[test]
    fn endpoint_violation_names_the_node() {
        let pair = catalog_pair(CatalogId::Ex5, 2.0, None).unwrap();
        let u = GridField::from_fn(grid(), FieldKind::U, |x| if (x - 0.3).abs() < 1e-9 { 1.0 } else { 0.1 }).unwrap();
        match transform_solution(&u, &pair, Direction::UToV) {
            Err(Error::NodeDomain { node, .. }) => assert_eq!(node, 3),
            other => panic!("unexpected {other:?}"),
        }
    }
}
