use std::sync::Arc;

use proptest::prelude::*;

use quasilin::analysis::{first_eigenvalue_on, k_exponent, m_bar, rayleigh_quotient, tau_exponent, EigenOptions};
use quasilin::discretization::{build_grid, compute_norms, FieldKind, GridField, PLaplacian, RadialDomain, RadialGrid};
use quasilin::nonlinearity::{catalog_pair, CatalogId, ScalarFunction};
use quasilin::solver::inner_solve;

const N: usize = 33;

fn grid(ball: bool) -> Arc<RadialGrid> {
    let domain = if ball {
        RadialDomain::ball(1.0, 3).unwrap()
    } else {
        RadialDomain::interval(0.0, 1.0).unwrap()
    };
    Arc::new(build_grid(domain, N).unwrap())
}

fn with_zero_ends(grid: &RadialGrid, mut v: Vec<f64>) -> Vec<f64> {
    for (i, x) in v.iter_mut().enumerate() {
        if grid.is_dirichlet(i) {
            *x = 0.0;
        }
    }
    v
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.5), Just(2.0), Just(3.0)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn summation_by_parts(
        p in exponent(),
        ball in any::<bool>(),
        u in prop::collection::vec(-2.0..2.0f64, N),
        w in prop::collection::vec(-2.0..2.0f64, N),
    ) {
        let g = grid(ball);
        let (u, w) = (with_zero_ends(&g, u), with_zero_ends(&g, w));
        let op = PLaplacian::new(p, 1e-10).unwrap();
        let au = op.apply_values(&g, &u, 0.0);
        let lhs: f64 = g.active().map(|i| g.volumes()[i] * au[i] * w[i]).sum();
        let rhs: f64 = op.fluxes(&g, &u).iter().enumerate().map(|(i, f)| f * (w[i + 1] - w[i])).sum();
        let scale: f64 = op.fluxes(&g, &u).iter().map(|f| f.abs()).sum::<f64>() * 4.0 + 1.0;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale, "{lhs} vs {rhs}");
    }

    #[test]
    fn operator_is_monotone(
        p in exponent(),
        ball in any::<bool>(),
        u in prop::collection::vec(-2.0..2.0f64, N),
        w in prop::collection::vec(-2.0..2.0f64, N),
    ) {
        let g = grid(ball);
        let (u, w) = (with_zero_ends(&g, u), with_zero_ends(&g, w));
        let op = PLaplacian::new(p, 1e-10).unwrap();
        let (au, aw) = (op.apply_values(&g, &u, 0.0), op.apply_values(&g, &w, 0.0));
        let pairing: f64 = g.active().map(|i| g.volumes()[i] * (au[i] - aw[i]) * (u[i] - w[i])).sum();
        prop_assert!(pairing >= -1e-10);
    }

    #[test]
    fn comparison_principle(
        p in exponent(),
        ball in any::<bool>(),
        f in prop::collection::vec(0.0..5.0f64, N),
        extra in prop::collection::vec(0.0..5.0f64, N),
    ) {
        let g = grid(ball);
        let low = GridField::new(g.clone(), f.clone(), FieldKind::Generic).unwrap();
        let high: Vec<f64> = f.iter().zip(&extra).map(|(a, b)| a + b).collect();
        let high = GridField::new(g, high, FieldKind::Generic).unwrap();
        let ul = inner_solve(&low, p, 0.0).unwrap();
        let uh = inner_solve(&high, p, 0.0).unwrap();
        let scale = 1.0 + uh.sup_norm();
        for (a, b) in ul.values().iter().zip(uh.values()) {
            prop_assert!(*a <= b + 1e-9 * scale, "{a} > {b}");
        }
        prop_assert!(ul.values().iter().all(|x| *x >= -1e-12));
    }

    #[test]
    fn psi_and_h_are_inverse(idx in 0usize..8, p in exponent(), t in 0.0..0.99f64) {
        let id = CatalogId::ALL[idx];
        let pair = catalog_pair(id, p, None).unwrap();
        // stay inside the v-range and away from a finite L
        let v = match pair.lambda_endpoint().finite() {
            Some(lam) => t * lam,
            None => 10.0 * t,
        };
        let u = pair.h(v).unwrap();
        let back = pair.psi(u).unwrap();
        prop_assert!((back - v).abs() <= 1e-8 * (1.0 + v.abs()), "{id:?}: {v} -> {u} -> {back}");
    }

    #[test]
    fn norms_are_ordered(
        ball in any::<bool>(),
        v in prop::collection::vec(-3.0..3.0f64, N),
        k in 1.0..6.0f64,
    ) {
        let g = grid(ball);
        let v = with_zero_ends(&g, v);
        let field = GridField::new(g, v, FieldKind::Generic).unwrap();
        let report = compute_norms(&field, 2.0, &[k], &ScalarFunction::Constant(1.0)).unwrap();
        let normalized = report.lk(k).unwrap() / report.measure.powf(1.0 / k);
        prop_assert!(report.sup >= normalized * (1.0 - 1e-12));
    }

    #[test]
    fn exponent_identities(p in 1.05..6.0f64, n in 2usize..12, t in 0.01..0.99f64) {
        prop_assume!(p < n as f64 - 0.05);
        let mb = m_bar(p, n);
        prop_assert!(mb > 1.0 && mb < n as f64 / p);
        let p_prime = p / (p - 1.0);
        prop_assert!((tau_exponent(mb, n) - p_prime).abs() <= 1e-9 * p_prime);
        let m = 1.0 + t * (n as f64 / p - 1.0);
        prop_assert!(k_exponent(m, p, n) > m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn eigenvalue_is_homogeneous(p in exponent(), c in prop_oneof![Just(0.5), Just(2.0), Just(4.0)]) {
        let g = Arc::new(build_grid(RadialDomain::interval(0.0, 1.0).unwrap(), 81).unwrap());
        let base = first_eigenvalue_on(&ScalarFunction::Constant(1.0), p, g.clone(), &EigenOptions::default()).unwrap();
        let scaled = first_eigenvalue_on(&ScalarFunction::Constant(c), p, g, &EigenOptions::default()).unwrap();
        prop_assert!((scaled.lambda1 * c / base.lambda1 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn eigenfunction_minimizes_rayleigh(
        p in exponent(),
        eta in prop::collection::vec(-1.0..1.0f64, 41),
        delta in 1e-3..1e-1f64,
    ) {
        let g = Arc::new(build_grid(RadialDomain::interval(0.0, 1.0).unwrap(), 41).unwrap());
        let e = first_eigenvalue_on(&ScalarFunction::Constant(1.0), p, g.clone(), &EigenOptions::default()).unwrap();
        let f = vec![1.0; 41];
        let eta = with_zero_ends(&g, eta);
        let perturbed: Vec<f64> = e.eigenfield.values().iter().zip(&eta).map(|(a, b)| a + delta * b).collect();
        let r0 = rayleigh_quotient(e.eigenfield.values(), &g, p, &f);
        let r1 = rayleigh_quotient(&perturbed, &g, p, &f);
        prop_assert!(r1 >= r0 * (1.0 - 1e-8), "{r1} < {r0}");
    }
}
