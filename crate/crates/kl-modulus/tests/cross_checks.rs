//! Dual-route consistency checks: the pointwise supremum queries against the
//! assembled cell decomposition, exact integrals against quadrature, and the
//! closed-form convex route against the branch decomposition.

use kl_modulus::catalog;
use kl_modulus::modulus::{
    exact_modulus, exact_modulus_convex_c1, h_of_s, KlContext,
};
use kl_modulus::numerics;
use kl_modulus::piecewise::Interval;

#[test]
fn pointwise_h_agrees_with_cells() {
    let cases: Vec<(kl_modulus::Piecewise1D, f64)> = vec![
        (catalog::nonsmooth_modulus(0.7).unwrap(), f64::INFINITY),
        (catalog::three_slope_step(), f64::INFINITY),
        (catalog::exp_flat(), 0.5),
    ];
    for (f, eta) in cases {
        let ctx = KlContext::global(&f, 0.0, eta).unwrap();
        let m = exact_modulus(&f, &ctx).unwrap();
        let hi = if eta.is_finite() { eta * 0.999 } else { 3.0 };
        for i in 0..500 {
            // avoid landing exactly on cell edges
            let s = hi * (i as f64 + 0.437) / 500.0;
            if s <= 0.0 {
                continue;
            }
            let pointwise = h_of_s(&f, &ctx, s).unwrap().value_or(0.0);
            let celled = m.h_at(s);
            assert!(
                (pointwise - celled).abs() <= 1e-10 * (1.0 + pointwise.abs()),
                "s={s}: pointwise {pointwise} vs cells {celled}"
            );
        }
    }
}

#[test]
fn exact_integral_agrees_with_quadrature() {
    let f = catalog::nonsmooth_modulus(1.0).unwrap();
    let ctx = KlContext::global(&f, 0.0, f64::INFINITY).unwrap();
    let m = exact_modulus(&f, &ctx).unwrap();
    for &t in &[0.05, 0.3, 0.5, 1.7] {
        let quad = numerics::integrate_decreasing(|s| m.h_at(s), t, 1e-9).unwrap();
        assert!(quad.converged);
        assert!(
            (quad.value - m.eval(t)).abs() < 1e-8,
            "t={t}: quadrature {} vs exact {}",
            quad.value,
            m.eval(t)
        );
    }
}

#[test]
fn convex_routes_cross_validate_on_three_instances() {
    // quadratic, quartic, asymmetric-curvature instances on (−1, 1)
    let instances: Vec<(kl_modulus::Piecewise1D, f64)> = vec![
        (catalog::symmetric_power(2.0), 0.5),
        (catalog::symmetric_power(4.0), 0.25),
        (catalog::asymmetric_power(), 0.5),
    ];
    let start = std::time::Instant::now();
    for (f, eta) in instances {
        let inverse_route = exact_modulus_convex_c1(&f, 0.0, -1.0, 1.0).unwrap();
        assert!((inverse_route.context.eta - eta).abs() < 1e-12);
        let ctx = KlContext::pointwise(&f, 0.0, Interval::open(-1.0, 1.0), eta).unwrap();
        let branch_route = exact_modulus(&f, &ctx).unwrap();
        for i in 1..=60 {
            let t = eta * i as f64 / 61.0;
            let a = inverse_route.eval(t);
            let b = branch_route.eval(t);
            assert!((a - b).abs() < 1e-6, "t={t}: {a} vs {b}");
        }
    }
    assert!(start.elapsed().as_secs_f64() < 10.0);
}

#[test]
fn quartic_modulus_closed_form() {
    // f = x^4/4: branch inverses integrate to (4t)^{1/4}
    let f = catalog::symmetric_power(4.0);
    let ctx = KlContext::pointwise(&f, 0.0, Interval::open(-1.0, 1.0), 0.25).unwrap();
    let m = exact_modulus(&f, &ctx).unwrap();
    for i in 1..=40 {
        let t = 0.25 * i as f64 / 41.0;
        let golden = (4.0 * t).powf(0.25);
        assert!(
            (m.eval(t) - golden).abs() < 1e-10,
            "t={t}: {} vs {golden}",
            m.eval(t)
        );
    }
}
