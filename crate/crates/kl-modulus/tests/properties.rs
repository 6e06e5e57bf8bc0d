//! Property-based invariants: serialization round trips, nested-grid
//! monotonicity, decreasing supremum functions and left derivatives.

use proptest::prelude::*;

use kl_modulus::modulus::{exact_modulus, h_of_s, KlContext};
use kl_modulus::numerics;
use kl_modulus::piecewise::{Interval, Piece, PieceForm, Piecewise1D};
use kl_modulus::{catalog, Desingularizer};

/// A random convex-ish chain of affine pieces anchored at zero, always lsc.
fn arb_affine_chain() -> impl Strategy<Value = Piecewise1D> {
    (2usize..6, proptest::collection::vec(0.1f64..3.0, 6))
        .prop_map(|(n, slopes)| {
            let mut pieces = vec![Piece::new(
                f64::NEG_INFINITY,
                0.0,
                PieceForm::Affine {
                    slope: 0.0,
                    intercept: 0.0,
                },
            )];
            let mut x = 0.0f64;
            let mut v = 0.0f64;
            for slope in slopes.iter().take(n) {
                let width = 0.5;
                pieces.push(Piece::new(
                    x,
                    x + width,
                    PieceForm::Affine {
                        slope: *slope,
                        intercept: v - slope * x,
                    },
                ));
                v += slope * width;
                x += width;
            }
            pieces.push(Piece::new(
                x,
                f64::INFINITY,
                PieceForm::Affine {
                    slope: 1.0,
                    intercept: v - x,
                },
            ));
            Piecewise1D::new(pieces).expect("chain construction is valid")
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn json_round_trip_preserves_values(f in arb_affine_chain(), xs in proptest::collection::vec(-2.0f64..5.0, 16)) {
        let text = f.to_json();
        let g = Piecewise1D::from_json(&text).unwrap();
        for x in xs {
            prop_assert_eq!(f.eval(x), g.eval(x));
        }
    }

    #[test]
    fn grid_sup_monotone_under_refinement(n in 3usize..40, a in -2.0f64..0.0, w in 0.5f64..4.0) {
        let iv = Interval { lo: a, hi: a + w, lo_open: true, hi_open: false };
        let q = |x: f64| (x * 1.7).sin() + 0.3 * x;
        let coarse = numerics::grid_sup(q, &[iv], n, 1e3).unwrap();
        let fine = numerics::grid_sup(q, &[iv], 3 * n, 1e3).unwrap();
        prop_assert!(fine.value >= coarse.value - 1e-15);
    }

    #[test]
    fn supremum_function_decreases(rho in 0.2f64..3.0, s_pairs in proptest::collection::vec((1e-3f64..2.0, 1e-3f64..2.0), 8)) {
        let f = catalog::nonsmooth_modulus(rho).unwrap();
        let ctx = KlContext::global(&f, 0.0, f64::INFINITY).unwrap();
        for (p, q) in s_pairs {
            let (lo, hi) = (p.min(q), p.max(q));
            let h_lo = h_of_s(&f, &ctx, lo).unwrap().value_or(0.0);
            let h_hi = h_of_s(&f, &ctx, hi).unwrap().value_or(0.0);
            prop_assert!(h_hi <= h_lo + 1e-12);
        }
    }

    #[test]
    fn modulus_left_derivative_nonincreasing(rho in 0.2f64..3.0) {
        let f = catalog::nonsmooth_modulus(rho).unwrap();
        let ctx = KlContext::global(&f, 0.0, f64::INFINITY).unwrap();
        let m = exact_modulus(&f, &ctx).unwrap();
        let mut prev = f64::INFINITY;
        for i in 1..=60 {
            let t = 2.5 * i as f64 / 60.0;
            let d = m.left_deriv(t);
            prop_assert!(d <= prev + 1e-12);
            prop_assert!(d > 0.0);
            prev = d;
        }
    }

    #[test]
    fn chain_modulus_is_concave_and_self_desingularizing(f in arb_affine_chain()) {
        let ctx = KlContext::global(&f, 0.0, f64::INFINITY).unwrap();
        let m = exact_modulus(&f, &ctx).unwrap();
        let phi: &Desingularizer = m.desingularizer();
        prop_assert!(phi.is_concave());
        let grid = numerics::linspace(-1.0, 4.0, 801);
        let rep = kl_modulus::verify_gkl(&f, &ctx, phi, &grid, 1e-9);
        prop_assert!(rep.passed(), "min lhs {}", rep.min_lhs);
    }
}

#[test]
fn invert_monotone_round_trips_on_catalog_functions() {
    // deterministic pseudo-random points per function
    let mut state = 0x2545F4914F6CDD1Du64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let three = catalog::three_slope_step();
    let quad = catalog::symmetric_power(2.0);
    let cases: [(&Piecewise1D, f64, f64); 2] = [(&three, 0.01, 2.0), (&quad, 0.0, 1.0)];
    for (f, lo, hi) in cases {
        for _ in 0..100 {
            let x = lo + (hi - lo) * next();
            let y = f.eval(x);
            let x_rec =
                numerics::invert_monotone(|t| f.eval(t), lo, hi, y, 1e-12 * (1.0 + y)).unwrap();
            let y_rec = f.eval(x_rec);
            assert!((y_rec - y).abs() <= 1e-10 * (1.0 + y.abs()), "x={x}");
        }
    }
}
