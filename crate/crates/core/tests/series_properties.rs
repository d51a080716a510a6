//! Property suites for the truncated-series engine: ring laws, trig
//! identities, and finite-difference cross-validation of derivative
//! extraction against direct finite-eps evaluation.

use breather_core::{Complex, EpsSeries};
use proptest::prelude::*;

type S = EpsSeries<f64>;
type C = Complex<f64>;

const WINDOW: usize = 10;

fn arb_coeff() -> impl Strategy<Value = C> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(re, im)| C::new(re, im))
}

/// Series with valuation in [-2, 2] and a nonzero leading coefficient.
fn arb_series() -> impl Strategy<Value = S> {
    (
        -2i32..3,
        prop::collection::vec(arb_coeff(), WINDOW),
        1.0..2.0f64,
    )
        .prop_map(|(val, mut coeffs, lead)| {
            coeffs[0] = C::new(lead, -lead * 0.5);
            S::from_coeffs(val, coeffs)
        })
}

/// Analytic series (valuation 0) with unit-scale constant term.
fn arb_analytic() -> impl Strategy<Value = S> {
    prop::collection::vec(arb_coeff(), WINDOW).prop_map(|mut coeffs| {
        coeffs[0] = C::new(1.0, 0.0) + coeffs[0].scale_f64(0.25);
        S::from_coeffs(0, coeffs)
    })
}

fn close(a: &S, b: &S, tol: f64) -> bool {
    a.max_abs_diff(b) <= tol
}

/// Largest coefficient modulus (floored at 1): round-trip identities hold to
/// working precision relative to the intermediate coefficient scale, which
/// grows geometrically when a constant term sits near the edge of the
/// composite's convergence disk.
fn coeff_scale(a: &S) -> f64 {
    let mut m = 1.0f64;
    for e in a.valuation()..a.window_end() {
        m = m.max(a.coeff(e).abs());
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn addition_is_associative_and_commutative(a in arb_series(), b in arb_series(), c in arb_series()) {
        let lhs = a.add(&b).add(&c);
        let rhs = a.add(&b.add(&c));
        prop_assert!(close(&lhs, &rhs, 1e-12));
        prop_assert!(close(&a.add(&b), &b.add(&a), 0.0));
    }

    #[test]
    fn multiplication_commutes_and_distributes(a in arb_series(), b in arb_series(), c in arb_series()) {
        prop_assert!(close(&a.mul(&b), &b.mul(&a), 1e-12));
        let lhs = a.mul(&b.add(&c));
        let rhs = a.mul(&b).add(&a.mul(&c));
        prop_assert!(close(&lhs, &rhs, 1e-9));
    }

    #[test]
    fn division_inverts_multiplication(a in arb_series(), b in arb_series()) {
        let q = a.mul(&b).div(&b).unwrap();
        let tol = 1e-11 * coeff_scale(&a.mul(&b)) * coeff_scale(&b.inv().unwrap());
        prop_assert!(close(&q, &a, tol));
    }

    #[test]
    fn sin_sq_plus_cos_sq_is_one(u in arb_analytic()) {
        let (s, c) = u.sin_cos().unwrap();
        let ident = s.mul(&s).add(&c.mul(&c));
        let one = S::constant(C::new(1.0, 0.0), WINDOW);
        prop_assert!(close(&ident, &one, 1e-9));
    }

    #[test]
    fn exp_ln_round_trip(u in arb_analytic()) {
        let l = u.ln().unwrap();
        let rt = l.exp().unwrap();
        let tol = 1e-11 * coeff_scale(&l).powi(2).max(coeff_scale(&u));
        prop_assert!(close(&rt, &u, tol));
    }

    #[test]
    fn sqrt_squares_back(u in arb_analytic()) {
        let r = u.sqrt().unwrap();
        let tol = 1e-11 * coeff_scale(&r).powi(2);
        prop_assert!(close(&r.mul(&r), &u, tol));
    }

    #[test]
    fn series_value_matches_horner_evaluation(a in arb_series(), eps in 0.01..0.2f64) {
        // the truncated series evaluated two ways must agree
        let direct = a.eval_at(&eps);
        let mut acc = C::new(0.0, 0.0);
        for e in a.valuation()..a.window_end() {
            acc = acc + a.coeff(e).scale_f64(eps.powi(e));
        }
        prop_assert!((direct - acc).abs() < 1e-10);
    }
}

/// Finite-difference cross-validation: derivatives extracted from the series
/// must match central differences of the direct finite-eps evaluation of the
/// same composite, second-order extrapolated at h = 1e-4.
#[test]
fn derivative_extraction_matches_finite_differences() {
    // composite resembling a base column function: (1/eps-ish pole) * sin of
    // an odd argument; built here as g(eps) = sin(2 eps + eps^3) / eps
    let window = 10;
    let two_eps = S::monomial(C::new(2.0, 0.3), 1, window);
    let cubic = S::monomial(C::new(1.0, -0.1), 3, window);
    let arg = two_eps.add(&cubic);
    let (sin_s, _) = arg.sin_cos().unwrap();
    let g = sin_s
        .div(&S::monomial(C::new(1.0, 0.0), 1, window))
        .unwrap();

    let direct = |eps: f64| -> C {
        let z = C::new(
            2.0 * eps + eps * eps * eps,
            0.3 * eps - 0.1 * eps * eps * eps,
        );
        z.sin().scale_f64(1.0 / eps)
    };

    // m = 0: Richardson limit of the direct evaluation
    let h = 1e-4;
    let f0 = |h: f64| (direct(h) + direct(-h)).scale_f64(0.5);
    let v0 = (f0(h / 2.0).scale_f64(4.0) - f0(h)).scale_f64(1.0 / 3.0);
    let s0 = g.derivative_at_zero(0).unwrap();
    assert!((v0.clone() - s0).abs() < 1e-8);

    // m = 2: central second difference around the extrapolated center value,
    // second-order extrapolated in h
    let second =
        |h: f64| (direct(h) - v0.clone().scale_f64(2.0) + direct(-h)).scale_f64(1.0 / (h * h));
    let v2 = (second(h / 2.0).scale_f64(4.0) - second(h)).scale_f64(1.0 / 3.0);
    let s2 = g.derivative_at_zero(2).unwrap();
    assert!(
        (v2.clone() - s2.clone()).abs() < 1e-6 * s2.abs().max(1.0),
        "fd {v2:?} vs series {s2:?}"
    );
}
