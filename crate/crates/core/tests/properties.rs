use proptest::prelude::*;

use stable_tail::params::{standardize, theta_limit};
use stable_tail::quadrature::{cdf_integral, integrand};
use stable_tail::special::log_gamma;
use stable_tail::tail_series::{cdf_remainder_bound, cdf_series};
use stable_tail::threshold::threshold_lhs_ln;
use stable_tail::{
    solve_threshold, Convention, EvalPolicy, Evaluator, Method, QuadratureSpec, StableParams,
};

fn evaluator() -> Evaluator {
    Evaluator::new(EvalPolicy::default()).unwrap()
}

/// Valid (alpha, theta): theta drawn as a fraction of its admissible range.
fn law() -> impl Strategy<Value = (f64, f64)> {
    (0.05f64..=2.0, -1.0f64..=1.0).prop_map(|(a, u)| (a, u * theta_limit(a)))
}

/// |x| spread over many decades.
fn abscissa() -> impl Strategy<Value = f64> {
    (-3.0f64..6.0).prop_map(|e| 10f64.powf(e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn inversion_identity((alpha, theta) in law(), x in abscissa()) {
        let eval = evaluator();
        let p = StableParams::standard(alpha, theta).unwrap();
        let a = eval.cdf(&p, -x).unwrap();
        let b = eval.cdf(&p.mirrored(), x).unwrap();
        let dev = (a.value + b.value - 1.0).abs();
        prop_assert!(dev <= 2.0 * (a.bound_or_estimate + b.bound_or_estimate) + 1e-12, "{dev:e}");
    }

    #[test]
    fn scale_enters_only_through_standardization(
        (alpha, theta) in law(),
        x in abscissa(),
        lambda in 0.01f64..100.0,
    ) {
        let eval = evaluator();
        let scaled = StableParams::new(alpha, theta, lambda).unwrap();
        let unit = StableParams::standard(alpha, theta).unwrap();
        let q = standardize(&scaled, x);
        prop_assert_eq!(q.x_std, x * scaled.scale_factor());
        let a = eval.cdf(&scaled, x).unwrap();
        let b = eval.cdf(&unit, q.x_std).unwrap();
        prop_assert_eq!(a.value, b.value);
        prop_assert_eq!(a.method, b.method);
        prop_assert_eq!((a.params.alpha(), a.params.theta()), (alpha, theta));
    }

    #[test]
    fn cdf_is_a_distribution_function((alpha, theta) in law(), x in abscissa(), step in 1.001f64..10.0) {
        let eval = evaluator();
        let p = StableParams::standard(alpha, theta).unwrap();
        for (lo, hi) in [(x, x * step), (-x * step, -x)] {
            let a = eval.cdf(&p, lo).unwrap();
            let b = eval.cdf(&p, hi).unwrap();
            prop_assert!((0.0..=1.0).contains(&a.value) && (0.0..=1.0).contains(&b.value));
            prop_assert!(b.value + b.bound_or_estimate + a.bound_or_estimate + 1e-15 >= a.value,
                "G({lo}) = {} > G({hi}) = {}", a.value, b.value);
        }
    }

    #[test]
    fn routing_is_deterministic_and_honest((alpha, theta) in law(), x in abscissa()) {
        let eval = evaluator();
        let p = StableParams::standard(alpha, theta).unwrap();
        let a = eval.cdf(&p, x).unwrap();
        let b = evaluator().cdf(&p, x).unwrap();
        prop_assert_eq!(&a, &b);
        if a.method == Method::SeriesTail {
            prop_assert!(a.bound_is_rigorous);
            prop_assert!(a.bound_or_estimate <= eval.policy().epsilon);
        }
    }

    #[test]
    fn series_agrees_with_quadrature_where_certified(
        (alpha, theta) in law(),
        n in 5u32..=40,
        stretch in 1.0f64..1e4,
    ) {
        prop_assume!((alpha - 1.0).abs() > 1e-3 && theta.abs() < 1.0);
        let t = solve_threshold(alpha, n, 1e-5, Convention::PiFactorial);
        prop_assume!(t.is_ok());
        let x_eps = t.unwrap().x_eps;
        let x = x_eps * stretch;
        let p = StableParams::standard(alpha, theta).unwrap();
        let s = cdf_series(&p, x, n).unwrap();
        let q = cdf_integral(&p, x, &QuadratureSpec::default()).unwrap();
        prop_assert!((s.value - q.certified.value).abs() <= 1e-5 + s.bound + q.certified.bound,
            "series {} vs quadrature {}", s.value, q.certified.value);
    }

    #[test]
    fn integrand_is_monotone_and_bounded((alpha, theta) in law(), x in abscissa()) {
        prop_assume!((alpha - 1.0).abs() > 1e-6);
        let lo = -std::f64::consts::FRAC_PI_2 * theta;
        let hi = std::f64::consts::FRAC_PI_2;
        let mut prev: Option<f64> = None;
        for i in 1..200 {
            let phi = lo + (hi - lo) * f64::from(i) / 200.0;
            let v = integrand(phi, x, alpha, theta);
            prop_assert!((0.0..=1.0).contains(&v));
            if let Some(p) = prev {
                if alpha < 1.0 {
                    prop_assert!(v <= p + 1e-15);
                } else {
                    prop_assert!(v >= p - 1e-15);
                }
            }
            prev = Some(v);
        }
    }

    #[test]
    fn remainder_bound_positive_and_decreasing_in_x(alpha in 0.2f64..=2.0, n in 1u32..=90, x in 0.01f64..1e4) {
        let a = cdf_remainder_bound(x, alpha, n).unwrap();
        let b = cdf_remainder_bound(x * 1.5, alpha, n).unwrap();
        // zero only through underflow; the log form stays finite
        let ln_a = threshold_lhs_ln(x, alpha, n, Convention::PiFactorial);
        prop_assert!(ln_a.is_finite());
        prop_assert!(a > 0.0 || ln_a < f64::MIN_POSITIVE.ln());
        prop_assert!(b < a || (a == 0.0 && b == 0.0));
        if a > 1e-300 {
            prop_assert!((a.ln() - ln_a).abs() <= 1e-10 * ln_a.abs().max(1.0));
        }
    }

    #[test]
    fn threshold_grows_as_epsilon_shrinks(alpha in 0.2f64..=2.0, n in 2u32..=90, e in -12.0f64..-2.0) {
        let eps = 10f64.powf(e);
        let loose = solve_threshold(alpha, n, eps, Convention::PiFactorial);
        let tight = solve_threshold(alpha, n, eps / 2.0, Convention::PiFactorial);
        // slow decay (small alpha * N) can push the root past the bracket
        prop_assume!(loose.is_ok() && tight.is_ok());
        let (loose, tight) = (loose.unwrap(), tight.unwrap());
        prop_assert!(tight.x_eps > loose.x_eps);
        let bound = cdf_remainder_bound(loose.x_eps, alpha, n).unwrap();
        prop_assert!(bound <= eps * (1.0 + 1e-9), "{bound:e} vs {eps:e}");
    }

    #[test]
    fn threshold_lhs_decreasing(alpha in 0.2f64..=2.0, n in 1u32..=90, x in 1e-6f64..1e6) {
        for c in [Convention::PiFactorial, Convention::AlphaFactorial] {
            prop_assert!(threshold_lhs_ln(x * 1.01, alpha, n, c) < threshold_lhs_ln(x, alpha, n, c));
        }
    }

    #[test]
    fn log_gamma_recurrence(z in 0.1f64..200.0) {
        let lhs = log_gamma(z + 1.0).unwrap();
        let rhs = log_gamma(z).unwrap() + z.ln();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0), "{lhs} vs {rhs}");
    }
}
