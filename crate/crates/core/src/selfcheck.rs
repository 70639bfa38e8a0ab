//! Quick invariant suite run by the `selfcheck` subcommand.

use serde::Serialize;

use crate::closed_forms::cdf_alpha1;
use crate::error::Result;
use crate::evaluator::{EvalPolicy, Evaluator};
use crate::oracle::{oracle_cdf, OracleSpec};
use crate::params::StableParams;
use crate::quadrature::{cdf_integral, QuadratureSpec};
use crate::tail_series::{cdf_series, pdf_tail_series};
use crate::threshold::{solve_threshold, threshold_limit_behavior, Convention};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, result: Result<(bool, String)>) -> CheckOutcome {
    match result {
        Ok((passed, detail)) => CheckOutcome {
            name,
            passed,
            detail,
        },
        Err(e) => CheckOutcome {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn known_thresholds() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for (alpha, want) in [
        (0.5, 0.088),
        (0.7, 0.402),
        (0.9, 1.000),
        (1.1, 1.860),
        (1.4, 3.552),
        (1.7, 5.612),
    ] {
        let got = solve_threshold(alpha, 30, 1e-5, Convention::PiFactorial)?.x_eps;
        worst = worst.max(((got - want) / want).abs());
    }
    Ok((worst < 0.02, format!("max relative deviation {worst:.3e}")))
}

fn cauchy_series() -> Result<(bool, String)> {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for theta in [0.0, 0.5, -0.5] {
        let params = StableParams::standard(1.0, theta)?;
        for x in [1.5, 2.0, 5.0, 10.0] {
            let s = cdf_series(&params, x, 60)?;
            let err = (s.value - cdf_alpha1(x, theta)?).abs();
            // the bound covers truncation; the doubles themselves carry rounding
            ok &= err <= s.bound + 4.0 * f64::EPSILON * s.value.abs();
            worst = worst.max(err);
        }
    }
    Ok((ok, format!("max error {worst:.3e}")))
}

fn inversion_and_zero(eval: &Evaluator) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for (alpha, theta) in [(0.5, 0.6), (0.9, -0.3), (1.0, 0.4), (1.3, 0.2), (1.8, -0.1)] {
        let params = StableParams::standard(alpha, theta)?;
        for x in [0.3, 1.7, 12.0] {
            let a = eval.cdf(&params, -x)?;
            let b = eval.cdf(&params.mirrored(), x)?;
            let dev = (a.value + b.value - 1.0).abs();
            ok &= dev <= 2.0 * (a.bound_or_estimate + b.bound_or_estimate) + 1e-12;
            worst = worst.max(dev);
        }
        ok &= eval.cdf(&params, 0.0)?.value == 0.5 * (1.0 - theta);
    }
    Ok((ok, format!("max deviation {worst:.3e}")))
}

fn gaussian_oracle() -> Result<(bool, String)> {
    let params = StableParams::standard(2.0, 0.0)?;
    let spec = OracleSpec::default();
    let mut worst: f64 = 0.0;
    for x in [-5.0, -2.0, -1.0, 0.0, 1.0, 2.0, 5.0] {
        let q = cdf_integral(&params, x, &QuadratureSpec::default())?
            .certified
            .value;
        worst = worst.max((q - oracle_cdf(&params, x, &spec)?).abs());
    }
    Ok((
        worst <= 1e-7,
        format!("max |quadrature - oracle| {worst:.3e}"),
    ))
}

fn trichotomy() -> Result<(bool, String)> {
    let grid = [3, 10, 30, 60, 90];
    let xs = |alpha| -> Result<Vec<f64>> {
        Ok(threshold_limit_behavior(alpha, 1e-5, &grid)?
            .into_iter()
            .map(|p| p.1)
            .collect())
    };
    let below = xs(0.7)?;
    let one = xs(1.0)?;
    let above = xs(1.3)?;
    let ok = below.windows(2).all(|w| w[1] < w[0])
        && one.windows(2).all(|w| w[1] < w[0])
        && one.iter().all(|&x| x > 1.0)
        && above[2] < above[3]
        && above[3] < above[4]
        && above[0] > above[2];
    Ok((ok, format!("alpha=1.3 thresholds {above:.4?}")))
}

fn monotone_cdf(eval: &Evaluator) -> Result<(bool, String)> {
    let mut ok = true;
    for alpha in [0.7, 1.3] {
        let params = StableParams::standard(alpha, 0.0)?;
        let mut prev = -1.0;
        for i in -60i32..=60 {
            let x = f64::from(i).signum() * 10f64.powf(f64::from(i.abs()) / 20.0 - 1.0);
            let x = if i == 0 { 0.0 } else { x };
            let v = eval.cdf(&params, x)?.value;
            ok &= (0.0..=1.0).contains(&v) && v >= prev;
            prev = v;
        }
    }
    Ok((ok, "121-point log grid on [-100, 100]".into()))
}

fn pdf_cdf_consistency() -> Result<(bool, String)> {
    let h = 1e-3;
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for alpha in [0.7, 1.3] {
        let params = StableParams::standard(alpha, 0.0)?;
        for x in [5.0, 10.0, 20.0, 50.0] {
            let up = cdf_series(&params, x + h, 30)?;
            let down = cdf_series(&params, x - h, 30)?;
            let fd = (up.value - down.value) / (2.0 * h);
            let pdf = pdf_tail_series(&params, x, 30)?;
            let dev = (fd - pdf.value).abs();
            ok &= dev <= 1e-6 + pdf.bound + (up.bound + down.bound) / (2.0 * h);
            worst = worst.max(dev);
        }
    }
    Ok((ok, format!("max deviation {worst:.3e}")))
}

/// Runs every check; never panics.
pub fn run_selfcheck() -> Vec<CheckOutcome> {
    let eval = Evaluator::new(EvalPolicy::default()).expect("default policy is valid");
    vec![
        outcome("known-thresholds", known_thresholds()),
        outcome("cauchy-series", cauchy_series()),
        outcome("inversion-and-zero", inversion_and_zero(&eval)),
        outcome("gaussian-oracle", gaussian_oracle()),
        outcome("threshold-trichotomy", trichotomy()),
        outcome("monotone-cdf", monotone_cdf(&eval)),
        outcome("pdf-cdf-consistency", pdf_cdf_consistency()),
    ]
}
