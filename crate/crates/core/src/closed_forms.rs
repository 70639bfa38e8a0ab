//! Exact formulas: the generalized Cauchy law (`alpha = 1`) and the value at
//! `x = 0`.

use std::f64::consts::{FRAC_1_PI, PI};

use crate::error::{Error, Result};

fn check_theta_unit(theta: f64) -> Result<()> {
    if !(theta.abs() <= 1.0) {
        return Err(Error::domain(
            "theta",
            format!("|theta| = {} exceeds 1", theta.abs()),
        ));
    }
    Ok(())
}

/// `G(x, 1, theta) = 1/2 + atan((x - sin(pi theta/2)) / cos(pi theta/2)) / pi`.
///
/// At `|theta| = 1` the law is a point mass at `theta`; the step function is
/// returned, with the midpoint `1/2` at the jump (the limit of the arctan
/// formula there).
pub fn cdf_alpha1(x: f64, theta: f64) -> Result<f64> {
    check_theta_unit(theta)?;
    if theta.abs() == 1.0 {
        return Ok(if x > theta {
            1.0
        } else if x < theta {
            0.0
        } else {
            0.5
        });
    }
    let half = 0.5 * PI * theta;
    let u = (x - half.sin()) / half.cos();
    // 1/2 + atan(u)/pi loses relative accuracy in the far left tail
    Ok(if u < -1.0 {
        -(1.0 / u).atan() * FRAC_1_PI
    } else {
        0.5 + u.atan() * FRAC_1_PI
    })
}

/// `G(0, alpha, theta) = (1 - theta) / 2` for every admissible pair.
pub fn cdf_at_zero(theta: f64) -> f64 {
    0.5 * (1.0 - theta)
}

/// `g(x, 1, theta) = cos(pi theta/2) / (pi (x^2 - 2 x sin(pi theta/2) + 1))`.
pub fn pdf_alpha1(x: f64, theta: f64) -> Result<f64> {
    check_theta_unit(theta)?;
    if theta.abs() == 1.0 {
        return Err(Error::domain(
            "theta",
            "the alpha = 1, |theta| = 1 law is degenerate and has no density",
        ));
    }
    let half = 0.5 * PI * theta;
    let (s, c) = half.sin_cos();
    Ok(c / (PI * (x * x - 2.0 * x * s + 1.0)))
}
