//! Parameter domain of strictly stable laws in form C, scale reduction and
//! the inversion symmetry.
//!
//! The characteristic function is
//! `g(t) = exp{-lambda |t|^alpha exp(-i pi alpha theta sign(t) / 2)}`
//! with `0 < alpha <= 2`, `|theta| <= min(1, 2/alpha - 1)` and `lambda > 0`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Slack allowed on the theta bound so that values such as `1/3` for
/// `alpha = 1.5` are not rejected over a rounding difference in `2/alpha - 1`.
const THETA_SLACK: f64 = 1e-12;

/// Tolerance on `g_plus` in [`apply_inversion`].
const CDF_RANGE_SLACK: f64 = 1e-12;

/// A validated `(alpha, theta, lambda)` triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StableParams {
    alpha: f64,
    theta: f64,
    lambda: f64,
}

/// Largest admissible `|theta|` for the given `alpha`.
pub fn theta_limit(alpha: f64) -> f64 {
    (2.0 / alpha - 1.0).min(1.0)
}

/// Validates raw parameters. Out-of-domain values are rejected, never clamped.
pub fn validate(alpha: f64, theta: f64, lambda: f64) -> Result<StableParams> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::domain(
            "alpha",
            format!("alpha = {alpha} is outside (0, 2]"),
        ));
    }
    let limit = theta_limit(alpha);
    if !theta.is_finite() || theta.abs() > limit + THETA_SLACK {
        return Err(Error::domain(
            "theta",
            format!(
                "|theta| = {} exceeds min(1, 2/alpha - 1) = {limit} for alpha = {alpha}",
                theta.abs()
            ),
        ));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::domain(
            "lambda",
            format!("lambda = {lambda} must be positive and finite"),
        ));
    }
    Ok(StableParams {
        alpha,
        theta,
        lambda,
    })
}

impl StableParams {
    pub fn new(alpha: f64, theta: f64, lambda: f64) -> Result<Self> {
        validate(alpha, theta, lambda)
    }

    /// Standard law (`lambda = 1`).
    pub fn standard(alpha: f64, theta: f64) -> Result<Self> {
        validate(alpha, theta, 1.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// The same law with skewness negated, i.e. the law of `-Y`.
    pub fn mirrored(&self) -> Self {
        StableParams {
            theta: -self.theta,
            ..*self
        }
    }

    /// Multiplier taking `x` to standardized units, `lambda^(-1/alpha)`.
    pub fn scale_factor(&self) -> f64 {
        self.lambda.powf(-1.0 / self.alpha)
    }
}

/// Sign of the query coordinate. Zero is its own branch so that the `x = 0`
/// closed form is used instead of any approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(x: f64) -> Sign {
        if x > 0.0 {
            Sign::Positive
        } else if x < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Negative => -1.0,
            Sign::Zero => 0.0,
            Sign::Positive => 1.0,
        }
    }
}

/// A query folded onto the positive half-line of the standard law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardizedQuery {
    /// `|x| * lambda^(-1/alpha)`, always `>= 0`.
    pub x_std: f64,
    /// `theta * sign(x)`; equal to `theta` when `x = 0`.
    pub theta_eff: f64,
    pub sign: Sign,
}

/// Folds `x` onto the standard law.
///
/// Since `g(t, alpha, theta, lambda) = g(t lambda^(1/alpha), alpha, theta, 1)`,
/// a form-C variable with scale `lambda` equals `lambda^(1/alpha)` times a
/// standard one, hence `G(x, lambda) = G(x lambda^(-1/alpha), 1)`.
pub fn standardize(params: &StableParams, x: f64) -> StandardizedQuery {
    let sign = Sign::of(x);
    let x_std = if params.lambda == 1.0 {
        x.abs()
    } else {
        x.abs() * params.scale_factor()
    };
    let theta_eff = match sign {
        Sign::Zero => params.theta,
        s => params.theta * s.as_f64(),
    };
    StandardizedQuery {
        x_std,
        theta_eff,
        sign,
    }
}

/// Maps a positive-axis cdf value `G(|x|, alpha, theta*)` back to `G(x, alpha, theta)`
/// via `G(-x, alpha, theta) = 1 - G(x, alpha, -theta)`.
pub fn apply_inversion(g_plus: f64, sign: Sign) -> Result<f64> {
    if !(-CDF_RANGE_SLACK..=1.0 + CDF_RANGE_SLACK).contains(&g_plus) {
        return Err(Error::Contract(format!(
            "cdf value {g_plus} is outside [0, 1]"
        )));
    }
    match sign {
        Sign::Positive => Ok(g_plus),
        Sign::Negative => Ok(1.0 - g_plus),
        Sign::Zero => Err(Error::Contract(
            "x = 0 must be evaluated with the closed form (1 - theta)/2".into(),
        )),
    }
}
