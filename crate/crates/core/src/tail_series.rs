//! Power series of the distribution function and density at `|x| -> oo`,
//! each paired with its proved remainder bound.
//!
//! For `x > 0` and `theta != +-1`,
//!
//! ```text
//! 1 - G(x) = (1/pi) sum_{n=1}^{N-1} (-1)^(n+1) Gamma(alpha n) sin(pi alpha n (1+theta)/2) x^(-alpha n) / n!  + R_N
//! |R_N|    <= x^(-alpha N) / (pi N!) * (Gamma(alpha N) + x^(-alpha) Gamma(alpha (N+1)))
//! ```
//!
//! Negative `x` is folded with `theta* = theta sign(x)`. The series converges
//! for every `x` when `alpha < 1`, for `|x| > 1` when `alpha = 1`, and is only
//! asymptotic when `alpha > 1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{standardize, Sign, StableParams};
use crate::special::{ln_gamma_pos, log_add_exp, pdf_term_log, series_term_log, CompensatedSum};

/// Number of series terms used when nothing else is requested.
pub const DEFAULT_TERMS: u32 = 30;

const LN_PI: f64 = 1.144_729_885_849_400_2;

/// How a value was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    SeriesTail,
    Quadrature,
    ClosedFormAlpha1,
    ClosedFormZero,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::SeriesTail => "series",
            Method::Quadrature => "quadrature",
            Method::ClosedFormAlpha1 => "closed-form-alpha1",
            Method::ClosedFormZero => "closed-form-zero",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// A value with an absolute-error bound. For [`Method::SeriesTail`] the bound
/// is the remainder estimate evaluated at the query point; for
/// [`Method::Quadrature`] it is the integrator's error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertifiedValue {
    pub value: f64,
    pub bound: f64,
    pub method: Method,
    pub terms_used: u32,
}

/// Convergence behaviour of the tail series as `N -> oo`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// `alpha < 1`: converges for every `x > 0`.
    ConvergentAllX,
    /// `alpha = 1`: converges for `|x| > 1`.
    ConvergentBeyondOne,
    /// `alpha > 1`: diverges for every `x`, asymptotic as `x -> oo`.
    AsymptoticOnly,
}

impl Regime {
    pub fn converges_at(self, x_abs: f64) -> bool {
        match self {
            Regime::ConvergentAllX => x_abs > 0.0,
            Regime::ConvergentBeyondOne => x_abs > 1.0,
            Regime::AsymptoticOnly => false,
        }
    }
}

pub fn convergence_regime(alpha: f64) -> Regime {
    if alpha < 1.0 {
        Regime::ConvergentAllX
    } else if alpha == 1.0 {
        Regime::ConvergentBeyondOne
    } else {
        Regime::AsymptoticOnly
    }
}

fn check_series_args(x: f64, alpha: f64, theta: f64, n_terms: u32) -> Result<()> {
    crate::params::validate(alpha, theta, 1.0)?;
    if theta.abs() == 1.0 {
        return Err(Error::domain(
            "theta",
            "the tail series has no remainder bound at theta = +-1",
        ));
    }
    check_positive_x(x)?;
    if n_terms < 1 {
        return Err(Error::InvalidRequest("n_terms must be at least 1".into()));
    }
    Ok(())
}

fn check_positive_x(x: f64) -> Result<()> {
    if !(x > 0.0) {
        return Err(Error::domain(
            "x",
            format!("tail series needs x > 0, got {x}"),
        ));
    }
    Ok(())
}

/// `G_N(x)`: the first `N - 1` terms of the cdf tail series, i.e. the
/// approximation to `1 - G(x, alpha, theta)` for `x > 0`.
pub fn cdf_tail_sum(x: f64, alpha: f64, theta: f64, n_terms: u32) -> Result<f64> {
    check_series_args(x, alpha, theta, n_terms)?;
    Ok(tail_sum_unchecked(x, alpha, theta, n_terms))
}

fn tail_sum_unchecked(x: f64, alpha: f64, theta: f64, n_terms: u32) -> f64 {
    let mut acc = CompensatedSum::new();
    acc.extend((1..n_terms).map(|n| series_term_log(n, alpha, theta, x).to_f64()));
    acc.value()
}

/// Natural log of the cdf remainder bound.
pub(crate) fn ln_cdf_remainder_bound(x: f64, alpha: f64, n_terms: u32) -> f64 {
    let n = f64::from(n_terms);
    let lnx = x.ln();
    let inner = log_add_exp(
        ln_gamma_pos(alpha * n),
        -alpha * lnx + ln_gamma_pos(alpha * (n + 1.0)),
    );
    -alpha * n * lnx - LN_PI - ln_gamma_pos(n + 1.0) + inner
}

/// Natural log of the density remainder bound.
pub(crate) fn ln_pdf_remainder_bound(x: f64, alpha: f64, n_terms: u32) -> f64 {
    let n = f64::from(n_terms);
    let lnx = x.ln();
    let inner = log_add_exp(
        ln_gamma_pos(alpha * n + 1.0),
        -alpha * lnx + ln_gamma_pos(alpha * (n + 1.0) + 1.0),
    );
    -(alpha * n + 1.0) * lnx - LN_PI - ln_gamma_pos(n + 1.0) + inner
}

/// `x^(-alpha N) / (pi N!) * (Gamma(alpha N) + x^(-alpha) Gamma(alpha (N+1)))`.
pub fn cdf_remainder_bound(x: f64, alpha: f64, n_terms: u32) -> Result<f64> {
    check_positive_x(x)?;
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::domain(
            "alpha",
            format!("alpha = {alpha} is outside (0, 2]"),
        ));
    }
    if n_terms < 1 {
        return Err(Error::InvalidRequest("n_terms must be at least 1".into()));
    }
    Ok(ln_cdf_remainder_bound(x, alpha, n_terms).exp())
}

/// `x^(-alpha N - 1) / (pi N!) * (Gamma(alpha N + 1) + x^(-alpha) Gamma(alpha (N+1) + 1))`.
pub fn pdf_remainder_bound(x: f64, alpha: f64, n_terms: u32) -> Result<f64> {
    check_positive_x(x)?;
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::domain(
            "alpha",
            format!("alpha = {alpha} is outside (0, 2]"),
        ));
    }
    if n_terms < 1 {
        return Err(Error::InvalidRequest("n_terms must be at least 1".into()));
    }
    Ok(ln_pdf_remainder_bound(x, alpha, n_terms).exp())
}

/// Distribution function from the tail series,
/// `G(x) ~ (1 + sign x)/2 - sign(x) G_N(|x_std|, alpha, theta*)`.
///
/// No threshold is enforced here: the returned bound is the certificate, and
/// it is large wherever the series is not usable.
pub fn cdf_series(params: &StableParams, x: f64, n_terms: u32) -> Result<CertifiedValue> {
    let q = standardize(params, x);
    if q.sign == Sign::Zero {
        return Err(Error::domain(
            "x",
            "the tail series is not defined at x = 0",
        ));
    }
    check_series_args(q.x_std, params.alpha(), q.theta_eff, n_terms)?;
    let tail = tail_sum_unchecked(q.x_std, params.alpha(), q.theta_eff, n_terms);
    let value = match q.sign {
        Sign::Positive => 1.0 - tail,
        _ => tail,
    };
    Ok(CertifiedValue {
        value,
        bound: ln_cdf_remainder_bound(q.x_std, params.alpha(), n_terms).exp(),
        method: Method::SeriesTail,
        terms_used: n_terms,
    })
}

/// Density from the tail series, `g(x) ~ g_N(|x_std|, alpha, theta*)`, with
/// the scale factor `lambda^(-1/alpha)` applied to value and bound.
pub fn pdf_tail_series(params: &StableParams, x: f64, n_terms: u32) -> Result<CertifiedValue> {
    let q = standardize(params, x);
    if q.sign == Sign::Zero {
        return Err(Error::domain(
            "x",
            "the tail series is not defined at x = 0",
        ));
    }
    check_series_args(q.x_std, params.alpha(), q.theta_eff, n_terms)?;
    let mut acc = CompensatedSum::new();
    acc.extend(
        (0..n_terms).map(|n| pdf_term_log(n, params.alpha(), q.theta_eff, q.x_std).to_f64()),
    );
    let scale = params.scale_factor();
    Ok(CertifiedValue {
        value: acc.value() * scale,
        bound: ln_pdf_remainder_bound(q.x_std, params.alpha(), n_terms).exp() * scale,
        method: Method::SeriesTail,
        terms_used: n_terms,
    })
}
