//! Threshold coordinate `x_eps^N`: the point beyond which the `N`-term tail
//! series is certified to absolute accuracy `eps`.
//!
//! The equation solved is
//!
//! ```text
//! x^(-alpha N) / (D N!) * (Gamma(alpha N) + x^(-alpha) Gamma(alpha (N+1))) = eps
//! ```
//!
//! with `D = pi` (the remainder bound itself) or `D = alpha`. The left side is
//! strictly decreasing in `x`, so bisection on `ln x` finds the unique root.

use std::collections::HashMap;
use std::sync::RwLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::{ln_gamma_pos, log_add_exp};
use crate::tail_series::{ln_cdf_remainder_bound, ln_pdf_remainder_bound};

const X_LO: f64 = 1e-8;
const X_HI: f64 = 1e20;
const MAX_ITER: u32 = 200;

/// Denominator in front of `N!` in the threshold equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `D = pi`; the threshold is exactly where the remainder bound equals eps.
    PiFactorial,
    /// `D = alpha`.
    AlphaFactorial,
}

impl Convention {
    pub fn label(self) -> &'static str {
        match self {
            Convention::PiFactorial => "pi-factorial",
            Convention::AlphaFactorial => "alpha-factorial",
        }
    }
}

impl std::str::FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pi" | "pi-factorial" => Ok(Convention::PiFactorial),
            "alpha" | "alpha-factorial" => Ok(Convention::AlphaFactorial),
            other => Err(Error::InvalidRequest(format!(
                "unknown convention {other:?} (expected pi or alpha)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdResult {
    pub x_eps: f64,
    pub alpha: f64,
    pub n_terms: u32,
    pub epsilon: f64,
    pub iterations: u32,
    /// `|LHS(x_eps) - eps|`.
    pub residual: f64,
    pub convention: Convention,
}

fn check_args(alpha: f64, n_terms: u32, epsilon: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::domain(
            "alpha",
            format!("alpha = {alpha} is outside (0, 2]"),
        ));
    }
    if n_terms < 1 {
        return Err(Error::InvalidRequest("n_terms must be at least 1".into()));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidRequest(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    Ok(())
}

/// Natural log of the left side of the threshold equation.
pub fn threshold_lhs_ln(x: f64, alpha: f64, n_terms: u32, convention: Convention) -> f64 {
    match convention {
        Convention::PiFactorial => ln_cdf_remainder_bound(x, alpha, n_terms),
        Convention::AlphaFactorial => {
            let n = f64::from(n_terms);
            let lnx = x.ln();
            let inner = log_add_exp(
                ln_gamma_pos(alpha * n),
                -alpha * lnx + ln_gamma_pos(alpha * (n + 1.0)),
            );
            -alpha * n * lnx - alpha.ln() - ln_gamma_pos(n + 1.0) + inner
        }
    }
}

/// Smallest representable `x` in the bracket with `exp(ln_lhs(x)) <= eps`.
fn bisect<F: Fn(f64) -> f64>(ln_lhs: F, epsilon: f64, what: &str) -> Result<(f64, u32)> {
    let ln_eps = epsilon.ln();
    if ln_lhs(X_LO) < ln_eps {
        return Err(Error::Bracket(format!(
            "{what} is already below epsilon = {epsilon:e} at x = {X_LO:e}"
        )));
    }
    if ln_lhs(X_HI) > ln_eps {
        return Err(Error::Bracket(format!(
            "{what} still exceeds epsilon = {epsilon:e} at x = {X_HI:e}"
        )));
    }
    // invariant: lhs(lo) > eps >= lhs(hi)
    let (mut lo, mut hi) = (X_LO, X_HI);
    let mut iterations = 0;
    while iterations < MAX_ITER {
        // geometric midpoint while the bracket is wide, arithmetic at the end
        let mid = if hi / lo > 1.0 + 1e-3 {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        if !(mid > lo && mid < hi) {
            break;
        }
        iterations += 1;
        if ln_lhs(mid) > ln_eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((hi, iterations))
}

/// Solves the threshold equation for the cdf series.
pub fn solve_threshold(
    alpha: f64,
    n_terms: u32,
    epsilon: f64,
    convention: Convention,
) -> Result<ThresholdResult> {
    check_args(alpha, n_terms, epsilon)?;
    let ln_lhs = |x: f64| threshold_lhs_ln(x, alpha, n_terms, convention);
    let (x_eps, iterations) = bisect(ln_lhs, epsilon, "the remainder bound")?;
    Ok(ThresholdResult {
        x_eps,
        alpha,
        n_terms,
        epsilon,
        iterations,
        residual: (ln_lhs(x_eps).exp() - epsilon).abs(),
        convention,
    })
}

/// Threshold for the density series: where its remainder bound equals `eps`.
pub fn solve_pdf_threshold(alpha: f64, n_terms: u32, epsilon: f64) -> Result<ThresholdResult> {
    check_args(alpha, n_terms, epsilon)?;
    let ln_lhs = |x: f64| ln_pdf_remainder_bound(x, alpha, n_terms);
    let (x_eps, iterations) = bisect(ln_lhs, epsilon, "the density remainder bound")?;
    Ok(ThresholdResult {
        x_eps,
        alpha,
        n_terms,
        epsilon,
        iterations,
        residual: (ln_lhs(x_eps).exp() - epsilon).abs(),
        convention: Convention::PiFactorial,
    })
}

/// `(N, x_eps^N)` over an ascending list of term counts (π convention).
///
/// As `N -> oo` the threshold tends to 0 for `alpha < 1`, to 1 for
/// `alpha = 1` and to infinity for `alpha > 1`.
pub fn threshold_limit_behavior(
    alpha: f64,
    epsilon: f64,
    n_grid: &[u32],
) -> Result<Vec<(u32, f64)>> {
    if n_grid.is_empty() {
        return Err(Error::InvalidRequest(
            "the list of term counts is empty".into(),
        ));
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidRequest(
            "term counts must be strictly ascending".into(),
        ));
    }
    n_grid
        .iter()
        .map(|&n| solve_threshold(alpha, n, epsilon, Convention::PiFactorial).map(|r| (n, r.x_eps)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct CacheKey {
    alpha: u64,
    n_terms: u32,
    epsilon: u64,
    convention: Convention,
}

/// Memoized thresholds. Any number of readers may query concurrently; a miss
/// computes outside the lock and then takes the write lock once.
#[derive(Debug, Default)]
pub struct ThresholdCache {
    entries: RwLock<HashMap<CacheKey, ThresholdResult>>,
}

impl ThresholdCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_solve(
        &self,
        alpha: f64,
        n_terms: u32,
        epsilon: f64,
        convention: Convention,
    ) -> Result<ThresholdResult> {
        let key = CacheKey {
            alpha: alpha.to_bits(),
            n_terms,
            epsilon: epsilon.to_bits(),
            convention,
        };
        if let Some(hit) = self
            .entries
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(&key)
        {
            return Ok(*hit);
        }
        let solved = solve_threshold(alpha, n_terms, epsilon, convention)?;
        self.entries
            .write()
            .unwrap_or_else(|e| e.into_inner())
            .entry(key)
            .or_insert(solved);
        Ok(solved)
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
