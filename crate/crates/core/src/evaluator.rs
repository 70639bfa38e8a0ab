//! Hybrid dispatcher: closed forms where they exist, the certified tail
//! series beyond the threshold, and the integral representation below it.

use serde::Serialize;

use crate::closed_forms::{cdf_alpha1, cdf_at_zero, pdf_alpha1};
use crate::error::{Error, Result};
use crate::params::{standardize, Sign, StableParams};
use crate::quadrature::{cdf_integral, QuadratureSpec};
use crate::tail_series::{cdf_series, pdf_tail_series, Method, DEFAULT_TERMS};
use crate::threshold::{solve_pdf_threshold, Convention, ThresholdCache};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalPolicy {
    pub n_terms: u32,
    pub epsilon: f64,
    pub quad_spec: QuadratureSpec,
    /// Below this `|x_std|` results carry a small-x warning.
    pub small_x_warning_threshold: f64,
}

impl Default for EvalPolicy {
    fn default() -> Self {
        EvalPolicy {
            n_terms: DEFAULT_TERMS,
            epsilon: 1e-5,
            quad_spec: QuadratureSpec::default(),
            small_x_warning_threshold: 1e-4,
        }
    }
}

impl EvalPolicy {
    pub fn validate(&self) -> Result<()> {
        if self.n_terms < 2 {
            return Err(Error::InvalidRequest(format!(
                "n_terms must be at least 2, got {}",
                self.n_terms
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidRequest(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        self.quad_spec.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub x: f64,
    pub params: StableParams,
    pub value: f64,
    pub bound_or_estimate: f64,
    /// True for proved bounds (series, closed forms), false for quadrature
    /// error estimates.
    pub bound_is_rigorous: bool,
    pub method: Method,
    /// Threshold `x_eps^N` in standardized units, when routing consulted it.
    pub threshold_used: Option<f64>,
    pub warnings: Vec<String>,
}

/// Evaluator with a threshold cache shared across queries.
#[derive(Debug, Default)]
pub struct Evaluator {
    policy: EvalPolicy,
    thresholds: ThresholdCache,
}

impl Evaluator {
    pub fn new(policy: EvalPolicy) -> Result<Self> {
        policy.validate()?;
        Ok(Evaluator {
            policy,
            thresholds: ThresholdCache::new(),
        })
    }

    pub fn policy(&self) -> &EvalPolicy {
        &self.policy
    }

    /// `None` when the threshold lies outside the solver's bracket; routing
    /// then checks the remainder bound at the query point itself.
    fn threshold(&self, alpha: f64) -> Result<Option<f64>> {
        let p = &self.policy;
        match self
            .thresholds
            .get_or_solve(alpha, p.n_terms, p.epsilon, Convention::PiFactorial)
        {
            Ok(t) => Ok(Some(t.x_eps)),
            Err(Error::Bracket(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }

    pub fn cdf(&self, params: &StableParams, x: f64) -> Result<EvalReport> {
        if x.is_nan() {
            return Err(Error::domain("x", "x is NaN"));
        }
        let policy = &self.policy;
        let q = standardize(params, x);
        let report = |value: f64, bound: f64, rigorous: bool, method: Method| EvalReport {
            x,
            params: *params,
            value,
            bound_or_estimate: bound,
            bound_is_rigorous: rigorous,
            method,
            threshold_used: None,
            warnings: Vec::new(),
        };

        if q.sign == Sign::Zero {
            return Ok(report(
                cdf_at_zero(params.theta()),
                0.0,
                true,
                Method::ClosedFormZero,
            ));
        }
        if params.alpha() == 1.0 {
            let value = cdf_alpha1(q.x_std * q.sign.as_f64(), params.theta())?;
            return Ok(report(value, 0.0, true, Method::ClosedFormAlpha1));
        }

        let mut warnings = Vec::new();
        if q.x_std < policy.small_x_warning_threshold {
            warnings.push(format!(
                "|x_std| = {:e} is below {:e}; the small-x regime is covered by quadrature only",
                q.x_std, policy.small_x_warning_threshold
            ));
        }

        let one_sided = q.theta_eff.abs() == 1.0;
        let x_eps = if one_sided {
            None
        } else {
            self.threshold(params.alpha())?
        };

        let series = match x_eps {
            Some(x_eps) if q.x_std >= x_eps => Some(cdf_series(params, x, policy.n_terms)?),
            None if !one_sided => {
                Some(cdf_series(params, x, policy.n_terms)?).filter(|s| s.bound <= policy.epsilon)
            }
            _ => None,
        };
        if let Some(s) = series {
            let mut r = report(s.value.clamp(0.0, 1.0), s.bound, true, Method::SeriesTail);
            r.threshold_used = x_eps;
            r.warnings = warnings;
            return Ok(r);
        }

        let quad = cdf_integral(params, x, &policy.quad_spec).map_err(|e| match (e, x_eps) {
            (
                Error::QuadratureFailure {
                    subdivisions,
                    estimate,
                    hint,
                },
                Some(x_eps),
            ) => Error::QuadratureFailure {
                subdivisions,
                estimate,
                hint: format!(
                    "{hint}; |x_std| = {} is below the series threshold {x_eps} for N = {}, \
                     raise n_terms to bring the threshold below |x_std| and use the series",
                    q.x_std, policy.n_terms
                ),
            },
            (e, _) => e,
        })?;
        let c = quad.certified;
        let rigorous = c.method != Method::Quadrature;
        let mut r = report(c.value, c.bound, rigorous, c.method);
        r.threshold_used = x_eps;
        warnings.extend(quad.warnings);
        r.warnings = warnings;
        Ok(r)
    }

    pub fn pdf_tail(&self, params: &StableParams, x: f64) -> Result<EvalReport> {
        if x.is_nan() {
            return Err(Error::domain("x", "x is NaN"));
        }
        let policy = &self.policy;
        let q = standardize(params, x);
        let mut r = EvalReport {
            x,
            params: *params,
            value: 0.0,
            bound_or_estimate: 0.0,
            bound_is_rigorous: true,
            method: Method::ClosedFormAlpha1,
            threshold_used: None,
            warnings: Vec::new(),
        };
        if params.alpha() == 1.0 {
            let scale = params.scale_factor();
            r.value = pdf_alpha1(q.x_std * q.sign.as_f64(), params.theta())? * scale;
            return Ok(r);
        }
        if q.sign == Sign::Zero {
            return Err(Error::OutOfValidatedRange {
                x,
                bound: f64::INFINITY,
                epsilon: policy.epsilon,
            });
        }
        let s = pdf_tail_series(params, x, policy.n_terms)?;
        if !(s.bound <= policy.epsilon) {
            return Err(Error::OutOfValidatedRange {
                x,
                bound: s.bound,
                epsilon: policy.epsilon,
            });
        }
        r.value = s.value;
        r.bound_or_estimate = s.bound;
        r.method = Method::SeriesTail;
        r.threshold_used = solve_pdf_threshold(params.alpha(), policy.n_terms, policy.epsilon)
            .ok()
            .map(|t| t.x_eps);
        Ok(r)
    }
}

/// One-off cdf evaluation; use an [`Evaluator`] to share thresholds.
pub fn cdf(params: &StableParams, x: f64, policy: &EvalPolicy) -> Result<EvalReport> {
    Evaluator::new(*policy)?.cdf(params, x)
}

/// One-off density evaluation on the certified tail.
pub fn pdf_tail(params: &StableParams, x: f64, policy: &EvalPolicy) -> Result<EvalReport> {
    Evaluator::new(*policy)?.pdf_tail(params, x)
}
