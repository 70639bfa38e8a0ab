//! Brute-force references by direct Fourier inversion of the characteristic
//! function. Slow, restricted to moderate `|x|`, and meant for tests only.
//!
//! With `c = cos(pi alpha theta/2)`, `s = sin(pi alpha theta/2)`,
//! `A(t) = exp(-lambda c t^alpha)` and `B(t) = lambda s t^alpha`:
//!
//! ```text
//! g(x) = (1/pi) int_0^oo A cos(B - t x) dt
//! G(x) = (1-theta)/2 + (1/pi) int_0^oo A [cos B sin(tx)/t + sin B (1 - cos(tx))/t] dt
//! ```
//!
//! The second line is `int_0^x g` with the order of integration swapped, which
//! keeps the oracle a single Fourier integral instead of a nested quadrature.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::StableParams;
use crate::special::ln_gamma_pos;

/// Largest `|x|` the cdf oracle accepts.
pub const ORACLE_X_LIMIT: f64 = 100.0;
/// Largest admissible analytic truncation error.
pub const ORACLE_TAIL_LIMIT: f64 = 1e-10;

const GL_POINTS: usize = 20;
/// Geometric refinement levels of the first panel, where `t^alpha` is not smooth.
const GRADING_LEVELS: i32 = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleSpec {
    /// Upper limit of the truncated Fourier integral.
    pub t_max: f64,
    /// Number of equal Gauss-Legendre panels on `[0, t_max]`.
    pub panels: usize,
}

impl Default for OracleSpec {
    fn default() -> Self {
        OracleSpec {
            t_max: 200.0,
            panels: 20_000,
        }
    }
}

impl OracleSpec {
    /// A spec whose truncation error is far below [`ORACLE_TAIL_LIMIT`] and
    /// whose panels resolve the oscillations up to `|x| = x_max`.
    pub fn adapted_to(params: &StableParams, x_max: f64) -> Self {
        let (c, s) = trig(params);
        let lambda = params.lambda();
        let alpha = params.alpha();
        // A(t_max) = exp(-40)
        let t_max = (40.0 / (lambda * c)).powf(1.0 / alpha);
        let phase_rate =
            x_max.abs() + alpha * lambda * s.abs() * t_max.powf(alpha - 1.0).max(1.0) + 1.0;
        // about 4 radians of phase per 20-point panel
        let panels = (t_max * phase_rate / 4.0).ceil().max(100.0) as usize;
        OracleSpec { t_max, panels }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::InvalidRequest(format!(
                "t_max must be positive, got {}",
                self.t_max
            )));
        }
        if self.panels < 100 {
            return Err(Error::InvalidRequest(format!(
                "panels must be at least 100, got {}",
                self.panels
            )));
        }
        Ok(())
    }

    /// Bound on `(1/pi) int_{t_max}^oo exp(-lambda c t^alpha) dt`.
    pub fn tail_estimate(&self, params: &StableParams) -> f64 {
        let (c, _) = trig(params);
        let alpha = params.alpha();
        let k = params.lambda() * c;
        if !(k > 0.0) {
            return f64::INFINITY;
        }
        // substituting z = k t^alpha gives (1/alpha) k^(-1/alpha) Gamma(1/alpha, k T^alpha)
        let a = 1.0 / alpha;
        let z = k * self.t_max.powf(alpha);
        let ln_gamma_upper = if a <= 1.0 {
            (a - 1.0) * z.ln() - z
        } else if z > 2.0 * (a - 1.0) {
            (a - 1.0) * z.ln() - z - (1.0 - (a - 1.0) / z).ln()
        } else {
            ln_gamma_pos(a)
        };
        (-(alpha.ln()) - a * k.ln() + ln_gamma_upper).exp() / PI
    }
}

fn trig(params: &StableParams) -> (f64, f64) {
    let (s, c) = (0.5 * PI * params.alpha() * params.theta()).sin_cos();
    (c, s)
}

/// Nodes and weights of the 20-point Gauss-Legendre rule on `[-1, 1]`.
fn gauss_legendre() -> &'static [(f64, f64); GL_POINTS] {
    static RULE: OnceLock<[(f64, f64); GL_POINTS]> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_POINTS;
        let mut rule = [(0.0, 0.0); GL_POINTS];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            rule[i] = (x, w);
            rule[n - 1 - i] = (-x, w);
        }
        rule
    })
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    half * gauss_legendre()
        .iter()
        .map(|&(x, w)| w * f(mid + half * x))
        .sum::<f64>()
}

/// Composite rule on `[0, t_max]` with the first panel graded toward 0.
fn integrate<F: Fn(f64) -> f64>(f: &F, spec: &OracleSpec) -> f64 {
    let h = spec.t_max / spec.panels as f64;
    let mut total = 0.0;
    let mut right = h;
    for _ in 0..GRADING_LEVELS {
        let left = 0.5 * right;
        total += panel(f, left, right);
        right = left;
    }
    total += panel(f, 0.0, right);
    for k in 1..spec.panels {
        total += panel(f, k as f64 * h, (k + 1) as f64 * h);
    }
    total
}

fn check(params: &StableParams, spec: &OracleSpec) -> Result<()> {
    spec.validate()?;
    let tail = spec.tail_estimate(params);
    if !(tail <= ORACLE_TAIL_LIMIT) {
        return Err(Error::OracleAccuracy(format!(
            "truncation tail {tail:e} at t_max = {} exceeds {ORACLE_TAIL_LIMIT:e}; use OracleSpec::adapted_to",
            spec.t_max
        )));
    }
    Ok(())
}

/// Density by direct inversion of the characteristic function.
pub fn oracle_pdf(params: &StableParams, x: f64, spec: &OracleSpec) -> Result<f64> {
    check(params, spec)?;
    let (c, s) = trig(params);
    let (alpha, lambda) = (params.alpha(), params.lambda());
    let f = |t: f64| {
        let ta = t.powf(alpha);
        (-lambda * c * ta).exp() * (lambda * s * ta - t * x).cos()
    };
    Ok(integrate(&f, spec) / PI)
}

/// Distribution function by direct inversion, anchored at
/// `G(0) = (1 - theta)/2`. Requires `|x| <= 100`.
pub fn oracle_cdf(params: &StableParams, x: f64, spec: &OracleSpec) -> Result<f64> {
    if !(x.abs() <= ORACLE_X_LIMIT) {
        return Err(Error::domain(
            "x",
            format!("the oracle is limited to |x| <= {ORACLE_X_LIMIT}, got {x}"),
        ));
    }
    check(params, spec)?;
    let anchor = 0.5 * (1.0 - params.theta());
    if x == 0.0 {
        return Ok(anchor);
    }
    let (c, s) = trig(params);
    let (alpha, lambda) = (params.alpha(), params.lambda());
    let f = |t: f64| {
        let ta = t.powf(alpha);
        let (sin_b, cos_b) = (lambda * s * ta).sin_cos();
        let u = t * x;
        let half = (0.5 * u).sin();
        (-lambda * c * ta).exp() * (cos_b * u.sin() + sin_b * 2.0 * half * half) / t
    };
    Ok(anchor + integrate(&f, spec) / PI)
}
