//! Distribution function from its definite-integral representation.
//!
//! For `alpha != 1` and `x > 0`,
//!
//! ```text
//! G+(x) = 1 - (1+theta)/4 (1 + sign(1-alpha))
//!           + sign(1-alpha)/pi * int_{-pi theta/2}^{pi/2} exp{-x^(alpha/(alpha-1)) U(phi)} dphi
//! U(phi) = (sin(alpha (phi + pi theta/2)) / cos phi)^(alpha/(1-alpha))
//!          * cos(phi (1-alpha) - pi alpha theta/2) / cos phi
//! ```
//!
//! The integrand is monotone and runs between 0 and 1 (decreasing for
//! `alpha < 1`, increasing for `alpha > 1`). For large or small `x` the whole
//! change happens inside a sliver next to an endpoint, whose width shrinks
//! like a power of `x`. A plain adaptive rule in `phi` never samples it once
//! it is narrower than the spacing of its nodes, and cannot represent it at
//! all once it is narrower than the rounding of `pi/2`.
//!
//! [`MeshPolicy::Graded`] therefore integrates the complementary tail
//! `1 - G+` in two halves, each parametrized by the distance to its endpoint
//! (`psi = phi + pi theta/2` and `delta = pi/2 - phi`), with every trig
//! factor rewritten so that no endpoint constant is subtracted. It locates
//! where the exponent crosses 1 and seeds the adaptive rule with a geometric
//! mesh around that point. [`MeshPolicy::Uniform`] is the plain rule in `phi`
//! and is kept as a baseline that reproduces the breakdown at large `x`.

use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::closed_forms::{cdf_alpha1, cdf_at_zero};
use crate::error::{Error, Result};
use crate::params::{apply_inversion, standardize, Sign, StableParams};
use crate::tail_series::{CertifiedValue, Method};

/// Below this distance from 1, alpha is treated as exactly 1.
pub const ALPHA_ONE_SNAP: f64 = 1e-8;
/// Below this distance from 1 (and above the snap), results carry a warning.
pub const ALPHA_ONE_WARN: f64 = 1e-3;

/// Integrand values in this open band count as "inside the transition".
const TRANSITION_BAND: f64 = 1e-8;
/// Smallest endpoint distance the graded scheme looks at.
const TINY: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeshPolicy {
    /// Endpoint-relative coordinates, geometric mesh around the located
    /// transition, then adaptive bisection.
    Graded,
    /// Adaptive bisection in `phi` from the whole interval.
    Uniform,
}

impl std::str::FromStr for MeshPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "graded" => Ok(MeshPolicy::Graded),
            "uniform" => Ok(MeshPolicy::Uniform),
            other => Err(Error::InvalidRequest(format!(
                "unknown mesh policy {other:?} (expected graded or uniform)"
            ))),
        }
    }
}

/// Tolerances and limits for the integral representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of panel bisections after the initial mesh.
    pub max_subdivisions: usize,
    /// Offset from the singular endpoints of the integration interval.
    pub endpoint_margin: f64,
    pub mesh: MeshPolicy,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_subdivisions: 200,
            endpoint_margin: 1e-12,
            mesh: MeshPolicy::Graded,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidRequest(
                "quadrature tolerances must be positive".into(),
            ));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidRequest(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        if !(self.endpoint_margin > 0.0 && self.endpoint_margin < 1e-6) {
            return Err(Error::InvalidRequest(
                "endpoint_margin must lie in (0, 1e-6)".into(),
            ));
        }
        Ok(())
    }
}

/// Result of the integral representation with integrator diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureValue {
    pub certified: CertifiedValue,
    /// Probability beyond `x` on its own side (`1 - G` for `x > 0`, `G` for
    /// `x < 0`). The graded scheme computes it without cancellation.
    pub tail: f64,
    pub panels: usize,
    /// Whether any node sampled the integrand strictly between 0 and 1. When
    /// false the integrator never saw the transition and the value is suspect.
    pub transition_resolved: bool,
    pub warnings: Vec<String>,
}

fn ln_u_kernel(phi: f64, alpha: f64, theta: f64) -> f64 {
    let ln_cos = phi.cos().ln();
    let ln_sin = (alpha * (phi + FRAC_PI_2 * theta)).sin().ln();
    let ln_mix = (phi * (1.0 - alpha) - FRAC_PI_2 * alpha * theta).cos().ln();
    alpha / (1.0 - alpha) * (ln_sin - ln_cos) + ln_mix - ln_cos
}

/// The kernel `U(phi, alpha, theta)` on the open interval `(-pi theta/2, pi/2)`.
pub fn u_kernel(phi: f64, alpha: f64, theta: f64) -> Result<f64> {
    crate::params::validate(alpha, theta, 1.0)?;
    if alpha == 1.0 {
        return Err(Error::domain(
            "alpha",
            "the integral representation excludes alpha = 1",
        ));
    }
    let lo = -FRAC_PI_2 * theta;
    if !(phi > lo && phi < FRAC_PI_2) {
        return Err(Error::domain(
            "phi",
            format!("phi = {phi} outside the open interval ({lo}, pi/2)"),
        ));
    }
    Ok(ln_u_kernel(phi, alpha, theta).exp())
}

/// Exponent `ln(x^(alpha/(alpha-1)) U(phi))`; the integrand is `exp(-exp(.))`.
fn log_exponent(phi: f64, ln_x: f64, alpha: f64, theta: f64) -> f64 {
    alpha / (alpha - 1.0) * ln_x + ln_u_kernel(phi, alpha, theta)
}

fn integrand_from_log(z: f64) -> f64 {
    if z > 709.0 {
        0.0
    } else {
        (-z.exp()).exp()
    }
}

/// `exp{-x^(alpha/(alpha-1)) U(phi, alpha, theta)}` for `x > 0`, `alpha != 1`.
pub fn integrand(phi: f64, x: f64, alpha: f64, theta: f64) -> f64 {
    integrand_from_log(log_exponent(phi, x.ln(), alpha, theta))
}

/// The exponent in endpoint-relative coordinates. With `L = pi (1+theta)/2`
/// the interval length, `psi + delta = L` and
///
/// ```text
/// cos phi                               = sin delta
/// sin(alpha psi)                        = sin(pi k + alpha delta)
/// cos(phi (1-alpha) - pi alpha theta/2) = sin(pi (1-theta)/2 + (1-alpha) psi)
///                                       = sin(pi k + (alpha-1) delta)
/// ```
///
/// where `k = 1 - alpha (1+theta)/2 >= 0`.
struct Kernel {
    alpha: f64,
    power: f64,
    offset: f64,
    length: f64,
    pi_k: f64,
    lo_phase: f64,
}

impl Kernel {
    fn new(ln_x: f64, alpha: f64, theta: f64) -> Self {
        Kernel {
            alpha,
            power: alpha / (1.0 - alpha),
            offset: alpha / (alpha - 1.0) * ln_x,
            length: FRAC_PI_2 * (1.0 + theta),
            pi_k: PI * (1.0 - 0.5 * alpha * (1.0 + theta)).max(0.0),
            lo_phase: FRAC_PI_2 * (1.0 - theta),
        }
    }

    fn z_psi(&self, psi: f64) -> f64 {
        let ln_cos = (self.length - psi).sin().ln();
        let ln_sin = (self.alpha * psi).sin().ln();
        let ln_mix = (self.lo_phase + (1.0 - self.alpha) * psi).sin().ln();
        self.offset + self.power * (ln_sin - ln_cos) + ln_mix - ln_cos
    }

    fn z_delta(&self, delta: f64) -> f64 {
        let ln_cos = delta.sin().ln();
        let ln_sin = (self.pi_k + self.alpha * delta).sin().ln();
        let ln_mix = (self.pi_k + (self.alpha - 1.0) * delta).sin().ln();
        self.offset + self.power * (ln_sin - ln_cos) + ln_mix - ln_cos
    }

    /// The integrand of the tail integral: `exp(-e^z)` for `alpha > 1` and
    /// `1 - exp(-e^z)` for `alpha < 1`. It increases with `phi` in both cases.
    fn tail_integrand(&self, z: f64) -> f64 {
        let e = z.exp();
        if self.alpha > 1.0 {
            (-e).exp()
        } else {
            -(-e).exp_m1()
        }
    }
}

// 15-point Kronrod extension of the 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    piece: usize,
    a: f64,
    b: f64,
    result: f64,
    error: f64,
    seq: usize,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    // max-heap on error; ties broken by creation order for determinism
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn gauss_kronrod_15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut res_abs = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let abs_half = half.abs();
    let result = kronrod * half;
    res_abs *= abs_half;
    res_asc *= abs_half;
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (result, err)
}

/// An integrand together with its initial mesh.
struct Piece<'a> {
    f: &'a dyn Fn(f64) -> f64,
    mesh: Vec<f64>,
}

struct Integral {
    value: f64,
    error: f64,
    panels: usize,
    converged: bool,
}

fn totals(heap: &BinaryHeap<Panel>) -> (f64, f64) {
    // summed in a fixed order so the result does not depend on heap layout
    let mut panels: Vec<&Panel> = heap.iter().collect();
    panels.sort_by(|p, q| p.piece.cmp(&q.piece).then(p.a.total_cmp(&q.a)));
    (
        panels.iter().map(|p| p.result).sum(),
        panels.iter().map(|p| p.error).sum(),
    )
}

/// Adaptive bisection of the worst panel over all pieces at once. With
/// `relative` the target is `rel_tol` relative to the value alone, which is
/// what a small tail integral needs; otherwise `abs_tol` is a floor.
fn adaptive(pieces: &[Piece<'_>], spec: &QuadratureSpec, relative: bool) -> Integral {
    let mut heap = BinaryHeap::new();
    let mut seq = 0;
    for (piece, p) in pieces.iter().enumerate() {
        for w in p.mesh.windows(2) {
            let (result, error) = gauss_kronrod_15(p.f, w[0], w[1]);
            heap.push(Panel {
                piece,
                a: w[0],
                b: w[1],
                result,
                error,
                seq,
            });
            seq += 1;
        }
    }
    let mut splits = 0;
    loop {
        let (value, error) = totals(&heap);
        let floor = if relative {
            f64::MIN_POSITIVE
        } else {
            spec.abs_tol
        };
        let tol = floor.max(spec.rel_tol * value.abs());
        let done = error <= tol || !error.is_finite();
        if done || splits >= spec.max_subdivisions || heap.is_empty() {
            return Integral {
                value,
                error,
                panels: heap.len(),
                converged: done && error.is_finite(),
            };
        }
        let worst = heap.pop().expect("heap is not empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // panel cannot be split further
            heap.push(worst);
            let (value, error) = totals(&heap);
            return Integral {
                value,
                error,
                panels: heap.len(),
                converged: false,
            };
        }
        splits += 1;
        let f = pieces[worst.piece].f;
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (result, error) = gauss_kronrod_15(f, a, b);
            heap.push(Panel {
                piece: worst.piece,
                a,
                b,
                result,
                error,
                seq,
            });
            seq += 1;
        }
    }
}

/// Point in `[lo, hi]` (with `lo > 0`) where the monotone exponent `z`
/// crosses 0, or the endpoint nearest to it; the flag tells which. Bisects
/// on `ln v`.
fn crossing(z: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, bool) {
    let (z_lo, z_hi) = (z(lo), z(hi));
    if z_lo.is_nan() || z_hi.is_nan() || z_lo.signum() == z_hi.signum() {
        return (if z_lo.abs() <= z_hi.abs() { lo } else { hi }, false);
    }
    let rising = z_hi > z_lo;
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let geometric = (a.ln() + 0.5 * (b.ln() - a.ln())).exp();
        let m = if geometric > a && geometric < b {
            geometric
        } else {
            0.5 * (a + b)
        };
        if !(m > a && m < b) {
            break;
        }
        if (z(m) < 0.0) == rising {
            a = m;
        } else {
            b = m;
        }
    }
    (0.5 * (a + b), true)
}

/// Geometric mesh on `[lo, hi]` concentrated at `center`.
fn graded_mesh(center: f64, lo: f64, hi: f64) -> Vec<f64> {
    let mut pts = vec![lo, hi, center];
    let mut r = 1.0;
    for _ in 0..10 {
        r *= 4.0;
        pts.push(center * r);
        pts.push(center / r);
    }
    let mut d = 1.0;
    for _ in 0..6 {
        d *= 0.5;
        pts.push(center * (1.0 - d));
        pts.push(center * (1.0 + d));
    }
    pts.retain(|&p| p >= lo && p <= hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

struct TailIntegral {
    tail: f64,
    error: f64,
    panels: usize,
    converged: bool,
}

const EMPTY_TAIL: TailIntegral = TailIntegral {
    tail: 0.0,
    error: 0.0,
    panels: 0,
    converged: true,
};

fn graded_tail(kernel: &Kernel, spec: &QuadratureSpec, seen: &Cell<bool>) -> TailIntegral {
    if kernel.length <= 0.0 {
        // theta = -1 with alpha < 1: the interval is empty
        seen.set(true);
        return EMPTY_TAIL;
    }
    let half = 0.5 * kernel.length;
    let record = |v: f64| {
        if v > TRANSITION_BAND && v < 1.0 - TRANSITION_BAND {
            seen.set(true);
        }
        v
    };
    let f_psi = |psi: f64| record(kernel.tail_integrand(kernel.z_psi(psi)));
    let f_delta = |delta: f64| record(kernel.tail_integrand(kernel.z_delta(delta)));
    let z_psi = |psi: f64| kernel.z_psi(psi);
    let z_delta = |delta: f64| kernel.z_delta(delta);

    let mut pieces = Vec::with_capacity(2);
    let mut ends = 0.0;
    type Half<'h> = (&'h dyn Fn(f64) -> f64, &'h dyn Fn(f64) -> f64);
    let halves: [Half<'_>; 2] = [(&f_psi, &z_psi), (&f_delta, &z_delta)];
    let mut crossings = 0;
    for (f, z) in halves {
        let (center, crossed) = crossing(z, TINY, half);
        crossings += usize::from(crossed);
        // the margin never hides the transition
        let margin = spec.endpoint_margin.min(1e-6 * center).max(TINY);
        // the excluded margin, where the integrand sits at its endpoint limit
        ends += margin * f(margin);
        pieces.push(Piece {
            f,
            mesh: graded_mesh(center, margin, half),
        });
    }
    if crossings == 0 {
        // the exponent keeps one sign: there is no transition to miss
        seen.set(true);
    }
    let r = adaptive(&pieces, spec, true);
    TailIntegral {
        tail: (r.value + ends) / PI,
        error: r.error / PI,
        panels: r.panels,
        converged: r.converged,
    }
}

fn uniform_tail(
    ln_x: f64,
    alpha: f64,
    theta: f64,
    spec: &QuadratureSpec,
    seen: &Cell<bool>,
) -> TailIntegral {
    let margin = spec.endpoint_margin;
    let lo = -FRAC_PI_2 * theta + margin;
    let hi = FRAC_PI_2 - margin;
    if hi - lo <= 0.0 {
        seen.set(true);
        return EMPTY_TAIL;
    }
    let f = |phi: f64| {
        let v = integrand_from_log(log_exponent(phi, ln_x, alpha, theta));
        if v > TRANSITION_BAND && v < 1.0 - TRANSITION_BAND {
            seen.set(true);
        }
        v
    };
    let r = adaptive(
        &[Piece {
            f: &f,
            mesh: vec![lo, hi],
        }],
        spec,
        false,
    );
    let integral = r.value + margin * (f(lo) + f(hi));
    // assembled exactly as the representation reads, cancellation included
    let g_plus = if alpha < 1.0 {
        1.0 - 0.5 * (1.0 + theta) + integral / PI
    } else {
        1.0 - integral / PI
    };
    TailIntegral {
        tail: 1.0 - g_plus,
        error: r.error / PI,
        panels: r.panels,
        converged: r.converged,
    }
}

/// `G+(x, alpha, theta)` for `x > 0` and `alpha != 1`. The bound is the
/// integrator's error estimate, not a proved bound.
pub fn cdf_positive_integral(
    x: f64,
    alpha: f64,
    theta: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureValue> {
    crate::params::validate(alpha, theta, 1.0)?;
    spec.validate()?;
    if alpha == 1.0 {
        return Err(Error::domain(
            "alpha",
            "the integral representation excludes alpha = 1",
        ));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(
            "x",
            format!("G+ needs finite x > 0, got {x}"),
        ));
    }

    let mut warnings = Vec::new();
    if (alpha - 1.0).abs() < ALPHA_ONE_WARN {
        warnings.push(format!(
            "alpha = {alpha} is within {ALPHA_ONE_WARN:e} of 1; the exponent alpha/(alpha-1) amplifies rounding"
        ));
    }

    let seen = Cell::new(false);
    let t = match spec.mesh {
        MeshPolicy::Graded => graded_tail(&Kernel::new(x.ln(), alpha, theta), spec, &seen),
        MeshPolicy::Uniform => uniform_tail(x.ln(), alpha, theta, spec, &seen),
    };

    if !t.tail.is_finite() {
        return Err(Error::QuadratureFailure {
            subdivisions: t.panels,
            estimate: f64::INFINITY,
            hint: " (non-finite integrand)".into(),
        });
    }
    if !t.converged {
        return Err(Error::QuadratureFailure {
            subdivisions: t.panels,
            estimate: t.error,
            hint: String::new(),
        });
    }

    let estimate = t.error + 4.0 * f64::EPSILON;
    let tail = if (0.0..=1.0).contains(&t.tail) {
        t.tail
    } else if t.tail > -spec.abs_tol && t.tail < 1.0 + spec.abs_tol {
        t.tail.clamp(0.0, 1.0)
    } else {
        return Err(Error::QuadratureFailure {
            subdivisions: t.panels,
            estimate,
            hint: format!(" (assembled value {} is outside [0, 1])", 1.0 - t.tail),
        });
    };

    let transition_resolved = seen.get();
    if !transition_resolved {
        warnings.push(format!(
            "integrand never sampled inside its 0-to-1 transition at x = {x}; quadrature value is suspect"
        ));
    }

    Ok(QuadratureValue {
        certified: CertifiedValue {
            value: 1.0 - tail,
            bound: estimate,
            method: Method::Quadrature,
            terms_used: 0,
        },
        tail,
        panels: t.panels,
        transition_resolved,
        warnings,
    })
}

/// Full distribution function from the integral representation, with the
/// `x = 0` closed form and the `alpha ~ 1` generalized Cauchy formula.
pub fn cdf_integral(
    params: &StableParams,
    x: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureValue> {
    let q = standardize(params, x);
    let alpha = params.alpha();
    if q.sign == Sign::Zero {
        let value = cdf_at_zero(params.theta());
        return Ok(exact(value, value, Method::ClosedFormZero, Vec::new()));
    }
    if (alpha - 1.0).abs() <= ALPHA_ONE_SNAP {
        let mut warnings = Vec::new();
        if alpha != 1.0 {
            warnings.push(format!(
                "alpha = {alpha} treated as 1 (generalized Cauchy closed form)"
            ));
        }
        let theta = params.theta().clamp(-1.0, 1.0);
        let value = cdf_alpha1(q.x_std * q.sign.as_f64(), theta)?;
        let tail = if q.sign == Sign::Positive {
            1.0 - value
        } else {
            value
        };
        return Ok(exact(value, tail, Method::ClosedFormAlpha1, warnings));
    }
    let mut r = cdf_positive_integral(q.x_std, alpha, q.theta_eff, spec)?;
    r.certified.value = apply_inversion(r.certified.value, q.sign)?;
    Ok(r)
}

fn exact(value: f64, tail: f64, method: Method, warnings: Vec<String>) -> QuadratureValue {
    QuadratureValue {
        certified: CertifiedValue {
            value,
            bound: 0.0,
            method,
            terms_used: 0,
        },
        tail,
        panels: 0,
        transition_resolved: true,
        warnings,
    }
}
