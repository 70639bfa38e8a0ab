//! Tabular outputs: error maps of the tail series against a reference, and
//! the series-versus-quadrature comparison table.
//!
//! Rows are computed in parallel and emitted in grid order, so output is
//! byte-identical across runs and thread counts.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::closed_forms::cdf_alpha1;
use crate::error::{Error, Result};
use crate::params::{Sign, StableParams};
use crate::quadrature::{cdf_integral, QuadratureSpec};
use crate::tail_series::{cdf_series, cdf_tail_sum};
use crate::threshold::{solve_threshold, Convention};

/// Relative deviation of the tail above which the quadrature column is
/// considered to have left the series.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    Linear,
    Log,
}

impl std::str::FromStr for Spacing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" | "lin" => Ok(Spacing::Linear),
            "log" => Ok(Spacing::Log),
            other => Err(Error::InvalidRequest(format!(
                "unknown spacing {other:?} (expected linear or log)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, points: usize, spacing: Spacing) -> Result<Self> {
        let g = GridSpec {
            x_min,
            x_max,
            points,
            spacing,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_min.is_finite() && self.x_max.is_finite() && self.x_min < self.x_max) {
            return Err(Error::InvalidRequest(format!(
                "grid needs finite x_min < x_max, got [{}, {}]",
                self.x_min, self.x_max
            )));
        }
        if self.points < 2 {
            return Err(Error::InvalidRequest(format!(
                "grid needs at least 2 points, got {}",
                self.points
            )));
        }
        if self.spacing == Spacing::Log && !(self.x_min > 0.0) {
            return Err(Error::InvalidRequest("log spacing needs x_min > 0".into()));
        }
        Ok(())
    }

    /// Grid nodes; the endpoints are exactly `x_min` and `x_max`.
    pub fn nodes(&self) -> Vec<f64> {
        let last = self.points - 1;
        (0..self.points)
            .map(|i| {
                if i == 0 {
                    return self.x_min;
                }
                if i == last {
                    return self.x_max;
                }
                let f = i as f64 / last as f64;
                match self.spacing {
                    Spacing::Linear => self.x_min + f * (self.x_max - self.x_min),
                    Spacing::Log => {
                        let (a, b) = (self.x_min.log10(), self.x_max.log10());
                        10f64.powf(a + f * (b - a))
                    }
                }
            })
            .collect()
    }
}

/// One line of an error map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrmapRow {
    pub x: f64,
    pub n_terms: u32,
    pub series_value: f64,
    pub reference_value: f64,
    pub abs_error: f64,
    pub remainder_bound: f64,
    pub threshold: f64,
}

pub const ERRMAP_HEADER: &str =
    "x,n_terms,series_value,reference_value,abs_error,remainder_bound,threshold";

/// Series error against the closed form (`alpha = 1`) or the integral
/// representation, for every `N` in `n_list` and every grid node.
pub fn errmap(
    params: &StableParams,
    grid: &GridSpec,
    n_list: &[u32],
    epsilon: f64,
    quad: &QuadratureSpec,
) -> Result<Vec<ErrmapRow>> {
    grid.validate()?;
    if n_list.is_empty() {
        return Err(Error::InvalidRequest(
            "the list of term counts is empty".into(),
        ));
    }
    let xs = grid.nodes();
    let references: Vec<f64> = xs
        .par_iter()
        .map(|&x| {
            if params.alpha() == 1.0 {
                let x_std = x * params.scale_factor();
                cdf_alpha1(x_std, params.theta())
            } else {
                cdf_integral(params, x, quad).map(|q| q.certified.value)
            }
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(xs.len() * n_list.len());
    for &n in n_list {
        let threshold = solve_threshold(params.alpha(), n, epsilon, Convention::PiFactorial)?.x_eps;
        let chunk: Vec<ErrmapRow> = xs
            .par_iter()
            .zip(references.par_iter())
            .map(|(&x, &reference_value)| {
                let s = cdf_series(params, x, n)?;
                Ok(ErrmapRow {
                    x,
                    n_terms: n,
                    series_value: s.value,
                    reference_value,
                    abs_error: (s.value - reference_value).abs(),
                    remainder_bound: s.bound,
                    threshold,
                })
            })
            .collect::<Result<_>>()?;
        rows.extend(chunk);
    }
    Ok(rows)
}

/// How the quadrature column fared at one node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadStatus {
    Ok,
    /// The integrator never sampled the transition of the integrand.
    Suspect,
    Failed,
}

impl QuadStatus {
    pub fn label(self) -> &'static str {
        match self {
            QuadStatus::Ok => "ok",
            QuadStatus::Suspect => "suspect",
            QuadStatus::Failed => "failed",
        }
    }
}

/// One line of the comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableRow {
    pub alpha: f64,
    pub theta: f64,
    pub x: f64,
    pub series_value: f64,
    /// Series approximation of the tail on the side of `x`
    /// (`1 - G` for `x > 0`, `G` for `x < 0`).
    pub series_tail: f64,
    pub series_bound: f64,
    /// Remainder bound at most epsilon.
    pub series_certified: bool,
    pub quadrature_value: f64,
    pub quadrature_estimate: f64,
    pub quadrature_status: QuadStatus,
    pub abs_deviation: f64,
    /// `|quadrature tail - series tail| / series tail`.
    pub tail_rel_deviation: f64,
    /// Series certified here and the quadrature failed or its tail deviates
    /// by more than `DIVERGENCE_TOLERANCE`.
    pub diverged: bool,
}

pub const TABLE_HEADER: &str =
    "alpha,theta,x,series_value,series_tail,series_bound,series_certified,\
quadrature_value,quadrature_estimate,quadrature_status,abs_deviation,tail_rel_deviation,diverged";

/// First node, per alpha, from which the quadrature column diverges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Onset {
    pub alpha: f64,
    pub x: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub n_terms: u32,
    pub epsilon: f64,
    pub rows: Vec<TableRow>,
    pub onsets: Vec<Onset>,
}

/// Series and quadrature side by side over a grid, for each alpha.
pub fn comparison_table(
    alphas: &[f64],
    theta: f64,
    grid: &GridSpec,
    n_terms: u32,
    epsilon: f64,
    quad: &QuadratureSpec,
) -> Result<Table> {
    grid.validate()?;
    quad.validate()?;
    if alphas.is_empty() {
        return Err(Error::InvalidRequest(
            "the list of alpha values is empty".into(),
        ));
    }
    if n_terms < 1 {
        return Err(Error::InvalidRequest("n_terms must be at least 1".into()));
    }
    let xs = grid.nodes();
    if xs.contains(&0.0) {
        return Err(Error::InvalidRequest(
            "the comparison grid must not contain x = 0".into(),
        ));
    }
    let mut rows = Vec::new();
    let mut onsets = Vec::new();
    for &alpha in alphas {
        let params = StableParams::standard(alpha, theta)?;
        let chunk: Vec<TableRow> = xs
            .par_iter()
            .map(|&x| table_row(&params, x, n_terms, epsilon, quad))
            .collect::<Result<_>>()?;
        onsets.push(Onset {
            alpha,
            x: chunk.iter().find(|r| r.diverged).map(|r| r.x),
        });
        rows.extend(chunk);
    }
    Ok(Table {
        n_terms,
        epsilon,
        rows,
        onsets,
    })
}

fn table_row(
    params: &StableParams,
    x: f64,
    n_terms: u32,
    epsilon: f64,
    quad: &QuadratureSpec,
) -> Result<TableRow> {
    let s = cdf_series(params, x, n_terms)?;
    let sign = Sign::of(x);
    let series_tail = cdf_tail_sum(
        x.abs(),
        params.alpha(),
        params.theta() * sign.as_f64(),
        n_terms,
    )?;
    let (quadrature_value, quad_tail, quadrature_estimate, quadrature_status) =
        match cdf_integral(params, x, quad) {
            Ok(q) => {
                let status = if q.transition_resolved {
                    QuadStatus::Ok
                } else {
                    QuadStatus::Suspect
                };
                (q.certified.value, q.tail, q.certified.bound, status)
            }
            Err(Error::QuadratureFailure { estimate, .. }) => {
                (f64::NAN, f64::NAN, estimate, QuadStatus::Failed)
            }
            Err(e) => return Err(e),
        };
    let abs_deviation = (quadrature_value - s.value).abs();
    let tail_rel_deviation = (quad_tail - series_tail).abs() / series_tail.abs();
    let series_certified = s.bound <= epsilon;
    // below the threshold the series is the unreliable column, not the quadrature
    let diverged = series_certified
        && (quadrature_status == QuadStatus::Failed
            || !(tail_rel_deviation <= DIVERGENCE_TOLERANCE));
    Ok(TableRow {
        alpha: params.alpha(),
        theta: params.theta(),
        x,
        series_value: s.value,
        series_tail,
        series_bound: s.bound,
        series_certified,
        quadrature_value,
        quadrature_estimate,
        quadrature_status,
        abs_deviation,
        tail_rel_deviation,
        diverged,
    })
}

/// Round-trip formatting with 17 significant digits.
pub fn fmt_real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

pub fn write_errmap_csv<W: Write>(out: &mut W, rows: &[ErrmapRow]) -> io::Result<()> {
    writeln!(out, "{ERRMAP_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_real(r.x),
            r.n_terms,
            fmt_real(r.series_value),
            fmt_real(r.reference_value),
            fmt_real(r.abs_error),
            fmt_real(r.remainder_bound),
            fmt_real(r.threshold)
        )?;
    }
    Ok(())
}

pub fn write_table_csv<W: Write>(out: &mut W, table: &Table) -> io::Result<()> {
    writeln!(out, "{TABLE_HEADER}")?;
    for r in &table.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_real(r.alpha),
            fmt_real(r.theta),
            fmt_real(r.x),
            fmt_real(r.series_value),
            fmt_real(r.series_tail),
            fmt_real(r.series_bound),
            r.series_certified,
            fmt_real(r.quadrature_value),
            fmt_real(r.quadrature_estimate),
            r.quadrature_status.label(),
            fmt_real(r.abs_deviation),
            fmt_real(r.tail_rel_deviation),
            r.diverged
        )?;
    }
    Ok(())
}

/// JSON cannot carry NaN, so non-finite reals become strings.
pub fn json_real(v: f64) -> serde_json::Value {
    if v.is_finite() {
        serde_json::Value::from(v)
    } else {
        serde_json::Value::from(fmt_real(v))
    }
}

pub fn table_json(table: &Table) -> serde_json::Value {
    let rows: Vec<serde_json::Value> = table
        .rows
        .iter()
        .map(|r| {
            serde_json::json!({
                "alpha": json_real(r.alpha),
                "theta": json_real(r.theta),
                "x": json_real(r.x),
                "series_value": json_real(r.series_value),
                "series_tail": json_real(r.series_tail),
                "series_bound": json_real(r.series_bound),
                "series_certified": r.series_certified,
                "quadrature_value": json_real(r.quadrature_value),
                "quadrature_estimate": json_real(r.quadrature_estimate),
                "quadrature_status": r.quadrature_status.label(),
                "abs_deviation": json_real(r.abs_deviation),
                "tail_rel_deviation": json_real(r.tail_rel_deviation),
                "diverged": r.diverged,
            })
        })
        .collect();
    let onsets: Vec<serde_json::Value> = table
        .onsets
        .iter()
        .map(|o| serde_json::json!({ "alpha": o.alpha, "onset": o.x }))
        .collect();
    serde_json::json!({
        "n_terms": table.n_terms,
        "epsilon": table.epsilon,
        "rows": rows,
        "onsets": onsets,
    })
}
