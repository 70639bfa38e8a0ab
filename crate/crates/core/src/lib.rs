//! Distribution function and density of strictly stable laws: a certified
//! tail series with a proved remainder bound, an integral representation for
//! the bulk, and a dispatcher choosing between them.

// `!(a <= b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closed_forms;
pub mod error;
pub mod evaluator;
pub mod oracle;
pub mod params;
pub mod quadrature;
pub mod report;
pub mod selfcheck;
pub mod special;
pub mod tail_series;
pub mod threshold;

pub use error::{Error, ErrorClass, Result};
pub use evaluator::{cdf, pdf_tail, EvalPolicy, EvalReport, Evaluator};
pub use params::StableParams;
pub use quadrature::{MeshPolicy, QuadratureSpec};
pub use tail_series::{CertifiedValue, Method};
pub use threshold::{solve_threshold, Convention, ThresholdResult};
