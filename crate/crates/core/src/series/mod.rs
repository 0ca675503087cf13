//! Exact arithmetic carriers: rationals, μ-polynomials and log series.

mod log_series;
mod param_poly;
pub mod rat;

pub use log_series::{LogSeries, Parity, SeriesError};
pub use param_poly::ParamPoly;
pub use rat::{format_rat, int, parse_rat, rat, Rat};
