//! Series data of the Einstein collar metric `g = x⁻²(dx² + w(x)²h)`,
//! `w = 1 − ½λx²`.

use num_traits::One;

use crate::series::{int, rat, LogSeries, ParamPoly, Rat, SeriesError};
use crate::spectral::EinsteinModel;

/// Precomputed radial series for one `(n, λ)` at a fixed truncation order.
#[derive(Debug, Clone)]
pub struct WarpedProduct {
    pub n: usize,
    pub lambda: Rat,
    pub order: usize,
    /// `w = 1 − ½λx²`.
    pub warp: LogSeries,
    /// `1/w²`.
    pub inv_warp_sq: LogSeries,
    /// `D = (1 + ½λx²)/(1 − ½λx²)`, the relative drift of the radial Laplacian.
    pub drift: LogSeries,
}

impl WarpedProduct {
    pub fn new(n: usize, lambda: Rat, order: usize) -> Result<Self, SeriesError> {
        let half_lambda = &lambda * rat(1, 2);
        let warp = LogSeries::from_rats(order, &[Rat::one(), int(0), -half_lambda.clone()]);
        let plus = LogSeries::from_rats(order, &[Rat::one(), int(0), half_lambda]);
        let inv_warp = warp.reciprocal()?;
        let inv_warp_sq = inv_warp.mul(&inv_warp)?;
        let drift = plus.mul(&inv_warp)?;
        Ok(Self {
            n,
            lambda,
            order,
            warp,
            inv_warp_sq,
            drift,
        })
    }

    pub fn from_model(model: &EinsteinModel, order: usize) -> Result<Self, SeriesError> {
        Self::new(model.n, model.lambda.clone(), order)
    }

    /// `x²/w² · s`, keeping the two orders gained by the `x²` factor.
    pub fn x2_over_w2(&self, s: &LogSeries) -> Result<LogSeries, SeriesError> {
        Ok(s.mul(&self.inv_warp_sq)?.shift_up(2))
    }

    /// `c · x²/w²` as a series of the geometry's order.
    pub fn potential(&self, c: &ParamPoly) -> LogSeries {
        self.inv_warp_sq
            .scale(c)
            .shift_up(2)
            .truncate(self.order)
    }

    pub fn n_rat(&self) -> Rat {
        int(self.n as i64)
    }
}
