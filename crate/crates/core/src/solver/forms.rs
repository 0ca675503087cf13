//! Hodge Laplacian and divergence of `g` on the exact channel
//! `η = x^p (T(x) dφ + B(x) φ dx/x)` with `Δ_h φ = κφ`.
//!
//! With `C = (x∂+p)T − B` and
//! `G = −(x∂+p)B + n·D·B + κx²T/w²` (so that `d*_g η = x^p G φ`):
//!
//! ```text
//! Δ_g η = x^p [ (G − (x∂+p)C + (n−2)·D·C) dφ + ((x∂+p)G − κx²C/w²) φ dx/x ]
//! ```

use super::geometry::WarpedProduct;
use super::SolverError;
use crate::series::{LogSeries, ParamPoly};

#[derive(Debug, Clone)]
pub struct ExactFormOps<'a> {
    pub geom: &'a WarpedProduct,
    pub kappa: ParamPoly,
}

/// Components of `Δ_g η` against `dφ` and `φ dx/x`, with `x^p` divided out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormPair {
    pub tangential: LogSeries,
    pub normal: LogSeries,
}

impl<'a> ExactFormOps<'a> {
    pub fn new(geom: &'a WarpedProduct, kappa: ParamPoly) -> Self {
        Self { geom, kappa }
    }

    fn curl_part(&self, p: i64, t: &LogSeries, b: &LogSeries) -> LogSeries {
        t.apply_xdx_shifted(p).sub(b)
    }

    /// `x^{-p} d*_g η` as a coefficient of `φ`.
    pub fn divergence(&self, p: i64, t: &LogSeries, b: &LogSeries) -> Result<LogSeries, SolverError> {
        let n = self.geom.n_rat();
        let drift_b = self.geom.drift.mul(b)?.scale_rat(&n);
        let pot = self.geom.x2_over_w2(t)?.scale(&self.kappa);
        Ok(b.apply_xdx_shifted(p).neg().add(&drift_b).add(&pot))
    }

    pub fn laplacian(&self, p: i64, t: &LogSeries, b: &LogSeries) -> Result<FormPair, SolverError> {
        let n = self.geom.n_rat();
        let c = self.curl_part(p, t, b);
        let g = self.divergence(p, t, b)?;
        let drift_c = self.geom.drift.mul(&c)?.scale_rat(&(n - crate::series::int(2)));
        let tangential = g.sub(&c.apply_xdx_shifted(p)).add(&drift_c);
        let normal = g
            .apply_xdx_shifted(p)
            .sub(&self.geom.x2_over_w2(&c)?.scale(&self.kappa));
        Ok(FormPair { tangential, normal })
    }
}
