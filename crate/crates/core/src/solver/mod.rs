//! Mode-by-mode asymptotic Dirichlet problem on the Einstein collar.

pub mod channels;
pub mod forms;
pub mod frobenius;
pub mod geometry;
pub mod operator;

pub use channels::{
    exact_channel, expansion_report, gauge_residuals, harmonic_extension_coclosed,
    harmonic_extension_scalar, log_defining_function, smoothness_obstruction, Channel,
    CoclosedExtension, DefiningFunction, ExactExtension, ExpansionReport, GaugeResidual,
    ModeValue, ScalarExtension, SmoothnessReport, WeylExtensionEntry,
};
pub use forms::ExactFormOps;
pub use frobenius::{solve_frobenius, solve_frobenius_with_resonance_coefficient, FrobeniusSolution};
pub use geometry::WarpedProduct;
pub use operator::{
    coclosed_operator, coclosed_operator_x_form, scalar_operator, RadialOperator, XFormDrift,
};

use crate::series::SeriesError;
use crate::spectral::SpectralError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolverError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("operator constant terms do not give integer indicial roots")]
    IndicialMismatch,
    #[error("source has nonzero odd-order coefficients but the solution must be even")]
    SourceParity,
    #[error("source carries a log term at order {0}, at or below the resonance")]
    LogBelowResonance(usize),
    #[error("source term at order {0} conflicts with the indicial root there")]
    IndicialSource(usize),
    #[error("truncation order {order} is below the required {needed}")]
    TruncationTooLow { order: usize, needed: usize },
    #[error("nonzero residual: {0}")]
    NonzeroResidual(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("symbolic eigenvalue where a concrete mode is required")]
    SymbolicMode,
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl SolverError {
    /// Whether the failure is an internal cross-check rather than bad input.
    pub fn is_consistency_failure(&self) -> bool {
        matches!(
            self,
            SolverError::NonzeroResidual(_)
                | SolverError::Inconsistent(_)
                | SolverError::IndicialMismatch
                | SolverError::Series(_)
        )
    }
}

/// Default working truncation `n + 2`.
pub fn default_order(n: usize) -> usize {
    n + 2
}

pub(crate) fn require_order(order: usize, needed: usize) -> Result<(), SolverError> {
    if order < needed {
        Err(SolverError::TruncationTooLow { order, needed })
    } else {
        Ok(())
    }
}
