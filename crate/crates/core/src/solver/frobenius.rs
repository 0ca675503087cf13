//! Order-by-order solution of `L u = f` from the lower indicial root, with a
//! single `x^d log x` term at the resonance `d`.

use super::operator::RadialOperator;
use super::SolverError;
use crate::series::{int, LogSeries, ParamPoly, Parity};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrobeniusSolution {
    pub series: LogSeries,
    pub resonance_order: usize,
    /// Coefficient of `x^d log x`.
    pub log_obstruction: ParamPoly,
    pub boundary_value_used: ParamPoly,
    pub source_used: LogSeries,
}

/// Renormalized solution: the `x^d` coefficient is set to zero.
pub fn solve_frobenius(
    op: &RadialOperator,
    source: &LogSeries,
    boundary_value: &ParamPoly,
) -> Result<FrobeniusSolution, SolverError> {
    solve_frobenius_with_resonance_coefficient(op, source, boundary_value, &ParamPoly::zero())
}

/// As [`solve_frobenius`] but with a prescribed free coefficient at `x^d`.
pub fn solve_frobenius_with_resonance_coefficient(
    op: &RadialOperator,
    source: &LogSeries,
    boundary_value: &ParamPoly,
    resonance_coefficient: &ParamPoly,
) -> Result<FrobeniusSolution, SolverError> {
    let (r0, r1) = op.indicial_roots;
    if r0 != 0 || r1 <= 0 {
        return Err(SolverError::IndicialMismatch);
    }
    let d = r1 as usize;
    let order = op.order().min(source.order());
    super::require_order(order, d)?;
    if !op.preserves_parity() || !source.is_even_valued() {
        return Err(SolverError::SourceParity);
    }
    if let Some(k) = source.first_log_order() {
        if k <= d {
            return Err(SolverError::LogBelowResonance(k));
        }
        // Above the resonance it would need log² in the solution.
        return Err(SolverError::Unsupported(format!("log source at order {k}")));
    }

    let c2 = op.coeff_xdx2.a_coeffs();
    let c1 = op.coeff_xdx.a_coeffs();
    let c0 = op.potential.a_coeffs();
    let mut a = vec![ParamPoly::zero(); order + 1];
    let mut b = vec![ParamPoly::zero(); order + 1];

    for k in 0..=order {
        // Residual of the equation at x^k (and x^k log x) from lower orders.
        let mut rest = source.a(k);
        let mut rest_log = ParamPoly::zero();
        for j in 0..k {
            let i = k - j;
            let jr = int(j as i64);
            let (aj, bj) = (&a[j], &b[j]);
            if aj.is_zero() && bj.is_zero() {
                continue;
            }
            let sym = &(&c2[i].scale(&(&jr * &jr)) + &c1[i].scale(&jr)) + &c0[i];
            let a_part = &(&sym * aj) + &(&(&c2[i].scale(&(int(2) * &jr)) + &c1[i]) * bj);
            rest = &rest - &a_part;
            if !bj.is_zero() {
                rest_log = &rest_log - &(&sym * bj);
            }
        }
        let kk = k as i64;
        if k == 0 {
            if !rest.is_zero() || !rest_log.is_zero() {
                return Err(SolverError::IndicialSource(0));
            }
            a[0] = boundary_value.clone();
        } else if k == d {
            if !rest_log.is_zero() {
                return Err(SolverError::Inconsistent(format!(
                    "log residual at the resonance order {d}"
                )));
            }
            b[k] = rest.scale(&op.indicial_derivative(kk).recip());
            a[k] = resonance_coefficient.clone();
        } else {
            let p = op.indicial(kk).recip();
            b[k] = rest_log.scale(&p);
            let lhs = &rest - &b[k].scale(&op.indicial_derivative(kk));
            a[k] = lhs.scale(&p);
        }
    }

    let series = LogSeries::from_parts(order, a, b, Parity::Unrestricted)?.with_inferred_parity();
    if series.parity() != Parity::EvenOnly {
        return Err(SolverError::Inconsistent("odd coefficients in an even problem".into()));
    }
    if series.first_log_order().is_some_and(|k| k < d) {
        return Err(SolverError::Inconsistent("log term below the resonance".into()));
    }
    let residual = op.apply(&series)?.sub(source).truncate(order);
    if !residual.is_zero() {
        return Err(SolverError::NonzeroResidual(
            "Frobenius solution does not satisfy its equation".into(),
        ));
    }
    Ok(FrobeniusSolution {
        log_obstruction: series.b(d),
        resonance_order: d,
        series,
        boundary_value_used: boundary_value.clone(),
        source_used: source.truncate(order),
    })
}
