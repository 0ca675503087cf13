//! Mode-reduced radial operators `c₂(x∂ₓ)² + c₁ x∂ₓ + c₀` of the Einstein collar.

use num_traits::One;

use super::geometry::WarpedProduct;
use super::SolverError;
use crate::series::{int, LogSeries, ParamPoly, Rat, SeriesError};
use crate::spectral::EinsteinModel;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadialOperator {
    pub coeff_xdx2: LogSeries,
    pub coeff_xdx: LogSeries,
    pub potential: LogSeries,
    pub indicial_roots: (i64, i64),
}

impl RadialOperator {
    /// Builds the operator and reads its indicial roots from the constant
    /// terms, which must be `−1`, an integer drift `d` and `0`.
    pub fn new(
        coeff_xdx2: LogSeries,
        coeff_xdx: LogSeries,
        potential: LogSeries,
    ) -> Result<Self, SolverError> {
        let lead = coeff_xdx2.a(0).as_constant();
        let drift = coeff_xdx.a(0).as_constant();
        let pot = potential.a(0);
        let ok = lead == Some(-Rat::one())
            && pot.is_zero()
            && !coeff_xdx2.has_log()
            && !coeff_xdx.has_log()
            && !potential.has_log();
        let d = match (ok, drift) {
            (true, Some(d)) if d.is_integer() => d.to_integer(),
            _ => return Err(SolverError::IndicialMismatch),
        };
        let d: i64 = d.try_into().map_err(|_| SolverError::IndicialMismatch)?;
        let roots = if d >= 0 { (0, d) } else { (d, 0) };
        Ok(Self {
            coeff_xdx2,
            coeff_xdx,
            potential,
            indicial_roots: roots,
        })
    }

    pub fn order(&self) -> usize {
        self.coeff_xdx2
            .order()
            .min(self.coeff_xdx.order())
            .min(self.potential.order())
    }

    /// Indicial polynomial `P(s) = −s² + d·s`.
    pub fn indicial(&self, s: i64) -> Rat {
        let (r0, r1) = self.indicial_roots;
        -int((s - r0) * (s - r1))
    }

    /// `P'(s)`.
    pub fn indicial_derivative(&self, s: i64) -> Rat {
        let (r0, r1) = self.indicial_roots;
        -int(2 * s - r0 - r1)
    }

    pub fn apply(&self, u: &LogSeries) -> Result<LogSeries, SeriesError> {
        self.apply_shifted(0, u)
    }

    /// `x^{-p} · L(x^p · u)`, i.e. the operator with `x∂ₓ ↦ x∂ₓ + p`.
    pub fn apply_shifted(&self, p: i64, u: &LogSeries) -> Result<LogSeries, SeriesError> {
        let du = u.apply_xdx_shifted(p);
        let ddu = du.apply_xdx_shifted(p);
        Ok(self
            .coeff_xdx2
            .mul(&ddu)?
            .add(&self.coeff_xdx.mul(&du)?)
            .add(&self.potential.mul(u)?))
    }

    /// Coefficientwise equality on the common truncation.
    pub fn agrees_with(&self, other: &RadialOperator) -> bool {
        self.indicial_roots == other.indicial_roots
            && self.coeff_xdx2.agrees_with(&other.coeff_xdx2)
            && self.coeff_xdx.agrees_with(&other.coeff_xdx)
            && self.potential.agrees_with(&other.potential)
    }

    fn is_even(&self) -> bool {
        self.coeff_xdx2.is_even_valued()
            && self.coeff_xdx.is_even_valued()
            && self.potential.is_even_valued()
    }

    pub(crate) fn preserves_parity(&self) -> bool {
        self.is_even()
    }
}

/// `Δ_g` on `ψ(x)φ` with `Δ_h φ = κφ`:
/// `−(x∂ₓ)² + n·D(x)·x∂ₓ + κx²/w²`.
pub fn scalar_operator(
    model: &EinsteinModel,
    kappa: &ParamPoly,
    order: usize,
) -> Result<RadialOperator, SolverError> {
    let geom = WarpedProduct::from_model(model, order)?;
    scalar_operator_on(&geom, kappa)
}

pub(crate) fn scalar_operator_on(
    geom: &WarpedProduct,
    kappa: &ParamPoly,
) -> Result<RadialOperator, SolverError> {
    RadialOperator::new(
        LogSeries::constant(geom.order, ParamPoly::constant(-Rat::one())),
        geom.drift.scale_rat(&geom.n_rat()),
        geom.potential(kappa),
    )
}

/// Which closed-form drift factor to use for the tangential 1-form operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XFormDrift {
    /// `(n−2)(1 + ½λx²)/(1 − ½λx²)`, consistent with the y-variable form.
    Corrected,
    /// `(n−2)(1 − ½λx²)/(1 + ½λx²)`, as displayed in the x-variable in the
    /// source derivation; kept to demonstrate that it is inconsistent.
    AsPrinted,
}

/// Tangential channel `Δ_g(ψ(x)α)` for a coclosed eigenform `Δ_h α = μα`,
/// derived mechanically from the operator in `y = x/(1 − ½λx²)`:
/// `−(1 + 2λy²)(y∂_y)² + ((n−2) + 2(n−3)λy²) y∂_y + μy²`.
pub fn coclosed_operator(
    model: &EinsteinModel,
    mu: &ParamPoly,
    order: usize,
) -> Result<RadialOperator, SolverError> {
    let geom = WarpedProduct::from_model(model, order)?;
    coclosed_operator_on(&geom, mu)
}

pub(crate) fn coclosed_operator_on(
    geom: &WarpedProduct,
    mu: &ParamPoly,
) -> Result<RadialOperator, SolverError> {
    let order = geom.order;
    let n = geom.n as i64;
    let lambda = &geom.lambda;
    // y/x and the Jacobian factor c with y∂_y = c · x∂ₓ.
    let y_over_x = geom.warp.reciprocal()?;
    let y_sq = y_over_x.mul(&y_over_x)?.shift_up(2).truncate(order);
    let log_deriv = y_over_x.add(&y_over_x.apply_xdx()); // x∂ₓ(y)/x
    let jac = y_over_x.mul(&log_deriv.reciprocal()?)?;
    let jac_xdx = jac.apply_xdx();

    let one = LogSeries::one(order);
    let a_y = one.scale_rat(&-Rat::one()).sub(&y_sq.scale_rat(&(int(2) * lambda)));
    let b_y = one
        .scale_rat(&int(n - 2))
        .add(&y_sq.scale_rat(&(int(2 * (n - 3)) * lambda)));

    // A (y∂)² + B y∂ = A c² (x∂)² + (A c (x∂c) + B c) x∂
    let coeff_xdx2 = a_y.mul(&jac)?.mul(&jac)?;
    let coeff_xdx = a_y.mul(&jac)?.mul(&jac_xdx)?.add(&b_y.mul(&jac)?);
    let potential = y_sq.scale(mu);
    RadialOperator::new(coeff_xdx2, coeff_xdx, potential)
}

/// The tangential operator written directly in `x` with a chosen drift.
pub fn coclosed_operator_x_form(
    model: &EinsteinModel,
    mu: &ParamPoly,
    order: usize,
    drift: XFormDrift,
) -> Result<RadialOperator, SolverError> {
    let geom = WarpedProduct::from_model(model, order)?;
    let factor = match drift {
        XFormDrift::Corrected => geom.drift.clone(),
        XFormDrift::AsPrinted => geom.drift.reciprocal()?,
    };
    RadialOperator::new(
        LogSeries::constant(order, ParamPoly::constant(-Rat::one())),
        factor.scale_rat(&int(geom.n as i64 - 2)),
        geom.potential(mu),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat;
    use crate::spectral::{make_flat_torus, make_round_sphere};

    fn custom(n: usize, lambda: Rat) -> EinsteinModel {
        let mut m = make_flat_torus(n, 0).unwrap();
        m.lambda = lambda;
        m
    }

    #[test]
    fn flat_scalar_operator() {
        let t = make_flat_torus(4, 1).unwrap();
        let op = scalar_operator(&t, &ParamPoly::mu(), 6).unwrap();
        assert_eq!(op.coeff_xdx, LogSeries::constant(6, ParamPoly::constant(int(4))));
        assert_eq!(op.potential, LogSeries::monomial(6, 2, ParamPoly::mu()));
        assert_eq!(op.indicial_roots, (0, 4));
    }

    #[test]
    fn sphere_scalar_drift() {
        let s = make_round_sphere(4, 1).unwrap();
        let op = scalar_operator(&s, &ParamPoly::zero(), 6).unwrap();
        assert_eq!(op.coeff_xdx.a(0), ParamPoly::constant(int(4)));
        assert_eq!(op.coeff_xdx.a(2), ParamPoly::constant(int(2)));
    }

    #[test]
    fn constants_are_annihilated() {
        for lambda in [int(0), rat(1, 2), int(-1)] {
            let op = scalar_operator(&custom(6, lambda), &ParamPoly::zero(), 8).unwrap();
            assert!(op.apply(&LogSeries::one(8)).unwrap().is_zero());
        }
    }

    #[test]
    fn flat_coclosed_operator() {
        let t = make_flat_torus(4, 1).unwrap();
        let op = coclosed_operator(&t, &ParamPoly::mu(), 6).unwrap();
        assert_eq!(op.coeff_xdx2, LogSeries::constant(6, ParamPoly::constant(int(-1))));
        assert_eq!(op.coeff_xdx, LogSeries::constant(6, ParamPoly::constant(int(2))));
        assert_eq!(op.potential, LogSeries::monomial(6, 2, ParamPoly::mu()));
        assert_eq!(op.indicial_roots, (0, 2));
    }

    #[test]
    fn y_form_matches_corrected_x_form() {
        for n in [4, 6, 8] {
            for lambda in [int(0), rat(1, 2), int(-1), rat(3, 7)] {
                let m = custom(n, lambda.clone());
                let y = coclosed_operator(&m, &ParamPoly::mu(), 10).unwrap();
                let x = coclosed_operator_x_form(&m, &ParamPoly::mu(), 10, XFormDrift::Corrected)
                    .unwrap();
                assert!(y.agrees_with(&x), "n={n} λ={lambda}");
            }
        }
    }

    #[test]
    fn printed_x_form_differs_when_curved() {
        let m = custom(6, rat(1, 2));
        let y = coclosed_operator(&m, &ParamPoly::mu(), 8).unwrap();
        let printed =
            coclosed_operator_x_form(&m, &ParamPoly::mu(), 8, XFormDrift::AsPrinted).unwrap();
        assert!(!y.agrees_with(&printed));
        let flat = custom(6, int(0));
        let y0 = coclosed_operator(&flat, &ParamPoly::mu(), 8).unwrap();
        let p0 = coclosed_operator_x_form(&flat, &ParamPoly::mu(), 8, XFormDrift::AsPrinted)
            .unwrap();
        assert!(y0.agrees_with(&p0));
    }

    #[test]
    fn rejects_bad_indicial_data() {
        let one = LogSeries::one(4);
        assert_eq!(
            RadialOperator::new(one.clone(), one.clone(), LogSeries::zero(4, crate::series::Parity::EvenOnly)),
            Err(SolverError::IndicialMismatch)
        );
    }
}
