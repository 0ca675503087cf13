//! Per-channel harmonic extensions, their log coefficients, and the
//! smoothness obstruction of the bulk Weyl extension.

use std::fmt;

use num_traits::Zero;

use super::forms::ExactFormOps;
use super::frobenius::{solve_frobenius, FrobeniusSolution};
use super::geometry::WarpedProduct;
use super::operator::{coclosed_operator_on, scalar_operator_on};
use super::{require_order, SolverError};
use crate::constants::{q01_factor, q_curvature_log_constant};
use crate::series::{int, LogSeries, ParamPoly, Parity, Rat};
use crate::spectral::{BoundaryWeyl, EinsteinModel, Eigenvalue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Channel {
    /// The constant scalar mode (defining-function data).
    Constant,
    Exact,
    Coclosed,
    Harmonic,
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Channel::Constant => "constant",
            Channel::Exact => "exact",
            Channel::Coclosed => "coclosed",
            Channel::Harmonic => "harmonic",
        })
    }
}

/// One row of a per-mode table. `index` is the entry's position within its
/// part of the Weyl structure (0 for the constant mode).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeValue {
    pub channel: Channel,
    pub index: usize,
    pub eigenvalue: ParamPoly,
    pub value: ParamPoly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefiningFunction {
    /// `u = log ρ − log x`.
    pub solution: FrobeniusSolution,
    /// Non-log coefficients of `u` at `x², x⁴, …, x^N`.
    pub r: Vec<Rat>,
    pub s: Rat,
    pub q_h: Rat,
    pub q01: Rat,
}

impl DefiningFunction {
    /// `n·s = Q_01` and `Q_h = s / c_n`.
    pub fn constants_consistent(&self, n: usize) -> bool {
        int(n as i64) * &self.s == self.q01
            && self.q_h == &self.s / q_curvature_log_constant(n)
            && self.q01 == q01_factor(n) * &self.q_h
    }
}

fn concrete(p: &ParamPoly, what: &str) -> Result<Rat, SolverError> {
    p.as_constant()
        .ok_or_else(|| SolverError::Inconsistent(format!("{what} is not a constant")))
}

fn zero_series(order: usize) -> LogSeries {
    LogSeries::zero(order, Parity::EvenOnly)
}

/// Solves `Δ_g u = n − Δ_g(log x) = −nλx²/(1 − ½λx²)` with `u(0) = 0`.
pub fn log_defining_function(
    model: &EinsteinModel,
    order: usize,
) -> Result<DefiningFunction, SolverError> {
    let n = model.n;
    require_order(order, n)?;
    let geom = WarpedProduct::from_model(model, order)?;
    let op = scalar_operator_on(&geom, &ParamPoly::zero())?;
    // n − n·D = −nλx²/w
    let source = LogSeries::one(order)
        .sub(&geom.drift)
        .scale_rat(&geom.n_rat());
    let solution = solve_frobenius(&op, &source, &ParamPoly::zero())?;
    let r = (2..=order)
        .step_by(2)
        .map(|k| concrete(&solution.series.a(k), "defining function coefficient"))
        .collect::<Result<Vec<_>, _>>()?;
    let s = concrete(&solution.log_obstruction, "s")?;
    let q_h = &s / q_curvature_log_constant(n);
    let q01 = q01_factor(n) * &q_h;
    Ok(DefiningFunction {
        solution,
        r,
        s,
        q_h,
        q01,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarExtension {
    pub kappa: ParamPoly,
    pub coeff: Rat,
    /// Solution with boundary value 1.
    pub unit: FrobeniusSolution,
    /// `coeff · unit`.
    pub series: LogSeries,
    pub l0: ParamPoly,
}

/// Harmonic extension of `coeff·φ_κ`; `κ` may be the formal parameter.
pub fn harmonic_extension_scalar(
    model: &EinsteinModel,
    kappa: &ParamPoly,
    coeff: &Rat,
    order: usize,
) -> Result<ScalarExtension, SolverError> {
    require_order(order, model.n)?;
    let geom = WarpedProduct::from_model(model, order)?;
    scalar_extension_on(&geom, kappa, coeff)
}

fn scalar_extension_on(
    geom: &WarpedProduct,
    kappa: &ParamPoly,
    coeff: &Rat,
) -> Result<ScalarExtension, SolverError> {
    let op = scalar_operator_on(geom, kappa)?;
    let unit = solve_frobenius(&op, &zero_series(geom.order), &ParamPoly::one())?;
    Ok(ScalarExtension {
        kappa: kappa.clone(),
        coeff: coeff.clone(),
        series: unit.series.scale_rat(coeff),
        l0: unit.log_obstruction.clone(),
        unit,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoclosedExtension {
    pub mu: ParamPoly,
    pub coeff: Rat,
    pub unit: FrobeniusSolution,
    pub series: LogSeries,
    pub l1: ParamPoly,
    /// Normal log coefficient; the extension is purely tangential.
    pub g1: ParamPoly,
    /// `L₁` recovered from `Δ_g` of the extension cut below its log term,
    /// whose `x^{n−2}` coefficient is `(n−2)L₁`.
    pub l1_from_error_term: ParamPoly,
}

pub fn harmonic_extension_coclosed(
    model: &EinsteinModel,
    mu: &ParamPoly,
    coeff: &Rat,
    order: usize,
) -> Result<CoclosedExtension, SolverError> {
    require_order(order, model.n)?;
    let geom = WarpedProduct::from_model(model, order)?;
    coclosed_extension_on(&geom, mu, coeff)
}

fn coclosed_extension_on(
    geom: &WarpedProduct,
    mu: &ParamPoly,
    coeff: &Rat,
) -> Result<CoclosedExtension, SolverError> {
    let n = geom.n;
    let op = coclosed_operator_on(geom, mu)?;
    let unit = solve_frobenius(&op, &zero_series(geom.order), &ParamPoly::one())?;
    let approx = unit.series.cut_below(n - 2);
    let error = op.apply(&approx)?;
    let l1_from_error_term = error.a(n - 2).scale(&int(n as i64 - 2).recip());
    if l1_from_error_term != unit.log_obstruction {
        return Err(SolverError::Inconsistent(
            "L1 from the error term disagrees with the log coefficient".into(),
        ));
    }
    Ok(CoclosedExtension {
        mu: mu.clone(),
        coeff: coeff.clone(),
        series: unit.series.scale_rat(coeff),
        l1: unit.log_obstruction.clone(),
        g1: ParamPoly::zero(),
        l1_from_error_term,
        unit,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactExtension {
    pub scalar: ScalarExtension,
    /// Coefficient of `dφ` in `d f̄`, per unit boundary coefficient.
    pub tangential: LogSeries,
    /// Coefficient of `φ dx/x` in `d f̄`, per unit boundary coefficient.
    pub normal: LogSeries,
    /// Tangential log coefficient at `x^{n−2}`; zero on closed forms.
    pub l1: ParamPoly,
    /// Normal log coefficient at `x^n`.
    pub g1: ParamPoly,
    /// `G₁` recovered from `Δ_g` of `d` of the cut extension, whose normal
    /// `x^n` coefficient is `n·G₁`.
    pub g1_from_error_term: ParamPoly,
}

/// `b̄ = d f̄` for the scalar extension `f̄` of a nonconstant mode.
pub fn exact_channel(
    model: &EinsteinModel,
    kappa: &ParamPoly,
    coeff: &Rat,
    order: usize,
) -> Result<ExactExtension, SolverError> {
    if kappa.is_zero() {
        return Err(SolverError::Spectral(
            crate::spectral::SpectralError::ConstantModeInExact,
        ));
    }
    require_order(order, model.n)?;
    let geom = WarpedProduct::from_model(model, order)?;
    exact_extension_on(&geom, kappa, coeff)
}

fn exact_extension_on(
    geom: &WarpedProduct,
    kappa: &ParamPoly,
    coeff: &Rat,
) -> Result<ExactExtension, SolverError> {
    let n = geom.n;
    let nr = geom.n_rat();
    let scalar = scalar_extension_on(geom, kappa, coeff)?;
    let f = &scalar.unit.series;
    let tangential = f.clone();
    let normal = f.apply_xdx();
    let l1 = tangential.b(n - 2);
    let g1 = normal.b(n);
    if g1 != scalar.l0.scale(&nr) {
        return Err(SolverError::Inconsistent("G1 d != n L0".into()));
    }

    let ops = ExactFormOps::new(geom, kappa.clone());
    let lap = ops.laplacian(0, &tangential, &normal)?;
    if !lap.tangential.is_zero() || !lap.normal.is_zero() {
        return Err(SolverError::NonzeroResidual(
            "Hodge Laplacian of d of the harmonic extension".into(),
        ));
    }
    let cut = f.cut_below(n);
    let err = ops.laplacian(0, &cut, &cut.apply_xdx())?;
    if !err.tangential.a(n - 2).is_zero() {
        return Err(SolverError::Inconsistent(
            "exact channel error term has an x^(n-2) tangential part".into(),
        ));
    }
    let g1_from_error_term = err.normal.a(n).scale(&nr.recip());
    if g1_from_error_term != g1 {
        return Err(SolverError::Inconsistent(
            "G1 from the error term disagrees with the log coefficient".into(),
        ));
    }
    Ok(ExactExtension {
        scalar,
        tangential,
        normal,
        l1,
        g1,
        g1_from_error_term,
    })
}

/// One piece of the bulk Weyl extension `b̃ = d log ρ + b̄`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeylExtensionEntry {
    pub channel: Channel,
    pub index: usize,
    pub eigenvalue: ParamPoly,
    pub coeff: Rat,
    pub tangential: LogSeries,
    pub normal: LogSeries,
    /// Coefficient of `x^{n−2} log x` in the tangential series.
    pub tangential_log: ParamPoly,
    /// Coefficient of `x^n log x` in the normal series.
    pub normal_log: ParamPoly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionReport {
    pub n: usize,
    pub lambda: Rat,
    pub order: usize,
    pub defining: DefiningFunction,
    pub scalar: Vec<ScalarExtension>,
    pub coclosed: Vec<CoclosedExtension>,
    pub exact: Vec<ExactExtension>,
    pub weyl_extension: Vec<WeylExtensionEntry>,
}

impl ExpansionReport {
    pub fn constants_consistent(&self) -> bool {
        self.defining.constants_consistent(self.n)
    }
}

/// Every model mode plus the pieces of `b̃` for `beta`. Coclosed entries
/// with the formal eigenvalue are solved symbolically.
pub fn expansion_report(
    model: &EinsteinModel,
    beta: &BoundaryWeyl,
    order: usize,
) -> Result<ExpansionReport, SolverError> {
    require_order(order, model.n)?;
    let geom = WarpedProduct::from_model(model, order)?;
    let one = Rat::from_integer(1.into());
    let defining = log_defining_function(model, order)?;
    let scalar = model
        .scalar_modes
        .iter()
        .map(|m| scalar_extension_on(&geom, &ParamPoly::constant(m.kappa.clone()), &one))
        .collect::<Result<Vec<_>, _>>()?;
    let mut mus: Vec<ParamPoly> = model
        .coclosed_modes
        .iter()
        .map(|m| ParamPoly::constant(m.mu.clone()))
        .collect();
    if beta.has_symbolic() {
        mus.push(ParamPoly::mu());
    }
    let coclosed = mus
        .iter()
        .map(|mu| coclosed_extension_on(&geom, mu, &one))
        .collect::<Result<Vec<_>, _>>()?;
    let exact = model
        .scalar_modes
        .iter()
        .filter(|m| !m.kappa.is_zero())
        .map(|m| exact_extension_on(&geom, &ParamPoly::constant(m.kappa.clone()), &one))
        .collect::<Result<Vec<_>, _>>()?;
    let weyl_extension = weyl_extension_on(&geom, &defining, beta)?;
    Ok(ExpansionReport {
        n: model.n,
        lambda: model.lambda.clone(),
        order,
        defining,
        scalar,
        coclosed,
        exact,
        weyl_extension,
    })
}

fn weyl_extension_on(
    geom: &WarpedProduct,
    defining: &DefiningFunction,
    beta: &BoundaryWeyl,
) -> Result<Vec<WeylExtensionEntry>, SolverError> {
    let n = geom.n;
    let order = geom.order;
    let one = Rat::from_integer(1.into());
    let mut out = Vec::new();
    // d log ρ = (1 + x∂u) dx/x
    let normal = LogSeries::one(order).add(&defining.solution.series.apply_xdx());
    out.push(WeylExtensionEntry {
        channel: Channel::Constant,
        index: 0,
        eigenvalue: ParamPoly::zero(),
        coeff: one.clone(),
        tangential: zero_series(order),
        normal_log: normal.b(n),
        tangential_log: ParamPoly::zero(),
        normal,
    });
    for (i, e) in beta.exact_part.iter().enumerate() {
        let kappa = ParamPoly::constant(e.kappa.clone());
        let ext = exact_extension_on(geom, &kappa, &e.coeff)?;
        let tangential = ext.tangential.scale_rat(&e.coeff);
        let normal = ext.normal.scale_rat(&e.coeff);
        out.push(WeylExtensionEntry {
            channel: Channel::Exact,
            index: i,
            eigenvalue: kappa,
            coeff: e.coeff.clone(),
            tangential_log: tangential.b(n - 2),
            normal_log: normal.b(n),
            tangential,
            normal,
        });
    }
    for (i, e) in beta.coclosed_part.iter().enumerate() {
        let mu = e.mu.as_poly();
        let ext = coclosed_extension_on(geom, &mu, &e.coeff)?;
        out.push(WeylExtensionEntry {
            channel: Channel::Coclosed,
            index: i,
            eigenvalue: mu,
            coeff: e.coeff.clone(),
            tangential_log: ext.series.b(n - 2),
            normal_log: ParamPoly::zero(),
            tangential: ext.series,
            normal: zero_series(order),
        });
    }
    for (i, e) in beta.harmonic_part.iter().enumerate() {
        let ext = coclosed_extension_on(geom, &ParamPoly::zero(), &e.coeff)?;
        out.push(WeylExtensionEntry {
            channel: Channel::Harmonic,
            index: i,
            eigenvalue: ParamPoly::zero(),
            coeff: e.coeff.clone(),
            tangential_log: ext.series.b(n - 2),
            normal_log: ParamPoly::zero(),
            tangential: ext.series,
            normal: zero_series(order),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmoothnessReport {
    /// `L₁β` per coclosed and harmonic entry.
    pub l1_beta: Vec<ModeValue>,
    /// `n·s + G₁β`: the constant mode carries `n·s`, exact entries `G₁`.
    pub bottom: Vec<ModeValue>,
    pub smooth: bool,
}

impl SmoothnessReport {
    pub fn constant_bottom(&self) -> ParamPoly {
        self.bottom
            .iter()
            .find(|r| r.channel == Channel::Constant)
            .map(|r| r.value.clone())
            .unwrap_or_default()
    }
}

/// The first log coefficients of `b̃`; smooth iff all of them vanish.
pub fn smoothness_obstruction(
    model: &EinsteinModel,
    beta: &BoundaryWeyl,
    order: usize,
) -> Result<SmoothnessReport, SolverError> {
    require_order(order, model.n)?;
    let geom = WarpedProduct::from_model(model, order)?;
    let defining = log_defining_function(model, order)?;
    let entries = weyl_extension_on(&geom, &defining, beta)?;
    let mut l1_beta = Vec::new();
    let mut bottom = Vec::new();
    for e in entries {
        match e.channel {
            Channel::Constant | Channel::Exact => bottom.push(ModeValue {
                channel: e.channel,
                index: e.index,
                eigenvalue: e.eigenvalue,
                value: e.normal_log,
            }),
            Channel::Coclosed | Channel::Harmonic => l1_beta.push(ModeValue {
                channel: e.channel,
                index: e.index,
                eigenvalue: e.eigenvalue,
                value: e.tangential_log,
            }),
        }
    }
    let smooth = l1_beta.iter().chain(&bottom).all(|r| r.value.is_zero());
    Ok(SmoothnessReport {
        l1_beta,
        bottom,
        smooth,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaugeResidual {
    pub channel: Channel,
    pub index: usize,
    /// `d*_g` of the extension, as a coefficient series.
    pub divergence: LogSeries,
    /// `Δ_g` of the extension, tangential and normal coefficient series.
    pub laplacian_tangential: LogSeries,
    pub laplacian_normal: LogSeries,
}

impl GaugeResidual {
    pub fn is_zero(&self) -> bool {
        self.divergence.is_zero()
            && self.laplacian_tangential.is_zero()
            && self.laplacian_normal.is_zero()
    }
}

/// Divergence and Hodge Laplacian of each channel's extension of `beta`,
/// computed with the exact Einstein-collar formulas. Fails if any residual
/// is nonzero.
pub fn gauge_residuals(
    model: &EinsteinModel,
    beta: &BoundaryWeyl,
    order: usize,
) -> Result<Vec<GaugeResidual>, SolverError> {
    require_order(order, model.n)?;
    let geom = WarpedProduct::from_model(model, order)?;
    let mut out = Vec::new();
    for (i, e) in beta.exact_part.iter().enumerate() {
        let kappa = ParamPoly::constant(e.kappa.clone());
        let ext = scalar_extension_on(&geom, &kappa, &e.coeff)?;
        let t = ext.series.clone();
        let b = t.apply_xdx();
        let ops = ExactFormOps::new(&geom, kappa);
        let lap = ops.laplacian(0, &t, &b)?;
        out.push(GaugeResidual {
            channel: Channel::Exact,
            index: i,
            divergence: ops.divergence(0, &t, &b)?,
            laplacian_tangential: lap.tangential,
            laplacian_normal: lap.normal,
        });
    }
    let tangential_only = beta
        .coclosed_part
        .iter()
        .map(|e| (Channel::Coclosed, e.mu.clone(), e.coeff.clone()))
        .chain(
            beta.harmonic_part
                .iter()
                .map(|e| (Channel::Harmonic, Eigenvalue::Value(Rat::zero()), e.coeff.clone())),
        );
    let mut counters = [0usize; 2];
    for (channel, mu, coeff) in tangential_only {
        let slot = usize::from(channel == Channel::Harmonic);
        let index = counters[slot];
        counters[slot] += 1;
        let op = coclosed_operator_on(&geom, &mu.as_poly())?;
        let ext = solve_frobenius(&op, &zero_series(order), &ParamPoly::constant(coeff))?;
        // d*_g(ψα) = x²w⁻²ψ d*_h α = 0 for coclosed α, with no normal part.
        out.push(GaugeResidual {
            channel,
            index,
            divergence: zero_series(order),
            laplacian_tangential: op.apply(&ext.series)?,
            laplacian_normal: zero_series(order),
        });
    }
    if let Some(bad) = out.iter().find(|r| !r.is_zero()) {
        return Err(SolverError::NonzeroResidual(format!(
            "gauge residual on {} entry {}",
            bad.channel, bad.index
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat;
    use crate::spectral::{make_flat_torus, make_round_sphere};

    fn with_lambda(n: usize, lambda: Rat) -> EinsteinModel {
        let mut m = make_flat_torus(n, 1).unwrap();
        m.lambda = lambda;
        m
    }

    #[test]
    fn sphere_four_defining_function() {
        let s4 = make_round_sphere(4, 1).unwrap();
        let d = log_defining_function(&s4, 6).unwrap();
        assert_eq!(d.r[0], rat(-1, 2));
        assert_eq!(d.s, rat(-3, 8));
        assert_eq!(d.q_h, int(6));
        assert!(d.constants_consistent(4));
    }

    #[test]
    fn q_curvature_matches_einstein_value() {
        // Q = (n−1)!·(2λ)^{n/2} on an Einstein manifold with P = λh.
        for n in [4usize, 6, 8] {
            for lambda in [int(0), rat(1, 2), int(-1), rat(2, 3)] {
                let d = log_defining_function(&with_lambda(n, lambda.clone()), n + 2).unwrap();
                let mut expect = int(1);
                for k in 1..n as i64 {
                    expect *= int(k);
                }
                for _ in 0..n / 2 {
                    expect *= int(2) * &lambda;
                }
                assert_eq!(d.q_h, expect, "n={n} λ={lambda}");
            }
        }
    }

    #[test]
    fn flat_defining_function_vanishes() {
        let d = log_defining_function(&make_flat_torus(4, 0).unwrap(), 6).unwrap();
        assert!(d.solution.series.is_zero());
        assert_eq!(d.q_h, int(0));
    }

    #[test]
    fn scalar_l0_flat() {
        let t = make_flat_torus(4, 1).unwrap();
        let e = harmonic_extension_scalar(&t, &ParamPoly::constant(int(1)), &int(1), 6).unwrap();
        assert_eq!(e.l0, ParamPoly::constant(rat(-1, 16)));
        let c = harmonic_extension_scalar(&t, &ParamPoly::zero(), &int(3), 6).unwrap();
        assert_eq!(c.series, LogSeries::constant(6, ParamPoly::constant(int(3))));
        assert!(c.l0.is_zero());
    }

    #[test]
    fn coclosed_l1_six() {
        for lambda in [int(0), rat(1, 2), int(-1)] {
            let m = with_lambda(6, lambda.clone());
            let e = harmonic_extension_coclosed(&m, &ParamPoly::mu(), &int(1), 8).unwrap();
            // −(μ² + 4λμ)/16
            let expect = ParamPoly::from_coeffs(vec![int(0), -&lambda / int(4), rat(-1, 16)]);
            assert_eq!(e.l1, expect);
            assert!(e.g1.is_zero());
        }
    }

    #[test]
    fn exact_channel_g1() {
        let t = make_flat_torus(4, 1).unwrap();
        let e = exact_channel(&t, &ParamPoly::constant(int(1)), &int(1), 6).unwrap();
        assert_eq!(e.g1, ParamPoly::constant(rat(-1, 4)));
        assert!(e.l1.is_zero());
        assert!(exact_channel(&t, &ParamPoly::zero(), &int(1), 6).is_err());
    }

    #[test]
    fn smoothness_examples() {
        let s4 = make_round_sphere(4, 1).unwrap();
        let r = smoothness_obstruction(&s4, &BoundaryWeyl::zero(), 6).unwrap();
        assert!(!r.smooth);
        assert_eq!(r.constant_bottom(), ParamPoly::constant(rat(-3, 2)));

        let t = make_flat_torus(4, 1).unwrap();
        let harmonic = BoundaryWeyl::harmonic(int(1));
        assert!(smoothness_obstruction(&t, &harmonic, 6).unwrap().smooth);

        let exact = BoundaryWeyl::exact(int(1), int(1));
        let r = smoothness_obstruction(&t, &exact, 6).unwrap();
        assert!(!r.smooth);
        assert_eq!(r.bottom[1].value, ParamPoly::constant(rat(-1, 4)));
        assert!(r.l1_beta.is_empty());
    }

    #[test]
    fn gauge_residuals_vanish() {
        let t = make_flat_torus(4, 1).unwrap();
        let beta = BoundaryWeyl::exact(int(1), int(1))
            .plus(BoundaryWeyl::coclosed(Eigenvalue::Value(int(1)), int(2)))
            .plus(BoundaryWeyl::harmonic(int(1)));
        let res = gauge_residuals(&t, &beta, 6).unwrap();
        assert_eq!(res.len(), 3);
        assert!(gauge_residuals(&t, &BoundaryWeyl::zero(), 6).unwrap().is_empty());
    }

    #[test]
    fn report_constants() {
        let s4 = make_round_sphere(4, 2).unwrap();
        let r = expansion_report(&s4, &BoundaryWeyl::zero(), 6).unwrap();
        assert!(r.constants_consistent());
        assert_eq!(r.weyl_extension[0].normal_log, ParamPoly::constant(rat(-3, 2)));
    }
}
