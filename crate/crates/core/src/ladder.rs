//! Weighted form spaces and the `E`, `F`, `H` operators acting on them.
//!
//! A weight-`w` form on one mode is stored as
//! `η = x^p (T(x)·α + x² N(x)·φ dx/x)` with `p = −w` for `w ≥ 2−n` and
//! `p = n−2` (with `T(0) = 0`) for `w ≤ −n`, so every stored series starts
//! at `x⁰`. For a coclosed mode `α` is the eigenform and `N = 0`; for an
//! exact mode `α = dφ`.
//!
//! The operators also have an ambient-metric realization, not used here.

use std::fmt;

use crate::constants::{l1_product_prefactor, ladder_constant};
use crate::series::{int, rat, LogSeries, ParamPoly, Parity, Rat};
use crate::solver::forms::ExactFormOps;
use crate::solver::geometry::WarpedProduct;
use crate::solver::operator::{coclosed_operator_on, scalar_operator_on};
use crate::solver::{require_order, solve_frobenius, SolverError};
use crate::spectral::EinsteinModel;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LadderChannel {
    Coclosed { mu: ParamPoly },
    Exact { kappa: ParamPoly },
}

impl LadderChannel {
    pub fn eigenvalue(&self) -> &ParamPoly {
        match self {
            LadderChannel::Coclosed { mu } => mu,
            LadderChannel::Exact { kappa } => kappa,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedForm {
    pub n: usize,
    pub weight: i64,
    pub channel: LadderChannel,
    pub tangential: LogSeries,
    pub normal: LogSeries,
}

impl fmt::Display for WeightedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[w={}] T: ", self.weight)?;
        for (k, c) in self.tangential.a_coeffs().iter().enumerate() {
            if !c.is_zero() {
                write!(f, "({c})x^{k} ")?;
            }
        }
        Ok(())
    }
}

/// Power of `x` factored out of a weight-`w` form.
pub fn prefactor_power(n: usize, w: i64) -> i64 {
    let n = n as i64;
    if w >= 2 - n {
        -w
    } else {
        n - 2
    }
}

fn special(n: usize, w: i64) -> bool {
    w <= -(n as i64)
}

impl WeightedForm {
    pub fn new(
        n: usize,
        weight: i64,
        channel: LadderChannel,
        tangential: LogSeries,
        normal: LogSeries,
    ) -> Result<Self, SolverError> {
        if weight % 2 != 0 {
            return Err(SolverError::Inconsistent(format!("odd weight {weight}")));
        }
        if !tangential.is_even_valued() || !normal.is_even_valued() {
            return Err(SolverError::SourceParity);
        }
        if matches!(channel, LadderChannel::Coclosed { .. }) && !normal.is_zero() {
            return Err(SolverError::Inconsistent(
                "coclosed form with a normal part".into(),
            ));
        }
        if special(n, weight) && !tangential.a(0).is_zero() {
            return Err(SolverError::Inconsistent(format!(
                "weight {weight} form must vanish at the boundary"
            )));
        }
        Ok(Self {
            n,
            weight,
            channel,
            tangential,
            normal,
        })
    }

    pub fn coclosed(n: usize, weight: i64, mu: ParamPoly, tangential: LogSeries) -> Result<Self, SolverError> {
        let normal = LogSeries::zero(tangential.order().saturating_sub(2), Parity::EvenOnly);
        Self::new(n, weight, LadderChannel::Coclosed { mu }, tangential, normal)
    }

    pub fn order(&self) -> usize {
        self.tangential.order()
    }

    pub fn prefactor_power(&self) -> i64 {
        prefactor_power(self.n, self.weight)
    }

    /// `x²N`, the normal coefficient with the prefactor `x^p` divided out.
    fn normal_full(&self) -> LogSeries {
        self.normal.shift_up(2)
    }

    fn map(&self, weight: i64, f: impl Fn(&LogSeries) -> LogSeries) -> Self {
        Self {
            n: self.n,
            weight,
            channel: self.channel.clone(),
            tangential: f(&self.tangential),
            normal: f(&self.normal),
        }
    }

    pub fn add(&self, other: &WeightedForm) -> Result<Self, SolverError> {
        if self.weight != other.weight || self.channel != other.channel || self.n != other.n {
            return Err(SolverError::Inconsistent("adding forms of different type".into()));
        }
        Ok(Self {
            n: self.n,
            weight: self.weight,
            channel: self.channel.clone(),
            tangential: self.tangential.add(&other.tangential),
            normal: self.normal.add(&other.normal),
        })
    }

    pub fn sub(&self, other: &WeightedForm) -> Result<Self, SolverError> {
        self.add(&other.scale(&int(-1)))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        self.map(self.weight, |s| s.scale_rat(c))
    }

    /// Equality on the orders both forms know.
    pub fn agrees_with(&self, other: &WeightedForm) -> bool {
        self.weight == other.weight
            && self.channel == other.channel
            && self.tangential.agrees_with(&other.tangential)
            && self.normal.agrees_with(&other.normal)
    }

    pub fn is_zero(&self) -> bool {
        self.tangential.is_zero() && self.normal.is_zero()
    }

    /// The boundary value `β₀`; zero for `w ≤ −n`.
    pub fn restriction(&self) -> ParamPoly {
        if special(self.n, self.weight) {
            ParamPoly::zero()
        } else {
            self.tangential.a(0)
        }
    }
}

/// `E η = −¼ η`, viewed in weight `w + 2`.
pub fn op_e(f: &WeightedForm) -> WeightedForm {
    let shift = (f.prefactor_power() - prefactor_power(f.n, f.weight + 2)) as usize;
    f.map(f.weight + 2, |s| s.shift_up(shift).scale_rat(&rat(-1, 4)))
}

/// `H η = (w + n/2) η`.
pub fn op_h(f: &WeightedForm) -> WeightedForm {
    let c = int(f.weight + f.n as i64 / 2);
    f.map(f.weight, |s| s.scale_rat(&c))
}

fn geometry_for(model: &EinsteinModel, f: &WeightedForm) -> Result<WarpedProduct, SolverError> {
    let order = f.tangential.order().max(f.normal.order() + 2) + 2;
    Ok(WarpedProduct::from_model(model, order)?)
}

fn cancellation(e: crate::series::SeriesError) -> SolverError {
    SolverError::Inconsistent(format!("leading cancellation failed: {e}"))
}

/// `F η = (Δ_g + w(w+n−2)) η`, viewed in weight `w − 2`.
pub fn op_f(model: &EinsteinModel, f: &WeightedForm) -> Result<WeightedForm, SolverError> {
    if model.n != f.n {
        return Err(SolverError::Inconsistent("form and model dimensions differ".into()));
    }
    let geom = geometry_for(model, f)?;
    let w = f.weight;
    let p = f.prefactor_power();
    let c = int(w * (w + f.n as i64 - 2));
    let shift = (prefactor_power(f.n, w - 2) - p) as usize;
    let (tangential, normal) = match &f.channel {
        LadderChannel::Coclosed { mu } => {
            let op = coclosed_operator_on(&geom, mu)?;
            let t = op.apply_shifted(p, &f.tangential)?.add(&f.tangential.scale_rat(&c));
            let t = t.shift_down(shift).map_err(cancellation)?;
            let normal = LogSeries::zero(t.order().saturating_sub(2), Parity::EvenOnly);
            (t, normal)
        }
        LadderChannel::Exact { kappa } => {
            let ops = ExactFormOps::new(&geom, kappa.clone());
            let b = f.normal_full();
            let lap = ops.laplacian(p, &f.tangential, &b)?;
            let t = lap.tangential.add(&f.tangential.scale_rat(&c));
            let nor = lap.normal.add(&b.scale_rat(&c));
            (
                t.shift_down(shift).map_err(cancellation)?,
                nor.shift_down(shift + 2).map_err(cancellation)?,
            )
        }
    };
    let out = WeightedForm {
        n: f.n,
        weight: w - 2,
        channel: f.channel.clone(),
        tangential,
        normal,
    };
    if special(f.n, w - 2) && !out.tangential.a(0).is_zero() {
        return Err(SolverError::Inconsistent(
            "F left a boundary value in a weight ≤ −n space".into(),
        ));
    }
    Ok(out)
}

/// `x^{-p-2} d*_g η`; the form lies in the divergence-free space iff this
/// vanishes below `order_bound`, i.e. `d*_g η = O(xⁿ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivergenceCertificate {
    pub residual: LogSeries,
    pub order_bound: i64,
}

impl DivergenceCertificate {
    pub fn holds(&self) -> bool {
        if self.order_bound <= 0 {
            return true;
        }
        let bound = self.order_bound as usize;
        bound <= self.residual.order() + 1
            && (0..bound).all(|j| self.residual.a(j).is_zero() && self.residual.b(j).is_zero())
    }
}

pub fn divergence_certificate(
    model: &EinsteinModel,
    f: &WeightedForm,
) -> Result<DivergenceCertificate, SolverError> {
    let order_bound = f.n as i64 + f.weight - 2;
    let residual = match &f.channel {
        // d*_g(ψα) = 0 for coclosed α.
        LadderChannel::Coclosed { .. } => LogSeries::zero(f.order(), Parity::EvenOnly),
        LadderChannel::Exact { kappa } => {
            let geom = geometry_for(model, f)?;
            let ops = ExactFormOps::new(&geom, kappa.clone());
            let div = ops.divergence(f.prefactor_power(), &f.tangential, &f.normal_full())?;
            div.shift_down(2).map_err(|e| {
                SolverError::Inconsistent(format!("divergence below x^(p+2): {e}"))
            })?
        }
    };
    Ok(DivergenceCertificate {
        residual,
        order_bound,
    })
}

/// The normal series `N` making an exact-channel form with tangential part
/// `t` divergence-free to `O(xⁿ)`; free coefficients are set to zero.
pub fn solve_normal(
    model: &EinsteinModel,
    weight: i64,
    kappa: &ParamPoly,
    t: &LogSeries,
) -> Result<LogSeries, SolverError> {
    let n = model.n;
    let mut normal = LogSeries::zero(t.order().saturating_sub(2), Parity::EvenOnly);
    let bound = n as i64 + weight - 2;
    let draft = |normal: &LogSeries| {
        WeightedForm::new(
            n,
            weight,
            LadderChannel::Exact {
                kappa: kappa.clone(),
            },
            t.clone(),
            normal.clone(),
        )
    };
    for j in (0..bound.max(0) as usize).step_by(2) {
        if j > normal.order() {
            return Err(SolverError::TruncationTooLow {
                order: t.order(),
                needed: j + 2,
            });
        }
        let cert = divergence_certificate(model, &draft(&normal)?)?;
        let g = cert.residual.a(j);
        if g.is_zero() {
            continue;
        }
        let diag = int(n as i64 - 2 + weight - j as i64);
        let fix = LogSeries::monomial(normal.order(), j, g.scale(&-diag.recip()));
        normal = normal.add(&fix);
    }
    let form = draft(&normal)?;
    if !divergence_certificate(model, &form)?.holds() {
        return Err(SolverError::Inconsistent("normal solve left a divergence".into()));
    }
    Ok(normal)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtensionKind {
    /// Constant tangential part.
    Minimal,
    /// The harmonic extension cut below its log term.
    HarmonicTruncation,
    /// The minimal extension plus `E` of a fixed weight −2 form.
    Perturbed,
}

/// A weight-0 divergence-free form restricting to `coeff` times the mode.
pub fn extend_to_adf(
    model: &EinsteinModel,
    channel: &LadderChannel,
    coeff: &Rat,
    kind: ExtensionKind,
    order: usize,
) -> Result<WeightedForm, SolverError> {
    let n = model.n;
    require_order(order, n)?;
    let geom = WarpedProduct::from_model(model, order)?;
    let constant = LogSeries::constant(order, ParamPoly::constant(coeff.clone()));
    let tangential = match kind {
        ExtensionKind::Minimal | ExtensionKind::Perturbed => constant,
        ExtensionKind::HarmonicTruncation => {
            let (op, cut) = match channel {
                LadderChannel::Coclosed { mu } => (coclosed_operator_on(&geom, mu)?, n - 2),
                LadderChannel::Exact { kappa } => (scalar_operator_on(&geom, kappa)?, n),
            };
            let zero = LogSeries::zero(order, Parity::EvenOnly);
            let sol = solve_frobenius(&op, &zero, &ParamPoly::constant(coeff.clone()))?;
            sol.series.cut_below(cut)
        }
    };
    let base = with_solved_normal(model, 0, channel, tangential)?;
    if kind != ExtensionKind::Perturbed {
        return Ok(base);
    }
    let xi_t = LogSeries::from_rats(order, &[int(1), int(0), int(3), int(0), int(-1)]);
    let xi = with_solved_normal(model, -2, channel, xi_t)?;
    base.add(&op_e(&xi))
}

fn with_solved_normal(
    model: &EinsteinModel,
    weight: i64,
    channel: &LadderChannel,
    tangential: LogSeries,
) -> Result<WeightedForm, SolverError> {
    let normal = match channel {
        LadderChannel::Coclosed { .. } => {
            LogSeries::zero(tangential.order().saturating_sub(2), Parity::EvenOnly)
        }
        LadderChannel::Exact { kappa } => solve_normal(model, weight, kappa, &tangential)?,
    };
    WeightedForm::new(model.n, weight, channel.clone(), tangential, normal)
}

/// `F^{n/2−1} η` for a weight-0 extension, checking the divergence
/// certificate at every step.
pub fn ladder_descent(model: &EinsteinModel, eta: &WeightedForm) -> Result<WeightedForm, SolverError> {
    let mut cur = eta.clone();
    for _ in 0..model.half_n() - 1 {
        if !divergence_certificate(model, &cur)?.holds() {
            return Err(SolverError::Inconsistent(format!(
                "weight {} form is not divergence-free",
                cur.weight
            )));
        }
        cur = op_f(model, &cur)?;
    }
    Ok(cur)
}

/// `L₁` on one mode from the restriction of `F^{n/2−1}η`. For `n = 4` this
/// is the single step whose restriction is the `(n−2)x^{n−2}L₁` error term.
pub fn ladder_l1_with(
    model: &EinsteinModel,
    channel: &LadderChannel,
    kind: ExtensionKind,
    order: usize,
) -> Result<ParamPoly, SolverError> {
    let order = order.max(model.n + 2);
    let eta = extend_to_adf(model, channel, &int(1), kind, order)?;
    let top = ladder_descent(model, &eta)?;
    Ok(top.restriction().scale(&ladder_constant(model.n).recip()))
}

pub fn ladder_l1(
    model: &EinsteinModel,
    channel: &LadderChannel,
    order: usize,
) -> Result<ParamPoly, SolverError> {
    ladder_l1_with(model, channel, ExtensionKind::Minimal, order)
}

/// Constants `c` of the factors `(μ − c)` in the closed-form Einstein `L₁`,
/// `c = 2m(m−n+3)λ` for `m = 0..n/2−2` (the `m = 0` factor is `d*d`).
pub fn product_shifts(n: usize, lambda: &Rat) -> Vec<Rat> {
    let n = n as i64;
    (0..=n / 2 - 2)
        .map(|m| int(2 * m * (m - n + 3)) * lambda)
        .collect()
}

/// The same constants indexed by the even exponents `0, 2, …, n−4` that the
/// iterated `F` steps visit on `y^w α`.
pub fn ladder_step_shifts(n: usize, lambda: &Rat) -> Vec<Rat> {
    let n = n as i64;
    (0..=n - 4)
        .step_by(2)
        .map(|w| int(2 * w * (w - n + 3)) * lambda)
        .collect()
}

/// `L₁` on a coclosed `μ`-eigenform of an Einstein manifold:
/// `prefactor · μ · ∏_{m=1}^{n/2−2} (μ − 2m(m−n+3)λ)`.
pub fn product_formula_l1(n: usize, lambda: &Rat, mu: &ParamPoly) -> ParamPoly {
    product_shifts(n, lambda)
        .iter()
        .fold(ParamPoly::constant(l1_product_prefactor(n)), |acc, c| {
            acc * (mu - &ParamPoly::constant(c.clone()))
        })
}
