//! The Q-curvature tractor, the canonical tractor of the Weyl structure,
//! their pairing and the global integral invariant.
//!
//! Components are stored in the trivialization of the reference metric,
//! tagged by the scale `t` of `ĥ = t²h` relative to the model's own `h`.
//! A density of weight `w` has value scaling `t^w` under such a change.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::constants::{integral_prefactor, tractor_prefactor};
use crate::ladder::product_shifts;
use crate::series::rat::{exact_sqrt, format_rat, pow};
use crate::series::{int, ParamPoly, Rat};
use crate::solver::{
    log_defining_function, smoothness_obstruction, Channel, ModeValue, SolverError,
};
use crate::spectral::{
    BoundaryWeyl, CoclosedEntry, CoclosedMode, EinsteinModel, Eigenvalue, ExactEntry,
    HarmonicEntry, ScalarMode,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Density {
    pub value: Rat,
    pub weight: i64,
}

impl Density {
    /// Value after `h ↦ t²h` predicted from the weight alone.
    pub fn predicted(&self, t: &Rat) -> Rat {
        &self.value * pow(t, self.weight)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CotractorTriple {
    /// `P·(Q_01 + G₁β)`: the constant-mode row is a function value, exact
    /// rows are coefficients of normalized eigenfunctions.
    pub bottom: Vec<ModeValue>,
    /// `P·L₁β`, as coefficients of normalized coclosed or harmonic forms.
    pub middle: Vec<ModeValue>,
    pub top: ParamPoly,
    pub weight: i64,
    pub reference_scale: Rat,
}

fn nonzero_rows(rows: &[ModeValue]) -> BTreeMap<(Channel, usize), &ParamPoly> {
    rows.iter()
        .filter(|r| !r.value.is_zero())
        .map(|r| ((r.channel, r.index), &r.value))
        .collect()
}

impl CotractorTriple {
    pub fn is_zero(&self) -> bool {
        self.top.is_zero()
            && self
                .bottom
                .iter()
                .chain(&self.middle)
                .all(|r| r.value.is_zero())
    }

    /// Equal as sections: rows with zero value are ignored.
    pub fn same_section(&self, other: &CotractorTriple) -> bool {
        self.weight == other.weight
            && self.reference_scale == other.reference_scale
            && self.top == other.top
            && nonzero_rows(&self.bottom) == nonzero_rows(&other.bottom)
            && nonzero_rows(&self.middle) == nonzero_rows(&other.middle)
    }

    pub fn constant_bottom(&self) -> ParamPoly {
        self.bottom
            .iter()
            .find(|r| r.channel == Channel::Constant)
            .map(|r| r.value.clone())
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TractorTriple {
    pub top: Rat,
    /// `−β♯` per entry of the Weyl structure.
    pub middle: Vec<ModeValue>,
    /// `½‖β‖²`, integrated.
    pub bottom: Rat,
    pub weight: i64,
    pub reference_scale: Rat,
}

/// `P·(Q_01 + G₁β, L₁β, 0)` with `P = (−1)^{n/2−1} 2^{n−2} ((n/2−1)!)²`.
pub fn build_q_tractor(
    model: &EinsteinModel,
    beta: &BoundaryWeyl,
    order: usize,
) -> Result<CotractorTriple, SolverError> {
    let pre = tractor_prefactor(model.n);
    let obs = smoothness_obstruction(model, beta, order)?;
    let scale = |rows: Vec<ModeValue>| -> Vec<ModeValue> {
        rows.into_iter()
            .map(|r| ModeValue {
                value: r.value.scale(&pre),
                ..r
            })
            .collect()
    };
    Ok(CotractorTriple {
        bottom: scale(obs.bottom),
        middle: scale(obs.l1_beta),
        top: ParamPoly::zero(),
        weight: -(model.n as i64) - 1,
        reference_scale: Rat::one(),
    })
}

/// `(1, −β♯, ½|β|²)`.
pub fn build_w_tractor(beta: &BoundaryWeyl) -> TractorTriple {
    let mut middle = Vec::new();
    for (i, e) in beta.exact_part.iter().enumerate() {
        middle.push(ModeValue {
            channel: Channel::Exact,
            index: i,
            eigenvalue: ParamPoly::constant(e.kappa.clone()),
            value: ParamPoly::constant(-&e.coeff),
        });
    }
    for (i, e) in beta.coclosed_part.iter().enumerate() {
        middle.push(ModeValue {
            channel: Channel::Coclosed,
            index: i,
            eigenvalue: e.mu.as_poly(),
            value: ParamPoly::constant(-&e.coeff),
        });
    }
    for (i, e) in beta.harmonic_part.iter().enumerate() {
        middle.push(ModeValue {
            channel: Channel::Harmonic,
            index: i,
            eigenvalue: ParamPoly::zero(),
            value: ParamPoly::constant(-&e.coeff),
        });
    }
    TractorTriple {
        top: Rat::one(),
        middle,
        bottom: beta.norm_sq() / int(2),
        weight: -1,
        reference_scale: Rat::one(),
    }
}

/// `vol_coeff · vol + constant`, with `vol` the model's unevaluated volume label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegratedValue {
    pub vol_coeff: Rat,
    pub vol_label: String,
    pub constant: Rat,
}

impl fmt::Display for IntegratedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.vol_coeff.is_zero(), self.constant.is_zero()) {
            (true, _) => write!(f, "{}", format_rat(&self.constant)),
            (false, true) => write!(f, "{}·{}", format_rat(&self.vol_coeff), self.vol_label),
            (false, false) => write!(
                f,
                "{}·{} + {}",
                format_rat(&self.vol_coeff),
                self.vol_label,
                format_rat(&self.constant)
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pairing {
    /// Per-row contributions to `⟨Q, W⟩` before integration.
    pub density: Vec<ModeValue>,
    pub integrated: IntegratedValue,
}

fn concrete(p: &ParamPoly) -> Result<Rat, SolverError> {
    p.as_constant().ok_or(SolverError::SymbolicMode)
}

/// `bottom·1 + ⟨middle, −β♯⟩ + top·½|β|²`, pointwise per row and integrated
/// against orthonormal modes. Mean-zero rows integrate to zero.
pub fn pairing_density(
    model: &EinsteinModel,
    q: &CotractorTriple,
    w: &TractorTriple,
) -> Result<Pairing, SolverError> {
    if q.reference_scale != w.reference_scale {
        return Err(SolverError::Inconsistent(format!(
            "tractors in different scales: {} vs {}",
            format_rat(&q.reference_scale),
            format_rat(&w.reference_scale)
        )));
    }
    let mut density = q.bottom.clone();
    let mut vol_coeff = Rat::zero();
    for r in &q.bottom {
        if r.channel == Channel::Constant {
            vol_coeff += concrete(&r.value)? * &model.volume.factor;
        }
    }
    let partner: BTreeMap<(Channel, usize), &ModeValue> =
        w.middle.iter().map(|r| ((r.channel, r.index), r)).collect();
    let mut constant = Rat::zero();
    for r in &q.middle {
        let Some(m) = partner.get(&(r.channel, r.index)) else {
            continue;
        };
        // ‖dφ_κ‖² = κ, ‖α‖² = 1
        let norm = match r.channel {
            Channel::Exact => r.eigenvalue.clone(),
            _ => ParamPoly::one(),
        };
        let value = &(&r.value * &m.value) * &norm;
        constant += concrete(&value)?;
        density.push(ModeValue {
            value,
            ..r.clone()
        });
    }
    constant += concrete(&q.top)? * &w.bottom;
    Ok(Pairing {
        density,
        integrated: IntegratedValue {
            vol_coeff,
            vol_label: model.volume.label.clone(),
            constant,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaugeNote {
    pub harmonic_entries: usize,
    pub harmonic_norm_sq: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantReport {
    pub q_h: Rat,
    /// `∫Q_h dV_h`.
    pub q_total: IntegratedValue,
    /// `(−1)^{n/2} 2^{n−2} ((n/2−1)!)² ∫⟨L₁β, β⟩`.
    pub second_term: Rat,
    pub invariant: IntegratedValue,
    pub second_term_breakdown: Vec<ModeValue>,
    pub q_tractor: CotractorTriple,
    pub pairing: IntegratedValue,
    pub smooth: bool,
    pub gauge_note: GaugeNote,
}

pub fn integral_invariant(
    model: &EinsteinModel,
    beta: &BoundaryWeyl,
    order: usize,
) -> Result<InvariantReport, SolverError> {
    if beta.has_symbolic() {
        return Err(SolverError::SymbolicMode);
    }
    let pre = integral_prefactor(model.n);
    let defining = log_defining_function(model, order)?;
    let q = build_q_tractor(model, beta, order)?;
    let obs = smoothness_obstruction(model, beta, order)?;
    let coeffs: BTreeMap<(Channel, usize), &Rat> = beta
        .coclosed_part
        .iter()
        .enumerate()
        .map(|(i, e)| ((Channel::Coclosed, i), &e.coeff))
        .chain(
            beta.harmonic_part
                .iter()
                .enumerate()
                .map(|(i, e)| ((Channel::Harmonic, i), &e.coeff)),
        )
        .collect();
    let mut breakdown = Vec::new();
    let mut second_term = Rat::zero();
    for r in &obs.l1_beta {
        // The row holds coeff·L₁(μ); ⟨L₁β, β⟩ on this mode is coeff²·L₁(μ).
        let c = coeffs[&(r.channel, r.index)];
        let v = concrete(&r.value)? * c * &pre;
        second_term += &v;
        breakdown.push(ModeValue {
            value: ParamPoly::constant(v),
            ..r.clone()
        });
    }
    let q_total = IntegratedValue {
        vol_coeff: &defining.q_h * &model.volume.factor,
        vol_label: model.volume.label.clone(),
        constant: Rat::zero(),
    };
    let invariant = IntegratedValue {
        constant: second_term.clone(),
        ..q_total.clone()
    };
    let pairing = pairing_density(model, &q, &build_w_tractor(beta))?.integrated;
    if pairing != invariant {
        return Err(SolverError::Inconsistent(format!(
            "pairing {pairing} differs from the integral invariant {invariant}"
        )));
    }
    Ok(InvariantReport {
        q_h: defining.q_h,
        q_total,
        second_term,
        invariant,
        second_term_breakdown: breakdown,
        smooth: obs.smooth,
        q_tractor: q,
        pairing,
        gauge_note: GaugeNote {
            harmonic_entries: beta.harmonic_part.len(),
            harmonic_norm_sq: beta.harmonic_part.iter().map(|e| &e.coeff * &e.coeff).sum(),
        },
    })
}

/// `e^Υ` for `ĥ = e^{2Υ}h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConformalFactor {
    Constant(Rat),
    NonConstant,
}

impl ConformalFactor {
    /// From the metric scale `e^{2Υ}`, which must be the square of a positive rational.
    pub fn from_metric_scale(scale: &Rat) -> Result<Self, SolverError> {
        if !scale.is_positive() {
            return Err(SolverError::Unsupported(format!(
                "metric scale {} is not positive",
                format_rat(scale)
            )));
        }
        exact_sqrt(scale).map(ConformalFactor::Constant).ok_or_else(|| {
            SolverError::Unsupported(format!(
                "metric scale {} is not a rational square",
                format_rat(scale)
            ))
        })
    }
}

/// The same manifold with reference metric `t²h`.
pub fn rescale_model(model: &EinsteinModel, t: &Rat) -> EinsteinModel {
    let inv2 = pow(t, -2);
    let mut out = model.clone();
    out.lambda = &model.lambda * &inv2;
    out.scalar_modes = model
        .scalar_modes
        .iter()
        .map(|m| ScalarMode::new(&m.kappa * &inv2, m.multiplicity))
        .collect();
    out.coclosed_modes = model
        .coclosed_modes
        .iter()
        .map(|m| CoclosedMode {
            mu: &m.mu * &inv2,
            multiplicity: m.multiplicity,
        })
        .collect();
    out.volume.factor = &model.volume.factor * pow(t, model.n as i64);
    out
}

/// The same 1-form `β` in modes normalized for `t²h`: functions pick up
/// `t^{n/2}`, 1-forms `t^{(n−2)/2}`.
pub fn rescale_beta(beta: &BoundaryWeyl, n: usize, t: &Rat) -> BoundaryWeyl {
    let inv2 = pow(t, -2);
    let fun = pow(t, n as i64 / 2);
    let form = pow(t, (n as i64 - 2) / 2);
    BoundaryWeyl {
        exact_part: beta
            .exact_part
            .iter()
            .map(|e| ExactEntry {
                kappa: &e.kappa * &inv2,
                coeff: &e.coeff * &fun,
            })
            .collect(),
        coclosed_part: beta
            .coclosed_part
            .iter()
            .map(|e| CoclosedEntry {
                mu: match &e.mu {
                    Eigenvalue::Value(v) => Eigenvalue::Value(v * &inv2),
                    Eigenvalue::Symbolic => Eigenvalue::Symbolic,
                },
                coeff: &e.coeff * &form,
            })
            .collect(),
        harmonic_part: beta
            .harmonic_part
            .iter()
            .map(|e| HarmonicEntry {
                coeff: &e.coeff * &form,
            })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalingCheck {
    pub name: String,
    pub lhs: Rat,
    pub rhs: Rat,
}

impl ScalingCheck {
    pub fn pass(&self) -> bool {
        self.lhs == self.rhs
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RescaleReport {
    pub factor: Rat,
    pub original: InvariantReport,
    pub rescaled: InvariantReport,
    pub checks: Vec<ScalingCheck>,
}

impl RescaleReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(ScalingCheck::pass)
    }
}

/// Recomputes everything for `ĥ = t²h` and compares with the scalings
/// predicted by the weights: `Q_h` and the bottom slot weight `−n`, the
/// middle slot weight `2−n` (as a 1-form), the integral weight 0.
pub fn rescale_constant(
    model: &EinsteinModel,
    beta: &BoundaryWeyl,
    factor: &ConformalFactor,
    order: usize,
) -> Result<RescaleReport, SolverError> {
    let t = match factor {
        ConformalFactor::Constant(t) if t.is_positive() => t.clone(),
        ConformalFactor::Constant(t) => {
            return Err(SolverError::Unsupported(format!(
                "conformal factor {} is not positive",
                format_rat(t)
            )))
        }
        ConformalFactor::NonConstant => {
            return Err(SolverError::Unsupported(
                "non-constant conformal factor on an Einstein-only backend".into(),
            ))
        }
    };
    let n = model.n as i64;
    let original = integral_invariant(model, beta, order)?;
    let hat_model = rescale_model(model, &t);
    let hat_beta = rescale_beta(beta, model.n, &t);
    let rescaled = integral_invariant(&hat_model, &hat_beta, order)?;

    let mut checks = Vec::new();
    let weigh = |name: String, value: &Rat, weight: i64, got: Rat, checks: &mut Vec<ScalingCheck>| {
        checks.push(ScalingCheck {
            name,
            lhs: got,
            rhs: Density {
                value: value.clone(),
                weight,
            }
            .predicted(&t),
        });
    };
    weigh("q_h".into(), &original.q_h, -n, rescaled.q_h.clone(), &mut checks);
    // Mode rows become functions / forms after multiplying by the
    // normalization of the rescaled modes.
    let fun_norm = pow(&t, -n / 2);
    let form_norm = pow(&t, -(n - 2) / 2);
    for (a, b) in original.q_tractor.bottom.iter().zip(&rescaled.q_tractor.bottom) {
        let norm = if a.channel == Channel::Constant {
            Rat::one()
        } else {
            fun_norm.clone()
        };
        weigh(
            format!("bottom {} {}", a.channel, a.index),
            &concrete(&a.value)?,
            -n,
            concrete(&b.value)? * norm,
            &mut checks,
        );
    }
    for (a, b) in original.q_tractor.middle.iter().zip(&rescaled.q_tractor.middle) {
        weigh(
            format!("middle {} {}", a.channel, a.index),
            &concrete(&a.value)?,
            2 - n,
            concrete(&b.value)? * &form_norm,
            &mut checks,
        );
    }
    checks.push(ScalingCheck {
        name: "integral vol coefficient".into(),
        lhs: rescaled.invariant.vol_coeff.clone(),
        rhs: original.invariant.vol_coeff.clone(),
    });
    checks.push(ScalingCheck {
        name: "integral second term".into(),
        lhs: rescaled.second_term.clone(),
        rhs: original.second_term.clone(),
    });
    Ok(RescaleReport {
        factor: t,
        original,
        rescaled,
        checks,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionalEntry {
    pub invariant: IntegratedValue,
    pub second_term: Rat,
    pub closed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionalReport {
    pub entries: Vec<FunctionalEntry>,
    /// Indices of the entries with the least invariant.
    pub minimizers: Vec<usize>,
    pub second_terms_nonnegative: bool,
    /// Second term vanishes exactly on the closed entries.
    pub zero_exactly_on_closed: bool,
    /// For `λ > 0`: every factor `μ − 2m(m−n+3)λ` over the model's nonzero
    /// coclosed spectrum is positive.
    pub factors_positive: Option<bool>,
}

pub fn functional_report(
    model: &EinsteinModel,
    betas: &[BoundaryWeyl],
    order: usize,
) -> Result<FunctionalReport, SolverError> {
    let mut entries = Vec::new();
    for beta in betas {
        let r = integral_invariant(model, beta, order)?;
        entries.push(FunctionalEntry {
            invariant: r.invariant,
            second_term: r.second_term,
            closed: beta.is_closed(),
        });
    }
    // All entries share the volume term, so the constants decide.
    let least = entries.iter().map(|e| e.second_term.clone()).min();
    let minimizers = entries
        .iter()
        .enumerate()
        .filter(|(_, e)| Some(&e.second_term) == least.as_ref())
        .map(|(i, _)| i)
        .collect();
    let second_terms_nonnegative = entries.iter().all(|e| !e.second_term.is_negative());
    let zero_exactly_on_closed = entries
        .iter()
        .all(|e| e.second_term.is_zero() == e.closed);
    let factors_positive = model.lambda.is_positive().then(|| {
        let shifts = product_shifts(model.n, &model.lambda);
        model
            .coclosed_modes
            .iter()
            .filter(|m| m.mu.is_positive())
            .all(|m| shifts.iter().all(|c| (&m.mu - c).is_positive()))
    });
    Ok(FunctionalReport {
        entries,
        minimizers,
        second_terms_nonnegative,
        zero_exactly_on_closed,
        factors_positive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat;
    use crate::spectral::{make_flat_torus, make_round_sphere};

    fn coclosed(mu: i64, c: i64) -> BoundaryWeyl {
        BoundaryWeyl::coclosed(Eigenvalue::Value(int(mu)), int(c))
    }

    #[test]
    fn q_tractor_examples() {
        let t = make_flat_torus(4, 1).unwrap();
        assert!(build_q_tractor(&t, &BoundaryWeyl::harmonic(int(1)), 6).unwrap().is_zero());
        let q = build_q_tractor(&t, &BoundaryWeyl::exact(int(1), int(1)), 6).unwrap();
        assert_eq!(q.bottom[1].value, ParamPoly::constant(int(1)));
        assert!(q.middle.is_empty());
        let s4 = make_round_sphere(4, 1).unwrap();
        let q = build_q_tractor(&s4, &BoundaryWeyl::zero(), 6).unwrap();
        assert_eq!(q.constant_bottom(), ParamPoly::constant(int(6)));
    }

    #[test]
    fn w_tractor_examples() {
        let w = build_w_tractor(&BoundaryWeyl::zero());
        assert_eq!((w.top.clone(), w.middle.len(), w.bottom.clone()), (int(1), 0, int(0)));
        let w = build_w_tractor(&coclosed(1, 3));
        assert_eq!(w.middle[0].value, ParamPoly::constant(int(-3)));
        assert_eq!(w.bottom, rat(9, 2));
    }

    #[test]
    fn torus_invariant_and_pairing() {
        let t = make_flat_torus(4, 1).unwrap();
        let r = integral_invariant(&t, &coclosed(1, 1), 6).unwrap();
        assert_eq!(r.second_term, int(2));
        assert_eq!(r.invariant.constant, int(2));
        assert_eq!(r.pairing, r.invariant);
        let r = integral_invariant(&t, &BoundaryWeyl::exact(int(1), int(1)), 6).unwrap();
        assert_eq!(r.invariant.constant, int(0));
        assert!(!r.smooth);
    }

    #[test]
    fn sphere_invariant() {
        let s4 = make_round_sphere(4, 1).unwrap();
        let r = integral_invariant(&s4, &BoundaryWeyl::zero(), 6).unwrap();
        assert_eq!(r.invariant.vol_coeff, int(6));
        assert_eq!(r.invariant.to_string(), "6·vol(S^4)");
    }

    #[test]
    fn rescale_flat_torus() {
        let t = make_flat_torus(4, 1).unwrap();
        let f = ConformalFactor::from_metric_scale(&int(4)).unwrap();
        let r = rescale_constant(&t, &coclosed(1, 1), &f, 6).unwrap();
        assert!(r.all_pass(), "{:?}", r.checks);
        // μ̂ = 1/4, L̂₁ = 1/8 on the rescaled normalized mode.
        let hat = rescale_model(&t, &int(2));
        let l1 = crate::solver::harmonic_extension_coclosed(
            &hat,
            &ParamPoly::constant(rat(1, 4)),
            &int(1),
            6,
        )
        .unwrap()
        .l1;
        assert_eq!(l1, ParamPoly::constant(rat(1, 8)));
    }

    #[test]
    fn rescale_rejects_bad_factors() {
        let t = make_flat_torus(4, 0).unwrap();
        assert!(ConformalFactor::from_metric_scale(&int(2)).is_err());
        assert!(rescale_constant(&t, &BoundaryWeyl::zero(), &ConformalFactor::NonConstant, 6).is_err());
        let id = ConformalFactor::from_metric_scale(&int(1)).unwrap();
        let r = rescale_constant(&t, &BoundaryWeyl::zero(), &id, 6).unwrap();
        assert_eq!(r.original, r.rescaled);
    }

    #[test]
    fn functional_examples() {
        let t = make_flat_torus(4, 1).unwrap();
        let betas = [BoundaryWeyl::zero(), coclosed(1, 1), BoundaryWeyl::exact(int(1), int(1))];
        let r = functional_report(&t, &betas, 6).unwrap();
        assert_eq!(r.minimizers, vec![0, 2]);
        assert!(r.second_terms_nonnegative && r.zero_exactly_on_closed);
        assert_eq!(r.factors_positive, None);
        assert!(functional_report(&t, &[], 6).unwrap().entries.is_empty());
    }
}
