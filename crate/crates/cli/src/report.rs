//! Machine-readable report. Every rational is a canonical `"p/q"` string and
//! every polynomial in μ an ascending coefficient array of such strings.

use serde::{Deserialize, Serialize};
use weyl_q::series::{format_rat, ParamPoly, Rat};
use weyl_q::solver::ModeValue;
use weyl_q::spectral::EinsteinModel;
use weyl_q::tractor::{IntegratedValue, ScalingCheck};

use crate::config::ProblemConfig;

/// Coefficients of a polynomial in μ, lowest degree first. Zero is `["0"]`.
pub type Poly = Vec<String>;

pub fn rat_str(r: &Rat) -> String {
    format_rat(r)
}

pub fn poly(p: &ParamPoly) -> Poly {
    if p.is_zero() {
        vec!["0".to_string()]
    } else {
        p.to_strings()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub seed: u64,
    pub config: ProblemConfig,
    pub model: ModelSummary,
    pub results: Results,
    pub consistency_checks: Vec<Check>,
}

impl Report {
    pub fn all_checks_pass(&self) -> bool {
        self.consistency_checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub lhs: String,
    pub rhs: String,
}

impl Check {
    pub fn equal(name: impl Into<String>, lhs: impl ToString, rhs: impl ToString) -> Self {
        let (lhs, rhs) = (lhs.to_string(), rhs.to_string());
        Self {
            name: name.into(),
            pass: lhs == rhs,
            lhs,
            rhs,
        }
    }

    pub fn holds(name: impl Into<String>, pass: bool, lhs: impl ToString, rhs: impl ToString) -> Self {
        Self {
            name: name.into(),
            pass,
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
        }
    }
}

impl From<&ScalingCheck> for Check {
    fn from(c: &ScalingCheck) -> Self {
        Check::holds(c.name.clone(), c.pass(), rat_str(&c.lhs), rat_str(&c.rhs))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeCount {
    pub eigenvalue: String,
    pub multiplicity: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub n: usize,
    pub backend: String,
    pub lambda: String,
    pub volume: String,
    pub truncation_order: usize,
    /// Results on coclosed sphere modes rely on the shipped eigenvalue table.
    pub table_dependent: bool,
    pub harmonic_rank: u64,
    pub scalar_modes: Vec<ModeCount>,
    pub coclosed_modes: Vec<ModeCount>,
}

impl ModelSummary {
    pub fn new(model: &EinsteinModel, order: usize) -> Self {
        Self {
            n: model.n,
            backend: model.backend.to_string(),
            lambda: rat_str(&model.lambda),
            volume: model.volume.to_string(),
            truncation_order: order,
            table_dependent: model.table_dependent,
            harmonic_rank: model.harmonic_rank,
            scalar_modes: model
                .scalar_modes
                .iter()
                .map(|m| ModeCount {
                    eigenvalue: rat_str(&m.kappa),
                    multiplicity: m.multiplicity,
                })
                .collect(),
            coclosed_modes: model
                .coclosed_modes
                .iter()
                .map(|m| ModeCount {
                    eigenvalue: rat_str(&m.mu),
                    multiplicity: m.multiplicity,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Results {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_curvature: Option<QCurvature>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l1_spectrum: Option<L1Spectrum>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ladder_check: Option<LadderCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invariant: Option<Invariant>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothness: Option<Smoothness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functional: Option<Functional>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rescale_check: Option<RescaleCheck>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QCurvature {
    /// Even coefficients `r_2, r_4, …` of the defining-function correction below `x^n`.
    pub r: Vec<String>,
    pub s: String,
    pub c_n: String,
    pub q_h: String,
    pub q01: String,
    pub q_total: Integrated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Integrated {
    pub vol_coeff: String,
    pub vol_label: String,
    pub constant: String,
    pub text: String,
}

impl From<&IntegratedValue> for Integrated {
    fn from(v: &IntegratedValue) -> Self {
        Self {
            vol_coeff: rat_str(&v.vol_coeff),
            vol_label: v.vol_label.clone(),
            constant: rat_str(&v.constant),
            text: v.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeRow {
    pub channel: String,
    pub index: usize,
    pub eigenvalue: Poly,
    pub value: Poly,
}

impl From<&ModeValue> for ModeRow {
    fn from(m: &ModeValue) -> Self {
        Self {
            channel: m.channel.to_string(),
            index: m.index,
            eigenvalue: poly(&m.eigenvalue),
            value: poly(&m.value),
        }
    }
}

pub fn rows(values: &[ModeValue]) -> Vec<ModeRow> {
    values.iter().map(ModeRow::from).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct L1Mode {
    /// Position in `beta.coclosed`, or in the model's coclosed table when
    /// `beta` has no coclosed part.
    pub index: usize,
    pub mu: Poly,
    pub l1_frobenius: Poly,
    pub l1_ladder: Poly,
    pub l1_product: Poly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct L1Spectrum {
    pub source: String,
    pub table_dependent: bool,
    pub modes: Vec<L1Mode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LadderMode {
    pub index: usize,
    pub mu: Poly,
    pub l1_ladder: Poly,
    pub l1_product: Poly,
    pub extension_independent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LadderCheck {
    pub modes: Vec<LadderMode>,
    pub product_shifts: Vec<String>,
    pub ladder_step_shifts: Vec<String>,
    pub shifts_match: bool,
    pub sl2_forms_checked: usize,
    pub sl2_relations_hold: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QTractor {
    pub bottom: Vec<ModeRow>,
    pub middle: Vec<ModeRow>,
    pub top: Poly,
    pub weight: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Invariant {
    pub q_h: String,
    pub q_total: Integrated,
    pub second_term: String,
    pub invariant: Integrated,
    pub second_term_breakdown: Vec<ModeRow>,
    pub q_tractor: QTractor,
    pub pairing: Integrated,
    pub smooth: bool,
    pub harmonic_entries: usize,
    pub harmonic_norm_sq: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Smoothness {
    pub smooth: bool,
    pub q_tractor_zero: bool,
    pub l1_beta: Vec<ModeRow>,
    pub bottom: Vec<ModeRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionalEntry {
    pub label: String,
    pub invariant: Integrated,
    pub second_term: String,
    pub closed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Functional {
    pub entries: Vec<FunctionalEntry>,
    pub minimizers: Vec<usize>,
    pub second_terms_nonnegative: bool,
    pub zero_exactly_on_closed: bool,
    /// Present only when λ > 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors_positive: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RescaleEntry {
    pub metric_scale: String,
    pub conformal_factor: String,
    pub original_invariant: Integrated,
    pub rescaled_invariant: Integrated,
    pub checks: Vec<Check>,
    pub all_pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RescaleCheck {
    pub entries: Vec<RescaleEntry>,
}
