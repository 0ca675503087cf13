//! Problem description read from JSON, and its validation into a runnable problem.

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use weyl_q::series::rat::exact_sqrt;
use weyl_q::series::{format_rat, parse_rat, Rat};
use weyl_q::spectral::{
    make_flat_torus, make_round_sphere, validate, BoundaryWeyl, CoclosedMode, EinsteinModel,
    Eigenvalue, ScalarMode, Volume,
};

/// A rational given either as a JSON string (`"p/q"`) or as a JSON integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RatInput {
    Int(i64),
    Str(String),
}

impl RatInput {
    pub fn parse(&self, what: &str) -> Result<Rat, ConfigError> {
        match self {
            RatInput::Int(v) => Ok(Rat::from_integer((*v).into())),
            RatInput::Str(s) => parse_rat(s).map_err(|_| ConfigError(format!("{what}: {s:?} is not a rational"))),
        }
    }
}

impl From<&Rat> for RatInput {
    fn from(r: &Rat) -> Self {
        RatInput::Str(format_rat(r))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendName {
    Torus,
    Sphere,
    Custom,
}

impl BackendName {
    pub fn name(self) -> &'static str {
        match self {
            BackendName::Torus => "torus",
            BackendName::Sphere => "sphere",
            BackendName::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    QCurvature,
    L1Spectrum,
    LadderCheck,
    Invariant,
    Smoothness,
    Functional,
    RescaleCheck,
}

impl Task {
    pub fn allows_symbolic(self) -> bool {
        matches!(self, Task::L1Spectrum | Task::LadderCheck)
    }

    pub fn name(self) -> &'static str {
        match self {
            Task::QCurvature => "q_curvature",
            Task::L1Spectrum => "l1_spectrum",
            Task::LadderCheck => "ladder_check",
            Task::Invariant => "invariant",
            Task::Smoothness => "smoothness",
            Task::Functional => "functional",
            Task::RescaleCheck => "rescale_check",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactInput {
    pub kappa: RatInput,
    pub coeff: RatInput,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoclosedInput {
    /// A rational eigenvalue or the string `"symbolic"`.
    pub mu: RatInput,
    pub coeff: RatInput,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicInput {
    pub coeff: RatInput,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BetaConfig {
    #[serde(default)]
    pub exact: Vec<ExactInput>,
    #[serde(default)]
    pub coclosed: Vec<CoclosedInput>,
    #[serde(default)]
    pub harmonic: Vec<HarmonicInput>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarModeInput {
    pub kappa: RatInput,
    pub multiplicity: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoclosedModeInput {
    pub mu: RatInput,
    pub multiplicity: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VolumeInput {
    pub label: String,
    #[serde(default = "unit")]
    pub factor: RatInput,
}

fn unit() -> RatInput {
    RatInput::Int(1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub n: usize,
    pub backend: BackendName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<RatInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation_order: Option<usize>,
    /// Torus only: largest `|k|²` kept. Default 2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_norm_sq: Option<u64>,
    /// Sphere only: largest harmonic degree kept. Default 2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume: Option<VolumeInput>,
    /// Custom only. Defaults to the constant mode alone.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scalar_modes: Option<Vec<ScalarModeInput>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coclosed_modes: Option<Vec<CoclosedModeInput>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub harmonic_rank: Option<u64>,
    #[serde(default)]
    pub beta: BetaConfig,
    #[serde(default)]
    pub tasks: Vec<Task>,
    /// Metric scale factors `c` for `ĥ = c·h`; each must be a rational square.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rescale_factors: Option<Vec<RatInput>>,
    /// Extra structures compared by the functional task, alongside `beta`
    /// and its closed part.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub functional_family: Vec<BetaConfig>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid config: {0}")]
pub struct ConfigError(pub String);

/// A validated problem ready to run.
#[derive(Debug, Clone)]
pub struct Problem {
    pub config: ProblemConfig,
    pub model: EinsteinModel,
    pub beta: BoundaryWeyl,
    pub order: usize,
    pub tasks: Vec<Task>,
    pub rescale_factors: Vec<Rat>,
    pub functional_family: Vec<BoundaryWeyl>,
}

impl ProblemConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError(e.to_string()))
    }

    /// Checks every invariant and builds the model. `truncation` overrides
    /// the configured truncation order.
    pub fn validate(&self, truncation: Option<usize>) -> Result<Problem, ConfigError> {
        let bad = |msg: String| Err(ConfigError(msg));
        let n = self.n;
        if n < 4 || n % 2 == 1 {
            return bad(format!("n = {n} must be even and at least 4"));
        }
        let only = |present: bool, field: &str, backend: BackendName| {
            if present && self.backend != backend {
                Err(ConfigError(format!("{field} is only allowed with backend {}", backend.name())))
            } else {
                Ok(())
            }
        };
        only(self.lambda.is_some(), "lambda", BackendName::Custom)?;
        only(self.scalar_modes.is_some(), "scalar_modes", BackendName::Custom)?;
        only(self.coclosed_modes.is_some(), "coclosed_modes", BackendName::Custom)?;
        only(self.harmonic_rank.is_some(), "harmonic_rank", BackendName::Custom)?;
        only(self.volume.is_some(), "volume", BackendName::Custom)?;
        only(self.max_norm_sq.is_some(), "max_norm_sq", BackendName::Torus)?;
        only(self.max_degree.is_some(), "max_degree", BackendName::Sphere)?;

        let model = match self.backend {
            BackendName::Torus => make_flat_torus(n, self.max_norm_sq.unwrap_or(2)),
            BackendName::Sphere => make_round_sphere(n, self.max_degree.unwrap_or(2)),
            BackendName::Custom => self.custom_model().map(Ok)?,
        }
        .map_err(|e| ConfigError(e.to_string()))?;
        let violations = validate(&model);
        if !violations.is_empty() {
            let names: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            return bad(format!("model violates: {}", names.join(", ")));
        }

        let order = truncation.or(self.truncation_order).unwrap_or(n + 2);
        if order < n {
            return bad(format!("truncation order {order} is below n = {n}"));
        }

        let beta = beta_from(&self.beta)?;
        beta.check_against(&model).map_err(|e| ConfigError(e.to_string()))?;
        if beta.has_symbolic() {
            if let Some(t) = self.tasks.iter().find(|t| !t.allows_symbolic()) {
                return bad(format!(
                    "symbolic mu is only allowed with tasks l1_spectrum and ladder_check, not {}",
                    t.name()
                ));
            }
        }

        let mut tasks = self.tasks.clone();
        tasks.sort();
        tasks.dedup();

        let rescale_factors = match &self.rescale_factors {
            Some(v) => v.iter().map(|r| r.parse("rescale factor")).collect::<Result<_, _>>()?,
            None => vec![Rat::from_integer(4.into()), Rat::new(1.into(), 9.into())],
        };
        if let Some(c) = rescale_factors.iter().find(|c| !c.is_positive()) {
            return bad(format!("rescale factor {} must be positive", format_rat(c)));
        }
        if let Some(c) = rescale_factors.iter().find(|c| exact_sqrt(c).is_none()) {
            return bad(format!("rescale factor {} is not the square of a rational", format_rat(c)));
        }

        let functional_family = self
            .functional_family
            .iter()
            .map(|b| {
                let beta = beta_from(b)?;
                if beta.has_symbolic() {
                    return Err(ConfigError("functional_family entries need concrete mu".into()));
                }
                beta.check_against(&model).map_err(|e| ConfigError(e.to_string()))?;
                Ok(beta)
            })
            .collect::<Result<_, _>>()?;

        Ok(Problem {
            config: self.clone(),
            model,
            beta,
            order,
            tasks,
            rescale_factors,
            functional_family,
        })
    }

    fn custom_model(&self) -> Result<EinsteinModel, ConfigError> {
        let lambda = self
            .lambda
            .as_ref()
            .ok_or_else(|| ConfigError("backend custom needs lambda".into()))?
            .parse("lambda")?;
        let volume = match &self.volume {
            Some(v) => Volume {
                label: v.label.clone(),
                factor: v.factor.parse("volume factor")?,
            },
            None => Volume::symbolic("vol(M)"),
        };
        let scalar_modes = match &self.scalar_modes {
            Some(v) => v
                .iter()
                .map(|m| Ok(ScalarMode::new(m.kappa.parse("kappa")?, m.multiplicity)))
                .collect::<Result<_, ConfigError>>()?,
            None => vec![ScalarMode::new(Rat::from_integer(0.into()), 1)],
        };
        let coclosed_modes = match &self.coclosed_modes {
            Some(v) => v
                .iter()
                .map(|m| {
                    Ok(CoclosedMode {
                        mu: m.mu.parse("mu")?,
                        multiplicity: m.multiplicity,
                    })
                })
                .collect::<Result<_, ConfigError>>()?,
            None => Vec::new(),
        };
        Ok(EinsteinModel::custom(
            self.n,
            lambda,
            volume,
            scalar_modes,
            coclosed_modes,
            self.harmonic_rank.unwrap_or(0),
        ))
    }
}

fn beta_from(b: &BetaConfig) -> Result<BoundaryWeyl, ConfigError> {
    let mut beta = BoundaryWeyl::zero();
    for e in &b.exact {
        beta = beta.plus(BoundaryWeyl::exact(e.kappa.parse("kappa")?, e.coeff.parse("coeff")?));
    }
    for e in &b.coclosed {
        let mu = match &e.mu {
            RatInput::Str(s) if s == "symbolic" => Eigenvalue::Symbolic,
            other => Eigenvalue::Value(other.parse("mu")?),
        };
        beta = beta.plus(BoundaryWeyl::coclosed(mu, e.coeff.parse("coeff")?));
    }
    for e in &b.harmonic {
        beta = beta.plus(BoundaryWeyl::harmonic(e.coeff.parse("coeff")?));
    }
    Ok(beta)
}
