//! Spectral description of an Einstein conformal infinity and of a Weyl
//! structure `∇ = ∇ʰ + β` in Hodge-decomposed mode coordinates.
//!
//! Every mode is an L²-orthonormal eigenfunction (or eigenform) of the
//! reference metric `h`, so integrals of mode products are finite exact
//! sums. The volume of `(M, h)` is carried as a symbolic token.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::series::{format_rat, int, rat, ParamPoly, Rat};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpectralError {
    #[error("boundary dimension must be even and at least 4, got {0}")]
    InvalidDimension(usize),
    #[error("no scalar mode with eigenvalue {0} in the model")]
    UnknownScalarMode(String),
    #[error("no coclosed mode with eigenvalue {0} in the model")]
    UnknownCoclosedMode(String),
    #[error("exact part references the constant mode (d of a constant is zero)")]
    ConstantModeInExact,
    #[error("coclosed entry with μ = 0; put harmonic 1-forms in the harmonic part")]
    ZeroCoclosedEigenvalue,
    #[error("{count} entries reference eigenvalue {eigenvalue}, whose multiplicity is {multiplicity}")]
    MultiplicityExceeded {
        eigenvalue: String,
        count: u64,
        multiplicity: u64,
    },
    #[error("{count} harmonic entries exceed the harmonic rank {rank}")]
    HarmonicRankExceeded { count: u64, rank: u64 },
    #[error("Weyl structure has a symbolic eigenvalue where a concrete mode is required")]
    SymbolicMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Torus,
    Sphere,
    Custom,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Torus => "torus",
            Backend::Sphere => "sphere",
            Backend::Custom => "custom",
        })
    }
}

/// `factor · label`, where `label` names an unevaluated volume such as `vol(S^4)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Volume {
    pub label: String,
    pub factor: Rat,
}

impl Volume {
    pub fn symbolic(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            factor: Rat::one(),
        }
    }
}

impl fmt::Display for Volume {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factor.is_one() {
            write!(f, "{}", self.label)
        } else {
            write!(f, "{}·{}", format_rat(&self.factor), self.label)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarMode {
    pub kappa: Rat,
    pub multiplicity: u64,
    pub mean_zero: bool,
}

impl ScalarMode {
    pub fn new(kappa: Rat, multiplicity: u64) -> Self {
        let mean_zero = !kappa.is_zero();
        Self {
            kappa,
            multiplicity,
            mean_zero,
        }
    }
}

/// Eigenspace of the Hodge Laplacian on coclosed 1-forms; `mu = 0` is harmonic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoclosedMode {
    pub mu: Rat,
    pub multiplicity: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EinsteinModel {
    pub n: usize,
    /// Schouten eigenvalue: `P_h = λh`, `Ric_h = 2λ(n−1)h`.
    pub lambda: Rat,
    pub volume: Volume,
    pub scalar_modes: Vec<ScalarMode>,
    pub coclosed_modes: Vec<CoclosedMode>,
    /// `dim H¹(M)`.
    pub harmonic_rank: u64,
    pub backend: Backend,
    /// Set when the coclosed spectrum comes from the sphere literature table.
    pub table_dependent: bool,
}

/// A broken [`EinsteinModel`] invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    InvalidDimension,
    BochnerViolation,
    MissingConstantMode,
    DuplicateConstantMode,
    NegativeEigenvalue,
    MeanZeroMismatch,
    ZeroMultiplicity,
    HarmonicModesExceedRank,
}

impl Violation {
    pub fn name(&self) -> &'static str {
        match self {
            Violation::InvalidDimension => "invalid-dimension",
            Violation::BochnerViolation => "bochner-violation",
            Violation::MissingConstantMode => "missing-constant-mode",
            Violation::DuplicateConstantMode => "duplicate-constant-mode",
            Violation::NegativeEigenvalue => "negative-eigenvalue",
            Violation::MeanZeroMismatch => "mean-zero-mismatch",
            Violation::ZeroMultiplicity => "zero-multiplicity",
            Violation::HarmonicModesExceedRank => "harmonic-modes-exceed-rank",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn check_dimension(n: usize) -> Result<(), SpectralError> {
    if n < 4 || n % 2 == 1 {
        Err(SpectralError::InvalidDimension(n))
    } else {
        Ok(())
    }
}

/// Number of `k ∈ ℤⁿ` with `|k|² = m`, for every `m ≤ max_norm_sq`.
pub fn lattice_shell_counts(n: usize, max_norm_sq: u64) -> Vec<u64> {
    let max = max_norm_sq as usize;
    let mut one_dim = vec![0u64; max + 1];
    for j in 0u64.. {
        let sq = (j * j) as usize;
        if sq > max {
            break;
        }
        one_dim[sq] += if j == 0 { 1 } else { 2 };
    }
    let mut counts = vec![0u64; max + 1];
    counts[0] = 1;
    for _ in 0..n {
        let mut next = vec![0u64; max + 1];
        for (m, &c) in counts.iter().enumerate().filter(|(_, &c)| c > 0) {
            for (s, &d) in one_dim.iter().enumerate() {
                if m + s <= max {
                    next[m + s] += c * d;
                }
            }
        }
        counts = next;
    }
    counts
}

/// Flat torus `ℝⁿ/(2πℤ)ⁿ`: `λ = 0`, eigenvalues `|k|²`, `H¹` of rank `n`.
pub fn make_flat_torus(n: usize, max_norm_sq: u64) -> Result<EinsteinModel, SpectralError> {
    check_dimension(n)?;
    let counts = lattice_shell_counts(n, max_norm_sq);
    let scalar_modes = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(m, &c)| ScalarMode::new(int(m as i64), c))
        .collect();
    // e^{ik·x} v with v ⊥ k: n − 1 coclosed directions per nonzero lattice vector.
    let mut coclosed_modes = vec![CoclosedMode {
        mu: Rat::zero(),
        multiplicity: n as u64,
    }];
    coclosed_modes.extend(counts.iter().enumerate().skip(1).filter(|(_, &c)| c > 0).map(
        |(m, &c)| CoclosedMode {
            mu: int(m as i64),
            multiplicity: (n as u64 - 1) * c,
        },
    ));
    Ok(EinsteinModel {
        n,
        lambda: Rat::zero(),
        volume: Volume::symbolic(format!("vol(T^{n})")),
        scalar_modes,
        coclosed_modes,
        harmonic_rank: n as u64,
        backend: Backend::Torus,
        table_dependent: false,
    })
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Dimension of degree-`k` spherical harmonics on `Sⁿ`.
pub fn spherical_harmonic_dim(n: usize, k: u64) -> u64 {
    let n = n as u64;
    binomial(n + k, n) - if k >= 2 { binomial(n + k - 2, n) } else { 0 }
}

/// Dimension of the irreducible `so(2r+1)` module with highest weight
/// `weight` (padded with zeros), by the Weyl dimension formula.
pub fn so_odd_irrep_dim(r: usize, weight: &[u64]) -> Rat {
    let half = rat(1, 2);
    let lam = |i: usize| int(weight.get(i).copied().unwrap_or(0) as i64);
    let rho = |i: usize| int((r - i) as i64) - &half;
    let mut num = Rat::one();
    let mut den = Rat::one();
    for i in 0..r {
        let li = lam(i) + rho(i);
        num *= &li;
        den *= rho(i);
        for j in i + 1..r {
            let lj = lam(j) + rho(j);
            num *= (&li - &lj) * (&li + &lj);
            den *= (rho(i) - rho(j)) * (rho(i) + rho(j));
        }
    }
    num / den
}

/// Coexact 1-form spectrum of the unit round `Sⁿ`: eigenvalue
/// `(k+1)(k+n−2)` for `k ≥ 1` on the `so(n+1)` module of highest weight
/// `(k, 1, 0, …)`. Literature-sourced; results built on it are marked
/// table-dependent.
pub mod sphere_coexact_table {
    use super::*;

    pub fn eigenvalue(n: usize, k: u64) -> Rat {
        int(((k + 1) * (k + n as u64 - 2)) as i64)
    }

    pub fn multiplicity(n: usize, k: u64) -> u64 {
        let dim = so_odd_irrep_dim(n / 2, &[k, 1]);
        debug_assert!(dim.is_integer());
        dim.to_integer().try_into().expect("multiplicity fits in u64")
    }
}

/// Unit round sphere `Sⁿ`: `Ric = (n−1)h`, so `λ = 1/2`.
pub fn make_round_sphere(n: usize, max_degree: u64) -> Result<EinsteinModel, SpectralError> {
    check_dimension(n)?;
    let scalar_modes = (0..=max_degree)
        .map(|k| {
            ScalarMode::new(
                int((k * (k + n as u64 - 1)) as i64),
                spherical_harmonic_dim(n, k),
            )
        })
        .collect();
    let coclosed_modes = (1..=max_degree.max(1))
        .map(|k| CoclosedMode {
            mu: sphere_coexact_table::eigenvalue(n, k),
            multiplicity: sphere_coexact_table::multiplicity(n, k),
        })
        .collect();
    Ok(EinsteinModel {
        n,
        lambda: rat(1, 2),
        volume: Volume::symbolic(format!("vol(S^{n})")),
        scalar_modes,
        coclosed_modes,
        harmonic_rank: 0,
        backend: Backend::Sphere,
        table_dependent: true,
    })
}

impl EinsteinModel {
    /// A user-supplied model; call [`validate`] before use.
    pub fn custom(
        n: usize,
        lambda: Rat,
        volume: Volume,
        scalar_modes: Vec<ScalarMode>,
        coclosed_modes: Vec<CoclosedMode>,
        harmonic_rank: u64,
    ) -> Self {
        Self {
            n,
            lambda,
            volume,
            scalar_modes,
            coclosed_modes,
            harmonic_rank,
            backend: Backend::Custom,
            table_dependent: false,
        }
    }

    pub fn half_n(&self) -> usize {
        self.n / 2
    }

    pub fn scalar_mode(&self, kappa: &Rat) -> Option<&ScalarMode> {
        self.scalar_modes.iter().find(|m| &m.kappa == kappa)
    }

    pub fn coclosed_mode(&self, mu: &Rat) -> Option<&CoclosedMode> {
        self.coclosed_modes.iter().find(|m| &m.mu == mu)
    }
}

/// All violated [`EinsteinModel`] invariants; empty iff the model is valid.
pub fn validate(model: &EinsteinModel) -> Vec<Violation> {
    let mut out = Vec::new();
    if model.n < 4 || model.n % 2 == 1 {
        out.push(Violation::InvalidDimension);
    }
    if model.lambda.is_positive() && model.harmonic_rank > 0 {
        out.push(Violation::BochnerViolation);
    }
    match model.scalar_modes.iter().filter(|m| m.kappa.is_zero()).count() {
        0 => out.push(Violation::MissingConstantMode),
        1 => {}
        _ => out.push(Violation::DuplicateConstantMode),
    }
    let negative = model.scalar_modes.iter().any(|m| m.kappa.is_negative())
        || model.coclosed_modes.iter().any(|m| m.mu.is_negative());
    if negative {
        out.push(Violation::NegativeEigenvalue);
    }
    if model
        .scalar_modes
        .iter()
        .any(|m| m.mean_zero == m.kappa.is_zero())
    {
        out.push(Violation::MeanZeroMismatch);
    }
    let zero_mult = model.scalar_modes.iter().any(|m| m.multiplicity == 0)
        || model.coclosed_modes.iter().any(|m| m.multiplicity == 0);
    if zero_mult {
        out.push(Violation::ZeroMultiplicity);
    }
    let harmonic: u64 = model
        .coclosed_modes
        .iter()
        .filter(|m| m.mu.is_zero())
        .map(|m| m.multiplicity)
        .sum();
    if harmonic > model.harmonic_rank {
        out.push(Violation::HarmonicModesExceedRank);
    }
    out
}

/// Eigenvalue slot of a coclosed entry: concrete, or the formal parameter μ.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Eigenvalue {
    Value(Rat),
    Symbolic,
}

impl Eigenvalue {
    pub fn as_poly(&self) -> ParamPoly {
        match self {
            Eigenvalue::Value(v) => ParamPoly::constant(v.clone()),
            Eigenvalue::Symbolic => ParamPoly::mu(),
        }
    }

    pub fn value(&self) -> Option<&Rat> {
        match self {
            Eigenvalue::Value(v) => Some(v),
            Eigenvalue::Symbolic => None,
        }
    }
}

impl fmt::Display for Eigenvalue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Eigenvalue::Value(v) => write!(f, "{}", format_rat(v)),
            Eigenvalue::Symbolic => write!(f, "μ"),
        }
    }
}

/// `β_exact = d(coeff · φ_κ)` for one normalized eigenfunction `φ_κ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactEntry {
    pub kappa: Rat,
    pub coeff: Rat,
}

/// `coeff · α_μ` for one normalized coclosed eigenform `α_μ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoclosedEntry {
    pub mu: Eigenvalue,
    pub coeff: Rat,
}

/// `coeff · γ` for one normalized harmonic 1-form `γ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarmonicEntry {
    pub coeff: Rat,
}

/// The 1-form `β` of `∇ = ∇ʰ + β`, Hodge-decomposed into orthonormal modes.
/// Distinct entries denote distinct (mutually orthogonal) eigenvectors.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BoundaryWeyl {
    pub exact_part: Vec<ExactEntry>,
    pub coclosed_part: Vec<CoclosedEntry>,
    pub harmonic_part: Vec<HarmonicEntry>,
}

impl BoundaryWeyl {
    /// The Levi-Civita connection of `h`.
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn exact(kappa: Rat, coeff: Rat) -> Self {
        Self {
            exact_part: vec![ExactEntry { kappa, coeff }],
            ..Self::default()
        }
    }

    pub fn coclosed(mu: Eigenvalue, coeff: Rat) -> Self {
        Self {
            coclosed_part: vec![CoclosedEntry { mu, coeff }],
            ..Self::default()
        }
    }

    pub fn harmonic(coeff: Rat) -> Self {
        Self {
            harmonic_part: vec![HarmonicEntry { coeff }],
            ..Self::default()
        }
    }

    pub fn plus(mut self, other: BoundaryWeyl) -> Self {
        self.exact_part.extend(other.exact_part);
        self.coclosed_part.extend(other.coclosed_part);
        self.harmonic_part.extend(other.harmonic_part);
        self
    }

    /// Closed iff the coclosed (non-harmonic) part carries no weight.
    pub fn is_closed(&self) -> bool {
        self.coclosed_part.iter().all(|e| e.coeff.is_zero())
    }

    /// Exact plus harmonic parts.
    pub fn closed_part(&self) -> BoundaryWeyl {
        BoundaryWeyl {
            coclosed_part: Vec::new(),
            ..self.clone()
        }
    }

    pub fn has_symbolic(&self) -> bool {
        self.coclosed_part
            .iter()
            .any(|e| e.mu == Eigenvalue::Symbolic)
    }

    /// `‖β‖²_{L²}`; `‖d(cφ_κ)‖² = κc²` and `‖cα‖² = c²` for normalized modes.
    pub fn norm_sq(&self) -> Rat {
        let exact: Rat = self
            .exact_part
            .iter()
            .map(|e| &e.kappa * &e.coeff * &e.coeff)
            .sum();
        let coclosed: Rat = self.coclosed_part.iter().map(|e| &e.coeff * &e.coeff).sum();
        let harmonic: Rat = self.harmonic_part.iter().map(|e| &e.coeff * &e.coeff).sum();
        exact + coclosed + harmonic
    }

    /// Checks every referenced mode exists in `model` with enough multiplicity.
    /// Symbolic coclosed entries are not checked against the spectrum.
    pub fn check_against(&self, model: &EinsteinModel) -> Result<(), SpectralError> {
        let mut exact_counts: BTreeMap<&Rat, u64> = BTreeMap::new();
        for e in &self.exact_part {
            if e.kappa.is_zero() {
                return Err(SpectralError::ConstantModeInExact);
            }
            model
                .scalar_mode(&e.kappa)
                .ok_or_else(|| SpectralError::UnknownScalarMode(format_rat(&e.kappa)))?;
            *exact_counts.entry(&e.kappa).or_default() += 1;
        }
        for (kappa, count) in exact_counts {
            let multiplicity = model.scalar_mode(kappa).map_or(0, |m| m.multiplicity);
            if count > multiplicity {
                return Err(SpectralError::MultiplicityExceeded {
                    eigenvalue: format_rat(kappa),
                    count,
                    multiplicity,
                });
            }
        }
        let mut coclosed_counts: BTreeMap<&Rat, u64> = BTreeMap::new();
        for e in &self.coclosed_part {
            if let Eigenvalue::Value(mu) = &e.mu {
                if mu.is_zero() {
                    return Err(SpectralError::ZeroCoclosedEigenvalue);
                }
                model
                    .coclosed_mode(mu)
                    .ok_or_else(|| SpectralError::UnknownCoclosedMode(format_rat(mu)))?;
                *coclosed_counts.entry(mu).or_default() += 1;
            }
        }
        for (mu, count) in coclosed_counts {
            let multiplicity = model.coclosed_mode(mu).map_or(0, |m| m.multiplicity);
            if count > multiplicity {
                return Err(SpectralError::MultiplicityExceeded {
                    eigenvalue: format_rat(mu),
                    count,
                    multiplicity,
                });
            }
        }
        let harmonic = self.harmonic_part.len() as u64;
        if harmonic > model.harmonic_rank {
            return Err(SpectralError::HarmonicRankExceeded {
                count: harmonic,
                rank: model.harmonic_rank,
            });
        }
        Ok(())
    }
}
