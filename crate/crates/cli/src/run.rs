//! Runs the requested tasks and the cross-path checks.

use rand::{Rng, SeedableRng};
use num_traits::Zero;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use weyl_q::constants::q_curvature_log_constant;
use weyl_q::ladder::{
    ladder_l1, ladder_l1_with, ladder_step_shifts, op_e, op_f, op_h, product_formula_l1,
    product_shifts, solve_normal, ExtensionKind, LadderChannel, WeightedForm,
};
use weyl_q::series::{int, LogSeries, ParamPoly, Rat};
use weyl_q::solver::{
    gauge_residuals, harmonic_extension_coclosed, log_defining_function, smoothness_obstruction,
    SolverError,
};
use weyl_q::spectral::EinsteinModel;
use weyl_q::tractor::{
    build_q_tractor, functional_report, integral_invariant, rescale_constant, ConformalFactor,
    IntegratedValue, InvariantReport,
};

use crate::config::{ConfigError, Problem, Task};
use crate::report::*;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Solver(#[from] SolverError),
    #[error("{} consistency check(s) failed", .failed.len())]
    ChecksFailed { failed: Vec<String>, report: Box<Report> },
}

impl RunError {
    /// 2 for a problem that cannot be run as stated, 3 for an internal inconsistency.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Solver(e) if e.is_consistency_failure() => 3,
            RunError::Solver(_) => 2,
            RunError::ChecksFailed { .. } => 3,
        }
    }
}

/// One coclosed eigenvalue and its three `L₁` values.
struct L1Triple {
    index: usize,
    mu: ParamPoly,
    frobenius: ParamPoly,
    ladder: ParamPoly,
    product: ParamPoly,
}

fn l1_triple(model: &EinsteinModel, index: usize, mu: ParamPoly, order: usize) -> Result<L1Triple, SolverError> {
    let frobenius = harmonic_extension_coclosed(model, &mu, &Rat::from_integer(1.into()), order)?.l1;
    let ladder = ladder_l1(model, &LadderChannel::Coclosed { mu: mu.clone() }, order)?;
    let product = product_formula_l1(model.n, &model.lambda, &mu);
    Ok(L1Triple {
        index,
        mu,
        frobenius,
        ladder,
        product,
    })
}

/// The coclosed eigenvalues `beta` uses, or the model's nonzero ones when
/// `beta` has no coclosed part.
fn l1_modes(problem: &Problem) -> (String, Vec<(usize, ParamPoly)>) {
    if problem.beta.coclosed_part.is_empty() {
        let modes = problem
            .model
            .coclosed_modes
            .iter()
            .filter(|m| !m.mu.is_zero())
            .enumerate()
            .map(|(i, m)| (i, ParamPoly::constant(m.mu.clone())))
            .collect();
        ("model".into(), modes)
    } else {
        let modes = problem
            .beta
            .coclosed_part
            .iter()
            .enumerate()
            .map(|(i, e)| (i, e.mu.as_poly()))
            .collect();
        ("beta".into(), modes)
    }
}

pub fn run(problem: &Problem) -> Result<Report, RunError> {
    let model = &problem.model;
    let order = problem.order;
    let n = model.n;
    let mut results = Results::default();
    let mut checks = Vec::new();

    if !problem.tasks.is_empty() {
        let d = log_defining_function(model, order)?;
        let n_rat = int(n as i64);
        checks.push(Check::equal("n·s = Q01", rat_str(&(&n_rat * &d.s)), rat_str(&d.q01)));
        let c_n = q_curvature_log_constant(n);
        checks.push(Check::equal("Q_h = s/c_n", rat_str(&d.q_h), rat_str(&(&d.s / &c_n))));

        let mut targets = vec![(usize::MAX, ParamPoly::mu())];
        let (source, modes) = l1_modes(problem);
        targets.extend(modes.iter().cloned());
        let triples = targets
            .into_par_iter()
            .map(|(i, mu)| l1_triple(model, i, mu, order))
            .collect::<Result<Vec<_>, _>>()?;
        for t in &triples {
            let label = if t.index == usize::MAX {
                "symbolic μ".to_string()
            } else {
                format!("μ = {}", t.mu)
            };
            checks.push(Check::equal(format!("L1 Frobenius = ladder ({label})"), &t.frobenius, &t.ladder));
            checks.push(Check::equal(format!("L1 ladder = product ({label})"), &t.ladder, &t.product));
        }
        let mode_triples: Vec<&L1Triple> = triples.iter().filter(|t| t.index != usize::MAX).collect();

        let residuals = gauge_residuals(model, &problem.beta, order)?;
        let nonzero = residuals.iter().filter(|r| !r.is_zero()).count();
        checks.push(Check::holds("gauge residuals vanish", nonzero == 0, nonzero, 0));

        let invariant = if problem.beta.has_symbolic() {
            None
        } else {
            let inv = integral_invariant(model, &problem.beta, order)?;
            checks.push(Check::equal("pairing = integral invariant", &inv.pairing, &inv.invariant));
            Some(inv)
        };

        for task in &problem.tasks {
            match task {
                Task::QCurvature => {
                    results.q_curvature = Some(QCurvature {
                        r: d.r.iter().map(rat_str).collect(),
                        s: rat_str(&d.s),
                        c_n: rat_str(&c_n),
                        q_h: rat_str(&d.q_h),
                        q01: rat_str(&d.q01),
                        q_total: Integrated::from(&IntegratedValue {
                            vol_coeff: &d.q_h * &model.volume.factor,
                            vol_label: model.volume.label.clone(),
                            constant: Rat::from_integer(0.into()),
                        }),
                    })
                }
                Task::L1Spectrum => {
                    results.l1_spectrum = Some(L1Spectrum {
                        source: source.clone(),
                        table_dependent: model.table_dependent,
                        modes: mode_triples
                            .iter()
                            .map(|t| L1Mode {
                                index: t.index,
                                mu: poly(&t.mu),
                                l1_frobenius: poly(&t.frobenius),
                                l1_ladder: poly(&t.ladder),
                                l1_product: poly(&t.product),
                            })
                            .collect(),
                    })
                }
                Task::LadderCheck => {
                    let lc = ladder_check(problem, &mode_triples)?;
                    checks.push(Check::holds(
                        "ladder shift multisets agree",
                        lc.shifts_match,
                        lc.product_shifts.join(" "),
                        lc.ladder_step_shifts.join(" "),
                    ));
                    for m in &lc.modes {
                        checks.push(Check::holds(
                            format!("extension independence (mode {})", m.index),
                            m.extension_independent,
                            m.extension_independent,
                            true,
                        ));
                    }
                    checks.push(Check::holds(
                        "sl2 relations on seeded forms",
                        lc.sl2_relations_hold,
                        lc.sl2_forms_checked,
                        "all",
                    ));
                    results.ladder_check = Some(lc);
                }
                Task::Invariant => {
                    let inv = invariant.as_ref().ok_or(SolverError::SymbolicMode)?;
                    results.invariant = Some(invariant_result(inv));
                }
                Task::Smoothness => {
                    let obs = smoothness_obstruction(model, &problem.beta, order)?;
                    let q = build_q_tractor(model, &problem.beta, order)?;
                    checks.push(Check::equal("smooth iff Q tractor = 0", obs.smooth, q.is_zero()));
                    results.smoothness = Some(Smoothness {
                        smooth: obs.smooth,
                        q_tractor_zero: q.is_zero(),
                        l1_beta: rows(&obs.l1_beta),
                        bottom: rows(&obs.bottom),
                    });
                }
                Task::Functional => {
                    let mut family = vec![problem.beta.clone(), problem.beta.closed_part()];
                    family.extend(problem.functional_family.iter().cloned());
                    let mut labels = vec!["beta".to_string(), "closed part of beta".to_string()];
                    labels.extend((0..problem.functional_family.len()).map(|i| format!("family[{i}]")));
                    let f = functional_report(model, &family, order)?;
                    results.functional = Some(Functional {
                        entries: f
                            .entries
                            .iter()
                            .zip(labels)
                            .map(|(e, label)| FunctionalEntry {
                                label,
                                invariant: Integrated::from(&e.invariant),
                                second_term: rat_str(&e.second_term),
                                closed: e.closed,
                            })
                            .collect(),
                        minimizers: f.minimizers,
                        second_terms_nonnegative: f.second_terms_nonnegative,
                        zero_exactly_on_closed: f.zero_exactly_on_closed,
                        factors_positive: f.factors_positive,
                    });
                }
                Task::RescaleCheck => {
                    let mut entries = Vec::new();
                    for scale in &problem.rescale_factors {
                        let factor = ConformalFactor::from_metric_scale(scale)?;
                        let r = rescale_constant(model, &problem.beta, &factor, order)?;
                        let local: Vec<Check> = r.checks.iter().map(Check::from).collect();
                        for c in &local {
                            checks.push(Check {
                                name: format!("rescale by {}: {}", rat_str(scale), c.name),
                                ..c.clone()
                            });
                        }
                        entries.push(RescaleEntry {
                            metric_scale: rat_str(scale),
                            conformal_factor: rat_str(&r.factor),
                            original_invariant: Integrated::from(&r.original.invariant),
                            rescaled_invariant: Integrated::from(&r.rescaled.invariant),
                            all_pass: r.all_pass(),
                            checks: local,
                        });
                    }
                    results.rescale_check = Some(RescaleCheck { entries });
                }
            }
        }
    }

    let report = Report {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: problem.config.seed,
        config: problem.config.clone(),
        model: ModelSummary::new(model, order),
        results,
        consistency_checks: checks,
    };
    let failed: Vec<String> = report
        .consistency_checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.name.clone())
        .collect();
    if failed.is_empty() {
        Ok(report)
    } else {
        Err(RunError::ChecksFailed {
            failed,
            report: Box::new(report),
        })
    }
}

fn invariant_result(inv: &InvariantReport) -> Invariant {
    Invariant {
        q_h: rat_str(&inv.q_h),
        q_total: Integrated::from(&inv.q_total),
        second_term: rat_str(&inv.second_term),
        invariant: Integrated::from(&inv.invariant),
        second_term_breakdown: rows(&inv.second_term_breakdown),
        q_tractor: QTractor {
            bottom: rows(&inv.q_tractor.bottom),
            middle: rows(&inv.q_tractor.middle),
            top: poly(&inv.q_tractor.top),
            weight: inv.q_tractor.weight,
        },
        pairing: Integrated::from(&inv.pairing),
        smooth: inv.smooth,
        harmonic_entries: inv.gauge_note.harmonic_entries,
        harmonic_norm_sq: rat_str(&inv.gauge_note.harmonic_norm_sq),
    }
}

const SL2_FORMS: usize = 12;
const FORM_ORDER: usize = 12;

fn ladder_check(problem: &Problem, modes: &[&L1Triple]) -> Result<LadderCheck, SolverError> {
    let model = &problem.model;
    let order = problem.order;
    let out_modes = modes
        .par_iter()
        .map(|t| {
            let ch = LadderChannel::Coclosed { mu: t.mu.clone() };
            let base = ladder_l1_with(model, &ch, ExtensionKind::Minimal, order)?;
            let mut independent = true;
            for kind in [ExtensionKind::HarmonicTruncation, ExtensionKind::Perturbed] {
                independent &= ladder_l1_with(model, &ch, kind, order)? == base;
            }
            Ok(LadderMode {
                index: t.index,
                mu: poly(&t.mu),
                l1_ladder: poly(&t.ladder),
                l1_product: poly(&t.product),
                extension_independent: independent,
            })
        })
        .collect::<Result<Vec<_>, SolverError>>()?;

    let mut ps = product_shifts(model.n, &model.lambda);
    let mut ls = ladder_step_shifts(model.n, &model.lambda);
    ps.sort();
    ls.sort();

    let mut rng = ChaCha8Rng::seed_from_u64(problem.config.seed);
    let mut hold = true;
    for i in 0..SL2_FORMS {
        let weight = 2 * (i as i64 % 5) - 4;
        let f = random_form(&mut rng, model, weight)?;
        hold &= sl2_relations_hold(model, &f)?;
    }

    Ok(LadderCheck {
        modes: out_modes,
        shifts_match: ps == ls,
        product_shifts: ps.iter().map(rat_str).collect(),
        ladder_step_shifts: ls.iter().map(rat_str).collect(),
        sl2_forms_checked: SL2_FORMS,
        sl2_relations_hold: hold,
    })
}

fn random_even_series(rng: &mut ChaCha8Rng, order: usize, vanish_at_zero: bool) -> LogSeries {
    let coeffs: Vec<Rat> = (0..=order)
        .map(|k| {
            if k % 2 == 1 || (k == 0 && vanish_at_zero) {
                int(0)
            } else {
                Rat::new(rng.gen_range(-9..=9).into(), rng.gen_range(1..=5).into())
            }
        })
        .collect();
    LogSeries::from_rats(order, &coeffs)
}

/// A seeded divergence-free form of the given weight on a coclosed or exact mode.
fn random_form(rng: &mut ChaCha8Rng, model: &EinsteinModel, weight: i64) -> Result<WeightedForm, SolverError> {
    let n = model.n;
    let special = weight <= -(n as i64);
    let t = random_even_series(rng, FORM_ORDER, special);
    let eigen = ParamPoly::constant(int(rng.gen_range(1..=6)));
    if rng.gen_bool(0.5) {
        WeightedForm::coclosed(n, weight, eigen, t)
    } else {
        let normal = if special {
            random_even_series(rng, FORM_ORDER - 2, false)
        } else {
            solve_normal(model, weight, &eigen, &t)?
        };
        WeightedForm::new(n, weight, LadderChannel::Exact { kappa: eigen }, t, normal)
    }
}

fn sl2_relations_hold(model: &EinsteinModel, f: &WeightedForm) -> Result<bool, SolverError> {
    let e = op_e(f);
    let fx = op_f(model, f)?;
    let ef_fe = op_e(&fx).sub(&op_f(model, &e)?)?;
    let he = op_h(&e).sub(&op_e(&op_h(f)))?;
    let hf = op_h(&fx).sub(&op_f(model, &op_h(f))?)?;
    Ok(ef_fe.agrees_with(&op_h(f))
        && he.agrees_with(&e.scale(&int(2)))
        && hf.agrees_with(&fx.scale(&int(-2))))
}
