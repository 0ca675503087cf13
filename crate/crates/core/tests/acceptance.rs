//! Acceptance suite: one PASS/FAIL line per criterion, all comparisons exact.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use common::{einstein, lambdas, random_form, sl2_relations_hold};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weyl_q::constants::q_curvature_log_constant;
use weyl_q::ladder::{ladder_l1, ladder_l1_with, product_formula_l1, ExtensionKind, LadderChannel};
use weyl_q::series::{int, rat, ParamPoly, Rat};
use weyl_q::solver::{
    coclosed_operator, exact_channel, expansion_report, gauge_residuals,
    harmonic_extension_coclosed, harmonic_extension_scalar, log_defining_function,
    scalar_operator, smoothness_obstruction, solve_frobenius, Channel,
};
use weyl_q::spectral::{make_flat_torus, make_round_sphere, BoundaryWeyl, EinsteinModel, Eigenvalue};
use weyl_q::tractor::{
    build_q_tractor, functional_report, integral_invariant, rescale_constant, ConformalFactor,
};

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn coclosed(mu: Rat, c: Rat) -> BoundaryWeyl {
    BoundaryWeyl::coclosed(Eigenvalue::Value(mu), c)
}

fn order(m: &EinsteinModel) -> usize {
    m.n + 2
}

/// Classical four-dimensional formula `Q = ⅙(−ΔScal + Scal² − 3|Ric|²)` on
/// an Einstein metric with `Ric = 6λh` (so `ΔScal = 0`).
fn classical_q4(lambda: &Rat) -> Rat {
    let ric = int(6) * lambda;
    let scal = &ric * int(4);
    let ric_sq = &ric * &ric * int(4);
    (&scal * &scal - int(3) * ric_sq) / int(6)
}

fn c1_sphere_q() -> Outcome {
    let s4 = make_round_sphere(4, 2).map_err(err)?;
    let d = log_defining_function(&s4, 6).map_err(err)?;
    ensure!(d.s == rat(-3, 8), "s = {}", d.s);
    ensure!(d.q_h == int(6), "Q_h = {}", d.q_h);
    ensure!(d.q_h == classical_q4(&s4.lambda), "classical oracle {}", classical_q4(&s4.lambda));
    ensure!(d.r.first() == Some(&rat(-1, 2)), "r_2 = {:?}", d.r.first());
    Ok(())
}

fn c2_flat_obstructions() -> Outcome {
    let m = einstein(4, int(0));
    let l0 = harmonic_extension_scalar(&m, &ParamPoly::mu(), &int(1), 6).map_err(err)?.l0;
    ensure!(l0 == ParamPoly::monomial(2, rat(-1, 16)), "L0 = {l0}");
    let l1 = harmonic_extension_coclosed(&m, &ParamPoly::mu(), &int(1), 6).map_err(err)?.l1;
    ensure!(l1 == ParamPoly::monomial(1, rat(1, 2)), "L1 = {l1}");
    Ok(())
}

fn c3_three_way() -> Outcome {
    let ch = LadderChannel::Coclosed { mu: ParamPoly::mu() };
    for n in [4usize, 6, 8] {
        for lambda in lambdas() {
            let m = einstein(n, lambda.clone());
            let frob = harmonic_extension_coclosed(&m, &ParamPoly::mu(), &int(1), n + 2)
                .map_err(err)?
                .l1;
            let ladder = ladder_l1(&m, &ch, n + 2).map_err(err)?;
            let product = product_formula_l1(n, &lambda, &ParamPoly::mu());
            ensure!(
                frob == ladder && ladder == product,
                "n={n} λ={lambda}: {frob} | {ladder} | {product}"
            );
            if n == 6 {
                // −μ(μ+4λ)/16
                let oracle = ParamPoly::from_coeffs(vec![int(0), -&lambda / int(4), rat(-1, 16)]);
                ensure!(frob == oracle, "n=6 λ={lambda}: {frob}");
            }
        }
    }
    Ok(())
}

fn c4_sl2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20240601);
    let lams = lambdas();
    let mut count = 0;
    for n in [4usize, 6, 8] {
        for w in (-6..=6).step_by(2) {
            for _ in 0..5 {
                let lambda = lams[rng.gen_range(0..lams.len())].clone();
                let m = einstein(n, lambda.clone());
                let f = random_form(&mut rng, &m, w);
                ensure!(
                    sl2_relations_hold(&m, &f).map_err(err)?,
                    "n={n} λ={lambda} w={w}: {f}"
                );
                count += 1;
            }
        }
    }
    ensure!(count >= 100, "only {count} forms");
    Ok(())
}

fn c5_g1_n_l0() -> Outcome {
    for n in [4usize, 6] {
        for lambda in [int(0), rat(1, 2)] {
            let m = einstein(n, lambda.clone());
            let mut kappas: Vec<ParamPoly> = m
                .scalar_modes
                .iter()
                .filter(|s| s.kappa != int(0))
                .map(|s| ParamPoly::constant(s.kappa.clone()))
                .collect();
            kappas.push(ParamPoly::mu());
            for kappa in kappas {
                let e = exact_channel(&m, &kappa, &int(1), n + 2).map_err(err)?;
                ensure!(
                    e.g1 == e.scalar.l0.scale(&int(n as i64)),
                    "n={n} λ={lambda} κ={kappa}: G1={} L0={}",
                    e.g1,
                    e.scalar.l0
                );
            }
        }
    }
    let t = make_flat_torus(4, 1).map_err(err)?;
    let e = exact_channel(&t, &ParamPoly::constant(int(1)), &int(1), 6).map_err(err)?;
    ensure!(e.g1 == ParamPoly::constant(rat(-1, 4)), "flat κ=1: G1 = {}", e.g1);
    Ok(())
}

fn c6_constants() -> Outcome {
    let mut models = vec![
        make_round_sphere(4, 2).map_err(err)?,
        make_round_sphere(6, 1).map_err(err)?,
        make_round_sphere(8, 1).map_err(err)?,
        make_flat_torus(4, 1).map_err(err)?,
    ];
    for lambda in [rat(1, 3), int(-1), rat(-2, 5)] {
        models.push(einstein(6, lambda));
    }
    for m in &models {
        let r = expansion_report(m, &BoundaryWeyl::zero(), order(m)).map_err(err)?;
        let d = &r.defining;
        ensure!(r.constants_consistent(), "n={} λ={}", m.n, m.lambda);
        ensure!(int(m.n as i64) * &d.s == d.q01, "n s != Q01");
        ensure!(d.q_h == &d.s / q_curvature_log_constant(m.n), "Q_h != s/c_n");
    }
    let s6 = log_defining_function(&make_round_sphere(6, 0).map_err(err)?, 8).map_err(err)?;
    ensure!(s6.q_h == int(120), "Q(S^6) = {}", s6.q_h);
    Ok(())
}

fn c7_smoothness() -> Outcome {
    let t = make_flat_torus(4, 1).map_err(err)?;
    let s4 = make_round_sphere(4, 1).map_err(err)?;
    let fixtures = [
        (&t, BoundaryWeyl::harmonic(int(1)), true),
        (&t, BoundaryWeyl::exact(int(1), int(1)), false),
        (&s4, BoundaryWeyl::zero(), false),
        (&t, coclosed(int(1), int(1)), false),
        (&t, BoundaryWeyl::zero(), true),
    ];
    for (m, beta, expect) in &fixtures {
        let obs = smoothness_obstruction(m, beta, 6).map_err(err)?;
        let q = build_q_tractor(m, beta, 6).map_err(err)?;
        ensure!(obs.smooth == *expect, "{:?}: smooth = {}", beta, obs.smooth);
        ensure!(obs.smooth == q.is_zero(), "{:?}: verdict vs tractor", beta);
    }
    let dphi = BoundaryWeyl::exact(int(1), int(1));
    let inv = integral_invariant(&t, &dphi, 6).map_err(err)?;
    ensure!(
        inv.invariant.vol_coeff == int(0) && inv.invariant.constant == int(0),
        "torus dφ invariant = {}",
        inv.invariant
    );
    let obs = smoothness_obstruction(&s4, &BoundaryWeyl::zero(), 6).map_err(err)?;
    ensure!(
        obs.constant_bottom() == ParamPoly::constant(rat(-3, 2)),
        "S4 bottom = {}",
        obs.constant_bottom()
    );
    Ok(())
}

fn c8_functional() -> Outcome {
    let t = make_flat_torus(4, 2).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut betas = vec![BoundaryWeyl::zero(), BoundaryWeyl::exact(int(2), int(1))];
    for _ in 0..12 {
        let mut b = BoundaryWeyl::zero();
        if rng.gen_bool(0.7) {
            let mu = int(rng.gen_range(1..=2));
            b = b.plus(coclosed(mu, rat(rng.gen_range(-4..=4), rng.gen_range(1..=3))));
        }
        if rng.gen_bool(0.5) {
            b = b.plus(BoundaryWeyl::exact(int(1), int(rng.gen_range(-3..=3))));
        }
        if rng.gen_bool(0.5) {
            b = b.plus(BoundaryWeyl::harmonic(int(rng.gen_range(-3..=3))));
        }
        betas.push(b);
    }
    for beta in &betas {
        let r = integral_invariant(&t, beta, 6).map_err(err)?;
        let oracle: Rat = beta
            .coclosed_part
            .iter()
            .map(|e| int(2) * e.mu.value().unwrap() * &e.coeff * &e.coeff)
            .sum();
        ensure!(r.second_term == oracle, "second term {} vs {}", r.second_term, oracle);
        ensure!(r.second_term >= int(0), "negative second term");
        ensure!((r.second_term == int(0)) == beta.is_closed(), "equality iff closed: {:?}", beta);
    }
    let f = functional_report(&t, &betas, 6).map_err(err)?;
    ensure!(f.second_terms_nonnegative && f.zero_exactly_on_closed, "functional flags");
    for n in [4usize, 6, 8] {
        let s = make_round_sphere(n, 3).map_err(err)?;
        let mus: Vec<Rat> = s.coclosed_modes.iter().map(|m| m.mu.clone()).collect();
        let betas: Vec<BoundaryWeyl> = mus.iter().map(|mu| coclosed(mu.clone(), int(1))).collect();
        let f = functional_report(&s, &betas, n + 2).map_err(err)?;
        ensure!(f.factors_positive == Some(true), "S^{n} factors");
        ensure!(
            f.entries.iter().all(|e| e.second_term > int(0)),
            "S^{n} second terms not positive"
        );
    }
    Ok(())
}

fn c9_gauge_invariance() -> Outcome {
    let models = [
        make_flat_torus(4, 1).map_err(err)?,
        make_flat_torus(6, 1).map_err(err)?,
    ];
    for m in &models {
        let base = BoundaryWeyl::exact(int(1), int(1))
            .plus(coclosed(int(1), rat(2, 3)))
            .plus(BoundaryWeyl::coclosed(Eigenvalue::Symbolic, int(1)));
        let o = order(m);
        for h in [int(1), rat(-7, 2)] {
            let pert = base.clone().plus(BoundaryWeyl::harmonic(h.clone()));
            let a = smoothness_obstruction(m, &base, o).map_err(err)?;
            let b = smoothness_obstruction(m, &pert, o).map_err(err)?;
            ensure!(a.bottom == b.bottom, "G1/s changed");
            let nonharmonic = |rows: &[weyl_q::solver::ModeValue]| {
                rows.iter()
                    .filter(|r| r.channel != Channel::Harmonic)
                    .cloned()
                    .collect::<Vec<_>>()
            };
            ensure!(nonharmonic(&a.l1_beta) == nonharmonic(&b.l1_beta), "L1 changed");
            ensure!(
                b.l1_beta.iter().filter(|r| r.channel == Channel::Harmonic).all(|r| r.value.is_zero()),
                "harmonic L1 nonzero"
            );
            ensure!(a.smooth == b.smooth, "verdict changed");
            let qa = build_q_tractor(m, &base, o).map_err(err)?;
            let qb = build_q_tractor(m, &pert, o).map_err(err)?;
            ensure!(qa.same_section(&qb), "Q tractor changed");
        }
        let concrete = BoundaryWeyl::exact(int(1), int(1)).plus(coclosed(int(1), int(1)));
        let pert = concrete.clone().plus(BoundaryWeyl::harmonic(int(3)));
        let a = integral_invariant(m, &concrete, o).map_err(err)?;
        let b = integral_invariant(m, &pert, o).map_err(err)?;
        ensure!(a.invariant == b.invariant, "invariant changed");
        let da = log_defining_function(m, o).map_err(err)?;
        ensure!(da.s == log_defining_function(m, o).map_err(err)?.s, "s changed");
    }
    Ok(())
}

fn c10_residuals() -> Outcome {
    let mut cases = vec![];
    for n in [4usize, 6, 8] {
        for lambda in lambdas() {
            cases.push(einstein(n, lambda));
        }
        cases.push(make_round_sphere(n, 2).map_err(err)?);
    }
    for m in &cases {
        let o = order(m);
        let mut beta = BoundaryWeyl::harmonic(int(1));
        if let Some(s) = m.scalar_modes.iter().find(|s| s.kappa != int(0)) {
            beta = beta.plus(BoundaryWeyl::exact(s.kappa.clone(), rat(3, 2)));
        }
        if let Some(c) = m.coclosed_modes.iter().find(|c| c.mu != int(0)) {
            beta = beta.plus(coclosed(c.mu.clone(), int(-2)));
        }
        beta = beta.plus(BoundaryWeyl::coclosed(Eigenvalue::Symbolic, int(1)));
        if m.harmonic_rank == 0 {
            beta.harmonic_part.clear();
        }
        let res = gauge_residuals(m, &beta, o).map_err(err)?;
        ensure!(res.iter().all(|r| r.is_zero()), "nonzero gauge residual");
        ensure!(gauge_residuals(m, &BoundaryWeyl::zero(), o).map_err(err)?.is_empty(), "zero β");
        for ev in [ParamPoly::mu(), ParamPoly::constant(rat(5, 2))] {
            for op in [
                scalar_operator(m, &ev, o).map_err(err)?,
                coclosed_operator(m, &ev, o).map_err(err)?,
            ] {
                let z = common::zero_series(o);
                let sol = solve_frobenius(&op, &z, &ParamPoly::one()).map_err(err)?;
                ensure!(op.apply(&sol.series).map_err(err)?.is_zero(), "operator residual");
            }
        }
        let d = log_defining_function(m, o).map_err(err)?;
        let op = scalar_operator(m, &ParamPoly::zero(), o).map_err(err)?;
        let res = op.apply(&d.solution.series).map_err(err)?.sub(&d.solution.source_used);
        ensure!(res.is_zero(), "defining function residual");
    }
    Ok(())
}

fn c11_rescale() -> Outcome {
    let t4 = make_flat_torus(4, 1).map_err(err)?;
    let t6 = make_flat_torus(6, 1).map_err(err)?;
    let s4 = make_round_sphere(4, 1).map_err(err)?;
    let s6 = make_round_sphere(6, 1).map_err(err)?;
    let fixtures = vec![
        (&t4, coclosed(int(1), int(1)).plus(BoundaryWeyl::exact(int(1), int(2)))),
        (&t6, coclosed(int(1), rat(1, 2)).plus(BoundaryWeyl::harmonic(int(1)))),
        (&s4, BoundaryWeyl::zero()),
        (&s4, coclosed(s4.coclosed_modes[0].mu.clone(), int(1)).plus(BoundaryWeyl::exact(int(4), int(1)))),
        (&s6, coclosed(s6.coclosed_modes[0].mu.clone(), int(2))),
    ];
    for scale in [int(4), rat(1, 9)] {
        let f = ConformalFactor::from_metric_scale(&scale).map_err(err)?;
        for (m, beta) in &fixtures {
            let r = rescale_constant(m, beta, &f, order(m)).map_err(err)?;
            if let Some(bad) = r.checks.iter().find(|c| !c.pass()) {
                return Err(format!("scale {scale} n={}: {} {} vs {}", m.n, bad.name, bad.lhs, bad.rhs));
            }
            ensure!(r.rescaled.invariant == r.original.invariant, "invariant moved");
        }
    }
    // flat n = 4, h ↦ 4h: μ̂ = μ/4 and L̂₁ = μ/8
    let hat = weyl_q::tractor::rescale_model(&t4, &int(2));
    let l1 = harmonic_extension_coclosed(&hat, &ParamPoly::constant(rat(1, 4)), &int(1), 6)
        .map_err(err)?
        .l1;
    ensure!(l1 == ParamPoly::constant(rat(1, 8)), "L̂1 = {l1}");
    Ok(())
}

fn c12_extension_independence() -> Outcome {
    for n in [6usize, 8] {
        for lambda in lambdas() {
            let m = einstein(n, lambda.clone());
            for ch in [
                LadderChannel::Coclosed { mu: ParamPoly::mu() },
                LadderChannel::Coclosed { mu: ParamPoly::constant(int(3)) },
                LadderChannel::Exact { kappa: ParamPoly::constant(int(2)) },
            ] {
                let a = ladder_l1_with(&m, &ch, ExtensionKind::Minimal, n + 2).map_err(err)?;
                for kind in [ExtensionKind::HarmonicTruncation, ExtensionKind::Perturbed] {
                    let b = ladder_l1_with(&m, &ch, kind, n + 2).map_err(err)?;
                    ensure!(a == b, "n={n} λ={lambda} {kind:?}: {a} vs {b}");
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("Q-curvature of S^4: s = -3/8, Q = 6", c1_sphere_q),
        ("flat n=4 obstructions: L0 = -κ²/16, L1 = μ/2", c2_flat_obstructions),
        ("three-way L1 agreement, n ∈ {4,6,8}, λ ∈ {0,1/2,-1}", c3_three_way),
        ("sl2 relations on ≥100 random weighted forms", c4_sl2),
        ("G1 d = n L0 per scalar mode", c5_g1_n_l0),
        ("n s = Q01 and Q_h = s/c_n in every expansion report", c6_constants),
        ("smooth iff Q tractor vanishes", c7_smoothness),
        ("functional: second term 2Σμ|β_μ|², positivity", c8_functional),
        ("gauge invariance under harmonic perturbation", c9_gauge_invariance),
        ("gauge and operator residuals vanish", c10_residuals),
        ("constant rescale invariance, factors 4 and 1/9", c11_rescale),
        ("ladder L1 independent of the extension, n ∈ {6,8}", c12_extension_independence),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(()) => println!("PASS  [{:>2}] {name}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  [{:>2}] {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
