#![allow(dead_code)]

use rand::Rng;
use weyl_q::ladder::{op_e, op_f, op_h, solve_normal, LadderChannel, WeightedForm};
use weyl_q::series::{int, rat, LogSeries, ParamPoly, Parity, Rat};
use weyl_q::solver::SolverError;
use weyl_q::spectral::{make_flat_torus, EinsteinModel};

/// Flat-torus spectral data with the Einstein constant replaced by `lambda`.
/// Only `n` and `lambda` enter the radial operators.
pub fn einstein(n: usize, lambda: Rat) -> EinsteinModel {
    let mut m = make_flat_torus(n, 2).unwrap();
    m.lambda = lambda;
    m
}

pub const LAMBDAS: [(i64, i64); 3] = [(0, 1), (1, 2), (-1, 1)];

pub fn lambdas() -> Vec<Rat> {
    LAMBDAS.iter().map(|&(p, q)| rat(p, q)).collect()
}

fn random_rat<R: Rng>(rng: &mut R) -> Rat {
    rat(rng.gen_range(-9..=9), rng.gen_range(1..=5))
}

fn random_even_series<R: Rng>(rng: &mut R, order: usize, vanish_at_zero: bool) -> LogSeries {
    let coeffs: Vec<Rat> = (0..=order)
        .map(|k| {
            if k % 2 == 1 || (k == 0 && vanish_at_zero) {
                int(0)
            } else {
                random_rat(rng)
            }
        })
        .collect();
    LogSeries::from_rats(order, &coeffs)
}

pub const FORM_ORDER: usize = 14;

/// A random divergence-free weighted form on a random coclosed or exact mode.
pub fn random_form<R: Rng>(rng: &mut R, model: &EinsteinModel, weight: i64) -> WeightedForm {
    let n = model.n;
    let special = weight <= -(n as i64);
    let t = random_even_series(rng, FORM_ORDER, special);
    let eigen = ParamPoly::constant(int(rng.gen_range(1..=6)));
    if rng.gen_bool(0.5) {
        WeightedForm::coclosed(n, weight, eigen, t).unwrap()
    } else {
        let normal = if special {
            random_even_series(rng, FORM_ORDER - 2, false)
        } else {
            solve_normal(model, weight, &eigen, &t).unwrap()
        };
        WeightedForm::new(n, weight, LadderChannel::Exact { kappa: eigen }, t, normal).unwrap()
    }
}

/// Checks `[E,F] = H`, `[H,E] = 2E`, `[H,F] = −2F` on one form.
pub fn sl2_relations_hold(model: &EinsteinModel, f: &WeightedForm) -> Result<bool, SolverError> {
    let ef = op_e(&op_f(model, f)?);
    let fe = op_f(model, &op_e(f))?;
    let efh = ef.sub(&fe)?.agrees_with(&op_h(f));
    let he = op_h(&op_e(f)).sub(&op_e(&op_h(f)))?;
    let heh = he.agrees_with(&op_e(f).scale(&int(2)));
    let hf = op_h(&op_f(model, f)?).sub(&op_f(model, &op_h(f))?)?;
    let hfh = hf.agrees_with(&op_f(model, f)?.scale(&int(-2)));
    Ok(efh && heh && hfh)
}

pub fn zero_series(order: usize) -> LogSeries {
    LogSeries::zero(order, Parity::EvenOnly)
}
