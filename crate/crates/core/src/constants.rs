//! Normalization constants, all exact and depending only on the even
//! boundary dimension `n`.

use crate::series::rat::{factorial, int, pow, sign_pow};
use crate::series::Rat;

fn half(n: usize) -> i64 {
    debug_assert!(n.is_multiple_of(2) && n >= 4);
    (n / 2) as i64
}

/// `s = c_n · Q_h` for the log coefficient of a harmonic `log ρ`:
/// `c_n = (−1)^{n/2−1} / (2^{n−1} (n/2)! (n/2−1)!)`.
pub fn q_curvature_log_constant(n: usize) -> Rat {
    let m = half(n);
    sign_pow(m - 1) / (pow(&int(2), n as i64 - 1) * factorial(m as u64) * factorial(m as u64 - 1))
}

/// `Q_0 1 = q01_factor(n) · Q_h`.
pub fn q01_factor(n: usize) -> Rat {
    let m = half(n);
    let f = factorial(m as u64 - 1);
    sign_pow(m - 1) / (pow(&int(2), n as i64 - 2) * &f * &f)
}

/// Global factor `(−1)^{n/2−1} 2^{n−2} ((n/2−1)!)²` of the Q-curvature tractor.
pub fn tractor_prefactor(n: usize) -> Rat {
    q01_factor(n).recip()
}

/// Coefficient `(−1)^{n/2} 2^{n−2} ((n/2−1)!)²` of `∫⟨L₁β, β⟩` in the global invariant.
pub fn integral_prefactor(n: usize) -> Rat {
    -tractor_prefactor(n)
}

/// Restriction of `F^{n/2−1}η` equals this constant times `L₁β`:
/// `(−1)^{n/2} 2^{n−3} (n/2−1)! (n/2−2)!`.
pub fn ladder_constant(n: usize) -> Rat {
    let m = half(n);
    sign_pow(m) * pow(&int(2), n as i64 - 3) * factorial(m as u64 - 1) * factorial(m as u64 - 2)
}

/// Prefactor `(−1)^{n/2} / (2^{n−3} (n/2−1)! (n/2−2)!)` of the Einstein `L₁` product.
pub fn l1_product_prefactor(n: usize) -> Rat {
    ladder_constant(n).recip()
}
