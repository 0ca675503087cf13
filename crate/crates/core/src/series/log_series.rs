//! Truncated series `Σ a_k x^k + Σ b_k x^k log x`, k = 0..=N.
//!
//! Coefficients are [`ParamPoly`]s so a single formal spectral parameter can
//! ride along. The log degree is capped at one: a product of two
//! log-bearing factors is rejected rather than silently truncated.

use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};

use super::param_poly::ParamPoly;
use super::rat::{int, Rat};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("product of two log-bearing series would need log^2")]
    LogSquared,
    #[error("non-unit series: constant term must be a nonzero rational")]
    NonUnit,
    #[error("reciprocal of a series with a log part")]
    LogInReciprocal,
    #[error("even-only series has a nonzero coefficient at odd order {0}")]
    ParityViolation(usize),
    #[error("coefficient arrays must have length N+1 = {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("cannot divide by x^{shift}: coefficient at order {order} is nonzero")]
    NotDivisible { shift: usize, order: usize },
}

/// Whether odd-order coefficients are structurally forbidden.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    EvenOnly,
    Unrestricted,
}

impl Parity {
    fn meet(self, other: Parity) -> Parity {
        if self == Parity::EvenOnly && other == Parity::EvenOnly {
            Parity::EvenOnly
        } else {
            Parity::Unrestricted
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogSeries {
    order: usize,
    a: Vec<ParamPoly>,
    b: Vec<ParamPoly>,
    parity: Parity,
}

impl LogSeries {
    pub fn zero(order: usize, parity: Parity) -> Self {
        Self {
            order,
            a: vec![ParamPoly::zero(); order + 1],
            b: vec![ParamPoly::zero(); order + 1],
            parity,
        }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(order, ParamPoly::one())
    }

    pub fn constant(order: usize, c: ParamPoly) -> Self {
        let mut s = Self::zero(order, Parity::EvenOnly);
        s.a[0] = c;
        s
    }

    /// `c·x^k`, or zero if `k > order`.
    pub fn monomial(order: usize, k: usize, c: ParamPoly) -> Self {
        let parity = if k.is_multiple_of(2) {
            Parity::EvenOnly
        } else {
            Parity::Unrestricted
        };
        let mut s = Self::zero(order, parity);
        if k <= order {
            s.a[k] = c;
        }
        s
    }

    /// `c·x^k log x`, or zero if `k > order`.
    pub fn log_monomial(order: usize, k: usize, c: ParamPoly) -> Self {
        let mut s = Self::monomial(order, k, ParamPoly::zero());
        if k <= order {
            s.b[k] = c;
        }
        s
    }

    /// Log-free series from rational coefficients `c_0, c_1, …` (missing
    /// entries are zero, entries beyond `order` are dropped). Parity is
    /// inferred from the coefficients.
    pub fn from_rats(order: usize, coeffs: &[Rat]) -> Self {
        let a: Vec<ParamPoly> = (0..=order)
            .map(|k| {
                coeffs
                    .get(k)
                    .map(|c| ParamPoly::constant(c.clone()))
                    .unwrap_or_default()
            })
            .collect();
        let parity = if a.iter().enumerate().any(|(k, c)| k % 2 == 1 && !c.is_zero()) {
            Parity::Unrestricted
        } else {
            Parity::EvenOnly
        };
        Self {
            order,
            a,
            b: vec![ParamPoly::zero(); order + 1],
            parity,
        }
    }

    pub fn from_parts(
        order: usize,
        a: Vec<ParamPoly>,
        b: Vec<ParamPoly>,
        parity: Parity,
    ) -> Result<Self, SeriesError> {
        for v in [&a, &b] {
            if v.len() != order + 1 {
                return Err(SeriesError::LengthMismatch {
                    expected: order + 1,
                    got: v.len(),
                });
            }
        }
        let s = Self { order, a, b, parity };
        s.check_parity()?;
        Ok(s)
    }

    fn check_parity(&self) -> Result<(), SeriesError> {
        if self.parity == Parity::EvenOnly {
            if let Some(k) = (1..=self.order)
                .step_by(2)
                .find(|&k| !self.a[k].is_zero() || !self.b[k].is_zero())
            {
                return Err(SeriesError::ParityViolation(k));
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// Coefficient of `x^k` (zero beyond the truncation order).
    pub fn a(&self, k: usize) -> ParamPoly {
        self.a.get(k).cloned().unwrap_or_default()
    }

    /// Coefficient of `x^k log x` (zero beyond the truncation order).
    pub fn b(&self, k: usize) -> ParamPoly {
        self.b.get(k).cloned().unwrap_or_default()
    }

    pub fn a_coeffs(&self) -> &[ParamPoly] {
        &self.a
    }

    pub fn b_coeffs(&self) -> &[ParamPoly] {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().chain(&self.b).all(ParamPoly::is_zero)
    }

    pub fn has_log(&self) -> bool {
        self.b.iter().any(|c| !c.is_zero())
    }

    /// Smallest k with `b_k ≠ 0`.
    pub fn first_log_order(&self) -> Option<usize> {
        self.b.iter().position(|c| !c.is_zero())
    }

    /// Whether every odd-order coefficient is actually zero, whatever the flag.
    pub fn is_even_valued(&self) -> bool {
        (1..=self.order)
            .step_by(2)
            .all(|k| self.a[k].is_zero() && self.b[k].is_zero())
    }

    /// Exact equality of the coefficients both series know about.
    pub fn agrees_with(&self, other: &LogSeries) -> bool {
        let n = self.order.min(other.order);
        (0..=n).all(|k| self.a[k] == other.a[k] && self.b[k] == other.b[k])
    }

    pub fn truncate(&self, order: usize) -> LogSeries {
        let order = order.min(self.order);
        LogSeries {
            order,
            a: self.a[..=order].to_vec(),
            b: self.b[..=order].to_vec(),
            parity: self.parity,
        }
    }

    /// Drops every term of order ≥ `k` (keeps the truncation order).
    pub fn cut_below(&self, k: usize) -> LogSeries {
        let mut out = self.clone();
        for j in k..=self.order {
            out.a[j] = ParamPoly::zero();
            out.b[j] = ParamPoly::zero();
        }
        out
    }

    /// Same coefficients with parity re-inferred from the values.
    pub fn with_inferred_parity(mut self) -> LogSeries {
        self.parity = if self.is_even_valued() {
            Parity::EvenOnly
        } else {
            Parity::Unrestricted
        };
        self
    }

    pub fn add(&self, other: &LogSeries) -> LogSeries {
        self.zip(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &LogSeries) -> LogSeries {
        self.zip(other, |x, y| x - y)
    }

    fn zip(&self, other: &LogSeries, f: impl Fn(&ParamPoly, &ParamPoly) -> ParamPoly) -> LogSeries {
        let order = self.order.min(other.order);
        LogSeries {
            order,
            a: (0..=order).map(|k| f(&self.a[k], &other.a[k])).collect(),
            b: (0..=order).map(|k| f(&self.b[k], &other.b[k])).collect(),
            parity: self.parity.meet(other.parity),
        }
    }

    pub fn neg(&self) -> LogSeries {
        self.map(|c| -c)
    }

    pub fn scale(&self, c: &ParamPoly) -> LogSeries {
        self.map(|x| x * c)
    }

    pub fn scale_rat(&self, c: &Rat) -> LogSeries {
        self.map(|x| x.scale(c))
    }

    fn map(&self, f: impl Fn(&ParamPoly) -> ParamPoly) -> LogSeries {
        LogSeries {
            order: self.order,
            a: self.a.iter().map(&f).collect(),
            b: self.b.iter().map(&f).collect(),
            parity: self.parity,
        }
    }

    /// Truncated Cauchy product. At most one factor may carry a log part.
    pub fn mul(&self, other: &LogSeries) -> Result<LogSeries, SeriesError> {
        if self.has_log() && other.has_log() {
            return Err(SeriesError::LogSquared);
        }
        let order = self.order.min(other.order);
        let mut out = LogSeries::zero(order, self.parity.meet(other.parity));
        for i in 0..=order {
            for j in 0..=(order - i) {
                let (x, y) = (&self.a[i], &other.a[j]);
                if !x.is_zero() && !y.is_zero() {
                    out.a[i + j] = &out.a[i + j] + &(x * y);
                }
                let cross = &(&self.a[i] * &other.b[j]) + &(&self.b[i] * &other.a[j]);
                if !cross.is_zero() {
                    out.b[i + j] = &out.b[i + j] + &cross;
                }
            }
        }
        Ok(out)
    }

    /// Euler operator: `x∂ₓ(x^k) = k x^k`, `x∂ₓ(x^k log x) = k x^k log x + x^k`.
    pub fn apply_xdx(&self) -> LogSeries {
        self.apply_xdx_shifted(0)
    }

    /// `(x∂ₓ + p)` applied to this series; equivalently `x^{-p}·x∂ₓ(x^p·self)`.
    pub fn apply_xdx_shifted(&self, p: i64) -> LogSeries {
        let mut out = LogSeries::zero(self.order, self.parity);
        for k in 0..=self.order {
            let w = int(k as i64 + p);
            out.a[k] = &self.a[k].scale(&w) + &self.b[k];
            out.b[k] = self.b[k].scale(&w);
        }
        out
    }

    /// Multiplicative inverse of a log-free series with nonzero rational constant term.
    pub fn reciprocal(&self) -> Result<LogSeries, SeriesError> {
        if self.has_log() {
            return Err(SeriesError::LogInReciprocal);
        }
        let c0 = self.a[0]
            .as_constant()
            .filter(|c| !c.is_zero())
            .ok_or(SeriesError::NonUnit)?;
        let inv0 = c0.recip();
        let mut out = LogSeries::zero(self.order, self.parity);
        out.a[0] = ParamPoly::constant(inv0.clone());
        for k in 1..=self.order {
            let mut acc = ParamPoly::zero();
            for j in 1..=k {
                if !self.a[j].is_zero() && !out.a[k - j].is_zero() {
                    acc = &acc + &(&self.a[j] * &out.a[k - j]);
                }
            }
            out.a[k] = acc.scale(&-inv0.clone());
        }
        Ok(out)
    }

    /// Multiplication by `x^k`; the truncation order grows by `k`.
    pub fn shift_up(&self, k: usize) -> LogSeries {
        let order = self.order + k;
        let mut out = LogSeries::zero(order, self.parity);
        if k % 2 == 1 {
            out.parity = Parity::Unrestricted;
        }
        for j in 0..=self.order {
            out.a[j + k] = self.a[j].clone();
            out.b[j + k] = self.b[j].clone();
        }
        out
    }

    /// Division by `x^k`; requires the first `k` orders to vanish and lowers
    /// the truncation order by `k`.
    pub fn shift_down(&self, k: usize) -> Result<LogSeries, SeriesError> {
        if let Some(order) = (0..k.min(self.order + 1))
            .find(|&j| !self.a[j].is_zero() || !self.b[j].is_zero())
        {
            return Err(SeriesError::NotDivisible { shift: k, order });
        }
        let order = self.order.saturating_sub(k);
        let mut out = LogSeries::zero(order, self.parity);
        if k % 2 == 1 {
            out.parity = Parity::Unrestricted;
        }
        for j in 0..=order {
            if j + k <= self.order {
                out.a[j] = self.a[j + k].clone();
                out.b[j] = self.b[j + k].clone();
            }
        }
        Ok(out)
    }

    /// Value of a log-free series at a rational point (finite sum of the
    /// stored terms); `None` if a log part is present.
    pub fn eval_polynomial(&self, x: &Rat, mu: &Rat) -> Option<Rat> {
        if self.has_log() {
            return None;
        }
        let mut acc = Rat::zero();
        let mut xp = Rat::one();
        for c in &self.a {
            acc += c.eval(mu) * &xp;
            xp *= x;
        }
        Some(acc)
    }
}

impl Add for &LogSeries {
    type Output = LogSeries;
    fn add(self, rhs: &LogSeries) -> LogSeries {
        LogSeries::add(self, rhs)
    }
}

impl Sub for &LogSeries {
    type Output = LogSeries;
    fn sub(self, rhs: &LogSeries) -> LogSeries {
        LogSeries::sub(self, rhs)
    }
}

impl Neg for &LogSeries {
    type Output = LogSeries;
    fn neg(self) -> LogSeries {
        LogSeries::neg(self)
    }
}
