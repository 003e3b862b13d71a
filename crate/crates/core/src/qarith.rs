//! Quantum arithmetic at the root of unity `xi = exp(i pi / n)`.
//!
//! Everything here is a pure function of a [`RootContext`] and its
//! arguments. Products with many brace factors have log-space twins
//! ([`LogComplex`], [`LogSinTable`]) so that large `n` does not overflow.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Div, Mul};

use num_complex::Complex64;

use crate::error::QError;

/// Integer and half-integer detection tolerance for user supplied colors.
pub const INT_TOL: f64 = 1e-9;

/// Above this many brace factors products are formed in log space.
pub const LOG_SPACE_FACTORS: u32 = 64;

pub type C64 = Complex64;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Nearest integer to `z` if `z` is within [`INT_TOL`] of it.
pub fn as_integer(z: C64) -> Option<i64> {
    let r = z.re.round();
    if (z.re - r).abs() < INT_TOL && z.im.abs() < INT_TOL {
        Some(r as i64)
    } else {
        None
    }
}

/// True when `z` is within `tol` of `(1/2)Z`.
pub fn near_half_integer(z: C64, tol: f64) -> bool {
    let t = 2.0 * z.re;
    z.im.abs() < tol && (t - t.round()).abs() < 2.0 * tol
}

/// The order `n` of the root and the root itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootContext {
    n: u32,
    xi: C64,
}

impl RootContext {
    pub fn new(n: u32) -> Result<Self, QError> {
        if n < 2 {
            return Err(QError::InvalidOrder(n));
        }
        Ok(RootContext { n, xi: C64::from_polar(1.0, PI / n as f64) })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    pub fn xi(&self) -> C64 {
        self.xi
    }

    /// `xi^a = exp(i pi a / n)`. The real part of `a` is reduced mod `2n`
    /// first so large exponents keep full accuracy.
    pub fn xi_pow(&self, a: C64) -> C64 {
        let two_n = 2.0 * self.nf();
        let re = a.re - two_n * (a.re / two_n).round();
        let arg = C64::new(re, a.im) * (PI / self.nf());
        (C64::i() * arg).exp()
    }

    pub fn xi_pow_re(&self, a: f64) -> C64 {
        self.xi_pow(c(a, 0.0))
    }

    /// `{a} = xi^a - xi^(-a)`. Exact multiples of `n` give exactly zero.
    pub fn qbrace(&self, a: C64) -> C64 {
        let n = self.nf();
        let k = (a.re / n).round();
        let r = a.re - k * n;
        let sign = if (k as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let s = (C64::new(r, a.im) * (PI / n)).sin();
        C64::new(0.0, 2.0 * sign) * s
    }

    pub fn qbrace_re(&self, a: f64) -> C64 {
        self.qbrace(c(a, 0.0))
    }

    /// `[a] = {a}/{1}`.
    pub fn qint(&self, a: C64) -> C64 {
        self.qbrace(a) / self.qbrace_re(1.0)
    }

    /// `{k}! = {1}{2}...{k}`.
    pub fn qfact(&self, k: u32) -> C64 {
        if k > LOG_SPACE_FACTORS {
            return self.qfact_log(k).to_complex();
        }
        (1..=k).fold(C64::new(1.0, 0.0), |acc, j| acc * self.qbrace_re(j as f64))
    }

    pub fn qfact_log(&self, k: u32) -> LogComplex {
        (1..=k).fold(LogComplex::one(), |acc, j| acc * LogComplex::from_complex(self.qbrace_re(j as f64)))
    }

    /// Falling product `{a, a-k} = {a}{a-1}...{a-k+1}`.
    pub fn qpoch(&self, a: C64, k: u32) -> C64 {
        if k > LOG_SPACE_FACTORS {
            return self.qpoch_log(a, k).to_complex();
        }
        (0..k).fold(C64::new(1.0, 0.0), |acc, j| acc * self.qbrace(a - j as f64))
    }

    pub fn qpoch_log(&self, a: C64, k: u32) -> LogComplex {
        (0..k).fold(LogComplex::one(), |acc, j| acc * LogComplex::from_complex(self.qbrace(a - j as f64)))
    }

    /// Integer `a - b` if it lies in `[0, n-1]`.
    pub fn binom_gap(&self, a: C64, b: C64) -> Result<u32, QError> {
        match as_integer(a - b) {
            Some(d) if (0..self.n as i64).contains(&d) => Ok(d as u32),
            _ => Err(QError::NonIntegerDifference { a, b }),
        }
    }

    /// Quantum binomial `{a, b} / {a-b}!`, defined when `a-b` is in `{0..n-1}`.
    pub fn qbinom(&self, a: C64, b: C64) -> Result<C64, QError> {
        let d = self.binom_gap(a, b)?;
        Ok(self.qpoch(a, d) / self.qfact(d))
    }

    pub fn qbinom_re(&self, a: f64, b: f64) -> Result<C64, QError> {
        self.qbinom(c(a, 0.0), c(b, 0.0))
    }

    /// `qbinom(2a+n, 2a+1)`, the theta value attached to a color `a`.
    pub fn theta(&self, a: C64) -> C64 {
        let n = self.nf();
        // gap is n-1 by construction, so the binomial is always defined
        self.qpoch(2.0 * a + n, self.n - 1) / self.qfact(self.n - 1)
    }

    /// Residual of the summation identity
    /// `sum_s xi^(+-(a+b-c+2)s) [a-s; a-c] [b+s; b] = xi^(+-(b+1)c) [a+b+1; a+b-c+1]`,
    /// normalised as `|lhs - rhs| / (1 + |rhs|)`.
    pub fn cg_sum_identity_residual(&self, a: C64, b: C64, cc: u32, sign: i32) -> Result<f64, QError> {
        if cc >= self.n {
            return Err(QError::OutOfRange(format!("c = {cc} must be below n = {}", self.n)));
        }
        let sg = if sign >= 0 { 1.0 } else { -1.0 };
        let cf = cc as f64;
        let mut lhs = KahanSum::default();
        for s in 0..=cc {
            let sf = s as f64;
            let ph = self.xi_pow(sg * (a + b - cf + 2.0) * sf);
            lhs.add(ph * self.qbinom(a - sf, a - cf)? * self.qbinom(b + sf, b)?);
        }
        let rhs = self.xi_pow(sg * (b + 1.0) * cf) * self.qbinom(a + b + 1.0, a + b - cf + 1.0)?;
        Ok((lhs.value() - rhs).norm() / (1.0 + rhs.norm()))
    }

    /// `sum_{j=1}^{k} log(2 sin(j pi / n))`. Only defined while every sine is
    /// positive, so `k` must stay below `n`.
    pub fn log_sin_sum(&self, k: u32) -> Result<f64, QError> {
        if k >= self.n {
            return Err(QError::ZeroFactor { k, n: self.n });
        }
        let n = self.nf();
        Ok((1..=k).map(|j| (2.0 * (j as f64 * PI / n).sin()).ln()).sum())
    }

    pub fn log_sin_table(&self) -> LogSinTable {
        LogSinTable::new(self.n)
    }
}

/// Prefix sums `L[k] = sum_{j<=k} log(2 sin(j pi / n))` for `0 <= k <= n-1`.
#[derive(Debug, Clone)]
pub struct LogSinTable {
    n: u32,
    pre: Vec<f64>,
}

impl LogSinTable {
    pub fn new(n: u32) -> Self {
        let nf = n as f64;
        let mut pre = Vec::with_capacity(n as usize);
        pre.push(0.0);
        let mut acc = 0.0;
        for j in 1..n {
            acc += (2.0 * (j as f64 * PI / nf).sin()).ln();
            pre.push(acc);
        }
        LogSinTable { n, pre }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `log |{k}!|`.
    pub fn log_fact(&self, k: i64) -> f64 {
        assert!(k >= 0 && k < self.n as i64, "log_fact({k}) outside [0, n-1] for n = {}", self.n);
        self.pre[k as usize]
    }

    /// `log |[x; y]|` for integers `0 <= y <= x <= n-1`.
    pub fn log_binom(&self, x: i64, y: i64) -> f64 {
        self.log_fact(x) - self.log_fact(y) - self.log_fact(x - y)
    }
}

/// A complex number stored as `(log |z|, arg z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogComplex {
    pub log_magnitude: f64,
    pub phase: f64,
}

impl LogComplex {
    pub fn new(log_magnitude: f64, phase: f64) -> Self {
        LogComplex { log_magnitude, phase: wrap_phase(phase) }
    }

    pub fn one() -> Self {
        LogComplex { log_magnitude: 0.0, phase: 0.0 }
    }

    pub fn zero() -> Self {
        LogComplex { log_magnitude: f64::NEG_INFINITY, phase: 0.0 }
    }

    pub fn from_complex(z: C64) -> Self {
        if z == C64::new(0.0, 0.0) {
            return Self::zero();
        }
        LogComplex { log_magnitude: z.norm().ln(), phase: z.arg() }
    }

    pub fn to_complex(self) -> C64 {
        if self.log_magnitude == f64::NEG_INFINITY {
            return C64::new(0.0, 0.0);
        }
        C64::from_polar(self.log_magnitude.exp(), self.phase)
    }

    pub fn is_zero(&self) -> bool {
        self.log_magnitude == f64::NEG_INFINITY
    }

    pub fn powi(self, k: i32) -> Self {
        LogComplex::new(self.log_magnitude * k as f64, self.phase * k as f64)
    }

    pub fn recip(self) -> Self {
        LogComplex::new(-self.log_magnitude, -self.phase)
    }
}

impl Mul for LogComplex {
    type Output = LogComplex;
    fn mul(self, o: LogComplex) -> LogComplex {
        if self.is_zero() || o.is_zero() {
            return LogComplex::zero();
        }
        LogComplex::new(self.log_magnitude + o.log_magnitude, self.phase + o.phase)
    }
}

impl Div for LogComplex {
    type Output = LogComplex;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: LogComplex) -> LogComplex {
        self * o.recip()
    }
}

impl fmt::Display for LogComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp({}) * exp(i {})", self.log_magnitude, self.phase)
    }
}

fn wrap_phase(p: f64) -> f64 {
    let t = p.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

/// `log(sum exp(x_i))` over finite inputs; `-inf` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Compensated complex summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: C64,
    comp: C64,
}

impl KahanSum {
    pub fn add(&mut self, x: C64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> C64 {
        self.sum
    }
}

impl FromIterator<C64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = C64>>(iter: I) -> Self {
        let mut k = KahanSum::default();
        for x in iter {
            k.add(x);
        }
        k
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn xi_pow_examples() {
        let ctx = RootContext::new(5).unwrap();
        assert!(close(ctx.xi_pow_re(0.0), c(1.0, 0.0), 1e-15));
        assert!(close(ctx.xi_pow_re(5.0), c(-1.0, 0.0), 1e-15));
        assert!(close(ctx.xi_pow_re(2.5), c(0.0, 1.0), 1e-15));
        let xi = ctx.xi();
        assert!(close(xi.powu(10), c(1.0, 0.0), 1e-14));
    }

    #[test]
    fn qbrace_examples() {
        let ctx = RootContext::new(5).unwrap();
        assert_eq!(ctx.qbrace_re(5.0), c(0.0, 0.0));
        assert!(close(ctx.qbrace_re(1.0), c(0.0, 2.0 * (PI / 5.0).sin()), 1e-15));
        let c7 = RootContext::new(7).unwrap();
        assert!(close(c7.qbrace_re(2.3), c7.qbrace_re(7.0 - 2.3), 1e-13));
    }

    #[test]
    fn qint_examples() {
        let c5 = RootContext::new(5).unwrap();
        assert!(close(c5.qint(c(1.0, 0.0)), c(1.0, 0.0), 1e-15));
        assert_eq!(c5.qint(c(0.0, 0.0)), c(0.0, 0.0));
        let c4 = RootContext::new(4).unwrap();
        assert!(close(c4.qint(c(2.0, 0.0)), c(2f64.sqrt(), 0.0), 1e-14));
    }

    #[test]
    fn qfact_examples() {
        let c5 = RootContext::new(5).unwrap();
        assert_eq!(c5.qfact(0), c(1.0, 0.0));
        assert!(close(c5.qfact(4), c(5.0, 0.0), 1e-13));
        let c4 = RootContext::new(4).unwrap();
        assert!(close(c4.qfact(3), c(0.0, -4.0), 1e-13));
    }

    #[test]
    fn qpoch_examples() {
        let c5 = RootContext::new(5).unwrap();
        assert_eq!(c5.qpoch(c(1.7, 0.3), 0), c(1.0, 0.0));
        assert!(close(c5.qpoch(c(4.0, 0.0), 4), c5.qfact(4), 1e-13));
        let c6 = RootContext::new(6).unwrap();
        assert!(close(c6.qpoch(c(2.7, 0.0), 2), c6.qbrace_re(2.7) * c6.qbrace_re(1.7), 1e-14));
    }

    #[test]
    fn qbinom_examples() {
        let ctx = RootContext::new(5).unwrap();
        assert!(close(ctx.qbinom_re(3.3, 3.3).unwrap(), c(1.0, 0.0), 1e-15));
        let (a, b) = (c(3.3, 0.2), c(1.3, 0.2));
        let lhs = ctx.qbinom(a, b).unwrap();
        assert!(close(lhs, ctx.qbinom(4.0 - b, 4.0 - a).unwrap(), 1e-12));
        assert!(close(lhs, ctx.qbinom(a - 5.0, b - 5.0).unwrap() * 1.0, 1e-12));
        assert!(matches!(ctx.qbinom_re(2.5, 1.0), Err(QError::NonIntegerDifference { .. })));
        assert!(ctx.qbinom_re(7.0, 1.0).is_err());
    }

    #[test]
    fn cg_sum_identity_examples() {
        let c5 = RootContext::new(5).unwrap();
        assert!(c5.cg_sum_identity_residual(c(2.1, 0.0), c(1.3, 0.0), 0, 1).unwrap() < 1e-15);
        assert!(c5.cg_sum_identity_residual(c(2.1, 0.0), c(1.3, 0.0), 2, 1).unwrap() < 1e-9);
        let c7 = RootContext::new(7).unwrap();
        assert!(c7.cg_sum_identity_residual(c(3.4, 0.0), c(0.6, 0.0), 3, -1).unwrap() < 1e-9);
    }

    #[test]
    fn log_sin_sum_examples() {
        let c5 = RootContext::new(5).unwrap();
        assert_eq!(c5.log_sin_sum(0).unwrap(), 0.0);
        assert!((c5.log_sin_sum(4).unwrap() - 5f64.ln()).abs() < 1e-13);
        assert!(matches!(c5.log_sin_sum(5), Err(QError::ZeroFactor { .. })));
    }

    #[test]
    fn log_complex_round_trip() {
        let z = c(-3.5e10, 2.0e-3);
        let back = LogComplex::from_complex(z).to_complex();
        assert!(close(back, z, 1e-12));
        assert!(LogComplex::from_complex(c(0.0, 0.0)).is_zero());
    }

    #[test]
    fn theta_matches_qbinom() {
        let ctx = RootContext::new(4).unwrap();
        let a = c(0.37, 0.1);
        let direct = ctx.qbinom(2.0 * a + 4.0, 2.0 * a + 1.0).unwrap();
        assert!(close(ctx.theta(a), direct, 1e-13));
    }
}
