//! Exact and asymptotic multinomial machinery shared by every other module:
//! big-integer factorials, multinomial coefficients in exact and log form,
//! composition/partition enumeration and Stirling-based approximations.

use std::sync::RwLock;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};

mod enumerate;

pub use enumerate::{
    composition_at_rank, composition_count, enumerate_compositions,
    enumerate_partitions_with_orbit, Compositions, PartitionsWithOrbit,
};

/// A positive quantity stored on the natural-log scale.
///
/// Zero is representable: it is carried as `-inf` so that `[x]^+`-style
/// truncations can produce exact zeros without leaving the representation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogValue {
    log: f64,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue {
        log: f64::NEG_INFINITY,
    };

    pub const ONE: LogValue = LogValue { log: 0.0 };

    pub fn from_ln(log: f64) -> Self {
        LogValue { log }
    }

    /// Natural log of the represented quantity (`-inf` for zero).
    pub fn ln(self) -> f64 {
        self.log
    }

    /// The quantity itself; may underflow/overflow the double range.
    pub fn value(self) -> f64 {
        self.log.exp()
    }

    pub fn is_zero(self) -> bool {
        self.log == f64::NEG_INFINITY
    }
}

impl std::ops::Mul for LogValue {
    type Output = LogValue;

    fn mul(self, rhs: LogValue) -> LogValue {
        if self.is_zero() || rhs.is_zero() {
            return LogValue::ZERO;
        }
        LogValue::from_ln(self.log + rhs.log)
    }
}

impl std::ops::Div for LogValue {
    type Output = LogValue;

    // Log-scale division is subtraction of the logs.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: LogValue) -> LogValue {
        if self.is_zero() {
            return LogValue::ZERO;
        }
        LogValue::from_ln(self.log - rhs.log)
    }
}

/// Exact rational number (arbitrary precision, lowest terms, positive denominator).
pub type ExactRational = num_rational::BigRational;

/// A vector of non-negative integer parts together with its cached sum.
///
/// This is the suit-count object everything else consumes: `parts[i]` counts
/// how many of the first `total` draws landed on suit `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CompositionVec {
    parts: Vec<u64>,
    total: u64,
}

impl CompositionVec {
    pub fn new(parts: Vec<u64>) -> Self {
        let total = parts.iter().sum();
        CompositionVec { parts, total }
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Component-wise complement `(cap - part_i)`, or `None` if any part exceeds `cap`.
    pub fn complement(&self, cap: u64) -> Option<CompositionVec> {
        if self.parts.iter().any(|&p| p > cap) {
            return None;
        }
        Some(CompositionVec::new(
            self.parts.iter().map(|&p| cap - p).collect(),
        ))
    }
}

impl From<&[u64]> for CompositionVec {
    fn from(parts: &[u64]) -> Self {
        CompositionVec::new(parts.to_vec())
    }
}

impl<const N: usize> From<[u64; N]> for CompositionVec {
    fn from(parts: [u64; N]) -> Self {
        CompositionVec::new(parts.to_vec())
    }
}

// Exact factorials are memoized; the table only ever grows.
static FACTORIALS: RwLock<Vec<BigUint>> = RwLock::new(Vec::new());

/// `m!` as a big integer, memoized across calls.
pub fn factorial_exact(m: u64) -> BigUint {
    let idx = m as usize;
    {
        let table = FACTORIALS.read().unwrap();
        if let Some(v) = table.get(idx) {
            return v.clone();
        }
    }
    let mut table = FACTORIALS.write().unwrap();
    if table.is_empty() {
        table.push(BigUint::one());
    }
    while table.len() <= idx {
        let next = table.last().unwrap() * BigUint::from(table.len());
        table.push(next);
    }
    table[idx].clone()
}

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;
const LOG_FACTORIAL_TABLE_LEN: usize = 129;

fn log_factorial_table() -> &'static [f64; LOG_FACTORIAL_TABLE_LEN] {
    use std::sync::OnceLock;
    static TABLE: OnceLock<[f64; LOG_FACTORIAL_TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0f64; LOG_FACTORIAL_TABLE_LEN];
        let mut acc = BigUint::one();
        for (m, slot) in t.iter_mut().enumerate().skip(1) {
            acc *= BigUint::from(m);
            // 128! ~ 3.9e215 still fits in a double, so the conversion is exact
            // to half an ulp and the log inherits full precision.
            *slot = acc.to_f64().expect("fits in double range").ln();
        }
        t
    })
}

/// `ln(m!)`: exact table for `m <= 128`, Stirling series above.
pub fn log_factorial(m: u64) -> f64 {
    if (m as usize) < LOG_FACTORIAL_TABLE_LEN {
        return log_factorial_table()[m as usize];
    }
    let x = m as f64;
    // ln m! = (m + 1/2) ln m - m + ln sqrt(2 pi) + series in 1/m.
    // Truncation error at m >= 129 is below 1e-22, far under double rounding.
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
    (x + 0.5) * x.ln() - x + LN_SQRT_2PI + series
}

/// `ln Γ(k/2)` for positive half-integer arguments, exact through factorials.
pub fn ln_gamma_half_integer(twice: u64) -> f64 {
    assert!(twice >= 1, "gamma argument must be positive");
    if twice.is_multiple_of(2) {
        // Γ(m) = (m-1)!
        log_factorial(twice / 2 - 1)
    } else {
        // Γ(m + 1/2) = sqrt(pi) (2m)! / (4^m m!)
        let m = (twice - 1) / 2;
        0.5 * std::f64::consts::PI.ln() + log_factorial(2 * m)
            - (m as f64) * 4.0f64.ln()
            - log_factorial(m)
    }
}

fn check_total(m: u64, lambda: &CompositionVec) -> Result<()> {
    if lambda.total() != m {
        return Err(Error::domain(format!(
            "composition sums to {} but {} was requested",
            lambda.total(),
            m
        )));
    }
    Ok(())
}

/// Exact multinomial coefficient `m! / (λ_1! ··· λ_ℓ!)`.
pub fn multinomial_exact(m: u64, lambda: &CompositionVec) -> Result<BigUint> {
    check_total(m, lambda)?;
    let mut denom = BigUint::one();
    for &p in lambda.parts() {
        denom *= factorial_exact(p);
    }
    Ok(factorial_exact(m) / denom)
}

/// `ln` of the multinomial coefficient, via log-factorial differences.
pub fn log_multinomial(m: u64, lambda: &CompositionVec) -> Result<LogValue> {
    check_total(m, lambda)?;
    let mut log = log_factorial(m);
    for &p in lambda.parts() {
        log -= log_factorial(p);
    }
    Ok(LogValue::from_ln(log))
}

/// `ln` of Stirling's approximation `sqrt(2 pi m) (m/e)^m`.
pub fn stirling_log(m: u64) -> f64 {
    let x = m as f64;
    (x + 0.5) * x.ln() - x + LN_SQRT_2PI
}

/// Stirling's approximation to `m!` itself; overflows to `inf` past `m = 170`.
pub fn stirling_approx(m: u64) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("stirling approximation requires m >= 1"));
    }
    Ok(stirling_log(m).exp())
}

/// Absolute tolerance when checking that real offset vectors sum to zero.
pub const SUM_TO_ZERO_TOL: f64 = 1e-9;

pub(crate) fn check_sums_to_zero(offsets: &[f64]) -> Result<()> {
    let sum: f64 = offsets.iter().sum();
    if sum.abs() > SUM_TO_ZERO_TOL {
        return Err(Error::domain(format!(
            "offset vector must sum to zero (got {sum:e})"
        )));
    }
    Ok(())
}

/// Leading-order log of the central multinomial coefficient at counts
/// `λ_i = (m + a_i sqrt(m)) / (2d)`, where `offsets` is the length-2d vector A.
///
/// Returns `ln[ sqrt(2) d^d (2d)^m / (pi^{d-1/2} m^{d-1/2}) ] - ||A||^2/(4d)`.
pub fn multinomial_asymptotic(m: u64, offsets: &[f64]) -> Result<LogValue> {
    if offsets.len() < 2 || !offsets.len().is_multiple_of(2) {
        return Err(Error::domain("offset vector must have even length 2d >= 2"));
    }
    check_sums_to_zero(offsets)?;
    let d = offsets.len() as f64 / 2.0;
    let x = m as f64;
    let sqrt_m = x.sqrt();
    for &a in offsets {
        if x + a * sqrt_m < 0.0 {
            return Err(Error::domain(format!(
                "offset {a} pushes a count below zero at m = {m}"
            )));
        }
    }
    let norm_sq: f64 = offsets.iter().map(|a| a * a).sum();
    let log = 0.5 * 2.0f64.ln() + d * d.ln() + x * (2.0 * d).ln()
        - (d - 0.5) * (std::f64::consts::PI.ln() + x.ln())
        - norm_sq / (4.0 * d);
    Ok(LogValue::from_ln(log))
}
