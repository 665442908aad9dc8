//! Exact total-variation distance between the deck-simulation law and the
//! walk law: the suit counts of `n` cards drawn from a deck with `K` cards of
//! each of `2d` suits are multivariate hypergeometric, while `n` fair draws
//! are multinomial; `tv_exact` sums the positive part of their difference.

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::combinatorics::{
    check_sums_to_zero, composition_count, enumerate_compositions, enumerate_partitions_with_orbit,
    log_multinomial, multinomial_exact, CompositionVec, ExactRational, LogValue,
};
use crate::error::{Error, Result};
use crate::profile;

/// Hard cap on the number of compositions the exact-rational mode will sum.
pub const EXACT_RATIONAL_TERM_CAP: u128 = 1_000_000;

/// A deck: `d` is half the number of suits, `per_suit` the count of each suit,
/// so the deck holds `total = 2 * d * per_suit` cards.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeckSpec {
    d: u32,
    per_suit: u64,
    total: u64,
}

impl DeckSpec {
    pub fn new(d: u32, per_suit: u64) -> Result<Self> {
        if d < 1 {
            return Err(Error::domain("dimension d must be at least 1"));
        }
        if per_suit < 1 {
            return Err(Error::domain("per-suit count K must be at least 1"));
        }
        Ok(DeckSpec {
            d,
            per_suit,
            total: 2 * d as u64 * per_suit,
        })
    }

    /// Build from the total card count; `total` must be a multiple of `2d`
    /// (unequal suit counts are never silently introduced by rounding).
    pub fn from_total(d: u32, total: u64) -> Result<Self> {
        let suits = 2 * d as u64;
        if d < 1 || total == 0 || !total.is_multiple_of(suits) {
            return Err(Error::domain(format!(
                "deck size {total} is not a positive multiple of 2d = {suits}"
            )));
        }
        DeckSpec::new(d, total / suits)
    }

    pub fn dimension(&self) -> u32 {
        self.d
    }

    pub fn per_suit(&self) -> u64 {
        self.per_suit
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn suits(&self) -> usize {
        2 * self.d as usize
    }
}

/// How a distance value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TvMethod {
    ExactRational,
    LogFloat,
    AsymptoticProfile,
    MonteCarlo,
}

impl std::fmt::Display for TvMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TvMethod::ExactRational => "exact-rational",
            TvMethod::LogFloat => "log-float",
            TvMethod::AsymptoticProfile => "asymptotic-profile",
            TvMethod::MonteCarlo => "monte-carlo",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ErrorBound {
    Exact,
    Abs(f64),
}

impl std::fmt::Display for ErrorBound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ErrorBound::Exact => f.write_str("exact"),
            ErrorBound::Abs(b) => write!(f, "{b:e}"),
        }
    }
}

/// A computed total-variation distance with its provenance and error bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TVEstimate {
    pub value: f64,
    pub method: TvMethod,
    pub error_bound: ErrorBound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TvMode {
    ExactRational,
    LogFloat,
}

fn check_draw(deck: &DeckSpec, n: u64) -> Result<()> {
    if n > deck.total() {
        return Err(Error::domain(format!(
            "cannot draw {n} cards from a {}-card deck",
            deck.total()
        )));
    }
    Ok(())
}

fn check_parts(lambda: &CompositionVec, suits: usize) -> Result<()> {
    if lambda.len() != suits {
        return Err(Error::domain(format!(
            "suit-count vector has {} parts, expected {suits}",
            lambda.len()
        )));
    }
    Ok(())
}

/// Log-probability that `n` draws without replacement show suit counts `lambda`.
///
/// Infeasible counts (some λ_i above the per-suit supply) have probability
/// zero and come back as the log-zero sentinel rather than an error.
pub fn hypergeom_log_pmf(lambda: &CompositionVec, deck: &DeckSpec, n: u64) -> Result<LogValue> {
    check_parts(lambda, deck.suits())?;
    check_draw(deck, n)?;
    if lambda.total() != n {
        return Err(Error::domain("suit counts do not sum to the draw size"));
    }
    let k = deck.per_suit();
    let rest = match lambda.complement(k) {
        Some(r) => r,
        None => return Ok(LogValue::ZERO),
    };
    let full = CompositionVec::new(vec![k; deck.suits()]);
    let log = log_multinomial(deck.total() - n, &rest)?.ln() + log_multinomial(n, lambda)?.ln()
        - log_multinomial(deck.total(), &full)?.ln();
    Ok(LogValue::from_ln(log))
}

/// Log-probability that `n` independent uniform draws over `suits` symbols
/// show counts `lambda`: `ln[ C(n; λ) / suits^n ]`.
pub fn multinomial_log_pmf(lambda: &CompositionVec, n: u64, suits: usize) -> Result<LogValue> {
    check_parts(lambda, suits)?;
    let log = log_multinomial(n, lambda)?.ln() - n as f64 * (suits as f64).ln();
    Ok(LogValue::from_ln(log))
}

/// The likelihood ratio `f(λ, N, n)` of the deck law against the walk law:
/// `(2d)^n C(N-n; K-λ_1,...,K-λ_2d) / C(N; K,...,K)`.
pub fn radon_nikodym_f(lambda: &CompositionVec, total_cards: u64, n: u64) -> Result<LogValue> {
    let suits = lambda.len();
    if suits < 2 || !total_cards.is_multiple_of(suits as u64) {
        return Err(Error::domain(format!(
            "deck size {total_cards} is not a multiple of the suit count {suits}"
        )));
    }
    if n > total_cards {
        return Err(Error::domain("more draws than cards"));
    }
    if lambda.total() != n {
        return Err(Error::domain("suit counts do not sum to the draw size"));
    }
    let k = total_cards / suits as u64;
    let rest = match lambda.complement(k) {
        Some(r) => r,
        None => return Ok(LogValue::ZERO),
    };
    let full = CompositionVec::new(vec![k; suits]);
    let log = n as f64 * (suits as f64).ln() + log_multinomial(total_cards - n, &rest)?.ln()
        - log_multinomial(total_cards, &full)?.ln();
    Ok(LogValue::from_ln(log))
}

/// Limit value of `f` at counts `λ_i = (n + a_i sqrt(n))/(2d)` with `N = cn`:
/// `(c/(c-1))^{d-1/2} exp(-||A||^2 / (4d(c-1)))`.
pub fn f_asymptotic(offsets: &[f64], c: f64, d: u32) -> Result<f64> {
    if offsets.len() != 2 * d as usize {
        return Err(Error::domain(format!(
            "offset vector has {} entries, expected {}",
            offsets.len(),
            2 * d
        )));
    }
    if c <= 1.0 {
        return Err(Error::domain("cards-per-step ratio c must exceed 1"));
    }
    check_sums_to_zero(offsets)?;
    let norm_sq: f64 = offsets.iter().map(|a| a * a).sum();
    let df = d as f64;
    let log = (df - 0.5) * (c / (c - 1.0)).ln() - norm_sq / (4.0 * df * (c - 1.0));
    Ok(log.exp())
}

/// Exact distance as a reduced fraction. Sums over sorted suit-count
/// multisets weighted by orbit size; all terms share the denominator
/// `C(N; K,...,K) * (2d)^n`, so the reduction happens once at the end.
pub fn tv_exact_rational(deck: &DeckSpec, n: u64) -> Result<ExactRational> {
    check_draw(deck, n)?;
    if n == 0 {
        return Err(Error::domain("need at least one draw"));
    }
    let suits = deck.suits();
    let terms = composition_count(n, suits);
    if terms > EXACT_RATIONAL_TERM_CAP {
        return Err(Error::capacity(format!(
            "{terms} compositions exceed the exact-rational cap of {EXACT_RATIONAL_TERM_CAP}"
        )));
    }
    let k = deck.per_suit();
    let full = CompositionVec::new(vec![k; suits]);
    let deck_norm = multinomial_exact(deck.total(), &full)?;
    let walk_norm = BigUint::from(suits).pow(u32::try_from(n).expect("draw count fits u32"));

    let orbits: Vec<(CompositionVec, u64)> = enumerate_partitions_with_orbit(n, suits).collect();
    let numerator = orbits
        .into_par_iter()
        .map(|(lambda, weight)| {
            let seq = multinomial_exact(n, &lambda).expect("total matches by construction");
            let walk_num = &seq * &deck_norm;
            let deck_num = match lambda.complement(k) {
                Some(rest) => {
                    multinomial_exact(deck.total() - n, &rest)
                        .expect("total matches by construction")
                        * &seq
                        * &walk_norm
                }
                None => BigUint::zero(),
            };
            if deck_num > walk_num {
                (deck_num - walk_num) * BigUint::from(weight)
            } else {
                BigUint::zero()
            }
        })
        .reduce(BigUint::zero, |a, b| a + b);

    Ok(ExactRational::new(
        BigInt::from(numerator),
        BigInt::from(deck_norm * walk_norm),
    ))
}

fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

fn tv_log_float(deck: &DeckSpec, n: u64) -> Result<TVEstimate> {
    let suits = deck.suits();
    let k = deck.per_suit();
    let full = CompositionVec::new(vec![k; suits]);
    let log_deck_norm = log_multinomial(deck.total(), &full)?.ln();
    let ln_suits = (suits as f64).ln();

    let orbits: Vec<(CompositionVec, u64)> = enumerate_partitions_with_orbit(n, suits).collect();
    let log_terms: Vec<f64> = orbits
        .into_par_iter()
        .filter_map(|(lambda, weight)| {
            let rest = lambda.complement(k)?;
            let log_f = n as f64 * ln_suits + log_multinomial(deck.total() - n, &rest).ok()?.ln()
                - log_deck_norm;
            // [f - 1]^+ on the log scale: ties at f = 1 contribute nothing.
            if log_f <= 0.0 {
                return None;
            }
            let log_pb = log_multinomial(n, &lambda).ok()?.ln() - n as f64 * ln_suits;
            Some((weight as f64).ln() + log_pb + log_f.exp_m1().ln())
        })
        .collect();

    let term_count = log_terms.len();
    let value = match log_terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max) {
        m if m == f64::NEG_INFINITY => 0.0,
        m => {
            // Max-shift before exponentiation so no term underflows relative
            // to the largest one.
            let scaled = kahan_sum(log_terms.iter().map(|&t| (t - m).exp()));
            (m.exp() * scaled).min(1.0)
        }
    };
    Ok(TVEstimate {
        value,
        method: TvMethod::LogFloat,
        error_bound: ErrorBound::Abs(1e-9 * term_count.max(1) as f64),
    })
}

/// Total-variation distance `d_n(N)` between the two suit-count laws.
pub fn tv_exact(deck: &DeckSpec, n: u64, mode: TvMode) -> Result<TVEstimate> {
    if n == 0 {
        return Err(Error::domain("need at least one draw"));
    }
    check_draw(deck, n)?;
    match mode {
        TvMode::ExactRational => {
            let exact = tv_exact_rational(deck, n)?;
            Ok(TVEstimate {
                value: rational_to_f64(&exact),
                method: TvMethod::ExactRational,
                error_bound: ErrorBound::Exact,
            })
        }
        TvMode::LogFloat => tv_log_float(deck, n),
    }
}

pub(crate) fn rational_to_f64(value: &ExactRational) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        // Fall back through logs if numerator/denominator overflow doubles.
        let num = value.numer().to_f64();
        let den = value.denom().to_f64();
        match (num, den) {
            (Some(a), Some(b)) => a / b,
            _ => f64::NAN,
        }
    })
}

/// Where the deck law beats the walk law: every λ with `f(λ) >= 1`, mapped to
/// the zero-sum hyperplane by `ψ(λ) = (2dλ_i/sqrt(n) - sqrt(n))_i`.
#[derive(Clone, Copy, Debug)]
pub struct DeltaReport {
    pub n: u64,
    pub c: f64,
    /// Limit radius `r(c)`.
    pub radius: f64,
    /// Localization bound `r(c) (1 + 5/sqrt(n))`.
    pub bound: f64,
    /// Largest `||ψ(λ)||` over the enumerated set.
    pub max_norm: f64,
    /// Number of suit-count vectors with `f >= 1`.
    pub count: usize,
    pub all_within: bool,
}

/// Enumerate Δ_n and report how far it reaches relative to the limit radius.
pub fn delta_localization_check(deck: &DeckSpec, n: u64, c: f64) -> Result<DeltaReport> {
    check_draw(deck, n)?;
    if n == 0 {
        return Err(Error::domain("need at least one draw"));
    }
    let expected = (c * n as f64).round();
    if expected < 1.0 || expected as u64 != deck.total() {
        return Err(Error::domain(format!(
            "deck of {} cards is not round(c*n) = {expected} for c = {c}, n = {n}",
            deck.total()
        )));
    }
    let radius = profile::radius(c, deck.dimension())?;
    let bound = radius * (1.0 + 5.0 / (n as f64).sqrt());
    let suits = deck.suits();
    let sqrt_n = (n as f64).sqrt();

    let mut max_norm: f64 = 0.0;
    let mut count = 0usize;
    for lambda in enumerate_compositions(n, suits) {
        let log_f = radon_nikodym_f(&lambda, deck.total(), n)?;
        if log_f.is_zero() || log_f.ln() < 0.0 {
            continue;
        }
        count += 1;
        let norm_sq: f64 = lambda
            .parts()
            .iter()
            .map(|&l| {
                let a = suits as f64 * l as f64 / sqrt_n - sqrt_n;
                a * a
            })
            .sum();
        max_norm = max_norm.max(norm_sq.sqrt());
    }
    Ok(DeltaReport {
        n,
        c,
        radius,
        bound,
        max_norm,
        count,
        all_within: max_norm <= bound,
    })
}
