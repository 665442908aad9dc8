//! Deck-driven walk trajectories and seeded Monte-Carlo estimators, used as
//! an independent statistical cross-check of the exact computations.
//!
//! All randomness flows through a named generator (ChaCha12) seeded
//! explicitly, so every run is reproducible from its `(inputs, seed)` pair.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::combinatorics::{enumerate_compositions, log_factorial, CompositionVec};
use crate::error::{Error, Result};
use crate::exact_tv::{hypergeom_log_pmf, DeckSpec, ErrorBound, TVEstimate, TvMethod};

pub mod gof;

/// Identifier of the pseudorandom generator behind every simulator operation.
pub const PRNG_ALGORITHM: &str = "chacha12";

/// A shuffled deck: `order[j]` is the label (1-based) of the j-th card dealt.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    order: Vec<u64>,
}

impl Permutation {
    pub fn order(&self) -> &[u64] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Identity arrangement 1..=n, handy as a fixture.
    pub fn identity(n_cards: u64) -> Permutation {
        Permutation {
            order: (1..=n_cards).collect(),
        }
    }
}

fn fisher_yates(cards: &mut [u64], rng: &mut ChaCha12Rng) {
    for i in (1..cards.len()).rev() {
        let j = rng.random_range(0..=i);
        cards.swap(i, j);
    }
}

/// Uniform shuffle of `n_cards` labels, deterministic in the seed.
pub fn shuffle(n_cards: u64, seed: u64) -> Permutation {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut order: Vec<u64> = (1..=n_cards).collect();
    fisher_yates(&mut order, &mut rng);
    Permutation { order }
}

/// Suit of a card label: its residue mod `2d`.
pub fn suit_of(card: u64, d: u32) -> u32 {
    (card % (2 * d as u64)) as u32
}

/// Unit step assigned to a suit: suit `2i` moves `+e_{i+1}`, suit `2i+1`
/// moves `-e_{i+1}`.
pub fn step_of_suit(suit: u32, d: u32) -> Vec<i64> {
    let mut step = vec![0i64; d as usize];
    step[(suit / 2) as usize] = if suit.is_multiple_of(2) { 1 } else { -1 };
    step
}

/// A dealt walk: the suit sequence of the first `n` cards and the positions
/// it visits on the lattice, origin first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trajectory {
    pub suits: Vec<u32>,
    pub positions: Vec<Vec<i64>>,
}

impl Trajectory {
    pub fn dimension(&self) -> usize {
        self.positions.first().map_or(0, Vec::len)
    }

    pub fn steps(&self) -> usize {
        self.suits.len()
    }

    /// Every move is to a nearest neighbor and the walk starts at the origin.
    pub fn has_unit_steps(&self) -> bool {
        if self.positions.first().map(|p| p.iter().any(|&x| x != 0)) != Some(false) {
            return false;
        }
        self.positions.windows(2).all(|w| {
            w[1].iter()
                .zip(&w[0])
                .map(|(a, b)| (a - b).abs())
                .sum::<i64>()
                == 1
        })
    }
}

/// Deal the first `n` cards of `sigma` and walk the induced path.
pub fn deal_walk(sigma: &Permutation, n: usize, d: u32) -> Result<Trajectory> {
    if n > sigma.len() {
        return Err(Error::domain(format!(
            "cannot deal {n} cards from a {}-card deck",
            sigma.len()
        )));
    }
    let mut suits = Vec::with_capacity(n);
    let mut positions = Vec::with_capacity(n + 1);
    positions.push(vec![0i64; d as usize]);
    for &card in &sigma.order()[..n] {
        let suit = suit_of(card, d);
        suits.push(suit);
        let mut next = positions.last().unwrap().clone();
        let axis = (suit / 2) as usize;
        next[axis] += if suit.is_multiple_of(2) { 1 } else { -1 };
        positions.push(next);
    }
    Ok(Trajectory { suits, positions })
}

/// Monte-Carlo estimate of the deck-vs-walk distance: the expectation, under
/// fair suit draws, of the positive part of the likelihood ratio minus one.
/// The reported bound is three standard errors.
pub fn tv_monte_carlo(deck: &DeckSpec, n: u64, samples: u64, seed: u64) -> Result<TVEstimate> {
    if samples < 1 {
        return Err(Error::domain("need at least one sample"));
    }
    if n < 1 || n > deck.total() {
        return Err(Error::domain(format!(
            "draw count {n} outside 1..={}",
            deck.total()
        )));
    }
    let suits = deck.suits();
    let k = deck.per_suit();
    let full = CompositionVec::new(vec![k; suits]);
    let log_deck_norm = crate::combinatorics::log_multinomial(deck.total(), &full)?.ln();
    let ln_suits = (suits as f64).ln();
    let rest_total = deck.total() - n;

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; suits];
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut comp = 0.0f64; // Kahan compensation for the mean accumulator
    for _ in 0..samples {
        counts.fill(0);
        for _ in 0..n {
            counts[rng.random_range(0..suits)] += 1;
        }
        let g = if counts.iter().any(|&c| c > k) {
            0.0
        } else {
            let mut log_f = n as f64 * ln_suits + log_factorial(rest_total) - log_deck_norm;
            for &c in &counts {
                log_f -= log_factorial(k - c);
            }
            if log_f > 0.0 {
                log_f.exp_m1()
            } else {
                0.0
            }
        };
        let y = g - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        sum_sq += g * g;
    }
    let mean = sum / samples as f64;
    let std_err = if samples > 1 {
        let var = (sum_sq - samples as f64 * mean * mean).max(0.0) / (samples - 1) as f64;
        (var / samples as f64).sqrt()
    } else {
        0.0
    };
    Ok(TVEstimate {
        value: mean.clamp(0.0, 1.0),
        method: TvMethod::MonteCarlo,
        error_bound: ErrorBound::Abs(3.0 * std_err),
    })
}

/// Chi-square comparison of empirical suit counts against their law.
#[derive(Clone, Copy, Debug)]
pub struct GofReport {
    pub statistic: f64,
    pub dof: u64,
    pub p_value: f64,
    pub pass: bool,
    /// Cells carrying positive probability, before pooling.
    pub cells: usize,
    pub samples: u64,
}

/// Significance level of the built-in goodness-of-fit checks.
pub const GOF_SIGNIFICANCE: f64 = 0.001;

/// Shuffle `samples` decks, tally the suit counts of the first `n` cards and
/// test them against the exact drawing law.
pub fn empirical_suitcount_check(
    deck: &DeckSpec,
    n: u64,
    samples: u64,
    seed: u64,
) -> Result<GofReport> {
    if samples < 1 {
        return Err(Error::domain("need at least one sample"));
    }
    if n > deck.total() {
        return Err(Error::domain("cannot draw more cards than the deck holds"));
    }
    let suits = deck.suits();

    // Expected counts for every feasible suit-count vector.
    let mut index = HashMap::new();
    let mut expected = Vec::new();
    for lambda in enumerate_compositions(n, suits) {
        let pmf = hypergeom_log_pmf(&lambda, deck, n)?;
        if pmf.is_zero() {
            continue;
        }
        index.insert(lambda.parts().to_vec(), expected.len());
        expected.push(samples as f64 * pmf.value());
    }
    let cells = expected.len();

    let mut observed = vec![0.0f64; cells];
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut cards: Vec<u64> = (1..=deck.total()).collect();
    let mut counts = vec![0u64; suits];
    for _ in 0..samples {
        fisher_yates(&mut cards, &mut rng);
        counts.fill(0);
        for &card in &cards[..n as usize] {
            counts[suit_of(card, deck.dimension()) as usize] += 1;
        }
        let idx = index
            .get(counts.as_slice())
            .copied()
            .expect("every drawable suit-count vector has positive probability");
        observed[idx] += 1.0;
    }

    let (obs, exp) = gof::pool_sparse_cells(&observed, &expected, 5.0);
    let statistic = gof::chi_square_statistic(&obs, &exp);
    let dof = obs.len().saturating_sub(1) as u64;
    let p_value = gof::chi_square_pvalue(statistic, dof);
    Ok(GofReport {
        statistic,
        dof,
        p_value,
        pass: p_value >= GOF_SIGNIFICANCE,
        cells,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_tv::{tv_exact, TvMode};

    #[test]
    fn shuffle_single_card() {
        assert_eq!(shuffle(1, 99).order(), &[1]);
    }

    #[test]
    fn shuffle_is_deterministic_and_bijective() {
        for seed in [0u64, 1, 123456789] {
            let a = shuffle(52, seed);
            let b = shuffle(52, seed);
            assert_eq!(a, b);
            let mut sorted = a.order().to_vec();
            sorted.sort_unstable();
            assert_eq!(sorted, (1..=52).collect::<Vec<_>>());
        }
        assert_ne!(shuffle(52, 1).order(), shuffle(52, 2).order());
    }

    #[test]
    fn shuffle_uniformity_chi_square() {
        // Bucket 10^6 shuffles of a 4-card deck over the 24 arrangements.
        let samples = 1_000_000u64;
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let mut cards: Vec<u64> = (1..=4).collect();
        let mut buckets = [0u64; 24];
        for _ in 0..samples {
            fisher_yates(&mut cards, &mut rng);
            buckets[lehmer_index(&cards)] += 1;
        }
        let expected = vec![samples as f64 / 24.0; 24];
        let observed: Vec<f64> = buckets.iter().map(|&b| b as f64).collect();
        for &o in &observed {
            let freq = o / samples as f64;
            assert!(
                (freq - 1.0 / 24.0).abs() < 0.002,
                "frequency {freq} strays from 1/24"
            );
        }
        let stat = gof::chi_square_statistic(&observed, &expected);
        let p = gof::chi_square_pvalue(stat, 23);
        assert!(
            p >= 0.001,
            "chi-square rejects uniformity: stat={stat}, p={p}"
        );
    }

    fn lehmer_index(perm: &[u64]) -> usize {
        let mut idx = 0usize;
        let factorials = [6usize, 2, 1, 1];
        for i in 0..perm.len() {
            let smaller = perm[i + 1..].iter().filter(|&&x| x < perm[i]).count();
            idx += smaller * factorials[i];
        }
        idx
    }

    #[test]
    fn suit_examples() {
        assert_eq!(suit_of(4, 2), 0);
        assert_eq!(suit_of(7, 1), 1);
        // Residue classes split a full deck evenly.
        for (d, k) in [(1u32, 5u64), (2, 3), (3, 4)] {
            let mut counts = vec![0u64; 2 * d as usize];
            for card in 1..=(2 * d as u64 * k) {
                counts[suit_of(card, d) as usize] += 1;
            }
            assert!(counts.iter().all(|&c| c == k));
        }
    }

    #[test]
    fn deal_walk_identity_deck() {
        let sigma = Permutation::identity(4);
        let walk = deal_walk(&sigma, 4, 1).unwrap();
        assert_eq!(walk.suits, vec![1, 0, 1, 0]);
        let xs: Vec<i64> = walk.positions.iter().map(|p| p[0]).collect();
        assert_eq!(xs, vec![0, -1, 0, -1, 0]);
        assert!(walk.has_unit_steps());
    }

    #[test]
    fn deal_walk_zero_steps() {
        let sigma = shuffle(8, 3);
        let walk = deal_walk(&sigma, 0, 2).unwrap();
        assert!(walk.suits.is_empty());
        assert_eq!(walk.positions, vec![vec![0, 0]]);
    }

    #[test]
    fn deal_walk_rejects_overdraw() {
        let sigma = shuffle(4, 0);
        assert!(deal_walk(&sigma, 5, 1).is_err());
    }

    #[test]
    fn deal_walk_always_unit_steps() {
        for seed in 0..20u64 {
            let sigma = shuffle(24, seed);
            let walk = deal_walk(&sigma, 15, 3).unwrap();
            assert!(walk.has_unit_steps());
        }
    }

    #[test]
    fn full_deck_uses_every_suit_equally() {
        let deck = DeckSpec::new(2, 3).unwrap();
        for seed in 0..10u64 {
            let sigma = shuffle(deck.total(), seed);
            let walk = deal_walk(&sigma, deck.total() as usize, deck.dimension()).unwrap();
            let mut counts = vec![0u64; deck.suits()];
            for &s in &walk.suits {
                counts[s as usize] += 1;
            }
            assert!(counts.iter().all(|&c| c == deck.per_suit()));
        }
    }

    #[test]
    fn monte_carlo_single_step_is_exactly_zero() {
        let deck = DeckSpec::new(1, 4).unwrap();
        let est = tv_monte_carlo(&deck, 1, 10_000, 11).unwrap();
        assert_eq!(est.value, 0.0);
        assert_eq!(est.error_bound, ErrorBound::Abs(0.0));
        assert_eq!(est.method, TvMethod::MonteCarlo);
    }

    #[test]
    fn monte_carlo_matches_exact_small_deck() {
        let deck = DeckSpec::new(1, 2).unwrap();
        let est = tv_monte_carlo(&deck, 2, 200_000, 5).unwrap();
        let exact = tv_exact(&deck, 2, TvMode::ExactRational).unwrap().value;
        let bound = match est.error_bound {
            ErrorBound::Abs(b) => b,
            _ => unreachable!(),
        };
        assert!(
            (est.value - exact).abs() <= bound,
            "MC {} vs exact {exact}, 3-sigma {bound}",
            est.value
        );
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let deck = DeckSpec::new(2, 2).unwrap();
        let a = tv_monte_carlo(&deck, 3, 50_000, 42).unwrap();
        let b = tv_monte_carlo(&deck, 3, 50_000, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn suitcount_check_small_deck() {
        let deck = DeckSpec::new(1, 2).unwrap();
        let report = empirical_suitcount_check(&deck, 2, 200_000, 9).unwrap();
        assert!(
            report.pass,
            "stat={}, p={}",
            report.statistic, report.p_value
        );
        assert_eq!(report.cells, 3);
    }

    #[test]
    fn suitcount_full_draw_is_degenerate() {
        let deck = DeckSpec::new(1, 2).unwrap();
        let report = empirical_suitcount_check(&deck, 4, 1000, 1).unwrap();
        // only λ = (K, K) is drawable
        assert_eq!(report.cells, 1);
        assert_eq!(report.dof, 0);
        assert!(report.pass);
    }
}
