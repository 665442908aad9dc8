//! Streaming enumeration of compositions and partitions.
//!
//! The iterators are odometer-style (no recursion, O(ℓ) state) so they can
//! stream through large index spaces; `composition_at_rank` lets a worker
//! re-seed the odometer at any index of the lexicographic order.

use super::CompositionVec;

/// Number of compositions of `n` into `parts` non-negative parts,
/// `C(n + parts - 1, parts - 1)`, saturating at `u128::MAX`.
pub fn composition_count(n: u64, parts: usize) -> u128 {
    assert!(parts >= 1);
    let k = (parts - 1) as u128;
    let mut acc: u128 = 1;
    for i in 1..=k {
        // Multiply/divide stepwise; each prefix is itself a binomial, so the
        // division is exact.
        acc = match acc.checked_mul(n as u128 + k - i + 1) {
            Some(v) => v / i,
            None => return u128::MAX,
        };
    }
    acc
}

/// All λ ∈ Π_parts^n in lexicographic order, each exactly once.
pub fn enumerate_compositions(n: u64, parts: usize) -> Compositions {
    assert!(parts >= 1, "need at least one part");
    Compositions {
        parts: {
            let mut v = vec![0u64; parts];
            *v.last_mut().unwrap() = n;
            v
        },
        started: false,
        done: false,
    }
}

/// The composition at position `rank` (0-based) of the lexicographic order.
pub fn composition_at_rank(n: u64, parts: usize, rank: u128) -> CompositionVec {
    assert!(parts >= 1);
    assert!(rank < composition_count(n, parts), "rank out of range");
    let mut out = Vec::with_capacity(parts);
    let mut n = n;
    let mut rank = rank;
    for remaining in (1..=parts).rev() {
        if remaining == 1 {
            out.push(n);
            break;
        }
        let mut v = 0u64;
        loop {
            let block = composition_count(n - v, remaining - 1);
            if rank < block {
                break;
            }
            rank -= block;
            v += 1;
        }
        out.push(v);
        n -= v;
    }
    CompositionVec::new(out)
}

#[derive(Debug, Clone)]
pub struct Compositions {
    parts: Vec<u64>,
    started: bool,
    done: bool,
}

impl Compositions {
    /// Re-seed the odometer so the next item yielded is the one at `rank`.
    pub fn starting_at_rank(n: u64, parts: usize, rank: u128) -> Compositions {
        let seed = composition_at_rank(n, parts, rank);
        Compositions {
            parts: seed.parts().to_vec(),
            started: false,
            done: false,
        }
    }

    fn advance(&mut self) -> bool {
        let l = self.parts.len();
        if l == 1 {
            return false;
        }
        let mut suffix = 0u64;
        for j in (0..l - 1).rev() {
            suffix += self.parts[j + 1];
            if suffix > 0 {
                self.parts[j] += 1;
                for p in &mut self.parts[j + 1..] {
                    *p = 0;
                }
                self.parts[l - 1] = suffix - 1;
                return true;
            }
        }
        false
    }
}

impl Iterator for Compositions {
    type Item = CompositionVec;

    fn next(&mut self) -> Option<CompositionVec> {
        if self.done {
            return None;
        }
        if self.started && !self.advance() {
            self.done = true;
            return None;
        }
        self.started = true;
        Some(CompositionVec::new(self.parts.clone()))
    }
}

/// Each multiset {λ_i} once (sorted descending, zero-padded to `parts` slots)
/// together with the number of distinct orderings it represents.
pub fn enumerate_partitions_with_orbit(n: u64, parts: usize) -> PartitionsWithOrbit {
    assert!(parts >= 1, "need at least one part");
    assert!(parts <= 20, "orbit counts overflow u64 past 20 parts");
    PartitionsWithOrbit {
        parts: {
            let mut v = vec![0u64; parts];
            v[0] = n;
            v
        },
        started: false,
        done: false,
    }
}

#[derive(Debug, Clone)]
pub struct PartitionsWithOrbit {
    parts: Vec<u64>,
    started: bool,
    done: bool,
}

impl PartitionsWithOrbit {
    fn advance(&mut self) -> bool {
        let l = self.parts.len();
        // Donate one unit from the rightmost part > 1 whose suffix can absorb
        // the freed mass under the new cap; greedy refill keeps descending order.
        for j in (0..l).rev() {
            if self.parts[j] <= 1 {
                continue;
            }
            let freed: u64 = 1 + self.parts[j + 1..].iter().sum::<u64>();
            let cap = self.parts[j] - 1;
            let slots = (l - j - 1) as u64;
            if freed > cap * slots {
                continue;
            }
            self.parts[j] = cap;
            let mut rem = freed;
            for p in &mut self.parts[j + 1..] {
                let take = rem.min(cap);
                *p = take;
                rem -= take;
            }
            return true;
        }
        false
    }

    fn orbit(&self) -> u64 {
        // parts is sorted descending, so equal values are adjacent.
        let mut orbit = factorial_u64(self.parts.len() as u64);
        let mut run = 1u64;
        for i in 1..self.parts.len() {
            if self.parts[i] == self.parts[i - 1] {
                run += 1;
            } else {
                orbit /= factorial_u64(run);
                run = 1;
            }
        }
        orbit / factorial_u64(run)
    }
}

fn factorial_u64(m: u64) -> u64 {
    (2..=m).product::<u64>().max(1)
}

impl Iterator for PartitionsWithOrbit {
    type Item = (CompositionVec, u64);

    fn next(&mut self) -> Option<(CompositionVec, u64)> {
        if self.done {
            return None;
        }
        if self.started && !self.advance() {
            self.done = true;
            return None;
        }
        self.started = true;
        Some((CompositionVec::new(self.parts.clone()), self.orbit()))
    }
}
