//! Round-robin pairing by the circle method.
//!
//! Participant 0 stays fixed while the others rotate one seat per round.
//! For odd `n` a phantom participant is added and whoever meets it sits
//! the round out.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RoundRobinError {
    #[error("round-robin needs at least 2 participants, got {0}")]
    InvalidSize(usize),
}

/// One round: pairwise disjoint pairs `(p, q)` with `p < q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round {
    pub pairs: Vec<(usize, usize)>,
}

impl Round {
    pub fn contains(&self, p: usize, q: usize) -> bool {
        let key = (p.min(q), p.max(q));
        self.pairs.contains(&key)
    }
}

pub fn build_rounds(n: usize) -> Result<Vec<Round>, RoundRobinError> {
    if n < 2 {
        return Err(RoundRobinError::InvalidSize(n));
    }
    let seats = n + n % 2;
    let rotating = seats - 1;
    let rounds = (0..rotating)
        .map(|r| {
            let seat = |i: usize| {
                if i == 0 {
                    0
                } else {
                    1 + (i - 1 + r) % rotating
                }
            };
            let mut pairs: Vec<(usize, usize)> = (0..seats / 2)
                .map(|i| (seat(i), seat(seats - 1 - i)))
                .filter(|&(a, b)| a < n && b < n)
                .map(|(a, b)| (a.min(b), a.max(b)))
                .collect();
            pairs.sort();
            Round { pairs }
        })
        .collect();
    Ok(rounds)
}
