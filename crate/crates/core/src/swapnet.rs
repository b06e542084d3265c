//! Nearest-neighbour fermionic swap networks that gather a clique's modes
//! into the contiguous layout `(0,1), (2,3), …` within one spin block.
//!
//! Each mode `l` carries a slot: hopping op `m` owns slots `2m` and `2m+1`,
//! number operators take the slots after all pairs, and unused modes are
//! empty (`None`, ordered after every slot). Odd-even transposition sort
//! over the slot vector, odd pairs first, yields the swap layers.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::universe::HoppingOp;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SwapError {
    #[error("mode {0} used twice in one spin block")]
    RepeatedMode(usize),
    #[error("mode {0} outside block of size {1}")]
    OutOfRange(usize, usize),
    #[error("ops of mixed spin passed to one block")]
    MixedSpin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    fn first(self) -> usize {
        match self {
            Parity::Odd => 1,
            Parity::Even => 0,
        }
    }

    fn flip(self) -> Parity {
        match self {
            Parity::Odd => Parity::Even,
            Parity::Even => Parity::Odd,
        }
    }
}

/// Disjoint nearest-neighbour swaps; each entry `l` swaps modes `l, l+1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapLayer {
    pub parity: Parity,
    pub swaps: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapNetwork {
    pub layers: Vec<SwapLayer>,
    /// `permutation[l]` is the final position of the mode that started at `l`.
    pub permutation: Vec<usize>,
}

impl SwapNetwork {
    pub fn swap_count(&self) -> usize {
        self.layers.iter().map(|l| l.swaps.len()).sum()
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// The op after relabelling its modes by the permutation.
    pub fn relabel(&self, op: HoppingOp) -> HoppingOp {
        HoppingOp::new(self.permutation[op.p], self.permutation[op.q], op.spin)
    }
}

pub type Slot = Option<usize>;

fn slot_key(s: Slot) -> usize {
    s.unwrap_or(usize::MAX)
}

/// Slot vector `p_l` for the ops of one spin block of `n` modes. Hopping
/// ops keep their given order; number operators follow them.
pub fn position_vector(ops: &[HoppingOp], n: usize) -> Result<Vec<Slot>, SwapError> {
    if ops.windows(2).any(|w| w[0].spin != w[1].spin) {
        return Err(SwapError::MixedSpin);
    }
    let mut slots = vec![None; n];
    let mut next = 0;
    let hops = ops.iter().filter(|o| !o.is_number());
    let numbers = ops.iter().filter(|o| o.is_number());
    for op in hops.chain(numbers) {
        for mode in op.indices() {
            if mode >= n {
                return Err(SwapError::OutOfRange(mode, n));
            }
            if slots[mode].is_some() {
                return Err(SwapError::RepeatedMode(mode));
            }
            slots[mode] = Some(next);
            next += 1;
        }
    }
    Ok(slots)
}

/// Odd-even transposition sort. Empty phases are dropped, so the layer
/// count is at most `p.len()`.
pub fn odd_even_sort(p: &[Slot]) -> SwapNetwork {
    let n = p.len();
    let mut slots = p.to_vec();
    // original mode currently sitting at each position
    let mut origin: Vec<usize> = (0..n).collect();
    let mut layers = Vec::new();
    let mut parity = Parity::Odd;
    for _ in 0..n {
        if slots.windows(2).all(|w| slot_key(w[0]) <= slot_key(w[1])) {
            break;
        }
        let mut swaps = Vec::new();
        let mut l = parity.first();
        while l + 1 < n {
            if slot_key(slots[l]) > slot_key(slots[l + 1]) {
                slots.swap(l, l + 1);
                origin.swap(l, l + 1);
                swaps.push(l);
            }
            l += 2;
        }
        if !swaps.is_empty() {
            layers.push(SwapLayer { parity, swaps });
        }
        parity = parity.flip();
    }
    debug_assert!(slots.windows(2).all(|w| slot_key(w[0]) <= slot_key(w[1])));
    let mut permutation = vec![0; n];
    for (pos, &orig) in origin.iter().enumerate() {
        permutation[orig] = pos;
    }
    SwapNetwork {
        layers,
        permutation,
    }
}

/// Network for the ops of one spin block.
pub fn build_network(ops: &[HoppingOp], n: usize) -> Result<SwapNetwork, SwapError> {
    Ok(odd_even_sort(&position_vector(ops, n)?))
}

/// Whether `net` moves hopping op `m` of `ops` onto modes `(2m, 2m+1)` and
/// the number operators onto the modes right after, in order.
pub fn is_sorted_layout(ops: &[HoppingOp], net: &SwapNetwork) -> bool {
    let hops = ops.iter().filter(|o| !o.is_number());
    let numbers = ops.iter().filter(|o| o.is_number());
    hops.chain(numbers)
        .flat_map(|op| op.indices())
        .enumerate()
        .all(|(slot, mode)| net.permutation.get(mode) == Some(&slot))
}
