//! Hamiltonian term classification and the full set of measurement cliques.
//!
//! The universe is made of four families:
//!
//! | family       | cliques        | terms measured                  |
//! |--------------|----------------|---------------------------------|
//! | `Part`       | 1              | (1-1), (2-1), (2-4)             |
//! | `OneBody`    | 2·M            | (1-2), (2-2)                    |
//! | `DiffSpin`   | M²             | (2-3)                           |
//! | `SameSpin`   | Π²             | (2-6), (2-7)                    |
//!
//! where M is the number of round-robin rounds and Π the plane order. For
//! even `N` with `N - 1` prime this totals `2N² - 2N + 1`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cover::{build_cover_for, PairClique};
use crate::gf::{smallest_prime_at_least, GfError, Prime};
use crate::plane::Point;
use crate::roundrobin::{build_rounds, Round, RoundRobinError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UniverseError {
    #[error("need at least 2 orbitals, got {0}")]
    TooFewOrbitals(usize),
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    RoundRobin(#[from] RoundRobinError),
    #[error("no clique covers term {0}")]
    CoverageViolation(TermKey),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];

    pub fn opposite(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }

    /// Position of the spin block in the up-then-down layout.
    pub fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spin::Up => "↑",
            Spin::Down => "↓",
        })
    }
}

/// `A_{pq,σ}` for `p < q`; for `p == q` the operator measured is the
/// occupation `n_{pσ}` (and `A_{pp,σ} = 2 n_{pσ}`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HoppingOp {
    pub spin: Spin,
    pub p: usize,
    pub q: usize,
}

impl HoppingOp {
    pub fn new(p: usize, q: usize, spin: Spin) -> Self {
        HoppingOp {
            spin,
            p: p.min(q),
            q: p.max(q),
        }
    }

    pub fn number(p: usize, spin: Spin) -> Self {
        HoppingOp { spin, p, q: p }
    }

    pub fn is_number(self) -> bool {
        self.p == self.q
    }

    /// Orbital indices touched (one for a number operator).
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let second = (!self.is_number()).then_some(self.q);
        std::iter::once(self.p).chain(second)
    }

    /// Index-disjointness criterion for commutation.
    pub fn commutes_with(self, other: HoppingOp) -> bool {
        if self.spin != other.spin || self == other {
            return true;
        }
        if self.is_number() && other.is_number() {
            return true;
        }
        !self.indices().any(|i| other.indices().any(|j| i == j))
    }
}

impl fmt::Display for HoppingOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_number() {
            write!(f, "n{}{}", self.p, self.spin)
        } else {
            write!(f, "A{}{}{}", self.p, self.q, self.spin)
        }
    }
}

/// An independent expectation value needed for the energy. Factors with
/// `p == q` are occupations. Two-body keys keep their factors ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TermKey {
    One(HoppingOp),
    Two(HoppingOp, HoppingOp),
}

impl TermKey {
    pub fn two(a: HoppingOp, b: HoppingOp) -> Self {
        if a <= b {
            TermKey::Two(a, b)
        } else {
            TermKey::Two(b, a)
        }
    }

    pub fn factors(&self) -> Vec<HoppingOp> {
        match *self {
            TermKey::One(a) => vec![a],
            TermKey::Two(a, b) => vec![a, b],
        }
    }

    pub fn term_type(&self) -> TermType {
        match *self {
            TermKey::One(a) if a.is_number() => TermType::Number,
            TermKey::One(_) => TermType::Hopping,
            TermKey::Two(a, b) => {
                let same = a.spin == b.spin;
                match (a.is_number(), b.is_number(), same) {
                    (true, true, false) => TermType::NumberNumberDiff,
                    (true, true, true) => TermType::NumberNumberSame,
                    (false, false, false) => TermType::HoppingHoppingDiff,
                    (false, false, true) => TermType::HoppingHoppingSame,
                    (_, _, false) => TermType::HoppingNumberDiff,
                    (_, _, true) => TermType::HoppingNumberSame,
                }
            }
        }
    }
}

impl fmt::Display for TermKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermKey::One(a) => write!(f, "{a}"),
            TermKey::Two(a, b) => write!(f, "{a}·{b}"),
        }
    }
}

/// Term types in the usual labelling; (2-5) coincides with (1-2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TermType {
    /// (1-1) `n_{pσ}`
    Number,
    /// (1-2) `A_{pq,σ}`
    Hopping,
    /// (2-1) `n_{pσ} n_{qσ̄}`
    NumberNumberDiff,
    /// (2-2) `A_{pq,σ} n_{rσ̄}`
    HoppingNumberDiff,
    /// (2-3) `A_{pq,σ} A_{rs,σ̄}`
    HoppingHoppingDiff,
    /// (2-4) `n_{pσ} n_{qσ}`
    NumberNumberSame,
    /// (2-6) `A_{pq,σ} n_{rσ}`
    HoppingNumberSame,
    /// (2-7) `A_{pq,σ} A_{rs,σ}`
    HoppingHoppingSame,
}

impl TermType {
    pub fn label(self) -> &'static str {
        match self {
            TermType::Number => "(1-1)",
            TermType::Hopping => "(1-2)",
            TermType::NumberNumberDiff => "(2-1)",
            TermType::HoppingNumberDiff => "(2-2)",
            TermType::HoppingHoppingDiff => "(2-3)",
            TermType::NumberNumberSame => "(2-4)",
            TermType::HoppingNumberSame => "(2-6)",
            TermType::HoppingHoppingSame => "(2-7)",
        }
    }

    /// Family that measures this term type.
    pub fn family(self) -> Family {
        match self {
            TermType::Number | TermType::NumberNumberDiff | TermType::NumberNumberSame => {
                Family::Part
            }
            TermType::Hopping | TermType::HoppingNumberDiff => Family::OneBody,
            TermType::HoppingHoppingDiff => Family::DiffSpin,
            TermType::HoppingNumberSame | TermType::HoppingHoppingSame => Family::SameSpin,
        }
    }
}

/// Every independent term, each exactly once, in canonical order.
pub fn classify_terms(n: usize) -> Vec<TermKey> {
    let mut terms = Vec::new();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
        .collect();
    for spin in Spin::BOTH {
        for p in 0..n {
            terms.push(TermKey::One(HoppingOp::number(p, spin)));
        }
        for &(p, q) in &pairs {
            let a = HoppingOp::new(p, q, spin);
            terms.push(TermKey::One(a));
            for r in 0..n {
                // (2-2)
                terms.push(TermKey::two(a, HoppingOp::number(r, spin.opposite())));
                // (2-6)
                if r != p && r != q {
                    terms.push(TermKey::two(a, HoppingOp::number(r, spin)));
                }
            }
            for &(r, s) in &pairs {
                let b = HoppingOp::new(r, s, spin);
                if a < b && [p, q].iter().all(|i| *i != r && *i != s) {
                    // (2-7)
                    terms.push(TermKey::two(a, b));
                }
            }
        }
        for &(p, q) in &pairs {
            // (2-4)
            terms.push(TermKey::two(
                HoppingOp::number(p, spin),
                HoppingOp::number(q, spin),
            ));
        }
    }
    for p in 0..n {
        for q in 0..n {
            // (2-1), including p == q
            terms.push(TermKey::two(
                HoppingOp::number(p, Spin::Up),
                HoppingOp::number(q, Spin::Down),
            ));
        }
    }
    for &(p, q) in &pairs {
        for &(r, s) in &pairs {
            // (2-3)
            terms.push(TermKey::two(
                HoppingOp::new(p, q, Spin::Up),
                HoppingOp::new(r, s, Spin::Down),
            ));
        }
    }
    terms.sort();
    terms.dedup();
    terms
}

/// Expands the symmetrized product `½{A_x, A_y}` into independent terms.
/// Inputs are `(p, q, σ)` triples of `A_{pq,σ}` with `A_{pp,σ} = 2 n_{pσ}`.
pub fn expand_product(x: (usize, usize, Spin), y: (usize, usize, Spin)) -> Vec<(TermKey, f64)> {
    let factor = |(p, q, s): (usize, usize, Spin)| {
        let op = HoppingOp::new(p, q, s);
        (op, if op.is_number() { 2.0 } else { 1.0 })
    };
    let (a, ca) = factor(x);
    let (b, cb) = factor(y);
    if a.spin != b.spin {
        return vec![(TermKey::two(a, b), ca * cb)];
    }
    let spin = a.spin;
    match (a.is_number(), b.is_number()) {
        (true, true) if a == b => vec![(TermKey::One(a), 4.0)],
        (true, true) => vec![(TermKey::two(a, b), 4.0)],
        (true, false) | (false, true) => {
            let (num, hop) = if a.is_number() { (a, b) } else { (b, a) };
            if hop.p == num.p || hop.q == num.p {
                // n_p A_pq + A_pq n_p = A_pq
                vec![(TermKey::One(hop), 1.0)]
            } else {
                vec![(TermKey::two(num, hop), 2.0)]
            }
        }
        (false, false) => {
            let shared: Vec<usize> = a
                .indices()
                .filter(|i| b.indices().any(|j| j == *i))
                .collect();
            match shared.as_slice() {
                [] => vec![(TermKey::two(a, b), 1.0)],
                [t] => {
                    let other = |op: HoppingOp| if op.p == *t { op.q } else { op.p };
                    let ab = HoppingOp::new(other(a), other(b), spin);
                    vec![
                        (TermKey::One(ab), 0.5),
                        (TermKey::two(HoppingOp::number(*t, spin), ab), -1.0),
                    ]
                }
                _ => {
                    // A_pq² = n_p + n_q - 2 n_p n_q
                    let np = HoppingOp::number(a.p, spin);
                    let nq = HoppingOp::number(a.q, spin);
                    vec![
                        (TermKey::One(np), 1.0),
                        (TermKey::One(nq), 1.0),
                        (TermKey::two(np, nq), -2.0),
                    ]
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Part,
    OneBody,
    DiffSpin,
    SameSpin,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::Part,
        Family::OneBody,
        Family::DiffSpin,
        Family::SameSpin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Part => "part",
            Family::OneBody => "one_body",
            Family::DiffSpin => "diff_spin",
            Family::SameSpin => "same_spin",
        }
    }
}

/// Where a clique came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Source {
    Part,
    Round { round: usize, spin: Spin },
    RoundPair { up: usize, down: usize },
    Anchor { point: Point },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementClique {
    pub id: usize,
    pub family: Family,
    pub ops: Vec<HoppingOp>,
    pub source: Source,
}

impl MeasurementClique {
    pub fn contains(&self, op: HoppingOp) -> bool {
        self.ops.binary_search(&op).is_ok()
    }

    pub fn ops_for(&self, spin: Spin) -> impl Iterator<Item = HoppingOp> + '_ {
        self.ops.iter().copied().filter(move |o| o.spin == spin)
    }

    /// First pair of non-commuting ops, if any.
    pub fn commutation_violation(&self) -> Option<(HoppingOp, HoppingOp)> {
        for (i, &a) in self.ops.iter().enumerate() {
            for &b in &self.ops[i + 1..] {
                if !a.commutes_with(b) {
                    return Some((a, b));
                }
            }
        }
        None
    }
}

#[derive(Debug, Clone)]
pub struct Universe {
    n: usize,
    prime: Prime,
    rounds: Vec<Round>,
    pair_cliques: Vec<PairClique>,
    cliques: Vec<MeasurementClique>,
    by_op: HashMap<HoppingOp, Vec<usize>>,
}

impl Universe {
    pub fn build(n: usize) -> Result<Universe, UniverseError> {
        if n < 2 {
            return Err(UniverseError::TooFewOrbitals(n));
        }
        let prime = plane_prime(n)?;
        let rounds = build_rounds(n)?;
        let (pair_cliques, _) = build_cover_for(n, prime);
        Ok(Self::from_parts(n, prime, rounds, pair_cliques))
    }

    /// Assembles the universe from explicit rounds and plane cliques.
    pub fn from_parts(
        n: usize,
        prime: Prime,
        rounds: Vec<Round>,
        pair_cliques: Vec<PairClique>,
    ) -> Universe {
        let mut cliques = Vec::new();
        let mut push = |family, mut ops: Vec<HoppingOp>, source| {
            ops.sort();
            ops.dedup();
            let id = cliques.len();
            cliques.push(MeasurementClique {
                id,
                family,
                ops,
                source,
            });
        };
        let numbers = |spin: Spin| (0..n).map(move |p| HoppingOp::number(p, spin));
        let hops = |round: &Round, spin: Spin| {
            round
                .pairs
                .iter()
                .map(move |&(p, q)| HoppingOp::new(p, q, spin))
                .collect::<Vec<_>>()
        };

        push(
            Family::Part,
            numbers(Spin::Up).chain(numbers(Spin::Down)).collect(),
            Source::Part,
        );
        for spin in Spin::BOTH {
            for (i, round) in rounds.iter().enumerate() {
                let mut ops = hops(round, spin);
                ops.extend(numbers(spin.opposite()));
                push(Family::OneBody, ops, Source::Round { round: i, spin });
            }
        }
        for (i, up) in rounds.iter().enumerate() {
            for (j, down) in rounds.iter().enumerate() {
                let mut ops = hops(up, Spin::Up);
                ops.extend(hops(down, Spin::Down));
                push(Family::DiffSpin, ops, Source::RoundPair { up: i, down: j });
            }
        }
        for pc in &pair_cliques {
            let ops = Spin::BOTH
                .iter()
                .flat_map(|&s| pc.members.iter().map(move |v| HoppingOp::new(v.p, v.q, s)))
                .collect();
            push(Family::SameSpin, ops, Source::Anchor { point: pc.anchor });
        }

        let mut by_op: HashMap<HoppingOp, Vec<usize>> = HashMap::new();
        for c in &cliques {
            for &op in &c.ops {
                by_op.entry(op).or_default().push(c.id);
            }
        }
        Universe {
            n,
            prime,
            rounds,
            pair_cliques,
            cliques,
            by_op,
        }
    }

    pub fn n_orbitals(&self) -> usize {
        self.n
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn rounds(&self) -> &[Round] {
        &self.rounds
    }

    pub fn pair_cliques(&self) -> &[PairClique] {
        &self.pair_cliques
    }

    pub fn cliques(&self) -> &[MeasurementClique] {
        &self.cliques
    }

    pub fn family_count(&self, family: Family) -> usize {
        self.cliques.iter().filter(|c| c.family == family).count()
    }

    /// Lowest-id clique of the term's family that holds every factor.
    pub fn route_term(&self, term: &TermKey) -> Result<usize, UniverseError> {
        let family = term.term_type().family();
        let factors = term.factors();
        let candidates = self
            .by_op
            .get(&factors[0])
            .ok_or(UniverseError::CoverageViolation(*term))?;
        candidates
            .iter()
            .copied()
            .find(|&id| {
                let c = &self.cliques[id];
                c.family == family && factors[1..].iter().all(|&f| c.contains(f))
            })
            .ok_or(UniverseError::CoverageViolation(*term))
    }

    /// Routes every term of `classify_terms`.
    pub fn routing(&self) -> Result<Vec<(TermKey, usize)>, UniverseError> {
        classify_terms(self.n)
            .into_iter()
            .map(|t| self.route_term(&t).map(|id| (t, id)))
            .collect()
    }
}

/// Plane order for `n` orbitals: the smallest prime `Π ≥ max(n - 1, 2)`.
pub fn plane_prime(n: usize) -> Result<Prime, GfError> {
    smallest_prime_at_least((n as u64).saturating_sub(1).max(2))
}

pub fn build_universe(n: usize) -> Result<Vec<MeasurementClique>, UniverseError> {
    Ok(Universe::build(n)?.cliques)
}

/// `2N² - 2N + 1`.
pub fn closed_form_clique_count(n: usize) -> usize {
    2 * n * n - 2 * n + 1
}
