//! Dense statevector simulation: circuit application, exact and sampled
//! estimation over a schedule, and an independent fermionic reference for
//! operators and the Hamiltonian.
//!
//! Reference operators are built from creation and annihilation operators
//! on the occupation basis and then relabelled into the mapping's basis, so
//! they share no code with the Pauli forms used for decoding.

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

use crate::circuits::{DecodeTable, Mapping, MeasCircuit};
use crate::hamiltonian::Hamiltonian;
use crate::matrix::{apply_local, Matrix, C64, ZERO};
use crate::schedule::{Schedule, ScheduleError};
use crate::universe::{Family, HoppingOp, Spin, TermKey};

pub const MAX_QUBITS: usize = 14;
pub const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("{0} qubits exceeds the simulator limit of {MAX_QUBITS}")]
    SizeLimit(usize),
    #[error("bad state: {0}")]
    BadState(String),
    #[error("shot count must be at least 1")]
    ZeroShots,
    #[error("no routed clique for term {0}")]
    Coverage(TermKey),
    #[error("hamiltonian has {got} orbitals, schedule has {want}")]
    OrbitalMismatch { got: usize, want: usize },
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

/// Occupation bits of a basis index in `mapping`. Bits above the register
/// are garbage and must be masked by the caller.
pub fn to_occupation(index: usize, mapping: Mapping) -> usize {
    match mapping {
        Mapping::Jw => index,
        Mapping::Parity => index ^ (index << 1),
    }
}

/// Basis index in `mapping` of an occupation pattern.
pub fn from_occupation(occ: usize, mapping: Mapping) -> usize {
    match mapping {
        Mapping::Jw => occ,
        Mapping::Parity => {
            let mut b = 0;
            let mut acc = 0;
            let mut rest = occ;
            let mut j = 0;
            while rest != 0 {
                acc ^= rest & 1;
                rest >>= 1;
                b |= acc << j;
                j += 1;
            }
            // bits above the highest occupied mode keep the final parity
            if acc == 1 {
                b |= !0usize << j;
            }
            b
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// Checks length and unit norm.
    pub fn new(amps: Vec<C64>) -> Result<StateVector, SimError> {
        let len = amps.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(SimError::BadState(format!(
                "length {len} is not a power of two"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(SimError::SizeLimit(n_qubits));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(SimError::BadState(format!("norm {norm} is not 1")));
        }
        Ok(StateVector { n_qubits, amps })
    }

    /// Rescales to unit norm first.
    pub fn normalized(amps: Vec<C64>) -> Result<StateVector, SimError> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(SimError::BadState(format!("cannot normalize norm {norm}")));
        }
        Self::new(amps.into_iter().map(|a| a / norm).collect())
    }

    /// State whose amplitudes are given on the occupation basis.
    pub fn from_occupation_amplitudes(
        amps: Vec<C64>,
        mapping: Mapping,
    ) -> Result<StateVector, SimError> {
        if !amps.len().is_power_of_two() || amps.len() < 2 {
            return Err(SimError::BadState(format!(
                "length {} is not a power of two",
                amps.len()
            )));
        }
        let mut out = vec![ZERO; amps.len()];
        let mask = amps.len() - 1;
        for (occ, a) in amps.into_iter().enumerate() {
            out[from_occupation(occ, mapping) & mask] = a;
        }
        Self::normalized(out)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &[C64]) -> C64 {
        self.amps.iter().zip(other).map(|(a, b)| a.conj() * b).sum()
    }
}

/// Normalized complex Gaussian state over `2n` modes.
pub fn random_state(
    n_orbitals: usize,
    mapping: Mapping,
    seed: u64,
) -> Result<StateVector, SimError> {
    let nq = 2 * n_orbitals;
    if nq > MAX_QUBITS {
        return Err(SimError::SizeLimit(nq));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps = (0..1usize << nq)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    StateVector::from_occupation_amplitudes(amps, mapping)
}

/// Basis state from occupations, one character per mode in up-then-down
/// order (`'1'` occupied).
pub fn basis_state(bits: &str, mapping: Mapping) -> Result<StateVector, SimError> {
    let nq = bits.len();
    if nq == 0 || !nq.is_multiple_of(2) {
        return Err(SimError::BadState(format!("{nq} occupations, expected 2N")));
    }
    if nq > MAX_QUBITS {
        return Err(SimError::SizeLimit(nq));
    }
    let mut occ = 0;
    for (j, c) in bits.chars().enumerate() {
        match c {
            '0' => {}
            '1' => occ |= 1 << j,
            other => {
                return Err(SimError::BadState(format!(
                    "unexpected character {other:?}"
                )))
            }
        }
    }
    let mut amps = vec![ZERO; 1 << nq];
    amps[occ] = C64::new(1.0, 0.0);
    StateVector::from_occupation_amplitudes(amps, mapping)
}

pub fn apply_circuit(state: &StateVector, circuit: &MeasCircuit) -> Result<StateVector, SimError> {
    let nq = circuit.n_qubits();
    if nq > MAX_QUBITS {
        return Err(SimError::SizeLimit(nq));
    }
    if nq != state.n_qubits {
        return Err(SimError::BadState(format!(
            "state has {} qubits, circuit has {nq}",
            state.n_qubits
        )));
    }
    let mut amps = state.amps.clone();
    for g in &circuit.gates {
        apply_local(&mut amps, &g.qubits, &g.unitary());
    }
    Ok(StateVector { n_qubits: nq, amps })
}

/// Creation (`true`) or annihilation of a global mode.
pub type Ladder = (bool, usize);

fn ladder(occ: usize, (create, mode): Ladder) -> Option<(usize, f64)> {
    let bit = 1usize << mode;
    if (occ & bit != 0) == create {
        return None;
    }
    let sign = if (occ & (bit - 1)).count_ones() % 2 == 1 {
        -1.0
    } else {
        1.0
    };
    Some((occ ^ bit, sign))
}

/// Adds `coeff · L_1 L_2 … L_k |ψ⟩` into `out`; the last ladder acts first.
pub fn apply_ladders(
    psi: &[C64],
    mapping: Mapping,
    ladders: &[Ladder],
    coeff: C64,
    out: &mut [C64],
) {
    let mask = psi.len() - 1;
    for (i, &a) in psi.iter().enumerate() {
        if a == ZERO {
            continue;
        }
        let mut occ = to_occupation(i, mapping) & mask;
        let mut sign = 1.0;
        let mut alive = true;
        for &l in ladders.iter().rev() {
            match ladder(occ, l) {
                Some((o, s)) => {
                    occ = o;
                    sign *= s;
                }
                None => {
                    alive = false;
                    break;
                }
            }
        }
        if alive {
            out[from_occupation(occ, mapping) & mask] += coeff * sign * a;
        }
    }
}

fn mode(p: usize, spin: Spin, n: usize) -> usize {
    spin.index() * n + p
}

/// `A_{pq,σ} ψ`, with `A_{pp,σ} = 2 n_{pσ}`.
pub fn apply_hopping(
    psi: &[C64],
    p: usize,
    q: usize,
    spin: Spin,
    mapping: Mapping,
    n: usize,
) -> Vec<C64> {
    let mut out = vec![ZERO; psi.len()];
    let (mp, mq) = (mode(p, spin, n), mode(q, spin, n));
    let one = C64::new(1.0, 0.0);
    apply_ladders(psi, mapping, &[(true, mp), (false, mq)], one, &mut out);
    apply_ladders(psi, mapping, &[(true, mq), (false, mp)], one, &mut out);
    out
}

/// The measured observable of a clique op: `n_{pσ}` when `p == q`.
pub fn apply_op(psi: &[C64], op: HoppingOp, mapping: Mapping, n: usize) -> Vec<C64> {
    if op.is_number() {
        let m = mode(op.p, op.spin, n);
        let mut out = vec![ZERO; psi.len()];
        apply_ladders(
            psi,
            mapping,
            &[(true, m), (false, m)],
            C64::new(1.0, 0.0),
            &mut out,
        );
        out
    } else {
        apply_hopping(psi, op.p, op.q, op.spin, mapping, n)
    }
}

/// `⟨ψ| O_1 O_2 |ψ⟩` for a term's factors.
pub fn term_expectation(state: &StateVector, term: &TermKey, mapping: Mapping, n: usize) -> C64 {
    let mut v = state.amps.clone();
    for f in term.factors().into_iter().rev() {
        v = apply_op(&v, f, mapping, n);
    }
    state.inner(&v)
}

fn dense(n_qubits: usize, f: impl Fn(&[C64]) -> Vec<C64>) -> Result<Matrix, SimError> {
    if n_qubits > MAX_QUBITS {
        return Err(SimError::SizeLimit(n_qubits));
    }
    let dim = 1 << n_qubits;
    let mut m = Matrix::zeros(dim);
    let mut e = vec![ZERO; dim];
    for j in 0..dim {
        e[j] = C64::new(1.0, 0.0);
        for (i, v) in f(&e).into_iter().enumerate() {
            m[(i, j)] = v;
        }
        e[j] = ZERO;
    }
    Ok(m)
}

/// Dense matrix of a clique op (number operator when `p == q`).
pub fn operator_matrix(op: HoppingOp, mapping: Mapping, n: usize) -> Result<Matrix, SimError> {
    dense(2 * n, |v| apply_op(v, op, mapping, n))
}

/// Dense matrix of `A_{pq,σ}` taken literally, so `A_{pp,σ} = 2 n_{pσ}`.
pub fn hopping_matrix(
    p: usize,
    q: usize,
    spin: Spin,
    mapping: Mapping,
    n: usize,
) -> Result<Matrix, SimError> {
    dense(2 * n, |v| apply_hopping(v, p, q, spin, mapping, n))
}

/// Dense matrix of a term's factor product.
pub fn term_matrix(term: &TermKey, mapping: Mapping, n: usize) -> Result<Matrix, SimError> {
    dense(2 * n, |v| {
        let mut v = v.to_vec();
        for f in term.factors().into_iter().rev() {
            v = apply_op(&v, f, mapping, n);
        }
        v
    })
}

/// `H ψ` from the second-quantized form with `a†a` and `a†a a†a` terms.
pub fn apply_hamiltonian(psi: &[C64], ham: &Hamiltonian, mapping: Mapping) -> Vec<C64> {
    let n = ham.n_orbitals();
    let mut out: Vec<C64> = psi.iter().map(|a| a * ham.e_nuc()).collect();
    for s in Spin::BOTH {
        for p in 0..n {
            for q in 0..n {
                let h = ham.h(s, p, q);
                if h != 0.0 {
                    let l = [(true, mode(p, s, n)), (false, mode(q, s, n))];
                    apply_ladders(psi, mapping, &l, C64::new(h, 0.0), &mut out);
                }
            }
        }
    }
    for s in Spin::BOTH {
        for t in Spin::BOTH {
            for p in 0..n {
                for q in 0..n {
                    for r in 0..n {
                        for u in 0..n {
                            let g = ham.g(s, t, p, q, r, u);
                            if g == 0.0 {
                                continue;
                            }
                            let l = [
                                (true, mode(p, s, n)),
                                (false, mode(q, s, n)),
                                (true, mode(r, t, n)),
                                (false, mode(u, t, n)),
                            ];
                            apply_ladders(psi, mapping, &l, C64::new(0.5 * g, 0.0), &mut out);
                        }
                    }
                }
            }
        }
    }
    out
}

pub fn hamiltonian_matrix(ham: &Hamiltonian, mapping: Mapping) -> Result<Matrix, SimError> {
    dense(2 * ham.n_orbitals(), |v| apply_hamiltonian(v, ham, mapping))
}

/// `Re ⟨ψ|H|ψ⟩` from the reference operator.
pub fn exact_energy(state: &StateVector, ham: &Hamiltonian, mapping: Mapping) -> f64 {
    state
        .inner(&apply_hamiltonian(&state.amps, ham, mapping))
        .re
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectationReport {
    /// Every independent term: `⟨A⟩`, `⟨n⟩` and products.
    pub terms: BTreeMap<TermKey, f64>,
    pub energy: Option<f64>,
    /// Standard error of the energy in sampling mode.
    pub energy_stderr: Option<f64>,
    /// Energy contribution measured by each family (constant excluded).
    pub family_energy: BTreeMap<Family, f64>,
    pub shots_per_clique: u64,
}

impl ExpectationReport {
    pub fn one_body(&self) -> impl Iterator<Item = (HoppingOp, f64)> + '_ {
        self.terms.iter().filter_map(|(k, &v)| match *k {
            TermKey::One(op) => Some((op, v)),
            TermKey::Two(..) => None,
        })
    }

    pub fn two_body(&self) -> impl Iterator<Item = ((HoppingOp, HoppingOp), f64)> + '_ {
        self.terms.iter().filter_map(|(k, &v)| match *k {
            TermKey::Two(a, b) => Some(((a, b), v)),
            TermKey::One(_) => None,
        })
    }

    pub fn max_abs_diff(&self, other: &ExpectationReport) -> f64 {
        let mut d = 0.0f64;
        for (k, v) in &self.terms {
            d = d.max(other.terms.get(k).map_or(f64::INFINITY, |w| (v - w).abs()));
        }
        if let (Some(a), Some(b)) = (self.energy, other.energy) {
            d = d.max((a - b).abs());
        }
        d
    }
}

fn term_value(tables: &[&DecodeTable], outcome: usize) -> f64 {
    tables.iter().map(|t| t.value(outcome) as f64).product()
}

struct CliqueJob<'a> {
    circuit: &'a MeasCircuit,
    id: usize,
    family: Family,
    terms: Vec<(TermKey, Vec<&'a DecodeTable>, f64)>,
}

fn jobs<'a>(
    schedule: &'a Schedule,
    ham: Option<&Hamiltonian>,
) -> Result<(f64, Vec<CliqueJob<'a>>), SimError> {
    let routing = schedule.routing()?;
    let (constant, coefs) = match ham {
        Some(h) => {
            if h.n_orbitals() != schedule.n_orbitals {
                return Err(SimError::OrbitalMismatch {
                    got: h.n_orbitals(),
                    want: schedule.n_orbitals,
                });
            }
            h.term_coefficients()
        }
        None => (0.0, BTreeMap::new()),
    };
    if let Some(missing) = coefs.keys().find(|k| !routing.contains_key(k)) {
        return Err(SimError::Coverage(*missing));
    }
    let mut jobs: Vec<CliqueJob> = schedule
        .entries
        .iter()
        .map(|e| CliqueJob {
            circuit: &e.circuit,
            id: e.clique.id,
            family: e.clique.family,
            terms: Vec::new(),
        })
        .collect();
    for (term, id) in routing {
        let job = &mut jobs[id];
        let tables = term
            .factors()
            .iter()
            .map(|&f| job.circuit.decode_for(f).ok_or(SimError::Coverage(term)))
            .collect::<Result<Vec<_>, _>>()?;
        let c = coefs.get(&term).copied().unwrap_or(0.0);
        job.terms.push((term, tables, c));
    }
    jobs.retain(|j| !j.terms.is_empty());
    Ok((constant, jobs))
}

/// Per clique: family, term values, energy contribution, its variance.
type CliqueResult = (Family, Vec<(TermKey, f64)>, f64, f64);

fn assemble(
    constant: f64,
    with_energy: bool,
    results: Vec<CliqueResult>,
    shots: u64,
) -> ExpectationReport {
    let mut terms = BTreeMap::new();
    let mut family_energy = BTreeMap::new();
    let mut energy = constant;
    let mut var = 0.0;
    for (family, values, e, v) in results {
        terms.extend(values);
        *family_energy.entry(family).or_insert(0.0) += e;
        energy += e;
        var += v;
    }
    ExpectationReport {
        terms,
        energy: with_energy.then_some(energy),
        energy_stderr: (with_energy && shots > 0).then(|| var.sqrt()),
        family_energy,
        shots_per_clique: shots,
    }
}

/// Exact estimation: every clique's outcome distribution is computed from
/// the state after its circuit.
pub fn estimate_all(
    state: &StateVector,
    schedule: &Schedule,
    ham: Option<&Hamiltonian>,
) -> Result<ExpectationReport, SimError> {
    let (constant, jobs) = jobs(schedule, ham)?;
    let results = jobs
        .par_iter()
        .map(|job| {
            let probs = apply_circuit(state, job.circuit)?.probabilities();
            let mut values = Vec::with_capacity(job.terms.len());
            let mut e = 0.0;
            for (term, tables, c) in &job.terms {
                let v: f64 = probs
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| p != 0.0)
                    .map(|(b, p)| p * term_value(tables, b))
                    .sum();
                e += c * v;
                values.push((*term, v));
            }
            Ok((job.family, values, e, 0.0))
        })
        .collect::<Result<Vec<_>, SimError>>()?;
    Ok(assemble(constant, ham.is_some(), results, 0))
}

/// Histogram of `shots` outcomes after `circuit`.
pub fn sample_shots(
    state: &StateVector,
    circuit: &MeasCircuit,
    shots: u64,
    seed: u64,
) -> Result<BTreeMap<usize, u64>, SimError> {
    if shots == 0 {
        return Err(SimError::ZeroShots);
    }
    let probs = apply_circuit(state, circuit)?.probabilities();
    let dist = WeightedIndex::new(&probs).map_err(|e| SimError::BadState(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hist = BTreeMap::new();
    for _ in 0..shots {
        *hist.entry(dist.sample(&mut rng)).or_insert(0) += 1;
    }
    Ok(hist)
}

fn clique_seed(seed: u64, id: usize) -> u64 {
    seed ^ (id as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Sampling estimation with `shots` per clique. The energy error combines
/// the per-clique sample variances of the clique's energy estimator.
pub fn estimate_sampled(
    state: &StateVector,
    schedule: &Schedule,
    ham: Option<&Hamiltonian>,
    shots: u64,
    seed: u64,
) -> Result<ExpectationReport, SimError> {
    if shots == 0 {
        return Err(SimError::ZeroShots);
    }
    let (constant, jobs) = jobs(schedule, ham)?;
    let s = shots as f64;
    let results = jobs
        .par_iter()
        .map(|job| {
            let hist = sample_shots(state, job.circuit, shots, clique_seed(seed, job.id))?;
            let mut values = Vec::with_capacity(job.terms.len());
            for (term, tables, _) in &job.terms {
                let v: f64 = hist
                    .iter()
                    .map(|(&b, &k)| k as f64 * term_value(tables, b))
                    .sum();
                values.push((*term, v / s));
            }
            let (mut sum, mut sum2) = (0.0, 0.0);
            for (&b, &k) in &hist {
                let e: f64 = job.terms.iter().map(|(_, t, c)| c * term_value(t, b)).sum();
                sum += k as f64 * e;
                sum2 += k as f64 * e * e;
            }
            let mean = sum / s;
            let var = if shots > 1 {
                ((sum2 - s * mean * mean) / (s - 1.0)).max(0.0) / s
            } else {
                0.0
            };
            Ok((job.family, values, mean, var))
        })
        .collect::<Result<Vec<_>, SimError>>()?;
    Ok(assemble(constant, ham.is_some(), results, shots))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::emit;
    use crate::universe::Universe;

    #[test]
    fn parity_relabel_roundtrip() {
        for occ in 0..256usize {
            let b = from_occupation(occ, Mapping::Parity) & 0xff;
            assert_eq!(to_occupation(b, Mapping::Parity) & 0xff, occ);
            for j in 0..8 {
                let prefix = (occ & ((2 << j) - 1)).count_ones() as usize % 2;
                assert_eq!(b >> j & 1, prefix);
            }
        }
    }

    #[test]
    fn jw_number_is_diagonal_projector() {
        let m = operator_matrix(HoppingOp::number(1, Spin::Down), Mapping::Jw, 2).unwrap();
        // mode 1 down is qubit 3
        for i in 0..16 {
            for j in 0..16 {
                let want = if i == j && i >> 3 & 1 == 1 { 1.0 } else { 0.0 };
                assert_eq!(m[(i, j)], C64::new(want, 0.0));
            }
        }
    }

    #[test]
    fn hopping_pp_is_twice_number() {
        for mapping in Mapping::ALL {
            for s in Spin::BOTH {
                for p in 0..3 {
                    let a = hopping_matrix(p, p, s, mapping, 3).unwrap();
                    let num = operator_matrix(HoppingOp::number(p, s), mapping, 3).unwrap();
                    assert!(a.max_abs_diff(&num.scale(C64::new(2.0, 0.0))) < 1e-15);
                }
            }
        }
    }

    #[test]
    fn disjoint_hops_commute() {
        for mapping in Mapping::ALL {
            let a = hopping_matrix(0, 1, Spin::Up, mapping, 4).unwrap();
            let b = hopping_matrix(2, 3, Spin::Up, mapping, 4).unwrap();
            assert!(a.commutator(&b).norm_max() < 1e-12);
            assert!(a.is_hermitian(0.0));
            let c = hopping_matrix(1, 2, Spin::Up, mapping, 4).unwrap();
            assert!(a.commutator(&c).norm_max() > 0.5);
        }
    }

    #[test]
    fn fswap_gates_match_fermionic_swap() {
        // 1 + a†_l a_{l+1} + a†_{l+1} a_l - n_l - n_{l+1}
        let n = 3;
        for mapping in Mapping::ALL {
            for spin in Spin::BOTH {
                for l in 0..n - 1 {
                    let hop = hopping_matrix(l, l + 1, spin, mapping, n).unwrap();
                    let nl = operator_matrix(HoppingOp::number(l, spin), mapping, n).unwrap();
                    let nr = operator_matrix(HoppingOp::number(l + 1, spin), mapping, n).unwrap();
                    let minus = C64::new(-1.0, 0.0);
                    let want = Matrix::identity(64)
                        .add(&hop)
                        .add(&nl.scale(minus))
                        .add(&nr.scale(minus));
                    let gate = crate::circuits::map_fswap(l, spin, mapping, n).unwrap();
                    let got = dense(6, |v| {
                        let mut v = v.to_vec();
                        apply_local(&mut v, &gate.qubits, &gate.unitary());
                        v
                    })
                    .unwrap();
                    assert!(got.max_abs_diff(&want) < 1e-12, "{mapping} {spin} {l}");
                }
            }
        }
    }

    #[test]
    fn basis_state_expectations() {
        let u = Universe::build(3).unwrap();
        for mapping in Mapping::ALL {
            let sched = Schedule::from_universe(&u, mapping).unwrap();
            let st = basis_state("110100", mapping).unwrap();
            let rep = estimate_all(&st, &sched, None).unwrap();
            for (op, v) in rep.one_body() {
                if op.is_number() {
                    let occ = [1, 1, 0, 1, 0, 0][op.spin.index() * 3 + op.p];
                    assert!((v - occ as f64).abs() < 1e-12);
                } else {
                    assert!(v.abs() < 1e-12);
                }
            }
        }
        assert!(basis_state("1101", Mapping::Jw).unwrap().n_qubits() == 4);
        assert!(basis_state("110", Mapping::Jw).is_err());
        assert!(basis_state("1x", Mapping::Jw).is_err());
    }

    #[test]
    fn bell_layer_on_singlet_is_definite() {
        let u = Universe::build(2).unwrap();
        let c = u
            .cliques()
            .iter()
            .find(|c| c.family == Family::OneBody)
            .unwrap();
        let circ = emit(c, Mapping::Jw, 2).unwrap();
        // (|01⟩ - |10⟩)/√2 on up modes
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![ZERO; 16];
        amps[0b01] = C64::new(s, 0.0);
        amps[0b10] = C64::new(-s, 0.0);
        let st = StateVector::new(amps).unwrap();
        let out = apply_circuit(&st, &circ).unwrap().probabilities();
        assert!((out[0b11] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_circuit_and_size_limit() {
        let st = random_state(2, Mapping::Jw, 3).unwrap();
        let circ = MeasCircuit {
            mapping: Mapping::Jw,
            n_orbitals: 2,
            gates: vec![],
            depth: 0,
            networks: Default::default(),
            decode: vec![],
        };
        assert_eq!(apply_circuit(&st, &circ).unwrap(), st);
        assert!(matches!(
            random_state(8, Mapping::Jw, 0),
            Err(SimError::SizeLimit(16))
        ));
        let big = MeasCircuit {
            n_orbitals: 8,
            ..circ
        };
        assert!(matches!(
            apply_circuit(&st, &big),
            Err(SimError::SizeLimit(16))
        ));
    }

    #[test]
    fn shots() {
        let u = Universe::build(2).unwrap();
        let sched = Schedule::from_universe(&u, Mapping::Parity).unwrap();
        let st = random_state(2, Mapping::Parity, 11).unwrap();
        let circ = &sched.entries[3].circuit;
        assert!(matches!(
            sample_shots(&st, circ, 0, 1),
            Err(SimError::ZeroShots)
        ));
        let a = sample_shots(&st, circ, 500, 9).unwrap();
        assert_eq!(a, sample_shots(&st, circ, 500, 9).unwrap());
        let shots = 200_000u64;
        let hist = sample_shots(&st, circ, shots, 5).unwrap();
        let probs = apply_circuit(&st, circ).unwrap().probabilities();
        for (b, p) in probs.iter().enumerate() {
            let k = hist.get(&b).copied().unwrap_or(0) as f64;
            let sigma = (shots as f64 * p * (1.0 - p)).sqrt();
            assert!(
                (k - shots as f64 * p).abs() <= 5.0 * sigma + 1e-9,
                "outcome {b}"
            );
        }
    }
}
