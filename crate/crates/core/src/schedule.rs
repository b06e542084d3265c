//! A complete measurement schedule: every clique with its circuit, the
//! term routing, summary statistics and the JSON file format.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuits::{
    circuit_depth, emit, CircuitError, DecodeTable, Gate, GateName, Mapping, MeasCircuit,
};
use crate::gf::Prime;
use crate::swapnet::{SwapLayer, SwapNetwork};
use crate::universe::{
    classify_terms, closed_form_clique_count, Family, HoppingOp, MeasurementClique, Source,
    TermKey, Universe, UniverseError,
};

pub const SCHEDULE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ScheduleError {
    #[error(transparent)]
    Universe(#[from] UniverseError),
    #[error("clique {id}: {source}")]
    Circuit { id: usize, source: CircuitError },
    #[error("malformed schedule: {0}")]
    Format(String),
    #[error("no clique covers term {0}")]
    Coverage(TermKey),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleEntry {
    pub clique: MeasurementClique,
    pub circuit: MeasCircuit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub n_orbitals: usize,
    pub mapping: Mapping,
    pub prime: Prime,
    pub entries: Vec<ScheduleEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleStats {
    pub n_orbitals: usize,
    pub mapping: Mapping,
    pub prime: u32,
    pub cliques: usize,
    pub expected_cliques: usize,
    pub part: usize,
    pub one_body: usize,
    pub diff_spin: usize,
    pub same_spin: usize,
    pub terms: usize,
    pub max_depth: usize,
    pub max_swap_layers: usize,
    pub max_gates: usize,
    pub total_gates: usize,
    pub total_swaps: usize,
}

impl ScheduleStats {
    /// `key: value` lines.
    pub fn render(&self) -> String {
        let v = serde_json::to_value(self).expect("stats serialize");
        let mut out = String::new();
        for (k, v) in v.as_object().expect("object") {
            let v = v
                .as_str()
                .map(str::to_owned)
                .unwrap_or_else(|| v.to_string());
            out.push_str(&format!("{k}: {v}\n"));
        }
        out
    }
}

impl Schedule {
    pub fn build(n: usize, mapping: Mapping) -> Result<Schedule, ScheduleError> {
        Self::from_universe(&Universe::build(n)?, mapping)
    }

    pub fn from_universe(universe: &Universe, mapping: Mapping) -> Result<Schedule, ScheduleError> {
        let n = universe.n_orbitals();
        let entries = universe
            .cliques()
            .par_iter()
            .map(|c| {
                emit(c, mapping, n)
                    .map(|circuit| ScheduleEntry {
                        clique: c.clone(),
                        circuit,
                    })
                    .map_err(|source| ScheduleError::Circuit { id: c.id, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Schedule {
            n_orbitals: n,
            mapping,
            prime: universe.prime(),
            entries,
        })
    }

    pub fn cliques(&self) -> impl Iterator<Item = &MeasurementClique> {
        self.entries.iter().map(|e| &e.clique)
    }

    /// Each term goes to the first clique of its family holding all of
    /// its factors.
    pub fn routing(&self) -> Result<BTreeMap<TermKey, usize>, ScheduleError> {
        let mut by_op: HashMap<HoppingOp, Vec<usize>> = HashMap::new();
        for (i, e) in self.entries.iter().enumerate() {
            for &op in &e.clique.ops {
                by_op.entry(op).or_default().push(i);
            }
        }
        let mut routing = BTreeMap::new();
        for term in classify_terms(self.n_orbitals) {
            let family = term.term_type().family();
            let factors = term.factors();
            let id = by_op
                .get(&factors[0])
                .and_then(|ids| {
                    ids.iter().copied().find(|&id| {
                        let c = &self.entries[id].clique;
                        c.family == family && factors[1..].iter().all(|&f| c.contains(f))
                    })
                })
                .ok_or(ScheduleError::Coverage(term))?;
            routing.insert(term, id);
        }
        Ok(routing)
    }

    pub fn stats(&self) -> ScheduleStats {
        let count = |f: Family| self.entries.iter().filter(|e| e.clique.family == f).count();
        let circuits = || self.entries.iter().map(|e| &e.circuit);
        ScheduleStats {
            n_orbitals: self.n_orbitals,
            mapping: self.mapping,
            prime: self.prime.get(),
            cliques: self.entries.len(),
            expected_cliques: closed_form_clique_count(self.n_orbitals),
            part: count(Family::Part),
            one_body: count(Family::OneBody),
            diff_spin: count(Family::DiffSpin),
            same_spin: count(Family::SameSpin),
            terms: classify_terms(self.n_orbitals).len(),
            max_depth: circuits().map(|c| c.depth).max().unwrap_or(0),
            max_swap_layers: circuits()
                .flat_map(|c| c.networks.iter().map(SwapNetwork::depth))
                .max()
                .unwrap_or(0),
            max_gates: circuits().map(|c| c.gates.len()).max().unwrap_or(0),
            total_gates: circuits().map(|c| c.gates.len()).sum(),
            total_swaps: circuits().map(MeasCircuit::swap_count).sum(),
        }
    }

    /// Structural problems: ids, commutation, decode coverage, gate
    /// validity, stored depth and term coverage. Empty when sound.
    pub fn problems(&self) -> Vec<String> {
        let nq = 2 * self.n_orbitals;
        let mut out = Vec::new();
        for (i, e) in self.entries.iter().enumerate() {
            let c = &e.clique;
            if c.id != i {
                out.push(format!("clique at position {i} has id {}", c.id));
            }
            if let Some((a, b)) = c.commutation_violation() {
                out.push(format!("clique {}: {a} and {b} do not commute", c.id));
            }
            if let Some(op) = c.ops.iter().find(|o| o.q >= self.n_orbitals) {
                out.push(format!("clique {}: {op} out of range", c.id));
            }
            let decoded: Vec<HoppingOp> = e.circuit.decode.iter().map(|t| t.op).collect();
            if decoded != c.ops {
                out.push(format!("clique {}: decode tables do not match ops", c.id));
            }
            for t in &e.circuit.decode {
                if t.values.len() != 1 << t.qubits.len() {
                    out.push(format!(
                        "clique {}: decode table for {} has wrong size",
                        c.id, t.op
                    ));
                }
            }
            for g in &e.circuit.gates {
                let mut qs = g.qubits.clone();
                qs.sort_unstable();
                qs.dedup();
                if qs.len() != g.qubits.len() || qs.iter().any(|&q| q >= nq) {
                    out.push(format!("clique {}: bad qubits {:?}", c.id, g.qubits));
                }
                if g.name == GateName::Unitary && g.matrix.is_none() {
                    out.push(format!("clique {}: UNITARY gate without a matrix", c.id));
                    continue;
                }
                let u = g.unitary();
                if u.dim() != 1 << g.qubits.len() || !u.is_unitary(1e-12) {
                    out.push(format!(
                        "clique {}: gate on {:?} not unitary",
                        c.id, g.qubits
                    ));
                }
            }
            if circuit_depth(&e.circuit.gates) != e.circuit.depth {
                out.push(format!("clique {}: stored depth is wrong", c.id));
            }
        }
        if let Err(e) = self.routing() {
            out.push(e.to_string());
        }
        out
    }

    pub fn to_json_string(&self) -> String {
        let file = ScheduleFile {
            version: SCHEDULE_VERSION,
            n_orbitals: self.n_orbitals,
            mapping: self.mapping,
            prime: self.prime.get(),
            cliques: self.entries.iter().map(EntryFile::from_entry).collect(),
            stats: self.stats(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("schedule serializes");
        s.push('\n');
        s
    }

    pub fn from_json_str(text: &str) -> Result<Schedule, ScheduleError> {
        let file: ScheduleFile =
            serde_json::from_str(text).map_err(|e| ScheduleError::Format(e.to_string()))?;
        if file.version != SCHEDULE_VERSION {
            return Err(ScheduleError::Format(format!(
                "unsupported version {}",
                file.version
            )));
        }
        let prime = Prime::new(file.prime).map_err(|e| ScheduleError::Format(e.to_string()))?;
        let entries = file
            .cliques
            .into_iter()
            .map(|e| e.into_entry(file.n_orbitals))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Schedule {
            n_orbitals: file.n_orbitals,
            mapping: file.mapping,
            prime,
            entries,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerSpin<T> {
    pub up: T,
    pub down: T,
}

#[derive(Serialize, Deserialize)]
struct ScheduleFile {
    version: u32,
    n_orbitals: usize,
    mapping: Mapping,
    prime: u32,
    cliques: Vec<EntryFile>,
    stats: ScheduleStats,
}

#[derive(Serialize, Deserialize)]
struct EntryFile {
    id: usize,
    family: Family,
    source: Source,
    mapping: Mapping,
    ops: Vec<HoppingOp>,
    gates: Vec<Gate>,
    depth: usize,
    permutation: PerSpin<Vec<usize>>,
    swap_layers: PerSpin<Vec<SwapLayer>>,
    decode: Vec<DecodeTable>,
}

impl EntryFile {
    fn from_entry(e: &ScheduleEntry) -> EntryFile {
        let [up, down] = &e.circuit.networks;
        EntryFile {
            id: e.clique.id,
            family: e.clique.family,
            source: e.clique.source,
            mapping: e.circuit.mapping,
            ops: e.clique.ops.clone(),
            gates: e.circuit.gates.clone(),
            depth: e.circuit.depth,
            permutation: PerSpin {
                up: up.permutation.clone(),
                down: down.permutation.clone(),
            },
            swap_layers: PerSpin {
                up: up.layers.clone(),
                down: down.layers.clone(),
            },
            decode: e.circuit.decode.clone(),
        }
    }

    fn into_entry(self, n: usize) -> Result<ScheduleEntry, ScheduleError> {
        for perm in [&self.permutation.up, &self.permutation.down] {
            let mut seen = vec![false; n];
            if perm.len() != n
                || !perm
                    .iter()
                    .all(|&p| p < n && !std::mem::replace(&mut seen[p], true))
            {
                return Err(ScheduleError::Format(format!(
                    "clique {}: permutation is not a permutation of 0..{n}",
                    self.id
                )));
            }
        }
        let up = SwapNetwork {
            layers: self.swap_layers.up,
            permutation: self.permutation.up,
        };
        let down = SwapNetwork {
            layers: self.swap_layers.down,
            permutation: self.permutation.down,
        };
        Ok(ScheduleEntry {
            clique: MeasurementClique {
                id: self.id,
                family: self.family,
                ops: self.ops,
                source: self.source,
            },
            circuit: MeasCircuit {
                mapping: self.mapping,
                n_orbitals: n,
                gates: self.gates,
                depth: self.depth,
                networks: [up, down],
                decode: self.decode,
            },
        })
    }
}
