//! Measurement circuits: swap networks mapped to qubit gates, followed by a
//! diagonalization layer, with per-op decode tables.
//!
//! Qubits follow the up-then-down layout: qubit `j` holds mode `j` (up) for
//! `j < N` and mode `j - N` (down) otherwise. Under the parity mapping qubit
//! `j` stores `f_0 ⊕ … ⊕ f_j` over that whole ordering.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{self, embed, local_index, Matrix, C64};
use crate::swapnet::{build_network, SwapError, SwapNetwork};
use crate::universe::{HoppingOp, MeasurementClique, Spin};

/// Tolerance for the diagonality and integrality checks on decode tables.
pub const DIAG_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error("invalid swap of mode {l} in a block of {n}")]
    InvalidSwap { l: usize, n: usize },
    #[error(transparent)]
    Swap(#[from] SwapError),
    #[error("{op} is not diagonal after its circuit (off-diagonal {offdiag:.3e})")]
    NotDiagonal { op: HoppingOp, offdiag: f64 },
    #[error("{op} has non-integer eigenvalue {value}")]
    BadEigenvalue { op: HoppingOp, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mapping {
    Jw,
    Parity,
}

impl Mapping {
    pub const ALL: [Mapping; 2] = [Mapping::Jw, Mapping::Parity];

    pub fn name(self) -> &'static str {
        match self {
            Mapping::Jw => "jw",
            Mapping::Parity => "parity",
        }
    }
}

impl fmt::Display for Mapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Mapping {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "jw" => Ok(Mapping::Jw),
            "parity" => Ok(Mapping::Parity),
            other => Err(format!("unknown mapping `{other}` (expected jw or parity)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateName {
    #[serde(rename = "FSWAP2")]
    Fswap2,
    #[serde(rename = "FSWAP3")]
    Fswap3,
    #[serde(rename = "CNOT")]
    Cnot,
    #[serde(rename = "H")]
    H,
    #[serde(rename = "UNITARY")]
    Unitary,
}

/// A local gate. `qubits[0]` is the most significant bit of the matrix
/// index. The matrix is stored for gates without a fixed definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub name: GateName,
    pub qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Matrix>,
}

impl Gate {
    pub fn h(q: usize) -> Gate {
        Gate {
            name: GateName::H,
            qubits: vec![q],
            matrix: None,
        }
    }

    pub fn cnot(control: usize, target: usize) -> Gate {
        Gate {
            name: GateName::Cnot,
            qubits: vec![control, target],
            matrix: None,
        }
    }

    pub fn unitary(&self) -> Matrix {
        match (&self.matrix, self.name) {
            (Some(m), _) => m.clone(),
            (None, GateName::Fswap2) => jw_fswap_matrix(),
            (None, GateName::Fswap3) => parity_fswap_matrix(true),
            (None, GateName::Cnot) => matrix::cnot(),
            (None, GateName::H) => matrix::hadamard(),
            (None, GateName::Unitary) => panic!("UNITARY gate without a matrix"),
        }
    }

    pub fn touches(&self, q: usize) -> bool {
        self.qubits.contains(&q)
    }
}

/// `|00⟩→|00⟩, |01⟩↔|10⟩, |11⟩→−|11⟩`.
pub fn jw_fswap_matrix() -> Matrix {
    Matrix::from_real(
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, -1.0,
        ],
    )
}

/// Fermionic swap of modes `l, l+1` on parity qubits `(l-1, l, l+1)`, or
/// on `(l, l+1)` when `with_left` is false (no qubit below `l`).
pub fn parity_fswap_matrix(with_left: bool) -> Matrix {
    let k = if with_left { 3 } else { 2 };
    let dim = 1 << k;
    let mut m = Matrix::zeros(dim);
    for input in 0..dim {
        let bits = |loc: usize, t: usize| loc >> (k - 1 - t) & 1;
        let (left, b_l, b_r) = if with_left {
            (bits(input, 0), bits(input, 1), bits(input, 2))
        } else {
            (0, bits(input, 0), bits(input, 1))
        };
        let f_l = b_l ^ left;
        let f_r = b_r ^ b_l;
        let new_b = left ^ f_r;
        let sign = if f_l & f_r == 1 { -1.0 } else { 1.0 };
        let out = if with_left {
            (left << 2) | (new_b << 1) | b_r
        } else {
            (new_b << 1) | b_r
        };
        m[(out, input)] = C64::new(sign, 0.0);
    }
    m
}

/// Global qubit of mode `l` in the block of `spin`.
pub fn qubit_of(l: usize, spin: Spin, n: usize) -> usize {
    spin.index() * n + l
}

/// Gate swapping modes `l, l+1` of one spin block.
pub fn map_fswap(l: usize, spin: Spin, mapping: Mapping, n: usize) -> Result<Gate, CircuitError> {
    if l + 1 >= n {
        return Err(CircuitError::InvalidSwap { l, n });
    }
    let g = qubit_of(l, spin, n);
    Ok(match mapping {
        Mapping::Jw => Gate {
            name: GateName::Fswap2,
            qubits: vec![g, g + 1],
            matrix: None,
        },
        Mapping::Parity if g == 0 => Gate {
            name: GateName::Unitary,
            qubits: vec![0, 1],
            matrix: Some(parity_fswap_matrix(false)),
        },
        Mapping::Parity => Gate {
            name: GateName::Fswap3,
            qubits: vec![g - 1, g, g + 1],
            matrix: Some(parity_fswap_matrix(true)),
        },
    })
}

/// Rotation into the eigenbasis of the sorted hopping ops: `m_up` pairs at
/// the start of the up block and `m_down` at the start of the down block.
pub fn diag_layer(m_up: usize, m_down: usize, mapping: Mapping, n: usize) -> Vec<Gate> {
    let mut gates = Vec::new();
    for (spin, m) in [(Spin::Up, m_up), (Spin::Down, m_down)] {
        for pair in 0..m {
            let q = qubit_of(2 * pair, spin, n);
            match mapping {
                Mapping::Jw => {
                    gates.push(Gate::cnot(q, q + 1));
                    gates.push(Gate::h(q));
                }
                Mapping::Parity => gates.push(Gate::h(q)),
            }
        }
    }
    gates
}

/// Number of parallel layers when each gate starts as soon as its qubits
/// are free.
pub fn circuit_depth(gates: &[Gate]) -> usize {
    let mut ready: Vec<usize> = Vec::new();
    let mut depth = 0;
    for g in gates {
        let top = g.qubits.iter().copied().max().unwrap_or(0);
        if ready.len() <= top {
            ready.resize(top + 1, 0);
        }
        let layer = g.qubits.iter().map(|&q| ready[q]).max().unwrap_or(0) + 1;
        for &q in &g.qubits {
            ready[q] = layer;
        }
        depth = depth.max(layer);
    }
    depth
}

/// Eigenvalue of one clique op as a function of the measured bits on
/// `qubits` (`qubits[0]` most significant).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeTable {
    pub op: HoppingOp,
    pub qubits: Vec<usize>,
    pub values: Vec<i8>,
}

impl DecodeTable {
    /// Value for a full-register outcome (qubit `j` is bit `j`).
    pub fn value(&self, outcome: usize) -> i8 {
        self.values[local_index(outcome, &self.qubits)]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasCircuit {
    pub mapping: Mapping,
    pub n_orbitals: usize,
    pub gates: Vec<Gate>,
    pub depth: usize,
    /// Up and down networks.
    pub networks: [SwapNetwork; 2],
    /// One table per clique op, in clique order.
    pub decode: Vec<DecodeTable>,
}

impl MeasCircuit {
    pub fn n_qubits(&self) -> usize {
        2 * self.n_orbitals
    }

    pub fn swap_count(&self) -> usize {
        self.networks.iter().map(SwapNetwork::swap_count).sum()
    }

    pub fn decode_for(&self, op: HoppingOp) -> Option<&DecodeTable> {
        self.decode.iter().find(|t| t.op == op)
    }
}

/// Local qubits and matrix of a sorted op under `mapping`. Hopping ops must
/// sit on adjacent modes.
fn local_op(op: HoppingOp, mapping: Mapping, n: usize) -> (Vec<usize>, Matrix) {
    let g = qubit_of(op.p, op.spin, n);
    let id2 = Matrix::identity(2);
    let (x, y, z) = (matrix::pauli_x(), matrix::pauli_y(), matrix::pauli_z());
    let half = C64::new(0.5, 0.0);
    if op.is_number() {
        return match mapping {
            Mapping::Parity if g > 0 => {
                // (1 - Z_{g-1} Z_g) / 2
                let zz = z.kron(&z);
                (
                    vec![g - 1, g],
                    Matrix::identity(4)
                        .add(&zz.scale(C64::new(-1.0, 0.0)))
                        .scale(half),
                )
            }
            _ => (vec![g], id2.add(&z.scale(C64::new(-1.0, 0.0))).scale(half)),
        };
    }
    assert_eq!(op.q, op.p + 1, "sorted hopping op must be adjacent");
    match mapping {
        // (XX + YY) / 2
        Mapping::Jw => (vec![g, g + 1], x.kron(&x).add(&y.kron(&y)).scale(half)),
        // (X_g - Z_{g-1} X_g Z_{g+1}) / 2
        Mapping::Parity if g > 0 => {
            let a = id2.kron(&x).kron(&id2);
            let b = z.kron(&x).kron(&z);
            (
                vec![g - 1, g, g + 1],
                a.add(&b.scale(C64::new(-1.0, 0.0))).scale(half),
            )
        }
        Mapping::Parity => {
            let a = x.kron(&id2);
            let b = x.kron(&z);
            (
                vec![g, g + 1],
                a.add(&b.scale(C64::new(-1.0, 0.0))).scale(half),
            )
        }
    }
}

/// Decode table of `orig` from its sorted image by conjugating with the
/// diagonalization gates that touch it.
fn decode_table(
    orig: HoppingOp,
    sorted: HoppingOp,
    diag: &[Gate],
    mapping: Mapping,
    n: usize,
) -> Result<DecodeTable, CircuitError> {
    let (support, op_matrix) = local_op(sorted, mapping, n);
    let mut frame = support.clone();
    loop {
        let before = frame.len();
        for g in diag {
            if g.qubits.iter().any(|q| frame.contains(q)) {
                for &q in &g.qubits {
                    if !frame.contains(&q) {
                        frame.push(q);
                    }
                }
            }
        }
        if frame.len() == before {
            break;
        }
    }
    frame.sort_unstable();
    let mut u = Matrix::identity(1 << frame.len());
    for g in diag
        .iter()
        .filter(|g| g.qubits.iter().any(|q| frame.contains(q)))
    {
        u = embed(&g.unitary(), &g.qubits, &frame).mul(&u);
    }
    let o = embed(&op_matrix, &support, &frame);
    let conj = u.mul(&o).mul(&u.adjoint());
    let offdiag = conj.max_abs_offdiag();
    if offdiag > DIAG_TOL {
        return Err(CircuitError::NotDiagonal { op: orig, offdiag });
    }
    let mut values = Vec::with_capacity(conj.dim());
    for z in conj.diagonal() {
        let r = z.re.round();
        if (z.re - r).abs() > DIAG_TOL || z.im.abs() > DIAG_TOL {
            return Err(CircuitError::BadEigenvalue {
                op: orig,
                value: z.re,
            });
        }
        values.push(r as i8);
    }
    Ok(DecodeTable {
        op: orig,
        qubits: frame,
        values,
    })
}

/// Full measurement circuit for one clique.
pub fn emit(
    clique: &MeasurementClique,
    mapping: Mapping,
    n: usize,
) -> Result<MeasCircuit, CircuitError> {
    let up: Vec<HoppingOp> = clique.ops_for(Spin::Up).collect();
    let down: Vec<HoppingOp> = clique.ops_for(Spin::Down).collect();
    let networks = [build_network(&up, n)?, build_network(&down, n)?];

    let mut gates = Vec::new();
    let layers = networks.iter().map(SwapNetwork::depth).max().unwrap_or(0);
    for t in 0..layers {
        for spin in Spin::BOTH {
            if let Some(layer) = networks[spin.index()].layers.get(t) {
                for &l in &layer.swaps {
                    gates.push(map_fswap(l, spin, mapping, n)?);
                }
            }
        }
    }
    let hops = |ops: &[HoppingOp]| ops.iter().filter(|o| !o.is_number()).count();
    let diag = diag_layer(hops(&up), hops(&down), mapping, n);

    let mut decode = Vec::with_capacity(clique.ops.len());
    for &op in &clique.ops {
        let sorted = networks[op.spin.index()].relabel(op);
        decode.push(decode_table(op, sorted, &diag, mapping, n)?);
    }
    gates.extend(diag);
    let depth = circuit_depth(&gates);
    Ok(MeasCircuit {
        mapping,
        n_orbitals: n,
        gates,
        depth,
        networks,
        decode,
    })
}
