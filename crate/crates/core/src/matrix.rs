//! Small dense complex matrices and local gate application.
//!
//! Local operators act on an ordered qubit list; the first listed qubit is
//! the most significant bit of the local index. In a full register, qubit
//! `j` is bit `j` of the basis index.

use num_complex::Complex64;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<C64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_real(dim: usize, rows: &[f64]) -> Self {
        assert_eq!(rows.len(), dim * dim);
        Matrix {
            dim,
            data: rows.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }

    pub fn from_complex(dim: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), dim * dim);
        Matrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = Matrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] += a * other.data[k * d + j];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.dim, other.dim);
        Matrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Matrix {
        Matrix {
            dim: self.dim,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn adjoint(&self) -> Matrix {
        let d = self.dim;
        let mut out = Matrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Kronecker product; `self` occupies the high bits.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let (a, b) = (self.dim, other.dim);
        let mut out = Matrix::zeros(a * b);
        for i in 0..a {
            for j in 0..a {
                for k in 0..b {
                    for l in 0..b {
                        out[(i * b + k, j * b + l)] = self[(i, j)] * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_offdiag(&self) -> f64 {
        let d = self.dim;
        (0..d)
            .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|ij| self[ij].norm())
            .fold(0.0, f64::max)
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.mul(&self.adjoint())
            .max_abs_diff(&Matrix::identity(self.dim))
            <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// `self · other - other · self`.
    pub fn commutator(&self, other: &Matrix) -> Matrix {
        self.mul(other)
            .add(&other.mul(self).scale(C64::new(-1.0, 0.0)))
    }

    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// `⟨v| self |v⟩`.
    pub fn expectation(&self, v: &[C64]) -> C64 {
        let d = self.dim;
        let mut acc = ZERO;
        for (i, vi) in v.iter().enumerate().take(d) {
            let row: C64 = self.data[i * d..(i + 1) * d]
                .iter()
                .zip(v)
                .map(|(a, b)| a * b)
                .sum();
            acc += vi.conj() * row;
        }
        acc
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

// Row-major list of [re, im] pairs.
impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.data.len()))?;
        for z in &self.data {
            seq.serialize_element(&[z.re, z.im])?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let pairs: Vec<[f64; 2]> = Vec::deserialize(deserializer)?;
        let dim = (pairs.len() as f64).sqrt().round() as usize;
        if dim * dim != pairs.len() || !dim.is_power_of_two() {
            return Err(serde::de::Error::custom(format!(
                "matrix with {} entries is not 2^k x 2^k",
                pairs.len()
            )));
        }
        Ok(Matrix {
            dim,
            data: pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect(),
        })
    }
}

/// Local index of `global` restricted to `qubits` (first qubit = MSB).
#[inline]
pub fn local_index(global: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .fold(0, |acc, &q| (acc << 1) | (global >> q & 1))
}

/// Applies `m` on `qubits` of a register state in place.
pub fn apply_local(state: &mut [C64], qubits: &[usize], m: &Matrix) {
    let k = qubits.len();
    assert_eq!(m.dim(), 1 << k, "gate size does not match qubit list");
    let mask: usize = qubits.iter().map(|&q| 1usize << q).sum();
    // global offset for each local index
    let offsets: Vec<usize> = (0..1usize << k)
        .map(|loc| {
            (0..k)
                .filter(|t| loc >> (k - 1 - t) & 1 == 1)
                .map(|t| 1usize << qubits[t])
                .sum()
        })
        .collect();
    let mut buf = vec![ZERO; 1 << k];
    for base in 0..state.len() {
        if base & mask != 0 {
            continue;
        }
        for (loc, &off) in offsets.iter().enumerate() {
            buf[loc] = state[base | off];
        }
        for (i, &off) in offsets.iter().enumerate() {
            let mut acc = ZERO;
            for (j, b) in buf.iter().enumerate() {
                acc += m[(i, j)] * b;
            }
            state[base | off] = acc;
        }
    }
}

/// Expands a local operator on `qubits` into the frame spanned by `frame`
/// (frame[0] = MSB). Every qubit of `qubits` must be in `frame`.
pub fn embed(m: &Matrix, qubits: &[usize], frame: &[usize]) -> Matrix {
    let k = frame.len();
    // frame position t sits at register bit k-1-t
    let positions: Vec<usize> = qubits
        .iter()
        .map(|q| {
            let t = frame
                .iter()
                .position(|f| f == q)
                .expect("qubit not in frame");
            k - 1 - t
        })
        .collect();
    let dim = 1 << k;
    let mut out = Matrix::zeros(dim);
    for j in 0..dim {
        let mut col = vec![ZERO; dim];
        col[j] = ONE;
        apply_local(&mut col, &positions, m);
        for (i, v) in col.into_iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    out
}

pub fn pauli_x() -> Matrix {
    Matrix::from_real(2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_y() -> Matrix {
    Matrix::from_complex(2, vec![ZERO, C64::new(0.0, -1.0), C64::new(0.0, 1.0), ZERO])
}

pub fn pauli_z() -> Matrix {
    Matrix::from_real(2, &[1.0, 0.0, 0.0, -1.0])
}

pub fn hadamard() -> Matrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Matrix::from_real(2, &[s, s, s, -s])
}

/// CNOT with the first qubit as control.
pub fn cnot() -> Matrix {
    Matrix::from_real(
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, 0.0, 1.0, 0.0,
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_application_matches_kron() {
        // X on qubit 1 of a 2-qubit register: frame [1, 0] makes it X ⊗ I
        let m = embed(&pauli_x(), &[1], &[1, 0]);
        assert!(m.max_abs_diff(&pauli_x().kron(&Matrix::identity(2))) < 1e-15);
        let m = embed(&pauli_x(), &[1], &[0, 1]);
        assert!(m.max_abs_diff(&Matrix::identity(2).kron(&pauli_x())) < 1e-15);
        // CNOT control 0 target 1 on |q1 q0> = |0 1>  -> |1 1>
        let mut s = vec![ZERO; 4];
        s[0b01] = ONE;
        apply_local(&mut s, &[0, 1], &cnot());
        assert_eq!(s[0b11], ONE);
    }

    #[test]
    fn gates_unitary() {
        for g in [pauli_x(), pauli_y(), pauli_z(), hadamard(), cnot()] {
            assert!(g.is_unitary(1e-14));
            assert!(g.is_hermitian(1e-14));
        }
    }

    #[test]
    fn serde_roundtrip() {
        let m = hadamard().kron(&pauli_y());
        let text = serde_json::to_string(&m).unwrap();
        let back: Matrix = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<Matrix>("[[1.0,0.0],[0.0,0.0]]").is_err());
    }
}
