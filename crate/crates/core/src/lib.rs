//! Measurement scheduling for second-quantized molecular Hamiltonians.
//!
//! The `2N² − 2N + 1` commuting cliques of `A_{pq,σ}` operators come from a
//! round-robin pairing of orbitals and an edge clique cover built on the
//! projective plane over `GF(Π)`. Each clique gets a swap-network circuit
//! under the Jordan-Wigner or parity mapping, and a dense simulator checks
//! the whole pipeline at small sizes.

pub mod circuits;
pub mod cover;
pub mod gf;
pub mod graphcheck;
pub mod hamiltonian;
pub mod matrix;
pub mod plane;
pub mod roundrobin;
pub mod schedule;
pub mod sim;
pub mod swapnet;
pub mod universe;

pub use circuits::{emit, CircuitError, DecodeTable, Gate, GateName, Mapping, MeasCircuit};
pub use cover::{build_cover, PairClique, Vertex};
pub use gf::{smallest_prime_at_least, Field, FieldElem, GfError, Prime};
pub use hamiltonian::{Hamiltonian, HamiltonianError};
pub use plane::{LineKind, Plane, Point};
pub use schedule::{Schedule, ScheduleEntry, ScheduleError, ScheduleStats};
pub use sim::{estimate_all, estimate_sampled, ExpectationReport, SimError, StateVector};
pub use swapnet::SwapNetwork;
pub use universe::{
    build_universe, plane_prime, Family, HoppingOp, MeasurementClique, Spin, TermKey, TermType,
    Universe, UniverseError,
};
