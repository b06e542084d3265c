//! Benchmarks for schedule construction; see `benches/`.

/// Orbital counts exercised by the construction benchmarks.
pub const SIZES: [usize; 4] = [4, 8, 16, 32];

/// Orbital counts small enough for full circuit emission.
pub const EMIT_SIZES: [usize; 3] = [4, 8, 12];
