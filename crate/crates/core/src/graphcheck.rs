//! Explicit commutation graph and verification of clique covers against it.

use std::collections::{BTreeMap, HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cover::{PairClique, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("brute-force cover limited to n <= {max}, got {n}")]
    SizeLimit { n: usize, max: usize },
}

pub const BRUTE_FORCE_MAX_N: usize = 6;
const HASH_EDGE_MAX_N: usize = 64;

/// Commutation rule between two distinct vertices.
pub fn adjacent(a: Vertex, b: Vertex) -> bool {
    if a == b {
        return false;
    }
    match (a.is_diagonal(), b.is_diagonal()) {
        (true, true) => a.p != b.p,
        (true, false) => a.p != b.p && a.p != b.q,
        (false, true) => b.p != a.p && b.p != a.q,
        (false, false) => a.p != b.p && a.p != b.q && a.q != b.p && a.q != b.q,
    }
}

#[derive(Debug, Clone)]
enum EdgeStore {
    Hash(HashSet<(u32, u32)>),
    Bits { words: usize, rows: Vec<u64> },
}

#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    vertices: Vec<Vertex>,
    index: HashMap<Vertex, usize>,
    edges: EdgeStore,
    edge_count: usize,
}

impl Graph {
    fn from_vertices(n: usize, vertices: Vec<Vertex>) -> Graph {
        let index: HashMap<Vertex, usize> =
            vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let m = vertices.len();
        let mut edge_count = 0;
        let mut edges = if n <= HASH_EDGE_MAX_N {
            EdgeStore::Hash(HashSet::new())
        } else {
            let words = m.div_ceil(64);
            EdgeStore::Bits {
                words,
                rows: vec![0; words * m],
            }
        };
        for i in 0..m {
            for j in i + 1..m {
                if adjacent(vertices[i], vertices[j]) {
                    edge_count += 1;
                    match &mut edges {
                        EdgeStore::Hash(set) => {
                            set.insert((i as u32, j as u32));
                        }
                        EdgeStore::Bits { words, rows } => {
                            rows[i * *words + j / 64] |= 1 << (j % 64);
                            rows[j * *words + i / 64] |= 1 << (i % 64);
                        }
                    }
                }
            }
        }
        Graph {
            n,
            vertices,
            index,
            edges,
            edge_count,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex_index(&self, v: Vertex) -> Option<usize> {
        self.index.get(&v).copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        if i == j {
            return false;
        }
        let (i, j) = (i.min(j), i.max(j));
        match &self.edges {
            EdgeStore::Hash(set) => set.contains(&(i as u32, j as u32)),
            EdgeStore::Bits { words, rows } => rows[i * words + j / 64] >> (j % 64) & 1 == 1,
        }
    }

    /// Edges as vertex-index pairs `(i, j)`, `i < j`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let m = self.vertices.len();
        (0..m)
            .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
            .filter(|&(i, j)| self.has_edge(i, j))
            .collect()
    }

    /// The subgraph on off-diagonal vertices only.
    pub fn v2_subgraph(&self) -> Graph {
        let vs = self
            .vertices
            .iter()
            .copied()
            .filter(|v| !v.is_diagonal())
            .collect();
        Graph::from_vertices(self.n, vs)
    }
}

/// `V₁ ∪ V₂` over indices `0..n`, vertices in `(p, q)` order.
pub fn build_graph(n: usize) -> Graph {
    let vertices = (0..n)
        .flat_map(|p| (p..n).map(move |q| Vertex::new(p, q)))
        .collect();
    Graph::from_vertices(n, vertices)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverReport {
    pub cliques: usize,
    pub edges: usize,
    /// (clique position, u, v) with u, v in the clique but not adjacent.
    pub non_cliques: Vec<(usize, Vertex, Vertex)>,
    pub uncovered: Vec<(Vertex, Vertex)>,
    /// multiplicity -> number of edges covered that many times
    pub multiplicity: BTreeMap<usize, usize>,
}

impl CoverReport {
    pub fn is_valid(&self) -> bool {
        self.non_cliques.is_empty() && self.uncovered.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "cliques: {}\nedges: {}\nnon_cliques: {}\nuncovered_edges: {}\n",
            self.cliques,
            self.edges,
            self.non_cliques.len(),
            self.uncovered.len()
        );
        for (m, c) in &self.multiplicity {
            out.push_str(&format!("edge_multiplicity_{m}: {c}\n"));
        }
        for (k, u, v) in self.non_cliques.iter().take(10) {
            out.push_str(&format!(
                "violation: clique {k} holds non-adjacent {u} {v}\n"
            ));
        }
        for (u, v) in self.uncovered.iter().take(10) {
            out.push_str(&format!("violation: edge {u}-{v} uncovered\n"));
        }
        out
    }
}

type Violation = (usize, Vertex, Vertex);
type CoveredEdge = (usize, usize);

/// Checks every clique is complete in `g` and every edge of `g` is covered.
/// Clique members that are not vertices of `g` are ignored.
pub fn verify_cover(g: &Graph, cliques: &[PairClique]) -> CoverReport {
    let per_clique: Vec<(Vec<Violation>, Vec<CoveredEdge>)> = cliques
        .par_iter()
        .enumerate()
        .map(|(k, c)| {
            let ids: Vec<usize> = c
                .members
                .iter()
                .filter_map(|&v| g.vertex_index(v))
                .collect();
            let mut bad = Vec::new();
            let mut covered = Vec::new();
            for (a, &i) in ids.iter().enumerate() {
                for &j in &ids[a + 1..] {
                    if g.has_edge(i, j) {
                        covered.push((i.min(j), i.max(j)));
                    } else {
                        bad.push((k, g.vertices[i], g.vertices[j]));
                    }
                }
            }
            (bad, covered)
        })
        .collect();

    let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
    let mut non_cliques = Vec::new();
    for (bad, covered) in per_clique {
        non_cliques.extend(bad);
        for e in covered {
            *counts.entry(e).or_default() += 1;
        }
    }
    let mut uncovered = Vec::new();
    let mut multiplicity = BTreeMap::new();
    let edges = g.edges();
    for &e in &edges {
        match counts.get(&e) {
            Some(&m) => *multiplicity.entry(m).or_default() += 1,
            None => uncovered.push((g.vertices[e.0], g.vertices[e.1])),
        }
    }
    CoverReport {
        cliques: cliques.len(),
        edges: edges.len(),
        non_cliques,
        uncovered,
        multiplicity,
    }
}

/// `(n-1)(n-3)` for `n >= 4`, else 0.
pub fn lower_bound(n: usize) -> usize {
    if n >= 4 {
        (n - 1) * (n - 3)
    } else {
        0
    }
}

/// Number of edges among off-diagonal vertices, `n(n-1)(n-2)(n-3)/8`.
pub fn v2_edge_count(n: usize) -> usize {
    if n < 4 {
        0
    } else {
        n * (n - 1) * (n - 2) * (n - 3) / 8
    }
}

/// Greedy edge clique cover (desk-scale reference). Seeds each clique
/// with an uncovered edge at a vertex of maximum uncovered degree, then
/// grows it by the common neighbour that covers the most new edges.
pub fn brute_force_cover(g: &Graph) -> Result<Vec<Vec<Vertex>>, GraphError> {
    if g.n > BRUTE_FORCE_MAX_N {
        return Err(GraphError::SizeLimit {
            n: g.n,
            max: BRUTE_FORCE_MAX_N,
        });
    }
    let m = g.vertices.len();
    let mut uncovered: HashSet<(usize, usize)> = g.edges().into_iter().collect();
    let key = |i: usize, j: usize| (i.min(j), i.max(j));
    let mut cover = Vec::new();
    while !uncovered.is_empty() {
        let mut degree = vec![0usize; m];
        for &(i, j) in &uncovered {
            degree[i] += 1;
            degree[j] += 1;
        }
        let u = (0..m)
            .max_by_key(|&i| (degree[i], std::cmp::Reverse(i)))
            .unwrap();
        let v = (0..m)
            .filter(|&j| uncovered.contains(&key(u, j)))
            .max_by_key(|&j| (degree[j], std::cmp::Reverse(j)))
            .unwrap();
        let mut clique = vec![u, v];
        loop {
            let best = (0..m)
                .filter(|w| !clique.contains(w))
                .filter(|&w| clique.iter().all(|&c| g.has_edge(c, w)))
                .map(|w| {
                    let gain = clique
                        .iter()
                        .filter(|&&c| uncovered.contains(&key(c, w)))
                        .count();
                    (gain, std::cmp::Reverse(w))
                })
                .max();
            match best {
                Some((gain, std::cmp::Reverse(w))) if gain > 0 => clique.push(w),
                _ => break,
            }
        }
        for (a, &i) in clique.iter().enumerate() {
            for &j in &clique[a + 1..] {
                uncovered.remove(&key(i, j));
            }
        }
        let mut vs: Vec<Vertex> = clique.iter().map(|&i| g.vertices[i]).collect();
        vs.sort();
        cover.push(vs);
    }
    Ok(cover)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::build_cover_for;
    use crate::gf::{smallest_prime_at_least, Prime};

    fn as_pair_cliques(cover: &[Vec<Vertex>]) -> Vec<PairClique> {
        cover
            .iter()
            .map(|m| PairClique {
                anchor: crate::plane::Point::Alpha,
                members: m.clone(),
            })
            .collect()
    }

    #[test]
    fn graph_sizes() {
        let g6 = build_graph(6);
        assert_eq!(g6.vertices().len(), 21);
        assert_eq!(g6.v2_subgraph().edge_count(), 45);
        assert_eq!(build_graph(4).v2_subgraph().edge_count(), 3);
        for n in 4..=10 {
            assert_eq!(build_graph(n).v2_subgraph().edge_count(), v2_edge_count(n));
        }
    }

    #[test]
    fn bitset_store_agrees_with_rule() {
        let g = build_graph(66);
        assert!(matches!(g.edges, EdgeStore::Bits { .. }));
        let vs = g.vertices().to_vec();
        for (i, &a) in vs.iter().enumerate().step_by(97) {
            for (j, &b) in vs.iter().enumerate().step_by(13) {
                assert_eq!(g.has_edge(i, j), adjacent(a, b));
            }
        }
    }

    #[test]
    fn plane_cover_is_valid() {
        for n in [3usize, 4, 6, 8] {
            let pi = smallest_prime_at_least(n as u64 - 1).unwrap();
            let (cover, _) = build_cover_for(n, pi);
            let report = verify_cover(&build_graph(n), &cover);
            assert!(report.is_valid(), "{}", report.render());
            // lines meet in exactly one point
            assert_eq!(
                report.multiplicity.keys().copied().collect::<Vec<_>>(),
                vec![1]
            );
        }
    }

    #[test]
    fn non_prime_orders_still_cover() {
        for n in [5usize, 7, 9, 10] {
            let pi = smallest_prime_at_least(n as u64 - 1).unwrap();
            let (cover, _) = build_cover_for(n, pi);
            assert!(verify_cover(&build_graph(n), &cover).is_valid());
        }
    }

    #[test]
    fn dropping_a_clique_is_detected() {
        let (mut cover, _) = build_cover_for(6, Prime::new(5).unwrap());
        let removed = cover.remove(3);
        let report = verify_cover(&build_graph(6), &cover);
        assert!(!report.is_valid());
        let k = removed.members.len();
        assert_eq!(report.uncovered.len(), k * (k - 1) / 2);
    }

    #[test]
    fn non_clique_is_detected() {
        let bad = PairClique {
            anchor: crate::plane::Point::Alpha,
            members: vec![Vertex::new(0, 1), Vertex::new(1, 2)],
        };
        let report = verify_cover(&build_graph(4), &[bad]);
        assert_eq!(report.non_cliques.len(), 1);
    }

    #[test]
    fn bounds() {
        assert_eq!(lower_bound(6), 15);
        assert_eq!(lower_bound(4), 3);
        assert_eq!(lower_bound(3), 0);
        assert_eq!(lower_bound(8), 35);
    }

    #[test]
    fn greedy_cover_examples() {
        let g4 = build_graph(4).v2_subgraph();
        let c4 = brute_force_cover(&g4).unwrap();
        assert_eq!(c4.len(), 3);
        assert!(verify_cover(&g4, &as_pair_cliques(&c4)).is_valid());

        let g5 = build_graph(5).v2_subgraph();
        let c5 = brute_force_cover(&g5).unwrap();
        assert!(c5.len() >= lower_bound(5));
        assert!(verify_cover(&g5, &as_pair_cliques(&c5)).is_valid());

        let g6 = build_graph(6).v2_subgraph();
        let c6 = brute_force_cover(&g6).unwrap();
        assert!((15..=25).contains(&c6.len()), "{}", c6.len());

        let full6 = build_graph(6);
        let cf = brute_force_cover(&full6).unwrap();
        assert!(verify_cover(&full6, &as_pair_cliques(&cf)).is_valid());

        assert_eq!(
            brute_force_cover(&build_graph(7)).unwrap_err(),
            GraphError::SizeLimit { n: 7, max: 6 }
        );
    }

    #[test]
    fn v2_max_clique_at_most_half() {
        // exhaustive max clique over small graphs
        for n in 2..=7 {
            let g = build_graph(n).v2_subgraph();
            let m = g.vertices().len();
            let mut best = 0;
            for mask in 0u32..(1 << m) {
                let set: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
                if set.len() <= best {
                    continue;
                }
                if set
                    .iter()
                    .enumerate()
                    .all(|(a, &i)| set[a + 1..].iter().all(|&j| g.has_edge(i, j)))
                {
                    best = set.len();
                }
            }
            assert!(best <= n / 2, "n = {n}, clique {best}");
        }
    }
}
