//! Edge clique cover of the commutation graph from the projective plane.
//!
//! The Π+1 points `S(k) = P_γ(k, k²)`, `S(Π) = P_α` form a conic: no three
//! are collinear and each has exactly one tangent. Vertex `(l, l')` maps to
//! the secant through `S(l)` and `S(l')`, vertex `(l, l)` to the tangent at
//! `S(l)`. Every point outside the conic then collects the vertices whose
//! lines pass through it, and those vertex sets form the cover.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gf::Prime;
use crate::plane::{LineKind, Plane, Point};

/// Vertex `(p, q)` of the commutation graph, `p <= q`. Diagonal vertices
/// stand for number operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub p: usize,
    pub q: usize,
}

impl Vertex {
    /// Builds a vertex, ordering the two indices.
    pub fn new(a: usize, b: usize) -> Self {
        Vertex {
            p: a.min(b),
            q: a.max(b),
        }
    }

    pub fn is_diagonal(self) -> bool {
        self.p == self.q
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        let second = (!self.is_diagonal()).then_some(self.q);
        std::iter::once(self.p).chain(second)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairClique {
    pub anchor: Point,
    pub members: Vec<Vertex>,
}

impl PairClique {
    /// Fewer than two members: the clique covers no edge but is kept so
    /// the clique count stays at Π².
    pub fn is_degenerate(&self) -> bool {
        self.members.len() < 2
    }
}

/// `S(0..Π)`: `S(k) = P_γ(k, k² mod Π)` and `S(Π) = P_α`.
pub fn place_s_points(pi: Prime) -> Vec<Point> {
    let o = pi.get();
    (0..o)
        .map(|k| Point::gamma(k, (k as u64 * k as u64 % o as u64) as u32))
        .chain(std::iter::once(Point::Alpha))
        .collect()
}

/// Line associated with vertex `v`. Secants come from `line_through`; the
/// tangent at `S(l)` is `L_α` for `l = Π`, otherwise `L_γ(2l, -l²)`.
pub fn vertex_line(plane: &Plane, v: Vertex, s: &[Point]) -> LineKind {
    let o = plane.order() as usize;
    assert!(v.q <= o, "vertex {v} out of range for order {o}");
    if v.is_diagonal() {
        if v.p == o {
            return LineKind::Alpha;
        }
        let f = plane.field();
        let l = v.p as u32;
        LineKind::gamma(f.mul(2 % f.order(), l), f.neg(f.mul(l, l)))
    } else {
        plane
            .line_through(s[v.p], s[v.q])
            .expect("S points are distinct")
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CoverStats {
    /// Lines traced from an anchor to an S point.
    pub line_inspections: u64,
}

/// Edge clique cover for all `Π + 1` orbital indices.
pub fn build_cover(pi: Prime) -> Vec<PairClique> {
    build_cover_for(pi.get() as usize + 1, pi).0
}

/// Edge clique cover for `n <= Π + 1` orbital indices: one clique per point
/// off the conic, Π² in total, anchors in canonical point order.
pub fn build_cover_for(n: usize, pi: Prime) -> (Vec<PairClique>, CoverStats) {
    let plane = Plane::build(pi);
    build_cover_on(&plane, n)
}

pub fn build_cover_on(plane: &Plane, n: usize) -> (Vec<PairClique>, CoverStats) {
    let order = plane.order();
    assert!(n <= order as usize + 1, "n = {n} exceeds Π + 1");
    let pi = plane.field().prime();
    let s = place_s_points(pi);

    // conic points on each line
    let mut on_line: Vec<Vec<usize>> = vec![Vec::new(); plane.lines().len()];
    for (k, &pt) in s.iter().enumerate() {
        for line in plane.lines_through(pt) {
            on_line[line.index(order)].push(k);
        }
    }
    let mut is_s = vec![false; plane.lines().len()];
    for &pt in &s {
        is_s[pt.index(order)] = true;
    }

    let anchors: Vec<Point> = plane.points().filter(|p| !is_s[p.index(order)]).collect();
    let cliques: Vec<(PairClique, u64)> = anchors
        .par_iter()
        .map(|&anchor| {
            let mut members = Vec::new();
            let mut inspections = 0;
            for (i, &si) in s.iter().enumerate().take(n) {
                inspections += 1;
                let line = plane
                    .line_through(anchor, si)
                    .expect("anchor is off the conic");
                match on_line[line.index(order)].as_slice() {
                    [only] if *only == i => members.push(Vertex::new(i, i)),
                    [a, b] if (*a).max(*b) < n && (*a).min(*b) == i => {
                        members.push(Vertex::new(*a, *b))
                    }
                    _ => {}
                }
            }
            members.sort();
            (PairClique { anchor, members }, inspections)
        })
        .collect();

    let stats = CoverStats {
        line_inspections: cliques.iter().map(|(_, c)| c).sum(),
    };
    (cliques.into_iter().map(|(c, _)| c).collect(), stats)
}

/// True iff no line holds three or more conic points.
pub fn check_no_three_collinear(pi: Prime) -> bool {
    let plane = Plane::build(pi);
    let s = place_s_points(pi);
    plane
        .lines()
        .iter()
        .all(|l| s.iter().filter(|&&p| plane.contains(l.kind, p)).count() < 3)
}

/// True iff each conic point has exactly one line meeting the conic only there.
pub fn check_unique_tangent(pi: Prime) -> bool {
    let plane = Plane::build(pi);
    let s = place_s_points(pi);
    s.iter().all(|&pt| {
        plane
            .lines()
            .iter()
            .filter(|l| plane.contains(l.kind, pt))
            .filter(|l| s.iter().filter(|&&q| plane.contains(l.kind, q)).count() == 1)
            .count()
            == 1
    })
}
