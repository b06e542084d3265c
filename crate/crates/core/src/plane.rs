//! The Desarguesian projective plane of prime order Π.
//!
//! Points are `P_α`, `P_β(y)` (the points at infinity) and the affine
//! points `P_γ(x, y)`. Lines are `L_α` (the line at infinity), the
//! vertical lines `L_β(i)` and the sloped lines `L_γ(i, j) : y = i·x + j`
//! together with their point at infinity `P_β(i)`.
//!
//! Both points and lines have a dense integer encoding
//! (`α → 0`, `β(y) → 1 + y`, `γ(x, y) → 1 + Π + x·Π + y`) used to index the
//! incidence bitset.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Field, Prime};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlaneError {
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("coordinate {0} out of range for order {1}")]
    OutOfRange(u32, u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Point {
    Alpha,
    Beta { y: u32 },
    Gamma { x: u32, y: u32 },
}

impl Point {
    pub fn beta(y: u32) -> Self {
        Point::Beta { y }
    }

    pub fn gamma(x: u32, y: u32) -> Self {
        Point::Gamma { x, y }
    }

    pub fn index(self, order: u32) -> usize {
        match self {
            Point::Alpha => 0,
            Point::Beta { y } => 1 + y as usize,
            Point::Gamma { x, y } => 1 + order as usize + (x * order + y) as usize,
        }
    }

    pub fn from_index(index: usize, order: u32) -> Self {
        let o = order as usize;
        match index {
            0 => Point::Alpha,
            i if i <= o => Point::beta((i - 1) as u32),
            i => {
                let r = i - 1 - o;
                Point::gamma((r / o) as u32, (r % o) as u32)
            }
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Alpha => write!(f, "Pα"),
            Point::Beta { y } => write!(f, "Pβ({y})"),
            Point::Gamma { x, y } => write!(f, "Pγ({x},{y})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum LineKind {
    Alpha,
    Beta { i: u32 },
    Gamma { i: u32, j: u32 },
}

impl LineKind {
    pub fn beta(i: u32) -> Self {
        LineKind::Beta { i }
    }

    pub fn gamma(i: u32, j: u32) -> Self {
        LineKind::Gamma { i, j }
    }

    pub fn index(self, order: u32) -> usize {
        match self {
            LineKind::Alpha => 0,
            LineKind::Beta { i } => 1 + i as usize,
            LineKind::Gamma { i, j } => 1 + order as usize + (i * order + j) as usize,
        }
    }

    pub fn from_index(index: usize, order: u32) -> Self {
        match Point::from_index(index, order) {
            Point::Alpha => LineKind::Alpha,
            Point::Beta { y } => LineKind::beta(y),
            Point::Gamma { x, y } => LineKind::gamma(x, y),
        }
    }
}

impl fmt::Display for LineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LineKind::Alpha => write!(f, "Lα"),
            LineKind::Beta { i } => write!(f, "Lβ({i})"),
            LineKind::Gamma { i, j } => write!(f, "Lγ({i},{j})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    pub kind: LineKind,
    pub points: Vec<Point>,
}

/// All points and lines of the plane plus a dense incidence bitset.
#[derive(Debug, Clone)]
pub struct Plane {
    field: Field,
    lines: Vec<Line>,
    // row per line, `words` u64 per row
    incidence: Vec<u64>,
    words: usize,
}

/// Number of points (and of lines) of a plane of order `order`.
pub fn plane_size(order: u32) -> usize {
    let o = order as usize;
    o * o + o + 1
}

impl Plane {
    pub fn build(pi: Prime) -> Plane {
        let field = Field::new(pi);
        let order = pi.get();
        let size = plane_size(order);
        let mut lines = Vec::with_capacity(size);
        for index in 0..size {
            let kind = LineKind::from_index(index, order);
            lines.push(Line {
                kind,
                points: points_on(field, kind),
            });
        }
        let words = size.div_ceil(64);
        let mut incidence = vec![0u64; size * words];
        for (li, line) in lines.iter().enumerate() {
            for pt in &line.points {
                let pi = pt.index(order);
                incidence[li * words + pi / 64] |= 1 << (pi % 64);
            }
        }
        Plane {
            field,
            lines,
            incidence,
            words,
        }
    }

    pub fn order(&self) -> u32 {
        self.field.order()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        let order = self.order();
        (0..plane_size(order)).map(move |i| Point::from_index(i, order))
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn line(&self, kind: LineKind) -> &Line {
        &self.lines[kind.index(self.order())]
    }

    pub fn contains(&self, line: LineKind, point: Point) -> bool {
        let order = self.order();
        let pi = point.index(order);
        self.incidence[line.index(order) * self.words + pi / 64] >> (pi % 64) & 1 == 1
    }

    pub fn check_point(&self, point: Point) -> Result<(), PlaneError> {
        let o = self.order();
        let bad = match point {
            Point::Alpha => None,
            Point::Beta { y } => (y >= o).then_some(y),
            Point::Gamma { x, y } => [x, y].into_iter().find(|&c| c >= o),
        };
        match bad {
            Some(c) => Err(PlaneError::OutOfRange(c, o)),
            None => Ok(()),
        }
    }

    /// The unique line through two distinct points, computed from
    /// slope/intercept over GF(Π).
    pub fn line_through(&self, a: Point, b: Point) -> Result<LineKind, PlaneError> {
        self.check_point(a)?;
        self.check_point(b)?;
        if a == b {
            return Err(PlaneError::Degenerate(format!("{a} twice")));
        }
        let f = self.field;
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        Ok(match (a, b) {
            (Point::Alpha, Point::Beta { .. }) | (Point::Beta { .. }, Point::Beta { .. }) => {
                LineKind::Alpha
            }
            (Point::Alpha, Point::Gamma { x, .. }) => LineKind::beta(x),
            (Point::Beta { y: i }, Point::Gamma { x, y }) => {
                LineKind::gamma(i, f.sub(y, f.mul(i, x)))
            }
            (Point::Gamma { x: x1, y: y1 }, Point::Gamma { x: x2, y: y2 }) => {
                if x1 == x2 {
                    LineKind::beta(x1)
                } else {
                    let slope = f.div(f.sub(y2, y1), f.sub(x2, x1)).expect("x1 != x2");
                    LineKind::gamma(slope, f.sub(y1, f.mul(slope, x1)))
                }
            }
            _ => unreachable!("points are ordered"),
        })
    }

    /// The unique common point of two distinct lines.
    pub fn intersection(&self, l1: LineKind, l2: LineKind) -> Result<Point, PlaneError> {
        if l1 == l2 {
            return Err(PlaneError::Degenerate(format!("{l1} twice")));
        }
        let f = self.field;
        let (l1, l2) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
        Ok(match (l1, l2) {
            (LineKind::Alpha, LineKind::Beta { .. })
            | (LineKind::Beta { .. }, LineKind::Beta { .. }) => Point::Alpha,
            (LineKind::Alpha, LineKind::Gamma { i, .. }) => Point::beta(i),
            (LineKind::Beta { i: x }, LineKind::Gamma { i, j }) => {
                Point::gamma(x, f.add(f.mul(i, x), j))
            }
            (LineKind::Gamma { i: i1, j: j1 }, LineKind::Gamma { i: i2, j: j2 }) => {
                if i1 == i2 {
                    Point::beta(i1)
                } else {
                    let x = f.div(f.sub(j2, j1), f.sub(i1, i2)).expect("i1 != i2");
                    Point::gamma(x, f.add(f.mul(i1, x), j1))
                }
            }
            _ => unreachable!("lines are ordered"),
        })
    }

    /// The Π+1 lines through `point`.
    pub fn lines_through(&self, point: Point) -> Vec<LineKind> {
        let f = self.field;
        let o = self.order();
        match point {
            Point::Alpha => std::iter::once(LineKind::Alpha)
                .chain((0..o).map(LineKind::beta))
                .collect(),
            Point::Beta { y } => std::iter::once(LineKind::Alpha)
                .chain((0..o).map(|j| LineKind::gamma(y, j)))
                .collect(),
            Point::Gamma { x, y } => std::iter::once(LineKind::beta(x))
                .chain((0..o).map(|i| LineKind::gamma(i, f.sub(y, f.mul(i, x)))))
                .collect(),
        }
    }

    /// Text grid of the affine part with optional marks, rows printed
    /// from `y = Π-1` down to `y = 0`.
    pub fn render_grid(&self, mark: impl Fn(Point) -> Option<char>) -> String {
        let o = self.order();
        let mut out = String::new();
        for y in (0..o).rev() {
            out.push_str(&format!("y={y:>3} |"));
            for x in 0..o {
                out.push(' ');
                out.push(mark(Point::gamma(x, y)).unwrap_or('.'));
            }
            out.push_str(&format!(
                " | Pβ({y}) {}\n",
                mark(Point::beta(y)).unwrap_or('.')
            ));
        }
        out.push_str(&format!("Pα {}\n", mark(Point::Alpha).unwrap_or('.')));
        out
    }
}

fn points_on(f: Field, kind: LineKind) -> Vec<Point> {
    let o = f.order();
    match kind {
        LineKind::Alpha => std::iter::once(Point::Alpha)
            .chain((0..o).map(Point::beta))
            .collect(),
        LineKind::Beta { i } => std::iter::once(Point::Alpha)
            .chain((0..o).map(|y| Point::gamma(i, y)))
            .collect(),
        LineKind::Gamma { i, j } => std::iter::once(Point::beta(i))
            .chain((0..o).map(|k| Point::gamma(k, f.add(f.mul(i, k), j))))
            .collect(),
    }
}
