//! Hexagonal lattice with cyclic boundary conditions.
//!
//! Vertices are labelled `(x, y, s)` with `0 <= x, y < n`. `s = 0` marks the
//! "empty" sublattice sitting at `x·e_x + y·e_y`, `s = 1` the "full" one
//! shifted by `α = (e_x + e_y)/3`. The three edge colours each form a
//! tessellation of the vertex set into 2-vertex cells:
//!
//! ```text
//! red   : {(x,y,1), (x+1,y,0)}
//! green : {(x,y,1), (x,y+1,0)}
//! blue  : {(x,y,0), (x,y,1)}
//! ```
//!
//! with all arithmetic modulo `n`. Amplitudes are stored sublattice-major,
//! `index = s·n² + y·n + x`, so each sublattice is one contiguous `n × n`
//! row-major plane.

use std::fmt;

use crate::error::{Error, Result};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Bravais vector along the `x` label direction.
pub const E_X: Point2 = Point2 { x: SQRT_3, y: 0.0 };
/// Bravais vector along the `y` label direction.
pub const E_Y: Point2 = Point2 { x: SQRT_3 / 2.0, y: 1.5 };
/// Offset of the full sublattice, `(e_x + e_y)/3`.
pub const ALPHA: Point2 = Point2 { x: SQRT_3 / 2.0, y: 0.5 };

/// A vertex label `(x, y, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub x: usize,
    pub y: usize,
    pub s: u8,
}

impl Vertex {
    pub const fn new(x: usize, y: usize, s: u8) -> Self {
        Vertex { x, y, s }
    }

    pub const fn empty(x: usize, y: usize) -> Self {
        Vertex { x, y, s: 0 }
    }

    pub const fn full(x: usize, y: usize) -> Self {
        Vertex { x, y, s: 1 }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.x, self.y, self.s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Color {
    Red,
    Green,
    Blue,
}

impl Color {
    /// Tessellations in the order their local unitaries act within one step.
    pub const ALL: [Color; 3] = [Color::Red, Color::Green, Color::Blue];

    /// Index `j` of the Hamiltonian `H_j` attached to this colour.
    pub fn hamiltonian_index(self) -> usize {
        match self {
            Color::Red => 0,
            Color::Green => 1,
            Color::Blue => 2,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Color::Red => "red",
            Color::Green => "green",
            Color::Blue => "blue",
        };
        f.write_str(name)
    }
}

/// One 2-vertex cell of a tessellation. Every cell joins a full vertex to an
/// empty one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cell {
    pub color: Color,
    pub full: Vertex,
    pub empty: Vertex,
}

impl Cell {
    pub fn pair(&self) -> [Vertex; 2] {
        [self.full, self.empty]
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.full == v || self.empty == v
    }
}

/// Planar point in edge-length units.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl std::ops::Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Mul<Point2> for f64 {
    type Output = Point2;
    fn mul(self, rhs: Point2) -> Point2 {
        Point2::new(self * rhs.x, self * rhs.y)
    }
}

/// Hexagonal lattice of `n × n` hexagons on a torus, `N = 2n²` vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HexLattice {
    n: usize,
}

impl HexLattice {
    /// `n` must be even and at least 2.
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "lattice size n must be even and >= 2, got {n}"
            )));
        }
        Ok(HexLattice { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of vertices, `2n²`.
    pub fn num_vertices(&self) -> usize {
        2 * self.n * self.n
    }

    /// Number of cells per sublattice plane, `n²`.
    pub fn plane_len(&self) -> usize {
        self.n * self.n
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v.x < self.n && v.y < self.n && v.s <= 1
    }

    pub fn index(&self, v: Vertex) -> Result<usize> {
        if !self.contains(v) {
            return Err(Error::invalid(format!(
                "vertex {v} outside lattice with n = {}",
                self.n
            )));
        }
        Ok(self.index_unchecked(v))
    }

    #[inline]
    pub(crate) fn index_unchecked(&self, v: Vertex) -> usize {
        v.s as usize * self.n * self.n + v.y * self.n + v.x
    }

    /// Inverse of [`HexLattice::index`].
    pub fn label(&self, index: usize) -> Result<Vertex> {
        if index >= self.num_vertices() {
            return Err(Error::invalid(format!(
                "index {index} outside [0, {})",
                self.num_vertices()
            )));
        }
        let nn = self.n * self.n;
        let s = (index / nn) as u8;
        let rem = index % nn;
        Ok(Vertex::new(rem % self.n, rem / self.n, s))
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.num_vertices()).map(move |i| {
            let nn = self.n * self.n;
            let rem = i % nn;
            Vertex::new(rem % self.n, rem / self.n, (i / nn) as u8)
        })
    }

    /// Cell of colour `color` anchored at the full vertex `(x, y, 1)`.
    pub fn cell(&self, color: Color, x: usize, y: usize) -> Cell {
        let n = self.n;
        let empty = match color {
            Color::Red => Vertex::empty((x + 1) % n, y),
            Color::Green => Vertex::empty(x, (y + 1) % n),
            Color::Blue => Vertex::empty(x, y),
        };
        Cell {
            color,
            full: Vertex::full(x, y),
            empty,
        }
    }

    /// All `n²` cells of one tessellation.
    pub fn tessellation(&self, color: Color) -> Vec<Cell> {
        let n = self.n;
        (0..n)
            .flat_map(|y| (0..n).map(move |x| (x, y)))
            .map(|(x, y)| self.cell(color, x, y))
            .collect()
    }

    /// The vertex sharing a `color` cell with `v`.
    pub fn partner(&self, color: Color, v: Vertex) -> Vertex {
        let n = self.n;
        match (color, v.s) {
            (Color::Red, 1) => Vertex::empty((v.x + 1) % n, v.y),
            (Color::Red, _) => Vertex::full((v.x + n - 1) % n, v.y),
            (Color::Green, 1) => Vertex::empty(v.x, (v.y + 1) % n),
            (Color::Green, _) => Vertex::full(v.x, (v.y + n - 1) % n),
            (Color::Blue, 1) => Vertex::empty(v.x, v.y),
            (Color::Blue, _) => Vertex::full(v.x, v.y),
        }
    }

    /// Red, green and blue neighbours of `v`, in that order.
    pub fn neighbors(&self, v: Vertex) -> Result<[Vertex; 3]> {
        if !self.contains(v) {
            return Err(Error::invalid(format!("vertex {v} outside lattice")));
        }
        Ok(Color::ALL.map(|c| self.partner(c, v)))
    }

    /// Planar position `x·e_x + y·e_y + s·α`; periodicity is ignored.
    pub fn position(&self, v: Vertex) -> Point2 {
        v.x as f64 * E_X + v.y as f64 * E_Y + f64::from(v.s) * ALPHA
    }

    /// Positions of all vertices in flat-index order.
    pub fn positions(&self) -> Vec<Point2> {
        self.vertices().map(|v| self.position(v)).collect()
    }

    /// Vertex translated by `(dx, dy)` modulo `n`.
    pub fn translate(&self, v: Vertex, dx: usize, dy: usize) -> Vertex {
        Vertex::new((v.x + dx) % self.n, (v.y + dy) % self.n, v.s)
    }
}
