//! Mesh geometry and the exact discrete-copula grid.
//!
//! A discrete copula is stored dense, row-major, as the full
//! `(k+1) x (k+1)` table of values `C(i/k, j/k)`, including the redundant
//! boundary rows and columns; validation reads the copula axioms directly
//! off the table in exact arithmetic.

use std::fmt;

use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{rat_u, to_f64, Rat};

/// Equidistant mesh resolution. Grid nodes are `i/k` for `i = 0..=k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mesh {
    k: u32,
}

impl Mesh {
    pub fn new(k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::MeshTooSmall { k });
        }
        Ok(Mesh { k })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Number of grid nodes per axis, `k + 1`.
    pub fn nodes(&self) -> usize {
        self.k as usize + 1
    }

    /// The node value `i/k` as an exact rational.
    pub fn node(&self, i: u32) -> Rat {
        Rat::new(i.into(), self.k.into())
    }

    pub fn contains(&self, p: GridPoint) -> bool {
        p.i <= self.k && p.j <= self.k
    }

    pub fn grid_point(&self, i: u32, j: u32) -> Result<GridPoint> {
        if i > self.k || j > self.k {
            return Err(Error::PointOutOfRange { k: self.k, i, j });
        }
        Ok(GridPoint { i, j })
    }

    /// Index `i` such that `r = i/k`, if `r` lies on the mesh.
    pub fn index_of(&self, r: &Rat) -> Option<u32> {
        if r.is_negative() {
            return None;
        }
        let scaled = r * rat_u(self.k as u64);
        if !scaled.is_integer() {
            return None;
        }
        let idx = scaled.to_integer();
        idx.to_u32().filter(|&i| i <= self.k)
    }

    /// All grid points in row-major order.
    pub fn points(&self) -> impl Iterator<Item = GridPoint> + '_ {
        let k = self.k;
        (0..=k).flat_map(move |i| (0..=k).map(move |j| GridPoint { i, j }))
    }
}

/// A mesh node `(i/k, j/k)` addressed by its integer indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridPoint {
    pub i: u32,
    pub j: u32,
}

impl GridPoint {
    pub fn new(i: u32, j: u32) -> Self {
        GridPoint { i, j }
    }
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

/// Axis-aligned rectangle `[x, x+width] x [y, y+height]` with mesh-aligned
/// corners and nonnegative side lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct Rect {
    pub x: Rat,
    pub y: Rat,
    pub width: Rat,
    pub height: Rat,
}

impl Rect {
    pub fn new(x: Rat, y: Rat, width: Rat, height: Rat) -> Result<Self> {
        if width.is_negative() || height.is_negative() {
            return Err(Error::InvalidParameter {
                name: "rect side length",
                requirement: "nonnegative",
                value: format!("{width} x {height}"),
            });
        }
        Ok(Rect {
            x,
            y,
            width,
            height,
        })
    }

    /// Rectangle `[i0/k, i1/k] x [j0/k, j1/k]` from grid indices.
    pub fn from_indices(mesh: Mesh, i0: u32, j0: u32, i1: u32, j1: u32) -> Result<Self> {
        let lo = mesh.grid_point(i0, j0)?;
        let hi = mesh.grid_point(i1, j1)?;
        if hi.i < lo.i || hi.j < lo.j {
            return Err(Error::InvalidParameter {
                name: "rect corners",
                requirement: "upper corner >= lower corner",
                value: format!("{lo} .. {hi}"),
            });
        }
        Ok(Rect {
            x: mesh.node(lo.i),
            y: mesh.node(lo.j),
            width: mesh.node(hi.i - lo.i),
            height: mesh.node(hi.j - lo.j),
        })
    }
}

/// One violated copula constraint, with the offending cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `C(i/k, 0)` or `C(0, j/k)` is nonzero.
    Grounded { i: u32, j: u32 },
    /// `C(i/k, 1) != i/k` or `C(1, j/k) != j/k`.
    UniformMarginal { i: u32, j: u32 },
    /// The cell with upper-right corner `(i/k, j/k)` carries negative mass.
    TwoIncreasing { i: u32, j: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Grounded { i, j } => write!(f, "groundedness at ({i}, {j})"),
            Violation::UniformMarginal { i, j } => write!(f, "uniform marginals at ({i}, {j})"),
            Violation::TwoIncreasing { i, j } => write!(f, "2-increasing at cell ({i}, {j})"),
        }
    }
}

/// Outcome of [`DiscreteCopula::validate`]: empty means all axioms hold.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn summary(&self) -> String {
        if self.is_ok() {
            "ok".to_string()
        } else {
            self.violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; ")
        }
    }
}

/// A discrete copula: exact values `C(i/k, j/k)` on the full mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteCopula {
    mesh: Mesh,
    /// Row-major `(k+1)^2` table; `values[i * (k+1) + j] = C(i/k, j/k)`.
    values: Vec<Rat>,
}

impl DiscreteCopula {
    /// Builds a grid from nested rows. Only the shape is checked here;
    /// constraint violations are reported by [`Self::validate`].
    pub fn from_values(k: u32, rows: Vec<Vec<Rat>>) -> Result<Self> {
        let mesh = Mesh::new(k)?;
        let n = mesh.nodes();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::ShapeMismatch {
                rows: rows.len(),
                cols: rows.first().map_or(0, |r| r.len()),
                expected: n,
            });
        }
        Ok(DiscreteCopula {
            mesh,
            values: rows.into_iter().flatten().collect(),
        })
    }

    pub(crate) fn from_flat_unchecked(mesh: Mesh, values: Vec<Rat>) -> Self {
        debug_assert_eq!(values.len(), mesh.nodes() * mesh.nodes());
        DiscreteCopula { mesh, values }
    }

    /// The independence grid `C(i/k, j/k) = ij/k^2`.
    pub fn independence(k: u32) -> Result<Self> {
        let mesh = Mesh::new(k)?;
        let n = mesh.nodes();
        let kk = rat_u(k as u64 * k as u64);
        let mut values = Vec::with_capacity(n * n);
        for i in 0..=k {
            for j in 0..=k {
                values.push(rat_u(i as u64 * j as u64) / &kk);
            }
        }
        Ok(DiscreteCopula { mesh, values })
    }

    pub fn mesh(&self) -> Mesh {
        self.mesh
    }

    pub fn k(&self) -> u32 {
        self.mesh.k()
    }

    pub fn value(&self, i: u32, j: u32) -> &Rat {
        &self.values[i as usize * self.mesh.nodes() + j as usize]
    }

    pub fn rows(&self) -> Vec<Vec<Rat>> {
        self.values
            .chunks(self.mesh.nodes())
            .map(|c| c.to_vec())
            .collect()
    }

    /// Checks groundedness, uniform marginals, and cell-wise 2-increasing,
    /// all by exact comparison.
    pub fn validate(&self) -> ValidationReport {
        let k = self.k();
        let mut violations = Vec::new();
        for i in 0..=k {
            if !self.value(i, 0).is_zero() {
                violations.push(Violation::Grounded { i, j: 0 });
            }
            if !self.value(0, i).is_zero() && i != 0 {
                violations.push(Violation::Grounded { i: 0, j: i });
            }
        }
        for i in 0..=k {
            if *self.value(i, k) != self.mesh.node(i) {
                violations.push(Violation::UniformMarginal { i, j: k });
            }
            if *self.value(k, i) != self.mesh.node(i) && i != k {
                violations.push(Violation::UniformMarginal { i: k, j: i });
            }
        }
        for i in 1..=k {
            for j in 1..=k {
                let mass = self.value(i, j) + self.value(i - 1, j - 1)
                    - self.value(i - 1, j)
                    - self.value(i, j - 1);
                if mass.is_negative() {
                    violations.push(Violation::TwoIncreasing { i, j });
                }
            }
        }
        ValidationReport { violations }
    }

    /// C-volume of a mesh-aligned rectangle, by inclusion-exclusion of the
    /// four corner values.
    pub fn c_volume(&self, rect: &Rect) -> Result<Rat> {
        let corner = |x: &Rat, y: &Rat| -> Result<&Rat> {
            let (i, j) = self.corner_indices(x, y)?;
            Ok(self.value(i, j))
        };
        let x1 = &rect.x + &rect.width;
        let y1 = &rect.y + &rect.height;
        Ok(corner(&x1, &y1)? + corner(&rect.x, &rect.y)?
            - corner(&x1, &rect.y)?
            - corner(&rect.x, &y1)?)
    }

    /// Mass of the cell `[i/k, (i+1)/k] x [j/k, (j+1)/k]`, for `i, j < k`.
    pub fn cell_volume(&self, i: u32, j: u32) -> Result<Rat> {
        let k = self.k();
        if i >= k || j >= k {
            return Err(Error::PointOutOfRange { k, i, j });
        }
        Ok(self.value(i + 1, j + 1) + self.value(i, j)
            - self.value(i, j + 1)
            - self.value(i + 1, j))
    }

    fn corner_indices(&self, x: &Rat, y: &Rat) -> Result<(u32, u32)> {
        match (self.mesh.index_of(x), self.mesh.index_of(y)) {
            (Some(i), Some(j)) => Ok((i, j)),
            _ => Err(Error::OffMeshRect {
                k: self.k(),
                x: x.to_string(),
                y: y.to_string(),
            }),
        }
    }

    /// Double-precision view of the grid, for export and sampling paths.
    pub fn to_f64(&self) -> GridF64 {
        GridF64 {
            k: self.k(),
            values: self.values.iter().map(to_f64).collect(),
        }
    }
}

/// Double-precision copula grid. Produced by samplers that mix continuous
/// weights, and by [`DiscreteCopula::to_f64`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridF64 {
    k: u32,
    /// Row-major `(k+1)^2` table, same layout as [`DiscreteCopula`].
    values: Vec<f64>,
}

impl GridF64 {
    pub fn from_values(k: u32, values: Vec<f64>) -> Result<Self> {
        let mesh = Mesh::new(k)?;
        let n = mesh.nodes();
        if values.len() != n * n {
            return Err(Error::ShapeMismatch {
                rows: values.len(),
                cols: 1,
                expected: n * n,
            });
        }
        Ok(GridF64 { k, values })
    }

    pub(crate) fn zeros(k: u32) -> Self {
        let n = k as usize + 1;
        GridF64 {
            k,
            values: vec![0.0; n * n],
        }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn value(&self, i: u32, j: u32) -> f64 {
        self.values[i as usize * (self.k as usize + 1) + j as usize]
    }

    pub(crate) fn value_mut(&mut self, i: u32, j: u32) -> &mut f64 {
        &mut self.values[i as usize * (self.k as usize + 1) + j as usize]
    }

    /// Checks the copula constraints within `tol`: boundary values, uniform
    /// marginals, and cell masses >= -tol.
    pub fn validate(&self, tol: f64) -> bool {
        let k = self.k;
        for i in 0..=k {
            if self.value(i, 0).abs() > tol || self.value(0, i).abs() > tol {
                return false;
            }
            let node = i as f64 / k as f64;
            if (self.value(i, k) - node).abs() > tol || (self.value(k, i) - node).abs() > tol {
                return false;
            }
        }
        for i in 1..=k {
            for j in 1..=k {
                let mass = self.value(i, j) + self.value(i - 1, j - 1)
                    - self.value(i - 1, j)
                    - self.value(i, j - 1);
                if mass < -tol {
                    return false;
                }
            }
        }
        true
    }
}
