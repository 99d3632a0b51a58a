//! Discrete differential geometry of closed polygonal curves.
//!
//! A [`GridCurve`] holds `N` vertices `x_0, ..., x_{N-1}` sampled on the
//! uniform parameter grid `xi_j = j h`, `h = 2 pi / N`. All indices are read
//! modulo `N`. Edge `j` joins vertex `j - 1` to vertex `j`, so vertex `j` sits
//! between its incoming edge `j` and its outgoing edge `j + 1`.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};

/// Smallest admissible `|tau_j + tau_{j+1}|` before an averaged tangent is
/// declared a cusp.
pub const CUSP_EPS: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    #[inline]
    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// Scalar 2D cross product `self.x * other.y - self.y * other.x`.
    #[inline]
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn perp(self) -> Vec2 {
        perp(self)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Quarter turn `(a, b) -> (-b, a)`.
///
/// Applied to the unit tangent of a counterclockwise curve this gives the
/// inner normal.
#[inline]
pub fn perp(v: Vec2) -> Vec2 {
    Vec2::new(-v.y, v.x)
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl SubAssign for Vec2 {
    #[inline]
    fn sub_assign(&mut self, rhs: Vec2) {
        self.x -= rhs.x;
        self.y -= rhs.y;
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    #[inline]
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x / s, self.y / s)
    }
}

impl From<(f64, f64)> for Vec2 {
    fn from((x, y): (f64, f64)) -> Self {
        Vec2::new(x, y)
    }
}

/// Closed polygon sampled on a uniform periodic parameter grid.
///
/// Only the vertices are stored; edge quantities are recomputed on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCurve {
    vertices: Vec<Vec2>,
}

impl GridCurve {
    /// Builds a curve, rejecting fewer than three vertices, non-finite
    /// coordinates and zero-length edges.
    pub fn new(vertices: Vec<Vec2>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(FlowError::InvalidN {
                n,
                reason: "a closed curve needs at least 3 vertices",
            });
        }
        if let Some(j) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(FlowError::InvalidCurve(format!(
                "vertex {j} has non-finite coordinates"
            )));
        }
        for j in 0..n {
            let prev = vertices[(j + n - 1) % n];
            if (vertices[j] - prev).norm() <= 0.0 {
                return Err(FlowError::InvalidCurve(format!("edge {j} has zero length")));
            }
        }
        Ok(GridCurve { vertices })
    }

    pub fn from_xy(points: &[(f64, f64)]) -> Result<Self> {
        Self::new(points.iter().copied().map(Vec2::from).collect())
    }

    #[inline]
    pub fn n_segments(&self) -> usize {
        self.vertices.len()
    }

    /// Parameter spacing `h = 2 pi / N`.
    #[inline]
    pub fn param_step(&self) -> f64 {
        TAU / self.vertices.len() as f64
    }

    #[inline]
    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Vec2> {
        self.vertices
    }

    /// Vertex `j`, read periodically (negative indices allowed).
    #[inline]
    pub fn vertex(&self, j: isize) -> Vec2 {
        self.vertices[wrap(j, self.vertices.len())]
    }

    /// `x_j - x_{j-1}`.
    #[inline]
    pub fn edge(&self, j: usize) -> Vec2 {
        let n = self.vertices.len();
        self.vertices[j % n] - self.vertices[(j + n - 1) % n]
    }

    pub fn translated(&self, shift: Vec2) -> GridCurve {
        GridCurve {
            vertices: self.vertices.iter().map(|&v| v + shift).collect(),
        }
    }
}

#[inline]
pub(crate) fn wrap(j: isize, n: usize) -> usize {
    j.rem_euclid(n as isize) as usize
}

/// `q_j = |x_j - x_{j-1}|` for every edge.
pub fn edge_lengths(curve: &GridCurve) -> Vec<f64> {
    (0..curve.n_segments())
        .map(|j| curve.edge(j).norm())
        .collect()
}

/// Unit edge tangents `tau_j = (x_j - x_{j-1}) / q_j`.
pub fn edge_tangents(curve: &GridCurve) -> Vec<Vec2> {
    (0..curve.n_segments())
        .map(|j| {
            let e = curve.edge(j);
            e / e.norm()
        })
        .collect()
}

/// Edge normals `n_j = perp(tau_j)`.
pub fn edge_normals(curve: &GridCurve) -> Vec<Vec2> {
    edge_tangents(curve).into_iter().map(perp).collect()
}

/// Normalized sum of two consecutive unit tangents.
pub fn bisect_tangents(incoming: Vec2, outgoing: Vec2) -> std::result::Result<Vec2, f64> {
    let s = incoming + outgoing;
    let m = s.norm();
    if m <= CUSP_EPS {
        Err(m)
    } else {
        Ok(s / m)
    }
}

/// Averaged tangent `tau_{j+1/2}` at vertex `j`, bisecting the incoming
/// edge `j` and the outgoing edge `j + 1`.
pub fn averaged_tangent(curve: &GridCurve, j: usize) -> Result<Vec2> {
    let n = curve.n_segments();
    let t_in = curve.edge(j);
    let t_out = curve.edge(j + 1);
    bisect_tangents(t_in / t_in.norm(), t_out / t_out.norm()).map_err(|magnitude| FlowError::Cusp {
        vertex: j % n,
        magnitude,
    })
}

/// Averaged tangents at every vertex, given precomputed edge tangents.
pub(crate) fn averaged_tangents_from(tangents: &[Vec2]) -> Result<Vec<Vec2>> {
    let n = tangents.len();
    (0..n)
        .map(|j| {
            bisect_tangents(tangents[j], tangents[(j + 1) % n]).map_err(|magnitude| {
                FlowError::Cusp {
                    vertex: j,
                    magnitude,
                }
            })
        })
        .collect()
}

/// Polygon perimeter `l_h`.
pub fn perimeter(curve: &GridCurve) -> f64 {
    edge_lengths(curve).iter().sum()
}

/// Shoelace area `1/2 sum x_{j-1} x x_j`. Positive for counterclockwise
/// simple polygons; winding-number weighted for self-intersecting ones.
pub fn signed_area(curve: &GridCurve) -> f64 {
    let n = curve.n_segments();
    let v = curve.vertices();
    // Relative to the first vertex, which keeps the sum translation invariant
    // to rounding.
    let o = v[0];
    let mut acc = 0.0;
    for j in 0..n {
        let a = v[(j + n - 1) % n] - o;
        let b = v[j] - o;
        acc += a.cross(b);
    }
    0.5 * acc
}

/// `max_j q_j / min_j q_j`.
pub fn mesh_ratio(curve: &GridCurve) -> f64 {
    let q = edge_lengths(curve);
    let (lo, hi) = q.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| {
        (lo.min(x), hi.max(x))
    });
    hi / lo
}
