//! Periodic tridiagonal systems, scalar and with 2x2 blocks.
//!
//! Both solvers run Thomas elimination on the acyclic part and fold the two
//! wrap-around entries back in with a Sherman-Morrison (scalar) or rank-2
//! Woodbury (block) correction. No pivoting beyond the natural order; the
//! implicit time steps that use these are diagonally dominant.

use std::ops::{Add, Mul, Neg, Sub};

use log::debug;

use crate::error::{FlowError, Result};
use crate::geometry::Vec2;

/// Pivots below this fraction of their row scale count as singular.
pub const PIVOT_TOL: f64 = 1e-13;

/// Row-major 2x2 matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const ZERO: Mat2 = Mat2::new(0.0, 0.0, 0.0, 0.0);
    pub const IDENTITY: Mat2 = Mat2::new(1.0, 0.0, 0.0, 1.0);
    /// Matrix of the quarter turn `v -> perp(v)`.
    pub const PERP: Mat2 = Mat2::new(0.0, -1.0, 1.0, 0.0);

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn scalar(s: f64) -> Self {
        Mat2::new(s, 0.0, 0.0, s)
    }

    /// `u v^T`.
    pub fn outer(u: Vec2, v: Vec2) -> Self {
        Mat2::new(u.x * v.x, u.x * v.y, u.y * v.x, u.y * v.y)
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// Max absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (self.a.abs() + self.b.abs()).max(self.c.abs() + self.d.abs())
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        Some(Mat2::new(
            self.d / det,
            -self.b / det,
            -self.c / det,
            self.a / det,
        ))
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2::new(self.a, self.c, self.b, self.d)
    }

    pub fn col(&self, k: usize) -> Vec2 {
        match k {
            0 => Vec2::new(self.a, self.c),
            _ => Vec2::new(self.b, self.d),
        }
    }

    pub fn from_cols(c0: Vec2, c1: Vec2) -> Mat2 {
        Mat2::new(c0.x, c1.x, c0.y, c1.y)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        Mat2::new(-self.a, -self.b, -self.c, -self.d)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl Mul<Vec2> for Mat2 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        Vec2::new(self.a * v.x + self.b * v.y, self.c * v.x + self.d * v.y)
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: f64) -> Mat2 {
        Mat2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(FlowError::SizeMismatch { expected, got });
    }
    Ok(())
}

fn check_n(n: usize) -> Result<()> {
    if n < 3 {
        return Err(FlowError::InvalidN {
            n,
            reason: "cyclic systems need at least 3 rows",
        });
    }
    Ok(())
}

/// Row `j`: `sub[j] x[j-1] + diag[j] x[j] + sup[j] x[j+1] = rhs[j]`, indices
/// periodic.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicTridiag {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl CyclicTridiag {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        check_n(n)?;
        check_len(n, sub.len())?;
        check_len(n, sup.len())?;
        Ok(CyclicTridiag { sub, diag, sup })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `A x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|j| {
                self.sub[j] * x[(j + n - 1) % n]
                    + self.diag[j] * x[j]
                    + self.sup[j] * x[(j + 1) % n]
            })
            .collect()
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.len())
            .map(|j| self.sub[j].abs() + self.diag[j].abs() + self.sup[j].abs())
            .fold(0.0, f64::max)
    }

    pub fn is_diagonally_dominant(&self) -> bool {
        (0..self.len()).all(|j| self.diag[j].abs() > self.sub[j].abs() + self.sup[j].abs())
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        solve_cyclic_tridiag(self, rhs)
    }
}

/// Forward-eliminated acyclic tridiagonal system, reusable for several
/// right-hand sides.
struct ThomasFactor {
    lower: Vec<f64>,
    // modified super diagonal c'_j = c_j / pivot_j
    upper: Vec<f64>,
    pivots: Vec<f64>,
}

impl ThomasFactor {
    /// Factor the tridiagonal matrix with the given (already modified)
    /// diagonal. `lower[j]` couples row `j` to `j - 1`, `upper[j]` row `j`
    /// to `j + 1`; the corner entries are ignored.
    fn new(lower: &[f64], diag: &[f64], upper: &[f64], scale: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut cp = vec![0.0; n];
        let mut piv = vec![0.0; n];
        for j in 0..n {
            let p = if j == 0 {
                diag[0]
            } else {
                diag[j] - lower[j] * cp[j - 1]
            };
            if !(p.abs() > PIVOT_TOL * scale[j]) {
                return Err(FlowError::SingularSystem { row: j, pivot: p });
            }
            piv[j] = p;
            cp[j] = if j + 1 < n { upper[j] / p } else { 0.0 };
        }
        Ok(ThomasFactor {
            lower: lower.to_vec(),
            upper: cp,
            pivots: piv,
        })
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = rhs.len();
        let mut y = vec![0.0; n];
        for j in 0..n {
            let prev = if j == 0 {
                0.0
            } else {
                self.lower[j] * y[j - 1]
            };
            y[j] = (rhs[j] - prev) / self.pivots[j];
        }
        for j in (0..n - 1).rev() {
            y[j] -= self.upper[j] * y[j + 1];
        }
        y
    }
}

pub fn solve_cyclic_tridiag(a: &CyclicTridiag, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = a.len();
    check_n(n)?;
    check_len(n, rhs.len())?;
    if !a.is_diagonally_dominant() {
        debug!("cyclic tridiagonal system of size {n} is not strictly diagonally dominant; relying on pivot checks");
    }

    let scale: Vec<f64> = (0..n)
        .map(|j| a.sub[j].abs() + a.diag[j].abs() + a.sup[j].abs())
        .collect();
    // Corner entries: row 0 couples to x[n-1] through sub[0], row n-1 to x[0]
    // through sup[n-1]. A = T + u v^T with u = (gamma, 0.., sup[n-1]) and
    // v = (1, 0.., sub[0] / gamma).
    let gamma = if a.diag[0] != 0.0 { -a.diag[0] } else { -1.0 };
    let corner_top = a.sub[0];
    let corner_bottom = a.sup[n - 1];
    let mut diag = a.diag.clone();
    diag[0] -= gamma;
    diag[n - 1] -= corner_bottom * corner_top / gamma;

    let factor = ThomasFactor::new(&a.sub, &diag, &a.sup, &scale)?;
    let y = factor.solve(rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = corner_bottom;
    let z = factor.solve(&u);

    let vy = y[0] + corner_top / gamma * y[n - 1];
    let vz = z[0] + corner_top / gamma * z[n - 1];
    let denom = 1.0 + vz;
    if !(denom.abs() > PIVOT_TOL * (1.0 + vz.abs())) {
        return Err(FlowError::SingularSystem {
            row: n - 1,
            pivot: denom,
        });
    }
    let coef = vy / denom;
    Ok(y.iter().zip(&z).map(|(yi, zi)| yi - coef * zi).collect())
}

/// Block row `j`: `sub[j] x[j-1] + diag[j] x[j] + sup[j] x[j+1] = rhs[j]`
/// with 2x2 blocks and 2-vector unknowns.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockCyclicTridiag {
    pub sub: Vec<Mat2>,
    pub diag: Vec<Mat2>,
    pub sup: Vec<Mat2>,
}

impl BlockCyclicTridiag {
    pub fn new(sub: Vec<Mat2>, diag: Vec<Mat2>, sup: Vec<Mat2>) -> Result<Self> {
        let n = diag.len();
        check_n(n)?;
        check_len(n, sub.len())?;
        check_len(n, sup.len())?;
        Ok(BlockCyclicTridiag { sub, diag, sup })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[Vec2]) -> Vec<Vec2> {
        let n = self.len();
        (0..n)
            .map(|j| {
                self.sub[j] * x[(j + n - 1) % n]
                    + self.diag[j] * x[j]
                    + self.sup[j] * x[(j + 1) % n]
            })
            .collect()
    }

    /// Infinity norm of the assembled `2N x 2N` matrix.
    pub fn norm_inf(&self) -> f64 {
        let row = |m: &Mat2, r: usize| {
            if r == 0 {
                m.a.abs() + m.b.abs()
            } else {
                m.c.abs() + m.d.abs()
            }
        };
        (0..self.len())
            .flat_map(|j| {
                (0..2).map(move |r| {
                    row(&self.sub[j], r) + row(&self.diag[j], r) + row(&self.sup[j], r)
                })
            })
            .fold(0.0, f64::max)
    }

    /// Scalar rows of the assembled matrix are strictly diagonally dominant.
    pub fn is_diagonally_dominant(&self) -> bool {
        (0..self.len()).all(|j| {
            let (s, d, u) = (self.sub[j], self.diag[j], self.sup[j]);
            let off0 = s.a.abs() + s.b.abs() + u.a.abs() + u.b.abs() + d.b.abs();
            let off1 = s.c.abs() + s.d.abs() + u.c.abs() + u.d.abs() + d.c.abs();
            d.a.abs() > off0 && d.d.abs() > off1
        })
    }

    pub fn solve(&self, rhs: &[Vec2]) -> Result<Vec<Vec2>> {
        solve_block_cyclic_tridiag(self, rhs)
    }
}

struct BlockThomasFactor {
    lower: Vec<Mat2>,
    upper: Vec<Mat2>,
    pivot_inv: Vec<Mat2>,
}

impl BlockThomasFactor {
    fn new(lower: &[Mat2], diag: &[Mat2], upper: &[Mat2], scale: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut cp = vec![Mat2::ZERO; n];
        let mut pinv = vec![Mat2::ZERO; n];
        for j in 0..n {
            let p = if j == 0 {
                diag[0]
            } else {
                diag[j] - lower[j] * cp[j - 1]
            };
            let det = p.det();
            let s = scale[j];
            let inv = p
                .inverse()
                .filter(|_| det.abs() > PIVOT_TOL * s * s)
                .ok_or(FlowError::SingularSystem { row: j, pivot: det })?;
            pinv[j] = inv;
            cp[j] = if j + 1 < n {
                inv * upper[j]
            } else {
                Mat2::ZERO
            };
        }
        Ok(BlockThomasFactor {
            lower: lower.to_vec(),
            upper: cp,
            pivot_inv: pinv,
        })
    }

    fn solve(&self, rhs: &[Vec2]) -> Vec<Vec2> {
        let n = rhs.len();
        let mut y = vec![Vec2::ZERO; n];
        for j in 0..n {
            let prev = if j == 0 {
                Vec2::ZERO
            } else {
                self.lower[j] * y[j - 1]
            };
            y[j] = self.pivot_inv[j] * (rhs[j] - prev);
        }
        for j in (0..n - 1).rev() {
            let next = y[j + 1];
            y[j] -= self.upper[j] * next;
        }
        y
    }
}

pub fn solve_block_cyclic_tridiag(a: &BlockCyclicTridiag, rhs: &[Vec2]) -> Result<Vec<Vec2>> {
    let n = a.len();
    check_n(n)?;
    check_len(n, rhs.len())?;
    if !a.is_diagonally_dominant() {
        debug!("block cyclic tridiagonal system of size {n} is not diagonally dominant; relying on pivot checks");
    }

    let scale: Vec<f64> = (0..n)
        .map(|j| a.sub[j].norm_inf() + a.diag[j].norm_inf() + a.sup[j].norm_inf())
        .collect();
    // A = T + U V^T with block rows U_0 = G, U_{n-1} = sup[n-1] and block
    // columns V_0 = I, V_{n-1} = (G^{-1} sub[0])^T, G = -diag[0].
    let g = match a.diag[0].inverse() {
        Some(_) => -a.diag[0],
        None => Mat2::scalar(-1.0),
    };
    let g_inv = g.inverse().expect("G is invertible by construction");
    let corner_top = a.sub[0];
    let corner_bottom = a.sup[n - 1];
    let w = g_inv * corner_top;
    let mut diag = a.diag.clone();
    diag[0] = diag[0] - g;
    diag[n - 1] = diag[n - 1] - corner_bottom * w;

    let factor = BlockThomasFactor::new(&a.sub, &diag, &a.sup, &scale)?;
    let y = factor.solve(rhs);
    let z: Vec<Vec<Vec2>> = (0..2)
        .map(|k| {
            let mut u = vec![Vec2::ZERO; n];
            u[0] = g.col(k);
            u[n - 1] = corner_bottom.col(k);
            factor.solve(&u)
        })
        .collect();

    // V^T y and V^T Z, with V^T = [I, 0, ..., w].
    let vy = y[0] + w * y[n - 1];
    let vz = Mat2::from_cols(z[0][0] + w * z[0][n - 1], z[1][0] + w * z[1][n - 1]);
    let cap = Mat2::IDENTITY + vz;
    let cap_scale = 1.0 + vz.norm_inf();
    let cap_inv = cap
        .inverse()
        .filter(|_| cap.det().abs() > PIVOT_TOL * cap_scale * cap_scale)
        .ok_or(FlowError::SingularSystem {
            row: n - 1,
            pivot: cap.det(),
        })?;
    let coef = cap_inv * vy;
    Ok((0..n)
        .map(|j| y[j] - (z[0][j] * coef.x + z[1][j] * coef.y))
        .collect())
}

/// `max_j |r_j|` over all scalar components of `A x - rhs`.
pub(crate) fn block_residual(a: &BlockCyclicTridiag, x: &[Vec2], rhs: &[Vec2]) -> f64 {
    a.apply(x)
        .iter()
        .zip(rhs)
        .map(|(ax, b)| (ax.x - b.x).abs().max((ax.y - b.y).abs()))
        .fold(0.0, f64::max)
}

pub(crate) fn scalar_residual(a: &CyclicTridiag, x: &[f64], rhs: &[f64]) -> f64 {
    a.apply(x)
        .iter()
        .zip(rhs)
        .map(|(ax, b)| (ax - b).abs())
        .fold(0.0, f64::max)
}
