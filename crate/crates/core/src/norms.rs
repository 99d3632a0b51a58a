//! Grid norms on the uniform periodic grid and exact norms of differences of
//! piecewise-linear interpolants on nested grids.

use std::f64::consts::TAU;

use crate::error::{FlowError, Result};
use crate::geometry::{GridCurve, Vec2};

/// Values a grid function may take.
pub trait GridValue: Copy {
    fn abs_sq(self) -> f64;
    fn diff(self, other: Self) -> Self;
}

impl GridValue for f64 {
    fn abs_sq(self) -> f64 {
        self * self
    }
    fn diff(self, other: Self) -> Self {
        self - other
    }
}

impl GridValue for Vec2 {
    fn abs_sq(self) -> f64 {
        self.norm_sq()
    }
    fn diff(self, other: Self) -> Self {
        self - other
    }
}

/// Function on the grid `xi_j = 2 pi j / N`, read periodically.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T> {
    values: Vec<T>,
}

impl<T: GridValue> GridFunction<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.len() < 3 {
            return Err(FlowError::InvalidN {
                n: values.len(),
                reason: "grid functions need at least 3 nodes",
            });
        }
        Ok(GridFunction { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn step(&self) -> f64 {
        TAU / self.values.len() as f64
    }

    /// Backward difference quotients `(u_j - u_{j-1}) / h`.
    pub fn backward_differences(&self) -> Vec<T>
    where
        T: std::ops::Div<f64, Output = T>,
    {
        let n = self.len();
        let h = self.step();
        (0..n)
            .map(|j| self.values[j].diff(self.values[(j + n - 1) % n]) / h)
            .collect()
    }

    /// Pointwise difference of two grid functions on the same grid.
    pub fn sub(&self, other: &GridFunction<T>) -> Result<GridFunction<T>> {
        if self.len() != other.len() {
            return Err(FlowError::SizeMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(GridFunction {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.diff(*b))
                .collect(),
        })
    }
}

impl GridFunction<Vec2> {
    pub fn from_curve(curve: &GridCurve) -> Self {
        GridFunction {
            values: curve.vertices().to_vec(),
        }
    }
}

fn sum_sq<T: GridValue>(values: &[T]) -> f64 {
    values.iter().map(|v| v.abs_sq()).sum()
}

fn difference_sum_sq<T: GridValue>(values: &[T]) -> f64 {
    let n = values.len();
    (0..n)
        .map(|j| values[j].diff(values[(j + n - 1) % n]).abs_sq())
        .sum()
}

/// `(h sum |u_j|^2)^{1/2}`.
pub fn grid_l2<T: GridValue>(u: &GridFunction<T>) -> f64 {
    (u.step() * sum_sq(&u.values)).sqrt()
}

/// `(h sum |u_j|^2 + |delta u_j|^2)^{1/2}` with backward differences.
pub fn grid_h1<T: GridValue>(u: &GridFunction<T>) -> f64 {
    let h = u.step();
    (h * sum_sq(&u.values) + difference_sum_sq(&u.values) / h).sqrt()
}

/// `max_j |u_j|`.
pub fn grid_linf<T: GridValue>(u: &GridFunction<T>) -> f64 {
    u.values
        .iter()
        .map(|v| v.abs_sq().sqrt())
        .fold(0.0, f64::max)
}

fn check_nested(coarse: usize, fine: usize) -> Result<()> {
    if fine != 2 * coarse {
        return Err(FlowError::SizeMismatch {
            expected: 2 * coarse,
            got: fine,
        });
    }
    Ok(())
}

/// Even-indexed vertices of a curve on the refined grid, viewed as a grid
/// function on the coarse grid.
pub fn restrict_fine(fine: &GridCurve) -> Result<GridFunction<Vec2>> {
    let m = fine.n_segments();
    if !m.is_multiple_of(2) || m < 6 {
        return Err(FlowError::SizeMismatch {
            expected: 2 * (m / 2).max(3),
            got: m,
        });
    }
    GridFunction::new(fine.vertices().iter().step_by(2).copied().collect())
}

/// Values of `I_h coarse - I_{h/2} fine` at the fine nodes, together with the
/// derivative difference on each fine interval.
fn nested_differences(coarse: &GridCurve, fine: &GridCurve) -> Result<(Vec<Vec2>, Vec<Vec2>)> {
    let n = coarse.n_segments();
    check_nested(n, fine.n_segments())?;
    let h = TAU / n as f64;
    let c = coarse.vertices();
    let f = fine.vertices();
    let m = 2 * n;
    let values: Vec<Vec2> = (0..m)
        .map(|i| {
            let j = i / 2;
            let ci = if i % 2 == 0 {
                c[j]
            } else {
                (c[j] + c[(j + 1) % n]) * 0.5
            };
            ci - f[i]
        })
        .collect();
    // derivative on fine interval (xi_i, xi_{i+1})
    let derivs: Vec<Vec2> = (0..m)
        .map(|i| {
            let j = i / 2;
            let dc = (c[(j + 1) % n] - c[j]) / h;
            let df = (f[(i + 1) % m] - f[i]) / (0.5 * h);
            dc - df
        })
        .collect();
    Ok((values, derivs))
}

/// Exact `L^2(S^1)` norm of the difference of the piecewise-linear
/// interpolants of a curve and its refinement on the doubled grid.
pub fn pl_l2_diff(coarse: &GridCurve, fine: &GridCurve) -> Result<f64> {
    let (d, _) = nested_differences(coarse, fine)?;
    let m = d.len();
    let dx = TAU / m as f64;
    // |d|^2 is quadratic on each fine interval
    let s: f64 = (0..m)
        .map(|i| {
            let a = d[i];
            let b = d[(i + 1) % m];
            (a.norm_sq() + a.dot(b) + b.norm_sq()) / 3.0
        })
        .sum();
    Ok((dx * s).sqrt())
}

/// Exact `L^2(S^1)` norm of the parameter-derivative difference.
pub fn pl_derivative_l2_diff(coarse: &GridCurve, fine: &GridCurve) -> Result<f64> {
    let (_, dd) = nested_differences(coarse, fine)?;
    let dx = TAU / dd.len() as f64;
    Ok((dx * dd.iter().map(|v| v.norm_sq()).sum::<f64>()).sqrt())
}

/// `||I_h c - I_{h/2} f||_{L^2} + ||d_xi (I_h c - I_{h/2} f)||_{L^2}`.
pub fn pl_h1_diff(coarse: &GridCurve, fine: &GridCurve) -> Result<f64> {
    Ok(pl_l2_diff(coarse, fine)? + pl_derivative_l2_diff(coarse, fine)?)
}

/// Both sides of `||g||_{H^1}^2 <= ||g||_{H^1_G}^2 (1 + h^2 / 6)` for a scalar
/// grid function identified with its piecewise-linear interpolant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct H1BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl H1BoundCheck {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

pub fn h1g_bound_check(g: &GridFunction<f64>) -> H1BoundCheck {
    let n = g.len();
    let h = g.step();
    let v = g.values();
    let mut l2 = 0.0;
    let mut d2 = 0.0;
    for j in 0..n {
        let a = v[j];
        let b = v[(j + 1) % n];
        l2 += h * (a * a + a * b + b * b) / 3.0;
        d2 += (b - a) * (b - a) / h;
    }
    let h1g = grid_h1(g);
    H1BoundCheck {
        lhs: l2 + d2,
        rhs: h1g * h1g * (1.0 + h * h / 6.0),
    }
}
