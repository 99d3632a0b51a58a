//! Mass-lumped piecewise-linear finite element scheme.

use crate::error::Result;
use crate::forcing::ForceSpec;
use crate::geometry::{edge_lengths, edge_tangents, perp, GridCurve, Vec2};
use crate::linalg::{block_residual, BlockCyclicTridiag, Mat2};

use super::{check_tau, finish_step, StepReport};

/// Lumped-mass ODE right-hand side
/// `v_j = 2 / (q_j + q_{j+1}) (tau_{j+1} - tau_j - f/2 perp(x_{j+1} - x_{j-1}))`.
///
/// The factor 1/2 on the forcing comes from integrating `f (d_xi x_h)^perp`
/// against the hat function of vertex `j`; it is what the fully discrete
/// step reduces to as `tau -> 0`.
pub fn fem_velocity(curve: &GridCurve, spec: &ForceSpec) -> Result<Vec<Vec2>> {
    let n = curve.n_segments();
    let q = edge_lengths(curve);
    let t = edge_tangents(curve);
    let f = spec.force(q.iter().sum())?;
    let x = curve.vertices();
    Ok((0..n)
        .map(|j| {
            let k = (j + 1) % n;
            let chord = x[k] - x[(j + n - 1) % n];
            (t[k] - t[j] - perp(chord) * (0.5 * f)) * (2.0 / (q[j] + q[k]))
        })
        .collect())
}

/// One backward-Euler step with the forcing term implicit through the
/// centered difference `perp(x_{j+1}^k - x_{j-1}^k)`, which couples the two
/// coordinates.
pub fn fem_step(curve: &GridCurve, tau: f64, spec: &ForceSpec) -> Result<StepReport> {
    check_tau(tau)?;
    let n = curve.n_segments();
    let q = edge_lengths(curve);
    let f = spec.force(q.iter().sum())?;
    let half_f = Mat2::PERP * (0.5 * f);

    let mut sub = Vec::with_capacity(n);
    let mut diag = Vec::with_capacity(n);
    let mut sup = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    for j in 0..n {
        let k = (j + 1) % n;
        let mass = (q[j] + q[k]) / (2.0 * tau);
        diag.push(Mat2::scalar(mass + 1.0 / q[j] + 1.0 / q[k]));
        sub.push(Mat2::scalar(-1.0 / q[j]) - half_f);
        sup.push(Mat2::scalar(-1.0 / q[k]) + half_f);
        rhs.push(curve.vertices()[j] * mass);
    }
    let system = BlockCyclicTridiag::new(sub, diag, sup)?;
    let next = system.solve(&rhs)?;
    let residual = block_residual(&system, &next, &rhs);
    finish_step(next, residual)
}
