//! Finite difference scheme with the averaged vertex normal.

use crate::error::Result;
use crate::forcing::ForceSpec;
use crate::geometry::{averaged_tangents_from, edge_lengths, edge_tangents, perp, GridCurve, Vec2};
use crate::linalg::{scalar_residual, CyclicTridiag};

use super::{check_tau, finish_step, StepReport};

/// `v_j = 2 / (q_j + q_{j+1}) (tau_{j+1} - tau_j) - f(l_h) perp(tau_{j+1/2})`.
pub fn fdm_velocity(curve: &GridCurve, spec: &ForceSpec) -> Result<Vec<Vec2>> {
    let n = curve.n_segments();
    let q = edge_lengths(curve);
    let t = edge_tangents(curve);
    let bis = averaged_tangents_from(&t)?;
    let f = spec.force(q.iter().sum())?;
    Ok((0..n)
        .map(|j| {
            let k = (j + 1) % n;
            (t[k] - t[j]) * (2.0 / (q[j] + q[k])) - perp(bis[j]) * f
        })
        .collect())
}

/// One backward-Euler step. The curvature term is implicit with coefficients
/// frozen at the old level; the forcing along the averaged normal is explicit.
/// Both coordinates share the same scalar periodic matrix.
pub fn fdm_step(curve: &GridCurve, tau: f64, spec: &ForceSpec) -> Result<StepReport> {
    check_tau(tau)?;
    let n = curve.n_segments();
    let q = edge_lengths(curve);
    let t = edge_tangents(curve);
    let bis = averaged_tangents_from(&t)?;
    let f = spec.force(q.iter().sum())?;

    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut rhs_x = vec![0.0; n];
    let mut rhs_y = vec![0.0; n];
    for j in 0..n {
        let k = (j + 1) % n;
        let a = 2.0 / (q[j] + q[k]);
        sub[j] = -a / q[j];
        sup[j] = -a / q[k];
        diag[j] = 1.0 / tau + a * (1.0 / q[j] + 1.0 / q[k]);
        let x = curve.vertices()[j];
        let r = x / tau - perp(bis[j]) * f;
        rhs_x[j] = r.x;
        rhs_y[j] = r.y;
    }
    let system = CyclicTridiag::new(sub, diag, sup)?;
    let xs = system.solve(&rhs_x)?;
    let ys = system.solve(&rhs_y)?;
    let residual = scalar_residual(&system, &xs, &rhs_x).max(scalar_residual(&system, &ys, &rhs_y));
    let vertices = xs
        .into_iter()
        .zip(ys)
        .map(|(x, y)| Vec2::new(x, y))
        .collect();
    finish_step(vertices, residual)
}
