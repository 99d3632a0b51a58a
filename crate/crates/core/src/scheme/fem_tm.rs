//! Finite element scheme with DeTurck-type tangential motion.
//!
//! The time derivative is weighted by `M_j = alpha I + (1 - alpha) n_j n_j^T`,
//! which leaves the normal component untouched and scales tangential motion
//! by `1 / alpha`.
//!
//! The vertex normal `n_j` defaults to the bisector of the two adjacent edge
//! normals. The normal of the incoming edge alone is available through
//! [`VertexNormal::IncomingEdge`]; it is tilted by half an edge against the
//! vertex, and for `alpha < 1` the amplified tangential part leaks an `O(h)`
//! error into the normal velocity, so shapes only converge at first order.

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::forcing::ForceSpec;
use crate::geometry::{bisect_tangents, edge_lengths, edge_normals, GridCurve, Vec2};
use crate::linalg::{block_residual, BlockCyclicTridiag, Mat2};

use super::{check_tau, finish_step, StepReport};

/// Which unit normal the scheme attaches to vertex `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexNormal {
    /// `(n_j + n_{j+1}) / |n_j + n_{j+1}|`.
    #[default]
    Bisector,
    /// `n_j`, the normal of edge `x_j - x_{j-1}`.
    IncomingEdge,
}

impl VertexNormal {
    pub fn cli_name(self) -> &'static str {
        match self {
            VertexNormal::Bisector => "bisector",
            VertexNormal::IncomingEdge => "edge",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentialParams {
    alpha: f64,
    #[serde(default)]
    normal: VertexNormal,
}

impl TangentialParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(FlowError::InvalidConfig(format!(
                "alpha must lie in (0, 1], got {alpha}"
            )));
        }
        Ok(TangentialParams {
            alpha,
            normal: VertexNormal::default(),
        })
    }

    pub fn with_normal(self, normal: VertexNormal) -> Self {
        TangentialParams { normal, ..self }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn normal(&self) -> VertexNormal {
        self.normal
    }

    /// Unit normal at every vertex.
    pub fn vertex_normals(&self, curve: &GridCurve) -> Result<Vec<Vec2>> {
        let en = edge_normals(curve);
        match self.normal {
            VertexNormal::IncomingEdge => Ok(en),
            VertexNormal::Bisector => {
                let n = en.len();
                (0..n)
                    .map(|j| {
                        bisect_tangents(en[j], en[(j + 1) % n]).map_err(|magnitude| {
                            FlowError::Cusp {
                                vertex: j,
                                magnitude,
                            }
                        })
                    })
                    .collect()
            }
        }
    }

    /// `M = alpha I + (1 - alpha) n n^T`.
    pub fn metric(&self, normal: Vec2) -> Mat2 {
        Mat2::scalar(self.alpha) + Mat2::outer(normal, normal) * (1.0 - self.alpha)
    }

    /// `M^{-1} = (I - n n^T) / alpha + n n^T` for unit `n`.
    pub fn metric_inverse(&self, normal: Vec2) -> Mat2 {
        let nn = Mat2::outer(normal, normal);
        (Mat2::IDENTITY - nn) * (1.0 / self.alpha) + nn
    }
}

impl Default for TangentialParams {
    fn default() -> Self {
        TangentialParams {
            alpha: 1.0,
            normal: VertexNormal::default(),
        }
    }
}

/// `v_j = M_j^{-1} (2 (x_{j+1} - 2 x_j + x_{j-1}) / (q_j^2 + q_{j+1}^2) - f n_j)`
/// with `n_j` the vertex normal selected by `params`.
pub fn fem_tm_velocity(
    curve: &GridCurve,
    spec: &ForceSpec,
    params: TangentialParams,
) -> Result<Vec<Vec2>> {
    let n = curve.n_segments();
    let q = edge_lengths(curve);
    let nrm = params.vertex_normals(curve)?;
    let f = spec.force(q.iter().sum())?;
    let x = curve.vertices();
    Ok((0..n)
        .map(|j| {
            let k = (j + 1) % n;
            let lap =
                (x[k] - x[j] * 2.0 + x[(j + n - 1) % n]) * (2.0 / (q[j] * q[j] + q[k] * q[k]));
            params.metric_inverse(nrm[j]) * (lap - nrm[j] * f)
        })
        .collect())
}

pub fn fem_tm_step(
    curve: &GridCurve,
    tau: f64,
    spec: &ForceSpec,
    params: TangentialParams,
) -> Result<StepReport> {
    check_tau(tau)?;
    let n = curve.n_segments();
    let q = edge_lengths(curve);
    let nrm = params.vertex_normals(curve)?;
    let f = spec.force(q.iter().sum())?;

    let mut sub = Vec::with_capacity(n);
    let mut diag = Vec::with_capacity(n);
    let mut sup = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    for j in 0..n {
        let k = (j + 1) % n;
        let w = 2.0 / (q[j] * q[j] + q[k] * q[k]);
        let m = params.metric(nrm[j]);
        diag.push(m * (1.0 / tau) + Mat2::scalar(2.0 * w));
        sub.push(Mat2::scalar(-w));
        sup.push(Mat2::scalar(-w));
        rhs.push(m * curve.vertices()[j] * (1.0 / tau) - nrm[j] * f);
    }
    let system = BlockCyclicTridiag::new(sub, diag, sup)?;
    let next = system.solve(&rhs)?;
    let residual = block_residual(&system, &next, &rhs);
    finish_step(next, residual)
}
