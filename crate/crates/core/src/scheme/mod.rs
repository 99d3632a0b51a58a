//! Fully discrete backward-Euler schemes and their semi-discrete velocities.
//!
//! Every step freezes the geometric coefficients (edge lengths, normals and
//! the perimeter in `f(L)`) at the previous time level and solves one linear
//! periodic system for the new vertices.

mod fdm;
mod fem;
mod fem_tm;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::forcing::ForceSpec;
use crate::geometry::{GridCurve, Vec2};

pub use fdm::{fdm_step, fdm_velocity};
pub use fem::{fem_step, fem_velocity};
pub use fem_tm::{fem_tm_step, fem_tm_velocity, TangentialParams, VertexNormal};

/// A step destroyed the mesh when an edge falls to this fraction of the
/// perimeter.
pub const DEGENERATE_EDGE_FRACTION: f64 = 1e-12;

/// Outcome of one fully discrete step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub curve_next: GridCurve,
    pub min_edge: f64,
    /// `max |A x - b|` of the solved linear system.
    pub solver_residual: f64,
}

pub type FdmStepReport = StepReport;
pub type FemStepReport = StepReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    Fdm,
    Fem,
    FemTm,
}

impl SchemeKind {
    pub fn cli_name(self) -> &'static str {
        match self {
            SchemeKind::Fdm => "fdm",
            SchemeKind::Fem => "fem",
            SchemeKind::FemTm => "fem-tm",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for SchemeKind {
    type Err = FlowError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fdm" => Ok(SchemeKind::Fdm),
            "fem" => Ok(SchemeKind::Fem),
            "fem-tm" => Ok(SchemeKind::FemTm),
            other => Err(FlowError::InvalidConfig(format!(
                "unknown scheme '{other}'"
            ))),
        }
    }
}

/// A scheme together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    Fdm,
    Fem,
    FemTm(TangentialParams),
}

impl Scheme {
    pub fn new(kind: SchemeKind, alpha: Option<f64>) -> Result<Self> {
        Self::with_options(kind, alpha, None)
    }

    /// `alpha` and `normal` are only accepted for FEM-TM.
    pub fn with_options(
        kind: SchemeKind,
        alpha: Option<f64>,
        normal: Option<VertexNormal>,
    ) -> Result<Self> {
        match (kind, alpha, normal) {
            (SchemeKind::FemTm, a, nrm) => Ok(Scheme::FemTm(
                TangentialParams::new(a.unwrap_or(1.0))?.with_normal(nrm.unwrap_or_default()),
            )),
            (_, Some(_), _) => Err(FlowError::InvalidConfig(
                "alpha only applies to the fem-tm scheme".into(),
            )),
            (_, _, Some(_)) => Err(FlowError::InvalidConfig(
                "the vertex normal choice only applies to the fem-tm scheme".into(),
            )),
            (SchemeKind::Fdm, None, None) => Ok(Scheme::Fdm),
            (SchemeKind::Fem, None, None) => Ok(Scheme::Fem),
        }
    }

    pub fn kind(&self) -> SchemeKind {
        match self {
            Scheme::Fdm => SchemeKind::Fdm,
            Scheme::Fem => SchemeKind::Fem,
            Scheme::FemTm(_) => SchemeKind::FemTm,
        }
    }

    pub fn step(&self, curve: &GridCurve, tau: f64, spec: &ForceSpec) -> Result<StepReport> {
        match self {
            Scheme::Fdm => fdm_step(curve, tau, spec),
            Scheme::Fem => fem_step(curve, tau, spec),
            Scheme::FemTm(p) => fem_tm_step(curve, tau, spec, *p),
        }
    }

    /// Right-hand side of the semi-discrete system the step discretizes.
    pub fn velocity(&self, curve: &GridCurve, spec: &ForceSpec) -> Result<Vec<Vec2>> {
        match self {
            Scheme::Fdm => fdm_velocity(curve, spec),
            Scheme::Fem => fem_velocity(curve, spec),
            Scheme::FemTm(p) => fem_tm_velocity(curve, spec, *p),
        }
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(FlowError::InvalidConfig(format!(
            "time step must be positive and finite, got {tau}"
        )));
    }
    Ok(())
}

/// Validates the new vertices and packages the step report.
fn finish_step(vertices: Vec<Vec2>, solver_residual: f64) -> Result<StepReport> {
    let n = vertices.len();
    if let Some(j) = vertices.iter().position(|v| !v.is_finite()) {
        return Err(FlowError::MeshDegenerate {
            edge: j,
            length: f64::NAN,
            perimeter: f64::NAN,
        });
    }
    let lengths: Vec<f64> = (0..n)
        .map(|j| (vertices[j] - vertices[(j + n - 1) % n]).norm())
        .collect();
    let perimeter: f64 = lengths.iter().sum();
    let (edge, min_edge) =
        lengths
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |acc, (j, q)| if q < acc.1 { (j, q) } else { acc },
            );
    if min_edge <= DEGENERATE_EDGE_FRACTION * perimeter {
        return Err(FlowError::MeshDegenerate {
            edge,
            length: min_edge,
            perimeter,
        });
    }
    Ok(StepReport {
        curve_next: GridCurve::new(vertices)?,
        min_edge,
        solver_residual,
    })
}
