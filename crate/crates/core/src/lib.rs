//! Solvers for nonlocal geometric flows of closed plane curves,
//! `V = (kappa - f(L)) N`, where the forcing depends on the perimeter `L`.
//!
//! Three fully discrete schemes are provided: a finite difference scheme, a
//! mass-lumped finite element scheme and a finite element scheme with
//! tangential mesh redistribution. The [`harness`] module runs evolutions and
//! self-refinement convergence studies; [`io`] and [`cli`] serialize them.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod curves;
pub mod distance;
pub mod error;
pub mod forcing;
pub mod geometry;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod norms;
pub mod scheme;

pub use curves::{sample_curve, CurveKind};
pub use distance::manifold_distance;
pub use error::{FlowError, Result};
pub use forcing::ForceSpec;
pub use geometry::{GridCurve, Vec2};
pub use harness::{
    run_convergence, run_evolution, ConvergenceTable, EvolutionRecord, SchemeConfig,
};
pub use scheme::{Scheme, SchemeKind, StepReport, TangentialParams, VertexNormal};
