//! The perimeter-dependent forcing `f(L)` for each supported flow.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};

/// Which nonlocal flow drives the curve. Every variant has the form `c / L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum ForceSpec {
    /// Area-preserving curve shortening of a simple curve, `f = 2 pi / L`.
    AreaPreservingSimple,
    /// Area-preserving curve shortening of an immersed curve with rotation
    /// index `ind`, `f = 2 pi ind / L`.
    AreaPreservingNonsimple { ind: i32 },
    /// Enclosed area changes at the rate `-beta`, `f = (2 pi - beta) / L`.
    PrescribedRate { beta: f64 },
}

impl ForceSpec {
    pub fn nonsimple(ind: i32) -> Result<Self> {
        if ind == 0 {
            return Err(FlowError::InvalidConfig(
                "rotation index must be nonzero".into(),
            ));
        }
        Ok(ForceSpec::AreaPreservingNonsimple { ind })
    }

    pub fn prescribed_rate(beta: f64) -> Result<Self> {
        if !beta.is_finite() {
            return Err(FlowError::InvalidConfig(format!(
                "beta must be finite, got {beta}"
            )));
        }
        Ok(ForceSpec::PrescribedRate { beta })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ForceSpec::AreaPreservingNonsimple { ind } => Self::nonsimple(ind).map(|_| ()),
            ForceSpec::PrescribedRate { beta } => Self::prescribed_rate(beta).map(|_| ()),
            ForceSpec::AreaPreservingSimple => Ok(()),
        }
    }

    /// The constant `c` in `f(L) = c / L`.
    pub fn numerator(&self) -> f64 {
        match *self {
            ForceSpec::AreaPreservingSimple => TAU,
            ForceSpec::AreaPreservingNonsimple { ind } => TAU * f64::from(ind),
            ForceSpec::PrescribedRate { beta } => TAU - beta,
        }
    }

    /// Evaluates `f(L)`.
    pub fn force(&self, perimeter: f64) -> Result<f64> {
        force(self, perimeter)
    }
}

pub fn force(spec: &ForceSpec, perimeter: f64) -> Result<f64> {
    if !(perimeter > 0.0) {
        return Err(FlowError::NonpositivePerimeter(perimeter));
    }
    Ok(spec.numerator() / perimeter)
}
