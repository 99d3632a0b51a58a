//! Evolution runs and self-refinement convergence studies.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curves::{sample_curve, CurveKind};
use crate::distance::manifold_distance;
use crate::error::{FlowError, Result};
use crate::forcing::ForceSpec;
use crate::geometry::{mesh_ratio, perimeter, signed_area, GridCurve};
use crate::norms::{
    grid_h1, grid_l2, grid_linf, pl_derivative_l2_diff, pl_l2_diff, restrict_fine, GridFunction,
};
use crate::scheme::{Scheme, SchemeKind, VertexNormal};

/// Relative slack allowed when checking that `T / tau` is a whole number.
const STEP_COUNT_TOL: f64 = 1e-9;

/// Number of whole time steps in `t_final / tau`.
pub fn step_count(t_final: f64, tau: f64) -> Result<usize> {
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(FlowError::InvalidConfig(format!(
            "final time must be positive, got {t_final}"
        )));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(FlowError::InvalidConfig(format!(
            "time step must be positive, got {tau}"
        )));
    }
    let ratio = t_final / tau;
    let m = ratio.round();
    if m < 1.0 || (ratio - m).abs() > STEP_COUNT_TOL * m {
        return Err(FlowError::InvalidConfig(format!(
            "final time {t_final} is not a whole number of steps of {tau}"
        )));
    }
    Ok(m as usize)
}

/// Everything needed to reproduce one evolution run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub scheme: SchemeKind,
    pub kind: CurveKind,
    pub force: ForceSpec,
    pub n: usize,
    pub tau: f64,
    pub t_final: f64,
    /// Tangential-motion weight, FEM-TM only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Vertex normal of the tangential-motion scheme, FEM-TM only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tm_normal: Option<VertexNormal>,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
}

impl SchemeConfig {
    /// Checks the configuration and returns the scheme and the step count.
    pub fn validate(&self) -> Result<(Scheme, usize)> {
        let scheme = Scheme::with_options(self.scheme, self.alpha, self.tm_normal)?;
        self.force.validate()?;
        if self.n < 3 {
            return Err(FlowError::InvalidN {
                n: self.n,
                reason: "a closed curve needs at least 3 vertices",
            });
        }
        let m = step_count(self.t_final, self.tau)?;
        for &t in &self.snapshot_times {
            if !(t >= 0.0 && t <= self.t_final * (1.0 + STEP_COUNT_TOL)) {
                return Err(FlowError::InvalidConfig(format!(
                    "snapshot time {t} outside [0, {}]",
                    self.t_final
                )));
            }
        }
        Ok((scheme, m))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub level: usize,
    pub time: f64,
    pub curve: GridCurve,
}

/// Geometric quantities at every time level `t_k = k tau`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvolutionRecord {
    pub times: Vec<f64>,
    pub perimeter: Vec<f64>,
    pub area: Vec<f64>,
    /// `(A^k - A^0) / A^0`.
    pub area_loss: Vec<f64>,
    pub mesh_ratio: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
}

impl EvolutionRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn push(&mut self, time: f64, curve: &GridCurve) {
        let a = signed_area(curve);
        let a0 = self.area.first().copied().unwrap_or(a);
        self.times.push(time);
        self.perimeter.push(perimeter(curve));
        self.area.push(a);
        self.area_loss.push((a - a0) / a0);
        self.mesh_ratio.push(mesh_ratio(curve));
    }
}

/// A run that stopped early, with everything recorded before the failure.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{error}")]
pub struct EvolutionAbort {
    pub error: FlowError,
    pub partial: Box<EvolutionRecord>,
}

impl From<FlowError> for EvolutionAbort {
    fn from(error: FlowError) -> Self {
        EvolutionAbort {
            error,
            partial: Box::default(),
        }
    }
}

/// Advances `curve` by `steps` steps, calling `observe(level, curve)` for the
/// initial curve and after every step.
pub fn simulate<F>(
    scheme: &Scheme,
    initial: GridCurve,
    tau: f64,
    steps: usize,
    spec: &ForceSpec,
    mut observe: F,
) -> Result<GridCurve>
where
    F: FnMut(usize, &GridCurve),
{
    let mut curve = initial;
    observe(0, &curve);
    for level in 1..=steps {
        curve = scheme
            .step(&curve, tau, spec)
            .map_err(|e| e.at_level(level))?
            .curve_next;
        observe(level, &curve);
    }
    Ok(curve)
}

pub fn run_evolution(
    config: &SchemeConfig,
) -> std::result::Result<EvolutionRecord, EvolutionAbort> {
    let (scheme, m) = config.validate()?;
    let initial = sample_curve(config.kind, config.n)?;
    let snapshot_levels: Vec<usize> = config
        .snapshot_times
        .iter()
        .map(|t| ((t / config.tau).round() as usize).min(m))
        .collect();

    let mut record = EvolutionRecord::default();
    let result = simulate(
        &scheme,
        initial,
        config.tau,
        m,
        &config.force,
        |level, curve| {
            let time = level as f64 * config.tau;
            record.push(time, curve);
            if snapshot_levels.contains(&level) {
                record.snapshots.push(Snapshot {
                    level,
                    time,
                    curve: curve.clone(),
                });
            }
        },
    );
    match result {
        Ok(_) => Ok(record),
        Err(error) => Err(EvolutionAbort {
            error,
            partial: Box::new(record),
        }),
    }
}

/// `log(e_i / e_{i+1}) / log(ratio)` for consecutive pairs.
pub fn eoc(errors: &[f64], ratio: f64) -> Result<Vec<f64>> {
    if !(ratio > 1.0) {
        return Err(FlowError::InvalidConfig(format!(
            "refinement ratio must exceed 1, got {ratio}"
        )));
    }
    if let Some(&e) = errors.iter().find(|e| !(**e > 0.0)) {
        return Err(FlowError::NonpositiveError(e));
    }
    Ok(errors
        .windows(2)
        .map(|w| (w[0] / w[1]).ln() / ratio.ln())
        .collect())
}

/// Error quantities of a convergence study, in output column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ErrorMetric {
    /// `max_k ||x^k_h - x^{4k}_{h/2}||_{H^1_G}` on the coarse grid.
    E1,
    /// Manifold distance at the final time.
    E2,
    /// `max_k (||x^k_h - x^{4k}_{h/2}||_{L^2} + ||d_xi(...)||_{L^2})` of the
    /// piecewise-linear interpolants.
    E3,
    /// Manifold distance at the final time.
    E4,
    /// As `E1` with the `L^2_G` norm.
    EL2G,
    /// As `E1` with the `L^inf_G` norm.
    ELinfG,
}

impl ErrorMetric {
    pub const ALL: [ErrorMetric; 6] = [
        ErrorMetric::E1,
        ErrorMetric::E2,
        ErrorMetric::E3,
        ErrorMetric::E4,
        ErrorMetric::EL2G,
        ErrorMetric::ELinfG,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ErrorMetric::E1 => "E1",
            ErrorMetric::E2 => "E2",
            ErrorMetric::E3 => "E3",
            ErrorMetric::E4 => "E4",
            ErrorMetric::EL2G => "EL2G",
            ErrorMetric::ELinfG => "ELinfG",
        }
    }

    pub fn for_scheme(kind: SchemeKind) -> &'static [ErrorMetric] {
        match kind {
            SchemeKind::Fdm => &[
                ErrorMetric::E1,
                ErrorMetric::E2,
                ErrorMetric::EL2G,
                ErrorMetric::ELinfG,
            ],
            SchemeKind::Fem | SchemeKind::FemTm => &[ErrorMetric::E3, ErrorMetric::E4],
        }
    }
}

impl fmt::Display for ErrorMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How the coarsest time step is chosen; finer rows divide it by 4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TauRule {
    /// Largest `tau = T / m` with `tau <= factor * h^2`.
    Parabolic { factor: f64 },
    /// Use this step on the coarsest grid; `T / tau` must be whole.
    Fixed { tau: f64 },
}

impl Default for TauRule {
    fn default() -> Self {
        TauRule::Parabolic { factor: 0.5 }
    }
}

impl TauRule {
    /// Number of steps on the coarsest grid.
    fn coarse_steps(&self, n_min: usize, t_final: f64) -> Result<usize> {
        match *self {
            TauRule::Parabolic { factor } => {
                if !(factor > 0.0 && factor.is_finite()) {
                    return Err(FlowError::InvalidConfig(format!(
                        "tau factor must be positive, got {factor}"
                    )));
                }
                let h = TAU / n_min as f64;
                Ok(((t_final / (factor * h * h)) * (1.0 - 1e-12))
                    .ceil()
                    .max(1.0) as usize)
            }
            TauRule::Fixed { tau } => step_count(t_final, tau),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceConfig {
    pub scheme: SchemeKind,
    pub kind: CurveKind,
    pub force: ForceSpec,
    pub n_min: usize,
    /// Number of table rows; `levels + 1` grids are simulated.
    pub levels: usize,
    pub t_final: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tm_normal: Option<VertexNormal>,
    #[serde(default)]
    pub tau_rule: TauRule,
}

impl ConvergenceConfig {
    pub fn n_list(&self) -> Vec<usize> {
        (0..self.levels).map(|i| self.n_min << i).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    pub tau: f64,
    pub errors: BTreeMap<ErrorMetric, f64>,
    /// Order against the previous row; empty for the first row and around
    /// failed rows.
    pub eoc: BTreeMap<ErrorMetric, f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub metrics: Vec<ErrorMetric>,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Order from the last pair of rows that both succeeded.
    pub fn last_eoc(&self, metric: ErrorMetric) -> Option<f64> {
        self.rows
            .iter()
            .rev()
            .find_map(|r| r.eoc.get(&metric).copied())
    }

    pub fn errors(&self, metric: ErrorMetric) -> Vec<Option<f64>> {
        self.rows
            .iter()
            .map(|r| r.errors.get(&metric).copied())
            .collect()
    }
}

fn trajectory(
    scheme: &Scheme,
    kind: CurveKind,
    n: usize,
    tau: f64,
    steps: usize,
    spec: &ForceSpec,
) -> Result<Vec<GridCurve>> {
    let mut levels = Vec::with_capacity(steps + 1);
    simulate(scheme, sample_curve(kind, n)?, tau, steps, spec, |_, c| {
        levels.push(c.clone())
    })?;
    Ok(levels)
}

fn row_errors(
    metrics: &[ErrorMetric],
    coarse: &[GridCurve],
    fine: &[GridCurve],
) -> Result<BTreeMap<ErrorMetric, f64>> {
    let m = coarse.len() - 1;
    let mut out = BTreeMap::new();
    let mut max_h1 = 0.0f64;
    let mut max_l2 = 0.0f64;
    let mut max_inf = 0.0f64;
    let mut max_pl = 0.0f64;
    let wants = |e| metrics.contains(&e);
    let grid = wants(ErrorMetric::E1) || wants(ErrorMetric::EL2G) || wants(ErrorMetric::ELinfG);
    for k in 1..=m {
        let c = &coarse[k];
        let f = &fine[4 * k];
        if grid {
            let diff = GridFunction::from_curve(c).sub(&restrict_fine(f)?)?;
            max_h1 = max_h1.max(grid_h1(&diff));
            max_l2 = max_l2.max(grid_l2(&diff));
            max_inf = max_inf.max(grid_linf(&diff));
        }
        if wants(ErrorMetric::E3) {
            max_pl = max_pl.max(pl_l2_diff(c, f)? + pl_derivative_l2_diff(c, f)?);
        }
    }
    for &metric in metrics {
        let value = match metric {
            ErrorMetric::E1 => max_h1,
            ErrorMetric::EL2G => max_l2,
            ErrorMetric::ELinfG => max_inf,
            ErrorMetric::E3 => max_pl,
            ErrorMetric::E2 | ErrorMetric::E4 => manifold_distance(&coarse[m], &fine[4 * m])?,
        };
        out.insert(metric, value);
    }
    Ok(out)
}

/// Self-refinement study: grid `N` with step `tau` is compared against grid
/// `2N` with step `tau / 4` at matching times.
pub fn run_convergence(config: &ConvergenceConfig) -> Result<ConvergenceTable> {
    let scheme = Scheme::with_options(config.scheme, config.alpha, config.tm_normal)?;
    config.force.validate()?;
    if config.levels < 1 {
        return Err(FlowError::InvalidConfig(
            "at least one level is required".into(),
        ));
    }
    if config.n_min < 3 {
        return Err(FlowError::InvalidN {
            n: config.n_min,
            reason: "a closed curve needs at least 3 vertices",
        });
    }
    // validate the coarsest curve up front so size errors are not row failures
    sample_curve(config.kind, config.n_min)?;
    let m0 = config.tau_rule.coarse_steps(config.n_min, config.t_final)?;
    let metrics = ErrorMetric::for_scheme(config.scheme).to_vec();

    // grid i has N_i = n_min 2^i and m_i = m0 4^i steps
    let grids: Vec<(usize, usize)> = (0..=config.levels)
        .map(|i| (config.n_min << i, m0 << (2 * i)))
        .collect();
    let runs: Vec<Result<Vec<GridCurve>>> = grids
        .par_iter()
        .map(|&(n, m)| {
            trajectory(
                &scheme,
                config.kind,
                n,
                config.t_final / m as f64,
                m,
                &config.force,
            )
        })
        .collect();

    let mut rows: Vec<ConvergenceRow> = (0..config.levels)
        .map(|i| {
            let (n, m) = grids[i];
            let outcome = match (&runs[i], &runs[i + 1]) {
                (Ok(c), Ok(f)) => row_errors(&metrics, c, f),
                (Err(e), _) => Err(e.clone()),
                (_, Err(e)) => Err(e.clone()),
            };
            let (errors, failure) = match outcome {
                Ok(errors) => (errors, None),
                Err(e) => {
                    log::warn!("convergence row N = {n} failed: {e}");
                    (BTreeMap::new(), Some(e.to_string()))
                }
            };
            ConvergenceRow {
                n,
                h: TAU / n as f64,
                tau: config.t_final / m as f64,
                errors,
                eoc: BTreeMap::new(),
                failure,
            }
        })
        .collect();

    for i in 1..rows.len() {
        if rows[i].failure.is_some() || rows[i - 1].failure.is_some() {
            continue;
        }
        for &metric in &metrics {
            let (a, b) = (rows[i - 1].errors[&metric], rows[i].errors[&metric]);
            if let Ok(order) = eoc(&[a, b], 2.0) {
                rows[i].eoc.insert(metric, order[0]);
            }
        }
    }
    Ok(ConvergenceTable { metrics, rows })
}
