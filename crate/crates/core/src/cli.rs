//! Command-line front end: `evolve` and `converge`.

use std::ffi::OsString;
use std::fs::File;
use std::path::PathBuf;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use crate::curves::CurveKind;
use crate::forcing::ForceSpec;
use crate::harness::{run_convergence, run_evolution, ConvergenceConfig, SchemeConfig, TauRule};
use crate::io::{self, RunConfig, RunManifest};
use crate::scheme::{SchemeKind, VertexNormal};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "curveflow",
    version,
    about = "Nonlocal curve-shortening flows of closed plane curves"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve one initial curve and record geometric quantities.
    Evolve(EvolveArgs),
    /// Self-refinement convergence study.
    Converge(ConvergeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Fdm,
    Fem,
    FemTm,
}

impl From<SchemeArg> for SchemeKind {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Fdm => SchemeKind::Fdm,
            SchemeArg::Fem => SchemeKind::Fem,
            SchemeArg::FemTm => SchemeKind::FemTm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    Ellipse,
    Rose,
    Flower,
    Rect,
}

impl From<CaseArg> for CurveKind {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::Ellipse => CurveKind::Ellipse,
            CaseArg::Rose => CurveKind::FourLeafRose,
            CaseArg::Flower => CurveKind::Flower,
            CaseArg::Rect => CurveKind::Rectangle4x1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormalArg {
    /// Bisector of the two adjacent edge normals.
    Bisector,
    /// Normal of the incoming edge.
    Edge,
}

impl From<NormalArg> for VertexNormal {
    fn from(n: NormalArg) -> Self {
        match n {
            NormalArg::Bisector => VertexNormal::Bisector,
            NormalArg::Edge => VertexNormal::IncomingEdge,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FlowArg {
    /// Area-preserving flow of a simple curve.
    Ap,
    /// Area-preserving flow of an immersed curve; needs --ind.
    ApInd,
    /// Area changes at rate -beta; needs --beta.
    Rate,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long, value_enum)]
    pub scheme: SchemeArg,
    #[arg(long = "case", value_enum)]
    pub case: CaseArg,
    #[arg(long, value_enum, default_value = "ap")]
    pub flow: FlowArg,
    /// Rotation index for --flow ap-ind.
    #[arg(long, allow_negative_numbers = true)]
    pub ind: Option<i32>,
    /// Area decay rate for --flow rate.
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Tangential weight in (0, 1], fem-tm only.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Vertex normal of the tangential-motion scheme, fem-tm only.
    #[arg(long, value_enum)]
    pub tm_normal: Option<NormalArg>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Reserved; every computation is deterministic.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Number of vertices.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0 / 160.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 2.0)]
    pub tfinal: f64,
    /// Comma-separated snapshot times; defaults to the initial and final time.
    #[arg(long, value_delimiter = ',')]
    pub snapshots: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 16)]
    pub nmin: usize,
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
    #[arg(long, default_value_t = 0.25)]
    pub tfinal: f64,
    /// Coarsest time step is the largest T/m not exceeding this factor times h^2.
    #[arg(long, default_value_t = 0.5)]
    pub tau_factor: f64,
}

fn usage_error(kind: ErrorKind, message: impl std::fmt::Display) -> clap::Error {
    Cli::command().error(kind, message)
}

impl CommonArgs {
    /// Flag combinations clap cannot express.
    fn force_spec(&self) -> Result<ForceSpec, clap::Error> {
        let conflict = |m: &str| usage_error(ErrorKind::ArgumentConflict, m);
        if self.alpha.is_some() && self.scheme != SchemeArg::FemTm {
            return Err(conflict("--alpha is only valid with --scheme fem-tm"));
        }
        if self.tm_normal.is_some() && self.scheme != SchemeArg::FemTm {
            return Err(conflict("--tm-normal is only valid with --scheme fem-tm"));
        }
        if self.beta.is_some() && self.flow != FlowArg::Rate {
            return Err(conflict("--beta is only valid with --flow rate"));
        }
        if self.ind.is_some() && self.flow != FlowArg::ApInd {
            return Err(conflict("--ind is only valid with --flow ap-ind"));
        }
        let spec = match self.flow {
            FlowArg::Ap => ForceSpec::AreaPreservingSimple,
            FlowArg::ApInd => {
                let ind = self.ind.ok_or_else(|| {
                    usage_error(
                        ErrorKind::MissingRequiredArgument,
                        "--flow ap-ind requires --ind",
                    )
                })?;
                ForceSpec::nonsimple(ind).map_err(|e| usage_error(ErrorKind::ValueValidation, e))?
            }
            FlowArg::Rate => {
                let beta = self.beta.ok_or_else(|| {
                    usage_error(
                        ErrorKind::MissingRequiredArgument,
                        "--flow rate requires --beta",
                    )
                })?;
                ForceSpec::prescribed_rate(beta)
                    .map_err(|e| usage_error(ErrorKind::ValueValidation, e))?
            }
        };
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a <= 1.0) {
                return Err(usage_error(
                    ErrorKind::ValueValidation,
                    format!("--alpha must lie in (0, 1], got {a}"),
                ));
            }
        }
        Ok(spec)
    }
}

impl EvolveArgs {
    pub fn to_config(&self) -> Result<SchemeConfig, clap::Error> {
        let force = self.common.force_spec()?;
        let config = SchemeConfig {
            scheme: self.common.scheme.into(),
            kind: self.common.case.into(),
            force,
            n: self.n,
            tau: self.tau,
            t_final: self.tfinal,
            alpha: self.common.alpha,
            tm_normal: self.common.tm_normal.map(Into::into),
            snapshot_times: self
                .snapshots
                .clone()
                .unwrap_or_else(|| vec![0.0, self.tfinal]),
        };
        config
            .validate()
            .map_err(|e| usage_error(ErrorKind::ValueValidation, e))?;
        crate::curves::sample_curve(config.kind, config.n)
            .map_err(|e| usage_error(ErrorKind::ValueValidation, e))?;
        Ok(config)
    }
}

impl ConvergeArgs {
    pub fn to_config(&self) -> Result<ConvergenceConfig, clap::Error> {
        let force = self.common.force_spec()?;
        if self.levels < 2 {
            return Err(usage_error(
                ErrorKind::ValueValidation,
                "--levels must be at least 2 to report an order",
            ));
        }
        if !(self.tfinal > 0.0) || !(self.tau_factor > 0.0) {
            return Err(usage_error(
                ErrorKind::ValueValidation,
                "--tfinal and --tau-factor must be positive",
            ));
        }
        let config = ConvergenceConfig {
            scheme: self.common.scheme.into(),
            kind: self.common.case.into(),
            force,
            n_min: self.nmin,
            levels: self.levels,
            t_final: self.tfinal,
            alpha: self.common.alpha,
            tm_normal: self.common.tm_normal.map(Into::into),
            tau_rule: TauRule::Parabolic {
                factor: self.tau_factor,
            },
        };
        crate::curves::sample_curve(config.kind, config.n_min)
            .map_err(|e| usage_error(ErrorKind::ValueValidation, e))?;
        Ok(config)
    }
}

fn failure(message: impl std::fmt::Display) -> i32 {
    eprintln!("error: {message}");
    EXIT_FAILURE
}

fn evolve(args: &EvolveArgs) -> Result<i32, clap::Error> {
    let config = args.to_config()?;
    let start = Instant::now();
    let (record, code) = match run_evolution(&config) {
        Ok(r) => (r, EXIT_OK),
        Err(abort) => {
            let code = failure(&abort.error);
            (*abort.partial, code)
        }
    };
    let dir = &args.common.out;
    let mut outputs = match io::write_evolution(dir, &record) {
        Ok(o) => o,
        Err(e) => return Ok(failure(e)),
    };
    let manifest_path = dir.join(io::MANIFEST_FILE);
    outputs.push(manifest_path.clone());
    let manifest = RunManifest::new(
        RunConfig::Evolve(config),
        outputs,
        start.elapsed().as_secs_f64(),
    );
    if let Err(e) = manifest.write(&manifest_path) {
        return Ok(failure(e));
    }
    Ok(code)
}

fn converge(args: &ConvergeArgs) -> Result<i32, clap::Error> {
    let config = args.to_config()?;
    let start = Instant::now();
    let table = match run_convergence(&config) {
        Ok(t) => t,
        Err(e) => return Ok(failure(e)),
    };
    let dir = &args.common.out;
    let csv_path = dir.join(io::CONVERGENCE_FILE);
    let manifest_path = dir.join(io::MANIFEST_FILE);
    let written = std::fs::create_dir_all(dir)
        .map_err(io::IoError::from)
        .and_then(|_| File::create(&csv_path).map_err(io::IoError::from))
        .and_then(|f| io::write_convergence(f, &table))
        .and_then(|_| {
            RunManifest::new(
                RunConfig::Converge(config),
                vec![csv_path.clone(), manifest_path.clone()],
                start.elapsed().as_secs_f64(),
            )
            .write(&manifest_path)
        });
    if let Err(e) = written {
        return Ok(failure(e));
    }
    let failed: Vec<&str> = table
        .rows
        .iter()
        .filter_map(|r| r.failure.as_deref())
        .collect();
    if failed.is_empty() {
        Ok(EXIT_OK)
    } else {
        Ok(failure(format!(
            "{} row(s) failed: {}",
            failed.len(),
            failed.join("; ")
        )))
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let outcome = Cli::try_parse_from(args).and_then(|cli| match &cli.command {
        Command::Evolve(a) => evolve(a),
        Command::Converge(a) => converge(a),
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_OK
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("curveflow").chain(args.iter().copied()))
    }

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn evolve_requires_n() {
        let e = parse(&["evolve", "--scheme", "fdm", "--case", "flower"]).unwrap_err();
        assert_eq!(e.kind(), ErrorKind::MissingRequiredArgument);
    }

    #[test]
    fn flag_combinations() {
        let cli = parse(&[
            "converge", "--scheme", "fdm", "--case", "ellipse", "--flow", "ap", "--beta", "1",
        ])
        .unwrap();
        let Command::Converge(a) = cli.command else {
            panic!()
        };
        assert!(a.to_config().is_err());

        let cli = parse(&[
            "converge", "--scheme", "fdm", "--case", "rect", "--flow", "rate", "--beta", "2.5",
            "--nmin", "20",
        ])
        .unwrap();
        let Command::Converge(a) = cli.command else {
            panic!()
        };
        assert_eq!(
            a.to_config().unwrap().force,
            ForceSpec::PrescribedRate { beta: 2.5 }
        );

        let cli = parse(&[
            "evolve", "--scheme", "fdm", "--case", "rose", "--flow", "ap-ind", "--ind", "3", "--n",
            "80",
        ])
        .unwrap();
        let Command::Evolve(a) = cli.command else {
            panic!()
        };
        let c = a.to_config().unwrap();
        assert_eq!(c.force, ForceSpec::AreaPreservingNonsimple { ind: 3 });
        assert_eq!(c.snapshot_times, vec![0.0, 2.0]);

        let cli = parse(&[
            "evolve", "--scheme", "fdm", "--case", "flower", "--alpha", "0.5", "--n", "80",
        ])
        .unwrap();
        let Command::Evolve(a) = cli.command else {
            panic!()
        };
        assert_eq!(
            a.to_config().unwrap_err().kind(),
            ErrorKind::ArgumentConflict
        );
    }

    #[test]
    fn snapshot_list_parses() {
        let cli = parse(&[
            "evolve",
            "--scheme",
            "fem",
            "--case",
            "flower",
            "--n",
            "40",
            "--snapshots",
            "0,0.5,1",
        ])
        .unwrap();
        let Command::Evolve(a) = cli.command else {
            panic!()
        };
        assert_eq!(a.snapshots, Some(vec![0.0, 0.5, 1.0]));
    }
}
