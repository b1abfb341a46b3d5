use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use autgrp::basis::basis_from_matrices;
use autgrp::eigen::{cosquare_with_tol, jordan_structure};
use autgrp::group::{
    classify_2x2_with, profile_4x4_with, project_cloud, sample_group, write_ply, write_points_csv,
    write_samples_csv, ProjectMode, SampleConfig,
};
use autgrp::linalg::singular_values;
use autgrp::pencil::kronecker_structure;
use autgrp::{
    basis_with, dim_report, oracle_basis, span_equal, Error, Field, Involution, Mat, SolveOptions,
    Space, Tolerances,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

/// Bases of `X*J ± JX = 0` and samples of `{G : G*JG = J}`.
#[derive(Parser, Debug)]
#[command(name = "autgrp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Basis of sol or cosol.
    Basis {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = SpaceArg::Sol)]
        space: SpaceArg,
    },
    /// Dimension from the Kronecker structure, checked against the nullity oracle.
    Dim {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = SpaceArg::Sol)]
        space: SpaceArg,
    },
    /// Kronecker structure of J − λJ* and, for nonsingular J, the cosquare's Jordan structure.
    Structure {
        #[command(flatten)]
        common: Common,
    },
    /// Congruence type of a real 2×2 J or generic profile of a real 4×4 J.
    Classify {
        #[command(flatten)]
        common: Common,
    },
    /// Random elements of the identity component of the group.
    Sample {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Random 3-D projection of group samples or of a surface grid.
    Project {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sampling: Sampling,
        /// Emit an ordered GRID × GRID surface instead of random samples.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Re-checks a stored basis file against J.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Basis JSON written by the `basis` subcommand.
        #[arg(long)]
        basis: PathBuf,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Matrix JSON (`{"rows","cols","field","data"}`) or CSV of reals.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = InvArg::T)]
    involution: InvArg,
    /// Rank tolerance.
    #[arg(long, env = "AUTGRP_TOL")]
    tol: Option<f64>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug)]
struct Sampling {
    #[arg(short = 'n', default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Coefficients are uniform on [−SCALE, SCALE].
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SpaceArg {
    Sol,
    Cosol,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum InvArg {
    #[value(name = "T")]
    T,
    #[value(name = "H")]
    H,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Ply,
}

impl From<SpaceArg> for Space {
    fn from(s: SpaceArg) -> Space {
        match s {
            SpaceArg::Sol => Space::Sol,
            SpaceArg::Cosol => Space::Cosol,
        }
    }
}

impl From<InvArg> for Involution {
    fn from(i: InvArg) -> Involution {
        match i {
            InvArg::T => Involution::T,
            InvArg::H => Involution::H,
        }
    }
}

enum Failure {
    Lib(Error),
    /// A check ran but did not pass.
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Lib(Error::Io(e))
    }
}

type Outcome = Result<(), Failure>;

fn read_matrix(path: &Path) -> Result<Mat, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        Mat::from_json_str(trimmed).map_err(|e| match e {
            Error::Json(e) => Error::Input(format!("{}: {e}", path.display())),
            other => other,
        })
    } else {
        Mat::from_csv_str(&text)
    }
}

impl Common {
    fn tolerances(&self) -> Result<Tolerances, Error> {
        match self.tol {
            None => Ok(Tolerances::default()),
            Some(t) if t > 0.0 && t.is_finite() => Ok(Tolerances::with_rank(t)),
            Some(t) => Err(Error::Input(format!("tolerance must be positive, got {t}"))),
        }
    }

    fn matrix(&self) -> Result<Mat, Error> {
        let j = read_matrix(&self.input)?;
        if !j.is_square() {
            return Err(Error::Input(format!(
                "J must be square, got {}×{}",
                j.rows(),
                j.cols()
            )));
        }
        Ok(j)
    }

    fn sink(&self) -> io::Result<Box<dyn Write>> {
        Ok(match &self.output {
            Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
            None => Box::new(io::BufWriter::new(io::stdout().lock())),
        })
    }

    fn write_json(&self, v: &Value) -> Outcome {
        let mut w = self.sink()?;
        serde_json::to_writer_pretty(&mut w, v).map_err(Error::from)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    fn format_or(&self, default: Format, allowed: &[Format]) -> Result<Format, Error> {
        let f = self.format.unwrap_or(default);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(Error::Input(format!("format {f:?} is not available here")))
        }
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Basis { common, space } => {
            common.format_or(Format::Json, &[Format::Json])?;
            let j = common.matrix()?;
            let inv: Involution = common.involution.into();
            let tol = common.tolerances()?;
            let opts = SolveOptions {
                tol,
                ..Default::default()
            };
            let b = basis_with(&j, inv, space.into(), &opts)?;
            let report = dim_report(&j, inv, space.into(), &tol)?;
            let mut v = b.to_json();
            v["dim_report"] = report.to_json();
            common.write_json(&v)
        }
        Command::Dim { common, space } => {
            let format = common.format_or(Format::Csv, &[Format::Json, Format::Csv])?;
            let j = common.matrix()?;
            let tol = common.tolerances()?;
            let report = dim_report(&j, common.involution.into(), space.into(), &tol)?;
            if format == Format::Json {
                common.write_json(&report.to_json())
            } else {
                let mut w = common.sink()?;
                writeln!(w, "{}", report.total)?;
                w.flush()?;
                Ok(())
            }
        }
        Command::Structure { common } => {
            common.format_or(Format::Json, &[Format::Json])?;
            let j = common.matrix()?;
            let inv: Involution = common.involution.into();
            let tol = common.tolerances()?;
            let kron = kronecker_structure(&j, inv, &tol)?;
            let jordan = match cosquare_with_tol(&j, inv, tol.rank) {
                Ok(c) => Some(jordan_structure(&c, inv, &tol)?.to_json()),
                Err(Error::SingularInput(_)) => None,
                Err(e) => return Err(e.into()),
            };
            common.write_json(&json!({ "kronecker": kron.to_json(), "cosquare": jordan }))
        }
        Command::Classify { common } => {
            common.format_or(Format::Json, &[Format::Json])?;
            let j = common.matrix()?;
            let tol = common.tolerances()?;
            let v = match (j.field(), j.rows()) {
                (Field::Real, 2) => classify_2x2_with(&j, &tol)?.to_json(),
                (Field::Real, 4) => json!({ "profile": profile_4x4_with(&j, &tol)?.to_string() }),
                _ => {
                    return Err(Error::Input(
                        "classify needs a real 2×2 or 4×4 matrix".into(),
                    )
                    .into())
                }
            };
            common.write_json(&v)
        }
        Command::Sample { common, sampling } => {
            let format = common.format_or(Format::Csv, &[Format::Csv, Format::Json])?;
            let j = common.matrix()?;
            let cfg = sample_config(&sampling)?;
            let samples = sample_group(&j, common.involution.into(), &cfg)?;
            if format == Format::Json {
                common.write_json(&Value::Array(samples.iter().map(Mat::to_json).collect()))
            } else {
                let mut w = common.sink()?;
                write_samples_csv(&samples, &mut w)?;
                w.flush()?;
                Ok(())
            }
        }
        Command::Project {
            common,
            sampling,
            grid,
        } => {
            let format = common.format_or(Format::Csv, &[Format::Csv, Format::Ply])?;
            let j = common.matrix()?;
            let cfg = sample_config(&sampling)?;
            let mode = match grid {
                Some(g) => ProjectMode::SurfaceGrid { g },
                None => ProjectMode::Scatter,
            };
            let cloud = project_cloud(&j, common.involution.into(), &cfg, mode)?;
            let mut w = common.sink()?;
            match format {
                Format::Ply => write_ply(&cloud.points, &mut w)?,
                _ => write_points_csv(&cloud.points, &mut w)?,
            }
            w.flush()?;
            Ok(())
        }
        Command::Verify { common, basis } => {
            common.format_or(Format::Json, &[Format::Json])?;
            let j = common.matrix()?;
            let tol = common.tolerances()?;
            let (elements, space, inv) = read_basis(&basis)?;
            let inv = inv.unwrap_or(common.involution.into());
            let given = basis_from_matrices(elements, &j, inv, space);
            let oracle = oracle_basis(&j, inv, space, tol.rank)?;
            let residual_max = given.max_residual();
            let independent = given.dim() == 0
                || singular_values(&given.coordinate_matrix())
                    .last()
                    .is_some_and(|&s| s > tol.prune);
            let spans = span_equal(&given, &oracle, tol.residual);
            let pass = residual_max <= tol.residual && independent && spans;
            common.write_json(&json!({
                "space": space,
                "involution": inv.to_string(),
                "dim": given.dim(),
                "oracle_dim": oracle.dim(),
                "residual_max": residual_max,
                "independent": independent,
                "span_equal": spans,
                "pass": pass,
            }))?;
            if pass {
                Ok(())
            } else {
                Err(Failure::Check("stored basis failed verification".into()))
            }
        }
    }
}

fn sample_config(s: &Sampling) -> Result<SampleConfig, Error> {
    if !(s.scale.is_finite() && s.scale >= 0.0) {
        return Err(Error::Input(format!("scale must be non-negative, got {}", s.scale)));
    }
    Ok(SampleConfig {
        n: s.n,
        seed: s.seed,
        scale: s.scale,
    })
}

fn read_basis(path: &Path) -> Result<(Vec<Mat>, Space, Option<Involution>), Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    let space = match v.get("space").and_then(Value::as_str) {
        Some("sol") | None => Space::Sol,
        Some("cosol") => Space::Cosol,
        Some(other) => return Err(Error::Input(format!("unknown space `{other}`"))),
    };
    let inv = v
        .get("involution")
        .and_then(Value::as_str)
        .map(str::parse)
        .transpose()?;
    let elements = v
        .get("elements")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Input("basis file has no `elements` array".into()))?
        .iter()
        .map(Mat::from_json)
        .collect::<Result<Vec<_>, _>>()?;
    Ok((elements, space, inv))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Structure { .. } => 2,
        Error::Input(_) | Error::Json(_) | Error::Io(_) => 3,
        Error::Domain(_) | Error::SingularInput(_) => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
