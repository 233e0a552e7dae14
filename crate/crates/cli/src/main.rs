//! `qop`: command-line access to the quaternionic operator toolkit.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use qop_core::decomp::{polar, transform, TransformKind};
use qop_core::harness::gen::{gen, GeneratorKind, GeneratorSpec, Generated};
use qop_core::harness::{fuzz, verify, Property, VerifyConfig, DEFAULT_DIM, DEFAULT_SHRINK_BUDGET};
use qop_core::oracles::{classify_basic, gcsi_sweep, is_p_hyponormal, paranormal_report, DEFAULT_GCSI_BUDGET, DEFAULT_TOL};
use qop_core::spectral::spherical_point_spectrum;
use qop_core::{QMatrix, QopError, Quaternion};

#[derive(Parser, Debug)]
#[command(name = "qop", version, about = "Operator theory on finite-dimensional quaternionic Hilbert spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct TolArg {
    /// Relative tolerance
    #[arg(long, env = "QOP_TOL", default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Basic class flags, paranormality and GCSI evidence for a matrix
    Classify {
        file: PathBuf,
        /// Also test p-hyponormality for this p in (0, 1]
        #[arg(long)]
        p: Option<f64>,
        #[command(flatten)]
        tol: TolArg,
    },
    /// Polar decomposition T = U|T|
    Polar { file: PathBuf },
    /// Aluthge-type transform: aluthge, duggal, lambda:<x>, sr:<r>
    Transform {
        #[arg(long)]
        kind: String,
        file: PathBuf,
    },
    /// Spherical point spectrum as similarity classes
    Spectrum { file: PathBuf },
    /// Run a property suite on seeded random instances
    Verify {
        property: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_DIM)]
        dim: usize,
        /// Draw exploratory instances outside the theorem's hypotheses
        #[arg(long)]
        probe: bool,
        #[command(flatten)]
        tol: TolArg,
    },
    /// Random search with varying dimension; violations are shrunk
    Fuzz {
        property: String,
        #[arg(long, default_value_t = 1000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest dimension tried
        #[arg(long, default_value_t = DEFAULT_DIM)]
        dim: usize,
        #[arg(long)]
        probe: bool,
        #[command(flatten)]
        tol: TolArg,
    },
    /// Write a random operator (or ordered pair) to a JSON file
    Gen {
        /// ginibre, hermitian, positive, ordered-pair, normal-with-spectrum,
        /// partial-isometry, near-normal, unitary
        kind: String,
        #[arg(long, default_value_t = DEFAULT_DIM)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
        /// Rank for partial-isometry (defaults to dim − 1)
        #[arg(long)]
        rank: Option<usize>,
        /// Perturbation size for near-normal
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        /// Spectrum for normal-with-spectrum: comma-separated reals or a JSON
        /// array of [w, x, y, z]
        #[arg(long)]
        spectrum: Option<String>,
    },
}

enum Failure {
    Usage(String),
    Violation(String),
}

impl From<QopError> for Failure {
    fn from(e: QopError) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn read_matrix(path: &Path) -> Result<QMatrix, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable output")
}

fn parse_spectrum(s: &str) -> Result<Vec<Quaternion>, Failure> {
    if s.trim_start().starts_with('[') {
        return serde_json::from_str(s).map_err(|e| Failure::Usage(format!("--spectrum: {e}")));
    }
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .map(Quaternion::real)
                .ok_or_else(|| Failure::Usage(format!("--spectrum: bad value {v:?}")))
        })
        .collect()
}

fn parse_property(s: &str) -> Result<Property, Failure> {
    s.parse().map_err(|_| {
        let names: Vec<&str> = Property::ALL.iter().map(|p| p.name()).collect();
        Failure::Usage(format!("unknown property `{s}`; expected one of: {}", names.join(", ")))
    })
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Classify { file, p, tol } => {
            let t = read_matrix(&file)?;
            let tol = tol.tol;
            let basic = classify_basic(&t, tol)?;
            let paranormal = paranormal_report(&t, tol, 1000, 0)?;
            let sweep = gcsi_sweep(&t, DEFAULT_GCSI_BUDGET, 0, tol)?;
            let mut out = json!({
                "selfadjoint": basic.selfadjoint,
                "positive": basic.positive,
                "normal": basic.normal,
                "unitary": basic.unitary,
                "threshold": basic.threshold,
                "paranormal": paranormal.vector_margin,
                "paranormal_lambda": paranormal.lambda_margin,
                "gcsi": {
                    "member_evidence": sweep.member_evidence(),
                    "certified_nonmember": sweep.certified_nonmember(),
                    "per_beta": sweep.per_beta,
                },
            });
            if let Some(p) = p {
                out["p_hyponormal"] = json!({ "p": p, "margin": is_p_hyponormal(&t, p, tol)? });
            }
            Ok(to_json(&out))
        }
        Command::Polar { file } => {
            let parts = polar(&read_matrix(&file)?)?;
            Ok(to_json(&json!({ "U": parts.u, "absT": parts.abs_t, "rank": parts.rank })))
        }
        Command::Transform { kind, file } => {
            let kind: TransformKind = kind.parse()?;
            Ok(to_json(&transform(&read_matrix(&file)?, kind)?))
        }
        Command::Spectrum { file } => Ok(to_json(&spherical_point_spectrum(&read_matrix(&file)?)?)),
        Command::Verify { property, trials, seed, dim, probe, tol } => {
            let property = parse_property(&property)?;
            let cfg = VerifyConfig { trials, seed, dim, probe, tol: tol.tol, ..Default::default() };
            let report = verify(property, &cfg)?;
            if report.passed() {
                Ok(report.to_json())
            } else {
                Err(Failure::Violation(report.to_json()))
            }
        }
        Command::Fuzz { property, budget, seed, dim, probe, tol } => {
            let property = parse_property(&property)?;
            let cfg = VerifyConfig { trials: budget, seed, dim, probe, tol: tol.tol, ..Default::default() };
            let report = fuzz(property, &cfg, DEFAULT_SHRINK_BUDGET)?;
            if report.passed() {
                Ok(report.to_json())
            } else {
                Err(Failure::Violation(report.to_json()))
            }
        }
        Command::Gen { kind, dim, seed, output, rank, eps, spectrum } => {
            let kind = match kind.as_str() {
                "ginibre" => GeneratorKind::Ginibre,
                "hermitian" => GeneratorKind::Hermitian,
                "positive" => GeneratorKind::Positive,
                "ordered-pair" => GeneratorKind::OrderedPair,
                "normal-with-spectrum" => GeneratorKind::NormalWithSpectrum {
                    spectrum: spectrum.as_deref().map(parse_spectrum).transpose()?.unwrap_or_default(),
                },
                "partial-isometry" => GeneratorKind::PartialIsometry { rank: rank.unwrap_or(dim.saturating_sub(1)) },
                "near-normal" => GeneratorKind::NearNormal { eps },
                "unitary" => GeneratorKind::Unitary,
                other => return Err(Failure::Usage(format!("unknown generator kind `{other}`"))),
            };
            let spec = GeneratorSpec { kind, dim, seed };
            let text = match gen(&spec)? {
                Generated::Single(m) => to_json(&m),
                Generated::Pair(a, b) => to_json(&json!({ "A": a, "B": b })),
            };
            fs::write(&output, format!("{text}\n")).map_err(|e| Failure::Usage(format!("{}: {e}", output.display())))?;
            Ok(String::new())
        }
    }
}

// A closed pipe (e.g. `qop ... | head`) is not an error worth a panic.
fn emit(text: &str) {
    let _ = writeln!(io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            if !out.is_empty() {
                emit(&out);
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Violation(report)) => {
            emit(&report);
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
