//! Argument parsing, dispatch and exit codes.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};
use unisim_core::cp::{choi, ergodic_projection, kraus_from_choi, ChoiMatrix, Superoperator};
use unisim_core::linalg::RANK_TOL;
use unisim_core::similarity::{
    arveson_check, boundary_verify, commutant_dimension, invariant_values, recover_unitary,
    remark_probe, SamplePlan, Verdict, DEFAULT_GRID, DEFAULT_SAMPLES, DEFAULT_SEED,
};
use unisim_core::{ComplexMatrix, Error};

use crate::io::{
    float_value, matrix_value, parse_matrix, plan_value, to_canonical_json, to_text, IoError,
    ReportFile, TOOL_VERSION,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_NUMERICAL: i32 = 70;

const DEFAULT_TOL: f64 = 1e-8;
const DEFAULT_BOUNDARY_TOL: f64 = 1e-6;
const DEFAULT_TRIALS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(
    name = "unisim",
    version,
    about = "Decide unitary similarity of complex matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compare two matrices: sampled invariants, then unitary recovery
    CheckSim {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        out: Output,
    },
    /// Print the commutant dimension of {A, A*}
    Irreducible {
        a: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Print sampled values of ‖A ⊗ H + I ⊗ K‖
    Invariants {
        a: PathBuf,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        out: Output,
    },
    /// Find U with U*AU = B for irreducible A
    RecoverUnitary {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Look for ucp maps other than the identity that fix A
    BoundaryVerify {
        a: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED, value_parser = parse_seed)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Kraus operators of a Choi matrix
    Kraus {
        choi: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Ergodic projection of a superoperator given as its n² x n² matrix
    Expectation {
        omega: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Compare the invariants of X ⊕ X and X ⊕ 0
    ProbeRemark {
        x: PathBuf,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args, Debug, Clone)]
struct Sampling {
    /// Number of sampled (H, K) pairs
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// Sampling seed, decimal or 0x-prefixed hex
    #[arg(long, default_value_t = DEFAULT_SEED, value_parser = parse_seed)]
    seed: u64,
    /// Grid denominator d: entries are k/d + i m/d with |k|, |m| ≤ d
    #[arg(long, default_value_t = DEFAULT_GRID, value_parser = clap::value_parser!(u32).range(1..))]
    grid: u32,
}

#[derive(Args, Debug, Clone)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Tolerance (default 1e-8; 1e-6 for boundary-verify)
    #[arg(long, value_parser = parse_tol)]
    tol: Option<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Text,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

fn parse_tol(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t.is_finite() && t > 0.0 => Ok(t),
        _ => Err(format!(
            "tolerance must be a positive finite number, got {s:?}"
        )),
    }
}

/// Failure of a subcommand, carrying its exit code.
struct Failure {
    code: i32,
    kind: &'static str,
    message: String,
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        let kind = match e {
            IoError::Parse(_) => "ParseError",
            IoError::Schema { .. } => "SchemaError",
        };
        Failure {
            code: EXIT_DATA,
            kind,
            message: e.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = classify(&e);
        Failure {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

/// Exit code and name for each library error.
fn classify(e: &Error) -> (i32, &'static str) {
    match e {
        Error::Dimension(_) => (EXIT_DATA, "DimensionError"),
        Error::NonFinite { .. } => (EXIT_DATA, "NonFinite"),
        Error::NotHermitian { .. } => (EXIT_NEGATIVE, "NotHermitian"),
        Error::NotCompletelyPositive { .. } => (EXIT_NEGATIVE, "NotCompletelyPositive"),
        Error::NotUcp => (EXIT_NEGATIVE, "NotUcp"),
        Error::NoFixedPoint => (EXIT_NEGATIVE, "NoFixedPoint"),
        Error::Infeasible { .. } => (EXIT_NEGATIVE, "Infeasible"),
        Error::NoIntertwiner => (EXIT_NEGATIVE, "NoIntertwiner"),
        Error::NotUnitarilySimilar(_) => (EXIT_NEGATIVE, "NotUnitarilySimilar"),
        Error::NotConjugation { .. } => (EXIT_NEGATIVE, "NotConjugation"),
        Error::DecompositionFailure { .. } => (EXIT_NUMERICAL, "DecompositionFailure"),
        Error::PeripheralDefect { .. } => (EXIT_NUMERICAL, "PeripheralDefect"),
        Error::NotInRange { .. } => (EXIT_NUMERICAL, "NotInRange"),
        Error::Singular => (EXIT_NUMERICAL, "Singular"),
        Error::TooManyWords { .. } => (EXIT_NUMERICAL, "TooManyWords"),
        Error::NoConvergence(_) => (EXIT_NUMERICAL, "NoConvergence"),
    }
}

fn read_matrix(path: &PathBuf) -> Result<ComplexMatrix, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure {
        code: EXIT_DATA,
        kind: "ReadError",
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_matrix(&bytes).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn object(entries: Vec<(&str, Value)>) -> Value {
    let mut map = Map::new();
    for (k, v) in entries {
        map.insert(k.to_string(), v);
    }
    map.insert("tool_version".into(), Value::from(TOOL_VERSION));
    Value::Object(map)
}

fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => to_canonical_json(v),
        Format::Text => to_text(v),
    }
}

type Outcome = Result<(i32, Value), Failure>;

/// Runs the tool on `argv` (including the program name) and returns what it would
/// print and its exit status.
pub fn run_cli<I, S>(argv: I) -> CliOutput
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    CliOutput {
                        code: EXIT_OK,
                        stdout: text,
                        stderr: String::new(),
                    }
                }
                _ => CliOutput {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    let format = match &cli.command {
        Command::CheckSim { out, .. }
        | Command::Irreducible { out, .. }
        | Command::Invariants { out, .. }
        | Command::RecoverUnitary { out, .. }
        | Command::BoundaryVerify { out, .. }
        | Command::Kraus { out, .. }
        | Command::Expectation { out, .. }
        | Command::ProbeRemark { out, .. } => out.format,
    };
    match dispatch(cli.command) {
        Ok((code, v)) => CliOutput {
            code,
            stdout: render(&v, format),
            stderr: String::new(),
        },
        Err(f) => {
            let v = object(vec![
                ("error", Value::from(f.kind)),
                ("message", Value::from(f.message.clone())),
            ]);
            CliOutput {
                code: f.code,
                stdout: render(&v, format),
                stderr: format!("unisim: {}: {}\n", f.kind, f.message),
            }
        }
    }
}

fn dispatch(command: Command) -> Outcome {
    match command {
        Command::CheckSim {
            a,
            b,
            sampling,
            out,
        } => check_sim(&a, &b, &sampling, &out),
        Command::Irreducible { a, .. } => irreducible(&a),
        Command::Invariants { a, sampling, .. } => invariants(&a, &sampling),
        Command::RecoverUnitary { a, b, out } => recover(&a, &b, out.tol.unwrap_or(DEFAULT_TOL)),
        Command::BoundaryVerify {
            a,
            trials,
            seed,
            out,
        } => boundary(&a, trials, seed, out.tol.unwrap_or(DEFAULT_BOUNDARY_TOL)),
        Command::Kraus { choi, out } => kraus(&choi, out.tol.unwrap_or(DEFAULT_TOL)),
        Command::Expectation { omega, out } => expectation(&omega, out.tol.unwrap_or(DEFAULT_TOL)),
        Command::ProbeRemark { x, sampling, .. } => probe(&x, &sampling),
    }
}

fn plan_for(n: usize, s: &Sampling) -> SamplePlan {
    SamplePlan::new(n)
        .with_count(s.samples)
        .with_seed(s.seed)
        .with_grid(s.grid)
}

fn check_sim(a: &PathBuf, b: &PathBuf, s: &Sampling, out: &Output) -> Outcome {
    let a = read_matrix(a)?;
    let b = read_matrix(b)?;
    let report = arveson_check(
        &a,
        &b,
        &plan_for(a.rows(), s),
        out.tol.unwrap_or(DEFAULT_TOL),
    )?;
    let code = match report.verdict {
        Verdict::Similar => EXIT_OK,
        Verdict::NotSimilar => EXIT_NEGATIVE,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    };
    Ok((code, ReportFile::from_report(&report).to_value()))
}

fn irreducible(a: &PathBuf) -> Outcome {
    let a = read_matrix(a)?;
    let d = commutant_dimension(&a, RANK_TOL)?;
    let code = if d == 1 { EXIT_OK } else { EXIT_NEGATIVE };
    Ok((
        code,
        object(vec![
            ("n", Value::from(a.rows())),
            ("commutant_dimension", Value::from(d)),
            ("irreducible", Value::from(d == 1)),
        ]),
    ))
}

fn invariants(a: &PathBuf, s: &Sampling) -> Outcome {
    let a = read_matrix(a)?;
    let plan = plan_for(a.rows(), s);
    let values = invariant_values(&a, &a, &plan)?;
    Ok((
        EXIT_OK,
        object(vec![
            ("plan", plan_value(&plan)),
            (
                "values",
                Value::Array(values.iter().map(|&(f, _)| float_value(f)).collect()),
            ),
        ]),
    ))
}

fn recover(a: &PathBuf, b: &PathBuf, tol: f64) -> Outcome {
    let a = read_matrix(a)?;
    let b = read_matrix(b)?;
    let u = recover_unitary(&a, &b, tol)?;
    let residual = (&(&u.adjoint() * &a) * &u).frobenius_distance(&b);
    Ok((
        EXIT_OK,
        object(vec![
            ("unitary", matrix_value(&u)),
            ("residual", float_value(residual)),
        ]),
    ))
}

fn boundary(a: &PathBuf, trials: usize, seed: u64, tol: f64) -> Outcome {
    let a = read_matrix(a)?;
    let rep = boundary_verify(&a, trials, tol, seed)?;
    let distances = rep
        .distances
        .iter()
        .map(|d| d.map_or(Value::Null, float_value))
        .collect();
    let mut entries = vec![
        ("trials", Value::from(rep.trials)),
        ("seed", Value::from(seed)),
        ("tol", float_value(tol)),
        ("commutant_dimension", Value::from(rep.commutant_dimension)),
        ("distances", Value::Array(distances)),
        ("stalled", Value::from(rep.stalled)),
        (
            "max_distance_to_identity",
            float_value(rep.max_distance_to_identity),
        ),
    ];
    if let (Some(c), Some(d)) = (&rep.counterexample, rep.counterexample_distance) {
        entries.push(("counterexample", matrix_value(c.matrix())));
        entries.push(("counterexample_distance", float_value(d)));
    }
    let code = if rep.counterexample.is_some() {
        EXIT_NEGATIVE
    } else {
        EXIT_OK
    };
    Ok((code, object(entries)))
}

fn kraus(path: &PathBuf, tol: f64) -> Outcome {
    let c = ChoiMatrix::from_matrix(read_matrix(path)?)?;
    let set = kraus_from_choi(&c, tol)?;
    let rebuilt = choi(&set.to_superop(c.n()));
    Ok((
        EXIT_OK,
        object(vec![
            ("n", Value::from(c.n())),
            ("rank", Value::from(set.rank())),
            (
                "operators",
                Value::Array(set.ops.iter().map(matrix_value).collect()),
            ),
            ("reconstruction_error", float_value(rebuilt.distance(&c))),
        ]),
    ))
}

fn expectation(path: &PathBuf, tol: f64) -> Outcome {
    let omega = Superoperator::from_matrix(read_matrix(path)?)?;
    let ce = ergodic_projection(&omega, tol)?;
    let n = ce.n();
    let mut blocks = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            row.push(matrix_value(&ce.apply(&ComplexMatrix::unit(n, i, j))?));
        }
        blocks.push(Value::Array(row));
    }
    Ok((
        EXIT_OK,
        object(vec![
            ("n", Value::from(n)),
            ("fixed_dimension", Value::from(ce.fixed_basis.len())),
            ("idempotence_defect", float_value(ce.idempotence_defect())),
            ("blocks", Value::Array(blocks)),
        ]),
    ))
}

fn probe(x: &PathBuf, s: &Sampling) -> Outcome {
    let x = read_matrix(x)?;
    let p = remark_probe(&x, s.samples, s.seed, s.grid)?;
    let samples = p
        .samples
        .iter()
        .map(|t| {
            let mut m = Map::new();
            m.insert("index".into(), Value::from(t.index));
            m.insert("value_a".into(), float_value(t.value_a));
            m.insert("value_b".into(), float_value(t.value_b));
            m.insert("norm_k".into(), float_value(t.norm_k));
            m.insert("gap".into(), float_value(t.gap));
            m.insert("predicted_gap".into(), float_value(t.predicted_gap));
            Value::Object(m)
        })
        .collect();
    let mut opposed = Map::new();
    opposed.insert("H".into(), Value::from("-I"));
    opposed.insert("K".into(), Value::from("I"));
    opposed.insert("value_a".into(), float_value(p.opposed_pair.0));
    opposed.insert("value_b".into(), float_value(p.opposed_pair.1));
    let plan = plan_for(2 * x.rows(), s);
    Ok((
        EXIT_OK,
        object(vec![
            ("a", matrix_value(&p.a)),
            ("b", matrix_value(&p.b)),
            (
                "commutant_dims",
                Value::from(vec![p.commutant_dims.0, p.commutant_dims.1]),
            ),
            ("plan", plan_value(&plan)),
            ("samples", Value::Array(samples)),
            ("max_gap", float_value(p.max_gap)),
            ("nonzero_gaps", Value::from(p.nonzero_gaps)),
            ("max_prediction_error", float_value(p.max_prediction_error)),
            ("opposed_pair", Value::Object(opposed)),
        ]),
    ))
}
