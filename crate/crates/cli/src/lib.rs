//! Command-line front end: `generate`, `check`, `decompose`, `verify`, `fuzz`.
//!
//! Exit codes: 0 success / PPT confirmed, 1 negative verdict (NPT, failed
//! verification, fuzz failures), 2 input or usage error, 3 internal numerical
//! failure or a structural/spectral disagreement outside the tolerance band.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sepdec::campaign::{fuzz, in_tolerance_band, FuzzConfig};
use sepdec::json::{decomposition_from_str, decomposition_to_string, instance_from_str, instance_to_string};
use sepdec::json::StructuralReportJson;
use sepdec::{
    check_minor_relations, decompose, extract_theta, spectral_ppt, verify_decomposition, ClassParams, Error,
    Execution, GenSpec, Kind, Tolerances,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Environment variable overriding the default residual tolerance.
pub const TOL_ENV: &str = "SEPDEC_TOL";

#[derive(Debug, Parser)]
#[command(name = "sepdec", version, about = "PPT tests and separable decompositions for cyclic two-qudit states")]
struct Cli {
    /// Report errors on stderr as {"error": code, "detail": ...}.
    #[arg(long, global = true)]
    json_errors: bool,

    /// Residual tolerance; overrides SEPDEC_TOL.
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate an instance and write it as JSON.
    Generate(GenerateArgs),
    /// Decide PPT for an instance.
    Check(CheckArgs),
    /// Compute a separable decomposition of a PPT instance.
    Decompose(DecomposeArgs),
    /// Verify a decomposition against its instance.
    Verify(VerifyArgs),
    /// Run the structural-vs-spectral agreement and decomposition campaign.
    Fuzz(FuzzArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "ppt")]
    kind: Kind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Perturbation size, required for `--kind perturbed`.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    label: Option<String>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Structural,
    Spectral,
    Both,
}

#[derive(Debug, Args)]
struct CheckArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    method: Method,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DecomposeArgs {
    input: PathBuf,
    /// Gauge constant pinning the first mixing phase.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    free_delta: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    instance: PathBuf,
    decomposition: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FuzzArgs {
    #[arg(long, default_value_t = 2)]
    n_min: usize,
    #[arg(long, default_value_t = 6)]
    n_max: usize,
    /// Number of seeds; seeds run from --seed-start upwards.
    #[arg(long, default_value_t = 50)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    seed_start: u64,
    #[arg(long, value_delimiter = ',', default_value = "ppt,random,perturbed")]
    kinds: Vec<Kind>,
    /// Evaluate instances on one thread.
    #[arg(long)]
    sequential: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Failure carrying its exit code and a stable error code.
#[derive(Debug)]
struct Failure {
    exit: i32,
    code: String,
    detail: String,
}

impl Failure {
    fn usage(code: &str, detail: impl fmt::Display) -> Self {
        Failure {
            exit: EXIT_USAGE,
            code: code.into(),
            detail: detail.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let exit = match e {
            Error::BadShape(_)
            | Error::ZeroEntry { .. }
            | Error::BadTrace { .. }
            | Error::BadLambda { .. }
            | Error::NonFinite(_)
            | Error::BadS { .. }
            | Error::BadTolerances(_)
            | Error::Json(_) => EXIT_USAGE,
            Error::NotPpt { .. } | Error::VerificationFailed(_) => EXIT_NEGATIVE,
            Error::EigensolverFailure { .. }
            | Error::InconsistentTheta { .. }
            | Error::SumDefect { .. }
            | Error::MixIdentityViolated { .. }
            | Error::RankOneFailure { .. } => EXIT_INTERNAL,
        };
        Failure {
            exit,
            code: e.code().into(),
            detail: e.to_string(),
        }
    }
}

type CliResult = Result<i32, Failure>;

/// Parse `argv` (including the program name), run the command, return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_env(argv, std::env::var(TOL_ENV).ok())
}

/// As [`run`], with the `SEPDEC_TOL` value supplied explicitly.
pub fn run_with_env<I, T>(argv: I, env_tol: Option<String>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let json_errors = argv.iter().any(|a| a == "--json-errors");
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return EXIT_OK;
            }
            if json_errors {
                report(true, &Failure::usage("Usage", e.to_string().trim_end()));
            } else {
                let _ = e.print();
            }
            return EXIT_USAGE;
        }
    };
    match dispatch(&cli, env_tol.as_deref()) {
        Ok(code) => code,
        Err(f) => {
            report(cli.json_errors, &f);
            f.exit
        }
    }
}

fn report(json: bool, f: &Failure) {
    if json {
        let body = serde_json::json!({ "error": f.code, "detail": f.detail });
        eprintln!("{body}");
    } else {
        eprintln!("error [{}]: {}", f.code, f.detail);
    }
}

fn tolerances(flag: Option<f64>, env: Option<&str>) -> Result<Tolerances, Failure> {
    let value = match (flag, env) {
        (Some(t), _) => t,
        (None, Some(s)) => s
            .trim()
            .parse::<f64>()
            .map_err(|e| Failure::usage("BadTolerances", format!("{TOL_ENV}={s:?}: {e}")))?,
        (None, None) => return Ok(Tolerances::default()),
    };
    Ok(Tolerances::with_residual_tol(value)?)
}

fn dispatch(cli: &Cli, env_tol: Option<&str>) -> CliResult {
    let tol = tolerances(cli.tol, env_tol)?;
    match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Check(a) => cmd_check(a, &tol),
        Command::Decompose(a) => cmd_decompose(a, &tol),
        Command::Verify(a) => cmd_verify(a, &tol),
        Command::Fuzz(a) => cmd_fuzz(a, &tol),
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage("Io", format!("{}: {e}", path.display())))
}

fn read_instance(path: &Path, tol: &Tolerances) -> Result<ClassParams, Failure> {
    Ok(instance_from_str(&read_text(path)?, tol)?)
}

/// Write to `path` via a sibling temporary file and rename, or to stdout.
fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    let Some(path) = path else {
        println!("{text}");
        return Ok(());
    };
    let io_err = |e: std::io::Error| Failure::usage("Io", format!("{}: {e}", path.display()));
    let file_name = path
        .file_name()
        .ok_or_else(|| Failure::usage("Io", format!("{}: not a file path", path.display())))?;
    let mut tmp_name = OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let written = fs::File::create(&tmp).and_then(|mut f| {
        f.write_all(text.as_bytes())?;
        f.write_all(b"\n")?;
        f.sync_all()
    });
    if let Err(e) = written.and_then(|_| fs::rename(&tmp, path)) {
        let _ = fs::remove_file(&tmp);
        return Err(io_err(e));
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes")
}

fn cmd_generate(a: &GenerateArgs) -> CliResult {
    let mut spec = GenSpec::new(a.n, a.kind, a.seed);
    spec.epsilon = a.epsilon;
    spec.label = a.label.clone();
    let params = spec.generate()?;
    emit(a.output.as_deref(), &instance_to_string(&params))?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct SpectralJson {
    is_ppt: bool,
    min_eigenvalue: f64,
    eigenvalues: Vec<f64>,
}

/// `{"method", "is_ppt", "agree", "borderline", "min_eigenvalue", "structural", "spectral"}`.
#[derive(Debug, Serialize)]
struct CheckReport {
    method: &'static str,
    is_ppt: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    agree: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    borderline: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_eigenvalue: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    structural: Option<StructuralReportJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    spectral: Option<SpectralJson>,
}

fn cmd_check(a: &CheckArgs, tol: &Tolerances) -> CliResult {
    let params = read_instance(&a.input, tol)?;
    let structural = match a.method {
        Method::Spectral => None,
        _ => {
            let report = check_minor_relations(&params, tol)?;
            let theta = if report.is_ppt {
                Some(extract_theta(&params, tol)?)
            } else {
                None
            };
            Some(StructuralReportJson::new(&report, theta.as_ref()))
        }
    };
    let spectral = match a.method {
        Method::Structural => None,
        _ => {
            let r = spectral_ppt(&params, tol)?;
            Some(SpectralJson {
                is_ppt: r.is_ppt,
                min_eigenvalue: r.min_eigenvalue,
                eigenvalues: r.eigenvalues,
            })
        }
    };
    let (agree, borderline) = match (&structural, &spectral) {
        (Some(st), Some(sp)) => (
            Some(st.is_ppt == sp.is_ppt),
            Some(in_tolerance_band(st.max_minor_residual, sp.min_eigenvalue, tol)),
        ),
        _ => (None, None),
    };
    // The structural verdict is primary; the spectral one stands in when it is the only one.
    let is_ppt = structural
        .as_ref()
        .map(|s| s.is_ppt)
        .or(spectral.as_ref().map(|s| s.is_ppt))
        .unwrap_or(false);
    let report = CheckReport {
        method: match a.method {
            Method::Structural => "structural",
            Method::Spectral => "spectral",
            Method::Both => "both",
        },
        is_ppt,
        agree,
        borderline,
        min_eigenvalue: spectral.as_ref().map(|s| s.min_eigenvalue),
        structural,
        spectral,
    };
    emit(a.output.as_deref(), &to_json(&report))?;
    if report.agree == Some(false) && report.borderline == Some(false) {
        return Err(Failure {
            exit: EXIT_INTERNAL,
            code: "MethodDisagreement".into(),
            detail: "structural and spectral verdicts differ outside the tolerance band".into(),
        });
    }
    Ok(if is_ppt { EXIT_OK } else { EXIT_NEGATIVE })
}

fn cmd_decompose(a: &DecomposeArgs, tol: &Tolerances) -> CliResult {
    if !a.free_delta.is_finite() {
        return Err(Failure::usage("BadShape", format!("--free-delta must be finite, got {}", a.free_delta)));
    }
    let params = read_instance(&a.input, tol)?;
    let d = decompose(&params, a.free_delta, tol)?;
    emit(a.output.as_deref(), &decomposition_to_string(&d))?;
    Ok(EXIT_OK)
}

/// `{"pass", "reconstruction", "trace_defect", "max_norm_defect", "min_weight", "term_count"}`.
#[derive(Debug, Serialize)]
struct VerifyReport {
    pass: bool,
    reconstruction: f64,
    trace_defect: f64,
    max_norm_defect: f64,
    min_weight: f64,
    term_count: usize,
}

fn cmd_verify(a: &VerifyArgs, tol: &Tolerances) -> CliResult {
    let params = read_instance(&a.instance, tol)?;
    let d = decomposition_from_str(&read_text(&a.decomposition)?)?;
    let r = verify_decomposition(&d, &params, tol);
    let report = VerifyReport {
        pass: r.pass,
        reconstruction: r.reconstruction,
        trace_defect: r.trace_defect,
        max_norm_defect: r.max_norm_defect,
        min_weight: r.min_weight,
        term_count: r.term_count,
    };
    emit(a.output.as_deref(), &to_json(&report))?;
    Ok(if r.pass { EXIT_OK } else { EXIT_NEGATIVE })
}

fn cmd_fuzz(a: &FuzzArgs, tol: &Tolerances) -> CliResult {
    if a.n_min < 2 || a.n_min > a.n_max {
        return Err(Failure::usage(
            "BadShape",
            format!("need 2 <= n-min <= n-max, got {}..{}", a.n_min, a.n_max),
        ));
    }
    let end = a
        .seed_start
        .checked_add(a.seeds)
        .ok_or_else(|| Failure::usage("BadShape", "seed range overflows u64"))?;
    let config = FuzzConfig {
        n_min: a.n_min,
        n_max: a.n_max,
        seeds: (a.seed_start..end).collect(),
        kinds: a.kinds.clone(),
    };
    let exec = if a.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let report = fuzz(&config, tol, exec);
    emit(a.output.as_deref(), &to_json(&report))?;
    Ok(if report.failures.is_empty() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}
