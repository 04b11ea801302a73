//! The `subtori` command line.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use subtori_core::closure::fuzz_residual;
use subtori_core::{
    census, classify, closure, cm_check, endomorphism_algebra, is_isogenous, quotient_torus, tau_invariant,
    witness_search,
};

use crate::corpus;
use crate::error::{CliError, CliResult, Kind};
use crate::format::{parse_curve_file, parse_subgroup, parse_subtorus, parse_torus};
use crate::report::{self, ReportDocument, Timing, VERSION};

/// Height used when no `--height` is given and `SUBTORI_HEIGHT` is unset.
pub const DEFAULT_HEIGHT: u32 = 3;
pub const HEIGHT_ENV: &str = "SUBTORI_HEIGHT";

#[derive(Debug, Parser)]
#[command(name = "subtori", version, about = "Closures of complex subgroups in complex tori, computed exactly")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closure of a complex subgroup.
    Closure {
        #[arg(long)]
        torus: PathBuf,
        #[arg(long)]
        subgroup: PathBuf,
        /// Also run a floating-point sampling check with this many points.
        #[arg(long)]
        fuzz: Option<usize>,
    },
    /// Decide whether the torus is isogenous to a power of a CM curve.
    Classify {
        #[arg(long)]
        torus: PathBuf,
        #[arg(long)]
        height: Option<u32>,
    },
    /// Closures of all hyperplane cores up to a height.
    Census {
        #[arg(long)]
        torus: PathBuf,
        #[arg(long)]
        height: Option<u32>,
    },
    /// First hyperplane core whose closure is not complex.
    Witness {
        #[arg(long)]
        torus: PathBuf,
        #[arg(long)]
        height: Option<u32>,
    },
    /// Rational endomorphism algebra.
    Endo {
        #[arg(long)]
        torus: PathBuf,
    },
    /// Quotient by a complex subtorus.
    Quotient {
        #[arg(long)]
        torus: PathBuf,
        #[arg(long)]
        subtorus: PathBuf,
    },
    /// Elliptic curve queries.
    Ec {
        #[command(subcommand)]
        command: EcCommand,
    },
    /// Bundled corpus checks.
    Corpus {
        #[command(subcommand)]
        command: CorpusCommand,
    },
}

#[derive(Debug, Subcommand)]
enum EcCommand {
    /// Complex multiplication test.
    Cm {
        #[arg(long)]
        curve: PathBuf,
    },
    /// Isogeny test between two curves.
    Isogeny {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum CorpusCommand {
    /// Classify every torus in a directory and check the signals agree.
    Run {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        height: Option<u32>,
    },
}

/// Exit code and the text for both output streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn resolve_height(flag: Option<u32>) -> CliResult<u32> {
    let h = match flag {
        Some(h) => h,
        None => match std::env::var(HEIGHT_ENV) {
            Ok(s) => s
                .trim()
                .parse()
                .map_err(|_| CliError::input("invalid_height", format!("{HEIGHT_ENV}={s:?} is not a positive integer")))?,
            Err(_) => DEFAULT_HEIGHT,
        },
    };
    if h == 0 {
        return Err(CliError::input("invalid_height", "height must be at least 1"));
    }
    Ok(h)
}

fn fuzz_section(
    t: &subtori_core::ComplexTorus,
    v: &subtori_core::ComplexSubgroupSpec,
    res: &subtori_core::ClosureResult,
    samples: usize,
) -> CliResult<Value> {
    const TOLERANCE: f64 = 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let span = 2 * v.dim();
    let pts: Vec<Vec<f64>> = (0..samples)
        .map(|_| {
            let mut s: Vec<f64> = (0..span).map(|_| rng.gen_range(-10.0..10.0)).collect();
            s.extend((0..2 * t.n()).map(|_| rng.gen_range(-5i32..=5) as f64));
            s
        })
        .collect();
    let worst = fuzz_residual(t, v, res, &pts)?;
    Ok(json!({"samples": samples, "max_residual": worst, "tolerance": TOLERANCE, "ok": worst < TOLERANCE}))
}

/// Runs one command; returns the result payload and the raw input bytes.
fn execute(cmd: Command) -> CliResult<(Value, Vec<Vec<u8>>, Option<CliError>)> {
    match cmd {
        Command::Closure { torus, subgroup, fuzz } => {
            let (t, tb) = parse_torus(&torus)?;
            let (v, vb) = parse_subgroup(&subgroup, &t.torus)?;
            let res = closure(&t.torus, &v)?;
            let mut out = report::closure(&res);
            if let Some(n) = fuzz {
                out["fuzz"] = fuzz_section(&t.torus, &v, &res, n)?;
            }
            Ok((out, vec![tb, vb], None))
        }
        Command::Classify { torus, height } => {
            let h = resolve_height(height)?;
            let (t, tb) = parse_torus(&torus)?;
            let r = classify(&t.torus, t.product_form.as_deref(), h)?;
            Ok((report::classification(&r), vec![tb], None))
        }
        Command::Census { torus, height } => {
            let h = resolve_height(height)?;
            let (t, tb) = parse_torus(&torus)?;
            Ok((report::census(&census(&t.torus, h)?), vec![tb], None))
        }
        Command::Witness { torus, height } => {
            let h = resolve_height(height)?;
            let (t, tb) = parse_torus(&torus)?;
            let w = witness_search(&t.torus, h)?;
            Ok((report::witness(h, w.as_ref()), vec![tb], None))
        }
        Command::Endo { torus } => {
            let (t, tb) = parse_torus(&torus)?;
            Ok((report::endo(&endomorphism_algebra(&t.torus), t.torus.n()), vec![tb], None))
        }
        Command::Quotient { torus, subtorus } => {
            let (t, tb) = parse_torus(&torus)?;
            let (c, cb) = parse_subtorus(&subtorus, &t.torus)?;
            let q = quotient_torus(&t.torus, &c).map_err(|e| CliError::from(e).at(&subtorus.display().to_string()))?;
            Ok((report::quotient(&q), vec![tb, cb], None))
        }
        Command::Ec { command: EcCommand::Cm { curve } } => {
            let (e, eb) = parse_curve_file(&curve)?;
            let tau = tau_invariant(&e)?;
            Ok((report::cm(tau.tau(), &cm_check(&tau)), vec![eb], None))
        }
        Command::Ec { command: EcCommand::Isogeny { a, b } } => {
            let (ea, ab) = parse_curve_file(&a)?;
            let (eb, bb) = parse_curve_file(&b)?;
            let i = is_isogenous(&tau_invariant(&ea)?, &tau_invariant(&eb)?)?;
            Ok((report::isogeny(&i), vec![ab, bb], None))
        }
        Command::Corpus { command: CorpusCommand::Run { dir, height } } => {
            let h = resolve_height(height)?;
            let run = corpus::corpus_consistency(&dir, h)?;
            let failure = (!run.passed).then(|| {
                CliError::consistency(format!("corpus members failed: {}", run.failed_files().join(", ")))
            });
            Ok((run.to_json(), run.inputs, failure))
        }
    }
}

fn error_document(argv: &[String], e: &CliError) -> String {
    let doc = json!({
        "version": VERSION,
        "command": argv,
        "error": {"kind": e.kind.as_str(), "code": e.code, "message": e.message},
    });
    serde_json::to_string_pretty(&doc).expect("json values serialize") + "\n"
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run_command(argv: &[String]) -> Outcome {
    let echo: Vec<String> = argv.iter().skip(1).cloned().collect();
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome { exit_code: 0, stdout: e.to_string(), stderr: String::new() };
            }
            let err = CliError::input("usage", e.to_string().trim_end());
            return Outcome { exit_code: Kind::Input.exit_code(), stdout: String::new(), stderr: error_document(&echo, &err) };
        }
    };
    let start = Instant::now();
    match execute(cli.command) {
        Ok((result, inputs, failure)) => {
            let doc = ReportDocument {
                version: VERSION,
                command: echo.clone(),
                input_digest: report::digest(&inputs),
                result,
                timing: Timing { elapsed_us: start.elapsed().as_micros() },
            };
            let stdout = serde_json::to_string_pretty(&doc).expect("json values serialize") + "\n";
            match failure {
                None => Outcome { exit_code: 0, stdout, stderr: String::new() },
                Some(e) => Outcome { exit_code: e.kind.exit_code(), stdout, stderr: error_document(&echo, &e) },
            }
        }
        Err(e) => Outcome { exit_code: e.kind.exit_code(), stdout: String::new(), stderr: error_document(&echo, &e) },
    }
}

/// Bundled corpus directory of this crate.
pub fn bundled_corpus() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/corpus"))
}
