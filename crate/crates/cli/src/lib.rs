//! Command-line front end: runs `.spec` files and the built-in CHSH, EPR
//! and hidden-variable demonstrations.
//!
//! Exit codes: 0 success, 1 parse or resolution errors, 2 numeric contract
//! violations, 64 usage errors, 66 unreadable input file.

mod commands;
pub mod format;
mod run;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use histories_kit::dsl::{load, parse_spec};
use histories_kit::tolerance::{self, ToleranceBundle};
use serde_json::Value;

use commands::Output;
use format::{h, num, obj, to_json};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SPEC: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_NO_INPUT: i32 = 66;

/// Environment variable overriding the algebraic tolerance.
pub const TOL_ENV: &str = "HISTORIES_KIT_TOL";

pub struct Options {
    /// Version string written into report headers.
    pub version: String,
    /// Value of [`TOL_ENV`], if set.
    pub tol_env: Option<String>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            version: env!("CARGO_PKG_VERSION").to_string(),
            tol_env: None,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "histories-kit",
    version,
    about = "Consistent-histories and CHSH toolkit"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,
    /// Algebraic tolerance (overrides HISTORIES_KIT_TOL).
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Execute every query in a spec file.
    Run { file: PathBuf },
    /// Four-level CHSH demonstration with a sampled check.
    Neon {
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Singlet correlators, collapse rule and no-signaling.
    Epr {
        /// Alice's two angles in degrees from z in the z-x plane.
        #[arg(long, num_args = 2, value_names = ["A0", "A1"], allow_negative_numbers = true)]
        alice_deg: Option<Vec<f64>>,
        /// Bob's two angles in degrees.
        #[arg(long, num_args = 2, value_names = ["B0", "B1"], allow_negative_numbers = true)]
        bob_deg: Option<Vec<f64>>,
    },
    /// Enumerate the 16 deterministic strategies.
    LhvBound,
    /// Can a hidden-variable model reproduce these correlators?
    #[command(allow_negative_numbers = true)]
    LhvCheck {
        e00: f64,
        e01: f64,
        e10: f64,
        e11: f64,
    },
}

/// Command failure with its exit code and message.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn numeric(e: impl std::fmt::Display) -> Self {
        Failure {
            code: EXIT_NUMERIC,
            message: e.to_string(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

fn parse_tol(text: &str, origin: &str) -> Result<f64, Failure> {
    match text.trim().parse::<f64>() {
        Ok(t) if t.is_finite() && t > 0.0 => Ok(t),
        _ => Err(Failure::usage(format!(
            "{origin}: tolerance must be a positive number, got {text:?}"
        ))),
    }
}

fn header(version: &str, command: &str, source: Option<&str>) -> (Value, String) {
    let t = ToleranceBundle::current();
    let json = obj([
        (
            "tool",
            obj([
                ("name", "histories-kit".into()),
                ("version", version.into()),
            ]),
        ),
        ("command", command.into()),
        ("source", source.map(Value::from).unwrap_or(Value::Null)),
        (
            "tolerances",
            obj([
                ("algebraic", num(t.algebraic)),
                ("eigen_grouping", num(t.eigen_grouping)),
                ("probability", num(t.probability)),
            ]),
        ),
    ]);
    let human = format!(
        "histories-kit {version} | tolerances: algebraic {}, eigen grouping {}, probability {}\n",
        h(t.algebraic),
        h(t.eigen_grouping),
        h(t.probability)
    );
    (json, human)
}

fn emit(out: &mut dyn Write, format: Format, head: (Value, String), body: Output) {
    let text = match format {
        Format::Json => {
            let Value::Object(mut m) = head.0 else {
                unreachable!()
            };
            m.insert("report".into(), body.json);
            to_json(&Value::Object(m))
        }
        Format::Human => format!("{}{}", head.1, body.human),
    };
    let _ = out.write_all(text.as_bytes());
}

fn two(v: Option<Vec<f64>>, default: [f64; 2]) -> [f64; 2] {
    v.map(|v| [v[0], v[1]]).unwrap_or(default)
}

/// Runs the tool on `argv` (including the program name) and returns the
/// exit code.
pub fn execute(argv: &[String], out: &mut dyn Write, err: &mut dyn Write, opts: &Options) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = out.write_all(text.as_bytes());
                EXIT_OK
            } else {
                let _ = err.write_all(text.as_bytes());
                EXIT_USAGE
            };
        }
    };
    match dispatch(cli, out, err, opts) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(
    cli: Cli,
    out: &mut dyn Write,
    err: &mut dyn Write,
    opts: &Options,
) -> Result<i32, Failure> {
    let tol = match (cli.tol, &opts.tol_env) {
        (Some(t), _) => parse_tol(&t.to_string(), "--tol")?,
        (None, Some(env)) => parse_tol(env, TOL_ENV)?,
        (None, None) => tolerance::DEFAULT_ALGEBRAIC,
    };
    tolerance::set_algebraic(tol);
    let v = &opts.version;
    match cli.command {
        Command::Neon { shots, seed } => {
            let body = commands::neon(shots, seed)?;
            emit(out, cli.format, header(v, "neon", None), body);
        }
        Command::Epr { alice_deg, bob_deg } => {
            let body = commands::epr(
                two(alice_deg, histories_kit::bell::SINGLET_ALICE_DEG),
                two(bob_deg, histories_kit::bell::SINGLET_BOB_DEG),
            )?;
            emit(out, cli.format, header(v, "epr", None), body);
        }
        Command::LhvBound => emit(
            out,
            cli.format,
            header(v, "lhv-bound", None),
            commands::lhv_bound(),
        ),
        Command::LhvCheck { e00, e01, e10, e11 } => {
            let e = [e00, e01, e10, e11];
            if e.iter().any(|x| !x.is_finite()) {
                return Err(Failure::usage("correlators must be finite numbers"));
            }
            emit(
                out,
                cli.format,
                header(v, "lhv-check", None),
                commands::lhv_check(e)?,
            );
        }
        Command::Run { file } => {
            let source = std::fs::read_to_string(&file).map_err(|e| Failure {
                code: EXIT_NO_INPUT,
                message: format!("{}: {e}", file.display()),
            })?;
            let name = file.file_name().map(|n| n.to_string_lossy().into_owned());
            let spec = match parse_spec(&source) {
                Ok(s) => s,
                Err(errors) => {
                    for e in &errors.0 {
                        let _ = writeln!(err, "{}:{e}", file.display());
                    }
                    return Ok(EXIT_SPEC);
                }
            };
            let exp = match load(&spec) {
                Ok(x) => x,
                Err(errors) => {
                    for e in &errors.0 {
                        let _ = writeln!(err, "{}:{e}", file.display());
                    }
                    return Ok(EXIT_SPEC);
                }
            };
            let (body, ok) = run::run_spec(&spec, &exp);
            emit(out, cli.format, header(v, "run", name.as_deref()), body);
            if !ok {
                let _ = writeln!(
                    err,
                    "error: one or more queries violated a numeric contract"
                );
                return Ok(EXIT_NUMERIC);
            }
        }
    }
    Ok(EXIT_OK)
}
