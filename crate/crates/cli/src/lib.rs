//! The `cohist` command line.
//!
//! ```text
//! cohist run (--builtin NAME | --file PATH) [--report text|json] [--tol FLOAT]
//!            [--out PATH] [--show-zero-branches]
//! cohist dump --builtin NAME
//! cohist list
//! ```
//!
//! Exit status is 0 when every check passes, 1 when a check fails and 2 for
//! any input problem (bad flags, unreadable or invalid documents, unknown
//! built-ins).

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cohist_core::document::ParseError;
use cohist_core::report::{analyze, AnalysisOptions};
use cohist_core::scenarios::{builtin, builtin_document, BUILTINS};
use cohist_core::{Scenario, DEFAULT_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "cohist",
    version,
    about = "Consistent-histories analysis of interferometer scenarios"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analyze a scenario and evaluate its checks.
    Run(RunArgs),
    /// Print a built-in scenario as a JSON document.
    Dump {
        #[arg(long, value_name = "NAME")]
        builtin: String,
    },
    /// List the built-in scenarios.
    List,
}

#[derive(Args, Debug)]
#[group(id = "source", required = true, multiple = false)]
struct Source {
    /// Name of a built-in scenario (see `cohist list`).
    #[arg(long, value_name = "NAME", group = "source")]
    builtin: Option<String>,
    /// Path to a JSON scenario document.
    #[arg(long, value_name = "PATH", group = "source")]
    file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    /// Report format on standard output.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    report: Format,
    /// Consistency tolerance on off-diagonal decoherence entries.
    #[arg(long, default_value_t = DEFAULT_TOL, value_parser = parse_tol)]
    tol: f64,
    /// Also write the JSON report to this file.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Include branches whose probability is below 1e-12.
    #[arg(long)]
    show_zero_branches: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let tol: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if tol.is_finite() && tol >= 0.0 {
        Ok(tol)
    } else {
        Err("tolerance must be a finite non-negative number".into())
    }
}

enum Failure {
    UnknownScenario(String),
    Unreadable(PathBuf, std::io::Error),
    Invalid(String, ParseError),
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::UnknownScenario(name) => {
                write!(
                    f,
                    "unknown scenario `{name}` (available: {})",
                    BUILTINS.join(", ")
                )
            }
            Failure::Unreadable(path, e) => write!(f, "cannot read {}: {e}", path.display()),
            Failure::Invalid(origin, e) => write!(f, "{origin}: {e}"),
        }
    }
}

fn load(source: &Source) -> Result<Scenario, Failure> {
    if let Some(name) = &source.builtin {
        return builtin(name).ok_or_else(|| Failure::UnknownScenario(name.clone()));
    }
    let path = source.file.as_ref().expect("clap requires one source");
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Unreadable(path.clone(), e))?;
    Scenario::from_json(&text).map_err(|e| Failure::Invalid(path.display().to_string(), e))
}

fn run_analysis(args: &RunArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let scenario = match load(&args.source) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let report = analyze(
        &scenario,
        AnalysisOptions {
            tol: args.tol,
            show_zero_branches: args.show_zero_branches,
        },
    );
    let written = match args.report {
        Format::Text => stdout.write_all(report.render_text().as_bytes()),
        Format::Json => writeln!(stdout, "{}", report.to_json()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: cannot write report: {e}");
        return EXIT_INPUT;
    }
    if let Some(path) = &args.out {
        if let Err(e) = std::fs::write(path, report.to_json() + "\n") {
            let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
            return EXIT_INPUT;
        }
    }
    if report.all_passed {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

/// Run with explicit arguments (including the program name) and streams.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(rendered.as_bytes())
            } else {
                stdout.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match cli.command {
        Command::Run(args) => run_analysis(&args, stdout, stderr),
        Command::Dump { builtin } => match builtin_document(&builtin) {
            Some(doc) => {
                let _ = writeln!(stdout, "{}", doc.to_json());
                EXIT_OK
            }
            None => {
                let _ = writeln!(stderr, "error: {}", Failure::UnknownScenario(builtin));
                EXIT_INPUT
            }
        },
        Command::List => {
            for name in BUILTINS {
                let doc = builtin_document(name).expect("listed");
                let _ = writeln!(stdout, "{name:<14} {}", doc.description);
            }
            EXIT_OK
        }
    }
}

pub fn run() -> i32 {
    run_with(
        std::env::args_os(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}
