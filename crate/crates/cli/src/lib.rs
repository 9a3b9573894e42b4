//! The `toposcalc` command-line tool: a small language for finite sites,
//! presheaves and maps, and commands that report on them.

pub mod commands;
pub mod dsl;
pub mod report;
pub mod suites;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use thiserror::Error;
use toposcalc_core::Theta;

use commands::{Command, Context, FactorKind};
use dsl::{DslError, ParseOptions};
use report::{Format, Report};
use suites::Suite;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Input(#[from] DslError),
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Parser)]
#[command(name = "toposcalc", version, about = "Topologies, sheaves and forcing on finite sites")]
pub struct Cli {
    /// Site document.
    pub site: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Require the coverage block to be a topology as written.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Complete missing composites by path rewriting.
    #[arg(long, global = true)]
    pub free_compose: bool,
    /// Include wall-clock timing in the report.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Every Grothendieck topology on the site.
    EnumerateTopologies,
    /// The sieves on each object.
    Omega,
    /// Sheafify a named presheaf for the document's topology.
    Sheafify {
        #[arg(long)]
        presheaf: String,
    },
    /// Factor a named map for the document's topology.
    Factor {
        #[arg(long)]
        map: String,
        #[arg(long, value_enum)]
        kind: FactorKind,
    },
    /// Compile a forcing condition.
    Force {
        /// File of extra presheaf and map blocks; defaults to the document's maps.
        #[arg(long)]
        sigma: Option<PathBuf>,
        /// iso, surj, mono, conn:<n> or conn:inf.
        #[arg(long)]
        theta: Theta,
    },
    /// Run a named check suite on the site.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
    },
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERDICT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

/// Parses, runs and renders; returns the report and any notes.
pub fn execute(cli: &Cli, args: &[String]) -> Result<(Report, Vec<String>), CliError> {
    let start = Instant::now();
    let text = read(&cli.site)?;
    let doc = dsl::parse(&text, ParseOptions { free_compose: cli.free_compose })?;
    let mut inputs: Vec<(String, Vec<u8>)> = vec![("args".into(), args.join("\u{0}").into_bytes())];
    inputs.push(("site".into(), text.into_bytes()));
    let command = match &cli.command {
        Cmd::EnumerateTopologies => Command::EnumerateTopologies,
        Cmd::Omega => Command::Omega,
        Cmd::Sheafify { presheaf } => Command::Sheafify { presheaf: presheaf.clone() },
        Cmd::Factor { map, kind } => Command::Factor { map: map.clone(), kind: *kind },
        Cmd::Force { sigma, theta } => {
            let sigma = match sigma {
                Some(path) => {
                    let text = read(path)?;
                    let maps = dsl::parse_maps(&text, &doc)?;
                    inputs.push(("sigma".into(), text.into_bytes()));
                    Some(maps.into_iter().map(|m| (m.name, m.map)).collect())
                }
                None => None,
            };
            Command::Force { sigma, theta: *theta }
        }
        Cmd::Verify { suite } => Command::Verify { suite: *suite },
    };
    let outcome = commands::run(&command, &Context { doc: &doc, strict: cli.strict })?;
    let digest = report::digest(inputs.iter().map(|(n, b)| (n.as_str(), b.as_slice())));
    let report = Report {
        command: command.name().into(),
        digest,
        results: outcome.results,
        verdict: outcome.verdict,
        dot: outcome.dot,
        timing_ms: cli.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    };
    Ok((report, outcome.notes))
}

pub fn exit_code(report: &Report) -> i32 {
    if report.verdict {
        EXIT_OK
    } else {
        EXIT_VERDICT
    }
}

/// Runs the tool on `args` (including the program name) and returns the
/// exit code.
pub fn main_with(args: impl IntoIterator<Item = OsString>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let args: Vec<OsString> = args.into_iter().collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    // Input paths are left out of the digest, which covers file contents.
    let paths: Vec<String> = match &cli.command {
        Cmd::Force { sigma: Some(p), .. } => vec![cli.site.to_string_lossy().into(), p.to_string_lossy().into()],
        _ => vec![cli.site.to_string_lossy().into()],
    };
    let digest_args: Vec<String> = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .filter(|a| !paths.contains(a) && a != "--timing")
        .collect();
    match execute(&cli, &digest_args) {
        Ok((report, notes)) => {
            for n in notes {
                let _ = writeln!(err, "note: {n}");
            }
            match report.render(cli.format) {
                Some(text) => {
                    let _ = out.write_all(text.as_bytes());
                }
                None => {
                    let _ = writeln!(err, "error: `{}` has no dot rendering", report.command);
                    return EXIT_INPUT;
                }
            }
            exit_code(&report)
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}
