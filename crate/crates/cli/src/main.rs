//! `matsuo`: build Matsuo algebras, compute derivations, classify lines and
//! run the verification suites, with text, JSON or CSV reports.
//!
//! Exit codes: 0 when every check passes, 1 when a mathematical check fails,
//! 2 on usage errors.

mod commands;
mod report;
mod suites;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use report::{Check, RunReport, Status, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Library(#[from] matsuo_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Parser)]
#[command(name = "matsuo", version, about = "Exact experiments on Matsuo algebras of 3-transposition groups")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Field descriptor: Q, Fp:<p>, F<p>, Q(sqrt:<d>), Fp:<p>(sqrt:<d>).
    #[arg(long, global = true, default_value = "Q")]
    pub field: String,
    /// Matsuo parameter eta, as an element of the field.
    #[arg(long, global = true, default_value = "1/2")]
    pub eta: String,
    /// Emit the report as JSON.
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Emit the report's table as CSV.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SystemChoice {
    Leibniz,
    R,
    Both,
}

impl SystemChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            SystemChoice::Leibniz => "leibniz",
            SystemChoice::R => "r",
            SystemChoice::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    All,
    Fusion,
    Equivalence,
    Model,
    Torus,
    Section,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Construct the Fischer space and Matsuo algebra and summarize them.
    Build { group: String },
    /// Compute the derivation algebra.
    Derive {
        group: String,
        #[arg(long, value_enum, default_value = "both")]
        system: SystemChoice,
    },
    /// Near-solid classification of the lines of the Fischer space.
    #[command(name = "classify-lines", alias = "classify")]
    Classify { group: String },
    /// Run verification suites.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Groups for the fusion and equivalence suites (default: catalog).
        #[arg(long = "group")]
        groups: Vec<String>,
        /// Root system types for the model, torus and section suites.
        #[arg(long = "type")]
        types: Vec<String>,
    },
    /// Model-B isomorphism, torus and section checks for one root system type.
    VerifyModel {
        #[arg(long = "type")]
        ty: String,
    },
    /// Structure constants of the Matsuo algebra.
    Export { group: String },
}

fn verify(suite: Suite, groups: Vec<String>, types: Vec<String>, common: &Common) -> Result<RunReport, CliError> {
    let field = commands::parse_field(&common.field)?;
    let groups = if groups.is_empty() {
        suites::CATALOG.iter().map(|s| s.to_string()).collect()
    } else {
        groups
    };
    let types = if types.is_empty() {
        suites::MODEL_TYPES.iter().map(|s| s.to_string()).collect()
    } else {
        types
    };
    let sqrt3 = suites::has_sqrt3(&field);
    let needs_sqrt3 = |name: &str| -> Result<bool, CliError> {
        match (sqrt3, suite) {
            (true, _) => Ok(true),
            (false, Suite::All) => Ok(false),
            (false, _) => Err(CliError::Usage(format!(
                "the {name} suite needs a square root of 3, which {field} lacks; try Q(sqrt:3) or F13"
            ))),
        }
    };
    let mut checks: Vec<Check> = Vec::new();
    let runs = |s: Suite| suite == Suite::All || suite == s;
    if runs(Suite::Fusion) {
        checks.extend(suites::fusion(&groups, &field)?);
    }
    if runs(Suite::Equivalence) {
        checks.extend(suites::equivalence(&groups, &field, common.seed)?);
    }
    for (s, name) in [(Suite::Model, "model"), (Suite::Torus, "torus")] {
        if !runs(s) {
            continue;
        }
        if needs_sqrt3(name)? {
            checks.extend(match s {
                Suite::Model => suites::model(&types, &field)?,
                _ => suites::torus(&types, &field, common.seed)?,
            });
        } else {
            checks.push(Check::skip(name, "all", "-", format!("3 is not a square in {field}")));
        }
    }
    if runs(Suite::Section) {
        checks.extend(suites::section(&types, &field)?);
    }
    Ok(ledger_report("verify", checks, &field.to_string(), common))
}

fn verify_model(ty: &str, common: &Common) -> Result<RunReport, CliError> {
    let field = commands::parse_field(&common.field)?;
    if !suites::has_sqrt3(&field) {
        return Err(CliError::Usage(format!(
            "model B needs a square root of 3, which {field} lacks; try Q(sqrt:3) or F13"
        )));
    }
    let types = vec![ty.to_string()];
    let mut checks = suites::model(&types, &field)?;
    checks.retain(|c| c.instance.starts_with("3W:"));
    checks.extend(suites::torus(&types, &field, common.seed)?);
    checks.extend(suites::section(&types, &field)?);
    let mut r = ledger_report("verify-model", checks, &field.to_string(), common);
    r.group = Some(format!("3W:{ty}"));
    Ok(r)
}

fn ledger_report(command: &str, checks: Vec<Check>, field: &str, common: &Common) -> RunReport {
    let mut r = RunReport::new(command, common.seed);
    r.field = Some(field.to_string());
    let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
    let (pass, fail, skip) = (count(Status::Pass), count(Status::Fail), count(Status::Skip));
    r.passed = fail == 0;
    r.line("passed", pass);
    r.line("failed", fail);
    r.line("skipped", skip);
    r.table = Table::ledger(&checks);
    r.results = json!({ "checks": checks, "passed": pass, "failed": fail, "skipped": skip });
    r
}

fn configure_threads() {
    if let Some(n) = std::env::var("MATSUO_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn run(cli: Cli) -> Result<RunReport, CliError> {
    let common = &cli.common;
    match cli.command {
        Command::Build { group } => commands::build(&group, common),
        Command::Derive { group, system } => commands::derive(&group, system, common),
        Command::Classify { group } => commands::classify(&group, common),
        Command::Verify { suite, groups, types } => verify(suite, groups, types, common),
        Command::VerifyModel { ty } => verify_model(&ty, common),
        Command::Export { group } => commands::export(&group, common),
    }
}

fn emit(report: &RunReport, common: &Common) -> Result<(), CliError> {
    let text = if common.json {
        report.to_json()
    } else if common.csv {
        report.to_csv()
    } else {
        report.to_text()
    };
    match &common.out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let common = cli.common.clone();
    let start = Instant::now();
    let result = run(cli).and_then(|mut report| {
        if common.timing {
            report.duration_ms = Some(start.elapsed().as_millis());
        }
        emit(&report, &common)?;
        Ok(report.passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
