//! `affmod <command> --job <path> [--out <path>] [--seed <n>]`
//!
//! Reads a JSON job, runs one pipeline and writes a JSON report. Exit codes:
//! 0 ok, 1 verification failure, 2 input error, 3 incomplete (a documented
//! heuristic or budget limit was hit).

mod commands;
mod job;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use serde_json::{json, Map, Value};

use crate::commands::Outcome;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "kebab-case")]
pub enum Command {
    Modify,
    StrictTransform,
    Lift,
    Flow,
    Transitivity,
    Rectify,
    Count,
    Gallery,
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Modify => "modify",
            Command::StrictTransform => "strict-transform",
            Command::Lift => "lift",
            Command::Flow => "flow",
            Command::Transitivity => "transitivity",
            Command::Rectify => "rectify",
            Command::Count => "count",
            Command::Gallery => "gallery",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "affmod", version, about = "Affine modifications, automorphism words and rectification")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON job file.
    #[arg(long)]
    job: PathBuf,
    /// Report destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Recorded in the report; every search in the pipelines is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Add wall-clock timing to the report (makes it run-dependent).
    #[arg(long)]
    timing: bool,
}

fn write_report(out: Option<&Path>, report: &Value) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(report).expect("JSON values serialize") + "\n";
    match out {
        Some(p) => std::fs::write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let outcome = commands::run(cli.command, &cli.job);
    let mut report = Map::new();
    report.insert("command".into(), json!(cli.command.name()));
    report.insert("seed".into(), json!(cli.seed));
    let code = match outcome {
        Outcome::Ok(outputs) => {
            report.insert("status".into(), json!("ok"));
            report.insert("outputs".into(), outputs);
            0
        }
        Outcome::VerifyFailed(outputs) => {
            report.insert("status".into(), json!("verify-failed"));
            report.insert("outputs".into(), outputs);
            1
        }
        Outcome::InputError(err) => {
            report.insert("status".into(), json!("input-error"));
            report.insert("error".into(), err);
            2
        }
        Outcome::Incomplete(reason, detail) => {
            report.insert("status".into(), json!(format!("incomplete({reason})")));
            report.insert("error".into(), detail);
            3
        }
    };
    if cli.timing {
        report.insert("timing".into(), json!({ "elapsed_ms": start.elapsed().as_millis() as u64 }));
    }
    if let Err(e) = write_report(cli.out.as_deref(), &Value::Object(report)) {
        eprintln!("affmod: cannot write report: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
