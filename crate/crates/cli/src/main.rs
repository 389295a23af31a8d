//! `tol`: run, format, lower and cost ToLang programs; run and audit the ONNX library.

mod args;
mod commands;

use std::io::IsTerminal;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use args::Cli;

/// Exit status for a golden table that no longer matches its checked-in copy.
pub const EXIT_DRIFT: u8 = 5;

pub enum Failure {
    Tol(tol::Error),
    Drift,
    NotEquivalent(String),
}

impl From<tol::Error> for Failure {
    fn from(e: tol::Error) -> Self {
        Failure::Tol(e)
    }
}

fn color_enabled() -> bool {
    match std::env::var("TOL_COLOR").as_deref() {
        Ok("0") => false,
        Ok("1") => true,
        _ => std::io::stderr().is_terminal(),
    }
}

fn span_of(e: &tol::Error) -> Option<tol::Span> {
    match e {
        tol::Error::Lex { span, .. } | tol::Error::Parse { span, .. } | tol::Error::UnboundName { span, .. } => Some(*span),
        tol::Error::StarOutsideIterator(span) => Some(*span),
        _ => None,
    }
}

fn report(e: &tol::Error) -> u8 {
    let code = e.exit_code();
    let (red, reset) = if color_enabled() { ("\x1b[31m", "\x1b[0m") } else { ("", "") };
    eprintln!("{red}error{reset}: {e}");
    let mut doc = json!({"error": {"kind": e.kind(), "code": code, "message": e.to_string()}});
    if let Some(s) = span_of(e) {
        doc["error"]["span"] = json!({"line": s.line, "col": s.col, "len": s.len});
    }
    eprintln!("{doc}");
    code as u8
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Tol(e)) => ExitCode::from(report(&e)),
        Err(Failure::Drift) => ExitCode::from(EXIT_DRIFT),
        Err(Failure::NotEquivalent(msg)) => {
            eprintln!("{}", json!({"error": {"kind": "CheckFailed", "code": 3, "message": msg}}));
            ExitCode::from(3)
        }
    }
}
