// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

//! `saflite`: run fuzzing campaigns, score mutant batches, evaluate the
//! oracle on labelled logs and compare campaign reports.
//!
//! Exit codes: 0 clean, 2 violations found (`fuzz`), 1 any error.

mod args;
mod commands;
mod input;
mod manifest;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // clap exits with 2 on usage errors, which would read as "violations found".
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Fuzz(a) => commands::fuzz(a),
        Command::EvalLogs(a) => commands::eval_logs(a),
        Command::Score(a) => commands::score(a),
        Command::Compare(a) => commands::compare(a),
        Command::Paired(a) => commands::paired(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::FAILURE
    })
}
