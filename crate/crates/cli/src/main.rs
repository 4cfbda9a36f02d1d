// Copyright 2026 The ioncav Authors
// SPDX-License-Identifier: Apache-2.0

//! `ioncav`: time series, revival reports and oracle validation for the
//! damped cavity-ion system.
//!
//! Exit codes: 0 success, 1 validation breach, 2 invalid configuration,
//! 3 formula validity guard, 4 no revivals in the requested regime.

mod commands;
mod config;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Overrides;

pub const EXIT_BREACH: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_VALIDITY: u8 = 3;
pub const EXIT_NO_REVIVALS: u8 = 4;

/// A failure with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(EXIT_CONFIG, message)
    }
}

#[derive(Debug, Parser)]
#[command(name = "ioncav", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Variances, squeezed-thermal parameters and envelopes over the time grid (CSV).
    Simulate(Overrides),
    /// Revival times up to t_max and the envelope residuals there.
    Revivals(Overrides),
    /// Closed-form joint state against direct integration at t = 0.5, 1, 2, 4.
    Validate(Overrides),
    /// Vibrational ΔX² at t = 1, 5, 10 against Ω₂/Ω₁ in [0.1, 1.5] (CSV).
    SweepRatio(Overrides),
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let (overrides, cmd): (&Overrides, fn(&_, &mut dyn Write) -> _) = match &cli.command {
        Command::Simulate(o) => (o, commands::simulate),
        Command::Revivals(o) => (o, commands::revivals),
        Command::Validate(o) => (o, commands::validate),
        Command::SweepRatio(o) => (o, commands::sweep_ratio),
    };
    let cfg = overrides.resolve()?;
    cmd(&cfg, out)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
