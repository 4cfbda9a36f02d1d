// Copyright 2026 The ioncav Authors
// SPDX-License-Identifier: Apache-2.0

//! Run configuration: built-in defaults, then a TOML file, then flags.
//!
//! Rates are accepted in any unit and rescaled so that `Ω₁ = 1`; every
//! time (`t_max`, `t_step`, `dt_int`) is read as `Ω₁t`.

use std::path::{Path, PathBuf};

use clap::Args;
use ioncav::dynamics::{classify_regime, CouplingParams};
use num_complex::Complex64;
use serde::Deserialize;

use crate::CliError;

/// Largest number of rows a time grid may have.
const MAX_GRID: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub omega1: f64,
    pub omega2: f64,
    pub gamma: f64,
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub beta_re: f64,
    pub beta_im: f64,
    pub nc: usize,
    pub nv: usize,
    pub t_max: f64,
    pub t_step: f64,
    pub dt_int: f64,
    pub series_tol: f64,
    /// Each command that writes a file has its own default name.
    pub out_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            omega1: 1.0,
            omega2: 0.6,
            gamma: 0.4,
            alpha_re: 0.0,
            alpha_im: 0.0,
            beta_re: 0.0,
            beta_im: 0.0,
            nc: 15,
            nv: 15,
            t_max: 25.0,
            t_step: 0.01,
            dt_int: 1e-3,
            series_tol: 1e-12,
            out_path: None,
        }
    }
}

/// `--config` plus one optional flag per [`RunConfig`] field.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// TOML file with any subset of the fields below.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub omega1: Option<f64>,
    #[arg(long)]
    pub omega2: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long = "alpha_re", allow_negative_numbers = true)]
    pub alpha_re: Option<f64>,
    #[arg(long = "alpha_im", allow_negative_numbers = true)]
    pub alpha_im: Option<f64>,
    #[arg(long = "beta_re", allow_negative_numbers = true)]
    pub beta_re: Option<f64>,
    #[arg(long = "beta_im", allow_negative_numbers = true)]
    pub beta_im: Option<f64>,
    #[arg(long)]
    pub nc: Option<usize>,
    #[arg(long)]
    pub nv: Option<usize>,
    #[arg(long = "t_max")]
    pub t_max: Option<f64>,
    #[arg(long = "t_step")]
    pub t_step: Option<f64>,
    #[arg(long = "dt_int")]
    pub dt_int: Option<f64>,
    #[arg(long = "series_tol")]
    pub series_tol: Option<f64>,
    #[arg(long = "out_path", value_name = "PATH")]
    pub out_path: Option<PathBuf>,
}

impl Overrides {
    /// Defaults, overlaid with the file and then with the flags, then
    /// validated.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        macro_rules! overlay {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field { cfg.$field = v; })*
            };
        }
        overlay!(
            omega1, omega2, gamma, alpha_re, alpha_im, beta_re, beta_im, nc, nv, t_max, t_step,
            dt_int, series_tol
        );
        if let Some(p) = &self.out_path {
            cfg.out_path = Some(p.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn invalid(field: &str, value: impl std::fmt::Display, reason: &str) -> CliError {
    CliError::config(format!("invalid {field} = {value}: {reason}"))
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::config(format!("cannot parse {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params()?;
        for (name, v) in [
            ("alpha_re", self.alpha_re),
            ("alpha_im", self.alpha_im),
            ("beta_re", self.beta_re),
            ("beta_im", self.beta_im),
        ] {
            if !v.is_finite() {
                return Err(invalid(name, v, "must be finite"));
            }
        }
        for (name, n) in [("nc", self.nc), ("nv", self.nv)] {
            if n < 2 {
                return Err(invalid(name, n, "needs at least 2 levels"));
            }
        }
        if !(self.t_max >= 0.0) || !self.t_max.is_finite() {
            return Err(invalid(
                "t_max",
                self.t_max,
                "must be finite and non-negative",
            ));
        }
        if !(self.t_step > 0.0) || !self.t_step.is_finite() {
            return Err(invalid("t_step", self.t_step, "must be positive"));
        }
        if self.t_max / self.t_step > MAX_GRID {
            return Err(invalid("t_step", self.t_step, "grid has too many points"));
        }
        if !(self.dt_int > 0.0) || !self.dt_int.is_finite() {
            return Err(invalid("dt_int", self.dt_int, "must be positive"));
        }
        if !(self.series_tol > 0.0 && self.series_tol < 1.0) {
            return Err(invalid("series_tol", self.series_tol, "must lie in (0, 1)"));
        }
        Ok(())
    }

    /// Rates in units of `Ω₁`.
    pub fn params(&self) -> Result<CouplingParams, CliError> {
        classify_regime(self.omega1, self.omega2, self.gamma)
            .map(|p| p.normalized())
            .map_err(|e| CliError::config(e.to_string()))
    }

    pub fn amplitudes(&self) -> (Complex64, Complex64) {
        (
            Complex64::new(self.alpha_re, self.alpha_im),
            Complex64::new(self.beta_re, self.beta_im),
        )
    }

    /// `0, t_step, 2 t_step, …` up to `t_max`.
    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        let n = (self.t_max / self.t_step + 1e-9).floor() as usize;
        (0..=n).map(move |i| i as f64 * self.t_step)
    }

    pub fn out_path_or(&self, default: &str) -> PathBuf {
        self.out_path
            .clone()
            .unwrap_or_else(|| PathBuf::from(default))
    }
}
