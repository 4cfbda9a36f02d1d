// Copyright 2026 The ioncav Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::dynamics::Regime;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("operation `{op}` is not available in the {regime:?} regime")]
    Regime { op: &'static str, regime: Regime },

    /// A closed-form expression left its domain of validity (log or root
    /// argument not positive).
    #[error("formula validity guard tripped at t = {t}: {detail}")]
    Validity { t: f64, detail: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("index out of range: {0}")]
    Index(String),

    #[error("truncation headroom exceeded: {0}")]
    Headroom(String),

    /// The series tail of the joint assembly does not fall below tolerance
    /// within the allowed number of terms.
    #[error("assembly budget exhausted: tail bound {tail:e} > {tol:e} at cutoff {cutoff}")]
    Budget { tail: f64, tol: f64, cutoff: usize },

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("integrator failed to converge: step-halving deviation {deviation:e} at t = {t}")]
    NonConvergence { t: f64, deviation: f64 },

    #[error("trace drift {drift:e} exceeds limit at t = {t}")]
    TraceDrift { t: f64, drift: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
