// Copyright 2026 The ioncav Authors
// SPDX-License-Identifier: Apache-2.0

//! Damped two-mode dynamics of a trapped ion coupled to a lossy cavity.
//!
//! The cavity mode `a` and the ion's vibrational mode `b` interact through
//! a beam-splitter term of strength `Ω₁` and a parametric term of strength
//! `Ω₂`, while the cavity decays at rate `γ`. Starting from coherent
//! states, every reduced state stays a displaced squeezed thermal state
//! whose parameters follow from three scalar envelopes `f`, `g`, `h`.
//!
//! - [`dynamics`]: rate parameters, regimes and the envelopes.
//! - [`observables`]: squeezing parameters, revival times, displacements
//!   and quadrature variances in closed form.
//! - [`fock`]: the same states as matrices on truncated Fock spaces.
//! - [`oracle`]: brute-force integration of the master equation.

pub mod dynamics;
pub mod error;
pub mod fock;
pub mod observables;
pub mod oracle;

pub use dynamics::{classify_regime, envelope, from_lab_params, CouplingParams, Regime};
pub use error::{Error, Result};
pub use observables::{ModeLabel, QuadTuple};
