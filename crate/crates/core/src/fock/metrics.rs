// Copyright 2026 The ioncav Authors
// SPDX-License-Identifier: Apache-2.0

//! Partial traces, distances between states and quadrature moments.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::{ladder, CMatrix, CVector, Dims, FockDensity, TOL_PSD};
use crate::error::{Error, Result};
use crate::observables::{ModeLabel, QuadTuple};

/// Reduced state of the `keep` mode.
pub fn partial_trace(joint: &FockDensity, keep: ModeLabel) -> Result<FockDensity> {
    let Dims::Joint(nc, nv) = joint.dims() else {
        return Err(Error::Index("partial trace needs a joint density".into()));
    };
    let rho = joint.matrix();
    let out = match keep {
        ModeLabel::Cavity => CMatrix::from_fn(nc, nc, |i, k| {
            (0..nv).map(|j| rho[(i * nv + j, k * nv + j)]).sum()
        }),
        ModeLabel::Vibration => CMatrix::from_fn(nv, nv, |j, l| {
            (0..nc).map(|i| rho[(i * nv + j, i * nv + l)]).sum()
        }),
    };
    FockDensity::single(out)
}

/// Fidelity, trace distance and purity of a pair of states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateMetrics {
    /// `(tr |√ρ √σ|)²`
    pub fidelity: f64,
    /// `½ Σ |eig(ρ − σ)|`
    pub trace_distance: f64,
    /// `tr ρ²`
    pub purity: f64,
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// PSD square root; eigenvalues in `[−TOL_PSD, 0)` are clamped to zero.
fn psd_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let eig = hermitian_part(m).symmetric_eigen();
    let min = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min < -TOL_PSD {
        return Err(Error::NotPsd(min));
    }
    let roots = eig
        .eigenvalues
        .map(|l| Complex64::new(l.max(0.0).sqrt(), 0.0));
    let v = &eig.eigenvectors;
    Ok(v * CMatrix::from_diagonal(&roots) * v.adjoint())
}

/// Uhlmann fidelity, trace distance and the purity of `rho`.
///
/// The fidelity is evaluated as the squared nuclear norm of `√ρ √σ`,
/// which avoids taking square roots of the small eigenvalues of
/// `√ρ σ √ρ`.
pub fn state_metrics(rho: &FockDensity, sigma: &FockDensity) -> Result<StateMetrics> {
    if rho.dims() != sigma.dims() {
        return Err(Error::Dimension {
            expected: rho.dims().total(),
            found: sigma.dims().total(),
        });
    }
    let sr = psd_sqrt(rho.matrix())?;
    let ss = psd_sqrt(sigma.matrix())?;
    let nuclear: f64 = (&sr * &ss).singular_values().iter().sum();
    let diff = hermitian_part(&(rho.matrix() - sigma.matrix()));
    let trace_distance = 0.5
        * diff
            .symmetric_eigenvalues()
            .iter()
            .map(|l| l.abs())
            .sum::<f64>();
    Ok(StateMetrics {
        fidelity: nuclear * nuclear,
        trace_distance,
        purity: rho.purity(),
    })
}

/// `⟨ψ|ρ|ψ⟩`, the fidelity with a pure reference.
pub fn fidelity_with_ket(rho: &FockDensity, psi: &CVector) -> Result<f64> {
    if psi.len() != rho.dims().total() {
        return Err(Error::Dimension {
            expected: rho.dims().total(),
            found: psi.len(),
        });
    }
    Ok((psi.adjoint() * rho.matrix() * psi)[(0, 0)].re)
}

/// Means and variances of `X = (a + a†)/√2` and `P = (a − a†)/(i√2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeQuad {
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub var_p: f64,
}

/// `X`, `P`, `X²`, `P²` on `n` levels. The squares are formed one level
/// larger and cropped so that the top diagonal entry is exact.
fn quadrature_ops(n: usize) -> Result<[CMatrix; 4]> {
    let a = ladder(n + 1)?.into_matrix();
    let ad = a.adjoint();
    let x = (&a + &ad).scale(FRAC_1_SQRT_2);
    let p = (&a - &ad) * Complex64::new(0.0, -FRAC_1_SQRT_2);
    let crop = |m: &CMatrix| m.view((0, 0), (n, n)).into_owned();
    Ok([crop(&x), crop(&p), crop(&(&x * &x)), crop(&(&p * &p))])
}

fn expect(rho: &CMatrix, op: &CMatrix) -> f64 {
    // tr(ρ O) = Σ_ij ρ_ij O_ji
    rho.iter()
        .zip(op.transpose().iter())
        .map(|(r, o)| r * o)
        .sum::<Complex64>()
        .re
}

/// Quadrature moments of a single-mode state.
pub fn quad_stats_single(rho: &FockDensity) -> Result<ModeQuad> {
    let Dims::Single(n) = rho.dims() else {
        return Err(Error::Index(
            "single-mode statistics need a single-mode density".into(),
        ));
    };
    let [x, p, x2, p2] = quadrature_ops(n)?;
    let m = rho.matrix();
    let mean_x = expect(m, &x);
    let mean_p = expect(m, &p);
    Ok(ModeQuad {
        mean_x,
        mean_p,
        var_x: expect(m, &x2) - mean_x * mean_x,
        var_p: expect(m, &p2) - mean_p * mean_p,
    })
}

/// Quadrature moments of both modes of a joint state.
pub fn quad_stats(rho: &FockDensity) -> Result<QuadTuple> {
    let c = quad_stats_single(&partial_trace(rho, ModeLabel::Cavity)?)?;
    let v = quad_stats_single(&partial_trace(rho, ModeLabel::Vibration)?)?;
    Ok(QuadTuple {
        var_xc: c.var_x,
        var_pc: c.var_p,
        var_xv: v.var_x,
        var_pv: v.var_p,
        mean_xc: c.mean_x,
        mean_pc: c.mean_p,
        mean_xv: v.mean_x,
        mean_pv: v.mean_p,
    })
}
