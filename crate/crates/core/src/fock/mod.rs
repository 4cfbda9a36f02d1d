// Copyright 2026 The ioncav Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense operators on truncated Fock spaces.
//!
//! A single mode keeps the number states `|0⟩ … |N−1⟩`. Joint two-mode
//! operators use the tensor-product basis with the cavity index major,
//! `|i⟩_c |j⟩_v ↦ i·N_v + j`, which is the layout produced by
//! [`nalgebra::Matrix::kronecker`] with the cavity factor on the left.

mod assembly;
mod families;
mod metrics;
mod special;

pub use assembly::{
    assemble_joint_density, default_truncation, lossless_ket, reduced_density,
    squeezed_thermal_density, two_mode_kernel, work_dim, AssembledState, AssemblyBudget, KetState,
    MAX_SERIES_ORDER,
};
pub use families::{q_operator, r_operator, raise_superop};
pub use metrics::{
    fidelity_with_ket, partial_trace, quad_stats, quad_stats_single, state_metrics, ModeQuad,
    StateMetrics,
};
pub use special::{c_coefficient, jacobi_poly, ln_factorial};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Eigenvalues below `−TOL_PSD` mark a matrix as not positive semidefinite.
pub const TOL_PSD: f64 = 1e-8;

/// Entries of `|α|² + 4|α|` or more levels are needed to hold `D(α)|0⟩`.
fn displacement_coverage(alpha: f64) -> f64 {
    alpha * alpha + 4.0 * alpha
}

/// A square operator on a single truncated mode.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    matrix: CMatrix,
}

impl FockOperator {
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Dimension {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        if matrix.nrows() < 2 {
            return Err(Error::Index(format!(
                "truncation dimension {} < 2",
                matrix.nrows()
            )));
        }
        if matrix
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Index("operator has non-finite entries".into()));
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    /// Leading `dim × dim` block.
    pub fn crop(&self, dim: usize) -> Self {
        let dim = dim.min(self.dim());
        Self {
            matrix: self.matrix.view((0, 0), (dim, dim)).into_owned(),
        }
    }

    /// `self · other · self†`
    pub fn conjugate(&self, other: &CMatrix) -> CMatrix {
        &self.matrix * other * self.matrix.adjoint()
    }
}

/// Basis layout of a density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dims {
    Single(usize),
    /// `(N_c, N_v)`, cavity index major.
    Joint(usize, usize),
}

impl Dims {
    pub fn total(self) -> usize {
        match self {
            Dims::Single(n) => n,
            Dims::Joint(nc, nv) => nc * nv,
        }
    }
}

/// A density matrix (or a trace-class operator with the same layout) on a
/// truncated single-mode or two-mode Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensity {
    dims: Dims,
    matrix: CMatrix,
}

impl FockDensity {
    pub fn new(dims: Dims, matrix: CMatrix) -> Result<Self> {
        let d = dims.total();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::Dimension {
                expected: d,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        if matrix
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Index("density has non-finite entries".into()));
        }
        Ok(Self { dims, matrix })
    }

    pub fn single(matrix: CMatrix) -> Result<Self> {
        Self::new(Dims::Single(matrix.nrows()), matrix)
    }

    /// `|0⟩⟨0|` in the given layout.
    pub fn vacuum(dims: Dims) -> Self {
        let d = dims.total();
        let mut matrix = CMatrix::zeros(d, d);
        matrix[(0, 0)] = Complex64::new(1.0, 0.0);
        Self { dims, matrix }
    }

    pub fn from_ket(dims: Dims, ket: &CVector) -> Result<Self> {
        Self::new(dims, ket * ket.adjoint())
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// `max |ρ − ρ†|`
    pub fn hermiticity_error(&self) -> f64 {
        let m = &self.matrix;
        let n = m.nrows();
        let mut worst = 0.0f64;
        for c in 0..n {
            for r in 0..=c {
                worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.matrix + self.matrix.adjoint()).scale(0.5);
        let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn purity(&self) -> f64 {
        // tr ρ² = Σ |ρ_ij|² for Hermitian ρ
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `ρ_c ⊗ ρ_v` from two single-mode states.
    pub fn tensor(cavity: &FockDensity, vibration: &FockDensity) -> Result<Self> {
        match (cavity.dims, vibration.dims) {
            (Dims::Single(nc), Dims::Single(nv)) => Ok(Self {
                dims: Dims::Joint(nc, nv),
                matrix: cavity.matrix.kronecker(&vibration.matrix),
            }),
            (d, _) => Err(Error::Dimension {
                expected: 1,
                found: if matches!(d, Dims::Joint(..)) { 2 } else { 1 },
            }),
        }
    }

    /// Checks hermiticity, positivity within [`TOL_PSD`] and a trace within
    /// `tol_trace` of one.
    pub fn validate(&self, tol_trace: f64) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > 1e-10 {
            return Err(Error::Index(format!(
                "density not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > tol_trace || tr.im.abs() > 1e-10 {
            return Err(Error::Index(format!(
                "trace {tr} outside tolerance {tol_trace:e}"
            )));
        }
        let min = self.eigenvalues()[0];
        if min < -TOL_PSD {
            return Err(Error::NotPsd(min));
        }
        Ok(())
    }
}

/// Annihilation operator, `a|n⟩ = √n |n−1⟩`.
pub fn ladder(dim: usize) -> Result<FockOperator> {
    if dim < 2 {
        return Err(Error::Index(format!("truncation dimension {dim} < 2")));
    }
    let mut m = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        m[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    Ok(FockOperator { matrix: m })
}

/// `D(α) = exp(α a† − α* a)` on `dim` levels.
///
/// The exponential of the truncated generator is exactly unitary but only
/// approximates the true displacement near the truncation edge. A warning
/// is logged when `|α|² + 4|α| ≥ dim`.
pub fn displacement_op(alpha: Complex64, dim: usize) -> Result<FockOperator> {
    let a = ladder(dim)?;
    if displacement_coverage(alpha.norm()) >= dim as f64 {
        log::warn!(
            "displacement |α| = {} poorly covered by {dim} levels",
            alpha.norm()
        );
    }
    let generator = a.matrix.adjoint() * alpha - &a.matrix * alpha.conj();
    Ok(FockOperator {
        matrix: generator.exp(),
    })
}

/// `S(ξ) = exp((ξ/2)(a² − a†²))` for real `ξ`. Positive `ξ` squeezes `X`.
pub fn squeeze_op(xi: f64, dim: usize) -> Result<FockOperator> {
    let a = ladder(dim)?;
    if (2.0 * xi.abs()).exp() * 4.0 >= dim as f64 {
        log::warn!("squeeze ξ = {xi} poorly covered by {dim} levels");
    }
    let a2 = &a.matrix * &a.matrix;
    let generator = (&a2 - a2.adjoint()).scale(0.5 * xi);
    Ok(FockOperator {
        matrix: generator.exp(),
    })
}

/// Thermal state with mean occupation `n̄`, `p_k = n̄^k/(n̄+1)^{k+1}`,
/// truncated to `dim` levels. The missing weight is
/// [`thermal_trace_deficit`].
pub fn thermal_state(n_bar: f64, dim: usize) -> Result<FockDensity> {
    if !(n_bar >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "n_bar",
            value: n_bar,
            reason: "mean occupation must be non-negative",
        });
    }
    let ratio = n_bar / (n_bar + 1.0);
    let mut m = CMatrix::zeros(dim, dim);
    let mut p = 1.0 / (n_bar + 1.0);
    for k in 0..dim {
        m[(k, k)] = Complex64::new(p, 0.0);
        p *= ratio;
    }
    FockDensity::new(Dims::Single(dim), m)
}

/// `(n̄/(n̄+1))^N`, the thermal weight above the truncation.
pub fn thermal_trace_deficit(n_bar: f64, dim: usize) -> f64 {
    (n_bar / (n_bar + 1.0)).powi(dim as i32)
}

/// `|n⟩` on `dim` levels.
pub fn number_ket(n: usize, dim: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[n] = Complex64::new(1.0, 0.0);
    v
}
