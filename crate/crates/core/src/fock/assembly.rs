// Copyright 2026 The ioncav Authors
// SPDX-License-Identifier: Apache-2.0

//! Matrix forms of the closed-form states.
//!
//! Squeeze and displacement operators are exponentials of truncated
//! generators and are only faithful away from the truncation edge. Every
//! state here is therefore built on a larger working space
//! ([`work_dim`]) and cropped to the requested dimension at the end.

use std::collections::HashMap;

use num_complex::Complex64;

use super::families::{q_weights, r_operator};
use super::{displacement_op, squeeze_op, thermal_state, CMatrix, CVector, Dims, FockDensity};
use crate::dynamics::{CouplingParams, Regime};
use crate::error::{Error, Result};
use crate::observables::{
    displacement_trajectory, lossless_spec, mode_spec, nbar_max, quad_variances,
    squeezed_thermal_from_variances, steady_squeeze, ModeLabel,
};

/// Highest series order the assembler will evaluate.
pub const MAX_SERIES_ORDER: usize = 60;

/// Working dimension used to build an `n`-level block.
pub fn work_dim(n: usize) -> usize {
    2 * n + 24
}

/// Truncation large enough for the squeezed-thermal tails of either mode:
/// `max(16, ⌈8 (n̄_max + 1) e^{2|ξ̄|}⌉)`. Requires `Ω₁ > Ω₂`.
pub fn default_truncation(params: &CouplingParams) -> Result<usize> {
    let n_max = nbar_max(params)?;
    let xi_bar = steady_squeeze(params)?;
    let n = (8.0 * (n_max + 1.0) * (2.0 * xi_bar.abs()).exp()).ceil() as usize;
    Ok(n.max(16))
}

/// Truncation of the double series and the matrix dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyBudget {
    /// Largest `m + n` kept. `None` starts from the smallest order whose
    /// geometric tail bound is below `series_tol` and continues until the
    /// last order added is itself below `series_tol`.
    pub mn_cutoff: Option<usize>,
    pub series_tol: f64,
    /// `(N_c, N_v)`
    pub dims: (usize, usize),
}

impl AssemblyBudget {
    pub fn new(nc: usize, nv: usize) -> Self {
        Self {
            mn_cutoff: None,
            series_tol: 1e-12,
            dims: (nc, nv),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.series_tol > 0.0) {
            return Err(Error::InvalidParameter {
                name: "series_tol",
                value: self.series_tol,
                reason: "must be positive",
            });
        }
        for n in [self.dims.0, self.dims.1] {
            if n < 2 {
                return Err(Error::Index(format!("truncation dimension {n} < 2")));
            }
        }
        Ok(())
    }

    /// Chosen cutoff and its tail bound `|ζ|^{M+1}/(1 − |ζ|)`.
    fn cutoff(&self, zeta: f64) -> Result<(usize, f64)> {
        let z = zeta.abs();
        let tail = |m: usize| {
            if z == 0.0 {
                0.0
            } else if z >= 1.0 {
                f64::INFINITY
            } else {
                z.powi(m as i32 + 1) / (1.0 - z)
            }
        };
        match self.mn_cutoff {
            Some(m) => {
                let t = tail(m);
                if m > MAX_SERIES_ORDER || !(t <= self.series_tol) {
                    return Err(Error::Budget {
                        tail: t,
                        tol: self.series_tol,
                        cutoff: m,
                    });
                }
                Ok((m, t))
            }
            None => (0..=MAX_SERIES_ORDER)
                .map(|m| (m, tail(m)))
                .find(|(_, t)| *t <= self.series_tol)
                .ok_or(Error::Budget {
                    tail: tail(MAX_SERIES_ORDER),
                    tol: self.series_tol,
                    cutoff: MAX_SERIES_ORDER,
                }),
        }
    }
}

/// An assembled joint state with its truncation diagnostics.
#[derive(Debug, Clone)]
pub struct AssembledState {
    pub density: FockDensity,
    /// `|1 − tr ρ|`, the weight lost to Fock truncation.
    pub trace_deficit: f64,
    pub mn_cutoff: usize,
    /// Larger of the geometric tail `|ζ|^{M+1}/(1 − |ζ|)` and the largest
    /// entry of the last order kept.
    pub tail_bound: f64,
}

/// Rows `0..n` of `D(w) S(ξ)` on the working space.
fn frame(xi: f64, w: Complex64, n: usize, work: usize) -> Result<CMatrix> {
    let s = squeeze_op(xi, work)?;
    let d = displacement_op(w, work)?;
    let ds = d.matrix() * s.matrix();
    Ok(ds.rows(0, n).into_owned())
}

/// `ρ += c · (A ⊗ B)` with the first factor index major.
fn kron_accumulate(rho: &mut CMatrix, c: Complex64, a: &CMatrix, b: &CMatrix) {
    let (na, nb) = (a.nrows(), b.nrows());
    for ac in 0..na {
        for bc in 0..nb {
            let col = ac * nb + bc;
            for ar in 0..na {
                let ca = c * a[(ar, ac)];
                if ca == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let base = ar * nb;
                for br in 0..nb {
                    rho[(base + br, col)] += ca * b[(br, bc)];
                }
            }
        }
    }
}

/// `Q^{m,n}` terms of one mode, conjugated into the cropped frame. Each
/// `R^{a,b}` is shared by all terms of order `a + b` and is built once.
struct ModeFamily {
    n_bar: f64,
    xi: f64,
    work: usize,
    top: CMatrix,
    r_cache: HashMap<(usize, usize), CMatrix>,
}

impl ModeFamily {
    fn new(n_bar: f64, xi: f64, w: Complex64, n: usize) -> Result<Self> {
        let work = work_dim(n);
        Ok(Self {
            n_bar,
            xi,
            work,
            top: frame(xi, w, n, work)?,
            r_cache: HashMap::new(),
        })
    }

    fn term(&mut self, m: usize, n: usize) -> Result<CMatrix> {
        let mut core = CMatrix::zeros(self.work, self.work);
        for (k, c) in q_weights(m, n, self.xi)? {
            let key = (m + n - k, k);
            if !self.r_cache.contains_key(&key) {
                let r = r_operator(key.0, key.1, self.n_bar, self.work)?.into_matrix();
                self.r_cache.insert(key, r);
            }
            core += self.r_cache[&key].scale(c);
        }
        Ok(&self.top * core * self.top.adjoint())
    }
}

/// The joint density at `t` for a coherent start `(α, β)`:
/// `Σ_{m+n ≤ M} ζ^{m+n} Q_c^{m,n} ⊗ Q_v^{m,n}` conjugated by
/// `D_c(u) ⊗ D_v(v)`, with `ζ = f·g`.
///
/// # Errors
///
/// Equal coupling is rejected. [`Error::Budget`] when the series tail
/// cannot be brought below `series_tol`, which happens once `|ζ| ≥ 1`.
pub fn assemble_joint_density(
    params: &CouplingParams,
    t: f64,
    alpha: Complex64,
    beta: Complex64,
    budget: &AssemblyBudget,
) -> Result<AssembledState> {
    budget.validate()?;
    if params.regime == Regime::EqualCoupling {
        return Err(Error::Regime {
            op: "assemble_joint_density",
            regime: params.regime,
        });
    }
    let cav = mode_spec(params, t, ModeLabel::Cavity)?;
    let vib = mode_spec(params, t, ModeLabel::Vibration)?;
    let (start, geometric) = budget.cutoff(cav.zeta)?;
    let (u, v) = displacement_trajectory(params, alpha, beta, t);
    let (nc, nv) = budget.dims;

    let mut fam_c = ModeFamily::new(cav.n_bar, cav.xi, u, nc)?;
    let mut fam_v = ModeFamily::new(vib.n_bar, vib.xi, v, nv)?;
    let mut rho = CMatrix::zeros(nc * nv, nc * nv);
    // contribution of a single order m + n
    let mut slice = rho.clone();
    let peak = |m: &CMatrix| m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut order = 0;
    let (mn_cutoff, tail_bound) = loop {
        let weight = cav.zeta.powi(order as i32);
        let mut size = 0.0;
        if weight != 0.0 {
            slice.fill(Complex64::new(0.0, 0.0));
            for m in 0..=order {
                let n = order - m;
                let qc = fam_c.term(m, n)?;
                let qv = fam_v.term(m, n)?;
                kron_accumulate(&mut slice, Complex64::new(weight, 0.0), &qc, &qv);
            }
            size = peak(&slice);
            rho += &slice;
        }
        // The geometric bound assumes O(1) terms, but the Q^{m,n} grow with
        // the order; an explicit cutoff is taken as given.
        let done = order >= start
            && (budget.mn_cutoff.is_some() || cav.zeta == 0.0 || size <= budget.series_tol);
        if done {
            break (order, geometric.max(size));
        }
        if order == MAX_SERIES_ORDER {
            return Err(Error::Budget {
                tail: size,
                tol: budget.series_tol,
                cutoff: order,
            });
        }
        order += 1;
    };
    let trace_deficit = (1.0 - rho.trace().re).abs();
    log::debug!("assembled t = {t}: order {mn_cutoff}, deficit {trace_deficit:e}");
    Ok(AssembledState {
        density: FockDensity::new(Dims::Joint(nc, nv), rho)?,
        trace_deficit,
        mn_cutoff,
        tail_bound,
    })
}

/// `D(w) S(ξ) ρ_th(n̄) S(ξ)† D(w)†` on `dim` levels.
pub fn squeezed_thermal_density(
    n_bar: f64,
    xi: f64,
    w: Complex64,
    dim: usize,
) -> Result<FockDensity> {
    let work = work_dim(dim);
    let top = frame(xi, w, dim, work)?;
    let th = thermal_state(n_bar, work)?;
    FockDensity::single(&top * th.matrix() * top.adjoint())
}

/// Reduced state of one mode at `t` for a coherent start `(α, β)`.
///
/// In the equal-coupling regime the motion has no squeezed-thermal
/// parameters of its own; they are read off the closed-form variances.
pub fn reduced_density(
    params: &CouplingParams,
    t: f64,
    mode: ModeLabel,
    alpha: Complex64,
    beta: Complex64,
    dim: usize,
) -> Result<FockDensity> {
    let (u, v) = displacement_trajectory(params, alpha, beta, t);
    let w = match mode {
        ModeLabel::Cavity => u,
        ModeLabel::Vibration => v,
    };
    let (n_bar, xi) = if mode == ModeLabel::Vibration && params.regime == Regime::EqualCoupling {
        let q = quad_variances(params, t, alpha, beta);
        squeezed_thermal_from_variances(q.var_xv, q.var_pv)
    } else {
        let spec = mode_spec(params, t, mode)?;
        (spec.n_bar, spec.xi)
    };
    squeezed_thermal_density(n_bar, xi, w, dim)
}

/// A joint state vector with cavity-major indexing.
#[derive(Debug, Clone)]
pub struct KetState {
    pub dims: (usize, usize),
    pub ket: CVector,
    /// `1 − ‖ψ‖²` after cropping.
    pub norm_deficit: f64,
    /// `λ^{2 min(N_c, N_v)}`, the weight of the two-mode kernel above the
    /// truncation.
    pub pair_tail: f64,
}

/// `√(1 − λ²) Σ_k λ^k |k⟩|k⟩` on `nc × nv` levels, as a coefficient matrix.
fn kernel_matrix(ratio: f64, nc: usize, nv: usize) -> CMatrix {
    let norm = (1.0 - ratio * ratio).sqrt();
    let mut psi = CMatrix::zeros(nc, nv);
    let mut amp = norm;
    for k in 0..nc.min(nv) {
        psi[(k, k)] = Complex64::new(amp, 0.0);
        amp *= ratio;
    }
    psi
}

fn flatten(psi: &CMatrix) -> CVector {
    let (nc, nv) = psi.shape();
    CVector::from_fn(nc * nv, |idx, _| psi[(idx / nv, idx % nv)])
}

/// The two-mode squeezed kernel `√(1 − λ²) Σ_k λ^k |kk⟩` truncated at `dims`.
pub fn two_mode_kernel(ratio: f64, dims: (usize, usize)) -> Result<KetState> {
    if !(ratio.abs() < 1.0) {
        return Err(Error::InvalidParameter {
            name: "ratio",
            value: ratio,
            reason: "pair ratio must satisfy |λ| < 1",
        });
    }
    let psi = kernel_matrix(ratio, dims.0, dims.1);
    let ket = flatten(&psi);
    Ok(KetState {
        dims,
        norm_deficit: 1.0 - ket.norm_squared(),
        pair_tail: (ratio * ratio).powi(dims.0.min(dims.1) as i32),
        ket,
    })
}

/// Pure joint state at `t` without cavity loss,
/// `D_c(u₀) S_c(−ξ₀) ⊗ D_v(v₀) S_v(ξ₀)` applied to the two-mode kernel.
pub fn lossless_ket(
    params: &CouplingParams,
    alpha: Complex64,
    beta: Complex64,
    t: f64,
    dims: (usize, usize),
) -> Result<KetState> {
    let spec = lossless_spec(params, alpha, beta, t)?;
    let (nc, nv) = dims;
    let (wc, wv) = (work_dim(nc), work_dim(nv));
    let top_c = frame(-spec.xi0, spec.u0, nc, wc)?;
    let top_v = frame(spec.xi0, spec.v0, nv, wv)?;
    let kernel = kernel_matrix(spec.pair_ratio, wc, wv);
    let psi = &top_c * kernel * top_v.transpose();
    let ket = flatten(&psi);
    let ratio_sq = spec.pair_ratio * spec.pair_ratio;
    Ok(KetState {
        dims,
        norm_deficit: 1.0 - ket.norm_squared(),
        pair_tail: ratio_sq.powi(nc.min(nv) as i32),
        ket,
    })
}
