// Copyright 2026 The ioncav Authors
// SPDX-License-Identifier: Apache-2.0

//! Brute-force integration of the master equation on the truncated joint
//! space, used as ground truth for the closed forms.
//!
//! `dρ/dt = −i[H, ρ] + (γ/2)(2aρa† − a†aρ − ρa†a)` with
//! `H = iΩ₁(a†b − ab†) + iΩ₂(a†b† − ab)`, integrated by classical RK4 at a
//! fixed step.

use num_complex::Complex64;

use crate::dynamics::CouplingParams;
use crate::error::{Error, Result};
use crate::fock::{CMatrix, CVector, Dims, FockDensity, FockOperator};

/// Largest tolerated `|tr ρ(t) − tr ρ(0)|`.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-8;
/// Largest tolerated trace distance between the `dt` and `dt/2` runs.
pub const HALVING_LIMIT: f64 = 1e-6;
/// Bound on `dt · max(Ω₁, Ω₂, γ) · max(N_c, N_v)`.
pub const STABILITY_LIMIT: f64 = 0.1;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_max: f64,
    /// Repeat every run at `dt/2` and compare.
    pub halving_check: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_max: 25.0,
            halving_check: true,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self, params: &CouplingParams, dims: (usize, usize)) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter {
                name: "dt",
                value: self.dt,
                reason: "step must be positive",
            });
        }
        if !(self.t_max >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "t_max",
                value: self.t_max,
                reason: "horizon must be non-negative",
            });
        }
        let rate = params.omega1.max(params.omega2).max(params.gamma);
        let heuristic = self.dt * rate * dims.0.max(dims.1) as f64;
        if heuristic >= STABILITY_LIMIT {
            return Err(Error::InvalidParameter {
                name: "dt",
                value: self.dt,
                reason: "dt·max(rate)·max(N) exceeds the stability bound 0.1",
            });
        }
        Ok(())
    }
}

/// Sparse matrix in compressed-row form.
#[derive(Debug, Clone)]
struct Sparse {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl Sparse {
    /// Duplicate `(row, col)` entries are summed.
    fn from_triplets(dim: usize, mut entries: Vec<(usize, usize, Complex64)>) -> Self {
        entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0; dim + 1];
        let mut cols: Vec<usize> = Vec::with_capacity(entries.len());
        let mut vals: Vec<Complex64> = Vec::with_capacity(entries.len());
        let mut last = None;
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                *vals.last_mut().expect("previous entry") += v;
                continue;
            }
            last = Some((r, c));
            row_ptr[r + 1] += 1;
            cols.push(c);
            vals.push(v);
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                m[(r, c)] = v;
            }
        }
        m
    }

    /// `out = self · x`
    fn mul_slice(&self, x: &[Complex64], out: &mut [Complex64]) {
        for (r, o) in out.iter_mut().enumerate() {
            *o = self.row(r).map(|(c, v)| v * x[c]).sum();
        }
    }
}

fn check_dims(dims: (usize, usize)) -> Result<()> {
    for n in [dims.0, dims.1] {
        if n < 2 {
            return Err(Error::Index(format!("truncation dimension {n} < 2")));
        }
    }
    Ok(())
}

fn hamiltonian_triplets(
    params: &CouplingParams,
    (nc, nv): (usize, usize),
) -> Vec<(usize, usize, Complex64)> {
    let idx = |i: usize, j: usize| i * nv + j;
    let (o1, o2) = (params.omega1, params.omega2);
    let mut entries = Vec::with_capacity(4 * nc * nv);
    for i in 0..nc {
        for j in 0..nv {
            let col = idx(i, j);
            let (si, sj) = ((i as f64).sqrt(), (j as f64).sqrt());
            let (si1, sj1) = (((i + 1) as f64).sqrt(), ((j + 1) as f64).sqrt());
            if i + 1 < nc && j > 0 {
                entries.push((idx(i + 1, j - 1), col, I * (o1 * si1 * sj)));
            }
            if i > 0 && j + 1 < nv {
                entries.push((idx(i - 1, j + 1), col, -I * (o1 * si * sj1)));
            }
            if i + 1 < nc && j + 1 < nv && o2 != 0.0 {
                entries.push((idx(i + 1, j + 1), col, I * (o2 * si1 * sj1)));
            }
            if i > 0 && j > 0 && o2 != 0.0 {
                entries.push((idx(i - 1, j - 1), col, -I * (o2 * si * sj)));
            }
        }
    }
    entries
}

/// `H = iΩ₁(a†b − ab†) + iΩ₂(a†b† − ab)` on the joint space.
pub fn effective_hamiltonian(
    params: &CouplingParams,
    dims: (usize, usize),
) -> Result<FockOperator> {
    check_dims(dims)?;
    let d = dims.0 * dims.1;
    FockOperator::from_matrix(
        Sparse::from_triplets(d, hamiltonian_triplets(params, dims)).to_dense(),
    )
}

/// Precomputed pieces of the Lindblad generator.
struct Generator {
    nc: usize,
    nv: usize,
    gamma: f64,
    /// `K = −iH − (γ/2) a†a`, so that the generator is `Kρ + ρK† + γ aρa†`.
    k: Sparse,
    /// `√(i+1)`
    roots: Vec<f64>,
}

impl Generator {
    fn new(params: &CouplingParams, dims: (usize, usize)) -> Self {
        let (nc, nv) = dims;
        let mut entries = hamiltonian_triplets(params, dims);
        for e in &mut entries {
            e.2 *= -I;
        }
        if params.gamma != 0.0 {
            for i in 1..nc {
                for j in 0..nv {
                    let d = i * nv + j;
                    entries.push((d, d, Complex64::new(-0.5 * params.gamma * i as f64, 0.0)));
                }
            }
        }
        Self {
            nc,
            nv,
            gamma: params.gamma,
            k: Sparse::from_triplets(nc * nv, entries),
            roots: (1..=nc).map(|i| (i as f64).sqrt()).collect(),
        }
    }

    /// `out = L(ρ)` for Hermitian `ρ`. Only the lower triangle is
    /// computed, one column at a time, and then mirrored.
    fn rhs(&self, rho: &CMatrix, out: &mut CMatrix) {
        let (nc, nv) = (self.nc, self.nv);
        let d = nc * nv;
        let xs = rho.as_slice();
        let os = out.as_mut_slice();
        for c in 0..d {
            let oc = &mut os[c * d + c..(c + 1) * d];
            let xc = &xs[c * d..(c + 1) * d];
            for (r, o) in (c..d).zip(oc.iter_mut()) {
                *o = self.k.row(r).map(|(k, v)| v * xc[k]).sum();
            }
            // (ρK†)[:, c] = Σ_k ρ[:, k] conj(K[c, k])
            for (k, v) in self.k.row(c) {
                let w = v.conj();
                for (o, x) in oc.iter_mut().zip(&xs[k * d + c..(k + 1) * d]) {
                    *o += x * w;
                }
            }
            // (aρa†)[(i,j),(k,l)] = √((i+1)(k+1)) ρ[(i+1,j),(k+1,l)]
            let kc = c / nv;
            if self.gamma != 0.0 && kc + 1 < nc {
                let src = &xs[(c + nv) * d..(c + nv + 1) * d];
                let gk = self.gamma * self.roots[kc];
                for i in kc..nc - 1 {
                    let w = gk * self.roots[i];
                    let lo = (i * nv).max(c);
                    let hi = (i + 1) * nv;
                    for (o, x) in oc[lo - c..hi - c].iter_mut().zip(&src[lo + nv..hi + nv]) {
                        *o += x * w;
                    }
                }
            }
        }
        const BLOCK: usize = 32;
        for c0 in (0..d).step_by(BLOCK) {
            for r0 in (c0..d).step_by(BLOCK) {
                for c in c0..(c0 + BLOCK).min(d) {
                    for r in r0.max(c + 1)..(r0 + BLOCK).min(d) {
                        os[r * d + c] = os[c * d + r].conj();
                    }
                }
            }
        }
    }

    fn hamiltonian_apply(&self, psi: &CVector, out: &mut CVector) {
        // K = −iH when γ = 0
        self.k.mul_slice(psi.as_slice(), out.as_mut_slice());
    }
}

/// Right-hand side of the master equation for a joint `ρ`.
pub fn lindblad_rhs(params: &CouplingParams, rho: &FockDensity) -> Result<CMatrix> {
    let Dims::Joint(nc, nv) = rho.dims() else {
        return Err(Error::Index("lindblad_rhs needs a joint density".into()));
    };
    check_dims((nc, nv))?;
    let gen = Generator::new(params, (nc, nv));
    let d = nc * nv;
    let mut out = CMatrix::zeros(d, d);
    gen.rhs(rho.matrix(), &mut out);
    Ok(out)
}

/// Steps of at most `dt` covering `span` exactly.
fn step_plan(span: f64, dt: f64) -> (usize, f64) {
    if span <= 0.0 {
        return (0, 0.0);
    }
    let n = (span / dt - 1e-9).ceil().max(1.0) as usize;
    (n, span / n as f64)
}

fn check_times(times: &[f64], config: &IntegratorConfig) -> Result<()> {
    let mut prev = 0.0;
    for &t in times {
        if !(t >= prev) || t > config.t_max {
            return Err(Error::InvalidParameter {
                name: "t_target",
                value: t,
                reason: "targets must be ascending, non-negative and within t_max",
            });
        }
        prev = t;
    }
    Ok(())
}

/// `out = y + a·x`, elementwise over matching storage.
fn shifted<S>(out: &mut S, y: &S, a: f64, x: &S)
where
    S: AsSlices,
{
    for ((o, yi), xi) in out.slice_mut().iter_mut().zip(y.slice()).zip(x.slice()) {
        *o = yi + xi * a;
    }
}

/// `y += h/6 (k₁ + 2k₂ + 2k₃ + k₄)`
fn rk4_combine(y: &mut [Complex64], h: f64, k: [&[Complex64]; 4]) {
    let (w1, w2) = (h / 6.0, h / 3.0);
    for (i, yi) in y.iter_mut().enumerate() {
        *yi += (k[0][i] + k[3][i]) * w1 + (k[1][i] + k[2][i]) * w2;
    }
}

trait AsSlices {
    fn slice(&self) -> &[Complex64];
    fn slice_mut(&mut self) -> &mut [Complex64];
}

impl AsSlices for CMatrix {
    fn slice(&self) -> &[Complex64] {
        self.as_slice()
    }
    fn slice_mut(&mut self) -> &mut [Complex64] {
        self.as_mut_slice()
    }
}

impl AsSlices for CVector {
    fn slice(&self) -> &[Complex64] {
        self.as_slice()
    }
    fn slice_mut(&mut self) -> &mut [Complex64] {
        self.as_mut_slice()
    }
}

/// Fixed-step RK4 for a density matrix, returning snapshots at `times`.
fn rk4_density_series(
    params: &CouplingParams,
    rho0: &FockDensity,
    times: &[f64],
    dt: f64,
) -> Result<Vec<CMatrix>> {
    let Dims::Joint(nc, nv) = rho0.dims() else {
        return Err(Error::Index("integrator needs a joint density".into()));
    };
    let gen = Generator::new(params, (nc, nv));
    let d = nc * nv;
    let zero = || CMatrix::zeros(d, d);
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (zero(), zero(), zero(), zero(), zero());
    let mut rho = rho0.matrix().clone();
    let tr0 = rho.trace().re;
    let mut t = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        let (steps, h) = step_plan(target - t, dt);
        for _ in 0..steps {
            gen.rhs(&rho, &mut k1);
            shifted(&mut tmp, &rho, 0.5 * h, &k1);
            gen.rhs(&tmp, &mut k2);
            shifted(&mut tmp, &rho, 0.5 * h, &k2);
            gen.rhs(&tmp, &mut k3);
            shifted(&mut tmp, &rho, h, &k3);
            gen.rhs(&tmp, &mut k4);
            rk4_combine(
                rho.as_mut_slice(),
                h,
                [&k1, &k2, &k3, &k4].map(|k| k.as_slice()),
            );
            t += h;
            let drift = (rho.trace().re - tr0).abs();
            if drift > TRACE_DRIFT_LIMIT || !drift.is_finite() {
                return Err(Error::TraceDrift { t, drift });
            }
        }
        t = target;
        out.push(rho.clone());
    }
    Ok(out)
}

fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let diff = a - b;
    let herm = (&diff + diff.adjoint()).scale(0.5);
    0.5 * herm
        .symmetric_eigenvalues()
        .iter()
        .map(|l| l.abs())
        .sum::<f64>()
}

/// Result of a density-matrix run.
#[derive(Debug, Clone)]
pub struct Evolution {
    /// One state per requested time.
    pub states: Vec<FockDensity>,
    /// Trace distance between the `dt` and `dt/2` runs at each time, when
    /// the halving check is enabled.
    pub halving_distance: Option<Vec<f64>>,
}

/// Integrates `rho0` and records the state at each of the ascending
/// `times`.
///
/// # Errors
///
/// Invalid configuration, [`Error::TraceDrift`] when the trace moves by
/// more than [`TRACE_DRIFT_LIMIT`], and [`Error::NonConvergence`] when the
/// halving check disagrees by [`HALVING_LIMIT`] or more.
pub fn evolve_series(
    params: &CouplingParams,
    rho0: &FockDensity,
    times: &[f64],
    config: &IntegratorConfig,
) -> Result<Evolution> {
    let Dims::Joint(nc, nv) = rho0.dims() else {
        return Err(Error::Index("integrator needs a joint density".into()));
    };
    check_dims((nc, nv))?;
    config.validate(params, (nc, nv))?;
    check_times(times, config)?;

    let (coarse, fine) = if config.halving_check {
        std::thread::scope(|s| {
            let fine = s.spawn(|| rk4_density_series(params, rho0, times, 0.5 * config.dt));
            let coarse = rk4_density_series(params, rho0, times, config.dt);
            (coarse, fine.join().expect("integrator thread panicked"))
        })
    } else {
        (
            rk4_density_series(params, rho0, times, config.dt),
            Ok(Vec::new()),
        )
    };
    let coarse = coarse?;
    let fine = fine?;

    let halving_distance = if config.halving_check {
        let mut dists = Vec::with_capacity(times.len());
        for ((&t, a), b) in times.iter().zip(&coarse).zip(&fine) {
            let dist = trace_distance(a, b);
            if !(dist < HALVING_LIMIT) {
                return Err(Error::NonConvergence { t, deviation: dist });
            }
            dists.push(dist);
        }
        Some(dists)
    } else {
        None
    };
    // Report the finer run when both exist.
    let states = if config.halving_check { fine } else { coarse };
    let states = states
        .into_iter()
        .map(|m| FockDensity::new(rho0.dims(), m))
        .collect::<Result<Vec<_>>>()?;
    Ok(Evolution {
        states,
        halving_distance,
    })
}

/// State at `t_target`; see [`evolve_series`].
pub fn evolve(
    params: &CouplingParams,
    rho0: &FockDensity,
    t_target: f64,
    config: &IntegratorConfig,
) -> Result<FockDensity> {
    let mut ev = evolve_series(params, rho0, &[t_target], config)?;
    Ok(ev.states.pop().expect("one target"))
}

/// RK4 for a density matrix at a given step with no stability or halving
/// checks. Used to measure the convergence order of the scheme itself.
pub fn rk4_density(
    params: &CouplingParams,
    rho0: &FockDensity,
    t_target: f64,
    dt: f64,
) -> Result<FockDensity> {
    let mut out = rk4_density_series(params, rho0, &[t_target], dt)?;
    FockDensity::new(rho0.dims(), out.pop().expect("one target"))
}

/// Result of a state-vector run.
#[derive(Debug, Clone)]
pub struct PureEvolution {
    pub kets: Vec<CVector>,
    /// Largest `|‖ψ(t)‖ − ‖ψ(0)‖|` seen along the trajectory. The state is
    /// not renormalised.
    pub norm_drift: f64,
}

/// Schrödinger evolution `dψ/dt = −iHψ` with fixed-step RK4, recording
/// `ψ` at the ascending `times`. Only defined without cavity loss.
pub fn evolve_pure_series(
    params: &CouplingParams,
    psi0: &CVector,
    dims: (usize, usize),
    times: &[f64],
    config: &IntegratorConfig,
) -> Result<PureEvolution> {
    if params.gamma != 0.0 {
        return Err(Error::InvalidParameter {
            name: "gamma",
            value: params.gamma,
            reason: "state-vector evolution requires gamma = 0",
        });
    }
    check_dims(dims)?;
    let d = dims.0 * dims.1;
    if psi0.len() != d {
        return Err(Error::Dimension {
            expected: d,
            found: psi0.len(),
        });
    }
    config.validate(params, dims)?;
    check_times(times, config)?;

    let gen = Generator::new(params, dims);
    let zero = || CVector::zeros(d);
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (zero(), zero(), zero(), zero(), zero());
    let mut psi = psi0.clone();
    let norm0 = psi0.norm();
    let mut norm_drift = 0.0f64;
    let mut t = 0.0;
    let mut kets = Vec::with_capacity(times.len());
    for &target in times {
        let (steps, h) = step_plan(target - t, config.dt);
        for _ in 0..steps {
            gen.hamiltonian_apply(&psi, &mut k1);
            shifted(&mut tmp, &psi, 0.5 * h, &k1);
            gen.hamiltonian_apply(&tmp, &mut k2);
            shifted(&mut tmp, &psi, 0.5 * h, &k2);
            gen.hamiltonian_apply(&tmp, &mut k3);
            shifted(&mut tmp, &psi, h, &k3);
            gen.hamiltonian_apply(&tmp, &mut k4);
            rk4_combine(
                psi.as_mut_slice(),
                h,
                [&k1, &k2, &k3, &k4].map(|k| k.as_slice()),
            );
            norm_drift = norm_drift.max((psi.norm() - norm0).abs());
        }
        t = target;
        kets.push(psi.clone());
    }
    Ok(PureEvolution { kets, norm_drift })
}

/// State vector at `t_target`; see [`evolve_pure_series`].
pub fn evolve_pure(
    params: &CouplingParams,
    psi0: &CVector,
    dims: (usize, usize),
    t_target: f64,
    config: &IntegratorConfig,
) -> Result<PureEvolution> {
    evolve_pure_series(params, psi0, dims, &[t_target], config)
}
