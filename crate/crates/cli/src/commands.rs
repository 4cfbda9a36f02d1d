// Copyright 2026 The ioncav Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use ioncav::dynamics::{classify_regime, envelope, CouplingParams, Regime};
use ioncav::fock::{
    assemble_joint_density, fidelity_with_ket, lossless_ket, partial_trace, quad_stats,
    squeezed_thermal_density, state_metrics, AssemblyBudget, FockDensity,
};
use ioncav::observables::{
    mode_spec, quad_variances, revival_schedule, squeezed_thermal_from_variances, ModeLabel,
};
use ioncav::oracle::{evolve_series, IntegratorConfig};
use ioncav::Error;

use crate::config::RunConfig;
use crate::{CliError, EXIT_BREACH, EXIT_CONFIG, EXIT_NO_REVIVALS, EXIT_VALIDITY};

pub const SIMULATE_HEADER: &str = "t,var_xc,var_pc,var_xv,var_pv,nbar_c,nbar_v,xi_c,xi_v,f,g,h";
pub const SWEEP_HEADER: &str = "ratio,var_xv_t1,var_xv_t5,var_xv_t10";

const VALIDATE_TIMES: [f64; 4] = [0.5, 1.0, 2.0, 4.0];
const SWEEP_TIMES: [f64; 3] = [1.0, 5.0, 10.0];
/// Largest joint dimension `validate` accepts.
const MAX_JOINT_DIM: usize = 1024;
const TOL_TRACE_DISTANCE: f64 = 1e-4;
const TOL_FIDELITY: f64 = 1e-6;
const TOL_QUADRATURE: f64 = 1e-4;

fn core_error(e: Error) -> CliError {
    let code = match e {
        Error::Validity { .. } => EXIT_VALIDITY,
        Error::InvalidParameter { .. } => EXIT_CONFIG,
        _ => EXIT_BREACH,
    };
    CliError::new(code, e.to_string())
}

fn io_error(e: std::io::Error) -> CliError {
    CliError::new(EXIT_BREACH, format!("cannot write report: {e}"))
}

/// 15 significant digits.
fn num(x: f64) -> String {
    format!("{x:.14e}")
}

/// Writes `contents` next to `path` and renames it into place.
fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let fail = |e: &dyn std::fmt::Display| {
        CliError::config(format!("cannot write {}: {e}", path.display()))
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| fail(&e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| fail(&e))?;
    tmp.as_file().sync_all().map_err(|e| fail(&e))?;
    tmp.persist(path).map_err(|e| fail(&e))?;
    Ok(())
}

/// `(n̄, ξ)` of both modes at `t`.
fn squeezed_thermal_params(p: &CouplingParams, t: f64) -> Result<[f64; 4], CliError> {
    let c = mode_spec(p, t, ModeLabel::Cavity).map_err(core_error)?;
    let (nbar_v, xi_v) = if p.regime == Regime::EqualCoupling {
        let q = quad_variances(p, t, Default::default(), Default::default());
        squeezed_thermal_from_variances(q.var_xv, q.var_pv)
    } else {
        let v = mode_spec(p, t, ModeLabel::Vibration).map_err(core_error)?;
        (v.n_bar, v.xi)
    };
    Ok([c.n_bar, nbar_v, c.xi, xi_v])
}

pub fn simulate(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let p = cfg.params()?;
    let (alpha, beta) = cfg.amplitudes();
    let path = cfg.out_path_or("simulate.csv");
    let mut csv = String::from(SIMULATE_HEADER);
    csv.push('\n');
    let mut rows = 0usize;
    for t in cfg.grid() {
        let q = quad_variances(&p, t, alpha, beta);
        let st = squeezed_thermal_params(&p, t)?;
        let e = envelope(&p, t);
        let fields = [t, q.var_xc, q.var_pc, q.var_xv, q.var_pv]
            .into_iter()
            .chain(st)
            .chain([e.f, e.g, e.h])
            .map(num)
            .collect::<Vec<_>>();
        csv.push_str(&fields.join(","));
        csv.push('\n');
        rows += 1;
    }
    write_atomic(&path, &csv)?;
    writeln!(out, "wrote {rows} rows to {}", path.display()).map_err(io_error)
}

pub fn revivals(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let p = cfg.params()?;
    if p.regime != Regime::Oscillatory {
        return Err(CliError::new(
            EXIT_NO_REVIVALS,
            "no revivals in this regime",
        ));
    }
    let sched = revival_schedule(&p, cfg.t_max).map_err(core_error)?;
    let mut text = format!(
        "revivals for Ω₂/Ω₁ = {}, γ/Ω₁ = {} up to Ω₁t = {}\n",
        p.omega2, p.gamma, cfg.t_max
    );
    text.push_str("motion returns to the squeezed vacuum (f = 0):\n");
    for (n, &t) in sched.tau_motion.iter().enumerate() {
        let r = envelope(&p, t).f.abs();
        let _ = writeln!(text, "  tau_{n} = {t:.12}  |f| = {r:.3e}");
    }
    text.push_str("cavity returns to the vacuum (g = 0):\n");
    for (n, &t) in sched.tau_cavity.iter().enumerate() {
        let r = envelope(&p, t).g.abs();
        let _ = writeln!(text, "  tau'_{n} = {t:.12}  |g| = {r:.3e}");
    }
    out.write_all(text.as_bytes()).map_err(io_error)
}

pub fn validate(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let p = cfg.params()?;
    let (nc, nv) = (cfg.nc, cfg.nv);
    if nc * nv > MAX_JOINT_DIM {
        return Err(CliError::config(format!(
            "nc·nv = {} exceeds {MAX_JOINT_DIM}",
            nc * nv
        )));
    }
    let (alpha, beta) = cfg.amplitudes();
    let start = |a, n| squeezed_thermal_density(0.0, 0.0, a, n).map_err(core_error);
    let rho0 = FockDensity::tensor(&start(alpha, nc)?, &start(beta, nv)?).map_err(core_error)?;
    let integrator = IntegratorConfig {
        dt: cfg.dt_int,
        t_max: VALIDATE_TIMES[VALIDATE_TIMES.len() - 1],
        halving_check: true,
    };
    let ev = evolve_series(&p, &rho0, &VALIDATE_TIMES, &integrator)
        .map_err(|e| CliError::new(EXIT_BREACH, format!("integrator: {e}")))?;
    let budget = AssemblyBudget {
        mn_cutoff: None,
        series_tol: cfg.series_tol,
        dims: (nc, nv),
    };

    let report = |out: &mut dyn Write, line: String| writeln!(out, "{line}").map_err(io_error);
    report(
        out,
        format!(
            "validating Ω₂/Ω₁ = {}, γ/Ω₁ = {} on {nc} x {nv} levels",
            p.omega2, p.gamma
        ),
    )?;
    let mut breaches = Vec::new();
    let mut check = |name: &str, t: f64, value: f64, tol: f64| {
        if !(value < tol) {
            breaches.push(format!("{name} at t = {t}: {value:.3e} ≥ {tol:.0e}"));
        }
    };
    for (&t, oracle) in VALIDATE_TIMES.iter().zip(&ev.states) {
        let asm = assemble_joint_density(&p, t, alpha, beta, &budget)
            .map_err(|e| CliError::new(EXIT_BREACH, format!("assembly at t = {t}: {e}")))?;
        let joint = state_metrics(&asm.density, oracle).map_err(core_error)?;
        let mut deficits = [0.0; 2];
        for (d, mode) in deficits
            .iter_mut()
            .zip([ModeLabel::Cavity, ModeLabel::Vibration])
        {
            let a = partial_trace(&asm.density, mode).map_err(core_error)?;
            let b = partial_trace(oracle, mode).map_err(core_error)?;
            *d = 1.0 - state_metrics(&a, &b).map_err(core_error)?.fidelity;
        }
        let want = quad_variances(&p, t, alpha, beta);
        let got = quad_stats(oracle).map_err(core_error)?;
        let quad = [
            got.var_xc - want.var_xc,
            got.var_pc - want.var_pc,
            got.var_xv - want.var_xv,
            got.var_pv - want.var_pv,
            got.mean_xc - want.mean_xc,
            got.mean_pc - want.mean_pc,
            got.mean_xv - want.mean_xv,
            got.mean_pv - want.mean_pv,
        ]
        .iter()
        .fold(0.0f64, |m, d| m.max(d.abs()));

        let mut line = format!(
            "t = {t}: trace distance {:.3e}, fidelity deficit c {:.3e} v {:.3e}, quadrature delta {quad:.3e}",
            joint.trace_distance, deficits[0], deficits[1]
        );
        check(
            "trace distance",
            t,
            joint.trace_distance,
            TOL_TRACE_DISTANCE,
        );
        check("cavity fidelity deficit", t, deficits[0], TOL_FIDELITY);
        check("vibration fidelity deficit", t, deficits[1], TOL_FIDELITY);
        check("quadrature delta", t, quad, TOL_QUADRATURE);
        if p.gamma == 0.0 {
            let ket = lossless_ket(&p, alpha, beta, t, (nc, nv)).map_err(core_error)?;
            let deficit = 1.0 - fidelity_with_ket(oracle, &ket.ket).map_err(core_error)?;
            let _ = write!(line, ", lossless deficit {deficit:.3e}");
            check("lossless fidelity deficit", t, deficit, TOL_FIDELITY);
        }
        report(out, line)?;
    }
    if breaches.is_empty() {
        report(out, "all checks passed".into())
    } else {
        Err(CliError::new(
            EXIT_BREACH,
            format!("tolerance breached: {}", breaches.join("; ")),
        ))
    }
}

pub fn sweep_ratio(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let gamma = cfg.params()?.gamma;
    let (alpha, beta) = cfg.amplitudes();
    let path = cfg.out_path_or("sweep_ratio.csv");
    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    for i in 10..=150 {
        let ratio = f64::from(i) / 100.0;
        let p = classify_regime(1.0, ratio, gamma).map_err(core_error)?;
        let row = std::iter::once(ratio)
            .chain(SWEEP_TIMES.map(|t| quad_variances(&p, t, alpha, beta).var_xv))
            .map(num)
            .collect::<Vec<_>>();
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    write_atomic(&path, &csv)?;
    writeln!(out, "wrote 141 rows to {}", path.display()).map_err(io_error)
}
