// Copyright 2026 The ioncav Authors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form observables: squeezed-thermal parameters of each mode,
//! quadrature moments, the steady state, revival times, coherent
//! displacements and the lossless pure-state parameters.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use num_complex::Complex64;

use crate::dynamics::{envelope, kernel, CouplingParams, Regime};
use crate::error::{Error, Result};

/// Tolerance on the square-root argument `(ν + 1/2)² − μ²` below `1/4`.
const ROOT_SLACK: f64 = 1e-12;

/// Largest shift a Newton polish may apply to a closed-form revival time.
const POLISH_LIMIT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeLabel {
    /// The lossy cavity field, operator `a`.
    Cavity,
    /// The ion's vibrational motion, operator `b`.
    Vibration,
}

impl ModeLabel {
    pub fn short(self) -> char {
        match self {
            ModeLabel::Cavity => 'c',
            ModeLabel::Vibration => 'v',
        }
    }
}

/// Squeezed-thermal description of one mode at one time together with the
/// assembly weights it was derived from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpec {
    pub mode: ModeLabel,
    pub n_bar: f64,
    /// Squeeze parameter; `≤ 0` for the cavity and `≥ 0` for the motion.
    pub xi: f64,
    /// Correlation weight `ζ = f g`.
    pub zeta: f64,
    pub mu: f64,
    pub nu: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RevivalSchedule {
    /// Times where `f` vanishes: the motion returns to the squeezed vacuum.
    pub tau_motion: Vec<f64>,
    /// Times where `g` vanishes: the cavity returns to the vacuum.
    pub tau_cavity: Vec<f64>,
    pub horizon: f64,
}

/// Means and variances of `X = (a + a†)/√2`, `P = (a − a†)/(i√2)` for both
/// modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadTuple {
    pub var_xc: f64,
    pub var_pc: f64,
    pub var_xv: f64,
    pub var_pv: f64,
    pub mean_xc: f64,
    pub mean_pc: f64,
    pub mean_xv: f64,
    pub mean_pv: f64,
}

/// Which of the four disentangled product states the lossless solution
/// passes through at `t_m = mπ/(2Λ₀)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProductState {
    /// `D(α)|0⟩ ⊗ D(β)|0⟩`
    Initial,
    /// `D(ᾱ)S(−ξ̄)|0⟩ ⊗ D(β̄)S(ξ̄)|0⟩`
    Squeezed,
    /// `D(−α)|0⟩ ⊗ D(−β)|0⟩`
    Inverted,
    /// `D(−ᾱ)S(−ξ̄)|0⟩ ⊗ D(−β̄)S(ξ̄)|0⟩`
    SqueezedInverted,
}

/// Parameters of the pure state reached without cavity loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LosslessSpec {
    pub t: f64,
    pub n_bar0: f64,
    pub xi0: f64,
    pub u0: Complex64,
    pub v0: Complex64,
    pub alpha_bar: Complex64,
    pub beta_bar: Complex64,
    /// Signed ratio `λ` of the two-mode squeezed kernel
    /// `√(1 − λ²) Σ λ^k |k⟩|k⟩`, with `λ² = n̄₀/(n̄₀ + 1)` and the sign of
    /// `sin(2Λ₀t)`.
    pub pair_ratio: f64,
    /// Set when `t` lies on the quarter-period grid.
    pub product_state: Option<ProductState>,
}

/// Squeezed-thermal parameters of `mode` at time `t` for a vacuum start.
pub fn mode_spec(params: &CouplingParams, t: f64, mode: ModeLabel) -> Result<ModeSpec> {
    let Some(q) = params.q() else {
        return Ok(ModeSpec {
            mode,
            n_bar: 0.0,
            xi: 0.0,
            zeta: 0.0,
            mu: 0.0,
            nu: 0.0,
        });
    };
    if mode == ModeLabel::Vibration && params.regime == Regime::EqualCoupling {
        return Err(Error::Regime {
            op: "mode_spec(vibration)",
            regime: params.regime,
        });
    }

    let env = envelope(params, t);
    let (mu, nu) = match mode {
        ModeLabel::Cavity => {
            let nu = env.g * env.g;
            (q * nu, nu)
        }
        ModeLabel::Vibration => {
            let nu = (1.0 - env.f * env.f) / (q * q - 1.0);
            (-q * nu, nu)
        }
    };

    let (n_bar, xi) = squeezed_thermal_from_weights(mu, nu).map_err(|detail| Error::Validity {
        t,
        detail: format!(
            "{detail} for mode {} at (Ω₁, Ω₂, γ) = ({}, {}, {})",
            mode.short(),
            params.omega1,
            params.omega2,
            params.gamma
        ),
    })?;

    Ok(ModeSpec {
        mode,
        n_bar,
        xi,
        zeta: env.f * env.g,
        mu,
        nu,
    })
}

/// `n̄ = −1/2 + √((ν + 1/2)² − μ²)`, `ξ = ¼ ln((ν + 1/2 − μ)/(ν + 1/2 + μ))`.
fn squeezed_thermal_from_weights(mu: f64, nu: f64) -> std::result::Result<(f64, f64), String> {
    let shifted = nu + 0.5;
    let root_arg = shifted * shifted - mu * mu;
    if !(root_arg >= 0.25 - ROOT_SLACK) {
        return Err(format!("root argument {root_arg:e} below 1/4"));
    }
    let (num, den) = (shifted - mu, shifted + mu);
    if !(num > 0.0 && den > 0.0) {
        return Err(format!("log argument {num:e}/{den:e} not positive"));
    }
    let n_bar = (root_arg.sqrt() - 0.5).max(0.0);
    Ok((n_bar, 0.25 * (num / den).ln()))
}

/// `(n̄, ξ)` of the undisplaced squeezed thermal state with quadrature
/// variances `ΔX²`, `ΔP²`: `n̄ = √(ΔX²ΔP²) − 1/2`, `ξ = ¼ ln(ΔP²/ΔX²)`.
pub fn squeezed_thermal_from_variances(var_x: f64, var_p: f64) -> (f64, f64) {
    (
        ((var_x * var_p).sqrt() - 0.5).max(0.0),
        0.25 * (var_p / var_x).ln(),
    )
}

/// Steady-state squeeze of the motion, `ξ̄ = ½ ln((Ω₁ + Ω₂)/|Ω₁ − Ω₂|)`.
pub fn steady_squeeze(params: &CouplingParams) -> Result<f64> {
    if params.regime == Regime::EqualCoupling {
        return Err(Error::Regime {
            op: "steady_squeeze",
            regime: params.regime,
        });
    }
    let (o1, o2) = (params.omega1, params.omega2);
    Ok(0.5 * ((o1 + o2) / (o1 - o2).abs()).ln())
}

/// Upper bound on the thermal occupation of either mode when `Ω₁ > Ω₂`.
pub fn nbar_max(params: &CouplingParams) -> Result<f64> {
    if params.omega2 >= params.omega1 {
        return Err(Error::InvalidParameter {
            name: "omega2",
            value: params.omega2,
            reason: "bound requires omega2 < omega1",
        });
    }
    let r = params.omega2 / params.omega1;
    Ok(0.5 * (1.0 / (1.0 - r * r).sqrt() - 1.0))
}

/// Revival times up to `horizon`. Only the oscillatory regime has them.
pub fn revival_schedule(params: &CouplingParams, horizon: f64) -> Result<RevivalSchedule> {
    let Some(lambda) = params.lambda() else {
        return Err(Error::Regime {
            op: "revival_schedule",
            regime: params.regime,
        });
    };
    let period = PI / lambda;
    // arccos of a negative argument lands in (π/2, π].
    let first = (-(params.gamma / 4.0) / params.lambda0_sq.sqrt()).acos() / lambda;

    let mut tau_motion = Vec::new();
    let mut n = 0usize;
    loop {
        let t = first + n as f64 * period;
        if t > horizon {
            break;
        }
        tau_motion.push(polish(t, |t| {
            let (_, s) = kernel(params, t);
            (envelope(params, t).f, -params.lambda0_sq * s)
        }));
        n += 1;
    }

    let mut tau_cavity = vec![0.0];
    let mut n = 1usize;
    loop {
        let t = n as f64 * period;
        if t > horizon {
            break;
        }
        let polished = if params.omega2 > 0.0 {
            polish(t, |t| {
                let e = envelope(params, t);
                (e.g, params.omega2 * e.h)
            })
        } else {
            t
        };
        tau_cavity.push(polished);
        n += 1;
    }

    Ok(RevivalSchedule {
        tau_motion,
        tau_cavity,
        horizon,
    })
}

/// One Newton step on a root estimate. `value_and_slope` returns the
/// function and its derivative.
fn polish(t: f64, value_and_slope: impl Fn(f64) -> (f64, f64)) -> f64 {
    let (value, slope) = value_and_slope(t);
    if slope == 0.0 || value == 0.0 {
        return t;
    }
    let step = value / slope;
    debug_assert!(
        step.abs() < POLISH_LIMIT,
        "Newton polish moved a closed-form root by {step:e}"
    );
    if step.abs() < POLISH_LIMIT {
        t - step
    } else {
        log::warn!("revival polish step {step:e} at t = {t} rejected");
        t
    }
}

/// Coherent-state displacements `(u, v)` at `t` for initial amplitudes
/// `(α, β)`.
pub fn displacement_trajectory(
    params: &CouplingParams,
    alpha: Complex64,
    beta: Complex64,
    t: f64,
) -> (Complex64, Complex64) {
    let env = envelope(params, t);
    // (Ω₁/Ω₂) g = Ω₁ s, finite as Ω₂ → 0.
    let (_, s) = kernel(params, t);
    let qg = params.omega1 * s;
    let u = alpha * env.h + beta * qg + beta.conj() * env.g;
    let v = -alpha * qg + alpha.conj() * env.g + beta * env.f;
    (u, v)
}

/// Quadrature moments at `t` for a coherent start `(α, β)`.
///
/// The variances do not depend on the displacement. In the equal-coupling
/// regime `ΔP_c² = ΔX_v² = 1/2` and the other two grow without bound:
/// `ΔX_c² = 1/2 + (8Ω²/γ²)(1 − e^{−γt/2})²` and
/// `ΔP_v² = 1/2 + (16Ω²/γ²)(γt/2 + e^{−γt/2} − 1)`, the `Ω₂ → Ω₁` limit of
/// the generic expressions.
pub fn quad_variances(
    params: &CouplingParams,
    t: f64,
    alpha: Complex64,
    beta: Complex64,
) -> QuadTuple {
    let (u, v) = displacement_trajectory(params, alpha, beta, t);
    let (o1, o2) = (params.omega1, params.omega2);

    let (var_xc, var_pc, var_xv, var_pv) = if params.regime == Regime::EqualCoupling {
        let omega = o1;
        let (x_c, p_v) = if params.gamma > 0.0 {
            let half = params.gamma * t / 2.0;
            let k = omega / params.gamma;
            let decay = -(-half).exp_m1();
            (8.0 * k * k * decay * decay, 16.0 * k * k * (half - decay))
        } else {
            let w = omega * t;
            (2.0 * w * w, 2.0 * w * w)
        };
        (0.5 + x_c, 0.5, 0.5, 0.5 + p_v)
    } else {
        let env = envelope(params, t);
        let (_, s) = kernel(params, t);
        // g²/Ω₂ written as g·s so that Ω₂ = 0 needs no special case.
        let g_sq_over_o2 = env.g * s;
        let loss = 1.0 - env.f * env.f;
        (
            0.5 + (o1 + o2) * g_sq_over_o2,
            0.5 - (o1 - o2) * g_sq_over_o2,
            0.5 - o2 / (o1 + o2) * loss,
            0.5 + o2 / (o1 - o2) * loss,
        )
    };

    QuadTuple {
        var_xc,
        var_pc,
        var_xv,
        var_pv,
        mean_xc: SQRT_2 * u.re,
        mean_pc: SQRT_2 * u.im,
        mean_xv: SQRT_2 * v.re,
        mean_pv: SQRT_2 * v.im,
    }
}

/// Parameters of the pure lossless solution at `t`.
pub fn lossless_spec(
    params: &CouplingParams,
    alpha: Complex64,
    beta: Complex64,
    t: f64,
) -> Result<LosslessSpec> {
    if params.gamma != 0.0 {
        return Err(Error::InvalidParameter {
            name: "gamma",
            value: params.gamma,
            reason: "lossless solution requires gamma = 0",
        });
    }
    let Some(lambda0) = params.lambda0() else {
        return Err(Error::InvalidParameter {
            name: "omega2",
            value: params.omega2,
            reason: "lossless solution requires omega1 > omega2",
        });
    };
    let (o1, o2) = (params.omega1, params.omega2);
    let (sin1, cos1) = (lambda0 * t).sin_cos();
    let (sin2, cos2) = (2.0 * lambda0 * t).sin_cos();

    let r = o2 / lambda0;
    let n_bar0 = 0.5 * ((1.0 + r * r * sin2 * sin2).sqrt() - 1.0);
    let xi0 = 0.25 * ((o1 + o2) * (o1 - o2 * cos2) / ((o1 - o2) * (o1 + o2 * cos2))).ln();

    let alpha_bar = (beta.conj() * o2 + beta * o1) / lambda0;
    let beta_bar = (alpha.conj() * o2 - alpha * o1) / lambda0;
    let u0 = alpha * cos1 + alpha_bar * sin1;
    let v0 = beta * cos1 + beta_bar * sin1;

    let ratio = (n_bar0 / (n_bar0 + 1.0)).sqrt();
    let pair_ratio = if sin2 < 0.0 { -ratio } else { ratio };

    let quarter = FRAC_PI_2 / lambda0;
    let m = (t / quarter).round();
    let product_state = ((t - m * quarter).abs() <= 1e-12 * quarter.max(t)).then(|| {
        match (m as i64).rem_euclid(4) {
            0 => ProductState::Initial,
            1 => ProductState::Squeezed,
            2 => ProductState::Inverted,
            _ => ProductState::SqueezedInverted,
        }
    });

    Ok(LosslessSpec {
        t,
        n_bar0,
        xi0,
        u0,
        v0,
        alpha_bar,
        beta_bar,
        pair_ratio,
        product_state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::classify_regime;
    use approx::assert_relative_eq;

    fn p(o2: f64, g: f64) -> CouplingParams {
        classify_regime(1.0, o2, g).unwrap()
    }

    const ZERO: Complex64 = Complex64::new(0.0, 0.0);

    #[test]
    fn vacuum_start() {
        for mode in [ModeLabel::Cavity, ModeLabel::Vibration] {
            let s = mode_spec(&p(0.6, 0.4), 0.0, mode).unwrap();
            assert_eq!(s.n_bar, 0.0);
            assert_eq!(s.xi, 0.0);
        }
    }

    #[test]
    fn no_parametric_drive_is_trivial() {
        let s = mode_spec(&p(0.0, 0.4), 3.0, ModeLabel::Vibration).unwrap();
        assert_eq!((s.n_bar, s.xi, s.zeta), (0.0, 0.0, 0.0));
    }

    #[test]
    fn equal_coupling_rejects_vibration_spec() {
        let err = mode_spec(&p(1.0, 0.4), 1.0, ModeLabel::Vibration).unwrap_err();
        assert!(matches!(err, Error::Regime { .. }));
        assert!(mode_spec(&p(1.0, 0.4), 1.0, ModeLabel::Cavity).is_ok());
    }

    #[test]
    fn sign_conventions() {
        let params = p(0.6, 0.4);
        for i in 1..200 {
            let t = 0.1 * i as f64;
            let c = mode_spec(&params, t, ModeLabel::Cavity).unwrap();
            let v = mode_spec(&params, t, ModeLabel::Vibration).unwrap();
            assert!(c.xi <= 0.0 && v.xi >= 0.0);
            assert!(c.n_bar >= 0.0 && v.n_bar >= 0.0);
        }
    }

    #[test]
    fn weights_reproduce_printed_forms() {
        // n̄ = −1/2 + √(1/4 + ν − (q² − 1)ν²), |ξ| = ¼ ln((1/2 + (q+1)ν)/(1/2 − (q−1)ν))
        let params = p(0.6, 0.4);
        let q = params.q().unwrap();
        for t in [0.3, 1.7, 4.2] {
            for mode in [ModeLabel::Cavity, ModeLabel::Vibration] {
                let s = mode_spec(&params, t, mode).unwrap();
                let nu = s.nu;
                let n_bar = -0.5 + (0.25 + nu - (q * q - 1.0) * nu * nu).sqrt();
                let abs_xi = 0.25 * ((0.5 + (q + 1.0) * nu) / (0.5 - (q - 1.0) * nu)).ln();
                assert_relative_eq!(s.n_bar, n_bar, epsilon = 1e-13);
                assert_relative_eq!(s.xi.abs(), abs_xi, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn steady_squeeze_values() {
        assert_eq!(steady_squeeze(&p(0.0, 0.4)).unwrap(), 0.0);
        assert_relative_eq!(
            (-2.0 * steady_squeeze(&p(0.6, 0.4)).unwrap()).exp(),
            0.25,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            (-2.0 * steady_squeeze(&p(0.9, 1.0)).unwrap()).exp(),
            1.0 / 19.0,
            epsilon = 1e-15
        );
        assert!(steady_squeeze(&p(1.0, 0.4)).is_err());
    }

    #[test]
    fn nbar_max_values() {
        assert_eq!(nbar_max(&p(0.0, 0.4)).unwrap(), 0.0);
        assert_relative_eq!(nbar_max(&p(0.6, 0.4)).unwrap(), 0.125, epsilon = 1e-15);
        let r: f64 = 0.01;
        assert_relative_eq!(
            nbar_max(&p(r, 0.4)).unwrap(),
            0.25 * r * r,
            max_relative = 1e-3
        );
        assert!(nbar_max(&p(1.2, 0.4)).is_err());
    }

    #[test]
    fn revival_times_lossless() {
        let params = p(0.6, 0.0);
        let lambda = 0.64f64.sqrt();
        let sched = revival_schedule(&params, 20.0).unwrap();
        for (n, t) in sched.tau_motion.iter().enumerate() {
            assert_relative_eq!(*t, (FRAC_PI_2 + n as f64 * PI) / lambda, epsilon = 1e-12);
        }
        assert_eq!(sched.tau_cavity[0], 0.0);
    }

    #[test]
    fn revival_regime_gate() {
        for (o2, g) in [(0.99, 0.8), (1.0, 0.4), (1.3, 0.4)] {
            assert!(revival_schedule(&p(o2, g), 10.0).is_err());
        }
    }

    #[test]
    fn displacement_start_and_zero_drive_limit() {
        let (a, b) = (Complex64::new(0.5, -0.1), Complex64::new(0.2, 0.3));
        let params = p(0.6, 0.4);
        assert_eq!(displacement_trajectory(&params, a, b, 0.0), (a, b));

        // Ω₂ → 0 is continuous.
        let t = 1.3;
        let exact = displacement_trajectory(&p(0.0, 0.4), a, b, t);
        let near = displacement_trajectory(&p(1e-9, 0.4), a, b, t);
        assert!((exact.0 - near.0).norm() < 1e-8);
        assert!((exact.1 - near.1).norm() < 1e-8);
    }

    #[test]
    fn variances_start_at_vacuum() {
        for (o2, g) in [(0.6, 0.4), (1.0, 0.4), (1.3, 0.2), (0.0, 1.0)] {
            let q = quad_variances(&p(o2, g), 0.0, ZERO, ZERO);
            for v in [q.var_xc, q.var_pc, q.var_xv, q.var_pv] {
                assert_relative_eq!(v, 0.5, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn minimum_variance_at_motion_revival() {
        let params = p(0.6, 0.4);
        let sched = revival_schedule(&params, 25.0).unwrap();
        for t in &sched.tau_motion {
            let q = quad_variances(&params, *t, ZERO, ZERO);
            assert_relative_eq!(q.var_xv, 0.125, epsilon = 1e-12);
        }
        for t in &sched.tau_cavity {
            let q = quad_variances(&params, *t, ZERO, ZERO);
            assert_relative_eq!(q.var_pc, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn equal_coupling_lossless_limit() {
        let a = quad_variances(&p(1.0, 0.0), 2.0, ZERO, ZERO);
        let b = quad_variances(&p(1.0, 1e-7), 2.0, ZERO, ZERO);
        assert_relative_eq!(a.var_xc, b.var_xc, max_relative = 1e-6);
        assert_relative_eq!(a.var_pv, b.var_pv, max_relative = 1e-6);
    }

    #[test]
    fn lossless_quarter_periods() {
        let params = p(0.6, 0.0);
        let (a, b) = (Complex64::new(0.3, 0.0), Complex64::new(0.0, 0.2));
        let s0 = lossless_spec(&params, a, b, 0.0).unwrap();
        assert_eq!(s0.product_state, Some(ProductState::Initial));
        assert_eq!((s0.n_bar0, s0.xi0, s0.u0, s0.v0), (0.0, 0.0, a, b));

        let lambda0 = 0.8;
        let s1 = lossless_spec(&params, a, b, FRAC_PI_2 / lambda0).unwrap();
        assert_eq!(s1.product_state, Some(ProductState::Squeezed));
        assert!(s1.n_bar0 < 1e-15);
        assert_relative_eq!(s1.xi0, steady_squeeze(&params).unwrap(), epsilon = 1e-12);
        assert!((s1.u0 - s1.alpha_bar).norm() < 1e-12);
        assert!((s1.v0 - s1.beta_bar).norm() < 1e-12);

        let s2 = lossless_spec(&params, a, b, PI / lambda0).unwrap();
        assert_eq!(s2.product_state, Some(ProductState::Inverted));
        let s3 = lossless_spec(&params, a, b, 1.5 * PI / lambda0).unwrap();
        assert_eq!(s3.product_state, Some(ProductState::SqueezedInverted));
        assert!(lossless_spec(&params, a, b, 1.0)
            .unwrap()
            .product_state
            .is_none());
    }

    #[test]
    fn lossless_rejects_loss() {
        let (a, b) = (ZERO, ZERO);
        assert!(lossless_spec(&p(0.6, 0.1), a, b, 1.0).is_err());
        assert!(lossless_spec(&p(1.2, 0.0), a, b, 1.0).is_err());
    }
}
