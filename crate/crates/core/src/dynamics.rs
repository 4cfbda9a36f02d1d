// Copyright 2026 The ioncav Authors
// SPDX-License-Identifier: Apache-2.0

//! Coupling rates, regime classification and the scalar envelopes `f`, `g`,
//! `h` that carry all of the time dependence of the damped solution.
//!
//! The envelopes solve the damped oscillator equation
//! `y'' + (γ/2) y' + (Ω₁² − Ω₂²) y = 0` with initial data
//! `f(0) = 1, f'(0) = 0`, `g(0) = 0, g'(0) = Ω₂` and `h(0) = 1, h'(0) = −γ/2`.
//! With `Λ² = Ω₁² − Ω₂² − γ²/16` the solutions are damped trigonometric
//! functions for `Λ² > 0`, hyperbolic ones for `Λ² < 0` and polynomial times
//! exponential at `Λ² = 0`.

use crate::error::{Error, Result};

/// Relative tolerance on `|Ω₁ − Ω₂| / Ω₁` for the equal-coupling branch.
pub const EQUAL_COUPLING_EPS: f64 = 1e-9;

/// Tolerance on `|Λ²| / Ω₁²` for the degenerate (critically damped) branch.
pub const DEGENERATE_EPS: f64 = 1e-12;

/// Exponents below this are treated as exact zeros rather than denormals.
const UNDERFLOW_EXPONENT: f64 = -700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `Λ² > 0`: damped oscillation, revivals exist.
    Oscillatory,
    /// `Λ² = 0` within tolerance.
    Degenerate,
    /// `Λ² < 0`: hyperbolic envelopes. Covers both the over-damped
    /// decaying case and `Ω₂ > Ω₁`, where the envelopes grow.
    Overdamped,
    /// `Ω₁ = Ω₂`.
    EqualCoupling,
}

/// The three effective rates of the bilinear coupling plus derived
/// quantities. Rates are angular frequencies in arbitrary but common units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingParams {
    pub omega1: f64,
    pub omega2: f64,
    pub gamma: f64,
    /// `Λ² = Ω₁² − Ω₂² − γ²/16`
    pub lambda_sq: f64,
    /// `Λ₀² = Ω₁² − Ω₂²`
    pub lambda0_sq: f64,
    pub regime: Regime,
}

/// Laboratory parameters of the Raman scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabParams {
    /// Lamb-Dicke parameter of the cavity mode.
    pub eta_c: f64,
    pub g1: f64,
    pub g2: f64,
    /// Ion-cavity coupling.
    pub gc: f64,
    /// Detuning of the electronic transition from the cavity.
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeValues {
    pub t: f64,
    pub f: f64,
    pub g: f64,
    pub h: f64,
}

impl CouplingParams {
    /// Validates the rates and derives `Λ²`, `Λ₀²` and the regime tag.
    pub fn new(omega1: f64, omega2: f64, gamma: f64) -> Result<Self> {
        classify_regime(omega1, omega2, gamma)
    }

    /// `q = Ω₁/Ω₂`, undefined without parametric drive.
    pub fn q(&self) -> Option<f64> {
        (self.omega2 > 0.0).then(|| self.omega1 / self.omega2)
    }

    /// Positive square root of `Λ²` in the oscillatory regime.
    pub fn lambda(&self) -> Option<f64> {
        (self.regime == Regime::Oscillatory).then(|| self.lambda_sq.sqrt())
    }

    pub fn lambda0(&self) -> Option<f64> {
        (self.lambda0_sq > 0.0).then(|| self.lambda0_sq.sqrt())
    }

    /// Same physics in units where `Ω₁ = 1`. Times measured in the
    /// returned units are `Ω₁ t`.
    pub fn normalized(&self) -> Self {
        let s = self.omega1;
        classify_regime(1.0, self.omega2 / s, self.gamma / s).expect("rescaling keeps validity")
    }

    /// Evaluates the envelopes at `t`. Shorthand for [`envelope`].
    pub fn envelope(&self, t: f64) -> EnvelopeValues {
        envelope(self, t)
    }
}

/// Converts laboratory couplings into effective rates,
/// `Ω₁ = η_c g₁ g_c / |Δ|` and `Ω₂ = η_c g₂ g_c / |Δ|`. The cavity decay
/// rate is not determined by the Raman scheme and is passed through.
pub fn from_lab_params(lab: &LabParams, gamma: f64) -> Result<CouplingParams> {
    if lab.delta == 0.0 || !lab.delta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "delta",
            value: lab.delta,
            reason: "detuning must be finite and non-zero",
        });
    }
    if !(lab.eta_c > 0.0) {
        return Err(Error::InvalidParameter {
            name: "eta_c",
            value: lab.eta_c,
            reason: "Lamb-Dicke parameter must be positive",
        });
    }
    for (name, value) in [("g1", lab.g1), ("g2", lab.g2), ("gc", lab.gc)] {
        if !(value >= 0.0) {
            return Err(Error::InvalidParameter {
                name,
                value,
                reason: "coupling must be non-negative",
            });
        }
    }
    let scale = lab.eta_c * lab.gc / lab.delta.abs();
    classify_regime(scale * lab.g1, scale * lab.g2, gamma)
}

pub fn classify_regime(omega1: f64, omega2: f64, gamma: f64) -> Result<CouplingParams> {
    if !(omega1 > 0.0) || !omega1.is_finite() {
        return Err(Error::InvalidParameter {
            name: "omega1",
            value: omega1,
            reason: "must be positive and finite",
        });
    }
    if !(omega2 >= 0.0) || !omega2.is_finite() {
        return Err(Error::InvalidParameter {
            name: "omega2",
            value: omega2,
            reason: "must be non-negative and finite",
        });
    }
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidParameter {
            name: "gamma",
            value: gamma,
            reason: "must be non-negative and finite",
        });
    }

    let lambda0_sq = omega1 * omega1 - omega2 * omega2;
    let lambda_sq = lambda0_sq - gamma * gamma / 16.0;
    let eps = DEGENERATE_EPS * omega1 * omega1;
    let regime = if (omega1 - omega2).abs() <= EQUAL_COUPLING_EPS * omega1 {
        Regime::EqualCoupling
    } else if lambda_sq > eps {
        Regime::Oscillatory
    } else if lambda_sq < -eps {
        Regime::Overdamped
    } else {
        Regime::Degenerate
    };

    Ok(CouplingParams {
        omega1,
        omega2,
        gamma,
        lambda_sq,
        lambda0_sq,
        regime,
    })
}

/// Evaluates `f`, `g`, `h` at `t ≥ 0`.
///
/// The branch is selected from the sign of `Λ²`, not from the regime tag,
/// so the equal-coupling case falls through to whichever closed form its
/// `Λ² = −γ²/16` selects. This reproduces `f ≡ 1` and
/// `g = (2Ω/γ)(1 − e^{−γt/2})` exactly.
pub fn envelope(params: &CouplingParams, t: f64) -> EnvelopeValues {
    debug_assert!(t >= 0.0, "envelope evaluated at negative time");
    let quarter = params.gamma / 4.0;
    let (c, s) = kernel(params, t);
    EnvelopeValues {
        t,
        f: c + quarter * s,
        g: params.omega2 * s,
        h: c - quarter * s,
    }
}

/// `(c, s)` with `c = cos(Λt)·e^{−γt/4}` and `s = sin(Λt)/Λ·e^{−γt/4}`
/// (and their hyperbolic or polynomial continuations). `g = Ω₂ s`, so `s`
/// stays finite when `Ω₂ → 0`.
pub(crate) fn kernel(params: &CouplingParams, t: f64) -> (f64, f64) {
    let quarter = params.gamma / 4.0;
    let eps = DEGENERATE_EPS * params.omega1 * params.omega1;
    if params.lambda_sq > eps {
        let damping = -quarter * t;
        if damping < UNDERFLOW_EXPONENT {
            (0.0, 0.0)
        } else {
            let lambda = params.lambda_sq.sqrt();
            let e = damping.exp();
            ((lambda * t).cos() * e, (lambda * t).sin() / lambda * e)
        }
    } else if params.lambda_sq < -eps {
        let kappa = (-params.lambda_sq).sqrt();
        let lead = (kappa - quarter) * t;
        if lead < UNDERFLOW_EXPONENT {
            (0.0, 0.0)
        } else {
            // cosh and sinh folded into the damping factor to avoid overflow
            // of the individual exponentials.
            let grow = lead.exp();
            let ratio = (-2.0 * kappa * t).exp();
            (
                0.5 * grow * (1.0 + ratio),
                -0.5 * grow * (-2.0 * kappa * t).exp_m1() / kappa,
            )
        }
    } else {
        let damping = -quarter * t;
        if damping < UNDERFLOW_EXPONENT {
            (0.0, 0.0)
        } else {
            let e = damping.exp();
            (e, t * e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn regime_examples() {
        let p = classify_regime(1.0, 0.6, 0.4).unwrap();
        assert_eq!(p.regime, Regime::Oscillatory);
        assert_relative_eq!(p.lambda_sq, 0.63, epsilon = 1e-15);

        assert_eq!(
            classify_regime(1.0, 1.0, 0.4).unwrap().regime,
            Regime::EqualCoupling
        );

        let p = classify_regime(1.0, 0.99, 0.8).unwrap();
        assert_eq!(p.regime, Regime::Overdamped);
        assert!(p.lambda_sq < 0.0);

        // Λ² = 1 − 0.25 − 12/16 = 0
        let p = classify_regime(1.0, 0.5, 12f64.sqrt()).unwrap();
        assert_eq!(p.regime, Regime::Degenerate);
    }

    #[test]
    fn rejects_bad_rates() {
        assert!(classify_regime(0.0, 0.5, 0.1).is_err());
        assert!(classify_regime(-1.0, 0.5, 0.1).is_err());
        assert!(classify_regime(1.0, -0.5, 0.1).is_err());
        assert!(classify_regime(1.0, 0.5, -0.1).is_err());
        assert!(classify_regime(f64::NAN, 0.5, 0.1).is_err());
    }

    #[test]
    fn q_needs_parametric_drive() {
        assert_eq!(classify_regime(1.0, 0.0, 0.1).unwrap().q(), None);
        assert_eq!(classify_regime(1.0, 0.5, 0.1).unwrap().q(), Some(2.0));
    }

    fn lab() -> LabParams {
        let g1 = 2.0 * PI * 10.0e6;
        LabParams {
            eta_c: 0.2,
            g1,
            g2: 0.6 * g1,
            gc: 2.0 * PI * 6.0e6,
            delta: 5.0 * g1,
        }
    }

    #[test]
    fn lab_conversion_matches_experimental_band() {
        let l = lab();
        let p = from_lab_params(&l, 0.02 * l.gc).unwrap();
        let ratio = p.gamma / p.omega1;
        assert_relative_eq!(ratio, 0.5, epsilon = 1e-12);
        assert!((0.4..=1.0).contains(&ratio));
    }

    #[test]
    fn lab_conversion_edge_cases() {
        let mut l = lab();
        l.g2 = 0.0;
        assert_eq!(from_lab_params(&l, 0.0).unwrap().omega2, 0.0);

        let l = lab();
        let p = from_lab_params(&l, 0.0).unwrap();
        let doubled = from_lab_params(
            &LabParams {
                delta: 2.0 * l.delta,
                ..l
            },
            0.0,
        )
        .unwrap();
        assert_relative_eq!(doubled.omega1, p.omega1 / 2.0, max_relative = 1e-15);
        assert_relative_eq!(doubled.omega2, p.omega2 / 2.0, max_relative = 1e-15);
        assert_relative_eq!(doubled.q().unwrap(), p.q().unwrap(), max_relative = 1e-15);

        // Sign of Δ does not matter.
        let neg = from_lab_params(
            &LabParams {
                delta: -l.delta,
                ..l
            },
            0.0,
        )
        .unwrap();
        assert_eq!(neg.omega1, p.omega1);

        assert!(from_lab_params(&LabParams { delta: 0.0, ..l }, 0.0).is_err());
    }

    #[test]
    fn initial_values() {
        for (o2, g) in [
            (0.6, 0.4),
            (0.99, 0.8),
            (1.0, 0.4),
            (0.5, 12f64.sqrt()),
            (1.4, 0.3),
        ] {
            let e = envelope(&classify_regime(1.0, o2, g).unwrap(), 0.0);
            assert_eq!((e.f, e.g, e.h), (1.0, 0.0, 1.0));
        }
    }

    #[test]
    fn half_period_values() {
        let p = classify_regime(1.0, 0.6, 0.4).unwrap();
        let lambda = 0.63f64.sqrt();
        let t = PI / lambda;
        let e = envelope(&p, t);
        let expect = -(-0.4 * PI / (4.0 * lambda)).exp();
        assert_relative_eq!(e.f, expect, epsilon = 1e-14);
        assert_relative_eq!(e.h, expect, epsilon = 1e-14);
        assert!(e.g.abs() < 1e-15);
    }

    #[test]
    fn equal_coupling_closed_form() {
        let (omega, gamma) = (1.0, 0.4);
        let p = classify_regime(omega, omega, gamma).unwrap();
        for i in 0..50 {
            let t = 0.2 * i as f64;
            let e = envelope(&p, t);
            assert_relative_eq!(e.f, 1.0, epsilon = 1e-12);
            let g = 2.0 * omega / gamma * (1.0 - (-gamma * t / 2.0).exp());
            assert_relative_eq!(e.g, g, epsilon = 1e-12);
        }
    }

    #[test]
    fn large_time_underflow_is_exact_zero() {
        let p = classify_regime(1.0, 0.6, 0.4).unwrap();
        let e = envelope(&p, 1.0e5);
        assert_eq!((e.f, e.g, e.h), (0.0, 0.0, 0.0));
    }

    #[test]
    fn normalization_rescales_time() {
        let p = classify_regime(2.0, 1.2, 0.8).unwrap();
        let n = p.normalized();
        assert_eq!(n.omega1, 1.0);
        let (a, b) = (envelope(&p, 0.75), envelope(&n, 1.5));
        assert_relative_eq!(a.f, b.f, epsilon = 1e-14);
        assert_relative_eq!(a.g, b.g, epsilon = 1e-14);
    }
}
