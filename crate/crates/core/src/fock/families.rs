// Copyright 2026 The ioncav Authors
// SPDX-License-Identifier: Apache-2.0

//! The `R^{m,n}` and `Q^{m,n}` operator families.
//!
//! `R^{m,n}(n̄)` is built twice: from its closed form with Jacobi sums
//! ([`r_operator`]) and by raising the thermal state with the ladder
//! superoperators `M₊X = a†X − Xa†`, `N₊X = Xa − aX` ([`raise_superop`]).
//! This sign of `N₊` is the one for which `[N₋, N₊] = 1` with `N₋X = Xa†`.

use num_complex::Complex64;

use super::special::{c_coefficient, jacobi_terms, ln_factorial, signed_log_sum};
use super::{ladder, squeeze_op, CMatrix, FockOperator};
use crate::error::{Error, Result};

/// Entries below this fraction of the largest one count as unoccupied when
/// checking headroom in [`raise_superop`].
const OCCUPATION_EPS: f64 = 1e-13;

fn check_order(m: usize, n: usize) -> Result<()> {
    if m + n > 60 {
        return Err(Error::Index(format!(
            "operator order m + n = {} exceeds 60",
            m + n
        )));
    }
    Ok(())
}

/// Closed form of `R^{m,n}(n̄)` on `dim` levels.
///
/// For `m ≥ n` the nonzero entries are
/// `⟨k+m−n|R|k⟩ = √(n! k!/(m! (k+m−n)!)) (n̄+1)^{−(m+1)} P_m^{k,k−n}(n̄/(n̄+1))`;
/// `R^{n,m} = (R^{m,n})†`. `R^{0,0}` is the thermal state.
pub fn r_operator(m: usize, n: usize, n_bar: f64, dim: usize) -> Result<FockOperator> {
    check_order(m, n)?;
    if dim < 2 {
        return Err(Error::Index(format!("truncation dimension {dim} < 2")));
    }
    if !(n_bar >= 0.0) || !n_bar.is_finite() {
        return Err(Error::InvalidParameter {
            name: "n_bar",
            value: n_bar,
            reason: "mean occupation must be finite and non-negative",
        });
    }
    if m < n {
        return Ok(r_operator(n, m, n_bar, dim)?.adjoint());
    }
    let x = n_bar / (n_bar + 1.0);
    let ln_prefactor = -((m + 1) as f64) * (n_bar + 1.0).ln();
    let shift = m - n;
    let mut out = CMatrix::zeros(dim, dim);
    for k in 0..dim.saturating_sub(shift) {
        let ln_norm =
            0.5 * (ln_factorial(n) + ln_factorial(k) - ln_factorial(m) - ln_factorial(k + shift));
        let terms = jacobi_terms(m, k, k as i64 - n as i64, x);
        let value = signed_log_sum(&terms, ln_norm + ln_prefactor);
        out[(k + shift, k)] = Complex64::new(value, 0.0);
    }
    FockOperator::from_matrix(out)
}

/// Last occupied level (exclusive) of a matrix, using [`OCCUPATION_EPS`].
fn occupied_levels(m: &CMatrix) -> usize {
    let peak = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return 0;
    }
    let cut = peak * OCCUPATION_EPS;
    let n = m.nrows();
    let mut top = 0;
    for c in 0..n {
        for r in 0..n {
            if m[(r, c)].norm() > cut {
                top = top.max(r.max(c) + 1);
            }
        }
    }
    top
}

/// `(N₊ⁿ/√n!)(M₊ᵐ/√m!) op` with `M₊X = a†X − Xa†` and `N₊X = Xa − aX`.
///
/// Each application corrupts one more row and column at the truncation
/// edge, so `op` must leave `m + n` levels of headroom.
///
/// # Errors
///
/// [`Error::Headroom`] when `op` occupies more than `dim − m − n` levels.
pub fn raise_superop(op: &FockOperator, m: usize, n: usize) -> Result<FockOperator> {
    check_order(m, n)?;
    let dim = op.dim();
    let occupied = occupied_levels(op.matrix());
    if occupied + m + n > dim {
        return Err(Error::Headroom(format!(
            "operator occupies {occupied} of {dim} levels, raising by {} needs more room",
            m + n
        )));
    }
    let a = ladder(dim)?.into_matrix();
    let ad = a.adjoint();
    let mut x = op.matrix().clone();
    for _ in 0..m {
        x = &ad * &x - &x * &ad;
    }
    for _ in 0..n {
        x = &x * &a - &a * &x;
    }
    let norm = (-0.5 * (ln_factorial(m) + ln_factorial(n))).exp();
    FockOperator::from_matrix(x.scale(norm))
}

/// Weights `(k, C_k^{m,n}(ξ))` of `R^{m+n−k,k}` inside `Q^{m,n}(n̄, ξ)`.
pub(crate) fn q_weights(m: usize, n: usize, xi: f64) -> Result<Vec<(usize, f64)>> {
    check_order(m, n)?;
    let mut out = Vec::with_capacity(m + n + 1);
    for k in 0..=m + n {
        let c = c_coefficient(m, n, k, xi)?;
        if c != 0.0 {
            out.push((k, c));
        }
    }
    Ok(out)
}

/// `Q^{m,n}(n̄, ξ) = S(ξ) [Σ_k C_k^{m,n} R^{m+n−k,k}(n̄)] S(ξ)†` on `dim`
/// levels. `Q^{0,0}` is the squeezed thermal state.
///
/// The result is only accurate away from the truncation edge; callers
/// needing a faithful `N`-level block build on a larger space and crop.
pub fn q_operator(m: usize, n: usize, n_bar: f64, xi: f64, dim: usize) -> Result<FockOperator> {
    let mut core = CMatrix::zeros(dim, dim);
    for (k, c) in q_weights(m, n, xi)? {
        core += r_operator(m + n - k, k, n_bar, dim)?.matrix().scale(c);
    }
    let s = squeeze_op(xi, dim)?;
    FockOperator::from_matrix(s.conjugate(&core))
}
