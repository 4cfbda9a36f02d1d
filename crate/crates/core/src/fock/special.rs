// Copyright 2026 The ioncav Authors
// SPDX-License-Identifier: Apache-2.0

//! Factorial sums evaluated in log space with explicit signs.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest argument of the cached log-factorial table.
const LN_FACT_TABLE: usize = 1024;

fn table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LN_FACT_TABLE + 1);
        let mut acc = 0.0f64;
        t.push(0.0);
        for k in 1..=LN_FACT_TABLE {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// `ln n!`. Panics beyond the table size, which no caller reaches.
pub fn ln_factorial(n: usize) -> f64 {
    table()[n]
}

/// Signed sum of terms given as `(sign, ln|term|)`, scaled by the largest
/// magnitude so that large partial terms do not overflow.
pub(crate) fn signed_log_sum(terms: &[(f64, f64)], ln_scale: f64) -> f64 {
    let peak = terms
        .iter()
        .filter(|(s, _)| *s != 0.0)
        .map(|(_, l)| *l)
        .fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return 0.0;
    }
    let sum: f64 = terms.iter().map(|(s, l)| s * (l - peak).exp()).sum();
    sum * (peak + ln_scale).exp()
}

/// `(sign, ln|term_j|)` for the terms of [`jacobi_poly`].
pub(crate) fn jacobi_terms(m: usize, k: usize, l: i64, x: f64) -> Vec<(f64, f64)> {
    let start = l.max(0) as usize;
    let ln_x = x.ln();
    (start..=k)
        .map(|j| {
            let jl = (j as i64 - l) as usize;
            let sign = if jl.is_multiple_of(2) { 1.0 } else { -1.0 };
            let ln_pow = if j == 0 { 0.0 } else { j as f64 * ln_x };
            if j > 0 && x == 0.0 {
                return (0.0, f64::NEG_INFINITY);
            }
            let ln = ln_factorial(j + m) - ln_factorial(jl) - ln_factorial(k - j) - ln_factorial(j)
                + ln_pow;
            (sign, ln)
        })
        .collect()
}

fn check_jacobi(m: usize, k: usize, l: i64, x: f64) -> Result<()> {
    if l > k as i64 {
        return Err(Error::Index(format!(
            "jacobi index l = {l} exceeds k = {k}"
        )));
    }
    if m + k > LN_FACT_TABLE / 2 || (k as i64 - l) as usize > LN_FACT_TABLE / 2 {
        return Err(Error::Index(format!(
            "jacobi indices ({m}, {k}, {l}) too large"
        )));
    }
    if !(0.0..1.0).contains(&x) {
        return Err(Error::InvalidParameter {
            name: "x",
            value: x,
            reason: "jacobi argument must lie in [0, 1)",
        });
    }
    Ok(())
}

/// `P_m^{k,l}(x) = Σ_{j=max(0,l)}^{k} (−1)^{j−l} (j+m)! / ((j−l)!(k−j)!) · x^j/j!`
pub fn jacobi_poly(m: usize, k: usize, l: i64, x: f64) -> Result<f64> {
    check_jacobi(m, k, l, x)?;
    Ok(signed_log_sum(&jacobi_terms(m, k, l, x), 0.0))
}

/// Expansion coefficient of the squeezed operator family,
/// `C_k^{m,n}(ξ) = √((m+n−k)! k!/(m! n!)) Σ_l C(m, k−l) C(n, l)
/// cosh^{m−k+2l}ξ sinh^{n+k−2l}ξ` for `max(0, k−m) ≤ l ≤ min(n, k)`.
///
/// # Errors
///
/// Rejects `k > m + n` and orders above 60.
pub fn c_coefficient(m: usize, n: usize, k: usize, xi: f64) -> Result<f64> {
    if k > m + n {
        return Err(Error::Index(format!(
            "c_coefficient k = {k} exceeds m + n = {}",
            m + n
        )));
    }
    if m + n > 60 {
        return Err(Error::Index(format!(
            "c_coefficient order {} exceeds 60",
            m + n
        )));
    }
    let ln_ch = xi.cosh().ln();
    let sh = xi.sinh();
    let ln_sh = sh.abs().ln();
    let lo = k.saturating_sub(m);
    let hi = n.min(k);
    let mut terms = Vec::with_capacity(n + 1);
    for l in lo..=hi {
        let p_cosh = m + 2 * l - k;
        let p_sinh = n + k - 2 * l;
        if p_sinh > 0 && sh == 0.0 {
            continue;
        }
        let sign = if sh < 0.0 && p_sinh % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        let ln_binom = ln_factorial(m) - ln_factorial(k - l) - ln_factorial(m + l - k)
            + ln_factorial(n)
            - ln_factorial(l)
            - ln_factorial(n - l);
        let ln_pow = p_cosh as f64 * ln_ch
            + if p_sinh > 0 {
                p_sinh as f64 * ln_sh
            } else {
                0.0
            };
        terms.push((sign, ln_binom + ln_pow));
    }
    let ln_pre =
        0.5 * (ln_factorial(k) + ln_factorial(m + n - k) - ln_factorial(m) - ln_factorial(n));
    Ok(signed_log_sum(&terms, ln_pre))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn log_factorials() {
        assert_eq!(ln_factorial(0), 0.0);
        assert_eq!(ln_factorial(1), 0.0);
        assert_relative_eq!(ln_factorial(5), 120f64.ln(), epsilon = 1e-14);
        assert_relative_eq!(
            ln_factorial(20),
            2432902008176640000f64.ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn jacobi_examples() {
        for x in [0.0, 0.2, 0.7, 0.99] {
            assert_relative_eq!(jacobi_poly(0, 0, 0, x).unwrap(), 1.0, epsilon = 1e-15);
            assert_relative_eq!(
                jacobi_poly(1, 1, 0, x).unwrap(),
                1.0 - 2.0 * x,
                epsilon = 1e-14
            );
            for k in 0..8 {
                assert_relative_eq!(
                    jacobi_poly(0, k, k as i64, x).unwrap(),
                    x.powi(k as i32),
                    epsilon = 1e-14
                );
            }
        }
        assert!(jacobi_poly(1, 1, 0, 0.5).unwrap().abs() < 1e-15);
    }

    #[test]
    fn jacobi_rejects_bad_input() {
        assert!(jacobi_poly(0, 1, 2, 0.5).is_err());
        assert!(jacobi_poly(0, 1, 0, 1.0).is_err());
        assert!(jacobi_poly(0, 1, 0, -0.1).is_err());
    }

    #[test]
    fn jacobi_matches_plain_sum() {
        fn fact(n: usize) -> f64 {
            (1..=n).map(|k| k as f64).product()
        }
        for (m, k, l, x) in [(2, 3, -1, 0.3f64), (3, 4, 2, 0.6), (1, 5, -3, 0.45)] {
            let mut s = 0.0;
            for j in (l.max(0) as usize)..=k {
                let jl = (j as i64 - l) as usize;
                let sign = if jl.is_multiple_of(2) { 1.0 } else { -1.0 };
                s += sign * fact(j + m) / (fact(jl) * fact(k - j)) * x.powi(j as i32) / fact(j);
            }
            assert_relative_eq!(jacobi_poly(m, k, l, x).unwrap(), s, max_relative = 1e-12);
        }
    }

    #[test]
    fn c_coefficient_examples() {
        for xi in [-0.8, 0.0, 0.3, 1.1] {
            assert_relative_eq!(c_coefficient(0, 0, 0, xi).unwrap(), 1.0, epsilon = 1e-15);
            assert_relative_eq!(
                c_coefficient(0, 1, 1, xi).unwrap(),
                xi.cosh(),
                epsilon = 1e-14
            );
            assert_relative_eq!(
                c_coefficient(0, 1, 0, xi).unwrap(),
                xi.sinh(),
                epsilon = 1e-14
            );
        }
        for m in 0..4 {
            for n in 0..4 {
                for k in 0..=m + n {
                    let expect = if k == n { 1.0 } else { 0.0 };
                    assert_eq!(c_coefficient(m, n, k, 0.0).unwrap(), expect);
                }
            }
        }
        assert!(c_coefficient(1, 1, 3, 0.2).is_err());
    }
}
