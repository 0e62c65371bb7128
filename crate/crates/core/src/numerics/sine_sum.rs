//! Closed form of `Σ_{n∈Z} sin((2n+a)q)/(2n+a)`.
//!
//! On the window `mπ < q < (m+1)π` the series equals
//! `π/(2 sin(πa/2)) · sin((2m+1)πa/2)`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

const BOUNDARY_TOL: f64 = 1e-12;

/// Window-constant value for window index `m`.
pub fn sine_sum_window(a: f64, m: u64) -> Result<f64> {
    let s = (FRAC_PI_2 * a).sin();
    if s.abs() < BOUNDARY_TOL {
        return Err(Error::invalid("a", format!("sin(πa/2) vanishes at a = {a}")));
    }
    Ok(FRAC_PI_2 / s * ((2 * m + 1) as f64 * FRAC_PI_2 * a).sin())
}

/// The `a → 0` limit, where the `n = 0` term is read as `q` itself:
/// `(2m+1)π/2` on window `m`.
pub fn sine_sum_window_even(m: u64) -> f64 {
    (2 * m + 1) as f64 * FRAC_PI_2
}

/// Index `m` of the window containing `q > 0`, rejecting points within
/// `1e-12` of a window edge.
pub fn window_index(q: f64) -> Result<u64> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::invalid("q", "must be positive and finite"));
    }
    let m = (q / PI).floor();
    if q - m * PI < BOUNDARY_TOL || (m + 1.0) * PI - q < BOUNDARY_TOL {
        return Err(Error::invalid("q", format!("q = {q} lies on a window boundary mπ")));
    }
    Ok(m as u64)
}

/// `Σ_{n∈Z} sin((2n+a)q)/(2n+a)` for `q` off the lattice `mπ`.
///
/// Odd in `q`; negative `q` is handled by symmetry.
pub fn closed_sine_sum(a: f64, q: f64) -> Result<f64> {
    if q < 0.0 {
        return closed_sine_sum(a, -q).map(|v| -v);
    }
    let m = window_index(q)?;
    sine_sum_window(a, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Direct partial sums over |n| <= N, averaged over a run of N to damp the
    // O(1/N) oscillation of the truncation error.
    fn averaged_direct(a: f64, q: f64, n_max: i64, window: i64) -> f64 {
        let term = |n: i64| {
            let c = 2.0 * n as f64 + a;
            (c * q).sin() / c
        };
        let mut partial = term(0);
        for n in 1..(n_max - window) {
            partial += term(n) + term(-n);
        }
        let mut acc = 0.0;
        for n in (n_max - window)..n_max {
            partial += term(n) + term(-n);
            acc += partial;
        }
        acc / window as f64
    }

    #[test]
    fn a_one_collapses() {
        assert!((closed_sine_sum(1.0, 1.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((closed_sine_sum(1.0, 4.0).unwrap() + FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn matches_truncated_series() {
        let direct = averaged_direct(0.3, 2.0, 400_000, 2_000);
        let closed = closed_sine_sum(0.3, 2.0).unwrap();
        assert!((direct - closed).abs() < 1e-6, "{direct} vs {closed}");
    }

    #[test]
    fn window_sign_pattern() {
        for m in 0..=5u64 {
            let q = (m as f64 + 0.37) * PI;
            let direct = averaged_direct(0.3, q, 400_000, 2_000);
            let closed = closed_sine_sum(0.3, q).unwrap();
            assert!((direct - closed).abs() < 1e-6, "m={m}: {direct} vs {closed}");
        }
    }

    #[test]
    fn rejects_invalid_inputs() {
        assert!(closed_sine_sum(2.0, 1.0).is_err());
        assert!(closed_sine_sum(0.0, 1.0).is_err());
        assert!(closed_sine_sum(0.3, PI).is_err());
        assert!(closed_sine_sum(0.3, 2.0 * PI + 1e-13).is_err());
        assert!(closed_sine_sum(0.3, 2.0 * PI + 1e-9).is_ok());
    }

    #[test]
    fn even_limit_matches_small_a() {
        for m in 0..4 {
            let lim = sine_sum_window_even(m);
            let near = sine_sum_window(1e-7, m).unwrap();
            assert!((lim - near).abs() < 1e-9 * lim);
        }
    }
}
