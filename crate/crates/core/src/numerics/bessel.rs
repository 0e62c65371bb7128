//! Bessel functions of half-integer order `ν = l + 1/2`.
//!
//! `J` is built by forward recurrence when every requested order is below the
//! argument and by Miller's backward recurrence otherwise, normalized against
//! the closed forms of `J_{±1/2}`. The modified function is returned scaled by
//! `e^{-x}`; forward recurrence is used only where the growth of the `K`
//! component stays bounded (`l_max² <= 3x`), otherwise backward recurrence
//! normalized to `I_{1/2}`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const RESCALE_ABOVE: f64 = 1e200;

/// Fills `out[l] = J_{l+1/2}(x)` for `l = 0..out.len()`. Requires `x > 0`.
pub fn fill_half_order_j(x: f64, out: &mut [f64]) {
    debug_assert!(x > 0.0);
    let n = out.len();
    if n == 0 {
        return;
    }
    let norm = (2.0 / (PI * x)).sqrt();
    let (sin, cos) = x.sin_cos();
    let l_max = n - 1;

    if (l_max as f64) < x {
        out[0] = norm * sin;
        if n > 1 {
            out[1] = norm * (sin / x - cos);
        }
        for l in 1..l_max {
            // J_{ν+1} = (2ν/x) J_ν - J_{ν-1}, ν = l + 1/2
            out[l + 1] = (2 * l + 1) as f64 / x * out[l] - out[l - 1];
        }
        return;
    }

    let start = l_max + 20 + (50.0 * l_max.max(1) as f64).sqrt().ceil() as usize;
    let mut above = 0.0; // y_{l+1}
    let mut here = 1e-30; // y_l
    for l in (1..=start).rev() {
        if l <= l_max {
            out[l] = here;
        }
        let below = (2 * l + 1) as f64 / x * here - above;
        above = here;
        here = below;
        if here.abs() > RESCALE_ABOVE {
            let k = 1.0 / RESCALE_ABOVE;
            here *= k;
            above *= k;
            for v in out.iter_mut().skip(l.min(n)) {
                *v *= k;
            }
        }
    }
    out[0] = here;
    // One more step gives J_{-1/2} = cos-normalized companion.
    let minus_half = here / x - above;
    let scale = if sin.abs() >= cos.abs() { norm * sin / here } else { norm * cos / minus_half };
    for v in out.iter_mut() {
        *v *= scale;
    }
}

/// Fills `out[l] = I_{l+1/2}(x) e^{-x}` for `l = 0..out.len()`. Requires `x >= 0`.
pub fn fill_half_order_i_scaled(x: f64, out: &mut [f64]) {
    debug_assert!(x >= 0.0);
    let n = out.len();
    if n == 0 {
        return;
    }
    if x == 0.0 {
        out.fill(0.0);
        return;
    }
    let root = (2.0 * PI * x).sqrt();
    let half = -(-2.0 * x).exp_m1() / root;
    let l_max = n - 1;

    if x >= 10.0 && (l_max * l_max) as f64 <= 3.0 * x {
        out[0] = half;
        if n > 1 {
            let e2 = (-2.0 * x).exp();
            out[1] = ((1.0 + e2) - (1.0 - e2) / x) / root;
        }
        for l in 1..l_max {
            // I_{ν+1} = I_{ν-1} - (2ν/x) I_ν
            out[l + 1] = out[l - 1] - (2 * l + 1) as f64 / x * out[l];
        }
        return;
    }

    let start = ((l_max * l_max) as f64 + 40.0 * x).sqrt().ceil() as usize + 20;
    let mut above = 0.0;
    let mut here = 1e-30;
    for l in (1..=start).rev() {
        if l <= l_max {
            out[l] = here;
        }
        // I_{ν-1} = I_{ν+1} + (2ν/x) I_ν
        let below = above + (2 * l + 1) as f64 / x * here;
        above = here;
        here = below;
        if here.abs() > RESCALE_ABOVE {
            let k = 1.0 / RESCALE_ABOVE;
            here *= k;
            above *= k;
            for v in out.iter_mut().skip(l.min(n)) {
                *v *= k;
            }
        }
    }
    out[0] = here;
    let scale = half / here;
    for v in out.iter_mut() {
        *v *= scale;
    }
}

pub fn half_order_j(x: f64, l_max: usize) -> Vec<f64> {
    let mut out = vec![0.0; l_max + 1];
    fill_half_order_j(x, &mut out);
    out
}

pub fn half_order_i_scaled(x: f64, l_max: usize) -> Vec<f64> {
    let mut out = vec![0.0; l_max + 1];
    fill_half_order_i_scaled(x, &mut out);
    out
}

/// `(J_{n+1/2}(x), I_{n+1/2}(x)·e^{-x})` for `x > 0`.
pub fn bessel_half(n: usize, x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::invalid("x", format!("half-order Bessel requires x > 0, got {x}")));
    }
    let j = half_order_j(x, n);
    let i = half_order_i_scaled(x, n);
    Ok((j[n], i[n]))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Ascending series Σ (±1)^k (x/2)^{2k+ν} / (k! Γ(k+ν+1)), ν = n + 1/2.
    fn ascending(n: usize, x: f64, alternating: bool) -> f64 {
        let nu = n as f64 + 0.5;
        // Γ(n + 3/2) = (2n+1)!! √π / 2^{n+1}
        let mut gamma = PI.sqrt() / 2.0;
        for k in 1..=n {
            gamma *= k as f64 + 0.5;
        }
        let mut term = (x / 2.0).powf(nu) / gamma;
        let mut sum = term;
        for k in 1..200 {
            let kf = k as f64;
            term *= (x / 2.0).powi(2) / (kf * (kf + nu));
            if alternating {
                term = -term;
            }
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    }

    #[test]
    fn closed_form_half() {
        let (j, _) = bessel_half(0, PI).unwrap();
        assert!(j.abs() < 1e-15);
        for &x in &[0.3, 1.7, 12.0, 80.0] {
            let (j, i) = bessel_half(0, x).unwrap();
            assert!((j - (2.0 / (PI * x)).sqrt() * x.sin()).abs() < 1e-14);
            let exact = (2.0 / (PI * x)).sqrt() * x.sinh() * (-x).exp();
            assert!((i - exact).abs() < 1e-14 * exact);
        }
    }

    #[test]
    fn scaled_i_asymptote() {
        let x = 1e6;
        let (_, i) = bessel_half(0, x).unwrap();
        assert!((i - (1.0 / (2.0 * PI * x)).sqrt()).abs() < 1e-12 * i);
    }

    #[test]
    fn ascending_series_oracle() {
        let (j, i) = bessel_half(3, 2.5).unwrap();
        let j_ref = ascending(3, 2.5, true);
        let i_ref = ascending(3, 2.5, false) * (-2.5f64).exp();
        assert!((j - j_ref).abs() < 1e-14 * j_ref.abs(), "{j} vs {j_ref}");
        assert!((i - i_ref).abs() < 1e-14 * i_ref.abs(), "{i} vs {i_ref}");
        for n in [0, 1, 5, 12] {
            for &x in &[0.05, 0.9, 4.0] {
                let (j, i) = bessel_half(n, x).unwrap();
                let jr = ascending(n, x, true);
                let ir = ascending(n, x, false) * (-x).exp();
                assert!((j - jr).abs() <= 1e-12 * jr.abs(), "J n={n} x={x}");
                assert!((i - ir).abs() <= 1e-12 * ir.abs(), "I n={n} x={x}");
            }
        }
    }

    #[test]
    fn three_term_recurrence() {
        let mut x = 0.1;
        while x <= 50.0 {
            let j = half_order_j(x, 21);
            let i = half_order_i_scaled(x, 21);
            for l in 1..=20 {
                let c = (2 * l + 1) as f64 / x;
                let scale_j = j[l + 1].abs() + (c * j[l]).abs() + j[l - 1].abs();
                assert!((j[l + 1] - (c * j[l] - j[l - 1])).abs() <= 1e-9 * scale_j, "J l={l} x={x}");
                let scale_i = i[l + 1].abs() + (c * i[l]).abs() + i[l - 1].abs();
                assert!((i[l + 1] - (i[l - 1] - c * i[l])).abs() <= 1e-9 * scale_i, "I l={l} x={x}");
            }
            x *= 1.37;
        }
    }

    #[test]
    fn forward_and_backward_agree_at_the_switch() {
        // x just above and below l_max selects different branches.
        let a = half_order_j(30.000_001, 30);
        let b = half_order_j(30.000_001, 31);
        for l in 0..=30 {
            assert!((a[l] - b[l]).abs() < 1e-12, "l={l}");
        }
        let a = half_order_i_scaled(300.0, 30);
        let b = half_order_i_scaled(300.0, 31);
        for l in 0..=30 {
            assert!((a[l] - b[l]).abs() < 1e-13 * a[0], "l={l}");
        }
    }

    #[test]
    fn large_orders_decay() {
        let j = half_order_j(5.0, 60);
        assert!(j[60].abs() < 1e-40);
        let i = half_order_i_scaled(1e-8, 10);
        assert!(i[10] >= 0.0 && i[10] < 1e-80);
    }

    #[test]
    fn rejects_non_positive_argument() {
        assert!(bessel_half(2, 0.0).is_err());
        assert!(bessel_half(2, -1.0).is_err());
    }
}
