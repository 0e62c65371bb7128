//! Massless field between Dirichlet plates at `x = ±L_x/2`.
//!
//! Everything is expressed in the dimensionless variables `γ = d/L_x`,
//! `ε = dΔE`, `Λ̃ = d/ΔX` and `q = pL_x`. The image sum over plate
//! reflections is resummed with the sine-series identity on windows
//! `mπ < q < (m+1)π`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::numerics::{
    integrate_panels, laplace_transform, sine_sum_window, sine_sum_window_even, sum_images, sum_images_truncated,
    QuadratureSpec, SeriesSpec,
};
use crate::perturbative::ReducedElements;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// Detectors at `(±d/2, 0, 0)`, separation normal to the plates.
    Perpendicular,
    /// Detectors at `(0, ±d/2, 0)`, separation along the plates.
    Parallel,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirichletParams {
    pub gamma: f64,
    pub eps: f64,
    pub lambda_tilde: f64,
    pub orientation: Orientation,
    pub alpha: f64,
}

impl DirichletParams {
    pub fn new(gamma: f64, eps: f64, lambda_tilde: f64, orientation: Orientation, alpha: f64) -> Result<Self> {
        let params = DirichletParams { gamma, eps, lambda_tilde, orientation, alpha };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::invalid("gamma", format!("must be positive, got {}", self.gamma)));
        }
        if self.orientation == Orientation::Perpendicular && self.gamma >= 1.0 {
            return Err(Error::invalid("gamma", "perpendicular detectors need d < L_x (gamma < 1)"));
        }
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return Err(Error::invalid("eps", format!("must be positive, got {}", self.eps)));
        }
        if !(self.lambda_tilde > 0.0) || !self.lambda_tilde.is_finite() {
            return Err(Error::invalid("lambda_tilde", format!("must be positive, got {}", self.lambda_tilde)));
        }
        if !(self.alpha >= 0.0) {
            return Err(Error::invalid("alpha", "must be non-negative"));
        }
        Ok(())
    }

    /// Upper limit `Q = Λ̃/γ` of the `q` integrals.
    pub fn q_max(&self) -> f64 {
        self.lambda_tilde / self.gamma
    }

    /// `b = ε/γ`, the gap in units of `1/L_x`.
    pub fn b(&self) -> f64 {
        self.eps / self.gamma
    }

    /// Number of complete windows below the cutoff, `floor(Λ̃/(πγ))`.
    pub fn m_max(&self) -> u64 {
        (self.q_max() / PI).floor() as u64
    }
}

/// Treatment of the window containing the cutoff in the closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MmaxRule {
    /// Complete windows below the cutoff plus the exact partial window.
    Exact,
    /// Complete windows `m = 0..=floor(Λ̃/(πγ))`.
    Floor,
    /// Complete windows `m = 0..=ceil(Λ̃/(πγ))`.
    Ceil,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PerpendicularMethod {
    ClosedForm(MmaxRule),
    Integral,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DirichletElements {
    pub elements: ReducedElements,
    pub m_max: u64,
    /// Image terms used by the parallel sum.
    pub image_terms: Option<usize>,
    pub warnings: Vec<String>,
}

fn finish(params: &DirichletParams, p: f64, f: f64, image_terms: Option<usize>) -> Result<DirichletElements> {
    let a2 = params.alpha * params.alpha;
    let m_max = params.m_max();
    let mut warnings = Vec::new();
    if m_max == 0 {
        warnings.push(format!("cutoff below the first window: Λ̃/(πγ) = {}", params.q_max() / PI));
    }
    Ok(DirichletElements { elements: ReducedElements::symmetric(a2 * p, a2 * f)?, m_max, image_terms, warnings })
}

// (2m+1) − sin((2m+1)δ)/sin δ, by series when (2m+1)δ is small.
fn occupation_bracket(m: u64, delta: f64) -> f64 {
    let n = (2 * m + 1) as f64;
    let x = n * delta;
    if x < 1e-2 {
        // sin(nδ) − n sin δ = Σ_{k>=1} (−1)^k δ^{2k+1} (n^{2k+1} − n)/(2k+1)!
        let mut sum = 0.0;
        let mut dp = delta;
        let mut np = n;
        let mut fact = 1.0;
        for k in 1..6 {
            dp *= delta * delta;
            np *= n * n;
            fact *= (2 * k) as f64 * (2 * k + 1) as f64;
            let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
            sum += sign * dp * (np - n) / fact;
        }
        -sum / delta.sin()
    } else {
        n - x.sin() / delta.sin()
    }
}

// sin((2m+1)γπ/2)/sin(γπ/2) − (−1)^m, in the cancellation-free form
// −2(−1)^m sin((m+1)δ) sin(mδ)/cos δ.
fn coherence_bracket(m: u64, delta: f64) -> f64 {
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    -2.0 * sign * ((m + 1) as f64 * delta).sin() * (m as f64 * delta).sin() / delta.cos()
}

/// Perpendicular configuration at unit coupling, closed form.
fn perpendicular_closed(params: &DirichletParams, rule: MmaxRule) -> (f64, f64) {
    let (g, eps, b, q) = (params.gamma, params.eps, params.b(), params.q_max());
    let c = b / PI;
    let delta = (1.0 - g) * FRAC_PI_2;
    let ratio = q / PI;
    let (full, partial) = match rule {
        MmaxRule::Exact => (ratio.floor() as u64, true),
        MmaxRule::Floor => (ratio.floor() as u64 + 1, false),
        MmaxRule::Ceil => (ratio.ceil() as u64 + 1, false),
    };
    let mut p = 0.0;
    let mut f = 0.0;
    for m in 0..full {
        let mf = m as f64;
        p += occupation_bracket(m, delta) / ((mf + c) * (mf + c + 1.0));
        f += ((mf + c + 1.0) / (mf + c)).ln() * coherence_bracket(m, delta);
    }
    p /= 8.0 * PI * PI;
    f *= g / (8.0 * PI * eps);
    if partial {
        let lo = full as f64 * PI;
        if q > lo {
            p += (1.0 / (lo + b) - 1.0 / (q + b)) * FRAC_PI_2 * occupation_bracket(full, delta) / (4.0 * PI * PI);
            f += g / (4.0 * PI * PI * eps)
                * ((q + b) / (lo + b)).ln()
                * FRAC_PI_2
                * coherence_bracket(full, delta);
        }
    }
    (p, f)
}

/// Perpendicular configuration at unit coupling: adaptive quadrature in `q`
/// with the image sums replaced window by window.
fn perpendicular_integral(params: &DirichletParams, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let (g, eps, b, q) = (params.gamma, params.eps, params.b(), params.q_max());
    let windows = (q / PI).floor() as u64;
    let mut points: Vec<f64> = (0..=windows).map(|m| m as f64 * PI).collect();
    if q > *points.last().expect("window list starts at 0") {
        points.push(q);
    }
    // Window constants, evaluated once per window.
    let n = points.len() - 1;
    let mut occ = Vec::with_capacity(n);
    let mut coh = Vec::with_capacity(n);
    for m in 0..n as u64 {
        occ.push(sine_sum_window_even(m) - sine_sum_window(g + 1.0, m)?);
        coh.push(sine_sum_window(g, m)? - sine_sum_window(1.0, m)?);
    }
    let window = |x: f64| ((x / PI).floor() as usize).min(n - 1);
    let p = integrate_panels(|x| occ[window(x)] / ((x + b) * (x + b)), &points, spec)?.value;
    let f = integrate_panels(|x| coh[window(x)] / (x + b), &points, spec)?.value;
    Ok((p / (4.0 * PI * PI), f * g / (4.0 * PI * PI * eps)))
}

pub fn dirichlet_elements_perpendicular(
    params: &DirichletParams,
    method: PerpendicularMethod,
    spec: &QuadratureSpec,
) -> Result<DirichletElements> {
    params.validate()?;
    if params.orientation != Orientation::Perpendicular {
        return Err(Error::invalid("orientation", "expected the perpendicular configuration"));
    }
    let (p, f) = match method {
        PerpendicularMethod::ClosedForm(rule) => perpendicular_closed(params, rule),
        PerpendicularMethod::Integral => perpendicular_integral(params, spec)?,
    };
    finish(params, p, f, None)
}

/// `∫₀^Q sin(cq)/(q+b)^k dq` for `k ∈ {1, 2}`, via the rotated-contour
/// Laplace forms of the `[0, ∞)` and `[Q, ∞)` pieces.
fn sine_moment(k: u32, c: f64, b: f64, q: f64, spec: &QuadratureSpec) -> Result<f64> {
    let c2 = c * c;
    let (hs, hc): (Box<dyn Fn(f64) -> f64>, Box<dyn Fn(f64) -> f64>) = if k == 1 {
        (Box::new(move |t| c / (c2 + t * t)), Box::new(move |t| t / (c2 + t * t)))
    } else {
        (Box::new(move |t| t * c / (c2 + t * t)), Box::new(move |t| t * t / (c2 + t * t)))
    };
    let full = laplace_transform(&hs, b, spec)?.value;
    let tail_s = laplace_transform(&hs, q + b, spec)?.value;
    let tail_c = laplace_transform(&hc, q + b, spec)?.value;
    let (s, co) = (c * q).sin_cos();
    Ok(full - (s * tail_c + co * tail_s))
}

struct ParallelKernels {
    gamma: f64,
    b: f64,
    q: f64,
    spec: QuadratureSpec,
}

impl ParallelKernels {
    fn new(params: &DirichletParams, spec: &QuadratureSpec) -> Self {
        // The image sum subtracts nearly equal terms; tighten the inner tolerance.
        let inner = QuadratureSpec { abs_tol: spec.abs_tol * 1e-3, rel_tol: (spec.rel_tol * 1e-3).max(1e-14), ..*spec };
        ParallelKernels { gamma: params.gamma, b: params.b(), q: params.q_max(), spec: inner }
    }

    // (1/c) ∫₀^Q sin(cq)/(q+b)^k dq, with the c → 0 limit for k = 2.
    fn t(&self, k: u32, c: f64) -> Result<f64> {
        if c == 0.0 {
            let (b, q) = (self.b, self.q);
            return Ok(((q + b) / b).ln() + b / (q + b) - 1.0);
        }
        Ok(sine_moment(k, c, self.b, self.q, &self.spec)? / c)
    }

    fn p_term(&self, n: i64) -> Result<f64> {
        Ok(self.t(2, (2 * n).unsigned_abs() as f64)? - self.t(2, (2 * n + 1).unsigned_abs() as f64)?)
    }

    fn f_term(&self, n: i64) -> Result<f64> {
        let g2 = self.gamma * self.gamma;
        let even = ((2 * n) as f64).powi(2) + g2;
        let odd = ((2 * n + 1) as f64).powi(2) + g2;
        Ok(self.t(1, even.sqrt())? - self.t(1, odd.sqrt())?)
    }
}

// Runs a fallible term through an infallible series driver.
fn guarded_sum<T, S>(term: T, sum: S) -> Result<(f64, usize)>
where
    T: Fn(i64) -> Result<f64>,
    S: FnOnce(&mut dyn FnMut(i64) -> f64) -> Result<(f64, usize)>,
{
    let mut failure = None;
    let mut wrapped = |n: i64| match term(n) {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    };
    let out = sum(&mut wrapped);
    match failure {
        Some(e) => Err(e),
        None => out,
    }
}

/// Parallel configuration, image sum driven by `series`.
pub fn dirichlet_elements_parallel(
    params: &DirichletParams,
    spec: &QuadratureSpec,
    series: &SeriesSpec,
) -> Result<DirichletElements> {
    params.validate()?;
    if params.orientation != Orientation::Parallel {
        return Err(Error::invalid("orientation", "expected the parallel configuration"));
    }
    let kernels = ParallelKernels::new(params, spec);
    let (p, np) = guarded_sum(|n| kernels.p_term(n), |t| sum_images(t, series).map(|s| (s.value, s.terms)))?;
    let (f, nf) = guarded_sum(|n| kernels.f_term(n), |t| sum_images(t, series).map(|s| (s.value, s.terms)))?;
    let p = p / (4.0 * PI * PI);
    let f = f * params.gamma / (4.0 * PI * PI * params.eps);
    finish(params, p, f, Some(np.max(nf)))
}

/// Parallel configuration with the image sum cut at `|n| <= n_max`.
pub fn dirichlet_parallel_truncated(
    params: &DirichletParams,
    n_max: usize,
    spec: &QuadratureSpec,
) -> Result<DirichletElements> {
    params.validate()?;
    if params.orientation != Orientation::Parallel {
        return Err(Error::invalid("orientation", "expected the parallel configuration"));
    }
    let kernels = ParallelKernels::new(params, spec);
    let (p, _) = guarded_sum(|n| kernels.p_term(n), |t| Ok((sum_images_truncated(t, n_max), n_max)))?;
    let (f, _) = guarded_sum(|n| kernels.f_term(n), |t| Ok((sum_images_truncated(t, n_max), n_max)))?;
    let p = p / (4.0 * PI * PI);
    let f = f * params.gamma / (4.0 * PI * PI * params.eps);
    finish(params, p, f, Some(n_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn perp(gamma: f64, eps: f64) -> DirichletParams {
        DirichletParams::new(gamma, eps, 1e3, Orientation::Perpendicular, 1.0).unwrap()
    }

    #[test]
    fn brackets_match_direct_forms() {
        for &g in &[0.1, 0.5, 0.9, 0.999] {
            let delta = (1.0 - g) * FRAC_PI_2;
            for m in 0..40u64 {
                let n = (2 * m + 1) as f64;
                let direct_p = n - (n * (g + 1.0) * FRAC_PI_2).sin() / ((g + 1.0) * FRAC_PI_2).sin();
                assert!((occupation_bracket(m, delta) - direct_p).abs() < 1e-9 * n, "g={g} m={m}");
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                let direct_f = (n * g * FRAC_PI_2).sin() / (g * FRAC_PI_2).sin() - sign;
                assert!((coherence_bracket(m, delta) - direct_f).abs() < 1e-9 * n, "g={g} m={m}");
            }
        }
    }

    #[test]
    fn sine_moment_matches_direct_quadrature() {
        let spec = QuadratureSpec::default();
        for &(k, c, b, q) in &[(1u32, 1.3, 0.02, 40.0), (2, 2.0, 0.5, 25.0), (2, 7.0, 0.01, 10.0)] {
            let direct = integrate_panels(
                |x| (c * x).sin() / (x + b).powi(k as i32),
                &(0..=((q * c / PI).ceil() as usize)).map(|j| (j as f64 * PI / c).min(q)).collect::<Vec<_>>(),
                &spec,
            )
            .unwrap()
            .value;
            let lap = sine_moment(k, c, b, q, &spec).unwrap();
            assert_relative_eq!(lap, direct, max_relative = 1e-9);
        }
    }

    #[test]
    fn cutoff_rules_are_ordered() {
        let params = perp(0.5, 0.02);
        let (pe, _) = perpendicular_closed(&params, MmaxRule::Exact);
        let (pf, _) = perpendicular_closed(&params, MmaxRule::Floor);
        let (pc, _) = perpendicular_closed(&params, MmaxRule::Ceil);
        assert!(pe <= pf && pf <= pc);
    }

    #[test]
    fn closed_and_integral_agree() {
        let spec = QuadratureSpec::default();
        let params = perp(0.5, 0.02);
        let a = dirichlet_elements_perpendicular(&params, PerpendicularMethod::ClosedForm(MmaxRule::Exact), &spec)
            .unwrap();
        let b = dirichlet_elements_perpendicular(&params, PerpendicularMethod::Integral, &spec).unwrap();
        assert_relative_eq!(a.elements.p1, b.elements.p1, max_relative = 1e-9);
        assert_relative_eq!(a.elements.f.re, b.elements.f.re, max_relative = 1e-9);
    }

    #[test]
    fn first_window_only_vanishes_with_warning() {
        let params = DirichletParams::new(0.5, 0.02, 1.0, Orientation::Perpendicular, 1.0).unwrap();
        let r = dirichlet_elements_perpendicular(
            &params,
            PerpendicularMethod::ClosedForm(MmaxRule::Exact),
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert_eq!(r.m_max, 0);
        assert_eq!(r.warnings.len(), 1);
        assert!(r.elements.p1.abs() < 1e-16 && r.elements.f.re.abs() < 1e-16);
    }

    #[test]
    fn orientation_checks() {
        assert!(DirichletParams::new(1.0, 0.02, 1e3, Orientation::Perpendicular, 1.0).is_err());
        assert!(DirichletParams::new(1.5, 0.02, 1e3, Orientation::Parallel, 1.0).is_ok());
        let spec = QuadratureSpec::default();
        let params = perp(0.5, 0.02);
        assert!(dirichlet_elements_parallel(&params, &spec, &SeriesSpec::default()).is_err());
    }
}
