//! Field in a thermal state at temperature `T = θm` (with `k_B = 1`).
//!
//! Requires `m > ΔE`, so that the absorption denominator `E_p − ΔE` never
//! vanishes.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::freefield::{energy, integrate_oscillatory, p_over_e, FreeFieldParams};
use crate::numerics::{integrate_adaptive, integrate_panels, lambert_w0, QuadratureSpec};
use crate::perturbative::{negativity, ReducedElements};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermalParams {
    pub free: FreeFieldParams,
    pub theta: f64,
}

impl ThermalParams {
    pub fn new(free: FreeFieldParams, theta: f64) -> Result<Self> {
        let params = ThermalParams { free, theta };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        self.free.validate()?;
        if !(self.free.mass > self.free.pair.delta_e) {
            return Err(Error::invalid(
                "mass",
                format!("thermal state requires m > ΔE (m = {}, ΔE = {})", self.free.mass, self.free.pair.delta_e),
            ));
        }
        if !(self.theta >= 0.0) || !self.theta.is_finite() {
            return Err(Error::invalid("theta", format!("must be non-negative, got {}", self.theta)));
        }
        Ok(())
    }

    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(self.free, theta)
    }

    /// `βm = 1/θ`.
    pub fn beta_m(&self) -> f64 {
        1.0 / self.theta
    }
}

/// Bose–Einstein occupation at energy `e` and temperature `t`; zero at `t = 0`.
pub fn bose_einstein(e: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let x = e / t;
    if x > 700.0 {
        0.0
    } else {
        1.0 / x.exp_m1()
    }
}

/// `n_p = 1/(e^{E_p/(θm)} − 1)`.
pub fn occupation(p: f64, params: &ThermalParams) -> f64 {
    bose_einstein(energy(p, params.free.mass), params.theta * params.free.mass)
}

/// Panel edges at multiples of the thermal momentum `√(T² + 2mT)`, so the
/// occupation peak is resolved even when it is narrow next to the cutoff.
fn thermal_panels(m: f64, t: f64, cutoff: f64) -> Vec<f64> {
    let scale = (t * t + 2.0 * m * t).sqrt();
    let mut edges = vec![0.0];
    edges.extend([1.0, 4.0, 16.0, 64.0].iter().map(|k| k * scale).filter(|&p| p > 0.0 && p < cutoff));
    edges.push(cutoff);
    edges
}

/// `P` and `F` at unit coupling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermalIntegrals {
    pub p: f64,
    pub f: f64,
}

fn integrals(params: &ThermalParams, spec: &QuadratureSpec, vacuum: bool) -> Result<ThermalIntegrals> {
    params.validate()?;
    let m = params.free.mass;
    let t = params.theta * m;
    let de = params.free.pair.delta_e;
    let d = params.free.pair.d;
    let cutoff = params.free.pair.cutoff();
    let vac = if vacuum { 1.0 } else { 0.0 };
    let vacuum_pf = |p: f64| {
        let e = energy(p, m);
        p * p_over_e(p, m) / ((e + de) * (e + de))
    };
    let thermal_pf = |p: f64| {
        let e = energy(p, m);
        let n = bose_einstein(e, t);
        p * p_over_e(p, m) * n * (1.0 / ((e + de) * (e + de)) + 1.0 / ((e - de) * (e - de)))
    };
    let ff = |p: f64| {
        let e = energy(p, m);
        let n = bose_einstein(e, t);
        p_over_e(p, m) * (p * d).sin() * ((vac + n) / (e + de) + n / (de - e))
    };
    let p = if cutoff == 0.0 {
        0.0
    } else {
        let cold = if vacuum { integrate_adaptive(vacuum_pf, 0.0, cutoff, spec)?.value } else { 0.0 };
        let warm = if t > 0.0 { integrate_panels(thermal_pf, &thermal_panels(m, t, cutoff), spec)?.value } else { 0.0 };
        cold + warm
    };
    let f = integrate_oscillatory(ff, cutoff, d, spec)?;
    Ok(ThermalIntegrals { p: p / (4.0 * PI * PI), f: f / (4.0 * PI * PI * de * d) })
}

pub fn thermal_integrals(params: &ThermalParams, spec: &QuadratureSpec) -> Result<ThermalIntegrals> {
    integrals(params, spec, true)
}

/// The occupation-weighted parts alone, `P(θ) − P(0)` and `F(θ) − F(0)`,
/// integrated directly to avoid cancellation at low temperature.
pub fn thermal_excess(params: &ThermalParams, spec: &QuadratureSpec) -> Result<ThermalIntegrals> {
    integrals(params, spec, false)
}

pub fn thermal_elements(params: &ThermalParams, spec: &QuadratureSpec) -> Result<ReducedElements> {
    let i = thermal_integrals(params, spec)?;
    let a2 = params.free.pair.alpha1 * params.free.pair.alpha2;
    ReducedElements::symmetric(a2 * i.p, a2 * i.f)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LowTemperatureP1 {
    /// `α² ∫₀^Λ 2p² n_p/(4π²(p²+m²)^{3/2}) dp`.
    pub integral: f64,
    /// `α² e^{−βm}/(2π²√(βm))`.
    pub estimate: f64,
    pub warnings: Vec<String>,
}

pub fn low_temperature_p1(params: &ThermalParams, spec: &QuadratureSpec) -> Result<LowTemperatureP1> {
    params.validate()?;
    let alpha = params.free.pair.alpha()?;
    let m = params.free.mass;
    let t = params.theta * m;
    let mut warnings = Vec::new();
    if params.theta == 0.0 {
        return Ok(LowTemperatureP1 { integral: 0.0, estimate: 0.0, warnings });
    }
    let bm = params.beta_m();
    if bm < 5.0 {
        warnings.push(format!("βm = {bm} is outside the low-temperature regime"));
    }
    let cutoff = params.free.pair.cutoff();
    let integral = if cutoff == 0.0 {
        0.0
    } else {
        integrate_panels(
            |p| {
                let e = energy(p, m);
                2.0 * p * p * bose_einstein(e, t) / (4.0 * PI * PI * e * e * e)
            },
            &thermal_panels(m, t, cutoff),
            spec,
        )?
        .value
    };
    let estimate = (-bm).exp() / (2.0 * PI * PI * bm.sqrt());
    Ok(LowTemperatureP1 { integral: alpha * alpha * integral, estimate: alpha * alpha * estimate, warnings })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalTemperature {
    /// `θ_c ≈ 2/W(8/B²)` with `B = π/(2dΔE) − ln(1/(mΔX))`; `None` when `B <= 0`.
    pub estimate: Option<f64>,
    pub bracket: f64,
    /// Root `θ*` of `|F(θ)| − P(θ) = 0` found by bisection.
    pub root: f64,
}

/// `θ ≈ 2/W(8/B²)` for a given bracket `B > 0`.
pub fn lambert_critical_theta(bracket: f64) -> Result<f64> {
    if !(bracket > 0.0) {
        return Err(Error::NoCriticalTemperature);
    }
    Ok(2.0 / lambert_w0(8.0 / (bracket * bracket))?)
}

fn excess_coherence(params: &ThermalParams, spec: &QuadratureSpec) -> Result<f64> {
    let i = thermal_integrals(params, spec)?;
    Ok(i.f.abs() - i.p)
}

/// Critical temperature: the printed Lambert-W estimate and the bisection
/// root, with `θ` resolved to `theta_tol`.
pub fn critical_temperature(
    free: &FreeFieldParams,
    spec: &QuadratureSpec,
    theta_tol: f64,
) -> Result<CriticalTemperature> {
    let base = ThermalParams::new(*free, 0.0)?;
    if negativity(&thermal_elements(&base, spec)?) == 0.0 {
        return Err(Error::NoCriticalTemperature);
    }
    let pair = &free.pair;
    let bracket = PI / (2.0 * pair.d * pair.delta_e) - (1.0 / (free.mass * pair.delta_x)).ln();
    let estimate = lambert_critical_theta(bracket).ok();

    let mut lo = 0.0;
    let mut hi = 0.125;
    while excess_coherence(&base.with_theta(hi)?, spec)? > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e4 {
            return Err(Error::NoCriticalTemperature);
        }
    }
    while hi - lo > theta_tol {
        let mid = 0.5 * (lo + hi);
        if excess_coherence(&base.with_theta(mid)?, spec)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(CriticalTemperature { estimate, bracket, root: 0.5 * (lo + hi) })
}
