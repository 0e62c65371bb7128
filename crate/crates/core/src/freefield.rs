//! Free scalar field of mass `m` with a sharp momentum cutoff `Λ = 1/ΔX`.
//!
//! All integrals are radial; the angular average of `e^{ip·d}` is
//! `sin(pd)/(pd)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{integrate_adaptive, integrate_periodic_panels, QuadratureSpec};
use crate::perturbative::{negativity, DetectorPair, ReducedElements};

/// Above this many half-periods of `sin(pd)` the range is split at its zeros.
const OSCILLATION_SPLIT: f64 = 50.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FreeFieldParams {
    pub mass: f64,
    pub pair: DetectorPair,
}

impl FreeFieldParams {
    pub fn new(mass: f64, pair: DetectorPair) -> Result<Self> {
        let params = FreeFieldParams { mass, pair };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass >= 0.0) || !self.mass.is_finite() {
            return Err(Error::invalid("mass", format!("must be non-negative, got {}", self.mass)));
        }
        self.pair.validate()?;
        self.pair.alpha()?;
        Ok(())
    }

    pub fn with_mass(&self, mass: f64) -> Result<Self> {
        Self::new(mass, self.pair)
    }
}

/// Radial integrals at unit coupling: `P`, `F`, `E` divided by `α²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FreeIntegrals {
    pub p: f64,
    pub f: f64,
    pub e: f64,
}

pub(crate) fn energy(p: f64, m: f64) -> f64 {
    p.hypot(m)
}

// p/E_p, with the massless limit 1 at p = 0.
pub(crate) fn p_over_e(p: f64, m: f64) -> f64 {
    let e = energy(p, m);
    if e == 0.0 {
        1.0
    } else {
        p / e
    }
}

/// Integrates a kernel containing `sin(p d)` over `[0, cutoff]`.
pub(crate) fn integrate_oscillatory<F: Fn(f64) -> f64>(
    f: F,
    cutoff: f64,
    d: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if cutoff == 0.0 {
        return Ok(0.0);
    }
    if d * cutoff > OSCILLATION_SPLIT {
        Ok(integrate_periodic_panels(f, 0.0, cutoff, PI / d, spec)?.value)
    } else {
        Ok(integrate_adaptive(f, 0.0, cutoff, spec)?.value)
    }
}

/// `(1/4π²) ∫₀^Λ p²/(E(E+ΔE)²) dp`.
pub fn p_integral(mass: f64, delta_e: f64, cutoff: f64, spec: &QuadratureSpec) -> Result<f64> {
    if cutoff == 0.0 {
        return Ok(0.0);
    }
    let f = |p: f64| {
        let e = energy(p, mass);
        p * p_over_e(p, mass) / ((e + delta_e) * (e + delta_e))
    };
    Ok(integrate_adaptive(f, 0.0, cutoff, spec)?.value / (4.0 * PI * PI))
}

/// `(1/4π²) ∫₀^Λ p sin(pd)/(E(E+ΔE) ΔE d) dp`.
pub fn f_integral(mass: f64, delta_e: f64, d: f64, cutoff: f64, spec: &QuadratureSpec) -> Result<f64> {
    let f = |p: f64| {
        let e = energy(p, mass);
        p_over_e(p, mass) * (p * d).sin() / ((e + delta_e) * delta_e * d)
    };
    Ok(integrate_oscillatory(f, cutoff, d, spec)? / (4.0 * PI * PI))
}

/// `(1/4π²) ∫₀^Λ p sin(pd)/(d E(E+ΔE)²) dp`.
pub fn e_integral(mass: f64, delta_e: f64, d: f64, cutoff: f64, spec: &QuadratureSpec) -> Result<f64> {
    let f = |p: f64| {
        let e = energy(p, mass);
        p_over_e(p, mass) * (p * d).sin() / (d * (e + delta_e) * (e + delta_e))
    };
    Ok(integrate_oscillatory(f, cutoff, d, spec)? / (4.0 * PI * PI))
}

pub fn free_integrals(params: &FreeFieldParams, spec: &QuadratureSpec) -> Result<FreeIntegrals> {
    params.validate()?;
    let (m, de, d, cutoff) = (params.mass, params.pair.delta_e, params.pair.d, params.pair.cutoff());
    Ok(FreeIntegrals {
        p: p_integral(m, de, cutoff, spec)?,
        f: f_integral(m, de, d, cutoff, spec)?,
        e: e_integral(m, de, d, cutoff, spec)?,
    })
}

pub fn free_matrix_elements(params: &FreeFieldParams, spec: &QuadratureSpec) -> Result<ReducedElements> {
    let i = free_integrals(params, spec)?;
    let a2 = params.pair.alpha1 * params.pair.alpha2;
    ReducedElements::new(a2 * i.p, a2 * i.p, Some(Complex64::new(a2 * i.e, 0.0)), Complex64::new(a2 * i.f, 0.0))
}

pub fn free_negativity(params: &FreeFieldParams, spec: &QuadratureSpec) -> Result<f64> {
    Ok(negativity(&free_matrix_elements(params, spec)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AsymptoticRegime {
    GapDominated,
    MassDominated,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticNegativity {
    pub value: f64,
    pub warnings: Vec<String>,
}

/// Small-separation estimate `N ≈ (α²/2π²) max(π/(2dΔE) − ln(1/(μΔX)), 0)`,
/// with `μ = ΔE` or `μ = m` by regime. Warns when `dΔE` or `dm` exceeds
/// `limit`.
pub fn free_negativity_asymptotic(
    params: &FreeFieldParams,
    regime: AsymptoticRegime,
    limit: f64,
) -> Result<AsymptoticNegativity> {
    params.validate()?;
    let pair = &params.pair;
    let scale = match regime {
        AsymptoticRegime::GapDominated => pair.delta_e,
        AsymptoticRegime::MassDominated => params.mass,
    };
    if !(scale > 0.0) {
        return Err(Error::invalid("mass", "mass-dominated form needs m > 0"));
    }
    let mut warnings = Vec::new();
    if pair.d * pair.delta_e > limit {
        warnings.push(format!("d·ΔE = {} exceeds {limit}", pair.d * pair.delta_e));
    }
    if pair.d * params.mass > limit {
        warnings.push(format!("d·m = {} exceeds {limit}", pair.d * params.mass));
    }
    let bracket = PI / (2.0 * pair.d * pair.delta_e) - (1.0 / (scale * pair.delta_x)).ln();
    let alpha = pair.alpha()?;
    Ok(AsymptoticNegativity { value: alpha * alpha / (2.0 * PI * PI) * bracket.max(0.0), warnings })
}
