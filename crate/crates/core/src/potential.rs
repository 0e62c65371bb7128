//! First-order response of the matrix elements to a classical potential
//! `λ V(x) :φ²:` centred between the detectors.
//!
//! For the Gaussian `V(x) = V₀ e^{−x²/(2σ²)}` the angular integrals reduce to
//! a series in half-order Bessel functions, and the remaining radial double
//! integral is done in `u = (p₁+p₂)/2`, `v = p₁ − p₂`, where the Gaussian
//! confines `|v| ≲ 9/σ`. A spatially constant potential collapses the double
//! integral onto `p₁ = p₂`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::freefield::{energy, integrate_oscillatory, p_integral, f_integral, FreeFieldParams};
use crate::numerics::{
    bessel::{fill_half_order_i_scaled, fill_half_order_j},
    integrate_adaptive, integrate_panels, QuadratureSpec,
};
use crate::perturbative::ReducedElements;

/// Relative size of the last series terms at which the Bessel sum stops.
pub const SERIES_TAIL_TOL: f64 = 1e-10;
pub const DEFAULT_ORDER_START: usize = 8;
pub const DEFAULT_ORDER_CAP: usize = 1024;

/// `e^{−σ²v²/2} < 3e-18` beyond `|v| = GAUSS_REACH/σ`.
const GAUSS_REACH: f64 = 9.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesOrder {
    /// Start at `start` and double until the tail criterion holds, up to `cap`.
    Adaptive { start: usize, cap: usize },
    Fixed(usize),
}

impl Default for SeriesOrder {
    fn default() -> Self {
        SeriesOrder::Adaptive { start: DEFAULT_ORDER_START, cap: DEFAULT_ORDER_CAP }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialParams {
    pub free: FreeFieldParams,
    pub lambda_v0: f64,
    pub sigma_b: f64,
    pub order: SeriesOrder,
}

impl PotentialParams {
    pub fn new(free: FreeFieldParams, lambda_v0: f64, sigma_b: f64, order: SeriesOrder) -> Result<Self> {
        let params = PotentialParams { free, lambda_v0, sigma_b, order };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        self.free.validate()?;
        if !(self.free.mass > 0.0) {
            return Err(Error::invalid("mass", "potential scenario requires m > 0"));
        }
        if !(self.sigma_b > 0.0) || !self.sigma_b.is_finite() {
            return Err(Error::invalid("sigma_b", format!("must be positive, got {}", self.sigma_b)));
        }
        if !self.lambda_v0.is_finite() {
            return Err(Error::invalid("lambda_v0", "must be finite"));
        }
        match self.order {
            SeriesOrder::Fixed(n) if n < 1 => Err(Error::invalid("n_max", "must be at least 1")),
            SeriesOrder::Adaptive { start, cap } if start < 1 || cap < start => {
                Err(Error::invalid("n_max", "adaptive order needs 1 <= start <= cap"))
            }
            _ => Ok(()),
        }
    }

    pub fn with_lambda_v0(&self, lambda_v0: f64) -> Result<Self> {
        Self::new(self.free, lambda_v0, self.sigma_b, self.order)
    }
}

/// `Ṽ(p) = V₀σ³e^{−σ²p²/2}/(2π)^{3/2}`, normalized so that `∫d³p Ṽ = V₀`.
pub fn gaussian_ft(v0: f64, sigma_b: f64, p: f64) -> f64 {
    v0 * sigma_b.powi(3) * (-0.5 * sigma_b * sigma_b * p * p).exp() / (2.0 * PI).powf(1.5)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    /// Both momenta phased at the same detector.
    Even,
    /// Momenta phased at opposite detectors.
    Alternating,
}

/// Both parities of `Σ_l (±1)^l (2l+1) Ĩ_{l+½}(s) J_{l+½}(x₁) J_{l+½}(x₂)`,
/// where `Ĩ = I·e^{−s}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesselSeries {
    pub even: f64,
    pub alternating: f64,
    pub order: usize,
    /// The tail criterion failed at the final order.
    pub truncated: bool,
}

struct Scratch {
    j1: Vec<f64>,
    j2: Vec<f64>,
    i: Vec<f64>,
}

impl Scratch {
    fn new() -> Self {
        Scratch { j1: Vec::new(), j2: Vec::new(), i: Vec::new() }
    }

    fn sums(&mut self, s: f64, x1: f64, x2: f64, order: usize) -> (f64, f64, bool) {
        for v in [&mut self.j1, &mut self.j2, &mut self.i] {
            v.clear();
            v.resize(order + 1, 0.0);
        }
        fill_half_order_j(x1, &mut self.j1);
        fill_half_order_j(x2, &mut self.j2);
        fill_half_order_i_scaled(s, &mut self.i);
        let mut even = 0.0;
        let mut alternating = 0.0;
        let mut scale = 0.0;
        let mut tail = 0.0;
        for l in 0..=order {
            let t = (2 * l + 1) as f64 * self.i[l] * self.j1[l] * self.j2[l];
            even += t;
            alternating += if l % 2 == 0 { t } else { -t };
            scale += t.abs();
            if l + 2 > order {
                tail = f64::max(tail, t.abs());
            }
        }
        (even, alternating, tail > SERIES_TAIL_TOL * scale)
    }
}

fn bessel_series_with(scratch: &mut Scratch, s: f64, x1: f64, x2: f64, order: SeriesOrder) -> BesselSeries {
    match order {
        SeriesOrder::Fixed(n) => {
            let (even, alternating, truncated) = scratch.sums(s, x1, x2, n);
            BesselSeries { even, alternating, order: n, truncated }
        }
        SeriesOrder::Adaptive { start, cap } => {
            let mut n = start;
            loop {
                let (even, alternating, truncated) = scratch.sums(s, x1, x2, n);
                if !truncated || n >= cap {
                    return BesselSeries { even, alternating, order: n, truncated };
                }
                n = (2 * n).min(cap);
            }
        }
    }
}

pub fn bessel_series(s: f64, x1: f64, x2: f64, order: SeriesOrder) -> Result<BesselSeries> {
    if !(s > 0.0) || !(x1 > 0.0) || !(x2 > 0.0) {
        return Err(Error::invalid("argument", "Bessel series arguments must be positive"));
    }
    Ok(bessel_series_with(&mut Scratch::new(), s, x1, x2, order))
}

/// Double angular integral
/// `∫dΩ₁dΩ₂ e^{−σ²|p⃗₁−p⃗₂|²/2} e^{i p⃗₁·r₁ − i p⃗₂·r_j}` for detectors at
/// `±(d/2) x̂`, with `r_j = r₁` for [`Parity::Even`] and `r_j = r₂` for
/// [`Parity::Alternating`], truncated at order `n_max`.
pub fn angular_expansion(parity: Parity, sigma_b: f64, p1: f64, p2: f64, d: f64, n_max: usize) -> Result<f64> {
    if !(p1 > 0.0) || !(p2 > 0.0) || !(sigma_b > 0.0) || !(d > 0.0) {
        return Err(Error::invalid("argument", "momenta, width and separation must be positive"));
    }
    let series = bessel_series(sigma_b * sigma_b * p1 * p2, 0.5 * p1 * d, 0.5 * p2 * d, SeriesOrder::Fixed(n_max))?;
    let sum = match parity {
        Parity::Even => series.even,
        Parity::Alternating => series.alternating,
    };
    let gauss = (-0.5 * sigma_b * sigma_b * (p1 - p2) * (p1 - p2)).exp();
    Ok((2.0 * PI).powf(3.5) / (p1 * p2 * sigma_b * d) * gauss * sum)
}

/// Corrections per unit `λV₀α²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaElements {
    pub delta_p: f64,
    pub delta_f: f64,
    /// Largest Bessel order used at any node.
    pub max_order: usize,
    /// Nodes at which the Bessel series hit its cap.
    pub truncated_nodes: usize,
}

struct Kernel {
    m: f64,
    de: f64,
    d: f64,
    sigma: f64,
}

impl Kernel {
    // (P weight, F weight) at (p1, p2), without the Gaussian and Bessel parts.
    fn weights(&self, p1: f64, p2: f64) -> (f64, f64) {
        let (e1, e2) = (energy(p1, self.m), energy(p2, self.m));
        let (a1, a2) = (e1 + self.de, e2 + self.de);
        let common = p1 * p2 / (e1 * e2);
        let bp = (1.0 / (a1 * a1) + 1.0 / (a2 * a2)) / (e1 + e2) + (1.0 / a1 + 1.0 / a2) / (a1 * a2);
        let bf = 1.0 / (a1 * a2) + (1.0 / a1 + 1.0 / a2) / (e1 + e2);
        (common * bp, common * bf)
    }
}

/// Gaussian-potential corrections per unit `λV₀α²`.
pub fn unit_delta_elements(params: &PotentialParams, spec: &QuadratureSpec) -> Result<DeltaElements> {
    params.validate()?;
    let pair = &params.free.pair;
    let kernel = Kernel { m: params.free.mass, de: pair.delta_e, d: pair.d, sigma: params.sigma_b };
    let cutoff = pair.cutoff();
    if cutoff == 0.0 {
        return Ok(DeltaElements { delta_p: 0.0, delta_f: 0.0, max_order: 0, truncated_nodes: 0 });
    }
    let reach = GAUSS_REACH / kernel.sigma;
    let order = params.order;
    let stats = std::cell::RefCell::new((0usize, 0usize, Scratch::new()));

    let inner = |u: f64, parity: Parity| -> Result<f64> {
        let v_max = (2.0 * u).min(2.0 * (cutoff - u)).min(reach);
        if v_max <= 0.0 {
            return Ok(0.0);
        }
        let f = |v: f64| {
            let p1 = (u + 0.5 * v).min(cutoff);
            let p2 = u - 0.5 * v;
            if p2 <= 0.0 {
                return 0.0;
            }
            let (wp, wf) = kernel.weights(p1, p2);
            let gauss = (-0.5 * kernel.sigma * kernel.sigma * v * v).exp();
            let mut st = stats.borrow_mut();
            let (ref mut max_order, ref mut truncated, ref mut scratch) = *st;
            let s = bessel_series_with(
                scratch,
                kernel.sigma * kernel.sigma * p1 * p2,
                0.5 * p1 * kernel.d,
                0.5 * p2 * kernel.d,
                order,
            );
            *max_order = (*max_order).max(s.order);
            if s.truncated {
                *truncated += 1;
            }
            match parity {
                Parity::Even => gauss * wp * s.even,
                Parity::Alternating => gauss * wf * s.alternating,
            }
        };
        // Symmetric in v: integrate one side and double.
        Ok(2.0 * integrate_adaptive(f, 0.0, v_max, spec)?.value)
    };

    let period = PI / kernel.d;
    let mut points = vec![0.0];
    let mut k = 1.0;
    while k * period < cutoff {
        points.push(k * period);
        k += 1.0;
    }
    points.push(cutoff);

    let outer = |parity: Parity| -> Result<f64> {
        let failure = std::cell::RefCell::new(None);
        let value = integrate_panels(
            |u| match inner(u, parity) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            },
            &points,
            spec,
        )?
        .value;
        match failure.into_inner() {
            Some(e) => Err(e),
            None => Ok(value),
        }
    };

    let prefactor = kernel.sigma * kernel.sigma / (2.0 * PI * kernel.d);
    let delta_p = -0.5 * prefactor * outer(Parity::Even)?;
    let delta_f = -prefactor / (2.0 * kernel.de) * outer(Parity::Alternating)?;
    let (max_order, truncated_nodes, _) = stats.into_inner();
    Ok(DeltaElements { delta_p, delta_f, max_order, truncated_nodes })
}

/// `(δP₁, δF)` for the configured `λV₀` and coupling. `δP₂ = δP₁` by mirror
/// symmetry.
pub fn delta_elements(params: &PotentialParams, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let unit = unit_delta_elements(params, spec)?;
    let scale = params.lambda_v0 * params.free.pair.alpha1 * params.free.pair.alpha2;
    Ok((scale * unit.delta_p, scale * unit.delta_f))
}

/// Free-field elements plus the first-order corrections scaled from `unit`.
pub fn corrected_elements(
    free: &FreeFieldParams,
    unit: &DeltaElements,
    lambda_v0: f64,
    spec: &QuadratureSpec,
) -> Result<ReducedElements> {
    free.validate()?;
    let pair = &free.pair;
    let a2 = pair.alpha1 * pair.alpha2;
    let cutoff = pair.cutoff();
    let p = p_integral(free.mass, pair.delta_e, cutoff, spec)? + lambda_v0 * unit.delta_p;
    let f = f_integral(free.mass, pair.delta_e, pair.d, cutoff, spec)? + lambda_v0 * unit.delta_f;
    ReducedElements::symmetric(a2 * p, a2 * f)
}

/// Corrections per unit `λVα²` for a spatially constant potential `V`.
pub fn constant_potential_unit(free: &FreeFieldParams, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    free.validate()?;
    let m = free.mass;
    let de = free.pair.delta_e;
    let d = free.pair.d;
    let cutoff = free.pair.cutoff();
    if cutoff == 0.0 {
        return Ok((0.0, 0.0));
    }
    let p = integrate_adaptive(
        |p| {
            let e = energy(p, m);
            let a = e + de;
            p * p / (e * e) * (1.0 / (e * a * a) + 2.0 / (a * a * a))
        },
        0.0,
        cutoff,
        spec,
    )?
    .value;
    let f = integrate_oscillatory(
        |p| {
            let e = energy(p, m);
            let a = e + de;
            p * (p * d).sin() / d / (e * e) * (1.0 / (a * a) + 1.0 / (e * a))
        },
        cutoff,
        d,
        spec,
    )?;
    Ok((-0.5 * p / (2.0 * PI * PI), -f / (2.0 * de * 2.0 * PI * PI)))
}

/// Finite differences of `P` and `F` under `m → √(1+λ)m` against the
/// constant-potential first-order terms with `V = m²/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MassShiftCheck {
    pub lhs_p: f64,
    pub rhs_p: f64,
    pub lhs_f: f64,
    pub rhs_f: f64,
}

pub fn mass_shift_taylor_check(free: &FreeFieldParams, lambda: f64, spec: &QuadratureSpec) -> Result<MassShiftCheck> {
    free.validate()?;
    if !(1.0 + lambda > 0.0) {
        return Err(Error::invalid("lambda", "need 1 + λ > 0"));
    }
    let a2 = free.pair.alpha1 * free.pair.alpha2;
    let pair = &free.pair;
    let cutoff = pair.cutoff();
    let shifted = free.mass * (1.0 + lambda).sqrt();
    let p = |m: f64| p_integral(m, pair.delta_e, cutoff, spec);
    let f = |m: f64| f_integral(m, pair.delta_e, pair.d, cutoff, spec);
    let (lhs_p, lhs_f) = if lambda == 0.0 {
        (0.0, 0.0)
    } else {
        (a2 * (p(shifted)? - p(free.mass)?), a2 * (f(shifted)? - f(free.mass)?))
    };
    let (up, uf) = constant_potential_unit(free, spec)?;
    let scale = lambda * free.mass * free.mass / 2.0 * a2;
    Ok(MassShiftCheck { lhs_p, rhs_p: scale * up, lhs_f, rhs_f: scale * uf })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perturbative::DetectorPair;
    use approx::assert_relative_eq;

    fn fig4() -> FreeFieldParams {
        FreeFieldParams::new(1.0, DetectorPair::symmetric(0.1, 1.0, 0.5, 1e-3).unwrap()).unwrap()
    }

    #[test]
    fn fourier_transform_shapes() {
        let s = 0.7;
        assert_relative_eq!(gaussian_ft(2.0, s, 0.0), 2.0 * s.powi(3) / (2.0 * PI).powf(1.5));
        let p = 1.3;
        let ratio = gaussian_ft(1.0, 2.0 * s, p) / gaussian_ft(1.0, s, p);
        assert_relative_eq!(ratio, 8.0 * (-1.5 * s * s * p * p).exp(), max_relative = 1e-14);
        let total = integrate_adaptive(|q| 4.0 * PI * q * q * gaussian_ft(3.0, s, q), 0.0, 40.0 / s, &QuadratureSpec::default())
            .unwrap()
            .value;
        assert_relative_eq!(total, 3.0, max_relative = 1e-10);
    }

    #[test]
    fn parities_share_even_orders() {
        let plus = angular_expansion(Parity::Even, 0.8, 1.1, 2.3, 1.5, 30).unwrap();
        let minus = angular_expansion(Parity::Alternating, 0.8, 1.1, 2.3, 1.5, 30).unwrap();
        let s = bessel_series(0.64 * 1.1 * 2.3, 0.55 * 1.5, 1.15 * 1.5, SeriesOrder::Fixed(30)).unwrap();
        let even_only: f64 = {
            let j1 = crate::numerics::half_order_j(0.55 * 1.5, 30);
            let j2 = crate::numerics::half_order_j(1.15 * 1.5, 30);
            let i = crate::numerics::half_order_i_scaled(0.64 * 1.1 * 2.3, 30);
            (0..=30).step_by(2).map(|l| (2 * l + 1) as f64 * i[l] * j1[l] * j2[l]).sum()
        };
        assert_relative_eq!(0.5 * (s.even + s.alternating), even_only, max_relative = 1e-13);
        assert!(plus != minus);
    }

    #[test]
    fn short_separation_keeps_lowest_order() {
        let s = bessel_series(0.5, 1e-4, 2e-4, SeriesOrder::Fixed(10)).unwrap();
        let j1 = crate::numerics::half_order_j(1e-4, 0)[0];
        let j2 = crate::numerics::half_order_j(2e-4, 0)[0];
        let i0 = crate::numerics::half_order_i_scaled(0.5, 0)[0];
        assert_relative_eq!(s.even, i0 * j1 * j2, max_relative = 1e-7);
    }

    #[test]
    fn adaptive_order_grows_with_argument() {
        let small = bessel_series(1.0, 2.0, 2.0, SeriesOrder::default()).unwrap();
        let large = bessel_series(1e6, 300.0, 300.0, SeriesOrder::default()).unwrap();
        assert_eq!(small.order, 8);
        assert!(!small.truncated && !large.truncated);
        assert!(large.order >= 512);
    }

    #[test]
    fn zero_strength_gives_no_correction() {
        let p = PotentialParams::new(fig4(), 0.0, 1.0, SeriesOrder::default()).unwrap();
        let spec = QuadratureSpec { rel_tol: 1e-6, ..Default::default() };
        let (dp, df) = delta_elements(&p, &spec).unwrap();
        assert_eq!((dp, df), (0.0, 0.0));
    }

    #[test]
    fn constant_potential_reference() {
        let (p, f) = constant_potential_unit(&fig4(), &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(p, -0.021_804_4, max_relative = 1e-5);
        assert_relative_eq!(f, -0.222_015_5, max_relative = 1e-5);
    }

    #[test]
    fn mass_shift_vanishes_at_zero() {
        let c = mass_shift_taylor_check(&fig4(), 0.0, &QuadratureSpec::default()).unwrap();
        assert_eq!((c.lhs_p, c.rhs_p, c.lhs_f, c.rhs_f), (0.0, 0.0, 0.0, 0.0));
    }
}
