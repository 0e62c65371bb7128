//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Panels are refined by bisection, always splitting the panel with the largest
//! error estimate. Ties are broken by creation order so the result is a pure
//! function of the integrand and the inputs.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Tolerances and subdivision budget for [`integrate_adaptive`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { abs_tol: 1e-12, rel_tol: 1e-10, max_subdivisions: 20_000 }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = QuadratureSpec { abs_tol, rel_tol, max_subdivisions };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::invalid("tolerance", "tolerances must be positive"));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::invalid("max_subdivisions", "must be at least 1"));
        }
        Ok(())
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }
}

/// Value of a definite integral together with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub panels: usize,
}

// Kronrod abscissae on [-1, 1] (positive half, descending), QUADPACK qk15.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_3,
    0.949_107_912_342_758_524_526_189_684_047_9,
    0.864_864_423_359_769_072_789_712_788_640_9,
    0.741_531_185_599_394_439_863_864_773_280_8,
    0.586_087_235_467_691_130_294_144_845_693_0,
    0.405_845_151_377_397_166_906_606_412_076_96,
    0.207_784_955_007_898_467_600_689_403_773_2,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_20,
    0.104_790_010_322_250_183_839_876_322_541_5,
    0.140_653_259_715_525_918_745_189_590_510_2,
    0.169_004_726_639_267_902_826_583_426_598_6,
    0.190_350_578_064_785_409_913_256_402_421_0,
    0.204_432_940_075_298_892_414_161_999_234_6,
    0.209_482_141_084_727_828_012_999_174_891_7,
];
// Gauss weights for the embedded 7-point rule (odd Kronrod indices).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_1,
    0.279_705_391_489_276_667_901_467_771_423_8,
    0.381_830_050_505_118_944_950_369_775_488_98,
    0.417_959_183_673_469_387_755_102_040_816_3,
];

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    (value, err)
}

#[derive(Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    order: usize,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.order.cmp(&self.order))
    }
}

/// Integrates `f` over `[a, b]`.
///
/// `a == b` yields zero. Returns [`Error::QuadratureBudget`] carrying the best
/// estimate when the subdivision budget runs out.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Integral> {
    integrate_panels(f, &[a, b], spec)
}

/// Integrates over consecutive panels `[x0, x1], [x1, x2], ...`.
///
/// All panels share one global error budget, so the tolerance applies to the
/// total. Breakpoints must be non-decreasing; empty panels are skipped.
pub fn integrate_panels<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<Integral> {
    spec.validate()?;
    if breakpoints.len() < 2 {
        return Err(Error::invalid("breakpoints", "need at least two points"));
    }
    if breakpoints.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("breakpoints", "integration limits must be finite"));
    }
    if breakpoints.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("breakpoints", "limits must be non-decreasing"));
    }

    let mut heap = BinaryHeap::new();
    let mut order = 0;
    for w in breakpoints.windows(2) {
        if w[1] > w[0] {
            let (value, err) = gauss_kronrod(&f, w[0], w[1]);
            heap.push(Panel { a: w[0], b: w[1], value, err, order });
            order += 1;
        }
    }
    if heap.is_empty() {
        return Ok(Integral { value: 0.0, abs_error: 0.0, panels: 0 });
    }

    let (mut total, mut total_err) = totals(&heap);
    let mut since_resum = 0usize;
    let mut splits = 0usize;
    loop {
        if !total.is_finite() {
            return Err(Error::invalid("integrand", "non-finite value encountered"));
        }
        let target = spec.abs_tol.max(spec.rel_tol * total.abs());
        if total_err <= target {
            let (value, abs_error) = totals(&heap);
            return Ok(Integral { value, abs_error, panels: heap.len() });
        }
        if splits >= spec.max_subdivisions {
            let (estimate, error) = totals(&heap);
            return Err(Error::QuadratureBudget { estimate, error });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel is at machine resolution; nothing left to refine.
            heap.push(worst);
            let (value, abs_error) = totals(&heap);
            return Ok(Integral { value, abs_error, panels: heap.len() });
        }
        let (v1, e1) = gauss_kronrod(&f, worst.a, mid);
        let (v2, e2) = gauss_kronrod(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Panel { a: worst.a, b: mid, value: v1, err: e1, order });
        heap.push(Panel { a: mid, b: worst.b, value: v2, err: e2, order: order + 1 });
        order += 2;
        splits += 1;
        since_resum += 1;
        if since_resum == 256 {
            (total, total_err) = totals(&heap);
            since_resum = 0;
        }
    }
}

// Summation in panel position order keeps the total independent of heap layout.
fn totals(heap: &BinaryHeap<Panel>) -> (f64, f64) {
    let mut panels: Vec<&Panel> = heap.iter().collect();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    panels.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.err))
}

/// Integrates over `[a, b]` with breakpoints every `spacing`, starting at
/// `a + spacing`. Used for kernels such as `sin(p d)` whose zeros sit on a
/// regular lattice.
pub fn integrate_periodic_panels<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spacing: f64,
    spec: &QuadratureSpec,
) -> Result<Integral> {
    if !(spacing > 0.0) {
        return Err(Error::invalid("spacing", "must be positive"));
    }
    if b <= a {
        return integrate_adaptive(f, a, b.max(a), spec);
    }
    let n = ((b - a) / spacing).floor() as usize;
    let mut points = Vec::with_capacity(n + 2);
    points.push(a);
    for k in 1..=n {
        let x = a + k as f64 * spacing;
        if x < b {
            points.push(x);
        }
    }
    points.push(b);
    integrate_panels(f, &points, spec)
}

/// `∫₀^∞ e^{-s t} h(t) dt` for `s > 0`, evaluated as
/// `(1/s) ∫₀^{46} e^{-u} h(u/s) du`. The neglected tail is below `e^{-46}·sup|h|`.
pub fn laplace_transform<F: Fn(f64) -> f64>(h: F, s: f64, spec: &QuadratureSpec) -> Result<Integral> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::invalid("s", format!("Laplace variable must be positive, got {s}")));
    }
    let inner = integrate_panels(|u| (-u).exp() * h(u / s), &[0.0, 1.0, 4.0, 12.0, 46.0], spec)?;
    Ok(Integral { value: inner.value / s, abs_error: inner.abs_error / s, panels: inner.panels })
}
