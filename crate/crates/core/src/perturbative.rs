//! Second-order reduced state of two detectors coupled to a common system.
//!
//! Basis ordering for the two-qubit state is `|ee⟩, |eg⟩, |ge⟩, |gg⟩`, first
//! label for detector 1.

use std::f64::consts::PI;

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on `P1 + P2 = 1` before the state is rejected as non-perturbative.
pub const DEGENERATE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorPair {
    pub delta_e: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub d: f64,
    pub delta_x: f64,
    pub r1: [f64; 3],
    pub r2: [f64; 3],
}

impl DetectorPair {
    /// Equal couplings, detectors at `(±d/2, 0, 0)`.
    pub fn symmetric(delta_e: f64, alpha: f64, d: f64, delta_x: f64) -> Result<Self> {
        Self::with_positions(delta_e, alpha, alpha, delta_x, [-0.5 * d, 0.0, 0.0], [0.5 * d, 0.0, 0.0])
    }

    pub fn with_positions(
        delta_e: f64,
        alpha1: f64,
        alpha2: f64,
        delta_x: f64,
        r1: [f64; 3],
        r2: [f64; 3],
    ) -> Result<Self> {
        let d = (0..3).map(|i| (r1[i] - r2[i]).powi(2)).sum::<f64>().sqrt();
        let pair = DetectorPair { delta_e, alpha1, alpha2, d, delta_x, r1, r2 };
        pair.validate()?;
        Ok(pair)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta_e > 0.0) || !self.delta_e.is_finite() {
            return Err(Error::invalid("delta_e", format!("gap must be positive, got {}", self.delta_e)));
        }
        if !(self.d > 0.0) || !self.d.is_finite() {
            return Err(Error::invalid("d", format!("separation must be positive, got {}", self.d)));
        }
        if !(self.delta_x > 0.0) {
            return Err(Error::invalid("delta_x", format!("detector size must be positive, got {}", self.delta_x)));
        }
        if !(self.alpha1 >= 0.0) || !(self.alpha2 >= 0.0) {
            return Err(Error::invalid("alpha", "couplings must be non-negative"));
        }
        let sep = (0..3).map(|i| (self.r1[i] - self.r2[i]).powi(2)).sum::<f64>().sqrt();
        if (sep - self.d).abs() > 1e-12 * self.d {
            return Err(Error::invalid("d", format!("|r1 - r2| = {sep} differs from d = {}", self.d)));
        }
        Ok(())
    }

    /// Momentum cutoff `1/ΔX`.
    pub fn cutoff(&self) -> f64 {
        1.0 / self.delta_x
    }

    /// The common coupling, or an error when the two differ.
    pub fn alpha(&self) -> Result<f64> {
        if self.alpha1 != self.alpha2 {
            return Err(Error::invalid("alpha", "scenario requires alpha1 == alpha2"));
        }
        Ok(self.alpha1)
    }
}

/// The four second-order scalars of the reduced state.
///
/// `e` is `None` where the scenario does not provide the exchange element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedElements {
    pub p1: f64,
    pub p2: f64,
    pub e: Option<Complex64>,
    pub f: Complex64,
}

impl ReducedElements {
    pub fn new(p1: f64, p2: f64, e: Option<Complex64>, f: Complex64) -> Result<Self> {
        let elems = ReducedElements { p1, p2, e, f };
        elems.validate()?;
        Ok(elems)
    }

    /// Symmetric elements `P1 = P2 = p` with real `F` and no exchange element.
    pub fn symmetric(p: f64, f: f64) -> Result<Self> {
        Self::new(p, p, None, Complex64::new(f, 0.0))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p1 >= 0.0) || !(self.p2 >= 0.0) {
            return Err(Error::invalid("p", format!("P1 = {}, P2 = {} must be non-negative", self.p1, self.p2)));
        }
        if !self.f.re.is_finite() || !self.f.im.is_finite() {
            return Err(Error::invalid("f", "F must be finite"));
        }
        if self.p1 + self.p2 > 1.0 - DEGENERATE_TOL {
            return Err(Error::NonPerturbative(format!("P1 + P2 = {} reaches 1", self.p1 + self.p2)));
        }
        if let Some(e) = self.e {
            let slack = self.p1 * self.p2 - e.norm_sqr();
            if slack < -1e-14 * self.p1 * self.p2 - f64::MIN_POSITIVE {
                return Err(Error::invalid("e", format!("|E|² exceeds P1·P2 by {:e}", -slack)));
            }
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> ReducedElements {
        ReducedElements {
            p1: self.p1 * factor,
            p2: self.p2 * factor,
            e: self.e.map(|e| e * factor),
            f: self.f * factor,
        }
    }
}

/// An explicit discrete system: one excitation channel per mode.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeModel {
    pub energies: Vec<f64>,
    /// `⟨g|F_1|k⟩`.
    pub f1: Vec<Complex64>,
    /// `⟨g|F_2|k⟩`.
    pub f2: Vec<Complex64>,
    pub labels: Option<Vec<String>>,
}

impl ModeModel {
    pub fn new(energies: Vec<f64>, f1: Vec<Complex64>, f2: Vec<Complex64>) -> Result<Self> {
        let model = ModeModel { energies, f1, f2, labels: None };
        model.validate()?;
        Ok(model)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.energies.len() {
            return Err(Error::invalid("labels", "one label per mode required"));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.energies.is_empty() {
            return Err(Error::invalid("energies", "mode model is empty"));
        }
        if self.f1.len() != self.energies.len() || self.f2.len() != self.energies.len() {
            return Err(Error::invalid("f1/f2", "amplitude lists must match the number of modes"));
        }
        if let Some(bad) = self.energies.iter().find(|e| !(**e > 0.0) || !e.is_finite()) {
            return Err(Error::invalid("energies", format!("mode energy must be positive, got {bad}")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }
}

/// `Σ_k f1_k conj(f2_k)/(ΔE (E_k+ΔE))` before the real part is taken.
pub fn raw_f_sum(model: &ModeModel, pair: &DetectorPair) -> Result<Complex64> {
    model.validate()?;
    pair.validate()?;
    let de = pair.delta_e;
    Ok(model
        .energies
        .iter()
        .zip(model.f1.iter().zip(&model.f2))
        .map(|(&ek, (a, b))| a * b.conj() / (de * (ek + de)))
        .sum::<Complex64>()
        * (pair.alpha1 * pair.alpha2))
}

/// Exact finite sums over the modes of `model`.
pub fn matrix_elements_discrete(model: &ModeModel, pair: &DetectorPair) -> Result<ReducedElements> {
    model.validate()?;
    pair.validate()?;
    let de = pair.delta_e;
    let mut p1 = 0.0;
    let mut p2 = 0.0;
    let mut e = Complex64::new(0.0, 0.0);
    for (k, &ek) in model.energies.iter().enumerate() {
        let w = 1.0 / ((ek + de) * (ek + de));
        p1 += model.f1[k].norm_sqr() * w;
        p2 += model.f2[k].norm_sqr() * w;
        e += model.f1[k] * model.f2[k].conj() * w;
    }
    let f = raw_f_sum(model, pair)?;
    ReducedElements::new(
        pair.alpha1 * pair.alpha1 * p1,
        pair.alpha2 * pair.alpha2 * p2,
        Some(e * (pair.alpha1 * pair.alpha2)),
        Complex64::new(f.re, 0.0),
    )
}

/// Minimum over modes and detectors of `(E_k+ΔE)²/(α_j |f_jk|)`; `+∞` when
/// every coupling vanishes.
pub fn adiabatic_rate_bound(model: &ModeModel, pair: &DetectorPair) -> Result<f64> {
    model.validate()?;
    pair.validate()?;
    let mut bound = f64::INFINITY;
    for (k, &ek) in model.energies.iter().enumerate() {
        for (alpha, f) in [(pair.alpha1, model.f1[k]), (pair.alpha2, model.f2[k])] {
            let strength = alpha * f.norm();
            if strength > 0.0 {
                bound = bound.min((ek + pair.delta_e).powi(2) / strength);
            }
        }
    }
    Ok(bound)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RhoA(pub Matrix4<Complex64>);

impl RhoA {
    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (self.0 - self.0.adjoint()).iter().all(|z| z.norm() <= tol)
    }

    /// Partial transpose over the first qubit.
    pub fn partial_transpose_first(&self) -> Matrix4<Complex64> {
        Matrix4::from_fn(|row, col| {
            let (a, b) = (row / 2, row % 2);
            let (a2, b2) = (col / 2, col % 2);
            self.0[(2 * a2 + b, 2 * a + b2)]
        })
    }

    /// Ascending eigenvalues of the partial transpose.
    pub fn partial_transpose_eigenvalues(&self) -> [f64; 4] {
        let eig = SymmetricEigen::new(self.partial_transpose_first());
        let mut v = [eig.eigenvalues[0], eig.eigenvalues[1], eig.eigenvalues[2], eig.eigenvalues[3]];
        v.sort_by(f64::total_cmp);
        v
    }

    /// Twice the summed magnitude of the negative partial-transpose eigenvalues.
    pub fn negativity(&self) -> f64 {
        -2.0 * self.partial_transpose_eigenvalues().iter().filter(|&&l| l < 0.0).sum::<f64>()
    }
}

pub fn assemble_rho_a(elems: &ReducedElements) -> Result<RhoA> {
    elems.validate()?;
    let zero = Complex64::new(0.0, 0.0);
    let e = elems.e.unwrap_or(zero);
    let mut m = Matrix4::from_element(zero);
    m[(1, 1)] = elems.p1.into();
    m[(2, 2)] = elems.p2.into();
    m[(3, 3)] = (1.0 - elems.p1 - elems.p2).into();
    m[(2, 1)] = e;
    m[(1, 2)] = e.conj();
    m[(3, 0)] = elems.f;
    m[(0, 3)] = elems.f.conj();
    Ok(RhoA(m))
}

/// Leading-order negativity `max(√((P1−P2)² + 4|F|²) − P1 − P2, 0)`.
pub fn negativity(elems: &ReducedElements) -> f64 {
    let dp = elems.p1 - elems.p2;
    ((dp * dp + 4.0 * elems.f.norm_sqr()).sqrt() - (elems.p1 + elems.p2)).max(0.0)
}

/// `K = 2π² N / α²`; zero coupling gives `K = 0`.
pub fn k_from_negativity(n: f64, alpha: f64) -> f64 {
    if alpha == 0.0 {
        0.0
    } else {
        2.0 * PI * PI * n / (alpha * alpha)
    }
}

/// Twice the magnitude of the negative eigenvalues of the exact partial
/// transpose. Differs from [`negativity`] by `O(|E|²)`.
pub fn exact_negativity(elems: &ReducedElements) -> Result<f64> {
    Ok(assemble_rho_a(elems)?.negativity())
}
