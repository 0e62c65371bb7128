//! Brute-force check of the perturbative state: two qubits coupled to a few
//! bosonic modes, each truncated at `n_max` quanta.
//!
//! The tensor basis is `qubits ⊗ modes`, with the qubit index running over
//! `|ee⟩, |eg⟩, |ge⟩, |gg⟩` and the mode occupations in mixed radix, the last
//! mode fastest.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix4, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::freefield::energy;
use crate::perturbative::{DetectorPair, ModeModel, ReducedElements, RhoA};

pub const DEFAULT_DIMENSION_CAP: usize = 324;
pub const DEGENERACY_TOL: f64 = 1e-10;
pub const NORM_DRIFT_TOL: f64 = 1e-8;
/// Steps per unit of `1/‖H‖`.
pub const STEPS_PER_NORM: f64 = 50.0;

const QUBIT_STATES: usize = 4;

fn excited(q: usize) -> (bool, bool) {
    (q < 2, q % 2 == 0)
}

#[derive(Clone, Debug)]
pub struct TruncatedHamiltonian {
    pub model: ModeModel,
    pub pair: DetectorPair,
    pub n_max: usize,
    h0: DVector<f64>,
    h_int: DMatrix<Complex64>,
}

impl TruncatedHamiltonian {
    pub fn dim(&self) -> usize {
        self.h0.len()
    }

    pub fn mode_dim(&self) -> usize {
        self.dim() / QUBIT_STATES
    }

    /// Flat index of qubit state `q` with the given occupations.
    pub fn index(&self, q: usize, occupations: &[usize]) -> usize {
        q * self.mode_dim() + occupations.iter().fold(0, |acc, &n| acc * (self.n_max + 1) + n)
    }

    pub fn free_part(&self) -> &DVector<f64> {
        &self.h0
    }

    pub fn interaction(&self) -> &DMatrix<Complex64> {
        &self.h_int
    }

    /// `H₀ + η H_int`.
    pub fn hamiltonian(&self, eta: f64) -> DMatrix<Complex64> {
        let mut h = self.h_int.scale(eta);
        for (i, &e) in self.h0.iter().enumerate() {
            h[(i, i)] += Complex64::new(e, 0.0);
        }
        h
    }
}

fn occupations(mut index: usize, modes: usize, base: usize) -> Vec<usize> {
    let mut n = vec![0; modes];
    for slot in n.iter_mut().rev() {
        *slot = index % base;
        index /= base;
    }
    n
}

pub fn build_truncated(model: &ModeModel, pair: &DetectorPair, n_max: usize) -> Result<TruncatedHamiltonian> {
    build_truncated_capped(model, pair, n_max, DEFAULT_DIMENSION_CAP)
}

pub fn build_truncated_capped(
    model: &ModeModel,
    pair: &DetectorPair,
    n_max: usize,
    cap: usize,
) -> Result<TruncatedHamiltonian> {
    model.validate()?;
    pair.validate()?;
    if n_max == 0 {
        return Err(Error::invalid("n_max", "need at least one quantum per mode"));
    }
    let modes = model.len();
    let base = n_max + 1;
    let mode_dim = u32::try_from(modes)
        .ok()
        .and_then(|m| base.checked_pow(m))
        .ok_or(Error::DimensionCap { dim: usize::MAX, cap })?;
    let dim = mode_dim.checked_mul(QUBIT_STATES).ok_or(Error::DimensionCap { dim: usize::MAX, cap })?;
    if dim > cap {
        return Err(Error::DimensionCap { dim, cap });
    }

    let mut h0 = DVector::zeros(dim);
    let mut h_int = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    let couplings = [(pair.alpha1, &model.f1), (pair.alpha2, &model.f2)];
    for m in 0..mode_dim {
        let n = occupations(m, modes, base);
        let field: f64 = n.iter().zip(&model.energies).map(|(&k, &e)| k as f64 * e).sum();
        for q in 0..QUBIT_STATES {
            let (e1, e2) = excited(q);
            h0[q * mode_dim + m] = field + pair.delta_e * (e1 as u8 + e2 as u8) as f64;
        }
        // Raising mode j: ⟨n+1|c* a†|n⟩ = c*·√(n+1); the lowering term is the adjoint.
        let mut stride = 1;
        for j in (0..modes).rev() {
            if n[j] < n_max {
                let up = m + stride;
                let amp = ((n[j] + 1) as f64).sqrt();
                for q in 0..QUBIT_STATES {
                    for (detector, (alpha, f)) in couplings.iter().enumerate() {
                        let flipped = q ^ if detector == 0 { 2 } else { 1 };
                        let value = f[j].conj() * (alpha * amp);
                        let (row, col) = (flipped * mode_dim + up, q * mode_dim + m);
                        h_int[(row, col)] += value;
                        h_int[(col, row)] += value.conj();
                    }
                }
            }
            stride *= base;
        }
    }
    Ok(TruncatedHamiltonian { model: model.clone(), pair: *pair, n_max, h0, h_int })
}

/// Lowest eigenpair of `H₀ + η H_int` and the gap to the next level.
fn ground_state(h: &TruncatedHamiltonian, eta: f64) -> Result<(f64, f64, DVector<Complex64>)> {
    let eig = SymmetricEigen::new(h.hamiltonian(eta));
    let mut order: Vec<usize> = (0..h.dim()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let gap = eig.eigenvalues[order[1]] - eig.eigenvalues[order[0]];
    if gap < DEGENERACY_TOL {
        return Err(Error::DegenerateGround { gap });
    }
    Ok((eig.eigenvalues[order[0]], gap, eig.eigenvectors.column(order[0]).into_owned()))
}

/// Partial trace of `|ψ⟩⟨ψ|` over the modes.
pub fn reduce(h: &TruncatedHamiltonian, psi: &DVector<Complex64>) -> RhoA {
    let md = h.mode_dim();
    RhoA(Matrix4::from_fn(|a, b| (0..md).map(|m| psi[a * md + m] * psi[b * md + m].conj()).sum()))
}

/// `P1`, `P2`, `E` and `F` read off the positions they occupy in the
/// second-order state.
pub fn reduced_elements(rho: &RhoA) -> Result<ReducedElements> {
    let m = rho.matrix();
    ReducedElements::new(m[(1, 1)].re, m[(2, 2)].re, Some(m[(2, 1)]), m[(3, 0)])
}

#[derive(Clone, Debug)]
pub struct ExactGround {
    pub rho: RhoA,
    pub elements: ReducedElements,
    pub energy: f64,
    pub gap: f64,
    /// Largest entry outside the second-order sparsity pattern.
    pub off_pattern: f64,
}

fn in_pattern(a: usize, b: usize) -> bool {
    a == b || matches!((a, b), (1, 2) | (2, 1) | (0, 3) | (3, 0))
}

pub fn exact_ground_reduced(h: &TruncatedHamiltonian) -> Result<ExactGround> {
    let (energy, gap, psi) = ground_state(h, 1.0)?;
    let rho = reduce(h, &psi);
    let elements = reduced_elements(&rho)?;
    let mut off_pattern: f64 = rho.matrix()[(0, 0)].norm();
    for a in 0..4 {
        for b in 0..4 {
            if !in_pattern(a, b) {
                off_pattern = off_pattern.max(rho.matrix()[(a, b)].norm());
            }
        }
    }
    Ok(ExactGround { rho, elements, energy, gap, off_pattern })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RampShape {
    Linear,
    /// `η = sin²(πt/(2Δt))`.
    Smooth,
}

impl RampShape {
    /// `max|η̇|·Δt`.
    fn peak_rate(self) -> f64 {
        match self {
            RampShape::Linear => 1.0,
            RampShape::Smooth => 0.5 * PI,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RampSchedule {
    pub total_time: f64,
    pub shape: RampShape,
    pub samples_per_unit_time: f64,
}

impl RampSchedule {
    pub fn new(total_time: f64, shape: RampShape, samples_per_unit_time: f64) -> Result<Self> {
        if !(total_time > 0.0) || !total_time.is_finite() {
            return Err(Error::invalid("total_time", format!("must be positive, got {total_time}")));
        }
        if !(samples_per_unit_time > 0.0) || !samples_per_unit_time.is_finite() {
            return Err(Error::invalid("samples_per_unit_time", "must be positive"));
        }
        Ok(RampSchedule { total_time, shape, samples_per_unit_time })
    }

    /// The ramp whose steepest slope equals `max_rate`.
    pub fn with_max_rate(shape: RampShape, max_rate: f64, samples_per_unit_time: f64) -> Result<Self> {
        if !(max_rate > 0.0) {
            return Err(Error::invalid("max_rate", "must be positive"));
        }
        Self::new(shape.peak_rate() / max_rate, shape, samples_per_unit_time)
    }

    pub fn eta(&self, t: f64) -> f64 {
        let x = (t / self.total_time).clamp(0.0, 1.0);
        match self.shape {
            RampShape::Linear => x,
            RampShape::Smooth => (0.5 * PI * x).sin().powi(2),
        }
    }

    pub fn max_rate(&self) -> f64 {
        self.shape.peak_rate() / self.total_time
    }
}

#[derive(Clone, Debug)]
pub struct RampOutcome {
    pub rho: RhoA,
    /// `|⟨Ω|ψ(Δt)⟩|²` against the ground state of the full Hamiltonian.
    pub fidelity: f64,
    pub steps: usize,
    pub max_norm_drift: f64,
}

fn spectral_radius(m: DMatrix<Complex64>) -> f64 {
    SymmetricEigen::new(m).eigenvalues.iter().fold(0.0, |acc: f64, l| acc.max(l.abs()))
}

/// Evolves `|gg, 0⟩` under `H₀ + η(t) H_int` with midpoint exponential steps.
pub fn evolve_ramp(h: &TruncatedHamiltonian, ramp: &RampSchedule) -> Result<RampOutcome> {
    let (_, _, ground) = ground_state(h, 1.0)?;
    let norm = h.h0.amax() + spectral_radius(h.h_int.clone());
    let h_max = (1.0 / (STEPS_PER_NORM * norm)).min(1.0 / ramp.samples_per_unit_time);
    let steps = (ramp.total_time / h_max).ceil().max(1.0) as usize;
    let dt = ramp.total_time / steps as f64;

    let mut psi = DVector::from_element(h.dim(), Complex64::new(0.0, 0.0));
    psi[h.index(3, &vec![0; h.model.len()])] = Complex64::new(1.0, 0.0);
    let mut max_norm_drift: f64 = 0.0;
    for k in 0..steps {
        let t = (k as f64 + 0.5) * dt;
        let eig = SymmetricEigen::new(h.hamiltonian(ramp.eta(t)));
        let mut c = eig.eigenvectors.adjoint() * &psi;
        for (ci, &l) in c.iter_mut().zip(eig.eigenvalues.iter()) {
            *ci *= Complex64::from_polar(1.0, -l * dt);
        }
        psi = &eig.eigenvectors * c;
        let drift = (psi.norm() - 1.0).abs();
        max_norm_drift = max_norm_drift.max(drift);
        if drift > NORM_DRIFT_TOL {
            return Err(Error::NormDrift { drift, time: (k + 1) as f64 * dt });
        }
    }
    let fidelity = ground.dotc(&psi).norm_sqr();
    Ok(RampOutcome { rho: reduce(h, &psi), fidelity, steps, max_norm_drift })
}

/// Radial midpoint grid over `[0, cutoff]` with two real modes per shell,
/// even and odd under exchange of the detectors, so that the discrete sums
/// approximate the free-field integrals.
pub fn field_shell_model(mass: f64, d: f64, cutoff: f64, shells: usize) -> Result<ModeModel> {
    if shells == 0 {
        return Err(Error::invalid("shells", "need at least one shell"));
    }
    if !(cutoff > 0.0) || !(d > 0.0) || !(mass >= 0.0) {
        return Err(Error::invalid("shells", "cutoff and separation must be positive, mass non-negative"));
    }
    let dp = cutoff / shells as f64;
    let mut energies = Vec::with_capacity(2 * shells);
    let mut f1 = Vec::with_capacity(2 * shells);
    let mut f2 = Vec::with_capacity(2 * shells);
    let mut labels = Vec::with_capacity(2 * shells);
    for j in 0..shells {
        let p = (j as f64 + 0.5) * dp;
        let e = energy(p, mass);
        let w = p * p * dp / (2.0 * PI * PI);
        let s = (p * d).sin() / (p * d);
        for (sign, tag) in [(1.0, '+'), (-1.0, '-')] {
            let amp = (w * (1.0 + sign * s) / (4.0 * e)).sqrt();
            energies.push(e);
            f1.push(Complex64::new(amp, 0.0));
            f2.push(Complex64::new(sign * amp, 0.0));
            labels.push(format!("p={p}{tag}"));
        }
    }
    ModeModel::new(energies, f1, f2)?.with_labels(labels)
}
