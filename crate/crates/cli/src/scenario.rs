//! Validated per-point jobs and their evaluation.

use entanglement_core::dirichlet::{
    dirichlet_elements_parallel, dirichlet_elements_perpendicular, DirichletParams, MmaxRule, Orientation,
    PerpendicularMethod,
};
use entanglement_core::freefield::{free_matrix_elements, FreeFieldParams};
use entanglement_core::numerics::{QuadratureSpec, SeriesSpec};
use entanglement_core::potential::{corrected_elements, unit_delta_elements, PotentialParams, SeriesOrder};
use entanglement_core::thermal::{thermal_elements, ThermalParams};
use entanglement_core::verifier::{
    build_truncated, evolve_ramp, exact_ground_reduced, field_shell_model, RampSchedule, RampShape,
    TruncatedHamiltonian,
};
use entanglement_core::{
    adiabatic_rate_bound, k_from_negativity, matrix_elements_discrete, negativity, DetectorPair, ModeModel,
    ReducedElements,
};
use num_complex::Complex64;

use crate::config::{Params, Scenario};
use crate::error::CliError;

/// Ramp samples per unit time on top of the norm-based step bound.
const RAMP_SAMPLES: f64 = 20.0;

#[derive(Clone, Debug)]
pub enum Job {
    Free(FreeFieldParams),
    Dirichlet(DirichletParams, PerpendicularMethod),
    Potential(PotentialParams),
    Thermal(ThermalParams),
    Verify(Box<VerifyJob>),
}

#[derive(Clone, Debug)]
pub struct VerifyJob {
    hamiltonian: TruncatedHamiltonian,
    ramp: Option<(RampShape, f64)>,
}

fn pair(p: &Params) -> Result<DetectorPair, CliError> {
    Ok(DetectorPair::symmetric(p.num("delta_e"), p.num("alpha"), p.num("d"), p.num("delta_x"))?)
}

fn free(p: &Params) -> Result<FreeFieldParams, CliError> {
    Ok(FreeFieldParams::new(p.num("mass"), pair(p)?)?)
}

fn count(p: &Params, key: &str) -> Result<usize, CliError> {
    usize::try_from(p.int(key)).map_err(|_| CliError::Config(format!("parameter `{key}` must be non-negative")))
}

/// Validates one grid point without doing any numerics.
pub fn build(scenario: Scenario, p: &Params) -> Result<Job, CliError> {
    Ok(match scenario {
        Scenario::Free => Job::Free(free(p)?),
        Scenario::Thermal => Job::Thermal(ThermalParams::new(free(p)?, p.num("theta"))?),
        Scenario::Potential => {
            let order = match count(p, "n_max")? {
                0 => SeriesOrder::default(),
                n => SeriesOrder::Fixed(n),
            };
            Job::Potential(PotentialParams::new(free(p)?, p.num("lambda_v0"), p.num("sigma_b"), order)?)
        }
        Scenario::Dirichlet => {
            let orientation = match p.choice("orientation") {
                "parallel" => Orientation::Parallel,
                _ => Orientation::Perpendicular,
            };
            let rule = match p.choice("m_max_rule") {
                "floor" => MmaxRule::Floor,
                "ceil" => MmaxRule::Ceil,
                _ => MmaxRule::Exact,
            };
            let method = match p.choice("method") {
                "integral" => PerpendicularMethod::Integral,
                _ => PerpendicularMethod::ClosedForm(rule),
            };
            let params =
                DirichletParams::new(p.num("gamma"), p.num("eps"), p.num("lambda_tilde"), orientation, p.num("alpha"))?;
            Job::Dirichlet(params, method)
        }
        Scenario::Verify => {
            let detectors = DetectorPair::symmetric(p.num("delta_e"), p.num("alpha"), p.num("d"), 1.0)?;
            let model = match p.choice("model") {
                "shells" => field_shell_model(p.num("mass"), p.num("d"), p.num("cutoff"), count(p, "shells")?)?,
                _ => {
                    let c = |x| Complex64::new(x, 0.0);
                    let (a, b) = (p.num("f_a"), p.num("f_b"));
                    ModeModel::new(vec![p.num("e1"), p.num("e2")], vec![c(a), c(b)], vec![c(a), c(-b)])?
                }
            };
            let hamiltonian = build_truncated(&model, &detectors, count(p, "n_max")?)?;
            let ramp = match p.choice("ramp") {
                "smooth" => Some(RampShape::Smooth),
                "linear" => Some(RampShape::Linear),
                _ => None,
            };
            let fraction = p.num("rate_fraction");
            if ramp.is_some() && !(fraction > 0.0) {
                return Err(CliError::Config("`rate_fraction` must be positive".into()));
            }
            Job::Verify(Box::new(VerifyJob { hamiltonian, ramp: ramp.map(|r| (r, fraction)) }))
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Values {
    pub p1: f64,
    pub p2: f64,
    pub e: Option<f64>,
    pub f: f64,
    pub n: f64,
    pub k: f64,
}

impl Values {
    pub fn from_elements(r: &ReducedElements, alpha: f64) -> Self {
        let n = negativity(r);
        Values { p1: r.p1, p2: r.p2, e: r.e.map(|e| e.norm()), f: r.f.norm(), n, k: k_from_negativity(n, alpha) }
    }

    /// Drops the exchange element for scenarios that never compute it.
    fn without_e(mut self) -> Self {
        self.e = None;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub x: Option<f64>,
    pub values: Option<Values>,
    pub flags: Vec<String>,
}

fn alpha_of(pair: &DetectorPair) -> f64 {
    pair.alpha().unwrap_or(f64::NAN)
}

fn run(job: &Job, spec: &QuadratureSpec, flags: &mut Vec<String>) -> entanglement_core::Result<Values> {
    match job {
        Job::Free(f) => Ok(Values::from_elements(&free_matrix_elements(f, spec)?, alpha_of(&f.pair))),
        Job::Thermal(t) => {
            Ok(Values::from_elements(&thermal_elements(t, spec)?, alpha_of(&t.free.pair)).without_e())
        }
        Job::Dirichlet(params, method) => {
            let r = match params.orientation {
                Orientation::Perpendicular => dirichlet_elements_perpendicular(params, *method, spec)?,
                Orientation::Parallel => dirichlet_elements_parallel(params, spec, &SeriesSpec::default())?,
            };
            flags.extend(r.warnings);
            if let Some(n) = r.image_terms {
                flags.push(format!("image_terms={n}"));
            }
            Ok(Values::from_elements(&r.elements, params.alpha).without_e())
        }
        Job::Potential(p) => {
            let unit = unit_delta_elements(p, spec)?;
            if unit.truncated_nodes > 0 {
                flags.push(format!("bessel_truncated={}", unit.truncated_nodes));
            }
            let r = corrected_elements(&p.free, &unit, p.lambda_v0, spec)?;
            Ok(Values::from_elements(&r, alpha_of(&p.free.pair)).without_e())
        }
        Job::Verify(v) => {
            let h = &v.hamiltonian;
            let exact = exact_ground_reduced(h)?;
            let pert = matrix_elements_discrete(&h.model, &h.pair)?;
            let dist = [
                (exact.elements.p1 - pert.p1).abs(),
                (exact.elements.p2 - pert.p2).abs(),
                (exact.elements.e.unwrap_or_default() - pert.e.unwrap_or_default()).norm(),
                (exact.elements.f - pert.f).norm(),
            ]
            .into_iter()
            .fold(0.0, f64::max);
            flags.push(format!("perturbative_distance={dist:e}"));
            let alpha = alpha_of(&h.pair);
            let mut values = Values::from_elements(&exact.elements, alpha);
            values.n = exact.rho.negativity();
            values.k = k_from_negativity(values.n, alpha);
            if let Some((shape, fraction)) = v.ramp {
                let bound = adiabatic_rate_bound(&h.model, &h.pair)?;
                let ramp = RampSchedule::with_max_rate(shape, fraction * bound, RAMP_SAMPLES)?;
                let out = evolve_ramp(h, &ramp)?;
                flags.push(format!("fidelity={}", out.fidelity));
                flags.push(format!("ramp_negativity={}", out.rho.negativity()));
            }
            Ok(values)
        }
    }
}

/// Numeric failures are recorded in the row rather than aborting the sweep.
pub fn evaluate(x: Option<f64>, job: &Job, spec: &QuadratureSpec) -> Row {
    let mut flags = Vec::new();
    let values = match run(job, spec, &mut flags) {
        Ok(v) => Some(v),
        Err(e) => {
            flags.push(format!("error: {e}"));
            None
        }
    };
    Row { x, values, flags }
}
