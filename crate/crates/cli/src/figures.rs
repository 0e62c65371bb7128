//! Curve tables for the published figures.

use std::fs;
use std::path::Path;

use clap::ValueEnum;
use entanglement_core::freefield::free_matrix_elements;
use entanglement_core::numerics::QuadratureSpec;
use entanglement_core::potential::{corrected_elements, unit_delta_elements, DeltaElements};
use entanglement_core::{k_from_negativity, negativity};
use rayon::prelude::*;

use crate::config::{Overrides, RunConfig, Scenario};
use crate::error::CliError;
use crate::output::{Table, VERSION};
use crate::scenario::{build, Job, Row, Values};
use crate::{evaluate_all, quadrature_spec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    All,
}

impl Figure {
    fn name(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::All => "all",
        }
    }

    pub fn expand(self) -> Vec<Figure> {
        match self {
            Figure::All => vec![Figure::Fig2, Figure::Fig3, Figure::Fig4, Figure::Fig5, Figure::Fig6],
            f => vec![f],
        }
    }
}

pub const POTENTIAL_SIGMA: (f64, f64, usize) = (0.2, 20.0, 25);
pub const POTENTIAL_STRENGTHS: [f64; 3] = [-0.01, 0.0, 0.01];

fn sets(items: &[String]) -> Overrides {
    Overrides { set: items.to_vec(), ..Default::default() }
}

/// Run configurations of each curve, in legend order.
pub fn curves(figure: Figure, base: &Overrides) -> Result<Vec<RunConfig>, CliError> {
    let with = |scenario: Scenario, items: Vec<String>| {
        let mut o = sets(&items);
        o.tol_rel = base.tol_rel;
        o.tol_abs = base.tol_abs;
        RunConfig::load(scenario, None, &o)
    };
    let dirichlet = |orientation: &str, stop: f64| -> Result<Vec<RunConfig>, CliError> {
        [0.015, 0.02, 0.03]
            .iter()
            .map(|eps| {
                with(
                    Scenario::Dirichlet,
                    vec![
                        format!("eps={eps}"),
                        "lambda_tilde=1000".into(),
                        format!("orientation={orientation}"),
                        "sweep.param=gamma".into(),
                        "sweep.start=0.01".into(),
                        format!("sweep.stop={stop}"),
                        "sweep.count=60".into(),
                        "sweep.spacing=log".into(),
                    ],
                )
            })
            .collect()
    };
    let potential = |d: f64| -> Result<Vec<RunConfig>, CliError> {
        let (start, stop, count) = POTENTIAL_SIGMA;
        POTENTIAL_STRENGTHS
            .iter()
            .map(|lv| {
                with(
                    Scenario::Potential,
                    vec![
                        "mass=1".into(),
                        "delta_e=0.1".into(),
                        "delta_x=0.001".into(),
                        format!("d={d}"),
                        format!("lambda_v0={lv}"),
                        "sweep.param=sigma_b".into(),
                        format!("sweep.start={start}"),
                        format!("sweep.stop={stop}"),
                        format!("sweep.count={count}"),
                        "sweep.spacing=log".into(),
                    ],
                )
            })
            .collect()
    };
    match figure {
        Figure::Fig2 => dirichlet("perpendicular", 0.99),
        Figure::Fig3 => dirichlet("parallel", 2.0),
        Figure::Fig4 => potential(0.5),
        Figure::Fig5 => potential(0.9145),
        Figure::Fig6 => [0.07, 0.075, 0.08]
            .iter()
            .map(|eps: &f64| {
                with(
                    Scenario::Thermal,
                    vec![
                        "mass=1".into(),
                        "delta_e=0.1".into(),
                        "delta_x=0.001".into(),
                        format!("d={}", eps / 0.1),
                        "sweep.param=theta".into(),
                        "sweep.start=0".into(),
                        "sweep.stop=3".into(),
                        "sweep.count=31".into(),
                    ],
                )
            })
            .collect(),
        Figure::All => Err(CliError::Config("`all` is not a single figure".into())),
    }
}

fn header(config: &RunConfig, label: String) -> Vec<String> {
    vec![label, config.to_toml()]
}

/// Potential curves share the per-unit corrections at each width.
fn potential_rows(configs: &[RunConfig], spec: &QuadratureSpec) -> Result<Vec<Vec<Row>>, CliError> {
    let points = configs[0].points();
    let jobs: Vec<Job> = points.iter().map(|(_, p)| build(Scenario::Potential, p)).collect::<Result<_, _>>()?;
    let units: Vec<Result<DeltaElements, String>> = jobs
        .par_iter()
        .map(|job| match job {
            Job::Potential(p) => unit_delta_elements(p, spec).map_err(|e| e.to_string()),
            _ => unreachable!("potential figure builds potential jobs"),
        })
        .collect();
    configs
        .iter()
        .map(|config| {
            let lv = config.params["lambda_v0"].as_float().expect("resolved float");
            config
                .points()
                .iter()
                .zip(&units)
                .map(|((x, p), unit)| {
                    let Job::Potential(params) = build(Scenario::Potential, p)? else {
                        unreachable!("potential figure builds potential jobs")
                    };
                    let mut flags = Vec::new();
                    let values = match unit {
                        Ok(u) => {
                            if u.truncated_nodes > 0 {
                                flags.push(format!("bessel_truncated={}", u.truncated_nodes));
                            }
                            match corrected_elements(&params.free, u, lv, spec) {
                                Ok(r) => {
                                    let mut v = Values::from_elements(&r, params.free.pair.alpha1);
                                    v.e = None;
                                    Some(v)
                                }
                                Err(e) => {
                                    flags.push(format!("error: {e}"));
                                    None
                                }
                            }
                        }
                        Err(e) => {
                            flags.push(format!("error: {e}"));
                            None
                        }
                    };
                    Ok(Row { x: *x, values, flags })
                })
                .collect()
        })
        .collect()
}

/// `N` and `K` of the free field with `m² → m² + 2λV₀`.
fn asymptotes(config: &RunConfig, spec: &QuadratureSpec) -> Result<String, CliError> {
    let mut text = format!("# entangle {VERSION}\n# free field with m_eff = sqrt(m^2 + 2 lambda_v0)\n");
    text.push_str("lambda_v0,mass_eff,N,K\n");
    for lv in [POTENTIAL_STRENGTHS[0], POTENTIAL_STRENGTHS[2]] {
        let (_, p) = &config.points()[0];
        let Job::Potential(params) = build(Scenario::Potential, p)? else { unreachable!("potential job") };
        let m = params.free.mass;
        let m_eff = (m * m + 2.0 * lv).sqrt();
        let free = params.free.with_mass(m_eff)?;
        let n = negativity(&free_matrix_elements(&free, spec)?);
        let k = k_from_negativity(n, free.pair.alpha1);
        text.push_str(&format!("{lv:e},{m_eff:e},{n:e},{k:e}\n"));
    }
    Ok(text)
}

pub fn emit(figure: Figure, dir: &Path, base: &Overrides) -> Result<Vec<String>, CliError> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for fig in figure.expand() {
        let configs = curves(fig, base)?;
        let spec = quadrature_spec(&configs[0]);
        let tables: Vec<Vec<Row>> = match fig {
            Figure::Fig4 | Figure::Fig5 => potential_rows(&configs, &spec)?,
            _ => configs.iter().map(evaluate_all).collect::<Result<_, _>>()?,
        };
        for (i, (config, rows)) in configs.iter().zip(&tables).enumerate() {
            let name = format!("{}_curve{}.csv", fig.name(), i + 1);
            let sweep = config.sweep.as_ref().map(|s| s.param.as_str());
            let table = Table { sweep, header: header(config, format!("{} curve {}", fig.name(), i + 1)), rows };
            fs::write(dir.join(&name), table.to_bytes())?;
            written.push(name);
        }
        if matches!(fig, Figure::Fig4 | Figure::Fig5) {
            let name = format!("{}_asymptotes.csv", fig.name());
            fs::write(dir.join(&name), asymptotes(&configs[0], &spec)?)?;
            written.push(name);
        }
    }
    Ok(written)
}
