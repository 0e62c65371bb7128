//! Run configuration: a TOML file, `--set` overrides and per-scenario defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use toml::Value;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Free,
    Dirichlet,
    Potential,
    Thermal,
    Verify,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Scenario::Free => "free",
            Scenario::Dirichlet => "dirichlet",
            Scenario::Potential => "potential",
            Scenario::Thermal => "thermal",
            Scenario::Verify => "verify",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Copy, Debug)]
enum Slot {
    Num(f64),
    Int(i64),
    Choice(&'static str, &'static [&'static str]),
}

use Slot::{Choice, Int, Num};

const DETECTOR: &[(&str, Slot)] =
    &[("mass", Num(1.0)), ("delta_e", Num(0.1)), ("alpha", Num(0.1)), ("d", Num(0.5)), ("delta_x", Num(1e-3))];

fn schema(scenario: Scenario) -> Vec<(&'static str, Slot)> {
    let mut s: Vec<(&'static str, Slot)> = match scenario {
        Scenario::Free | Scenario::Thermal | Scenario::Potential => DETECTOR.to_vec(),
        Scenario::Dirichlet => vec![
            ("gamma", Num(0.5)),
            ("eps", Num(0.02)),
            ("lambda_tilde", Num(1e3)),
            ("alpha", Num(0.1)),
            ("orientation", Choice("perpendicular", &["perpendicular", "parallel"])),
            ("method", Choice("closed", &["closed", "integral"])),
            ("m_max_rule", Choice("exact", &["exact", "floor", "ceil"])),
        ],
        Scenario::Verify => vec![
            ("model", Choice("two-mode", &["two-mode", "shells"])),
            ("alpha", Num(0.1)),
            ("delta_e", Num(0.5)),
            ("n_max", Int(2)),
            ("e1", Num(1.0)),
            ("e2", Num(1.5)),
            ("f_a", Num(1.0)),
            ("f_b", Num(0.6)),
            ("mass", Num(1.0)),
            ("d", Num(1.0)),
            ("cutoff", Num(4.0)),
            ("shells", Int(2)),
            ("ramp", Choice("none", &["none", "smooth", "linear"])),
            ("rate_fraction", Num(0.01)),
        ],
    };
    match scenario {
        Scenario::Thermal => s.push(("theta", Num(0.0))),
        Scenario::Potential => {
            s.push(("lambda_v0", Num(0.0)));
            s.push(("sigma_b", Num(1.0)));
            s.push(("n_max", Int(0)));
        }
        _ => {}
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub param: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default = "linear")]
    pub spacing: Spacing,
}

fn linear() -> Spacing {
    Spacing::Linear
}

impl Sweep {
    pub fn grid(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.start + (self.stop - self.start) * t,
                    Spacing::Log => self.start * (self.stop / self.start).powf(t),
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Numerics {
    pub tol_rel: f64,
    pub tol_abs: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics { tol_rel: 1e-10, tol_abs: 1e-12 }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    scenario: Option<Scenario>,
    #[serde(default)]
    params: BTreeMap<String, Value>,
    sweep: Option<Value>,
    numerics: Option<NumericsFile>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct NumericsFile {
    tol_rel: Option<f64>,
    tol_abs: Option<f64>,
}

/// Fully resolved configuration; serialized verbatim into output headers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub params: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    pub numerics: Numerics,
}

#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub set: Vec<String>,
    pub tol_rel: Option<f64>,
    pub tol_abs: Option<f64>,
}

fn parse_value(raw: &str) -> Value {
    raw.parse::<i64>()
        .map(Value::Integer)
        .or_else(|_| raw.parse::<f64>().map(Value::Float))
        .unwrap_or_else(|_| Value::String(raw.to_string()))
}

fn as_number(v: &Value) -> Option<f64> {
    match v {
        Value::Float(x) => Some(*x),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

impl RunConfig {
    pub fn load(scenario: Scenario, path: Option<&Path>, overrides: &Overrides) -> Result<Self, CliError> {
        let file: FileConfig = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
                toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {}", p.display(), e.message())))?
            }
            None => FileConfig::default(),
        };
        if let Some(s) = file.scenario {
            if s != scenario {
                return Err(CliError::Config(format!("config is for scenario `{s}`, not `{scenario}`")));
            }
        }
        let mut params = file.params;
        let mut sweep: BTreeMap<String, Value> = match file.sweep {
            Some(Value::Table(t)) => t.into_iter().collect(),
            Some(_) => return Err(CliError::Config("`sweep` must be a table".into())),
            None => BTreeMap::new(),
        };
        let mut numerics = Numerics::default();
        if let Some(n) = file.numerics {
            numerics.tol_rel = n.tol_rel.unwrap_or(numerics.tol_rel);
            numerics.tol_abs = n.tol_abs.unwrap_or(numerics.tol_abs);
        }
        for item in &overrides.set {
            let (key, raw) =
                item.split_once('=').ok_or_else(|| CliError::Config(format!("`--set {item}` is not key=value")))?;
            let value = parse_value(raw.trim());
            match key.trim().split_once('.') {
                Some(("sweep", k)) => {
                    sweep.insert(k.to_string(), value);
                }
                Some(("numerics", k)) => {
                    let x = as_number(&value)
                        .ok_or_else(|| CliError::Config(format!("`numerics.{k}` must be a number")))?;
                    match k {
                        "tol_rel" => numerics.tol_rel = x,
                        "tol_abs" => numerics.tol_abs = x,
                        _ => return Err(CliError::Config(format!("unknown numerics key `{k}`"))),
                    }
                }
                Some(("params", k)) => {
                    params.insert(k.to_string(), value);
                }
                Some((section, _)) => return Err(CliError::Config(format!("unknown section `{section}`"))),
                None => {
                    params.insert(key.trim().to_string(), value);
                }
            }
        }
        numerics.tol_rel = overrides.tol_rel.unwrap_or(numerics.tol_rel);
        numerics.tol_abs = overrides.tol_abs.unwrap_or(numerics.tol_abs);
        if !(numerics.tol_rel > 0.0) || !(numerics.tol_abs >= 0.0) {
            return Err(CliError::Config("tolerances must be positive".into()));
        }

        let schema = schema(scenario);
        for key in params.keys() {
            if !schema.iter().any(|(name, _)| name == key) {
                return Err(CliError::Config(format!("unknown parameter `{key}` for scenario `{scenario}`")));
            }
        }
        let mut resolved = BTreeMap::new();
        for (name, default) in &schema {
            let value = match (params.remove(*name), default) {
                (None, Num(x)) => Value::Float(*x),
                (None, Int(i)) => Value::Integer(*i),
                (None, Choice(c, _)) => Value::String(c.to_string()),
                (Some(v), Num(_)) => Value::Float(
                    as_number(&v).ok_or_else(|| CliError::Config(format!("parameter `{name}` must be a number")))?,
                ),
                (Some(v), Int(_)) => match v {
                    Value::Integer(i) => Value::Integer(i),
                    _ => return Err(CliError::Config(format!("parameter `{name}` must be an integer"))),
                },
                (Some(v), Choice(_, allowed)) => match v {
                    Value::String(s) if allowed.contains(&s.as_str()) => Value::String(s),
                    other => {
                        return Err(CliError::Config(format!(
                            "parameter `{name}` must be one of {allowed:?}, got {other}"
                        )))
                    }
                },
            };
            resolved.insert(name.to_string(), value);
        }

        let sweep = if sweep.is_empty() {
            None
        } else {
            for key in ["start", "stop"] {
                if let Some(Value::Integer(i)) = sweep.get(key) {
                    let x = *i as f64;
                    sweep.insert(key.to_string(), Value::Float(x));
                }
            }
            let s: Sweep = Value::Table(sweep.into_iter().collect())
                .try_into()
                .map_err(|e: toml::de::Error| CliError::Config(format!("sweep: {}", e.message())))?;
            match schema.iter().find(|(name, _)| *name == s.param) {
                Some((_, Num(_))) => {}
                Some(_) => return Err(CliError::Config(format!("sweep parameter `{}` is not continuous", s.param))),
                None => {
                    return Err(CliError::Config(format!(
                        "sweep parameter `{}` does not exist in scenario `{scenario}`",
                        s.param
                    )))
                }
            }
            if s.count < 2 {
                return Err(CliError::Config("sweep count must be at least 2".into()));
            }
            if !s.start.is_finite() || !s.stop.is_finite() {
                return Err(CliError::Config("sweep bounds must be finite".into()));
            }
            if s.spacing == Spacing::Log && !(s.start > 0.0 && s.stop > 0.0) {
                return Err(CliError::Config("log sweep needs positive bounds".into()));
            }
            Some(s)
        };
        Ok(RunConfig { scenario, params: resolved, sweep, numerics })
    }

    /// Parameter sets for each grid point, in grid order.
    pub fn points(&self) -> Vec<(Option<f64>, Params)> {
        match &self.sweep {
            None => vec![(None, Params(self.params.clone()))],
            Some(s) => s
                .grid()
                .into_iter()
                .map(|x| {
                    let mut p = self.params.clone();
                    p.insert(s.param.clone(), Value::Float(x));
                    (Some(x), Params(p))
                })
                .collect(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("resolved configuration serializes")
    }
}

/// Resolved parameters of one grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct Params(BTreeMap<String, Value>);

impl Params {
    pub fn num(&self, key: &str) -> f64 {
        self.0.get(key).and_then(as_number).unwrap_or_else(|| panic!("schema guarantees numeric `{key}`"))
    }

    pub fn int(&self, key: &str) -> i64 {
        match self.0.get(key) {
            Some(Value::Integer(i)) => *i,
            _ => panic!("schema guarantees integer `{key}`"),
        }
    }

    pub fn choice(&self, key: &str) -> &str {
        match self.0.get(key) {
            Some(Value::String(s)) => s,
            _ => panic!("schema guarantees string `{key}`"),
        }
    }
}
