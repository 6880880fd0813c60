//! Scenario configuration files.
//!
//! A config is TOML with an optional top-level `preset` and `label`, and the
//! sections `[params]`, `[init]`, `[grid]` and `[control]`:
//!
//! ```toml
//! preset = "fig12"        # base values; omit to give all ten params
//! label = "beta-high"
//!
//! [params]                # pi mu beta b rho eps p l delta lam
//! beta = 0.09
//!
//! [init]                  # default (pi/mu - 0.01, 0, 0.01, 0)
//! i = 0.05
//!
//! [grid]                  # t0 = 0, h = 0.01, horizon = 25 with controls else 100
//! horizon = 60
//! steps = 6000            # overrides h
//!
//! [control]
//! u = 1                   # switches, 0 or 1
//! v = 0
//! w = 1
//! a = 1.0                 # weights a, b, c
//! relaxation = 0.5        # first blend weight; fixed when adaptive = false
//! adaptive = true
//! tol = 1e-6
//! max_iter = 200
//! ```
//!
//! Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Deserializer};

use crate::control::{ControlWeights, FbsConfig};
use crate::error::{Error, Result};
use crate::integrator::Grid;
use crate::model::{ControlSwitches, ModelParams, State, PARAM_NAMES};
use crate::presets;

pub const DEFAULT_H: f64 = 0.01;
pub const DEFAULT_HORIZON_CONTROLLED: f64 = 25.0;
pub const DEFAULT_HORIZON_UNCONTROLLED: f64 = 100.0;

/// A fully resolved and validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub params: ModelParams,
    pub init: State,
    pub grid: Grid,
    pub switches: ControlSwitches,
    pub weights: ControlWeights,
    pub fbs: FbsConfig,
    pub label: String,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.label.trim().is_empty() {
            return Err(Error::validation("label", "label must be nonempty"));
        }
        self.params.validate()?;
        for (name, v) in ["s", "e", "i", "z"].iter().zip(self.init.to_array()) {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::validation(
                    format!("init.{name}"),
                    "initial value must be finite and ≥ 0",
                ));
            }
        }
        self.switches.validate()?;
        self.weights.validate()?;
        self.fbs.validate()?;
        Grid::new(self.grid.t0, self.grid.tf, self.grid.n_steps)?;
        Ok(())
    }
}

fn opt_number<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<f64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Num {
        Int(i64),
        Float(f64),
    }
    Ok(Option::<Num>::deserialize(d)?.map(|n| match n {
        Num::Int(i) => i as f64,
        Num::Float(f) => f,
    }))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    #[serde(default, deserialize_with = "opt_number")]
    pi: Option<f64>,
    #[serde(default, deserialize_with = "opt_number")]
    mu: Option<f64>,
    #[serde(default, deserialize_with = "opt_number")]
    beta: Option<f64>,
    #[serde(default, deserialize_with = "opt_number")]
    b: Option<f64>,
    #[serde(default, deserialize_with = "opt_number")]
    rho: Option<f64>,
    #[serde(default, deserialize_with = "opt_number")]
    eps: Option<f64>,
    #[serde(default, deserialize_with = "opt_number")]
    p: Option<f64>,
    #[serde(default, deserialize_with = "opt_number")]
    l: Option<f64>,
    #[serde(default, deserialize_with = "opt_number")]
    delta: Option<f64>,
    #[serde(default, deserialize_with = "opt_number")]
    lam: Option<f64>,
}

impl RawParams {
    fn slot(&mut self, name: &str) -> Option<&mut Option<f64>> {
        Some(match name {
            "pi" => &mut self.pi,
            "mu" => &mut self.mu,
            "beta" => &mut self.beta,
            "b" => &mut self.b,
            "rho" => &mut self.rho,
            "eps" => &mut self.eps,
            "p" => &mut self.p,
            "l" => &mut self.l,
            "delta" => &mut self.delta,
            "lam" => &mut self.lam,
            _ => return None,
        })
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInit {
    #[serde(default, deserialize_with = "opt_number")]
    s: Option<f64>,
    #[serde(default, deserialize_with = "opt_number")]
    e: Option<f64>,
    #[serde(default, deserialize_with = "opt_number")]
    i: Option<f64>,
    #[serde(default, deserialize_with = "opt_number")]
    z: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    #[serde(default, deserialize_with = "opt_number")]
    t0: Option<f64>,
    #[serde(default, deserialize_with = "opt_number")]
    horizon: Option<f64>,
    #[serde(default, deserialize_with = "opt_number")]
    h: Option<f64>,
    steps: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawControl {
    u: Option<u8>,
    v: Option<u8>,
    w: Option<u8>,
    #[serde(default, deserialize_with = "opt_number")]
    a: Option<f64>,
    #[serde(default, deserialize_with = "opt_number")]
    b: Option<f64>,
    #[serde(default, deserialize_with = "opt_number")]
    c: Option<f64>,
    #[serde(default, deserialize_with = "opt_number")]
    relaxation: Option<f64>,
    #[serde(default, deserialize_with = "opt_number")]
    tol: Option<f64>,
    adaptive: Option<bool>,
    max_iter: Option<u64>,
}

/// Unresolved configuration: file contents plus command-line overrides.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    preset: Option<String>,
    label: Option<String>,
    #[serde(default)]
    params: RawParams,
    #[serde(default)]
    init: RawInit,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    control: RawControl,
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::validation(key, format!("expected a number, got `{value}`")))
}

fn parse_int<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| Error::validation(key, format!("expected a nonnegative integer, got `{value}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" | "1" => Ok(true),
        "false" | "0" => Ok(false),
        _ => Err(Error::validation(key, format!("expected true or false, got `{value}`"))),
    }
}

impl RawConfig {
    pub fn from_preset(name: &str) -> Result<Self> {
        if presets::lookup(name).is_none() {
            return Err(Error::validation(
                "preset",
                format!(
                    "unknown preset `{name}`, expected one of {}",
                    presets::PRESET_NAMES.join(", ")
                ),
            ));
        }
        Ok(RawConfig {
            preset: Some(name.to_string()),
            ..RawConfig::default()
        })
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Applies a dotted-path override such as `params.beta=0.05`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let unknown = || Error::validation(key, "unknown configuration key");
        match key.split_once('.') {
            None => match key {
                "preset" => {
                    RawConfig::from_preset(value)?;
                    self.preset = Some(value.to_string());
                }
                "label" => self.label = Some(value.to_string()),
                _ => return Err(unknown()),
            },
            Some(("params", name)) => {
                let v = parse_f64(key, value)?;
                *self.params.slot(name).ok_or_else(unknown)? = Some(v);
            }
            Some(("init", name)) => {
                let v = parse_f64(key, value)?;
                let slot = match name {
                    "s" => &mut self.init.s,
                    "e" => &mut self.init.e,
                    "i" => &mut self.init.i,
                    "z" => &mut self.init.z,
                    _ => return Err(unknown()),
                };
                *slot = Some(v);
            }
            Some(("grid", name)) => match name {
                "t0" => self.grid.t0 = Some(parse_f64(key, value)?),
                "horizon" => self.grid.horizon = Some(parse_f64(key, value)?),
                "h" => self.grid.h = Some(parse_f64(key, value)?),
                "steps" => self.grid.steps = Some(parse_int(key, value)?),
                _ => return Err(unknown()),
            },
            Some(("control", name)) => match name {
                "u" => self.control.u = Some(parse_int(key, value)?),
                "v" => self.control.v = Some(parse_int(key, value)?),
                "w" => self.control.w = Some(parse_int(key, value)?),
                "a" => self.control.a = Some(parse_f64(key, value)?),
                "b" => self.control.b = Some(parse_f64(key, value)?),
                "c" => self.control.c = Some(parse_f64(key, value)?),
                "relaxation" => self.control.relaxation = Some(parse_f64(key, value)?),
                "tol" => self.control.tol = Some(parse_f64(key, value)?),
                "adaptive" => self.control.adaptive = Some(parse_bool(key, value)?),
                "max_iter" => self.control.max_iter = Some(parse_int(key, value)?),
                _ => return Err(unknown()),
            },
            Some(_) => return Err(unknown()),
        }
        Ok(())
    }

    /// Parses a `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::validation(pair, "override must look like key=value"))?;
        self.set(k.trim(), v.trim())
    }

    /// Fills defaults and validates.
    pub fn resolve(&self) -> Result<ScenarioConfig> {
        let base = match &self.preset {
            Some(name) => Some(
                presets::lookup(name).ok_or_else(|| Error::validation("preset", format!("unknown preset `{name}`")))?,
            ),
            None => None,
        };

        let mut params = base.map(|(p, _)| p);
        let mut raw = self.params_copy();
        for name in PARAM_NAMES {
            let given = *raw.slot(name).expect("known name");
            params = match (params, given) {
                (Some(p), Some(v)) => Some(p.with(name, v)?),
                (Some(p), None) => Some(p),
                (None, _) => None,
            };
        }
        let params = match params {
            Some(p) => p,
            None => {
                let mut vals = [0.0; 10];
                for (slot, name) in vals.iter_mut().zip(PARAM_NAMES) {
                    *slot = raw
                        .slot(name)
                        .expect("known name")
                        .ok_or_else(|| Error::validation(format!("params.{name}"), "missing (no preset given)"))?;
                }
                ModelParams {
                    pi: vals[0],
                    mu: vals[1],
                    beta: vals[2],
                    b: vals[3],
                    rho: vals[4],
                    eps: vals[5],
                    p: vals[6],
                    l: vals[7],
                    delta: vals[8],
                    lam: vals[9],
                }
            }
        };
        params.validate()?;

        let base_sw = base.map(|(_, s)| s).unwrap_or(ControlSwitches::OFF);
        let switches = ControlSwitches {
            pi1: self.control.u.unwrap_or(base_sw.pi1),
            pi2: self.control.v.unwrap_or(base_sw.pi2),
            pi3: self.control.w.unwrap_or(base_sw.pi3),
        };
        switches.validate().map_err(|e| match e {
            Error::Validation { reason, .. } => Error::validation("control.u/v/w", reason),
            other => other,
        })?;

        let t0 = self.grid.t0.unwrap_or(0.0);
        let horizon = self.grid.horizon.unwrap_or(if switches.any() {
            DEFAULT_HORIZON_CONTROLLED
        } else {
            DEFAULT_HORIZON_UNCONTROLLED
        });
        if !(horizon > 0.0) {
            return Err(Error::validation("grid.horizon", "horizon > 0"));
        }
        let grid = match self.grid.steps {
            Some(n) => Grid::new(t0, t0 + horizon, n as usize)?,
            None => Grid::with_step(t0, t0 + horizon, self.grid.h.unwrap_or(DEFAULT_H))?,
        };

        let level = params.carrying_level();
        let init = State::new(
            self.init.s.unwrap_or(level - presets::DEFAULT_SEED_I),
            self.init.e.unwrap_or(0.0),
            self.init.i.unwrap_or(presets::DEFAULT_SEED_I),
            self.init.z.unwrap_or(0.0),
        );

        let dw = ControlWeights::default();
        let weights = ControlWeights {
            a: self.control.a.unwrap_or(dw.a),
            b_w: self.control.b.unwrap_or(dw.b_w),
            c_w: self.control.c.unwrap_or(dw.c_w),
        };
        let df = FbsConfig::default();
        let fbs = FbsConfig {
            relaxation: self.control.relaxation.unwrap_or(df.relaxation),
            adaptive: self.control.adaptive.unwrap_or(df.adaptive),
            tol: self.control.tol.unwrap_or(df.tol),
            max_iter: self.control.max_iter.map(|m| m as usize).unwrap_or(df.max_iter),
        };

        let label = self
            .label
            .clone()
            .or_else(|| self.preset.clone())
            .unwrap_or_else(|| "custom".to_string());

        let cfg = ScenarioConfig {
            params,
            init,
            grid,
            switches,
            weights,
            fbs,
            label,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn params_copy(&self) -> RawParams {
        RawParams {
            pi: self.params.pi,
            mu: self.params.mu,
            beta: self.params.beta,
            b: self.params.b,
            rho: self.params.rho,
            eps: self.params.eps,
            p: self.params.p,
            l: self.params.l,
            delta: self.params.delta,
            lam: self.params.lam,
        }
    }
}

/// Loads and resolves a config file.
pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    RawConfig::from_path(path)?.resolve()
}

/// Resolves a built-in preset with all defaults.
pub fn preset_config(name: &str) -> Result<ScenarioConfig> {
    RawConfig::from_preset(name)?.resolve()
}
