//! Built-in parameter sets and scenarios.
//!
//! The two parameter sets are the published figure values for the
//! sub-threshold (`fig3`) and super-threshold (`fig12`) regimes. Initial
//! conditions were never published; every preset seeds a small spreader
//! population at the rumor-free state, `(pi/mu - 0.01, 0, 0.01, 0)`.

use crate::model::{ControlSwitches, ModelParams};

/// Figure values of the sub-threshold set, as `name = value` pairs in the
/// order they were published.
pub const FIG3_VALUES: &str = "pi = 10; beta = 0.007; mu = 0.5; eps = 0.06; delta = 0.05; \
p = 0.09767; lam = 0.0084231; rho = 0.21431; l = 0.005234; b = 0.00539";

/// Super-threshold set: only `pi` and `beta` differ from [`FIG3_VALUES`].
pub const FIG12_VALUES: &str = "pi = 50; beta = 0.07; mu = 0.5; eps = 0.06; delta = 0.05; \
p = 0.09767; lam = 0.0084231; rho = 0.21431; l = 0.005234; b = 0.00539";

pub const PRESET_NAMES: [&str; 5] = ["fig3", "fig12", "case-u", "case-v", "case-uvw"];

/// Spreader seed placed at the rumor-free state by default.
pub const DEFAULT_SEED_I: f64 = 0.01;

pub fn fig3_params() -> ModelParams {
    ModelParams {
        pi: 10.0,
        mu: 0.5,
        beta: 0.007,
        b: 0.00539,
        rho: 0.21431,
        eps: 0.06,
        p: 0.09767,
        l: 0.005234,
        delta: 0.05,
        lam: 0.0084231,
    }
}

pub fn fig12_params() -> ModelParams {
    ModelParams {
        pi: 50.0,
        beta: 0.07,
        ..fig3_params()
    }
}

/// Parameter set and control switches of a named preset.
pub fn lookup(name: &str) -> Option<(ModelParams, ControlSwitches)> {
    Some(match name {
        "fig3" => (fig3_params(), ControlSwitches::OFF),
        "fig12" => (fig12_params(), ControlSwitches::OFF),
        "case-u" => (fig12_params(), ControlSwitches { pi1: 1, pi2: 0, pi3: 0 }),
        "case-v" => (fig12_params(), ControlSwitches { pi1: 0, pi2: 1, pi3: 0 }),
        "case-uvw" => (fig12_params(), ControlSwitches::ALL),
        _ => return None,
    })
}
