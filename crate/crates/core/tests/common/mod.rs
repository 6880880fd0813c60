#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use seiz_core::control::Adjoint;
use seiz_core::{ControlValue, ModelParams, State};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A valid parameter set with rates spread over a few orders of magnitude.
pub fn random_params(r: &mut impl Rng) -> ModelParams {
    ModelParams {
        pi: r.random_range(0.5..100.0),
        mu: r.random_range(0.05..1.0),
        beta: r.random_range(1e-4..0.2),
        b: r.random_range(0.0..0.05),
        rho: r.random_range(0.0..0.5),
        eps: r.random_range(0.01..0.5),
        p: r.random_range(0.0..=1.0),
        l: r.random_range(0.0..=1.0),
        delta: r.random_range(0.01..0.5),
        lam: r.random_range(0.0..0.05),
    }
}

pub fn random_state(r: &mut impl Rng, scale: f64) -> State {
    State::new(
        r.random_range(0.0..scale),
        r.random_range(0.0..scale),
        r.random_range(0.0..scale),
        r.random_range(0.0..scale),
    )
}

pub fn random_adjoint(r: &mut impl Rng) -> Adjoint {
    Adjoint::new(
        r.random_range(-5.0..5.0),
        r.random_range(-5.0..5.0),
        r.random_range(-5.0..5.0),
        r.random_range(-5.0..5.0),
    )
}

pub fn random_control(r: &mut impl Rng) -> ControlValue {
    ControlValue::new(
        r.random_range(0.0..=1.0),
        r.random_range(0.0..=1.0),
        r.random_range(0.0..=1.0),
    )
}
