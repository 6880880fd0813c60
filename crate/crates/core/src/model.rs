//! Parameters, states and right-hand sides of the SEIZ system.
//!
//! The normalized system keeps the recruitment rate `pi` as an absolute
//! inflow, so `s + e + i + z` settles at `pi / mu` rather than at 1. Nothing
//! here clamps the total.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The ten rate constants of the SEIZ system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Recruitment into the susceptible class.
    pub pi: f64,
    /// Disconnect (exit) rate, applied to every class.
    pub mu: f64,
    /// S-I contact rate.
    pub beta: f64,
    /// S-Z contact rate.
    pub b: f64,
    /// E-I contact rate.
    pub rho: f64,
    /// Incubation rate E -> I.
    pub eps: f64,
    /// Probability that an S-I contact produces a spreader directly.
    pub p: f64,
    /// Probability that an S-Z contact produces a skeptic.
    pub l: f64,
    /// Spreader-to-skeptic rate.
    pub delta: f64,
    /// I-Z contact rate.
    pub lam: f64,
}

/// Parameter names in the order used by config files and sweeps.
pub const PARAM_NAMES: [&str; 10] = ["pi", "mu", "beta", "b", "rho", "eps", "p", "l", "delta", "lam"];

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        for name in PARAM_NAMES {
            let v = self.get(name).expect("known name");
            if !v.is_finite() {
                return Err(Error::validation(name, format!("{name} must be finite")));
            }
            if v < 0.0 {
                return Err(Error::validation(name, format!("{name} ≥ 0")));
            }
        }
        if self.mu <= 0.0 {
            return Err(Error::validation("mu", "mu > 0"));
        }
        if self.p > 1.0 {
            return Err(Error::validation("p", "p ∈ [0,1]"));
        }
        if self.l > 1.0 {
            return Err(Error::validation("l", "l ∈ [0,1]"));
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "pi" => self.pi,
            "mu" => self.mu,
            "beta" => self.beta,
            "b" => self.b,
            "rho" => self.rho,
            "eps" => self.eps,
            "p" => self.p,
            "l" => self.l,
            "delta" => self.delta,
            "lam" => self.lam,
            _ => return None,
        })
    }

    /// Returns a copy with one named rate replaced.
    pub fn with(&self, name: &str, value: f64) -> Result<Self> {
        let mut out = *self;
        let slot = match name {
            "pi" => &mut out.pi,
            "mu" => &mut out.mu,
            "beta" => &mut out.beta,
            "b" => &mut out.b,
            "rho" => &mut out.rho,
            "eps" => &mut out.eps,
            "p" => &mut out.p,
            "l" => &mut out.l,
            "delta" => &mut out.delta,
            "lam" => &mut out.lam,
            _ => {
                return Err(Error::validation(
                    name,
                    format!("unknown parameter, expected one of {}", PARAM_NAMES.join(", ")),
                ))
            }
        };
        *slot = value;
        Ok(out)
    }

    /// Carrying level `pi / mu` of the total population.
    pub fn carrying_level(&self) -> f64 {
        self.pi / self.mu
    }
}

/// Normalized compartment sizes.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct State {
    pub s: f64,
    pub e: f64,
    pub i: f64,
    pub z: f64,
}

pub const STATE_NAMES: [&str; 4] = ["s", "e", "i", "z"];

impl State {
    pub const ZERO: State = State {
        s: 0.0,
        e: 0.0,
        i: 0.0,
        z: 0.0,
    };

    pub fn new(s: f64, e: f64, i: f64, z: f64) -> Self {
        State { s, e, i, z }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.s, self.e, self.i, self.z]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        State::new(a[0], a[1], a[2], a[3])
    }

    pub fn total(&self) -> f64 {
        self.s + self.e + self.i + self.z
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

/// Indicators selecting which of the three controls act on the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ControlSwitches {
    pub pi1: u8,
    pub pi2: u8,
    pub pi3: u8,
}

impl ControlSwitches {
    pub const OFF: ControlSwitches = ControlSwitches { pi1: 0, pi2: 0, pi3: 0 };
    pub const ALL: ControlSwitches = ControlSwitches { pi1: 1, pi2: 1, pi3: 1 };

    pub fn new(pi1: u8, pi2: u8, pi3: u8) -> Result<Self> {
        let sw = ControlSwitches { pi1, pi2, pi3 };
        sw.validate()?;
        Ok(sw)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("pi1", self.pi1), ("pi2", self.pi2), ("pi3", self.pi3)] {
            if v > 1 {
                return Err(Error::validation(name, format!("{name} ∈ {{0,1}}")));
            }
        }
        Ok(())
    }

    pub fn any(&self) -> bool {
        self.pi1 + self.pi2 + self.pi3 > 0
    }

    fn factors(&self) -> (f64, f64, f64) {
        (f64::from(self.pi1), f64::from(self.pi2), f64::from(self.pi3))
    }
}

/// Control intensities at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlValue {
    /// Debunking: moves susceptibles directly to skeptics.
    pub u: f64,
    /// Removal of exposed users.
    pub v: f64,
    /// Removal of spreaders.
    pub w: f64,
}

impl ControlValue {
    pub const ZERO: ControlValue = ControlValue { u: 0.0, v: 0.0, w: 0.0 };

    pub fn new(u: f64, v: f64, w: f64) -> Self {
        ControlValue { u, v, w }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.u, self.v, self.w]
    }

    pub fn is_admissible(&self) -> bool {
        self.to_array().iter().all(|c| (0.0..=1.0).contains(c))
    }

    pub fn lerp(a: &ControlValue, b: &ControlValue, frac: f64) -> ControlValue {
        ControlValue {
            u: a.u + frac * (b.u - a.u),
            v: a.v + frac * (b.v - a.v),
            w: a.w + frac * (b.w - a.w),
        }
    }
}

/// Scales absolute counts by the total population.
pub fn normalize(s: f64, e: f64, i: f64, z: f64, n: f64) -> Result<State> {
    if !(n > 0.0) {
        return Err(Error::domain("N", "total population must be > 0"));
    }
    for (name, v) in [("S", s), ("E", e), ("I", i), ("Z", z)] {
        if !(v >= 0.0) {
            return Err(Error::domain(name, "counts must be ≥ 0"));
        }
    }
    Ok(State::new(s / n, e / n, i / n, z / n))
}

/// Right-hand side of the uncontrolled normalized system.
pub fn rhs_uncontrolled(x: &State, th: &ModelParams) -> State {
    let State { s, e, i, z } = *x;
    let si = th.beta * s * i;
    let sz = th.b * s * z;
    let ei = th.rho * e * i;
    let iz = th.lam * i * z;
    // mu (pi/mu - s) vanishes exactly at the rumor-free level, pi - mu s may not
    let inflow = if th.mu > 0.0 {
        th.mu * (th.carrying_level() - s)
    } else {
        th.pi
    };
    State {
        s: inflow - si - sz,
        e: (1.0 - th.p) * si + (1.0 - th.l) * sz - ei - th.eps * e - th.mu * e,
        i: th.p * si + ei + th.eps * e - th.delta * i - iz - th.mu * i,
        z: th.l * sz + th.delta * i + iz - th.mu * z,
    }
}

/// Right-hand side with the three controls applied.
///
/// `u` moves susceptibles to skeptics; `v` and `w` remove exposed users and
/// spreaders from the population entirely.
pub fn rhs_controlled(x: &State, th: &ModelParams, c: &ControlValue, sw: &ControlSwitches) -> State {
    let base = rhs_uncontrolled(x, th);
    if !sw.any() {
        return base;
    }
    let (k1, k2, k3) = sw.factors();
    let debunk = k1 * c.u * x.s;
    State {
        s: base.s - debunk,
        e: base.e - k2 * c.v * x.e,
        i: base.i - k3 * c.w * x.i,
        z: base.z + debunk,
    }
}

/// Closed-form solution of `dn/dt = pi - mu n`, the total-population law of
/// the uncontrolled system.
pub fn total_population_analytic(n0: f64, t: f64, th: &ModelParams) -> f64 {
    let level = th.carrying_level();
    level + (n0 - level) * (-th.mu * t).exp()
}
