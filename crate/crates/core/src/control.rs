//! Three-control optimal-control problem and its forward-backward sweep.
//!
//! The objective is `J = ∫ i + A u²/2 + B v²/2 + C w²/2 dt` subject to the
//! controlled SEIZ system, with `(u, v, w) ∈ [0,1]³`. The costate system is
//! the exact negative state-gradient of the Hamiltonian below.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrator::{integrate_adjoint_backward, integrate_forward, trapezoid, Grid, Trajectory};
use crate::model::{rhs_controlled, ControlSwitches, ControlValue, ModelParams, State};

/// Costates paired with (s, e, i, z).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Adjoint {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
}

impl Adjoint {
    pub const ZERO: Adjoint = Adjoint {
        p1: 0.0,
        p2: 0.0,
        p3: 0.0,
        p4: 0.0,
    };

    pub fn new(p1: f64, p2: f64, p3: f64, p4: f64) -> Self {
        Adjoint { p1, p2, p3, p4 }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.p1, self.p2, self.p3, self.p4]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Adjoint::new(a[0], a[1], a[2], a[3])
    }
}

/// Quadratic cost weights `A`, `B`, `C` on `u`, `v`, `w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ControlWeights {
    pub a: f64,
    pub b_w: f64,
    pub c_w: f64,
}

impl Default for ControlWeights {
    fn default() -> Self {
        ControlWeights {
            a: 1.0,
            b_w: 1.0,
            c_w: 1.0,
        }
    }
}

impl ControlWeights {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("b", self.b_w), ("c", self.c_w)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::validation(format!("control.{name}"), "weight > 0"));
            }
        }
        Ok(())
    }
}

/// Control values at every grid node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlSignal {
    pub values: Vec<ControlValue>,
}

impl ControlSignal {
    pub fn zeros(n: usize) -> Self {
        ControlSignal {
            values: vec![ControlValue::ZERO; n],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_admissible(&self) -> bool {
        self.values.iter().all(ControlValue::is_admissible)
    }

    /// Linear interpolation between nodes.
    pub fn at(&self, grid: &Grid, t: f64) -> ControlValue {
        let (k, frac) = grid.locate(t);
        ControlValue::lerp(&self.values[k], &self.values[k + 1], frac)
    }
}

/// Bounds for the adaptive relaxation factor.
pub const MIN_RELAXATION: f64 = 1.0 / 64.0;
pub const MAX_RELAXATION: f64 = 1.0;
/// Number of recent objective values the line search compares against.
const NONMONOTONE_MEMORY: usize = 5;
const ARMIJO: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FbsConfig {
    /// Weight of the new candidate when blending controls, in (0, 1].
    /// With `adaptive` this is only the first iteration's weight.
    pub relaxation: f64,
    /// Choose the weight per iteration (Barzilai-Borwein plus backtracking on J).
    pub adaptive: bool,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for FbsConfig {
    fn default() -> Self {
        FbsConfig {
            relaxation: 0.5,
            adaptive: true,
            tol: 1e-6,
            max_iter: 200,
        }
    }
}

impl FbsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            return Err(Error::validation("control.relaxation", "relaxation ∈ (0,1]"));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::validation("control.tol", "tol > 0"));
        }
        if self.max_iter == 0 {
            return Err(Error::validation("control.max_iter", "max_iter ≥ 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct FbsResult {
    pub controls: ControlSignal,
    /// States driven by `controls`.
    pub states: Trajectory,
    /// Costates for `states` and `controls` (the trajectory carries all three).
    pub adjoints: Trajectory,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Control change metric of the last iteration.
    pub last_change: f64,
    /// Scaled `max |candidate - control|` of the last iteration.
    pub last_residual: f64,
    /// Objective of the controls used in each iteration.
    pub objective_history: Vec<f64>,
}

fn running_cost(x: &State, c: &ControlValue, w: &ControlWeights) -> f64 {
    x.i + 0.5 * (w.a * c.u * c.u + w.b_w * c.v * c.v + w.c_w * c.w * c.w)
}

/// Composite trapezoid value of the objective along a trajectory.
pub fn objective(traj: &Trajectory, ctrl: &ControlSignal, wts: &ControlWeights) -> Result<f64> {
    if traj.states.len() != ctrl.len() {
        return Err(Error::GridMismatch(format!(
            "{} states vs {} control nodes",
            traj.states.len(),
            ctrl.len()
        )));
    }
    Ok(trapezoid(
        traj.grid.h(),
        traj.states
            .iter()
            .zip(&ctrl.values)
            .map(|(x, c)| running_cost(x, c, wts)),
    ))
}

pub fn hamiltonian(
    x: &State,
    p: &Adjoint,
    c: &ControlValue,
    th: &ModelParams,
    wts: &ControlWeights,
    sw: &ControlSwitches,
) -> f64 {
    let g = rhs_controlled(x, th, c, sw);
    running_cost(x, c, wts) + p.p1 * g.s + p.p2 * g.e + p.p3 * g.i + p.p4 * g.z
}

/// Costate derivative `-∂H/∂(s, e, i, z)`.
pub fn adjoint_rhs(
    x: &State,
    p: &Adjoint,
    c: &ControlValue,
    th: &ModelParams,
    _wts: &ControlWeights,
    sw: &ControlSwitches,
) -> Adjoint {
    let State { s, e, i, z } = *x;
    let Adjoint { p1, p2, p3, p4 } = *p;
    let ModelParams {
        mu,
        beta,
        b,
        rho,
        eps,
        p: pp,
        l,
        delta,
        lam,
        ..
    } = *th;
    let u = f64::from(sw.pi1) * c.u;
    let v = f64::from(sw.pi2) * c.v;
    let w = f64::from(sw.pi3) * c.w;

    let dh_ds = p1 * (-mu - beta * i - b * z - u)
        + p2 * ((1.0 - pp) * beta * i + (1.0 - l) * b * z)
        + p3 * (pp * beta * i)
        + p4 * (l * b * z + u);
    let dh_de = p2 * (-rho * i - eps - mu - v) + p3 * (rho * i + eps);
    let dh_di = 1.0
        + p1 * (-beta * s)
        + p2 * ((1.0 - pp) * beta * s - rho * e)
        + p3 * (pp * beta * s + rho * e - delta - lam * z - mu - w)
        + p4 * (delta + lam * z);
    let dh_dz = p1 * (-b * s) + p2 * ((1.0 - l) * b * s) + p3 * (-lam * i) + p4 * (l * b * s + lam * i - mu);

    Adjoint::new(-dh_ds, -dh_de, -dh_di, -dh_dz)
}

/// Pointwise minimizer of the Hamiltonian over `[0,1]³`.
pub fn characterize_controls(x: &State, p: &Adjoint, wts: &ControlWeights, sw: &ControlSwitches) -> ControlValue {
    let clamp = |v: f64| v.clamp(0.0, 1.0);
    ControlValue {
        u: clamp(f64::from(sw.pi1) * x.s * (p.p1 - p.p4) / wts.a),
        v: clamp(f64::from(sw.pi2) * p.p2 * x.e / wts.b_w),
        w: clamp(f64::from(sw.pi3) * p.p3 * x.i / wts.c_w),
    }
}

/// `(∂H/∂u, ∂H/∂v, ∂H/∂w)`.
pub fn control_gradient(
    x: &State,
    p: &Adjoint,
    c: &ControlValue,
    wts: &ControlWeights,
    sw: &ControlSwitches,
) -> [f64; 3] {
    [
        wts.a * c.u - f64::from(sw.pi1) * x.s * (p.p1 - p.p4),
        wts.b_w * c.v - f64::from(sw.pi2) * p.p2 * x.e,
        wts.c_w * c.w - f64::from(sw.pi3) * p.p3 * x.i,
    ]
}

fn forward_pass(
    th: &ModelParams,
    x0: State,
    grid: &Grid,
    sw: &ControlSwitches,
    controls: &ControlSignal,
) -> Result<Trajectory> {
    integrate_forward(|t, x| rhs_controlled(x, th, &controls.at(grid, t), sw), grid, x0)
}

fn sweep_pass(
    th: &ModelParams,
    x0: State,
    grid: &Grid,
    wts: &ControlWeights,
    sw: &ControlSwitches,
    controls: &ControlSignal,
) -> Result<Trajectory> {
    let states = forward_pass(th, x0, grid, sw, controls)?;
    integrate_adjoint_backward(|x, p, c| adjoint_rhs(x, p, c, th, wts, sw), grid, &states, controls)
}

fn blend(candidates: &[ControlValue], old: &ControlSignal, r: f64) -> ControlSignal {
    ControlSignal {
        values: candidates
            .iter()
            .zip(&old.values)
            .map(|(c, o)| {
                ControlValue::new(
                    (r * c.u + (1.0 - r) * o.u).clamp(0.0, 1.0),
                    (r * c.v + (1.0 - r) * o.v).clamp(0.0, 1.0),
                    (r * c.w + (1.0 - r) * o.w).clamp(0.0, 1.0),
                )
            })
            .collect(),
    }
}

fn max_abs_diff(a: &[ControlValue], b: &[ControlValue]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.to_array().into_iter().zip(y.to_array()))
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

fn max_abs(a: &[ControlValue]) -> f64 {
    a.iter().flat_map(|c| c.to_array()).fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// `control - candidate` at every node, flattened.
fn fixed_point_gap(candidates: &[ControlValue], controls: &ControlSignal) -> Vec<f64> {
    candidates
        .iter()
        .zip(&controls.values)
        .flat_map(|(c, o)| o.to_array().into_iter().zip(c.to_array()).map(|(x, y)| x - y))
        .collect()
}

/// Barzilai-Borwein weight `<s,s>/<s,y>` from successive controls and gaps.
fn bb_relaxation(controls: &ControlSignal, gap: &[f64], prev: &ControlSignal, prev_gap: &[f64]) -> f64 {
    let (mut ss, mut sy) = (0.0, 0.0);
    let steps = controls
        .values
        .iter()
        .zip(&prev.values)
        .flat_map(|(c, p)| c.to_array().into_iter().zip(p.to_array()).map(|(x, y)| x - y));
    for ((s, g), pg) in steps.zip(gap).zip(prev_gap) {
        ss += s * s;
        sy += s * (g - pg);
    }
    if sy > 0.0 {
        (ss / sy).clamp(MIN_RELAXATION, MAX_RELAXATION)
    } else {
        MAX_RELAXATION
    }
}

/// Forward-backward sweep with relaxed control updates.
///
/// Each iteration blends the characterized candidate into the current
/// controls. With `cfg.adaptive` the blend weight comes from a
/// Barzilai-Borwein estimate, halved until the objective passes a
/// nonmonotone Armijo test (the update is a projected gradient step on J
/// scaled by the weights). Otherwise `cfg.relaxation` is used throughout.
///
/// Stops when `max |candidate - control| <= tol * max(1, max |candidate|)`,
/// which bounds the blended change by the same quantity. Hitting `max_iter`
/// is not an error; the result then has `converged = false`. The returned
/// states, costates and objective always correspond to the returned controls.
pub fn forward_backward_sweep(
    th: &ModelParams,
    x0: State,
    grid: &Grid,
    wts: &ControlWeights,
    sw: &ControlSwitches,
    cfg: &FbsConfig,
) -> Result<FbsResult> {
    th.validate()?;
    wts.validate()?;
    sw.validate()?;
    cfg.validate()?;

    let mut controls = ControlSignal::zeros(grid.len());
    let mut history: Vec<f64> = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut last_change = f64::INFINITY;
    let mut last_residual = f64::INFINITY;
    let mut previous: Option<(ControlSignal, Vec<f64>)> = None;

    while iterations < cfg.max_iter {
        iterations += 1;
        let full = sweep_pass(th, x0, grid, wts, sw, &controls)?;
        let j = objective(&full, &controls, wts)?;
        history.push(j);
        let adjoints = full.adjoints.as_ref().expect("backward sweep fills costates");
        let candidates: Vec<ControlValue> = full
            .states
            .iter()
            .zip(adjoints)
            .map(|(x, p)| characterize_controls(x, p, wts, sw))
            .collect();

        last_residual = max_abs_diff(&candidates, &controls.values) / max_abs(&candidates).max(1.0);
        if last_residual <= cfg.tol {
            let updated = blend(&candidates, &controls, cfg.relaxation);
            last_change = max_abs_diff(&updated.values, &controls.values);
            controls = updated;
            converged = true;
            break;
        }

        let gap = fixed_point_gap(&candidates, &controls);
        let updated = if cfg.adaptive {
            let mut r = match &previous {
                Some((prev, prev_gap)) => bb_relaxation(&controls, &gap, prev, prev_gap),
                None => cfg.relaxation,
            };
            let reference = history
                .iter()
                .rev()
                .take(NONMONOTONE_MEMORY)
                .fold(f64::MIN, |m, &v| m.max(v));
            let gap_sq = grid.h() * gap.iter().map(|g| g * g).sum::<f64>();
            loop {
                let trial = blend(&candidates, &controls, r);
                let j_trial = objective(&forward_pass(th, x0, grid, sw, &trial)?, &trial, wts)?;
                if j_trial <= reference - ARMIJO * r * gap_sq || r <= MIN_RELAXATION {
                    break trial;
                }
                r = (0.5 * r).max(MIN_RELAXATION);
            }
        } else {
            blend(&candidates, &controls, cfg.relaxation)
        };
        last_change = max_abs_diff(&updated.values, &controls.values);
        log::debug!("fbs iteration {iterations}: J = {j}, residual = {last_residual:e}");
        previous = Some((std::mem::replace(&mut controls, updated), gap));
    }

    let full = sweep_pass(th, x0, grid, wts, sw, &controls)?;
    let objective = objective(&full, &controls, wts)?;
    let states = Trajectory {
        adjoints: None,
        controls: Some(controls.values.clone()),
        ..full.clone()
    };
    Ok(FbsResult {
        controls,
        states,
        adjoints: full,
        objective,
        iterations,
        converged,
        last_change,
        last_residual,
        objective_history: history,
    })
}
