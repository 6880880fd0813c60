//! Fixed-step classical RK4, forward for states and backward for costates.
//!
//! Forward and backward sweeps share one uniform grid so that state, control
//! and costate values line up node by node.

use serde::Serialize;

use crate::control::{Adjoint, ControlSignal};
use crate::error::{Error, Result};
use crate::model::{ControlValue, State, STATE_NAMES};

/// Values in `(-NEG_CLAMP, 0)` are treated as round-off and set to zero.
pub const NEG_CLAMP: f64 = 1e-12;

/// Uniform time grid `t0 + k h`, `k = 0..=n_steps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub t0: f64,
    pub tf: f64,
    pub n_steps: usize,
}

impl Grid {
    pub fn new(t0: f64, tf: f64, n_steps: usize) -> Result<Self> {
        if !(t0.is_finite() && tf.is_finite()) || tf <= t0 {
            return Err(Error::validation("grid", "tf > t0 required"));
        }
        if n_steps == 0 {
            return Err(Error::validation("grid.steps", "steps ≥ 1"));
        }
        Ok(Grid { t0, tf, n_steps })
    }

    /// Grid with spacing as close to `h` as an integer step count allows.
    pub fn with_step(t0: f64, tf: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::validation("grid.h", "h > 0"));
        }
        let n = ((tf - t0) / h).round().max(1.0) as usize;
        Grid::new(t0, tf, n)
    }

    pub fn h(&self) -> f64 {
        (self.tf - self.t0) / self.n_steps as f64
    }

    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, k: usize) -> f64 {
        if k == self.n_steps {
            self.tf
        } else {
            self.t0 + k as f64 * self.h()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|k| self.node(k))
    }

    /// Index of the interval containing `t` and the fractional position in it.
    pub fn locate(&self, t: f64) -> (usize, f64) {
        let pos = ((t - self.t0) / self.h()).clamp(0.0, self.n_steps as f64);
        let k = (pos.floor() as usize).min(self.n_steps - 1);
        (k, (pos - k as f64).clamp(0.0, 1.0))
    }
}

/// States on a grid, optionally with the controls and costates that go
/// with them.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: Grid,
    pub states: Vec<State>,
    pub controls: Option<Vec<ControlValue>>,
    pub adjoints: Option<Vec<Adjoint>>,
}

impl Trajectory {
    pub fn final_state(&self) -> State {
        *self.states.last().expect("trajectory has at least one node")
    }

    /// Largest value of a component and the time it occurs (first hit).
    pub fn peak(&self, component: impl Fn(&State) -> f64) -> (f64, f64) {
        self.states
            .iter()
            .enumerate()
            .fold((f64::NEG_INFINITY, self.grid.t0), |(best, tb), (k, x)| {
                let v = component(x);
                if v > best {
                    (v, self.grid.node(k))
                } else {
                    (best, tb)
                }
            })
    }

    /// Composite trapezoid integral of a scalar function of the state.
    pub fn integrate(&self, component: impl Fn(&State) -> f64) -> f64 {
        trapezoid(self.grid.h(), self.states.iter().map(component))
    }
}

pub(crate) fn trapezoid(h: f64, values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut first = None;
    let mut last = 0.0;
    for v in values {
        if first.is_none() {
            first = Some(v);
        }
        sum += v;
        last = v;
    }
    match first {
        None => 0.0,
        Some(f) => h * (sum - 0.5 * (f + last)),
    }
}

/// One classical RK4 step. `h` may be negative.
pub fn rk4_step<F>(f: F, t: f64, x: [f64; 4], h: f64) -> Result<[f64; 4]>
where
    F: Fn(f64, &[f64; 4]) -> [f64; 4],
{
    let axpy = |a: &[f64; 4], k: &[f64; 4], c: f64| -> [f64; 4] { std::array::from_fn(|n| a[n] + c * k[n]) };
    let k1 = f(t, &x);
    let k2 = f(t + 0.5 * h, &axpy(&x, &k1, 0.5 * h));
    let k3 = f(t + 0.5 * h, &axpy(&x, &k2, 0.5 * h));
    let k4 = f(t + h, &axpy(&x, &k3, h));
    let out: [f64; 4] = std::array::from_fn(|n| x[n] + h / 6.0 * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]));
    if out.iter().all(|v| v.is_finite()) {
        Ok(out)
    } else {
        Err(Error::Blowup { t: t + h })
    }
}

/// Integrates `dx/dt = f(t, x)` over the grid. Round-off negatives are
/// clamped to zero; anything more negative is reported as a positivity
/// violation, since exact solutions stay nonnegative.
pub fn integrate_forward<F>(f: F, grid: &Grid, x0: State) -> Result<Trajectory>
where
    F: Fn(f64, &State) -> State,
{
    if !x0.is_finite() {
        return Err(Error::validation("init", "initial state must be finite"));
    }
    let h = grid.h();
    let rhs = |t: f64, a: &[f64; 4]| f(t, &State::from_array(*a)).to_array();
    let mut states = Vec::with_capacity(grid.len());
    let mut x = x0.to_array();
    states.push(x0);
    for k in 0..grid.n_steps {
        let t = grid.node(k);
        x = rk4_step(rhs, t, x, h)?;
        let t_next = grid.node(k + 1);
        for (n, v) in x.iter_mut().enumerate() {
            if *v < 0.0 {
                if *v > -NEG_CLAMP {
                    *v = 0.0;
                } else {
                    return Err(Error::Positivity {
                        t: t_next,
                        component: STATE_NAMES[n],
                        value: *v,
                    });
                }
            }
        }
        states.push(State::from_array(x));
    }
    Ok(Trajectory {
        grid: *grid,
        states,
        controls: None,
        adjoints: None,
    })
}

/// Integrates the costate system backward from `p(tf) = 0`.
///
/// `g(x, p, c)` returns `dp/dt`. State and control values at half steps are
/// the average of the two neighbouring nodes.
pub fn integrate_adjoint_backward<G>(
    g: G,
    grid: &Grid,
    state_traj: &Trajectory,
    controls: &ControlSignal,
) -> Result<Trajectory>
where
    G: Fn(&State, &Adjoint, &ControlValue) -> Adjoint,
{
    let n = grid.len();
    if state_traj.states.len() != n || state_traj.grid != *grid {
        return Err(Error::GridMismatch(format!(
            "state trajectory has {} nodes, grid has {n}",
            state_traj.states.len()
        )));
    }
    if controls.len() != n {
        return Err(Error::GridMismatch(format!(
            "control signal has {} nodes, grid has {n}",
            controls.len()
        )));
    }
    let h = grid.h();
    let mut adjoints = vec![Adjoint::ZERO; n];
    let mut p = Adjoint::ZERO.to_array();
    for k in (0..grid.n_steps).rev() {
        let (x_hi, x_lo) = (state_traj.states[k + 1], state_traj.states[k]);
        let (c_hi, c_lo) = (controls.values[k + 1], controls.values[k]);
        let x_mid = State::from_array(std::array::from_fn(|m| 0.5 * (x_hi.to_array()[m] + x_lo.to_array()[m])));
        let c_mid = ControlValue::lerp(&c_lo, &c_hi, 0.5);
        let t_hi = grid.node(k + 1);
        // stage times run t_hi, t_hi - h/2, t_hi - h
        let rhs = |t: f64, a: &[f64; 4]| {
            let back = t_hi - t;
            let (x, c) = if back < 0.25 * h {
                (x_hi, c_hi)
            } else if back < 0.75 * h {
                (x_mid, c_mid)
            } else {
                (x_lo, c_lo)
            };
            g(&x, &Adjoint::from_array(*a), &c).to_array()
        };
        p = rk4_step(rhs, t_hi, p, -h)?;
        adjoints[k] = Adjoint::from_array(p);
    }
    Ok(Trajectory {
        grid: *grid,
        states: state_traj.states.clone(),
        controls: Some(controls.values.clone()),
        adjoints: Some(adjoints),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{rhs_uncontrolled, total_population_analytic};
    use crate::presets::fig3_params;

    #[test]
    fn grid_validation() {
        assert!(Grid::new(0.0, 0.0, 10).is_err());
        assert!(Grid::new(0.0, 1.0, 0).is_err());
        let g = Grid::with_step(0.0, 25.0, 0.01).unwrap();
        assert_eq!(g.n_steps, 2500);
        assert_eq!(g.node(2500), 25.0);
        assert_eq!(g.locate(25.0), (2499, 1.0));
    }

    #[test]
    fn zero_field_leaves_state_unchanged() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(rk4_step(|_, _| [0.0; 4], 0.0, x, 0.3).unwrap(), x);
    }

    #[test]
    fn rk4_local_error_is_fifth_order() {
        let mu = 0.5;
        let f = |_: f64, a: &[f64; 4]| a.map(|v| -mu * v);
        let err = |h: f64| (rk4_step(f, 0.0, [1.0; 4], h).unwrap()[0] - (-mu * h).exp()).abs();
        let e1 = err(0.1);
        // Taylor remainder (mu h)^5 / 120
        assert!(e1 <= (mu * 0.1_f64).powi(5) / 120.0 * 1.01, "{e1}");
        let ratio = err(0.2) / err(0.1);
        assert!((28.0..36.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn blowup_reports_time() {
        let f = |_: f64, a: &[f64; 4]| a.map(|v| v * v * 1e200);
        match rk4_step(f, 2.0, [1e200; 4], 0.5) {
            Err(Error::Blowup { t }) => assert_eq!(t, 2.5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rfe_is_a_fixed_point() {
        let th = fig3_params();
        let rfe = State::new(20.0, 0.0, 0.0, 0.0);
        let grid = Grid::new(0.0, 10.0, 100).unwrap();
        let traj = integrate_forward(|_, x| rhs_uncontrolled(x, &th), &grid, rfe).unwrap();
        assert!(traj.states.iter().all(|x| *x == rfe));
    }

    #[test]
    fn total_population_follows_closed_form() {
        let th = fig3_params();
        let x0 = State::new(5.0, 1.0, 2.0, 0.5);
        let grid = Grid::with_step(0.0, 50.0, 0.01).unwrap();
        let traj = integrate_forward(|_, x| rhs_uncontrolled(x, &th), &grid, x0).unwrap();
        for (k, x) in traj.states.iter().enumerate() {
            let want = total_population_analytic(x0.total(), grid.node(k), &th);
            assert!((x.total() - want).abs() <= 1e-8, "node {k}");
        }
    }

    #[test]
    fn positivity_violation_is_reported() {
        let grid = Grid::new(0.0, 1.0, 1).unwrap();
        let err = integrate_forward(|_, _| State::new(0.0, -1.0, 0.0, 0.0), &grid, State::ZERO).unwrap_err();
        assert!(matches!(err, Error::Positivity { component: "e", .. }), "{err}");
        // round-off sized dips are clamped
        let traj = integrate_forward(|_, _| State::new(0.0, -1e-13, 0.0, 0.0), &grid, State::ZERO).unwrap();
        assert_eq!(traj.final_state().e, 0.0);
    }

    #[test]
    fn backward_sweep_with_pure_running_cost() {
        // p3' = -1 with every coupling zero gives p3(t) = T - t
        let grid = Grid::new(0.0, 4.0, 40).unwrap();
        let traj = Trajectory {
            grid,
            states: vec![State::ZERO; grid.len()],
            controls: None,
            adjoints: None,
        };
        let ctrl = ControlSignal::zeros(grid.len());
        let out = integrate_adjoint_backward(|_, _, _| Adjoint::new(0.0, 0.0, -1.0, 0.0), &grid, &traj, &ctrl).unwrap();
        let adj = out.adjoints.unwrap();
        for (k, p) in adj.iter().enumerate() {
            assert!((p.p3 - (4.0 - grid.node(k))).abs() < 1e-12);
            assert_eq!((p.p1, p.p2, p.p4), (0.0, 0.0, 0.0));
        }
        assert_eq!(adj[grid.n_steps], Adjoint::ZERO);

        let zero = integrate_adjoint_backward(|_, _, _| Adjoint::ZERO, &grid, &traj, &ctrl).unwrap();
        assert!(zero.adjoints.unwrap().iter().all(|p| *p == Adjoint::ZERO));

        let short = ControlSignal::zeros(3);
        assert!(matches!(
            integrate_adjoint_backward(|_, _, _| Adjoint::ZERO, &grid, &traj, &short),
            Err(Error::GridMismatch(_))
        ));
    }
}
