//! Endemic (rumor-persisting) steady states.
//!
//! Two routes are run. The reduced route assumes `e* = 0`, solves a cubic in
//! `s*` and back-substitutes for `i*` and `z*`. That ansatz is only exact when
//! the exposed inflows vanish, so a damped Newton solve of the full
//! four-dimensional steady-state system is run from several starting points
//! and its answer is the one returned. Reduced-route candidates are kept on
//! the result for comparison.

use serde::Serialize;

use super::{jacobian, poly};
use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{rhs_uncontrolled, ModelParams, State};

/// Default acceptance threshold on `max |rhs|` at the returned point.
pub const ENDEMIC_TOL: f64 = 1e-8;

/// Fractions of `pi/mu` used as Newton starting points.
const STARTS: [[f64; 4]; 8] = [
    [0.90, 0.02, 0.05, 0.03],
    [0.50, 0.10, 0.30, 0.10],
    [0.20, 0.10, 0.60, 0.10],
    [0.10, 0.05, 0.15, 0.70],
    [0.30, 0.30, 0.30, 0.10],
    [0.70, 0.00, 0.20, 0.10],
    [0.05, 0.05, 0.85, 0.05],
    [0.40, 0.20, 0.10, 0.30],
];

#[derive(Debug, Clone, Serialize)]
pub struct EndemicSolution {
    pub s_star: f64,
    pub e_star: f64,
    pub i_star: f64,
    pub z_star: f64,
    /// `max |rhs|` at the returned point.
    pub residual: f64,
    /// Real roots of the reduced cubic in `s*`.
    pub cubic_roots: Vec<f64>,
    /// Admissible reduced-route points `(s*, 0, i*, z*)` with their residuals.
    pub cubic_candidates: Vec<(State, f64)>,
}

impl EndemicSolution {
    pub fn state(&self) -> State {
        State::new(self.s_star, self.e_star, self.i_star, self.z_star)
    }
}

/// Coefficients `(A, B, C, D)` of the reduced cubic `A s^3 + B s^2 + C s + D`.
pub fn reduced_cubic(th: &ModelParams) -> (f64, f64, f64, f64) {
    let ModelParams {
        pi,
        mu,
        beta,
        b,
        p,
        l,
        delta,
        lam,
        ..
    } = *th;
    let a = p * b * beta / lam * (l - p);
    let bb = -(l * b * delta + l * b * mu + delta * p + p * mu - p * b * mu + p * beta * mu + p * lam * mu) / lam;
    let c = p * beta * pi + mu * mu * (beta + lam + 1.0) / (lam * beta) + delta * mu / lam;
    let d = -mu * pi / beta;
    (a, bb, c, d)
}

/// Back-substitution of the reduced route: `(i*, z*)` for a given `s*`.
pub fn reduced_back_substitution(th: &ModelParams, s: f64) -> (f64, f64) {
    let ModelParams {
        pi,
        mu,
        beta,
        b,
        p,
        delta,
        lam,
        ..
    } = *th;
    let i = pi / (beta * s) - mu / beta - p * b / lam * s - delta / (lam * beta) - mu / (lam * beta);
    let z = p * beta / lam * s - delta / lam - mu / lam;
    (i, z)
}

pub fn endemic_equilibrium(th: &ModelParams) -> Result<Option<EndemicSolution>> {
    endemic_equilibrium_with_tol(th, ENDEMIC_TOL)
}

pub fn endemic_equilibrium_with_tol(th: &ModelParams, tol: f64) -> Result<Option<EndemicSolution>> {
    for (name, v) in [("mu", th.mu), ("beta", th.beta), ("lam", th.lam)] {
        if !(v > 0.0) {
            return Err(Error::domain(
                name,
                format!("{name} > 0 required for the endemic solve"),
            ));
        }
    }
    let level = th.pi / th.mu;

    let (a, b, c, d) = reduced_cubic(th);
    let cubic_roots = poly::real_cubic_roots(a, b, c, d);
    let cubic_candidates: Vec<(State, f64)> = cubic_roots
        .iter()
        .filter(|&&s| s > 0.0 && s <= level)
        .filter_map(|&s| {
            let (i, z) = reduced_back_substitution(th, s);
            (i >= 0.0 && z >= 0.0).then(|| {
                let x = State::new(s, 0.0, i, z);
                (x, residual(&x, th))
            })
        })
        .collect();

    let scale = level.max(1e-6);
    let mut best: Option<(State, f64)> = None;
    let mut consider = |x: State, r: f64| {
        let better = match &best {
            None => true,
            Some((bx, br)) => r < *br || (r == *br && lexicographic_less(&x, bx)),
        };
        if better {
            best = Some((x, r));
        }
    };

    for start in STARTS {
        let x0 = State::from_array(start.map(|f| f * scale));
        if let Some(x) = newton(th, x0) {
            if let Some(x) = admissible_endemic(&x, level) {
                consider(x, residual(&x, th));
            }
        }
    }
    for (x, r) in &cubic_candidates {
        if x.i > endemic_floor(level) {
            consider(*x, *r);
        }
    }

    Ok(best.filter(|(_, r)| *r <= tol).map(|(x, r)| EndemicSolution {
        s_star: x.s,
        e_star: x.e,
        i_star: x.i,
        z_star: x.z,
        residual: r,
        cubic_roots,
        cubic_candidates,
    }))
}

fn residual(x: &State, th: &ModelParams) -> f64 {
    rhs_uncontrolled(x, th).max_abs()
}

fn endemic_floor(level: f64) -> f64 {
    1e-8 * level.max(1.0)
}

/// Clears round-off negatives and rejects points that are not interior
/// steady states with spreaders present.
fn admissible_endemic(x: &State, level: f64) -> Option<State> {
    let slack = 1e-10 * level.max(1.0);
    let mut arr = x.to_array();
    for v in arr.iter_mut() {
        if *v < -slack {
            return None;
        }
        *v = v.max(0.0);
    }
    let y = State::from_array(arr);
    (y.i > endemic_floor(level)).then_some(y)
}

fn lexicographic_less(a: &State, b: &State) -> bool {
    a.to_array()
        .iter()
        .zip(b.to_array())
        .map(|(x, y)| x.total_cmp(&y))
        .find(|o| o.is_ne())
        .is_some_and(|o| o.is_lt())
}

/// Damped Newton on `rhs(x) = 0` with backtracking on the max-norm.
fn newton(th: &ModelParams, mut x: State) -> Option<State> {
    let mut f = rhs_uncontrolled(&x, th);
    let mut norm = f.max_abs();
    let floor = 1e-14 * th.pi.max(1.0);
    for _ in 0..200 {
        if norm <= floor {
            return Some(x);
        }
        let j = jacobian(&x, th);
        let rhs = f.to_array().map(|v| -v);
        let step = linalg::solve4(&j, &rhs)?;
        let mut alpha = 1.0;
        loop {
            let trial = State::from_array(std::array::from_fn(|k| x.to_array()[k] + alpha * step[k]));
            let ft = rhs_uncontrolled(&trial, th);
            let nt = ft.max_abs();
            if nt.is_finite() && nt <= (1.0 - 1e-4 * alpha) * norm {
                let moved = alpha * step.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
                x = trial;
                f = ft;
                norm = nt;
                if moved <= 1e-15 * x.max_abs().max(1.0) {
                    return Some(x);
                }
                break;
            }
            alpha *= 0.5;
            if alpha < 1e-10 {
                return (norm <= 1e-10 * th.pi.max(1.0)).then_some(x);
            }
        }
    }
    Some(x)
}
