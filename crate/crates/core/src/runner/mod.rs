//! Scenario orchestration: simulate, analyze, optimize and sweep.
//!
//! Each `run_*` function is pure; the matching `write_*` function emits the
//! CSV and report files for it into an output directory.

pub mod config;
pub mod output;

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{self, EndemicSolution, StabilityReport, Verdict};
use crate::control::{self, ControlSignal, FbsResult};
use crate::error::{Error, Result};
use crate::integrator::{integrate_forward, Trajectory};
use crate::model::{rhs_uncontrolled, ModelParams, State};

pub use config::{load_config, preset_config, RawConfig, ScenarioConfig};

#[derive(Debug, Clone, Serialize)]
pub struct SimulateSummary {
    pub label: String,
    pub r0: f64,
    pub verdict: Verdict,
    pub final_state: State,
    pub peak_i: f64,
    pub t_peak_i: f64,
    pub peak_z: f64,
    pub t_peak_z: f64,
}

#[derive(Debug, Clone)]
pub struct SimulateOutcome {
    pub trajectory: Trajectory,
    pub summary: SimulateSummary,
}

fn simulate_params(params: &ModelParams, cfg: &ScenarioConfig) -> Result<SimulateOutcome> {
    let trajectory = integrate_forward(|_, x| rhs_uncontrolled(x, params), &cfg.grid, cfg.init)?;
    let report = analysis::stability_report(params)?;
    let (peak_i, t_peak_i) = trajectory.peak(|x| x.i);
    let (peak_z, t_peak_z) = trajectory.peak(|x| x.z);
    let summary = SimulateSummary {
        label: cfg.label.clone(),
        r0: report.r0,
        verdict: report.verdict,
        final_state: trajectory.final_state(),
        peak_i,
        t_peak_i,
        peak_z,
        t_peak_z,
    };
    Ok(SimulateOutcome { trajectory, summary })
}

/// Uncontrolled integration of the scenario.
pub fn run_simulate(cfg: &ScenarioConfig) -> Result<SimulateOutcome> {
    simulate_params(&cfg.params, cfg).map_err(|e| e.in_scenario(&cfg.label))
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeOutcome {
    pub label: String,
    pub stability: StabilityReport,
    pub endemic: Option<EndemicSolution>,
}

pub fn run_analyze(cfg: &ScenarioConfig) -> Result<AnalyzeOutcome> {
    let run = || -> Result<AnalyzeOutcome> {
        let stability = analysis::stability_report(&cfg.params)?;
        let endemic = if cfg.params.beta > 0.0 && cfg.params.lam > 0.0 {
            analysis::endemic_equilibrium(&cfg.params)?
        } else {
            None
        };
        Ok(AnalyzeOutcome {
            label: cfg.label.clone(),
            stability,
            endemic,
        })
    };
    run().map_err(|e| e.in_scenario(&cfg.label))
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizeSummary {
    pub label: String,
    pub switches: [u8; 3],
    pub j_controlled: f64,
    pub j_uncontrolled: f64,
    pub iterations: usize,
    pub converged: bool,
    pub last_change: f64,
    pub peak_i_controlled: f64,
    pub peak_i_uncontrolled: f64,
    pub peak_z_controlled: f64,
    pub peak_z_uncontrolled: f64,
    pub integral_i_controlled: f64,
    pub integral_i_uncontrolled: f64,
}

#[derive(Debug, Clone)]
pub struct OptimizeOutcome {
    pub result: FbsResult,
    pub baseline: Trajectory,
    pub summary: OptimizeSummary,
}

/// Forward-backward sweep plus an uncontrolled baseline on the same grid.
pub fn run_optimize(cfg: &ScenarioConfig) -> Result<OptimizeOutcome> {
    let run = || -> Result<OptimizeOutcome> {
        let result =
            control::forward_backward_sweep(&cfg.params, cfg.init, &cfg.grid, &cfg.weights, &cfg.switches, &cfg.fbs)?;
        let baseline = integrate_forward(|_, x| rhs_uncontrolled(x, &cfg.params), &cfg.grid, cfg.init)?;
        let j_uncontrolled = control::objective(&baseline, &ControlSignal::zeros(cfg.grid.len()), &cfg.weights)?;
        let summary = OptimizeSummary {
            label: cfg.label.clone(),
            switches: [cfg.switches.pi1, cfg.switches.pi2, cfg.switches.pi3],
            j_controlled: result.objective,
            j_uncontrolled,
            iterations: result.iterations,
            converged: result.converged,
            last_change: result.last_change,
            peak_i_controlled: result.states.peak(|x| x.i).0,
            peak_i_uncontrolled: baseline.peak(|x| x.i).0,
            peak_z_controlled: result.states.peak(|x| x.z).0,
            peak_z_uncontrolled: baseline.peak(|x| x.z).0,
            integral_i_controlled: result.states.integrate(|x| x.i),
            integral_i_uncontrolled: baseline.integrate(|x| x.i),
        };
        Ok(OptimizeOutcome {
            result,
            baseline,
            summary,
        })
    };
    run().map_err(|e| e.in_scenario(&cfg.label))
}

/// One-parameter sweep over a base scenario.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub param: String,
    pub values: Vec<f64>,
    pub base: ScenarioConfig,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.base.params.with(&self.param, 0.0)?;
        if self.values.is_empty() {
            return Err(Error::validation("values", "at least one sweep value required"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub summary: Option<SimulateSummary>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub param: String,
    pub rows: Vec<SweepRow>,
    pub trajectories: Vec<Option<Trajectory>>,
}

/// Runs one simulation per value, concurrently, keeping the input order.
/// A failing value is recorded on its row and does not stop the sweep.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutcome> {
    spec.validate()?;
    let results: Vec<(SweepRow, Option<Trajectory>)> = spec
        .values
        .par_iter()
        .map(|&value| {
            let attempt = spec.base.params.with(&spec.param, value).and_then(|params| {
                params.validate()?;
                let mut cfg = spec.base.clone();
                cfg.params = params;
                cfg.label = format!("{}:{}={value}", spec.base.label, spec.param);
                simulate_params(&params, &cfg).map_err(|e| e.in_scenario(&cfg.label))
            });
            match attempt {
                Ok(out) => (
                    SweepRow {
                        value,
                        summary: Some(out.summary),
                        error: None,
                    },
                    Some(out.trajectory),
                ),
                Err(e) => (
                    SweepRow {
                        value,
                        summary: None,
                        error: Some(e.to_string()),
                    },
                    None,
                ),
            }
        })
        .collect();
    let (rows, trajectories) = results.into_iter().unzip();
    Ok(SweepOutcome {
        param: spec.param.clone(),
        rows,
        trajectories,
    })
}

pub fn sweep_csv(out: &SweepOutcome) -> String {
    let mut text = String::from(output::SWEEP_HEADER);
    text.push('\n');
    for row in &out.rows {
        match &row.summary {
            Some(s) => {
                let _ = writeln!(
                    text,
                    "{},{},{},{},{},{},ok",
                    row.value, s.r0, s.peak_i, s.final_state.i, s.peak_z, s.final_state.z
                );
            }
            None => {
                let _ = writeln!(text, "{},NaN,NaN,NaN,NaN,NaN,error", row.value);
            }
        }
    }
    text
}

fn fmt_state(x: &State) -> String {
    format!("s={:.6} e={:.6} i={:.6} z={:.6}", x.s, x.e, x.i, x.z)
}

pub fn simulate_report(s: &SimulateSummary) -> String {
    format!(
        "scenario: {}\nR0: {:.7}\nrumor-free equilibrium: {}\nfinal state: {}\npeak i: {:.6} at t = {}\npeak z: {:.6} at t = {}\n",
        s.label,
        s.r0,
        s.verdict,
        fmt_state(&s.final_state),
        s.peak_i,
        s.t_peak_i,
        s.peak_z,
        s.t_peak_z
    )
}

pub fn analyze_report(a: &AnalyzeOutcome) -> String {
    let st = &a.stability;
    let mut text = format!(
        "scenario: {}\nR0: {:.7}\nrumor-free equilibrium: {}\n",
        a.label,
        st.r0,
        fmt_state(&st.rfe)
    );
    let _ = writeln!(text, "cubic factor: a2={:.8} a1={:.8} a0={:.8}", st.a2, st.a1, st.a0);
    let _ = writeln!(
        text,
        "Routh-Hurwitz: {}",
        if st.routh_hurwitz_pass { "pass" } else { "fail" }
    );
    text.push_str("eigenvalues:");
    for l in &st.eigenvalues {
        let _ = write!(text, " {:.8}{:+.8}i", l.re, l.im);
    }
    let _ = writeln!(
        text,
        "\nverdict: {} (max real part {:.3e})",
        st.verdict, st.max_real_part
    );
    if !st.threshold_agrees {
        text.push_str("note: R0 < 1 and the Routh-Hurwitz test disagree for this parameter set\n");
    }
    match &a.endemic {
        Some(e) => {
            let _ = writeln!(
                text,
                "endemic equilibrium: {} (residual {:.2e})",
                fmt_state(&e.state()),
                e.residual
            );
        }
        None => text.push_str("endemic equilibrium: none\n"),
    }
    text
}

pub fn optimize_report(s: &OptimizeSummary) -> String {
    format!(
        "scenario: {}\nswitches (u,v,w): {:?}\nJ controlled: {:.8}\nJ uncontrolled: {:.8}\niterations: {}\nconverged: {} (last change {:.3e})\npeak i: {:.6} controlled, {:.6} uncontrolled\npeak z: {:.6} controlled, {:.6} uncontrolled\n",
        s.label,
        s.switches,
        s.j_controlled,
        s.j_uncontrolled,
        s.iterations,
        s.converged,
        s.last_change,
        s.peak_i_controlled,
        s.peak_i_uncontrolled,
        s.peak_z_controlled,
        s.peak_z_uncontrolled
    )
}

pub fn write_simulate(dir: &Path, out: &SimulateOutcome) -> Result<()> {
    output::write_file(dir, "trajectory.csv", &output::trajectory_csv(&out.trajectory))?;
    output::write_file(dir, "report.txt", &simulate_report(&out.summary))?;
    output::write_json(dir, "report.json", &out.summary)
}

pub fn write_analyze(dir: &Path, out: &AnalyzeOutcome) -> Result<()> {
    output::write_file(dir, "report.txt", &analyze_report(out))?;
    output::write_json(dir, "report.json", out)
}

pub fn write_optimize(dir: &Path, out: &OptimizeOutcome) -> Result<()> {
    output::write_file(dir, "controls.csv", &output::controls_csv(&out.result.adjoints)?)?;
    output::write_file(dir, "trajectory.csv", &output::trajectory_csv(&out.baseline))?;
    output::write_file(dir, "report.txt", &optimize_report(&out.summary))?;
    output::write_json(dir, "report.json", &out.summary)
}

pub fn write_sweep(dir: &Path, out: &SweepOutcome) -> Result<()> {
    for (k, traj) in out.trajectories.iter().enumerate() {
        if let Some(traj) = traj {
            output::write_file(dir, &format!("trajectory_{k:03}.csv"), &output::trajectory_csv(traj))?;
        }
    }
    output::write_file(dir, "sweep.csv", &sweep_csv(out))?;
    output::write_json(dir, "report.json", &out.rows)
}
