use std::fs;

use seiz_core::analysis::Verdict;
use seiz_core::presets::{FIG12_VALUES, FIG3_VALUES};
use seiz_core::runner::output::{read_numeric_csv, trajectory_csv, CONTROLS_HEADER, TRAJECTORY_HEADER};
use seiz_core::runner::{self, load_config, preset_config, run_analyze, run_simulate, run_sweep, RawConfig, SweepSpec};
use seiz_core::{Error, State};

fn parse_values(values: &str) -> Vec<(String, String)> {
    values
        .split(';')
        .map(|kv| {
            let (k, v) = kv.split_once('=').unwrap();
            (k.trim().to_string(), v.trim().to_string())
        })
        .collect()
}

#[test]
fn presets_match_documented_values() {
    for (name, values) in [("fig3", FIG3_VALUES), ("fig12", FIG12_VALUES)] {
        let th = preset_config(name).unwrap().params;
        for (k, v) in parse_values(values) {
            assert_eq!(th.get(&k).unwrap().to_string(), v, "{name}.{k}");
        }
    }
    assert_eq!(parse_values(FIG3_VALUES).len(), 10);
}

#[test]
fn file_config_fills_documented_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.toml");
    fs::write(
        &path,
        "[params]\npi = 10\nmu = 0.5\nbeta = 0.007\nb = 0.00539\nrho = 0.21431\neps = 0.06\np = 0.09767\n\
         l = 0.005234\ndelta = 0.05\nlam = 0.0084231\n",
    )
    .unwrap();
    let cfg = load_config(&path).unwrap();
    assert_eq!(cfg.params, preset_config("fig3").unwrap().params);
    assert_eq!(cfg.init, State::new(19.99, 0.0, 0.01, 0.0));
    assert_eq!((cfg.grid.t0, cfg.grid.tf, cfg.grid.n_steps), (0.0, 100.0, 10_000));
    assert_eq!((cfg.weights.a, cfg.weights.b_w, cfg.weights.c_w), (1.0, 1.0, 1.0));

    fs::write(&path, "preset = \"fig12\"\n[control]\nu = 1\n").unwrap();
    let cfg = load_config(&path).unwrap();
    assert_eq!(cfg.grid.tf, 25.0);
    assert_eq!(cfg.switches.pi1, 1);
}

#[test]
fn config_errors_name_the_field() {
    let err = RawConfig::from_toml_str("preset = \"fig3\"\n[params]\np = 1.5\n")
        .unwrap()
        .resolve()
        .unwrap_err();
    assert!(err.to_string().contains("p ∈ [0,1]"), "{err}");

    let err = RawConfig::from_toml_str("[grid]\nhorizon = 3\nspeed = 1\n").unwrap_err();
    assert!(matches!(err, Error::Parse(_)));
    assert!(err.to_string().contains("speed"), "{err}");

    let err = RawConfig::from_toml_str("[params\n").unwrap_err();
    assert!(err.to_string().contains("line 1"), "{err}");

    let mut raw = RawConfig::from_preset("fig3").unwrap();
    assert!(raw.set_pair("params.kappa=1").is_err());
    assert!(raw.set_pair("params.beta").is_err());
    raw.set_pair("params.mu=0").unwrap();
    let err = raw.resolve().unwrap_err();
    assert!(err.to_string().contains("mu"), "{err}");
}

#[test]
fn analyze_verdicts_for_presets() {
    let a = run_analyze(&preset_config("fig3").unwrap()).unwrap();
    assert_eq!(a.stability.verdict, Verdict::LocallyStable);
    assert!(a.endemic.is_none());
    let a = run_analyze(&preset_config("fig12").unwrap()).unwrap();
    assert_eq!(a.stability.verdict, Verdict::Unstable);
    let eq = a.endemic.unwrap();
    assert!(eq.residual <= 1e-8);
    let report = runner::analyze_report(&run_analyze(&preset_config("fig12").unwrap()).unwrap());
    assert!(report.contains("verdict: unstable"));
}

#[test]
fn rfe_start_gives_constant_columns() {
    let mut cfg = preset_config("fig12").unwrap();
    cfg.init = State::new(100.0, 0.0, 0.0, 0.0);
    let out = run_simulate(&cfg).unwrap();
    assert!(out.trajectory.states.iter().all(|x| *x == cfg.init));
}

#[test]
fn trajectory_csv_round_trips_exactly() {
    let out = run_simulate(&preset_config("fig12").unwrap()).unwrap();
    let text = trajectory_csv(&out.trajectory);
    let (header, rows) = read_numeric_csv(&text).unwrap();
    assert_eq!(header.join(","), TRAJECTORY_HEADER);
    assert_eq!(rows.len(), out.trajectory.states.len());
    for ((row, x), t) in rows.iter().zip(&out.trajectory.states).zip(out.trajectory.grid.nodes()) {
        assert_eq!(row[0], t);
        assert_eq!(State::new(row[1], row[2], row[3], row[4]), *x);
    }
}

#[test]
fn controls_csv_has_all_columns() {
    let out = runner::run_optimize(&preset_config("case-v").unwrap()).unwrap();
    let text = runner::output::controls_csv(&out.result.adjoints).unwrap();
    let (header, rows) = read_numeric_csv(&text).unwrap();
    assert_eq!(header.join(","), CONTROLS_HEADER);
    assert_eq!(rows.len(), 2501);
    assert!(rows.iter().all(|r| (0.0..=1.0).contains(&r[6])));
    assert!(runner::output::controls_csv(&out.baseline).is_err());
}

#[test]
fn single_value_sweep_equals_simulate() {
    let base = preset_config("fig12").unwrap();
    let sweep = run_sweep(&SweepSpec {
        param: "beta".into(),
        values: vec![0.07],
        base: base.clone(),
    })
    .unwrap();
    let sim = run_simulate(&base).unwrap();
    let row = sweep.rows[0].summary.as_ref().unwrap();
    assert_eq!(row.r0, sim.summary.r0);
    assert_eq!(row.final_state, sim.summary.final_state);
    assert_eq!((row.peak_i, row.peak_z), (sim.summary.peak_i, sim.summary.peak_z));
    assert_eq!(sweep.trajectories[0].as_ref().unwrap().states, sim.trajectory.states);
}

#[test]
fn beta_sweep_crosses_the_threshold() {
    let out = run_sweep(&SweepSpec {
        param: "beta".into(),
        values: vec![0.01, 0.03, 0.05, 0.07],
        base: preset_config("fig12").unwrap(),
    })
    .unwrap();
    let r0: Vec<f64> = out.rows.iter().map(|r| r.summary.as_ref().unwrap().r0).collect();
    assert!(r0[0] < 1.0 && r0[1] > 1.0);
    assert!(r0.windows(2).all(|w| w[0] < w[1]));
    let values: Vec<f64> = out.rows.iter().map(|r| r.value).collect();
    assert_eq!(values, vec![0.01, 0.03, 0.05, 0.07]);
}

#[test]
fn sweep_records_bad_values_and_continues() {
    let out = run_sweep(&SweepSpec {
        param: "p".into(),
        values: vec![0.1, 1.5, 0.2],
        base: preset_config("fig3").unwrap(),
    })
    .unwrap();
    assert!(out.rows[0].summary.is_some());
    assert!(out.rows[1].error.as_deref().unwrap().contains("p ∈ [0,1]"));
    assert!(out.rows[2].summary.is_some());
    let csv = runner::sweep_csv(&out);
    assert!(csv.lines().nth(2).unwrap().ends_with(",error"));

    let bad = SweepSpec {
        param: "gamma".into(),
        values: vec![1.0],
        base: preset_config("fig3").unwrap(),
    };
    assert!(run_sweep(&bad).is_err());
}

#[test]
fn writers_emit_expected_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_sweep(&SweepSpec {
        param: "beta".into(),
        values: vec![0.01, 0.07],
        base: preset_config("fig12").unwrap(),
    })
    .unwrap();
    runner::write_sweep(dir.path(), &out).unwrap();
    for name in ["sweep.csv", "report.json", "trajectory_000.csv", "trajectory_001.csv"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 2);
}

#[test]
fn numerical_errors_carry_the_scenario_label() {
    let mut cfg = preset_config("fig12").unwrap();
    cfg.grid = seiz_core::integrator::Grid::new(0.0, 100.0, 2).unwrap();
    let err = run_simulate(&cfg).unwrap_err();
    assert!(err.is_numerical());
    assert!(err.to_string().starts_with("scenario `fig12`"), "{err}");
}
