//! `seiz`: simulate, analyze, optimize and sweep the SEIZ rumor model.
//!
//! Exit codes: 0 success, 1 output failure, 2 configuration error,
//! 3 numerical failure, 4 optimizer did not converge.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use seiz_core::runner::{self, RawConfig, ScenarioConfig, SweepSpec};
use seiz_core::Error;

#[derive(Parser)]
#[command(
    name = "seiz",
    version,
    about = "SEIZ rumor model simulator and optimal-control solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the uncontrolled system.
    Simulate(ScenarioArgs),
    /// Reproduction number, stability of the rumor-free point, endemic point.
    Analyze(ScenarioArgs),
    /// Solve the optimal-control problem by forward-backward sweep.
    Optimize(ScenarioArgs),
    /// Simulate once per value of one parameter.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct ScenarioArgs {
    /// TOML scenario file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in scenario: fig3, fig12, case-u, case-v, case-uvw.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override a config value, e.g. `--set params.beta=0.05`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Number of RK4 steps (overrides the step size).
    #[arg(long)]
    steps: Option<usize>,
    /// Final time.
    #[arg(long)]
    horizon: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Parameter to vary, e.g. beta.
    #[arg(long)]
    param: String,
    /// Comma-separated values.
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    values: Vec<f64>,
}

enum Failure {
    Output(Error),
    Config(Error),
    Numerical(Error),
    NotConverged,
    RowsFailed(usize),
}

impl Failure {
    fn from_run(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e)
        } else {
            Failure::Config(e)
        }
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Output(_) => 1,
            Failure::Config(_) => 2,
            Failure::Numerical(_) | Failure::RowsFailed(_) => 3,
            Failure::NotConverged => 4,
        }
    }
}

fn load(args: &ScenarioArgs) -> Result<ScenarioConfig, Error> {
    let mut raw = match (&args.config, &args.preset) {
        (Some(path), _) => RawConfig::from_path(path)?,
        (None, Some(name)) => RawConfig::from_preset(name)?,
        (None, None) => return Err(Error::validation("config", "pass --config <path> or --preset <name>")),
    };
    for pair in &args.overrides {
        raw.set_pair(pair)?;
    }
    if let Some(n) = args.steps {
        raw.set("grid.steps", &n.to_string())?;
    }
    if let Some(t) = args.horizon {
        raw.set("grid.horizon", &t.to_string())?;
    }
    raw.resolve()
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Simulate(args) => {
            let cfg = load(&args).map_err(Failure::Config)?;
            let out = runner::run_simulate(&cfg).map_err(Failure::from_run)?;
            runner::write_simulate(&args.out, &out).map_err(Failure::Output)?;
            print!("{}", runner::simulate_report(&out.summary));
        }
        Command::Analyze(args) => {
            let cfg = load(&args).map_err(Failure::Config)?;
            let out = runner::run_analyze(&cfg).map_err(Failure::from_run)?;
            runner::write_analyze(&args.out, &out).map_err(Failure::Output)?;
            print!("{}", runner::analyze_report(&out));
        }
        Command::Optimize(args) => {
            let cfg = load(&args).map_err(Failure::Config)?;
            let out = runner::run_optimize(&cfg).map_err(Failure::from_run)?;
            runner::write_optimize(&args.out, &out).map_err(Failure::Output)?;
            print!("{}", runner::optimize_report(&out.summary));
            if !out.summary.converged {
                return Err(Failure::NotConverged);
            }
        }
        Command::Sweep(args) => {
            let base = load(&args.scenario).map_err(Failure::Config)?;
            let spec = SweepSpec {
                param: args.param,
                values: args.values,
                base,
            };
            spec.validate().map_err(Failure::Config)?;
            let out = runner::run_sweep(&spec).map_err(Failure::from_run)?;
            runner::write_sweep(&args.scenario.out, &out).map_err(Failure::Output)?;
            print!("{}", runner::sweep_csv(&out));
            let failed: Vec<_> = out.rows.iter().filter_map(|r| r.error.as_deref()).collect();
            for e in &failed {
                warn!("{e}");
            }
            if !failed.is_empty() {
                return Err(Failure::RowsFailed(failed.len()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => {
            info!("done");
            ExitCode::SUCCESS
        }
        Err(f) => {
            match &f {
                Failure::Output(e) => eprintln!("error: writing output: {e}"),
                Failure::Config(e) | Failure::Numerical(e) => eprintln!("error: {e}"),
                Failure::NotConverged => eprintln!("error: forward-backward sweep did not converge"),
                Failure::RowsFailed(n) => eprintln!("error: {n} sweep value(s) failed"),
            }
            ExitCode::from(f.code())
        }
    }
}
