//! `twohop` command-line front end.
//!
//! Exit codes: 0 on success, 1 when a validation check fails, 2 for bad
//! input (config, flags or grids). Nothing is written to `--out` unless the
//! run succeeds.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use twohop::config::db_to_linear;
use twohop::report::{coverage_csv, sweep_csv};
use twohop::runner::{run_coverage, run_sweep, EngineChoice, RunOptions, SweepParam, SweepSpec};
use twohop::sim::{BackhaulInterference, SimOptions};
use twohop::validate::{run_validation, Budget};
use twohop::{Error, NetworkConfig, Protocol};

#[derive(Parser)]
#[command(name = "twohop", version, about = "Coverage of two-hop UAV relay networks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Coverage curves over a τ grid.
    Coverage {
        #[command(flatten)]
        run: RunArgs,
        /// Thresholds in dB, comma separated.
        #[arg(long, default_value = "-10,-5,0,5,10", allow_hyphen_values = true)]
        tau: String,
    },
    /// Coverage at each value of a swept parameter.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// mean_height, max_height, lambda_d, tau, environment or antenna_model.
        #[arg(long)]
        param: String,
        /// Grid values, comma separated (numbers, preset or model names).
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        /// Thresholds in dB, comma separated. Ignored for a τ sweep.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        tau: String,
    },
    /// Runs the oracle suite and writes a JSON report.
    Validate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Small sample sizes; thresholds are unchanged.
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Prints the resolved config as JSON.
    Config {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Backhaul {
    Auto,
    Ignore,
    Include,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario JSON; defaults to the urban baseline.
    #[arg(long)]
    config: Option<PathBuf>,
    /// analytical, simulation or both.
    #[arg(long, default_value = "both")]
    engine: String,
    /// af, df or il, comma separated.
    #[arg(long, default_value = "af,df")]
    protocol: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Simulation trials.
    #[arg(long, default_value_t = 20_000)]
    trials: usize,
    /// Analytical samples per channel condition.
    #[arg(long, default_value_t = 20_000)]
    samples: usize,
    /// Analytical standard error above which a point is flagged unconverged.
    #[arg(long, default_value_t = 0.01)]
    tolerance: f64,
    /// Simulation window radius in m.
    #[arg(long)]
    window: Option<f64>,
    #[arg(long, value_enum, default_value = "auto")]
    backhaul: Backhaul,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure with its exit code.
struct Fail(u8, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(v) => Fail(
                2,
                std::iter::once("invalid configuration:".to_string())
                    .chain(v.iter().map(|x| format!("  {x}")))
                    .collect::<Vec<_>>()
                    .join("\n"),
            ),
            Error::Io(e) => Fail(2, e.to_string()),
            e @ (Error::Parse(_)
            | Error::EmptyGrid(_)
            | Error::InvalidInput { .. }
            | Error::UnknownName { .. }
            | Error::Domain { .. }) => Fail(2, e.to_string()),
            e => Fail(1, e.to_string()),
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<NetworkConfig, Fail> {
    let cfg = match path {
        Some(p) => NetworkConfig::from_json_file(p).map_err(|e| match e {
            Error::Io(io) => Fail(2, format!("cannot read {}: {io}", p.display())),
            e => e.into(),
        })?,
        None => NetworkConfig::default(),
    };
    Ok(cfg.validated()?)
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|v| !v.is_empty())
}

fn parse_taus_db(s: &str) -> Result<Vec<f64>, Fail> {
    let mut taus = split_list(s)
        .map(|v| {
            v.parse::<f64>()
                .map(db_to_linear)
                .map_err(|_| Fail(2, format!("invalid tau `{v}`: expected a number in dB")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if taus.is_empty() {
        return Err(Error::EmptyGrid("tau").into());
    }
    taus.sort_by(f64::total_cmp);
    taus.dedup();
    Ok(taus)
}

fn run_options(a: &RunArgs, tau_grid: Vec<f64>) -> Result<RunOptions, Fail> {
    let protocols = split_list(&a.protocol)
        .map(str::parse::<Protocol>)
        .collect::<Result<Vec<_>, _>>()?;
    if protocols.is_empty() {
        return Err(Error::EmptyGrid("protocol").into());
    }
    if a.window.is_some_and(|w| !(w.is_finite() && w > 0.0)) {
        return Err(Fail(2, "window radius must be positive".into()));
    }
    Ok(RunOptions {
        engine: a.engine.parse::<EngineChoice>()?,
        protocols,
        tau_grid,
        samples: a.samples,
        trials: a.trials,
        tolerance: a.tolerance,
        seed: a.seed,
        sim: SimOptions {
            window_radius: a.window,
            backhaul: match a.backhaul {
                Backhaul::Auto => BackhaulInterference::Auto,
                Backhaul::Ignore => BackhaulInterference::Ignore,
                Backhaul::Include => BackhaulInterference::Include,
            },
            ..SimOptions::default()
        },
    })
}

fn run_extras(o: &RunOptions) -> Vec<(&'static str, String)> {
    vec![
        ("engine", format!("{:?}", o.engine).to_lowercase()),
        ("samples", o.samples.to_string()),
        ("trials", o.trials.to_string()),
        ("tolerance", o.tolerance.to_string()),
        ("window", o.sim.window_radius.map_or("default".into(), |w| w.to_string())),
        ("backhaul", format!("{:?}", o.sim.backhaul).to_lowercase()),
    ]
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Fail> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Fail(1, format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Fail> {
    match cli.cmd {
        Cmd::Coverage { run, tau } => {
            let cfg = load_config(run.config.as_deref())?;
            let opts = run_options(&run, parse_taus_db(&tau)?)?;
            let rows = run_coverage(&cfg, &opts)?;
            emit(run.out.as_deref(), &coverage_csv(&cfg, opts.seed, &run_extras(&opts), &rows))
        }
        Cmd::Sweep { run, param, values, tau } => {
            let cfg = load_config(run.config.as_deref())?;
            let param: SweepParam = param.parse()?;
            let spec = SweepSpec::new(param, split_list(&values).map(String::from).collect());
            let taus = if param == SweepParam::Tau {
                vec![1.0]
            } else {
                parse_taus_db(&tau)?
            };
            let opts = run_options(&run, taus)?;
            let rows = run_sweep(&cfg, &spec, &opts)?;
            emit(
                run.out.as_deref(),
                &sweep_csv(&cfg, opts.seed, param.name(), &run_extras(&opts), &rows),
            )
        }
        Cmd::Validate { config, seed, quick, out } => {
            let cfg = load_config(config.as_deref())?;
            let budget = Budget {
                seed,
                ..if quick { Budget::quick() } else { Budget::full() }
            };
            let report = run_validation(&cfg, &budget)?;
            emit(out.as_deref(), &(report.to_json() + "\n"))?;
            let failed: Vec<String> = report.failed().map(|c| format!("  {}: {} vs {}", c.name, c.metric, c.threshold)).collect();
            if failed.is_empty() {
                eprintln!("all {} checks passed", report.checks.len());
                Ok(())
            } else {
                Err(Fail(1, format!("{} check(s) failed:\n{}", failed.len(), failed.join("\n"))))
            }
        }
        Cmd::Config { config } => {
            let cfg = load_config(config.as_deref())?;
            println!("{}", cfg.to_json_pretty());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
