//! Orchestration of coverage curves and parameter sweeps over both engines.

use serde::Serialize;

use crate::config::{AntennaModel, Environment, NetworkConfig};
use crate::coverage::{check_tau_grid, coverage_multi, Protocol};
use crate::error::{Error, Result};
use crate::laplace::LaplaceTol;
use crate::sim::{estimate_coverage, SimOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Analytical,
    Simulation,
}

impl Engine {
    pub fn name(&self) -> &'static str {
        match self {
            Engine::Analytical => "analytical",
            Engine::Simulation => "simulation",
        }
    }
}

/// Which engines to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineChoice {
    Analytical,
    Simulation,
    Both,
}

impl EngineChoice {
    pub fn engines(&self) -> Vec<Engine> {
        match self {
            EngineChoice::Analytical => vec![Engine::Analytical],
            EngineChoice::Simulation => vec![Engine::Simulation],
            EngineChoice::Both => vec![Engine::Analytical, Engine::Simulation],
        }
    }
}

impl std::str::FromStr for EngineChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "analytical" => Ok(EngineChoice::Analytical),
            "simulation" | "sim" => Ok(EngineChoice::Simulation),
            "both" => Ok(EngineChoice::Both),
            _ => Err(Error::UnknownName {
                kind: "engine",
                name: s.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOptions {
    pub engine: EngineChoice,
    pub protocols: Vec<Protocol>,
    /// Linear thresholds.
    pub tau_grid: Vec<f64>,
    /// Analytical samples per channel condition.
    pub samples: usize,
    /// Simulation trials.
    pub trials: usize,
    pub tolerance: f64,
    pub seed: u64,
    #[serde(skip)]
    pub sim: SimOptions,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            engine: EngineChoice::Both,
            protocols: vec![Protocol::Af, Protocol::Df],
            tau_grid: vec![0.1, 1.0, 10.0],
            samples: 20_000,
            trials: 20_000,
            tolerance: 0.01,
            seed: 1,
            sim: SimOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveRow {
    pub engine: Engine,
    pub protocol: Protocol,
    pub tau: f64,
    pub p_cov: f64,
    pub stderr: f64,
    pub los_part: f64,
    pub nlos_part: f64,
    /// False for analytical points whose error exceeds the tolerance.
    pub converged: bool,
}

fn laplace_tol() -> LaplaceTol {
    LaplaceTol {
        rel: 1e-6,
        max_intervals: 100,
    }
}

/// Coverage curves for every selected engine and protocol, engine-major.
pub fn run_coverage(cfg: &NetworkConfig, opts: &RunOptions) -> Result<Vec<CurveRow>> {
    cfg.validate().map_err(Error::InvalidConfig)?;
    check_tau_grid(&opts.tau_grid)?;
    if opts.protocols.is_empty() {
        return Err(Error::EmptyGrid("protocol"));
    }
    let mut rows = Vec::new();
    for engine in opts.engine.engines() {
        match engine {
            Engine::Analytical => {
                let res = coverage_multi(
                    cfg,
                    &opts.protocols,
                    &opts.tau_grid,
                    opts.samples,
                    opts.tolerance,
                    opts.seed as u32,
                    laplace_tol(),
                )?;
                for r in res {
                    for p in r.points {
                        rows.push(CurveRow {
                            engine,
                            protocol: r.protocol,
                            tau: p.tau,
                            p_cov: p.p_cov,
                            stderr: p.stderr,
                            los_part: p.los_part,
                            nlos_part: p.nlos_part,
                            converged: p.stderr <= opts.tolerance,
                        });
                    }
                }
            }
            Engine::Simulation => {
                let res = estimate_coverage(
                    cfg,
                    &opts.protocols,
                    &opts.tau_grid,
                    opts.trials,
                    opts.seed,
                    &opts.sim,
                );
                for r in res {
                    for p in r.points {
                        rows.push(CurveRow {
                            engine,
                            protocol: r.protocol,
                            tau: p.tau,
                            p_cov: p.p_cov,
                            stderr: p.stderr,
                            los_part: p.los_part,
                            nlos_part: p.nlos_part,
                            converged: true,
                        });
                    }
                }
            }
        }
    }
    Ok(rows)
}

/// Parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// Mean UAV height with the band width held fixed.
    MeanHeight,
    /// Maximum UAV height with the minimum held fixed.
    MaxHeight,
    LambdaD,
    /// Threshold in dB; the grid replaces the τ grid.
    Tau,
    Environment,
    AntennaModel,
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::MeanHeight => "mean_height",
            SweepParam::MaxHeight => "max_height",
            SweepParam::LambdaD => "lambda_d",
            SweepParam::Tau => "tau",
            SweepParam::Environment => "environment",
            SweepParam::AntennaModel => "antenna_model",
        }
    }
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "mean_height" => SweepParam::MeanHeight,
            "max_height" => SweepParam::MaxHeight,
            "lambda_d" => SweepParam::LambdaD,
            "tau" => SweepParam::Tau,
            "environment" | "env" => SweepParam::Environment,
            "antenna_model" | "antenna" => SweepParam::AntennaModel,
            _ => {
                return Err(Error::UnknownName {
                    kind: "sweep parameter",
                    name: s.to_string(),
                })
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub param: SweepParam,
    /// Grid values as written: numbers, or preset / model names.
    pub values: Vec<String>,
}

impl SweepSpec {
    pub fn new(param: SweepParam, values: Vec<String>) -> Self {
        SweepSpec { param, values }
    }

    pub fn numeric(param: SweepParam, values: &[f64]) -> Self {
        SweepSpec {
            param,
            values: values.iter().map(|v| v.to_string()).collect(),
        }
    }
}

fn parse_number(param: SweepParam, v: &str) -> Result<f64> {
    v.trim().parse::<f64>().map_err(|_| Error::InvalidInput {
        what: "sweep value",
        reason: format!("`{v}` is not a number for {}", param.name()),
    })
}

/// The scenario at one grid value. For a τ sweep the config is unchanged.
pub fn apply_sweep_value(base: &NetworkConfig, param: SweepParam, value: &str) -> Result<NetworkConfig> {
    let mut cfg = base.clone();
    match param {
        SweepParam::MeanHeight => {
            let half = 0.5 * (base.h_d_max - base.h_d_min);
            let h = parse_number(param, value)?;
            cfg.h_d_min = h - half;
            cfg.h_d_max = h + half;
        }
        SweepParam::MaxHeight => cfg.h_d_max = parse_number(param, value)?,
        SweepParam::LambdaD => cfg.lambda_d = parse_number(param, value)?,
        SweepParam::Tau => {
            parse_number(param, value)?;
        }
        SweepParam::Environment => cfg.env = Environment::preset(value.trim())?,
        SweepParam::AntennaModel => cfg.bs_antenna_model = value.trim().parse::<AntennaModel>()?,
    }
    cfg.validate().map_err(Error::InvalidConfig)?;
    Ok(cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub x: String,
    pub row: CurveRow,
}

/// Runs every grid value. Each grid point reuses the same seed so curves
/// share random numbers across the sweep.
pub fn run_sweep(base: &NetworkConfig, spec: &SweepSpec, opts: &RunOptions) -> Result<Vec<SweepRow>> {
    if spec.values.is_empty() {
        return Err(Error::EmptyGrid(spec.param.name()));
    }
    let mut out = Vec::new();
    if spec.param == SweepParam::Tau {
        let mut taus = spec
            .values
            .iter()
            .map(|v| parse_number(spec.param, v).map(crate::config::db_to_linear))
            .collect::<Result<Vec<f64>>>()?;
        taus.sort_by(f64::total_cmp);
        let o = RunOptions {
            tau_grid: taus,
            ..opts.clone()
        };
        for row in run_coverage(base, &o)? {
            out.push(SweepRow {
                x: format!("{}", crate::config::linear_to_db(row.tau)),
                row,
            });
        }
        return Ok(out);
    }
    for v in &spec.values {
        let cfg = apply_sweep_value(base, spec.param, v)?;
        for row in run_coverage(&cfg, opts)? {
            out.push(SweepRow {
                x: v.trim().to_string(),
                row,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_height_keeps_band_width() {
        let c = apply_sweep_value(&NetworkConfig::default(), SweepParam::MeanHeight, "500").unwrap();
        assert_eq!((c.h_d_min, c.h_d_max), (400.0, 600.0));
    }

    #[test]
    fn bad_sweep_values_are_rejected() {
        let base = NetworkConfig::default();
        assert!(apply_sweep_value(&base, SweepParam::MaxHeight, "50").is_err());
        assert!(apply_sweep_value(&base, SweepParam::Environment, "moon").is_err());
        assert!(apply_sweep_value(&base, SweepParam::LambdaD, "x").is_err());
        let spec = SweepSpec::new(SweepParam::LambdaD, vec![]);
        assert!(matches!(
            run_sweep(&base, &spec, &RunOptions::default()),
            Err(Error::EmptyGrid(_))
        ));
    }
}
