//! CSV and JSON output. Every CSV starts with `#` comment lines carrying the
//! resolved config, its hash, the seed and the crate version. Nothing
//! time-dependent is written, so equal inputs give byte-identical files.

use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::NetworkConfig;
use crate::runner::{CurveRow, SweepRow};

pub const VERSION: &str = concat!("twohop ", env!("CARGO_PKG_VERSION"));

/// SHA-256 of the compact JSON form of the config.
pub fn config_hash(cfg: &NetworkConfig) -> String {
    hex::encode(Sha256::digest(cfg.to_json().as_bytes()))
}

/// Shortest round-trip form, switching to exponent notation for very small
/// or very large magnitudes.
pub fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// `#` header lines. `extra` pairs are written after the standard ones.
pub fn provenance_header(cfg: &NetworkConfig, seed: u64, extra: &[(&str, String)]) -> String {
    let mut s = String::new();
    writeln!(s, "# version: {VERSION}").unwrap();
    writeln!(s, "# seed: {seed}").unwrap();
    writeln!(s, "# config_sha256: {}", config_hash(cfg)).unwrap();
    writeln!(s, "# config: {}", cfg.to_json()).unwrap();
    for (k, v) in extra {
        writeln!(s, "# {k}: {v}").unwrap();
    }
    s
}

/// Curve rows: one line per engine, protocol and τ.
pub fn coverage_csv(cfg: &NetworkConfig, seed: u64, extra: &[(&str, String)], rows: &[CurveRow]) -> String {
    let mut s = provenance_header(cfg, seed, extra);
    s.push_str("engine,protocol,tau,tau_db,p_cov,stderr,p_cov_los_part,p_cov_nlos_part,converged\n");
    for r in rows {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.engine.name(),
            r.protocol.name(),
            fmt_num(r.tau),
            fmt_num(crate::config::linear_to_db(r.tau)),
            fmt_num(r.p_cov),
            fmt_num(r.stderr),
            fmt_num(r.los_part),
            fmt_num(r.nlos_part),
            r.converged
        )
        .unwrap();
    }
    s
}

pub fn sweep_csv(
    cfg: &NetworkConfig,
    seed: u64,
    param: &str,
    extra: &[(&str, String)],
    rows: &[SweepRow],
) -> String {
    let mut e = vec![("sweep", param.to_string())];
    e.extend(extra.iter().map(|(k, v)| (*k, v.clone())));
    let mut s = provenance_header(cfg, seed, &e);
    s.push_str("x,tau,protocol,engine,p_cov,stderr\n");
    for r in rows {
        writeln!(
            s,
            "{},{},{},{},{},{}",
            r.x,
            fmt_num(r.row.tau),
            r.row.protocol.name(),
            r.row.engine.name(),
            fmt_num(r.row.p_cov),
            fmt_num(r.row.stderr)
        )
        .unwrap();
    }
    s
}

/// Outcome of one oracle check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// The measured quantity compared against `threshold`.
    pub metric: f64,
    pub threshold: f64,
    pub detail: String,
}

impl CheckResult {
    /// Passes when `metric <= threshold`.
    pub fn at_most(name: impl Into<String>, metric: f64, threshold: f64, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            passed: metric <= threshold,
            metric,
            threshold,
            detail: detail.into(),
        }
    }

    /// Passes when `metric >= threshold`.
    pub fn at_least(name: impl Into<String>, metric: f64, threshold: f64, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            passed: metric >= threshold,
            metric,
            threshold,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub version: &'static str,
    pub config_sha256: String,
    pub config: NetworkConfig,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn new(cfg: &NetworkConfig, seed: u64, checks: Vec<CheckResult>) -> Self {
        ValidationReport {
            version: VERSION,
            config_sha256: config_hash(cfg),
            config: cfg.clone(),
            seed,
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    pub fn failed(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
