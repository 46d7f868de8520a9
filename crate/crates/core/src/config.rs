//! Scenario parameters and the named propagation environments.
//!
//! Everything downstream works in linear units: powers, gains, noise and the
//! excess path losses are converted once, here. Decibels only appear in the
//! config file and in reports. Angles are radians.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Air-to-ground propagation environment: the sigmoid LoS-probability
/// parameters and the mean excess path losses of LoS and NLoS links.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub c1: f64,
    pub c2: f64,
    pub eta_los_db: f64,
    pub eta_nlos_db: f64,
}

impl Environment {
    pub const SUBURBAN: Environment = Environment {
        c1: 4.88,
        c2: 0.43,
        eta_los_db: 0.1,
        eta_nlos_db: 21.0,
    };
    pub const URBAN: Environment = Environment {
        c1: 9.61,
        c2: 0.16,
        eta_los_db: 1.0,
        eta_nlos_db: 20.0,
    };
    pub const DENSE_URBAN: Environment = Environment {
        c1: 12.08,
        c2: 0.11,
        eta_los_db: 1.6,
        eta_nlos_db: 23.0,
    };
    pub const HIGHRISE: Environment = Environment {
        c1: 27.23,
        c2: 0.08,
        eta_los_db: 2.3,
        eta_nlos_db: 34.0,
    };

    pub fn eta_los(&self) -> f64 {
        db_to_linear(self.eta_los_db)
    }

    pub fn eta_nlos(&self) -> f64 {
        db_to_linear(self.eta_nlos_db)
    }

    pub fn preset(name: &str) -> Result<Environment> {
        environment_presets()
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownName {
                kind: "environment",
                name: name.to_string(),
            })
    }
}

/// The four named environments, keyed by lowercase name.
pub fn environment_presets() -> BTreeMap<&'static str, Environment> {
    BTreeMap::from([
        ("suburban", Environment::SUBURBAN),
        ("urban", Environment::URBAN),
        ("dense_urban", Environment::DENSE_URBAN),
        ("highrise", Environment::HIGHRISE),
    ])
}

/// Antenna equipment at the base stations. UAV antennas follow from it: the
/// isotropic baseline makes every antenna isotropic, the other two give UAVs
/// a downward access antenna and a steerable backhaul antenna.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AntennaModel {
    Isotropic,
    OmniDowntilt,
    OmniPlusDirectional,
}

impl AntennaModel {
    pub const ALL: [AntennaModel; 3] = [
        AntennaModel::Isotropic,
        AntennaModel::OmniDowntilt,
        AntennaModel::OmniPlusDirectional,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            AntennaModel::Isotropic => "isotropic",
            AntennaModel::OmniDowntilt => "omni_downtilt",
            AntennaModel::OmniPlusDirectional => "omni_plus_directional",
        }
    }
}

impl std::str::FromStr for AntennaModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AntennaModel::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownName {
                kind: "antenna model",
                name: s.to_string(),
            })
    }
}

/// One deployment scenario. All power-like quantities are linear.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkConfig {
    /// BS density per m².
    pub lambda_b: f64,
    /// BS antenna height, m.
    pub h_b: f64,
    /// UAV density per m³.
    pub lambda_d: f64,
    pub h_d_min: f64,
    pub h_d_max: f64,
    pub p_b: f64,
    pub p_d: f64,
    pub n0: f64,
    pub alpha_los: f64,
    pub alpha_nlos: f64,
    /// Nakagami shape, shared by every link.
    pub m: u32,
    pub env: Environment,
    pub bs_antenna_model: AntennaModel,
    /// Number of elements of the BS vertical array.
    pub n_b: u32,
    /// BS mainlobe zenith angle, rad.
    pub theta_b: f64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            lambda_b: 1e-6,
            h_b: 20.0,
            lambda_d: 1e-8,
            h_d_min: 100.0,
            h_d_max: 300.0,
            p_b: db_to_linear(10.0),
            p_d: db_to_linear(5.0),
            n0: 1e-8,
            alpha_los: 2.5,
            alpha_nlos: 4.0,
            m: 1,
            env: Environment::URBAN,
            bs_antenna_model: AntennaModel::OmniDowntilt,
            n_b: 8,
            theta_b: 100f64.to_radians(),
        }
    }
}

/// A single broken invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl NetworkConfig {
    /// Checks every invariant and reports all of the broken ones.
    pub fn validate(&self) -> std::result::Result<(), Vec<Violation>> {
        let mut v = Vec::new();
        let mut check = |ok: bool, field: &'static str, message: String| {
            if !ok {
                v.push(Violation { field, message });
            }
        };
        let finite_pos = |x: f64| x.is_finite() && x > 0.0;

        check(
            finite_pos(self.lambda_b),
            "lambda_b",
            format!("BS density must be positive, got {}", self.lambda_b),
        );
        check(
            finite_pos(self.lambda_d),
            "lambda_d",
            format!("UAV density must be positive, got {}", self.lambda_d),
        );
        check(
            finite_pos(self.h_b),
            "h_b",
            format!("BS height must be positive, got {}", self.h_b),
        );
        check(
            finite_pos(self.h_d_min),
            "h_d_min",
            format!("minimum UAV height must be positive, got {}", self.h_d_min),
        );
        check(
            self.h_d_min < self.h_d_max && self.h_d_max.is_finite(),
            "h_d_max",
            format!(
                "degenerate UAV height band [{}, {}]",
                self.h_d_min, self.h_d_max
            ),
        );
        check(
            finite_pos(self.p_b),
            "p_b",
            format!("must be positive, got {}", self.p_b),
        );
        check(
            finite_pos(self.p_d),
            "p_d",
            format!("must be positive, got {}", self.p_d),
        );
        check(
            self.n0.is_finite() && self.n0 >= 0.0,
            "n0",
            format!("noise power must be non-negative, got {}", self.n0),
        );
        check(
            self.alpha_los > 2.0 && self.alpha_nlos.is_finite(),
            "alpha_los",
            format!(
                "path-loss exponents must exceed 2 for finite interference, got {}",
                self.alpha_los
            ),
        );
        check(
            self.alpha_los < self.alpha_nlos,
            "alpha_nlos",
            format!(
                "LoS exponent {} must be below NLoS exponent {}",
                self.alpha_los, self.alpha_nlos
            ),
        );
        check(self.m >= 1, "m", "Nakagami shape must be >= 1".into());
        check(
            finite_pos(self.env.c1) && finite_pos(self.env.c2),
            "env",
            format!(
                "c1 and c2 must be positive, got ({}, {})",
                self.env.c1, self.env.c2
            ),
        );
        check(
            self.env.eta_los_db >= 0.0 && self.env.eta_nlos_db.is_finite(),
            "env.eta_los_db",
            format!(
                "excess path loss must be >= 0 dB, got {}",
                self.env.eta_los_db
            ),
        );
        check(
            self.env.eta_los_db <= self.env.eta_nlos_db,
            "env.eta_nlos_db",
            format!(
                "LoS excess loss {} dB exceeds NLoS excess loss {} dB",
                self.env.eta_los_db, self.env.eta_nlos_db
            ),
        );
        check(
            self.n_b >= 1,
            "n_b",
            "array needs at least one element".into(),
        );
        check(
            self.theta_b > FRAC_PI_2 && self.theta_b < PI,
            "theta_b",
            format!(
                "downtilt constraint: mainlobe zenith must lie in (90°, 180°), got {:.3}°",
                self.theta_b.to_degrees()
            ),
        );
        if v.is_empty() {
            Ok(())
        } else {
            Err(v)
        }
    }

    pub fn validated(self) -> Result<Self> {
        self.validate().map_err(Error::InvalidConfig)?;
        Ok(self)
    }

    pub fn eta(&self, q: crate::spatial::CondLabel) -> f64 {
        match q {
            crate::spatial::CondLabel::Los => self.env.eta_los(),
            crate::spatial::CondLabel::Nlos => self.env.eta_nlos(),
        }
    }

    pub fn alpha(&self, q: crate::spatial::CondLabel) -> f64 {
        match q {
            crate::spatial::CondLabel::Los => self.alpha_los,
            crate::spatial::CondLabel::Nlos => self.alpha_nlos,
        }
    }

    /// Loads a JSON scenario file. Missing keys keep their defaults.
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: ConfigFile = serde_json::from_str(text)?;
        file.resolve()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Environment as written in a config file: a preset name or explicit values.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum EnvSpec {
    Named(String),
    Explicit(Environment),
}

/// On-disk schema. Keys match [`NetworkConfig`]; powers may instead be given
/// in dB under a `_db` suffix, and the tilt in degrees as `theta_b_deg`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    lambda_b: Option<f64>,
    h_b: Option<f64>,
    lambda_d: Option<f64>,
    h_d_min: Option<f64>,
    h_d_max: Option<f64>,
    p_b: Option<f64>,
    p_b_db: Option<f64>,
    p_d: Option<f64>,
    p_d_db: Option<f64>,
    n0: Option<f64>,
    n0_db: Option<f64>,
    alpha_los: Option<f64>,
    alpha_nlos: Option<f64>,
    m: Option<u32>,
    env: Option<EnvSpec>,
    bs_antenna_model: Option<AntennaModel>,
    n_b: Option<u32>,
    theta_b: Option<f64>,
    theta_b_deg: Option<f64>,
}

fn pick(
    linear: Option<f64>,
    db: Option<f64>,
    field: &'static str,
    out: &mut f64,
    errs: &mut Vec<Violation>,
) {
    match (linear, db) {
        (Some(_), Some(_)) => errs.push(Violation {
            field,
            message: "given both linear and _db forms".into(),
        }),
        (Some(x), None) => *out = x,
        (None, Some(d)) => *out = db_to_linear(d),
        (None, None) => {}
    }
}

impl ConfigFile {
    fn resolve(self) -> Result<NetworkConfig> {
        let mut c = NetworkConfig::default();
        let mut errs = Vec::new();
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(x) = self.$f { c.$f = x; } )* };
        }
        take!(lambda_b, h_b, lambda_d, h_d_min, h_d_max, alpha_los, alpha_nlos, m, n_b);
        if let Some(a) = self.bs_antenna_model {
            c.bs_antenna_model = a;
        }
        pick(self.p_b, self.p_b_db, "p_b", &mut c.p_b, &mut errs);
        pick(self.p_d, self.p_d_db, "p_d", &mut c.p_d, &mut errs);
        pick(self.n0, self.n0_db, "n0", &mut c.n0, &mut errs);
        match (self.theta_b, self.theta_b_deg) {
            (Some(_), Some(_)) => errs.push(Violation {
                field: "theta_b",
                message: "given both radians and degrees".into(),
            }),
            (Some(t), None) => c.theta_b = t,
            (None, Some(d)) => c.theta_b = d.to_radians(),
            (None, None) => {}
        }
        match self.env {
            Some(EnvSpec::Named(name)) => match Environment::preset(&name) {
                Ok(e) => c.env = e,
                Err(_) => errs.push(Violation {
                    field: "env",
                    message: format!("unknown environment preset `{name}`"),
                }),
            },
            Some(EnvSpec::Explicit(e)) => c.env = e,
            None => {}
        }
        if !errs.is_empty() {
            return Err(Error::InvalidConfig(errs));
        }
        c.validated()
    }
}
