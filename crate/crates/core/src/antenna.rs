//! Antenna gain patterns. Every function returns a linear gain.
//!
//! Zenith angles are measured from the +z axis at the radiating node, so a
//! BS looking down at a ground UE sees it at an angle in (π/2, π].

use std::f64::consts::{FRAC_PI_2, PI};

use crate::config::{db_to_linear, AntennaModel, NetworkConfig};

/// Width of the band around Δ = 0 where the array factor returns its limit.
pub const AF_EPS: f64 = 1e-9;

/// Vertical uniform linear array of 3GPP elements at the BS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UlaParams {
    pub n_elements: u32,
    pub theta_tilt: f64,
    pub theta_3db: f64,
    pub sla_v_db: f64,
    pub g_e_max_db: f64,
}

impl UlaParams {
    pub fn new(n_elements: u32, theta_tilt: f64) -> Self {
        UlaParams {
            n_elements,
            theta_tilt,
            theta_3db: 65f64.to_radians(),
            sla_v_db: 30.0,
            g_e_max_db: 8.0,
        }
    }

    pub fn from_config(cfg: &NetworkConfig) -> Self {
        Self::new(cfg.n_b, cfg.theta_b)
    }
}

/// Steerable directional antenna (BS backhaul under the third model, and
/// UAV backhaul under both non-isotropic models).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionalParams {
    pub theta_3db: f64,
    pub phi_3db: f64,
    pub a_m_db: f64,
    /// Vertical side-lobe floor.
    pub sla_v_db: f64,
    pub g_max_db: f64,
}

impl Default for DirectionalParams {
    fn default() -> Self {
        DirectionalParams {
            theta_3db: 10f64.to_radians(),
            phi_3db: 10f64.to_radians(),
            a_m_db: 30.0,
            sla_v_db: 30.0,
            g_max_db: 8.0,
        }
    }
}

pub const G_MAX_DB: f64 = 8.0;
const UAV_AC_THETA_3DB_DEG: f64 = 120.0;
const UAV_AC_SLA_DB: f64 = 30.0;

/// Normalized array factor of an `n`-element half-wavelength ULA steered to
/// `theta_tilt`.
pub fn array_factor(theta: f64, theta_tilt: f64, n: u32) -> f64 {
    let delta = theta.cos() - theta_tilt.cos();
    if delta.abs() < AF_EPS {
        return 1.0;
    }
    let x = FRAC_PI_2 * delta;
    let v = (n as f64 * x).sin() / (n as f64 * x.sin());
    v.clamp(-1.0, 1.0)
}

/// Vertical element pattern in dB.
pub fn element_vertical_db(theta: f64, p: &UlaParams) -> f64 {
    let t = (theta - FRAC_PI_2) / p.theta_3db;
    -(12.0 * t * t).min(p.sla_v_db)
}

/// Downtilted omnidirectional BS gain: element pattern times |fA|².
pub fn bs_omni_gain(theta: f64, p: &UlaParams) -> f64 {
    let af = array_factor(theta, p.theta_tilt, p.n_elements);
    db_to_linear(p.g_e_max_db + element_vertical_db(theta, p)) * af * af
}

/// Wraps an angle difference to [-π, π].
pub fn wrap_angle(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

pub fn directional_gain_db(theta: f64, phi: f64, theta0: f64, phi0: f64, p: &DirectionalParams) -> f64 {
    let tv = (theta - theta0) / p.theta_3db;
    let th = wrap_angle(phi - phi0) / p.phi_3db;
    let gv = -(12.0 * tv * tv).min(p.sla_v_db);
    let gh = -(12.0 * th * th).min(p.a_m_db);
    p.g_max_db - (-gv - gh).min(p.a_m_db)
}

/// Directional gain towards (θ, φ) with boresight (θ0, φ0).
pub fn directional_gain(theta: f64, phi: f64, theta0: f64, phi0: f64, p: &DirectionalParams) -> f64 {
    db_to_linear(directional_gain_db(theta, phi, theta0, phi0, p))
}

/// UAV access antenna. The argument is the angle at the UAV measured from +z,
/// so a UE straight below is at π; callers holding the zenith angle θ of the
/// UAV seen from the UE pass `π - θ`.
pub fn uav_access_gain(theta: f64) -> f64 {
    let t = (theta - PI) / UAV_AC_THETA_3DB_DEG.to_radians();
    db_to_linear(G_MAX_DB - (12.0 * t * t).min(UAV_AC_SLA_DB))
}

/// Which link a gain is requested for, with the angle it needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Link {
    /// BS to ground UE; `theta` is the direction of the UE seen from the BS.
    BsAccess { theta: f64 },
    /// BS end of the backhaul; `theta` is the direction of the UAV seen from
    /// the BS.
    BsBackhaul { theta: f64 },
    /// UAV to UE; `zenith` is the UAV's zenith angle seen from the UE.
    UavAccess { zenith: f64 },
    /// UAV end of the backhaul, steered at its serving BS.
    UavBackhaul,
}

/// Gain selection used by the analysis and the simulator alike.
pub fn gain_for_link(model: AntennaModel, link: Link, ula: &UlaParams) -> f64 {
    if model == AntennaModel::Isotropic {
        return 1.0;
    }
    match link {
        Link::BsAccess { theta } => bs_omni_gain(theta, ula),
        Link::BsBackhaul { theta } => match model {
            AntennaModel::OmniDowntilt => bs_omni_gain(theta, ula),
            _ => db_to_linear(G_MAX_DB),
        },
        Link::UavAccess { zenith } => uav_access_gain(PI - zenith),
        Link::UavBackhaul => db_to_linear(G_MAX_DB),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deg(x: f64) -> f64 {
        x.to_radians()
    }

    #[test]
    fn array_factor_examples() {
        assert_eq!(array_factor(1.2, 1.2, 8), 1.0);
        assert_eq!(array_factor(deg(100.0), deg(100.0), 8), 1.0);
        // Δ = 0.25 is the first null of an 8-element array
        let tilt = deg(100.0);
        let theta = (tilt.cos() + 0.25).acos();
        assert!(array_factor(theta, tilt, 8).abs() < 1e-15);
        assert_eq!(array_factor(0.3, 2.0, 1), 1.0);
    }

    #[test]
    fn omni_gain_examples() {
        let p = UlaParams::new(8, FRAC_PI_2);
        assert!((bs_omni_gain(FRAC_PI_2, &p) - db_to_linear(8.0)).abs() < 1e-12);
        let p = UlaParams::new(8, deg(100.0));
        let t = (deg(100.0) - FRAC_PI_2) / deg(65.0);
        let expect = db_to_linear(8.0 - 12.0 * t * t);
        assert!((bs_omni_gain(deg(100.0), &p) - expect).abs() < 1e-12);
        assert!((expect - 5.9101).abs() < 1e-3);
        let null = (deg(100.0).cos() + 0.25).acos();
        assert!(bs_omni_gain(null, &p) < 1e-28);
    }

    #[test]
    fn directional_examples() {
        let p = DirectionalParams::default();
        let g = directional_gain(0.4, 1.0, 0.4, 1.0, &p);
        assert!((g - db_to_linear(8.0)).abs() < 1e-12);
        let g = directional_gain(0.0, 0.0, 2.0, PI, &p);
        assert!((g - db_to_linear(-22.0)).abs() < 1e-12);
        let a = directional_gain(0.5, 0.3 + 2.0 * PI, 0.5, 0.3, &p);
        assert!((a - db_to_linear(8.0)).abs() < 1e-9);
    }

    #[test]
    fn uav_access_examples() {
        assert!((uav_access_gain(PI) - db_to_linear(8.0)).abs() < 1e-12);
        assert!((uav_access_gain(PI - deg(60.0)) - db_to_linear(5.0)).abs() < 1e-12);
        // the 30 dB floor needs |θ - π| > 180°, so straight up is the minimum
        assert!((uav_access_gain(0.0) - db_to_linear(8.0 - 27.0)).abs() < 1e-15);
        let a = uav_access_gain(PI - 0.3);
        assert!((a - uav_access_gain(PI + 0.3)).abs() < 1e-15);
    }

    #[test]
    fn link_dispatch() {
        let ula = UlaParams::new(8, deg(100.0));
        for link in [
            Link::BsAccess { theta: 2.0 },
            Link::BsBackhaul { theta: 0.2 },
            Link::UavAccess { zenith: 0.5 },
            Link::UavBackhaul,
        ] {
            assert_eq!(gain_for_link(AntennaModel::Isotropic, link, &ula), 1.0);
        }
        let g8 = db_to_linear(8.0);
        assert_eq!(
            gain_for_link(AntennaModel::OmniPlusDirectional, Link::BsBackhaul { theta: 0.3 }, &ula),
            g8
        );
        assert_eq!(gain_for_link(AntennaModel::OmniDowntilt, Link::UavBackhaul, &ula), g8);
        // UAV straight above the BS
        assert_eq!(
            gain_for_link(AntennaModel::OmniDowntilt, Link::BsBackhaul { theta: 0.0 }, &ula),
            bs_omni_gain(0.0, &ula)
        );
    }
}
