//! Air-to-ground LoS probability, path loss and Nakagami-m fading.

use rand::Rng;
use rand_distr::Exp1;

use crate::config::{Environment, NetworkConfig};
use crate::special::gamma_p_int;

/// Probability that a UAV at zenith angle `theta` (radians, seen from the
/// ground) has a LoS link. The sigmoid is parameterized in degrees of
/// elevation.
pub fn p_los(theta: f64, env: &Environment) -> f64 {
    let elev_deg = 90.0 - theta.to_degrees();
    1.0 / (1.0 + env.c1 * (-env.c2 * (elev_deg - env.c1)).exp())
}

pub fn p_nlos(theta: f64, env: &Environment) -> f64 {
    1.0 - p_los(theta, env)
}

/// Same as [`p_los`] but taking the elevation angle `atan(z / rho)` through
/// its tangent components, which avoids an acos/atan round trip in hot loops.
#[inline]
pub fn p_los_from_elevation(elev_rad: f64, env: &Environment) -> f64 {
    let elev_deg = elev_rad.to_degrees();
    1.0 / (1.0 + env.c1 * (-env.c2 * (elev_deg - env.c1)).exp())
}

/// Gamma(m, m) fading power; unit mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FadingLaw {
    pub m: u32,
}

impl FadingLaw {
    pub fn new(m: u32) -> Self {
        assert!(m >= 1);
        FadingLaw { m }
    }

    /// Sum of `m` unit exponentials scaled by `1/m`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut s = 0.0;
        for _ in 0..self.m {
            let e: f64 = rng.sample(Exp1);
            s += e;
        }
        s / self.m as f64
    }

    pub fn cdf(&self, x: f64) -> f64 {
        gamma_cdf_int(self.m, x)
    }
}

/// CDF of Gamma(m, m) for integer m.
pub fn gamma_cdf_int(m: u32, x: f64) -> f64 {
    gamma_p_int(m as u64, m as f64 * x)
}

/// Deterministic part of a link: transmit power, both antenna gains,
/// distance and the LoS/NLoS path-loss parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub tx_power: f64,
    pub tx_gain: f64,
    pub rx_gain: f64,
    pub distance: f64,
    pub alpha: f64,
    pub eta: f64,
}

impl LinkBudget {
    /// BS to ground UE; always NLoS.
    pub fn bs_to_ue(cfg: &NetworkConfig, gain: f64, distance: f64) -> Self {
        LinkBudget {
            tx_power: cfg.p_b,
            tx_gain: gain,
            rx_gain: 1.0,
            distance,
            alpha: cfg.alpha_nlos,
            eta: cfg.env.eta_nlos(),
        }
    }

    /// BS to UAV backhaul; always LoS.
    pub fn bs_to_uav(cfg: &NetworkConfig, g_bs: f64, g_uav: f64, distance: f64) -> Self {
        LinkBudget {
            tx_power: cfg.p_b,
            tx_gain: g_bs,
            rx_gain: g_uav,
            distance,
            alpha: cfg.alpha_los,
            eta: cfg.env.eta_los(),
        }
    }

    /// UAV to UE access link with the given condition.
    pub fn uav_to_ue(
        cfg: &NetworkConfig,
        gain: f64,
        distance: f64,
        cond: crate::spatial::CondLabel,
    ) -> Self {
        LinkBudget {
            tx_power: cfg.p_d,
            tx_gain: gain,
            rx_gain: 1.0,
            distance,
            alpha: cfg.alpha(cond),
            eta: cfg.eta(cond),
        }
    }
}

/// Fading-averaged received power `P Gt Gr r^-α / η`.
pub fn mean_received_power(b: &LinkBudget) -> f64 {
    b.tx_power * b.tx_gain * b.rx_gain * b.distance.powf(-b.alpha) / b.eta
}
