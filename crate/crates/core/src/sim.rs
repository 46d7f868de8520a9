//! Monte Carlo network simulator.
//!
//! Draws full BS and UAV point patterns in a finite disc around the typical
//! UE, associates by maximum mean received power, draws every fading and
//! evaluates the hybrid AF / DF SINRs directly. Each trial owns a ChaCha
//! stream indexed by the trial number, so results do not depend on the
//! thread schedule.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::Serialize;

use crate::antenna::{
    bs_omni_gain, directional_gain, gain_for_link, DirectionalParams, Link, UlaParams,
};
use crate::channel::FadingLaw;
use crate::config::{AntennaModel, NetworkConfig};
use crate::coverage::Protocol;
use crate::laplace::exclusion_radius;
use crate::ratio_cdf::{af_end_to_end_sinr, df_end_to_end_sinr};
use crate::spatial::CondLabel;

/// Default simulation window: 20 mean BS spacings.
pub fn default_window_radius(cfg: &NetworkConfig) -> f64 {
    20.0 / (PI * cfg.lambda_b).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bs {
    pub pos: [f64; 2],
    /// Boresight (zenith, azimuth) of the uptilted backhaul antenna.
    pub orient: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Uav {
    pub pos: [f64; 3],
    pub cond: CondLabel,
    /// Boresight (zenith, azimuth) of the backhaul antenna.
    pub orient: (f64, f64),
}

impl Uav {
    pub fn dist(&self) -> f64 {
        let [x, y, z] = self.pos;
        (x * x + y * y + z * z).sqrt()
    }

    /// Zenith angle seen from the UE.
    pub fn zenith(&self) -> f64 {
        (self.pos[2] / self.dist()).clamp(-1.0, 1.0).acos()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkRealization {
    pub bs: Vec<Bs>,
    pub uavs: Vec<Uav>,
    pub window_radius: f64,
}

fn uniform_disc<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> [f64; 2] {
    let r = radius * rng.random::<f64>().sqrt();
    let phi = 2.0 * PI * rng.random::<f64>();
    [r * phi.cos(), r * phi.sin()]
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("finite positive mean").sample(rng) as usize
}

/// BS heights are `h_b`; UAVs are uniform in the slab and marked LoS with
/// probability `p_los` of their zenith angle.
pub fn sample_realization<R: Rng + ?Sized>(
    cfg: &NetworkConfig,
    window_radius: f64,
    rng: &mut R,
) -> NetworkRealization {
    let area = PI * window_radius * window_radius;
    let nb = poisson_count(cfg.lambda_b * area, rng);
    let bs = (0..nb)
        .map(|_| Bs {
            pos: uniform_disc(window_radius, rng),
            orient: (
                0.5 * PI * rng.random::<f64>(),
                2.0 * PI * rng.random::<f64>(),
            ),
        })
        .collect();
    let nd = poisson_count(cfg.lambda_d * area * (cfg.h_d_max - cfg.h_d_min), rng);
    let uavs = (0..nd)
        .map(|_| {
            let [x, y] = uniform_disc(window_radius, rng);
            let z = cfg.h_d_min + (cfg.h_d_max - cfg.h_d_min) * rng.random::<f64>();
            let d = (x * x + y * y + z * z).sqrt();
            let los = rng.random::<f64>() < CondLabel::Los.prob_cos(z / d, cfg);
            Uav {
                pos: [x, y, z],
                cond: if los { CondLabel::Los } else { CondLabel::Nlos },
                orient: (
                    0.5 * PI * (1.0 + rng.random::<f64>()),
                    2.0 * PI * rng.random::<f64>(),
                ),
            }
        })
        .collect();
    NetworkRealization {
        bs,
        uavs,
        window_radius,
    }
}

impl NetworkRealization {
    /// The points inside a smaller disc, in their original order. A PPP
    /// restricted to a sub-window is the PPP of that window, so this gives
    /// nested windows driven by common random numbers.
    pub fn restrict(&self, radius: f64) -> NetworkRealization {
        let inside = |x: f64, y: f64| x.hypot(y) <= radius;
        NetworkRealization {
            bs: self.bs.iter().filter(|b| inside(b.pos[0], b.pos[1])).copied().collect(),
            uavs: self.uavs.iter().filter(|u| inside(u.pos[0], u.pos[1])).copied().collect(),
            window_radius: radius.min(self.window_radius),
        }
    }
}

fn bs_dist(b: &Bs, cfg: &NetworkConfig) -> f64 {
    let [x, y] = b.pos;
    (x * x + y * y + cfg.h_b * cfg.h_b).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Association {
    pub bs: usize,
    pub uav: Option<usize>,
    pub cond: Option<CondLabel>,
}

/// Nearest BS and the UAV with the largest `r^{-α_q} / η_q`. `None` when
/// there is no BS.
pub fn associate(real: &NetworkRealization, cfg: &NetworkConfig) -> Option<Association> {
    let bs = real
        .bs
        .iter()
        .enumerate()
        .min_by(|a, b| bs_dist(a.1, cfg).total_cmp(&bs_dist(b.1, cfg)))?
        .0;
    let uav = real
        .uavs
        .iter()
        .enumerate()
        .map(|(i, u)| (i, u.dist().powf(-cfg.alpha(u.cond)) / cfg.eta(u.cond)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|x| x.0);
    Some(Association {
        bs,
        uav,
        cond: uav.map(|i| real.uavs[i].cond),
    })
}

/// How interference at the serving UAV is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BackhaulInterference {
    /// Included for isotropic antennas only.
    #[default]
    Auto,
    Ignore,
    Include,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub sinr_bu: f64,
    pub sinr_du: f64,
    pub sinr_bd: f64,
    pub e2e_af: f64,
    pub e2e_df: f64,
    /// Hybrid SINRs: the better of direct and two-hop.
    pub sinr_af: f64,
    pub sinr_df: f64,
    /// Hybrid SINR with noise removed everywhere.
    pub sinr_il: f64,
    pub cond: Option<CondLabel>,
    pub two_hop_af: bool,
    pub two_hop_df: bool,
}

impl TrialOutcome {
    pub fn sinr(&self, p: Protocol) -> f64 {
        match p {
            Protocol::Af => self.sinr_af,
            Protocol::Df => self.sinr_df,
            Protocol::InterferenceLimited => self.sinr_il,
        }
    }
}

/// Unit vector angles (zenith, azimuth) of `to - from`.
fn direction(from: [f64; 3], to: [f64; 3]) -> (f64, f64, f64) {
    let d = [to[0] - from[0], to[1] - from[1], to[2] - from[2]];
    let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    if n == 0.0 {
        return (0.0, 0.0, 0.0);
    }
    ((d[2] / n).clamp(-1.0, 1.0).acos(), d[1].atan2(d[0]), n)
}

/// Draws every fading of one realization and evaluates the SINRs.
pub fn evaluate_trial<R: Rng + ?Sized>(
    real: &NetworkRealization,
    assoc: &Association,
    cfg: &NetworkConfig,
    backhaul: BackhaulInterference,
    rng: &mut R,
) -> TrialOutcome {
    let ula = UlaParams::from_config(cfg);
    let dir = DirectionalParams::default();
    let model = cfg.bs_antenna_model;
    let fading = FadingLaw::new(cfg.m);

    let access_bs = |b: &Bs| {
        let d = bs_dist(b, cfg);
        let theta = PI - (cfg.h_b / d).min(1.0).acos();
        cfg.p_b * gain_for_link(model, Link::BsAccess { theta }, &ula) * d.powf(-cfg.alpha_nlos)
            / cfg.env.eta_nlos()
    };
    let access_uav = |u: &Uav| {
        let g = gain_for_link(model, Link::UavAccess { zenith: u.zenith() }, &ula);
        cfg.p_d * g * u.dist().powf(-cfg.alpha(u.cond)) / cfg.eta(u.cond)
    };

    // serving-link fadings come first so that nested windows driven by the
    // same stream share them
    let x = fading.sample(rng);
    let (y, z) = match assoc.uav {
        Some(_) => (fading.sample(rng), fading.sample(rng)),
        None => (0.0, 0.0),
    };
    let b0 = &real.bs[assoc.bs];
    let p_b0 = access_bs(b0) * x;
    let mut i_bu = 0.0;
    for (i, b) in real.bs.iter().enumerate() {
        if i != assoc.bs {
            i_bu += access_bs(b) * fading.sample(rng);
        }
    }
    let mut i_du = 0.0;
    for (i, u) in real.uavs.iter().enumerate() {
        if Some(i) != assoc.uav {
            i_du += access_uav(u) * fading.sample(rng);
        }
    }
    let i_u = i_bu + i_du;
    let n0 = cfg.n0;

    let Some(d0_idx) = assoc.uav else {
        let sinr_bu = p_b0 / (i_u + n0);
        return TrialOutcome {
            sinr_bu,
            sinr_du: 0.0,
            sinr_bd: 0.0,
            e2e_af: 0.0,
            e2e_df: 0.0,
            sinr_af: sinr_bu,
            sinr_df: sinr_bu,
            sinr_il: p_b0 / i_u,
            cond: None,
            two_hop_af: false,
            two_hop_df: false,
        };
    };
    let d0 = &real.uavs[d0_idx];
    let p_d0 = access_uav(d0) * y;

    // backhaul
    let b0_pos = [b0.pos[0], b0.pos[1], cfg.h_b];
    let (th_bd, _, r_bd) = direction(b0_pos, d0.pos);
    let g_b0 = gain_for_link(model, Link::BsBackhaul { theta: th_bd }, &ula);
    let g_d0 = gain_for_link(model, Link::UavBackhaul, &ula);
    let p_bd = cfg.p_b * g_b0 * g_d0 * r_bd.max(1e-9).powf(-cfg.alpha_los) / cfg.env.eta_los() * z;

    let include = match backhaul {
        BackhaulInterference::Auto => model == AntennaModel::Isotropic,
        BackhaulInterference::Ignore => false,
        BackhaulInterference::Include => true,
    };
    let mut i_bd_dd = 0.0;
    if include {
        let iso = model == AntennaModel::Isotropic;
        // the serving UAV's backhaul antenna points at its BS
        let (th0, ph0, _) = direction(d0.pos, b0_pos);
        let rx_gain = |from: [f64; 3]| {
            if iso {
                1.0
            } else {
                let (t, p, _) = direction(d0.pos, from);
                directional_gain(t, p, th0, ph0, &dir)
            }
        };
        let k = |g: f64, d: f64| g * d.max(1e-9).powf(-cfg.alpha_los) / cfg.env.eta_los();
        for (i, b) in real.bs.iter().enumerate() {
            if i == assoc.bs {
                continue;
            }
            let pos = [b.pos[0], b.pos[1], cfg.h_b];
            let (t, p, d) = direction(pos, d0.pos);
            let g_tx = match model {
                AntennaModel::Isotropic => 1.0,
                AntennaModel::OmniDowntilt => bs_omni_gain(t, &ula),
                AntennaModel::OmniPlusDirectional => directional_gain(t, p, b.orient.0, b.orient.1, &dir),
            };
            i_bd_dd += cfg.p_b * k(g_tx * rx_gain(pos), d) * fading.sample(rng);
        }
        for (i, u) in real.uavs.iter().enumerate() {
            if i == d0_idx {
                continue;
            }
            let (t, p, d) = direction(u.pos, d0.pos);
            let g_tx = if iso {
                1.0
            } else {
                directional_gain(t, p, u.orient.0, u.orient.1, &dir)
            };
            i_bd_dd += cfg.p_d * k(g_tx * rx_gain(u.pos), d) * fading.sample(rng);
        }
    }

    let sinr_bu = p_b0 / (i_u + p_d0 + n0);
    let sinr_du = p_d0 / (i_u + p_b0 + n0);
    let sinr_bd = p_bd / (i_bd_dd + n0);
    let e2e_af = af_end_to_end_sinr(sinr_bd, sinr_du);
    let e2e_df = df_end_to_end_sinr(sinr_bd, sinr_du);

    let bu0 = p_b0 / (i_u + p_d0);
    let du0 = p_d0 / (i_u + p_b0);
    let bd0 = p_bd / i_bd_dd;
    let sinr_il = bu0.max(df_end_to_end_sinr(bd0, du0));

    TrialOutcome {
        sinr_bu,
        sinr_du,
        sinr_bd,
        e2e_af,
        e2e_df,
        sinr_af: sinr_bu.max(e2e_af),
        sinr_df: sinr_bu.max(e2e_df),
        sinr_il,
        cond: Some(d0.cond),
        two_hop_af: e2e_af > sinr_bu,
        two_hop_df: e2e_df > sinr_bu,
    }
}

/// Geometry reuse across fading draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SimMode {
    /// Fresh geometry and fading in every trial.
    #[default]
    Annealed,
    /// Each geometry is reused for `fadings` consecutive trials.
    Quenched { fadings: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimOptions {
    pub window_radius: Option<f64>,
    pub backhaul: BackhaulInterference,
    pub mode: SimMode,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            window_radius: None,
            backhaul: BackhaulInterference::Auto,
            mode: SimMode::Annealed,
        }
    }
}

/// Random stream for one index.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Realization with at least one BS; returns it with the number of redraws.
fn realization_with_bs<R: Rng + ?Sized>(
    cfg: &NetworkConfig,
    radius: f64,
    rng: &mut R,
) -> (NetworkRealization, Association, usize) {
    let mut redraws = 0;
    loop {
        let real = sample_realization(cfg, radius, rng);
        if let Some(a) = associate(&real, cfg) {
            return (real, a, redraws);
        }
        redraws += 1;
    }
}

/// Trial outcomes in index order, plus the number of empty-BS redraws.
pub fn run_trials(
    cfg: &NetworkConfig,
    n_trials: usize,
    seed: u64,
    opts: &SimOptions,
) -> (Vec<TrialOutcome>, usize) {
    let radius = opts.window_radius.unwrap_or_else(|| default_window_radius(cfg));
    let per = match opts.mode {
        SimMode::Annealed => 1,
        SimMode::Quenched { fadings } => fadings.max(1),
    };
    let n_geom = n_trials.div_ceil(per);
    let chunks: Vec<(Vec<TrialOutcome>, usize)> = (0..n_geom)
        .into_par_iter()
        .map(|gi| {
            let mut rng = stream_rng(seed, gi as u64);
            let (real, assoc, redraws) = realization_with_bs(cfg, radius, &mut rng);
            let count = per.min(n_trials - gi * per);
            let v = (0..count)
                .map(|_| evaluate_trial(&real, &assoc, cfg, opts.backhaul, &mut rng))
                .collect();
            (v, redraws)
        })
        .collect();
    let mut out = Vec::with_capacity(n_trials);
    let mut redraws = 0;
    for (v, r) in chunks {
        out.extend(v);
        redraws += r;
    }
    (out, redraws)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimPoint {
    pub tau: f64,
    pub p_cov: f64,
    pub los_part: f64,
    pub nlos_part: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimCoverage {
    pub protocol: Protocol,
    pub points: Vec<SimPoint>,
    pub trials: usize,
    /// Trials whose window held no UAV (direct link only).
    pub no_uav_trials: usize,
    pub empty_bs_redraws: usize,
    /// Fraction of trials served by an NLoS UAV.
    pub nlos_fraction: f64,
}

/// Empirical coverage with binomial standard errors, for each protocol.
pub fn estimate_coverage(
    cfg: &NetworkConfig,
    protocols: &[Protocol],
    tau_grid: &[f64],
    n_trials: usize,
    seed: u64,
    opts: &SimOptions,
) -> Vec<SimCoverage> {
    let (trials, redraws) = run_trials(cfg, n_trials, seed, opts);
    summarize(&trials, redraws, protocols, tau_grid)
}

/// Coverage curves from already simulated trials.
pub fn summarize(
    trials: &[TrialOutcome],
    redraws: usize,
    protocols: &[Protocol],
    tau_grid: &[f64],
) -> Vec<SimCoverage> {
    let n = trials.len().max(1) as f64;
    let no_uav = trials.iter().filter(|t| t.cond.is_none()).count();
    let nlos = trials
        .iter()
        .filter(|t| t.cond == Some(CondLabel::Nlos))
        .count();
    protocols
        .iter()
        .map(|&p| {
            let points = tau_grid
                .iter()
                .map(|&tau| {
                    let (mut hit, mut los, mut nl) = (0usize, 0usize, 0usize);
                    for t in trials {
                        if t.sinr(p) >= tau {
                            hit += 1;
                            match t.cond {
                                Some(CondLabel::Los) => los += 1,
                                Some(CondLabel::Nlos) => nl += 1,
                                None => {}
                            }
                        }
                    }
                    let pc = hit as f64 / n;
                    SimPoint {
                        tau,
                        p_cov: pc,
                        los_part: los as f64 / n,
                        nlos_part: nl as f64 / n,
                        stderr: (pc * (1.0 - pc) / n).sqrt(),
                    }
                })
                .collect();
            SimCoverage {
                protocol: p,
                points,
                trials: trials.len(),
                no_uav_trials: no_uav,
                empty_bs_redraws: redraws,
                nlos_fraction: nlos as f64 / n,
            }
        })
        .collect()
}

/// Nearest points of one realization, as seen from the UE.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosestSample {
    pub r_b0: Option<f64>,
    /// (distance, zenith) of the closest LoS UAV.
    pub los: Option<(f64, f64)>,
    pub nlos: Option<(f64, f64)>,
    /// (distance, zenith, condition) of the serving UAV.
    pub serving: Option<(f64, f64, CondLabel)>,
}

pub fn closest_points(real: &NetworkRealization, cfg: &NetworkConfig) -> ClosestSample {
    let r_b0 = real
        .bs
        .iter()
        .map(|b| bs_dist(b, cfg))
        .min_by(|a, b| a.total_cmp(b));
    let closest = |q: CondLabel| {
        real.uavs
            .iter()
            .filter(|u| u.cond == q)
            .min_by(|a, b| a.dist().total_cmp(&b.dist()))
            .map(|u| (u.dist(), u.zenith()))
    };
    let serving = associate(real, cfg).and_then(|a| a.uav).map(|i| {
        let u = &real.uavs[i];
        (u.dist(), u.zenith(), u.cond)
    });
    ClosestSample {
        r_b0,
        los: closest(CondLabel::Los),
        nlos: closest(CondLabel::Nlos),
        serving,
    }
}

/// `n` independent closest-point samples.
pub fn sample_closest(cfg: &NetworkConfig, n: usize, seed: u64, window_radius: f64) -> Vec<ClosestSample> {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let real = sample_realization(cfg, window_radius, &mut rng);
            closest_points(&real, cfg)
        })
        .collect()
}

/// Interference at the UE from BSs whose ground distance exceeds `u_b0`.
pub fn sample_bs_interference<R: Rng + ?Sized>(
    cfg: &NetworkConfig,
    u_b0: f64,
    window_radius: f64,
    rng: &mut R,
) -> f64 {
    let ula = UlaParams::from_config(cfg);
    let fading = FadingLaw::new(cfg.m);
    let (r0, r1) = (u_b0, window_radius);
    let n = poisson_count(cfg.lambda_b * PI * (r1 * r1 - r0 * r0), rng);
    let mut acc = 0.0;
    for _ in 0..n {
        let u = (r0 * r0 + (r1 * r1 - r0 * r0) * rng.random::<f64>()).sqrt();
        let d = (u * u + cfg.h_b * cfg.h_b).sqrt();
        let theta = PI - (u / cfg.h_b).atan();
        let g = gain_for_link(cfg.bs_antenna_model, Link::BsAccess { theta }, &ula);
        acc += cfg.p_b * g * d.powf(-cfg.alpha_nlos) / cfg.env.eta_nlos() * fading.sample(rng);
    }
    acc
}

/// Interference at the UE from condition-`q1` UAVs outside the exclusion ball
/// of a condition-`q2` server at distance `r_d0`.
pub fn sample_uav_interference<R: Rng + ?Sized>(
    cfg: &NetworkConfig,
    q1: CondLabel,
    q2: CondLabel,
    r_d0: f64,
    window_radius: f64,
    rng: &mut R,
) -> f64 {
    let ula = UlaParams::from_config(cfg);
    let fading = FadingLaw::new(cfg.m);
    let rex = exclusion_radius(q1, q2, r_d0, cfg);
    let vol = PI * window_radius * window_radius * (cfg.h_d_max - cfg.h_d_min);
    let n = poisson_count(cfg.lambda_d * vol, rng);
    let mut acc = 0.0;
    for _ in 0..n {
        let [x, y] = uniform_disc(window_radius, rng);
        let z = cfg.h_d_min + (cfg.h_d_max - cfg.h_d_min) * rng.random::<f64>();
        let d = (x * x + y * y + z * z).sqrt();
        let keep = rng.random::<f64>() < q1.prob_cos(z / d, cfg);
        if !keep || d < rex {
            continue;
        }
        let zenith = (z / d).acos();
        let g = gain_for_link(cfg.bs_antenna_model, Link::UavAccess { zenith }, &ula);
        acc += cfg.p_d * g * d.powf(-cfg.alpha(q1)) / cfg.eta(q1) * fading.sample(rng);
    }
    acc
}

/// Total conditional interference `I_U` for a fixed serving geometry.
pub fn sample_total_interference<R: Rng + ?Sized>(
    cfg: &NetworkConfig,
    u_b0: f64,
    r_d0: f64,
    q2: CondLabel,
    window_radius: f64,
    rng: &mut R,
) -> f64 {
    sample_bs_interference(cfg, u_b0, window_radius, rng)
        + sample_uav_interference(cfg, CondLabel::Los, q2, r_d0, window_radius, rng)
        + sample_uav_interference(cfg, CondLabel::Nlos, q2, r_d0, window_radius, rng)
}

/// `mean(e^{-s I})` over samples.
pub fn empirical_laplace(samples: &[f64], s: f64) -> f64 {
    samples.iter().map(|&i| (-s * i).exp()).sum::<f64>() / samples.len() as f64
}
