//! Distance and angle laws of the closest and serving nodes.
//!
//! UAVs form a PPP of density λD in the slab `h_d_min <= z <= h_d_max`,
//! independently marked LoS with probability `p_los(θ)`. Angles are zenith
//! angles seen from the typical UE at the origin. Integrals over the zenith
//! angle are carried out in `u = cos θ`, where the slab boundaries are simple.

use std::f64::consts::PI;

use rand::Rng;

use crate::channel::p_los_from_elevation;
use crate::config::NetworkConfig;
use crate::error::{Error, Result};
use crate::laplace::exclusion_radius;
use crate::quadrature::{integrate, integrate_semi_inf, Tol};

const BETA_TOL: Tol = Tol {
    abs: 0.0,
    rel: 1e-11,
    max_intervals: 200,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum CondLabel {
    Los,
    Nlos,
}

impl CondLabel {
    pub const BOTH: [CondLabel; 2] = [CondLabel::Los, CondLabel::Nlos];

    pub fn complement(self) -> Self {
        match self {
            CondLabel::Los => CondLabel::Nlos,
            CondLabel::Nlos => CondLabel::Los,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CondLabel::Los => "los",
            CondLabel::Nlos => "nlos",
        }
    }

    /// Probability of this condition at zenith angle `theta`.
    pub fn prob(self, theta: f64, cfg: &NetworkConfig) -> f64 {
        self.prob_cos(theta.cos(), cfg)
    }

    /// Same, as a function of `u = cos θ = sin(elevation)`.
    #[inline]
    pub fn prob_cos(self, u: f64, cfg: &NetworkConfig) -> f64 {
        let pl = p_los_from_elevation(u.clamp(-1.0, 1.0).asin(), &cfg.env);
        match self {
            CondLabel::Los => pl,
            CondLabel::Nlos => 1.0 - pl,
        }
    }
}

/// Largest zenith angle at which a UAV at distance `r` can sit: `acos(hm/r)`.
pub fn theta_upper(r: f64, cfg: &NetworkConfig) -> f64 {
    (cfg.h_d_min / r).min(1.0).acos()
}

/// Smallest such angle: 0 inside the slab height, `acos(hM/r)` beyond it.
pub fn theta_lower(r: f64, cfg: &NetworkConfig) -> f64 {
    (cfg.h_d_max / r).min(1.0).acos()
}

/// `(u_lo, u_hi)`: range of `cos θ` on the sphere of radius `r` inside the slab.
pub fn cos_band(r: f64, cfg: &NetworkConfig) -> (f64, f64) {
    ((cfg.h_d_min / r).min(1.0), (cfg.h_d_max / r).min(1.0))
}

/// Thinned slab volume inside radius `r`, divided by π.
pub fn beta_q(r: f64, q: CondLabel, cfg: &NetworkConfig) -> Result<f64> {
    if !(r >= cfg.h_d_min) {
        return Err(Error::Domain {
            what: "r",
            value: r,
            domain: "[h_d_min, inf)",
        });
    }
    Ok(beta_unchecked(r, q, cfg))
}

pub(crate) fn beta_unchecked(r: f64, q: CondLabel, cfg: &NetworkConfig) -> f64 {
    let (hm, hmx) = (cfg.h_d_min, cfg.h_d_max);
    let (u_lo, u_hi) = cos_band(r, cfg);
    if r <= hm {
        return 0.0;
    }
    let r3 = r * r * r;
    let hm3 = hm * hm * hm;
    // inside the sphere, below h_d_max
    let inner = integrate(
        |u| (r3 - hm3 / (u * u * u)) * q.prob_cos(u, cfg),
        u_lo,
        u_hi,
        BETA_TOL,
    )
    .value;
    // full-height column above the sphere's cut
    let cap = if u_hi < 1.0 {
        let d = hmx * hmx * hmx - hm3;
        integrate(|u| d / (u * u * u) * q.prob_cos(u, cfg), u_hi, 1.0, BETA_TOL).value
    } else {
        0.0
    };
    2.0 / 3.0 * (inner + cap)
}

/// `dβ/dr = 2 r² ∫ p_q sin θ dθ` over the band of the sphere.
pub fn beta_prime(r: f64, q: CondLabel, cfg: &NetworkConfig) -> f64 {
    if r <= cfg.h_d_min {
        return 0.0;
    }
    2.0 * r * r * band_mass(r, q, cfg)
}

/// `∫ p_q(θ) sin θ dθ` over `[θ_lower(r), θ_upper(r)]`.
pub fn band_mass(r: f64, q: CondLabel, cfg: &NetworkConfig) -> f64 {
    let (u_lo, u_hi) = cos_band(r, cfg);
    if u_hi <= u_lo {
        return 0.0;
    }
    integrate(|u| q.prob_cos(u, cfg), u_lo, u_hi, BETA_TOL).value
}

/// Distance to the nearest BS (3D, BSs at height `h_b`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosestBsLaw {
    pub lambda: f64,
    pub h: f64,
}

impl ClosestBsLaw {
    pub fn new(cfg: &NetworkConfig) -> Self {
        ClosestBsLaw {
            lambda: cfg.lambda_b,
            h: cfg.h_b,
        }
    }

    pub fn cdf(&self, r: f64) -> f64 {
        if r <= self.h {
            return 0.0;
        }
        -(-PI * self.lambda * (r * r - self.h * self.h)).exp_m1()
    }

    pub fn pdf(&self, r: f64) -> f64 {
        if r < self.h {
            return 0.0;
        }
        2.0 * PI * self.lambda * r * (-PI * self.lambda * (r * r - self.h * self.h)).exp()
    }

    pub fn quantile(&self, p: f64) -> f64 {
        (self.h * self.h - (-p).ln_1p() / (PI * self.lambda)).sqrt()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }
}

/// Distance to the nearest UAV with condition `q`.
#[derive(Debug, Clone)]
pub struct ClosestUavLaw {
    pub q: CondLabel,
    cfg: NetworkConfig,
}

impl ClosestUavLaw {
    pub fn new(q: CondLabel, cfg: &NetworkConfig) -> Self {
        ClosestUavLaw {
            q,
            cfg: cfg.clone(),
        }
    }

    pub fn beta(&self, r: f64) -> f64 {
        beta_unchecked(r.max(self.cfg.h_d_min), self.q, &self.cfg)
    }

    pub fn cdf(&self, r: f64) -> f64 {
        if r <= self.cfg.h_d_min {
            return 0.0;
        }
        -(-PI * self.cfg.lambda_d * self.beta(r)).exp_m1()
    }

    pub fn pdf(&self, r: f64) -> f64 {
        if r <= self.cfg.h_d_min {
            return 0.0;
        }
        PI * self.cfg.lambda_d * beta_prime(r, self.q, &self.cfg) * (-PI * self.cfg.lambda_d * self.beta(r)).exp()
    }

    /// Inverse cdf by safeguarded Newton iteration on β.
    pub fn quantile(&self, p: f64) -> f64 {
        let target = -(-p).ln_1p() / (PI * self.cfg.lambda_d);
        invert_beta(target, self.q, &self.cfg)
    }
}

/// Smallest `r` with `β_q(r) = target`.
pub fn invert_beta(target: f64, q: CondLabel, cfg: &NetworkConfig) -> f64 {
    let hm = cfg.h_d_min;
    if target <= 0.0 {
        return hm;
    }
    let f = |r: f64| beta_unchecked(r, q, cfg) - target;
    let mut lo = hm;
    let mut hi = hm.max(1.0) * 2.0;
    while f(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    let mut r = 0.5 * (lo + hi);
    for _ in 0..100 {
        let v = f(r);
        if v == 0.0 {
            return r;
        }
        if v < 0.0 {
            lo = r;
        } else {
            hi = r;
        }
        let d = beta_prime(r, q, cfg);
        let mut next = r - v / d;
        if !(next > lo && next < hi) || d <= 0.0 {
            next = 0.5 * (lo + hi);
        }
        if (next - r).abs() <= 1e-13 * r || hi - lo <= 1e-13 * hi {
            return next;
        }
        r = next;
    }
    r
}

/// Joint density of distance and zenith angle of the closest `q` UAV:
/// `2π λD r² p_q(θ) sin θ e^{-π λD β_q(r)}` on the slab band.
///
/// Given the distance, the nearest point is distributed over the sphere
/// section in proportion to the thinned intensity, so the conditional law of
/// θ carries the factor `p_q(θ)`.
pub fn closest_uav_joint_pdf(r: f64, theta: f64, q: CondLabel, cfg: &NetworkConfig) -> f64 {
    if r <= cfg.h_d_min || theta < theta_lower(r, cfg) || theta > theta_upper(r, cfg) {
        return 0.0;
    }
    let b = beta_unchecked(r, q, cfg);
    2.0 * PI * cfg.lambda_d * r * r * q.prob(theta, cfg) * theta.sin() * (-PI * cfg.lambda_d * b).exp()
}

/// Variant with `cos θ` uniform on the band given the distance, i.e. the
/// radial density times `sin θ / (cos θ_lower - cos θ_upper)`. It equals
/// [`closest_uav_joint_pdf`] only when `p_q` is constant.
pub fn closest_uav_joint_pdf_uniform_cos(
    r: f64,
    theta: f64,
    q: CondLabel,
    cfg: &NetworkConfig,
) -> f64 {
    if r <= cfg.h_d_min || theta < theta_lower(r, cfg) || theta > theta_upper(r, cfg) {
        return 0.0;
    }
    let (u_lo, u_hi) = cos_band(r, cfg);
    ClosestUavLaw::new(q, cfg).pdf(r) * theta.sin() / (u_hi - u_lo)
}

/// Laws of the closest `q` UAV when UAVs fill the half-space `z >= 0`.
#[derive(Debug, Clone)]
pub struct HalfSpaceLaws {
    pub q: CondLabel,
    pub lambda: f64,
    /// `b_q = ∫_0^{π/2} p_q(θ) sin θ dθ`.
    pub b_q: f64,
    cfg: NetworkConfig,
}

impl HalfSpaceLaws {
    pub fn radial_pdf(&self, r: f64) -> f64 {
        if r < 0.0 {
            return 0.0;
        }
        let k = 2.0 / 3.0 * PI * self.lambda * self.b_q;
        3.0 * k * r * r * (-k * r * r * r).exp()
    }

    pub fn radial_cdf(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        -(-2.0 / 3.0 * PI * self.lambda * self.b_q * r.powi(3)).exp_m1()
    }

    pub fn radial_median(&self) -> f64 {
        (std::f64::consts::LN_2 / (2.0 / 3.0 * PI * self.lambda * self.b_q)).cbrt()
    }

    /// `p_q(θ) sin θ / b_q` on `[0, π/2]`.
    pub fn angular_pdf(&self, theta: f64) -> f64 {
        if !(0.0..=PI / 2.0).contains(&theta) {
            return 0.0;
        }
        self.q.prob(theta, &self.cfg) * theta.sin() / self.b_q
    }
}

pub fn halfspace_limit_laws(q: CondLabel, cfg: &NetworkConfig) -> HalfSpaceLaws {
    let b_q = integrate(|u| q.prob_cos(u, cfg), 0.0, 1.0, BETA_TOL).value;
    HalfSpaceLaws {
        q,
        lambda: cfg.lambda_d,
        b_q,
        cfg: cfg.clone(),
    }
}

/// Probability that the nearest-in-mean-power server at distance `r` with
/// condition `q` beats every UAV of the other condition.
pub fn competition_factor(r: f64, q: CondLabel, cfg: &NetworkConfig) -> f64 {
    let qb = q.complement();
    let rex = exclusion_radius(qb, q, r, cfg).max(cfg.h_d_min);
    (-PI * cfg.lambda_d * beta_unchecked(rex, qb, cfg)).exp()
}

fn association_prob(q: CondLabel, cfg: &NetworkConfig) -> f64 {
    let law = ClosestUavLaw::new(q, cfg);
    // the pdf decays on the scale of the median closest distance
    let scale = law.quantile(0.5) - cfg.h_d_min + cfg.h_d_min * 0.1;
    integrate_semi_inf(
        |r| {
            if r <= cfg.h_d_min {
                return 0.0;
            }
            let f = law.pdf(r);
            if f == 0.0 {
                0.0
            } else {
                f * competition_factor(r, q, cfg)
            }
        },
        cfg.h_d_min,
        scale,
        Tol::new(1e-13, 1e-9),
    )
    .value
}

/// Probability of being served by an NLoS UAV.
pub fn association_prob_nlos(cfg: &NetworkConfig) -> f64 {
    association_prob(CondLabel::Nlos, cfg)
}

/// Probability of being served by a LoS UAV, integrated independently rather
/// than as `1 - A_N`.
pub fn association_prob_los(cfg: &NetworkConfig) -> f64 {
    association_prob(CondLabel::Los, cfg)
}

/// Joint law of distance and angle of the serving UAV given its condition.
#[derive(Debug, Clone)]
pub struct ServingUavLaw {
    pub q: CondLabel,
    pub a_q: f64,
    cfg: NetworkConfig,
}

impl ServingUavLaw {
    pub fn new(q: CondLabel, cfg: &NetworkConfig) -> Self {
        ServingUavLaw {
            q,
            a_q: association_prob(q, cfg),
            cfg: cfg.clone(),
        }
    }

    pub fn pdf(&self, r: f64, theta: f64) -> f64 {
        let base = closest_uav_joint_pdf(r, theta, self.q, &self.cfg);
        if base == 0.0 {
            return 0.0;
        }
        base * competition_factor(r, self.q, &self.cfg) / self.a_q
    }
}

impl ServingUavLaw {
    /// Tabulated cdf of the serving distance given condition `q`, on `nodes`
    /// quantiles of the closest-`q` law.
    pub fn radial_cdf_table(&self, nodes: usize) -> RadialCdfTable {
        let closest = ClosestUavLaw::new(self.q, &self.cfg);
        let mut r = vec![self.cfg.h_d_min];
        for i in 1..=nodes {
            let p = (i as f64 / nodes as f64).min(1.0 - 1e-12);
            r.push(closest.quantile(p));
        }
        let mut f = vec![0.0];
        let mut acc = 0.0;
        for w in r.windows(2) {
            acc += integrate(
                |x| closest.pdf(x) * competition_factor(x, self.q, &self.cfg),
                w[0],
                w[1],
                Tol::new(1e-15, 1e-10),
            )
            .value;
            f.push(acc);
        }
        let total = acc;
        if total > 0.0 {
            f.iter_mut().for_each(|v| *v /= total);
        }
        RadialCdfTable { r, f }
    }
}

/// Piecewise-linear cdf.
#[derive(Debug, Clone)]
pub struct RadialCdfTable {
    r: Vec<f64>,
    f: Vec<f64>,
}

impl RadialCdfTable {
    pub fn cdf(&self, x: f64) -> f64 {
        let i = self.r.partition_point(|&v| v <= x);
        if i == 0 {
            return 0.0;
        }
        if i == self.r.len() {
            return 1.0;
        }
        let (r0, r1) = (self.r[i - 1], self.r[i]);
        let t = (x - r0) / (r1 - r0);
        self.f[i - 1] + t * (self.f[i] - self.f[i - 1])
    }
}

/// `P[Θ <= θ | R = r]` for the closest (equally, the serving) `q` UAV.
pub fn angle_cdf_given_r(theta: f64, r: f64, q: CondLabel, cfg: &NetworkConfig) -> f64 {
    let (lo, hi) = cos_band(r, cfg);
    let mass = band_mass(r, q, cfg);
    if mass <= 0.0 {
        return 0.0;
    }
    let u = theta.cos().clamp(lo, hi);
    (integrate(|x| q.prob_cos(x, cfg), u, hi, BETA_TOL).value / mass).clamp(0.0, 1.0)
}

/// Conditioning variables of the coverage integrand.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ServingGeometry {
    pub r_b0: f64,
    pub r_d0: f64,
    pub theta_d0: f64,
    pub phi_b0d0: f64,
    pub cond: CondLabel,
}

impl ServingGeometry {
    /// Horizontal distance of the serving BS.
    pub fn u_b0(&self, cfg: &NetworkConfig) -> f64 {
        (self.r_b0 * self.r_b0 - cfg.h_b * cfg.h_b).max(0.0).sqrt()
    }

    /// Serving BS to serving UAV distance (law of cosines).
    pub fn r_b0d0(&self, cfg: &NetworkConfig) -> f64 {
        let (st, ct) = self.theta_d0.sin_cos();
        let d2 = self.r_b0 * self.r_b0 + self.r_d0 * self.r_d0
            - 2.0 * cfg.h_b * self.r_d0 * ct
            - 2.0 * self.u_b0(cfg) * self.r_d0 * st * self.phi_b0d0.cos();
        d2.max(0.0).sqrt()
    }

    /// Zenith angle of the serving UAV seen from the serving BS.
    pub fn backhaul_zenith(&self, cfg: &NetworkConfig) -> f64 {
        let d = self.r_b0d0(cfg);
        if d == 0.0 {
            return 0.0;
        }
        ((self.r_d0 * self.theta_d0.cos() - cfg.h_b) / d)
            .clamp(-1.0, 1.0)
            .acos()
    }

    /// Zenith angle of the UE seen from the serving BS.
    pub fn bs_access_zenith(&self, cfg: &NetworkConfig) -> f64 {
        PI - (cfg.h_b / self.r_b0).min(1.0).acos()
    }
}

/// Draws θ given the distance of the closest `q` UAV: `cos θ` is proposed
/// uniformly on the band and accepted with probability `p_q / max p_q`.
pub fn sample_closest_angle<R: Rng + ?Sized>(
    r: f64,
    q: CondLabel,
    cfg: &NetworkConfig,
    rng: &mut R,
) -> f64 {
    let (u_lo, u_hi) = cos_band(r, cfg);
    // p_los is monotone in the elevation, so the maximum sits at an endpoint
    let pmax = q.prob_cos(u_lo, cfg).max(q.prob_cos(u_hi, cfg));
    loop {
        let u = u_lo + (u_hi - u_lo) * rng.random::<f64>();
        if rng.random::<f64>() * pmax <= q.prob_cos(u, cfg) {
            return u.acos();
        }
    }
}

/// Draws a serving geometry from its exact law.
///
/// The closest LoS and the closest NLoS UAV are drawn independently (the two
/// thinned processes are independent) and the stronger one in mean received
/// power serves. This yields the condition with probability `A_q` and the
/// distance and angle from the serving joint law without rejection.
pub fn sample_serving_geometry<R: Rng + ?Sized>(cfg: &NetworkConfig, rng: &mut R) -> ServingGeometry {
    let r_b0 = ClosestBsLaw::new(cfg).sample(rng);
    let mut best: Option<(f64, f64, CondLabel, f64)> = None;
    for q in CondLabel::BOTH {
        let r = ClosestUavLaw::new(q, cfg).quantile(rng.random::<f64>());
        let th = sample_closest_angle(r, q, cfg, rng);
        let power = r.powf(-cfg.alpha(q)) / cfg.eta(q);
        if best.is_none_or(|b| power > b.3) {
            best = Some((r, th, q, power));
        }
    }
    let (r_d0, theta_d0, cond, _) = best.expect("two candidates");
    ServingGeometry {
        r_b0,
        r_d0,
        theta_d0,
        phi_b0d0: 2.0 * PI * rng.random::<f64>(),
        cond,
    }
}
