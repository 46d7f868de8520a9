//! Laplace transforms of the interference at the typical UE and their
//! derivatives in `s`.
//!
//! Every factor has the form `exp(-∫ [1 - (1 + sκ)^{-m}] dμ)` for a gain and
//! path-loss kernel `κ` and an intensity measure `μ` outside the exclusion
//! zone. With `g(s)` the log-transform (noise included as `-s N0`), the
//! derivatives are
//!
//! `g^{(j)}(s) = ∫ (-κ)^j (m)_j (1 + sκ)^{-m-j} dμ - N0 1(j = 1)`
//!
//! and `L^{(k)} = L · B_k(g', ..., g^{(k)})` through the complete Bell
//! polynomials, evaluated by the usual recurrence.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Mutex;

use crate::antenna::{gain_for_link, Link, UlaParams};
use crate::config::NetworkConfig;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_vec, integrate_vec_mapped};
use crate::spatial::{CondLabel, ServingGeometry};
use crate::special::{choose, rising};

/// Radius of the ball around the UE that contains no `q1` interferer when the
/// serving UAV has condition `q2` and sits at distance `r`.
pub fn exclusion_radius(q1: CondLabel, q2: CondLabel, r: f64, cfg: &NetworkConfig) -> f64 {
    if q1 == q2 {
        return r;
    }
    let (a1, a2) = (cfg.alpha(q1), cfg.alpha(q2));
    (cfg.eta(q2) / cfg.eta(q1)).powf(1.0 / a1) * r.powf(a2 / a1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExclusionSpec {
    pub q1: CondLabel,
    pub q2: CondLabel,
    pub radius: f64,
}

impl ExclusionSpec {
    pub fn new(q1: CondLabel, q2: CondLabel, r: f64, cfg: &NetworkConfig) -> Self {
        ExclusionSpec {
            q1,
            q2,
            radius: exclusion_radius(q1, q2, r, cfg),
        }
    }
}

/// Relative accuracy of the exponent integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceTol {
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for LaplaceTol {
    fn default() -> Self {
        LaplaceTol {
            rel: 1e-8,
            max_intervals: 200,
        }
    }
}

/// Writes the integrand vector for one interferer location: for each `s`,
/// orders `0..=jmax`, with `w` the intensity weight and `kappa` the kernel.
#[inline]
fn kernel_terms(s: &[f64], jmax: usize, m: u32, w: f64, kappa: f64, out: &mut [f64]) {
    let stride = jmax + 1;
    let mf = m as f64;
    for (i, &si) in s.iter().enumerate() {
        let o = &mut out[i * stride..(i + 1) * stride];
        if w == 0.0 || kappa == 0.0 {
            o.fill(0.0);
            continue;
        }
        let x = si * kappa;
        let l1p = x.ln_1p();
        o[0] = w * -(-mf * l1p).exp_m1();
        if jmax > 0 {
            let base = (-mf * l1p).exp();
            let inv = 1.0 / (1.0 + x);
            let mut pow = base;
            let mut kj = 1.0;
            for j in 1..=jmax {
                pow *= inv;
                kj *= -kappa;
                o[j] = w * kj * rising(m, j) * pow;
            }
        }
    }
}

/// The three interference sources seen by the UE, plus noise.
#[derive(Debug)]
pub struct LaplaceEvaluator {
    cfg: NetworkConfig,
    ula: UlaParams,
    /// Horizontal distance of the serving BS; interfering BSs lie beyond.
    u_b0: f64,
    /// Exclusion radii for LoS and NLoS UAV interferers.
    r_ex: [f64; 2],
    n0: f64,
    /// Which sources are active: BS, LoS UAVs, NLoS UAVs.
    sources: [bool; 3],
    /// Horizontal radius beyond which there are no interferers.
    window: f64,
    pub tol: LaplaceTol,
    cache: Mutex<HashMap<(u64, usize), Vec<f64>>>,
}

impl Clone for LaplaceEvaluator {
    fn clone(&self) -> Self {
        LaplaceEvaluator {
            cfg: self.cfg.clone(),
            ula: self.ula,
            u_b0: self.u_b0,
            r_ex: self.r_ex,
            n0: self.n0,
            sources: self.sources,
            window: self.window,
            tol: self.tol,
            cache: Mutex::new(HashMap::new()),
        }
    }
}

impl LaplaceEvaluator {
    /// Evaluator for the UE served by `geom`; includes noise.
    pub fn new(cfg: &NetworkConfig, geom: &ServingGeometry) -> Self {
        Self::from_parts(cfg, geom.u_b0(cfg), geom.r_d0, geom.cond)
    }

    pub fn from_parts(cfg: &NetworkConfig, u_b0: f64, r_d0: f64, q2: CondLabel) -> Self {
        LaplaceEvaluator {
            cfg: cfg.clone(),
            ula: UlaParams::from_config(cfg),
            u_b0,
            r_ex: [
                exclusion_radius(CondLabel::Los, q2, r_d0, cfg),
                exclusion_radius(CondLabel::Nlos, q2, r_d0, cfg),
            ],
            n0: cfg.n0,
            sources: [true; 3],
            window: f64::INFINITY,
            tol: LaplaceTol::default(),
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// Only interfering BSs beyond `u_b0`; no noise.
    pub fn bs_only(cfg: &NetworkConfig, u_b0: f64) -> Self {
        let mut e = Self::from_parts(cfg, u_b0, cfg.h_d_min, CondLabel::Los);
        e.sources = [true, false, false];
        e.n0 = 0.0;
        e
    }

    /// Only `q1` UAVs outside the exclusion radius set by a `q2` server at
    /// `r_d0`; no noise.
    pub fn uav_only(cfg: &NetworkConfig, q1: CondLabel, q2: CondLabel, r_d0: f64) -> Self {
        let mut e = Self::from_parts(cfg, 0.0, r_d0, q2);
        e.sources = [false, q1 == CondLabel::Los, q1 == CondLabel::Nlos];
        e.n0 = 0.0;
        e
    }

    pub fn with_noise(mut self, n0: f64) -> Self {
        self.n0 = n0;
        self
    }

    /// Restricts the interferers to a disc of horizontal radius `radius`
    /// around the UE, matching a simulation window.
    pub fn with_window(mut self, radius: f64) -> Self {
        self.window = radius;
        self.cache.lock().expect("cache lock").clear();
        self
    }

    pub fn with_tol(mut self, tol: LaplaceTol) -> Self {
        self.tol = tol;
        self
    }

    pub fn noise(&self) -> f64 {
        self.n0
    }

    pub fn max_order(&self) -> usize {
        2 * self.cfg.m as usize
    }

    fn bs_part(&self, s: &[f64], jmax: usize, out: &mut [f64]) {
        let cfg = &self.cfg;
        let n = s.len() * (jmax + 1);
        let hb = cfg.h_b;
        let m = cfg.m;
        let coef = cfg.p_b / (m as f64 * cfg.env.eta_nlos());
        let w0 = 2.0 * PI * cfg.lambda_b;
        let (v, _) = integrate_vec_mapped(
            |u, o: &mut [f64]| {
                let theta = PI - (u / hb).atan();
                let g = gain_for_link(cfg.bs_antenna_model, Link::BsAccess { theta }, &self.ula);
                let kappa = coef * g * (u * u + hb * hb).powf(-0.5 * cfg.alpha_nlos);
                kernel_terms(s, jmax, m, w0 * u, kappa, o);
            },
            n,
            self.u_b0,
            self.window,
            self.u_b0.max(hb),
            &[f64::MIN_POSITIVE],
            self.tol.rel,
            self.tol.max_intervals,
        );
        for (o, x) in out.iter_mut().zip(v) {
            *o += x;
        }
    }

    fn uav_part(&self, q1: CondLabel, s: &[f64], jmax: usize, out: &mut [f64]) {
        let cfg = &self.cfg;
        let n = s.len() * (jmax + 1);
        let (hm, hmx) = (cfg.h_d_min, cfg.h_d_max);
        let rex = self.r_ex[q1 as usize];
        let m = cfg.m;
        let alpha = cfg.alpha(q1);
        let coef = cfg.p_d / (m as f64 * cfg.eta(q1));
        let w0 = 2.0 * PI * cfg.lambda_d;
        let tol = self.tol;
        let inner = |z: f64, o: &mut [f64]| {
            let u0 = (rex * rex - z * z).max(0.0).sqrt();
            let (v, _) = integrate_vec_mapped(
                |u, oo: &mut [f64]| {
                    let d2 = u * u + z * z;
                    let d = d2.sqrt();
                    let zenith = u.atan2(z);
                    let g = gain_for_link(cfg.bs_antenna_model, Link::UavAccess { zenith }, &self.ula);
                    let p = q1.prob_cos(z / d, cfg);
                    let kappa = coef * g * d2.powf(-0.5 * alpha);
                    kernel_terms(s, jmax, m, w0 * p * u, kappa, oo);
                },
                n,
                u0,
                self.window,
                u0.max(z),
                &[f64::MIN_POSITIVE],
                tol.rel * 0.1,
                tol.max_intervals,
            );
            o.copy_from_slice(&v);
        };
        // the lower limit has a kink where the exclusion sphere leaves the slab
        let mut cuts = vec![hm];
        if rex > hm && rex < hmx {
            cuts.push(rex);
        }
        cuts.push(hmx);
        for w in cuts.windows(2) {
            let (v, _) = integrate_vec(
                inner,
                n,
                w[0],
                w[1],
                &[f64::MIN_POSITIVE],
                tol.rel,
                tol.max_intervals,
            );
            for (o, x) in out.iter_mut().zip(v) {
                *o += x;
            }
        }
    }

    /// Interference exponent integrals `K_j(s)` for all requested `s` and
    /// orders `0..=jmax`, without noise. Layout: `s`-major.
    fn kernel_integrals(&self, s: &[f64], jmax: usize) -> Vec<f64> {
        let mut out = vec![0.0; s.len() * (jmax + 1)];
        if self.sources[0] {
            self.bs_part(s, jmax, &mut out);
        }
        if self.sources[1] {
            self.uav_part(CondLabel::Los, s, jmax, &mut out);
        }
        if self.sources[2] {
            self.uav_part(CondLabel::Nlos, s, jmax, &mut out);
        }
        out
    }

    /// `g^{(j)}(s)`, `j = 0..=jmax`, for every `s`; noise included.
    pub fn log_derivatives(&self, s: &[f64], jmax: usize) -> Result<Vec<Vec<f64>>> {
        if jmax > self.max_order() {
            return Err(Error::DerivativeOrder {
                order: jmax,
                max: self.max_order(),
            });
        }
        // split into cached and missing points
        let mut missing: Vec<f64> = Vec::new();
        {
            let cache = self.cache.lock().expect("cache lock");
            for &x in s {
                if x.is_finite() && !cache.contains_key(&(x.to_bits(), jmax)) && !missing.contains(&x) {
                    missing.push(x);
                }
            }
        }
        if !missing.is_empty() {
            let k = self.kernel_integrals(&missing, jmax);
            let mut cache = self.cache.lock().expect("cache lock");
            for (i, &x) in missing.iter().enumerate() {
                let mut g: Vec<f64> = k[i * (jmax + 1)..(i + 1) * (jmax + 1)].to_vec();
                g[0] = -g[0] - x * self.n0;
                if jmax >= 1 {
                    g[1] -= self.n0;
                }
                cache.insert((x.to_bits(), jmax), g);
            }
        }
        let cache = self.cache.lock().expect("cache lock");
        Ok(s.iter()
            .map(|&x| {
                if x.is_finite() {
                    cache[&(x.to_bits(), jmax)].clone()
                } else {
                    let mut g = vec![0.0; jmax + 1];
                    g[0] = f64::NEG_INFINITY;
                    g
                }
            })
            .collect())
    }

    /// `L^{(k)}(s)`, `k = 0..=kmax`, for every `s`.
    pub fn derivatives(&self, s: &[f64], kmax: usize) -> Result<Vec<Vec<f64>>> {
        let g = self.log_derivatives(s, kmax)?;
        Ok(g.iter().map(|gi| bell_compose(gi)).collect())
    }

    pub fn value(&self, s: f64) -> f64 {
        self.derivatives(&[s], 0).expect("order 0")[0][0]
    }

    /// `d^k/ds^k L(s)`.
    pub fn derivative(&self, k: usize, s: f64) -> Result<f64> {
        Ok(self.derivatives(&[s], k)?[0][k])
    }
}

/// Given `g(s), g'(s), ..., g^{(K)}(s)`, returns `L^{(k)}(s)` for `k <= K`
/// with `L = e^g`.
pub fn bell_compose(g: &[f64]) -> Vec<f64> {
    let kmax = g.len() - 1;
    let l = g[0].exp();
    let mut h = vec![0.0; kmax + 1];
    h[0] = 1.0;
    for n in 0..kmax {
        let mut acc = 0.0;
        for i in 0..=n {
            acc += choose(n as u64, i as u64) * g[i + 1] * h[n - i];
        }
        h[n + 1] = acc;
    }
    h.iter().map(|x| if l == 0.0 { 0.0 } else { l * x }).collect()
}

/// Transform of interference from BSs farther than `u_b0` (horizontal).
pub fn laplace_bs(s: f64, u_b0: f64, cfg: &NetworkConfig) -> f64 {
    LaplaceEvaluator::bs_only(cfg, u_b0).value(s)
}

/// Transform of interference from `q1` UAVs given a `q2` server at `r_d0`.
pub fn laplace_uav(s: f64, q1: CondLabel, q2: CondLabel, r_d0: f64, cfg: &NetworkConfig) -> f64 {
    LaplaceEvaluator::uav_only(cfg, q1, q2, r_d0).value(s)
}

/// `e^{-s N0}` times the transforms of all three interference sources.
pub fn laplace_total(s: f64, geom: &ServingGeometry, cfg: &NetworkConfig) -> f64 {
    LaplaceEvaluator::new(cfg, geom).value(s)
}
