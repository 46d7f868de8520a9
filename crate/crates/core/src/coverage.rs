//! Semi-analytical coverage probability.
//!
//! Conditioned on the serving geometry and the backhaul fading `Z`, the
//! probability of coverage is an expectation over the interference `I` of a
//! ratio-distribution ccdf. Those ccdfs are finite sums of terms
//! `I^k e^{-sI}`, so the expectation becomes a finite sum of Laplace
//! transform derivatives, the `μ` terms below. The remaining expectation
//! over (Z, geometry) is a randomized quasi-Monte Carlo integral.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::antenna::{gain_for_link, Link, UlaParams};
use crate::channel::gamma_cdf_int;
use crate::config::NetworkConfig;
use crate::error::Result;
use crate::laplace::{LaplaceEvaluator, LaplaceTol};
use crate::spatial::{
    association_prob_los, association_prob_nlos, band_mass, competition_factor, cos_band,
    ClosestBsLaw, ClosestUavLaw, CondLabel, ServingGeometry,
};
use crate::special::{choose, ln_fact};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    Af,
    Df,
    InterferenceLimited,
}

impl Protocol {
    pub fn name(&self) -> &'static str {
        match self {
            Protocol::Af => "af",
            Protocol::Df => "df",
            Protocol::InterferenceLimited => "interference_limited",
        }
    }
}

impl std::str::FromStr for Protocol {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "af" => Ok(Protocol::Af),
            "df" => Ok(Protocol::Df),
            "il" | "interference_limited" => Ok(Protocol::InterferenceLimited),
            _ => Err(crate::Error::UnknownName {
                kind: "protocol",
                name: s.to_string(),
            }),
        }
    }
}

/// Arguments of one `μ` term:
/// `x^i y^j / (x+y)^{i+j} · (-r)^k / k! · L^{(k)}(s)`.
/// `i` and `j` may be negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuTerm {
    pub x: f64,
    pub y: f64,
    pub i: i32,
    pub j: i32,
    pub r: f64,
    pub s: f64,
    pub k: usize,
}

/// `L^{(k)}(s)` supplier. Implemented by the Laplace evaluator and, in
/// tests, by transforms of known interference laws.
pub trait LaplaceDerivs {
    fn deriv(&self, k: usize, s: f64) -> f64;
}

impl<F: Fn(usize, f64) -> f64> LaplaceDerivs for F {
    fn deriv(&self, k: usize, s: f64) -> f64 {
        self(k, s)
    }
}

/// Evaluator-backed table of derivatives precomputed for a fixed set of `s`.
pub struct DerivTable {
    s: Vec<f64>,
    d: Vec<Vec<f64>>,
}

impl DerivTable {
    pub fn build(lap: &LaplaceEvaluator, s: &[f64], kmax: usize) -> Result<Self> {
        let mut uniq: Vec<f64> = Vec::with_capacity(s.len());
        for &x in s {
            if !uniq.contains(&x) {
                uniq.push(x);
            }
        }
        let d = lap.derivatives(&uniq, kmax)?;
        Ok(DerivTable { s: uniq, d })
    }
}

impl LaplaceDerivs for DerivTable {
    fn deriv(&self, k: usize, s: f64) -> f64 {
        let i = self
            .s
            .iter()
            .position(|&x| x == s || (x.is_nan() && s.is_nan()))
            .expect("s point was not precomputed");
        self.d[i][k]
    }
}

impl LaplaceDerivs for LaplaceEvaluator {
    fn deriv(&self, k: usize, s: f64) -> f64 {
        self.derivative(k, s).expect("derivative order within range")
    }
}

fn mu_with<L: LaplaceDerivs + ?Sized>(t: &MuTerm, lap: &L) -> f64 {
    let sum = t.x + t.y;
    let (px, py) = (t.x / sum, t.y / sum);
    let pre = px.powi(t.i) * py.powi(t.j);
    if pre == 0.0 {
        return 0.0;
    }
    let d = if t.s.is_finite() { lap.deriv(t.k, t.s) } else { 0.0 };
    if d == 0.0 {
        return 0.0;
    }
    // (-r)^k L^{(k)} / k! has the sign-free form r^k E[I^k e^{-sI}] / k!
    let rk = if t.k == 0 {
        1.0
    } else {
        (t.k as f64 * t.r.ln() - ln_fact(t.k as u64)).exp()
    };
    let sign = if t.k % 2 == 1 { -1.0 } else { 1.0 };
    pre * rk * sign * d
}

/// One `μ` term evaluated against a Laplace evaluator.
pub fn mu(term: &MuTerm, lap: &LaplaceEvaluator) -> Result<f64> {
    if term.k > lap.max_order() {
        return Err(crate::Error::DerivativeOrder {
            order: term.k,
            max: lap.max_order(),
        });
    }
    let table = DerivTable::build(lap, &[term.s], term.k)?;
    Ok(mu_with(term, &table))
}

/// Link coefficients of a serving geometry: the mean received powers of the
/// direct link `a`, the access link `b` and the backhaul `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl LinkCoefficients {
    pub fn new(geom: &ServingGeometry, cfg: &NetworkConfig) -> Self {
        let ula = UlaParams::from_config(cfg);
        let model = cfg.bs_antenna_model;
        let g_b0 = gain_for_link(
            model,
            Link::BsAccess {
                theta: geom.bs_access_zenith(cfg),
            },
            &ula,
        );
        let g_d0 = gain_for_link(model, Link::UavAccess { zenith: geom.theta_d0 }, &ula);
        let gb_bh = gain_for_link(
            model,
            Link::BsBackhaul {
                theta: geom.backhaul_zenith(cfg),
            },
            &ula,
        );
        let gd_bh = gain_for_link(model, Link::UavBackhaul, &ula);
        let q = geom.cond;
        let a = cfg.p_b * g_b0 * geom.r_b0.powf(-cfg.alpha_nlos) / cfg.env.eta_nlos();
        let b = cfg.p_d * g_d0 * geom.r_d0.powf(-cfg.alpha(q)) / cfg.eta(q);
        let d = geom.r_b0d0(cfg).max(1e-9);
        let c = cfg.p_b * gb_bh * gd_bh * d.powf(-cfg.alpha_los) / cfg.env.eta_los();
        // an exact array null would make a ratio degenerate; keep it tiny instead
        LinkCoefficients {
            a: a.max(f64::MIN_POSITIVE),
            b: b.max(f64::MIN_POSITIVE),
            c: c.max(f64::MIN_POSITIVE),
        }
    }
}

/// Laplace evaluation points of the AF sums at threshold `tau`.
fn af_points(tau: f64, a: f64, b: f64, g: f64, m: f64) -> (f64, f64, f64) {
    let s1 = m * tau / a;
    let s2 = (1.0 + g) * m * tau / (b * (1.0 - tau * g));
    let s3 = (a * (1.0 + g) + b) * m * tau / (a * b * (1.0 - tau * (1.0 + g)));
    (s1, s2, s3)
}

fn df_points(tau: f64, a: f64, b: f64, m: f64) -> (f64, f64, f64) {
    (m * tau / a, m * tau / b, (a + b) * m * tau / (a * b * (1.0 - tau)))
}

/// `Σ_{i<m} Σ_{k<=i} C(k+m-1, k) μ(x, y; m, k | s, s; i-k)` with the roles of
/// the powers chosen by `swap`.
fn mu_double<L: LaplaceDerivs + ?Sized>(m: u32, x: f64, y: f64, s: f64, swap: bool, lap: &L) -> f64 {
    let mut acc = 0.0;
    for i in 0..m as i32 {
        for k in 0..=i {
            let (pi, pj) = if swap { (k, m as i32) } else { (m as i32, k) };
            acc += choose((k as u32 + m - 1) as u64, k as u64)
                * mu_with(
                    &MuTerm {
                        x,
                        y,
                        i: pi,
                        j: pj,
                        r: s,
                        s,
                        k: (i - k) as usize,
                    },
                    lap,
                );
        }
    }
    acc
}

/// The `s3` part shared by both protocols: the single sum with both power
/// orderings minus the two cross sums. `(ax, by)` are the scaled powers
/// appearing in the first and second cross sums.
#[allow(clippy::too_many_arguments)]
fn mu_seam<L: LaplaceDerivs + ?Sized>(
    m: u32,
    a_eff: f64,
    b: f64,
    s3: f64,
    cross1: (f64, f64, f64, f64),
    cross2: (f64, f64, f64, f64),
    lap: &L,
) -> f64 {
    let mi = m as i32;
    let mut acc = 0.0;
    for i in 0..mi {
        let c = choose((i + mi - 1) as u64, i as u64);
        for j in 0..(i + mi) {
            let t1 = MuTerm {
                x: a_eff,
                y: b,
                i: mi,
                j: i,
                r: s3,
                s: s3,
                k: j as usize,
            };
            let t2 = MuTerm { i, j: mi, ..t1 };
            acc += c * (mu_with(&t1, lap) + mu_with(&t2, lap));
        }
    }
    // cross sums: (x, y, r, ratio) for each
    let (x1, y1, r1, f1) = cross1;
    let (x2, y2, r2, f2) = cross2;
    for i in 0..mi {
        for k in 0..=i {
            let ck = choose((k + mi - 1) as u64, k as u64);
            for j in 0..(k + mi) {
                let cj = choose((j + i - k) as u64, j as u64);
                let order = (j + i - k) as usize;
                let ta = MuTerm {
                    x: x1,
                    y: y1,
                    i: mi,
                    j: k - j,
                    r: r1,
                    s: s3,
                    k: order,
                };
                let tb = MuTerm {
                    x: x2,
                    y: y2,
                    i: k - j,
                    j: mi,
                    r: r2,
                    s: s3,
                    k: order,
                };
                acc -= ck
                    * cj
                    * (f1.powi(j) * mu_with(&ta, lap) + f2.powi(j) * mu_with(&tb, lap));
            }
        }
    }
    acc
}

/// AF conditional coverage `E_I[1 - F_{T1,T3}(τ, τ)]` for link
/// coefficients and `g = N0 / (cZ)`.
pub fn w_af<L: LaplaceDerivs + ?Sized>(tau: f64, a: f64, b: f64, g: f64, m: u32, lap: &L) -> f64 {
    if tau <= 0.0 {
        return 1.0;
    }
    let mf = m as f64;
    let (s1, s2, s3) = af_points(tau, a, b, g, mf);
    let w1 = mu_double(m, a, b * tau, s1, false, lap);
    if g > 0.0 && tau * g >= 1.0 {
        return w1;
    }
    let a2 = a * tau * (1.0 + g);
    let b2 = b * (1.0 - tau * g);
    let w2 = w1 + mu_double(m, a2, b2, s2, true, lap);
    let tg = tau * (1.0 + g);
    if tg >= 1.0 {
        return w2;
    }
    w2 + mu_seam(
        m,
        a * (1.0 + g),
        b,
        s3,
        (a, b * tau, s1, tg / (1.0 - tg)),
        (a2, b2, s2, tau / (1.0 - tg)),
        lap,
    )
}

/// DF conditional coverage `V1 + (1 - V0)(V2 + V3 1(τ < 1))`. `v0` is the
/// backhaul outage probability `P[cZ/N0 < τ]`.
pub fn w_df<L: LaplaceDerivs + ?Sized>(tau: f64, a: f64, b: f64, v0: f64, m: u32, lap: &L) -> f64 {
    if tau <= 0.0 {
        return 1.0;
    }
    let mf = m as f64;
    let (s1, s2, s3) = df_points(tau, a, b, mf);
    let v1 = mu_double(m, a, b * tau, s1, false, lap);
    let v2 = mu_double(m, a * tau, b, s2, true, lap);
    let v3 = if tau < 1.0 {
        let f = tau / (1.0 - tau);
        mu_seam(m, a, b, s3, (a, b * tau, s1, f), (a * tau, b, s2, f), lap)
    } else {
        0.0
    };
    v1 + (1.0 - v0) * (v2 + v3)
}

/// Backhaul outage `P[cZ/N0 < τ]`.
pub fn backhaul_outage(tau: f64, c: f64, n0: f64, m: u32) -> f64 {
    if n0 == 0.0 {
        return 0.0;
    }
    gamma_cdf_int(m, n0 * tau / c)
}

/// `W` for the AF protocol at one geometry and backhaul fading `z`.
pub fn w_terms_af(
    tau: f64,
    geom: &ServingGeometry,
    z: f64,
    cfg: &NetworkConfig,
    lap: &LaplaceEvaluator,
) -> Result<f64> {
    let lc = LinkCoefficients::new(geom, cfg);
    let g = lap.noise() / (lc.c * z);
    let (s1, s2, s3) = af_points(tau, lc.a, lc.b, g, cfg.m as f64);
    let table = DerivTable::build(lap, &[s1, s2, s3], 2 * cfg.m as usize - 2)?;
    Ok(w_af(tau, lc.a, lc.b, g, cfg.m, &table))
}

/// `W` for the DF protocol at one geometry.
pub fn v_terms_df(
    tau: f64,
    geom: &ServingGeometry,
    cfg: &NetworkConfig,
    lap: &LaplaceEvaluator,
) -> Result<f64> {
    let lc = LinkCoefficients::new(geom, cfg);
    let v0 = backhaul_outage(tau, lc.c, lap.noise(), cfg.m);
    let (s1, s2, s3) = df_points(tau, lc.a, lc.b, cfg.m as f64);
    let table = DerivTable::build(lap, &[s1, s2, s3], 2 * cfg.m as usize - 2)?;
    Ok(w_df(tau, lc.a, lc.b, v0, cfg.m, &table))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageRequest {
    pub cfg: NetworkConfig,
    pub protocol: Protocol,
    pub tau_grid: Vec<f64>,
    /// Quasi-random geometry samples per channel condition.
    pub samples: usize,
    /// Largest acceptable standard error.
    pub tolerance: f64,
    pub seed: u32,
    pub laplace_tol: LaplaceTol,
}

impl CoverageRequest {
    pub fn new(cfg: NetworkConfig, protocol: Protocol, tau_grid: Vec<f64>) -> Self {
        CoverageRequest {
            cfg,
            protocol,
            tau_grid,
            samples: 20_000,
            tolerance: 0.01,
            seed: 0,
            laplace_tol: LaplaceTol {
                rel: 1e-6,
                max_intervals: 100,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoveragePoint {
    pub tau: f64,
    pub p_cov: f64,
    /// `A_L · P_cov,L`.
    pub los_part: f64,
    /// `A_N · P_cov,N`.
    pub nlos_part: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageResult {
    pub protocol: Protocol,
    pub points: Vec<CoveragePoint>,
    pub a_los: f64,
    pub a_nlos: f64,
    pub samples: usize,
    /// False when some point's standard error exceeds the tolerance.
    pub converged: bool,
}

/// One quasi-random draw of the conditioning variables for condition `q`,
/// with its importance weight. The weight's mean is `A_q`.
#[derive(Debug, Clone, Copy)]
pub struct WeightedGeometry {
    pub geom: ServingGeometry,
    pub z: f64,
    pub weight: f64,
}

/// Maps a point of the unit cube to a serving geometry of condition `q`.
///
/// The distance follows the closest-`q` law by inversion, `cos θ` is uniform
/// on its band and the weight restores the angular density `∝ p_q sin θ` and
/// the probability that no UAV of the other condition is stronger.
pub fn map_sample(u: &[f64], q: CondLabel, cfg: &NetworkConfig) -> WeightedGeometry {
    let r_b0 = ClosestBsLaw::new(cfg).quantile(u[0]);
    let r = ClosestUavLaw::new(q, cfg).quantile(u[1]);
    let (lo, hi) = cos_band(r, cfg);
    let ct = lo + (hi - lo) * u[2];
    let theta = ct.clamp(-1.0, 1.0).acos();
    let mass = band_mass(r, q, cfg);
    let w_angle = if mass > 0.0 {
        q.prob_cos(ct, cfg) * (hi - lo) / mass
    } else {
        1.0
    };
    let weight = w_angle * competition_factor(r, q, cfg);
    let m = cfg.m as usize;
    let z = -u[4..4 + m].iter().map(|x| x.ln()).sum::<f64>() / m as f64;
    WeightedGeometry {
        geom: ServingGeometry {
            r_b0,
            r_d0: r,
            theta_d0: theta,
            phi_b0d0: 2.0 * PI * u[3],
            cond: q,
        },
        z,
        weight,
    }
}

/// Owen-scrambled Sobol point `i` in `dims` dimensions, strictly inside (0,1).
pub fn qmc_point(i: usize, dims: usize, seed: u32) -> Vec<f64> {
    let block = (i >> 16) as u32;
    let idx = (i & 0xffff) as u32;
    let s = seed.wrapping_add(block.wrapping_mul(0x9e37_79b9));
    (0..dims)
        .map(|d| {
            let v = sobol_burley::sample(idx, d as u32, s) as f64;
            (v + 0.5f64.powi(25)).min(1.0 - 0.5f64.powi(25))
        })
        .collect()
}

/// Per-sample conditional coverage for each requested protocol and τ.
fn sample_values(
    wg: &WeightedGeometry,
    cfg: &NetworkConfig,
    protocols: &[Protocol],
    taus: &[f64],
    tol: LaplaceTol,
) -> Result<Vec<f64>> {
    let lc = LinkCoefficients::new(&wg.geom, cfg);
    let lap = LaplaceEvaluator::new(cfg, &wg.geom).with_tol(tol);
    let lap0 = LaplaceEvaluator::new(cfg, &wg.geom).with_noise(0.0).with_tol(tol);
    let mf = cfg.m as f64;
    let kmax = 2 * cfg.m as usize - 2;
    let mut pts = Vec::new();
    let mut pts0 = Vec::new();
    let g = cfg.n0 / (lc.c * wg.z);
    for p in protocols {
        for &t in taus {
            match p {
                Protocol::Af => {
                    let (a, b, c) = af_points(t, lc.a, lc.b, g, mf);
                    pts.extend([a, b, c]);
                }
                Protocol::Df => {
                    let (a, b, c) = df_points(t, lc.a, lc.b, mf);
                    pts.extend([a, b, c]);
                }
                Protocol::InterferenceLimited => {
                    let (a, b, c) = df_points(t, lc.a, lc.b, mf);
                    pts0.extend([a, b, c]);
                }
            }
        }
    }
    let keep = |v: &mut Vec<f64>| v.retain(|x| x.is_finite() && *x >= 0.0);
    keep(&mut pts);
    keep(&mut pts0);
    let table = DerivTable::build(&lap, &pts, kmax)?;
    let table0 = DerivTable::build(&lap0, &pts0, kmax)?;
    let mut out = Vec::with_capacity(protocols.len() * taus.len());
    for p in protocols {
        for &t in taus {
            let w = match p {
                Protocol::Af => w_af(t, lc.a, lc.b, g, cfg.m, &table),
                Protocol::Df => {
                    let v0 = backhaul_outage(t, lc.c, cfg.n0, cfg.m);
                    w_df(t, lc.a, lc.b, v0, cfg.m, &table)
                }
                Protocol::InterferenceLimited => w_df(t, lc.a, lc.b, 0.0, cfg.m, &table0),
            };
            out.push(w.clamp(0.0, 1.0));
        }
    }
    Ok(out)
}

/// Thresholds must be positive, finite and sorted ascending.
pub fn check_tau_grid(tau_grid: &[f64]) -> Result<()> {
    if tau_grid.is_empty() {
        return Err(crate::Error::EmptyGrid("tau"));
    }
    if tau_grid.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(crate::Error::InvalidInput {
            what: "tau grid",
            reason: "thresholds must be positive and finite".into(),
        });
    }
    if tau_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(crate::Error::InvalidInput {
            what: "tau grid",
            reason: "thresholds must be sorted ascending".into(),
        });
    }
    Ok(())
}

/// Coverage for several protocols from one set of quasi-random samples.
pub fn coverage_multi(
    cfg: &NetworkConfig,
    protocols: &[Protocol],
    tau_grid: &[f64],
    samples: usize,
    tolerance: f64,
    seed: u32,
    tol: LaplaceTol,
) -> Result<Vec<CoverageResult>> {
    cfg.validate().map_err(crate::Error::InvalidConfig)?;
    check_tau_grid(tau_grid)?;
    let dims = 4 + cfg.m as usize;
    let nt = tau_grid.len();
    let np = protocols.len();
    // per condition: (sum, sum of squares) of weighted values, per (protocol, tau)
    let mut parts = Vec::new();
    for (qi, q) in CondLabel::BOTH.into_iter().enumerate() {
        let rows: Vec<Result<Vec<f64>>> = (0..samples)
            .into_par_iter()
            .map(|i| {
                let u = qmc_point(i, dims, seed.wrapping_add(qi as u32 * 7919));
                let wg = map_sample(&u, q, cfg);
                if wg.weight == 0.0 {
                    return Ok(vec![0.0; np * nt]);
                }
                let v = sample_values(&wg, cfg, protocols, tau_grid, tol)?;
                Ok(v.into_iter().map(|x| x * wg.weight).collect())
            })
            .collect();
        let mut sum = vec![0.0; np * nt];
        let mut sq = vec![0.0; np * nt];
        for r in rows {
            let r = r?;
            for (k, x) in r.into_iter().enumerate() {
                sum[k] += x;
                sq[k] += x * x;
            }
        }
        parts.push((sum, sq));
    }
    let n = samples as f64;
    let a_nlos = association_prob_nlos(cfg);
    let a_los = association_prob_los(cfg);
    let mut out = Vec::new();
    for (pi, &p) in protocols.iter().enumerate() {
        let mut points = Vec::new();
        let mut converged = true;
        for (ti, &tau) in tau_grid.iter().enumerate() {
            let k = pi * nt + ti;
            let mut var = 0.0;
            let mut mean = [0.0; 2];
            for (qi, (sum, sq)) in parts.iter().enumerate() {
                let m = sum[k] / n;
                mean[qi] = m;
                let v = (sq[k] / n - m * m).max(0.0) * n / (n - 1.0).max(1.0);
                var += v / n;
            }
            let stderr = var.sqrt();
            if stderr > tolerance {
                converged = false;
            }
            points.push(CoveragePoint {
                tau,
                p_cov: (mean[0] + mean[1]).clamp(0.0, 1.0),
                los_part: mean[0],
                nlos_part: mean[1],
                stderr,
            });
        }
        out.push(CoverageResult {
            protocol: p,
            points,
            a_los,
            a_nlos,
            samples,
            converged,
        });
    }
    Ok(out)
}

/// Coverage probability for the requested protocol over the τ grid.
pub fn coverage(req: &CoverageRequest) -> Result<CoverageResult> {
    let mut v = coverage_multi(
        &req.cfg,
        &[req.protocol],
        &req.tau_grid,
        req.samples,
        req.tolerance,
        req.seed,
        req.laplace_tol,
    )?;
    Ok(v.remove(0))
}

/// Noise-free coverage, identical for AF and DF.
pub fn coverage_interference_limited(req: &CoverageRequest) -> Result<CoverageResult> {
    let r = CoverageRequest {
        protocol: Protocol::InterferenceLimited,
        ..req.clone()
    };
    coverage(&r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio_cdf::{cdf_t1, cdf_t1_t3_joint, cdf_t2, RatioCdfParams};

    /// Transform of a deterministic interference `I0`.
    fn point_mass(i0: f64) -> impl Fn(usize, f64) -> f64 {
        move |k, s| (-i0).powi(k as i32) * (-s * i0).exp()
    }

    #[test]
    fn af_matches_joint_ccdf_for_fixed_interference() {
        for m in 1..=3u32 {
            for &(a, b, i0, g) in &[
                (1.0, 4.0, 2.0, 1.0),
                (2.0, 0.5, 0.3, 0.0),
                (0.7, 1.3, 0.1, 0.2),
                (3.0, 3.0, 1.0, 5.0),
            ] {
                for &tau in &[0.05, 0.3, 0.6, 0.9, 1.5, 4.0] {
                    let w = w_af(tau, a, b, g, m, &point_mass(i0));
                    let f = cdf_t1_t3_joint(tau, &RatioCdfParams::new(a, b, i0, g, m));
                    assert!(
                        (w - (1.0 - f)).abs() < 1e-10,
                        "m={m} a={a} b={b} I={i0} g={g} tau={tau}: {w} vs {}",
                        1.0 - f
                    );
                }
            }
        }
    }

    #[test]
    fn df_matches_ratio_ccdfs_for_fixed_interference() {
        for m in 1..=3u32 {
            for &(a, b, i0, v0) in &[(1.0, 4.0, 2.0, 0.3), (2.0, 0.5, 0.3, 0.0), (0.7, 1.3, 0.1, 0.9)] {
                for &tau in &[0.05, 0.3, 0.9, 1.0, 2.5] {
                    let w = w_df(tau, a, b, v0, m, &point_mass(i0));
                    let p = RatioCdfParams::new(a, b, i0, 0.0, m);
                    let expect = 1.0 - v0 * cdf_t1(tau, &p) - (1.0 - v0) * cdf_t2(tau, &p);
                    assert!((w - expect).abs() < 1e-10, "m={m} tau={tau}: {w} vs {expect}");
                }
            }
        }
    }

    #[test]
    fn mu_basic_cases() {
        let lap = point_mass(0.5);
        let t = MuTerm {
            x: 1.0,
            y: 2.0,
            i: 0,
            j: 0,
            r: 1.0,
            s: 0.7,
            k: 0,
        };
        assert!((mu_with(&t, &lap) - (-0.35f64).exp()).abs() < 1e-15);
        let t0 = MuTerm { x: 0.0, i: 2, ..t };
        assert_eq!(mu_with(&t0, &lap), 0.0);
    }
}
