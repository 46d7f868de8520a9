//! Oracle checks: every analytical building block against an independent
//! sampling estimate. Used by the `validate` command and the acceptance
//! suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::FadingLaw;
use crate::config::NetworkConfig;
use crate::coverage::{coverage_multi, CoverageResult, Protocol};
use crate::laplace::{LaplaceEvaluator, LaplaceTol};
use crate::ratio_cdf::{cdf_t1, cdf_t1_t3_joint, cdf_t2, rayleigh_cdfs, RatioCdfParams};
use crate::report::{CheckResult, ValidationReport};
use crate::sim::{
    default_window_radius, empirical_laplace, run_trials, sample_bs_interference, sample_closest,
    sample_uav_interference, stream_rng, summarize, SimCoverage,
    SimOptions, TrialOutcome,
};
use crate::spatial::{
    angle_cdf_given_r, association_prob_nlos, ClosestBsLaw, ClosestUavLaw, CondLabel,
    ServingUavLaw,
};
use crate::stats::{chi_square_uniform_2d, ks_statistic, mean_stderr};

/// Sample sizes of the oracle suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    /// Gamma-ratio Monte Carlo samples per tuple.
    pub ratio_samples: usize,
    /// Random tuples in addition to the fixed one.
    pub ratio_tuples: usize,
    pub rayleigh_tuples: usize,
    pub spatial_realizations: usize,
    pub laplace_samples: usize,
    pub coverage_samples: usize,
    pub coverage_trials: usize,
    pub seed: u64,
}

impl Budget {
    /// Sizes used by the acceptance suite.
    pub fn full() -> Self {
        Budget {
            ratio_samples: 10_000_000,
            ratio_tuples: 10,
            rayleigh_tuples: 1000,
            spatial_realizations: 100_000,
            laplace_samples: 50_000,
            coverage_samples: 20_000,
            coverage_trials: 20_000,
            seed: 1,
        }
    }

    /// A few seconds of work; tolerances are unchanged, so small budgets may
    /// fail on sampling noise alone.
    pub fn quick() -> Self {
        Budget {
            ratio_samples: 200_000,
            ratio_tuples: 2,
            rayleigh_tuples: 200,
            spatial_realizations: 5_000,
            laplace_samples: 12_000,
            coverage_samples: 1_000,
            coverage_trials: 4_000,
            seed: 1,
        }
    }
}

/// Random `(a, b, I, g)` tuples: powers log-uniform on `[0.1, 10]`,
/// interference uniform on `[0, 3]`, `g` log-uniform on `[0.01, 10]`.
pub fn random_tuples(n: usize, seed: u64) -> Vec<(f64, f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let logu = |lo: f64, hi: f64, rng: &mut ChaCha8Rng| {
        (lo.ln() + (hi.ln() - lo.ln()) * rng.random::<f64>()).exp()
    };
    (0..n)
        .map(|_| {
            let a = logu(0.1, 10.0, &mut rng);
            let b = logu(0.1, 10.0, &mut rng);
            let i = 3.0 * rng.random::<f64>();
            let g = logu(0.01, 10.0, &mut rng);
            (a, b, i, g)
        })
        .collect()
}

/// Thresholds for sup-norm comparisons, including the regime seams.
fn ratio_tau_grid(g: f64) -> Vec<f64> {
    let mut t: Vec<f64> = (0..=60).map(|i| 10f64.powf(-2.0 + 4.0 * i as f64 / 60.0)).collect();
    for s in [1.0, 1.0 / g, 1.0 / (1.0 + g)] {
        t.extend([s * 0.999, s, s * 1.001]);
    }
    t.retain(|x| x.is_finite() && *x > 0.0);
    t.sort_by(f64::total_cmp);
    t
}

/// Empirical cdfs of `T1`, `T2` and `max(T1, T3)` at `taus`.
pub fn ratio_mc_cdfs(p: &RatioCdfParams, taus: &[f64], n: usize, seed: u64) -> [Vec<f64>; 3] {
    const CHUNK: usize = 1 << 16;
    let chunks = n.div_ceil(CHUNK);
    let nt = taus.len();
    let counts: Vec<Vec<u64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let fading = FadingLaw::new(p.m);
            // counts of samples falling just above each grid point
            let mut h = vec![0u64; 3 * (nt + 1)];
            let len = CHUNK.min(n - c * CHUNK);
            for _ in 0..len {
                let ax = p.a * fading.sample(&mut rng);
                let by = p.b * fading.sample(&mut rng);
                let i = p.i_plus_n;
                let t1 = ax / (by + i);
                let t2 = ax.max(by) / (ax.min(by) + i);
                let t3 = by / (ax + i + p.g * (ax + by + i));
                for (k, t) in [t1, t2, t1.max(t3)].into_iter().enumerate() {
                    h[k * (nt + 1) + taus.partition_point(|&x| x < t)] += 1;
                }
            }
            h
        })
        .collect();
    let mut tot = vec![0u64; 3 * (nt + 1)];
    for h in counts {
        for (a, b) in tot.iter_mut().zip(h) {
            *a += b;
        }
    }
    let cdf = |k: usize| {
        let mut acc = 0u64;
        (0..nt)
            .map(|j| {
                acc += tot[k * (nt + 1) + j];
                acc as f64 / n as f64
            })
            .collect::<Vec<f64>>()
    };
    [cdf(0), cdf(1), cdf(2)]
}

/// Ratio cdfs against gamma-ratio sampling, sup-norm per cdf and `m`.
pub fn check_ratio_cdfs(budget: &Budget, tol: f64) -> Vec<CheckResult> {
    let mut tuples = vec![(1.0, 4.0, 2.0, 1.0)];
    tuples.extend(random_tuples(budget.ratio_tuples, budget.seed ^ 0x5eed));
    let names = ["cdf_t1", "cdf_t2", "cdf_t1_t3_joint"];
    let mut out = Vec::new();
    for m in [1u32, 2] {
        let mut worst = [0.0f64; 3];
        for (ti, &(a, b, i, g)) in tuples.iter().enumerate() {
            let p = RatioCdfParams::new(a, b, i, g, m);
            let taus = ratio_tau_grid(g);
            let emp = ratio_mc_cdfs(&p, &taus, budget.ratio_samples, budget.seed + 1000 * m as u64 + ti as u64);
            for (j, &t) in taus.iter().enumerate() {
                let exact = [cdf_t1(t, &p), cdf_t2(t, &p), cdf_t1_t3_joint(t, &p)];
                for k in 0..3 {
                    worst[k] = worst[k].max((exact[k] - emp[k][j]).abs());
                }
            }
        }
        for k in 0..3 {
            out.push(CheckResult::at_most(
                format!("{} vs sampling, m={m}", names[k]),
                worst[k],
                tol,
                format!("sup-norm over {} tuples, {} samples each", tuples.len(), budget.ratio_samples),
            ));
        }
    }
    out
}

/// General `m = 1` ratio cdfs against the Rayleigh closed forms.
pub fn check_rayleigh_forms(budget: &Budget) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed ^ 0xface);
    let tuples = random_tuples(budget.rayleigh_tuples, budget.seed ^ 0xbeef);
    let mut worst = 0.0f64;
    for (a, b, i, g) in tuples {
        let tau = 10f64.powf(-2.0 + 4.0 * rng.random::<f64>());
        let p = RatioCdfParams::new(a, b, i, g, 1);
        let (f1, f2, f13) = rayleigh_cdfs(tau, &p);
        worst = worst
            .max((cdf_t1(tau, &p) - f1).abs())
            .max((cdf_t2(tau, &p) - f2).abs())
            .max((cdf_t1_t3_joint(tau, &p) - f13).abs());
    }
    CheckResult::at_most(
        "general ratio cdfs equal Rayleigh forms at m=1",
        worst,
        1e-10,
        format!("{} random tuples", budget.rayleigh_tuples),
    )
}

/// Limits and reductions of the ratio cdfs.
pub fn check_ratio_limits(budget: &Budget) -> Vec<CheckResult> {
    let tuples = random_tuples(50, budget.seed ^ 0x1234);
    let taus: Vec<f64> = (0..=40).map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / 40.0)).collect();
    let (mut at0, mut at_inf, mut g0, mut ginf) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for m in 1..=3u32 {
        for &(a, b, i, g) in &tuples {
            let p = RatioCdfParams::new(a, b, i, g, m);
            for f in [cdf_t1, cdf_t2, cdf_t1_t3_joint] {
                at0 = at0.max(f(0.0, &p).abs());
                at_inf = at_inf.max(1.0 - f(1e9, &p));
            }
            let p0 = RatioCdfParams { g: 0.0, ..p };
            let pinf = RatioCdfParams { g: 1e12, ..p };
            for &t in &taus {
                g0 = g0.max((cdf_t1_t3_joint(t, &p0) - cdf_t2(t, &p0)).abs());
                ginf = ginf.max((cdf_t1_t3_joint(t, &pinf) - cdf_t1(t, &pinf)).abs());
            }
        }
    }
    vec![
        CheckResult::at_most("ratio cdfs vanish at 0", at0, 0.0, ""),
        CheckResult::at_most("ratio cdfs exceed 1-1e-6 at 1e9", at_inf, 1e-6, ""),
        CheckResult::at_most("joint cdf with g=0 equals cdf_t2", g0, 1e-12, ""),
        CheckResult::at_most("joint cdf with g=1e12 equals cdf_t1", ginf, 1e-9, ""),
    ]
}

/// Nearest-neighbour laws and association probability against sampled
/// networks.
pub fn check_spatial_laws(cfg: &NetworkConfig, budget: &Budget, ks_tol: f64, p_min: f64) -> Vec<CheckResult> {
    let n = budget.spatial_realizations;
    let radius = default_window_radius(cfg);
    let samples = sample_closest(cfg, n, budget.seed ^ 0x5a5a, radius);
    let mut out = Vec::new();

    let bs: Vec<f64> = samples.iter().filter_map(|s| s.r_b0).collect();
    let law = ClosestBsLaw::new(cfg);
    out.push(CheckResult::at_most(
        "closest BS distance KS",
        ks_statistic(&bs, |r| law.cdf(r)),
        ks_tol,
        format!("{} realizations", bs.len()),
    ));

    // enough points for a 10 x 10 grid with 20 expected per cell
    let min_joint = 2000;
    for q in CondLabel::BOTH {
        let law = ClosestUavLaw::new(q, cfg);
        let pts: Vec<(f64, f64)> = samples
            .iter()
            .filter_map(|s| if q == CondLabel::Los { s.los } else { s.nlos })
            .collect();
        let r: Vec<f64> = pts.iter().map(|p| p.0).collect();
        // the window may miss a far closest point; condition on seeing one
        let seen = pts.len() as f64 / n as f64;
        out.push(CheckResult::at_most(
            format!("closest {} UAV distance KS", q.name()),
            ks_statistic(&r, |x| law.cdf(x)),
            ks_tol,
            format!("{} of {} realizations held one", pts.len(), n),
        ));
        if pts.len() >= min_joint {
            let pit: Vec<(f64, f64)> = pts
                .par_iter()
                .map(|&(r, th)| (law.cdf(r), angle_cdf_given_r(th, r, q, cfg)))
                .collect();
            let (stat, p) = chi_square_uniform_2d(&pit, 10);
            out.push(CheckResult::at_least(
                format!("closest {} UAV joint distance-angle chi2", q.name()),
                p,
                p_min,
                format!("statistic {stat:.2}, window coverage {seen:.5}"),
            ));
        }

        let served: Vec<(f64, f64)> = samples
            .iter()
            .filter_map(|s| s.serving.filter(|x| x.2 == q).map(|x| (x.0, x.1)))
            .collect();
        if served.len() >= min_joint {
            let table = ServingUavLaw::new(q, cfg).radial_cdf_table(2000);
            let r: Vec<f64> = served.iter().map(|p| p.0).collect();
            out.push(CheckResult::at_most(
                format!("serving {} UAV distance KS", q.name()),
                ks_statistic(&r, |x| table.cdf(x)),
                ks_tol,
                format!("{} realizations", served.len()),
            ));
            let pit: Vec<(f64, f64)> = served
                .par_iter()
                .map(|&(r, th)| (table.cdf(r), angle_cdf_given_r(th, r, q, cfg)))
                .collect();
            let (stat, p) = chi_square_uniform_2d(&pit, 10);
            out.push(CheckResult::at_least(
                format!("serving {} UAV joint distance-angle chi2", q.name()),
                p,
                p_min,
                format!("statistic {stat:.2}"),
            ));
        }
    }

    let with_uav: Vec<CondLabel> = samples.iter().filter_map(|s| s.serving.map(|x| x.2)).collect();
    let freq = with_uav.iter().filter(|&&q| q == CondLabel::Nlos).count() as f64 / with_uav.len().max(1) as f64;
    let a_n = association_prob_nlos(cfg);
    out.push(CheckResult::at_most(
        "NLoS association probability vs frequency",
        (a_n - freq).abs(),
        0.01,
        format!("analytical {a_n:.6}, empirical {freq:.6}"),
    ));
    out
}

/// Typical conditioning for the Laplace oracles: median serving-BS and
/// closest-LoS distances.
pub fn typical_geometry(cfg: &NetworkConfig) -> (f64, f64) {
    let r_b = ClosestBsLaw::new(cfg).quantile(0.5);
    let u_b0 = (r_b * r_b - cfg.h_b * cfg.h_b).sqrt();
    let r_d0 = ClosestUavLaw::new(CondLabel::Los, cfg).quantile(0.5);
    (u_b0, r_d0)
}

fn laplace_check(name: &str, lap: &LaplaceEvaluator, draws: &[f64], n0: f64, tol: f64) -> CheckResult {
    let (mean, _) = mean_stderr(draws);
    let mut worst = 0.0f64;
    for k in 0..10 {
        // e^{-s I} spans roughly [0.2, 0.97] over this grid
        let s = 10f64.powf(-1.5 + 1.5 * k as f64 / 9.0) / mean;
        let exact = lap.value(s);
        let emp = empirical_laplace(draws, s) * (-s * n0).exp();
        worst = worst.max(((emp - exact) / exact).abs());
    }
    CheckResult::at_most(name, worst, tol, format!("{} draws, mean interference {mean:.4e}", draws.len()))
}

/// Interference Laplace transforms against sampled interference fields.
pub fn check_laplace(cfg: &NetworkConfig, budget: &Budget, tol: f64) -> Vec<CheckResult> {
    let (u_b0, r_d0) = typical_geometry(cfg);
    let n = budget.laplace_samples;
    let radius = 3.0 * default_window_radius(cfg);
    let seed = budget.seed ^ 0x1a91;
    let draw = |f: &(dyn Fn(&mut ChaCha8Rng) -> f64 + Sync), off: u64| -> Vec<f64> {
        (0..n)
            .into_par_iter()
            .map(|i| f(&mut stream_rng(seed + off, i as u64)))
            .collect()
    };
    let ltol = LaplaceTol::default();
    let mut out = Vec::new();

    let bs = draw(&|r| sample_bs_interference(cfg, u_b0, radius, r), 0);
    out.push(laplace_check(
        "BS interference Laplace transform",
        &LaplaceEvaluator::bs_only(cfg, u_b0).with_tol(ltol),
        &bs,
        0.0,
        tol,
    ));
    // the three fields are independent, so their sum samples the total
    let mut tot = bs.clone();
    for q1 in CondLabel::BOTH {
        let d = draw(&|r| sample_uav_interference(cfg, q1, CondLabel::Los, r_d0, radius, r), 1 + q1 as u64);
        out.push(laplace_check(
            &format!("{} UAV interference Laplace transform", q1.name()),
            &LaplaceEvaluator::uav_only(cfg, q1, CondLabel::Los, r_d0).with_tol(ltol),
            &d,
            0.0,
            tol,
        ));
        tot.iter_mut().zip(&d).for_each(|(t, x)| *t += x);
    }
    let full = LaplaceEvaluator::from_parts(cfg, u_b0, r_d0, CondLabel::Los).with_tol(ltol);
    out.push(laplace_check("total interference Laplace transform", &full, &tot, cfg.n0, tol));
    let (mean, _) = mean_stderr(&tot);
    let d1 = full.derivative(1, 0.0).expect("order 1");
    let target = -(cfg.n0 + mean);
    out.push(CheckResult::at_most(
        "first derivative at 0 equals minus mean interference plus noise",
        ((d1 - target) / target).abs(),
        tol,
        format!("analytical {d1:.6e}, empirical {target:.6e}"),
    ));
    if cfg.m >= 2 {
        // second moment through the second derivative
        let d2 = full.derivative(2, 0.0).expect("order 2");
        let m2 = tot.iter().map(|i| (i + cfg.n0) * (i + cfg.n0)).sum::<f64>() / tot.len() as f64;
        out.push(CheckResult::at_most(
            "second derivative at 0 equals second moment",
            ((d2 - m2) / m2).abs(),
            5.0 * tol,
            format!("analytical {d2:.6e}, empirical {m2:.6e}"),
        ));
    }
    out
}

/// Analytical and simulated curves for one configuration.
#[derive(Debug, Clone)]
pub struct CoverageComparison {
    pub analytical: Vec<CoverageResult>,
    pub simulated: Vec<SimCoverage>,
    pub trials: Vec<TrialOutcome>,
}

pub fn compare_engines(
    cfg: &NetworkConfig,
    protocols: &[Protocol],
    taus: &[f64],
    budget: &Budget,
) -> crate::Result<CoverageComparison> {
    let analytical = coverage_multi(
        cfg,
        protocols,
        taus,
        budget.coverage_samples,
        0.01,
        budget.seed as u32,
        LaplaceTol {
            rel: 1e-6,
            max_intervals: 100,
        },
    )?;
    let (trials, redraws) = run_trials(cfg, budget.coverage_trials, budget.seed, &SimOptions::default());
    let simulated = summarize(&trials, redraws, protocols, taus);
    Ok(CoverageComparison {
        analytical,
        simulated,
        trials,
    })
}

/// Largest analytical-vs-simulation gap per protocol.
pub fn check_engine_agreement(cmp: &CoverageComparison, tol: f64) -> Vec<CheckResult> {
    cmp.analytical
        .iter()
        .zip(&cmp.simulated)
        .map(|(a, s)| {
            let gap = a
                .points
                .iter()
                .zip(&s.points)
                .map(|(x, y)| (x.p_cov - y.p_cov).abs())
                .fold(0.0, f64::max);
            let detail = a
                .points
                .iter()
                .zip(&s.points)
                .map(|(x, y)| format!("tau {:.4}: {:.4} vs {:.4}", x.tau, x.p_cov, y.p_cov))
                .collect::<Vec<_>>()
                .join("; ");
            CheckResult::at_most(
                format!("{} analytical vs simulation", a.protocol.name()),
                gap,
                tol,
                detail,
            )
        })
        .collect()
}

/// Largest increase along a curve that should be nonincreasing.
pub fn max_increase(p: &[f64]) -> f64 {
    p.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}

/// DF over AF, monotonicity and the per-trial SINR orderings.
pub fn check_orderings(cmp: &CoverageComparison) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let find = |p: Protocol| cmp.analytical.iter().find(|r| r.protocol == p);
    if let (Some(af), Some(df)) = (find(Protocol::Af), find(Protocol::Df)) {
        // positive values are violations beyond two combined standard errors
        let worst = af
            .points
            .iter()
            .zip(&df.points)
            .map(|(a, d)| (a.p_cov - d.p_cov) - 2.0 * (a.stderr.powi(2) + d.stderr.powi(2)).sqrt())
            .fold(f64::NEG_INFINITY, f64::max);
        out.push(CheckResult::at_most("analytical DF >= AF", worst, 0.0, ""));
    }
    let mono = cmp
        .analytical
        .iter()
        .map(|r| max_increase(&r.points.iter().map(|p| p.p_cov).collect::<Vec<_>>()))
        .fold(0.0, f64::max);
    out.push(CheckResult::at_most("analytical coverage nonincreasing in tau", mono, 1e-6, ""));
    let mono_sim = cmp
        .simulated
        .iter()
        .map(|r| max_increase(&r.points.iter().map(|p| p.p_cov).collect::<Vec<_>>()))
        .fold(0.0, f64::max);
    out.push(CheckResult::at_most("simulated coverage nonincreasing in tau", mono_sim, 0.0, ""));
    let df_af = cmp.trials.iter().filter(|t| t.sinr_df < t.sinr_af).count();
    out.push(CheckResult::at_most(
        "per-trial DF SINR >= AF SINR",
        df_af as f64,
        0.0,
        format!("{} trials", cmp.trials.len()),
    ));
    let hybrid = cmp
        .trials
        .iter()
        .filter(|t| t.sinr_af < t.sinr_bu || t.sinr_df < t.sinr_bu)
        .count();
    out.push(CheckResult::at_most(
        "per-trial hybrid SINR >= direct SINR",
        hybrid as f64,
        0.0,
        format!("{} trials", cmp.trials.len()),
    ));
    out
}

/// The full suite for one configuration.
pub fn run_validation(cfg: &NetworkConfig, budget: &Budget) -> crate::Result<ValidationReport> {
    cfg.validate().map_err(crate::Error::InvalidConfig)?;
    let mut checks = check_ratio_cdfs(budget, 3e-3);
    checks.push(check_rayleigh_forms(budget));
    checks.extend(check_ratio_limits(budget));
    checks.extend(check_spatial_laws(cfg, budget, 0.01, 0.01));
    checks.extend(check_laplace(cfg, budget, 0.02));
    let taus = [0.1, 1.0, 10.0];
    let cmp = compare_engines(cfg, &[Protocol::Af, Protocol::Df], &taus, budget)?;
    checks.extend(check_engine_agreement(&cmp, 0.03));
    checks.extend(check_orderings(&cmp));
    Ok(ValidationReport::new(cfg, budget.seed, checks))
}
