//! Reduced-budget versions of the oracle suite, sized to run in seconds.

use rayon::prelude::*;

use twohop::coverage::{v_terms_df, w_terms_af, LinkCoefficients};
use twohop::laplace::LaplaceEvaluator;
use twohop::ratio_cdf::{cdf_t1, cdf_t1_t3_joint, cdf_t2, RatioCdfParams};
use twohop::sim::{
    default_window_radius, empirical_laplace, sample_bs_interference, sample_closest, sample_total_interference,
    sample_uav_interference, stream_rng,
};
use twohop::spatial::{ClosestBsLaw, ClosestUavLaw};
use twohop::stats::ks_statistic;
use twohop::validate::{check_ratio_cdfs, check_ratio_limits, check_rayleigh_forms, typical_geometry, Budget};
use twohop::{CondLabel, NetworkConfig, ServingGeometry};

/// 1% critical value of the one-sample KS statistic.
fn ks_crit(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

fn small_budget() -> Budget {
    Budget {
        ratio_samples: 400_000,
        ratio_tuples: 1,
        rayleigh_tuples: 200,
        ..Budget::quick()
    }
}

#[test]
fn ratio_cdfs_match_sampling() {
    for c in check_ratio_cdfs(&small_budget(), 3e-3) {
        assert!(c.passed, "{}: {} ({})", c.name, c.metric, c.detail);
    }
    let c = check_rayleigh_forms(&small_budget());
    assert!(c.passed, "{}: {}", c.name, c.metric);
    for c in check_ratio_limits(&small_budget()) {
        assert!(c.passed, "{}: {}", c.name, c.metric);
    }
}

#[test]
fn closest_distances_follow_their_laws() {
    let cfg = NetworkConfig::default();
    let n = 4_000;
    let draws = sample_closest(&cfg, n, 12, default_window_radius(&cfg));
    let bs: Vec<f64> = draws.iter().filter_map(|d| d.r_b0).collect();
    let law = ClosestBsLaw::new(&cfg);
    assert!(ks_statistic(&bs, |r| law.cdf(r)) < ks_crit(bs.len()));
    for (q, pick) in [
        (CondLabel::Los, Box::new(|d: &twohop::sim::ClosestSample| d.los) as Box<dyn Fn(&_) -> _>),
        (CondLabel::Nlos, Box::new(|d: &twohop::sim::ClosestSample| d.nlos)),
    ] {
        let r: Vec<f64> = draws.iter().filter_map(|d| pick(d).map(|x| x.0)).collect();
        let law = ClosestUavLaw::new(q, &cfg);
        let ks = ks_statistic(&r, |x| law.cdf(x));
        assert!(ks < ks_crit(r.len()), "{q:?}: {ks}");
    }
}

fn check_transform(lap: &LaplaceEvaluator, draws: &[f64], tol: f64) {
    let mean = draws.iter().sum::<f64>() / draws.len() as f64;
    for k in 0..6 {
        let s = 10f64.powf(-1.5 + 0.3 * k as f64) / mean;
        let (exact, emp) = (lap.value(s), empirical_laplace(draws, s));
        assert!(((emp - exact) / exact).abs() < tol, "s={s:e}: {emp} vs {exact}");
    }
    // first derivative at 0 is minus the mean
    let d1 = -lap.derivative(1, 0.0).unwrap();
    assert!((d1 / mean - 1.0).abs() < 0.05, "mean {mean:e} vs {d1:e}");
}

#[test]
fn interference_transforms_match_sampled_fields() {
    let cfg = NetworkConfig::default();
    let (u_b0, r_d0) = typical_geometry(&cfg);
    let window = 3.0 * default_window_radius(&cfg);
    let n = 4_000;
    let bs: Vec<f64> = (0..n as u64)
        .into_par_iter()
        .map(|i| sample_bs_interference(&cfg, u_b0, window, &mut stream_rng(31, i)))
        .collect();
    check_transform(&LaplaceEvaluator::bs_only(&cfg, u_b0), &bs, 0.03);
    for (k, q) in CondLabel::BOTH.into_iter().enumerate() {
        let uav: Vec<f64> = (0..n as u64)
            .into_par_iter()
            .map(|i| sample_uav_interference(&cfg, q, CondLabel::Los, r_d0, window, &mut stream_rng(32 + k as u64, i)))
            .collect();
        check_transform(&LaplaceEvaluator::uav_only(&cfg, q, CondLabel::Los, r_d0), &uav, 0.03);
    }
}

fn geometry(cfg: &NetworkConfig) -> ServingGeometry {
    let (u_b0, r_d0) = typical_geometry(cfg);
    let z = 0.5 * (cfg.h_d_min + cfg.h_d_max);
    ServingGeometry {
        r_b0: u_b0.hypot(cfg.h_b),
        r_d0,
        theta_d0: (z / r_d0).min(1.0).acos(),
        phi_b0d0: 1.0,
        cond: CondLabel::Los,
    }
}

/// The conditional coverage built from Laplace derivatives equals the
/// average of the fixed-interference ratio cdfs over sampled interference.
/// The transform is restricted to the sampling window, so the two sides
/// describe the same field.
#[test]
fn conditional_coverage_matches_interference_averaging() {
    for m in [1u32, 2] {
        let cfg = NetworkConfig {
            m,
            ..NetworkConfig::default()
        };
        let geom = geometry(&cfg);
        let lc = LinkCoefficients::new(&geom, &cfg);
        let window = default_window_radius(&cfg);
        let lap = LaplaceEvaluator::new(&cfg, &geom).with_window(window);
        let draws: Vec<f64> = (0..30_000u64)
            .into_par_iter()
            .map(|i| {
                sample_total_interference(&cfg, geom.u_b0(&cfg), geom.r_d0, geom.cond, window, &mut stream_rng(40, i))
            })
            .collect();
        let z = 0.8;
        let g = cfg.n0 / (lc.c * z);
        for tau in [0.1, 1.0, 10.0] {
            let avg = |f: &dyn Fn(f64) -> f64| draws.iter().map(|&i| f(i + cfg.n0)).sum::<f64>() / draws.len() as f64;
            let af_mc = avg(&|i| 1.0 - cdf_t1_t3_joint(tau, &RatioCdfParams::new(lc.a, lc.b, i, g, m)));
            let af = w_terms_af(tau, &geom, z, &cfg, &lap).unwrap();
            assert!((af - af_mc).abs() < 5e-3, "m={m} tau={tau}: AF {af} vs {af_mc}");

            let v0 = twohop::coverage::backhaul_outage(tau, lc.c, cfg.n0, m);
            let df_mc = avg(&|i| {
                let p = RatioCdfParams::new(lc.a, lc.b, i, 0.0, m);
                1.0 - v0 * cdf_t1(tau, &p) - (1.0 - v0) * cdf_t2(tau, &p)
            });
            let df = v_terms_df(tau, &geom, &cfg, &lap).unwrap();
            assert!((df - df_mc).abs() < 5e-3, "m={m} tau={tau}: DF {df} vs {df_mc}");
        }
    }
}
