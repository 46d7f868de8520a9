use std::f64::consts::PI;

use twohop::config::db_to_linear;
use twohop::sim::{
    associate, default_window_radius, estimate_coverage, evaluate_trial, run_trials, sample_realization, stream_rng,
    summarize, BackhaulInterference, SimMode, SimOptions, TrialOutcome,
};
use twohop::{AntennaModel, CondLabel, NetworkConfig, Protocol};

#[test]
fn per_trial_orderings_hold() {
    for model in AntennaModel::ALL {
        let cfg = NetworkConfig {
            bs_antenna_model: model,
            ..NetworkConfig::default()
        };
        let (trials, _) = run_trials(&cfg, 1_500, 4, &SimOptions::default());
        for t in &trials {
            assert!(t.e2e_df >= t.e2e_af, "{model:?}: {t:?}");
            assert!(t.sinr_df >= t.sinr_af);
            assert!(t.sinr_af >= t.sinr_bu && t.sinr_df >= t.sinr_bu);
            assert!(t.sinr_il >= t.sinr_af && t.sinr_il >= t.sinr_df);
            assert!(t.sinr_bu >= 0.0 && t.sinr_du >= 0.0 && t.sinr_bd >= 0.0);
        }
    }
}

#[test]
fn trials_are_reproducible_by_seed() {
    let cfg = NetworkConfig::default();
    let a = run_trials(&cfg, 300, 9, &SimOptions::default());
    let b = run_trials(&cfg, 300, 9, &SimOptions::default());
    let c = run_trials(&cfg, 300, 10, &SimOptions::default());
    assert_eq!(a, b);
    assert_ne!(a.0, c.0);
}

#[test]
fn point_counts_match_densities() {
    let cfg = NetworkConfig::default();
    let r = default_window_radius(&cfg);
    let n = 2_000;
    let (mut nb, mut nd) = (0usize, 0usize);
    for i in 0..n {
        let real = sample_realization(&cfg, r, &mut stream_rng(77, i));
        nb += real.bs.len();
        nd += real.uavs.len();
        for u in &real.uavs {
            assert!(u.pos[2] >= cfg.h_d_min && u.pos[2] <= cfg.h_d_max);
            assert!(u.pos[0].hypot(u.pos[1]) <= r);
        }
    }
    let area = PI * r * r;
    let eb = cfg.lambda_b * area;
    let ed = cfg.lambda_d * area * (cfg.h_d_max - cfg.h_d_min);
    let mb = nb as f64 / n as f64;
    let md = nd as f64 / n as f64;
    assert!((mb / eb - 1.0).abs() < 0.01, "BS mean {mb} vs {eb}");
    assert!((md / ed - 1.0).abs() < 0.01, "UAV mean {md} vs {ed}");
}

#[test]
fn los_marks_follow_the_elevation_law() {
    let cfg = NetworkConfig::default();
    let r = default_window_radius(&cfg);
    let (mut los, mut expected, mut var) = (0.0, 0.0, 0.0);
    for i in 0..300 {
        let real = sample_realization(&cfg, r, &mut stream_rng(5, i));
        for u in &real.uavs {
            let p = CondLabel::Los.prob_cos(u.pos[2] / u.dist(), &cfg);
            expected += p;
            var += p * (1.0 - p);
            if u.cond == CondLabel::Los {
                los += 1.0;
            }
        }
    }
    let z = (los - expected) / var.sqrt();
    assert!(z.abs() < 4.0, "LoS count {los} vs {expected}, z = {z}");
}

#[test]
fn serving_uav_has_the_strongest_mean_power() {
    let cfg = NetworkConfig::default();
    let r = default_window_radius(&cfg);
    for i in 0..50 {
        let real = sample_realization(&cfg, r, &mut stream_rng(3, i));
        let Some(a) = associate(&real, &cfg) else { continue };
        let Some(k) = a.uav else { continue };
        let score = |u: &twohop::sim::Uav| u.dist().powf(-cfg.alpha(u.cond)) / cfg.eta(u.cond);
        let best = score(&real.uavs[k]);
        assert!(real.uavs.iter().all(|u| score(u) <= best));
        let d0 = real.bs[a.bs].pos[0].hypot(real.bs[a.bs].pos[1]);
        assert!(real.bs.iter().all(|b| b.pos[0].hypot(b.pos[1]) >= d0));
    }
}

/// Doubling the window moves the estimate by less than twice its standard
/// error. Both windows come from one realization of the larger disc and share
/// the serving-link fadings, so the difference isolates the truncation.
#[test]
fn window_doubling_is_within_noise() {
    let cfg = NetworkConfig::default();
    let taus = [db_to_linear(-10.0), 1.0, db_to_linear(10.0)];
    let protocols = [Protocol::Af, Protocol::Df];
    let r0 = default_window_radius(&cfg);
    let n = 5_000;
    let pairs: Vec<(TrialOutcome, TrialOutcome)> = (0..n)
        .map(|i| {
            let mut rng = stream_rng(21, i);
            let big = sample_realization(&cfg, 2.0 * r0, &mut rng);
            let small = big.restrict(r0);
            let (ab, asm) = (associate(&big, &cfg).unwrap(), associate(&small, &cfg).unwrap());
            let mut rng2 = rng.clone();
            (
                evaluate_trial(&small, &asm, &cfg, BackhaulInterference::Auto, &mut rng),
                evaluate_trial(&big, &ab, &cfg, BackhaulInterference::Auto, &mut rng2),
            )
        })
        .collect();
    let (small, big): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    let a = summarize(&small, 0, &protocols, &taus);
    let b = summarize(&big, 0, &protocols, &taus);
    for (ca, cb) in a.iter().zip(&b) {
        for (pa, pb) in ca.points.iter().zip(&cb.points) {
            assert!(
                (pa.p_cov - pb.p_cov).abs() < 2.0 * pa.stderr,
                "{:?} tau {}: {} vs {} (stderr {})",
                ca.protocol,
                pa.tau,
                pa.p_cov,
                pb.p_cov,
                pa.stderr
            );
        }
    }
}

#[test]
fn quenched_mode_reuses_geometry_without_bias() {
    let cfg = NetworkConfig::default();
    let q = SimOptions {
        mode: SimMode::Quenched { fadings: 10 },
        ..SimOptions::default()
    };
    let (trials, _) = run_trials(&cfg, 4_000, 6, &q);
    assert_eq!(trials.len(), 4_000);
    for chunk in trials.chunks(10) {
        assert!(chunk.iter().all(|t| t.cond == chunk[0].cond));
    }
    let taus = [1.0];
    let qc = estimate_coverage(&cfg, &[Protocol::Df], &taus, 4_000, 6, &q);
    let ac = estimate_coverage(&cfg, &[Protocol::Df], &taus, 4_000, 6, &SimOptions::default());
    // quenched trials are correlated within a geometry, so allow for a
    // design effect of up to 10
    let se = (10.0 * qc[0].points[0].stderr.powi(2) + ac[0].points[0].stderr.powi(2)).sqrt();
    assert!((qc[0].points[0].p_cov - ac[0].points[0].p_cov).abs() < 4.0 * se);
}

#[test]
fn coverage_summary_is_consistent() {
    let cfg = NetworkConfig::default();
    let taus = [0.1, 1.0, 10.0];
    let res = estimate_coverage(&cfg, &[Protocol::Af, Protocol::Df], &taus, 2_000, 2, &SimOptions::default());
    for c in &res {
        assert_eq!(c.trials, 2_000);
        for p in &c.points {
            assert!(p.los_part + p.nlos_part <= p.p_cov + 1e-12);
            assert!((0.0..=1.0).contains(&p.p_cov));
        }
        for w in c.points.windows(2) {
            assert!(w[1].p_cov <= w[0].p_cov);
        }
    }
    for (a, d) in res[0].points.iter().zip(&res[1].points) {
        assert!(a.p_cov <= d.p_cov);
    }
}
