//! Acceptance gate. Prints one PASS/FAIL line per criterion with the
//! sub-checks beneath it, and exits nonzero if any criterion fails.
//!
//! Run alone with `cargo test -p twohop --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use twohop::config::db_to_linear;
use twohop::report::{coverage_csv, CheckResult};
use twohop::runner::{run_coverage, EngineChoice, RunOptions};
use twohop::sim::{estimate_coverage, SimCoverage, SimOptions};
use twohop::validate::{
    check_engine_agreement, check_laplace, check_orderings, check_ratio_cdfs, check_ratio_limits,
    check_rayleigh_forms, check_spatial_laws, compare_engines, max_increase, Budget,
};
use twohop::{AntennaModel, NetworkConfig, Protocol};

struct Criterion {
    id: u32,
    title: &'static str,
    checks: Vec<CheckResult>,
    secs: f64,
    budget_secs: Option<f64>,
}

impl Criterion {
    fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    fn print(&self) {
        let over = self.budget_secs.is_some_and(|b| self.secs > b);
        println!(
            "{} criterion {}: {} ({:.1} s{})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.secs,
            if over { ", over the stated runtime" } else { "" }
        );
        for c in &self.checks {
            println!(
                "    [{}] {}: {:.4e} vs {:.1e} {}",
                if c.passed { "ok" } else { "FAIL" },
                c.name,
                c.metric,
                c.threshold,
                c.detail
            );
        }
    }
}

fn timed(
    id: u32,
    title: &'static str,
    budget_secs: Option<f64>,
    f: impl FnOnce() -> Vec<CheckResult>,
) -> Criterion {
    let t = Instant::now();
    let checks = f();
    let c = Criterion {
        id,
        title,
        checks,
        secs: t.elapsed().as_secs_f64(),
        budget_secs,
    };
    c.print();
    c
}

fn db(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| db_to_linear(v)).collect()
}

/// Simulated curves must be nonincreasing and DF must dominate AF.
fn sim_curve_checks(label: &str, curves: &[SimCoverage]) -> Vec<CheckResult> {
    let mono = curves
        .iter()
        .map(|c| max_increase(&c.points.iter().map(|p| p.p_cov).collect::<Vec<_>>()))
        .fold(0.0, f64::max);
    let mut out = vec![CheckResult::at_most(
        format!("{label}: simulated coverage nonincreasing in tau"),
        mono,
        0.0,
        "",
    )];
    let af = curves.iter().find(|c| c.protocol == Protocol::Af);
    let df = curves.iter().find(|c| c.protocol == Protocol::Df);
    if let (Some(af), Some(df)) = (af, df) {
        let worst = af
            .points
            .iter()
            .zip(&df.points)
            .map(|(a, d)| a.p_cov - d.p_cov)
            .fold(f64::NEG_INFINITY, f64::max);
        out.push(CheckResult::at_most(format!("{label}: simulated DF >= AF"), worst, 0.0, ""));
    }
    out
}

fn main() -> ExitCode {
    let cfg = NetworkConfig::default();
    let budget = Budget::full();
    let mut all = Vec::new();
    let mut extra_order_checks = Vec::new();

    // 1 and 7 share the engine comparison
    let taus = db(&[-10.0, -5.0, 0.0, 5.0, 10.0]);
    let mut cmp = None;
    all.push(timed(1, "analytical coverage matches network simulation within 0.03", Some(900.0), || {
        match compare_engines(&cfg, &[Protocol::Af, Protocol::Df], &taus, &budget) {
            Ok(c) => {
                let checks = check_engine_agreement(&c, 0.03);
                cmp = Some(c);
                checks
            }
            Err(e) => vec![CheckResult::at_most(format!("engine comparison failed: {e}"), 1.0, 0.0, "")],
        }
    }));

    all.push(timed(2, "ratio cdfs match gamma-ratio sampling within 3e-3", Some(120.0), || {
        check_ratio_cdfs(&budget, 3e-3)
    }));

    all.push(timed(3, "general ratio cdfs reduce to the Rayleigh forms at m=1", Some(10.0), || {
        vec![check_rayleigh_forms(&budget)]
    }));

    all.push(timed(4, "ratio cdf limits and reductions", Some(10.0), || check_ratio_limits(&budget)));

    all.push(timed(5, "spatial laws match sampled networks", Some(600.0), || {
        check_spatial_laws(&cfg, &budget, 0.01, 0.01)
    }));

    all.push(timed(6, "interference Laplace transforms match sampled fields within 2%", Some(600.0), || {
        check_laplace(&cfg, &budget, 0.02)
    }));

    // 8 runs before 7 so that its curves join the ordering checks
    let c8 = timed(8, "height sweep has an interior maximum; antenna models are ordered", Some(1800.0), || {
        let mut checks = Vec::new();
        let sweep_taus = db(&[0.0, 10.0]);
        let heights: Vec<f64> = (0..12).map(|i| 100.0 + 900.0 * i as f64 / 11.0).collect();
        let sweep: Vec<Vec<SimCoverage>> = heights
            .iter()
            .map(|&h| {
                let c = NetworkConfig {
                    h_d_min: h - 50.0,
                    h_d_max: h + 50.0,
                    ..cfg.clone()
                };
                let r = estimate_coverage(&c, &[Protocol::Af, Protocol::Df], &sweep_taus, 5_000, 8, &SimOptions::default());
                extra_order_checks.extend(sim_curve_checks(&format!("mean height {h:.0}"), &r));
                r
            })
            .collect();
        for (pi, p) in [Protocol::Af, Protocol::Df].into_iter().enumerate() {
            let curve: Vec<(f64, f64)> = sweep
                .iter()
                .map(|r| (r[pi].points[0].p_cov, r[pi].points[0].stderr))
                .collect();
            let (imax, &(pmax, smax)) = curve
                .iter()
                .enumerate()
                .max_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
                .unwrap();
            let (first, last) = (curve[0], curve[curve.len() - 1]);
            // margin of the peak over both ends, in units of two combined stderrs
            let margin = [first, last]
                .iter()
                .map(|&(p, s)| (pmax - p) / (2.0 * (s * s + smax * smax).sqrt()))
                .fold(f64::INFINITY, f64::min);
            let interior = imax > 0 && imax < curve.len() - 1;
            checks.push(CheckResult::at_least(
                format!("{} height sweep at 0 dB: interior peak clears both ends", p.name()),
                if interior { margin } else { 0.0 },
                1.0,
                format!(
                    "peak {pmax:.4} at {:.0} m; ends {:.4}, {:.4}",
                    heights[imax], first.0, last.0
                ),
            ));
        }
        let mut by_model = Vec::new();
        for m in AntennaModel::ALL {
            let c = NetworkConfig {
                bs_antenna_model: m,
                ..cfg.clone()
            };
            let r = estimate_coverage(&c, &[Protocol::Af, Protocol::Df], &sweep_taus, 20_000, 8, &SimOptions::default());
            extra_order_checks.extend(sim_curve_checks(m.name(), &r));
            by_model.push(r);
        }
        for (pi, p) in [Protocol::Af, Protocol::Df].into_iter().enumerate() {
            for (ti, t) in [0.0, 10.0].into_iter().enumerate() {
                let pt = |k: usize| by_model[k][pi].points[ti];
                for (hi, lo) in [(2, 1), (1, 0)] {
                    let (a, b) = (pt(hi), pt(lo));
                    let se = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
                    checks.push(CheckResult::at_least(
                        format!(
                            "{} at {t} dB: {} >= {}",
                            p.name(),
                            AntennaModel::ALL[hi].name(),
                            AntennaModel::ALL[lo].name()
                        ),
                        a.p_cov - b.p_cov + se,
                        0.0,
                        format!("{:.4} vs {:.4}, stderr {se:.4}", a.p_cov, b.p_cov),
                    ));
                }
            }
        }
        checks
    });

    all.push(timed(7, "orderings: DF >= AF, monotone in tau, hybrid >= direct", None, || {
        let mut checks = match &cmp {
            Some(c) => check_orderings(c),
            None => vec![CheckResult::at_most("engine comparison unavailable", 1.0, 0.0, "")],
        };
        checks.append(&mut extra_order_checks);
        checks
    }));
    all.push(c8);

    all.push(timed(9, "identical config and seed give byte-identical CSV", None, || {
        let opts = RunOptions {
            engine: EngineChoice::Both,
            protocols: vec![Protocol::Af, Protocol::Df],
            tau_grid: db(&[-10.0, 0.0, 10.0]),
            samples: 300,
            trials: 2_000,
            seed: 42,
            ..RunOptions::default()
        };
        let render = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                let rows = run_coverage(&cfg, &opts).unwrap();
                coverage_csv(&cfg, opts.seed, &[], &rows)
            })
        };
        let (a, b, c) = (render(1), render(1), render(3));
        vec![
            CheckResult::at_most("repeat run differs", (a != b) as u8 as f64, 0.0, format!("{} bytes", a.len())),
            CheckResult::at_most("thread count changes output", (a != c) as u8 as f64, 0.0, ""),
        ]
    }));

    all.sort_by_key(|c| c.id);
    let failed: Vec<u32> = all.iter().filter(|c| !c.passed()).map(|c| c.id).collect();
    println!();
    println!("summary:");
    for c in &all {
        println!("{} criterion {}: {}", if c.passed() { "PASS" } else { "FAIL" }, c.id, c.title);
    }
    if failed.is_empty() {
        println!("all {} acceptance criteria passed", all.len());
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
