use std::path::Path;
use std::process::{Command, Output};

fn twohop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twohop"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

const SMALL: &[&str] = &["--samples", "200", "--trials", "1000", "--seed", "7"];

fn coverage_to(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["coverage", "--out", out.to_str().unwrap()];
    args.extend_from_slice(SMALL);
    args.extend_from_slice(extra);
    twohop(&args)
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    assert!(coverage_to(&a, &["--tau", "-10,0,10"]).status.success());
    assert!(coverage_to(&b, &["--tau", "-10,0,10"]).status.success());
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn header_embeds_config_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.csv");
    assert!(coverage_to(&p, &["--tau", "0", "--engine", "simulation"]).status.success());
    let text = std::fs::read_to_string(p).unwrap();
    let header: Vec<&str> = text.lines().take_while(|l| l.starts_with('#')).collect();
    assert!(header.iter().any(|l| l.starts_with("# config: {")));
    assert!(header.iter().any(|l| l.starts_with("# config_sha256: ")));
    assert!(header.contains(&"# seed: 7"));
    assert!(header.iter().any(|l| l.starts_with("# version: twohop ")));
}

#[test]
fn single_tau_gives_single_row_per_engine() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("one.csv");
    let o = coverage_to(&p, &["--tau", "0", "--protocol", "df", "--engine", "analytical"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(p).unwrap();
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 1);
    assert!(rows[0].starts_with("analytical,df,1,0,"));

    let o = coverage_to(&dir.path().join("two.csv"), &["--tau", "0", "--protocol", "df"]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(dir.path().join("two.csv")).unwrap();
    assert_eq!(data_rows(&text).len(), 2);
}

#[test]
fn invalid_config_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"h_d_min": 500, "h_d_max": 300}"#).unwrap();
    let out = dir.path().join("never.csv");
    let o = coverage_to(&out, &["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("h_d_max"));
    assert!(!out.exists());
}

#[test]
fn corrupted_eta_ordering_rejected_before_validation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("eta.json");
    std::fs::write(
        &cfg,
        r#"{"env": {"c1": 9.61, "c2": 0.16, "eta_los_db": 25, "eta_nlos_db": 1}}"#,
    )
    .unwrap();
    let report = dir.path().join("report.json");
    let o = twohop(&["validate", "--config", cfg.to_str().unwrap(), "--out", report.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("eta"));
    assert!(!report.exists());
}

#[test]
fn unreadable_or_malformed_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(twohop(&["config", "--config", missing.to_str().unwrap()]).status.code(), Some(2));
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{ not json").unwrap();
    assert_eq!(twohop(&["config", "--config", junk.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&junk, r#"{"lambda_bee": 1}"#).unwrap();
    assert_eq!(twohop(&["config", "--config", junk.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn empty_grids_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = twohop(&["sweep", "--param", "mean_height", "--values", "", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    let o = coverage_to(&out, &["--tau", ""]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn bad_flags_exit_2() {
    for args in [
        &["coverage", "--engine", "quantum"][..],
        &["coverage", "--protocol", "xy"],
        &["coverage", "--tau", "zero"],
        &["sweep", "--param", "colour", "--values", "1"],
        &["sweep", "--param", "max_height", "--values", "50"],
    ] {
        assert_eq!(twohop(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn sweep_writes_one_row_per_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let mut args = vec![
        "sweep", "--param", "antenna_model", "--values", "isotropic,omni_downtilt",
        "--engine", "simulation", "--protocol", "df", "--tau", "0", "--out",
    ];
    args.push(out.to_str().unwrap());
    args.extend_from_slice(SMALL);
    assert!(twohop(&args).status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# sweep: antenna_model"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("isotropic,1,df,simulation,"));
    assert!(rows[1].starts_with("omni_downtilt,1,df,simulation,"));

    let o = twohop(&["sweep", "--param", "tau", "--values", "10,-10", "--engine", "simulation", "--trials", "500"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let xs: Vec<&str> = data_rows(&text).iter().map(|r| r.split(',').next().unwrap()).collect();
    assert_eq!(xs, ["-10", "10", "-10", "10"]);
}
