use std::collections::BTreeSet;
use std::fs;

use nsac_core::output::{
    convergence_slope, read_diagnostics, read_manifest, read_snapshot, read_summary, run_dir_name, simulate, sweep_eps,
    write_profile, SweepRow, SweepSummary, DIAGNOSTICS_FILE, MANIFEST_FILE, RUN_SCHEMA, SUMMARY_FILE, SWEEP_SCHEMA,
};
use nsac_core::profiles::{PhaseProfile, PreComposite};
use nsac_core::scenario::{RegionConfig, RunMode, ScenarioConfig};

fn small_post() -> ScenarioConfig {
    let mut cfg = ScenarioConfig::default();
    cfg.grid.n = Some(600);
    cfg.run.horizon = Some(2.0);
    cfg.run.snapshot_cadence = Some(1.0);
    cfg.phase = PhaseProfile::Dimple { amplitude: 0.01, width: 1.0 };
    cfg.perturbation.amplitude = 0.01;
    cfg
}

fn listing(dir: &std::path::Path) -> BTreeSet<String> {
    fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect()
}

fn header(path: &std::path::Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn run_directory_layout_and_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_post();
    let (dir, m) = simulate(cfg.clone(), tmp.path(), &mut |_| {}).unwrap();
    assert_eq!(dir.file_name().unwrap().to_string_lossy(), run_dir_name(&cfg));
    // nothing but the run directory is left behind
    assert_eq!(listing(tmp.path()), BTreeSet::from([run_dir_name(&cfg)]));

    let mut expected = BTreeSet::from([MANIFEST_FILE.to_string(), DIAGNOSTICS_FILE.to_string()]);
    expected.extend(m.files.snapshots.iter().map(|s| s.file.clone()));
    assert_eq!(listing(&dir), expected);
    assert_eq!(m.files.snapshots.len(), 3);

    let back = read_manifest(&dir).unwrap();
    assert_eq!(back, m);
    assert_eq!(back.schema, RUN_SCHEMA);
    assert_eq!(back.config, cfg);
    assert_eq!(back.config_hash, cfg.content_hash());

    assert_eq!(header(&dir.join(&m.files.snapshots[0].file)), "y,v,u,omega");
    let snap = read_snapshot(&dir.join(&m.files.snapshots[2].file), m.files.snapshots[2].tau).unwrap();
    assert_eq!(snap.y.len(), m.grid.n);
    assert_eq!(snap.tau, 2.0);

    let h = header(&dir.join(DIAGNOSTICS_FILE));
    for col in ["tau", "X", "Xdot", "perturbation_sup", "weighted_entropy", "g1", "d1", "dissipation_integral"] {
        assert!(h.split(',').any(|c| c == col), "missing column {col} in {h}");
    }
    let records = read_diagnostics(&dir.join(DIAGNOSTICS_FILE)).unwrap();
    assert_eq!(records.first().unwrap().tau, 0.0);
    assert_eq!(records.last().unwrap().tau, 2.0);
    assert!(records.windows(2).all(|w| w[1].tau > w[0].tau));
}

#[test]
fn identical_runs_write_identical_files() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (da, ma) = simulate(small_post(), a.path(), &mut |_| {}).unwrap();
    let (db, _) = simulate(small_post(), b.path(), &mut |_| {}).unwrap();
    let mut files = vec![DIAGNOSTICS_FILE.to_string()];
    files.extend(ma.files.snapshots.iter().map(|s| s.file.clone()));
    for f in files {
        assert_eq!(fs::read(da.join(&f)).unwrap(), fs::read(db.join(&f)).unwrap(), "{f} differs");
    }
}

#[test]
fn rerun_replaces_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let (d1, _) = simulate(small_post(), tmp.path(), &mut |_| {}).unwrap();
    fs::write(d1.join("stray.txt"), "x").unwrap();
    let (d2, _) = simulate(small_post(), tmp.path(), &mut |_| {}).unwrap();
    assert_eq!(d1, d2);
    assert!(!d2.join("stray.txt").exists());
}

fn small_full() -> ScenarioConfig {
    let mut cfg = ScenarioConfig::default();
    cfg.run.mode = RunMode::Full;
    cfg.grid.y_min = Some(-100.0);
    cfg.grid.y_max = Some(60.0);
    cfg.grid.dy = 0.2;
    cfg.region = Some(RegionConfig { varsigma: 0.2, post_extent: 0.5, slices: 8 });
    cfg
}

#[test]
fn sweep_records_failures() {
    let tmp = tempfile::tempdir().unwrap();
    // the fixed grid holds the ε = 1 run but not the ε = 0.05 one
    let summary = sweep_eps(&small_full(), &[1.0, 0.05], tmp.path(), Some(2)).unwrap();
    assert_eq!(summary.schema, SWEEP_SCHEMA);
    assert_eq!(summary.rows.len(), 2);
    let (good, bad) = (&summary.rows[0], &summary.rows[1]);
    assert!(good.ok && good.error.is_none() && good.run_dir.is_some());
    assert!(good.sup_error_pre.is_some() && good.sup_error_post.is_some());
    assert!(!bad.ok && bad.run_dir.is_none() && bad.sup_error.is_none());
    assert!(bad.error.as_ref().unwrap().contains("grid.y_min"), "{:?}", bad.error);
    assert_eq!(read_summary(tmp.path()).unwrap(), summary);
    let dirs: Vec<String> = listing(tmp.path()).into_iter().filter(|n| n.starts_with("run-")).collect();
    assert_eq!(dirs, vec![good.run_dir.clone().unwrap()]);
    assert!(tmp.path().join(SUMMARY_FILE).exists());
    // one successful row: no slope
    assert_eq!(convergence_slope(&summary), None);
}

#[test]
fn single_epsilon_sweep() {
    let tmp = tempfile::tempdir().unwrap();
    let summary = sweep_eps(&small_full(), &[1.0], tmp.path(), None).unwrap();
    assert_eq!(summary.rows.len(), 1);
    assert!(summary.rows[0].ok, "{:?}", summary.rows[0].error);
    assert!(sweep_eps(&small_full(), &[], tmp.path(), None).is_err());
    assert!(sweep_eps(&small_full(), &[0.1, -1.0], tmp.path(), None).is_err());
}

#[test]
fn slope_matches_least_squares() {
    let row = |epsilon: f64, err: f64| SweepRow {
        epsilon,
        ok: true,
        error: None,
        run_dir: None,
        sup_error_pre: None,
        sup_error_post: None,
        sup_error: Some(err),
        runtime_seconds: 0.0,
    };
    let rows = vec![row(0.1, 0.3), row(0.05, 0.14), row(0.025, 0.05)];
    let summary = SweepSummary { schema: SWEEP_SCHEMA.into(), code_version: String::new(), config_hash: String::new(), rows };
    // closed-form slope through three points
    let x: Vec<f64> = [0.1f64, 0.05, 0.025].iter().map(|e| e.ln()).collect();
    let y: Vec<f64> = [0.3f64, 0.14, 0.05].iter().map(|e| e.ln()).collect();
    let (mx, my) = (x.iter().sum::<f64>() / 3.0, y.iter().sum::<f64>() / 3.0);
    let num: f64 = (0..3).map(|i| (x[i] - mx) * (y[i] - my)).sum();
    let den: f64 = (0..3).map(|i| (x[i] - mx).powi(2)).sum();
    assert!((convergence_slope(&summary).unwrap() - num / den).abs() < 1e-12);
}

#[test]
fn profile_csv_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let fan = ScenarioConfig::default().fan().unwrap();
    let pre = PreComposite::from_fan(&fan, 1e-8).unwrap();
    let path = tmp.path().join("p.csv");
    write_profile(&path, &pre.rear).unwrap();
    assert_eq!(header(&path), "xi,V,U,residual");
    let text = fs::read_to_string(&path).unwrap();
    let worst = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap().abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-6);
    assert_eq!(text.lines().count() - 1, pre.rear.tabulation().0.len());
}
