//! Run directories: manifest, diagnostics table and snapshots, written to a
//! staging directory and moved into place in one rename.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::profiles::{ShockProfile, RESIDUAL_TOLERANCE};
use crate::riemann::WaveFan;
use crate::run::{self, RegionOutcome, RunFloors, RunOutput, Snapshot};
use crate::scenario::{Scenario, ScenarioConfig};
use crate::solver::{Frame, OMEGA_CLAMP_SLACK, OMEGA_FLOOR};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const RUN_SCHEMA: &str = "nsac-run/1";
pub const SWEEP_SCHEMA: &str = "nsac-sweep/1";

/// Hex digits of the config hash used in directory names.
const HASH_PREFIX: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRecord {
    pub y_min: f64,
    pub y_max: f64,
    pub n: usize,
    pub dy: f64,
    pub frame: Frame,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub tail: f64,
    pub profile_residual: f64,
    pub omega_floor: f64,
    pub omega_clamp_slack: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftRecord {
    pub x_final: f64,
    pub xdot_final: f64,
    pub lambda: f64,
    pub m0: f64,
    pub scale_separated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    pub file: String,
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileInventory {
    pub diagnostics: String,
    pub snapshots: Vec<SnapshotEntry>,
}

/// Everything needed to reproduce and interpret a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub code_version: String,
    pub config_hash: String,
    pub config: ScenarioConfig,
    pub fan: WaveFan,
    pub grid: GridRecord,
    pub tau_start: f64,
    pub tau_end: f64,
    pub tolerances: Tolerances,
    pub floors: RunFloors,
    pub regions: Vec<RegionOutcome>,
    pub shift: Option<ShiftRecord>,
    pub steps: usize,
    pub wall_clock_seconds: f64,
    pub files: FileInventory,
}

/// Directory name of the run for `config`.
pub fn run_dir_name(config: &ScenarioConfig) -> String {
    format!("run-{}", &config.content_hash()[..HASH_PREFIX])
}

#[derive(Serialize)]
struct SnapshotRow {
    y: f64,
    v: f64,
    u: f64,
    omega: f64,
}

pub fn write_snapshot(path: &Path, snap: &Snapshot) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    for i in 0..snap.y.len() {
        w.serialize(SnapshotRow { y: snap.y[i], v: snap.v[i], u: snap.u[i], omega: snap.omega[i] })
            .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct SnapshotIn {
    y: f64,
    v: f64,
    u: f64,
    omega: f64,
}

pub fn read_snapshot(path: &Path, tau: f64) -> Result<Snapshot> {
    let mut r = csv::Reader::from_path(path).map_err(csv_error)?;
    let mut s = Snapshot { tau, y: vec![], v: vec![], u: vec![], omega: vec![] };
    for row in r.deserialize() {
        let row: SnapshotIn = row.map_err(csv_error)?;
        s.y.push(row.y);
        s.v.push(row.v);
        s.u.push(row.u);
        s.omega.push(row.omega);
    }
    Ok(s)
}

#[derive(Serialize)]
struct ProfileRow {
    xi: f64,
    #[serde(rename = "V")]
    v: f64,
    #[serde(rename = "U")]
    u: f64,
    residual: f64,
}

/// Tabulated shock profile with columns `xi, V, U, residual`, the residual
/// being the discrete traveling-wave residual at each node.
pub fn write_profile(path: &Path, profile: &ShockProfile) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    let (xi, v) = profile.tabulation();
    let residuals = profile.residuals();
    for i in 0..xi.len() {
        let u = profile.left.1 - profile.speed * (v[i] - profile.left.0);
        w.serialize(ProfileRow { xi: xi[i], v: v[i], u, residual: residuals[i] }).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_diagnostics(path: &Path, records: &[DiagnosticsRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    for r in records {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_diagnostics(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_error)?;
    r.deserialize().map(|row| row.map_err(csv_error)).collect()
}

pub fn read_manifest(dir: &Path) -> Result<RunManifest> {
    let text = fs::read_to_string(dir.join(MANIFEST_FILE))?;
    let m: RunManifest = serde_json::from_str(&text)?;
    if m.schema != RUN_SCHEMA {
        return Err(Error::Config(format!("manifest schema {} is not {RUN_SCHEMA}", m.schema)));
    }
    Ok(m)
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{other:?}"))),
    }
}

/// Writes a failing state next to other failures and returns its path.
pub fn write_failure_snapshot(dir: &Path, snap: &Snapshot) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(run::failure_snapshot_name(snap.tau));
    write_snapshot(&path, snap)?;
    Ok(path)
}

/// Stages the run directory under `out` and renames it into place.
pub fn write_run(out: &Path, scenario: &Scenario, output: &RunOutput, wall_clock_seconds: f64) -> Result<(PathBuf, RunManifest)> {
    fs::create_dir_all(out)?;
    let name = run_dir_name(&scenario.config);
    let target = out.join(&name);
    let staging = out.join(format!(".staging-{name}-{}", std::process::id()));
    if staging.exists() {
        fs::remove_dir_all(&staging)?;
    }
    fs::create_dir_all(&staging)?;
    let result = (|| {
        write_diagnostics(&staging.join(DIAGNOSTICS_FILE), &output.records)?;
        let mut snapshots = Vec::new();
        for (k, s) in output.snapshots.iter().enumerate() {
            let file = format!("snapshot_{k:04}.csv");
            write_snapshot(&staging.join(&file), s)?;
            snapshots.push(SnapshotEntry { file, tau: s.tau });
        }
        let manifest = build_manifest(scenario, output, wall_clock_seconds, snapshots);
        fs::write(staging.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)?)?;
        Ok::<_, Error>(manifest)
    })();
    let manifest = match result {
        Ok(m) => m,
        Err(e) => {
            let _ = fs::remove_dir_all(&staging);
            return Err(e);
        }
    };
    if target.exists() {
        fs::remove_dir_all(&target)?;
    }
    fs::rename(&staging, &target)?;
    Ok((target, manifest))
}

fn build_manifest(scenario: &Scenario, output: &RunOutput, wall_clock_seconds: f64, snapshots: Vec<SnapshotEntry>) -> RunManifest {
    let g = scenario.grid;
    RunManifest {
        schema: RUN_SCHEMA.into(),
        code_version: env!("CARGO_PKG_VERSION").into(),
        config_hash: scenario.config.content_hash(),
        config: scenario.config.clone(),
        fan: scenario.fan.clone(),
        grid: GridRecord { y_min: g.y_min(), y_max: g.y_max(), n: g.len(), dy: g.dy(), frame: scenario.frame },
        tau_start: scenario.tau_start,
        tau_end: scenario.tau_end,
        tolerances: Tolerances {
            tail: scenario.config.profiles.tail_tol,
            profile_residual: RESIDUAL_TOLERANCE,
            omega_floor: OMEGA_FLOOR,
            omega_clamp_slack: OMEGA_CLAMP_SLACK,
        },
        floors: output.floors,
        regions: output.regions.clone(),
        shift: match (&output.shift, &scenario.shift) {
            (Some(s), Some(f)) => Some(ShiftRecord {
                x_final: s.x,
                xdot_final: s.xdot,
                lambda: f.weight.lambda,
                m0: f.m0,
                scale_separated: f.weight.scale_separated(),
            }),
            _ => None,
        },
        steps: output.steps,
        wall_clock_seconds,
        files: FileInventory { diagnostics: DIAGNOSTICS_FILE.into(), snapshots },
    }
}

/// Resolves, runs and writes one scenario. Failure snapshots go to
/// `out/failures`.
pub fn simulate(config: ScenarioConfig, out: &Path, hook: &mut dyn FnMut(&DiagnosticsRecord)) -> Result<(PathBuf, RunManifest)> {
    let start = Instant::now();
    let scenario = Scenario::resolve(config)?;
    let failures = out.join("failures").join(run_dir_name(&scenario.config));
    let output = run::run_with_failure_dump(&scenario, hook, Some(&failures))?;
    write_run(out, &scenario, &output, start.elapsed().as_secs_f64())
}

/// One ε of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub ok: bool,
    pub error: Option<String>,
    pub run_dir: Option<String>,
    pub sup_error_pre: Option<f64>,
    pub sup_error_post: Option<f64>,
    /// Larger of the two region errors.
    pub sup_error: Option<f64>,
    pub runtime_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub schema: String,
    pub code_version: String,
    pub config_hash: String,
    pub rows: Vec<SweepRow>,
}

pub fn read_summary(dir: &Path) -> Result<SweepSummary> {
    let s: SweepSummary = serde_json::from_str(&fs::read_to_string(dir.join(SUMMARY_FILE))?)?;
    if s.schema != SWEEP_SCHEMA {
        return Err(Error::Config(format!("summary schema {} is not {SWEEP_SCHEMA}", s.schema)));
    }
    Ok(s)
}

/// Runs the scenario once per ε on up to `threads` workers and writes
/// `summary.json` under `out`. A failed ε is recorded, not propagated.
pub fn sweep_eps(base: &ScenarioConfig, eps: &[f64], out: &Path, threads: Option<usize>) -> Result<SweepSummary> {
    if eps.is_empty() {
        return Err(Error::Config("--eps: the ladder is empty".into()));
    }
    for &e in eps {
        if !(e > 0.0 && e.is_finite()) {
            return Err(Error::Config(format!("--eps: every epsilon must be positive, got {e}")));
        }
    }
    base.validate()?;
    fs::create_dir_all(out)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t.max(1));
    }
    let pool = builder.build().map_err(|e| Error::Config(format!("NSAC_THREADS: {e}")))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        use rayon::prelude::*;
        eps.par_iter()
            .map(|&e| {
                let start = Instant::now();
                let mut cfg = base.clone();
                cfg.run.epsilon = e;
                let result = simulate(cfg, out, &mut |_| {});
                let runtime_seconds = start.elapsed().as_secs_f64();
                match result {
                    Ok((dir, m)) => {
                        let pick = |ph| m.regions.iter().find(|r| r.phase == ph).map(|r| r.error.sup);
                        let pre = pick(crate::riemann::Phase::Pre);
                        let post = pick(crate::riemann::Phase::Post);
                        let sup = match (pre, post) {
                            (None, None) => None,
                            (a, b) => Some(a.unwrap_or(0.0).max(b.unwrap_or(0.0))),
                        };
                        SweepRow {
                            epsilon: e,
                            ok: true,
                            error: None,
                            run_dir: dir.file_name().map(|n| n.to_string_lossy().into_owned()),
                            sup_error_pre: pre,
                            sup_error_post: post,
                            sup_error: sup,
                            runtime_seconds,
                        }
                    }
                    Err(err) => {
                        log::warn!("epsilon = {e} failed: {err}");
                        SweepRow {
                            epsilon: e,
                            ok: false,
                            error: Some(err.to_string()),
                            run_dir: None,
                            sup_error_pre: None,
                            sup_error_post: None,
                            sup_error: None,
                            runtime_seconds,
                        }
                    }
                }
            })
            .collect()
    });
    let summary = SweepSummary {
        schema: SWEEP_SCHEMA.into(),
        code_version: env!("CARGO_PKG_VERSION").into(),
        config_hash: base.content_hash(),
        rows,
    };
    let tmp = out.join(format!(".{SUMMARY_FILE}.{}", std::process::id()));
    fs::write(&tmp, serde_json::to_string_pretty(&summary)?)?;
    fs::rename(&tmp, out.join(SUMMARY_FILE))?;
    Ok(summary)
}

/// Least-squares slope of `ln(error)` against `ln(ε)` over the successful rows.
pub fn convergence_slope(summary: &SweepSummary) -> Option<f64> {
    let pts: Vec<(f64, f64)> = summary
        .rows
        .iter()
        .filter_map(|r| r.sup_error.filter(|e| *e > 0.0).map(|e| (r.epsilon.ln(), e.ln())))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
