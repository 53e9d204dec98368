//! Plain-text summaries of run and sweep directories.

use std::fmt::Write;
use std::path::Path;

use crate::diagnostics::{fit_decay, DECAY_TRANSIENT_FRACTION};
use crate::error::{Error, Result};
use crate::output::{convergence_slope, read_diagnostics, read_manifest, read_summary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    Run,
    Sweep,
}

impl std::str::FromStr for ReportKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "run" => Ok(ReportKind::Run),
            "sweep" => Ok(ReportKind::Sweep),
            other => Err(Error::Config(format!("report kind must be `run` or `sweep`, got `{other}`"))),
        }
    }
}

pub fn report(kind: ReportKind, dir: &Path) -> Result<String> {
    match kind {
        ReportKind::Run => report_run(dir),
        ReportKind::Sweep => report_sweep(dir),
    }
}

pub fn report_run(dir: &Path) -> Result<String> {
    let m = read_manifest(dir)?;
    let records = read_diagnostics(&dir.join(&m.files.diagnostics))?;
    let mut s = String::new();
    let c = &m.config;
    writeln!(s, "run {} (config {})", dir.display(), &m.config_hash[..16]).unwrap();
    writeln!(s, "mode {:?}, epsilon {}, frame {:?}", c.run.mode, c.run.epsilon, m.grid.frame).unwrap();
    writeln!(s, "grid [{}, {}] n={} dy={:.5}", m.grid.y_min, m.grid.y_max, m.grid.n, m.grid.dy).unwrap();
    writeln!(s, "tau [{}, {}] in {} steps, {:.1} s", m.tau_start, m.tau_end, m.steps, m.wall_clock_seconds).unwrap();
    writeln!(s, "v_m {:.10}, u_m {:.10}", m.fan.v_m, m.fan.u_m).unwrap();
    if let (Some(first), Some(last)) = (records.first(), records.last()) {
        writeln!(s, "perturbation sup {:.4e} -> {:.4e}", first.perturbation_sup, last.perturbation_sup).unwrap();
        let series: Vec<(f64, f64)> = records.iter().map(|r| (r.tau, r.perturbation_sup)).collect();
        match fit_decay(&series, DECAY_TRANSIENT_FRACTION) {
            Ok(f) => writeln!(s, "fitted decay rate {:.4e} (rms log residual {:.3e})", f.rate, f.residual).unwrap(),
            Err(e) => writeln!(s, "fitted decay rate unavailable: {e}").unwrap(),
        }
        let post: Vec<_> = records.iter().filter(|r| r.weighted_entropy.is_finite()).collect();
        if let (Some(a), Some(b)) = (post.first(), post.last()) {
            writeln!(s, "weighted relative entropy {:.4e} -> {:.4e}", a.weighted_entropy, b.weighted_entropy).unwrap();
            writeln!(s, "time-integrated dissipation {:.4e}", b.dissipation_integral).unwrap();
        }
    }
    if let Some(sh) = &m.shift {
        writeln!(s, "shift X {:.6e}, Xdot {:.3e}, lambda {:.4}, m0 {:.4}", sh.x_final, sh.xdot_final, sh.lambda, sh.m0).unwrap();
    }
    let f = &m.floors;
    writeln!(
        s,
        "balance residuals: mass {:.2e}, momentum {:.2e}; omega in [{:.12}, {:.12}]",
        f.mass_residual, f.momentum_residual, f.omega_min, f.omega_max
    )
    .unwrap();
    for r in &m.regions {
        writeln!(
            s,
            "{:?} region: sup error {:.4e} over {} samples in {} slices",
            r.phase, r.error.sup, r.error.samples, r.slices
        )
        .unwrap();
    }
    Ok(s)
}

pub fn report_sweep(dir: &Path) -> Result<String> {
    let summary = read_summary(dir)?;
    let mut s = String::new();
    writeln!(s, "{:>10} {:>6} {:>12} {:>12} {:>12} {:>9}", "epsilon", "status", "pre", "post", "sup", "seconds").unwrap();
    let cell = |x: Option<f64>| x.map_or_else(|| "-".to_string(), |v| format!("{v:.4e}"));
    for r in &summary.rows {
        writeln!(
            s,
            "{:>10} {:>6} {:>12} {:>12} {:>12} {:>9.1}",
            r.epsilon,
            if r.ok { "ok" } else { "failed" },
            cell(r.sup_error_pre),
            cell(r.sup_error_post),
            cell(r.sup_error),
            r.runtime_seconds
        )
        .unwrap();
        if let Some(e) = &r.error {
            writeln!(s, "    {e}").unwrap();
        }
    }
    match convergence_slope(&summary) {
        Some(k) => writeln!(s, "log-log slope of sup error against epsilon: {k:.6}").unwrap(),
        None => writeln!(s, "log-log slope unavailable (fewer than two successful rows)").unwrap(),
    }
    Ok(s)
}
