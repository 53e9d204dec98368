//! Time integration of a resolved scenario with diagnostics, shift tracking
//! and region sampling at the scheduled times.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::{self, background_on_grid, linf_on_region, DiagnosticsRecord, RegionError, RegionSlice};
use crate::error::{Error, Result};
use crate::riemann::Phase;
use crate::scenario::Scenario;
use crate::shift::{advance_shift, ShiftState};
use crate::solver::{FieldState, Frame, Solver, StepReport};

/// Nodal state written to a snapshot file.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub tau: f64,
    /// Node coordinates in the run's frame.
    pub y: Vec<f64>,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub omega: Vec<f64>,
}

impl Snapshot {
    pub fn of(state: &FieldState, y: &[f64]) -> Self {
        Self { tau: state.tau, y: y.to_vec(), v: state.v.clone(), u: state.u.clone(), omega: state.omega.clone() }
    }
}

/// Error against the entropy solution over one region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionOutcome {
    pub phase: Phase,
    pub error: RegionError,
    pub slices: usize,
}

/// Quantities measured over every step of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunFloors {
    /// Largest per-step mismatch between the change of `Σv dy` and the boundary flux.
    pub mass_residual: f64,
    pub momentum_residual: f64,
    /// Largest `ω` excursion clamped back into `[0, 1]`.
    pub omega_clamped: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub v_min: f64,
}

impl Default for RunFloors {
    fn default() -> Self {
        Self {
            mass_residual: 0.0,
            momentum_residual: 0.0,
            omega_clamped: 0.0,
            omega_min: f64::INFINITY,
            omega_max: f64::NEG_INFINITY,
            v_min: f64::INFINITY,
        }
    }
}

impl RunFloors {
    fn observe(&mut self, state: &FieldState) {
        let (lo, hi) = state.omega_range();
        self.omega_min = self.omega_min.min(lo);
        self.omega_max = self.omega_max.max(hi);
        self.v_min = self.v_min.min(state.min_v());
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<DiagnosticsRecord>,
    pub snapshots: Vec<Snapshot>,
    pub regions: Vec<RegionOutcome>,
    pub shift: Option<ShiftState>,
    pub final_state: FieldState,
    pub steps: usize,
    pub floors: RunFloors,
}

const DIAG: u8 = 1;
const SNAP: u8 = 2;
const REGION: u8 = 4;

/// Sorted stop times with what to do at each.
fn schedule(scenario: &Scenario) -> Result<Vec<(f64, u8)>> {
    let (t0, t1) = (scenario.tau_start, scenario.tau_end);
    let mut events: Vec<(f64, u8)> = vec![(t0, DIAG | SNAP), (t1, DIAG | SNAP)];
    let push_grid = |events: &mut Vec<(f64, u8)>, step: f64, flag: u8| {
        let count = ((t1 - t0) / step).floor() as usize;
        for k in 1..=count {
            events.push((t0 + k as f64 * step, flag));
        }
    };
    push_grid(&mut events, scenario.config.run.cadence, DIAG);
    if let Some(c) = scenario.config.run.snapshot_cadence {
        push_grid(&mut events, c, SNAP);
    }
    if t0 < 0.0 && t1 > 0.0 {
        events.push((0.0, DIAG));
    }
    if let Some(rc) = scenario.config.region {
        let (_, tc) = scenario.fan.interaction_point()?;
        let eps = scenario.config.run.epsilon;
        for spec in &scenario.regions {
            for t in spec.sample_times(&scenario.fan, rc.slices)? {
                let tau = (t - tc) / eps;
                if tau >= t0 && tau <= t1 {
                    events.push((tau, REGION));
                }
            }
        }
    }
    events.retain(|e| e.0 >= t0 && e.0 <= t1);
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, u8)> = Vec::with_capacity(events.len());
    let tol = 1e-9 * (1.0 + t0.abs().max(t1.abs()));
    for (tau, flag) in events {
        match merged.last_mut() {
            Some(last) if (tau - last.0).abs() <= tol => {
                // keep the exact endpoints
                if tau == t1 || tau == t0 {
                    last.0 = tau;
                }
                last.1 |= flag;
            }
            _ => merged.push((tau, flag)),
        }
    }
    Ok(merged)
}

/// Offset of the background coordinate: `ξ = y - offset`.
fn frame_offset(frame: Frame, s_tilde2: f64, tau: f64) -> f64 {
    match frame {
        Frame::Rest => s_tilde2 * tau,
        Frame::Moving { .. } => 0.0,
    }
}

struct Tracker<'a> {
    scenario: &'a Scenario,
    shift: Option<ShiftState>,
    prev_v: Vec<f64>,
    prev_mass: f64,
    prev_momentum: f64,
    floors: RunFloors,
    /// Per-step residual maxima since the last record.
    window_mass: f64,
    window_momentum: f64,
}

impl Tracker<'_> {
    fn interior(dy: f64, values: &[f64]) -> f64 {
        dy * values[1..values.len() - 1].iter().sum::<f64>()
    }

    fn on_step(&mut self, state: &FieldState, report: &StepReport) -> Result<()> {
        let dy = self.scenario.grid.dy();
        let mass = Self::interior(dy, &state.v);
        let momentum = Self::interior(dy, &state.u);
        let rm = ((mass - self.prev_mass) - report.mass).abs();
        let rp = ((momentum - self.prev_momentum) - report.momentum).abs();
        self.floors.mass_residual = self.floors.mass_residual.max(rm);
        self.floors.momentum_residual = self.floors.momentum_residual.max(rp);
        self.window_mass = self.window_mass.max(rm);
        self.window_momentum = self.window_momentum.max(rp);
        self.floors.omega_clamped = self.floors.omega_clamped.max(report.clamped);
        self.floors.observe(state);
        self.prev_mass = mass;
        self.prev_momentum = momentum;

        let tau_prev = state.tau - report.dt;
        if let (Some(shift), Some(functional)) = (self.shift.as_mut(), self.scenario.shift.as_ref()) {
            if tau_prev >= 0.0 {
                // midpoint rule on the shift ODE with the half-step volume field
                let tau_mid = tau_prev + 0.5 * report.dt;
                let x_mid = shift.x + 0.5 * report.dt * shift.xdot;
                for (p, v) in self.prev_v.iter_mut().zip(&state.v) {
                    *p = 0.5 * (*p + v);
                }
                let offset = frame_offset(self.scenario.frame, functional.background.s_tilde2, tau_mid);
                let rate = functional.xdot(&self.scenario.grid, offset, &self.prev_v, tau_mid, x_mid)?;
                *shift = advance_shift(std::mem::take(shift), rate, report.dt);
                shift.tau = state.tau;
            }
        }
        self.prev_v.copy_from_slice(&state.v);
        Ok(())
    }
}

/// Runs the scenario; `hook` sees every diagnostics record as it is made.
pub fn run(scenario: &Scenario, hook: &mut dyn FnMut(&DiagnosticsRecord)) -> Result<RunOutput> {
    run_with_failure_dump(scenario, hook, None)
}

/// As [`run`]; on an integration failure the failing state is written as a
/// snapshot into `failure_dir` and its path is attached to the error.
pub fn run_with_failure_dump(
    scenario: &Scenario,
    hook: &mut dyn FnMut(&DiagnosticsRecord),
    failure_dir: Option<&Path>,
) -> Result<RunOutput> {
    let mut state = scenario.initial_state()?;
    let mut solver = Solver::new(scenario.law, scenario.grid, scenario.frame);
    let y = scenario.grid.nodes();
    let dy = scenario.grid.dy();
    let cfl = scenario.config.run.cfl;
    let events = schedule(scenario)?;

    let mut tracker = Tracker {
        scenario,
        shift: scenario.shift.as_ref().map(|_| ShiftState::new(0.0)),
        prev_v: state.v.clone(),
        prev_mass: Tracker::interior(dy, &state.v),
        prev_momentum: Tracker::interior(dy, &state.u),
        floors: RunFloors::default(),
        window_mass: 0.0,
        window_momentum: 0.0,
    };
    tracker.floors.observe(&state);

    let mut records: Vec<DiagnosticsRecord> = Vec::new();
    let mut snapshots = Vec::new();
    let mut region_acc: Vec<Option<RegionOutcome>> = vec![None; scenario.regions.len()];
    let mut steps = 0;
    let mut dissipation_integral = 0.0;
    let mut last_dissipation: Option<(f64, f64)> = None;

    for (target, flags) in events {
        if target > state.tau {
            let mut cb = |s: &FieldState, r: &StepReport| tracker.on_step(s, r);
            match solver.advance_to(&mut state, target, cfl, &mut cb) {
                Ok(n) => steps += n,
                Err(Error::Integration { tau, reason, .. }) => {
                    let snapshot = match failure_dir {
                        Some(dir) => Some(crate::output::write_failure_snapshot(dir, &Snapshot::of(&state, &y))?),
                        None => None,
                    };
                    return Err(Error::Integration { tau, reason, snapshot });
                }
                Err(e) => return Err(e),
            }
        }
        let tau = state.tau;
        let shift_x = tracker.shift.as_ref().filter(|_| tau >= 0.0).map_or(0.0, |s| s.x);
        if flags & DIAG != 0 {
            let composite = scenario.composite_at(tau)?;
            let weight = scenario.shift.as_ref().map(|f| &f.weight);
            let bg = background_on_grid(&composite, &scenario.grid, scenario.frame, tau, shift_x, weight)?;
            let (mut rec, diss) = diagnostics::record(&state, &bg, weight.filter(|_| bg.post.is_some()), &scenario.law, dy)?;
            rec.xdot = match (&tracker.shift, bg.post.is_some()) {
                (Some(s), true) => s.xdot,
                _ => f64::NAN,
            };
            if let Some(d) = diss {
                let total = d.total();
                if let Some((t_prev, d_prev)) = last_dissipation {
                    dissipation_integral += 0.5 * (tau - t_prev) * (total + d_prev);
                }
                last_dissipation = Some((tau, total));
                rec.dissipation_integral = dissipation_integral;
            }
            rec.mass_residual = tracker.window_mass;
            rec.momentum_residual = tracker.window_momentum;
            tracker.window_mass = 0.0;
            tracker.window_momentum = 0.0;
            hook(&rec);
            records.push(rec);
        }
        if flags & SNAP != 0 {
            snapshots.push(Snapshot::of(&state, &y));
        }
        if flags & REGION != 0 {
            sample_regions(scenario, &state, &y, &mut region_acc)?;
        }
    }

    let mut regions = Vec::new();
    for (spec, acc) in scenario.regions.iter().zip(region_acc) {
        match acc {
            Some(o) => regions.push(o),
            None => {
                return Err(Error::EmptySample(format!("no sample fell inside the {:?} region", spec.phase)));
            }
        }
    }
    Ok(RunOutput {
        records,
        snapshots,
        regions,
        shift: tracker.shift,
        final_state: state,
        steps,
        floors: tracker.floors,
    })
}

fn sample_regions(scenario: &Scenario, state: &FieldState, y: &[f64], acc: &mut [Option<RegionOutcome>]) -> Result<()> {
    let eps = scenario.config.run.epsilon;
    let rest_y: Vec<f64>;
    let y_rest = match scenario.frame {
        Frame::Rest => y,
        Frame::Moving { speed } => {
            rest_y = y.iter().map(|v| v + speed * state.tau).collect();
            &rest_y
        }
    };
    let slice = RegionSlice { tau: state.tau, y: y_rest, v: &state.v, u: &state.u, omega: &state.omega };
    let (_, tc) = scenario.fan.interaction_point()?;
    let t = tc + eps * state.tau;
    for (spec, slot) in scenario.regions.iter().zip(acc.iter_mut()) {
        let (lo, hi) = spec.time_window(&scenario.fan)?;
        if t < lo || t > hi {
            continue;
        }
        let err = match linf_on_region(&[slice], &scenario.fan, spec, eps) {
            Ok(e) => e,
            Err(Error::EmptySample(_)) => continue,
            Err(e) => return Err(e),
        };
        *slot = Some(match slot.take() {
            None => RegionOutcome { phase: spec.phase, error: err, slices: 1 },
            Some(o) => RegionOutcome { phase: o.phase, error: o.error.merge(err), slices: o.slices + 1 },
        });
    }
    Ok(())
}

/// Path of the failure snapshot for a given `τ`.
pub fn failure_snapshot_name(tau: f64) -> PathBuf {
    PathBuf::from(format!("failure_tau_{tau:.6}.csv"))
}
