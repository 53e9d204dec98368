//! Explicit finite-difference integration of the scaled NSAC system
//!
//! ```text
//! v_τ = u_y
//! u_τ = -p(v)_y + (u_y/v)_y - (1/8)(ω_y²/(ω v²))_y
//! ω_τ = -2v(ω - 1)ω + v(ω_y/v)_y - ω_y²/(2ω)
//! ```
//!
//! on a truncated line with Dirichlet far-field nodes. In the frame moving with
//! speed `c` every equation gains `+c·(·)_ξ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::psystem::GasLaw;

/// Regularization of `ω` inside the capillary divisions.
pub const OMEGA_FLOOR: f64 = 1e-12;
/// Largest excursion of `ω` outside `[0, 1]` that is clamped instead of reported.
pub const OMEGA_CLAMP_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Frame {
    Rest,
    Moving { speed: f64 },
}

impl Frame {
    pub fn speed(&self) -> f64 {
        match *self {
            Frame::Rest => 0.0,
            Frame::Moving { speed } => speed,
        }
    }
}

/// Nodal values of `(v, u, ω)` at time `τ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub omega: Vec<f64>,
    pub tau: f64,
    pub frame: Frame,
}

impl FieldState {
    pub fn constant(n: usize, v: f64, u: f64, omega: f64, frame: Frame) -> Self {
        Self { v: vec![v; n], u: vec![u; n], omega: vec![omega; n], tau: 0.0, frame }
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn min_v(&self) -> f64 {
        self.v.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn omega_range(&self) -> (f64, f64) {
        self.omega
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &w| (lo.min(w), hi.max(w)))
    }

    /// Checks positivity of `v`, finiteness, and `ω ∈ [-slack, 1 + slack]`.
    pub fn validate(&self, slack: f64) -> Result<()> {
        for i in 0..self.len() {
            let (v, u, w) = (self.v[i], self.u[i], self.omega[i]);
            if !(v > 0.0) || !v.is_finite() || !u.is_finite() || !w.is_finite() {
                return Err(self.failure(format!("non-physical state at node {i}: v = {v}, u = {u}, omega = {w}")));
            }
            if w < -slack || w > 1.0 + slack {
                return Err(self.failure(format!("omega = {w} left [0, 1] at node {i}")));
            }
        }
        Ok(())
    }

    fn failure(&self, reason: String) -> Error {
        Error::Integration { tau: self.tau, reason, snapshot: None }
    }
}

/// Time derivatives of the three fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Rates {
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub omega: Vec<f64>,
}

impl Rates {
    fn zeros(n: usize) -> Self {
        Self { v: vec![0.0; n], u: vec![0.0; n], omega: vec![0.0; n] }
    }
}

/// Fluxes through the first and last interior faces, integrated over one step.
/// `Σ v_i dy` over interior nodes changes by exactly `mass`, `Σ u_i dy` by
/// `momentum`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepReport {
    pub dt: f64,
    pub mass: f64,
    pub momentum: f64,
    /// Largest `ω` excursion outside `[0, 1]` that was clamped.
    pub clamped: f64,
}

/// Additional forcing `(f_v, f_u, f_ω)(y, τ)`.
pub type Source = dyn Fn(f64, f64) -> [f64; 3] + Send + Sync;

/// The semi-discrete operator plus the time stepper.
pub struct Solver {
    pub law: GasLaw,
    pub grid: Grid1D,
    pub frame: Frame,
    pub omega_floor: f64,
    source: Option<Box<Source>>,
    nodes: Vec<f64>,
    scratch: Option<Box<(FieldState, FieldState, Rates)>>,
}

impl std::fmt::Debug for Solver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Solver")
            .field("law", &self.law)
            .field("grid", &self.grid)
            .field("frame", &self.frame)
            .field("source", &self.source.is_some())
            .finish()
    }
}

impl Solver {
    pub fn new(law: GasLaw, grid: Grid1D, frame: Frame) -> Self {
        Self { law, grid, frame, omega_floor: OMEGA_FLOOR, source: None, nodes: grid.nodes(), scratch: None }
    }

    pub fn with_source(mut self, source: Box<Source>) -> Self {
        self.source = Some(source);
        self
    }

    /// Semi-discrete right-hand side; boundary nodes get zero rates.
    pub fn rhs(&self, state: &FieldState) -> Rates {
        let mut out = Rates::zeros(state.len());
        self.rhs_into(state, &mut out);
        out
    }

    /// Writes the right-hand side into `out` and returns the face fluxes of
    /// `v` and `u` through the first and last interior faces as
    /// `(mass, momentum)` net inflow rates.
    pub fn rhs_into(&self, state: &FieldState, out: &mut Rates) -> (f64, f64) {
        let n = state.len();
        let h = self.grid.dy();
        let c = self.frame.speed();
        let gamma = self.law.gamma();
        let (v, u, w) = (&state.v, &state.u, &state.omega);
        let floor = self.omega_floor;

        // Face fluxes at i+1/2 for i = 0..n-1.
        let mut prev_fv = 0.0;
        let mut prev_fu = 0.0;
        let mut prev_q = 0.0; // (ω_y / v) at the face
        let mut first = (0.0, 0.0);
        let mut last = (0.0, 0.0);
        let mut p_i = v[0].powf(-gamma);
        for i in 0..n - 1 {
            let p_next = v[i + 1].powf(-gamma);
            let vf = 0.5 * (v[i] + v[i + 1]);
            let wf = (0.5 * (w[i] + w[i + 1])).max(floor);
            let du = (u[i + 1] - u[i]) / h;
            let dw = (w[i + 1] - w[i]) / h;
            let fv = 0.5 * (u[i] + u[i + 1]) + c * vf;
            let fu = -0.5 * (p_i + p_next) + du / vf - 0.125 * dw * dw / (wf * vf * vf) + c * 0.5 * (u[i] + u[i + 1]);
            let q = dw / vf;
            if i == 0 {
                first = (fv, fu);
            } else {
                out.v[i] = (fv - prev_fv) / h;
                out.u[i] = (fu - prev_fu) / h;
                let wi = w[i].max(floor);
                let wy = (w[i + 1] - w[i - 1]) / (2.0 * h);
                out.omega[i] = -2.0 * v[i] * (w[i] - 1.0) * w[i] + v[i] * (q - prev_q) / h - wy * wy / (2.0 * wi) + c * wy;
            }
            if i == n - 2 {
                last = (fv, fu);
            }
            prev_fv = fv;
            prev_fu = fu;
            prev_q = q;
            p_i = p_next;
        }
        out.v[0] = 0.0;
        out.u[0] = 0.0;
        out.omega[0] = 0.0;
        out.v[n - 1] = 0.0;
        out.u[n - 1] = 0.0;
        out.omega[n - 1] = 0.0;
        let mut src_mass = 0.0;
        let mut src_mom = 0.0;
        if let Some(src) = &self.source {
            for i in 1..n - 1 {
                let f = src(self.nodes[i], state.tau);
                out.v[i] += f[0];
                out.u[i] += f[1];
                out.omega[i] += f[2];
                src_mass += f[0] * h;
                src_mom += f[1] * h;
            }
        }
        (last.0 - first.0 + src_mass, last.1 - first.1 + src_mom)
    }

    /// Largest stable step: advective, viscous and phase-diffusion limits.
    pub fn stable_dt(&self, state: &FieldState, cfl_safety: f64) -> f64 {
        let h = self.grid.dy();
        let c = self.frame.speed().abs();
        let mut speed: f64 = 0.0;
        let mut v_min = f64::INFINITY;
        for i in 0..state.len() {
            let lam = self.law.sound_speed(state.v[i]);
            speed = speed.max((state.u[i].abs() + lam).max(c + lam));
            v_min = v_min.min(state.v[i]);
        }
        cfl_safety * (h / speed).min(h * h * v_min / 2.0).min(h * h / 2.0)
    }

    /// One three-stage SSP Runge–Kutta step.
    pub fn step(&mut self, state: &mut FieldState, dt: f64) -> Result<StepReport> {
        let n = state.len();
        let mut scratch = self
            .scratch
            .take()
            .filter(|s| s.0.len() == n)
            .unwrap_or_else(|| Box::new((state.clone(), state.clone(), Rates::zeros(n))));
        let result = self.ssp_rk3(state, dt, &mut scratch);
        self.scratch = Some(scratch);
        result
    }

    fn ssp_rk3(&self, state: &mut FieldState, dt: f64, scratch: &mut (FieldState, FieldState, Rates)) -> Result<StepReport> {
        let (s1, s2, k) = scratch;
        let tau0 = state.tau;

        let (m0, p0) = self.rhs_into(state, k);
        combine(s1, state, k, dt);
        s1.tau = tau0 + dt;
        s1.validate(f64::INFINITY)?;

        let (m1, p1) = self.rhs_into(s1, k);
        combine_two(s2, 0.75, state, 0.25, s1, k, 0.25 * dt);
        s2.tau = tau0 + 0.5 * dt;
        s2.validate(f64::INFINITY)?;

        let (m2, p2) = self.rhs_into(s2, k);
        let third = 1.0 / 3.0;
        let two_thirds = 2.0 / 3.0;
        for i in 1..state.len() - 1 {
            state.v[i] = third * state.v[i] + two_thirds * (s2.v[i] + dt * k.v[i]);
            state.u[i] = third * state.u[i] + two_thirds * (s2.u[i] + dt * k.u[i]);
            state.omega[i] = third * state.omega[i] + two_thirds * (s2.omega[i] + dt * k.omega[i]);
        }
        state.tau = tau0 + dt;

        let mut clamped: f64 = 0.0;
        for i in 0..state.len() {
            let w = state.omega[i];
            let excess = (-w).max(w - 1.0);
            if excess > 0.0 {
                if excess > OMEGA_CLAMP_SLACK {
                    return Err(Error::Integration {
                        tau: state.tau,
                        reason: format!("omega overshoot {excess:e} at node {i} exceeds {OMEGA_CLAMP_SLACK:e}"),
                        snapshot: None,
                    });
                }
                state.omega[i] = w.clamp(0.0, 1.0);
                clamped = clamped.max(excess);
            }
        }
        state.validate(0.0)?;
        let h = dt / 6.0;
        Ok(StepReport {
            dt,
            mass: h * (m0 + m1) + 4.0 * h * m2,
            momentum: h * (p0 + p1) + 4.0 * h * p2,
            clamped,
        })
    }

    /// Steps until `state.tau == target`, shortening the last step to land
    /// exactly; `on_step` sees the state after every step.
    pub fn advance_to(
        &mut self,
        state: &mut FieldState,
        target: f64,
        cfl_safety: f64,
        on_step: &mut dyn FnMut(&FieldState, &StepReport) -> Result<()>,
    ) -> Result<usize> {
        let mut steps = 0;
        while state.tau < target {
            let remaining = target - state.tau;
            let mut dt = self.stable_dt(state, cfl_safety);
            if !(dt > 0.0) || !dt.is_finite() {
                return Err(Error::Integration { tau: state.tau, reason: format!("invalid time step {dt}"), snapshot: None });
            }
            let last = dt >= remaining * (1.0 - 1e-12);
            if last {
                dt = remaining;
            } else if dt > 0.5 * remaining {
                // split the remainder evenly instead of leaving a sliver
                dt = 0.5 * remaining;
            }
            self.step(state, dt)
                .and_then(|report| {
                    if last {
                        state.tau = target;
                    }
                    on_step(state, &report)
                })
                .map_err(|e| match e {
                    Error::Integration { reason, snapshot, .. } => Error::Integration { tau: state.tau, reason, snapshot },
                    other => other,
                })?;
            steps += 1;
        }
        Ok(steps)
    }

    /// `h·Σ` of a field over the interior nodes, the quantity whose change
    /// [`StepReport`] accounts for.
    pub fn interior_integral(&self, values: &[f64]) -> f64 {
        self.grid.dy() * values[1..values.len() - 1].iter().sum::<f64>()
    }
}

/// `out = s + dt·k` on interior nodes, boundary copied.
fn combine(out: &mut FieldState, s: &FieldState, k: &Rates, dt: f64) {
    out.frame = s.frame;
    let n = s.len();
    out.v[0] = s.v[0];
    out.u[0] = s.u[0];
    out.omega[0] = s.omega[0];
    out.v[n - 1] = s.v[n - 1];
    out.u[n - 1] = s.u[n - 1];
    out.omega[n - 1] = s.omega[n - 1];
    for i in 1..n - 1 {
        out.v[i] = s.v[i] + dt * k.v[i];
        out.u[i] = s.u[i] + dt * k.u[i];
        out.omega[i] = s.omega[i] + dt * k.omega[i];
    }
}

/// `out = a·x + b·y + dt_b·k` on interior nodes, boundary copied from `x`.
fn combine_two(out: &mut FieldState, a: f64, x: &FieldState, b: f64, y: &FieldState, k: &Rates, dt_b: f64) {
    out.frame = x.frame;
    let n = x.len();
    out.v[0] = x.v[0];
    out.u[0] = x.u[0];
    out.omega[0] = x.omega[0];
    out.v[n - 1] = x.v[n - 1];
    out.u[n - 1] = x.u[n - 1];
    out.omega[n - 1] = x.omega[n - 1];
    for i in 1..n - 1 {
        out.v[i] = a * x.v[i] + b * y.v[i] + dt_b * k.v[i];
        out.u[i] = a * x.u[i] + b * y.u[i] + dt_b * k.u[i];
        out.omega[i] = a * x.omega[i] + b * y.omega[i] + dt_b * k.omega[i];
    }
}

/// `(x, t) ↦ ((x - x₀)/ε, (t - t₀)/ε)`.
pub fn scale_map(x: f64, t: f64, epsilon: f64, x0: f64, t0: f64) -> (f64, f64) {
    ((x - x0) / epsilon, (t - t0) / epsilon)
}

/// Inverse of [`scale_map`].
pub fn unscale_map(y: f64, tau: f64, epsilon: f64, x0: f64, t0: f64) -> (f64, f64) {
    (x0 + epsilon * y, t0 + epsilon * tau)
}
