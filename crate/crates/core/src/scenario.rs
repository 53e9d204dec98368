//! Scenario files and their resolution into a runnable problem.
//!
//! A scenario is a TOML document; every section is optional and falls back to
//! the γ = 2 chained fixture `1 → 1.2 → 1.4`. Unknown keys are rejected.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::diagnostics::{RegionSpec, REGION_SLICES};
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::profiles::{CompositeWave, PhaseProfile, PostComposite, PreComposite, TAIL_TOLERANCE};
use crate::psystem::GasLaw;
use crate::riemann::{EndStates, Phase, WaveFan};
use crate::shift::ShiftFunctional;
use crate::solver::{FieldState, Frame};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub law: LawConfig,
    pub states: StatesConfig,
    pub run: RunConfig,
    pub grid: GridConfig,
    pub profiles: ProfilesConfig,
    pub phase: PhaseProfile,
    pub perturbation: PerturbationConfig,
    pub shift: ShiftConfig,
    pub region: Option<RegionConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LawConfig {
    pub gamma: f64,
}

impl Default for LawConfig {
    fn default() -> Self {
        Self { gamma: 2.0 }
    }
}

/// Left state, intermediate volume and right volume of the chained pair of
/// 2-shocks; the velocities follow from the Hugoniot curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StatesConfig {
    pub v_minus: f64,
    pub u_minus: f64,
    pub v_star: f64,
    pub v_plus: f64,
    /// Initial position of the front shock.
    pub offset: f64,
}

impl Default for StatesConfig {
    fn default() -> Self {
        Self { v_minus: 1.0, u_minus: 0.0, v_star: 1.2, v_plus: 1.4, offset: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunMode {
    /// From `τ = -t₀/ε` through the interaction to the horizon.
    Full,
    /// From `τ = -t₀/ε` to the interaction time `τ = 0`.
    Pre,
    /// From `τ = 0` on the outgoing composite.
    Post,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameChoice {
    Rest,
    /// Co-moving with the outgoing shock; post runs only.
    Moving,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: RunMode,
    pub epsilon: f64,
    /// Final `τ`. Defaults to 50 for post runs and to `region.post_extent/ε`
    /// for full runs; pre runs always stop at 0.
    pub horizon: Option<f64>,
    pub frame: FrameChoice,
    pub cfl: f64,
    /// `Δτ` between diagnostics records.
    pub cadence: f64,
    /// `Δτ` between snapshots; only the first and last state when absent.
    pub snapshot_cadence: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: RunMode::Post,
            epsilon: 0.05,
            horizon: None,
            frame: FrameChoice::Rest,
            cfl: 0.4,
            cadence: 0.5,
            snapshot_cadence: None,
        }
    }
}

/// Extents default to the region the waves visit plus `margin`; the node
/// count defaults to spacing `dy`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub y_min: Option<f64>,
    pub y_max: Option<f64>,
    pub n: Option<usize>,
    pub dy: f64,
    pub margin: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { y_min: None, y_max: None, n: None, dy: 0.1, margin: 20.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfilesConfig {
    /// Rarefaction smoothing width.
    pub ell: f64,
    /// Far-field tolerance of the shock profiles and of the boundary check.
    pub tail_tol: f64,
}

impl Default for ProfilesConfig {
    fn default() -> Self {
        Self { ell: 0.1, tail_tol: TAIL_TOLERANCE }
    }
}

/// Gaussian `amplitude·exp(-((y - center)/width)²)` added to `v` at the start.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerturbationConfig {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
}

impl Default for PerturbationConfig {
    fn default() -> Self {
        Self { amplitude: 0.0, center: 0.0, width: 1.0 }
    }
}

impl PerturbationConfig {
    pub fn eval(&self, y: f64) -> f64 {
        if self.amplitude == 0.0 {
            return 0.0;
        }
        let z = (y - self.center) / self.width;
        self.amplitude * (-z * z).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShiftConfig {
    pub enabled: bool,
    /// Weight amplitude; `√δ̃₂` when absent.
    pub lambda: Option<f64>,
}

impl Default for ShiftConfig {
    fn default() -> Self {
        Self { enabled: true, lambda: None }
    }
}

/// Sampling of the error against the inviscid entropy solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegionConfig {
    pub varsigma: f64,
    /// Last `t - t₀` sampled after the interaction.
    pub post_extent: f64,
    pub slices: usize,
}

impl Default for RegionConfig {
    fn default() -> Self {
        Self { varsigma: 0.2, post_extent: 1.0, slices: REGION_SLICES }
    }
}

fn config_error<T>(key: &str, msg: impl std::fmt::Display) -> Result<T> {
    Err(Error::Config(format!("{key}: {msg}")))
}

fn require_positive(key: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        config_error(key, format!("must be positive and finite, got {x}"))
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read scenario {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario config serializes")
    }

    /// Checks every value that does not need the wave fan.
    pub fn validate(&self) -> Result<()> {
        if !(self.law.gamma > 1.0 && self.law.gamma.is_finite()) {
            return config_error("law.gamma", format!("must exceed 1, got {}", self.law.gamma));
        }
        let s = &self.states;
        for (key, v) in [("states.v_minus", s.v_minus), ("states.v_star", s.v_star), ("states.v_plus", s.v_plus)] {
            require_positive(key, v)?;
        }
        if !(s.v_star >= s.v_minus) {
            return config_error("states.v_star", format!("must not be below states.v_minus for a 2-shock, got {}", s.v_star));
        }
        if !(s.v_plus >= s.v_star) {
            return config_error("states.v_plus", format!("must not be below states.v_star for a 2-shock, got {}", s.v_plus));
        }
        require_positive("states.offset", s.offset)?;
        if !s.u_minus.is_finite() {
            return config_error("states.u_minus", "must be finite");
        }
        let r = &self.run;
        require_positive("run.epsilon", r.epsilon)?;
        if let Some(h) = r.horizon {
            match r.mode {
                RunMode::Pre => return config_error("run.horizon", "pre runs stop at the interaction time; remove the key"),
                _ => require_positive("run.horizon", h)?,
            }
        }
        if !(r.cfl > 0.0 && r.cfl <= 1.0) {
            return config_error("run.cfl", format!("must lie in (0, 1], got {}", r.cfl));
        }
        require_positive("run.cadence", r.cadence)?;
        if let Some(c) = r.snapshot_cadence {
            require_positive("run.snapshot_cadence", c)?;
        }
        if r.frame == FrameChoice::Moving && r.mode != RunMode::Post {
            return config_error("run.frame", "the moving frame is available for post runs only");
        }
        let g = &self.grid;
        if let (Some(a), Some(b)) = (g.y_min, g.y_max) {
            if !(a < b) {
                return config_error("grid.y_max", format!("must exceed grid.y_min, got [{a}, {b}]"));
            }
        }
        if let Some(n) = g.n {
            if n < Grid1D::MIN_NODES {
                return config_error("grid.n", format!("needs at least {} nodes, got {n}", Grid1D::MIN_NODES));
            }
        }
        require_positive("grid.dy", g.dy)?;
        if !(g.margin >= 0.0) {
            return config_error("grid.margin", format!("must be non-negative, got {}", g.margin));
        }
        require_positive("profiles.ell", self.profiles.ell)?;
        let tol = self.profiles.tail_tol;
        if !(tol > 0.0 && tol < 1e-2) {
            return config_error("profiles.tail_tol", format!("must lie in (0, 1e-2), got {tol}"));
        }
        self.phase.validate()?;
        let p = &self.perturbation;
        if !p.amplitude.is_finite() || !p.center.is_finite() {
            return config_error("perturbation.amplitude", "must be finite");
        }
        require_positive("perturbation.width", p.width)?;
        if let Some(l) = self.shift.lambda {
            require_positive("shift.lambda", l)?;
        }
        if let Some(rg) = &self.region {
            require_positive("region.varsigma", rg.varsigma)?;
            if !(rg.post_extent > rg.varsigma) {
                return config_error("region.post_extent", format!("must exceed region.varsigma, got {}", rg.post_extent));
            }
            if rg.slices == 0 {
                return config_error("region.slices", "must be at least 1");
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical serialization, in hex.
    pub fn content_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("scenario config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    pub fn end_states(&self) -> Result<EndStates> {
        let law = GasLaw::new(self.law.gamma)?;
        let s = &self.states;
        EndStates::from_chain(law, s.v_minus, s.u_minus, s.v_star, s.v_plus)
    }

    pub fn fan(&self) -> Result<WaveFan> {
        WaveFan::solve_with_offset(self.end_states()?, self.states.offset)
    }
}

/// A validated scenario with everything the run needs.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub fan: WaveFan,
    pub law: GasLaw,
    pub pre: Option<Arc<PreComposite>>,
    pub post: Option<Arc<PostComposite>>,
    pub shift: Option<ShiftFunctional>,
    pub grid: Grid1D,
    pub frame: Frame,
    pub tau_start: f64,
    pub tau_end: f64,
    pub regions: Vec<RegionSpec>,
}

impl Scenario {
    pub fn resolve(config: ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let fan = config.fan()?;
        let law = fan.law;
        let (_, t0) = fan.interaction_point()?;
        let eps = config.run.epsilon;
        let tol = config.profiles.tail_tol;
        let mode = config.run.mode;
        let region_cfg = config.region;

        let pre = match mode {
            RunMode::Full | RunMode::Pre => Some(Arc::new(PreComposite::from_fan(&fan, tol)?)),
            RunMode::Post => None,
        };
        let post = match mode {
            RunMode::Full | RunMode::Post => Some(Arc::new(PostComposite::from_fan(&fan, config.profiles.ell, tol)?)),
            RunMode::Pre => None,
        };
        let tau_start = match mode {
            RunMode::Post => 0.0,
            _ => -t0 / eps,
        };
        let tau_end = match (mode, config.run.horizon) {
            (RunMode::Pre, _) => 0.0,
            (_, Some(h)) => h,
            (RunMode::Post, None) => 50.0,
            (RunMode::Full, None) => match region_cfg {
                Some(r) => r.post_extent / eps,
                None => return config_error("run.horizon", "required for full runs without a [region] section"),
            },
        };
        let frame = match config.run.frame {
            FrameChoice::Rest => Frame::Rest,
            FrameChoice::Moving => Frame::Moving { speed: post.as_ref().expect("post run").s_tilde2 },
        };

        let shift = match (&post, config.shift.enabled) {
            (Some(p), true) => Some(ShiftFunctional::new(p.clone(), config.shift.lambda)?),
            _ => None,
        };

        let mut regions = Vec::new();
        if let Some(r) = region_cfg {
            let phases: &[Phase] = match mode {
                RunMode::Full => &[Phase::Pre, Phase::Post],
                RunMode::Pre => &[Phase::Pre],
                RunMode::Post => &[],
            };
            for &ph in phases {
                regions.push(RegionSpec::new(r.varsigma, ph, r.post_extent)?);
            }
            if mode == RunMode::Full && r.post_extent / eps > tau_end * (1.0 + 1e-12) {
                return config_error(
                    "run.horizon",
                    format!("must reach region.post_extent/epsilon = {}, got {tau_end}", r.post_extent / eps),
                );
            }
        }

        let grid = Self::build_grid(&config, pre.as_deref(), post.as_deref(), frame, tau_start, tau_end)?;
        let scenario = Self { config, fan, law, pre, post, shift, grid, frame, tau_start, tau_end, regions };
        scenario.check_boundaries()?;
        Ok(scenario)
    }

    fn build_grid(
        config: &ScenarioConfig,
        pre: Option<&PreComposite>,
        post: Option<&PostComposite>,
        frame: Frame,
        tau_start: f64,
        tau_end: f64,
    ) -> Result<Grid1D> {
        let g = &config.grid;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        if let Some(c) = pre {
            let (rl, _) = c.rear.support();
            let (_, fh) = c.front.support();
            lo = lo.min(c.rear.speed * tau_start + rl);
            hi = hi.max(c.front.speed * tau_start + fh).max(fh);
        }
        if let Some(c) = post {
            let (sl, sh) = c.shock.support();
            let tail = config.profiles.ell * (2.0 / config.profiles.tail_tol).ln();
            let t_post = tau_end.max(0.0);
            let w_minus = c.rarefaction.w_minus;
            let drift = frame.speed();
            let left = (w_minus - drift) * t_post;
            let right_shock = (c.s_tilde2 - drift) * t_post;
            lo = lo.min(left.min(0.0) - tail).min(sl.min(sl + right_shock));
            hi = hi.max(sh.max(sh + right_shock)).max(tail);
        }
        let y_min = g.y_min.unwrap_or(lo - g.margin);
        let y_max = g.y_max.unwrap_or(hi + g.margin);
        if !(y_min < y_max) {
            return config_error("grid.y_max", format!("must exceed grid.y_min, got [{y_min}, {y_max}]"));
        }
        let grid = match g.n {
            Some(n) => Grid1D::new(y_min, y_max, n),
            None => Grid1D::with_spacing(y_min, y_max, g.dy),
        };
        grid.map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("grid: {m}")),
            other => other,
        })
    }

    /// Background evaluation at frame coordinate `y`.
    pub fn background(&self, y: f64, tau: f64, shift: f64) -> Result<(f64, f64)> {
        if tau < 0.0 || (tau == 0.0 && self.post.is_none()) {
            let c = self.pre.as_ref().ok_or_else(|| Error::Usage(format!("no pre-interaction background at tau = {tau}")))?;
            return Ok(c.eval(y, tau));
        }
        let c = self.post.as_ref().ok_or_else(|| Error::Usage(format!("no post-interaction background at tau = {tau}")))?;
        let xi = match self.frame {
            Frame::Rest => y - c.s_tilde2 * tau,
            Frame::Moving { .. } => y,
        };
        Ok(c.eval_moving(xi, tau, shift))
    }

    /// The composite that applies at `τ`.
    pub fn composite_at(&self, tau: f64) -> Result<CompositeWave> {
        if tau < 0.0 || (tau == 0.0 && self.post.is_none()) {
            self.pre.as_ref().map(|c| CompositeWave::Pre((**c).clone()))
        } else {
            self.post.as_ref().map(|c| CompositeWave::Post((**c).clone()))
        }
        .ok_or_else(|| Error::Usage(format!("no background at tau = {tau}")))
    }

    /// Far-field constants at the left and right boundaries.
    pub fn far_field(&self) -> ((f64, f64), (f64, f64)) {
        let es = self.fan.end_states;
        (es.minus(), es.plus())
    }

    /// The composite must sit on its far-field constants at both ends of the
    /// grid at every phase boundary of the run.
    fn check_boundaries(&self) -> Result<()> {
        let tol = self.config.profiles.tail_tol;
        let (left, right) = self.far_field();
        let mut times = vec![self.tau_start, self.tau_end];
        if self.tau_start < 0.0 && self.tau_end >= 0.0 {
            times.push(0.0);
        }
        for tau in times {
            for (key, y, far) in [("grid.y_min", self.grid.y_min(), left), ("grid.y_max", self.grid.y_max(), right)] {
                let (v, u) = self.background(y, tau, 0.0)?;
                let dev = (v - far.0).abs().max((u - far.1).abs());
                if dev > tol {
                    return config_error(
                        key,
                        format!("background deviates from its far field by {dev:.3e} > {tol:e} at tau = {tau}; enlarge the domain"),
                    );
                }
            }
        }
        Ok(())
    }

    /// Composite plus the configured perturbation at `τ_start`, with the
    /// boundary nodes set to the far-field constants.
    pub fn initial_state(&self) -> Result<FieldState> {
        let n = self.grid.len();
        let mut state = FieldState::constant(n, 1.0, 0.0, 1.0, self.frame);
        state.tau = self.tau_start;
        let pert = &self.config.perturbation;
        for i in 0..n {
            let y = self.grid.node(i);
            let (v, u) = self.background(y, self.tau_start, 0.0)?;
            state.v[i] = v + pert.eval(y);
            state.u[i] = u;
            state.omega[i] = self.config.phase.omega(y);
        }
        let (left, right) = self.far_field();
        state.v[0] = left.0;
        state.u[0] = left.1;
        state.v[n - 1] = right.0;
        state.u[n - 1] = right.1;
        let tol = self.config.profiles.tail_tol;
        for (key, i) in [("grid.y_min", 0), ("grid.y_max", n - 1)] {
            let w = self.config.phase.omega(self.grid.node(i));
            if (1.0 - w).abs() > tol {
                return config_error(key, format!("phase field is {w} at the boundary, not within {tol:e} of 1"));
            }
            if pert.eval(self.grid.node(i)).abs() > tol {
                return config_error(key, "perturbation does not vanish at the boundary");
            }
            state.omega[i] = 1.0;
        }
        state.validate(0.0)?;
        Ok(state)
    }
}
