//! Norms and functionals evaluated along a run, decay fits, and the
//! sharp-interface error on the regions away from the shock curves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{trapezoid, Grid1D};
use crate::profiles::CompositeWave;
use crate::psystem::GasLaw;
use crate::riemann::{Phase, WaveFan};
use crate::shift::WeightFunction;
use crate::solver::{FieldState, Frame};

/// Sup, L² and H¹ norms of a nodal field.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    pub sup: f64,
    pub l2: f64,
    pub h1: f64,
}

pub fn field_norms(values: &[f64], dy: f64) -> Norms {
    let sup = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let sq: Vec<f64> = values.iter().map(|x| x * x).collect();
    let l2sq = trapezoid(&sq, dy);
    let d = central_diff(values, dy);
    let dsq: Vec<f64> = d.iter().map(|x| x * x).collect();
    Norms { sup, l2: l2sq.sqrt(), h1: (l2sq + trapezoid(&dsq, dy)).sqrt() }
}

/// Central differences, one-sided second order at the ends.
pub fn central_diff(values: &[f64], dy: f64) -> Vec<f64> {
    let n = values.len();
    let mut d = vec![0.0; n];
    if n < 3 {
        return d;
    }
    d[0] = (4.0 * (values[1] - values[0]) - (values[2] - values[0])) / (2.0 * dy);
    for i in 1..n - 1 {
        d[i] = (values[i + 1] - values[i - 1]) / (2.0 * dy);
    }
    d[n - 1] = (4.0 * (values[n - 1] - values[n - 2]) - (values[n - 1] - values[n - 3])) / (2.0 * dy);
    d
}

/// Composite background sampled on the solver grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Background {
    pub tau: f64,
    pub shift: f64,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    /// Present after the interaction only.
    pub post: Option<PostBackground>,
}

/// Pieces of the post-interaction background used by the weighted functionals.
#[derive(Debug, Clone, PartialEq)]
pub struct PostBackground {
    /// `h̃ = Ũ^R + Ũ^S - (ln Ṽ^S)_ξ - u_m`.
    pub h: Vec<f64>,
    /// `Ṽ^S_ξ` of the shifted outgoing shock.
    pub shock_slope: Vec<f64>,
    /// `Ũ^R_ξ` of the rarefaction.
    pub rarefaction_slope: Vec<f64>,
    /// `a(ξ - X)`.
    pub weight: Vec<f64>,
    pub s_tilde2: f64,
}

/// Position of every node in the coordinate the background is written in:
/// `y` before the interaction, `ξ = y - s̃₂τ` after it.
fn background_coordinate(y: f64, frame: Frame, tau: f64, s_tilde2: f64) -> f64 {
    match frame {
        Frame::Rest => y - s_tilde2 * tau,
        Frame::Moving { .. } => y,
    }
}

/// Evaluates the composite on the grid at `τ` with shift `X`.
pub fn background_on_grid(
    composite: &CompositeWave,
    grid: &Grid1D,
    frame: Frame,
    tau: f64,
    shift: f64,
    weight: Option<&WeightFunction>,
) -> Result<Background> {
    let n = grid.len();
    match composite {
        CompositeWave::Pre(c) => {
            if tau > 0.0 {
                return Err(Error::Usage(format!("pre-interaction background requested at tau = {tau}")));
            }
            if frame != Frame::Rest {
                return Err(Error::Usage("pre-interaction background is defined in the rest frame".into()));
            }
            let (mut v, mut u) = (Vec::with_capacity(n), Vec::with_capacity(n));
            for y in grid.nodes() {
                let (a, b) = c.eval(y, tau);
                v.push(a);
                u.push(b);
            }
            Ok(Background { tau, shift, v, u, post: None })
        }
        CompositeWave::Post(c) => {
            if tau < 0.0 {
                return Err(Error::Usage(format!("post-interaction background requested at tau = {tau}")));
            }
            if let Frame::Moving { speed } = frame {
                if (speed - c.s_tilde2).abs() > 1e-12 {
                    return Err(Error::Usage(format!(
                        "moving frame speed {speed} differs from the outgoing shock speed {}",
                        c.s_tilde2
                    )));
                }
            }
            let mut v = Vec::with_capacity(n);
            let mut u = Vec::with_capacity(n);
            let mut shock_v = Vec::with_capacity(n);
            let mut shock_u = Vec::with_capacity(n);
            let mut rare_u = Vec::with_capacity(n);
            let mut shock_slope = Vec::with_capacity(n);
            let mut rarefaction_slope = Vec::with_capacity(n);
            let mut a = Vec::with_capacity(n);
            for y in grid.nodes() {
                let s = c.sample(background_coordinate(y, frame, tau, c.s_tilde2), tau, shift);
                v.push(s.v);
                u.push(s.u);
                shock_v.push(s.shock.v.ln());
                shock_u.push(s.shock.u);
                rare_u.push(s.rarefaction.u);
                shock_slope.push(s.shock.v_xi);
                rarefaction_slope.push(s.rarefaction.u_y);
                a.push(weight.map_or(1.0, |w| w.at_volume(s.shock.v)));
            }
            let dlog = central_diff(&shock_v, grid.dy());
            let h = (0..n).map(|i| rare_u[i] + shock_u[i] - dlog[i] - c.u_m).collect();
            Ok(Background {
                tau,
                shift,
                v,
                u,
                post: Some(PostBackground { h, shock_slope, rarefaction_slope, weight: a, s_tilde2: c.s_tilde2 }),
            })
        }
    }
}

/// `(φ, ψ, σ) = (v - Ṽ, u - Ũ, ω - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub sigma: Vec<f64>,
}

pub fn perturbation_fields(state: &FieldState, background: &Background) -> Perturbation {
    Perturbation {
        phi: state.v.iter().zip(&background.v).map(|(a, b)| a - b).collect(),
        psi: state.u.iter().zip(&background.u).map(|(a, b)| a - b).collect(),
        sigma: state.omega.iter().map(|w| w - 1.0).collect(),
    }
}

/// `h = u - (ln v)_ξ` with central differences.
pub fn effective_velocity(v: &[f64], u: &[f64], dy: f64) -> Vec<f64> {
    let logv: Vec<f64> = v.iter().map(|x| x.ln()).collect();
    let d = central_diff(&logv, dy);
    u.iter().zip(d).map(|(u, d)| u - d).collect()
}

/// The dissipation terms of the weighted relative-entropy balance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Dissipation {
    pub g1: f64,
    pub g_s: f64,
    pub g_r: f64,
    pub d1: f64,
}

impl Dissipation {
    pub fn total(&self) -> f64 {
        self.g1 + self.g_s + self.g_r + self.d1
    }
}

fn post_part(background: &Background) -> Result<&PostBackground> {
    background
        .post
        .as_ref()
        .ok_or_else(|| Error::Usage("functional is defined after the interaction only".into()))
}

/// `G₁`, `G^S`, `G^R` and `D₁` by trapezoid quadrature.
pub fn dissipation_functionals(
    state: &FieldState,
    background: &Background,
    weight: &WeightFunction,
    law: &GasLaw,
    dy: f64,
) -> Result<Dissipation> {
    let post = post_part(background)?;
    let n = state.len();
    let h = effective_velocity(&state.v, &state.u, dy);
    let dp: Vec<f64> = (0..n).map(|i| law.p(state.v[i]) - law.p(background.v[i])).collect();
    let ddp = central_diff(&dp, dy);
    let mut g1 = Vec::with_capacity(n);
    let mut gs = Vec::with_capacity(n);
    let mut gr = Vec::with_capacity(n);
    for i in 0..n {
        let slope = post.shock_slope[i].abs();
        let r = h[i] - post.h[i] - dp[i] / post.s_tilde2;
        g1.push(slope * r * r);
        gs.push(slope * dp[i] * dp[i]);
        gr.push(post.rarefaction_slope[i] * law.p_rel(state.v[i], background.v[i]));
    }
    let d1: Vec<f64> = ddp.iter().map(|x| x * x).collect();
    Ok(Dissipation {
        g1: weight.lambda / weight.delta2 * trapezoid(&g1, dy),
        g_s: trapezoid(&gs, dy),
        g_r: trapezoid(&gr, dy),
        d1: trapezoid(&d1, dy),
    })
}

/// Pointwise `η(w|w̃) = Q(v|Ṽ) + (h - h̃)²/2 + σ²/2`.
pub fn relative_entropy_density(state: &FieldState, background: &Background, law: &GasLaw, dy: f64) -> Result<Vec<f64>> {
    let post = post_part(background)?;
    let h = effective_velocity(&state.v, &state.u, dy);
    Ok((0..state.len())
        .map(|i| {
            let dh = h[i] - post.h[i];
            let sigma = state.omega[i] - 1.0;
            law.q_rel(state.v[i], background.v[i]) + 0.5 * dh * dh + 0.5 * sigma * sigma
        })
        .collect())
}

/// `∫ a(ξ - X) η(w|w̃) dξ`.
pub fn weighted_relative_entropy(state: &FieldState, background: &Background, law: &GasLaw, dy: f64) -> Result<f64> {
    let post = post_part(background)?;
    let eta = relative_entropy_density(state, background, law, dy)?;
    let weighted: Vec<f64> = eta.iter().zip(&post.weight).map(|(e, a)| e * a).collect();
    Ok(trapezoid(&weighted, dy))
}

/// Space-time region excluding `ς`-neighbourhoods of the shock curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub varsigma: f64,
    pub phase: Phase,
    /// Last physical time `t - t₀` sampled after the interaction.
    pub post_extent: f64,
}

impl RegionSpec {
    pub fn new(varsigma: f64, phase: Phase, post_extent: f64) -> Result<Self> {
        if !(varsigma > 0.0) {
            return Err(Error::Config(format!("region.varsigma must be positive, got {varsigma}")));
        }
        if phase == Phase::Post && !(post_extent > varsigma) {
            return Err(Error::Config(format!(
                "region.post_extent must exceed varsigma, got {post_extent} <= {varsigma}"
            )));
        }
        Ok(Self { varsigma, phase, post_extent })
    }

    /// Physical time window `[t_lo, t_hi]` of the region.
    pub fn time_window(&self, fan: &WaveFan) -> Result<(f64, f64)> {
        let (_, t0) = fan.interaction_point()?;
        Ok(match self.phase {
            Phase::Pre => (0.0, t0 - self.varsigma),
            Phase::Post => (t0 + self.varsigma, t0 + self.post_extent),
        })
    }

    /// Whether `(x, t)` belongs to the region.
    pub fn contains(&self, fan: &WaveFan, x: f64, t: f64) -> bool {
        let Ok((lo, hi)) = self.time_window(fan) else {
            return false;
        };
        if t < lo || t > hi {
            return false;
        }
        let c = self.varsigma;
        match self.phase {
            Phase::Pre => match fan.incoming_pair() {
                Some((rear, front)) => (x - rear.speed * t).abs() >= c && (x - front.speed * t - fan.offset).abs() >= c,
                None => false,
            },
            Phase::Post => {
                let (x0, t0) = fan.interaction.expect("time window checked");
                let s = fan.s_tilde2().unwrap_or(0.0);
                ((x - x0) - s * (t - t0)).abs() >= c
            }
        }
    }

    /// `count` sample times at the midpoints of equal subintervals of the window.
    pub fn sample_times(&self, fan: &WaveFan, count: usize) -> Result<Vec<f64>> {
        let (lo, hi) = self.time_window(fan)?;
        if !(hi > lo) || count == 0 {
            return Err(Error::EmptySample(format!("time window [{lo}, {hi}] holds no samples")));
        }
        let dt = (hi - lo) / count as f64;
        Ok((0..count).map(|k| lo + (k as f64 + 0.5) * dt).collect())
    }
}

/// Number of time slices per region.
pub const REGION_SLICES: usize = 64;

/// One rest-frame snapshot in scaled variables.
#[derive(Debug, Clone, Copy)]
pub struct RegionSlice<'a> {
    pub tau: f64,
    pub y: &'a [f64],
    pub v: &'a [f64],
    pub u: &'a [f64],
    pub omega: &'a [f64],
}

/// Largest pointwise error and where it occurred.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionError {
    pub sup: f64,
    pub samples: usize,
    pub x: f64,
    pub t: f64,
}

impl RegionError {
    pub fn merge(self, other: RegionError) -> RegionError {
        let samples = self.samples + other.samples;
        if other.sup > self.sup {
            RegionError { samples, ..other }
        } else {
            RegionError { samples, ..self }
        }
    }
}

/// `max |v - 𝒱| + |u - 𝒰| + |ω - 1|` over slice nodes inside the region.
pub fn linf_on_region(slices: &[RegionSlice<'_>], fan: &WaveFan, region: &RegionSpec, epsilon: f64) -> Result<RegionError> {
    let (x0, t0) = fan.interaction_point()?;
    let mut best = RegionError { sup: 0.0, samples: 0, x: f64::NAN, t: f64::NAN };
    for s in slices {
        let t = t0 + epsilon * s.tau;
        for i in 0..s.y.len() {
            let x = x0 + epsilon * s.y[i];
            if !region.contains(fan, x, t) {
                continue;
            }
            let (vv, uu) = fan.eval_entropy_solution(x, t);
            let e = (s.v[i] - vv).abs() + (s.u[i] - uu).abs() + (s.omega[i] - 1.0).abs();
            best.samples += 1;
            if e > best.sup || best.x.is_nan() {
                best.sup = best.sup.max(e);
                best.x = x;
                best.t = t;
            }
        }
    }
    if best.samples == 0 {
        return Err(Error::EmptySample(format!("no grid point falls inside the {:?} region", region.phase)));
    }
    Ok(best)
}

/// Least-squares fit `value ≈ amplitude·e^{-rate·τ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub rate: f64,
    pub amplitude: f64,
    /// RMS residual of the fit in `ln(value)`.
    pub residual: f64,
    /// Points dropped for being non-positive.
    pub skipped: usize,
}

/// Default share of the window treated as transient.
pub const DECAY_TRANSIENT_FRACTION: f64 = 0.1;

/// Fits the tail of `series` after dropping the leading `transient` fraction.
pub fn fit_decay(series: &[(f64, f64)], transient: f64) -> Result<DecayFit> {
    let start = ((series.len() as f64) * transient.clamp(0.0, 1.0)).floor() as usize;
    let window = &series[start.min(series.len())..];
    let pts: Vec<(f64, f64)> = window.iter().filter(|(_, v)| *v > 0.0).map(|&(t, v)| (t, v.ln())).collect();
    let skipped = window.len() - pts.len();
    if pts.len() < 10 {
        return Err(Error::EmptySample(format!(
            "decay fit needs at least 10 positive points, got {} ({skipped} skipped)",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ml = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let stt = pts.iter().map(|p| (p.0 - mt).powi(2)).sum::<f64>();
    let stl = pts.iter().map(|p| (p.0 - mt) * (p.1 - ml)).sum::<f64>();
    if stt == 0.0 {
        return Err(Error::EmptySample("decay fit needs distinct times".into()));
    }
    let slope = stl / stt;
    let intercept = ml - slope * mt;
    let residual = (pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    Ok(DecayFit { rate: -slope, amplitude: intercept.exp(), residual, skipped })
}

/// One row of the per-run diagnostics table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub tau: f64,
    #[serde(rename = "X")]
    pub x: f64,
    #[serde(rename = "Xdot")]
    pub xdot: f64,
    pub phi_sup: f64,
    pub phi_l2: f64,
    pub phi_h1: f64,
    pub psi_sup: f64,
    pub psi_l2: f64,
    pub psi_h1: f64,
    pub sigma_sup: f64,
    pub sigma_l2: f64,
    pub sigma_h1: f64,
    pub sigma_max: f64,
    pub perturbation_sup: f64,
    pub weighted_entropy: f64,
    pub g1: f64,
    pub g_s: f64,
    pub g_r: f64,
    pub d1: f64,
    pub dissipation_integral: f64,
    pub mass_residual: f64,
    pub momentum_residual: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub v_min: f64,
    pub v_max: f64,
}

/// Builds a record from a state and its background; the weighted
/// functionals are filled in only after the interaction.
pub fn record(
    state: &FieldState,
    background: &Background,
    weight: Option<&WeightFunction>,
    law: &GasLaw,
    dy: f64,
) -> Result<(DiagnosticsRecord, Option<Dissipation>)> {
    let pert = perturbation_fields(state, background);
    let (phi, psi, sigma) = (field_norms(&pert.phi, dy), field_norms(&pert.psi, dy), field_norms(&pert.sigma, dy));
    let (omega_min, omega_max) = state.omega_range();
    let v_max = state.v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (entropy, diss) = match (background.post.as_ref(), weight) {
        (Some(_), Some(w)) => (
            weighted_relative_entropy(state, background, law, dy)?,
            Some(dissipation_functionals(state, background, w, law, dy)?),
        ),
        _ => (f64::NAN, None),
    };
    let d = diss.unwrap_or(Dissipation { g1: f64::NAN, g_s: f64::NAN, g_r: f64::NAN, d1: f64::NAN });
    Ok((
        DiagnosticsRecord {
            tau: state.tau,
            x: background.shift,
            xdot: f64::NAN,
            phi_sup: phi.sup,
            phi_l2: phi.l2,
            phi_h1: phi.h1,
            psi_sup: psi.sup,
            psi_l2: psi.l2,
            psi_h1: psi.h1,
            sigma_sup: sigma.sup,
            sigma_l2: sigma.l2,
            sigma_h1: sigma.h1,
            sigma_max: omega_max - 1.0,
            perturbation_sup: phi.sup.max(psi.sup).max(sigma.sup),
            weighted_entropy: entropy,
            g1: d.g1,
            g_s: d.g_s,
            g_r: d.g_r,
            d1: d.d1,
            dissipation_integral: f64::NAN,
            mass_residual: 0.0,
            momentum_residual: 0.0,
            omega_min,
            omega_max,
            v_min: state.min_v(),
            v_max,
        },
        diss,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::PostComposite;
    use crate::riemann::EndStates;
    use crate::shift::ShiftFunctional;
    use std::sync::Arc;

    fn fan() -> WaveFan {
        WaveFan::solve(EndStates::from_chain(GasLaw::new(2.0).unwrap(), 1.0, 0.0, 1.2, 1.4).unwrap()).unwrap()
    }

    #[test]
    fn norms_of_gaussian() {
        let g = Grid1D::new(-10.0, 10.0, 401).unwrap();
        let vals: Vec<f64> = g.nodes().iter().map(|y| 0.01 * (-y * y).exp()).collect();
        let n = field_norms(&vals, g.dy());
        let mut direct = 0.0;
        for (i, v) in vals.iter().enumerate() {
            let w = if i == 0 || i == 400 { 0.5 } else { 1.0 };
            direct += w * v * v * g.dy();
        }
        assert!((n.l2 - direct.sqrt()).abs() <= 1e-12);
        assert_eq!(n.sup, 0.01);
        assert!(n.h1 >= n.l2);
    }

    #[test]
    fn effective_velocity_cases() {
        let v = vec![2.0; 10];
        let u: Vec<f64> = (0..10).map(|i| i as f64).collect();
        assert_eq!(effective_velocity(&v, &u, 0.1), u);
        let dy = 0.01;
        let v: Vec<f64> = (0..50).map(|i| (0.3 * i as f64 * dy).exp()).collect();
        let h = effective_velocity(&v, &vec![1.0; 50], dy);
        for x in &h[1..49] {
            assert!((x - 0.7).abs() < 1e-10);
        }
    }

    #[test]
    fn fit_decay_synthetic() {
        let s: Vec<(f64, f64)> = (0..100).map(|i| (i as f64 * 0.1, (-0.5 * i as f64 * 0.1).exp())).collect();
        assert!((fit_decay(&s, 0.1).unwrap().rate - 0.5).abs() < 1e-6);
        let c: Vec<(f64, f64)> = (0..100).map(|i| (i as f64, 3.0)).collect();
        let f = fit_decay(&c, 0.1).unwrap();
        assert!(f.rate.abs() < 1e-6);
        let mut z = s.clone();
        z[50].1 = 0.0;
        assert_eq!(fit_decay(&z, 0.1).unwrap().skipped, 1);
        assert!(fit_decay(&s[..5], 0.0).is_err());
    }

    #[test]
    fn region_excludes_shock_lines() {
        let fan = fan();
        let (x0, t0) = fan.interaction.unwrap();
        let s = fan.s_tilde2().unwrap();
        let post = RegionSpec::new(0.2, Phase::Post, 1.0).unwrap();
        let t = t0 + 0.5;
        assert!(!post.contains(&fan, x0 + s * 0.5 + 0.1, t));
        assert!(post.contains(&fan, x0 + s * 0.5 + 0.3, t));
        assert!(!post.contains(&fan, x0, t0 + 0.1));
        let pre = RegionSpec::new(0.2, Phase::Pre, 1.0).unwrap();
        let (rear, front) = fan.incoming_pair().unwrap();
        assert!(!pre.contains(&fan, rear.speed * 1.0 + 0.05, 1.0));
        assert!(!pre.contains(&fan, 1.0 + front.speed * 1.0 - 0.05, 1.0));
        assert!(pre.contains(&fan, 1.0 + front.speed * 1.0 + 0.5, 1.0));
        assert!(!pre.contains(&fan, 3.0, t0 - 0.1));
        let times = pre.sample_times(&fan, 64).unwrap();
        assert_eq!(times.len(), 64);
        assert!(times[0] > 0.0 && *times.last().unwrap() < t0 - 0.2);
    }

    #[test]
    fn exact_solution_has_zero_region_error() {
        let fan = fan();
        let (x0, t0) = fan.interaction.unwrap();
        let eps = 0.1;
        let y: Vec<f64> = (0..400).map(|i| -60.0 + 0.3 * i as f64).collect();
        let region = RegionSpec::new(0.2, Phase::Post, 1.0).unwrap();
        let t = t0 + 0.6;
        let tau = (t - t0) / eps;
        let (mut v, mut u) = (vec![], vec![]);
        for yy in &y {
            let (a, b) = fan.eval_entropy_solution(x0 + eps * yy, t);
            v.push(a);
            u.push(b);
        }
        let omega = vec![1.0; y.len()];
        let slice = RegionSlice { tau, y: &y, v: &v, u: &u, omega: &omega };
        let e = linf_on_region(&[slice], &fan, &region, eps).unwrap();
        assert_eq!(e.sup, 0.0);
        assert!(e.samples > 0);
        let early = RegionSlice { tau: 0.01, ..slice };
        assert!(linf_on_region(&[early], &fan, &region, eps).is_err());
    }

    #[test]
    fn functionals_on_background() {
        let fan = fan();
        let law = fan.law;
        let post = Arc::new(PostComposite::from_fan(&fan, 0.1, 1e-8).unwrap());
        let shift = ShiftFunctional::new(post.clone(), None).unwrap();
        let grid = Grid1D::new(-80.0, 60.0, 2801).unwrap();
        let frame = Frame::Moving { speed: post.s_tilde2 };
        let comp = CompositeWave::Post((*post).clone());
        let bg = background_on_grid(&comp, &grid, frame, 20.0, 0.3, Some(&shift.weight)).unwrap();
        let state = FieldState { v: bg.v.clone(), u: bg.u.clone(), omega: vec![1.0; grid.len()], tau: 20.0, frame };
        let d = dissipation_functionals(&state, &bg, &shift.weight, &law, grid.dy()).unwrap();
        assert_eq!(d.g_s, 0.0);
        assert_eq!(d.g_r, 0.0);
        assert_eq!(d.d1, 0.0);
        assert!(d.g1 >= 0.0);
        let pert = perturbation_fields(&state, &bg);
        assert!(pert.phi.iter().chain(&pert.psi).chain(&pert.sigma).all(|&x| x == 0.0));
        // constant pressure offset: D₁ vanishes and G^S = c²∫|Ṽ^S_ξ|
        let c = 1e-3;
        let shifted: Vec<f64> = bg.v.iter().map(|&v| law.p(v) + c).map(|p| p.powf(-0.5)).collect();
        let st2 = FieldState { v: shifted, ..state.clone() };
        let d2 = dissipation_functionals(&st2, &bg, &shift.weight, &law, grid.dy()).unwrap();
        assert!(d2.d1 < 1e-20);
        let want = c * c * (1.4 - fan.v_m);
        assert!((d2.g_s - want).abs() <= 1e-3 * want, "{} vs {want}", d2.g_s);
    }
}
