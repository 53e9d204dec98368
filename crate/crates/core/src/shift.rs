//! Weighted shift of the outgoing viscous shock.
//!
//! The shift `X(τ)` solves `Ẋ = -(m₀/δ̃₂)[∫ a(ξ-X)/s̃₂ ∂_ξ h̃^S(ξ-X) (p(v) - p(Ṽ)) dξ
//! - ∫ a(ξ-X) ∂_ξ p(Ṽ^S(ξ-X)) (v - Ṽ) dξ]`, `X(0) = 0`, with the weight
//! `a(ξ) = 1 + (λ/δ̃₂)(p(v_m) - p(Ṽ^S(ξ)))`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::profiles::{PostComposite, ProfilePoint, ShockProfile};
use crate::psystem::GasLaw;

/// `a(ξ)` built on the outgoing shock profile.
#[derive(Debug, Clone)]
pub struct WeightFunction {
    profile: Arc<ShockProfile>,
    law: GasLaw,
    p_vm: f64,
    pub lambda: f64,
    pub delta2: f64,
}

impl WeightFunction {
    /// `lambda = None` selects `λ = √δ̃₂`.
    pub fn new(profile: Arc<ShockProfile>, law: GasLaw, lambda: Option<f64>) -> Result<Self> {
        let delta2 = profile.strength();
        if !(delta2 > 0.0) {
            return Err(Error::Domain("weight function needs an outgoing shock of positive strength".into()));
        }
        let lambda = lambda.unwrap_or_else(|| delta2.sqrt());
        if !(lambda > 0.0) {
            return Err(Error::Config(format!("shift.lambda must be positive, got {lambda}")));
        }
        let weight = Self { p_vm: law.p(profile.left.0), profile, law, lambda, delta2 };
        if !weight.scale_separated() {
            log::warn!(
                "weight amplitude lambda = {lambda:.4} is below 10 x shock strength ({:.4}); the scale separation the weight assumes does not hold",
                10.0 * delta2
            );
        }
        Ok(weight)
    }

    /// Whether `λ ≥ 10 δ̃₂`.
    pub fn scale_separated(&self) -> bool {
        self.lambda >= 10.0 * self.delta2
    }

    pub fn profile(&self) -> &ShockProfile {
        &self.profile
    }

    /// `a` as a function of the profile volume.
    pub fn at_volume(&self, v: f64) -> f64 {
        1.0 + self.lambda / self.delta2 * (self.p_vm - self.law.p(v))
    }

    pub fn eval(&self, xi: f64) -> f64 {
        self.at_volume(self.profile.eval_point(xi).v)
    }

    /// `a'(ξ) = -(λ/δ̃₂) p'(Ṽ) Ṽ_ξ`.
    pub fn slope(&self, xi: f64) -> f64 {
        let p = self.profile.eval_point(xi);
        -self.lambda / self.delta2 * self.law.dp(p.v) * p.v_xi
    }

    /// `[1, 1 + (λ/δ̃₂)(p(v_m) - p(v_+))]`.
    pub fn range(&self) -> (f64, f64) {
        (1.0, self.at_volume(self.profile.right.0))
    }
}

/// `a(ξ)`.
pub fn weight_a(xi: f64, weight: &WeightFunction) -> f64 {
    weight.eval(xi)
}

/// `m₀ = 5(γ+1)(-p'(v_m))^{3/2} / (8γ p(v_m))`.
pub fn shift_coefficient(law: &GasLaw, v_m: f64) -> f64 {
    let g = law.gamma();
    5.0 * (g + 1.0) * (-law.dp(v_m)).powf(1.5) / (8.0 * g * law.p(v_m))
}

/// Shift value, last rate and history `(τ, X, Ẋ)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ShiftState {
    pub x: f64,
    pub xdot: f64,
    pub tau: f64,
    pub history: Vec<(f64, f64, f64)>,
}

impl ShiftState {
    pub fn new(tau: f64) -> Self {
        Self { x: 0.0, xdot: 0.0, tau, history: vec![(tau, 0.0, 0.0)] }
    }
}

/// Advances `X` by `dt` with the rate `xdot`, which for the midpoint rule is
/// the rate evaluated at the half step.
pub fn advance_shift(mut shift: ShiftState, xdot: f64, dt: f64) -> ShiftState {
    shift.x += dt * xdot;
    shift.xdot = xdot;
    shift.tau += dt;
    shift.history.push((shift.tau, shift.x, xdot));
    shift
}

/// Evaluates `Ẋ` for states on a grid whose nodes map to `ξ = y - offset`.
#[derive(Debug, Clone)]
pub struct ShiftFunctional {
    pub background: Arc<PostComposite>,
    pub weight: WeightFunction,
    pub m0: f64,
}

impl ShiftFunctional {
    pub fn new(background: Arc<PostComposite>, lambda: Option<f64>) -> Result<Self> {
        let law = background.shock.law();
        let weight = WeightFunction::new(Arc::new(background.shock.clone()), law, lambda)?;
        let m0 = shift_coefficient(&law, background.v_m);
        Ok(Self { background, weight, m0 })
    }

    /// Node range covering the shifted profile support, or an error if the
    /// grid does not contain it.
    pub fn window(&self, grid: &Grid1D, offset: f64, shift: f64) -> Result<std::ops::Range<usize>> {
        let (lo, hi) = self.background.shock.support();
        let (y_lo, y_hi) = (lo + shift + offset, hi + shift + offset);
        if y_lo < grid.y_min() || y_hi > grid.y_max() {
            return Err(Error::Config(format!(
                "grid [{}, {}] does not cover the shifted shock support [{y_lo:.3}, {y_hi:.3}]",
                grid.y_min(),
                grid.y_max()
            )));
        }
        Ok(grid.index_range(y_lo, y_hi))
    }

    /// `Ẋ` for the volume field `v` at time `τ` and shift `X`.
    pub fn xdot(&self, grid: &Grid1D, offset: f64, v: &[f64], tau: f64, shift: f64) -> Result<f64> {
        let range = self.window(grid, offset, shift)?;
        let law = self.weight.law;
        let s = self.background.s_tilde2;
        let dy = grid.dy();
        let mut sum = 0.0;
        let last = range.end.saturating_sub(1);
        for i in range.clone() {
            let xi = grid.node(i) - offset;
            let bg = self.background.sample(xi, tau, shift);
            let pt: ProfilePoint = bg.shock;
            let a = self.weight.at_volume(pt.v);
            let dp_profile = law.dp(pt.v) * pt.v_xi;
            // ∂_ξ h̃^S = p(Ṽ^S)_ξ / s̃₂ along the profile
            let dh = dp_profile / s;
            let integrand = a / s * dh * (law.p(v[i]) - law.p(bg.v)) - a * dp_profile * (v[i] - bg.v);
            let w = if i == range.start || i == last { 0.5 } else { 1.0 };
            sum += w * integrand;
        }
        Ok(-self.m0 / self.weight.delta2 * sum * dy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::PostComposite;
    use crate::riemann::{EndStates, WaveFan};

    fn setup() -> (Arc<PostComposite>, ShiftFunctional) {
        let law = GasLaw::new(2.0).unwrap();
        let fan = WaveFan::solve(EndStates::from_chain(law, 1.0, 0.0, 1.2, 1.4).unwrap()).unwrap();
        let post = Arc::new(PostComposite::from_fan(&fan, 0.1, 1e-8).unwrap());
        let f = ShiftFunctional::new(post.clone(), None).unwrap();
        (post, f)
    }

    #[test]
    fn weight_limits_and_monotonicity() {
        let (_, f) = setup();
        let w = &f.weight;
        assert_eq!(weight_a(-1e4, w), 1.0);
        let (_, hi) = w.range();
        assert!((weight_a(1e4, w) - hi).abs() <= 1e-15);
        let law = GasLaw::new(2.0).unwrap();
        let want = 1.0 + w.lambda / w.delta2 * (law.p(f.background.v_m) - law.p(1.4));
        assert!((hi - want).abs() <= 1e-14);
        let mut prev = 0.0;
        for i in 0..10_000 {
            let a = weight_a(-60.0 + 0.012 * i as f64, w);
            assert!(a >= prev && (1.0..=hi).contains(&a));
            prev = a;
        }
        assert!((w.lambda - w.delta2.sqrt()).abs() < 1e-15);
        assert!(!w.scale_separated());
    }

    #[test]
    fn zero_perturbation_gives_zero_rate() {
        let (post, f) = setup();
        let grid = Grid1D::new(-80.0, 60.0, 2048).unwrap();
        let (tau, x) = (3.0, 0.7);
        let v: Vec<f64> = grid.nodes().iter().map(|&y| post.eval_moving(y, tau, x).0).collect();
        assert_eq!(f.xdot(&grid, 0.0, &v, tau, x).unwrap(), 0.0);
    }

    #[test]
    fn rate_is_linear_in_small_offsets() {
        let (post, f) = setup();
        let grid = Grid1D::new(-80.0, 60.0, 2048).unwrap();
        let base: Vec<f64> = grid.nodes().iter().map(|&y| post.eval_moving(y, 2.0, 0.0).0).collect();
        let rate = |c: f64| {
            let v: Vec<f64> = base.iter().map(|b| b + c).collect();
            f.xdot(&grid, 0.0, &v, 2.0, 0.0).unwrap()
        };
        let ratio = rate(2e-3) / rate(1e-3);
        assert!((ratio - 2.0).abs() <= 0.1, "{ratio}");
    }

    #[test]
    fn window_must_fit() {
        let (_, f) = setup();
        let grid = Grid1D::new(-10.0, 10.0, 256).unwrap();
        assert!(f.xdot(&grid, 0.0, &vec![1.2; 256], 0.0, 0.0).is_err());
    }

    #[test]
    fn shift_updates() {
        let mut s = ShiftState::new(0.0);
        for _ in 0..10 {
            s = advance_shift(s, 0.0, 0.1);
        }
        assert_eq!(s.x, 0.0);
        let mut s = ShiftState::new(0.0);
        for _ in 0..100 {
            s = advance_shift(s, 0.3, 0.01);
        }
        assert!((s.x - 0.3).abs() < 1e-12);
        assert_eq!(s.history.len(), 101);
    }
}
