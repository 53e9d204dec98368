//! Exact wave structure for two interacting 2-shocks of the p-system.
//!
//! Two compressive 2-shocks `S₂₁: (v₋,u₋) → (v*,u*)` and `S₂₂: (v*,u*) → (v₊,u₊)`
//! start at `x = 0` and `x = offset` (one by default). The faster rear shock
//! catches the front one at `(x₀, t₀)`; the Riemann problem there resolves into
//! a backward 1-rarefaction `(v₋,u₋) → (v_m,u_m)` and a forward 2-shock
//! `(v_m,u_m) → (v₊,u₊)`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::psystem::{Family, GasLaw};
use crate::scalar::Real;

/// `max(|Δv|, |Δu|)`.
pub fn wave_strength<T: Real>(left: (T, T), right: (T, T)) -> T {
    (right.0 - left.0).abs().max((right.1 - left.1).abs())
}

/// Speed of the compressive 2-shock joining `v_l < v_r`:
/// `s = √((p(v_l) - p(v_r)) / (v_r - v_l))`.
pub fn shock_speed_2family<T: Real>(v_l: T, v_r: T, law: &GasLaw<T>) -> Result<T> {
    law.pressure(v_l)?;
    law.pressure(v_r)?;
    if !(v_l < v_r) {
        return domain(format!("a compressive 2-shock needs v_l < v_r, got {v_l} >= {v_r}"));
    }
    Ok(((law.p(v_l) - law.p(v_r)) / (v_r - v_l)).sqrt())
}

/// Same as [`shock_speed_2family`] but continuous at `v_l = v_r`, where it
/// returns the acoustic limit `λ₂(v_l)`.
pub(crate) fn shock_speed_or_acoustic<T: Real>(v_l: T, v_r: T, law: &GasLaw<T>) -> T {
    if v_l == v_r {
        law.sound_speed(v_l)
    } else {
        ((law.p(v_l) - law.p(v_r)) / (v_r - v_l)).sqrt()
    }
}

/// Right state of a 2-shock on the Hugoniot curve through `(v_l, u_l)`.
/// Returns `(u_r, s)`.
pub fn hugoniot_right_state<T: Real>(v_l: T, u_l: T, v_r: T, law: &GasLaw<T>) -> Result<(T, T)> {
    law.pressure(v_l)?;
    law.pressure(v_r)?;
    if v_r == v_l {
        return Ok((u_l, law.sound_speed(v_l)));
    }
    let s = shock_speed_2family(v_l, v_r, law)?;
    Ok((u_l - s * (v_r - v_l), s))
}

/// Meeting point of the lines `x = s₂₁ t` and `x = 1 + s₂₂ t`.
pub fn interaction_point<T: Real>(s21: T, s22: T) -> Result<(T, T)> {
    interaction_point_with_offset(s21, s22, T::one())
}

/// Meeting point of `x = s₂₁ t` and `x = offset + s₂₂ t`.
pub fn interaction_point_with_offset<T: Real>(s21: T, s22: T, offset: T) -> Result<(T, T)> {
    if !(s21 > s22) || !(s22 > T::zero()) {
        return Err(Error::NoInteraction(format!(
            "need s21 > s22 > 0 for the rear shock to catch up, got s21 = {s21}, s22 = {s22}"
        )));
    }
    let t0 = offset / (s21 - s22);
    Ok((s21 * t0, t0))
}

/// A single shock discontinuity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShockWave<T = f64> {
    pub left: (T, T),
    pub right: (T, T),
    pub speed: T,
    pub family: Family,
    pub strength: T,
}

impl<T: Real> ShockWave<T> {
    /// 2-shock from `(v_l,u_l)` to the volume `v_r > v_l`.
    pub fn second_family(v_l: T, u_l: T, v_r: T, law: &GasLaw<T>) -> Result<Self> {
        let (u_r, speed) = hugoniot_right_state(v_l, u_l, v_r, law)?;
        Ok(Self {
            left: (v_l, u_l),
            right: (v_r, u_r),
            speed,
            family: Family::Second,
            strength: wave_strength((v_l, u_l), (v_r, u_r)),
        })
    }

    /// Residuals of `-s[v] - [u] = 0` and `-s[u] + [p] = 0`.
    pub fn rh_residuals(&self, law: &GasLaw<T>) -> (T, T) {
        let dv = self.right.0 - self.left.0;
        let du = self.right.1 - self.left.1;
        let dp = law.p(self.right.0) - law.p(self.left.0);
        (-self.speed * dv - du, -self.speed * du + dp)
    }

    /// Strict Lax inequalities of the wave's family.
    pub fn satisfies_lax(&self, law: &GasLaw<T>) -> bool {
        let (vl, vr) = (self.left.0, self.right.0);
        match self.family {
            Family::Second => law.sound_speed(vr) < self.speed && self.speed < law.sound_speed(vl),
            Family::First => -law.sound_speed(vr) < self.speed && self.speed < -law.sound_speed(vl),
        }
    }
}

/// Centered 1-rarefaction from `left` to `right`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RarefactionWave<T = f64> {
    pub left: (T, T),
    pub right: (T, T),
    /// `λ₁(v₋)`, speed of the fan's left edge.
    pub w_left: T,
    /// `λ₁(v_m)`, speed of the fan's right edge.
    pub w_right: T,
    pub strength: T,
}

/// End states of the two-shock configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndStates<T = f64> {
    pub v_minus: T,
    pub u_minus: T,
    pub v_star: T,
    pub u_star: T,
    pub v_plus: T,
    pub u_plus: T,
    pub law: GasLaw<T>,
}

impl<T: Real> EndStates<T> {
    /// Builds the configuration by chaining two Hugoniot steps
    /// `v₋ → v* → v₊` from `(v₋, u₋)`.
    pub fn from_chain(law: GasLaw<T>, v_minus: T, u_minus: T, v_star: T, v_plus: T) -> Result<Self> {
        if !(v_minus <= v_star && v_star <= v_plus) {
            return domain(format!(
                "volumes must be ordered v- <= v* <= v+, got {v_minus}, {v_star}, {v_plus}"
            ));
        }
        let (u_star, _) = hugoniot_right_state(v_minus, u_minus, v_star, &law)?;
        let (u_plus, _) = hugoniot_right_state(v_star, u_star, v_plus, &law)?;
        Ok(Self { v_minus, u_minus, v_star, u_star, v_plus, u_plus, law })
    }

    /// Validates a fully specified configuration: both intermediate jumps must
    /// lie on the 2-shock curves within `tol`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(law: GasLaw<T>, v_minus: T, u_minus: T, v_star: T, u_star: T, v_plus: T, u_plus: T, tol: T) -> Result<Self> {
        let chained = Self::from_chain(law, v_minus, u_minus, v_star, v_plus)?;
        if (chained.u_star - u_star).abs() > tol || (chained.u_plus - u_plus).abs() > tol {
            return domain(format!(
                "states are not on the 2-shock curves: expected u* = {}, u+ = {}, got {u_star}, {u_plus}",
                chained.u_star, chained.u_plus
            ));
        }
        Ok(Self { u_star, u_plus, ..chained })
    }

    /// Chained configuration whose incoming shocks have the requested
    /// strengths `max(|Δv|, |Δu|)`.
    pub fn from_strengths(law: GasLaw<T>, v_minus: T, u_minus: T, delta1: T, delta2: T) -> Result<Self> {
        let v_star = volume_for_strength(&law, v_minus, delta1)?;
        let v_plus = volume_for_strength(&law, v_star, delta2)?;
        Self::from_chain(law, v_minus, u_minus, v_star, v_plus)
    }

    pub fn minus(&self) -> (T, T) {
        (self.v_minus, self.u_minus)
    }

    pub fn star(&self) -> (T, T) {
        (self.v_star, self.u_star)
    }

    pub fn plus(&self) -> (T, T) {
        (self.v_plus, self.u_plus)
    }
}

fn volume_for_strength<T: Real>(law: &GasLaw<T>, v_l: T, delta: T) -> Result<T> {
    if delta < T::zero() {
        return domain(format!("strength must be non-negative, got {delta}"));
    }
    if delta == T::zero() {
        return Ok(v_l);
    }
    let strength = |v: T| {
        let s = shock_speed_or_acoustic(v_l, v, law);
        (v - v_l).max(s * (v - v_l))
    };
    let (mut lo, mut hi) = (v_l, v_l + delta);
    for _ in 0..200 {
        let mid = T::lit(0.5) * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if strength(mid) < delta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(T::lit(0.5) * (lo + hi))
}

/// Intermediate state of the outgoing fan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutgoingFan<T = f64> {
    pub v_m: T,
    pub u_m: T,
    pub s_tilde2: T,
    /// `|u_rarefaction(v_m) - u_hugoniot(v_m)|` at the returned root.
    pub mismatch: T,
}

/// Solves for `(v_m, u_m)` joining `(v₋,u₋)` by a 1-rarefaction and
/// `(v₊,u₊)` by a 2-shock.
///
/// The mismatch `u₋ - ∫_{v₋}^{v}λ₁ - u₊ - s(v,v₊)(v₊ - v)` is increasing on
/// `[v₋, v₊]`; its root is found by bisection down to machine resolution.
pub fn solve_outgoing_fan<T: Real>(v_minus: T, u_minus: T, v_plus: T, u_plus: T, law: &GasLaw<T>) -> Result<OutgoingFan<T>> {
    law.pressure(v_minus)?;
    law.pressure(v_plus)?;
    if v_minus == v_plus && u_minus == u_plus {
        return Ok(OutgoingFan { v_m: v_minus, u_m: u_minus, s_tilde2: law.sound_speed(v_minus), mismatch: T::zero() });
    }
    if !(v_minus < v_plus) {
        return Err(Error::FanNotFound(format!(
            "rarefaction + 2-shock fan needs v- < v+, got {v_minus} >= {v_plus}"
        )));
    }
    let u_rare = |v: T| u_minus - law.lambda1_integral(v_minus, v);
    let u_hug = |v: T| u_plus + shock_speed_or_acoustic(v, v_plus, law) * (v_plus - v);
    let f = |v: T| u_rare(v) - u_hug(v);
    let (f_lo, f_hi) = (f(v_minus), f(v_plus));
    if !(f_lo <= T::zero() && f_hi >= T::zero()) {
        return Err(Error::FanNotFound(format!(
            "mismatch does not change sign on (v-, v+): f(v-) = {f_lo}, f(v+) = {f_hi}"
        )));
    }
    let (mut lo, mut hi) = (v_minus, v_plus);
    for _ in 0..400 {
        let mid = T::lit(0.5) * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) <= T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let v_m = if f(hi).abs() < f(lo).abs() { hi } else { lo };
    let s_tilde2 = shock_speed_or_acoustic(v_m, v_plus, law);
    Ok(OutgoingFan { v_m, u_m: u_rare(v_m), s_tilde2, mismatch: f(v_m).abs() })
}

/// Wave strengths before and after the interaction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Strengths<T = f64> {
    pub delta1: T,
    pub delta2: T,
    pub delta1_out: T,
    pub delta2_out: T,
}

/// Which side of the interaction time a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Pre,
    Post,
}

/// The complete entropy solution of the two-shock problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveFan<T = f64> {
    pub law: GasLaw<T>,
    pub end_states: EndStates<T>,
    /// Initial position of the front shock (the rear one starts at 0).
    pub offset: T,
    /// Incoming shocks; zero-strength ones are omitted.
    pub incoming: Vec<ShockWave<T>>,
    /// `(x₀, t₀)`, present only when two shocks actually collide.
    pub interaction: Option<(T, T)>,
    pub v_m: T,
    pub u_m: T,
    pub outgoing_rarefaction: Option<RarefactionWave<T>>,
    pub outgoing_shock: Option<ShockWave<T>>,
    pub strengths: Strengths<T>,
}

impl<T: Real> WaveFan<T> {
    /// Solves the configuration with the front shock starting at `x = 1`.
    pub fn solve(end_states: EndStates<T>) -> Result<Self> {
        Self::solve_with_offset(end_states, T::one())
    }

    pub fn solve_with_offset(end_states: EndStates<T>, offset: T) -> Result<Self> {
        if !(offset > T::zero()) {
            return domain(format!("front shock offset must be positive, got {offset}"));
        }
        let law = end_states.law;
        let es = &end_states;
        let mut incoming = Vec::new();
        if es.v_star > es.v_minus {
            incoming.push(ShockWave::second_family(es.v_minus, es.u_minus, es.v_star, &law)?);
        }
        if es.v_plus > es.v_star {
            let mut s = ShockWave::second_family(es.v_star, es.u_star, es.v_plus, &law)?;
            s.right.1 = es.u_plus;
            incoming.push(s);
        }
        let delta1 = wave_strength(es.minus(), es.star());
        let delta2 = wave_strength(es.star(), es.plus());
        let interaction = if incoming.len() == 2 {
            Some(interaction_point_with_offset(incoming[0].speed, incoming[1].speed, offset)?)
        } else {
            None
        };

        let (v_m, u_m, rarefaction, outgoing) = if let Some(_) = interaction {
            let out = solve_outgoing_fan(es.v_minus, es.u_minus, es.v_plus, es.u_plus, &law)?;
            let rarefaction = (out.v_m > es.v_minus).then(|| RarefactionWave {
                left: es.minus(),
                right: (out.v_m, out.u_m),
                w_left: -law.sound_speed(es.v_minus),
                w_right: -law.sound_speed(out.v_m),
                strength: wave_strength(es.minus(), (out.v_m, out.u_m)),
            });
            let shock = (es.v_plus > out.v_m).then(|| ShockWave {
                left: (out.v_m, out.u_m),
                right: es.plus(),
                speed: out.s_tilde2,
                family: Family::Second,
                strength: wave_strength((out.v_m, out.u_m), es.plus()),
            });
            (out.v_m, out.u_m, rarefaction, shock)
        } else {
            // Nothing collides: the single shock (if any) is its own outgoing wave.
            (es.v_minus, es.u_minus, None, incoming.first().copied())
        };
        let strengths = Strengths {
            delta1,
            delta2,
            delta1_out: wave_strength(es.minus(), (v_m, u_m)),
            delta2_out: wave_strength((v_m, u_m), es.plus()),
        };
        Ok(Self {
            law,
            end_states,
            offset,
            incoming,
            interaction,
            v_m,
            u_m,
            outgoing_rarefaction: rarefaction,
            outgoing_shock: outgoing,
            strengths,
        })
    }

    pub fn is_trivial(&self) -> bool {
        self.incoming.is_empty()
    }

    /// Rear and front incoming shocks, when both exist.
    pub fn incoming_pair(&self) -> Option<(&ShockWave<T>, &ShockWave<T>)> {
        match self.incoming.as_slice() {
            [a, b] => Some((a, b)),
            _ => None,
        }
    }

    /// Interaction point, or an error when the waves never meet.
    pub fn interaction_point(&self) -> Result<(T, T)> {
        self.interaction
            .ok_or_else(|| Error::NoInteraction("configuration has fewer than two incoming shocks".into()))
    }

    /// Speed of the outgoing 2-shock.
    pub fn s_tilde2(&self) -> Option<T> {
        self.outgoing_shock.map(|s| s.speed)
    }

    pub fn phase_at(&self, t: T) -> Phase {
        match self.interaction {
            Some((_, t0)) if t > t0 => Phase::Post,
            _ => Phase::Pre,
        }
    }

    /// Pointwise entropy solution `(V, U)(x, t)`.
    pub fn eval_entropy_solution(&self, x: T, t: T) -> (T, T) {
        let es = &self.end_states;
        match (self.interaction, self.incoming.as_slice()) {
            (None, []) => es.minus(),
            (None, [single]) => {
                // A lone shock starts at 0 if it is the rear one, at `offset` otherwise.
                let start = if es.v_star > es.v_minus { T::zero() } else { self.offset };
                if x <= start + single.speed * t {
                    es.minus()
                } else {
                    es.plus()
                }
            }
            (Some((x0, t0)), [rear, front]) => {
                if t <= t0 {
                    if x <= rear.speed * t {
                        es.minus()
                    } else if x <= self.offset + front.speed * t {
                        es.star()
                    } else {
                        es.plus()
                    }
                } else {
                    let dx = x - x0;
                    let dt = t - t0;
                    let w_minus = -self.law.sound_speed(es.v_minus);
                    let w_m = -self.law.sound_speed(self.v_m);
                    let s_out = self.s_tilde2().unwrap_or(w_m);
                    if dx <= w_minus * dt {
                        es.minus()
                    } else if dx <= w_m * dt {
                        let w = dx / dt;
                        let v = self.law.lambda1_inv(w).max(es.v_minus).min(self.v_m);
                        (v, es.u_minus - self.law.lambda1_integral(es.v_minus, v))
                    } else if dx <= s_out * dt {
                        (self.v_m, self.u_m)
                    } else {
                        es.plus()
                    }
                }
            }
            _ => unreachable!("incoming waves and interaction are built together"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn law() -> GasLaw {
        GasLaw::new(2.0).unwrap()
    }

    fn fixture() -> WaveFan {
        WaveFan::solve(EndStates::from_chain(law(), 1.0, 0.0, 1.2, 1.4).unwrap()).unwrap()
    }

    #[test]
    fn shock_speed_fixture() {
        let l = law();
        let s = shock_speed_2family(1.0, 1.2, &l).unwrap();
        // elimination oracle: from -s dv = du and -s du + dp = 0, s² dv = -dp
        let dp = l.p(1.2) - l.p(1.0);
        let elim = (-dp / 0.2f64).sqrt();
        assert_relative_eq!(s, elim, max_relative = 1e-15);
        assert_relative_eq!(s, 1.236_033_081_182_610_3, max_relative = 1e-12);
        assert!(l.sound_speed(1.2) < s && s < l.sound_speed(1.0));
        let near = shock_speed_2family(1.0, 1.0 + 1e-6, &l).unwrap();
        assert!(((near - l.sound_speed(1.0)) / l.sound_speed(1.0)).abs() < 1e-3);
        assert!(shock_speed_2family(1.2, 1.0, &l).is_err());
        assert!(shock_speed_2family(1.0, 1.0, &l).is_err());
    }

    #[test]
    fn hugoniot_fixture() {
        let l = law();
        let (u_r, s) = hugoniot_right_state(1.0, 0.0, 1.2, &l).unwrap();
        assert_relative_eq!(u_r, -0.247_206_616_236_522, max_relative = 1e-12);
        assert_relative_eq!(s, 1.236_033_081_182_610_3, max_relative = 1e-12);
        let shock = ShockWave::second_family(1.0, 0.0, 1.2, &l).unwrap();
        let (r1, r2) = shock.rh_residuals(&l);
        assert!(r1.abs() <= 1e-12 && r2.abs() <= 1e-12);
        let (u, s0) = hugoniot_right_state(1.3, 0.5, 1.3, &l).unwrap();
        assert_eq!(u, 0.5);
        assert_eq!(s0, l.sound_speed(1.3));
        let (u_star, s21) = hugoniot_right_state(1.0, 0.0, 1.2, &l).unwrap();
        let (_, s22) = hugoniot_right_state(1.2, u_star, 1.4, &l).unwrap();
        assert!(s21 > s22);
    }

    #[test]
    fn interaction_point_values() {
        assert_eq!(interaction_point(2.0, 1.0).unwrap(), (2.0, 1.0));
        let (x0, t0): (f64, f64) = interaction_point(1.236033, 0.959793).unwrap();
        // line intersection oracle: s21 t = 1 + s22 t
        let t_line = 1.0 / (1.236033 - 0.959793);
        assert_relative_eq!(t0, t_line, max_relative = 1e-15);
        assert_relative_eq!(x0, 4.474_5, max_relative = 1e-4);
        assert_relative_eq!(t0, 3.620_0, max_relative = 1e-4);
        assert!((x0 - (1.0 + 0.959793 * t0)).abs() <= 1e-12);
        assert!(interaction_point(1.0, 1.0).is_err());
        assert!(interaction_point(1.0, 2.0).is_err());
    }

    #[test]
    fn outgoing_fan_fixture() {
        let fan = fixture();
        let es = fan.end_states;
        let l = law();
        assert!(fan.v_m > 1.0 && fan.v_m < 1.4);
        // independent bisection oracle on the raw mismatch in v_m
        let f = |v: f64| {
            let u_r = es.u_minus - l.rarefaction_integral(1.0, v).unwrap();
            let s = ((l.p(v) - l.p(1.4)) / (1.4 - v)).sqrt();
            u_r - (es.u_plus + s * (1.4 - v))
        };
        let (mut lo, mut hi): (f64, f64) = (1.0, 1.4 - 1e-9);
        for _ in 0..100 {
            let m = 0.5 * (lo + hi);
            if f(m) < 0.0 {
                lo = m
            } else {
                hi = m
            }
        }
        assert!((fan.v_m - lo).abs() <= 1e-12);
        let u_from_rarefaction = es.u_minus - l.rarefaction_integral(es.v_minus, fan.v_m).unwrap();
        let s = fan.s_tilde2().unwrap();
        let u_from_rh = es.u_plus + s * (es.v_plus - fan.v_m);
        assert!((u_from_rarefaction - fan.u_m).abs() <= 1e-10);
        assert!((u_from_rh - fan.u_m).abs() <= 1e-10);
        let out = fan.outgoing_shock.unwrap();
        assert!(l.sound_speed(es.v_plus) < s && s < l.sound_speed(fan.v_m));
        let (r1, r2) = out.rh_residuals(&l);
        assert!(r1.abs() <= 1e-10 && r2.abs() <= 1e-10);
    }

    #[test]
    fn zero_strength_fan() {
        let out = solve_outgoing_fan(1.2, 0.3, 1.2, 0.3, &law()).unwrap();
        assert_eq!(out.v_m, 1.2);
        assert_eq!(out.u_m, 0.3);
        let fan = WaveFan::solve(EndStates::from_chain(law(), 1.2, 0.3, 1.2, 1.2).unwrap()).unwrap();
        assert!(fan.is_trivial());
        assert!(fan.interaction.is_none());
        assert_eq!(fan.eval_entropy_solution(-3.0, 2.0), (1.2, 0.3));
        assert_eq!(fan.strengths.delta2_out, 0.0);
    }

    #[test]
    fn entropy_solution_regions() {
        let fan = fixture();
        let es = fan.end_states;
        let (x0, t0) = fan.interaction.unwrap();
        for t in [0.0, 1.0, t0, 2.0 * t0] {
            assert_eq!(fan.eval_entropy_solution(-1e3, t), es.minus());
            assert_eq!(fan.eval_entropy_solution(1e3, t), es.plus());
        }
        let (rear, front) = fan.incoming_pair().unwrap();
        let t = 1.0;
        let mid = 0.5 * (rear.speed * t + 1.0 + front.speed * t);
        assert_eq!(fan.eval_entropy_solution(mid, t), es.star());
        // inside the fan
        let l = law();
        let w_minus = -l.sound_speed(1.0);
        let w_m = -l.sound_speed(fan.v_m);
        let w = 0.5 * (w_minus + w_m);
        let (t1, t2) = (t0 + 1.0, 2.0 * t0);
        let a = fan.eval_entropy_solution(x0 + w * (t1 - t0), t1);
        let b = fan.eval_entropy_solution(x0 + w * (t2 - t0), t2);
        assert_relative_eq!(a.0, l.lambda1_inverse(w).unwrap(), max_relative = 1e-14);
        assert_relative_eq!(a.1, es.u_minus - l.rarefaction_integral(1.0, a.0).unwrap(), max_relative = 1e-12);
        assert!((a.0 - b.0).abs() <= 1e-15 && (a.1 - b.1).abs() <= 1e-15);
    }

    #[test]
    fn strengths_from_target() {
        let es = EndStates::from_strengths(law(), 1.0, 0.0, 0.05, 0.02).unwrap();
        assert_relative_eq!(wave_strength(es.minus(), es.star()), 0.05, max_relative = 1e-12);
        assert_relative_eq!(wave_strength(es.star(), es.plus()), 0.02, max_relative = 1e-12);
    }

    #[test]
    fn validated_end_states() {
        let chained = EndStates::from_chain(law(), 1.0, 0.0, 1.2, 1.4).unwrap();
        assert!(EndStates::new(law(), 1.0, 0.0, 1.2, chained.u_star, 1.4, chained.u_plus, 1e-12).is_ok());
        assert!(EndStates::new(law(), 1.0, 0.0, 1.2, 0.0, 1.4, chained.u_plus, 1e-12).is_err());
    }
}
