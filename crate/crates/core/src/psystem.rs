//! Thermodynamic closure of the γ-law p-system and the relative quantities
//! built on it.
//!
//! Pressure is `p(v) = v^-γ` in terms of the specific volume `v = 1/ρ`; the
//! internal energy is `Q(v) = v^(1-γ)/(γ-1)`, so that `Q' = -p`. Both are
//! strictly convex for `γ > 1`, which is what makes every relative quantity
//! `F(v|V) = F(v) - F(V) - F'(V)(v - V)` non-negative.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::scalar::Real;

/// γ-law closure `p(v) = v^-γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasLaw<T = f64> {
    gamma: T,
}

/// Characteristic family of the 2×2 p-system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    First,
    Second,
}

impl Family {
    pub fn from_index(index: u8) -> Result<Self> {
        match index {
            1 => Ok(Family::First),
            2 => Ok(Family::Second),
            other => Err(Error::Usage(format!("family must be 1 or 2, got {other}"))),
        }
    }
}

/// Primitive state: specific volume, velocity and the squared phase field `ω = χ²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluidState<T = f64> {
    pub v: T,
    pub u: T,
    pub omega: T,
}

impl<T: Real> FluidState<T> {
    pub fn new(v: T, u: T, omega: T) -> Result<Self> {
        if !(v > T::zero()) {
            return domain(format!("specific volume must be positive, got {v}"));
        }
        if !(omega >= T::zero() && omega <= T::one()) {
            return domain(format!("omega must lie in [0, 1], got {omega}"));
        }
        Ok(Self { v, u, omega })
    }

    /// Pure phase (`ω = 1`) state.
    pub fn pure(v: T, u: T) -> Result<Self> {
        Self::new(v, u, T::one())
    }
}

/// Which convex function a relative quantity is taken of.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Potential {
    Pressure,
    InternalEnergy,
}

fn check_volume<T: Real>(v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        domain(format!("specific volume must be positive and finite, got {v}"))
    }
}

impl<T: Real> GasLaw<T> {
    pub fn new(gamma: T) -> Result<Self> {
        if gamma > T::one() && gamma.is_finite() {
            Ok(Self { gamma })
        } else {
            domain(format!("adiabatic exponent must exceed 1, got {gamma}"))
        }
    }

    #[inline]
    pub fn gamma(&self) -> T {
        self.gamma
    }

    /// `p(v) = v^-γ`.
    pub fn pressure(&self, v: T) -> Result<T> {
        check_volume(v)?;
        Ok(self.p(v))
    }

    /// `p'(v) = -γ v^-(γ+1)`.
    pub fn pressure_derivative(&self, v: T) -> Result<T> {
        check_volume(v)?;
        Ok(self.dp(v))
    }

    /// Characteristic speed `λ₁ = -√(-p'(v))` or `λ₂ = +√(-p'(v))`.
    pub fn eigenvalue(&self, v: T, family: Family) -> Result<T> {
        check_volume(v)?;
        let c = self.sound_speed(v);
        Ok(match family {
            Family::First => -c,
            Family::Second => c,
        })
    }

    /// Inverse of `λ₁` on the negative half line: `v = (γ/w²)^(1/(γ+1))`.
    pub fn lambda1_inverse(&self, w: T) -> Result<T> {
        if !(w < T::zero()) || !w.is_finite() {
            return domain(format!("1-family speed must be negative, got {w}"));
        }
        Ok(self.lambda1_inv(w))
    }

    /// `∫_{v_from}^{v_to} λ₁(s) ds` in closed form.
    pub fn rarefaction_integral(&self, v_from: T, v_to: T) -> Result<T> {
        check_volume(v_from)?;
        check_volume(v_to)?;
        Ok(self.lambda1_integral(v_from, v_to))
    }

    /// Internal energy `Q(v) = v^(1-γ)/(γ-1)`.
    pub fn internal_energy(&self, v: T) -> Result<T> {
        check_volume(v)?;
        Ok(self.q(v))
    }

    /// `F(v|V) = F(v) - F(V) - F'(V)(v - V)`.
    pub fn relative_quantity(&self, potential: Potential, v: T, reference: T) -> Result<T> {
        check_volume(v)?;
        check_volume(reference)?;
        Ok(match potential {
            Potential::Pressure => self.p_rel(v, reference),
            Potential::InternalEnergy => self.q_rel(v, reference),
        })
    }

    // Unchecked kernels, used in hot loops where positivity is already established.

    #[inline]
    pub(crate) fn p(&self, v: T) -> T {
        v.powf(-self.gamma)
    }

    #[inline]
    pub(crate) fn dp(&self, v: T) -> T {
        -self.gamma * v.powf(-(self.gamma + T::one()))
    }

    #[inline]
    pub(crate) fn sound_speed(&self, v: T) -> T {
        let half = T::lit(0.5);
        self.gamma.sqrt() * v.powf(-(self.gamma + T::one()) * half)
    }

    #[inline]
    pub(crate) fn lambda1_inv(&self, w: T) -> T {
        (self.gamma / (w * w)).powf(T::one() / (self.gamma + T::one()))
    }

    #[inline]
    pub(crate) fn lambda1_integral(&self, v_from: T, v_to: T) -> T {
        let one = T::one();
        let two = T::lit(2.0);
        let e = (one - self.gamma) / two;
        two * self.gamma.sqrt() / (self.gamma - one) * (v_to.powf(e) - v_from.powf(e))
    }

    #[inline]
    pub(crate) fn q(&self, v: T) -> T {
        let e = T::one() - self.gamma;
        -v.powf(e) / e
    }

    #[inline]
    pub(crate) fn p_rel(&self, v: T, reference: T) -> T {
        self.p(v) - self.p(reference) - self.dp(reference) * (v - reference)
    }

    #[inline]
    pub(crate) fn q_rel(&self, v: T, reference: T) -> T {
        // Q'(V) = -p(V)
        self.q(v) - self.q(reference) + self.p(reference) * (v - reference)
    }
}

/// Pointwise state in the effective-velocity variables `(v, h, ω)` used by the
/// relative entropy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyState<T = f64> {
    pub v: T,
    pub h: T,
    pub omega: T,
}

/// `η(w|w̃) = Q(v|Ṽ) + (h - h̃)²/2 + σ²/2` with `σ = ω - 1`.
///
/// The background phase is always the pure phase, so the reference's `omega`
/// is ignored beyond validation.
pub fn relative_entropy_eta<T: Real>(law: &GasLaw<T>, state: &EntropyState<T>, reference: &EntropyState<T>) -> Result<T> {
    check_volume(state.v)?;
    check_volume(reference.v)?;
    let half = T::lit(0.5);
    let dh = state.h - reference.h;
    let sigma = state.omega - T::one();
    Ok(law.q_rel(state.v, reference.v) + half * dh * dh + half * sigma * sigma)
}

/// Measured constants for the three relative-quantity inequalities.
///
/// Constants are reported rather than asserted: each field is the smallest
/// constant that makes the corresponding inequality hold at the given pair.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RelativeInequalityReport {
    /// `|v-V|² ≤ C Q(v|V)` and `|v-V|² ≤ C p(v|V)` for `0<v<3M`, `0<V≤2M`.
    pub quadratic_lower: Option<QuadraticLower>,
    /// `|p(v)-p(V)| ≤ C|v-V|` for `v, V > M/2`.
    pub lipschitz: Option<f64>,
    /// The three `|p(v)-p(V)|²` comparisons in the small-oscillation regime.
    pub small_oscillation: Option<SmallOscillation>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticLower {
    pub c_internal_energy: f64,
    pub c_pressure: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallOscillation {
    /// `C` in `p(v|V) ≤ ((γ+1)/(2γ p(V)) + Cδ)|Δp|²`; negative means slack.
    pub c_pressure_upper: f64,
    /// `C` in `Q(v|V) ≤ (p(V)^(-1/γ-1)/(2γ) + Cδ)|Δp|²`.
    pub c_energy_upper: f64,
    /// `Q(v|V) - [p(V)^(-1/γ-1)/(2γ) Δp² - (1+γ)/(3γ²) p(V)^(-1/γ-2) Δp³]`.
    pub energy_lower_margin: f64,
}

impl RelativeInequalityReport {
    pub fn is_empty(&self) -> bool {
        self.quadratic_lower.is_none() && self.lipschitz.is_none() && self.small_oscillation.is_none()
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Evaluates the relative-quantity inequalities at `(v, V)`.
///
/// `bound` plays two roles: it is the size bound `M` of the first two items and
/// the reference volume whose pressure `p(M)` anchors the third item.
pub fn check_relative_inequalities(
    law: &GasLaw<f64>,
    v: f64,
    reference: f64,
    bound: f64,
    delta: f64,
) -> Result<RelativeInequalityReport> {
    check_volume(v)?;
    check_volume(reference)?;
    check_volume(bound)?;
    let gamma = law.gamma();
    let dv = v - reference;
    let mut report = RelativeInequalityReport::default();

    if v < 3.0 * bound && reference <= 2.0 * bound {
        report.quadratic_lower = Some(QuadraticLower {
            c_internal_energy: ratio(dv * dv, law.q_rel(v, reference)),
            c_pressure: ratio(dv * dv, law.p_rel(v, reference)),
        });
    }
    if v > 0.5 * bound && reference > 0.5 * bound {
        let dp = (law.p(v) - law.p(reference)).abs();
        report.lipschitz = Some(ratio(dp, dv.abs()));
    }
    let dp = law.p(v) - law.p(reference);
    if delta > 0.0 && dp.abs() < delta && (law.p(reference) - law.p(bound)).abs() < delta {
        let p_ref = law.p(reference);
        let dp2 = dp * dp;
        let energy_coeff = p_ref.powf(-1.0 / gamma - 1.0) / (2.0 * gamma);
        let pressure_coeff = (gamma + 1.0) / (2.0 * gamma) / p_ref;
        let c_p = if dp2 == 0.0 { 0.0 } else { (law.p_rel(v, reference) / dp2 - pressure_coeff) / delta };
        let c_q = if dp2 == 0.0 { 0.0 } else { (law.q_rel(v, reference) / dp2 - energy_coeff) / delta };
        let lower = energy_coeff * dp2 - (1.0 + gamma) / (3.0 * gamma * gamma) * p_ref.powf(-1.0 / gamma - 2.0) * dp2 * dp;
        report.small_oscillation = Some(SmallOscillation {
            c_pressure_upper: c_p,
            c_energy_upper: c_q,
            energy_lower_margin: law.q_rel(v, reference) - lower,
        });
    }
    Ok(report)
}
