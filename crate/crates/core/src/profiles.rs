//! Background waves of the scaled system: viscous 2-shock profiles, the
//! Burgers-smoothed 1-rarefaction, and their superpositions before and after
//! the interaction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::psystem::GasLaw;
use crate::riemann::{wave_strength, Phase, WaveFan};
use crate::scalar::Real;

/// Default distance to the end states at which a tabulated profile is cut off.
pub const TAIL_TOLERANCE: f64 = 1e-8;
/// Bound on the discrete residual of the second-order traveling-wave relation.
pub const RESIDUAL_TOLERANCE: f64 = 1e-6;
const RH_TOLERANCE: f64 = 1e-10;

/// Tabulated viscous 2-shock profile `(V, U)(ξ)`, centered so that
/// `V(0) = (v_l + v_r)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShockProfile {
    law: GasLaw,
    pub left: (f64, f64),
    pub right: (f64, f64),
    pub speed: f64,
    xi: Vec<f64>,
    v: Vec<f64>,
    dv: Vec<f64>,
    max_residual: f64,
}

/// Profile value with the derivatives implied by the profile ODE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint {
    pub v: f64,
    pub u: f64,
    pub v_xi: f64,
    pub v_xixi: f64,
}

impl ProfilePoint {
    fn constant(v: f64, u: f64) -> Self {
        Self { v, u, v_xi: 0.0, v_xixi: 0.0 }
    }
}

/// Builds the viscous profile of the 2-shock `(v_l,u_l) → (v_r,u_r)` with
/// speed `s`; `tol` is the tail cutoff `|V - v_end|`.
pub fn build_shock_profile(v_l: f64, u_l: f64, v_r: f64, u_r: f64, s: f64, law: &GasLaw, tol: f64) -> Result<ShockProfile> {
    ShockProfile::build(v_l, u_l, v_r, u_r, s, law, tol)
}

impl ShockProfile {
    pub fn build(v_l: f64, u_l: f64, v_r: f64, u_r: f64, s: f64, law: &GasLaw, tol: f64) -> Result<Self> {
        law.pressure(v_l)?;
        law.pressure(v_r)?;
        if !(tol > 0.0) {
            return Err(Error::Profile(format!("tail tolerance must be positive, got {tol}")));
        }
        let r1 = -s * (v_r - v_l) - (u_r - u_l);
        let r2 = -s * (u_r - u_l) + law.p(v_r) - law.p(v_l);
        if r1.abs().max(r2.abs()) > RH_TOLERANCE {
            return Err(Error::Profile(format!(
                "end states violate the jump conditions at speed {s}: residuals {r1:e}, {r2:e}"
            )));
        }
        let mut profile = Self {
            law: *law,
            left: (v_l, u_l),
            right: (v_r, u_r),
            speed: s,
            xi: vec![0.0],
            v: vec![v_l],
            dv: vec![0.0],
            max_residual: 0.0,
        };
        if v_l == v_r {
            return Ok(profile);
        }
        if !(v_l < v_r && s > 0.0) {
            return Err(Error::Profile(format!("expected a compressive 2-shock, got v_l = {v_l}, v_r = {v_r}, s = {s}")));
        }
        let kappa = profile.rhs_dv(v_l).abs().max(profile.rhs_dv(v_r).abs());
        let mut c = 0.05;
        for _ in 0..8 {
            let (xi, v) = profile.tabulate(tol, c / kappa)?;
            profile.dv = v.iter().map(|&x| profile.rhs(x)).collect();
            profile.xi = xi;
            profile.v = v;
            profile.max_residual = profile.residuals().iter().fold(0.0, |m, r| m.max(r.abs()));
            if profile.max_residual <= RESIDUAL_TOLERANCE {
                return Ok(profile);
            }
            c *= 0.5;
        }
        Err(Error::Profile(format!(
            "traveling-wave residual {:e} above {RESIDUAL_TOLERANCE:e} after refinement",
            profile.max_residual
        )))
    }

    /// `V_ξ = -(V/s)[s²(V - v_l) + p(V) - p(v_l)]`.
    fn rhs(&self, v: f64) -> f64 {
        let (v_l, s) = (self.left.0, self.speed);
        -(v / s) * (s * s * (v - v_l) + self.law.p(v) - self.law.p(v_l))
    }

    fn rhs_dv(&self, v: f64) -> f64 {
        let (v_l, s) = (self.left.0, self.speed);
        -(s * s * (v - v_l) + self.law.p(v) - self.law.p(v_l)) / s - (v / s) * (s * s + self.law.dp(v))
    }

    fn tabulate(&self, tol: f64, h_cap: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let mid = 0.5 * (self.left.0 + self.right.0);
        let dv_cap = (self.right.0 - self.left.0) / 20.0;
        let back = self.branch(mid, -1.0, self.left.0, tol, h_cap, dv_cap)?;
        let fwd = self.branch(mid, 1.0, self.right.0, tol, h_cap, dv_cap)?;
        let mut xi = Vec::with_capacity(back.len() + fwd.len());
        let mut v = Vec::with_capacity(back.len() + fwd.len());
        for &(x, y) in back.iter().rev() {
            xi.push(x);
            v.push(y);
        }
        for &(x, y) in fwd.iter().skip(1) {
            xi.push(x);
            v.push(y);
        }
        Ok((xi, v))
    }

    /// Adaptive Dormand–Prince 5(4) integration from `ξ = 0` toward `target`.
    fn branch(&self, start: f64, dir: f64, target: f64, tol: f64, h_cap: f64, dv_cap: f64) -> Result<Vec<(f64, f64)>> {
        const MAX_STEPS: usize = 2_000_000;
        let (atol, rtol) = (1e-15, 1e-11);
        let mut out = vec![(0.0, start)];
        let (mut x, mut y) = (0.0f64, start);
        let mut h = 0.1 * h_cap;
        let mut h_prev = h;
        for _ in 0..MAX_STEPS {
            let d = y - target;
            if d.abs() <= tol {
                return Ok(out);
            }
            let f = self.rhs(y);
            if f <= 0.0 {
                return Err(Error::Profile(format!("profile slope vanished at V = {y} before reaching {target}")));
            }
            h = h.min(h_cap).min(dv_cap / f).min(1.25 * h_prev);
            let (y5, err) = dp45_step(|v| self.rhs(v), y, dir * h);
            let crossed = (y5 - target) * d <= 0.0 || y5 <= self.left.0 || y5 >= self.right.0;
            let scale = atol + rtol * (y5 - target).abs().max(d.abs() * 1e-3);
            if crossed || err > scale {
                let factor = if crossed { 0.25 } else { (0.9 * (scale / err).powf(0.2)).clamp(0.1, 0.9) };
                h *= factor;
                if h < 1e-14 {
                    return Err(Error::Profile(format!("step size underflow near V = {y}")));
                }
                continue;
            }
            x += dir * h;
            y = y5;
            out.push((x, y));
            h_prev = h;
            let grow = if err > 0.0 { (0.9 * (scale / err).powf(0.2)).clamp(1.0, 5.0) } else { 5.0 };
            h *= grow;
        }
        Err(Error::Profile("tail cutoff not reached within the step budget".into()))
    }

    /// Discrete residual of `-sU_ξ + p(V)_ξ - (U_ξ/V)_ξ` at every node,
    /// using three-point differences on the tabulation.
    pub fn residuals(&self) -> Vec<f64> {
        let n = self.xi.len();
        if n < 3 {
            return vec![0.0; n];
        }
        let s = self.speed;
        let u: Vec<f64> = self.v.iter().map(|&v| self.left.1 - s * (v - self.left.0)).collect();
        let p: Vec<f64> = self.v.iter().map(|&v| self.law.p(v)).collect();
        let du = diff_nonuniform(&self.xi, &u);
        let dp = diff_nonuniform(&self.xi, &p);
        let w: Vec<f64> = du.iter().zip(&self.v).map(|(d, v)| d / v).collect();
        let dw = diff_nonuniform(&self.xi, &w);
        (0..n).map(|i| -s * du[i] + dp[i] - dw[i]).collect()
    }

    pub fn law(&self) -> GasLaw {
        self.law
    }

    pub fn max_residual(&self) -> f64 {
        self.max_residual
    }

    pub fn strength(&self) -> f64 {
        wave_strength(self.left, self.right)
    }

    /// Tabulation `(ξ_i, V_i)`.
    pub fn tabulation(&self) -> (&[f64], &[f64]) {
        (&self.xi, &self.v)
    }

    /// `[-Ξ₋, Ξ₊]`: outside this window the far-field constants are returned.
    pub fn support(&self) -> (f64, f64) {
        (self.xi[0], *self.xi.last().unwrap())
    }

    pub fn eval(&self, xi: f64) -> (f64, f64) {
        let p = self.eval_point(xi);
        (p.v, p.u)
    }

    pub fn eval_point(&self, xi: f64) -> ProfilePoint {
        let n = self.xi.len();
        if n == 1 {
            return ProfilePoint::constant(self.left.0, self.left.1);
        }
        if xi <= self.xi[0] {
            return ProfilePoint::constant(self.left.0, self.left.1);
        }
        if xi >= self.xi[n - 1] {
            return ProfilePoint::constant(self.right.0, self.right.1);
        }
        let i = self.xi.partition_point(|&x| x <= xi).saturating_sub(1).min(n - 2);
        let (x0, x1) = (self.xi[i], self.xi[i + 1]);
        let h = x1 - x0;
        let (v0, v1) = (self.v[i], self.v[i + 1]);
        let (mut m0, mut m1) = (self.dv[i], self.dv[i + 1]);
        let slope = (v1 - v0) / h;
        if slope == 0.0 {
            m0 = 0.0;
            m1 = 0.0;
        } else {
            let (a, b) = (m0 / slope, m1 / slope);
            let r = a * a + b * b;
            if r > 9.0 {
                let t = 3.0 / r.sqrt();
                m0 = t * a * slope;
                m1 = t * b * slope;
            }
        }
        let t = (xi - x0) / h;
        let (t2, t3) = (t * t, t * t * t);
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * v0
            + (t3 - 2.0 * t2 + t) * h * m0
            + (-2.0 * t3 + 3.0 * t2) * v1
            + (t3 - t2) * h * m1;
        let v = v.clamp(v0.min(v1), v0.max(v1));
        let v_xi = self.rhs(v);
        ProfilePoint {
            v,
            u: self.left.1 - self.speed * (v - self.left.0),
            v_xi,
            v_xixi: self.rhs_dv(v) * v_xi,
        }
    }
}

fn dp45_step(f: impl Fn(f64) -> f64, y: f64, h: f64) -> (f64, f64) {
    let k1 = f(y);
    let k2 = f(y + h * (k1 / 5.0));
    let k3 = f(y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
    let k4 = f(y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3));
    let k5 = f(y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 + 64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4));
    let k6 = f(y + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 + 46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4
        - 5103.0 / 18656.0 * k5));
    let y5 = y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4 - 2187.0 / 6784.0 * k5
        + 11.0 / 84.0 * k6);
    let k7 = f(y5);
    let y4 = y + h * (5179.0 / 57600.0 * k1 + 7571.0 / 16695.0 * k3 + 393.0 / 640.0 * k4
        - 92097.0 / 339200.0 * k5 + 187.0 / 2100.0 * k6 + k7 / 40.0);
    (y5, (y5 - y4).abs())
}

/// Three-point derivative on a nonuniform grid, one-sided at the ends.
pub(crate) fn diff_nonuniform(x: &[f64], g: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut d = vec![0.0; n];
    if n < 3 {
        if n == 2 {
            let s = (g[1] - g[0]) / (x[1] - x[0]);
            d.fill(s);
        }
        return d;
    }
    let three = |i0: usize, at: usize| {
        let (a, b, c) = (x[i0], x[i0 + 1], x[i0 + 2]);
        let t = x[at];
        let l0 = ((t - b) + (t - c)) / ((a - b) * (a - c));
        let l1 = ((t - a) + (t - c)) / ((b - a) * (b - c));
        let l2 = ((t - a) + (t - b)) / ((c - a) * (c - b));
        l0 * g[i0] + l1 * g[i0 + 1] + l2 * g[i0 + 2]
    };
    d[0] = three(0, 0);
    for i in 1..n - 1 {
        d[i] = three(i - 1, i);
    }
    d[n - 1] = three(n - 3, n - 1);
    d
}

/// Exact solution of `w_τ + w w_y = 0` with data
/// `(w_m + w₋)/2 + (w_m - w₋)/2 · tanh(y/ℓ)`.
pub fn burgers_smooth<T: Real>(w_minus: T, w_m: T, ell: T, y: T, tau: T) -> T {
    burgers_smooth_with_slope(w_minus, w_m, ell, y, tau).0
}

/// `(w, w_y)` of [`burgers_smooth`].
pub fn burgers_smooth_with_slope<T: Real>(w_minus: T, w_m: T, ell: T, y: T, tau: T) -> (T, T) {
    let half = T::lit(0.5);
    let mean = half * (w_m + w_minus);
    let amp = half * (w_m - w_minus);
    let data = |y0: T| {
        let x = y0 / ell;
        let c = x.cosh();
        (mean + amp * x.tanh(), amp / (c * c) / ell)
    };
    if amp == T::zero() {
        return (w_minus, T::zero());
    }
    if tau == T::zero() {
        return data(y);
    }
    // g(y0) = y0 + w(y0) τ - y is increasing; its root is bracketed by the
    // extreme characteristic speeds.
    let (mut lo, mut hi) = (y - w_m * tau, y - w_minus * tau);
    let (w_lo, w_hi) = (data(lo).0, data(hi).0);
    if w_lo == w_hi {
        // Both ends sit in a saturated tail of the tanh: w is known, the
        // slope still follows from the foot of its characteristic.
        let dw = data(y - w_lo * tau).1;
        return (w_lo, dw / (T::one() + dw * tau));
    }
    let mut y0 = y - mean * tau;
    if !(y0 > lo && y0 < hi) {
        y0 = half * (lo + hi);
    }
    let eps = T::epsilon();
    let mut last_step = hi - lo;
    for _ in 0..200 {
        let (w, dw) = data(y0);
        let gv = y0 + w * tau - y;
        if gv == T::zero() {
            break;
        }
        if gv < T::zero() {
            lo = y0;
        } else {
            hi = y0;
        }
        let step = gv / (T::one() + dw * tau);
        let mut next = y0 - step;
        // Newton in a flat tanh tail can bounce across the root without
        // shrinking the bracket; bisect unless the step at least halves.
        if !(next > lo && next < hi) || step.abs() > half * last_step {
            next = half * (lo + hi);
        }
        last_step = (next - y0).abs();
        let scale = T::one() + y0.abs().max(y.abs());
        if (next - y0).abs() <= T::lit(4.0) * eps * scale || hi - lo <= T::lit(4.0) * eps * scale {
            y0 = next;
            break;
        }
        y0 = next;
    }
    let (w, dw) = data(y0);
    (w, dw / (T::one() + dw * tau))
}

/// Smoothed 1-rarefaction `(v₋,u₋) → (v_m,u_m)` built from [`burgers_smooth`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RarefactionProfile<T = f64> {
    law: GasLaw<T>,
    pub v_minus: T,
    pub u_minus: T,
    pub v_m: T,
    pub u_m: T,
    pub w_minus: T,
    pub w_m: T,
    pub ell: T,
}

/// Rarefaction value and spatial derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RarefactionPoint<T = f64> {
    pub v: T,
    pub u: T,
    pub v_y: T,
    pub u_y: T,
}

impl<T: Real> RarefactionProfile<T> {
    /// Rarefaction from `(v₋,u₋)` to the volume `v_m ≥ v₋` with smoothing `ell`.
    pub fn new(law: GasLaw<T>, v_minus: T, u_minus: T, v_m: T, ell: T) -> Result<Self> {
        law.pressure(v_minus)?;
        law.pressure(v_m)?;
        if !(ell > T::zero()) {
            return Err(Error::Config(format!("rarefaction smoothing ell must be positive, got {ell}")));
        }
        if v_m < v_minus {
            return Err(Error::Domain(format!("1-rarefaction needs v_m >= v-, got {v_m} < {v_minus}")));
        }
        Ok(Self {
            law,
            v_minus,
            u_minus,
            v_m,
            u_m: u_minus - law.lambda1_integral(v_minus, v_m),
            w_minus: -law.sound_speed(v_minus),
            w_m: -law.sound_speed(v_m),
            ell,
        })
    }

    pub fn strength(&self) -> T {
        wave_strength((self.v_minus, self.u_minus), (self.v_m, self.u_m))
    }

    pub fn eval(&self, y: T, tau: T) -> (T, T) {
        let p = self.eval_point(y, tau);
        (p.v, p.u)
    }

    pub fn eval_point(&self, y: T, tau: T) -> RarefactionPoint<T> {
        if self.v_m == self.v_minus {
            return RarefactionPoint { v: self.v_minus, u: self.u_minus, v_y: T::zero(), u_y: T::zero() };
        }
        let (w, w_y) = burgers_smooth_with_slope(self.w_minus, self.w_m, self.ell, y, tau);
        let v = self.law.lambda1_inv(w).max(self.v_minus).min(self.v_m);
        let u = if v == self.v_m { self.u_m } else { self.u_minus - self.law.lambda1_integral(self.v_minus, v) };
        // V = (γ/w²)^{1/(γ+1)}  ⇒  dV/dw = -2V / ((γ+1) w)
        let gamma = self.law.gamma();
        let v_y = -T::lit(2.0) * v / ((gamma + T::one()) * w) * w_y;
        let u_y = self.law.sound_speed(v) * v_y;
        RarefactionPoint { v, u, v_y, u_y }
    }
}

/// Phase-field initial shape `ω₀ = χ₀²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PhaseProfile {
    /// `χ₀ = tanh(y/width)`: a sign-changing interface with `ω₀(0) = 0`.
    Kink { width: f64 },
    /// `ω₀ = 1 - amplitude·sech²(y/width)`: a localized phase defect.
    Dimple { amplitude: f64, width: f64 },
    /// `ω₀ ≡ 1`.
    Uniform,
}

impl Default for PhaseProfile {
    fn default() -> Self {
        PhaseProfile::Kink { width: 1.0 }
    }
}

impl PhaseProfile {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PhaseProfile::Kink { width } if !(width > 0.0) => {
                Err(Error::Config(format!("phase.width must be positive, got {width}")))
            }
            PhaseProfile::Dimple { amplitude, width } => {
                if !(width > 0.0) {
                    Err(Error::Config(format!("phase.width must be positive, got {width}")))
                } else if !(0.0..=1.0).contains(&amplitude) {
                    Err(Error::Config(format!("phase.amplitude must lie in [0, 1], got {amplitude}")))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    pub fn omega(&self, y: f64) -> f64 {
        match *self {
            PhaseProfile::Kink { width } => {
                let t = (y / width).tanh();
                t * t
            }
            PhaseProfile::Dimple { amplitude, width } => {
                let c = (y / width).cosh();
                1.0 - amplitude / (c * c)
            }
            PhaseProfile::Uniform => 1.0,
        }
    }
}

/// Superposition of two incoming viscous shocks, in the rest frame `(y, τ)`
/// with both shock lines passing through `y = 0` at `τ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PreComposite {
    pub rear: ShockProfile,
    pub front: ShockProfile,
    pub v_star: f64,
    pub u_star: f64,
}

/// Smoothed rarefaction plus shifted outgoing viscous shock, evaluated in the
/// frame `ξ = y - s̃₂τ` moving with the outgoing shock.
#[derive(Debug, Clone, PartialEq)]
pub struct PostComposite {
    pub rarefaction: RarefactionProfile,
    pub shock: ShockProfile,
    pub v_m: f64,
    pub u_m: f64,
    pub s_tilde2: f64,
}

/// Background value at one point of the post-interaction composite, with the
/// pieces the shift and the dissipation functionals need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PostSample {
    pub v: f64,
    pub u: f64,
    pub rarefaction: RarefactionPoint,
    pub shock: ProfilePoint,
}

impl PostSample {
    /// Background effective velocity `Ũ^R + (Ũ^S - (ln Ṽ^S)_ξ) - u_m`.
    pub fn h(&self, u_m: f64) -> f64 {
        self.rarefaction.u + self.shock.u - self.shock.v_xi / self.shock.v - u_m
    }
}

/// The composite background used before or after the interaction.
#[derive(Debug, Clone, PartialEq)]
pub enum CompositeWave {
    Pre(PreComposite),
    Post(PostComposite),
}

/// `a + b - shared`, exact whenever either wave sits on the shared state.
fn superpose(a: f64, b: f64, shared: f64) -> f64 {
    if b == shared {
        a
    } else {
        (a - shared) + b
    }
}

impl PreComposite {
    pub fn from_fan(fan: &WaveFan, tol: f64) -> Result<Self> {
        let (rear, front) = fan
            .incoming_pair()
            .ok_or_else(|| Error::NoInteraction("pre-interaction composite needs two incoming shocks".into()))?;
        let law = fan.law;
        let rear = ShockProfile::build(rear.left.0, rear.left.1, rear.right.0, rear.right.1, rear.speed, &law, tol)?;
        let front = ShockProfile::build(front.left.0, front.left.1, front.right.0, front.right.1, front.speed, &law, tol)?;
        let es = fan.end_states;
        Ok(Self { rear, front, v_star: es.v_star, u_star: es.u_star })
    }

    /// `(V̄, Ū)(y, τ) = S₂₁(y - s₂₁τ) + S₂₂(y - s₂₂τ) - (v*, u*)`.
    pub fn eval(&self, y: f64, tau: f64) -> (f64, f64) {
        let (a, b) = self.eval_parts(y, tau);
        (superpose(a.v, b.v, self.v_star), superpose(a.u, b.u, self.u_star))
    }

    /// Both profile points entering the superposition.
    pub fn eval_parts(&self, y: f64, tau: f64) -> (ProfilePoint, ProfilePoint) {
        (self.rear.eval_point(y - self.rear.speed * tau), self.front.eval_point(y - self.front.speed * tau))
    }

    pub fn far_field(&self) -> ((f64, f64), (f64, f64)) {
        (self.rear.left, self.front.right)
    }
}

impl PostComposite {
    pub fn from_fan(fan: &WaveFan, ell: f64, tol: f64) -> Result<Self> {
        let es = fan.end_states;
        let shock = fan
            .outgoing_shock
            .ok_or_else(|| Error::NoInteraction("post-interaction composite needs an outgoing 2-shock".into()))?;
        let rarefaction = RarefactionProfile::new(fan.law, es.v_minus, es.u_minus, fan.v_m, ell)?;
        let profile = ShockProfile::build(shock.left.0, shock.left.1, shock.right.0, shock.right.1, shock.speed, &fan.law, tol)?;
        Ok(Self { rarefaction, shock: profile, v_m: fan.v_m, u_m: fan.u_m, s_tilde2: shock.speed })
    }

    /// `(Ṽ, Ũ)` at moving-frame position `ξ`, time `τ ≥ 0` and shift `X`.
    pub fn eval_moving(&self, xi: f64, tau: f64, shift: f64) -> (f64, f64) {
        let s = self.sample(xi, tau, shift);
        (s.v, s.u)
    }

    pub fn sample(&self, xi: f64, tau: f64, shift: f64) -> PostSample {
        let r = self.rarefaction.eval_point(xi + self.s_tilde2 * tau, tau);
        let s = self.shock.eval_point(xi - shift);
        PostSample { v: superpose(r.v, s.v, self.v_m), u: superpose(r.u, s.u, self.u_m), rarefaction: r, shock: s }
    }

    pub fn far_field(&self) -> ((f64, f64), (f64, f64)) {
        ((self.rarefaction.v_minus, self.rarefaction.u_minus), self.shock.right)
    }
}

impl CompositeWave {
    pub fn phase(&self) -> Phase {
        match self {
            CompositeWave::Pre(_) => Phase::Pre,
            CompositeWave::Post(_) => Phase::Post,
        }
    }

    /// Rest-frame evaluation at `(y, τ)`; the shift only affects the
    /// post-interaction shock.
    pub fn eval(&self, y: f64, tau: f64, shift: f64) -> Result<(f64, f64)> {
        match self {
            CompositeWave::Pre(c) if tau <= 0.0 => Ok(c.eval(y, tau)),
            CompositeWave::Post(c) if tau >= 0.0 => Ok(c.eval_moving(y - c.s_tilde2 * tau, tau, shift)),
            _ => Err(Error::Usage(format!("composite of phase {:?} evaluated at tau = {tau}", self.phase()))),
        }
    }

    pub fn far_field(&self) -> ((f64, f64), (f64, f64)) {
        match self {
            CompositeWave::Pre(c) => c.far_field(),
            CompositeWave::Post(c) => c.far_field(),
        }
    }
}
