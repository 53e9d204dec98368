//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use nsac_core::profiles::{burgers_smooth, RarefactionProfile, ShockProfile};
use nsac_core::psystem::GasLaw;

/// Characteristic speed `√(γ v^{-γ-1})`.
pub fn sound(gamma: f64, v: f64) -> f64 {
    (gamma * v.powf(-gamma - 1.0)).sqrt()
}

/// Exact centered 1-rarefaction volume from `v_minus` to `v_m` at `(y, τ)`.
pub fn centered_rarefaction_volume(gamma: f64, v_minus: f64, v_m: f64, y: f64, tau: f64) -> f64 {
    let (w_l, w_r) = (-sound(gamma, v_minus), -sound(gamma, v_m));
    let w = (y / tau).clamp(w_l, w_r);
    (gamma / (w * w)).powf(1.0 / (gamma + 1.0))
}

/// Exponential rate of `|V - v_r|` fitted over the last decade of the right tail.
pub fn right_tail_rate(p: &ShockProfile, tol: f64) -> f64 {
    let (xi, v) = p.tabulation();
    let v_r = p.right.0;
    let pts: Vec<(f64, f64)> = xi
        .iter()
        .zip(v)
        .filter(|(&x, &vv)| x > 0.0 && (v_r - vv).abs() <= 10.0 * tol && (v_r - vv).abs() > 0.0)
        .map(|(&x, &vv)| (x, (v_r - vv).abs().ln()))
        .collect();
    assert!(pts.len() >= 3, "too few tail nodes: {}", pts.len());
    -least_squares_slope(&pts)
}

pub fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Finite-volume solution of `w_τ + (w²/2)_y = 0` with tanh data: MUSCL
/// reconstruction with minmod slopes, Godunov flux, SSP-RK2. Returns cell
/// centers and averages at `tau`.
pub fn burgers_finite_volume(w_minus: f64, w_m: f64, ell: f64, lo: f64, hi: f64, n: usize, tau: f64) -> (Vec<f64>, Vec<f64>) {
    let dx = (hi - lo) / n as f64;
    let x: Vec<f64> = (0..n).map(|i| lo + (i as f64 + 0.5) * dx).collect();
    // cell averages of the data from the antiderivative of tanh
    let mean = 0.5 * (w_m + w_minus);
    let amp = 0.5 * (w_m - w_minus);
    let prim = |y: f64| mean * y + amp * ell * (y / ell).cosh().ln();
    let mut w: Vec<f64> = (0..n)
        .map(|i| {
            let (a, b) = (lo + i as f64 * dx, lo + (i + 1) as f64 * dx);
            (prim(b) - prim(a)) / dx
        })
        .collect();
    let speed = w_minus.abs().max(w_m.abs());
    let steps = (tau / (0.4 * dx / speed)).ceil() as usize;
    let dt = tau / steps as f64;
    let mut stage = w.clone();
    let mut rate = vec![0.0; n];
    for _ in 0..steps {
        fv_rate(&w, dx, &mut rate);
        for i in 0..n {
            stage[i] = w[i] + dt * rate[i];
        }
        fv_rate(&stage, dx, &mut rate);
        for i in 0..n {
            w[i] = 0.5 * w[i] + 0.5 * (stage[i] + dt * rate[i]);
        }
    }
    (x, w)
}

fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

fn godunov(l: f64, r: f64) -> f64 {
    let f = |w: f64| 0.5 * w * w;
    if l <= r {
        if l > 0.0 {
            f(l)
        } else if r < 0.0 {
            f(r)
        } else {
            0.0
        }
    } else {
        f(l).max(f(r))
    }
}

fn fv_rate(w: &[f64], dx: f64, out: &mut [f64]) {
    let n = w.len();
    let at = |i: isize| w[i.clamp(0, n as isize - 1) as usize];
    let slope = |i: isize| minmod(at(i) - at(i - 1), at(i + 1) - at(i));
    let flux = |i: isize| godunov(at(i) + 0.5 * slope(i), at(i + 1) - 0.5 * slope(i + 1));
    let mut left = flux(-1);
    for i in 0..n as isize {
        let right = flux(i);
        out[i as usize] = -(right - left) / dx;
        left = right;
    }
}

/// Manufactured steady state `v = 1 + a sin y`, `u = b cos y`,
/// `ω = 1 - c sin² y` and the spatial operator applied to it, derived by hand.
pub struct Manufactured {
    pub gamma: f64,
    pub speed: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Manufactured {
    pub fn fields(&self, y: f64) -> [f64; 3] {
        let s = y.sin();
        [1.0 + self.a * s, self.b * y.cos(), 1.0 - self.c * s * s]
    }

    /// `L(v, u, ω)` at `y`, the exact right-hand side of the system.
    pub fn operator(&self, y: f64) -> [f64; 3] {
        let (a, b, c, g) = (self.a, self.b, self.c, self.gamma);
        let (s, co) = (y.sin(), y.cos());
        let v = 1.0 + a * s;
        let v1 = a * co;
        let u1 = -b * s;
        let u2 = -b * co;
        let w = 1.0 - c * s * s;
        let w1 = -c * (2.0 * y).sin();
        let w2 = -2.0 * c * (2.0 * y).cos();
        let p1 = -g * v.powf(-g - 1.0) * v1;
        let visc = u2 / v - u1 * v1 / (v * v);
        let cap = 2.0 * w1 * w2 / (w * v * v) - w1.powi(3) / (w * w * v * v) - 2.0 * w1 * w1 * v1 / (w * v.powi(3));
        let lv = u1 + self.speed * v1;
        let lu = -p1 + visc - cap / 8.0 + self.speed * u1;
        let lw = -2.0 * v * (w - 1.0) * w + v * (w2 / v - w1 * v1 / (v * v)) - w1 * w1 / (2.0 * w) + self.speed * w1;
        [lv, lu, lw]
    }
}

/// Largest deviation of cell averages of [`burgers_smooth`] from the
/// finite-volume solution, for the fixture's 1-speeds between `v = 1` and `1.2`.
pub fn burgers_oracle_deviation(ell: f64, tau: f64) -> f64 {
    let (w_minus, w_m) = (-sound(2.0, 1.0), -sound(2.0, 1.2));
    let (x, w) = burgers_finite_volume(w_minus, w_m, ell, -14.0, 4.0, 18_000, tau);
    let h = 0.5e-3;
    x.iter()
        .zip(&w)
        .map(|(&xi, &wi)| {
            // Simpson cell average of the exact solution
            let exact = (burgers_smooth(w_minus, w_m, ell, xi - h, tau)
                + 4.0 * burgers_smooth(w_minus, w_m, ell, xi, tau)
                + burgers_smooth(w_minus, w_m, ell, xi + h, tau))
                / 6.0;
            (exact - wi).abs()
        })
        .fold(0.0, f64::max)
}

/// L² distance in `v` between the smoothed and the centered rarefaction
/// from `v = 1` to `v = 1.2`.
pub fn rarefaction_distance(ell: f64, tau: f64) -> f64 {
    let law = GasLaw::new(2.0).unwrap();
    let (v_minus, v_m) = (1.0, 1.2);
    let r = RarefactionProfile::new(law, v_minus, 0.0, v_m, ell).unwrap();
    let (lo, hi) = (-sound(2.0, v_minus) * tau - 20.0, -sound(2.0, v_m) * tau + 20.0);
    let dy = 1e-3;
    let n = ((hi - lo) / dy) as usize;
    let mut acc = 0.0;
    for i in 0..=n {
        let y = lo + i as f64 * dy;
        let d = r.eval(y, tau).0 - centered_rarefaction_volume(2.0, v_minus, v_m, y, tau);
        let wgt = if i == 0 || i == n { 0.5 } else { 1.0 };
        acc += wgt * d * d * dy;
    }
    acc.sqrt()
}
