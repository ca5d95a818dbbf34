use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::FourierError;
use crate::quad::{integrate, integrate_pieces};

/// Secondary-term kernels, each against the normalised measure `dt/π` on `[0, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    /// `cos t / cos 2t`, poles at `π/4` and `3π/4`.
    CosOverCos2,
    /// `1 / (2 cos t)`, pole at `π/2`.
    HalfSec,
}

impl Kernel {
    pub fn eval(self, t: f64) -> f64 {
        match self {
            Kernel::CosOverCos2 => t.cos() / (2.0 * t).cos(),
            Kernel::HalfSec => 0.5 / t.cos(),
        }
    }

    /// `K(p + u)` for a pole `p`, with the vanishing denominator written in
    /// terms of `u` so that it keeps full relative precision.
    pub fn near_pole(self, p: f64, u: f64) -> f64 {
        match self {
            Kernel::CosOverCos2 => {
                let s = (2.0 * u).sin();
                let den = if p < FRAC_PI_2 { -s } else { s };
                (p + u).cos() / den
            }
            Kernel::HalfSec => -0.5 / u.sin(),
        }
    }

    pub fn poles(self) -> &'static [f64] {
        match self {
            Kernel::CosOverCos2 => &[FRAC_PI_4, 3.0 * FRAC_PI_4],
            Kernel::HalfSec => &[FRAC_PI_2],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvOptions {
    /// Largest excision radius.
    pub base_eps: f64,
    /// Number of radius halvings.
    pub halvings: u32,
    /// Required agreement of the last two extrapolants.
    pub tol: f64,
}

impl Default for PvOptions {
    fn default() -> Self {
        PvOptions { base_eps: 1e-2, halvings: 14, tol: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvValue {
    pub value: f64,
    pub error: f64,
}

/// `(1/π) PV∫₀^π φ(t) K(t) dt` with symmetric excision around every pole.
///
/// `phi` is evaluated on `[0, π]` only; `jumps` are its discontinuities.
pub fn pv_secondary_integral(phi: &dyn Fn(f64) -> f64, jumps: &[f64], kernel: Kernel) -> Result<PvValue, FourierError> {
    pv_secondary_integral_with(phi, jumps, kernel, PvOptions::default())
}

pub fn pv_secondary_integral_with(
    phi: &dyn Fn(f64) -> f64,
    jumps: &[f64],
    kernel: Kernel,
    opts: PvOptions,
) -> Result<PvValue, FourierError> {
    let poles = kernel.poles();
    let f = |t: f64| phi(t) * kernel.eval(t) / PI;

    // Keep every jump that is not a pole outside the excised discs.
    let mut eps0 = opts.base_eps;
    let mut outer_jumps = Vec::new();
    for &j in jumps {
        let d = poles.iter().map(|p| (j - p).abs()).fold(f64::INFINITY, f64::min);
        if d < 1e-12 {
            continue;
        }
        eps0 = eps0.min(0.5 * d);
        outer_jumps.push(j);
    }

    let mut points = vec![0.0, PI];
    for p in poles {
        points.push(p - eps0);
        points.push(p + eps0);
    }
    points.extend(outer_jumps.iter().copied().filter(|&j| j > 0.0 && j < PI));
    points.sort_by(f64::total_cmp);
    let mut body = 0.0;
    for w in points.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        if poles.iter().any(|p| (mid - p).abs() < eps0) {
            continue;
        }
        body += integrate_pieces(f, w, 1e-13)?.value;
    }

    // Annuli eps_{k+1} < |t − p| < eps_k, folded onto u > 0.
    let mut estimates = vec![body];
    let mut rings = Vec::new();
    let mut eps = eps0;
    for _ in 0..opts.halvings {
        let inner = 0.5 * eps;
        let mut ring = 0.0;
        for &p in poles {
            let g = |u: f64| (phi(p + u) * kernel.near_pole(p, u) + phi(p - u) * kernel.near_pole(p, -u)) / PI;
            ring += integrate(g, inner, eps, 1e-15, 1e-12, 200)?.value;
        }
        rings.push(ring);
        estimates.push(estimates.last().copied().unwrap_or(0.0) + ring);
        eps = inner;
    }

    let last_ring = *rings.last().unwrap_or(&0.0);
    let last = *estimates.last().unwrap_or(&body);
    if rings.len() >= 2 {
        let prev_ring = rings[rings.len() - 2];
        if last_ring.abs() > 1e-10 && last_ring.abs() > 0.75 * prev_ring.abs() {
            return Err(FourierError::Divergent { direction: last_ring.signum(), last_estimate: last });
        }
    }

    // The truncation error is odd in eps: remove eps, eps³, eps⁵.
    let mut table = estimates.clone();
    let mut error = f64::INFINITY;
    for power in [1, 3, 5] {
        let factor = 2f64.powi(power);
        let next: Vec<f64> = table.windows(2).map(|w| (factor * w[1] - w[0]) / (factor - 1.0)).collect();
        if next.len() < 2 {
            break;
        }
        error = (next[next.len() - 1] - next[next.len() - 2]).abs();
        table = next;
    }
    let value = *table.last().unwrap_or(&last);
    if error.is_nan() || error > opts.tol.max(1e-12 * value.abs()) {
        return Err(FourierError::Divergent { direction: last_ring.signum(), last_estimate: last });
    }
    Ok(PvValue { value, error })
}
