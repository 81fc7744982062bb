//! Mean Casimir force between two partially transmitting mirrors.
//!
//! With `r = r1 r2` and the round-trip phase `2 w q`, the intracavity
//! spectral density is
//!
//! ```text
//! g[w] = (1 - |r|^2) / |1 - r e^{2 i w q}|^2
//! ```
//!
//! and the force is `∫_0^∞ dw/2pi hbar w (1 - g[w])`, positive when the
//! mirrors attract.
//!
//! The real-frequency integral is split at the cavity resonances `n pi / q`
//! up to a frequency `W` where `|r|` has dropped to [`SPLIT_REFLECTIVITY`].
//! Past `W` the integrand still oscillates with a slowly decaying envelope,
//! so the remainder is taken along the ray `W + i y`, where it decays like
//! `exp(-2 q y)`. Mirrors without an analytic continuation are truncated at
//! the end of their table instead.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::quadrature::integrate_semi_infinite_with;
use crate::numerics::{Quadrature, TailEstimate};
use crate::scatter::{MirrorModel, ScatteringAmplitudes};
use crate::units::Hbar;

/// Round-trip reflectivity below which the resonance-resolved part stops.
pub const SPLIT_REFLECTIVITY: f64 = 1e-3;
/// Reflectivity required at the end of a tabulated mirror.
pub const TABLE_END_REFLECTIVITY: f64 = 1e-8;
const MAX_RESONANCE_INTERVALS: usize = 2_000_000;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CavityConfig {
    pub mirror1: MirrorModel,
    pub mirror2: MirrorModel,
    /// Mirror separation `q2 - q1`.
    pub q: f64,
}

impl CavityConfig {
    pub fn new(mirror1: MirrorModel, mirror2: MirrorModel, q: f64) -> Result<Self> {
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::arg(format!("mirror separation must be finite and > 0, got {q}")));
        }
        Ok(CavityConfig {
            mirror1,
            mirror2,
            q,
        })
    }

    pub fn swapped(&self) -> Self {
        CavityConfig {
            mirror1: self.mirror2.clone(),
            mirror2: self.mirror1.clone(),
            q: self.q,
        }
    }

    fn both_perfect(&self) -> bool {
        matches!(
            (&self.mirror1, &self.mirror2),
            (MirrorModel::Perfect, MirrorModel::Perfect)
        )
    }

    fn decoupled(&self) -> bool {
        matches!(self.mirror1, MirrorModel::Transparent)
            || matches!(self.mirror2, MirrorModel::Transparent)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForceResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

/// `1 - |r|^2` for one mirror, using `|s|^2` where the model is exactly unitary.
fn transmissivity(model: &MirrorModel, a: &ScatteringAmplitudes) -> f64 {
    if model.is_analytic() {
        a.s.norm_sqr()
    } else {
        1.0 - a.r.norm_sqr()
    }
}

/// Intracavity spectral density `g[w]` for `w >= 0`.
pub fn intracavity_density(cavity: &CavityConfig, omega: f64) -> Result<f64> {
    if !(omega >= 0.0 && omega.is_finite()) {
        return Err(Error::arg(format!("intracavity density needs finite w >= 0, got {omega}")));
    }
    let a1 = cavity.mirror1.amplitudes(omega)?;
    let a2 = cavity.mirror2.amplitudes(omega)?;
    let r = a1.r * a2.r;
    if r.norm() >= 1.0 {
        return Err(Error::SingularModel(format!(
            "|r1 r2| = {} >= 1 at w = {omega}; the cavity is lossless there",
            r.norm()
        )));
    }
    let (t1, t2) = (
        transmissivity(&cavity.mirror1, &a1),
        transmissivity(&cavity.mirror2, &a2),
    );
    let numerator = t1 + a1.r.norm_sqr() * t2;
    let phase = Complex64::from_polar(1.0, 2.0 * omega * cavity.q);
    Ok(numerator / (1.0 - r * phase).norm_sqr())
}

/// Mean force between the mirrors, to absolute error `tol`.
pub fn casimir_force(cavity: &CavityConfig, tol: f64, hbar: Hbar) -> Result<ForceResult> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::arg(format!("tolerance must be positive, got {tol}")));
    }
    if cavity.both_perfect() {
        return Err(Error::SingularModel(
            "two perfect mirrors: use the closed form casimir_force_perfect_1d".into(),
        ));
    }
    if cavity.decoupled() {
        return Ok(ForceResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let q = cavity.q;
    let h = hbar.get();
    let round_trip = |w: f64| -> Result<f64> { Ok(crate::scatter::composite_reflection(&cavity.mirror1, &cavity.mirror2, w)?.norm()) };

    let analytic = cavity.mirror1.is_analytic() && cavity.mirror2.is_analytic();
    let end = if analytic {
        let mut w = [&cavity.mirror1, &cavity.mirror2]
            .iter()
            .filter_map(|m| m.transparency_scale())
            .fold(PI / q, f64::max);
        let mut steps = 0;
        while round_trip(w)? > SPLIT_REFLECTIVITY {
            w *= 2.0;
            steps += 1;
            if steps > 200 {
                return Err(Error::Precondition(
                    "mirrors are not transparent at high frequency".into(),
                ));
            }
        }
        w
    } else {
        let top = |m: &MirrorModel| match m {
            MirrorModel::Tabulated(t) => t.range().1,
            _ => f64::INFINITY,
        };
        top(&cavity.mirror1).min(top(&cavity.mirror2))
    };

    let intervals = (end * q / PI).ceil() as usize;
    if intervals > MAX_RESONANCE_INTERVALS {
        return Err(Error::Precondition(format!(
            "{intervals} resonance intervals below the transparency frequency; \
             q times the mirror cut-off is too large"
        )));
    }
    let mut splits: Vec<f64> = (0..intervals).map(|n| n as f64 * PI / q).collect();
    splits.push(end);
    if analytic {
        // the last split is a resonance so the ray starts between peaks
        splits.pop();
        splits.push(intervals as f64 * PI / q);
    }

    let quad = Quadrature {
        abs_tol: tol,
        rel_tol: 0.0,
        max_evals: 2_000_000 + 400 * splits.len(),
    };
    let mut failure = None;
    let integrand = |w: f64| match intracavity_density(cavity, w) {
        Ok(g) => h * w * (1.0 - g) / (2.0 * PI),
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    };
    let tail = |w: f64| -> Result<TailEstimate> {
        if analytic {
            ray_tail(cavity, w, tol / 10.0, h)
        } else {
            let r = round_trip(w)?;
            if r > TABLE_END_REFLECTIVITY {
                return Err(Error::Convergence {
                    partial: 0.0,
                    abs_error: f64::INFINITY,
                    evaluations: 0,
                });
            }
            // assumes |r| keeps falling at least like 1/w^3 past the table
            Ok(TailEstimate::bound_only(h * r * w * w / PI))
        }
    };
    let result = integrate_semi_infinite_with(&quad, integrand, &splits, tail);
    if let Some(e) = failure {
        return Err(e);
    }
    let r = result?;
    Ok(ForceResult {
        value: r.value,
        abs_error_estimate: r.abs_error,
        evaluations: r.evaluations,
    })
}

/// `∫_W^∞ dw/2pi hbar w (1 - g)` along `W + i y`.
///
/// On the real axis `1 - g = -2 Re[rho / (1 - rho)]` with `rho = r e^{2 i w q}`;
/// the analytic function `w rho / (1 - rho)` decays in the upper half plane,
/// so the real-axis remainder equals `(hbar/pi) Im ∫_0^∞ H(W + i y) dy`.
fn ray_tail(cavity: &CavityConfig, start: f64, tol: f64, h: f64) -> Result<TailEstimate> {
    let q = cavity.q;
    let r_start = crate::scatter::composite_reflection(&cavity.mirror1, &cavity.mirror2, start)?.norm();
    if r_start >= 1.0 {
        return Err(Error::SingularModel("round-trip reflectivity reaches 1 on the tail ray".into()));
    }
    // |r| does not grow along the ray for passive single-pole mirrors, so
    // |H| <= (W + y) |r(W)| e^{-2qy} / (1 - |r(W)|).
    let envelope = |y: f64| {
        h / PI * r_start / (1.0 - r_start)
            * (-2.0 * q * y).exp()
            * ((start + y) / (2.0 * q) + 1.0 / (4.0 * q * q))
    };
    let mut y_max = 1.0 / q;
    while envelope(y_max) > tol / 10.0 {
        y_max *= 2.0;
    }
    let mut failure = None;
    let f = |y: f64| -> f64 {
        let w = Complex64::new(start, y);
        let amps = (
            cavity.mirror1.amplitudes_complex(w),
            cavity.mirror2.amplitudes_complex(w),
        );
        match amps {
            (Ok(a1), Ok(a2)) => {
                let rho = a1.r * a2.r * (2.0 * I * w * q).exp();
                h / PI * (w * rho / (1.0 - rho)).im
            }
            (Err(e), _) | (_, Err(e)) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let breaks = [0.0, 0.5 / q, 2.0 / q, y_max.max(2.0 / q)];
    let r = Quadrature::with_abs_tol(0.5 * tol).integrate_pieces(f, &breaks);
    if let Some(e) = failure {
        return Err(e);
    }
    let r = r?;
    Ok(TailEstimate {
        value: r.value,
        bound: r.abs_error + envelope(y_max),
    })
}

/// Same force from the imaginary-frequency representation
/// `(hbar/pi) ∫_0^∞ xi Re[rho / (1 - rho)] dxi`, `rho = r1(i xi) r2(i xi) e^{-2 xi q}`.
///
/// Needs analytic mirror models; unlike the real-axis route it also covers
/// two perfect mirrors.
pub fn casimir_force_imaginary_axis(cavity: &CavityConfig, tol: f64, hbar: Hbar) -> Result<ForceResult> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::arg(format!("tolerance must be positive, got {tol}")));
    }
    if !(cavity.mirror1.is_analytic() && cavity.mirror2.is_analytic()) {
        return Err(Error::NoContinuation);
    }
    let q = cavity.q;
    let h = hbar.get();
    let mut failure = None;
    let f = |xi: f64| -> f64 {
        let w = Complex64::new(0.0, xi);
        match (
            cavity.mirror1.amplitudes_complex(w),
            cavity.mirror2.amplitudes_complex(w),
        ) {
            (Ok(a1), Ok(a2)) => {
                let rho = a1.r * a2.r * (-2.0 * xi * q).exp();
                h / PI * xi * (rho / (1.0 - rho)).re
            }
            (Err(e), _) | (_, Err(e)) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    // passivity gives |r1 r2| <= 1 on the imaginary axis
    let remainder = |x: f64| {
        h / PI * (-2.0 * q * x).exp() / -(-2.0 * q * x).exp_m1()
            * (x / (2.0 * q) + 1.0 / (4.0 * q * q))
    };
    let mut x_max = 4.0 / q;
    while remainder(x_max) > tol / 10.0 {
        x_max *= 1.5;
    }
    let splits: Vec<f64> = [0.0, 0.25, 1.0, 4.0]
        .iter()
        .map(|x| x / q)
        .filter(|&x| x < x_max)
        .chain(std::iter::once(x_max))
        .collect();
    let quad = Quadrature::with_abs_tol(tol);
    let r = integrate_semi_infinite_with(&quad, f, &splits, |x| {
        Ok(TailEstimate::bound_only(remainder(x)))
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let r = r?;
    Ok(ForceResult {
        value: r.value,
        abs_error_estimate: r.abs_error,
        evaluations: r.evaluations,
    })
}

/// Force between two perfect mirrors in two-dimensional space-time,
/// `(pi / 24) hbar / q^2`.
pub fn casimir_force_perfect_1d(q: f64, hbar: Hbar) -> Result<f64> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::arg(format!("mirror separation must be > 0, got {q}")));
    }
    Ok(PI / 24.0 * hbar.get() / (q * q))
}

/// Force between two perfect plates of area `area` in four-dimensional
/// space-time, `(pi^2 / 240) hbar area / q^4`.
pub fn casimir_pressure_perfect_3d(q: f64, area: f64, hbar: Hbar) -> Result<f64> {
    if !(q > 0.0 && q.is_finite()) || !(area > 0.0 && area.is_finite()) {
        return Err(Error::arg(format!(
            "separation and area must be > 0 (q = {q}, area = {area})"
        )));
    }
    Ok(PI * PI / 240.0 * hbar.get() * area / q.powi(4))
}
