//! A mirror bound by a harmonic restoring force and coupled to vacuum
//! radiation pressure through its motional susceptibility `chi_FF`.
//!
//! The equation of motion in the frequency domain reads
//! `D[w] q[w] = F_in[w]` with
//!
//! ```text
//! D[w] = m0 (w0^2 - w^2) - chi_FF[w]
//! ```
//!
//! so that the impedance is `Z = i D / w` and the admittance `Y = -i w / D`.
//! Time dependence is `e^{-i w t}`, hence runaway solutions are zeros of `D`
//! in the upper half plane.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::lstsq::least_squares;
use crate::numerics::{semicircle_contour, winding_number, Quadrature};
use crate::scatter::MirrorModel;
use crate::spectrum::{check_grid, Spectrum, SpectrumKind};
use crate::units::Hbar;
use crate::vacuum_spectra::motional_susceptibility_at;

const I: Complex64 = Complex64::new(0.0, 1.0);
/// Relative accuracy of the susceptibility evaluations used here.
const CHI_REL_TOL: f64 = 1e-11;
// the winding number needs only the phase; at |w| ~ 1e5 the kernel integral
// cannot reach CHI_REL_TOL in double precision
const CONTOUR_REL_TOL: f64 = 1e-8;
/// Fit windows for the cut-off, in units of the transparency scale.
const FIT_WINDOWS: [(f64, f64); 2] = [(10.0, 100.0), (20.0, 200.0)];
const FIT_POINTS: usize = 41;
const RADIUS_CAP: f64 = 1e8;
const LIFT_FRACTION: f64 = 1e-3;
const ARC_POINTS: usize = 64;
/// Relative distance to a real zero of `D` below which a spectrum row is dropped.
pub const RESONANCE_EXCLUSION: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MechanicalOscillator {
    pub m0: f64,
    pub omega0: f64,
    pub mirror: MirrorModel,
}

impl MechanicalOscillator {
    pub fn new(m0: f64, omega0: f64, mirror: MirrorModel) -> Result<Self> {
        if !(m0 > 0.0 && m0.is_finite()) {
            return Err(Error::arg(format!("mass must be finite and > 0, got {m0}")));
        }
        if !(omega0 >= 0.0 && omega0.is_finite()) {
            return Err(Error::arg(format!("binding frequency must be finite and >= 0, got {omega0}")));
        }
        Ok(MechanicalOscillator { m0, omega0, mirror })
    }

    pub fn is_free(&self) -> bool {
        self.omega0 == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassLedger {
    /// Quasistatic mass.
    pub m0: f64,
    /// High-frequency mass `m0 - induced_mass`.
    pub m_inf: f64,
    /// `hbar omega_c / (6 pi)`
    pub induced_mass: f64,
    pub omega_c: f64,
    /// Spread between fit windows plus the RMS fit residual.
    pub omega_c_uncertainty: f64,
    pub fit_residual: f64,
    /// `hbar omega_c_uncertainty / (6 pi)`
    pub induced_mass_uncertainty: f64,
}

impl MassLedger {
    /// `m_inf` is unambiguously of one sign.
    pub fn sign_resolved(&self) -> bool {
        self.m_inf.abs() > self.induced_mass_uncertainty
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub ledger: MassLedger,
    pub positive_real_defect: f64,
    pub uhp_pole_count: u32,
    pub stable: bool,
    pub contour_radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositionNoise {
    /// `C_qq = 2 hbar theta(w) xi_qq`
    pub c_qq: Spectrum,
    /// `xi_qq = Re Y / w`
    pub xi_qq: Spectrum,
    /// Admittance at the kept grid points.
    pub admittance: Vec<Complex64>,
    /// Grid points dropped as too close to a real zero of `D`.
    pub dropped: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonancePeak {
    pub center: f64,
    /// Half the full width at half maximum.
    pub half_width: f64,
    pub height: f64,
    /// Area under `C_qq` above the background within ten half-widths.
    pub area: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseDecomposition {
    /// `None` when `C_qq` vanishes on the grid: the lossless peak is a
    /// distribution sitting on the dropped points.
    pub peak: Option<ResonancePeak>,
    pub background_median: f64,
    pub background_points: usize,
    pub dropped: Vec<f64>,
}

fn chi_quadrature(rel_tol: f64) -> Quadrature {
    Quadrature {
        abs_tol: 1e-300,
        rel_tol,
        max_evals: 2_000_000,
    }
}

fn chi_with(mirror: &MirrorModel, omega: Complex64, rel_tol: f64, hbar: Hbar) -> Result<Complex64> {
    if matches!(mirror, MirrorModel::Transparent) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(motional_susceptibility_at(mirror, omega, &chi_quadrature(rel_tol), hbar)?.value)
}

fn chi(mirror: &MirrorModel, omega: Complex64, hbar: Hbar) -> Result<Complex64> {
    chi_with(mirror, omega, CHI_REL_TOL, hbar)
}

fn denominator_with(osc: &MechanicalOscillator, omega: Complex64, rel_tol: f64, hbar: Hbar) -> Result<Complex64> {
    Ok(osc.m0 * (osc.omega0 * osc.omega0 - omega * omega) - chi_with(&osc.mirror, omega, rel_tol, hbar)?)
}

/// `D[w] = m0 (w0^2 - w^2) - chi_FF[w]` at complex frequency.
pub fn dynamical_denominator(osc: &MechanicalOscillator, omega: Complex64, hbar: Hbar) -> Result<Complex64> {
    denominator_with(osc, omega, CHI_REL_TOL, hbar)
}

/// `Z[w] = -i m0 w + i m0 w0^2 / w + chi_FF[w] / (i w)`
pub fn impedance(osc: &MechanicalOscillator, omega: f64, hbar: Hbar) -> Result<Complex64> {
    if !omega.is_finite() {
        return Err(Error::arg(format!("frequency must be finite, got {omega}")));
    }
    if omega == 0.0 {
        return Err(Error::Pole);
    }
    let x = chi(&osc.mirror, omega.into(), hbar)?;
    let m = osc.m0;
    Ok(-I * m * omega + I * m * osc.omega0 * osc.omega0 / omega + x / (I * omega))
}

/// `Y[w] = -i w / D[w]`
pub fn admittance(osc: &MechanicalOscillator, omega: f64, hbar: Hbar) -> Result<Complex64> {
    if !omega.is_finite() {
        return Err(Error::arg(format!("frequency must be finite, got {omega}")));
    }
    let d = dynamical_denominator(osc, omega.into(), hbar)?;
    check_resonance(osc, omega, d)?;
    Ok(-I * omega / d)
}

fn check_resonance(osc: &MechanicalOscillator, omega: f64, d: Complex64) -> Result<()> {
    let scale = osc.m0 * (osc.omega0 * osc.omega0).max(omega * omega);
    if d.norm() <= 1e-12 * scale {
        return Err(Error::ResonanceSingularity {
            omega,
            magnitude: d.norm(),
        });
    }
    Ok(())
}

/// Estimates the cut-off `omega_c` from `chi_FF -> i hbar w^3 Gamma / (6 pi)`
/// with `Gamma -> i omega_c / w`, and the resulting mass ledger.
///
/// `Re(Gamma w / i)` is fitted by `omega_c + a/w + b/w^2 + c ln(w)/w^2` over a
/// decade starting ten transparency scales up; repeating the fit on a decade
/// shifted by a factor two gives the uncertainty.
pub fn mass_ledger(osc: &MechanicalOscillator, hbar: Hbar) -> Result<MassLedger> {
    let scale = match &osc.mirror {
        MirrorModel::Perfect => {
            return Err(Error::NoCutoff(
                "a perfect mirror reflects at all frequencies; its induced mass diverges".into(),
            ))
        }
        MirrorModel::Transparent => {
            return Ok(MassLedger {
                m0: osc.m0,
                m_inf: osc.m0,
                induced_mass: 0.0,
                omega_c: 0.0,
                omega_c_uncertainty: 0.0,
                fit_residual: 0.0,
                induced_mass_uncertainty: 0.0,
            })
        }
        m => m.transparency_scale().ok_or_else(|| {
            Error::NoCutoff("mirror has no frequency where |r|^2 falls to 1/2".into())
        })?,
    };
    let h = hbar.get();
    let mut fits = Vec::with_capacity(FIT_WINDOWS.len());
    for (lo, hi) in FIT_WINDOWS {
        let grid = crate::spectrum::frequency_grid(lo * scale, hi * scale, FIT_POINTS, true)?;
        let samples: Vec<Result<f64>> = grid
            .par_iter()
            .map(|&w| Ok((-6.0 * PI * chi(&osc.mirror, w.into(), hbar)? / (h * w * w)).re))
            .collect();
        let y: Vec<f64> = samples.into_iter().collect::<Result<_>>()?;
        let u: Vec<f64> = grid.iter().map(|&w| scale / w).collect();
        let columns = vec![
            vec![1.0; u.len()],
            u.clone(),
            u.iter().map(|x| x * x).collect(),
            u.iter().map(|x| -x * x * x.ln()).collect(),
        ];
        fits.push(least_squares(&columns, &y)?);
    }
    let (coef, rms) = (&fits[0].0, fits[0].1);
    let omega_c = coef[0];
    let omega_c_uncertainty = (fits[1].0[0] - omega_c).abs() + rms;
    let induced_mass = h * omega_c / (6.0 * PI);
    Ok(MassLedger {
        m0: osc.m0,
        m_inf: osc.m0 - induced_mass,
        induced_mass,
        omega_c,
        omega_c_uncertainty,
        fit_residual: rms,
        induced_mass_uncertainty: h * omega_c_uncertainty / (6.0 * PI),
    })
}

/// Number of zeros of `D` inside the semicircle `|w| < radius` lifted slightly
/// above the real axis. Free mirrors count zeros of `D / w^2`, removing the
/// trivial double zero at the origin.
pub fn uhp_zero_count(osc: &MechanicalOscillator, radius: f64, hbar: Hbar) -> Result<u32> {
    if !osc.mirror.is_analytic() {
        return Err(Error::NoContinuation);
    }
    let contour = semicircle_contour(radius, LIFT_FRACTION * radius, ARC_POINTS)?;
    let free = osc.is_free();
    let n = winding_number(
        |w| {
            let d = denominator_with(osc, w, CONTOUR_REL_TOL, hbar)?;
            Ok(if free { d / (w * w) } else { d })
        },
        &contour,
    )?;
    u32::try_from(n).map_err(|_| {
        Error::Precondition(format!("negative winding number {n}: the denominator has poles inside the contour"))
    })
}

/// Unstable root of the perfect-mirror cubic `-m0 w^2 - i hbar w^3 / (6 pi)`.
pub fn perfect_mirror_runaway_root(m0: f64, hbar: Hbar) -> Complex64 {
    I * 6.0 * PI * m0 / hbar.get()
}

/// Contour radius: ten times the largest mechanical or cut-off scale, and
/// large enough to enclose the runaway root when `m_inf < 0`. That root
/// sits on the imaginary axis at `y` with `|m_inf| y ~ hbar ln(y) / pi`.
fn contour_radius(osc: &MechanicalOscillator, ledger: &MassLedger) -> f64 {
    let mut scale = osc.omega0.max(ledger.omega_c);
    if scale == 0.0 {
        scale = 1.0;
    }
    if ledger.m_inf < 0.0 && ledger.induced_mass > 0.0 {
        let ratio = ledger.induced_mass / ledger.m_inf.abs();
        scale = scale.max(ledger.omega_c * ratio * (1.0 + ratio.ln_1p()));
    }
    10.0 * scale
}

/// Mass ledger, positive-real probe and upper-half-plane zero count.
///
/// The count is repeated at twice the radius; disagreement is reported as
/// an error rather than guessed.
pub fn stability_report(osc: &MechanicalOscillator, hbar: Hbar) -> Result<StabilityReport> {
    let ledger = mass_ledger(osc, hbar)?;
    let positive_real_defect = positive_real_defect(osc, &ledger, hbar)?;
    let radius = contour_radius(osc, &ledger);
    if radius > RADIUS_CAP * ledger.omega_c.max(osc.omega0).max(1e-300) {
        return Err(Error::Precondition(format!(
            "m_inf = {:e} is too close to zero to resolve a runaway root (radius {radius:e})",
            ledger.m_inf
        )));
    }
    let counts: Vec<Result<u32>> = [radius, 2.0 * radius]
        .par_iter()
        .map(|&r| uhp_zero_count(osc, r, hbar))
        .collect();
    let mut counts = counts.into_iter();
    let count_r = counts.next().unwrap()?;
    let count_2r = counts.next().unwrap()?;
    if count_r != count_2r {
        return Err(Error::RadiusSensitive {
            radius,
            count_r: count_r as i64,
            count_2r: count_2r as i64,
        });
    }
    Ok(StabilityReport {
        ledger,
        positive_real_defect,
        uhp_pole_count: count_r,
        stable: count_r == 0,
        contour_radius: radius,
    })
}

/// Largest violation of positivity over probes in the closed upper half plane,
/// clipped at zero.
///
/// On the real axis the probe is `Im(chi_FF/w)`. Off the axis `chi_FF/(i w)`
/// carries the pole at infinity `i m_ind w` of the induced mass, which is
/// removed first: the probe is `Im(chi_FF/w) + m_ind Im w`. Real frequencies
/// only for tabulated mirrors.
fn positive_real_defect(osc: &MechanicalOscillator, ledger: &MassLedger, hbar: Hbar) -> Result<f64> {
    let scale = osc
        .mirror
        .transparency_scale()
        .unwrap_or(ledger.omega_c.max(osc.omega0).max(1.0));
    let radii = crate::spectrum::frequency_grid(0.1 * scale, 100.0 * scale, 24, true)?;
    let angles: &[f64] = if osc.mirror.is_analytic() {
        &[0.0, PI / 6.0, PI / 3.0, PI / 2.0]
    } else {
        &[0.0]
    };
    let probes: Vec<Complex64> = angles
        .iter()
        .flat_map(|&t| radii.iter().map(move |&r| Complex64::from_polar(r, t)))
        .collect();
    let values: Vec<Result<f64>> = probes
        .par_iter()
        .map(|&w| Ok(-((chi(&osc.mirror, w, hbar)? / w).im + ledger.induced_mass * w.im)))
        .collect();
    let mut worst: f64 = 0.0;
    for v in values {
        worst = worst.max(v?);
    }
    Ok(worst)
}

/// Position noise and its commutator part on a grid of `w > 0`.
///
/// `xi_qq = Re Y / w = Im chi_FF / |D|^2`. Points within a relative
/// [`RESONANCE_EXCLUSION`] of a real zero of `D` are dropped and listed.
pub fn position_noise(osc: &MechanicalOscillator, grid: &[f64], hbar: Hbar) -> Result<PositionNoise> {
    check_grid(grid)?;
    if grid[0] <= 0.0 {
        return Err(Error::arg("position noise grids must satisfy w > 0"));
    }
    let rows: Vec<Result<Option<(f64, Complex64)>>> = grid
        .par_iter()
        .map(|&w| {
            let x = chi(&osc.mirror, w.into(), hbar)?;
            let d = osc.m0 * (osc.omega0 * osc.omega0 - w * w) - x;
            let scale = osc.m0 * (osc.omega0 * osc.omega0).max(w * w);
            let lossless = d.im.abs() <= 1e-12 * scale;
            let distance = d.re.abs() / (2.0 * osc.m0 * w);
            if (lossless && distance <= RESONANCE_EXCLUSION * w) || d.norm() <= 1e-12 * scale {
                return Ok(None);
            }
            Ok(Some((x.im / d.norm_sqr(), -I * w / d)))
        })
        .collect();
    let h = hbar.get();
    let (mut kept, mut xi, mut c, mut y, mut dropped) = (vec![], vec![], vec![], vec![], vec![]);
    for (&w, row) in grid.iter().zip(rows) {
        match row? {
            Some((x, adm)) => {
                kept.push(w);
                xi.push(x);
                c.push(2.0 * h * x);
                y.push(adm);
            }
            None => dropped.push(w),
        }
    }
    if kept.is_empty() {
        return Err(Error::ResonanceSingularity {
            omega: grid[0],
            magnitude: 0.0,
        });
    }
    Ok(PositionNoise {
        c_qq: Spectrum::real(SpectrumKind::PositionNoise, kept.clone(), c)?,
        xi_qq: Spectrum::real(SpectrumKind::PositionCommutator, kept, xi)?,
        admittance: y,
        dropped,
    })
}

/// Splits `C_qq` into a resonance peak near `w0` and a broadband background.
///
/// The peak is the largest value within `[w0/2, 2 w0]`; its half-width comes
/// from the half-maximum crossings. The background is the median of `C_qq`
/// more than ten half-widths away from the peak.
pub fn noise_decomposition(osc: &MechanicalOscillator, grid: &[f64], hbar: Hbar) -> Result<NoiseDecomposition> {
    if osc.is_free() {
        return Err(Error::Precondition("noise decomposition needs a bound mirror (w0 > 0)".into()));
    }
    let ledger = mass_ledger(osc, hbar)?;
    if ledger.m_inf <= 0.0 {
        return Err(Error::Precondition(format!(
            "m_inf = {:e} <= 0: the oscillator is not stable",
            ledger.m_inf
        )));
    }
    let noise = position_noise(osc, grid, hbar)?;
    let w = noise.c_qq.grid();
    let c = noise.c_qq.real_values()?;
    let w0 = osc.omega0;
    let window: Vec<usize> = (0..w.len()).filter(|&i| w[i] >= 0.5 * w0 && w[i] <= 2.0 * w0).collect();
    let max_all = c.iter().fold(0.0f64, |a, &b| a.max(b));
    if max_all == 0.0 {
        return Ok(NoiseDecomposition {
            peak: None,
            background_median: 0.0,
            background_points: c.len(),
            dropped: noise.dropped,
        });
    }
    let Some(&top) = window.iter().max_by(|&&a, &&b| c[a].total_cmp(&c[b])) else {
        return Err(Error::Decomposition(format!("no grid points near w0 = {w0}")));
    };
    if top == 0 || top + 1 == w.len() || c[top - 1] > c[top] || c[top + 1] > c[top] {
        return Err(Error::Decomposition(format!("no local maximum of C_qq near w0 = {w0}")));
    }
    let half = 0.5 * c[top];
    let crossing = |range: &mut dyn Iterator<Item = usize>, step: isize| -> Option<f64> {
        for i in range {
            if c[i] < half {
                let j = (i as isize - step) as usize;
                let t = (half - c[i]) / (c[j] - c[i]);
                return Some(w[i] + t * (w[j] - w[i]));
            }
        }
        None
    };
    let left = crossing(&mut (0..top).rev(), -1);
    let right = crossing(&mut (top + 1..w.len()), 1);
    let (Some(left), Some(right)) = (left, right) else {
        return Err(Error::Decomposition("C_qq does not fall to half its peak inside the grid".into()));
    };
    let half_width = 0.5 * (right - left);
    // parabola through the top three points
    let (a, b, d) = (c[top - 1], c[top], c[top + 1]);
    let (wl, wc, wr) = (w[top - 1], w[top], w[top + 1]);
    let denom = (wl - wc) * (wl - wr) * (wc - wr);
    let pa = (wr * (b - a) + wc * (a - d) + wl * (d - b)) / denom;
    let pb = (wr * wr * (a - b) + wc * wc * (d - a) + wl * wl * (b - d)) / denom;
    let center = if pa < 0.0 { -pb / (2.0 * pa) } else { wc };

    let far: Vec<f64> = (0..w.len())
        .filter(|&i| (w[i] - center).abs() > 10.0 * half_width)
        .map(|i| c[i])
        .collect();
    if far.is_empty() {
        return Err(Error::Decomposition("grid has no points away from the peak".into()));
    }
    let background_median = median(far.clone());
    let mut area = 0.0;
    for i in 1..w.len() {
        let (x0, x1) = (w[i - 1], w[i]);
        if (0.5 * (x0 + x1) - center).abs() <= 10.0 * half_width {
            area += 0.5 * (c[i - 1] + c[i] - 2.0 * background_median) * (x1 - x0);
        }
    }
    Ok(NoiseDecomposition {
        peak: Some(ResonancePeak {
            center,
            half_width,
            height: c[top],
            area,
        }),
        background_median,
        background_points: far.len(),
        dropped: noise.dropped,
    })
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
