//! Vacuum radiation-pressure noise on a mirror at rest, the motional
//! susceptibility of a moving mirror, and the fluctuation-dissipation
//! relations that connect them.
//!
//! Both the force noise and the susceptibility are built from the kernel
//!
//! ```text
//! K(w) = ∫_0^w a (w - a) {1 - s[a] s[w-a] + r[a] r[w-a]} da
//! ```
//!
//! with `C_FF = hbar^2 theta(w) Re K / pi` and `chi_FF = i hbar K / (2 pi)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{Quadrature, QuadratureResult};
use crate::scatter::MirrorModel;
use crate::spectrum::{check_grid, Spectrum, SpectrumKind};
use crate::units::{Hbar, Temperature};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn brace(model: &MirrorModel, a: Complex64, b: Complex64, real_axis: bool) -> Result<Complex64> {
    let (x, y) = if real_axis {
        (model.amplitudes(a.re)?, model.amplitudes(b.re)?)
    } else {
        (model.amplitudes_complex(a)?, model.amplitudes_complex(b)?)
    };
    Ok(1.0 - x.s * y.s + x.r * y.r)
}

/// `K(w)` along the straight segment from 0 to `omega`.
///
/// The integrand is symmetric under `a <-> w - a`, so only `[0, w/2]` is
/// integrated. `quad` tolerances apply to `K` itself.
pub fn kernel_integral(
    model: &MirrorModel,
    omega: Complex64,
    quad: &Quadrature,
) -> Result<QuadratureResult<Complex64>> {
    if !(omega.re.is_finite() && omega.im.is_finite()) {
        return Err(Error::arg(format!("frequency must be finite, got {omega}")));
    }
    let w3 = omega.norm().powi(3);
    if w3 == 0.0 {
        return Ok(QuadratureResult {
            value: Complex64::new(0.0, 0.0),
            abs_error: 0.0,
            evaluations: 0,
        });
    }
    let real_axis = omega.im == 0.0;
    let scale = 2.0 * w3;
    let inner = Quadrature {
        abs_tol: quad.abs_tol / scale,
        ..*quad
    };
    let cube = omega * omega * omega;
    let mut failure = None;
    let r = inner.integrate(
        |t: f64| {
            let a = omega * t;
            let b = omega * (1.0 - t);
            match brace(model, a, b, real_axis) {
                Ok(v) => v * (t * (1.0 - t)),
                Err(e) => {
                    failure.get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                }
            }
        },
        0.0,
        0.5,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let r = r.map_err(|e| rescale_convergence(e, scale))?;
    Ok(QuadratureResult {
        value: r.value * cube * 2.0,
        abs_error: r.abs_error * scale,
        evaluations: r.evaluations,
    })
}

fn rescale_convergence(e: Error, scale: f64) -> Error {
    match e {
        Error::Convergence {
            partial,
            abs_error,
            evaluations,
        } => Error::Convergence {
            partial: partial * scale,
            abs_error: abs_error * scale,
            evaluations,
        },
        other => other,
    }
}

/// Difference between the kernel integrals over `[0, w/2]` and `[w/2, w]`.
/// Zero for any model with the required symmetry; a nonzero value exposes
/// an amplitude evaluation that is not a function of frequency alone.
pub fn kernel_half_asymmetry(model: &MirrorModel, omega: f64, tol: f64) -> Result<f64> {
    let q = Quadrature::with_abs_tol(tol);
    let f = |a: f64| -> Complex64 {
        let b = omega - a;
        brace(model, a.into(), b.into(), true)
            .map(|v| v * (a * b))
            .unwrap_or(Complex64::new(f64::NAN, 0.0))
    };
    let lower = q.integrate(f, 0.0, 0.5 * omega)?;
    let upper = q.integrate(f, 0.5 * omega, omega)?;
    let d = (lower.value - upper.value).norm();
    if d.is_nan() {
        return Err(Error::arg("mirror model could not be evaluated on [0, w]"));
    }
    Ok(d)
}

/// Vacuum force noise `C_FF[w]` on a mirror at rest, to absolute error `tol`.
/// Zero for `w <= 0`.
pub fn force_noise(model: &MirrorModel, omega: f64, tol: f64, hbar: Hbar) -> Result<f64> {
    check_tol(tol)?;
    if !omega.is_finite() {
        return Err(Error::arg(format!("frequency must be finite, got {omega}")));
    }
    if omega <= 0.0 {
        return Ok(0.0);
    }
    let h2 = hbar.get() * hbar.get();
    let k = kernel_integral(model, omega.into(), &Quadrature::with_abs_tol(tol * PI / h2))?;
    Ok(h2 * k.value.re / PI)
}

/// Closed form for a perfect mirror: `hbar^2 theta(w) w^3 / (3 pi)`.
pub fn force_noise_perfect(omega: f64, hbar: Hbar) -> f64 {
    if omega > 0.0 {
        hbar.get() * hbar.get() * omega.powi(3) / (3.0 * PI)
    } else {
        0.0
    }
}

/// Motional susceptibility `chi_FF[w]` at real frequency, to absolute error
/// `tol`. Negative frequencies follow from the same integral and satisfy
/// `chi(-w) = conj chi(w)`.
pub fn motional_susceptibility(
    model: &MirrorModel,
    omega: f64,
    tol: f64,
    hbar: Hbar,
) -> Result<Complex64> {
    check_tol(tol)?;
    let q = Quadrature::with_abs_tol(tol * 2.0 * PI / hbar.get());
    Ok(motional_susceptibility_at(model, omega.into(), &q, hbar)?.value)
}

/// `chi_FF` continued to complex frequency by integrating along `[0, w]`.
/// `quad` tolerances refer to the kernel integral `K`.
pub fn motional_susceptibility_at(
    model: &MirrorModel,
    omega: Complex64,
    quad: &Quadrature,
    hbar: Hbar,
) -> Result<QuadratureResult<Complex64>> {
    let k = kernel_integral(model, omega, quad)?;
    let factor = hbar.get() / (2.0 * PI);
    Ok(QuadratureResult {
        value: I * k.value * factor,
        abs_error: k.abs_error * factor,
        evaluations: k.evaluations,
    })
}

/// Radiation-reaction susceptibility of a perfect mirror, `i hbar w^3 / (6 pi)`.
pub fn motional_susceptibility_perfect(omega: Complex64, hbar: Hbar) -> Complex64 {
    I * hbar.get() * omega * omega * omega / (6.0 * PI)
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::arg(format!("tolerance must be positive, got {tol}")))
    }
}

fn check_nonnegative_grid(grid: &[f64]) -> Result<()> {
    check_grid(grid)?;
    if grid[0] < 0.0 {
        return Err(Error::arg("spectrum grids must satisfy w >= 0"));
    }
    Ok(())
}

/// `chi_FF` on a grid of `w >= 0`.
pub fn susceptibility_spectrum(
    model: &MirrorModel,
    grid: &[f64],
    tol: f64,
    hbar: Hbar,
) -> Result<Spectrum> {
    check_nonnegative_grid(grid)?;
    let values = grid
        .par_iter()
        .map(|&w| motional_susceptibility(model, w, tol, hbar))
        .collect::<Result<Vec<_>>>()?;
    Spectrum::complex(SpectrumKind::Susceptibility, grid.to_vec(), values)
}

/// Force commutator `xi_FF[w] = Im chi_FF[w]` on a grid of `w >= 0`.
pub fn commutator_spectrum(
    model: &MirrorModel,
    grid: &[f64],
    tol: f64,
    hbar: Hbar,
) -> Result<Spectrum> {
    let chi = susceptibility_spectrum(model, grid, tol, hbar)?;
    commutator_from_susceptibility(&chi)
}

pub fn commutator_from_susceptibility(chi: &Spectrum) -> Result<Spectrum> {
    chi.expect_kind(SpectrumKind::Susceptibility)?;
    let xi = chi.complex_values()?.iter().map(|c| c.im).collect();
    Spectrum::real(SpectrumKind::Commutator, chi.grid().to_vec(), xi)
}

/// Vacuum force noise on a grid of `w >= 0`.
pub fn force_noise_spectrum(
    model: &MirrorModel,
    grid: &[f64],
    tol: f64,
    hbar: Hbar,
) -> Result<Spectrum> {
    check_nonnegative_grid(grid)?;
    let values = grid
        .par_iter()
        .map(|&w| force_noise(model, w, tol, hbar))
        .collect::<Result<Vec<_>>>()?;
    Spectrum::real(SpectrumKind::ForceNoise, grid.to_vec(), values)
}

/// Thermal force noise and anticommutator from the commutator.
///
/// `C_FF = 2 hbar xi / (1 - exp(-hbar w / T))` and
/// `sigma_FF = coth(hbar w / 2T) xi`; at `T = 0` these reduce to
/// `2 hbar theta(w) xi` and `sign(w) xi`. Both vanish at `w = 0`.
pub fn thermal_spectra(
    xi: &Spectrum,
    temperature: Temperature,
    hbar: Hbar,
) -> Result<(Spectrum, Spectrum)> {
    xi.expect_kind(SpectrumKind::Commutator)?;
    let h = hbar.get();
    let t = temperature.get();
    let (noise, anti): (Vec<f64>, Vec<f64>) = xi
        .grid()
        .iter()
        .zip(xi.real_values()?)
        .map(|(&w, &x)| {
            if w == 0.0 {
                (0.0, 0.0)
            } else if temperature.is_vacuum() {
                (if w > 0.0 { 2.0 * h * x } else { 0.0 }, w.signum() * x)
            } else {
                let u = h * w / t;
                (2.0 * h * x / -(-u).exp_m1(), x / (0.5 * u).tanh())
            }
        })
        .unzip();
    Ok((
        Spectrum::real(SpectrumKind::ForceNoise, xi.grid().to_vec(), noise)?,
        Spectrum::real(SpectrumKind::Anticommutator, xi.grid().to_vec(), anti)?,
    ))
}

/// Relative defect of the classical Einstein relation
/// `2 Im chi = (w / T) C_FF` in the high-temperature regime `hbar w / T <= 0.01`.
pub fn einstein_check(
    model: &MirrorModel,
    temperature: Temperature,
    omega: f64,
    tol: f64,
    hbar: Hbar,
) -> Result<f64> {
    let t = temperature.get();
    if !(omega > 0.0) || temperature.is_vacuum() || hbar.get() * omega / t > 0.01 {
        return Err(Error::Precondition(format!(
            "Einstein relation needs w > 0 and hbar w / T <= 0.01 (w = {omega}, T = {t})"
        )));
    }
    let chi = motional_susceptibility(model, omega, tol, hbar)?;
    let xi = Spectrum::real(SpectrumKind::Commutator, vec![omega], vec![chi.im])?;
    let (noise, _) = thermal_spectra(&xi, temperature, hbar)?;
    let c = noise.real_values()?[0];
    let dissipation = 2.0 * chi.im;
    if !(dissipation > 0.0) {
        return Err(Error::Precondition(format!(
            "mirror is not dissipative at w = {omega} (Im chi = {})",
            chi.im
        )));
    }
    Ok((dissipation - omega / t * c).abs() / dissipation)
}
