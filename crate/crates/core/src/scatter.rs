//! Frequency-dependent scattering models for a lossless 1D mirror.
//!
//! A mirror is described by its transmission `s[w]` and reflection `r[w]`.
//! Models must be unitary (`|s|^2 + |r|^2 = 1`), causal (analytic in the
//! upper half plane), real (`s[-w] = conj s[w]`) and transparent at high
//! frequency (`r -> 0`).

use std::io::Read;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringAmplitudes {
    pub s: Complex64,
    pub r: Complex64,
}

impl ScatteringAmplitudes {
    /// `| |s|^2 + |r|^2 - 1 |`
    pub fn unitarity_defect(&self) -> f64 {
        (self.s.norm_sqr() + self.r.norm_sqr() - 1.0).abs()
    }

    pub fn conj(&self) -> Self {
        ScatteringAmplitudes {
            s: self.s.conj(),
            r: self.r.conj(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MirrorModel {
    /// Field vanishes at the mirror: `s = 0`, `r = -1` at every frequency.
    Perfect,
    /// No coupling to the field: `s = 1`, `r = 0`.
    Transparent,
    /// `s = w / (w + i Omega)`, `r = -i Omega / (w + i Omega)`.
    SinglePole { omega: f64 },
    /// Amplitudes interpolated from samples.
    Tabulated(TabulatedMirror),
}

impl MirrorModel {
    pub fn single_pole(omega: f64) -> Result<Self> {
        if omega.is_finite() && omega > 0.0 {
            Ok(MirrorModel::SinglePole { omega })
        } else {
            Err(Error::arg(format!(
                "single-pole cut-off must be finite and positive, got {omega}"
            )))
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MirrorModel::Perfect => "perfect",
            MirrorModel::Transparent => "transparent",
            MirrorModel::SinglePole { .. } => "single-pole",
            MirrorModel::Tabulated(_) => "tabulated",
        }
    }

    /// Scattering amplitudes at a real frequency.
    pub fn amplitudes(&self, omega: f64) -> Result<ScatteringAmplitudes> {
        if !omega.is_finite() {
            return Err(Error::arg(format!("frequency must be finite, got {omega}")));
        }
        match self {
            MirrorModel::Tabulated(t) => t.amplitudes(omega),
            _ => self.amplitudes_complex(Complex64::new(omega, 0.0)),
        }
    }

    /// Amplitudes continued to complex frequency. Tabulated models have no
    /// continuation.
    pub fn amplitudes_complex(&self, omega: Complex64) -> Result<ScatteringAmplitudes> {
        match *self {
            MirrorModel::Perfect => Ok(ScatteringAmplitudes {
                s: Complex64::new(0.0, 0.0),
                r: Complex64::new(-1.0, 0.0),
            }),
            MirrorModel::Transparent => Ok(ScatteringAmplitudes {
                s: Complex64::new(1.0, 0.0),
                r: Complex64::new(0.0, 0.0),
            }),
            MirrorModel::SinglePole { omega: cutoff } => {
                let den = omega + I * cutoff;
                if den.norm() == 0.0 {
                    return Err(Error::SingularModel(format!(
                        "single-pole mirror evaluated at its pole -i*{cutoff}"
                    )));
                }
                Ok(ScatteringAmplitudes {
                    s: omega / den,
                    r: -I * cutoff / den,
                })
            }
            MirrorModel::Tabulated(_) => Err(Error::NoContinuation),
        }
    }

    /// Whether the model can be evaluated off the real axis.
    pub fn is_analytic(&self) -> bool {
        !matches!(self, MirrorModel::Tabulated(_))
    }

    /// Frequency where `|r|^2` falls to 1/2, the scale beyond which the
    /// mirror is mostly transparent. `None` for perfect and transparent
    /// mirrors.
    pub fn transparency_scale(&self) -> Option<f64> {
        match self {
            MirrorModel::Perfect | MirrorModel::Transparent => None,
            MirrorModel::SinglePole { omega } => Some(*omega),
            MirrorModel::Tabulated(t) => t.half_power_frequency(),
        }
    }
}

/// Max over `grid` of `| |s|^2 + |r|^2 - 1 |`.
pub fn unitarity_defect(model: &MirrorModel, grid: &[f64]) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::arg("unitarity check needs a non-empty grid"));
    }
    grid.iter().try_fold(0.0f64, |m, &w| {
        Ok(m.max(model.amplitudes(w)?.unitarity_defect()))
    })
}

/// Max deviation from `amp(-w) = conj amp(w)` over the sampled `±w` pairs.
pub fn reality_defect(model: &MirrorModel, grid: &[f64]) -> Result<f64> {
    grid.iter().try_fold(0.0f64, |m, &w| {
        let (a, b) = (model.amplitudes(w)?, model.amplitudes(-w)?.conj());
        Ok(m.max((a.s - b.s).norm()).max((a.r - b.r).norm()))
    })
}

/// Reflection amplitude of the cavity round trip, `r1[w] r2[w]`.
pub fn composite_reflection(m1: &MirrorModel, m2: &MirrorModel, omega: f64) -> Result<Complex64> {
    Ok(m1.amplitudes(omega)?.r * m2.amplitudes(omega)?.r)
}

/// Mirror amplitudes sampled on a strictly increasing frequency grid and
/// interpolated piecewise-linearly in real and imaginary parts.
///
/// Unitarity is not enforced after interpolation; use [`unitarity_defect`]
/// to see how far the table departs from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedMirror {
    omega: Vec<f64>,
    s: Vec<Complex64>,
    r: Vec<Complex64>,
}

impl TabulatedMirror {
    pub fn new(omega: Vec<f64>, s: Vec<Complex64>, r: Vec<Complex64>) -> Result<Self> {
        if omega.len() < 2 {
            return Err(Error::arg("tabulated mirror needs at least two nodes"));
        }
        if omega.len() != s.len() || omega.len() != r.len() {
            return Err(Error::arg("tabulated columns have different lengths"));
        }
        crate::spectrum::check_grid(&omega)?;
        if s.iter().chain(&r).any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::arg("tabulated amplitudes must be finite"));
        }
        Ok(TabulatedMirror { omega, s, r })
    }

    /// Reads `omega,re_s,im_s,re_r,im_r` rows after a header line.
    pub fn from_csv_reader(mut reader: impl Read) -> Result<Self> {
        let mut text = String::new();
        reader
            .read_to_string(&mut text)
            .map_err(|e| Error::arg(format!("reading mirror table: {e}")))?;
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let Some((_, header)) = lines.next() else {
            return Err(Error::arg("mirror table is empty"));
        };
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols != ["omega", "re_s", "im_s", "re_r", "im_r"] {
            return Err(Error::arg(format!(
                "mirror table header must be `omega,re_s,im_s,re_r,im_r`, got `{header}`"
            )));
        }
        let (mut omega, mut s, mut r) = (Vec::new(), Vec::new(), Vec::new());
        for (lineno, line) in lines {
            let nums: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::arg(format!("mirror table line {}: {e}", lineno + 1)))?;
            if nums.len() != 5 {
                return Err(Error::arg(format!(
                    "mirror table line {}: expected 5 columns, got {}",
                    lineno + 1,
                    nums.len()
                )));
            }
            omega.push(nums[0]);
            s.push(Complex64::new(nums[1], nums[2]));
            r.push(Complex64::new(nums[3], nums[4]));
        }
        TabulatedMirror::new(omega, s, r)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|e| Error::arg(format!("opening {}: {e}", path.display())))?;
        TabulatedMirror::from_csv_reader(file)
    }

    pub fn range(&self) -> (f64, f64) {
        (self.omega[0], self.omega[self.omega.len() - 1])
    }

    pub fn nodes(&self) -> &[f64] {
        &self.omega
    }

    pub fn amplitudes(&self, omega: f64) -> Result<ScatteringAmplitudes> {
        let (min, max) = self.range();
        if !(omega >= min && omega <= max) {
            return Err(Error::Range { omega, min, max });
        }
        let j = self.omega.partition_point(|&x| x <= omega).clamp(1, self.omega.len() - 1);
        let (x0, x1) = (self.omega[j - 1], self.omega[j]);
        let t = (omega - x0) / (x1 - x0);
        let lerp = |v: &[Complex64]| v[j - 1] + (v[j] - v[j - 1]) * t;
        Ok(ScatteringAmplitudes {
            s: lerp(&self.s),
            r: lerp(&self.r),
        })
    }

    fn half_power_frequency(&self) -> Option<f64> {
        let start = self.omega.partition_point(|&x| x < 0.0);
        let mut prev: Option<(f64, f64)> = None;
        for j in start..self.omega.len() {
            let (w, p) = (self.omega[j], self.r[j].norm_sqr());
            if p <= 0.5 {
                return Some(match prev {
                    Some((w0, p0)) if p0 > 0.5 => w0 + (w - w0) * (p0 - 0.5) / (p0 - p),
                    _ => w,
                })
                .filter(|&w| w > 0.0);
            }
            prev = Some((w, p));
        }
        None
    }
}
