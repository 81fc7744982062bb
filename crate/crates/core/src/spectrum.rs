use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What a sampled [`Spectrum`] represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    /// Force noise `C_FF`.
    ForceNoise,
    /// Force commutator `xi_FF` (dissipative part of the susceptibility).
    Commutator,
    /// Force anticommutator `sigma_FF`.
    Anticommutator,
    /// Motional susceptibility `chi_FF` (complex).
    Susceptibility,
    /// Position noise `C_qq`.
    PositionNoise,
    /// Position commutator `xi_qq`.
    PositionCommutator,
}

impl SpectrumKind {
    pub fn name(self) -> &'static str {
        match self {
            SpectrumKind::ForceNoise => "force_noise",
            SpectrumKind::Commutator => "commutator",
            SpectrumKind::Anticommutator => "anticommutator",
            SpectrumKind::Susceptibility => "susceptibility",
            SpectrumKind::PositionNoise => "position_noise",
            SpectrumKind::PositionCommutator => "position_commutator",
        }
    }

    fn is_complex(self) -> bool {
        matches!(self, SpectrumKind::Susceptibility)
    }

    fn is_nonnegative(self) -> bool {
        matches!(
            self,
            SpectrumKind::ForceNoise | SpectrumKind::Anticommutator | SpectrumKind::PositionNoise
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SpectrumValues {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl SpectrumValues {
    pub fn len(&self) -> usize {
        match self {
            SpectrumValues::Real(v) => v.len(),
            SpectrumValues::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A real or complex function of frequency sampled on a strictly increasing
/// grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    kind: SpectrumKind,
    grid: Vec<f64>,
    values: SpectrumValues,
}

impl Spectrum {
    pub fn new(kind: SpectrumKind, grid: Vec<f64>, values: SpectrumValues) -> Result<Self> {
        check_grid(&grid)?;
        if grid.len() != values.len() {
            return Err(Error::arg(format!(
                "grid has {} points but {} values were given",
                grid.len(),
                values.len()
            )));
        }
        match (&values, kind.is_complex()) {
            (SpectrumValues::Complex(_), false) | (SpectrumValues::Real(_), true) => {
                return Err(Error::arg(format!(
                    "{} spectra must be {}",
                    kind.name(),
                    if kind.is_complex() { "complex" } else { "real" }
                )))
            }
            _ => {}
        }
        if let SpectrumValues::Real(v) = &values {
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::arg("spectrum values must be finite"));
            }
            if kind.is_nonnegative() {
                let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                if let Some(bad) = v.iter().find(|&&x| x < -1e-12 * scale) {
                    return Err(Error::arg(format!(
                        "{} spectra are non-negative, found {bad}",
                        kind.name()
                    )));
                }
            }
        }
        Ok(Spectrum { kind, grid, values })
    }

    pub fn real(kind: SpectrumKind, grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Spectrum::new(kind, grid, SpectrumValues::Real(values))
    }

    pub fn complex(kind: SpectrumKind, grid: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        Spectrum::new(kind, grid, SpectrumValues::Complex(values))
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &SpectrumValues {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Real samples, or an error for complex spectra.
    pub fn real_values(&self) -> Result<&[f64]> {
        match &self.values {
            SpectrumValues::Real(v) => Ok(v),
            SpectrumValues::Complex(_) => Err(Error::KindMismatch {
                expected: "real spectrum",
                found: self.kind.name(),
            }),
        }
    }

    pub fn complex_values(&self) -> Result<&[Complex64]> {
        match &self.values {
            SpectrumValues::Complex(v) => Ok(v),
            SpectrumValues::Real(_) => Err(Error::KindMismatch {
                expected: "complex spectrum",
                found: self.kind.name(),
            }),
        }
    }

    pub(crate) fn expect_kind(&self, kind: SpectrumKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::KindMismatch {
                expected: kind.name(),
                found: self.kind.name(),
            })
        }
    }
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::arg("frequency grid is empty"));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::arg("frequency grid contains non-finite values"));
    }
    if let Some(w) = grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::arg(format!(
            "frequency grid must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Default grid for susceptibility spectra and dispersion checks: linear on
/// `[0, 50 scale]` with 4097 points, `scale` being the mirror's cut-off.
pub const DEFAULT_GRID_SPAN: f64 = 50.0;
pub const DEFAULT_GRID_POINTS: usize = 4097;

pub fn default_grid(scale: f64) -> Result<Vec<f64>> {
    frequency_grid(0.0, DEFAULT_GRID_SPAN * scale, DEFAULT_GRID_POINTS, false)
}

/// `points` frequencies from `min` to `max`, linearly or logarithmically spaced.
pub fn frequency_grid(min: f64, max: f64, points: usize, log: bool) -> Result<Vec<f64>> {
    if points < 2 || !(min < max) || !min.is_finite() || !max.is_finite() {
        return Err(Error::arg(format!(
            "grid needs points >= 2 and min < max (min {min}, max {max}, points {points})"
        )));
    }
    if log && min <= 0.0 {
        return Err(Error::arg("logarithmic grids need min > 0"));
    }
    let last = (points - 1) as f64;
    let grid = (0..points)
        .map(|i| {
            let t = i as f64 / last;
            if i == points - 1 {
                max
            } else if log {
                (min.ln() + t * (max.ln() - min.ln())).exp()
            } else {
                min + t * (max - min)
            }
        })
        .collect();
    Ok(grid)
}
