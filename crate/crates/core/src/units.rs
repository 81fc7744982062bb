use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Planck's constant in the crate's unit system.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Hbar(f64);

impl Hbar {
    pub const ONE: Hbar = Hbar(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Hbar(value))
        } else {
            Err(Error::arg(format!("hbar must be finite and positive, got {value}")))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl Default for Hbar {
    fn default() -> Self {
        Hbar::ONE
    }
}

/// Temperature in units of hbar times frequency. Zero is the vacuum.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
pub struct Temperature(f64);

impl Temperature {
    pub const VACUUM: Temperature = Temperature(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value >= 0.0 {
            Ok(Temperature(value))
        } else {
            Err(Error::arg(format!("temperature must be finite and >= 0, got {value}")))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_vacuum(self) -> bool {
        self.0 == 0.0
    }
}
