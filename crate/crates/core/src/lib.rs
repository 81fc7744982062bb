//! Mechanical effects of vacuum field fluctuations on one-dimensional
//! scattering mirrors.
//!
//! The crate covers the mean Casimir force between two partially transmitting
//! mirrors, the radiation-pressure noise felt by a single mirror at rest, the
//! motional (radiation-reaction) susceptibility of a moving mirror, the
//! fluctuation-dissipation identities tying these together, the stability of
//! a mirror's motion in vacuum and its ultimate position fluctuations, plus
//! the four-dimensional stress-tensor correlation tensor.
//!
//! Units: the speed of light is 1 and Boltzmann's constant is 1. Planck's
//! constant is carried explicitly as [`Hbar`] (default 1).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod casimir;
pub mod error;
pub mod mechanics;
pub mod numerics;
pub mod scatter;
pub mod spectrum;
pub mod stress4d;
pub mod units;
pub mod vacuum_spectra;


pub use error::{Error, Result};

pub use casimir::{CavityConfig, ForceResult};
pub use mechanics::{MassLedger, MechanicalOscillator, NoiseDecomposition, StabilityReport};
pub use stress4d::{FourMomentum, Rank4Tensor};
pub use numerics::QuadratureResult;
pub use scatter::{MirrorModel, ScatteringAmplitudes, TabulatedMirror};

pub use spectrum::{Spectrum, SpectrumKind, SpectrumValues};

pub use units::{Hbar, Temperature};

pub use num_complex::Complex64;
