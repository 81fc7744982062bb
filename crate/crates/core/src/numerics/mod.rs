//! Numerical kernels shared by the physics modules: adaptive quadrature,
//! dispersion-relation checks and argument-principle zero counting.

mod kramers_kronig;
pub(crate) mod lstsq;
pub(crate) mod quadrature;
mod winding;

pub use kramers_kronig::{kramers_kronig_defect, KramersKronig, KramersKronigReport};
pub use quadrature::{
    integrate_adaptive, integrate_semi_infinite, Quadrature, QuadratureResult, Scalar,
    TailEstimate,
};
pub use winding::{semicircle_contour, winding_number, WindingOptions};
