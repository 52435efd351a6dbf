//! Log-domain arithmetic and plane quadrature shared by every other module.

mod log_complex;
mod quadrature;

pub use log_complex::{log_combine, log_sum, normalize_phase, CombineOp, LogComplex};
pub use quadrature::{
    integrate_plane, integrate_plane_anchored, Grid, PlaneIntegral, QuadratureSpec,
};
