//! Numerics for the Fock space of entire functions with Gaussian weight
//! `e^{-pi|z|^2}`: kernel and Gabor-atom evaluation, the Weierstrass sigma
//! function of the square lattice, lattice-series identities, and the
//! construction of a complete mixed system of kernels and quotients.

pub mod error;
pub mod counterexample;
pub mod fock;
pub mod lattice_series;
pub mod mixed_gram;
pub mod num;
pub mod weierstrass;

pub use error::{Error, Result};
pub use num_complex::Complex64;
