//! The Fock space `F` of entire functions with
//! `||F||^2 = int |F(z)|^2 e^{-pi|z|^2} dm_2(z) < inf`.

mod bargmann;
mod function;

pub use bargmann::{bargmann_gabor, bargmann_numeric, sampling_half_width, GaborAtom, SampledSignal};
pub use function::{
    inner_product, kernel_log_norm, kernel_weighted_eval, norm, FockFunction, InnerMethod,
    KernelExpansion, KernelSpec, KernelTerm, WeightedFn,
};
