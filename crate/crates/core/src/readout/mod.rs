//! Readout pipelines: the real-space baseline, its low-pass post-processing,
//! and the Fourier-space readout with fixed or adaptive truncation.

mod fsr;
mod reconstruct;
mod rsr;
mod types;

pub use crate::circuits::{Backend, Sampling, SignForm};
pub use fsr::{
    adaptive_m, adaptive_ms, fsr_adaptive, fsr_adaptive_nd, fsr_fixed, fsr_fixed_nd,
    fsr_magnitudes, fsr_signs, fsr_signs_nd, resolve_signs, FsrOptions, SignResolution, EXACT_DELTA,
};
pub use reconstruct::{
    reconstruct_1d, reconstruct_grid, reconstruct_nd, reconstruct_nd_complex, recover_a,
    IMAG_RESIDUE_TOL,
};
pub use rsr::{rsr_postprocess, rsr_postprocess_values, rsr_readout};
pub use types::{FourierReadout, Method, Metrics, Reconstruction};
