//! Statevector engine: registers, gate kernels, circuits and shot sampling.

mod circuit;
mod register;
mod sampling;
mod state;

pub use circuit::{
    apply_even_extension, apply_odd_extension, extend_samples, extended_state, extension_circuit,
    Circuit, Parity,
};
pub use register::{deposit_bits, extract_bits, Controls, Register};
pub use sampling::{
    derive_seed, postselect_probabilities, sample_multinomial, ShotHistogram,
};
pub use state::{normalized, Gate, StateVector, DEFAULT_MAX_QUBITS};
