//! Classical simulation of Fourier-space readout (FSR) of function-encoded
//! quantum states, with the real-space readout (RSR) baseline, the swap-test
//! based fully quantum variant and the analysis tools used to compare them.

pub mod error;
pub mod exec;
pub mod analysis;
pub mod circuits;
pub mod encoding;
pub mod fqfsr;
pub mod multidim;
pub mod readout;
pub mod sim;

pub use error::{FsrError, Result};
pub use exec::ExecPolicy;
