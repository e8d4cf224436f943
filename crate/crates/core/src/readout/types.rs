use std::fmt;
use std::str::FromStr;

use crate::analysis::{l2ns, rmse};
use crate::error::{FsrError, Result};

/// Readout method tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Rsr,
    RsrPost,
    Fsr,
    FsrAdaptive,
    FqfsrExact,
    FqfsrApprox,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Rsr,
        Method::RsrPost,
        Method::Fsr,
        Method::FsrAdaptive,
        Method::FqfsrExact,
        Method::FqfsrApprox,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Rsr => "rsr",
            Method::RsrPost => "rsr-post",
            Method::Fsr => "fsr",
            Method::FsrAdaptive => "fsr-adaptive",
            Method::FqfsrExact => "fqfsr-exact",
            Method::FqfsrApprox => "fqfsr-approx",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = FsrError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s.trim())
            .ok_or_else(|| FsrError::Parse(format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub rmse: f64,
    pub l2ns: f64,
}

/// Reconstructed values at a list of points.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub method: Method,
    pub metrics: Option<Metrics>,
}

impl Reconstruction {
    pub fn new(points: Vec<Vec<f64>>, values: Vec<f64>, method: Method) -> Self {
        debug_assert_eq!(points.len(), values.len());
        Reconstruction {
            points,
            values,
            method,
            metrics: None,
        }
    }

    /// Scores the values against `truth`, with `norm` the normalization factor of the samples.
    pub fn with_metrics(mut self, truth: &[f64], norm: f64) -> Result<Self> {
        self.metrics = Some(Metrics {
            rmse: rmse(&self.values, truth)?,
            l2ns: l2ns(&self.values, truth, norm)?,
        });
        Ok(self)
    }
}

/// Estimates of one Fourier-space readout, for any number of axes.
///
/// Tensors are stored flat with axis 0 fastest and have extents `shape`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierReadout {
    /// Truncation parameter per axis.
    pub ms: Vec<usize>,
    /// Stored coefficients per axis: `M_ℓ`, or `N_ℓ + 1` when `M_ℓ = N_ℓ`
    /// (the Nyquist coefficient is kept so the full series is exact).
    pub shape: Vec<usize>,
    /// Magnitudes `d ≈ |c̃|`.
    pub d: Vec<f64>,
    /// Shifted magnitudes `e ≈ ½|c̃ + s|`, averaged over the sign-circuit runs.
    pub e: Vec<f64>,
    /// `g = 2e − d − s`.
    pub g: Vec<f64>,
    pub signs: Vec<i8>,
    /// Signed coefficients `sign · d`.
    pub coeffs: Vec<f64>,
    /// The LCU shift `s = 1/√(size of the uniform superposition)`.
    pub shift: f64,
    pub delta: f64,
    /// Retained shots of the last sign-circuit run; `None` in exact mode.
    pub n_sum: Option<u64>,
    pub n_shot1: Option<u64>,
    pub n_shot2: Option<u64>,
    pub n_iter: usize,
}

impl FourierReadout {
    /// Truncation parameter of a 1D readout.
    pub fn m(&self) -> usize {
        self.ms[0]
    }
}
