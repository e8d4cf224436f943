use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// One CSV row: the resolved settings of a run plus its scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub schema_version: u32,
    pub function: String,
    pub method: String,
    pub dims: usize,
    pub n: usize,
    pub length: f64,
    pub m: usize,
    pub margin: usize,
    pub n_shot1: u64,
    pub n_shot2: u64,
    pub n_iter: usize,
    pub delta_factor: f64,
    pub statevector: bool,
    pub sign_form: String,
    pub cutoff: usize,
    pub points: String,
    pub sweep_axis: String,
    pub sweep_value: Option<u64>,
    pub seed: u64,
    /// Truncation actually used, per axis joined by `x`; empty for real-space methods.
    pub m_chosen: String,
    /// Sign threshold actually used.
    pub delta: Option<f64>,
    pub n_sum: Option<u64>,
    pub rmse: f64,
    pub l2ns: f64,
}
