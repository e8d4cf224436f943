//! Magnitude and sign circuits of the Fourier-space readout, for any number
//! of axes, plus their post-selected measurement.
//!
//! Qubit layout for per-axis data widths `n_1, …, n_d`: axis `ℓ` owns the
//! contiguous extended register `[o_ℓ, o_ℓ + n_ℓ + 1)` with its data qubits
//! in the low `n_ℓ` bits and its extension ancilla on top, `o_ℓ = Σ_{i<ℓ}(n_i+1)`.
//! The LCU ancilla of the sign circuit comes last. In 1D this is data
//! `[0, n)`, ancilla `n`, LCU `n + 1`.

use std::sync::Arc;

use crate::encoding::GridFunction;
use crate::error::{FsrError, Result};
use crate::exec::ExecPolicy;
use crate::sim::{
    normalized, postselect_probabilities, sample_multinomial, extension_circuit, Circuit,
    Controls, Gate, Parity, Register, StateVector, DEFAULT_MAX_QUBITS,
};

/// How outcome statistics are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    /// Exact outcome probabilities (infinite-shot limit).
    Exact,
    Shots { n_shot: u64, seed: u64 },
}

impl Sampling {
    pub fn is_exact(self) -> bool {
        matches!(self, Sampling::Exact)
    }
}

/// Execution settings for the statevector engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Backend {
    pub policy: ExecPolicy,
    pub max_qubits: usize,
}

impl Default for Backend {
    fn default() -> Self {
        Backend {
            policy: ExecPolicy::default(),
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }
}

impl Backend {
    pub fn zero_state(&self, qubits: usize) -> Result<StateVector> {
        Ok(StateVector::zero_with_cap(qubits, self.max_qubits)?.with_policy(self.policy))
    }
}

/// Which of the two equivalent sign circuits to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignForm {
    /// Controlled inverse QFT, open-controlled Hadamards on the kept qubits.
    #[default]
    ControlledQft,
    /// Uncontrolled inverse QFT, open-controlled Hadamards on the discarded qubits.
    UncontrolledQft,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FsrLayout {
    data: Vec<usize>,
}

impl FsrLayout {
    pub fn new(data_qubits: &[usize]) -> Self {
        FsrLayout {
            data: data_qubits.to_vec(),
        }
    }

    pub fn for_grid(gf: &GridFunction) -> Self {
        Self::new(&gf.qubits())
    }

    pub fn dims(&self) -> usize {
        self.data.len()
    }

    pub fn data_width(&self, axis: usize) -> usize {
        self.data[axis]
    }

    fn offset(&self, axis: usize) -> usize {
        self.data[..axis].iter().map(|n| n + 1).sum()
    }

    pub fn ext_register(&self, axis: usize) -> Register {
        Register::new(self.offset(axis), self.data[axis] + 1)
    }

    pub fn data_register(&self, axis: usize) -> Register {
        Register::new(self.offset(axis), self.data[axis])
    }

    pub fn ancilla(&self, axis: usize) -> usize {
        self.offset(axis) + self.data[axis]
    }

    pub fn lcu(&self) -> usize {
        self.offset(self.dims())
    }

    pub fn magnitude_qubits(&self) -> usize {
        self.lcu()
    }

    pub fn sign_qubits(&self) -> usize {
        self.lcu() + 1
    }

    /// All data qubits, axis 0 first, so a row-major sample index maps onto them directly.
    pub fn data_qubits(&self) -> Vec<usize> {
        (0..self.dims())
            .flat_map(|a| self.data_register(a).qubits())
            .collect()
    }

    /// Low `m_ℓ` qubits of every extended register, in increasing order.
    pub fn kept_positions(&self, ms: &[usize]) -> Vec<usize> {
        (0..self.dims())
            .flat_map(|a| self.ext_register(a).low(ms[a]).qubits())
            .collect()
    }

    pub fn check_truncation(&self, ms: &[usize]) -> Result<()> {
        if ms.len() != self.dims() {
            return Err(FsrError::Shape(format!(
                "{} truncation widths for {} axes",
                ms.len(),
                self.dims()
            )));
        }
        for (a, &m) in ms.iter().enumerate() {
            if m > self.data[a] + 1 {
                return Err(FsrError::Domain(format!(
                    "truncation width {m} exceeds extended register width {} on axis {a}",
                    self.data[a] + 1
                )));
            }
        }
        Ok(())
    }

    fn prepare(&self, amplitudes: Arc<Vec<f64>>) -> Gate {
        Gate::Prepare {
            qubits: self.data_qubits(),
            amplitudes,
        }
    }

    fn extend_and_transform(&self, parity: Parity, with_qft: bool) -> Circuit {
        let mut c = Circuit::new();
        for a in 0..self.dims() {
            c.append(extension_circuit(self.data_register(a), self.ancilla(a), parity));
        }
        if with_qft {
            for a in 0..self.dims() {
                c.push(Gate::InverseQft(self.ext_register(a)));
            }
        }
        c
    }

    /// State preparation, extension of every axis, inverse QFT of every extended register.
    pub fn magnitude_circuit(&self, amplitudes: Arc<Vec<f64>>, parity: Parity) -> Circuit {
        let mut c = Circuit::new();
        c.push(self.prepare(amplitudes));
        c.append(self.extend_and_transform(parity, true));
        c
    }

    /// The LCU circuit adding `1/√(Π M_ℓ)` to the kept coefficients.
    pub fn sign_circuit(
        &self,
        amplitudes: Arc<Vec<f64>>,
        ms: &[usize],
        parity: Parity,
        form: SignForm,
    ) -> Circuit {
        let lcu = self.lcu();
        let mut c = Circuit::new();
        c.push(Gate::Hadamard(lcu));
        let mut branch = Circuit::new();
        branch.push(self.prepare(amplitudes));
        match form {
            SignForm::ControlledQft => {
                branch.append(self.extend_and_transform(parity, true));
                c.append(branch.controlled_by(Controls::on(lcu)));
                for q in self.kept_positions(ms) {
                    c.push_controlled(Controls::off(lcu), Gate::Hadamard(q));
                }
            }
            SignForm::UncontrolledQft => {
                branch.append(self.extend_and_transform(parity, false));
                c.append(branch.controlled_by(Controls::on(lcu)));
                for a in 0..self.dims() {
                    c.push(Gate::InverseQft(self.ext_register(a)));
                }
                for a in 0..self.dims() {
                    let ext = self.ext_register(a);
                    for q in ext.high(ext.len - ms[a]).qubits() {
                        c.push_controlled(Controls::off(lcu), Gate::Hadamard(q));
                    }
                }
            }
        }
        c.push(Gate::Hadamard(lcu));
        c
    }
}

/// Post-selected outcome statistics over the kept qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Postselected {
    /// `count_J / n_shot` (or the exact probability) per compressed index `J`.
    pub frequencies: Vec<f64>,
    /// Number of retained shots; `None` in exact mode.
    pub n_sum: Option<u64>,
}

/// Measures every qubit and keeps outcomes whose non-`kept` qubits are all `|0⟩`.
///
/// Sampling happens over the kept outcomes plus one bucket for everything
/// rejected, which has the same law as sampling the full distribution and
/// filtering afterwards.
pub fn measure_postselected(state: &StateVector, kept: &[usize], sampling: Sampling) -> Postselected {
    let keep_mask = kept.iter().fold(0usize, |m, &p| m | (1 << p));
    let discard: Vec<usize> = (0..state.num_qubits())
        .filter(|b| keep_mask & (1 << b) == 0)
        .collect();
    let probs = state.probabilities();
    let mut kept_probs = postselect_probabilities(&probs, &discard, 0);
    match sampling {
        Sampling::Exact => Postselected {
            frequencies: kept_probs,
            n_sum: None,
        },
        Sampling::Shots { n_shot, seed } => {
            let retained: f64 = kept_probs.iter().sum();
            let len = kept_probs.len();
            kept_probs.push((1.0 - retained).max(0.0));
            let hist = sample_multinomial(&kept_probs, n_shot, seed);
            let mut frequencies = vec![0.0; len];
            let mut n_sum = 0;
            for (&k, &c) in &hist.counts {
                if k < len && n_shot > 0 {
                    frequencies[k] = c as f64 / n_shot as f64;
                    n_sum += c;
                }
            }
            Postselected {
                frequencies,
                n_sum: Some(n_sum),
            }
        }
    }
}

/// Runs the magnitude circuit and returns `d_J = √(frequency_J)` over the kept indices.
pub fn magnitudes(
    gf: &GridFunction,
    ms: &[usize],
    parity: Parity,
    sampling: Sampling,
    backend: Backend,
) -> Result<Vec<f64>> {
    let layout = FsrLayout::for_grid(gf);
    layout.check_truncation(ms)?;
    let amps = Arc::new(normalized(gf.samples())?);
    let mut s = backend.zero_state(layout.magnitude_qubits())?;
    layout.magnitude_circuit(amps, parity).apply(&mut s)?;
    let out = measure_postselected(&s, &layout.kept_positions(ms), sampling);
    Ok(out.frequencies.into_iter().map(f64::sqrt).collect())
}

/// Runs the sign circuit once and returns `e_J = √(frequency_J)` and `N_sum`.
pub fn shifted_magnitudes(
    gf: &GridFunction,
    ms: &[usize],
    parity: Parity,
    form: SignForm,
    sampling: Sampling,
    backend: Backend,
) -> Result<(Vec<f64>, Option<u64>)> {
    let layout = FsrLayout::for_grid(gf);
    layout.check_truncation(ms)?;
    let amps = Arc::new(normalized(gf.samples())?);
    let mut s = backend.zero_state(layout.sign_qubits())?;
    layout.sign_circuit(amps, ms, parity, form).apply(&mut s)?;
    let out = measure_postselected(&s, &layout.kept_positions(ms), sampling);
    Ok((
        out.frequencies.into_iter().map(f64::sqrt).collect(),
        out.n_sum,
    ))
}
