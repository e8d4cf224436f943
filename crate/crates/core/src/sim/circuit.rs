use super::register::{Controls, Register};
use super::state::{Gate, StateVector};
use crate::error::Result;

/// An ordered list of (possibly controlled) gates.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Circuit {
    ops: Vec<(Controls, Gate)>,
}

impl Circuit {
    pub fn new() -> Self {
        Circuit::default()
    }

    pub fn push(&mut self, gate: Gate) -> &mut Self {
        self.ops.push((Controls::none(), gate));
        self
    }

    pub fn push_controlled(&mut self, controls: Controls, gate: Gate) -> &mut Self {
        self.ops.push((controls, gate));
        self
    }

    pub fn append(&mut self, other: Circuit) -> &mut Self {
        self.ops.extend(other.ops);
        self
    }

    /// Every gate additionally conditioned on `extra`.
    pub fn controlled_by(self, extra: Controls) -> Circuit {
        Circuit {
            ops: self
                .ops
                .into_iter()
                .map(|(c, g)| (c.and(extra), g))
                .collect(),
        }
    }

    pub fn ops(&self) -> &[(Controls, Gate)] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn apply(&self, state: &mut StateVector) -> Result<()> {
        for (c, g) in &self.ops {
            state.apply_controlled(*c, g)?;
        }
        Ok(())
    }
}

/// Which symmetric continuation the extension circuit builds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parity {
    #[default]
    Even,
    Odd,
}

/// The extension operator without state preparation: Hadamard on `ancilla`,
/// fan-out CNOT onto `data`, then an incrementer on `data` controlled by the
/// ancilla. For the odd variant a Z on the ancilla and a global phase `i`
/// follow.
///
/// Acting on `|0⟩_anc |ψ⟩` this leaves index `N + k` holding `±ψ_{(N−k) mod N}`.
pub fn extension_circuit(data: Register, ancilla: usize, parity: Parity) -> Circuit {
    let mut c = Circuit::new();
    c.push(Gate::Hadamard(ancilla))
        .push_controlled(Controls::on(ancilla), Gate::FlipBits(data.qubits().collect()))
        .push_controlled(Controls::on(ancilla), Gate::Increment(data));
    if parity == Parity::Odd {
        c.push(Gate::PauliZ(ancilla))
            .push(Gate::GlobalPhase(std::f64::consts::FRAC_PI_2));
    }
    c
}

/// Loads `values` on qubits `0..n` of an `(n+1)`-qubit register and applies
/// the extension with qubit `n` as ancilla.
pub fn extended_state(values: &[f64], parity: Parity) -> Result<StateVector> {
    let n = values.len().max(1).trailing_zeros() as usize;
    let mut s = StateVector::zero(n + 1)?;
    s.load_amplitudes(values)?;
    extension_circuit(Register::new(0, n), n, parity).apply(&mut s)?;
    Ok(s)
}

/// The even extension `|ψ̃⟩_{n+1}` of the encoded samples.
pub fn apply_even_extension(values: &[f64]) -> Result<StateVector> {
    extended_state(values, Parity::Even)
}

/// The odd extension, including its global phase `i`.
pub fn apply_odd_extension(values: &[f64]) -> Result<StateVector> {
    extended_state(values, Parity::Odd)
}

/// Classical reference for the extended samples: index `N + k` holds
/// `±f((N−k) mod N)`.
pub fn extend_samples(values: &[f64], parity: Parity) -> Vec<f64> {
    let n = values.len();
    let sign = match parity {
        Parity::Even => 1.0,
        Parity::Odd => -1.0,
    };
    let mut out = values.to_vec();
    out.extend((0..n).map(|k| sign * values[(n - k) % n]));
    out
}
