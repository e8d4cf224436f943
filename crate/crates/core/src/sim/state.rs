use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::register::{deposit_bits, Controls, Register};
use crate::error::{domain_err, shape_err, FsrError, Result};
use crate::exec::{self, ExecPolicy};

/// 24 qubits is 16M amplitudes (256 MiB); enough for every 2D experiment at 512².
pub const DEFAULT_MAX_QUBITS: usize = 24;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// The unitaries the readout circuits are built from.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    Hadamard(usize),
    PauliZ(usize),
    /// Multiplies every acted-on amplitude by `exp(i·θ)`.
    GlobalPhase(f64),
    /// Pauli-X on each listed qubit. Under a single control this is the
    /// fan-out CNOT.
    FlipBits(Vec<usize>),
    /// `|k⟩ → |k+1 mod K⟩`.
    Increment(Register),
    /// `|k⟩ → |k+shift mod K⟩`.
    ModularAdd { register: Register, shift: usize },
    /// `|k⟩ → exp(−i2π(k−k0)x/L)|k⟩`.
    PhasePoly {
        register: Register,
        k0: i64,
        x: f64,
        length: f64,
    },
    /// `b_j = K^{-1/2} Σ_k a_k exp(−i2πkj/K)`.
    InverseQft(Register),
    /// Adjoint of [`Gate::InverseQft`].
    Qft(Register),
    Swap(usize, usize),
    /// A unitary mapping `|0…0⟩` on `qubits` to `Σ_t amplitudes[t] |t⟩`
    /// (`qubits[0]` is the least-significant bit of `t`). Realized as the
    /// Householder reflection exchanging the two states, so it is defined on
    /// the whole space and can be controlled.
    Prepare {
        qubits: Vec<usize>,
        amplitudes: Arc<Vec<f64>>,
    },
}

impl Gate {
    /// Hadamards on every qubit of `register`.
    pub fn hadamards(register: Register) -> Vec<Gate> {
        register.qubits().map(Gate::Hadamard).collect()
    }

    fn touched_mask(&self) -> usize {
        match self {
            Gate::Hadamard(q) | Gate::PauliZ(q) => 1 << q,
            Gate::GlobalPhase(_) => 0,
            Gate::FlipBits(ts) => ts.iter().fold(0, |m, &t| m | (1 << t)),
            Gate::Increment(r)
            | Gate::InverseQft(r)
            | Gate::Qft(r)
            | Gate::ModularAdd { register: r, .. }
            | Gate::PhasePoly { register: r, .. } => r.mask(),
            Gate::Swap(a, b) => (1 << a) | (1 << b),
            Gate::Prepare { qubits, .. } => qubits.iter().fold(0, |m, &t| m | (1 << t)),
        }
    }

    fn max_qubit(&self) -> Option<usize> {
        let mask = self.touched_mask();
        (mask != 0).then(|| usize::BITS as usize - 1 - mask.leading_zeros() as usize)
    }
}

/// Normalized complex amplitudes over `2^q` basis states, little-endian
/// (qubit 0 is the least-significant bit of the basis index).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
    policy: ExecPolicy,
}

impl StateVector {
    /// `|0…0⟩` on `num_qubits` qubits, capped at [`DEFAULT_MAX_QUBITS`].
    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::zero_with_cap(num_qubits, DEFAULT_MAX_QUBITS)
    }

    pub fn zero_with_cap(num_qubits: usize, max_qubits: usize) -> Result<Self> {
        if num_qubits < 1 || num_qubits > max_qubits {
            return Err(FsrError::Capacity {
                requested: num_qubits,
                max: max_qubits,
            });
        }
        let mut amps = vec![ZERO; 1 << num_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            num_qubits,
            amps,
            policy: ExecPolicy::default(),
        })
    }

    /// Wraps raw amplitudes; they are normalized on the way in.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return shape_err(format!("amplitude count {len} is not a power of two ≥ 2"));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > DEFAULT_MAX_QUBITS {
            return Err(FsrError::Capacity {
                requested: num_qubits,
                max: DEFAULT_MAX_QUBITS,
            });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(FsrError::Normalization);
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(StateVector {
            num_qubits,
            amps,
            policy: ExecPolicy::default(),
        })
    }

    pub fn with_policy(mut self, policy: ExecPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn policy(&self) -> ExecPolicy {
        self.policy
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    /// Bytes held by the amplitude buffer.
    pub fn memory_bytes(&self) -> usize {
        self.amps.len() * std::mem::size_of::<Complex64>()
    }

    pub fn norm_sqr(&self) -> f64 {
        let amps = &self.amps;
        exec::sum_range(self.policy, amps.len(), |i| amps[i].norm_sqr())
    }

    /// Outcome probabilities `|amp_k|²` of a full Z-basis measurement.
    pub fn probabilities(&self) -> Vec<f64> {
        let amps = &self.amps;
        exec::map_range(self.policy, amps.len(), |i| amps[i].norm_sqr())
    }

    /// Loads real `values / ‖values‖₂` onto the low `log2(len)` qubits of `|0…0⟩`.
    pub fn load_amplitudes(&mut self, values: &[f64]) -> Result<()> {
        let n = values.len();
        if n < 2 || !n.is_power_of_two() || n > self.amps.len() {
            return shape_err(format!(
                "cannot load {n} values onto {} qubits",
                self.num_qubits
            ));
        }
        let amplitudes = normalized(values)?;
        let qubits: Vec<usize> = (0..n.trailing_zeros() as usize).collect();
        self.apply(&Gate::Prepare {
            qubits,
            amplitudes: Arc::new(amplitudes),
        })
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        self.apply_controlled(Controls::none(), gate)
    }

    /// Applies `gate` on the subspace selected by `controls`, identity elsewhere.
    pub fn apply_controlled(&mut self, controls: Controls, gate: &Gate) -> Result<()> {
        self.validate(controls, gate)?;
        match gate {
            Gate::Hadamard(q) => self.hadamard_kernel(controls, *q),
            Gate::PauliZ(q) => {
                let bit = 1usize << q;
                self.diagonal_kernel(controls, move |i| {
                    if i & bit != 0 {
                        Complex64::new(-1.0, 0.0)
                    } else {
                        Complex64::new(1.0, 0.0)
                    }
                })
            }
            Gate::GlobalPhase(theta) => {
                let phase = Complex64::from_polar(1.0, *theta);
                self.diagonal_kernel(controls, move |_| phase)
            }
            Gate::FlipBits(targets) => {
                let mask = targets.iter().fold(0usize, |m, &t| m | (1 << t));
                self.permute_kernel(controls, move |j| j ^ mask)
            }
            Gate::Increment(r) => {
                let r = *r;
                let k_mask = r.dim() - 1;
                self.permute_kernel(controls, move |j| {
                    r.with_value(j, r.value_of(j).wrapping_sub(1) & k_mask)
                })
            }
            Gate::ModularAdd { register, shift } => {
                let (r, s) = (*register, *shift);
                let k_mask = r.dim() - 1;
                self.permute_kernel(controls, move |j| {
                    r.with_value(j, r.value_of(j).wrapping_sub(s) & k_mask)
                })
            }
            Gate::PhasePoly {
                register,
                k0,
                x,
                length,
            } => {
                let r = *register;
                let table: Vec<Complex64> = (0..r.dim())
                    .map(|k| {
                        let arg = -2.0 * PI * ((k as i64 - k0) as f64) * x / length;
                        Complex64::from_polar(1.0, arg)
                    })
                    .collect();
                self.diagonal_kernel(controls, move |i| table[r.value_of(i)])
            }
            Gate::InverseQft(r) => self.qft_kernel(controls, *r, true),
            Gate::Qft(r) => self.qft_kernel(controls, *r, false),
            Gate::Swap(a, b) => {
                let (a, b) = (*a, *b);
                self.permute_kernel(controls, move |j| {
                    let (ba, bb) = ((j >> a) & 1, (j >> b) & 1);
                    if ba == bb {
                        j
                    } else {
                        j ^ ((1 << a) | (1 << b))
                    }
                })
            }
            Gate::Prepare { qubits, amplitudes } => {
                self.prepare_kernel(controls, qubits, amplitudes)
            }
        }
        Ok(())
    }

    // --- convenience wrappers named after the circuit elements ---

    pub fn hadamard(&mut self, qubit: usize) -> Result<()> {
        self.apply(&Gate::Hadamard(qubit))
    }

    pub fn pauli_z(&mut self, qubit: usize) -> Result<()> {
        self.apply(&Gate::PauliZ(qubit))
    }

    pub fn global_phase(&mut self, theta: f64) -> Result<()> {
        self.apply(&Gate::GlobalPhase(theta))
    }

    /// CNOT fan-out: flips every target when `control` is `|1⟩`.
    pub fn fanout_cnot(&mut self, control: usize, targets: &[usize]) -> Result<()> {
        self.apply_controlled(Controls::on(control), &Gate::FlipBits(targets.to_vec()))
    }

    pub fn increment(&mut self, target: Register, control: Option<usize>) -> Result<()> {
        let c = control.map_or(Controls::none(), Controls::on);
        self.apply_controlled(c, &Gate::Increment(target))
    }

    pub fn modular_add(&mut self, target: Register, shift: usize) -> Result<()> {
        self.apply(&Gate::ModularAdd {
            register: target,
            shift,
        })
    }

    pub fn phase_poly(&mut self, target: Register, k0: i64, x: f64, length: f64) -> Result<()> {
        self.apply(&Gate::PhasePoly {
            register: target,
            k0,
            x,
            length,
        })
    }

    pub fn inverse_qft(&mut self, target: Register) -> Result<()> {
        self.apply(&Gate::InverseQft(target))
    }

    pub fn qft(&mut self, target: Register) -> Result<()> {
        self.apply(&Gate::Qft(target))
    }

    fn validate(&self, controls: Controls, gate: &Gate) -> Result<()> {
        let q = self.num_qubits;
        if controls.mask() >> q != 0 {
            return shape_err("control qubit out of range");
        }
        if let Some(top) = gate.max_qubit() {
            if top >= q {
                return shape_err(format!("gate touches qubit {top} of a {q}-qubit state"));
            }
        }
        if gate.touched_mask() & controls.mask() != 0 {
            return shape_err("control qubit overlaps gate targets");
        }
        match gate {
            Gate::Increment(r) | Gate::InverseQft(r) | Gate::Qft(r) if r.len == 0 => {
                shape_err("empty target register")
            }
            Gate::ModularAdd { register, shift } => {
                if register.len == 0 {
                    shape_err("empty target register")
                } else if *shift >= register.dim() {
                    domain_err(format!(
                        "shift {shift} outside [0, {})",
                        register.dim()
                    ))
                } else {
                    Ok(())
                }
            }
            Gate::PhasePoly {
                register,
                x,
                length,
                ..
            } => {
                if register.len == 0 {
                    shape_err("empty target register")
                } else if !(*length > 0.0) || !(0.0..=*length).contains(x) {
                    domain_err(format!("position {x} outside [0, {length}]"))
                } else {
                    Ok(())
                }
            }
            Gate::FlipBits(ts) => {
                let mask = ts.iter().fold(0usize, |m, &t| m | (1 << t));
                if mask.count_ones() as usize != ts.len() {
                    shape_err("duplicate fan-out target")
                } else {
                    Ok(())
                }
            }
            Gate::Swap(a, b) if a == b => shape_err("swap of a qubit with itself"),
            Gate::Prepare { qubits, amplitudes } => {
                let mask = qubits.iter().fold(0usize, |m, &t| m | (1 << t));
                if qubits.is_empty() || mask.count_ones() as usize != qubits.len() {
                    shape_err("preparation register must be non-empty and distinct")
                } else if amplitudes.len() != 1 << qubits.len() {
                    shape_err(format!(
                        "{} amplitudes for a {}-qubit register",
                        amplitudes.len(),
                        qubits.len()
                    ))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    fn hadamard_kernel(&mut self, controls: Controls, qubit: usize) {
        let stride = 1usize << qubit;
        let chunk = stride << 1;
        exec::for_each_chunk_mut(self.policy, &mut self.amps, chunk, |ci, block| {
            let base = ci * chunk;
            let (lo, hi) = block.split_at_mut(stride);
            for j in 0..stride {
                if !controls.holds(base + j) {
                    continue;
                }
                let a = lo[j];
                let b = hi[j];
                lo[j] = (a + b) * FRAC_1_SQRT_2;
                hi[j] = (a - b) * FRAC_1_SQRT_2;
            }
        });
    }

    fn diagonal_kernel<F>(&mut self, controls: Controls, phase: F)
    where
        F: Fn(usize) -> Complex64 + Send + Sync,
    {
        const CHUNK: usize = 1 << 12;
        exec::for_each_chunk_mut(self.policy, &mut self.amps, CHUNK, |ci, block| {
            let base = ci * CHUNK;
            for (j, a) in block.iter_mut().enumerate() {
                let i = base + j;
                if controls.holds(i) {
                    *a *= phase(i);
                }
            }
        });
    }

    /// `new[j] = old[source(j)]` where the control holds. The permutations used
    /// here never touch control bits, so the condition is checked on `j`.
    fn permute_kernel<F>(&mut self, controls: Controls, source: F)
    where
        F: Fn(usize) -> usize + Send + Sync,
    {
        let old = std::mem::take(&mut self.amps);
        let mut new = vec![ZERO; old.len()];
        exec::fill_indexed(self.policy, &mut new, |j| {
            if controls.holds(j) {
                old[source(j)]
            } else {
                old[j]
            }
        });
        self.amps = new;
    }

    fn qft_kernel(&mut self, controls: Controls, reg: Register, inverse: bool) {
        let k = reg.dim();
        let mut planner = FftPlanner::<f64>::new();
        // The inverse QFT carries the negative exponent, i.e. the forward DFT.
        let fft: Arc<dyn Fft<f64>> = if inverse {
            planner.plan_fft_forward(k)
        } else {
            planner.plan_fft_inverse(k)
        };
        let scale = 1.0 / (k as f64).sqrt();
        let low = 1usize << reg.start;
        let block = k * low;
        let policy = self.policy;
        let fibers_per_task = ((1 << 14) / k).max(1);

        // Lay every fiber out contiguously (a no-op when the register starts at qubit 0).
        let mut work = if low == 1 {
            std::mem::take(&mut self.amps)
        } else {
            let src = &self.amps;
            let mut t = vec![ZERO; src.len()];
            exec::fill_indexed(policy, &mut t, |idx| {
                let f = idx / k;
                let kk = idx % k;
                src[(f / low) * block + kk * low + f % low]
            });
            t
        };

        exec::for_each_chunk_mut(policy, &mut work, k * fibers_per_task, |ti, chunk| {
            let mut scratch = vec![ZERO; fft.get_inplace_scratch_len()];
            for (fi, fiber) in chunk.chunks_mut(k).enumerate() {
                let f = ti * fibers_per_task + fi;
                let base = (f / low) * block + f % low;
                if !controls.holds(base) {
                    continue;
                }
                fft.process_with_scratch(fiber, &mut scratch);
                fiber.iter_mut().for_each(|a| *a *= scale);
            }
        });

        if low == 1 {
            self.amps = work;
        } else {
            exec::fill_indexed(policy, &mut self.amps, |i| {
                let b = i / block;
                let r = i % block;
                work[(b * low + r % low) * k + r / low]
            });
        }
    }

    fn prepare_kernel(&mut self, controls: Controls, qubits: &[usize], target: &[f64]) {
        let q = self.num_qubits;
        let k = target.len();
        // Householder vector w = |0⟩ − |ψ⟩; the reflection I − 2ww†/‖w‖² swaps them.
        let mut w: Vec<f64> = target.iter().map(|&t| -t).collect();
        w[0] += 1.0;
        let wn2: f64 = w.iter().map(|x| x * x).sum();
        if wn2 < 1e-30 {
            return;
        }
        let reg_mask = qubits.iter().fold(0usize, |m, &t| m | (1 << t));
        let others: Vec<usize> = (0..q).filter(|b| reg_mask & (1 << b) == 0).collect();
        let dep: Vec<usize> = (0..k).map(|t| deposit_bits(t, qubits)).collect();
        let policy = self.policy;

        let fibers = 1usize << others.len();
        let coefs: Vec<Complex64> = (0..fibers)
            .map(|f| {
                let base = deposit_bits(f, &others);
                if !controls.holds(base) {
                    return ZERO;
                }
                let amps = &self.amps;
                let dot = exec::sum_range_complex(policy, k, |t| amps[base | dep[t]] * w[t]);
                dot * (2.0 / wn2)
            })
            .collect();

        if reg_mask == (k - 1) {
            // Register occupies the low bits: fibers are contiguous blocks.
            exec::for_each_chunk_mut(policy, &mut self.amps, k, |f, fiber| {
                let c = coefs[f];
                if c != ZERO {
                    fiber.iter_mut().zip(&w).for_each(|(a, &wt)| *a -= c * wt);
                }
            });
        } else {
            let inv_pos = |i: usize| -> (usize, usize) {
                let mut t = 0;
                for (b, &p) in qubits.iter().enumerate() {
                    t |= ((i >> p) & 1) << b;
                }
                let mut f = 0;
                for (b, &p) in others.iter().enumerate() {
                    f |= ((i >> p) & 1) << b;
                }
                (f, t)
            };
            const CHUNK: usize = 1 << 12;
            exec::for_each_chunk_mut(policy, &mut self.amps, CHUNK, |ci, block| {
                for (j, a) in block.iter_mut().enumerate() {
                    let (f, t) = inv_pos(ci * CHUNK + j);
                    let c = coefs[f];
                    if c != ZERO {
                        *a -= c * w[t];
                    }
                }
            });
        }
    }
}

/// `values / ‖values‖₂`.
pub fn normalized(values: &[f64]) -> Result<Vec<f64>> {
    let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(FsrError::Normalization);
    }
    Ok(values.iter().map(|v| v / norm).collect())
}
