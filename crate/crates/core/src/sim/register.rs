/// A contiguous block of qubits `[start, start + len)`; qubit `start` is the
/// least-significant bit of the register value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Register {
    pub start: usize,
    pub len: usize,
}

impl Register {
    pub const fn new(start: usize, len: usize) -> Self {
        Register { start, len }
    }

    /// Number of basis states of the register, `2^len`.
    #[inline]
    pub const fn dim(&self) -> usize {
        1 << self.len
    }

    #[inline]
    pub const fn end(&self) -> usize {
        self.start + self.len
    }

    /// Bit mask of the register inside a full basis index.
    #[inline]
    pub const fn mask(&self) -> usize {
        ((1usize << self.len) - 1) << self.start
    }

    #[inline]
    pub const fn value_of(&self, index: usize) -> usize {
        (index >> self.start) & ((1usize << self.len) - 1)
    }

    #[inline]
    pub const fn with_value(&self, index: usize, value: usize) -> usize {
        (index & !self.mask()) | (value << self.start)
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> {
        self.start..self.end()
    }

    /// The `count` least-significant qubits.
    pub fn low(&self, count: usize) -> Register {
        debug_assert!(count <= self.len);
        Register::new(self.start, count)
    }

    /// The `count` most-significant qubits.
    pub fn high(&self, count: usize) -> Register {
        debug_assert!(count <= self.len);
        Register::new(self.end() - count, count)
    }
}

/// Control condition on a set of qubits: an amplitude is acted on iff the
/// bits under `mask` equal `value`. An empty mask means "always".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Controls {
    mask: usize,
    value: usize,
}

impl Controls {
    pub const fn none() -> Self {
        Controls { mask: 0, value: 0 }
    }

    /// Closed control: active when `qubit` is `|1⟩`.
    pub const fn on(qubit: usize) -> Self {
        Controls {
            mask: 1 << qubit,
            value: 1 << qubit,
        }
    }

    /// Open control: active when `qubit` is `|0⟩`.
    pub const fn off(qubit: usize) -> Self {
        Controls {
            mask: 1 << qubit,
            value: 0,
        }
    }

    pub const fn single(qubit: usize, open: bool) -> Self {
        if open {
            Self::off(qubit)
        } else {
            Self::on(qubit)
        }
    }

    /// Conjunction of two conditions. Panics if they disagree on a shared qubit.
    pub fn and(self, other: Controls) -> Controls {
        let shared = self.mask & other.mask;
        assert_eq!(
            self.value & shared,
            other.value & shared,
            "contradictory control conditions"
        );
        Controls {
            mask: self.mask | other.mask,
            value: self.value | other.value,
        }
    }

    #[inline]
    pub const fn mask(&self) -> usize {
        self.mask
    }

    #[inline]
    pub const fn holds(&self, index: usize) -> bool {
        index & self.mask == self.value
    }

    pub const fn is_empty(&self) -> bool {
        self.mask == 0
    }
}

/// Gathers the bits of `index` at `positions` into a compact value
/// (`positions[0]` becomes bit 0).
#[inline]
pub fn extract_bits(index: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (b, &p)| acc | (((index >> p) & 1) << b))
}

/// Inverse of [`extract_bits`]: scatters the low bits of `value` onto `positions`.
#[inline]
pub fn deposit_bits(value: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (b, &p)| acc | (((value >> b) & 1) << p))
}
