use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use super::register::extract_bits;
use super::state::StateVector;

/// Measurement record: basis index → count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotHistogram {
    pub counts: BTreeMap<usize, u64>,
    pub total: u64,
    pub seed: u64,
    /// Width in bits of the keys.
    pub num_bits: usize,
}

impl ShotHistogram {
    pub fn empty(num_bits: usize, seed: u64) -> Self {
        ShotHistogram {
            counts: BTreeMap::new(),
            total: 0,
            seed,
            num_bits,
        }
    }

    pub fn count(&self, index: usize) -> u64 {
        self.counts.get(&index).copied().unwrap_or(0)
    }

    /// Counts as a dense vector of length `2^num_bits`.
    pub fn to_dense(&self) -> Vec<u64> {
        let mut v = vec![0; 1 << self.num_bits];
        for (&k, &c) in &self.counts {
            v[k] = c;
        }
        v
    }

    /// Keeps the shots whose bits at `positions` equal the bits of `required`
    /// (bit `i` of `required` is matched against `positions[i]`). The result is
    /// keyed by the remaining bits, packed in increasing position order, and
    /// its `total` is the retained count `N_sum`.
    pub fn postselect(&self, positions: &[usize], required: usize) -> ShotHistogram {
        let mask = positions.iter().fold(0usize, |m, &p| m | (1 << p));
        let free: Vec<usize> = (0..self.num_bits).filter(|b| mask & (1 << b) == 0).collect();
        let mut counts = BTreeMap::new();
        let mut total = 0;
        for (&k, &c) in &self.counts {
            if extract_bits(k, positions) == required {
                *counts.entry(extract_bits(k, &free)).or_insert(0) += c;
                total += c;
            }
        }
        ShotHistogram {
            counts,
            total,
            seed: self.seed,
            num_bits: free.len(),
        }
    }
}

/// Same selection as [`ShotHistogram::postselect`] applied to an exact
/// outcome distribution. Returned probabilities are unconditional.
pub fn postselect_probabilities(probs: &[f64], positions: &[usize], required: usize) -> Vec<f64> {
    let num_bits = probs.len().trailing_zeros() as usize;
    let mask = positions.iter().fold(0usize, |m, &p| m | (1 << p));
    let free: Vec<usize> = (0..num_bits).filter(|b| mask & (1 << b) == 0).collect();
    let mut out = vec![0.0; 1 << free.len()];
    for (k, &p) in probs.iter().enumerate() {
        if extract_bits(k, positions) == required {
            out[extract_bits(k, &free)] += p;
        }
    }
    out
}

/// Independent stream seed derived from a base seed (splitmix64 finalizer).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed
        .wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draws `n_shot` i.i.d. outcomes from `probs` as a single multinomial sample.
///
/// `probs` need not sum exactly to one; it is treated as proportional weights.
pub fn sample_multinomial(probs: &[f64], n_shot: u64, seed: u64) -> ShotHistogram {
    let num_bits = probs.len().max(1).trailing_zeros() as usize;
    let mut hist = ShotHistogram::empty(num_bits, seed);
    if n_shot == 0 {
        return hist;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total: f64 = probs.iter().sum();
    if !(total > 0.0) {
        return hist;
    }
    if (n_shot as usize) < probs.len() / 8 {
        sorted_uniform_sweep(probs, total, n_shot, &mut rng, &mut hist.counts);
    } else {
        binomial_chain(probs, total, n_shot, &mut rng, &mut hist.counts);
    }
    hist.total = n_shot;
    hist
}

fn binomial_chain(
    probs: &[f64],
    total: f64,
    n_shot: u64,
    rng: &mut ChaCha8Rng,
    counts: &mut BTreeMap<usize, u64>,
) {
    let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let mut remaining_shots = n_shot;
    let mut remaining_mass = total;
    for (k, &p) in probs.iter().enumerate() {
        if remaining_shots == 0 {
            break;
        }
        if p <= 0.0 {
            continue;
        }
        let c = if k == last || p >= remaining_mass {
            remaining_shots
        } else {
            let q = (p / remaining_mass).clamp(0.0, 1.0);
            Binomial::new(remaining_shots, q)
                .expect("probability in [0, 1]")
                .sample(rng)
        };
        if c > 0 {
            counts.insert(k, c);
        }
        remaining_shots -= c;
        remaining_mass -= p;
    }
}

fn sorted_uniform_sweep(
    probs: &[f64],
    total: f64,
    n_shot: u64,
    rng: &mut ChaCha8Rng,
    counts: &mut BTreeMap<usize, u64>,
) {
    let mut u: Vec<f64> = (0..n_shot).map(|_| rng.random::<f64>() * total).collect();
    u.sort_by(|a, b| a.total_cmp(b));
    let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let mut cdf = 0.0;
    let mut i = 0;
    for (k, &p) in probs.iter().enumerate() {
        cdf += p;
        let start = i;
        if k == last {
            i = u.len();
        } else {
            while i < u.len() && u[i] < cdf {
                i += 1;
            }
        }
        if i > start {
            counts.insert(k, (i - start) as u64);
        }
        if i == u.len() {
            break;
        }
    }
}

impl StateVector {
    /// Z-basis measurement of every qubit, repeated `n_shot` times.
    pub fn sample_shots(&self, n_shot: u64, seed: u64) -> ShotHistogram {
        sample_multinomial(&self.probabilities(), n_shot, seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn basis(q: usize, k: usize) -> StateVector {
        let mut v = vec![Complex64::new(0.0, 0.0); 1 << q];
        v[k] = Complex64::new(1.0, 0.0);
        StateVector::from_amplitudes(v).unwrap()
    }

    #[test]
    fn deterministic_outcome() {
        let h = basis(3, 5).sample_shots(1000, 7);
        assert_eq!(h.counts.len(), 1);
        assert_eq!(h.count(5), 1000);
        assert_eq!(h.total, 1000);
        // small-shot path
        let h = basis(6, 5).sample_shots(3, 7);
        assert_eq!(h.count(5), 3);
    }

    #[test]
    fn zero_shots_is_empty() {
        let h = basis(2, 1).sample_shots(0, 1);
        assert!(h.counts.is_empty());
        assert_eq!(h.total, 0);
    }

    #[test]
    fn uniform_counts_within_band() {
        let s = StateVector::from_amplitudes(vec![Complex64::new(0.5, 0.0); 4]).unwrap();
        let h = s.sample_shots(4_000_000, 11);
        for k in 0..4 {
            assert!(h.count(k).abs_diff(1_000_000) < 400_000);
        }
        assert_eq!(h, s.sample_shots(4_000_000, 11));
    }

    #[test]
    fn both_samplers_conserve_shots() {
        let probs: Vec<f64> = (0..1024).map(|i| 1.0 / (1.0 + i as f64).powi(2)).collect();
        for n in [5u64, 100, 127, 128, 10_000] {
            let h = sample_multinomial(&probs, n, 3);
            assert_eq!(h.counts.values().sum::<u64>(), n);
            assert!(h.counts.keys().all(|&k| k < 1024));
        }
    }

    #[test]
    fn postselect_filters_and_packs() {
        let mut h = ShotHistogram::empty(3, 0);
        h.counts.insert(0b000, 3);
        h.counts.insert(0b100, 5);
        h.total = 8;
        let sub = h.postselect(&[2], 0);
        assert_eq!(sub.total, 3);
        assert_eq!(sub.num_bits, 2);
        assert_eq!(sub.counts, BTreeMap::from([(0b00, 3)]));

        let same = h.postselect(&[], 0);
        assert_eq!(same.total, 8);
        assert_eq!(same.counts, h.counts);
    }

    #[test]
    fn postselect_probabilities_matches_histogram_rule() {
        let probs = [0.1, 0.2, 0.3, 0.4];
        assert_eq!(postselect_probabilities(&probs, &[1], 0), vec![0.1, 0.2]);
        assert_eq!(postselect_probabilities(&probs, &[0], 1), vec![0.2, 0.4]);
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(0, 0), derive_seed(0, 1));
        assert_ne!(derive_seed(0, 0), derive_seed(1, 0));
    }
}
