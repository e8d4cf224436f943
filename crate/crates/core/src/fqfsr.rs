//! Fully quantum Fourier readout: the value at a point is read from a swap test
//! between the transformed state and a plane-wave reference `|φ_x⟩`.
//!
//! Exact variant layout: data `[0, n)`, reference `[n, 2n)`, test ancilla `2n`.
//! Approximate variant: data `[0, n)`, reference `[n, n+m)`, ancilla `n+m`; the
//! swap acts on the low `m` data qubits and the top `n−m` are post-selected to `|0⟩`.
//! Both return unsigned values.

use std::sync::Arc;

use num_complex::Complex64;

use crate::circuits::{Backend, Sampling};
use crate::encoding::GridFunction;
use crate::error::{domain_err, shape_err, FsrError, Result};
use crate::readout::{Method, Reconstruction};
use crate::sim::{normalized, sample_multinomial, Controls, Gate, Register, StateVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapEstimate {
    pub x: f64,
    /// Probability (or frequency) of the accepted outcome: ancilla `0`, and
    /// for the approximate variant also the top data qubits `0`.
    pub raw_p0: f64,
    /// `|⟨φ_x|ψ'⟩|`, with `ψ'` normalized to the kept band for the approximate variant.
    pub overlap: f64,
    /// Weight of the kept band; `None` for the exact variant.
    pub c_m: Option<f64>,
    pub value: f64,
    /// The raw overlap² estimate was negative and was clamped to 0.
    pub clamped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Exact,
    /// Reference register of `m` qubits, `M = 2^m`.
    Approx { m: usize },
}

/// Data register after the inverse QFT (and the `M/2` shift for the approximate variant).
fn transformed(gf: &GridFunction, variant: Variant, backend: Backend) -> Result<Vec<Complex64>> {
    if gf.dims() != 1 {
        return shape_err("the swap-test readout is one-dimensional");
    }
    let n = gf.qubits()[0];
    let data = Register::new(0, n);
    let mut s = backend.zero_state(n)?;
    s.apply(&Gate::Prepare {
        qubits: data.qubits().collect(),
        amplitudes: Arc::new(normalized(gf.samples())?),
    })?;
    s.apply(&Gate::InverseQft(data))?;
    if let Variant::Approx { m } = variant {
        if m > n {
            return domain_err(format!("reference width {m} exceeds data width {n}"));
        }
        let shift = (1usize << m) / 2;
        if shift > 0 {
            s.apply(&Gate::ModularAdd { register: data, shift })?;
        }
    }
    Ok(s.into_amplitudes())
}

/// `|φ_x⟩` on its own `m`-qubit register.
fn reference_state(m: usize, k0: i64, x: f64, length: f64, backend: Backend) -> Result<Vec<Complex64>> {
    if m == 0 {
        return Ok(vec![Complex64::new(1.0, 0.0)]);
    }
    let r = Register::new(0, m);
    let mut s = backend.zero_state(m)?;
    for q in r.qubits() {
        s.apply(&Gate::Hadamard(q))?;
    }
    s.apply(&Gate::PhasePoly { register: r, k0, x, length })?;
    Ok(s.into_amplitudes())
}

/// Joint state of transformed data and reference, swap test applied.
fn swap_test_state(psi: &[Complex64], n: usize, m: usize, k0: i64, x: f64, length: f64, backend: Backend) -> Result<StateVector> {
    let total = n + m + 1;
    if total > backend.max_qubits {
        return Err(FsrError::Capacity {
            requested: total,
            max: backend.max_qubits,
        });
    }
    let reference = Register::new(n, m);
    let anc = n + m;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << total];
    amps[..psi.len()].copy_from_slice(psi);
    let mut s = StateVector::from_amplitudes(amps)?.with_policy(backend.policy);
    for q in reference.qubits() {
        s.apply(&Gate::Hadamard(q))?;
    }
    if m > 0 {
        s.apply(&Gate::PhasePoly {
            register: reference,
            k0,
            x,
            length,
        })?;
    }
    s.apply(&Gate::Hadamard(anc))?;
    for q in 0..m {
        s.apply_controlled(Controls::on(anc), &Gate::Swap(q, n + q))?;
    }
    s.apply(&Gate::Hadamard(anc))?;
    Ok(s)
}

/// Probabilities of (accepted, top-register-zero but ancilla `1`, rejected).
fn outcome_classes(state: &StateVector, n: usize, m: usize) -> [f64; 3] {
    let anc = n + m;
    let top_mask = ((1usize << n) - 1) & !((1usize << m) - 1);
    let mut p = [0.0; 3];
    for (i, a) in state.amplitudes().iter().enumerate() {
        let class = if i & top_mask != 0 {
            2
        } else if i >> anc & 1 == 0 {
            0
        } else {
            1
        };
        p[class] += a.norm_sqr();
    }
    p
}

fn estimate(
    gf: &GridFunction,
    psi: &[Complex64],
    variant: Variant,
    x: f64,
    sampling: Sampling,
    backend: Backend,
) -> Result<OverlapEstimate> {
    let n = gf.qubits()[0];
    let length = gf.lengths()[0];
    let (m, k0) = match variant {
        Variant::Exact => (n, 0),
        Variant::Approx { m } => (m, (1i64 << m) / 2),
    };
    let state = swap_test_state(psi, n, m, k0, x, length, backend)?;
    let probs = outcome_classes(&state, n, m);
    let (p_acc, p_band) = match sampling {
        Sampling::Exact => (probs[0], probs[0] + probs[1]),
        Sampling::Shots { n_shot, seed } => {
            let hist = sample_multinomial(&probs, n_shot, seed);
            let f = |c: u64| if n_shot == 0 { 0.0 } else { c as f64 / n_shot as f64 };
            (f(hist.count(0)), f(hist.count(0) + hist.count(1)))
        }
    };
    let (overlap, c_m, clamped) = match sampling {
        // the probability identity loses tiny overlaps to cancellation in 2P − 1,
        // so exact mode reads the overlap off the simulated registers
        Sampling::Exact => {
            let phi = reference_state(m, k0, x, length, backend)?;
            let band = &psi[..1usize << m];
            let c = band.iter().map(|a| a.norm_sqr()).sum::<f64>();
            if c <= 0.0 {
                return Err(FsrError::NoMass);
            }
            let inner: Complex64 = phi.iter().zip(band).map(|(p, a)| p.conj() * a).sum();
            let c_m = matches!(variant, Variant::Approx { .. }).then_some(c);
            (inner.norm() / c.sqrt(), c_m, false)
        }
        Sampling::Shots { .. } => {
            let (c_m, ratio) = match variant {
                Variant::Exact => (None, p_acc),
                Variant::Approx { .. } => {
                    if p_band <= 0.0 {
                        return Err(FsrError::NoMass);
                    }
                    (Some(p_band), p_acc / p_band)
                }
            };
            let sq = 2.0 * ratio - 1.0;
            (sq.max(0.0).sqrt(), c_m, sq < 0.0)
        }
    };
    let a = gf.norm();
    let value = match c_m {
        None => a * overlap,
        Some(c) => a * ((1usize << m) as f64 * c).sqrt() / (gf.len() as f64).sqrt() * overlap,
    };
    Ok(OverlapEstimate {
        x,
        raw_p0: p_acc,
        overlap,
        c_m,
        value,
        clamped,
    })
}

/// Swap test against the full `N`-term reference state at `x ∈ [0, L]`.
pub fn fqfsr_exact(gf: &GridFunction, x: f64, sampling: Sampling, backend: Backend) -> Result<OverlapEstimate> {
    let psi = transformed(gf, Variant::Exact, backend)?;
    estimate(gf, &psi, Variant::Exact, x, sampling, backend)
}

/// Swap test against the `M = 2^m` term reference state centred on frequency 0.
pub fn fqfsr_approx(gf: &GridFunction, x: f64, m: usize, sampling: Sampling, backend: Backend) -> Result<OverlapEstimate> {
    let psi = transformed(gf, Variant::Approx { m }, backend)?;
    estimate(gf, &psi, Variant::Approx { m }, x, sampling, backend)
}

/// Estimates at every grid point of `gf`. Shot seeds are `seed + j` for point `j`.
pub fn fqfsr_grid(gf: &GridFunction, variant: Variant, sampling: Sampling, backend: Backend) -> Result<Vec<OverlapEstimate>> {
    let psi = transformed(gf, variant, backend)?;
    (0..gf.len())
        .map(|j| {
            let s = match sampling {
                Sampling::Exact => Sampling::Exact,
                Sampling::Shots { n_shot, seed } => Sampling::Shots {
                    n_shot,
                    seed: seed.wrapping_add(j as u64),
                },
            };
            estimate(gf, &psi, variant, gf.point(j)[0], s, backend)
        })
        .collect()
}

/// Grid estimates as a scored reconstruction.
pub fn fqfsr_reconstruction(gf: &GridFunction, variant: Variant, sampling: Sampling, backend: Backend) -> Result<Reconstruction> {
    let est = fqfsr_grid(gf, variant, sampling, backend)?;
    let method = match variant {
        Variant::Exact => Method::FqfsrExact,
        Variant::Approx { .. } => Method::FqfsrApprox,
    };
    let values = est.iter().map(|e| e.value).collect();
    Reconstruction::new(gf.points(), values, method).with_metrics(gf.samples(), gf.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::FunctionSpec;

    fn grid(expr: &str, n: usize) -> GridFunction {
        GridFunction::sample(&FunctionSpec::expression(expr, Some(1)).unwrap(), &[1.0], &[n]).unwrap()
    }

    #[test]
    fn exact_variant_reads_grid_values() {
        let g = grid("sin(5*x) - 0.3", 32);
        for j in [0, 3, 17, 31] {
            let e = fqfsr_exact(&g, g.point(j)[0], Sampling::Exact, Backend::default()).unwrap();
            assert!((e.value - g.samples()[j].abs()).abs() < 1e-10);
            assert!((e.raw_p0 - 0.5 * (1.0 + e.overlap * e.overlap)).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_reads_back_the_constant() {
        let g = grid("1.7", 16);
        let e = fqfsr_exact(&g, 0.41, Sampling::Exact, Backend::default()).unwrap();
        assert!((e.value - 1.7).abs() < 1e-10);
        assert!((e.overlap - 0.25).abs() < 1e-12);
    }

    #[test]
    fn shifted_amplitudes_follow_the_index_map() {
        let g = grid("exp(x) + x*x*x", 16);
        let plain = transformed(&g, Variant::Exact, Backend::default()).unwrap();
        let shifted = transformed(&g, Variant::Approx { m: 2 }, Backend::default()).unwrap();
        for k in 0..16 {
            let src = (k + 16 - 2) % 16;
            assert!((shifted[k] - plain[src]).norm() < 1e-14);
        }
        // real samples give conjugate-symmetric coefficients
        for k in 1..16 {
            assert!((plain[16 - k] - plain[k].conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn band_weight_grows_to_one() {
        let g = grid("exp(-4*(x-0.4)*(x-0.4))", 64);
        let mut last = 0.0;
        for m in 1..=6 {
            let e = fqfsr_approx(&g, 0.3, m, Sampling::Exact, Backend::default()).unwrap();
            let c = e.c_m.unwrap();
            assert!(c <= 1.0 + 1e-12 && c >= last - 1e-12);
            assert!((e.raw_p0 - 0.5 * c * (1.0 + e.overlap * e.overlap)).abs() < 1e-12);
            last = c;
        }
        assert!((last - 1.0).abs() < 1e-12);
    }

    #[test]
    fn full_band_matches_exact_variant() {
        let g = grid("x*(1-x) + 0.1", 32);
        for x in [0.0, 0.25, 0.5625] {
            let a = fqfsr_exact(&g, x, Sampling::Exact, Backend::default()).unwrap();
            let b = fqfsr_approx(&g, x, 5, Sampling::Exact, Backend::default()).unwrap();
            assert!((a.value - b.value).abs() < 1e-10);
            assert!((b.c_m.unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn shot_mode_is_seeded_and_flags_clamps() {
        let g = grid("x + 0.2", 16);
        let s = Sampling::Shots { n_shot: 2000, seed: 5 };
        let a = fqfsr_approx(&g, 0.5, 2, s, Backend::default()).unwrap();
        let b = fqfsr_approx(&g, 0.5, 2, s, Backend::default()).unwrap();
        assert_eq!(a, b);
        let z = fqfsr_exact(&g, 0.5, Sampling::Shots { n_shot: 0, seed: 1 }, Backend::default()).unwrap();
        assert!(z.clamped && z.value == 0.0);
        assert_eq!(
            fqfsr_approx(&g, 0.5, 2, Sampling::Shots { n_shot: 0, seed: 1 }, Backend::default()),
            Err(FsrError::NoMass)
        );
    }
}
