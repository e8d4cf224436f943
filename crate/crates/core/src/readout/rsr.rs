use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::circuits::{measure_postselected, Backend, Sampling};
use crate::encoding::GridFunction;
use crate::error::{domain_err, shape_err, Result};
use crate::sim::{normalized, Gate};

use super::types::{Method, Reconstruction};

/// Real-space readout: measure the encoded state directly and report
/// `A·√(count_j / n_shot)` at every grid point. Recovers magnitudes only.
pub fn rsr_readout(gf: &GridFunction, sampling: Sampling, backend: Backend) -> Result<Reconstruction> {
    let q: usize = gf.qubits().iter().sum();
    let mut s = backend.zero_state(q)?;
    s.apply(&Gate::Prepare {
        qubits: (0..q).collect(),
        amplitudes: Arc::new(normalized(gf.samples())?),
    })?;
    let all: Vec<usize> = (0..q).collect();
    let freq = measure_postselected(&s, &all, sampling).frequencies;
    let a = gf.norm();
    let values = freq.into_iter().map(|p| a * p.sqrt()).collect();
    Reconstruction::new(gf.points(), values, Method::Rsr).with_metrics(gf.samples(), gf.norm())
}

/// Low-pass filter of a 1D grid reconstruction: FFT, zero every bin with
/// `min(k, N−k) > cutoff`, inverse FFT, real part.
pub fn rsr_postprocess_values(values: &[f64], cutoff: usize) -> Result<Vec<f64>> {
    let n = values.len();
    if n == 0 {
        return shape_err("empty reconstruction");
    }
    if cutoff > n / 2 {
        return domain_err(format!("cutoff {cutoff} exceeds N/2 = {}", n / 2));
    }
    let mut planner = FftPlanner::<f64>::new();
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    for (k, b) in buf.iter_mut().enumerate() {
        if k.min(n - k) > cutoff {
            *b = Complex64::new(0.0, 0.0);
        }
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    Ok(buf.iter().map(|c| c.re / n as f64).collect())
}

/// [`rsr_postprocess_values`] applied to a grid reconstruction of `gf`.
pub fn rsr_postprocess(rec: &Reconstruction, gf: &GridFunction, cutoff: usize) -> Result<Reconstruction> {
    if gf.dims() != 1 || rec.values.len() != gf.len() {
        return shape_err("post-processing needs a full 1D grid reconstruction");
    }
    let values = rsr_postprocess_values(&rec.values, cutoff)?;
    Reconstruction::new(rec.points.clone(), values, Method::RsrPost).with_metrics(gf.samples(), gf.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::FunctionSpec;
    use std::f64::consts::PI;

    #[test]
    fn exact_rsr_is_abs() {
        let f = FunctionSpec::expression("sin(2*pi*x)", None).unwrap();
        let g = GridFunction::sample(&f, &[1.0], &[16]).unwrap();
        let r = rsr_readout(&g, Sampling::Exact, Backend::default()).unwrap();
        for (v, s) in r.values.iter().zip(g.samples()) {
            assert!((v - s.abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_shots_give_zero_values() {
        let g = GridFunction::sample(&FunctionSpec::f1(), &[1.0], &[16]).unwrap();
        let r = rsr_readout(&g, Sampling::Shots { n_shot: 0, seed: 1 }, Backend::default()).unwrap();
        assert!(r.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn postprocess_identity_and_band() {
        let v: Vec<f64> = (0..64).map(|j| ((j * j) as f64 * 0.37).sin()).collect();
        let id = rsr_postprocess_values(&v, 32).unwrap();
        assert!(v.iter().zip(&id).all(|(a, b)| (a - b).abs() < 1e-12));

        let c: Vec<f64> = (0..64).map(|j| (2.0 * PI * 5.0 * j as f64 / 64.0).cos()).collect();
        let out = rsr_postprocess_values(&c, 6).unwrap();
        assert!(c.iter().zip(&out).all(|(a, b)| (a - b).abs() < 1e-12));
        assert!(rsr_postprocess_values(&c, 33).is_err());
    }
}
