use std::f64::consts::PI;

use num_complex::Complex64;

use crate::encoding::FunctionSpec;
use crate::error::{shape_err, FsrError, Result};
use crate::sim::{extend_samples, Parity};

/// The three coefficient families of a sampled function on `K` grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    /// `c_{k,q} = (1/(√K A)) Σ_j f_j exp(−i2πkj/K)`, amplitudes after the inverse QFT.
    pub quantum: Vec<Complex64>,
    /// `c_{k,d} = (1/K) Σ_j f_j exp(−i2πkj/K)`.
    pub discrete: Vec<Complex64>,
    /// `c_{k,c} = (1/L) ∫₀ᴸ f(x) exp(−i2πkx/L) dx` for `k < K`, when computed.
    pub continuous: Option<Vec<Complex64>>,
    /// Change of the continuous coefficients when the quadrature step is doubled.
    pub richardson_delta: Option<f64>,
    pub k: usize,
    pub length: f64,
    pub norm: f64,
}

/// Direct `O(K²)` DFT of `samples`; independent of any fast transform.
pub fn dft_oracle(samples: &[f64], norm: f64, length: f64) -> Result<CoefficientSet> {
    let k = samples.len();
    if k == 0 || !k.is_power_of_two() {
        return shape_err(format!("{k} samples is not a power of two"));
    }
    if !(norm > 0.0) {
        return Err(FsrError::Normalization);
    }
    let discrete: Vec<Complex64> = (0..k)
        .map(|kk| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &f) in samples.iter().enumerate() {
                // reduce kj mod K first so the phase stays accurate for large K
                let ang = -2.0 * PI * ((kk * j) % k) as f64 / k as f64;
                acc += Complex64::from_polar(f, ang);
            }
            acc / k as f64
        })
        .collect();
    let scale = (k as f64).sqrt() / norm;
    let quantum = discrete.iter().map(|c| c * scale).collect();
    Ok(CoefficientSet {
        quantum,
        discrete,
        continuous: None,
        richardson_delta: None,
        k,
        length,
        norm,
    })
}

impl CoefficientSet {
    /// Adds quadrature values of the continuous coefficients of `spec` (1D)
    /// for `k = 0..count`.
    pub fn with_continuous(mut self, spec: &FunctionSpec, count: usize) -> Result<Self> {
        let n_quad = (8 * self.k).max(1 << 16);
        let fine = continuous_coefficients(|x| spec.value(&[x]), self.length, count, n_quad)?;
        let coarse = continuous_coefficients(|x| spec.value(&[x]), self.length, count, n_quad / 2)?;
        let delta = fine
            .iter()
            .zip(&coarse)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        self.continuous = Some(fine);
        self.richardson_delta = Some(delta);
        Ok(self)
    }
}

/// Composite trapezoid rule for `(1/L) ∫₀ᴸ f(x) exp(−i2πkx/L) dx`, `k < count`,
/// on `n_quad` periodic panels.
pub fn continuous_coefficients<F>(f: F, length: f64, count: usize, n_quad: usize) -> Result<Vec<Complex64>>
where
    F: Fn(f64) -> f64,
{
    if n_quad < 2 || !(length > 0.0) {
        return Err(FsrError::Domain("quadrature needs n ≥ 2 and L > 0".into()));
    }
    let h = length / n_quad as f64;
    // periodic trapezoid: the endpoint average replaces f(0)
    let vals: Vec<f64> = (0..n_quad)
        .map(|i| {
            if i == 0 {
                0.5 * (f(0.0) + f(length))
            } else {
                f(i as f64 * h)
            }
        })
        .collect();
    Ok((0..count)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, &v) in vals.iter().enumerate() {
                let ang = -2.0 * PI * ((k * i) % n_quad) as f64 / n_quad as f64;
                acc += Complex64::from_polar(v, ang);
            }
            acc / n_quad as f64
        })
        .collect())
}

/// Real parts of the quantum coefficients of the evenly extended samples,
/// i.e. the exact `c̃_k` for `k < 2N`.
pub fn extended_coefficients(samples: &[f64], parity: Parity) -> Result<Vec<f64>> {
    let ext = extend_samples(samples, parity);
    let norm = ext.iter().map(|v| v * v).sum::<f64>().sqrt();
    let set = dft_oracle(&ext, norm, 2.0)?;
    Ok(set
        .quantum
        .iter()
        .map(|c| match parity {
            Parity::Even => c.re,
            // odd extension carries the factor i, which makes i·c real
            Parity::Odd => -c.im,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_cosine() {
        let c = dft_oracle(&[2.0; 8], (8.0f64 * 4.0).sqrt(), 1.0).unwrap();
        assert!((c.quantum[0].re - 1.0).abs() < 1e-14);
        assert!(c.quantum[1..].iter().all(|v| v.norm() < 1e-14));

        let cosine: Vec<f64> = (0..8).map(|j| (2.0 * PI * j as f64 / 8.0).cos()).collect();
        let c = dft_oracle(&cosine, 2.0, 1.0).unwrap();
        for (k, v) in c.discrete.iter().enumerate() {
            let want = if k == 1 || k == 7 { 0.5 } else { 0.0 };
            assert!((v - Complex64::new(want, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn families_are_consistent() {
        let f: Vec<f64> = (0..32).map(|j| ((j as f64) * 0.3).sin() + 0.2).collect();
        let a = f.iter().map(|v| v * v).sum::<f64>().sqrt();
        let c = dft_oracle(&f, a, 1.0).unwrap();
        let p: f64 = c.quantum.iter().map(|v| v.norm_sqr()).sum();
        assert!((p - 1.0).abs() < 1e-12);
        for k in 1..32 {
            assert!((c.discrete[k] - c.discrete[32 - k].conj()).norm() < 1e-12);
            assert!((c.discrete[k] - c.quantum[k] * (a / 32f64.sqrt())).norm() < 1e-14);
        }
    }

    #[test]
    fn quadratic_continuous_coefficients() {
        let spec = FunctionSpec::f1();
        let samples: Vec<f64> = (0..64).map(|j| spec.value(&[j as f64 / 64.0])).collect();
        let a = samples.iter().map(|v| v * v).sum::<f64>().sqrt();
        let c = dft_oracle(&samples, a, 1.0)
            .unwrap()
            .with_continuous(&spec, 16)
            .unwrap();
        let cont = c.continuous.unwrap();
        assert!((cont[0].re - 1.0 / 12.0).abs() < 1e-9);
        for k in 1..16 {
            let exact = 1.0 / (2.0 * PI * PI * (k * k) as f64);
            assert!((cont[k].re - exact).abs() < 1e-9, "k={k}");
        }
        assert!(c.richardson_delta.unwrap() < 1e-9);
    }
}
