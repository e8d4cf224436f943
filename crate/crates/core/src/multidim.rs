//! Two-dimensional entry points of the Fourier-space readout.
//!
//! These are thin wrappers over the axis-generic pipeline in [`crate::readout`];
//! the qubit layout is described in [`crate::circuits`]. Coefficient tensors are
//! flat with the x index fastest: entry `(j₁, j₂)` sits at `j₁ + M₁·j₂`.

use crate::circuits::{self, Backend, Sampling};
use crate::encoding::GridFunction;
use crate::error::{shape_err, Result};
use crate::readout::{
    fsr_adaptive_nd, fsr_fixed_nd, fsr_signs_nd, reconstruct_nd, FourierReadout, FsrOptions,
    Method, Reconstruction,
};
use crate::sim::Parity;

/// Readout of a d-dimensional grid function; the same type as the 1D readout.
pub type MultiFourierReadout = FourierReadout;

fn check_2d(gf: &GridFunction) -> Result<()> {
    if gf.dims() != 2 {
        return shape_err(format!("expected a 2D grid function, got {} axes", gf.dims()));
    }
    Ok(())
}

/// `d_{j₁j₂}` over the low `m1` x-qubits and low `m2` y-qubits of the extended registers.
pub fn fsr_magnitudes_2d(
    gf: &GridFunction,
    m1: usize,
    m2: usize,
    sampling: Sampling,
    backend: Backend,
) -> Result<Vec<f64>> {
    check_2d(gf)?;
    circuits::magnitudes(gf, &[m1, m2], Parity::Even, sampling, backend)
}

/// `e_{j₁j₂} ≈ ½|c_{j₁j₂} + 2^{−(m1+m2)/2}|`, averaged over `n_iter` runs.
pub fn fsr_signs_2d(
    gf: &GridFunction,
    m1: usize,
    m2: usize,
    n_iter: usize,
    sampling: Sampling,
    backend: Backend,
) -> Result<(Vec<f64>, Option<u64>)> {
    check_2d(gf)?;
    fsr_signs_nd(gf, &[m1, m2], n_iter, sampling, backend)
}

pub fn fsr_fixed_2d(gf: &GridFunction, m1: usize, m2: usize, opts: &FsrOptions) -> Result<MultiFourierReadout> {
    check_2d(gf)?;
    fsr_fixed_nd(gf, &[m1, m2], opts)
}

/// Adaptive 2D pipeline; `M₁, M₂` come from the marginal maxima of the magnitude tensor.
pub fn fsr_adaptive_2d(gf: &GridFunction, margin: usize, opts: &FsrOptions) -> Result<MultiFourierReadout> {
    check_2d(gf)?;
    fsr_adaptive_nd(gf, margin, opts)
}

/// Two-sided complex series of `readout` at arbitrary points of `[0,L₁]×[0,L₂]`.
pub fn reconstruct_2d(
    readout: &MultiFourierReadout,
    norm: f64,
    sizes: [usize; 2],
    lengths: [f64; 2],
    points: &[Vec<f64>],
) -> Result<Reconstruction> {
    let values = reconstruct_nd(&readout.coeffs, &readout.shape, norm, &sizes, &lengths, points)?;
    Ok(Reconstruction::new(points.to_vec(), values, Method::Fsr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::FunctionSpec;
    use crate::readout::fsr_magnitudes;

    fn sample(expr: &str, sizes: [usize; 2]) -> GridFunction {
        let f = FunctionSpec::expression(expr, Some(2)).unwrap();
        GridFunction::sample(&f, &[1.0, 1.0], &sizes).unwrap()
    }

    #[test]
    fn separable_magnitudes_are_outer_products() {
        let g = sample("(1 + x*x) * (2 + cos(3*y))", [16, 8]);
        let gx = GridFunction::sample(&FunctionSpec::expression("1 + x*x", Some(1)).unwrap(), &[1.0], &[16]).unwrap();
        let gy = GridFunction::sample(&FunctionSpec::expression("2 + cos(3*x)", Some(1)).unwrap(), &[1.0], &[8]).unwrap();
        let d = fsr_magnitudes_2d(&g, 3, 2, Sampling::Exact, Backend::default()).unwrap();
        let dx = fsr_magnitudes(&gx, 3, Sampling::Exact, Backend::default()).unwrap();
        let dy = fsr_magnitudes(&gy, 2, Sampling::Exact, Backend::default()).unwrap();
        for j2 in 0..4 {
            for j1 in 0..8 {
                assert!((d[j1 + 8 * j2] - dx[j1] * dy[j2]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_has_single_coefficient() {
        let g = sample("3", [8, 8]);
        let d = fsr_magnitudes_2d(&g, 2, 2, Sampling::Exact, Backend::default()).unwrap();
        assert!((d[0] - 1.0).abs() < 1e-12);
        assert!(d[1..].iter().all(|v| v.abs() < 1e-12));
        let (e, _) = fsr_signs_2d(&g, 1, 1, 1, Sampling::Exact, Backend::default()).unwrap();
        assert!((e[0] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn constant_reconstructs_everywhere() {
        let g = sample("0.7", [8, 8]);
        let r = fsr_fixed_2d(&g, 2, 2, &FsrOptions::exact()).unwrap();
        let pts: Vec<Vec<f64>> = (0..7).map(|i| vec![i as f64 / 6.0, 1.0 - i as f64 / 7.0]).collect();
        let rec = reconstruct_2d(&r, g.norm(), [8, 8], [1.0, 1.0], &pts).unwrap();
        assert!(rec.values.iter().all(|v| (v - 0.7).abs() < 1e-10));
    }

    #[test]
    fn adaptive_constant_is_one_by_one() {
        let g = sample("2", [16, 16]);
        let r = fsr_adaptive_2d(&g, 4, &FsrOptions::exact()).unwrap();
        assert_eq!(r.ms, vec![1, 1]);
    }

    #[test]
    fn rejects_1d_input() {
        let g = GridFunction::sample(&FunctionSpec::f1(), &[1.0], &[16]).unwrap();
        assert!(fsr_magnitudes_2d(&g, 1, 1, Sampling::Exact, Backend::default()).is_err());
    }
}
