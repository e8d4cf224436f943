use super::function::FunctionSpec;
use crate::error::{shape_err, FsrError, Result};

/// Real samples `f(x_j)`, `x_j = j·L/N`, on a uniform grid that excludes the
/// right endpoint. Multi-dimensional grids are stored with axis 0 fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    sizes: Vec<usize>,
    lengths: Vec<f64>,
    samples: Vec<f64>,
    norm: f64,
    boundary_warning: bool,
}

impl GridFunction {
    /// Samples `spec` with `sizes[ℓ]` points over `[0, lengths[ℓ])` per axis.
    pub fn sample(spec: &FunctionSpec, lengths: &[f64], sizes: &[usize]) -> Result<Self> {
        if lengths.len() != spec.dims() || sizes.len() != spec.dims() {
            return shape_err(format!(
                "{}-dimensional function sampled with {} lengths and {} sizes",
                spec.dims(),
                lengths.len(),
                sizes.len()
            ));
        }
        check_axes(lengths, sizes)?;
        let total: usize = sizes.iter().product();
        let mut point = vec![0.0; sizes.len()];
        let samples = (0..total)
            .map(|idx| {
                let mut rest = idx;
                for (ax, (&n, &l)) in sizes.iter().zip(lengths).enumerate() {
                    point[ax] = grid_coordinate(rest % n, n, l);
                    rest /= n;
                }
                spec.value(&point)
            })
            .collect();
        Self::from_samples(samples, sizes, lengths)
    }

    pub fn from_samples(samples: Vec<f64>, sizes: &[usize], lengths: &[f64]) -> Result<Self> {
        if sizes.is_empty() || sizes.len() != lengths.len() {
            return shape_err("sizes and lengths must be non-empty and of equal length");
        }
        check_axes(lengths, sizes)?;
        if samples.len() != sizes.iter().product::<usize>() {
            return shape_err(format!(
                "{} samples for a grid of shape {sizes:?}",
                samples.len()
            ));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(FsrError::Domain("non-finite sample".into()));
        }
        let norm = samples.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut g = GridFunction {
            sizes: sizes.to_vec(),
            lengths: lengths.to_vec(),
            samples,
            norm,
            boundary_warning: false,
        };
        g.boundary_warning = g.boundary_mismatch();
        if g.boundary_warning {
            log::warn!(
                "samples differ noticeably between the first and last grid point; \
                 the symmetric extension assumes f(0) = f(L)"
            );
        }
        Ok(g)
    }

    /// `f(x₀)` vs `f(x_{N−1})` along each axis against `10·(L/N)·max|f|`.
    fn boundary_mismatch(&self) -> bool {
        let max_abs = self.samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut stride = 1;
        for (&n, &l) in self.sizes.iter().zip(&self.lengths) {
            let tol = 10.0 * (l / n as f64) * max_abs;
            let span = stride * n;
            for base in 0..self.samples.len() {
                if (base / stride) % n != 0 {
                    continue;
                }
                let first = self.samples[base];
                let last = self.samples[base + (n - 1) * stride];
                if (first - last).abs() > tol {
                    return true;
                }
            }
            stride = span;
        }
        false
    }

    pub fn dims(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    /// Qubits per axis, `log2(N_ℓ)`.
    pub fn qubits(&self) -> Vec<usize> {
        self.sizes.iter().map(|n| n.trailing_zeros() as usize).collect()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// The normalization factor `A = ‖samples‖₂`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn boundary_warning(&self) -> bool {
        self.boundary_warning
    }

    /// Coordinates of flat sample index `idx`.
    pub fn point(&self, idx: usize) -> Vec<f64> {
        let mut rest = idx;
        self.sizes
            .iter()
            .zip(&self.lengths)
            .map(|(&n, &l)| {
                let c = grid_coordinate(rest % n, n, l);
                rest /= n;
                c
            })
            .collect()
    }

    /// All grid points in storage order.
    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// `α·f` on the same grid.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        Self::from_samples(
            self.samples.iter().map(|v| alpha * v).collect(),
            &self.sizes,
            &self.lengths,
        )
    }
}

/// `j·L/N`.
#[inline]
pub fn grid_coordinate(j: usize, n: usize, length: f64) -> f64 {
    j as f64 * length / n as f64
}

fn check_axes(lengths: &[f64], sizes: &[usize]) -> Result<()> {
    for (&n, &l) in sizes.iter().zip(lengths) {
        if n < 2 || !n.is_power_of_two() {
            return shape_err(format!("grid size {n} is not a power of two ≥ 2"));
        }
        if !(l > 0.0) || !l.is_finite() {
            return Err(FsrError::Domain(format!("domain length {l} must be positive")));
        }
    }
    Ok(())
}
