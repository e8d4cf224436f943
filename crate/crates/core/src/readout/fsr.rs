use crate::circuits::{self, Backend, SignForm, Sampling};
use crate::encoding::GridFunction;
use crate::error::{domain_err, shape_err, Result};
use crate::sim::{derive_seed, Parity};

use super::reconstruct::{reconstruct_1d, reconstruct_grid, reconstruct_nd};
use super::types::{FourierReadout, Method, Reconstruction};

/// Sign threshold used in exact mode, where `e` and `d` carry no shot noise.
pub const EXACT_DELTA: f64 = 1e-12;

/// Knobs of the magnitude + sign pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FsrOptions {
    /// Use exact outcome probabilities instead of shots.
    pub exact: bool,
    pub n_shot1: u64,
    pub n_shot2: u64,
    pub n_iter: usize,
    pub seed: u64,
    /// Fixed threshold; otherwise `delta_factor / √N_sum`.
    pub delta: Option<f64>,
    pub delta_factor: f64,
    pub sign_form: SignForm,
    pub backend: Backend,
}

impl Default for FsrOptions {
    fn default() -> Self {
        FsrOptions {
            exact: false,
            n_shot1: 10_000,
            n_shot2: 10_000,
            n_iter: 1,
            seed: 0,
            delta: None,
            delta_factor: 2.0,
            sign_form: SignForm::default(),
            backend: Backend::default(),
        }
    }
}

impl FsrOptions {
    pub fn exact() -> Self {
        FsrOptions {
            exact: true,
            ..Default::default()
        }
    }

    /// Equal budgets for both circuits.
    pub fn shots(n_shot: u64, seed: u64) -> Self {
        FsrOptions {
            n_shot1: n_shot,
            n_shot2: n_shot,
            seed,
            ..Default::default()
        }
    }

    fn magnitude_sampling(&self) -> Sampling {
        if self.exact {
            Sampling::Exact
        } else {
            Sampling::Shots {
                n_shot: self.n_shot1,
                seed: derive_seed(self.seed, 0),
            }
        }
    }

    fn sign_sampling(&self, iteration: usize) -> Sampling {
        if self.exact {
            Sampling::Exact
        } else {
            Sampling::Shots {
                n_shot: self.n_shot2,
                seed: derive_seed(self.seed, 1 + iteration as u64),
            }
        }
    }
}

/// Circuit widths and stored coefficient counts for per-axis truncations.
///
/// `M < N` keeps the low `log2 M` qubits of the extended register; `M = N`
/// keeps the whole register and stores `N + 1` coefficients.
fn plan(gf: &GridFunction, ms: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    if ms.len() != gf.dims() {
        return shape_err(format!("{} truncations for {} axes", ms.len(), gf.dims()));
    }
    let mut widths = Vec::new();
    let mut counts = Vec::new();
    for (&m, &n) in ms.iter().zip(gf.sizes()) {
        if m == 0 || !m.is_power_of_two() || m > n {
            return domain_err(format!("truncation M = {m} must be a power of two in [1, {n}]"));
        }
        if m == n {
            widths.push(n.trailing_zeros() as usize + 1);
            counts.push(n + 1);
        } else {
            widths.push(m.trailing_zeros() as usize);
            counts.push(m);
        }
    }
    Ok((widths, counts))
}

/// Sub-tensor with extents `to` of a tensor with extents `from` (axis 0 fastest).
fn restrict(data: &[f64], from: &[usize], to: &[usize]) -> Vec<f64> {
    let total: usize = to.iter().product();
    (0..total)
        .map(|flat| {
            let mut rest = flat;
            let mut src = 0;
            let mut stride = 1;
            for (&t, &f) in to.iter().zip(from) {
                src += (rest % t) * stride;
                rest /= t;
                stride *= f;
            }
            data[src]
        })
        .collect()
}

/// `d_j = √(count_j / n_shot1)` from the magnitude circuit keeping the low `m`
/// qubits of the extended register (`m ≤ n + 1`).
pub fn fsr_magnitudes(gf: &GridFunction, m: usize, sampling: Sampling, backend: Backend) -> Result<Vec<f64>> {
    circuits::magnitudes(gf, &[m], Parity::Even, sampling, backend)
}

/// `e_j` from the sign circuit keeping the low `m` qubits, averaged over
/// `n_iter` runs with seeds derived from `seed`; `N_sum` is from the last run.
pub fn fsr_signs(
    gf: &GridFunction,
    m: usize,
    n_iter: usize,
    sampling: Sampling,
    backend: Backend,
) -> Result<(Vec<f64>, Option<u64>)> {
    fsr_signs_nd(gf, &[m], n_iter, sampling, backend)
}

/// [`fsr_signs`] keeping the low `widths[ℓ]` qubits of each axis.
pub fn fsr_signs_nd(
    gf: &GridFunction,
    widths: &[usize],
    n_iter: usize,
    sampling: Sampling,
    backend: Backend,
) -> Result<(Vec<f64>, Option<u64>)> {
    shifted_average(gf, widths, n_iter, SignForm::default(), backend, |i| match sampling {
        Sampling::Exact => Sampling::Exact,
        Sampling::Shots { n_shot, seed } => Sampling::Shots {
            n_shot,
            seed: if i == 0 { seed } else { derive_seed(seed, i as u64) },
        },
    })
}

fn shifted_average<F>(
    gf: &GridFunction,
    widths: &[usize],
    n_iter: usize,
    form: SignForm,
    backend: Backend,
    sampling: F,
) -> Result<(Vec<f64>, Option<u64>)>
where
    F: Fn(usize) -> Sampling,
{
    let n_iter = n_iter.max(1);
    let mut acc: Option<Vec<f64>> = None;
    let mut n_sum = None;
    for i in 0..n_iter {
        let (e, ns) = circuits::shifted_magnitudes(gf, widths, Parity::Even, form, sampling(i), backend)?;
        n_sum = ns;
        match acc.as_mut() {
            None => acc = Some(e),
            Some(a) => a.iter_mut().zip(&e).for_each(|(x, y)| *x += y),
        }
    }
    let mut e = acc.unwrap_or_default();
    e.iter_mut().for_each(|v| *v /= n_iter as f64);
    Ok((e, n_sum))
}

/// Result of the sign rule.
#[derive(Debug, Clone, PartialEq)]
pub struct SignResolution {
    pub g: Vec<f64>,
    pub signs: Vec<i8>,
    pub coeffs: Vec<f64>,
}

/// `g = 2e − d − 1/√M`; the sign is `+` iff `g > −δ`.
///
/// `m` is the size of the uniform superposition added by the sign circuit.
pub fn resolve_signs(d: &[f64], e: &[f64], m: usize, delta: f64) -> Result<SignResolution> {
    if d.len() != e.len() {
        return shape_err(format!("{} magnitudes against {} shifted magnitudes", d.len(), e.len()));
    }
    let shift = 1.0 / (m as f64).sqrt();
    let g: Vec<f64> = e.iter().zip(d).map(|(e, d)| 2.0 * e - d - shift).collect();
    let signs: Vec<i8> = g.iter().map(|&g| if g > -delta { 1 } else { -1 }).collect();
    let coeffs = d.iter().zip(&signs).map(|(d, &s)| s as f64 * d).collect();
    Ok(SignResolution { g, signs, coeffs })
}

fn choose_delta(opts: &FsrOptions, n_sum: Option<u64>) -> f64 {
    if let Some(d) = opts.delta {
        return d;
    }
    match n_sum {
        None => EXACT_DELTA,
        Some(0) => {
            log::warn!("sign circuit retained no shots; every coefficient is taken as positive");
            f64::INFINITY
        }
        Some(n) => opts.delta_factor / (n as f64).sqrt(),
    }
}

fn assemble(
    gf: &GridFunction,
    ms: &[usize],
    widths: &[usize],
    counts: &[usize],
    d: Vec<f64>,
    opts: &FsrOptions,
) -> Result<FourierReadout> {
    let kept: Vec<usize> = widths.iter().map(|&w| 1usize << w).collect();
    let (e_full, n_sum) = shifted_average(gf, widths, opts.n_iter, opts.sign_form, opts.backend, |i| {
        opts.sign_sampling(i)
    })?;
    let e = restrict(&e_full, &kept, counts);
    let lcu_size: usize = kept.iter().product();
    let delta = choose_delta(opts, n_sum);
    let r = resolve_signs(&d, &e, lcu_size, delta)?;
    Ok(FourierReadout {
        ms: ms.to_vec(),
        shape: counts.to_vec(),
        d,
        e,
        g: r.g,
        signs: r.signs,
        coeffs: r.coeffs,
        shift: 1.0 / (lcu_size as f64).sqrt(),
        delta,
        n_sum,
        n_shot1: (!opts.exact).then_some(opts.n_shot1),
        n_shot2: (!opts.exact).then_some(opts.n_shot2),
        n_iter: opts.n_iter.max(1),
    })
}

/// Fixed-truncation pipeline with `M_ℓ` per axis.
pub fn fsr_fixed_nd(gf: &GridFunction, ms: &[usize], opts: &FsrOptions) -> Result<FourierReadout> {
    let (widths, counts) = plan(gf, ms)?;
    let kept: Vec<usize> = widths.iter().map(|&w| 1usize << w).collect();
    let d_full = circuits::magnitudes(gf, &widths, Parity::Even, opts.magnitude_sampling(), opts.backend)?;
    let d = restrict(&d_full, &kept, &counts);
    assemble(gf, ms, &widths, &counts, d, opts)
}

/// Fixed-truncation pipeline in 1D.
pub fn fsr_fixed(gf: &GridFunction, m: usize, opts: &FsrOptions) -> Result<FourierReadout> {
    fsr_fixed_nd(gf, &[m], opts)
}

/// Truncation from magnitude estimates over indices `0..N`: with `K₀` the
/// largest index with `d_k ≠ 0`, `M = 2^⌈log₂(K₀+1)⌉` clamped to `[1, N]`.
///
/// With `margin > 0` an index only counts if another nonzero index lies
/// within `margin` of it; if no index qualifies the first nonzero one is used.
pub fn adaptive_m(d_full: &[f64], n: usize, margin: usize) -> usize {
    let nonzero: Vec<usize> = d_full
        .iter()
        .take(n)
        .enumerate()
        .filter(|(_, &v)| v > EXACT_DELTA)
        .map(|(k, _)| k)
        .collect();
    let Some(&first) = nonzero.first() else {
        log::warn!("all magnitude estimates are zero; falling back to M = 1");
        return 1;
    };
    let k0 = if margin == 0 {
        *nonzero.last().unwrap()
    } else {
        let supported = |i: usize| {
            let k = nonzero[i];
            (i > 0 && k - nonzero[i - 1] <= margin)
                || (i + 1 < nonzero.len() && nonzero[i + 1] - k <= margin)
        };
        (0..nonzero.len())
            .rev()
            .find(|&i| supported(i))
            .map_or(first, |i| nonzero[i])
    };
    (k0 + 1).next_power_of_two().clamp(1, n.max(1))
}

/// Per-axis adaptive truncation from a magnitude tensor with extents `sizes`:
/// the 1D rule applied to the maxima over all other axes.
pub fn adaptive_ms(d_full: &[f64], sizes: &[usize], margin: usize) -> Vec<usize> {
    (0..sizes.len())
        .map(|axis| {
            let stride: usize = sizes[..axis].iter().product();
            let mut marginal = vec![0.0f64; sizes[axis]];
            for (flat, &v) in d_full.iter().enumerate() {
                let j = (flat / stride) % sizes[axis];
                marginal[j] = marginal[j].max(v);
            }
            adaptive_m(&marginal, sizes[axis], margin)
        })
        .collect()
}

/// Adaptive pipeline: one full-resolution magnitude run, per-axis truncation
/// from it, then the sign circuit at that truncation. Uses `n_shot1` for the
/// magnitude circuit and `n_shot2` for the sign circuit.
pub fn fsr_adaptive_nd(gf: &GridFunction, margin: usize, opts: &FsrOptions) -> Result<FourierReadout> {
    let full_widths: Vec<usize> = gf.qubits().iter().map(|n| n + 1).collect();
    let full_extent: Vec<usize> = gf.sizes().iter().map(|n| 2 * n).collect();
    let d_ext = circuits::magnitudes(gf, &full_widths, Parity::Even, opts.magnitude_sampling(), opts.backend)?;
    let d_half = restrict(&d_ext, &full_extent, gf.sizes());
    let ms = adaptive_ms(&d_half, gf.sizes(), margin);
    let (widths, counts) = plan(gf, &ms)?;
    let d = restrict(&d_ext, &full_extent, &counts);
    assemble(gf, &ms, &widths, &counts, d, opts)
}

/// Adaptive pipeline in 1D.
pub fn fsr_adaptive(gf: &GridFunction, margin: usize, opts: &FsrOptions) -> Result<FourierReadout> {
    fsr_adaptive_nd(gf, margin, opts)
}

impl FourierReadout {
    /// Evaluates the reconstructed function of `gf`'s shape at arbitrary points.
    pub fn evaluate(&self, gf: &GridFunction, points: &[Vec<f64>]) -> Result<Vec<f64>> {
        if gf.dims() == 1 {
            let xs: Vec<f64> = points.iter().map(|p| p[0]).collect();
            reconstruct_1d(&self.coeffs, gf.norm(), gf.sizes()[0], gf.lengths()[0], &xs)
        } else {
            reconstruct_nd(&self.coeffs, &self.shape, gf.norm(), gf.sizes(), gf.lengths(), points)
        }
    }

    /// Reconstruction at the grid points of `gf`, in sample order.
    pub fn evaluate_grid(&self, gf: &GridFunction) -> Result<Vec<f64>> {
        let axes: Vec<Vec<f64>> = gf
            .sizes()
            .iter()
            .zip(gf.lengths())
            .map(|(&n, &l)| (0..n).map(|j| crate::encoding::grid_coordinate(j, n, l)).collect())
            .collect();
        reconstruct_grid(&self.coeffs, &self.shape, gf.norm(), gf.sizes(), gf.lengths(), &axes)
    }

    /// Grid reconstruction scored against the samples of `gf`.
    pub fn reconstruction(&self, gf: &GridFunction, method: Method) -> Result<Reconstruction> {
        let values = self.evaluate_grid(gf)?;
        Reconstruction::new(gf.points(), values, method).with_metrics(gf.samples(), gf.norm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adaptive_rule_examples() {
        let mut d = vec![0.0; 256];
        for k in [0, 1, 2, 5] {
            d[k] = 0.1;
        }
        assert_eq!(adaptive_m(&d, 256, 0), 8);

        let mut d = vec![0.0; 256];
        for k in [0, 1, 2, 3, 200] {
            d[k] = 0.1;
        }
        assert_eq!(adaptive_m(&d, 256, 4), 4);
        assert_eq!(adaptive_m(&d, 256, 0), 256);

        let mut d = vec![0.0; 16];
        d[0] = 1.0;
        assert_eq!(adaptive_m(&d, 16, 0), 1);
        assert_eq!(adaptive_m(&d, 16, 4), 1);
        assert_eq!(adaptive_m(&[0.0; 16], 16, 0), 1);
        let full = vec![0.5; 16];
        assert_eq!(adaptive_m(&full, 16, 2), 16);
    }

    #[test]
    fn sign_rule_cases() {
        // c = +0.3, M = 4
        let r = resolve_signs(&[0.3], &[0.5 * (0.3 + 0.5)], 4, 1e-12).unwrap();
        assert!(r.g[0].abs() < 1e-15 && r.signs[0] == 1);
        // c = −0.2
        let r = resolve_signs(&[0.2], &[0.5 * (0.5f64 - 0.2).abs()], 4, 0.39).unwrap();
        assert!((r.g[0] + 0.4).abs() < 1e-15 && r.signs[0] == -1);
        // c = −0.6
        let r = resolve_signs(&[0.6], &[0.5 * (0.5f64 - 0.6).abs()], 4, 0.1).unwrap();
        assert!((r.g[0] + 1.0).abs() < 1e-15 && r.signs[0] == -1);
        // equality is minus
        let r = resolve_signs(&[0.2], &[0.15], 4, 0.4).unwrap();
        assert_eq!(r.g[0], -0.4);
        assert_eq!(r.signs[0], -1);
    }

    #[test]
    fn restrict_picks_leading_block() {
        let data: Vec<f64> = (0..12).map(|v| v as f64).collect();
        assert_eq!(restrict(&data, &[4, 3], &[2, 2]), vec![0.0, 1.0, 4.0, 5.0]);
    }
}
