use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{shape_err, FsrError, Result};
use crate::exec::{self, ExecPolicy};

/// Weight of coefficient `k` in the cosine series: 1 for `k = 0` and for the
/// Nyquist index `k = N`, 2 otherwise.
#[inline]
fn cos_weight(k: usize, n: usize) -> f64 {
    if k == 0 || k == n {
        1.0
    } else {
        2.0
    }
}

/// `f(x) ≈ (A/√N)(c₀ + 2 Σ_{k=1}^{M−1} c_k cos(kπx/L))`.
///
/// `coeffs` holds `c_0, …, c_{M−1}`; a vector of length `N + 1` additionally
/// carries the Nyquist coefficient `c_N`, which enters with weight 1.
pub fn reconstruct_1d(coeffs: &[f64], norm: f64, n: usize, length: f64, points: &[f64]) -> Result<Vec<f64>> {
    if coeffs.len() > n + 1 {
        return shape_err(format!("{} coefficients for N = {n}", coeffs.len()));
    }
    if let Some(x) = points.iter().find(|x| !(0.0..=length).contains(*x)) {
        return Err(FsrError::Domain(format!("point {x} outside [0, {length}]")));
    }
    let pre = norm / (n as f64).sqrt();
    Ok(exec::map_range(ExecPolicy::default(), points.len(), |i| {
        let theta = PI * points[i] / length;
        let s: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| cos_weight(k, n) * c * (k as f64 * theta).cos())
            .sum();
        pre * s
    }))
}

/// Per-axis index list `(j, |j|, weight)` of the two-sided sum for `count`
/// stored coefficients; a Nyquist entry is split evenly over `±N`.
fn signed_indices(count: usize, n: usize) -> Vec<(i64, usize, f64)> {
    let mut out = Vec::with_capacity(2 * count);
    for k in 0..count {
        if k == 0 {
            out.push((0, 0, 1.0));
        } else if k == n {
            out.push((k as i64, k, 0.5));
            out.push((-(k as i64), k, 0.5));
        } else {
            out.push((k as i64, k, 1.0));
            out.push((-(k as i64), k, 1.0));
        }
    }
    out
}

fn check_shape(coeffs_len: usize, shape: &[usize], sizes: &[usize], lengths: &[f64]) -> Result<()> {
    if shape.len() != sizes.len() || shape.len() != lengths.len() {
        return shape_err("shape, sizes and lengths must have one entry per axis");
    }
    if coeffs_len != shape.iter().product::<usize>() {
        return shape_err(format!("{coeffs_len} coefficients for shape {shape:?}"));
    }
    if shape.iter().zip(sizes).any(|(&k, &n)| k == 0 || k > n + 1) {
        return shape_err(format!("coefficient shape {shape:?} exceeds grid {sizes:?}"));
    }
    Ok(())
}

/// Largest imaginary part tolerated in the two-sided sum before it is
/// declared inconsistent with a real function.
pub const IMAG_RESIDUE_TOL: f64 = 1e-9;

/// Multi-dimensional two-sided Fourier sum
/// `(A/√ΠN) Σ_J c_J exp(iπ Σ_ℓ j_ℓ x_ℓ / L_ℓ)` over `|j_ℓ| < M_ℓ`, where a
/// coefficient with an odd number of negative indices is the conjugate of the
/// stored one. `coeffs` is indexed with axis 0 fastest.
pub fn reconstruct_nd_complex(
    coeffs: &[Complex64],
    shape: &[usize],
    norm: f64,
    sizes: &[usize],
    lengths: &[f64],
    points: &[Vec<f64>],
) -> Result<Vec<f64>> {
    check_shape(coeffs.len(), shape, sizes, lengths)?;
    for p in points {
        if p.len() != shape.len() || p.iter().zip(lengths).any(|(x, l)| !(0.0..=*l).contains(x)) {
            return Err(FsrError::Domain(format!("point {p:?} outside the domain")));
        }
    }
    let axes: Vec<Vec<(i64, usize, f64)>> = shape
        .iter()
        .zip(sizes)
        .map(|(&k, &n)| signed_indices(k, n))
        .collect();
    let strides: Vec<usize> = shape
        .iter()
        .scan(1, |s, &k| {
            let cur = *s;
            *s *= k;
            Some(cur)
        })
        .collect();
    let pre = norm / (sizes.iter().product::<usize>() as f64).sqrt();

    let results = exec::map_range(ExecPolicy::default(), points.len(), |pi| {
        let p = &points[pi];
        let tables: Vec<Vec<Complex64>> = axes
            .iter()
            .enumerate()
            .map(|(a, list)| {
                list.iter()
                    .map(|&(j, _, w)| Complex64::from_polar(w, PI * j as f64 * p[a] / lengths[a]))
                    .collect()
            })
            .collect();
        let mut idx = vec![0usize; axes.len()];
        let mut acc = Complex64::new(0.0, 0.0);
        loop {
            let mut flat = 0;
            let mut negatives = 0;
            let mut phase = Complex64::new(1.0, 0.0);
            for a in 0..axes.len() {
                let (j, abs, _) = axes[a][idx[a]];
                flat += abs * strides[a];
                negatives += (j < 0) as usize;
                phase *= tables[a][idx[a]];
            }
            let c = coeffs[flat];
            acc += if negatives % 2 == 1 { c.conj() } else { c } * phase;
            // odometer over the per-axis lists
            let mut a = 0;
            while a < axes.len() {
                idx[a] += 1;
                if idx[a] < axes[a].len() {
                    break;
                }
                idx[a] = 0;
                a += 1;
            }
            if a == axes.len() {
                break;
            }
        }
        acc * pre
    });
    let worst = results.iter().fold(0.0f64, |m, v| m.max(v.im.abs()));
    if worst > IMAG_RESIDUE_TOL {
        return Err(FsrError::Domain(format!(
            "reconstruction has imaginary residue {worst:e}"
        )));
    }
    Ok(results.into_iter().map(|v| v.re).collect())
}

/// [`reconstruct_nd_complex`] for real coefficients.
pub fn reconstruct_nd(
    coeffs: &[f64],
    shape: &[usize],
    norm: f64,
    sizes: &[usize],
    lengths: &[f64],
    points: &[Vec<f64>],
) -> Result<Vec<f64>> {
    let c: Vec<Complex64> = coeffs.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    reconstruct_nd_complex(&c, shape, norm, sizes, lengths, points)
}

/// Evaluates the real cosine form of the series on the tensor grid
/// `axes[0] × axes[1] × …` (axis 0 fastest in the output), one axis at a time.
pub fn reconstruct_grid(
    coeffs: &[f64],
    shape: &[usize],
    norm: f64,
    sizes: &[usize],
    lengths: &[f64],
    axes: &[Vec<f64>],
) -> Result<Vec<f64>> {
    check_shape(coeffs.len(), shape, sizes, lengths)?;
    if axes.len() != shape.len() {
        return shape_err("one coordinate list per axis is required");
    }
    for (a, xs) in axes.iter().enumerate() {
        if let Some(x) = xs.iter().find(|x| !(0.0..=lengths[a]).contains(*x)) {
            return Err(FsrError::Domain(format!("coordinate {x} outside [0, {}]", lengths[a])));
        }
    }
    // current tensor has extents `dims`; axis a is replaced by the point count
    let mut dims = shape.to_vec();
    let mut data = coeffs.to_vec();
    for a in 0..shape.len() {
        let k = shape[a];
        let n = sizes[a];
        let table: Vec<f64> = axes[a]
            .iter()
            .flat_map(|&x| {
                let theta = PI * x / lengths[a];
                (0..k).map(move |j| cos_weight(j, n) * (j as f64 * theta).cos())
            })
            .collect();
        let inner: usize = dims[..a].iter().product();
        let outer: usize = dims[a + 1..].iter().product();
        let p = axes[a].len();
        let src = &data;
        let next = exec::map_range(ExecPolicy::default(), inner * p * outer, |flat| {
            let i = flat % inner;
            let pi = (flat / inner) % p;
            let o = flat / (inner * p);
            let row = &table[pi * k..(pi + 1) * k];
            (0..k)
                .map(|j| row[j] * src[i + inner * (j + k * o)])
                .sum::<f64>()
        });
        data = next;
        dims[a] = p;
    }
    let pre = norm / (sizes.iter().product::<usize>() as f64).sqrt();
    data.iter_mut().for_each(|v| *v *= pre);
    Ok(data)
}

/// Normalization recovered from one known value `f(x*)`:
/// `A = √N f(x*) / (c₀ + 2 Σ c_k cos(kπx*/L))`.
pub fn recover_a(value: f64, x_star: f64, coeffs: &[f64], n: usize, length: f64) -> Result<f64> {
    let series = reconstruct_1d(coeffs, (n as f64).sqrt(), n, length, &[x_star])?[0];
    if series.abs() < 1e-12 {
        return Err(FsrError::SingularPoint(series));
    }
    Ok((n as f64).sqrt() * value / series)
}
