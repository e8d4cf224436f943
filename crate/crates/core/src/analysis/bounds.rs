use std::f64::consts::PI;

use crate::error::{domain_err, Result};

/// Total-variation data of a piecewise-smooth function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiecewiseData {
    /// `V_Π(f)`: sum of jump magnitudes, the periodic wrap-around included.
    pub variation: f64,
    /// `‖f′‖_Π`: L¹ norm of the derivative on the smooth pieces.
    pub derivative_l1: f64,
}

/// Smoothness description of a function on `[0, L]` for the coefficient-decay bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundInputs {
    /// Smoothness order `p ≥ 1`.
    pub p: u32,
    /// Lowest order with a boundary jump, `1 ≤ p₀ ≤ p`.
    pub p0: u32,
    /// `‖f^{(p)}‖_{L¹}`.
    pub derivative_l1: f64,
    /// `|f^{(q)}(L) − f^{(q)}(0)|` for `q = p₀−1, …, p−1`. Breakpoints inside
    /// the domain contribute their jumps to the same order.
    pub boundary_jumps: Vec<f64>,
    pub length: f64,
    pub piecewise: Option<PiecewiseData>,
}

impl BoundInputs {
    /// `(x − c)²` on `[0, 1]`: value continuous across the boundary, first-derivative
    /// jump `|2(1−c) + 2c| = 2`, `‖f″‖ = 2`.
    pub fn quadratic_unit() -> Self {
        BoundInputs {
            p: 2,
            p0: 2,
            derivative_l1: 2.0,
            boundary_jumps: vec![2.0],
            length: 1.0,
            piecewise: None,
        }
    }

    /// The even extension of `(x − 1/2)²` to `[0, 2]`: derivative jumps of 2 at
    /// the ends and at the fold, `‖f̃″‖ = 4`.
    pub fn quadratic_extended() -> Self {
        BoundInputs {
            p: 2,
            p0: 2,
            derivative_l1: 4.0,
            boundary_jumps: vec![4.0],
            length: 2.0,
            piecewise: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.p0 < 1 || self.p0 > self.p {
            return domain_err(format!("need 1 ≤ p₀ ≤ p, got p₀={} p={}", self.p0, self.p));
        }
        if self.boundary_jumps.len() != (self.p - self.p0 + 1) as usize {
            return domain_err(format!(
                "{} boundary jumps for orders {}..{}",
                self.boundary_jumps.len(),
                self.p0 - 1,
                self.p - 1
            ));
        }
        if !(self.length > 0.0) {
            return domain_err("domain length must be positive");
        }
        Ok(())
    }

    /// The `W^{p,1}` estimate `(1/L) Σ_q (L/2πk)^{q+1} J_q + (1/L)(L/2πk)^p ‖f^{(p)}‖`.
    pub fn sobolev_bound(&self, k: usize) -> Result<f64> {
        self.validate()?;
        if k == 0 {
            return domain_err("the decay bound is undefined at k = 0");
        }
        let r = self.length / (2.0 * PI * k as f64);
        let jumps: f64 = self
            .boundary_jumps
            .iter()
            .enumerate()
            .map(|(i, j)| r.powi((self.p0 + i as u32) as i32) * j)
            .sum();
        Ok((jumps + r.powi(self.p as i32) * self.derivative_l1) / self.length)
    }

    /// The bounded-variation estimate `(V_Π + ‖f′‖_Π)/(2πk)`, if piecewise data is present.
    pub fn variation_bound(&self, k: usize) -> Result<Option<f64>> {
        if k == 0 {
            return domain_err("the decay bound is undefined at k = 0");
        }
        Ok(self
            .piecewise
            .map(|pw| (pw.variation + pw.derivative_l1) / (2.0 * PI * k as f64)))
    }

    /// Constant `C` and rate `r` with `|c_k| ≤ C k^{−r}` for all `k ≥ 1`; `r` is
    /// the order of the first nonzero jump (or `p` if there is none).
    pub fn decay_constant(&self) -> Result<(f64, u32)> {
        let c = self.sobolev_bound(1)?;
        let rate = self
            .boundary_jumps
            .iter()
            .position(|&j| j != 0.0)
            .map_or(self.p, |i| self.p0 + i as u32);
        Ok((c, rate))
    }
}

/// Smallest applicable bound on `|c_{k,c}|`.
pub fn coeff_decay_bound(b: &BoundInputs, k: usize) -> Result<f64> {
    let s = b.sobolev_bound(k)?;
    Ok(match b.variation_bound(k)? {
        Some(v) => s.min(v),
        None => s,
    })
}

/// Truncation-error estimate for keeping `|k| < M` of `N` coefficients of a
/// function with norm factor `A`:
/// `RMSE ≤ √(2/(2p−1)) C √((M−1)^{−(2p−1)} − (N/2)^{−(2p−1)})`, `L2NS = RMSE·√N/A`.
pub fn truncation_error_bound(b: &BoundInputs, m: usize, n: usize, norm: f64) -> Result<(f64, f64)> {
    if m < 2 || 2 * m > n {
        return domain_err(format!("need 2 ≤ M ≤ N/2, got M={m} N={n}"));
    }
    let (c, p) = b.decay_constant()?;
    let e = (2 * p - 1) as i32;
    let tail = ((m - 1) as f64).powi(-e) - ((n / 2) as f64).powi(-e);
    let rmse = (2.0 / e as f64).sqrt() * c * tail.max(0.0).sqrt();
    Ok((rmse, rmse * (n as f64).sqrt() / norm))
}

/// Truncation plus sampling estimate
/// `L2NS ≤ 2√(C_p M^{−(2p−1)} + β² M / N_shot)` with
/// `C_p = (N/A²) C² (1/2 + 1/(2p−1))`; RMSE is `L2NS·A/√N`.
pub fn shots_bound(
    b: &BoundInputs,
    m: usize,
    n_shot: u64,
    beta: f64,
    n: usize,
    norm: f64,
) -> Result<(f64, f64)> {
    if n_shot == 0 || !(beta > 0.0) || m == 0 {
        return domain_err("shots bound needs N_shot ≥ 1, β > 0 and M ≥ 1");
    }
    let (c, p) = b.decay_constant()?;
    let e = (2 * p - 1) as f64;
    let cp = (n as f64 / (norm * norm)) * c * c * (0.5 + 1.0 / e);
    let l2ns = 2.0 * (cp * (m as f64).powf(-e) + beta * beta * m as f64 / n_shot as f64).sqrt();
    Ok((l2ns * norm / (n as f64).sqrt(), l2ns))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bound_value() {
        let b = BoundInputs::quadratic_unit();
        for k in [1usize, 3, 10] {
            let want = 4.0 / (2.0 * PI * k as f64).powi(2);
            assert!((coeff_decay_bound(&b, k).unwrap() - want).abs() < 1e-15);
        }
        assert!(coeff_decay_bound(&b, 0).is_err());
    }

    #[test]
    fn extended_quadratic_bound() {
        let b = BoundInputs::quadratic_extended();
        let want = 4.0 / (PI * 3.0).powi(2);
        assert!((coeff_decay_bound(&b, 3).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn truncation_structure() {
        let b = BoundInputs::quadratic_unit();
        let (r, _) = truncation_error_bound(&b, 512, 1024, 1.0).unwrap();
        let (r64, _) = truncation_error_bound(&b, 64, 1024, 1.0).unwrap();
        assert!(r < 0.01 * r64);
        let (r1, _) = truncation_error_bound(&b, 65, 1 << 30, 1.0).unwrap();
        let (r2, _) = truncation_error_bound(&b, 129, 1 << 30, 1.0).unwrap();
        assert!((r1 / r2 - 2f64.powf(1.5)).abs() < 1e-6);
        assert!(truncation_error_bound(&b, 1, 1024, 1.0).is_err());
        assert!(truncation_error_bound(&b, 1024, 1024, 1.0).is_err());
    }

    #[test]
    fn sampling_term_scales() {
        let b = BoundInputs::quadratic_unit();
        let big = |s| shots_bound(&b, 64, s, 2.0, 1 << 40, 1.0).unwrap().1;
        // with the truncation term negligible against sampling, 4× shots halves the bound
        let b0 = BoundInputs {
            derivative_l1: 0.0,
            boundary_jumps: vec![0.0],
            ..b.clone()
        };
        let s = |n| shots_bound(&b0, 64, n, 2.0, 1024, 1.0).unwrap().1;
        assert!((s(1000) / s(4000) - 2.0).abs() < 1e-12);
        assert!(big(1000) > big(4000));
    }
}
