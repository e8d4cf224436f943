use crate::error::{shape_err, Result};

/// `((1/N) Σ (values_j − truth_j)²)^{1/2}`.
pub fn rmse(values: &[f64], truth: &[f64]) -> Result<f64> {
    if values.len() != truth.len() {
        return shape_err(format!(
            "{} values against {} reference values",
            values.len(),
            truth.len()
        ));
    }
    if values.is_empty() {
        return Ok(0.0);
    }
    let ss: f64 = values.iter().zip(truth).map(|(v, t)| (v - t).powi(2)).sum();
    Ok((ss / values.len() as f64).sqrt())
}

/// `(Σ ((values_j − truth_j)/A)²)^{1/2}`, the error of the normalized state.
pub fn l2ns(values: &[f64], truth: &[f64], norm: f64) -> Result<f64> {
    if values.len() != truth.len() {
        return shape_err(format!(
            "{} values against {} reference values",
            values.len(),
            truth.len()
        ));
    }
    let ss: f64 = values.iter().zip(truth).map(|(v, t)| (v - t).powi(2)).sum();
    Ok(ss.sqrt() / norm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_values() {
        assert_eq!(rmse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(rmse(&[1.0, 0.0, 0.0, 0.0], &[0.0; 4]).unwrap(), 0.5);
        assert!(rmse(&[1.0], &[1.0, 2.0]).is_err());
        assert!(l2ns(&[1.0], &[], 1.0).is_err());
    }

    #[test]
    fn ratio_identity() {
        let v = [0.3, -1.2, 2.5, 0.0, 4.1, 1.0, -0.7, 0.2];
        let t = [0.1, -1.0, 2.0, 0.5, 4.0, 1.5, -0.5, 0.0];
        let a = t.iter().map(|x: &f64| x * x).sum::<f64>().sqrt();
        let r = l2ns(&v, &t, a).unwrap() / rmse(&v, &t).unwrap();
        assert!((r - (8f64).sqrt() / a).abs() < 1e-12);
    }
}
