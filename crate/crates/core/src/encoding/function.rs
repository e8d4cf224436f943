use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use super::expr::Expr;
use crate::error::{FsrError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FunctionKind {
    /// `(x − c)²`; params `[c]`.
    Quadratic,
    /// `b₁ exp(−a₁(x−c₁)²) + b₂ exp(−a₂(x−c₂)²)`; params `[b₁, a₁, c₁, b₂, a₂, c₂]`.
    GaussianMix1d,
    /// `cos(2π((x−cx)² + (y−cy)²)) + 1`; params `[cx, cy]`.
    RingCos2d,
    /// Two isotropic Gaussians; params `[b₁, a₁, cx₁, cy₁, b₂, a₂, cx₂, cy₂]`.
    GaussianMix2d,
    /// A parsed expression in `x` (and `y`).
    Custom,
}

impl FunctionKind {
    pub fn name(self) -> &'static str {
        match self {
            FunctionKind::Quadratic => "quadratic",
            FunctionKind::GaussianMix1d => "gaussian-mix-1d",
            FunctionKind::RingCos2d => "ring-cos-2d",
            FunctionKind::GaussianMix2d => "gaussian-mix-2d",
            FunctionKind::Custom => "expr",
        }
    }

    fn arity(self) -> Option<usize> {
        match self {
            FunctionKind::Quadratic => Some(1),
            FunctionKind::GaussianMix1d => Some(6),
            FunctionKind::RingCos2d => Some(2),
            FunctionKind::GaussianMix2d => Some(8),
            FunctionKind::Custom => None,
        }
    }

    fn dims(self) -> usize {
        match self {
            FunctionKind::Quadratic | FunctionKind::GaussianMix1d => 1,
            FunctionKind::RingCos2d | FunctionKind::GaussianMix2d => 2,
            FunctionKind::Custom => 0,
        }
    }
}

/// An analytic test function.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    kind: FunctionKind,
    params: Vec<f64>,
    expr: Option<(String, Expr)>,
    dims: usize,
}

impl FunctionSpec {
    pub fn new(kind: FunctionKind, params: Vec<f64>) -> Result<Self> {
        match kind.arity() {
            None => Err(FsrError::Parse(
                "expression functions are built with FunctionSpec::expression".into(),
            )),
            Some(a) if a != params.len() => Err(FsrError::Parse(format!(
                "{} takes {a} parameters, got {}",
                kind.name(),
                params.len()
            ))),
            Some(_) => Ok(FunctionSpec {
                kind,
                params,
                expr: None,
                dims: kind.dims(),
            }),
        }
    }

    /// Parses `src`; the dimension is 2 if `y` appears, unless `dims` forces it.
    pub fn expression(src: &str, dims: Option<usize>) -> Result<Self> {
        let e = Expr::parse(src)?;
        let used = e.arity().max(1);
        let dims = dims.unwrap_or(used);
        if !(1..=2).contains(&dims) || used > dims {
            return Err(FsrError::Parse(format!(
                "expression {src:?} needs {used} coordinates but is declared {dims}-dimensional"
            )));
        }
        Ok(FunctionSpec {
            kind: FunctionKind::Custom,
            params: Vec::new(),
            expr: Some((src.trim().to_string(), e)),
            dims,
        })
    }

    /// `(x − 0.5)²`.
    pub fn f1() -> Self {
        Self::new(FunctionKind::Quadratic, vec![0.5]).unwrap()
    }

    /// `0.95 exp(−1024/9 (x−0.5)²) + 0.38 exp(−256(x−0.25)²)`.
    pub fn f2() -> Self {
        Self::new(
            FunctionKind::GaussianMix1d,
            vec![0.95, 1024.0 / 9.0, 0.5, 0.38, 256.0, 0.25],
        )
        .unwrap()
    }

    /// `cos(2π((x−0.5)² + (y−0.5)²)) + 1`.
    pub fn f3() -> Self {
        Self::new(FunctionKind::RingCos2d, vec![0.5, 0.5]).unwrap()
    }

    /// `exp(−25((x−.65)²+(y−.65)²)) + exp(−16((x−.35)²+(y−.35)²))`.
    pub fn f4() -> Self {
        Self::new(
            FunctionKind::GaussianMix2d,
            vec![1.0, 25.0, 0.65, 0.65, 1.0, 16.0, 0.35, 0.35],
        )
        .unwrap()
    }

    pub fn kind(&self) -> FunctionKind {
        self.kind
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    /// Value at `point` (one coordinate per dimension). No domain check.
    pub fn value(&self, point: &[f64]) -> f64 {
        let p = &self.params;
        match self.kind {
            FunctionKind::Quadratic => (point[0] - p[0]).powi(2),
            FunctionKind::GaussianMix1d => {
                let x = point[0];
                p[0] * (-p[1] * (x - p[2]).powi(2)).exp()
                    + p[3] * (-p[4] * (x - p[5]).powi(2)).exp()
            }
            FunctionKind::RingCos2d => {
                let r2 = (point[0] - p[0]).powi(2) + (point[1] - p[1]).powi(2);
                (2.0 * PI * r2).cos() + 1.0
            }
            FunctionKind::GaussianMix2d => {
                let (x, y) = (point[0], point[1]);
                let g = |b: f64, a: f64, cx: f64, cy: f64| {
                    b * (-a * ((x - cx).powi(2) + (y - cy).powi(2))).exp()
                };
                g(p[0], p[1], p[2], p[3]) + g(p[4], p[5], p[6], p[7])
            }
            FunctionKind::Custom => self.expr.as_ref().expect("custom expression").1.eval(point),
        }
    }

    /// Analytic values at `points`, each of which must lie in `[0, L_ℓ]` per axis.
    pub fn evaluate(&self, points: &[Vec<f64>], lengths: &[f64]) -> Result<Vec<f64>> {
        if lengths.len() != self.dims {
            return Err(FsrError::Shape(format!(
                "{} lengths for a {}-dimensional function",
                lengths.len(),
                self.dims
            )));
        }
        points
            .iter()
            .map(|pt| {
                if pt.len() != self.dims {
                    return Err(FsrError::Shape(format!(
                        "point {pt:?} does not have {} coordinates",
                        self.dims
                    )));
                }
                if pt.iter().zip(lengths).any(|(&c, &l)| !(0.0..=l).contains(&c)) {
                    return Err(FsrError::Domain(format!("point {pt:?} outside the domain")));
                }
                Ok(self.value(pt))
            })
            .collect()
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some((src, e)) = &self.expr {
            return if self.dims == 2 && e.arity() < 2 {
                write!(f, "expr2d:{src}")
            } else {
                write!(f, "expr:{src}")
            };
        }
        for (name, preset) in [
            ("f1", Self::f1()),
            ("f2", Self::f2()),
            ("f3", Self::f3()),
            ("f4", Self::f4()),
        ] {
            if *self == preset {
                return f.write_str(name);
            }
        }
        let ps: Vec<String> = self.params.iter().map(|v| format!("{v}")).collect();
        write!(f, "{}:{}", self.kind.name(), ps.join(","))
    }
}

impl FromStr for FunctionSpec {
    type Err = FsrError;

    /// Accepts `f1`…`f4`, `<kind>:<p1>,<p2>,…`, `expr:<expression>` and
    /// `expr2d:<expression>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "f1" => return Ok(Self::f1()),
            "f2" => return Ok(Self::f2()),
            "f3" => return Ok(Self::f3()),
            "f4" => return Ok(Self::f4()),
            _ => {}
        }
        let (head, tail) = s
            .split_once(':')
            .ok_or_else(|| FsrError::Parse(format!("unknown function {s:?}")))?;
        let kind = match head.trim() {
            "expr" => return Self::expression(tail, None),
            "expr2d" => return Self::expression(tail, Some(2)),
            "quadratic" => FunctionKind::Quadratic,
            "gaussian-mix-1d" => FunctionKind::GaussianMix1d,
            "ring-cos-2d" => FunctionKind::RingCos2d,
            "gaussian-mix-2d" => FunctionKind::GaussianMix2d,
            other => return Err(FsrError::Parse(format!("unknown function kind {other:?}"))),
        };
        let params = tail
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| FsrError::Parse(format!("bad parameter {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(kind, params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_at_known_points() {
        assert_eq!(FunctionSpec::f1().value(&[0.5]), 0.0);
        assert_eq!(FunctionSpec::f3().value(&[0.5, 0.5]), 2.0);
        let f2 = FunctionSpec::f2().value(&[0.5]);
        assert!((f2 - (0.95 + 0.38 * (-16f64).exp())).abs() < 1e-15);
        assert!((f2 - 0.95000004).abs() < 1e-8);
    }

    #[test]
    fn round_trip_text() {
        for s in [
            "f1",
            "f2",
            "f3",
            "f4",
            "quadratic:0.25",
            "expr:sin(pi*x)",
            "expr:x*y",
            "expr2d:x",
        ] {
            let spec: FunctionSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
            assert_eq!(spec.to_string().parse::<FunctionSpec>().unwrap(), spec);
        }
        assert_eq!("expr:x*y".parse::<FunctionSpec>().unwrap().dims(), 2);
        assert_eq!("expr2d:x".parse::<FunctionSpec>().unwrap().dims(), 2);
    }

    #[test]
    fn arity_is_checked() {
        assert!("quadratic:1,2".parse::<FunctionSpec>().is_err());
        assert!("ring-cos-2d:0.5".parse::<FunctionSpec>().is_err());
        assert!("bogus:1".parse::<FunctionSpec>().is_err());
        assert!("f9".parse::<FunctionSpec>().is_err());
    }

    #[test]
    fn evaluate_checks_domain() {
        let f = FunctionSpec::f1();
        assert_eq!(f.evaluate(&[vec![0.5]], &[1.0]).unwrap(), vec![0.0]);
        assert!(matches!(
            f.evaluate(&[vec![1.5]], &[1.0]),
            Err(FsrError::Domain(_))
        ));
        assert!(matches!(
            f.evaluate(&[vec![0.5, 0.5]], &[1.0]),
            Err(FsrError::Shape(_))
        ));
    }
}
