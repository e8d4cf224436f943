//! Flat `key = value` experiment configuration.
//!
//! Keys are kebab-case and shared by config files and command-line flags;
//! later sources override earlier ones.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use fsr_core::encoding::FunctionSpec;
use fsr_core::readout::{Method, SignForm};
use serde_json::{json, Value};

use crate::CliError;

pub const OUT_DIR_ENV: &str = "FSR_OUT_DIR";

pub const KEYS: &[&str] = &[
    "function",
    "method",
    "n",
    "length",
    "m",
    "margin",
    "n-shot",
    "n-shot1",
    "n-shot2",
    "n-iter",
    "delta",
    "delta-factor",
    "seeds",
    "statevector",
    "sign-form",
    "cutoff",
    "points",
    "threads",
    "max-qubits",
    "save-values",
    "name",
    "out-dir",
    "axis",
    "values",
];

/// Raw key/value pairs before validation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pairs: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut raw = RawConfig::default();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", no + 1)))?;
            raw.set(k.trim(), v.trim())?;
        }
        Ok(raw)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let key = key.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!("unknown key {key:?}")));
        }
        self.pairs.insert(key, value.trim().to_string());
        Ok(())
    }

    /// Parses `key=value`.
    pub fn set_pair(&mut self, pair: &str) -> Result<(), CliError> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("expected key=value, got {pair:?}")))?;
        self.set(k, v)
    }

    pub fn merge(&mut self, other: &RawConfig) {
        for (k, v) in &other.pairs {
            self.pairs.insert(k.clone(), v.clone());
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.pairs.get(key).map(String::as_str)
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|e| CliError::Config(format!("{key} = {v:?}: {e}"))))
            .transpose()
    }
}

/// Where reconstructions are evaluated and scored.
#[derive(Debug, Clone, PartialEq)]
pub enum Targets {
    Grid,
    List(Vec<Vec<f64>>),
    /// `factor·N` evenly spaced points per axis.
    Dense(usize),
}

impl Targets {
    fn parse(s: &str, dims: usize) -> Result<Self, CliError> {
        let bad = |msg: &str| CliError::Config(format!("points = {s:?}: {msg}"));
        if s == "grid" {
            return Ok(Targets::Grid);
        }
        if let Some(f) = s.strip_prefix("dense:") {
            let f: usize = f.trim().parse().map_err(|_| bad("dense factor must be an integer"))?;
            if f == 0 {
                return Err(bad("dense factor must be positive"));
            }
            return Ok(Targets::Dense(f));
        }
        if let Some(list) = s.strip_prefix("list:") {
            let pts = list
                .split(';')
                .map(|p| {
                    let c: Result<Vec<f64>, _> = p.split(',').map(|v| v.trim().parse::<f64>()).collect();
                    match c {
                        Ok(c) if c.len() == dims => Ok(c),
                        _ => Err(bad("each point needs one number per axis")),
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(Targets::List(pts));
        }
        Err(bad("expected grid, dense:<factor> or list:<x[,y]>;…"))
    }

    pub fn label(&self) -> String {
        match self {
            Targets::Grid => "grid".into(),
            Targets::Dense(f) => format!("dense:{f}"),
            Targets::List(p) => format!(
                "list:{}",
                p.iter()
                    .map(|c| c.iter().map(f64::to_string).collect::<Vec<_>>().join(","))
                    .collect::<Vec<_>>()
                    .join(";")
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    M,
    NShot,
    N,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::M => "m",
            SweepAxis::NShot => "n-shot",
            SweepAxis::N => "n",
        }
    }
}

impl FromStr for SweepAxis {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "m" | "M" => Ok(SweepAxis::M),
            "n-shot" | "n_shot" | "nshot" => Ok(SweepAxis::NShot),
            "n" | "N" => Ok(SweepAxis::N),
            other => Err(CliError::Config(format!("unknown sweep axis {other:?}"))),
        }
    }
}

/// Fully resolved and validated experiment settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub function: FunctionSpec,
    pub method: Method,
    /// Grid points per axis.
    pub n: usize,
    pub length: f64,
    /// Truncation for `fsr`, reference size `M` for `fqfsr-approx`.
    pub m: usize,
    pub margin: usize,
    pub n_shot1: u64,
    pub n_shot2: u64,
    pub n_iter: usize,
    pub delta: Option<f64>,
    pub delta_factor: f64,
    pub seeds: Vec<u64>,
    pub statevector: bool,
    pub sign_form: SignForm,
    /// Low-pass cutoff of `rsr-post`.
    pub cutoff: usize,
    pub points: Targets,
    pub threads: Option<usize>,
    pub max_qubits: usize,
    pub save_values: bool,
    pub name: String,
    pub out_dir: PathBuf,
}

fn parse_list<T: FromStr>(key: &str, s: &str) -> Result<Vec<T>, CliError> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..").filter(|_| !s.contains(',')) {
        // integer ranges `a..b` (exclusive) are accepted for seeds
        let a: i64 = a.trim().parse().map_err(|_| CliError::Config(format!("{key}: bad range {s:?}")))?;
        let b: i64 = b.trim().parse().map_err(|_| CliError::Config(format!("{key}: bad range {s:?}")))?;
        return (a..b)
            .map(|v| v.to_string().parse::<T>().map_err(|_| CliError::Config(format!("{key}: bad value {v}"))))
            .collect();
    }
    s.split(',')
        .filter(|v| !v.trim().is_empty())
        .map(|v| {
            let v = v.trim();
            // allow 1e4-style values for integer lists
            v.parse::<T>()
                .or_else(|_| match v.parse::<f64>() {
                    Ok(f) if f.fract() == 0.0 && f >= 0.0 => format!("{f:.0}").parse::<T>().map_err(|_| ()),
                    _ => Err(()),
                })
                .map_err(|_| CliError::Config(format!("{key}: bad value {v:?}")))
        })
        .collect()
}

fn parse_count(key: &str, s: &str) -> Result<u64, CliError> {
    let v: Vec<u64> = parse_list(key, s)?;
    match v.as_slice() {
        [x] => Ok(*x),
        _ => Err(CliError::Config(format!("{key}: expected a single count, got {s:?}"))),
    }
}

fn parse_bool(key: &str, s: &str) -> Result<bool, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(CliError::Config(format!("{key}: expected a boolean, got {s:?}"))),
    }
}

impl ExperimentConfig {
    pub fn resolve(raw: &RawConfig) -> Result<Self, CliError> {
        let function: FunctionSpec = raw
            .get("function")
            .unwrap_or("f1")
            .parse()
            .map_err(|e| CliError::Config(format!("function: {e}")))?;
        let method: Method = raw
            .get("method")
            .unwrap_or("fsr")
            .parse()
            .map_err(|e| CliError::Config(format!("method: {e}")))?;
        let dims = function.dims();
        let n = match raw.get("n") {
            Some(v) => parse_count("n", v)? as usize,
            None => 1024,
        };
        let m = match raw.get("m") {
            Some(v) => parse_count("m", v)? as usize,
            None => 64.min(n),
        };
        let n_shot = match raw.get("n-shot") {
            Some(v) => parse_count("n-shot", v)?,
            None => 10_000,
        };
        let n_shot1 = raw.get("n-shot1").map(|v| parse_count("n-shot1", v)).transpose()?.unwrap_or(n_shot);
        let n_shot2 = raw.get("n-shot2").map(|v| parse_count("n-shot2", v)).transpose()?.unwrap_or(n_shot);
        let sign_form = match raw.get("sign-form").unwrap_or("controlled") {
            "controlled" => SignForm::ControlledQft,
            "uncontrolled" => SignForm::UncontrolledQft,
            other => return Err(CliError::Config(format!("sign-form: unknown form {other:?}"))),
        };
        let out_dir = raw
            .get("out-dir")
            .map(PathBuf::from)
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        let cfg = ExperimentConfig {
            method,
            n,
            length: raw.parsed("length")?.unwrap_or(1.0),
            m,
            margin: raw.parsed("margin")?.unwrap_or(if dims == 1 { 0 } else { 4 }),
            n_shot1,
            n_shot2,
            n_iter: raw.parsed("n-iter")?.unwrap_or(1),
            delta: raw.parsed("delta")?,
            delta_factor: raw.parsed("delta-factor")?.unwrap_or(2.0),
            seeds: match raw.get("seeds") {
                Some(s) => parse_list("seeds", s)?,
                None => (0..5).collect(),
            },
            statevector: raw.get("statevector").map(|v| parse_bool("statevector", v)).transpose()?.unwrap_or(false),
            sign_form,
            cutoff: raw.parsed("cutoff")?.unwrap_or(m.min(n / 2)),
            points: Targets::parse(raw.get("points").unwrap_or("grid"), dims)?,
            threads: raw.parsed("threads")?,
            max_qubits: raw.parsed("max-qubits")?.unwrap_or(fsr_core::sim::DEFAULT_MAX_QUBITS),
            save_values: raw.get("save-values").map(|v| parse_bool("save-values", v)).transpose()?.unwrap_or(false),
            name: raw
                .get("name")
                .map(str::to_string)
                .unwrap_or_else(|| format!("{}-{}", method, function.kind().name())),
            out_dir,
            function,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn dims(&self) -> usize {
        self.function.dims()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.n < 2 || !self.n.is_power_of_two() {
            return bad(format!("n = {} must be a power of two ≥ 2", self.n));
        }
        if !(self.length > 0.0) {
            return bad(format!("length = {} must be positive", self.length));
        }
        if self.seeds.is_empty() {
            return bad("seeds must not be empty".into());
        }
        if self.n_iter == 0 {
            return bad("n-iter must be at least 1".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        let one_d = matches!(self.method, Method::RsrPost | Method::FqfsrExact | Method::FqfsrApprox);
        if one_d && self.dims() != 1 {
            return bad(format!("method {} needs a 1D function", self.method));
        }
        let needs_m = matches!(self.method, Method::Fsr | Method::FqfsrApprox);
        if needs_m && (self.m == 0 || !self.m.is_power_of_two() || self.m > self.n) {
            return bad(format!("m = {} must be a power of two in [1, n = {}]", self.m, self.n));
        }
        if self.method == Method::RsrPost && self.cutoff > self.n / 2 {
            return bad(format!("cutoff = {} exceeds n/2 = {}", self.cutoff, self.n / 2));
        }
        if matches!(self.method, Method::Rsr | Method::RsrPost) && self.points != Targets::Grid {
            return bad("real-space readout only produces grid values; use points = grid".into());
        }
        if let Targets::List(pts) = &self.points {
            if pts.iter().flatten().any(|x| !(0.0..=self.length).contains(x)) {
                return bad(format!("target points must lie in [0, {}]", self.length));
            }
        }
        Ok(())
    }

    /// The resolved configuration with every default materialized.
    pub fn to_json(&self) -> Value {
        let sign_form = match self.sign_form {
            SignForm::ControlledQft => "controlled",
            SignForm::UncontrolledQft => "uncontrolled",
        };
        json!({
            "function": self.function.to_string(),
            "method": self.method.to_string(),
            "dims": self.dims(),
            "n": self.n,
            "length": self.length,
            "m": self.m,
            "margin": self.margin,
            "n_shot1": self.n_shot1,
            "n_shot2": self.n_shot2,
            "n_iter": self.n_iter,
            "delta": self.delta,
            "delta_factor": self.delta_factor,
            "seeds": self.seeds,
            "statevector": self.statevector,
            "sign_form": sign_form,
            "cutoff": self.cutoff,
            "points": self.points.label(),
            "threads": self.threads,
            "max_qubits": self.max_qubits,
            "save_values": self.save_values,
            "name": self.name,
            "out_dir": self.out_dir.display().to_string(),
        })
    }

    pub fn csv_path(&self) -> PathBuf {
        self.out_dir.join(format!("{}.csv", self.name))
    }

    pub fn sidecar_path(&self) -> PathBuf {
        self.out_dir.join(format!("{}.config.json", self.name))
    }

    pub fn values_path(&self) -> PathBuf {
        self.out_dir.join(format!("{}.values.csv", self.name))
    }
}

/// Sweep axis and values from `axis` / `values`.
pub fn sweep_spec(raw: &RawConfig) -> Result<(SweepAxis, Vec<u64>), CliError> {
    let axis: SweepAxis = raw
        .get("axis")
        .ok_or_else(|| CliError::Config("sweep needs axis = m | n-shot | n".into()))?
        .parse()?;
    let values: Vec<u64> = parse_list(
        "values",
        raw.get("values").ok_or_else(|| CliError::Config("sweep needs values".into()))?,
    )?;
    if values.is_empty() {
        return Err(CliError::Config("values must not be empty".into()));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Config("sweep values must be strictly ascending".into()));
    }
    Ok((axis, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(text: &str) -> RawConfig {
        RawConfig::parse(text).unwrap()
    }

    #[test]
    fn defaults_are_materialized() {
        let c = ExperimentConfig::resolve(&RawConfig::default()).unwrap();
        assert_eq!(c.method, Method::Fsr);
        assert_eq!((c.n, c.m, c.n_shot1, c.n_shot2), (1024, 64, 10_000, 10_000));
        assert_eq!(c.seeds, vec![0, 1, 2, 3, 4]);
        assert_eq!(c.name, "fsr-quadratic");
        let j = c.to_json();
        assert_eq!(j["delta"], Value::Null);
        assert_eq!(j["points"], "grid");
    }

    #[test]
    fn file_syntax_and_overrides() {
        let mut r = raw("# comment\nmethod = fsr-adaptive\nn = 256 # trailing\nn_shot = 1e4\nseeds = 0..3\n");
        r.set_pair("n-shot2=40000").unwrap();
        let c = ExperimentConfig::resolve(&r).unwrap();
        assert_eq!(c.method, Method::FsrAdaptive);
        assert_eq!((c.n, c.n_shot1, c.n_shot2), (256, 10_000, 40_000));
        assert_eq!(c.seeds, vec![0, 1, 2]);
    }

    #[test]
    fn invalid_settings_are_config_errors() {
        for text in [
            "n = 100",
            "m = 48",
            "method = fqfsr-exact\nfunction = f3",
            "method = rsr\npoints = dense:2",
            "method = rsr-post\nn = 64\ncutoff = 40",
            "bogus = 1",
            "seeds = ",
            "points = list:2.0",
            "function = nope",
        ] {
            let r = RawConfig::parse(text).and_then(|r| ExperimentConfig::resolve(&r));
            assert!(matches!(r, Err(CliError::Config(_))), "{text}");
        }
    }

    #[test]
    fn targets_and_sweeps() {
        assert_eq!(Targets::parse("list:0.1;0.5", 1).unwrap(), Targets::List(vec![vec![0.1], vec![0.5]]));
        assert_eq!(Targets::parse("dense:4", 2).unwrap(), Targets::Dense(4));
        let (axis, values) = sweep_spec(&raw("axis = n-shot\nvalues = 1e4, 4e4, 160000")).unwrap();
        assert_eq!(axis, SweepAxis::NShot);
        assert_eq!(values, vec![10_000, 40_000, 160_000]);
        assert!(sweep_spec(&raw("axis = m\nvalues = 8,4")).is_err());
    }
}
