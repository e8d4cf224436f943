use std::fs;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use fsr_core::analysis::{l2ns, rmse};
use fsr_core::circuits::{Backend, Sampling};
use fsr_core::encoding::{grid_coordinate, GridFunction};
use fsr_core::fqfsr::{fqfsr_approx, fqfsr_exact, fqfsr_grid, Variant};
use fsr_core::readout::{
    fsr_adaptive_nd, fsr_fixed_nd, rsr_postprocess_values, rsr_readout, FsrOptions, Method, SignForm,
};
use fsr_core::ExecPolicy;
use rayon::prelude::*;
use serde_json::json;

use crate::config::{ExperimentConfig, SweepAxis, Targets};
use crate::record::{SweepRecord, SCHEMA_VERSION};
use crate::CliError;

/// One run at one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub record: SweepRecord,
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub truth: Vec<f64>,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub config: ExperimentConfig,
    pub sweep: Option<(SweepAxis, Vec<u64>)>,
    /// Rows ordered by sweep value, then seed.
    pub rows: Vec<Outcome>,
    /// Least-squares slope of log mean RMSE against log sweep value.
    pub slope: Option<f64>,
}

fn target_points(cfg: &ExperimentConfig, gf: &GridFunction) -> Vec<Vec<f64>> {
    match &cfg.points {
        Targets::Grid => gf.points(),
        Targets::List(p) => p.clone(),
        Targets::Dense(f) => {
            let k = f * cfg.n;
            let total = k.pow(cfg.dims() as u32);
            (0..total)
                .map(|idx| {
                    let mut rest = idx;
                    (0..cfg.dims())
                        .map(|_| {
                            let j = rest % k;
                            rest /= k;
                            grid_coordinate(j, k, cfg.length)
                        })
                        .collect()
                })
                .collect()
        }
    }
}

fn fsr_options(cfg: &ExperimentConfig, seed: u64, backend: Backend) -> FsrOptions {
    FsrOptions {
        exact: cfg.statevector,
        n_shot1: cfg.n_shot1,
        n_shot2: cfg.n_shot2,
        n_iter: cfg.n_iter,
        seed,
        delta: cfg.delta,
        delta_factor: cfg.delta_factor,
        sign_form: cfg.sign_form,
        backend,
    }
}

struct MethodResult {
    values: Vec<f64>,
    m_chosen: String,
    delta: Option<f64>,
    n_sum: Option<u64>,
}

fn run_method(cfg: &ExperimentConfig, gf: &GridFunction, points: &[Vec<f64>], seed: u64) -> Result<MethodResult, CliError> {
    let backend = Backend {
        policy: ExecPolicy::default(),
        max_qubits: cfg.max_qubits,
    };
    let sampling = if cfg.statevector {
        Sampling::Exact
    } else {
        Sampling::Shots {
            n_shot: cfg.n_shot1,
            seed,
        }
    };
    let plain = |values| MethodResult {
        values,
        m_chosen: String::new(),
        delta: None,
        n_sum: None,
    };
    Ok(match cfg.method {
        Method::Rsr => plain(rsr_readout(gf, sampling, backend)?.values),
        Method::RsrPost => {
            let raw = rsr_readout(gf, sampling, backend)?.values;
            plain(rsr_postprocess_values(&raw, cfg.cutoff)?)
        }
        Method::Fsr | Method::FsrAdaptive => {
            let opts = fsr_options(cfg, seed, backend);
            let r = if cfg.method == Method::Fsr {
                fsr_fixed_nd(gf, &vec![cfg.m; cfg.dims()], &opts)?
            } else {
                fsr_adaptive_nd(gf, cfg.margin, &opts)?
            };
            let values = match cfg.points {
                Targets::Grid => r.evaluate_grid(gf)?,
                _ => r.evaluate(gf, points)?,
            };
            MethodResult {
                values,
                m_chosen: r.ms.iter().map(usize::to_string).collect::<Vec<_>>().join("x"),
                delta: Some(r.delta),
                n_sum: r.n_sum,
            }
        }
        Method::FqfsrExact | Method::FqfsrApprox => {
            let m_bits = cfg.m.trailing_zeros() as usize;
            let variant = if cfg.method == Method::FqfsrExact {
                Variant::Exact
            } else {
                Variant::Approx { m: m_bits }
            };
            let est = match cfg.points {
                Targets::Grid => fqfsr_grid(gf, variant, sampling, backend)?,
                _ => points
                    .iter()
                    .enumerate()
                    .map(|(j, p)| {
                        let s = match sampling {
                            Sampling::Shots { n_shot, seed } => Sampling::Shots {
                                n_shot,
                                seed: seed.wrapping_add(j as u64),
                            },
                            exact => exact,
                        };
                        match variant {
                            Variant::Exact => fqfsr_exact(gf, p[0], s, backend),
                            Variant::Approx { m } => fqfsr_approx(gf, p[0], m, s, backend),
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            };
            let clamped = est.iter().filter(|e| e.clamped).count();
            if clamped > 0 {
                log::warn!("{clamped} overlap estimates were negative and clamped to 0");
            }
            MethodResult {
                values: est.iter().map(|e| e.value).collect(),
                m_chosen: match variant {
                    Variant::Exact => cfg.n.to_string(),
                    Variant::Approx { .. } => cfg.m.to_string(),
                },
                delta: None,
                n_sum: None,
            }
        }
    })
}

/// Runs `cfg` once at `seed`.
pub fn run_single(cfg: &ExperimentConfig, seed: u64, sweep: Option<(SweepAxis, u64)>) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let dims = cfg.dims();
    let gf = GridFunction::sample(&cfg.function, &vec![cfg.length; dims], &vec![cfg.n; dims])?;
    let points = target_points(cfg, &gf);
    let truth = match cfg.points {
        Targets::Grid => gf.samples().to_vec(),
        _ => cfg.function.evaluate(&points, &vec![cfg.length; dims])?,
    };
    let res = run_method(cfg, &gf, &points, seed)?;
    let record = SweepRecord {
        schema_version: SCHEMA_VERSION,
        function: cfg.function.to_string(),
        method: cfg.method.to_string(),
        dims,
        n: cfg.n,
        length: cfg.length,
        m: cfg.m,
        margin: cfg.margin,
        n_shot1: cfg.n_shot1,
        n_shot2: cfg.n_shot2,
        n_iter: cfg.n_iter,
        delta_factor: cfg.delta_factor,
        statevector: cfg.statevector,
        sign_form: match cfg.sign_form {
            SignForm::ControlledQft => "controlled".into(),
            SignForm::UncontrolledQft => "uncontrolled".into(),
        },
        cutoff: cfg.cutoff,
        points: cfg.points.label(),
        sweep_axis: sweep.map(|(a, _)| a.as_str().to_string()).unwrap_or_default(),
        sweep_value: sweep.map(|(_, v)| v),
        seed,
        m_chosen: res.m_chosen,
        delta: res.delta,
        n_sum: res.n_sum,
        rmse: rmse(&res.values, &truth)?,
        l2ns: l2ns(&res.values, &truth, gf.norm())?,
    };
    Ok(Outcome {
        record,
        points,
        values: res.values,
        truth,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

fn run_jobs(threads: Option<usize>, jobs: Vec<(ExperimentConfig, u64, Option<(SweepAxis, u64)>)>) -> Result<Vec<Outcome>, CliError> {
    let work = || {
        jobs.par_iter()
            .map(|(cfg, seed, sweep)| run_single(cfg, *seed, *sweep))
            .collect::<Result<Vec<_>, _>>()
    };
    match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Config(format!("threads: {e}")))?
            .install(work),
        None => work(),
    }
}

/// Runs `cfg` at every seed.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    cfg.validate()?;
    let jobs = cfg.seeds.iter().map(|&s| (cfg.clone(), s, None)).collect();
    Ok(RunOutput {
        config: cfg.clone(),
        sweep: None,
        rows: run_jobs(cfg.threads, jobs)?,
        slope: None,
    })
}

fn with_axis(cfg: &ExperimentConfig, axis: SweepAxis, value: u64) -> Result<ExperimentConfig, CliError> {
    let mut c = cfg.clone();
    match axis {
        SweepAxis::M => c.m = value as usize,
        SweepAxis::NShot => {
            c.n_shot1 = value;
            c.n_shot2 = value;
        }
        SweepAxis::N => c.n = value as usize,
    }
    c.validate()?;
    Ok(c)
}

/// Runs `cfg` at every value of `axis` and every seed, and fits the scaling slope.
pub fn run_sweep(cfg: &ExperimentConfig, axis: SweepAxis, values: &[u64]) -> Result<RunOutput, CliError> {
    let mut jobs = Vec::new();
    for &v in values {
        let c = with_axis(cfg, axis, v)?;
        for &s in &cfg.seeds {
            jobs.push((c.clone(), s, Some((axis, v))));
        }
    }
    let rows = run_jobs(cfg.threads, jobs)?;
    let k = cfg.seeds.len();
    let means: Vec<f64> = rows
        .chunks(k)
        .map(|c| c.iter().map(|o| o.record.rmse).sum::<f64>() / k as f64)
        .collect();
    let xs: Vec<f64> = values.iter().map(|&v| v as f64).collect();
    let slope = if values.len() < 3 {
        log::warn!("fewer than 3 sweep values; slope omitted");
        None
    } else {
        log_slope(&xs, &means)
    };
    Ok(RunOutput {
        config: cfg.clone(),
        sweep: Some((axis, values.to_vec())),
        rows,
        slope,
    })
}

/// Least-squares slope of `ln y` against `ln x`, skipping non-positive pairs.
/// `None` if fewer than two usable pairs remain.
pub fn log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(&x, &y)| x > 0.0 && y > 0.0)
        .map(|(&x, &y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < xs.len() {
        log::warn!("{} sweep points with zero error left out of the slope fit", xs.len() - pts.len());
    }
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

impl RunOutput {
    pub fn records(&self) -> Vec<SweepRecord> {
        self.rows.iter().map(|o| o.record.clone()).collect()
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<(), CliError> {
        let mut out = csv::Writer::from_writer(w);
        for r in &self.rows {
            out.serialize(&r.record)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn sidecar(&self, command: &str) -> serde_json::Value {
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        json!({
            "schema_version": SCHEMA_VERSION,
            "command": command,
            "timestamp": timestamp,
            "config": self.config.to_json(),
            "sweep": self.sweep.as_ref().map(|(a, v)| json!({"axis": a.as_str(), "values": v})),
            "slope": self.slope,
            "rows": self.rows.len(),
            "wall_ms": self.rows.iter().map(|o| json!({
                "sweep_value": o.record.sweep_value,
                "seed": o.record.seed,
                "ms": o.wall_ms,
            })).collect::<Vec<_>>(),
        })
    }

    /// Writes `<name>.csv`, `<name>.config.json` and, if requested,
    /// `<name>.values.csv` under the configured output directory.
    pub fn write_all(&self, command: &str) -> Result<(), CliError> {
        let cfg = &self.config;
        fs::create_dir_all(&cfg.out_dir)?;
        self.write_csv(fs::File::create(cfg.csv_path())?)?;
        fs::write(cfg.sidecar_path(), serde_json::to_string_pretty(&self.sidecar(command))? + "\n")?;
        if cfg.save_values {
            let mut w = csv::Writer::from_path(cfg.values_path())?;
            w.write_record(["sweep_value", "seed", "x", "y", "value", "truth"])?;
            for o in &self.rows {
                for ((p, v), t) in o.points.iter().zip(&o.values).zip(&o.truth) {
                    w.write_record([
                        o.record.sweep_value.map(|v| v.to_string()).unwrap_or_default(),
                        o.record.seed.to_string(),
                        p[0].to_string(),
                        p.get(1).map(f64::to_string).unwrap_or_default(),
                        v.to_string(),
                        t.to_string(),
                    ])?;
                }
            }
            w.flush()?;
        }
        Ok(())
    }
}
