//! Aggregation of run records into plot-ready rows.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::record::{SweepRecord, SCHEMA_VERSION};
use crate::CliError;

/// Mean and population standard deviation over seeds at one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub schema_version: u32,
    pub function: String,
    pub method: String,
    pub dims: usize,
    pub n: usize,
    pub m: usize,
    pub n_shot1: u64,
    pub n_shot2: u64,
    pub statevector: bool,
    pub sweep_axis: String,
    pub sweep_value: Option<u64>,
    pub seeds: usize,
    pub rmse_mean: f64,
    pub rmse_std: f64,
    pub l2ns_mean: f64,
    pub l2ns_std: f64,
    /// Most frequent chosen truncation; ties go to the first seen.
    pub m_chosen_mode: String,
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn group_key(r: &SweepRecord) -> String {
    format!(
        "{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{:?}",
        r.function,
        r.method,
        r.dims,
        r.n,
        r.length,
        r.m,
        r.margin,
        r.n_shot1,
        r.n_shot2,
        r.n_iter,
        r.delta_factor,
        r.statevector,
        r.sign_form,
        r.cutoff,
        r.points,
        r.sweep_axis,
        r.sweep_value
    )
}

/// Groups records by everything except seed and scores, in first-seen order.
pub fn aggregate(records: &[SweepRecord]) -> Result<Vec<AggregateRow>, CliError> {
    if records.is_empty() {
        return Err(CliError::Config("no records to aggregate".into()));
    }
    if let Some(r) = records.iter().find(|r| r.schema_version != SCHEMA_VERSION) {
        return Err(CliError::Config(format!("unsupported schema version {}", r.schema_version)));
    }
    let mut order: Vec<Vec<&SweepRecord>> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for r in records {
        let i = *index.entry(group_key(r)).or_insert_with(|| {
            order.push(Vec::new());
            order.len() - 1
        });
        order[i].push(r);
    }
    Ok(order
        .into_iter()
        .map(|g| {
            let first = g[0];
            let (rmse_mean, rmse_std) = mean_std(&g.iter().map(|r| r.rmse).collect::<Vec<_>>());
            let (l2ns_mean, l2ns_std) = mean_std(&g.iter().map(|r| r.l2ns).collect::<Vec<_>>());
            let mut counts: Vec<(&str, usize)> = Vec::new();
            for r in &g {
                match counts.iter_mut().find(|(k, _)| *k == r.m_chosen) {
                    Some(c) => c.1 += 1,
                    None => counts.push((&r.m_chosen, 1)),
                }
            }
            let best = counts.iter().map(|c| c.1).max().unwrap_or(0);
            let mode = counts.iter().find(|c| c.1 == best).map(|c| c.0).unwrap_or("");
            AggregateRow {
                schema_version: SCHEMA_VERSION,
                function: first.function.clone(),
                method: first.method.clone(),
                dims: first.dims,
                n: first.n,
                m: first.m,
                n_shot1: first.n_shot1,
                n_shot2: first.n_shot2,
                statevector: first.statevector,
                sweep_axis: first.sweep_axis.clone(),
                sweep_value: first.sweep_value,
                seeds: g.len(),
                rmse_mean,
                rmse_std,
                l2ns_mean,
                l2ns_std,
                m_chosen_mode: mode.to_string(),
            }
        })
        .collect())
}

pub fn read_records(path: &Path) -> Result<Vec<SweepRecord>, CliError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<Vec<SweepRecord>, _>>()?)
}

pub fn write_aggregate<W: std::io::Write>(rows: &[AggregateRow], w: W) -> Result<(), CliError> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}
