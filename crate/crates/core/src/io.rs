//! Grid specifications and file helpers.

use std::path::Path;

use crate::error::{Error, Result};
use crate::metric::MetricInstance;
use crate::models::{ElectionModel, ModelSpec};

/// Number of points a range spec produces when it names no count.
pub const DEFAULT_GRID_POINTS: usize = 24;

/// `count` points from `lo` to `hi` inclusive, evenly spaced in log scale.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|k| {
            if k == count - 1 {
                hi
            } else {
                (a + (b - a) * k as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

pub fn linear_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count).map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64).collect()
}

fn number(text: &str) -> Result<f64> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not a number: {text:?}")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("not finite: {text:?}")));
    }
    Ok(v)
}

/// Parses `start:end:log[:count]`, `start:end:lin[:count]`, a comma list or
/// a single number.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(Error::Parse("empty grid".into()));
    }
    if !spec.contains(':') {
        return spec.split(',').map(number).collect();
    }
    let parts: Vec<&str> = spec.split(':').collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(Error::Parse(format!("expected start:end:log|lin[:count], got {spec:?}")));
    }
    let lo = number(parts[0])?;
    let hi = number(parts[1])?;
    let count = match parts.get(3) {
        Some(c) => c
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad count {c:?}")))?,
        None => DEFAULT_GRID_POINTS,
    };
    if count == 0 || count > 1_000_000 {
        return Err(Error::Parse(format!("count must be in 1..=1000000, got {count}")));
    }
    if lo > hi {
        return Err(Error::Parse(format!("start {lo} exceeds end {hi}")));
    }
    match parts[2].trim() {
        "log" => {
            if lo <= 0.0 {
                return Err(Error::Parse("log grids need a positive start".into()));
            }
            Ok(log_grid(lo, hi, count))
        }
        "lin" => Ok(linear_grid(lo, hi, count)),
        other => Err(Error::Parse(format!("unknown spacing {other:?}"))),
    }
}

/// Parses a comma list of nonnegative integers.
pub fn parse_usize_list(spec: &str) -> Result<Vec<usize>> {
    spec.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| Error::Parse(format!("not an integer: {t:?}"))))
        .collect()
}

pub fn load_instance(path: &Path) -> Result<MetricInstance> {
    MetricInstance::from_json(&std::fs::read_to_string(path)?)
}

pub fn load_model(path: &Path, instance: &MetricInstance) -> Result<ElectionModel> {
    ModelSpec::from_json(&std::fs::read_to_string(path)?)?.into_model(instance.n(), instance.m())
}
