//! Reading run CSVs back and collapsing seed replicates into per-iteration
//! median and interquartile summaries.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

/// Minimal view of a run CSV row used for aggregation.
#[derive(Debug, Clone, Copy)]
pub struct RunRow {
    pub iteration: usize,
    pub psi: f64,
    pub constraint_violation: f64,
}

/// Reads `r`, `psi` and `constraint_violation` from a run CSV, erroring with
/// the missing column's name when the header does not match.
pub fn read_run_csv(path: &Path) -> Result<Vec<RunRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let (ri, pi, ci) = (col("r")?, col("psi")?, col("constraint_violation")?);
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let parse = |idx: usize| -> Result<f64> {
            record
                .get(idx)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| Error::Config(format!("bad numeric cell in {}", path.display())))
        };
        rows.push(RunRow {
            iteration: parse(ri)? as usize,
            psi: parse(pi)?,
            constraint_violation: parse(ci)?,
        });
    }
    Ok(rows)
}

/// Linear-interpolation quantile of a sorted slice (the common "type 7"
/// convention: `h = q(n−1)`).
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    assert!((0.0..=1.0).contains(&q));
    let h = q * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

/// One aggregate line: per (solver, iteration) the median and quartiles of
/// the gap and the constraint violation across seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub solver: String,
    pub iteration: usize,
    pub psi_median: f64,
    pub psi_q25: f64,
    pub psi_q75: f64,
    pub cv_median: f64,
    pub cv_q25: f64,
    pub cv_q75: f64,
}

pub const AGGREGATE_HEADER: [&str; 8] = [
    "solver",
    "r",
    "psi_median",
    "psi_q25",
    "psi_q75",
    "cv_median",
    "cv_q25",
    "cv_q75",
];

/// Collapses one solver's seed replicates (each a row list) into aggregate
/// rows ordered by iteration.
pub fn aggregate_runs(solver: &str, replicates: &[Vec<RunRow>]) -> Vec<AggregateRow> {
    let mut by_iteration: BTreeMap<usize, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for rep in replicates {
        for row in rep {
            let entry = by_iteration.entry(row.iteration).or_default();
            entry.0.push(row.psi);
            entry.1.push(row.constraint_violation);
        }
    }
    by_iteration
        .into_iter()
        .map(|(iteration, (mut psis, mut cvs))| {
            psis.sort_by(|a, b| a.partial_cmp(b).unwrap());
            cvs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            AggregateRow {
                solver: solver.to_string(),
                iteration,
                psi_median: quantile(&psis, 0.5),
                psi_q25: quantile(&psis, 0.25),
                psi_q75: quantile(&psis, 0.75),
                cv_median: quantile(&cvs, 0.5),
                cv_q25: quantile(&cvs, 0.25),
                cv_q75: quantile(&cvs, 0.75),
            }
        })
        .collect()
}

/// Reads an aggregate CSV back (used by plotting and tests).
pub fn read_aggregate_csv(path: &Path) -> Result<Vec<AggregateRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let idx: Vec<usize> = AGGREGATE_HEADER
        .iter()
        .map(|name| col(name))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let num = |i: usize| -> Result<f64> {
            record
                .get(idx[i])
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Config(format!("bad numeric cell in {}", path.display())))
        };
        rows.push(AggregateRow {
            solver: record.get(idx[0]).unwrap_or_default().to_string(),
            iteration: num(1)? as usize,
            psi_median: num(2)?,
            psi_q25: num(3)?,
            psi_q75: num(4)?,
            cv_median: num(5)?,
            cv_q25: num(6)?,
            cv_q75: num(7)?,
        });
    }
    Ok(rows)
}
