//! Per-job result CSVs, run summaries and comparison tables.

use std::path::Path;

use pcs_core::metrics::{aggregate, per_job, pred_err, unfairness, Measure, Metric};
use pcs_core::SimResult;
use serde::{Deserialize, Serialize};

use super::meta::Metadata;
use super::{write_file, FormatError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobRow {
    pub job_id: String,
    pub arrival: f64,
    pub start: f64,
    pub finish: f64,
    pub jct: f64,
    pub jct_pred: Option<f64>,
    pub pred_err: Option<f64>,
    pub fft: Option<f64>,
    pub unfairness: Option<f64>,
}

pub fn job_rows(result: &SimResult) -> Vec<JobRow> {
    result
        .records
        .iter()
        .map(|r| JobRow {
            job_id: r.id.clone(),
            arrival: r.arrival,
            start: r.start,
            finish: r.finish,
            jct: r.jct,
            jct_pred: r.jct_pred,
            pred_err: r.jct_pred.and_then(|p| pred_err(r.jct, p).ok()),
            fft: r.fft,
            unfairness: r.fft.and_then(|f| unfairness(r.finish, r.arrival, f).ok()),
        })
        .collect()
}

/// `job_id,arrival,start,finish,jct,jct_pred,pred_err,fft,unfairness`, after
/// a `#` metadata line. Missing values are left empty.
pub fn write_jobs_csv(path: &Path, result: &SimResult, meta: &Metadata) -> Result<(), FormatError> {
    let mut out = meta.comment_line().into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        for row in job_rows(result) {
            w.serialize(row)?;
        }
        w.flush().map_err(|e| FormatError::io(path, e))?;
    }
    write_file(path, &out)
}

pub fn read_jobs_csv(path: &Path) -> Result<Vec<JobRow>, FormatError> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)?;
    r.deserialize().map(|row| row.map_err(FormatError::from)).collect()
}

/// The summary measures of one metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureSet {
    pub avg: f64,
    pub p50: f64,
    pub p90: f64,
    pub p99: f64,
    pub p100: f64,
}

impl MeasureSet {
    pub fn of(values: &[f64]) -> Option<Self> {
        let m = |k| aggregate(values, k).ok();
        Some(Self {
            avg: m(Measure::Avg)?,
            p50: m(Measure::Percentile(50))?,
            p90: m(Measure::Percentile(90))?,
            p99: m(Measure::Percentile(99))?,
            p100: m(Measure::Percentile(100))?,
        })
    }

    pub fn values(&self) -> [f64; 5] {
        [self.avg, self.p50, self.p90, self.p99, self.p100]
    }
}

/// Summary of one run. Prediction errors are absolute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub policy: String,
    pub jobs: usize,
    pub events: u64,
    pub jct: MeasureSet,
    pub pred_err: Option<MeasureSet>,
    pub unfairness: Option<MeasureSet>,
}

impl RunSummary {
    pub fn of(result: &SimResult) -> Self {
        let set = |m| per_job(result, m).ok().and_then(|v| MeasureSet::of(&v));
        Self {
            policy: result.policy.clone(),
            jobs: result.records.len(),
            events: result.events,
            jct: MeasureSet::of(&result.jcts()).unwrap_or(MeasureSet {
                avg: 0.0,
                p50: 0.0,
                p90: 0.0,
                p99: 0.0,
                p100: 0.0,
            }),
            pred_err: set(Metric::PredErr),
            unfairness: set(Metric::Unfairness),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryFile {
    pub metadata: Metadata,
    pub summary: RunSummary,
}

pub fn write_summary_json(path: &Path, summary: &SummaryFile) -> Result<(), FormatError> {
    write_file(path, serde_json::to_string_pretty(summary)?.as_bytes())
}

const MEASURE_NAMES: [&str; 5] = ["avg", "p50", "p90", "p99", "p100"];

/// One row per policy: `policy,jct_avg,...,jct_p100,pred_err_avg,...`.
/// Missing metrics are left empty.
pub fn write_comparison_csv(
    path: &Path,
    rows: &[(String, RunSummary)],
    meta: &Metadata,
) -> Result<(), FormatError> {
    let mut out = meta.comment_line().into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        let mut header = vec!["policy".to_string()];
        for metric in Metric::ALL {
            header.extend(MEASURE_NAMES.iter().map(|m| format!("{metric}_{m}")));
        }
        w.write_record(&header)?;
        for (label, s) in rows {
            let mut record = vec![label.clone()];
            for set in [Some(s.jct), s.pred_err, s.unfairness] {
                match set {
                    Some(set) => record.extend(set.values().iter().map(|v| v.to_string())),
                    None => record.extend(std::iter::repeat_n(String::new(), 5)),
                }
            }
            w.write_record(&record)?;
        }
        w.flush().map_err(|e| FormatError::io(path, e))?;
    }
    write_file(path, &out)
}
