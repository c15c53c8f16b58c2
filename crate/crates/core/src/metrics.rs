//! Prediction error, fair finish time, unfairness and their aggregates.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::engine::{run, SimConfig, SimResult};
use crate::error::{MetricError, SimError, SolverError};
use crate::math;
use crate::policy::Policy;
use crate::workload::Trace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    Jct,
    PredErr,
    Unfairness,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Jct, Metric::PredErr, Metric::Unfairness];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Jct => "jct",
            Metric::PredErr => "pred_err",
            Metric::Unfairness => "unfairness",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = MetricError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| MetricError::InvalidMeasure(format!("metric {s}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Measure {
    Avg,
    /// Nearest-rank percentile, `1..=100`.
    Percentile(u8),
}

impl Measure {
    /// Measures reported in run summaries.
    pub const SUMMARY: [Measure; 5] = [
        Measure::Avg,
        Measure::Percentile(50),
        Measure::Percentile(90),
        Measure::Percentile(99),
        Measure::Percentile(100),
    ];

    pub fn percentile(p: u8) -> Result<Self, MetricError> {
        if (1..=100).contains(&p) {
            Ok(Measure::Percentile(p))
        } else {
            Err(MetricError::InvalidMeasure(format!("p{p}")))
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::Avg => f.write_str("avg"),
            Measure::Percentile(p) => write!(f, "p{p}"),
        }
    }
}

impl FromStr for Measure {
    type Err = MetricError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "avg" {
            return Ok(Measure::Avg);
        }
        s.strip_prefix('p')
            .and_then(|p| p.parse::<u8>().ok())
            .ok_or_else(|| MetricError::InvalidMeasure(String::from(s)))
            .and_then(Measure::percentile)
    }
}

/// Ordered objectives to minimize. Repeated entries are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectiveSpec {
    entries: Vec<(Metric, Measure)>,
}

impl ObjectiveSpec {
    pub fn new(entries: Vec<(Metric, Measure)>) -> Result<Self, SolverError> {
        if entries.is_empty() {
            return Err(SolverError::InvalidObjective("at least one objective".into()));
        }
        for (_, measure) in &entries {
            if let Measure::Percentile(p) = measure {
                Measure::percentile(*p)?;
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[(Metric, Measure)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn needs_fft(&self) -> bool {
        self.entries.iter().any(|(m, _)| *m == Metric::Unfairness)
    }

    pub fn needs_predictions(&self) -> bool {
        self.entries.iter().any(|(m, _)| *m == Metric::PredErr)
    }
}

/// Signed prediction error in percent: `100 * (true - pred) / pred`.
pub fn pred_err(jct_true: f64, jct_pred: f64) -> Result<f64, MetricError> {
    if !(jct_pred > 0.0) {
        return Err(MetricError::NonPositivePrediction(jct_pred));
    }
    Ok(100.0 * (jct_true - jct_pred) / jct_pred)
}

/// Lateness relative to the fair finish time, in percent of the fair
/// duration; zero for jobs that finish no later than their fair finish time.
pub fn unfairness(finish: f64, arrival: f64, fft: f64) -> Result<f64, MetricError> {
    let fair = fft - arrival;
    if !(fair > 0.0) {
        return Err(MetricError::DegenerateFft { arrival, fft });
    }
    Ok((100.0 * (finish - fft) / fair).max(0.0))
}

/// Fair finish times, in trace order: each job's finish time in a max-min
/// replay of the same trace with true sizes and no restart overhead.
pub fn compute_fft(trace: &Trace, cfg: &SimConfig) -> Result<Vec<f64>, SimError> {
    let mut fair_cfg = cfg.clone().without_predictions();
    fair_cfg.restart_overhead = 0.0;
    let fair = run(trace, Policy::MaxMin, &fair_cfg)?;
    Ok(fair.records.iter().map(|r| r.finish).collect())
}

/// Stores fair finish times (trace order) on the result's records.
pub fn attach_fft(result: &mut SimResult, fft: &[f64]) {
    for (r, &f) in result.records.iter_mut().zip(fft) {
        r.fft = Some(f);
    }
}

pub fn aggregate(values: &[f64], measure: Measure) -> Result<f64, MetricError> {
    if values.is_empty() {
        return Err(MetricError::Empty);
    }
    match measure {
        Measure::Avg => Ok(values.iter().sum::<f64>() / values.len() as f64),
        Measure::Percentile(p) => {
            let mut sorted = values.to_vec();
            sorted.sort_by(f64::total_cmp);
            let rank = math::ceil(p as f64 * sorted.len() as f64 / 100.0) as usize;
            Ok(sorted[rank.clamp(1, sorted.len()) - 1])
        }
    }
}

/// Per-job values of `metric`. Prediction errors are absolute.
pub fn per_job(result: &SimResult, metric: Metric) -> Result<Vec<f64>, MetricError> {
    result
        .records
        .iter()
        .map(|r| match metric {
            Metric::Jct => Ok(r.jct),
            Metric::PredErr => {
                let pred = r
                    .jct_pred
                    .ok_or_else(|| MetricError::Missing(r.id.clone(), "prediction"))?;
                pred_err(r.jct, pred).map(f64::abs)
            }
            Metric::Unfairness => {
                let fft = r
                    .fft
                    .ok_or_else(|| MetricError::Missing(r.id.clone(), "fair finish time"))?;
                unfairness(r.finish, r.arrival, fft)
            }
        })
        .collect()
}

/// One scalar per objective, in spec order; lower is better.
pub fn evaluate_objectives(result: &SimResult, spec: &ObjectiveSpec) -> Result<Vec<f64>, MetricError> {
    let mut cache: [Option<Vec<f64>>; 3] = [None, None, None];
    spec.entries()
        .iter()
        .map(|&(metric, measure)| {
            let slot = &mut cache[metric as usize];
            if slot.is_none() {
                *slot = Some(per_job(result, metric)?);
            }
            aggregate(slot.as_ref().unwrap(), measure)
        })
        .collect()
}

/// `(metric, measure, value)` for every metric the result supports and each
/// of the summary measures.
pub fn summarize(result: &SimResult) -> Vec<(Metric, Measure, f64)> {
    let mut out = Vec::new();
    for metric in Metric::ALL {
        let Ok(values) = per_job(result, metric) else { continue };
        for measure in Measure::SUMMARY {
            if let Ok(v) = aggregate(&values, measure) {
                out.push((metric, measure, v));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::JobRecord;
    use crate::workload::Job;
    use alloc::vec;

    #[test]
    fn pred_err_examples() {
        assert_eq!(pred_err(5.0, 5.0).unwrap(), 0.0);
        assert_eq!(pred_err(10.0, 5.0).unwrap(), 100.0);
        assert_eq!(pred_err(2.5, 5.0).unwrap(), -50.0);
        assert!(pred_err(1.0, 0.0).is_err());
    }

    #[test]
    fn unfairness_examples() {
        assert_eq!(unfairness(10.0, 0.0, 10.0).unwrap(), 0.0);
        assert_eq!(unfairness(8.0, 0.0, 10.0).unwrap(), 0.0);
        assert_eq!(unfairness(20.0, 5.0, 15.0).unwrap(), 50.0);
        assert!(unfairness(1.0, 5.0, 5.0).is_err());
    }

    #[test]
    fn aggregate_examples() {
        assert_eq!(aggregate(&[1.0, 2.0, 3.0], Measure::Avg).unwrap(), 2.0);
        assert_eq!(aggregate(&[10.0, 20.0, 30.0, 40.0], Measure::Percentile(99)).unwrap(), 40.0);
        assert_eq!(aggregate(&[10.0, 20.0, 30.0, 40.0], Measure::Percentile(50)).unwrap(), 20.0);
        assert_eq!(aggregate(&[10.0, 20.0, 30.0, 40.0], Measure::Percentile(1)).unwrap(), 10.0);
        for m in Measure::SUMMARY {
            assert_eq!(aggregate(&[7.5], m).unwrap(), 7.5);
        }
        assert_eq!(aggregate(&[], Measure::Avg), Err(MetricError::Empty));
    }

    #[test]
    fn measure_parsing() {
        assert_eq!("avg".parse::<Measure>().unwrap(), Measure::Avg);
        assert_eq!("p99".parse::<Measure>().unwrap(), Measure::Percentile(99));
        assert!("p0".parse::<Measure>().is_err());
        assert!("p101".parse::<Measure>().is_err());
        assert!("median".parse::<Measure>().is_err());
        assert_eq!("pred_err".parse::<Metric>().unwrap(), Metric::PredErr);
    }

    fn record(jct: f64, pred: f64) -> JobRecord {
        JobRecord {
            id: "x".into(),
            arrival: 0.0,
            start: 0.0,
            finish: jct,
            jct,
            jct_pred: Some(pred),
            fft: None,
            allocation_changes: 1,
            preemptions: 0,
        }
    }

    #[test]
    fn objectives_in_spec_order() {
        let result = SimResult {
            policy: "fifo".into(),
            seed: None,
            records: vec![record(4.0, 4.0), record(6.0, 3.0)],
            events: 0,
            service_integral: 0.0,
            total_service: 0.0,
        };
        let spec = ObjectiveSpec::new(vec![(Metric::Jct, Measure::Avg)]).unwrap();
        assert_eq!(evaluate_objectives(&result, &spec).unwrap(), vec![5.0]);
        let spec = ObjectiveSpec::new(vec![
            (Metric::Jct, Measure::Avg),
            (Metric::PredErr, Measure::Percentile(99)),
            (Metric::Jct, Measure::Percentile(100)),
        ])
        .unwrap();
        assert_eq!(evaluate_objectives(&result, &spec).unwrap(), vec![5.0, 100.0, 6.0]);
        let spec = ObjectiveSpec::new(vec![(Metric::Unfairness, Measure::Avg)]).unwrap();
        assert!(evaluate_objectives(&result, &spec).is_err());
        assert!(ObjectiveSpec::new(vec![]).is_err());
    }

    #[test]
    fn fft_examples() {
        let single = Trace::new(vec![Job::linear("a", 3.0, 12.0, 2).unwrap()]).unwrap();
        assert_eq!(compute_fft(&single, &SimConfig::new(4.0)).unwrap(), vec![9.0]);
        let pair = Trace::new(vec![
            Job::linear("a", 0.0, 4.0, 1).unwrap(),
            Job::linear("b", 0.0, 4.0, 1).unwrap(),
        ])
        .unwrap();
        assert_eq!(compute_fft(&pair, &SimConfig::new(1.0)).unwrap(), vec![8.0, 8.0]);
    }
}
