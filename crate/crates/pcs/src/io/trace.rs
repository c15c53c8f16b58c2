//! Trace files: CSV with an optional per-job speedup sidecar, or JSON with
//! inline demand tables.

use std::collections::BTreeMap;
use std::path::Path;

use pcs_core::workload::{DemandFunction, Job, Trace};
use pcs_core::WorkloadError;
use serde::{Deserialize, Serialize};

use super::{read_to_string, row_error, write_file, FormatError};

/// Execution time per allocation, keyed by the allocation as a string.
pub type DemandTable = BTreeMap<String, f64>;

/// One job as written in trace and snapshot files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobSpec {
    pub job_id: String,
    pub arrival: f64,
    pub size: f64,
    pub max_gpus: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demand: Option<DemandTable>,
}

impl JobSpec {
    pub fn from_job(job: &Job) -> Self {
        let demand = (!job.demand.is_linear()).then(|| {
            job.demand
                .points()
                .iter()
                .map(|(g, t)| (g.to_string(), *t))
                .collect()
        });
        Self {
            job_id: job.id.clone(),
            arrival: job.arrival,
            size: job.size,
            max_gpus: job.max_alloc(),
            demand,
        }
    }

    /// Jobs without a demand table scale linearly up to `max_gpus`.
    pub fn to_job(&self) -> Result<Job, WorkloadError> {
        let invalid = |reason: String| WorkloadError::InvalidJob {
            id: self.job_id.clone(),
            reason,
        };
        if !(self.size.is_finite() && self.size > 0.0) {
            return Err(invalid(format!("size {} must be positive", self.size)));
        }
        let Some(table) = &self.demand else {
            return Job::linear(self.job_id.clone(), self.arrival, self.size, self.max_gpus);
        };
        let mut points = Vec::with_capacity(table.len());
        for (g, t) in table {
            let g: u32 = g
                .parse()
                .map_err(|_| invalid(format!("demand key {g:?} is not an allocation")))?;
            points.push((g, *t));
        }
        let demand = DemandFunction::new(points)?;
        if demand.max_alloc() != self.max_gpus {
            return Err(invalid(format!(
                "demand table ends at {} but max_gpus is {}",
                demand.max_alloc(),
                self.max_gpus
            )));
        }
        let exec1 = demand.min_exec_time();
        if (exec1 - self.size).abs() > 1e-9 * self.size.max(1.0) {
            return Err(invalid(format!(
                "size {} differs from the single-unit execution time {exec1}",
                self.size
            )));
        }
        Job::new(self.job_id.clone(), self.arrival, demand)
    }
}

#[derive(Debug, Deserialize)]
struct CsvRow {
    job_id: String,
    arrival: f64,
    size: f64,
    max_gpus: u32,
    #[serde(default)]
    speedup_file: Option<String>,
}

/// Loads a `.csv` or `.json` trace, chosen by extension.
pub fn load_trace(path: &Path) -> Result<Trace, FormatError> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => load_csv(path),
        Some("json") => load_json(path),
        _ => Err(FormatError::invalid(path, "trace must end in .csv or .json")),
    }
}

pub fn load_csv(path: &Path) -> Result<Trace, FormatError> {
    let text = read_to_string(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let base = path.parent().unwrap_or(Path::new("."));
    let mut sidecars: BTreeMap<String, BTreeMap<String, DemandTable>> = BTreeMap::new();
    let headers = reader.headers()?.clone();
    let mut jobs = Vec::new();
    for record in reader.records() {
        let record = record?;
        let row = record.position().map_or(0, |p| p.line());
        let parsed: CsvRow = record
            .deserialize(Some(&headers))
            .map_err(|e| row_error(path, row, e))?;
        let demand = match parsed.speedup_file.as_deref().filter(|f| !f.is_empty()) {
            None => None,
            Some(file) => {
                if !sidecars.contains_key(file) {
                    let side = base.join(file);
                    let table = serde_json::from_str(&read_to_string(&side)?)
                        .map_err(|e| FormatError::invalid(&side, e))?;
                    sidecars.insert(file.to_string(), table);
                }
                let table = sidecars[file].get(&parsed.job_id).cloned().ok_or_else(|| {
                    row_error(path, row, format!("{file} has no entry for {}", parsed.job_id))
                })?;
                Some(table)
            }
        };
        let spec = JobSpec {
            job_id: parsed.job_id,
            arrival: parsed.arrival,
            size: parsed.size,
            max_gpus: parsed.max_gpus,
            demand,
        };
        jobs.push(spec.to_job().map_err(|e| row_error(path, row, e))?);
    }
    Trace::new(jobs).map_err(|e| FormatError::invalid(path, e))
}

pub fn load_json(path: &Path) -> Result<Trace, FormatError> {
    let specs: Vec<JobSpec> =
        serde_json::from_str(&read_to_string(path)?).map_err(|e| FormatError::invalid(path, e))?;
    let jobs = specs
        .iter()
        .enumerate()
        .map(|(i, s)| s.to_job().map_err(|e| row_error(path, i as u64 + 1, e)))
        .collect::<Result<Vec<_>, _>>()?;
    Trace::new(jobs).map_err(|e| FormatError::invalid(path, e))
}

/// Writes the trace as JSON with inline demand tables for non-linear jobs.
pub fn write_json(path: &Path, trace: &Trace) -> Result<(), FormatError> {
    let specs: Vec<JobSpec> = trace.jobs().iter().map(|j| JobSpec::from_job(j)).collect();
    write_file(path, serde_json::to_string_pretty(&specs)?.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.join(name);
        std::fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn csv_basic_row() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "t.csv", "job_id,arrival,size,max_gpus\nj1,0.0,100.0,1\n");
        let trace = load_trace(&p).unwrap();
        let j = &trace.jobs()[0];
        assert_eq!((j.id.as_str(), j.arrival, j.size, j.max_alloc()), ("j1", 0.0, 100.0, 1));
        assert_eq!(j.demand.points(), &[(1, 100.0)]);
    }

    #[test]
    fn csv_sorted_by_arrival() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "t.csv",
            "job_id,arrival,size,max_gpus\na,5.0,1.0,1\nb,2.0,1.0,1\n",
        );
        let arrivals: Vec<f64> = load_trace(&p).unwrap().jobs().iter().map(|j| j.arrival).collect();
        assert_eq!(arrivals, vec![2.0, 5.0]);
    }

    #[test]
    fn csv_negative_size_names_row() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "t.csv",
            "job_id,arrival,size,max_gpus\nok,0,1,1\nbad,0.0,-3,1\n",
        );
        let err = load_trace(&p).unwrap_err().to_string();
        assert!(err.contains("row 3"), "{err}");
        assert!(err.contains("bad"), "{err}");
    }

    #[test]
    fn csv_with_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "sp.json", r#"{"a": {"1": 100.0, "2": 60.0}}"#);
        let p = write(
            dir.path(),
            "t.csv",
            "job_id,arrival,size,max_gpus,speedup_file\na,0,100,2,sp.json\nb,1,10,4,\n",
        );
        let trace = load_trace(&p).unwrap();
        assert_eq!(trace.get("a").unwrap().demand.points(), &[(1, 100.0), (2, 60.0)]);
        assert!(trace.get("b").unwrap().demand.is_linear());
    }

    #[test]
    fn json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "t.json",
            r#"[{"job_id":"a","arrival":1,"size":100,"max_gpus":2,"demand":{"1":100,"2":60}},
                {"job_id":"b","arrival":0,"size":8,"max_gpus":4}]"#,
        );
        let trace = load_trace(&p).unwrap();
        let out = dir.path().join("out.json");
        write_json(&out, &trace).unwrap();
        assert_eq!(load_trace(&out).unwrap(), trace);
    }

    #[test]
    fn inconsistent_demand_rejected() {
        let spec = JobSpec {
            job_id: "x".into(),
            arrival: 0.0,
            size: 50.0,
            max_gpus: 2,
            demand: Some([("1".to_string(), 100.0), ("2".to_string(), 60.0)].into()),
        };
        assert!(spec.to_job().is_err());
    }
}
