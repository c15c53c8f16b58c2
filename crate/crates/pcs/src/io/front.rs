//! Pareto-front files (JSON with full detail, CSV with `T,W,zeta_min,obj_*`).

use std::path::Path;

use pcs_core::solver::{Candidate, ParetoPoint, SearchReport};
use pcs_core::{ObjectiveSpec, PcsParams, WfqConfig};
use serde::{Deserialize, Serialize};

use super::meta::Metadata;
use super::spec::{ObjectiveEntry, SpecFile};
use super::{read_to_string, write_file, FormatError, Real};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontRow {
    /// Absent for configurations searched with raw thresholds and weights.
    #[serde(rename = "T")]
    pub t: Option<Real>,
    #[serde(rename = "W")]
    pub w: Option<f64>,
    pub zeta_min: f64,
    pub thresholds: Vec<Real>,
    pub weights: Vec<f64>,
    pub objectives: Vec<f64>,
}

impl FrontRow {
    pub fn from_point(p: &ParetoPoint) -> Self {
        let params = p.candidate.params();
        Self {
            t: params.map(|q| Real(q.t)),
            w: params.map(|q| q.w),
            zeta_min: p.resolved.zeta_min,
            thresholds: p.resolved.thresholds.iter().map(|&t| Real(t)).collect(),
            weights: p.resolved.weights.clone(),
            objectives: p.objectives.clone(),
        }
    }

    /// The three-parameter form, when the row has one.
    pub fn params(&self) -> Option<PcsParams> {
        Some(PcsParams {
            t: self.t?.0,
            w: self.w?,
            zeta_min: self.zeta_min,
        })
    }

    /// `(T, W, zeta_min)` when present, else the stored thresholds and weights.
    pub fn candidate(&self) -> Result<Candidate, String> {
        match self.params() {
            Some(p) => p.validate().map(|_| Candidate::Heuristic(p)).map_err(|e| e.to_string()),
            None => WfqConfig::new(
                self.thresholds.iter().map(|r| r.0).collect(),
                self.weights.clone(),
                self.zeta_min,
            )
            .map(Candidate::Raw)
            .map_err(|e| e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontFile {
    pub metadata: Metadata,
    pub objectives: Vec<ObjectiveEntry>,
    pub evaluations: usize,
    pub cache_hits: usize,
    pub generations_completed: usize,
    /// Error that stopped the search early, if any.
    pub aborted: Option<String>,
    pub points: Vec<FrontRow>,
}

impl FrontFile {
    pub fn new(metadata: Metadata, spec: &ObjectiveSpec, report: &SearchReport) -> Self {
        Self {
            metadata,
            objectives: SpecFile::from_spec(spec).objectives,
            evaluations: report.evaluations,
            cache_hits: report.cache_hits,
            generations_completed: report.generations_completed,
            aborted: report.aborted.as_ref().map(|e| e.to_string()),
            points: report.front.iter().map(FrontRow::from_point).collect(),
        }
    }
}

pub fn write_front_json(path: &Path, front: &FrontFile) -> Result<(), FormatError> {
    write_file(path, serde_json::to_string_pretty(front)?.as_bytes())
}

pub fn write_front_csv(path: &Path, front: &FrontFile) -> Result<(), FormatError> {
    let k = front.objectives.len();
    let mut out = front.metadata.comment_line().into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        let mut header: Vec<String> = vec!["T".into(), "W".into(), "zeta_min".into()];
        header.extend((1..=k).map(|i| format!("obj_{i}")));
        w.write_record(&header)?;
        for row in &front.points {
            let mut record = vec![
                row.t.map_or(String::new(), |t| t.0.to_string()),
                row.w.map_or(String::new(), |w| w.to_string()),
                row.zeta_min.to_string(),
            ];
            record.extend(row.objectives.iter().map(|v| v.to_string()));
            w.write_record(&record)?;
        }
        w.flush().map_err(|e| FormatError::io(path, e))?;
    }
    write_file(path, &out)
}

pub fn load_front(path: &Path) -> Result<FrontFile, FormatError> {
    serde_json::from_str(&read_to_string(path)?).map_err(|e| FormatError::invalid(path, e))
}

/// Objective vectors of a front CSV.
pub fn read_front_csv_objectives(path: &Path) -> Result<Vec<Vec<f64>>, FormatError> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
    let mut out = Vec::new();
    for record in r.records() {
        let record = record?;
        let obj = record
            .iter()
            .skip(3)
            .map(|v| v.parse::<f64>().map_err(|e| FormatError::invalid(path, e)))
            .collect::<Result<Vec<_>, _>>()?;
        out.push(obj);
    }
    Ok(out)
}
