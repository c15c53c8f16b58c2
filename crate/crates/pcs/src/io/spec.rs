//! Objective-spec files: `{"objectives": [{"metric": "jct", "measure": "avg"}]}`.

use std::path::Path;

use pcs_core::metrics::{Measure, Metric, ObjectiveSpec};
use serde::{Deserialize, Serialize};

use super::{read_to_string, FormatError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectiveEntry {
    pub metric: String,
    pub measure: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecFile {
    pub objectives: Vec<ObjectiveEntry>,
}

impl SpecFile {
    pub fn from_spec(spec: &ObjectiveSpec) -> Self {
        Self {
            objectives: spec
                .entries()
                .iter()
                .map(|(m, k)| ObjectiveEntry {
                    metric: m.to_string(),
                    measure: k.to_string(),
                })
                .collect(),
        }
    }

    pub fn to_spec(&self) -> Result<ObjectiveSpec, String> {
        let entries = self
            .objectives
            .iter()
            .map(|e| {
                let metric: Metric = e.metric.parse().map_err(|err| format!("{err}"))?;
                let measure: Measure = e.measure.parse().map_err(|err| format!("{err}"))?;
                Ok((metric, measure))
            })
            .collect::<Result<Vec<_>, String>>()?;
        ObjectiveSpec::new(entries).map_err(|e| e.to_string())
    }
}

pub fn load_spec(path: &Path) -> Result<ObjectiveSpec, FormatError> {
    let file: SpecFile =
        serde_json::from_str(&read_to_string(path)?).map_err(|e| FormatError::invalid(path, e))?;
    file.to_spec().map_err(|e| FormatError::invalid(path, e))
}

/// Parses `metric:measure[,metric:measure...]`, e.g. `jct:avg,pred_err:p99`.
pub fn parse_inline(s: &str) -> Result<ObjectiveSpec, String> {
    let objectives = s
        .split(',')
        .map(|item| {
            let (metric, measure) = item
                .trim()
                .split_once(':')
                .ok_or_else(|| format!("objective {item:?} is not metric:measure"))?;
            Ok(ObjectiveEntry {
                metric: metric.into(),
                measure: measure.into(),
            })
        })
        .collect::<Result<Vec<_>, String>>()?;
    SpecFile { objectives }.to_spec()
}
