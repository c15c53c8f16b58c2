//! Cluster snapshots for the `predict` command.

use std::path::Path;
use std::sync::Arc;

use pcs_core::{Policy, Snapshot};
use serde::{Deserialize, Serialize};

use super::trace::JobSpec;
use super::{read_to_string, FormatError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotJob {
    #[serde(flatten)]
    pub job: JobSpec,
    /// Service completed so far, in seconds at one unit.
    #[serde(default)]
    pub accrued: f64,
    #[serde(default)]
    pub allocation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotFile {
    pub clock: f64,
    pub capacity: f64,
    #[serde(default)]
    pub jobs: Vec<SnapshotJob>,
}

impl SnapshotFile {
    pub fn to_snapshot(&self, policy: Policy) -> Result<Snapshot, String> {
        let jobs = self
            .jobs
            .iter()
            .map(|j| Ok((Arc::new(j.job.to_job().map_err(|e| e.to_string())?), j.accrued, j.allocation)))
            .collect::<Result<Vec<_>, String>>()?;
        Snapshot::from_parts(self.clock, self.capacity, policy, jobs).map_err(|e| e.to_string())
    }
}

pub fn load_snapshot(path: &Path) -> Result<SnapshotFile, FormatError> {
    serde_json::from_str(&read_to_string(path)?).map_err(|e| FormatError::invalid(path, e))
}
