use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::DemandFunction;
use crate::error::WorkloadError;

/// A job as the scheduler sees it on arrival.
#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub id: String,
    /// Arrival time on the simulation clock, in seconds.
    pub arrival: f64,
    /// Scheduler-visible size: execution time at one unit of allocation.
    pub size: f64,
    /// Service the job actually needs. Equals `size` unless size error was
    /// injected.
    pub true_size: f64,
    pub demand: DemandFunction,
}

impl Job {
    /// Job whose size is the demand function's minimum-allocation time.
    pub fn new(id: impl Into<String>, arrival: f64, demand: DemandFunction) -> Result<Self, WorkloadError> {
        let size = demand.min_exec_time();
        let job = Self {
            id: id.into(),
            arrival,
            size,
            true_size: size,
            demand,
        };
        job.validate()?;
        Ok(job)
    }

    /// Linearly scaling job.
    pub fn linear(id: impl Into<String>, arrival: f64, size: f64, max_alloc: u32) -> Result<Self, WorkloadError> {
        let id = id.into();
        if !(size.is_finite() && size > 0.0) {
            return Err(WorkloadError::InvalidJob {
                id,
                reason: alloc::format!("size {size} must be positive"),
            });
        }
        Self::new(id, arrival, DemandFunction::linear(size, max_alloc)?)
    }

    pub fn max_alloc(&self) -> u32 {
        self.demand.max_alloc()
    }

    pub fn validate(&self) -> Result<(), WorkloadError> {
        let bad = |reason: &str| WorkloadError::InvalidJob {
            id: self.id.clone(),
            reason: reason.to_string(),
        };
        if !(self.size.is_finite() && self.size > 0.0) {
            return Err(bad("size must be positive"));
        }
        if !(self.true_size.is_finite() && self.true_size > 0.0) {
            return Err(bad("true size must be positive"));
        }
        if !(self.arrival.is_finite() && self.arrival >= 0.0) {
            return Err(bad("arrival must be non-negative"));
        }
        Ok(())
    }
}

/// Canonical job order: arrival time, then id.
pub fn arrival_order(a: &Job, b: &Job) -> Ordering {
    a.arrival
        .total_cmp(&b.arrival)
        .then_with(|| a.id.cmp(&b.id))
}

/// Jobs sorted by arrival, immutable once built.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    jobs: Vec<Arc<Job>>,
    pub capacity_hint: Option<u32>,
    pub seed: Option<u64>,
}

impl Trace {
    pub fn new(mut jobs: Vec<Job>) -> Result<Self, WorkloadError> {
        let mut seen = BTreeSet::new();
        for job in &jobs {
            job.validate()?;
            if !seen.insert(job.id.as_str()) {
                return Err(WorkloadError::DuplicateId(job.id.clone()));
            }
        }
        jobs.sort_by(arrival_order);
        Ok(Self {
            jobs: jobs.into_iter().map(Arc::new).collect(),
            capacity_hint: None,
            seed: None,
        })
    }

    pub fn jobs(&self) -> &[Arc<Job>] {
        &self.jobs
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    /// Scheduler-visible sizes in trace order.
    pub fn sizes(&self) -> Vec<f64> {
        self.jobs.iter().map(|j| j.size).collect()
    }

    pub fn get(&self, id: &str) -> Option<&Arc<Job>> {
        self.jobs.iter().find(|j| j.id == id)
    }

    /// Rebuilds the trace from modified jobs (ids and arrivals unchanged).
    pub(crate) fn map_jobs(&self, mut f: impl FnMut(&Job) -> Job) -> Self {
        Self {
            jobs: self.jobs.iter().map(|j| Arc::new(f(j))).collect(),
            capacity_hint: self.capacity_hint,
            seed: self.seed,
        }
    }
}
