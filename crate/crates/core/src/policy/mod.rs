//! Allocation policies.
//!
//! A policy turns the set of active jobs into an [`AllocationPlan`]. The
//! engine calls it at every arrival, departure and (for lease-based
//! policies) lease expiry, and re-derives the whole plan each time.

mod baseline;
mod themis;
mod wfq;

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

pub use baseline::{afs_allocate, fifo_allocate, maxmin_allocate, srsf_allocate};
pub use themis::ThemisState;
pub use wfq::{classify, derive_thresholds, derive_weights, wfq_allocate, PcsParams, WfqConfig};

use crate::engine::{ClusterState, JobRuntime, SimConfig};
use crate::error::SimError;

/// Allocation per job, aligned with the job slice the policy was given.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AllocationPlan(Vec<f64>);

impl AllocationPlan {
    pub fn zeros(n: usize) -> Self {
        Self(alloc::vec![0.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl From<Vec<f64>> for AllocationPlan {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl core::ops::Index<usize> for AllocationPlan {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Policy names accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PolicyKind {
    Fifo,
    Srsf,
    MaxMin,
    Themis,
    Afs,
    Pcs,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 6] = [
        PolicyKind::Fifo,
        PolicyKind::Srsf,
        PolicyKind::MaxMin,
        PolicyKind::Themis,
        PolicyKind::Afs,
        PolicyKind::Pcs,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::Fifo => "fifo",
            PolicyKind::Srsf => "srsf",
            PolicyKind::MaxMin => "maxmin",
            PolicyKind::Themis => "themis",
            PolicyKind::Afs => "afs",
            PolicyKind::Pcs => "pcs",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| SimError::InvalidPolicy(format!("unknown policy {s:?}")))
    }
}

/// A policy instance. Holds only per-run state; clone it for a new run or a
/// playout.
#[derive(Debug, Clone)]
pub enum Policy {
    Fifo,
    Srsf,
    MaxMin,
    Themis(ThemisState),
    Afs,
    Pcs(WfqConfig),
}

impl Policy {
    pub fn themis() -> Self {
        Policy::Themis(ThemisState::default())
    }

    /// Parameter-free policy by kind. PCS needs a config, see [`Policy::Pcs`]
    /// and [`Policy::pcs_from_params`].
    pub fn from_kind(kind: PolicyKind) -> Result<Self, SimError> {
        Ok(match kind {
            PolicyKind::Fifo => Policy::Fifo,
            PolicyKind::Srsf => Policy::Srsf,
            PolicyKind::MaxMin => Policy::MaxMin,
            PolicyKind::Themis => Policy::themis(),
            PolicyKind::Afs => Policy::Afs,
            PolicyKind::Pcs => {
                return Err(SimError::InvalidPolicy(
                    "pcs needs either a WFQ config or (T, W, zeta_min)".into(),
                ))
            }
        })
    }

    /// PCS with thresholds and weights derived from a size sample.
    pub fn pcs_from_params(params: &PcsParams, size_sample: &[f64]) -> Result<Self, SimError> {
        Ok(Policy::Pcs(params.resolve(size_sample)?))
    }

    pub fn kind(&self) -> PolicyKind {
        match self {
            Policy::Fifo => PolicyKind::Fifo,
            Policy::Srsf => PolicyKind::Srsf,
            Policy::MaxMin => PolicyKind::MaxMin,
            Policy::Themis(_) => PolicyKind::Themis,
            Policy::Afs => PolicyKind::Afs,
            Policy::Pcs(_) => PolicyKind::Pcs,
        }
    }

    pub fn name(&self) -> &'static str {
        self.kind().as_str()
    }

    pub fn validate(&self) -> Result<(), SimError> {
        match self {
            Policy::Pcs(cfg) => cfg.validate(),
            _ => Ok(()),
        }
    }

    /// Lease period if the policy wants periodic reallocation.
    pub fn lease(&self, cfg: &SimConfig) -> Option<f64> {
        matches!(self, Policy::Themis(_)).then_some(cfg.lease_duration)
    }

    /// Sets per-job policy fields (class, cap) when a job is admitted.
    pub(crate) fn admit(&mut self, rt: &mut JobRuntime, state: &ClusterState) {
        match self {
            Policy::Pcs(cfg) => {
                rt.class_index = Some(classify(rt.job.size, &cfg.thresholds));
                rt.cap = rt.job.demand.demand_cap(cfg.zeta_min) as f64;
            }
            Policy::Themis(themis) => themis.admit(rt, state),
            _ => {}
        }
    }

    pub(crate) fn on_departure(&mut self, seq: u64) {
        if let Policy::Themis(themis) = self {
            themis.forget(seq);
        }
    }

    /// Computes a plan for `jobs` (in arrival order) at time `clock`.
    pub fn allocate(&self, jobs: &[JobRuntime], clock: f64, capacity: f64, eps: f64) -> AllocationPlan {
        match self {
            Policy::Fifo => fifo_allocate(jobs, capacity, eps),
            Policy::Srsf => srsf_allocate(jobs, clock, capacity, eps),
            Policy::MaxMin => maxmin_allocate(jobs, capacity, eps),
            Policy::Themis(state) => state.allocate(jobs, clock, capacity, eps),
            Policy::Afs => afs_allocate(jobs, clock, capacity, eps),
            Policy::Pcs(cfg) => wfq_allocate(jobs, cfg, capacity, eps),
        }
    }
}

/// Hands out capacity in the given order, each job up to `limit(job)`.
pub(crate) fn greedy_in_order(
    jobs: &[JobRuntime],
    order: impl IntoIterator<Item = usize>,
    capacity: f64,
    eps: f64,
    out: &mut [f64],
) -> f64 {
    let mut residual = capacity;
    for i in order {
        if residual <= eps {
            break;
        }
        let give = residual.min(jobs[i].max_alloc() - out[i]);
        if give > 0.0 {
            out[i] += give;
            residual -= give;
        }
    }
    residual
}

#[cfg(test)]
pub(crate) mod test_util {
    use super::*;
    use crate::workload::{DemandFunction, Job};
    use alloc::sync::Arc;

    pub fn rt(id: &str, seq: u64, size: f64, max_alloc: u32) -> JobRuntime {
        JobRuntime::new(Arc::new(Job::linear(id, 0.0, size, max_alloc).unwrap()), seq, 0.0)
    }

    pub fn rt_with(id: &str, seq: u64, df: DemandFunction) -> JobRuntime {
        JobRuntime::new(Arc::new(Job::new(id, 0.0, df).unwrap()), seq, 0.0)
    }
}
