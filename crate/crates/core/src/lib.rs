//! Predictability-centric cluster scheduling.
//!
//! A deterministic fluid simulator for elastic jobs, a family of allocation
//! policies (FIFO, SRSF, Max-Min, a Themis-style finish-time-fair policy, an
//! AFS-style efficiency greedy and class-based WFQ), a playout predictor that
//! issues a completion-time estimate for every arriving job, the metrics used
//! to score runs, and an SPEA2 search over the WFQ parameter space.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and the
//! parallel evaluator live in the `pcs` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod engine;
pub mod error;
pub mod metrics;
pub mod policy;
pub mod predictor;
pub mod solver;
pub mod workload;

pub(crate) mod math;

pub use engine::{run, JobRecord, SimConfig, SimResult, Simulation, Snapshot};
pub use error::{MetricError, SimError, SolverError, WorkloadError};
pub use metrics::{Measure, Metric, ObjectiveSpec};
pub use policy::{PcsParams, Policy, PolicyKind, WfqConfig};
pub use predictor::predict_jct;
pub use workload::{DemandFunction, Job, Trace};
