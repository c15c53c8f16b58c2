use alloc::string::String;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WorkloadError {
    #[error("invalid demand function: {0}")]
    InvalidDemand(String),
    #[error("invalid job {id}: {reason}")]
    InvalidJob { id: String, reason: String },
    #[error("duplicate job id {0}")]
    DuplicateId(String),
    #[error("allocation {requested} exceeds max allocation {max_alloc}")]
    AllocationOutOfRange { requested: f64, max_alloc: u32 },
    #[error("invalid distribution parameters: {0}")]
    InvalidDistribution(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    /// A policy produced an allocation the engine refuses to apply.
    #[error("invariant breach at t={clock}: {detail}")]
    InvariantBreach { clock: f64, detail: String },
    #[error("event bound of {0} exceeded")]
    EventBoundExceeded(u64),
    #[error("invalid policy: {0}")]
    InvalidPolicy(String),
    #[error(transparent)]
    Workload(#[from] WorkloadError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("objective vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("invalid search space: {0}")]
    InvalidSpace(String),
    #[error("invalid objective spec: {0}")]
    InvalidObjective(String),
    #[error("empty input")]
    Empty,
    #[error("evaluation failed: {0}")]
    Evaluation(#[from] SimError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("prediction {0} must be > 0")]
    NonPositivePrediction(f64),
    #[error("fair finish time {fft} is not after arrival {arrival}")]
    DegenerateFft { arrival: f64, fft: f64 },
    #[error("cannot aggregate an empty list")]
    Empty,
    #[error("job {0} has no {1}")]
    Missing(String, &'static str),
    #[error("invalid measure {0:?}")]
    InvalidMeasure(String),
}
