//! Jobs, demand functions, traces and synthetic workloads.

mod demand;
mod job;
mod synth;

pub use demand::DemandFunction;
pub use job::{arrival_order, Job, Trace};
pub use synth::{
    generate_synthetic, inject_size_error, AllocDist, Scaling, SizeDist, SyntheticSpec,
};

use crate::error::WorkloadError;

/// Squared coefficient of variation (population variance over squared mean).
pub fn squared_cv(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    var / (mean * mean)
}

/// Checked speedup, see [`DemandFunction::speedup`].
pub fn speedup(df: &DemandFunction, g: f64) -> Result<f64, WorkloadError> {
    df.speedup(g)
}

/// Checked efficiency, see [`DemandFunction::efficiency`].
pub fn efficiency(df: &DemandFunction, n: u32) -> Result<f64, WorkloadError> {
    df.efficiency(n)
}

/// Allocation cap for a given efficiency floor, see [`DemandFunction::demand_cap`].
pub fn demand_cap(df: &DemandFunction, zeta_min: f64) -> u32 {
    df.demand_cap(zeta_min)
}
