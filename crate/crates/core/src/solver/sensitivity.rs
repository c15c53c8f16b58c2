//! How far configurations found on one workload land from the Pareto front
//! of another.

use alloc::vec::Vec;

use super::pareto::non_dominated_indices;
use super::spea2::BatchEvaluator;
use super::{EvalContext, ParetoPoint};
use crate::error::SolverError;

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityEntry {
    pub point: ParetoPoint,
    /// Objectives of `point` re-evaluated on the alternate workload.
    pub reevaluated: Vec<f64>,
    pub distance: f64,
}

/// Smallest L-infinity relative gap from `p` to a front member. Only the
/// amount by which `p` is worse counts; each gap is relative to the front
/// value, with magnitudes below 1 treated as 1 so near-zero objectives do not
/// blow up.
pub fn distance_to_front(p: &[f64], front: &[Vec<f64>]) -> f64 {
    front
        .iter()
        .map(|f| {
            p.iter()
                .zip(f)
                .map(|(&pk, &fk)| ((pk - fk) / fk.abs().max(1.0)).max(0.0))
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Re-evaluates `points` on `alt` and measures each against the front formed
/// by `alt_front` (objective vectors found by searching `alt` itself) together
/// with the re-evaluated points.
pub fn sensitivity(
    points: &[ParetoPoint],
    alt: &EvalContext,
    alt_front: &[Vec<f64>],
    evaluator: &dyn BatchEvaluator,
) -> Result<Vec<SensitivityEntry>, SolverError> {
    if points.is_empty() {
        return Err(SolverError::Empty);
    }
    let reevaluated = evaluator
        .map_indexed(points.len(), &|i| alt.evaluate(&points[i].candidate))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let mut pool: Vec<Vec<f64>> = alt_front.to_vec();
    pool.extend(reevaluated.iter().cloned());
    let front: Vec<Vec<f64>> = non_dominated_indices(&pool)
        .into_iter()
        .map(|i| pool[i].clone())
        .collect();
    Ok(points
        .iter()
        .zip(reevaluated)
        .map(|(point, obj)| SensitivityEntry {
            distance: distance_to_front(&obj, &front),
            point: point.clone(),
            reevaluated: obj,
        })
        .collect())
}

/// Empirical CDF as `(distance, fraction <= distance)` steps.
pub fn cdf(distances: &[f64]) -> Vec<(f64, f64)> {
    let mut sorted = distances.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, d) in sorted.iter().enumerate() {
        let frac = (i + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.0 == *d => last.1 = frac,
            _ => out.push((*d, frac)),
        }
    }
    out
}

pub fn fraction_within(distances: &[f64], bound: f64) -> f64 {
    if distances.is_empty() {
        return 0.0;
    }
    distances.iter().filter(|&&d| d <= bound).count() as f64 / distances.len() as f64
}
