use alloc::vec::Vec;

use crate::error::SolverError;

/// `a` dominates `b` when it is no worse everywhere and strictly better
/// somewhere (minimization).
pub fn dominates(a: &[f64], b: &[f64]) -> Result<bool, SolverError> {
    if a.len() != b.len() {
        return Err(SolverError::LengthMismatch(a.len(), b.len()));
    }
    Ok(dominates_unchecked(a, b))
}

pub(crate) fn dominates_unchecked(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly = true;
        }
    }
    strictly
}

/// Indices of the non-dominated vectors, ordered by first objective and then
/// by input position.
pub fn non_dominated_indices(objectives: &[Vec<f64>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..objectives.len()).collect();
    // After sorting lexicographically, only earlier entries can dominate later
    // ones, so each candidate is checked against the kept set alone.
    order.sort_by(|&a, &b| {
        lexicographic(&objectives[a], &objectives[b]).then(a.cmp(&b))
    });
    let mut kept: Vec<usize> = Vec::new();
    for i in order {
        if !kept
            .iter()
            .any(|&k| dominates_unchecked(&objectives[k], &objectives[i]))
        {
            kept.push(i);
        }
    }
    kept.sort_by(|&a, &b| {
        objectives[a][0]
            .total_cmp(&objectives[b][0])
            .then(a.cmp(&b))
    });
    kept
}

fn lexicographic(a: &[f64], b: &[f64]) -> core::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(core::cmp::Ordering::Equal)
}

/// Keeps the items whose objective vectors are not dominated by any other.
pub fn pareto_filter<T: Clone>(items: &[T], objectives: impl Fn(&T) -> &[f64]) -> Vec<T> {
    let objs: Vec<Vec<f64>> = items.iter().map(|i| objectives(i).to_vec()).collect();
    non_dominated_indices(&objs)
        .into_iter()
        .map(|i| items[i].clone())
        .collect()
}

/// Volume dominated by `points` and bounded by `reference` (minimization).
/// Points that do not strictly dominate the reference contribute nothing.
pub fn hypervolume(points: &[Vec<f64>], reference: &[f64]) -> f64 {
    let inside: Vec<&[f64]> = points
        .iter()
        .map(|p| p.as_slice())
        .filter(|p| p.len() == reference.len() && p.iter().zip(reference).all(|(x, r)| x < r))
        .collect();
    if inside.is_empty() || reference.is_empty() {
        return 0.0;
    }
    slice_volume(&inside, reference)
}

fn slice_volume(points: &[&[f64]], reference: &[f64]) -> f64 {
    let d = reference.len();
    if d == 1 {
        let best = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        return reference[0] - best;
    }
    let mut sorted: Vec<&[f64]> = points.to_vec();
    sorted.sort_by(|a, b| a[d - 1].total_cmp(&b[d - 1]));
    let mut volume = 0.0;
    for i in 0..sorted.len() {
        let upper = sorted.get(i + 1).map_or(reference[d - 1], |p| p[d - 1]);
        let height = upper - sorted[i][d - 1];
        if height <= 0.0 {
            continue;
        }
        let projected: Vec<&[f64]> = sorted[..=i].iter().map(|p| &p[..d - 1]).collect();
        volume += height * slice_volume(&projected, &reference[..d - 1]);
    }
    volume
}
