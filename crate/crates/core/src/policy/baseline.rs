use alloc::vec::Vec;

use super::{greedy_in_order, AllocationPlan};
use crate::engine::JobRuntime;

/// Arrival order, each job up to its maximum allocation.
pub fn fifo_allocate(jobs: &[JobRuntime], capacity: f64, eps: f64) -> AllocationPlan {
    let mut out = alloc::vec![0.0; jobs.len()];
    greedy_in_order(jobs, 0..jobs.len(), capacity, eps, &mut out);
    out.into()
}

/// Shortest remaining (visible) service first; ties by arrival order.
pub fn srsf_allocate(jobs: &[JobRuntime], clock: f64, capacity: f64, eps: f64) -> AllocationPlan {
    let remaining: Vec<f64> = jobs.iter().map(|j| j.visible_remaining(clock)).collect();
    let mut order: Vec<usize> = (0..jobs.len()).collect();
    order.sort_by(|&a, &b| {
        remaining[a]
            .total_cmp(&remaining[b])
            .then(jobs[a].seq.cmp(&jobs[b].seq))
    });
    let mut out = alloc::vec![0.0; jobs.len()];
    greedy_in_order(jobs, order, capacity, eps, &mut out);
    out.into()
}

/// Fluid max-min fair share with saturation at each job's maximum.
pub fn maxmin_allocate(jobs: &[JobRuntime], capacity: f64, eps: f64) -> AllocationPlan {
    let mut out = alloc::vec![0.0; jobs.len()];
    let mut order: Vec<usize> = (0..jobs.len()).collect();
    order.sort_by(|&a, &b| {
        jobs[a]
            .max_alloc()
            .total_cmp(&jobs[b].max_alloc())
            .then(jobs[a].seq.cmp(&jobs[b].seq))
    });
    let mut residual = capacity;
    let mut left = jobs.len();
    for i in order {
        if residual <= eps {
            break;
        }
        let level = residual / left as f64;
        let give = level.min(jobs[i].max_alloc());
        out[i] = give;
        residual -= give;
        left -= 1;
    }
    out.into()
}

/// Greedy marginal-gain allocation: each unit (or the fractional remainder)
/// goes to the job whose speedup grows most per second of remaining work.
/// Ties go to the job with less remaining work, then arrival order.
pub fn afs_allocate(jobs: &[JobRuntime], clock: f64, capacity: f64, eps: f64) -> AllocationPlan {
    let mut out = alloc::vec![0.0; jobs.len()];
    let remaining: Vec<f64> = jobs
        .iter()
        .map(|j| j.visible_remaining(clock).max(f64::MIN_POSITIVE))
        .collect();
    let mut residual = capacity;
    while residual > eps {
        let mut best: Option<(usize, f64, f64)> = None;
        for (i, j) in jobs.iter().enumerate() {
            let headroom = j.max_alloc() - out[i];
            if headroom <= eps {
                continue;
            }
            let step = 1.0f64.min(residual).min(headroom);
            let df = &j.job.demand;
            let gain = (df.speedup_at(out[i] + step) - df.speedup_at(out[i])) / step / remaining[i];
            let better = match best {
                None => true,
                Some((b, bg, _)) => {
                    gain > bg
                        || (gain == bg
                            && (remaining[i] < remaining[b]
                                || (remaining[i] == remaining[b] && j.seq < jobs[b].seq)))
                }
            };
            if better {
                best = Some((i, gain, step));
            }
        }
        let Some((i, _, step)) = best else { break };
        out[i] += step;
        residual -= step;
    }
    out.into()
}
