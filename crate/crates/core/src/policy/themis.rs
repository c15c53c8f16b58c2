use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{greedy_in_order, AllocationPlan, Policy};
use crate::engine::{ClusterState, JobRuntime};

/// Finish-time-fair policy state.
///
/// Keeps a shadow max-min cluster fed with the arrivals seen so far. At each
/// arrival the shadow is advanced to the current time and played out to give
/// every job a fair-finish-time estimate that uses no future knowledge.
#[derive(Debug, Clone, Default)]
pub struct ThemisState {
    shadow: Option<ClusterState>,
    fair_finish: BTreeMap<u64, f64>,
}

impl ThemisState {
    pub fn fair_finish_estimate(&self, seq: u64) -> Option<f64> {
        self.fair_finish.get(&seq).copied()
    }

    pub(crate) fn admit(&mut self, rt: &JobRuntime, state: &ClusterState) {
        let clock = state.clock;
        let shadow = self
            .shadow
            .get_or_insert_with(|| ClusterState::new(state.capacity));
        shadow.capacity = state.capacity;

        while let Some(t) = shadow.next_internal_event().filter(|&t| t <= clock) {
            shadow.advance(t);
            shadow.take_departures();
            shadow
                .reallocate(&Policy::MaxMin, 0.0, 0.0)
                .expect("max-min plans stay within capacity");
        }
        shadow.advance(clock);

        // The shadow tracks visible sizes only.
        let mut fresh = JobRuntime::new(rt.job.clone(), rt.seq, clock);
        fresh.set_target(fresh.job.size);
        shadow.active.push(fresh);
        shadow
            .reallocate(&Policy::MaxMin, 0.0, 0.0)
            .expect("max-min plans stay within capacity");

        let mut playout = shadow.clone();
        while let Some(t) = playout.next_internal_event() {
            playout.advance(t);
            for done in playout.take_departures() {
                self.fair_finish.insert(done.seq, t);
            }
            playout
                .reallocate(&Policy::MaxMin, 0.0, 0.0)
                .expect("max-min plans stay within capacity");
        }
    }

    pub(crate) fn forget(&mut self, seq: u64) {
        self.fair_finish.remove(&seq);
    }

    /// Allocates in descending order of the finish-time-fairness ratio
    /// `(projected finish - arrival) / (fair finish - arrival)`. A job with no
    /// allocation is projected as if it ran on a single unit from now.
    pub fn allocate(&self, jobs: &[JobRuntime], clock: f64, capacity: f64, eps: f64) -> AllocationPlan {
        let rho: Vec<f64> = jobs
            .iter()
            .map(|j| {
                let arrival = j.job.arrival;
                let rate = if j.allocation > 0.0 {
                    j.job.demand.speedup_at(j.allocation)
                } else {
                    j.job.demand.speedup_at(1.0)
                };
                let projected = clock + j.visible_remaining(clock) / rate;
                let fair = self
                    .fair_finish
                    .get(&j.seq)
                    .copied()
                    .unwrap_or(arrival + j.job.size);
                (projected - arrival) / (fair - arrival).max(f64::MIN_POSITIVE)
            })
            .collect();
        let mut order: Vec<usize> = (0..jobs.len()).collect();
        order.sort_by(|&a, &b| rho[b].total_cmp(&rho[a]).then(jobs[a].seq.cmp(&jobs[b].seq)));
        let mut out = alloc::vec![0.0; jobs.len()];
        greedy_in_order(jobs, order, capacity, eps, &mut out);
        out.into()
    }
}
