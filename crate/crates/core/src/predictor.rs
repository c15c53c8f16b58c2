//! Completion-time prediction by virtual playout.

use alloc::sync::Arc;

use crate::engine::{play_out, SimConfig, Snapshot};
use crate::error::SimError;
use crate::workload::Job;

/// Predicted completion time of `new_job` if it were admitted into `snap`
/// and nothing else arrived afterwards.
///
/// The playout reuses the engine's event loop, policy logic and restart
/// overheads, and only knows scheduler-visible sizes.
pub fn predict_jct(snap: &Snapshot, new_job: Arc<Job>, cfg: &SimConfig) -> Result<f64, SimError> {
    let arrival = new_job.arrival;
    let seq = snap.next_seq();
    let mut finish = None;
    play_out(snap, Some(new_job), cfg, |rt, t| {
        if rt.seq == seq {
            finish = Some(t);
            true
        } else {
            false
        }
    })?;
    let finish = finish.ok_or_else(|| SimError::InvariantBreach {
        clock: snap.clock(),
        detail: "playout ended before the predicted job finished".into(),
    })?;
    Ok(finish - arrival)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::run;
    use crate::policy::Policy;
    use crate::workload::{Job, Trace};
    use alloc::vec;

    fn job(id: &str, arrival: f64, size: f64, max_alloc: u32) -> Arc<Job> {
        Arc::new(Job::linear(id, arrival, size, max_alloc).unwrap())
    }

    #[test]
    fn empty_cluster_uses_full_capacity() {
        let snap = Snapshot::from_parts(0.0, 4.0, Policy::Fifo, vec![]).unwrap();
        let p = predict_jct(&snap, job("x", 0.0, 10.0, 4), &SimConfig::new(4.0)).unwrap();
        assert_eq!(p, 2.5);
    }

    #[test]
    fn fifo_queue_adds_up() {
        // running job with 3 s of its 5 s left
        let running = job("r", 0.0, 5.0, 1);
        let snap = Snapshot::from_parts(2.0, 1.0, Policy::Fifo, vec![(running, 2.0, 1.0)]).unwrap();
        let cfg = SimConfig::new(1.0);
        let p = predict_jct(&snap, job("n", 2.0, 2.0, 1), &cfg).unwrap();
        assert_eq!(p, 5.0);
        assert_eq!(predict_jct(&snap, job("n", 2.0, 2.0, 1), &cfg).unwrap(), p);
    }

    #[test]
    fn no_future_arrivals_means_exact_prediction() {
        let trace = Trace::new(vec![
            Job::linear("a", 0.0, 30.0, 2).unwrap(),
            Job::linear("b", 1.0, 5.0, 2).unwrap(),
            Job::linear("c", 2.0, 12.0, 1).unwrap(),
        ])
        .unwrap();
        for policy in [Policy::Fifo, Policy::Srsf, Policy::MaxMin, Policy::Afs, Policy::themis()] {
            let r = run(&trace, policy, &SimConfig::new(2.0)).unwrap();
            let last = r.records.iter().find(|r| r.id == "c").unwrap();
            assert_eq!(last.jct_pred, Some(last.jct));
        }
    }
}
