//! Fluid discrete-event simulator.
//!
//! Between events every job accrues service at `speedup(allocation)` per
//! second. Accrual is closed form: each job keeps the service it had at the
//! start of its current rate epoch and the epoch start time, and a new epoch
//! begins only when its rate changes. Events that leave a job's rate alone
//! therefore never perturb its finish time, which is what makes playout
//! predictions bit-exact under non-retroactive policies.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::SimError;
use crate::policy::{AllocationPlan, Policy};
use crate::predictor;
use crate::workload::{Job, Trace};

/// Hard ceiling on processed events per run unless configured otherwise.
pub const DEFAULT_MAX_EVENTS: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Total resource units.
    pub capacity: f64,
    /// Seconds a job makes no progress after its allocation shrinks.
    pub restart_overhead: f64,
    /// Reallocation period for lease-based policies.
    pub lease_duration: f64,
    /// Allocation tolerance for water-filling and capacity checks.
    pub epsilon: f64,
    pub max_events: u64,
    /// Issue a playout prediction for every arriving job.
    pub predict: bool,
}

impl SimConfig {
    pub fn new(capacity: f64) -> Self {
        Self {
            capacity,
            restart_overhead: 0.0,
            lease_duration: 600.0,
            epsilon: 1e-9,
            max_events: DEFAULT_MAX_EVENTS,
            predict: true,
        }
    }

    pub fn with_restart_overhead(mut self, seconds: f64) -> Self {
        self.restart_overhead = seconds;
        self
    }

    pub fn with_lease(mut self, seconds: f64) -> Self {
        self.lease_duration = seconds;
        self
    }

    pub fn without_predictions(mut self) -> Self {
        self.predict = false;
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.capacity.is_finite() && self.capacity > 0.0) {
            return Err(SimError::InvalidConfig(format!("capacity {} must be > 0", self.capacity)));
        }
        if !(self.restart_overhead.is_finite() && self.restart_overhead >= 0.0) {
            return Err(SimError::InvalidConfig("restart overhead must be >= 0".into()));
        }
        if !(self.lease_duration.is_finite() && self.lease_duration > 0.0) {
            return Err(SimError::InvalidConfig("lease duration must be > 0".into()));
        }
        if !(self.epsilon >= 0.0) {
            return Err(SimError::InvalidConfig("epsilon must be >= 0".into()));
        }
        Ok(())
    }
}

/// Runtime bookkeeping for an admitted job.
#[derive(Debug, Clone)]
pub struct JobRuntime {
    pub job: Arc<Job>,
    /// Position in arrival order; FIFO order everywhere.
    pub seq: u64,
    /// Service to complete: the true size in a real run, the visible size in
    /// a playout.
    target: f64,
    epoch_start: f64,
    epoch_accrued: f64,
    rate: f64,
    departure: f64,
    pub allocation: f64,
    /// Policy-resolved allocation limit at or below `max_alloc`.
    pub cap: f64,
    pub class_index: Option<usize>,
    pub start_time: Option<f64>,
    pub preemption_count: u32,
    pub allocation_changes: u32,
    pub pending_restart_until: Option<f64>,
    needs_restart: bool,
    jct_pred: Option<f64>,
}

impl JobRuntime {
    /// Freshly admitted job with no service and no allocation.
    pub fn new(job: Arc<Job>, seq: u64, clock: f64) -> Self {
        let target = job.true_size;
        let cap = job.max_alloc() as f64;
        Self {
            job,
            seq,
            target,
            epoch_start: clock,
            epoch_accrued: 0.0,
            rate: 0.0,
            departure: f64::INFINITY,
            allocation: 0.0,
            cap,
            class_index: None,
            start_time: None,
            preemption_count: 0,
            allocation_changes: 0,
            pending_restart_until: None,
            needs_restart: false,
            jct_pred: None,
        }
    }

    /// Job resumed from an external snapshot with some service already done.
    pub fn resumed(job: Arc<Job>, seq: u64, clock: f64, accrued: f64, allocation: f64) -> Self {
        let mut rt = Self::new(job, seq, clock);
        rt.epoch_accrued = accrued;
        rt.allocation = allocation;
        if allocation > 0.0 {
            rt.start_time = Some(clock);
        }
        rt.refresh_rate(clock);
        rt
    }

    pub fn max_alloc(&self) -> f64 {
        self.job.max_alloc() as f64
    }

    /// Service completed by time `t`, in seconds at one unit of allocation.
    pub fn accrued(&self, t: f64) -> f64 {
        self.epoch_accrued + self.rate * (t - self.epoch_start)
    }

    /// Remaining service as the scheduler sees it.
    pub fn visible_remaining(&self, t: f64) -> f64 {
        (self.job.size - self.accrued(t)).max(0.0)
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn departure_time(&self) -> f64 {
        self.departure
    }

    pub fn target(&self) -> f64 {
        self.target
    }

    fn rebase(&mut self, t: f64) {
        self.epoch_accrued = self.accrued(t);
        self.epoch_start = t;
    }

    fn refresh_rate(&mut self, clock: f64) {
        let restarting = self.pending_restart_until.is_some_and(|u| u > clock);
        let rate = if restarting {
            0.0
        } else {
            self.job.demand.speedup_at(self.allocation)
        };
        if rate.to_bits() != self.rate.to_bits() {
            self.rebase(clock);
            self.rate = rate;
        }
        self.recompute_departure();
    }

    fn recompute_departure(&mut self) {
        self.departure = if self.rate > 0.0 {
            self.epoch_start + (self.target - self.epoch_accrued) / self.rate
        } else {
            f64::INFINITY
        };
    }

    /// Swaps the service goal without starting a new epoch.
    pub(crate) fn set_target(&mut self, target: f64) {
        self.target = target;
        self.recompute_departure();
    }

    fn apply_allocation(&mut self, alloc: f64, clock: f64, overhead: f64) {
        let old = self.allocation;
        if alloc.to_bits() == old.to_bits() {
            return;
        }
        self.allocation_changes += 1;
        if alloc < old {
            self.preemption_count += 1;
            if overhead > 0.0 {
                if alloc > 0.0 {
                    self.pending_restart_until = Some(clock + overhead);
                    self.needs_restart = false;
                } else {
                    self.pending_restart_until = None;
                    self.needs_restart = true;
                }
            }
        } else if old == 0.0 && self.needs_restart {
            self.pending_restart_until = Some(clock + overhead);
            self.needs_restart = false;
        }
        if alloc > 0.0 && self.start_time.is_none() {
            self.start_time = Some(clock);
        }
        self.allocation = alloc;
        self.refresh_rate(clock);
    }
}

/// Per-job outcome of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct JobRecord {
    pub id: String,
    pub arrival: f64,
    pub start: f64,
    pub finish: f64,
    pub jct: f64,
    /// Prediction issued at arrival; `None` when predictions were disabled.
    pub jct_pred: Option<f64>,
    /// Fair finish time, filled in by [`crate::metrics::attach_fft`].
    pub fft: Option<f64>,
    pub allocation_changes: u32,
    pub preemptions: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub policy: String,
    pub seed: Option<u64>,
    /// Records in arrival order.
    pub records: Vec<JobRecord>,
    pub events: u64,
    /// Time integral of the summed service rates.
    pub service_integral: f64,
    /// Service actually delivered, the sum of completed targets.
    pub total_service: f64,
}

impl SimResult {
    pub fn jcts(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.jct).collect()
    }

    /// Relative gap between the rate integral and delivered service.
    pub fn energy_balance_error(&self) -> f64 {
        if self.total_service == 0.0 {
            return self.service_integral.abs();
        }
        (self.service_integral - self.total_service).abs() / self.total_service
    }
}

/// Clock, capacity and admitted jobs in arrival order.
#[derive(Debug, Clone)]
pub struct ClusterState {
    pub clock: f64,
    pub capacity: f64,
    pub active: Vec<JobRuntime>,
    next_lease: Option<f64>,
}

impl ClusterState {
    pub fn new(capacity: f64) -> Self {
        Self {
            clock: 0.0,
            capacity,
            active: Vec::new(),
            next_lease: None,
        }
    }

    pub fn total_allocation(&self) -> f64 {
        self.active.iter().map(|j| j.allocation).sum()
    }

    fn schedule_lease(&mut self, lease: Option<f64>) {
        self.next_lease = lease.map(|l| {
            let mut next = (libm::floor(self.clock / l) + 1.0) * l;
            if next <= self.clock {
                next += l;
            }
            next
        });
    }

    /// Earliest departure or restart completion.
    pub(crate) fn next_internal_event(&self) -> Option<f64> {
        let mut t = f64::INFINITY;
        for j in &self.active {
            t = t.min(j.departure);
            if let Some(r) = j.pending_restart_until {
                t = t.min(r);
            }
        }
        t.is_finite().then_some(t)
    }

    /// Moves the clock to `t` and returns the service delivered meanwhile.
    pub(crate) fn advance(&mut self, t: f64) -> f64 {
        let dt = t - self.clock;
        let delivered = if dt > 0.0 {
            self.active.iter().map(|j| j.rate).sum::<f64>() * dt
        } else {
            0.0
        };
        if t > self.clock {
            self.clock = t;
        }
        delivered
    }

    pub(crate) fn finish_restarts(&mut self) {
        let clock = self.clock;
        for j in &mut self.active {
            if j.pending_restart_until.is_some_and(|u| u <= clock) {
                j.pending_restart_until = None;
                j.refresh_rate(clock);
            }
        }
    }

    pub(crate) fn take_departures(&mut self) -> Vec<JobRuntime> {
        let clock = self.clock;
        if !self.active.iter().any(|j| j.departure <= clock) {
            return Vec::new();
        }
        let (done, keep): (Vec<_>, Vec<_>) =
            core::mem::take(&mut self.active).into_iter().partition(|j| j.departure <= clock);
        self.active = keep;
        done
    }

    /// Asks `policy` for a plan and applies it after checking capacity and
    /// per-job bounds.
    pub(crate) fn reallocate(&mut self, policy: &Policy, overhead: f64, eps: f64) -> Result<(), SimError> {
        if self.active.is_empty() {
            return Ok(());
        }
        let plan = policy.allocate(&self.active, self.clock, self.capacity, eps);
        self.check_plan(&plan, eps)?;
        let clock = self.clock;
        for (j, &a) in self.active.iter_mut().zip(plan.as_slice()) {
            j.apply_allocation(a, clock, overhead);
        }
        Ok(())
    }

    fn check_plan(&self, plan: &AllocationPlan, eps: f64) -> Result<(), SimError> {
        let breach = |detail: String| SimError::InvariantBreach { clock: self.clock, detail };
        if plan.len() != self.active.len() {
            return Err(breach(format!(
                "plan covers {} jobs, {} active",
                plan.len(),
                self.active.len()
            )));
        }
        let mut total = 0.0;
        for (j, &a) in self.active.iter().zip(plan.as_slice()) {
            if !(a.is_finite() && a >= 0.0) || a > j.max_alloc() + eps {
                return Err(breach(format!("allocation {a} for job {}", j.job.id)));
            }
            total += a;
        }
        let slack = eps.max(1e-9) * self.capacity.max(1.0);
        if total > self.capacity + slack {
            return Err(breach(format!("allocated {total} of {}", self.capacity)));
        }
        Ok(())
    }
}

/// Frozen copy of everything needed to replay the cluster forward.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub(crate) state: ClusterState,
    pub(crate) policy: Policy,
    pub(crate) next_seq: u64,
}

impl Snapshot {
    /// Builds a snapshot from externally described jobs. Each entry is a job,
    /// its completed service and its current allocation; they are kept in
    /// the given order.
    pub fn from_parts(
        clock: f64,
        capacity: f64,
        mut policy: Policy,
        jobs: Vec<(Arc<Job>, f64, f64)>,
    ) -> Result<Self, SimError> {
        let mut state = ClusterState::new(capacity);
        state.clock = clock;
        for (seq, (job, accrued, allocation)) in jobs.into_iter().enumerate() {
            if accrued < 0.0 || allocation < 0.0 || allocation > job.max_alloc() as f64 {
                return Err(SimError::InvalidConfig(format!(
                    "snapshot entry {} has accrued {accrued}, allocation {allocation}",
                    job.id
                )));
            }
            let mut rt = JobRuntime::resumed(job, seq as u64, clock, accrued, allocation);
            policy.admit(&mut rt, &state);
            state.active.push(rt);
        }
        let next_seq = state.active.len() as u64;
        Ok(Self { state, policy, next_seq })
    }

    pub fn clock(&self) -> f64 {
        self.state.clock
    }

    pub fn capacity(&self) -> f64 {
        self.state.capacity
    }

    pub fn jobs(&self) -> &[JobRuntime] {
        &self.state.active
    }

    pub fn policy(&self) -> &Policy {
        &self.policy
    }

    pub fn next_seq(&self) -> u64 {
        self.next_seq
    }
}

/// What happened at one event instant.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventOutcome {
    pub clock: f64,
    pub departures: usize,
    pub arrivals: usize,
    pub restarts_finished: usize,
    pub lease_tick: bool,
}

/// Hook invoked after every reallocation.
pub trait Observer {
    fn on_allocation(&mut self, clock: f64, jobs: &[JobRuntime]);
}

impl<F: FnMut(f64, &[JobRuntime])> Observer for F {
    fn on_allocation(&mut self, clock: f64, jobs: &[JobRuntime]) {
        self(clock, jobs)
    }
}

struct NoObserver;

impl Observer for NoObserver {
    fn on_allocation(&mut self, _: f64, _: &[JobRuntime]) {}
}

/// A run in progress over a fixed trace.
pub struct Simulation<'a> {
    trace: &'a Trace,
    cursor: usize,
    state: ClusterState,
    policy: Policy,
    cfg: SimConfig,
    records: Vec<(u64, JobRecord)>,
    events: u64,
    service_integral: f64,
    total_service: f64,
}

impl<'a> Simulation<'a> {
    pub fn new(trace: &'a Trace, policy: Policy, cfg: SimConfig) -> Result<Self, SimError> {
        cfg.validate()?;
        policy.validate()?;
        let mut state = ClusterState::new(cfg.capacity);
        state.schedule_lease(policy.lease(&cfg));
        Ok(Self {
            trace,
            cursor: 0,
            state,
            policy,
            cfg,
            records: Vec::with_capacity(trace.len()),
            events: 0,
            service_integral: 0.0,
            total_service: 0.0,
        })
    }

    pub fn state(&self) -> &ClusterState {
        &self.state
    }

    pub fn is_done(&self) -> bool {
        self.cursor >= self.trace.len() && self.state.active.is_empty()
    }

    /// Deep copy of the current cluster and policy state.
    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            state: self.state.clone(),
            policy: self.policy.clone(),
            next_seq: self.cursor as u64,
        }
    }

    pub fn advance_to_next_event(&mut self) -> Result<Option<EventOutcome>, SimError> {
        self.step(&mut NoObserver)
    }

    fn step(&mut self, observer: &mut dyn Observer) -> Result<Option<EventOutcome>, SimError> {
        let jobs = self.trace.jobs();
        let next_arrival = jobs.get(self.cursor).map(|j| j.arrival);
        let next_internal = self.state.next_internal_event();
        let next_lease = if self.state.active.is_empty() {
            None
        } else {
            self.state.next_lease
        };
        let Some(t) = [next_arrival, next_internal, next_lease]
            .into_iter()
            .flatten()
            .reduce(f64::min)
        else {
            return Ok(None);
        };

        self.events += 1;
        if self.events > self.cfg.max_events {
            return Err(SimError::EventBoundExceeded(self.cfg.max_events));
        }
        self.service_integral += self.state.advance(t);
        let clock = self.state.clock;
        let mut outcome = EventOutcome {
            clock,
            ..EventOutcome::default()
        };

        let restarting = self
            .state
            .active
            .iter()
            .filter(|j| j.pending_restart_until.is_some_and(|u| u <= clock))
            .count();
        if restarting > 0 {
            self.state.finish_restarts();
            outcome.restarts_finished = restarting;
        }

        for done in self.state.take_departures() {
            self.policy.on_departure(done.seq);
            self.total_service += done.target;
            self.records.push((done.seq, record_for(&done, clock)));
            outcome.departures += 1;
        }

        while let Some(job) = jobs.get(self.cursor) {
            if job.arrival > clock {
                break;
            }
            let seq = self.cursor as u64;
            let pred = if self.cfg.predict {
                Some(predictor::predict_jct(&self.snapshot(), job.clone(), &self.cfg)?)
            } else {
                None
            };
            let mut rt = JobRuntime::new(job.clone(), seq, clock);
            rt.jct_pred = pred;
            self.policy.admit(&mut rt, &self.state);
            self.state.active.push(rt);
            self.cursor += 1;
            outcome.arrivals += 1;
        }

        if self.state.next_lease.is_some_and(|l| l <= clock) {
            outcome.lease_tick = true;
            self.state.schedule_lease(self.policy.lease(&self.cfg));
        }

        if outcome.departures > 0 || outcome.arrivals > 0 || outcome.lease_tick {
            self.state
                .reallocate(&self.policy, self.cfg.restart_overhead, self.cfg.epsilon)?;
            observer.on_allocation(clock, &self.state.active);
        }
        Ok(Some(outcome))
    }

    pub fn run_to_completion(self) -> Result<SimResult, SimError> {
        self.run_observed(&mut NoObserver)
    }

    pub fn run_observed(mut self, observer: &mut dyn Observer) -> Result<SimResult, SimError> {
        while self.step(observer)?.is_some() {}
        Ok(self.into_result())
    }

    fn into_result(mut self) -> SimResult {
        self.records.sort_by_key(|r| r.0);
        SimResult {
            policy: String::from(self.policy.name()),
            seed: self.trace.seed,
            records: self.records.into_iter().map(|r| r.1).collect(),
            events: self.events,
            service_integral: self.service_integral,
            total_service: self.total_service,
        }
    }
}

fn record_for(rt: &JobRuntime, clock: f64) -> JobRecord {
    JobRecord {
        id: rt.job.id.clone(),
        arrival: rt.job.arrival,
        start: rt.start_time.unwrap_or(clock),
        finish: clock,
        jct: clock - rt.job.arrival,
        jct_pred: rt.jct_pred,
        fft: None,
        allocation_changes: rt.allocation_changes,
        preemptions: rt.preemption_count,
    }
}

/// Simulates `trace` under `policy` to completion.
pub fn run(trace: &Trace, policy: Policy, cfg: &SimConfig) -> Result<SimResult, SimError> {
    Simulation::new(trace, policy, cfg.clone())?.run_to_completion()
}

/// Like [`run`], calling `observer` after every reallocation.
pub fn run_observed(
    trace: &Trace,
    policy: Policy,
    cfg: &SimConfig,
    observer: &mut dyn Observer,
) -> Result<SimResult, SimError> {
    Simulation::new(trace, policy, cfg.clone())?.run_observed(observer)
}

/// Replays a snapshot forward with no further arrivals, switching every job to
/// its scheduler-visible size. Calls `on_departure` for each completion and
/// stops early once it returns `true`.
pub(crate) fn play_out(
    snap: &Snapshot,
    extra: Option<Arc<Job>>,
    cfg: &SimConfig,
    mut on_departure: impl FnMut(&JobRuntime, f64) -> bool,
) -> Result<(), SimError> {
    let mut state = snap.state.clone();
    let mut policy = snap.policy.clone();
    let clock = state.clock;
    for rt in &mut state.active {
        rt.set_target(rt.job.size);
    }
    // Jobs already past their visible size would leave at once.
    state.active.retain(|rt| rt.job.size > rt.accrued(clock));
    if let Some(job) = extra {
        let mut rt = JobRuntime::new(job, snap.next_seq, clock);
        rt.set_target(rt.job.size);
        policy.admit(&mut rt, &state);
        state.active.push(rt);
    }
    let lease = policy.lease(cfg);
    state.schedule_lease(lease);
    state.reallocate(&policy, cfg.restart_overhead, cfg.epsilon)?;

    let mut events = 0u64;
    while !state.active.is_empty() {
        let Some(t) = [state.next_internal_event(), state.next_lease]
            .into_iter()
            .flatten()
            .reduce(f64::min)
        else {
            return Err(SimError::InvariantBreach {
                clock: state.clock,
                detail: String::from("playout stalled with active jobs and no events"),
            });
        };
        events += 1;
        if events > cfg.max_events {
            return Err(SimError::EventBoundExceeded(cfg.max_events));
        }
        state.advance(t);
        let now = state.clock;
        state.finish_restarts();
        let done = state.take_departures();
        let departed = !done.is_empty();
        for rt in &done {
            policy.on_departure(rt.seq);
            if on_departure(rt, now) {
                return Ok(());
            }
        }
        let tick = state.next_lease.is_some_and(|l| l <= now);
        if tick {
            state.schedule_lease(lease);
        }
        if departed || tick {
            state.reallocate(&policy, cfg.restart_overhead, cfg.epsilon)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::Policy;
    use alloc::vec;

    fn trace(jobs: &[(&str, f64, f64, u32)]) -> Trace {
        Trace::new(
            jobs.iter()
                .map(|&(id, arr, size, m)| Job::linear(id, arr, size, m).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_job_exact() {
        let t = trace(&[("a", 0.0, 10.0, 1)]);
        let r = run(&t, Policy::Fifo, &SimConfig::new(1.0)).unwrap();
        assert_eq!(r.records[0].jct, 10.0);
        assert_eq!(r.records[0].jct_pred, Some(10.0));
    }

    #[test]
    fn fifo_two_jobs_same_arrival() {
        let t = trace(&[("a", 0.0, 4.0, 1), ("b", 0.0, 2.0, 1)]);
        let r = run(&t, Policy::Fifo, &SimConfig::new(1.0)).unwrap();
        assert_eq!(r.jcts(), vec![4.0, 6.0]);
    }

    #[test]
    fn srsf_two_jobs_same_arrival() {
        let t = trace(&[("a", 0.0, 4.0, 1), ("b", 0.0, 2.0, 1)]);
        let r = run(&t, Policy::Srsf, &SimConfig::new(1.0)).unwrap();
        assert_eq!(r.jcts(), vec![6.0, 2.0]);
    }

    #[test]
    fn closed_form_departure_with_sublinear_speedup() {
        let df = crate::workload::DemandFunction::new(vec![(1, 100.0), (2, 60.0)]).unwrap();
        let mut rt = JobRuntime::new(Arc::new(Job::new("x", 0.0, df).unwrap()), 0, 0.0);
        rt.epoch_accrued = 95.0;
        rt.apply_allocation(2.0, 0.0, 0.0);
        // 5 s of service at speedup 5/3
        assert!((rt.departure_time() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn idle_cluster_jumps_to_next_arrival() {
        let t = trace(&[("a", 7.0, 1.0, 1)]);
        let mut sim = Simulation::new(&t, Policy::Fifo, SimConfig::new(1.0)).unwrap();
        let ev = sim.advance_to_next_event().unwrap().unwrap();
        assert_eq!(ev.clock, 7.0);
        assert_eq!(ev.arrivals, 1);
    }

    #[test]
    fn lease_tick_and_arrival_take_the_min() {
        let t = trace(&[("a", 0.0, 1000.0, 1), ("b", 400.0, 1.0, 1)]);
        let mut sim = Simulation::new(&t, Policy::themis(), SimConfig::new(1.0)).unwrap();
        assert_eq!(sim.advance_to_next_event().unwrap().unwrap().clock, 0.0);
        let ev = sim.advance_to_next_event().unwrap().unwrap();
        assert_eq!(ev.clock, 400.0);
        assert!(!ev.lease_tick);
    }

    #[test]
    fn restart_overhead_delays_preempted_job() {
        // b preempts a under SRSF; a pays the overhead when it resumes.
        let t = trace(&[("a", 0.0, 10.0, 1), ("b", 1.0, 2.0, 1)]);
        let r0 = run(&t, Policy::Srsf, &SimConfig::new(1.0)).unwrap();
        let r1 = run(&t, Policy::Srsf, &SimConfig::new(1.0).with_restart_overhead(0.5)).unwrap();
        assert_eq!(r0.records[0].finish, 12.0);
        assert_eq!(r1.records[0].finish, 12.5);
        assert_eq!(r1.records[0].preemptions, 1);
        assert!(r1.energy_balance_error() < 1e-12);
    }

    #[test]
    fn snapshot_is_isolated() {
        let t = trace(&[("a", 0.0, 4.0, 1), ("b", 1.0, 2.0, 1)]);
        let mut sim = Simulation::new(&t, Policy::Fifo, SimConfig::new(1.0)).unwrap();
        sim.advance_to_next_event().unwrap();
        let snap = sim.snapshot();
        let before = snap.jobs().len();
        while sim.advance_to_next_event().unwrap().is_some() {}
        assert_eq!(snap.jobs().len(), before);
        assert_eq!(snap.clock(), 0.0);
    }

    #[test]
    fn rejects_bad_config() {
        let t = trace(&[("a", 0.0, 1.0, 1)]);
        assert!(run(&t, Policy::Fifo, &SimConfig::new(0.0)).is_err());
        assert!(run(&t, Policy::Fifo, &SimConfig::new(1.0).with_restart_overhead(-1.0)).is_err());
    }

    #[test]
    fn event_bound_guard() {
        let t = trace(&[("a", 0.0, 1.0, 1), ("b", 0.5, 1.0, 1)]);
        let mut cfg = SimConfig::new(1.0);
        cfg.max_events = 1;
        assert_eq!(run(&t, Policy::Fifo, &cfg), Err(SimError::EventBoundExceeded(1)));
    }
}
