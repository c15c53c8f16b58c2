use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Pareto};

use super::{DemandFunction, Job, Trace};
use crate::error::WorkloadError;

/// Smallest scheduler-visible size produced by error injection, relative to
/// the true size.
const MIN_VISIBLE_FRACTION: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum SizeDist {
    /// Pareto with the given tail index and minimum value.
    HeavyTailed { shape: f64, scale: f64 },
    /// Exponential with the given mean.
    LightTailed { mean: f64 },
    /// Exponential mixture: small jobs with probability `p`, large otherwise.
    Bimodal { p: f64, small_mean: f64, large_mean: f64 },
}

impl SizeDist {
    fn validate(&self) -> Result<(), WorkloadError> {
        let ok = match *self {
            SizeDist::HeavyTailed { shape, scale } => shape > 0.0 && scale > 0.0,
            SizeDist::LightTailed { mean } => mean > 0.0,
            SizeDist::Bimodal { p, small_mean, large_mean } => {
                (0.0..=1.0).contains(&p) && small_mean > 0.0 && large_mean > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(WorkloadError::InvalidDistribution(format!("{self:?}")))
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            SizeDist::HeavyTailed { shape, scale } => {
                Pareto::new(scale, shape).expect("validated").sample(rng)
            }
            SizeDist::LightTailed { mean } => Exp::new(1.0 / mean).expect("validated").sample(rng),
            SizeDist::Bimodal { p, small_mean, large_mean } => {
                let mean = if rng.random::<f64>() < p { small_mean } else { large_mean };
                Exp::new(1.0 / mean).expect("validated").sample(rng)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AllocDist {
    Fixed(u32),
    /// Uniform over the integers `min..=max`.
    Uniform { min: u32, max: u32 },
    /// Uniform over `{1, 2, 4, ..., max}`.
    PowersOfTwo { max: u32 },
}

impl AllocDist {
    fn validate(&self) -> Result<(), WorkloadError> {
        let ok = match *self {
            AllocDist::Fixed(n) => n >= 1,
            AllocDist::Uniform { min, max } => min >= 1 && max >= min,
            AllocDist::PowersOfTwo { max } => max >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(WorkloadError::InvalidDistribution(format!("{self:?}")))
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> u32 {
        match *self {
            AllocDist::Fixed(n) => n,
            AllocDist::Uniform { min, max } => rng.random_range(min..=max),
            AllocDist::PowersOfTwo { max } => {
                let top = 31 - max.leading_zeros();
                1 << rng.random_range(0..=top)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scaling {
    Linear,
    /// Amdahl scaling with a per-job serial fraction drawn uniformly from
    /// `[min_serial, max_serial]`.
    Amdahl { min_serial: f64, max_serial: f64 },
}

impl Scaling {
    fn validate(&self) -> Result<(), WorkloadError> {
        match *self {
            Scaling::Linear => Ok(()),
            Scaling::Amdahl { min_serial, max_serial }
                if 0.0 <= min_serial && min_serial <= max_serial && max_serial <= 1.0 =>
            {
                Ok(())
            }
            _ => Err(WorkloadError::InvalidDistribution(format!("{self:?}"))),
        }
    }
}

/// Parameters of a synthetic workload.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub n_jobs: usize,
    /// Offered load as a fraction of capacity, in `(0, 1]`.
    pub load: f64,
    pub size_dist: SizeDist,
    pub alloc_dist: AllocDist,
    pub scaling: Scaling,
    pub capacity: u32,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<(), WorkloadError> {
        if self.n_jobs == 0 {
            return Err(WorkloadError::InvalidDistribution("n_jobs must be >= 1".into()));
        }
        if self.capacity == 0 {
            return Err(WorkloadError::InvalidDistribution("capacity must be >= 1".into()));
        }
        if !(self.load > 0.0 && self.load <= 1.0) {
            return Err(WorkloadError::InvalidDistribution(format!(
                "load {} outside (0, 1]",
                self.load
            )));
        }
        self.size_dist.validate()?;
        self.alloc_dist.validate()?;
        self.scaling.validate()
    }
}

/// Generates a Poisson-arrival workload. The arrival rate is set so that the
/// resource-seconds the jobs consume at their full demand, divided by the
/// elapsed arrival window, match `load * capacity`.
pub fn generate_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<Trace, WorkloadError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = digits(spec.n_jobs);

    let mut shapes = Vec::with_capacity(spec.n_jobs);
    for _ in 0..spec.n_jobs {
        let size = spec.size_dist.sample(&mut rng).max(f64::MIN_POSITIVE);
        let max_alloc = spec.alloc_dist.sample(&mut rng).min(spec.capacity);
        let demand = match spec.scaling {
            Scaling::Linear => DemandFunction::linear(size, max_alloc)?,
            Scaling::Amdahl { min_serial, max_serial } => {
                let serial = if max_serial > min_serial {
                    rng.random_range(min_serial..=max_serial)
                } else {
                    min_serial
                };
                DemandFunction::amdahl(size, max_alloc, serial)?
            }
        };
        shapes.push(demand);
    }

    let mean_work = shapes
        .iter()
        .map(|df| {
            let m = df.max_alloc();
            df.exec_time(m).expect("max_alloc is tabulated") * m as f64
        })
        .sum::<f64>()
        / spec.n_jobs as f64;
    let rate = spec.load * spec.capacity as f64 / mean_work;
    let gaps = Exp::new(rate)
        .map_err(|_| WorkloadError::InvalidDistribution(format!("arrival rate {rate}")))?;

    let mut clock = 0.0;
    let mut jobs = Vec::with_capacity(spec.n_jobs);
    for (i, demand) in shapes.into_iter().enumerate() {
        clock += gaps.sample(&mut rng);
        jobs.push(Job::new(format!("j{i:0width$}"), clock, demand)?);
    }
    let mut trace = Trace::new(jobs)?;
    trace.capacity_hint = Some(spec.capacity);
    trace.seed = Some(seed);
    Ok(trace)
}

/// Multiplies every job's visible size by a factor drawn uniformly from
/// `[1 - rel_error, 1 + rel_error]`. True sizes are untouched.
pub fn inject_size_error(trace: &Trace, rel_error: f64, seed: u64) -> Result<Trace, WorkloadError> {
    if !(rel_error >= 0.0 && rel_error.is_finite()) {
        return Err(WorkloadError::InvalidDistribution(format!(
            "relative error {rel_error} must be >= 0"
        )));
    }
    if rel_error == 0.0 {
        return Ok(trace.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(trace.map_jobs(|job| {
        let factor = rng.random_range(1.0 - rel_error..=1.0 + rel_error);
        let mut noisy = job.clone();
        noisy.size = (job.true_size * factor).max(job.true_size * MIN_VISIBLE_FRACTION);
        noisy
    }))
}

fn digits(n: usize) -> usize {
    let mut d = 1;
    let mut v = n.saturating_sub(1);
    while v >= 10 {
        v /= 10;
        d += 1;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workload::squared_cv;

    fn heavy(n: usize) -> SyntheticSpec {
        SyntheticSpec {
            n_jobs: n,
            load: 0.8,
            size_dist: SizeDist::HeavyTailed { shape: 1.5, scale: 100.0 },
            alloc_dist: AllocDist::PowersOfTwo { max: 16 },
            scaling: Scaling::Linear,
            capacity: 64,
        }
    }

    #[test]
    fn single_job() {
        let t = generate_synthetic(&heavy(1), 7).unwrap();
        assert_eq!(t.len(), 1);
        assert!(t.jobs()[0].arrival >= 0.0);
    }

    #[test]
    fn same_seed_same_trace() {
        let a = generate_synthetic(&heavy(200), 3).unwrap();
        let b = generate_synthetic(&heavy(200), 3).unwrap();
        assert_eq!(a, b);
        let c = generate_synthetic(&heavy(200), 4).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn heavy_tail_has_high_variation() {
        let t = generate_synthetic(&heavy(1000), 1).unwrap();
        assert!(squared_cv(&t.sizes()) > 1.0);
    }

    #[test]
    fn realized_load_matches_target() {
        let spec = SyntheticSpec {
            size_dist: SizeDist::LightTailed { mean: 50.0 },
            n_jobs: 4000,
            ..heavy(1)
        };
        let t = generate_synthetic(&spec, 9).unwrap();
        let work: f64 = t.jobs().iter().map(|j| j.size).sum();
        let span = t.jobs().last().unwrap().arrival;
        let load = work / (span * spec.capacity as f64);
        assert!((load - 0.8).abs() < 0.06, "load {load}");
    }

    #[test]
    fn invalid_parameters() {
        let mut spec = heavy(10);
        spec.size_dist = SizeDist::HeavyTailed { shape: -1.0, scale: 1.0 };
        assert!(generate_synthetic(&spec, 0).is_err());
        let mut spec = heavy(10);
        spec.load = 1.5;
        assert!(generate_synthetic(&spec, 0).is_err());
        let mut spec = heavy(0);
        spec.n_jobs = 0;
        assert!(generate_synthetic(&spec, 0).is_err());
    }

    #[test]
    fn size_error_bounds() {
        let t = generate_synthetic(&heavy(300), 5).unwrap();
        assert_eq!(inject_size_error(&t, 0.0, 1).unwrap(), t);
        let noisy = inject_size_error(&t, 0.2, 11).unwrap();
        for (orig, n) in t.jobs().iter().zip(noisy.jobs()) {
            assert_eq!(n.true_size, orig.size);
            assert!((n.size / n.true_size - 1.0).abs() <= 0.2 + 1e-12);
            assert_eq!(n.id, orig.id);
        }
        assert_eq!(noisy, inject_size_error(&t, 0.2, 11).unwrap());
        assert!(inject_size_error(&t, -0.1, 1).is_err());
    }
}
