use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::AllocationPlan;
use crate::engine::JobRuntime;
use crate::error::SimError;
use crate::math;

/// Class thresholds, class weights and the efficiency floor for demand caps.
///
/// A job of size `s` belongs to the first class `k` with `s <= thresholds[k]`;
/// the last threshold is always `+inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct WfqConfig {
    pub thresholds: Vec<f64>,
    pub weights: Vec<f64>,
    pub zeta_min: f64,
}

impl WfqConfig {
    pub fn new(thresholds: Vec<f64>, weights: Vec<f64>, zeta_min: f64) -> Result<Self, SimError> {
        let cfg = Self {
            thresholds,
            weights,
            zeta_min,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// One class with unit weight and no demand capping: plain FIFO.
    pub fn single_class() -> Self {
        Self {
            thresholds: vec![f64::INFINITY],
            weights: vec![1.0],
            zeta_min: 0.0,
        }
    }

    pub fn num_classes(&self) -> usize {
        self.thresholds.len()
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |msg: alloc::string::String| Err(SimError::InvalidPolicy(msg));
        if self.thresholds.is_empty() {
            return bad("at least one class is required".into());
        }
        if self.thresholds.len() != self.weights.len() {
            return bad(format!(
                "{} thresholds but {} weights",
                self.thresholds.len(),
                self.weights.len()
            ));
        }
        if *self.thresholds.last().unwrap() != f64::INFINITY {
            return bad("last threshold must be +inf".into());
        }
        if self.thresholds.windows(2).any(|w| !(w[0] < w[1])) {
            return bad("thresholds must be strictly increasing".into());
        }
        if self.weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return bad("weights must be finite and > 0".into());
        }
        if !(0.0..=1.0).contains(&self.zeta_min) {
            return bad(format!("zeta_min {} outside [0, 1]", self.zeta_min));
        }
        Ok(())
    }
}

/// The three-parameter family: C² budget per class, weight decay and the
/// efficiency floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcsParams {
    pub t: f64,
    pub w: f64,
    pub zeta_min: f64,
}

impl PcsParams {
    pub fn new(t: f64, w: f64, zeta_min: f64) -> Result<Self, SimError> {
        let p = Self { t, w, zeta_min };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.t > 0.0) {
            return Err(SimError::InvalidPolicy(format!("T = {} must be > 0", self.t)));
        }
        if !(self.w.is_finite() && self.w >= 0.0) {
            return Err(SimError::InvalidPolicy(format!("W = {} must be >= 0", self.w)));
        }
        if !(0.0..=1.0).contains(&self.zeta_min) {
            return Err(SimError::InvalidPolicy(format!(
                "zeta_min = {} outside [0, 1]",
                self.zeta_min
            )));
        }
        Ok(())
    }

    /// Derives thresholds from `size_sample` and weights from the class count.
    pub fn resolve(&self, size_sample: &[f64]) -> Result<WfqConfig, SimError> {
        self.validate()?;
        let thresholds = if size_sample.is_empty() {
            vec![f64::INFINITY]
        } else {
            derive_thresholds(size_sample, self.t)
        };
        let weights = derive_weights(thresholds.len(), self.w);
        WfqConfig::new(thresholds, weights, self.zeta_min)
    }
}

/// Index of the first class whose threshold is at least `size`.
pub fn classify(size: f64, thresholds: &[f64]) -> usize {
    thresholds
        .partition_point(|&t| t < size)
        .min(thresholds.len().saturating_sub(1))
}

/// Greedy class construction over the sorted sample. Equal sizes are admitted
/// together, so every class of the sample ends with C² at most `t`. Each
/// closed class's threshold is its largest size; the last becomes `+inf`.
pub fn derive_thresholds(size_sample: &[f64], t: f64) -> Vec<f64> {
    let mut sorted = size_sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut thresholds = Vec::new();
    // Running sums of the open class.
    let (mut n, mut sum, mut sum_sq) = (0.0f64, 0.0f64, 0.0f64);
    let mut upper = f64::NAN;
    let mut i = 0;
    while i < sorted.len() {
        let value = sorted[i];
        let run = sorted[i..].iter().take_while(|&&v| v == value).count();
        let k = run as f64;
        if n > 0.0 {
            let (n2, s2, q2) = (n + k, sum + k * value, sum_sq + k * value * value);
            let mean = s2 / n2;
            let c2 = (q2 / n2 - mean * mean) / (mean * mean);
            if c2 > t {
                thresholds.push(upper);
                n = 0.0;
                sum = 0.0;
                sum_sq = 0.0;
            }
        }
        n += k;
        sum += k * value;
        sum_sq += k * value * value;
        upper = value;
        i += run;
    }
    thresholds.push(f64::INFINITY);
    thresholds
}

/// `w_i = exp(-i * w)`, floored at the smallest positive normal float so
/// every class keeps a strictly positive share.
pub fn derive_weights(n_classes: usize, w: f64) -> Vec<f64> {
    (0..n_classes.max(1))
        .map(|i| math::exp(-(i as f64) * w).max(f64::MIN_POSITIVE))
        .collect()
}

/// Weighted fair queueing across classes, FIFO inside a class.
///
/// Non-empty classes split capacity in proportion to their weights, capped at
/// the sum of their jobs' maximum allocations, with any excess re-split among
/// the rest. Within a class the share goes out in arrival order: first up to
/// each job's demand cap, then a second pass relaxes caps up to the maximum.
pub fn wfq_allocate(jobs: &[JobRuntime], cfg: &WfqConfig, capacity: f64, eps: f64) -> AllocationPlan {
    let mut out = vec![0.0; jobs.len()];
    if jobs.is_empty() {
        return out.into();
    }
    let n_classes = cfg.num_classes();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, j) in jobs.iter().enumerate() {
        let class = j
            .class_index
            .unwrap_or_else(|| classify(j.job.size, &cfg.thresholds))
            .min(n_classes - 1);
        members[class].push(i);
    }

    let active: Vec<usize> = (0..n_classes).filter(|&c| !members[c].is_empty()).collect();
    let max_w = active
        .iter()
        .map(|&c| cfg.weights[c])
        .fold(0.0f64, f64::max);
    let weight: Vec<f64> = active.iter().map(|&c| cfg.weights[c] / max_w).collect();
    let limit: Vec<f64> = active
        .iter()
        .map(|&c| members[c].iter().map(|&i| jobs[i].max_alloc()).sum())
        .collect();
    let shares = weighted_water_fill(&weight, &limit, capacity);

    for (slot, &c) in active.iter().enumerate() {
        let mut residual = shares[slot];
        for &i in &members[c] {
            if residual <= eps {
                break;
            }
            let give = residual.min(jobs[i].cap.min(jobs[i].max_alloc()));
            out[i] = give;
            residual -= give;
        }
        for &i in &members[c] {
            if residual <= eps {
                break;
            }
            let give = residual.min(jobs[i].max_alloc() - out[i]);
            if give > 0.0 {
                out[i] += give;
                residual -= give;
            }
        }
    }
    out.into()
}

/// Splits `capacity` in proportion to `weights`, never giving an entry more
/// than its `limit`; capacity freed by saturated entries is re-split among
/// the others.
fn weighted_water_fill(weights: &[f64], limits: &[f64], capacity: f64) -> Vec<f64> {
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| (limits[a] / weights[a]).total_cmp(&(limits[b] / weights[b])).then(a.cmp(&b)));
    let mut shares = vec![0.0; weights.len()];
    let mut residual = capacity;
    let mut pos = 0;
    while pos < order.len() {
        // Summed afresh: weights can span many orders of magnitude, and
        // subtracting saturated ones would leave mostly rounding error.
        let weight_left: f64 = order[pos..].iter().map(|&c| weights[c]).sum();
        let c = order[pos];
        let fair = residual * weights[c] / weight_left;
        if limits[c] <= fair {
            shares[c] = limits[c];
            residual -= limits[c];
            pos += 1;
        } else {
            for &c in &order[pos..] {
                shares[c] = residual * weights[c] / weight_left;
            }
            break;
        }
    }
    shares
}
