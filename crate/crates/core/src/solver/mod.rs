//! Pareto search over WFQ configurations.

pub mod pareto;
pub mod sensitivity;
pub mod spea2;

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::engine::{run, SimConfig, SimResult};
use crate::error::{SimError, SolverError};
use crate::math;
use crate::metrics::{attach_fft, compute_fft, evaluate_objectives, ObjectiveSpec};
use crate::policy::{PcsParams, Policy, WfqConfig};
use crate::workload::{generate_synthetic, inject_size_error, SyntheticSpec, Trace};

pub use pareto::{dominates, hypervolume, non_dominated_indices, pareto_filter};
pub use sensitivity::{cdf, distance_to_front, fraction_within, sensitivity, SensitivityEntry};
pub use spea2::{BatchEvaluator, EvalResult, GeneProblem, SerialEvaluator, Spea2Settings};

/// How genes map to WFQ configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parameterization {
    /// Genes are `(log10 T, W, zeta_min)`; thresholds and weights are derived
    /// from each evaluation trace.
    Heuristic,
    /// Genes are `classes - 1` log10 thresholds, `classes` log10 weights and
    /// `zeta_min`, used as given on every trace.
    Raw { classes: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    /// `T` range; the upper end stands for `T = inf` (a single class).
    pub t_range: (f64, f64),
    pub w_range: (f64, f64),
    pub zeta_range: (f64, f64),
    pub population: usize,
    pub generations: usize,
    pub archive_size: usize,
    /// Workload seeds shared by every candidate.
    pub eval_seeds: Vec<u64>,
    pub parameterization: Parameterization,
}

impl Default for SearchSpace {
    fn default() -> Self {
        Self {
            t_range: (0.01, 100.0),
            w_range: (0.0, 5.0),
            zeta_range: (0.0, 1.0),
            population: 40,
            generations: 25,
            archive_size: 40,
            eval_seeds: vec![0],
            parameterization: Parameterization::Heuristic,
        }
    }
}

impl SearchSpace {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: &str| Err(SolverError::InvalidSpace(m.into()));
        let (tl, th) = self.t_range;
        if !(tl > 0.0 && tl < th && th.is_finite()) {
            return bad("T range must satisfy 0 < min < max < inf");
        }
        let (wl, wh) = self.w_range;
        if !(wl >= 0.0 && wl < wh && wh.is_finite()) {
            return bad("W range must satisfy 0 <= min < max < inf");
        }
        let (zl, zh) = self.zeta_range;
        if !(0.0 <= zl && zl < zh && zh <= 1.0) {
            return bad("zeta range must satisfy 0 <= min < max <= 1");
        }
        if self.population == 0 || self.generations == 0 || self.archive_size == 0 {
            return bad("population, generations and archive size must be >= 1");
        }
        if self.eval_seeds.is_empty() {
            return bad("at least one evaluation seed is required");
        }
        if let Parameterization::Raw { classes } = self.parameterization {
            if classes == 0 {
                return bad("raw parameterization needs at least one class");
            }
        }
        Ok(())
    }

    /// Population times generations.
    pub fn budget(&self) -> usize {
        self.population * self.generations
    }

    pub fn settings(&self) -> Spea2Settings {
        Spea2Settings {
            population: self.population,
            archive_size: self.archive_size,
            generations: self.generations,
            ..Spea2Settings::default()
        }
    }
}

/// A configuration the solver can evaluate.
#[derive(Debug, Clone, PartialEq)]
pub enum Candidate {
    Heuristic(PcsParams),
    Raw(WfqConfig),
}

impl Candidate {
    pub fn params(&self) -> Option<PcsParams> {
        match self {
            Candidate::Heuristic(p) => Some(*p),
            Candidate::Raw(_) => None,
        }
    }

    /// The policy applied to `trace`.
    pub fn policy_for(&self, trace: &Trace) -> Result<Policy, SimError> {
        match self {
            Candidate::Heuristic(p) => Policy::pcs_from_params(p, &trace.sizes()),
            Candidate::Raw(cfg) => Ok(Policy::Pcs(cfg.clone())),
        }
    }

    /// The configuration reported for a size sample.
    pub fn resolve(&self, size_sample: &[f64]) -> Result<WfqConfig, SimError> {
        match self {
            Candidate::Heuristic(p) => p.resolve(size_sample),
            Candidate::Raw(cfg) => Ok(cfg.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParetoPoint {
    pub candidate: Candidate,
    /// Thresholds and weights against the union of the evaluation samples.
    pub resolved: WfqConfig,
    pub genes: Vec<f64>,
    pub objectives: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    /// Non-dominated points, ordered by first objective.
    pub front: Vec<ParetoPoint>,
    pub evaluations: usize,
    pub cache_hits: usize,
    pub generations_completed: usize,
    /// Set when an evaluation failed; `front` then comes from the last
    /// complete generation.
    pub aborted: Option<SolverError>,
}

/// Source of evaluation traces.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadModel {
    pub spec: SyntheticSpec,
    /// Relative error applied to scheduler-visible sizes.
    pub size_error: f64,
}

impl WorkloadModel {
    pub fn new(spec: SyntheticSpec) -> Self {
        Self {
            spec,
            size_error: 0.0,
        }
    }

    pub fn sample(&self, seed: u64) -> Result<Trace, SolverError> {
        let trace = generate_synthetic(&self.spec, seed).map_err(SimError::from)?;
        if self.size_error > 0.0 {
            let noisy = inject_size_error(&trace, self.size_error, seed ^ 0x5eed_e77e)
                .map_err(SimError::from)?;
            Ok(noisy)
        } else {
            Ok(trace)
        }
    }
}

/// Evaluation traces with their fair finish times, shared by every candidate.
#[derive(Debug, Clone)]
pub struct EvalContext {
    traces: Vec<Trace>,
    fft: Vec<Option<Vec<f64>>>,
    spec: ObjectiveSpec,
    cfg: SimConfig,
    union_sizes: Vec<f64>,
}

impl EvalContext {
    pub fn new(
        model: &WorkloadModel,
        seeds: &[u64],
        spec: ObjectiveSpec,
        cfg: &SimConfig,
    ) -> Result<Self, SolverError> {
        let traces = seeds
            .iter()
            .map(|&s| model.sample(s))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_traces(traces, spec, cfg)
    }

    /// Fair finish times are computed once per trace when the spec needs them.
    pub fn from_traces(traces: Vec<Trace>, spec: ObjectiveSpec, cfg: &SimConfig) -> Result<Self, SolverError> {
        if traces.is_empty() || traces.iter().any(Trace::is_empty) {
            return Err(SolverError::Empty);
        }
        let mut cfg = cfg.clone();
        cfg.predict = spec.needs_predictions();
        cfg.validate()?;
        let fft = traces
            .iter()
            .map(|t| spec.needs_fft().then(|| compute_fft(t, &cfg)).transpose())
            .collect::<Result<Vec<_>, _>>()?;
        let union_sizes = traces.iter().flat_map(|t| t.sizes()).collect();
        Ok(Self {
            traces,
            fft,
            spec,
            cfg,
            union_sizes,
        })
    }

    pub fn traces(&self) -> &[Trace] {
        &self.traces
    }

    pub fn spec(&self) -> &ObjectiveSpec {
        &self.spec
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn union_sizes(&self) -> &[f64] {
        &self.union_sizes
    }

    /// Runs every trace under the policy `make` builds for it; fair finish
    /// times are attached when available.
    pub fn run_all(
        &self,
        make: impl Fn(&Trace) -> Result<Policy, SimError>,
    ) -> Result<Vec<SimResult>, SolverError> {
        self.traces
            .iter()
            .zip(&self.fft)
            .map(|(trace, fft)| {
                let mut result = run(trace, make(trace)?, &self.cfg)?;
                if let Some(fft) = fft {
                    attach_fft(&mut result, fft);
                }
                Ok(result)
            })
            .collect()
    }

    /// Per-objective mean over the evaluation traces.
    pub fn evaluate_with(
        &self,
        make: impl Fn(&Trace) -> Result<Policy, SimError>,
    ) -> Result<Vec<f64>, SolverError> {
        let mut sum = vec![0.0; self.spec.len()];
        for result in self.run_all(make)? {
            let obj = evaluate_objectives(&result, &self.spec)?;
            for (s, v) in sum.iter_mut().zip(obj) {
                *s += v;
            }
        }
        let n = self.traces.len() as f64;
        let out: Vec<f64> = sum.into_iter().map(|s| s / n).collect();
        if out.iter().any(|v| v.is_nan()) {
            return Err(SolverError::InvalidObjective("objective evaluated to NaN".into()));
        }
        Ok(out)
    }

    pub fn evaluate(&self, candidate: &Candidate) -> Result<Vec<f64>, SolverError> {
        self.evaluate_with(|t| candidate.policy_for(t))
    }
}

/// Objective vector of `params`, averaged over the traces the model yields for
/// `seeds`.
pub fn evaluate_config(
    params: &PcsParams,
    model: &WorkloadModel,
    spec: &ObjectiveSpec,
    seeds: &[u64],
    cfg: &SimConfig,
) -> Result<Vec<f64>, SolverError> {
    params.validate()?;
    let ctx = EvalContext::new(model, seeds, spec.clone(), cfg)?;
    ctx.evaluate(&Candidate::Heuristic(*params))
}

/// Maps genes to candidates for a given space and context.
#[derive(Debug, Clone)]
pub struct Decoder {
    bounds: Vec<(f64, f64)>,
    parameterization: Parameterization,
}

impl Decoder {
    pub fn new(space: &SearchSpace, size_sample: &[f64]) -> Result<Self, SolverError> {
        space.validate()?;
        let bounds = match space.parameterization {
            Parameterization::Heuristic => vec![
                (math::log10(space.t_range.0), math::log10(space.t_range.1)),
                space.w_range,
                space.zeta_range,
            ],
            Parameterization::Raw { classes } => {
                let (lo, hi) = size_sample
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| (lo.min(s), hi.max(s)));
                if !(lo > 0.0 && hi.is_finite()) {
                    return Err(SolverError::Empty);
                }
                let t_bounds = (math::log10(lo), math::log10(hi) + 0.01);
                let mut b = vec![t_bounds; classes - 1];
                b.extend(vec![(-3.0, 0.0); classes]);
                b.push(space.zeta_range);
                b
            }
        };
        Ok(Self {
            bounds,
            parameterization: space.parameterization,
        })
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    /// Genes of the plain FIFO configuration.
    pub fn fifo_genes(&self) -> Vec<f64> {
        match self.parameterization {
            Parameterization::Heuristic => vec![self.bounds[0].1, self.bounds[1].0, self.bounds[2].0],
            Parameterization::Raw { classes } => {
                let mut g: Vec<f64> = self.bounds[..classes - 1].iter().map(|b| b.1).collect();
                g.extend(vec![0.0; classes]);
                g.push(self.bounds.last().unwrap().0);
                g
            }
        }
    }

    pub fn decode(&self, genes: &[f64]) -> Result<Candidate, SolverError> {
        if genes.len() != self.bounds.len() {
            return Err(SolverError::LengthMismatch(genes.len(), self.bounds.len()));
        }
        match self.parameterization {
            Parameterization::Heuristic => {
                let t = if genes[0] >= self.bounds[0].1 {
                    f64::INFINITY
                } else {
                    math::powf(10.0, genes[0])
                };
                Ok(Candidate::Heuristic(PcsParams::new(t, genes[1], genes[2])?))
            }
            Parameterization::Raw { classes } => {
                let mut cuts: Vec<f64> = genes[..classes - 1]
                    .iter()
                    .map(|&g| math::powf(10.0, g))
                    .collect();
                cuts.sort_by(f64::total_cmp);
                cuts.dedup();
                let top = math::powf(10.0, self.bounds[0].1);
                cuts.retain(|&c| c < top);
                cuts.push(f64::INFINITY);
                let weights: Vec<f64> = genes[classes - 1..2 * classes - 1]
                    .iter()
                    .take(cuts.len())
                    .map(|&g| math::powf(10.0, g))
                    .collect();
                let zeta = genes[2 * classes - 1];
                Ok(Candidate::Raw(WfqConfig::new(cuts, weights, zeta)?))
            }
        }
    }
}

struct SearchProblem<'a> {
    ctx: &'a EvalContext,
    decoder: &'a Decoder,
}

impl GeneProblem for SearchProblem<'_> {
    fn evaluate(&self, genes: &[f64]) -> EvalResult {
        self.ctx.evaluate(&self.decoder.decode(genes)?)
    }
}

/// SPEA2 search for configurations minimizing the context's objectives.
///
/// The first population holds the FIFO configuration plus uniform random
/// points. The result depends only on the inputs and `seed`.
pub fn search(
    ctx: &EvalContext,
    space: &SearchSpace,
    seed: u64,
    evaluator: &dyn BatchEvaluator,
) -> Result<SearchReport, SolverError> {
    let decoder = Decoder::new(space, ctx.union_sizes())?;
    let problem = SearchProblem {
        ctx,
        decoder: &decoder,
    };
    let outcome = spea2::spea2(
        decoder.bounds(),
        &space.settings(),
        &[decoder.fifo_genes()],
        &problem,
        evaluator,
        seed,
    )?;

    let mut seen = BTreeSet::new();
    let mut points = Vec::new();
    for ind in outcome.archive {
        let key: Vec<u64> = ind.genes.iter().map(|g| g.to_bits()).collect();
        if !seen.insert(key) {
            continue;
        }
        let candidate = decoder.decode(&ind.genes)?;
        points.push(ParetoPoint {
            resolved: candidate.resolve(ctx.union_sizes())?,
            candidate,
            genes: ind.genes,
            objectives: ind.objectives,
        });
    }
    Ok(SearchReport {
        front: pareto_filter(&points, |p| p.objectives.as_slice()),
        evaluations: outcome.evaluations,
        cache_hits: outcome.cache_hits,
        generations_completed: outcome.generations_completed,
        aborted: outcome.aborted,
    })
}
