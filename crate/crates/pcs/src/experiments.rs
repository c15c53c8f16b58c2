//! Experiment drivers behind `pcs experiment`.

use pcs_core::metrics::{Measure, Metric};
use pcs_core::solver::{
    self, cdf, fraction_within, hypervolume, BatchEvaluator, Candidate, EvalContext, Parameterization,
    ParetoPoint, SearchReport, SearchSpace, WorkloadModel,
};
use pcs_core::{ObjectiveSpec, PcsParams, Policy, SimConfig, SolverError};
use serde::Serialize;

use crate::io::Real;

/// `(T, W, zeta_min)` as written in reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamsRow {
    #[serde(rename = "T")]
    pub t: Real,
    #[serde(rename = "W")]
    pub w: f64,
    pub zeta_min: f64,
}

impl From<PcsParams> for ParamsRow {
    fn from(p: PcsParams) -> Self {
        Self {
            t: Real(p.t),
            w: p.w,
            zeta_min: p.zeta_min,
        }
    }
}

fn jct_and_err() -> ObjectiveSpec {
    ObjectiveSpec::new(vec![(Metric::Jct, Measure::Avg), (Metric::PredErr, Measure::Avg)])
        .expect("non-empty spec")
}

/// The front point with the lowest value of objective `k`, preferring points
/// with more than one class when `multi_class` is set.
fn best_params(report: &SearchReport, k: usize, multi_class: bool) -> Result<PcsParams, SolverError> {
    let pick = |pool: &mut dyn Iterator<Item = &ParetoPoint>| {
        pool.min_by(|a, b| a.objectives[k].total_cmp(&b.objectives[k]))
            .and_then(|p| p.candidate.params())
    };
    let multi = if multi_class {
        pick(&mut report.front.iter().filter(|p| p.resolved.num_classes() > 1))
    } else {
        None
    };
    multi.or_else(|| pick(&mut report.front.iter())).ok_or(SolverError::Empty)
}

#[derive(Debug, Clone)]
pub struct SizeErrorSettings {
    /// Workload without error; `size_error` is ignored.
    pub model: WorkloadModel,
    pub errors: Vec<f64>,
    pub seeds: Vec<u64>,
    pub cfg: SimConfig,
    /// Configuration tuned for low prediction error. When absent, the
    /// multi-class point of a JCT/error search with the lowest error.
    pub pred_params: Option<PcsParams>,
    /// Configuration tuned for low JCT. When absent, the lowest-JCT point of
    /// the same search.
    pub jct_params: Option<PcsParams>,
    /// Space for the search that fills in missing configurations.
    pub space: SearchSpace,
    pub search_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeErrorRow {
    pub rel_error: f64,
    pub pcs_pred_err: f64,
    pub fifo_pred_err: f64,
    pub pcs_jct: f64,
    pub afs_jct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeErrorReport {
    pub pcs_pred: ParamsRow,
    pub pcs_jct: ParamsRow,
    /// Evaluations spent finding missing configurations.
    pub search_evaluations: usize,
    /// AFS average JCT with exact sizes.
    pub afs_jct_exact: f64,
    pub rows: Vec<SizeErrorRow>,
}

/// Average |pred_err| of PCS and FIFO and average JCT of PCS and AFS for
/// each relative size error. Configurations are fixed up front on the
/// error-free workload.
pub fn size_error(s: &SizeErrorSettings, evaluator: &dyn BatchEvaluator) -> Result<SizeErrorReport, SolverError> {
    let exact = WorkloadModel::new(s.model.spec.clone());
    let mut search_evaluations = 0;
    let (pred_params, jct_params) = match (s.pred_params, s.jct_params) {
        (Some(p), Some(j)) => (p, j),
        (p, j) => {
            let ctx = EvalContext::new(&exact, &s.seeds, jct_and_err(), &s.cfg)?;
            let report = solver::search(&ctx, &s.space, s.search_seed, evaluator)?;
            if let Some(err) = report.aborted {
                return Err(err);
            }
            search_evaluations = report.evaluations;
            (
                p.map_or_else(|| best_params(&report, 1, true), Ok)?,
                j.map_or_else(|| best_params(&report, 0, false), Ok)?,
            )
        }
    };
    pred_params.validate()?;
    jct_params.validate()?;

    let jct_spec = ObjectiveSpec::new(vec![(Metric::Jct, Measure::Avg)]).expect("non-empty spec");
    let afs_jct_exact = EvalContext::new(&exact, &s.seeds, jct_spec, &s.cfg)?.evaluate_with(|_| Ok(Policy::Afs))?[0];

    let rows = evaluator
        .map_indexed(s.errors.len(), &|i| {
            let model = WorkloadModel {
                spec: s.model.spec.clone(),
                size_error: s.errors[i],
            };
            let ctx = EvalContext::new(&model, &s.seeds, jct_and_err(), &s.cfg)?;
            let pred = ctx.evaluate(&Candidate::Heuristic(pred_params))?;
            let jct = ctx.evaluate(&Candidate::Heuristic(jct_params))?;
            let fifo = ctx.evaluate_with(|_| Ok(Policy::Fifo))?;
            let afs = ctx.evaluate_with(|_| Ok(Policy::Afs))?;
            Ok(vec![pred[1], fifo[1], jct[0], afs[0]])
        })
        .into_iter()
        .zip(&s.errors)
        .map(|(r, &rel_error)| {
            let v = r?;
            Ok(SizeErrorRow {
                rel_error,
                pcs_pred_err: v[0],
                fifo_pred_err: v[1],
                pcs_jct: v[2],
                afs_jct: v[3],
            })
        })
        .collect::<Result<Vec<_>, SolverError>>()?;

    Ok(SizeErrorReport {
        pcs_pred: pred_params.into(),
        pcs_jct: jct_params.into(),
        search_evaluations,
        afs_jct_exact,
        rows,
    })
}

#[derive(Debug, Clone)]
pub struct SensitivitySettings {
    /// Workload searched first; its load is replaced by `load_a`/`load_b`.
    pub model: WorkloadModel,
    pub load_a: f64,
    pub load_b: f64,
    pub spec: ObjectiveSpec,
    pub space: SearchSpace,
    pub cfg: SimConfig,
    pub search_seed: u64,
    /// Distance reported as the headline fraction.
    pub within: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityPoint {
    pub params: Option<ParamsRow>,
    pub objectives_a: Vec<f64>,
    pub objectives_b: Vec<f64>,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityReport {
    pub load_a: f64,
    pub load_b: f64,
    pub evaluations: usize,
    pub front_b: Vec<Vec<f64>>,
    pub points: Vec<SensitivityPoint>,
    /// `(distance, fraction of points at or below it)`.
    pub cdf: Vec<(f64, f64)>,
    pub within: f64,
    pub fraction_within: f64,
}

/// Searches at load A and at load B, then measures how far the load-A front
/// lands from the load-B front when replayed at load B.
pub fn sensitivity(s: &SensitivitySettings, evaluator: &dyn BatchEvaluator) -> Result<SensitivityReport, SolverError> {
    let at = |load: f64| -> Result<(EvalContext, SearchReport), SolverError> {
        let mut model = s.model.clone();
        model.spec.load = load;
        let ctx = EvalContext::new(&model, &s.space.eval_seeds, s.spec.clone(), &s.cfg)?;
        let report = solver::search(&ctx, &s.space, s.search_seed, evaluator)?;
        match report.aborted {
            Some(err) => Err(err),
            None => Ok((ctx, report)),
        }
    };
    let (_, report_a) = at(s.load_a)?;
    let (ctx_b, report_b) = at(s.load_b)?;
    let front_b: Vec<Vec<f64>> = report_b.front.iter().map(|p| p.objectives.clone()).collect();
    let entries = solver::sensitivity(&report_a.front, &ctx_b, &front_b, evaluator)?;
    let distances: Vec<f64> = entries.iter().map(|e| e.distance).collect();
    Ok(SensitivityReport {
        load_a: s.load_a,
        load_b: s.load_b,
        evaluations: report_a.evaluations + report_b.evaluations + entries.len(),
        front_b,
        points: entries
            .into_iter()
            .map(|e| SensitivityPoint {
                params: e.point.candidate.params().map(Into::into),
                objectives_a: e.point.objectives,
                objectives_b: e.reevaluated,
                distance: e.distance,
            })
            .collect(),
        cdf: cdf(&distances),
        within: s.within,
        fraction_within: fraction_within(&distances, s.within),
    })
}

#[derive(Debug, Clone)]
pub struct HeuristicsSettings {
    pub model: WorkloadModel,
    pub spec: ObjectiveSpec,
    /// Shared by both searches; its parameterization is overridden.
    pub space: SearchSpace,
    /// Class count of the unconstrained search.
    pub classes: usize,
    pub cfg: SimConfig,
    pub search_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeuristicsReport {
    pub budget: usize,
    pub classes: usize,
    pub heuristic_evaluations: usize,
    pub raw_evaluations: usize,
    pub heuristic_front: Vec<Vec<f64>>,
    pub raw_front: Vec<Vec<f64>>,
    /// Fronts are scaled to `[0, 1]` per objective over their union before
    /// measuring; the reference point is 1.1 in every objective.
    pub heuristic_hypervolume: f64,
    pub raw_hypervolume: f64,
}

/// Hypervolumes of the `(T, W, zeta_min)` search and of a search over raw
/// thresholds and weights, at equal budget and seed.
pub fn heuristics(s: &HeuristicsSettings, evaluator: &dyn BatchEvaluator) -> Result<HeuristicsReport, SolverError> {
    let ctx = EvalContext::new(&s.model, &s.space.eval_seeds, s.spec.clone(), &s.cfg)?;
    let run = |parameterization| -> Result<SearchReport, SolverError> {
        let space = SearchSpace {
            parameterization,
            ..s.space.clone()
        };
        let report = solver::search(&ctx, &space, s.search_seed, evaluator)?;
        match report.aborted {
            Some(err) => Err(err),
            None => Ok(report),
        }
    };
    let heuristic = run(Parameterization::Heuristic)?;
    let raw = run(Parameterization::Raw { classes: s.classes })?;
    let objs = |r: &SearchReport| r.front.iter().map(|p| p.objectives.clone()).collect::<Vec<_>>();
    let (hf, rf) = (objs(&heuristic), objs(&raw));
    let (h_hv, r_hv) = normalized_hypervolumes(&hf, &rf);
    Ok(HeuristicsReport {
        budget: s.space.budget(),
        classes: s.classes,
        heuristic_evaluations: heuristic.evaluations,
        raw_evaluations: raw.evaluations,
        heuristic_front: hf,
        raw_front: rf,
        heuristic_hypervolume: h_hv,
        raw_hypervolume: r_hv,
    })
}

/// Hypervolumes of two fronts after min-max scaling over their union.
pub fn normalized_hypervolumes(a: &[Vec<f64>], b: &[Vec<f64>]) -> (f64, f64) {
    let Some(d) = a.iter().chain(b).map(Vec::len).next() else {
        return (0.0, 0.0);
    };
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in a.iter().chain(b) {
        for k in 0..d {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let scale = |front: &[Vec<f64>]| -> Vec<Vec<f64>> {
        front
            .iter()
            .map(|p| {
                (0..d)
                    .map(|k| if hi[k] > lo[k] { (p[k] - lo[k]) / (hi[k] - lo[k]) } else { 0.0 })
                    .collect()
            })
            .collect()
    };
    let reference = vec![1.1; d];
    (hypervolume(&scale(a), &reference), hypervolume(&scale(b), &reference))
}
