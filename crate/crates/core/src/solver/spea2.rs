//! SPEA2 over a box-bounded real vector.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::pareto::dominates_unchecked;
use crate::error::SolverError;
use crate::math;

/// Maps a gene vector to an objective vector (lower is better).
pub trait GeneProblem: Sync {
    fn evaluate(&self, genes: &[f64]) -> EvalResult;
}

/// Runs independent evaluations. Output slot `i` must hold `f(i)`, whatever
/// order the calls complete in.
pub trait BatchEvaluator {
    fn map_indexed(&self, n: usize, f: &(dyn Fn(usize) -> EvalResult + Sync)) -> Vec<EvalResult>;
}

pub type EvalResult = Result<Vec<f64>, SolverError>;

/// In-thread evaluation.
#[derive(Debug, Clone, Copy, Default)]
pub struct SerialEvaluator;

impl BatchEvaluator for SerialEvaluator {
    fn map_indexed(&self, n: usize, f: &(dyn Fn(usize) -> EvalResult + Sync)) -> Vec<EvalResult> {
        (0..n).map(f).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spea2Settings {
    pub population: usize,
    pub archive_size: usize,
    pub generations: usize,
    pub crossover_prob: f64,
    /// SBX distribution index.
    pub eta_crossover: f64,
    /// Polynomial mutation distribution index.
    pub eta_mutation: f64,
    /// Per-gene mutation probability; `None` means `1 / dimensions`.
    pub mutation_prob: Option<f64>,
}

impl Default for Spea2Settings {
    fn default() -> Self {
        Self {
            population: 40,
            archive_size: 40,
            generations: 25,
            crossover_prob: 0.9,
            eta_crossover: 15.0,
            eta_mutation: 20.0,
            mutation_prob: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genes: Vec<f64>,
    pub objectives: Vec<f64>,
    /// Raw fitness plus density; below 1 means non-dominated.
    pub fitness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spea2Outcome {
    pub archive: Vec<Individual>,
    /// Distinct gene vectors sent to the evaluator.
    pub evaluations: usize,
    /// Offspring whose genes had been evaluated before.
    pub cache_hits: usize,
    pub generations_completed: usize,
    /// Set when an evaluation failed; `archive` then holds the last complete
    /// generation.
    pub aborted: Option<SolverError>,
}

type GeneKey = Vec<u64>;

fn key(genes: &[f64]) -> GeneKey {
    genes.iter().map(|g| g.to_bits()).collect()
}

/// Runs SPEA2. `seeds` are injected into the first population before the
/// random fill. Results do not depend on how the evaluator schedules work.
pub fn spea2(
    bounds: &[(f64, f64)],
    settings: &Spea2Settings,
    seeds: &[Vec<f64>],
    problem: &dyn GeneProblem,
    evaluator: &dyn BatchEvaluator,
    rng_seed: u64,
) -> Result<Spea2Outcome, SolverError> {
    if settings.population == 0 || settings.archive_size == 0 || settings.generations == 0 {
        return Err(SolverError::InvalidSpace(
            "population, archive size and generations must be >= 1".into(),
        ));
    }
    if bounds.is_empty() || bounds.iter().any(|(lo, hi)| !(lo < hi)) {
        return Err(SolverError::InvalidSpace("bounds must be non-degenerate".into()));
    }
    let dims = bounds.len();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut cache: BTreeMap<GeneKey, Vec<f64>> = BTreeMap::new();
    let mut evaluations = 0;
    let mut cache_hits = 0;

    let mut population: Vec<Vec<f64>> = seeds
        .iter()
        .take(settings.population)
        .map(|s| clamp_genes(s, bounds))
        .collect();
    while population.len() < settings.population {
        population.push(
            bounds
                .iter()
                .map(|&(lo, hi)| rng.random_range(lo..=hi))
                .collect(),
        );
    }

    let mut archive: Vec<Individual> = Vec::new();
    for generation in 0..settings.generations {
        let mut pending: Vec<Vec<f64>> = Vec::new();
        let mut pending_keys: BTreeMap<GeneKey, ()> = BTreeMap::new();
        for genes in &population {
            let k = key(genes);
            if cache.contains_key(&k) {
                cache_hits += 1;
            } else if pending_keys.insert(k, ()).is_none() {
                pending.push(genes.clone());
            }
        }
        evaluations += pending.len();
        let results = evaluator.map_indexed(pending.len(), &|i| problem.evaluate(&pending[i]));
        for (genes, result) in pending.iter().zip(results) {
            match result {
                Ok(obj) if obj.iter().all(|v| !v.is_nan()) => {
                    cache.insert(key(genes), obj);
                }
                Ok(_) => {
                    return Ok(aborted(archive, evaluations, cache_hits, generation,
                        SolverError::InvalidObjective("objective vector contains NaN".into())));
                }
                Err(e) => return Ok(aborted(archive, evaluations, cache_hits, generation, e)),
            }
        }

        let mut union: Vec<Individual> = population
            .iter()
            .map(|g| Individual {
                genes: g.clone(),
                objectives: cache[&key(g)].clone(),
                fitness: 0.0,
            })
            .chain(archive.drain(..))
            .collect();
        assign_fitness(&mut union, settings.population + settings.archive_size);
        archive = environmental_selection(union, settings.archive_size);

        if generation + 1 == settings.generations {
            break;
        }
        population = offspring(&archive, bounds, settings, dims, &mut rng);
    }

    Ok(Spea2Outcome {
        archive,
        evaluations,
        cache_hits,
        generations_completed: settings.generations,
        aborted: None,
    })
}

fn aborted(
    archive: Vec<Individual>,
    evaluations: usize,
    cache_hits: usize,
    generation: usize,
    err: SolverError,
) -> Spea2Outcome {
    Spea2Outcome {
        archive,
        evaluations,
        cache_hits,
        generations_completed: generation,
        aborted: Some(err),
    }
}

fn clamp_genes(genes: &[f64], bounds: &[(f64, f64)]) -> Vec<f64> {
    genes
        .iter()
        .zip(bounds)
        .map(|(g, &(lo, hi))| g.clamp(lo, hi))
        .collect()
}

/// Objective vectors rescaled to the unit box spanned by the set.
fn normalized(set: &[Individual]) -> Vec<Vec<f64>> {
    let m = set[0].objectives.len();
    let mut lo = alloc::vec![f64::INFINITY; m];
    let mut hi = alloc::vec![f64::NEG_INFINITY; m];
    for ind in set {
        for (k, &v) in ind.objectives.iter().enumerate() {
            lo[k] = lo[k].min(v);
            hi[k] = hi[k].max(v);
        }
    }
    set.iter()
        .map(|ind| {
            ind.objectives
                .iter()
                .enumerate()
                .map(|(k, &v)| {
                    let span = hi[k] - lo[k];
                    if span > 0.0 && span.is_finite() {
                        (v - lo[k]) / span
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    math::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// Strength-based raw fitness plus k-th nearest neighbour density.
fn assign_fitness(set: &mut [Individual], pool_size: usize) {
    let n = set.len();
    let mut strength = alloc::vec![0usize; n];
    let mut dominated_by: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if i != j && dominates_unchecked(&set[i].objectives, &set[j].objectives) {
                strength[i] += 1;
                dominated_by[j].push(i);
            }
        }
    }
    let norm = normalized(set);
    let k = (math::sqrt(pool_size as f64) as usize).clamp(1, n.saturating_sub(1).max(1));
    for i in 0..n {
        let raw: usize = dominated_by[i].iter().map(|&d| strength[d]).sum();
        let mut dists: Vec<f64> = (0..n)
            .filter(|&j| j != i)
            .map(|j| distance(&norm[i], &norm[j]))
            .collect();
        dists.sort_by(f64::total_cmp);
        let sigma = dists.get(k - 1).copied().unwrap_or(0.0);
        set[i].fitness = raw as f64 + 1.0 / (sigma + 2.0);
    }
}

fn environmental_selection(mut set: Vec<Individual>, archive_size: usize) -> Vec<Individual> {
    let (mut next, mut rest): (Vec<Individual>, Vec<Individual>) =
        set.drain(..).partition(|ind| ind.fitness < 1.0);
    if next.len() < archive_size {
        rest.sort_by(|a, b| a.fitness.total_cmp(&b.fitness));
        next.extend(rest.into_iter().take(archive_size - next.len()));
    } else {
        truncate(&mut next, archive_size);
    }
    next
}

/// Repeatedly drops the individual whose sorted neighbour distances are
/// lexicographically smallest.
fn truncate(set: &mut Vec<Individual>, target: usize) {
    if set.len() <= target {
        return;
    }
    let norm = normalized(set);
    let n = set.len();
    let mut dist = alloc::vec![alloc::vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = distance(&norm[i], &norm[j]);
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    let mut alive: Vec<usize> = (0..n).collect();
    while alive.len() > target {
        let mut worst = 0;
        let mut worst_profile: Option<Vec<f64>> = None;
        for (pos, &i) in alive.iter().enumerate() {
            let mut profile: Vec<f64> = alive
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| dist[i][j])
                .collect();
            profile.sort_by(f64::total_cmp);
            let smaller = match &worst_profile {
                None => true,
                Some(w) => profile
                    .iter()
                    .zip(w)
                    .map(|(a, b)| a.total_cmp(b))
                    .find(|o| o.is_ne())
                    .is_some_and(|o| o.is_lt()),
            };
            if smaller {
                worst = pos;
                worst_profile = Some(profile);
            }
        }
        alive.remove(worst);
    }
    let mut keep = alloc::vec![false; n];
    for i in alive {
        keep[i] = true;
    }
    let mut idx = 0;
    set.retain(|_| {
        let k = keep[idx];
        idx += 1;
        k
    });
}

fn tournament<'a>(archive: &'a [Individual], rng: &mut ChaCha8Rng) -> &'a Individual {
    let a = &archive[rng.random_range(0..archive.len())];
    let b = &archive[rng.random_range(0..archive.len())];
    if b.fitness < a.fitness {
        b
    } else {
        a
    }
}

fn offspring(
    archive: &[Individual],
    bounds: &[(f64, f64)],
    settings: &Spea2Settings,
    dims: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<f64>> {
    let p_mut = settings.mutation_prob.unwrap_or(1.0 / dims as f64);
    let mut children = Vec::with_capacity(settings.population);
    while children.len() < settings.population {
        let p1 = tournament(archive, rng).genes.clone();
        let p2 = tournament(archive, rng).genes.clone();
        let (mut c1, mut c2) = if rng.random::<f64>() < settings.crossover_prob {
            sbx(&p1, &p2, bounds, settings.eta_crossover, rng)
        } else {
            (p1, p2)
        };
        polynomial_mutation(&mut c1, bounds, settings.eta_mutation, p_mut, rng);
        polynomial_mutation(&mut c2, bounds, settings.eta_mutation, p_mut, rng);
        children.push(c1);
        if children.len() < settings.population {
            children.push(c2);
        }
    }
    children
}

/// Bounded simulated binary crossover.
fn sbx(
    p1: &[f64],
    p2: &[f64],
    bounds: &[(f64, f64)],
    eta: f64,
    rng: &mut ChaCha8Rng,
) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    for i in 0..p1.len() {
        if rng.random::<f64>() > 0.5 || (p1[i] - p2[i]).abs() <= 1e-14 {
            continue;
        }
        let (lo, hi) = bounds[i];
        let (y1, y2) = if p1[i] < p2[i] { (p1[i], p2[i]) } else { (p2[i], p1[i]) };
        let u: f64 = rng.random();
        let spread = |beta: f64| {
            let alpha = 2.0 - math::powf(beta, -(eta + 1.0));
            if u <= 1.0 / alpha {
                math::powf(u * alpha, 1.0 / (eta + 1.0))
            } else {
                math::powf(1.0 / (2.0 - u * alpha), 1.0 / (eta + 1.0))
            }
        };
        let beta_lo = 1.0 + 2.0 * (y1 - lo) / (y2 - y1);
        let child_lo = 0.5 * ((y1 + y2) - spread(beta_lo) * (y2 - y1));
        let beta_hi = 1.0 + 2.0 * (hi - y2) / (y2 - y1);
        let child_hi = 0.5 * ((y1 + y2) + spread(beta_hi) * (y2 - y1));
        let (a, b) = (child_lo.clamp(lo, hi), child_hi.clamp(lo, hi));
        if rng.random::<f64>() < 0.5 {
            c1[i] = b;
            c2[i] = a;
        } else {
            c1[i] = a;
            c2[i] = b;
        }
    }
    (c1, c2)
}

fn polynomial_mutation(genes: &mut [f64], bounds: &[(f64, f64)], eta: f64, prob: f64, rng: &mut ChaCha8Rng) {
    for (g, &(lo, hi)) in genes.iter_mut().zip(bounds) {
        if rng.random::<f64>() >= prob {
            continue;
        }
        let span = hi - lo;
        let d1 = (*g - lo) / span;
        let d2 = (hi - *g) / span;
        let u: f64 = rng.random();
        let power = 1.0 / (eta + 1.0);
        let dq = if u < 0.5 {
            let v = 2.0 * u + (1.0 - 2.0 * u) * math::powf(1.0 - d1, eta + 1.0);
            math::powf(v, power) - 1.0
        } else {
            let v = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * math::powf(1.0 - d2, eta + 1.0);
            1.0 - math::powf(v, power)
        };
        *g = (*g + dq * span).clamp(lo, hi);
    }
}
