use pcs_core::solver::{BatchEvaluator, EvalResult};
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

/// Fans evaluations out to a dedicated rayon pool. Results come back in index
/// order, so the worker count never changes what the solver sees.
pub struct RayonEvaluator {
    pool: ThreadPool,
}

impl RayonEvaluator {
    /// `workers == 0` uses the available parallelism.
    pub fn new(workers: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = ThreadPoolBuilder::new().num_threads(workers).build()?;
        Ok(Self { pool })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl BatchEvaluator for RayonEvaluator {
    fn map_indexed(&self, n: usize, f: &(dyn Fn(usize) -> EvalResult + Sync)) -> Vec<EvalResult> {
        self.pool.install(|| (0..n).into_par_iter().map(f).collect())
    }
}
