//! File formats, the parallel evaluator, experiment drivers and the `pcs`
//! command line on top of `pcs-core`.

pub mod cli;
pub mod experiments;
pub mod io;
pub mod parallel;
pub mod synthetic;

pub use parallel::RayonEvaluator;
