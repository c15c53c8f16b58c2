//! The `pcs` command line.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;
use pcs_core::metrics::{attach_fft, compute_fft};
use pcs_core::solver::{self, Candidate, EvalContext, Parameterization, SearchSpace, WorkloadModel};
use pcs_core::workload::{inject_size_error, DemandFunction, Job, SyntheticSpec, Trace};
use pcs_core::{predict_jct, run, ObjectiveSpec, PcsParams, Policy, PolicyKind, SimConfig, SimError, SolverError};
use serde::Serialize;

use crate::experiments::{self, HeuristicsSettings, SensitivitySettings, SizeErrorSettings};
use crate::io::front::{load_front, write_front_csv, write_front_json, FrontFile};
use crate::io::meta::{canonical_invocation, Metadata};
use crate::io::results::{write_comparison_csv, write_jobs_csv, write_summary_json, RunSummary, SummaryFile};
use crate::io::snapshot::load_snapshot;
use crate::io::spec::{load_spec, parse_inline};
use crate::io::trace::load_trace;
use crate::io::write_file;
use crate::parallel::RayonEvaluator;
use crate::synthetic::parse_synthetic;

/// Seed offset for size-error draws, shared with the solver's workload model.
const SIZE_ERROR_SEED: u64 = 0x5eed_e77e;

#[derive(Debug, Parser)]
#[command(name = "pcs", version, about = "Predictability-centric scheduling simulator and configuration search")]
pub struct Cli {
    /// Only log warnings and errors
    #[arg(short, long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one policy on one workload
    Simulate(SimulateArgs),
    /// Search for Pareto-optimal PCS configurations
    Search(SearchArgs),
    /// Run several policies on the same workload
    Compare(CompareArgs),
    /// Predict the completion time of a job submitted to a cluster snapshot
    Predict(PredictArgs),
    /// Experiments built on repeated searches and simulations
    #[command(subcommand)]
    Experiment(ExperimentCmd),
}

#[derive(Debug, Clone, Args)]
pub struct WorkloadArgs {
    /// Trace file (.csv or .json)
    #[arg(long, conflicts_with = "synthetic", required_unless_present = "synthetic")]
    pub trace: Option<PathBuf>,
    /// Synthetic workload as key=value pairs, e.g. n=1000,load=0.8,dist=heavy,shape=2,alloc=fixed:64
    #[arg(long, value_parser = parse_synthetic)]
    pub synthetic: Option<SyntheticSpec>,
    /// Relative error applied to scheduler-visible job sizes
    #[arg(long, default_value_t = 0.0)]
    pub size_error: f64,
    /// Cluster capacity; defaults to the synthetic workload's capacity
    #[arg(long)]
    pub capacity: Option<f64>,
    /// Seconds without progress after a job's allocation shrinks
    #[arg(long, default_value_t = 0.0)]
    pub restart_overhead: f64,
    /// Reallocation period of lease-based policies, in seconds
    #[arg(long, default_value_t = 600.0)]
    pub lease: f64,
}

impl WorkloadArgs {
    /// One trace per seed. Synthetic workloads are generated from the seed;
    /// a trace file is reused, with size error drawn from the seed.
    pub fn traces(&self, seeds: &[u64]) -> Result<Vec<Trace>> {
        if let Some(spec) = &self.synthetic {
            let model = self.model_from(spec.clone());
            return seeds
                .iter()
                .map(|&s| model.sample(s).map_err(anyhow::Error::from))
                .collect();
        }
        let path = self.trace.as_ref().ok_or_else(|| anyhow!("--trace or --synthetic is required"))?;
        let trace = load_trace(path)?;
        seeds
            .iter()
            .map(|&s| Ok(inject_size_error(&trace, self.size_error, s ^ SIZE_ERROR_SEED)?))
            .collect()
    }

    fn model_from(&self, spec: SyntheticSpec) -> WorkloadModel {
        WorkloadModel {
            spec,
            size_error: self.size_error,
        }
    }

    /// The synthetic workload model; trace files are not accepted.
    pub fn model(&self) -> Result<WorkloadModel> {
        match &self.synthetic {
            Some(spec) => Ok(self.model_from(spec.clone())),
            None => bail!("this command needs --synthetic"),
        }
    }

    pub fn config(&self, traces: &[Trace]) -> Result<SimConfig> {
        let capacity = self
            .capacity
            .or(self.synthetic.as_ref().map(|s| s.capacity as f64))
            .or(traces.first().and_then(|t| t.capacity_hint).map(f64::from))
            .ok_or_else(|| anyhow!("--capacity is required with --trace"))?;
        let cfg = SimConfig::new(capacity)
            .with_restart_overhead(self.restart_overhead)
            .with_lease(self.lease);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct PolicyArgs {
    /// fifo, srsf, maxmin, themis, afs or pcs
    #[arg(long, default_value = "fifo")]
    pub policy: String,
    /// PCS class budget T (C² per class; inf gives a single class)
    #[arg(long = "pcs-T")]
    pub pcs_t: Option<f64>,
    /// PCS weight decay W
    #[arg(long = "pcs-W")]
    pub pcs_w: Option<f64>,
    /// PCS efficiency floor
    #[arg(long = "pcs-zeta", default_value_t = 0.0)]
    pub pcs_zeta: f64,
    /// Use a row of a front file as the PCS configuration: FILE[#ROW]
    #[arg(long = "pcs-config", conflicts_with_all = ["pcs_t", "pcs_w"])]
    pub pcs_config: Option<String>,
}

impl PolicyArgs {
    pub fn choice(&self) -> Result<PolicyChoice> {
        let kind: PolicyKind = if self.pcs_config.is_some() && self.policy == "fifo" {
            PolicyKind::Pcs
        } else {
            self.policy.parse()?
        };
        if kind != PolicyKind::Pcs {
            if self.pcs_t.is_some() || self.pcs_w.is_some() || self.pcs_config.is_some() {
                bail!("--pcs-* flags need --policy pcs");
            }
            return Ok(PolicyChoice::Named(kind));
        }
        if let Some(source) = &self.pcs_config {
            let rows = front_candidates(source)?;
            return match rows.as_slice() {
                [(_, c)] => Ok(PolicyChoice::Pcs(c.clone())),
                _ => bail!("{source}: pick one row with FILE#ROW"),
            };
        }
        match (self.pcs_t, self.pcs_w) {
            (Some(t), Some(w)) => Ok(PolicyChoice::Pcs(Candidate::Heuristic(PcsParams::new(t, w, self.pcs_zeta)?))),
            _ => bail!("--policy pcs needs --pcs-T and --pcs-W, or --pcs-config"),
        }
    }
}

/// A policy as selected on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum PolicyChoice {
    Named(PolicyKind),
    Pcs(Candidate),
}

impl PolicyChoice {
    /// Instantiates the policy; heuristic PCS derives classes from `sizes`.
    pub fn build(&self, sizes: &[f64]) -> Result<Policy, SimError> {
        match self {
            PolicyChoice::Named(kind) => Policy::from_kind(*kind),
            PolicyChoice::Pcs(Candidate::Heuristic(p)) => Policy::pcs_from_params(p, sizes),
            PolicyChoice::Pcs(Candidate::Raw(cfg)) => Ok(Policy::Pcs(cfg.clone())),
        }
    }
}

/// Rows of a front file, `FILE` for all or `FILE#ROW` for one (0-based).
fn front_candidates(source: &str) -> Result<Vec<(usize, Candidate)>> {
    let (path, row) = match source.rsplit_once('#') {
        Some((p, r)) => (p, Some(r.parse::<usize>().with_context(|| format!("bad row in {source:?}"))?)),
        None => (source, None),
    };
    let front = load_front(Path::new(path))?;
    let rows: Vec<usize> = match row {
        Some(r) if r < front.points.len() => vec![r],
        Some(r) => bail!("{path} has {} rows, row {r} requested", front.points.len()),
        None => (0..front.points.len()).collect(),
    };
    rows.into_iter()
        .map(|i| {
            let c = front.points[i].candidate().map_err(|e| anyhow!("{path} row {i}: {e}"))?;
            Ok((i, c))
        })
        .collect()
}

/// Entries of `--policies`: names, `pcs:T:W[:ZETA]` or `front:FILE[#ROW]`.
pub fn parse_policy_list(items: &[String]) -> Result<Vec<(String, PolicyChoice)>> {
    let mut out = Vec::new();
    for item in items {
        if let Some(rest) = item.strip_prefix("pcs:") {
            let nums = rest
                .split(':')
                .map(|v| v.parse::<f64>().with_context(|| format!("{item:?}: {v:?} is not a number")))
                .collect::<Result<Vec<_>>>()?;
            let params = match nums.as_slice() {
                [t, w] => PcsParams::new(*t, *w, 0.0)?,
                [t, w, z] => PcsParams::new(*t, *w, *z)?,
                _ => bail!("{item:?}: expected pcs:T:W[:ZETA]"),
            };
            out.push((item.clone(), PolicyChoice::Pcs(Candidate::Heuristic(params))));
        } else if let Some(source) = item.strip_prefix("front:") {
            let path = source.rsplit_once('#').map_or(source, |(p, _)| p);
            for (i, c) in front_candidates(source)? {
                out.push((format!("front:{path}#{i}"), PolicyChoice::Pcs(c)));
            }
        } else {
            let kind: PolicyKind = item.parse()?;
            if kind == PolicyKind::Pcs {
                bail!("pcs needs parameters: pcs:T:W[:ZETA]");
            }
            out.push((item.clone(), PolicyChoice::Named(kind)));
        }
    }
    if out.is_empty() {
        bail!("no policies given");
    }
    Ok(out)
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub workload: WorkloadArgs,
    #[command(flatten)]
    pub policy: PolicyArgs,
    /// Workload seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory for jobs.csv and summary.json
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Objective file (JSON list of {metric, measure})
    #[arg(long, conflicts_with = "objectives")]
    pub spec: Option<PathBuf>,
    /// Objectives inline, e.g. jct:avg,pred_err:avg
    #[arg(long)]
    pub objectives: Option<String>,
    /// Total evaluations (population x generations)
    #[arg(long, default_value_t = 1000)]
    pub budget: usize,
    #[arg(long, default_value_t = 40)]
    pub population: usize,
    /// Workload seeds every candidate is evaluated on; defaults to --seed
    #[arg(long, value_delimiter = ',')]
    pub eval_seeds: Vec<u64>,
    /// Search seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 0 uses every core
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

impl SolverArgs {
    pub fn objective_spec(&self, default: &str) -> Result<ObjectiveSpec> {
        match (&self.spec, &self.objectives) {
            (Some(path), _) => Ok(load_spec(path)?),
            (None, Some(inline)) => parse_inline(inline).map_err(|e| anyhow!("--objectives: {e}")),
            (None, None) => parse_inline(default).map_err(|e| anyhow!(e)),
        }
    }

    pub fn eval_seeds(&self) -> Vec<u64> {
        if self.eval_seeds.is_empty() {
            vec![self.seed]
        } else {
            self.eval_seeds.clone()
        }
    }

    pub fn space(&self, parameterization: Parameterization) -> Result<SearchSpace> {
        if self.population == 0 || self.budget < self.population {
            bail!("--budget must be at least --population");
        }
        let space = SearchSpace {
            population: self.population,
            archive_size: self.population,
            generations: self.budget / self.population,
            eval_seeds: self.eval_seeds(),
            parameterization,
            ..SearchSpace::default()
        };
        space.validate()?;
        Ok(space)
    }

    pub fn evaluator(&self) -> Result<RayonEvaluator> {
        Ok(RayonEvaluator::new(self.workers)?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub workload: WorkloadArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Gene layout: heuristic (T, W, zeta) or raw:N for N free classes
    #[arg(long, default_value = "heuristic", value_parser = parse_parameterization)]
    pub parameterization: Parameterization,
    /// Directory for front.json and front.csv
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_parameterization(s: &str) -> Result<Parameterization, String> {
    if s == "heuristic" {
        return Ok(Parameterization::Heuristic);
    }
    s.strip_prefix("raw:")
        .and_then(|n| n.parse().ok())
        .map(|classes| Parameterization::Raw { classes })
        .ok_or_else(|| format!("{s:?} is neither heuristic nor raw:N"))
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub workload: WorkloadArgs,
    /// Comma-separated: fifo, srsf, maxmin, themis, afs, pcs:T:W[:ZETA], front:FILE[#ROW]
    #[arg(long, value_delimiter = ',', required = true)]
    pub policies: Vec<String>,
    /// Workload seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV file for the comparison table
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    /// Cluster snapshot (JSON)
    #[arg(long)]
    pub snapshot: PathBuf,
    /// New job: size=SECONDS[,max_gpus=N][,id=NAME][,serial=FRACTION]
    #[arg(long)]
    pub job: String,
    #[command(flatten)]
    pub policy: PolicyArgs,
    #[arg(long, default_value_t = 0.0)]
    pub restart_overhead: f64,
    #[arg(long, default_value_t = 600.0)]
    pub lease: f64,
}

#[derive(Debug, Subcommand)]
pub enum ExperimentCmd {
    /// Prediction error and JCT as job sizes become less accurate
    SizeError(SizeErrorArgs),
    /// How well a front found at one load holds up at another
    Sensitivity(SensitivityArgs),
    /// Three-parameter search against free thresholds and weights
    Heuristics(HeuristicsArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SizeErrorArgs {
    #[command(flatten)]
    pub workload: WorkloadArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Relative size errors to sweep
    #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.2,0.3")]
    pub errors: Vec<f64>,
    /// Low-error configuration T:W:ZETA; searched when absent
    #[arg(long)]
    pub pcs_pred: Option<String>,
    /// Low-JCT configuration T:W:ZETA; searched when absent
    #[arg(long)]
    pub pcs_jct: Option<String>,
    /// JSON report file
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SensitivityArgs {
    #[command(flatten)]
    pub workload: WorkloadArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value_t = 0.6)]
    pub load_a: f64,
    #[arg(long, default_value_t = 0.8)]
    pub load_b: f64,
    /// Distance for the headline fraction
    #[arg(long, default_value_t = 0.1)]
    pub within: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct HeuristicsArgs {
    #[command(flatten)]
    pub workload: WorkloadArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Classes of the unconstrained search
    #[arg(long, default_value_t = 4)]
    pub classes: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_params(s: &str) -> Result<PcsParams> {
    let nums = s
        .split(':')
        .map(|v| v.parse::<f64>().with_context(|| format!("{s:?}: {v:?} is not a number")))
        .collect::<Result<Vec<_>>>()?;
    match nums.as_slice() {
        [t, w, z] => Ok(PcsParams::new(*t, *w, *z)?),
        _ => bail!("{s:?}: expected T:W:ZETA"),
    }
}

/// Runs the command line in `args` (program name first).
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = if cli.quiet { "warn" } else { "info" };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .format_target(false)
        .try_init();
    let invocation = canonical_invocation(args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()));
    match execute(cli.command, invocation) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(exit_code(&e))
        }
    }
}

pub fn main() -> ExitCode {
    main_with(std::env::args_os())
}

/// The error chain joined with `: `, skipping causes already spelled out by
/// the message before them.
fn describe(err: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in err.chain() {
        let msg = cause.to_string();
        if !out.ends_with(&msg) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&msg);
        }
    }
    out
}

/// 2 for internal invariant breaches, 1 for everything else.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    let internal = |e: &SimError| matches!(e, SimError::InvariantBreach { .. } | SimError::EventBoundExceeded(_));
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<SimError>() {
            if internal(e) {
                return 2;
            }
        }
        if let Some(SolverError::Evaluation(e)) = cause.downcast_ref::<SolverError>() {
            if internal(e) {
                return 2;
            }
        }
    }
    1
}

fn execute(command: Command, invocation: Vec<String>) -> Result<()> {
    match command {
        Command::Simulate(a) => simulate(a, invocation),
        Command::Search(a) => search(a, invocation),
        Command::Compare(a) => compare(a, invocation),
        Command::Predict(a) => predict(a),
        Command::Experiment(ExperimentCmd::SizeError(a)) => size_error(a, invocation),
        Command::Experiment(ExperimentCmd::Sensitivity(a)) => sensitivity(a, invocation),
        Command::Experiment(ExperimentCmd::Heuristics(a)) => heuristics(a, invocation),
    }
}

fn simulate(a: SimulateArgs, invocation: Vec<String>) -> Result<()> {
    let choice = a.policy.choice()?;
    let trace = a.workload.traces(&[a.seed])?.remove(0);
    let cfg = a.workload.config(std::slice::from_ref(&trace))?;
    let policy = choice.build(&trace.sizes())?;
    let mut result = run(&trace, policy, &cfg)?;
    attach_fft(&mut result, &compute_fft(&trace, &cfg)?);
    result.seed = trace.seed;
    let summary = RunSummary::of(&result);
    print_summaries(&[(summary.policy.clone(), summary.clone())]);
    if let Some(dir) = &a.out {
        let meta = Metadata::new(invocation, Some(a.seed));
        write_jobs_csv(&dir.join("jobs.csv"), &result, &meta)?;
        write_summary_json(&dir.join("summary.json"), &SummaryFile { metadata: meta, summary })?;
    }
    Ok(())
}

fn search(a: SearchArgs, invocation: Vec<String>) -> Result<()> {
    let spec = a.solver.objective_spec("jct:avg,pred_err:avg")?;
    let space = a.solver.space(a.parameterization)?;
    let traces = a.workload.traces(&space.eval_seeds)?;
    let cfg = a.workload.config(&traces)?;
    let ctx = EvalContext::from_traces(traces, spec.clone(), &cfg)?;
    let evaluator = a.solver.evaluator()?;
    let started = Instant::now();
    let report = solver::search(&ctx, &space, a.solver.seed, &evaluator)?;
    info!(
        "search: {} evaluations, {} cache hits, {} generations, {:.2}s wall time on {} workers",
        report.evaluations,
        report.cache_hits,
        report.generations_completed,
        started.elapsed().as_secs_f64(),
        evaluator.workers()
    );
    let front = FrontFile::new(Metadata::new(invocation, Some(a.solver.seed)), &spec, &report);
    let header: Vec<String> = spec.entries().iter().map(|(m, s)| format!("{m}:{s}")).collect();
    println!("T\tW\tzeta_min\t{}", header.join("\t"));
    for row in &front.points {
        let t = row.t.map_or("-".to_string(), |t| t.0.to_string());
        let w = row.w.map_or("-".to_string(), |w| w.to_string());
        let objs: Vec<String> = row.objectives.iter().map(|v| format!("{v:.4}")).collect();
        println!("{t}\t{w}\t{}\t{}", row.zeta_min, objs.join("\t"));
    }
    if let Some(dir) = &a.out {
        write_front_json(&dir.join("front.json"), &front)?;
        write_front_csv(&dir.join("front.csv"), &front)?;
    }
    match report.aborted {
        Some(err) => Err(anyhow::Error::new(err).context("search stopped early; the front holds the last complete generation")),
        None => Ok(()),
    }
}

fn compare(a: CompareArgs, invocation: Vec<String>) -> Result<()> {
    let policies = parse_policy_list(&a.policies)?;
    let trace = a.workload.traces(&[a.seed])?.remove(0);
    let cfg = a.workload.config(std::slice::from_ref(&trace))?;
    let fft = compute_fft(&trace, &cfg)?;
    let sizes = trace.sizes();
    let mut rows = Vec::with_capacity(policies.len());
    for (label, choice) in &policies {
        let mut result = run(&trace, choice.build(&sizes)?, &cfg).with_context(|| format!("policy {label}"))?;
        attach_fft(&mut result, &fft);
        rows.push((label.clone(), RunSummary::of(&result)));
    }
    print_summaries(&rows);
    if let Some(path) = &a.out {
        write_comparison_csv(path, &rows, &Metadata::new(invocation, Some(a.seed)))?;
    }
    Ok(())
}

fn print_summaries(rows: &[(String, RunSummary)]) {
    let width = rows.iter().map(|(l, _)| l.len()).max().unwrap_or(0).max(6);
    println!(
        "{:width$}  {:>12}  {:>12}  {:>12}  {:>12}  {:>12}",
        "policy", "jct_avg", "jct_p99", "pred_err_avg", "pred_err_p99", "unfair_avg"
    );
    let cell = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.3}"));
    for (label, s) in rows {
        println!(
            "{label:width$}  {:>12}  {:>12}  {:>12}  {:>12}  {:>12}",
            cell(Some(s.jct.avg)),
            cell(Some(s.jct.p99)),
            cell(s.pred_err.map(|m| m.avg)),
            cell(s.pred_err.map(|m| m.p99)),
            cell(s.unfairness.map(|m| m.avg)),
        );
    }
}

/// Parses `size=..,max_gpus=..,id=..,serial=..` into a job arriving at `clock`.
pub fn parse_job(descriptor: &str, clock: f64) -> Result<Job> {
    let (mut size, mut max_gpus, mut id, mut serial) = (None, 1u32, "new".to_string(), None);
    for item in descriptor.split(',').map(str::trim).filter(|i| !i.is_empty()) {
        let (k, v) = item.split_once('=').ok_or_else(|| anyhow!("{item:?} is not key=value"))?;
        let num = || v.parse::<f64>().with_context(|| format!("{k}={v} is not a number"));
        match k {
            "size" => size = Some(num()?),
            "max_gpus" => max_gpus = v.parse().with_context(|| format!("max_gpus={v} is not an integer"))?,
            "id" => id = v.to_string(),
            "serial" => serial = Some(num()?),
            _ => bail!("unknown job key {k:?}"),
        }
    }
    let size = size.ok_or_else(|| anyhow!("job needs size=SECONDS"))?;
    Ok(match serial {
        None => Job::linear(id, clock, size, max_gpus)?,
        Some(s) => Job::new(id, clock, DemandFunction::amdahl(size, max_gpus, s)?)?,
    })
}

fn predict(a: PredictArgs) -> Result<()> {
    let choice = a.policy.choice()?;
    let file = load_snapshot(&a.snapshot)?;
    let job = parse_job(&a.job, file.clock)?;
    let mut sizes: Vec<f64> = file.jobs.iter().map(|j| j.job.size).collect();
    sizes.push(job.size);
    let snap = file
        .to_snapshot(choice.build(&sizes)?)
        .map_err(|e| anyhow!("{}: {e}", a.snapshot.display()))?;
    if file.jobs.iter().any(|j| j.job.job_id == job.id) {
        bail!("job id {:?} is already in the snapshot", job.id);
    }
    let cfg = SimConfig::new(file.capacity)
        .with_restart_overhead(a.restart_overhead)
        .with_lease(a.lease);
    cfg.validate()?;
    println!("{:.6}", predict_jct(&snap, Arc::new(job), &cfg)?);
    Ok(())
}

#[derive(Serialize)]
struct Report<T> {
    metadata: Metadata,
    report: T,
}

fn emit<T: Serialize>(out: Option<&Path>, meta: Metadata, report: T) -> Result<()> {
    let json = serde_json::to_string_pretty(&Report { metadata: meta, report })?;
    println!("{json}");
    if let Some(path) = out {
        write_file(path, json.as_bytes())?;
    }
    Ok(())
}

fn cfg_for(workload: &WorkloadArgs, model: &WorkloadModel) -> Result<SimConfig> {
    let probe = WorkloadArgs {
        synthetic: Some(model.spec.clone()),
        ..workload.clone()
    };
    probe.config(&[])
}

fn size_error(a: SizeErrorArgs, invocation: Vec<String>) -> Result<()> {
    let model = a.workload.model()?;
    let settings = SizeErrorSettings {
        cfg: cfg_for(&a.workload, &model)?,
        model,
        errors: a.errors.clone(),
        seeds: a.solver.eval_seeds(),
        pred_params: a.pcs_pred.as_deref().map(parse_params).transpose()?,
        jct_params: a.pcs_jct.as_deref().map(parse_params).transpose()?,
        space: a.solver.space(Parameterization::Heuristic)?,
        search_seed: a.solver.seed,
    };
    let report = experiments::size_error(&settings, &a.solver.evaluator()?)?;
    emit(a.out.as_deref(), Metadata::new(invocation, Some(a.solver.seed)), report)
}

fn sensitivity(a: SensitivityArgs, invocation: Vec<String>) -> Result<()> {
    let model = a.workload.model()?;
    let settings = SensitivitySettings {
        cfg: cfg_for(&a.workload, &model)?,
        model,
        load_a: a.load_a,
        load_b: a.load_b,
        spec: a.solver.objective_spec("jct:avg,pred_err:avg")?,
        space: a.solver.space(Parameterization::Heuristic)?,
        search_seed: a.solver.seed,
        within: a.within,
    };
    let report = experiments::sensitivity(&settings, &a.solver.evaluator()?)?;
    emit(a.out.as_deref(), Metadata::new(invocation, Some(a.solver.seed)), report)
}

fn heuristics(a: HeuristicsArgs, invocation: Vec<String>) -> Result<()> {
    let model = a.workload.model()?;
    if a.classes == 0 {
        bail!("--classes must be at least 1");
    }
    let settings = HeuristicsSettings {
        cfg: cfg_for(&a.workload, &model)?,
        model,
        spec: a.solver.objective_spec("jct:avg,pred_err:avg")?,
        space: a.solver.space(Parameterization::Heuristic)?,
        classes: a.classes,
        search_seed: a.solver.seed,
    };
    let report = experiments::heuristics(&settings, &a.solver.evaluator()?)?;
    emit(a.out.as_deref(), Metadata::new(invocation, Some(a.solver.seed)), report)
}
