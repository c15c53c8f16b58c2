//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use pcs::experiments::{self, SensitivitySettings, SizeErrorSettings};
use pcs::RayonEvaluator;
use pcs_core::engine::{run_observed, JobRuntime};
use pcs_core::metrics::{attach_fft, compute_fft, per_job, Measure, Metric};
use pcs_core::solver::{self, pareto_filter, EvalContext, SearchSpace, WorkloadModel};
use pcs_core::workload::{generate_synthetic, AllocDist, Scaling, SizeDist, SyntheticSpec, Trace};
use pcs_core::{run, ObjectiveSpec, PcsParams, Policy, SimConfig, WfqConfig};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Mixed synthetic workloads; the shape of trace `i` cycles through size
/// distributions, widths, scaling and capacities.
fn mixed_spec(i: u64) -> SyntheticSpec {
    let size_dist = match i % 3 {
        0 => SizeDist::HeavyTailed { shape: 1.5 + (i % 5) as f64 * 0.25, scale: 50.0 },
        1 => SizeDist::LightTailed { mean: 120.0 },
        _ => SizeDist::Bimodal { p: 0.8, small_mean: 20.0, large_mean: 800.0 },
    };
    let capacity = [1, 4, 16, 64][(i / 3 % 4) as usize];
    let alloc_dist = match i % 4 {
        0 => AllocDist::Fixed(capacity),
        1 => AllocDist::Uniform { min: 1, max: capacity },
        2 => AllocDist::PowersOfTwo { max: capacity },
        _ => AllocDist::Fixed(1),
    };
    let scaling = if i % 5 < 3 {
        Scaling::Linear
    } else {
        Scaling::Amdahl { min_serial: 0.02, max_serial: 0.3 }
    };
    SyntheticSpec {
        n_jobs: 20 + (i as usize * 37) % 180,
        load: [0.5, 0.7, 0.9, 1.0][(i % 4) as usize],
        size_dist,
        alloc_dist,
        scaling,
        capacity,
    }
}

fn mixed_trace(i: u64) -> (Trace, SimConfig) {
    let spec = mixed_spec(i);
    let cfg = SimConfig::new(spec.capacity as f64);
    (generate_synthetic(&spec, 1000 + i).expect("valid spec"), cfg)
}

fn c1_fifo_exact() -> Check {
    let mut jobs = 0;
    for i in 0..100 {
        let (trace, cfg) = mixed_trace(i);
        let result = run(&trace, Policy::Fifo, &cfg).map_err(|e| e.to_string())?;
        for (r, err) in result.records.iter().zip(per_job(&result, Metric::PredErr).map_err(|e| e.to_string())?) {
            ensure(err == 0.0, || format!("trace {i} job {}: pred_err {err}", r.id))?;
        }
        jobs += result.records.len();
    }
    Ok(format!("100 traces, {jobs} jobs, every pred_err exactly 0"))
}

fn c2_single_class() -> Check {
    for i in 0..50 {
        let (trace, cfg) = mixed_trace(200 + i);
        let fifo = run(&trace, Policy::Fifo, &cfg).map_err(|e| e.to_string())?;
        let one = run(&trace, Policy::Pcs(WfqConfig::single_class()), &cfg).map_err(|e| e.to_string())?;
        let inf_t = Policy::pcs_from_params(&PcsParams::new(f64::INFINITY, 2.0, 0.0).unwrap(), &trace.sizes())
            .map_err(|e| e.to_string())?;
        let derived = run(&trace, inf_t, &cfg).map_err(|e| e.to_string())?;
        let bits = |r: &pcs_core::SimResult| r.jcts().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        ensure(bits(&fifo) == bits(&one), || format!("trace {i}: N=1 config differs from FIFO"))?;
        ensure(bits(&fifo) == bits(&derived), || format!("trace {i}: T=inf differs from FIFO"))?;
    }
    Ok("50 traces bit-identical to FIFO".into())
}

/// Progressive filling over the jobs' maximum allocations.
fn max_min_oracle(demands: &[f64], capacity: f64) -> Vec<f64> {
    let mut order: Vec<usize> = (0..demands.len()).collect();
    order.sort_by(|&a, &b| demands[a].total_cmp(&demands[b]));
    let mut out = vec![0.0; demands.len()];
    let mut left = capacity;
    for (k, &i) in order.iter().enumerate() {
        let fair = left / (order.len() - k) as f64;
        out[i] = demands[i].min(fair);
        left -= out[i];
    }
    out
}

fn c3_max_min_emulation() -> Check {
    let mut events = 0;
    let mut worst: f64 = 0.0;
    for i in 0..20u64 {
        let capacity = [4u32, 8, 16][(i % 3) as usize];
        let spec = SyntheticSpec {
            n_jobs: 2 + (i as usize % 5),
            load: 1.0,
            size_dist: SizeDist::LightTailed { mean: 50.0 },
            alloc_dist: AllocDist::Uniform { min: 1, max: capacity },
            scaling: if i % 2 == 0 { Scaling::Linear } else { Scaling::Amdahl { min_serial: 0.05, max_serial: 0.2 } },
            capacity,
        };
        let trace = generate_synthetic(&spec, 300 + i).unwrap();
        let mut sizes = trace.sizes();
        sizes.sort_by(f64::total_cmp);
        sizes.dedup();
        ensure(sizes.len() == trace.len(), || format!("trace {i}: sizes not distinct"))?;
        let policy = Policy::pcs_from_params(&PcsParams::new(1e-12, 0.0, 0.0).unwrap(), &trace.sizes()).unwrap();
        let Policy::Pcs(cfg_wfq) = &policy else { unreachable!() };
        ensure(cfg_wfq.num_classes() == trace.len(), || format!("trace {i}: {} classes", cfg_wfq.num_classes()))?;

        let cfg = SimConfig::new(capacity as f64);
        let mut mismatch = None;
        let mut observe = |t: f64, jobs: &[JobRuntime]| {
            let demands: Vec<f64> = jobs.iter().map(|j| j.max_alloc()).collect();
            let oracle = max_min_oracle(&demands, capacity as f64);
            for (j, o) in jobs.iter().zip(&oracle) {
                let gap = (j.allocation - o).abs();
                worst = worst.max(gap);
                if gap > 1e-9 && mismatch.is_none() {
                    mismatch = Some(format!("trace {i} t={t}: job {} got {} oracle {o}", j.job.id, j.allocation));
                }
            }
            events += 1;
        };
        run_observed(&trace, policy.clone(), &cfg, &mut observe).map_err(|e| e.to_string())?;
        if let Some(m) = mismatch {
            return Err(m);
        }
    }
    Ok(format!("{events} allocation events, max gap {worst:.1e}"))
}

const C4_SEEDS: u64 = 5;

fn c4_spec() -> SyntheticSpec {
    SyntheticSpec {
        n_jobs: 1000,
        load: 0.8,
        size_dist: SizeDist::HeavyTailed { shape: 2.0, scale: 100.0 },
        alloc_dist: AllocDist::Fixed(64),
        scaling: Scaling::Linear,
        capacity: 64,
    }
}

fn jct_err_spec() -> ObjectiveSpec {
    ObjectiveSpec::new(vec![(Metric::Jct, Measure::Avg), (Metric::PredErr, Measure::Avg)]).unwrap()
}

fn c4_tradeoff() -> Check {
    let model = WorkloadModel::new(c4_spec());
    let cfg = SimConfig::new(64.0).with_restart_overhead(1.0);
    let evaluator = RayonEvaluator::new(0).unwrap();
    let mut srsf_errs = Vec::new();
    let mut hits = 0;
    let mut notes = Vec::new();
    for seed in 0..C4_SEEDS {
        let ctx = EvalContext::new(&model, &[seed], jct_err_spec(), &cfg).map_err(|e| e.to_string())?;
        let srsf = ctx.evaluate_with(|_| Ok(Policy::Srsf)).map_err(|e| e.to_string())?;
        srsf_errs.push(srsf[1]);
        let space = SearchSpace {
            eval_seeds: vec![seed],
            ..SearchSpace::default()
        };
        let report = solver::search(&ctx, &space, seed, &evaluator).map_err(|e| e.to_string())?;
        ensure(report.aborted.is_none(), || format!("seed {seed}: {:?}", report.aborted))?;
        let best = report
            .front
            .iter()
            .filter(|p| p.objectives[1] <= 10.0)
            .map(|p| p.objectives[0] / srsf[0])
            .fold(f64::INFINITY, f64::min);
        let ok = best <= 3.0;
        hits += ok as usize;
        notes.push(format!(
            "seed {seed}: srsf err {:.1}%, {} evals, best jct ratio at err<=10% {best:.2}",
            srsf[1], report.evaluations
        ));
    }
    let mean_err = srsf_errs.iter().sum::<f64>() / srsf_errs.len() as f64;
    let detail = notes.join("; ");
    ensure(mean_err > 30.0, || format!("precondition: mean SRSF err {mean_err:.1}% <= 30%; {detail}"))?;
    ensure(hits >= 4, || format!("{hits}/5 seeds; {detail}"))?;
    Ok(format!("{hits}/5 seeds, mean SRSF err {mean_err:.1}%; {detail}"))
}

fn brute_force_front(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    points
        .iter()
        .filter(|p| {
            !points.iter().any(|q| q.iter().zip(p.iter()).all(|(a, b)| a <= b) && q.iter().zip(p.iter()).any(|(a, b)| a < b))
        })
        .cloned()
        .collect()
}

fn sorted(mut v: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    v.sort_by(|a, b| a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
    v
}

fn c5_non_domination() -> Check {
    let mut runner = TestRunner::new(Config {
        cases: 300,
        failure_persistence: None,
        ..Config::default()
    });
    let strategy = (1usize..4).prop_flat_map(|d| {
        (
            prop::collection::vec(prop::collection::vec(0u8..20, d), 1..40),
            prop::collection::vec((any::<prop::sample::Index>(), prop::collection::vec(0u8..5, d)), 0..10),
        )
    });
    runner
        .run(&strategy, |(base, inject)| {
            let base: Vec<Vec<f64>> = base.into_iter().map(|p| p.into_iter().map(f64::from).collect()).collect();
            let front = pareto_filter(&base, |p| p.as_slice());
            prop_assert_eq!(sorted(front.clone()), sorted(brute_force_front(&base)));
            prop_assert_eq!(sorted(pareto_filter(&front, |p| p.as_slice())), sorted(front.clone()));
            // Points pushed strictly behind a front member must vanish.
            let mut all = front.clone();
            for (idx, offsets) in &inject {
                let anchor = &front[idx.index(front.len())];
                let mut p: Vec<f64> = anchor.iter().zip(offsets).map(|(a, o)| a + f64::from(*o)).collect();
                p[0] += 0.5;
                all.push(p);
            }
            prop_assert_eq!(sorted(pareto_filter(&all, |p| p.as_slice())), sorted(front));
            Ok(())
        })
        .map_err(|e| e.to_string())?;

    // A front the solver returns is already its own filter.
    let spec = SyntheticSpec { n_jobs: 150, capacity: 16, alloc_dist: AllocDist::PowersOfTwo { max: 16 }, ..c4_spec() };
    let ctx = EvalContext::new(&WorkloadModel::new(spec), &[0], jct_err_spec(), &SimConfig::new(16.0)).unwrap();
    let space = SearchSpace { population: 12, archive_size: 12, generations: 6, ..SearchSpace::default() };
    let report = solver::search(&ctx, &space, 1, &RayonEvaluator::new(0).unwrap()).map_err(|e| e.to_string())?;
    let objs: Vec<Vec<f64>> = report.front.iter().map(|p| p.objectives.clone()).collect();
    ensure(sorted(brute_force_front(&objs)) == sorted(objs.clone()), || "solver front has dominated points".into())?;
    Ok(format!("300 random sets plus a {}-point solver front", objs.len()))
}

fn c6_unfairness_zero() -> Check {
    let mut jobs = 0;
    for i in 0..50 {
        let (trace, cfg) = mixed_trace(400 + i);
        let mut result = run(&trace, Policy::MaxMin, &cfg).map_err(|e| e.to_string())?;
        attach_fft(&mut result, &compute_fft(&trace, &cfg).map_err(|e| e.to_string())?);
        let values = per_job(&result, Metric::Unfairness).map_err(|e| e.to_string())?;
        if let Some((r, v)) = result.records.iter().zip(&values).find(|(_, v)| **v != 0.0) {
            return Err(format!("trace {i} job {}: unfairness {v}", r.id));
        }
        jobs += values.len();
    }
    Ok(format!("50 traces, {jobs} jobs at exactly 0"))
}

fn c7_size_error() -> Check {
    let spec = SyntheticSpec {
        n_jobs: 1000,
        load: 0.8,
        size_dist: SizeDist::HeavyTailed { shape: 2.0, scale: 100.0 },
        alloc_dist: AllocDist::PowersOfTwo { max: 64 },
        scaling: Scaling::Amdahl { min_serial: 0.05, max_serial: 0.2 },
        capacity: 64,
    };
    let settings = SizeErrorSettings {
        model: WorkloadModel::new(spec),
        errors: vec![0.0, 0.2],
        seeds: vec![0, 1],
        cfg: SimConfig::new(64.0).with_restart_overhead(1.0),
        pred_params: None,
        jct_params: None,
        space: SearchSpace { population: 20, archive_size: 20, generations: 20, ..SearchSpace::default() },
        search_seed: 0,
    };
    let report = experiments::size_error(&settings, &RayonEvaluator::new(0).unwrap()).map_err(|e| e.to_string())?;
    let noisy = &report.rows[1];
    let jct_ratio = noisy.pcs_jct / report.afs_jct_exact;
    let err_ratio = noisy.pcs_pred_err / noisy.fifo_pred_err;
    let detail = format!(
        "PCS-JCT/AFS {jct_ratio:.3}, PCS/FIFO |pred_err| {:.2}%/{:.2}% = {err_ratio:.3}",
        noisy.pcs_pred_err, noisy.fifo_pred_err
    );
    ensure(jct_ratio <= 1.2 && err_ratio <= 1.5, || detail.clone())?;
    Ok(detail)
}

fn c8_sensitivity() -> Check {
    let base = SensitivitySettings {
        model: WorkloadModel::new(SyntheticSpec { n_jobs: 500, ..c4_spec() }),
        load_a: 0.6,
        load_b: 0.8,
        spec: jct_err_spec(),
        space: SearchSpace { population: 20, archive_size: 20, generations: 10, ..SearchSpace::default() },
        cfg: SimConfig::new(64.0).with_restart_overhead(1.0),
        search_seed: 0,
        within: 0.1,
    };
    let evaluator = RayonEvaluator::new(0).unwrap();
    let same = experiments::sensitivity(&SensitivitySettings { load_a: 0.8, ..base.clone() }, &evaluator)
        .map_err(|e| e.to_string())?;
    ensure(same.points.iter().all(|p| p.distance == 0.0), || "A=B case has non-zero distances".into())?;
    ensure(same.cdf == vec![(0.0, 1.0)], || format!("A=B cdf {:?}", same.cdf))?;
    let shifted = experiments::sensitivity(&base, &evaluator).map_err(|e| e.to_string())?;
    let cdf_ok = shifted.cdf.last().is_some_and(|l| l.1 == 1.0)
        && shifted.cdf.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1)
        && shifted.points.iter().all(|p| p.distance >= 0.0);
    ensure(cdf_ok, || format!("malformed cdf {:?}", shifted.cdf))?;
    Ok(format!(
        "A=B: {} points at 0; 0.6->0.8: {:.0}% of {} points within 10% (reported only)",
        same.points.len(),
        100.0 * shifted.fraction_within,
        shifted.points.len()
    ))
}

fn c9_worker_invariance() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let search = |workers: &str, out: &Path| {
        let status = Command::new(env!("CARGO_BIN_EXE_pcs"))
            .args([
                "search",
                "-q",
                "--synthetic",
                "n=300,load=0.8,capacity=64,dist=heavy,shape=2,alloc=pow2:64",
                "--restart-overhead",
                "1",
                "--objectives",
                "jct:avg,pred_err:avg,unfairness:p99",
                "--budget",
                "1000",
                "--eval-seeds",
                "3,4",
                "--seed",
                "7",
                "--workers",
                workers,
                "--out",
            ])
            .arg(out)
            .stdout(std::process::Stdio::null())
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.success(), || format!("search with {workers} workers exited {status}"))
    };
    let (one, eight) = (dir.path().join("w1"), dir.path().join("w8"));
    search("1", &one)?;
    search("8", &eight)?;
    for name in ["front.json", "front.csv"] {
        let a = std::fs::read(one.join(name)).map_err(|e| e.to_string())?;
        let b = std::fs::read(eight.join(name)).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("{name} differs between 1 and 8 workers"))?;
    }
    Ok("front.json and front.csv byte-identical at 1 and 8 workers".into())
}

fn c10_energy_balance() -> Check {
    let mut runs = 0;
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let (trace, cfg) = mixed_trace(i);
        let policies = [
            Policy::Fifo,
            Policy::Srsf,
            Policy::MaxMin,
            Policy::themis(),
            Policy::Afs,
            Policy::pcs_from_params(&PcsParams::new(0.3, 1.0, 0.5).unwrap(), &trace.sizes()).unwrap(),
        ];
        for overhead in [0.0, 5.0] {
            let cfg = cfg.clone().with_restart_overhead(overhead).without_predictions();
            for p in &policies {
                let result = run(&trace, p.clone(), &cfg).map_err(|e| e.to_string())?;
                let err = result.energy_balance_error();
                worst = worst.max(err);
                ensure(err <= 1e-6, || format!("trace {i} {} overhead {overhead}: {err:e}", p.name()))?;
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} runs, worst relative error {worst:.1e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("FIFO zero prediction error", c1_fifo_exact),
        ("single-class equivalence", c2_single_class),
        ("Max-Min emulation", c3_max_min_emulation),
        ("trade-off reproduction", c4_tradeoff),
        ("non-domination", c5_non_domination),
        ("unfairness oracle consistency", c6_unfairness_zero),
        ("size-error robustness", c7_size_error),
        ("sensitivity harness", c8_sensitivity),
        ("determinism and worker-count invariance", c9_worker_invariance),
        ("engine energy balance", c10_energy_balance),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    // Panics are reported on the criterion's line.
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let n = n + 1;
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n:>2} PASS {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n:>2} FAIL {name} ({secs:.1}s): {detail}");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
