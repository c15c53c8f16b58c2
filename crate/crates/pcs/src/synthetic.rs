//! `key=value` descriptions of synthetic workloads, e.g.
//! `n=1000,load=0.8,capacity=64,dist=heavy,shape=2,alloc=fixed:64`.

use std::collections::BTreeMap;

use pcs_core::workload::{AllocDist, Scaling, SizeDist, SyntheticSpec};

/// Keys understood by [`parse_synthetic`] and their defaults.
pub const SYNTHETIC_HELP: &str = "n=1000 load=0.8 capacity=64 dist=heavy|light|bimodal \
shape=2 scale=100 mean=100 p=0.8 small=10 large=1000 \
alloc=fixed:N|uniform:A-B|pow2:N (default fixed:capacity) scaling=linear|amdahl:A-B";

pub fn parse_synthetic(s: &str) -> Result<SyntheticSpec, String> {
    let mut kv: BTreeMap<&str, &str> = BTreeMap::new();
    for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| format!("{item:?} is not key=value"))?;
        if kv.insert(k.trim(), v.trim()).is_some() {
            return Err(format!("key {k:?} given twice"));
        }
    }
    let mut take = |key: &str| kv.remove(key);
    fn num<T: std::str::FromStr>(key: &str, v: Option<&str>, default: T) -> Result<T, String> {
        v.map_or(Ok(default), |v| v.parse().map_err(|_| format!("{key}={v} is not a number")))
    }

    let n_jobs = num("n", take("n"), 1000usize)?;
    let load = num("load", take("load"), 0.8f64)?;
    let capacity = num("capacity", take("capacity"), 64u32)?;
    let dist = take("dist").unwrap_or("heavy");
    let shape = num("shape", take("shape"), 2.0)?;
    let scale = num("scale", take("scale"), 100.0)?;
    let mean = num("mean", take("mean"), 100.0)?;
    let p = num("p", take("p"), 0.8)?;
    let small = num("small", take("small"), 10.0)?;
    let large = num("large", take("large"), 1000.0)?;
    let size_dist = match dist {
        "heavy" => SizeDist::HeavyTailed { shape, scale },
        "light" => SizeDist::LightTailed { mean },
        "bimodal" => SizeDist::Bimodal {
            p,
            small_mean: small,
            large_mean: large,
        },
        other => return Err(format!("unknown dist {other:?}")),
    };
    let alloc_dist = match take("alloc") {
        None => AllocDist::Fixed(capacity),
        Some(a) => parse_alloc(a)?,
    };
    let scaling = match take("scaling") {
        None | Some("linear") => Scaling::Linear,
        Some(s) => {
            let range = s
                .strip_prefix("amdahl:")
                .ok_or_else(|| format!("unknown scaling {s:?}"))?;
            let (lo, hi) = parse_range(range)?;
            Scaling::Amdahl {
                min_serial: lo,
                max_serial: hi,
            }
        }
    };
    if let Some(key) = kv.keys().next() {
        return Err(format!("unknown key {key:?}; known keys: {SYNTHETIC_HELP}"));
    }
    let spec = SyntheticSpec {
        n_jobs,
        load,
        size_dist,
        alloc_dist,
        scaling,
        capacity,
    };
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

fn parse_alloc(a: &str) -> Result<AllocDist, String> {
    let (kind, arg) = a
        .split_once(':')
        .ok_or_else(|| format!("alloc {a:?} needs kind:value"))?;
    let int = |v: &str| v.parse::<u32>().map_err(|_| format!("alloc {a:?}: {v:?} is not an integer"));
    match kind {
        "fixed" => Ok(AllocDist::Fixed(int(arg)?)),
        "pow2" => Ok(AllocDist::PowersOfTwo { max: int(arg)? }),
        "uniform" => {
            let (lo, hi) = arg
                .split_once('-')
                .ok_or_else(|| format!("alloc {a:?} needs uniform:A-B"))?;
            Ok(AllocDist::Uniform {
                min: int(lo)?,
                max: int(hi)?,
            })
        }
        other => Err(format!("unknown alloc kind {other:?}")),
    }
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once('-').ok_or_else(|| format!("{s:?} is not A-B"))?;
    let f = |v: &str| v.parse::<f64>().map_err(|_| format!("{v:?} is not a number"));
    Ok((f(lo)?, f(hi)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let s = parse_synthetic("").unwrap();
        assert_eq!(s.n_jobs, 1000);
        assert_eq!(s.capacity, 64);
        assert_eq!(s.alloc_dist, AllocDist::Fixed(64));
        assert_eq!(s.size_dist, SizeDist::HeavyTailed { shape: 2.0, scale: 100.0 });
    }

    #[test]
    fn full_form() {
        let s = parse_synthetic("n=10, load=0.5, capacity=16, dist=bimodal, p=0.9, small=1, large=50, alloc=uniform:1-8, scaling=amdahl:0.05-0.2").unwrap();
        assert_eq!(s.n_jobs, 10);
        assert_eq!(s.alloc_dist, AllocDist::Uniform { min: 1, max: 8 });
        assert_eq!(s.scaling, Scaling::Amdahl { min_serial: 0.05, max_serial: 0.2 });
        assert_eq!(parse_synthetic("alloc=pow2:8").unwrap().alloc_dist, AllocDist::PowersOfTwo { max: 8 });
    }

    #[test]
    fn errors() {
        assert!(parse_synthetic("n=abc").is_err());
        assert!(parse_synthetic("colour=red").is_err());
        assert!(parse_synthetic("load=1.5").is_err());
        assert!(parse_synthetic("n=1,n=2").is_err());
        assert!(parse_synthetic("dist=uniform").is_err());
        assert!(parse_synthetic("alloc=fixed").is_err());
    }
}
