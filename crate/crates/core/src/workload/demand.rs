use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::WorkloadError;

/// Relative slack allowed when checking the "no super-linear speedup" rule.
const SCALING_SLACK: f64 = 1e-12;

/// Tabulated mapping from allocation (resource units) to execution time.
///
/// Allocation 1 is always present and its execution time is the job's
/// minimum-allocation time. Between table entries the speedup is linearly
/// interpolated, below one unit it falls linearly to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandFunction {
    points: Vec<(u32, f64)>,
}

impl DemandFunction {
    pub fn new(mut points: Vec<(u32, f64)>) -> Result<Self, WorkloadError> {
        points.sort_by_key(|p| p.0);
        let first = points
            .first()
            .ok_or_else(|| WorkloadError::InvalidDemand("empty table".into()))?;
        if first.0 != 1 {
            return Err(WorkloadError::InvalidDemand(
                "table must contain allocation 1".into(),
            ));
        }
        let base = first.1;
        for (i, &(alloc, exec)) in points.iter().enumerate() {
            if !(exec.is_finite() && exec > 0.0) {
                return Err(WorkloadError::InvalidDemand(format!(
                    "exec time {exec} at allocation {alloc} must be positive"
                )));
            }
            if i > 0 {
                let (prev_alloc, prev_exec) = points[i - 1];
                if alloc == prev_alloc {
                    return Err(WorkloadError::InvalidDemand(format!(
                        "allocation {alloc} listed twice"
                    )));
                }
                if exec > prev_exec {
                    return Err(WorkloadError::InvalidDemand(format!(
                        "exec time increases from {prev_exec} to {exec} at allocation {alloc}"
                    )));
                }
            }
            if base / exec > alloc as f64 * (1.0 + SCALING_SLACK) {
                return Err(WorkloadError::InvalidDemand(format!(
                    "super-linear speedup {} at allocation {alloc}",
                    base / exec
                )));
            }
        }
        Ok(Self { points })
    }

    /// Perfect scaling up to `max_alloc` units.
    pub fn linear(size: f64, max_alloc: u32) -> Result<Self, WorkloadError> {
        if max_alloc == 0 {
            return Err(WorkloadError::InvalidDemand("max_alloc must be >= 1".into()));
        }
        if max_alloc == 1 {
            Self::new(vec![(1, size)])
        } else {
            Self::new(vec![(1, size), (max_alloc, size / max_alloc as f64)])
        }
    }

    /// Amdahl-style scaling with the given serial fraction, tabulated at every
    /// integer allocation up to `max_alloc`.
    pub fn amdahl(size: f64, max_alloc: u32, serial_fraction: f64) -> Result<Self, WorkloadError> {
        if !(0.0..=1.0).contains(&serial_fraction) {
            return Err(WorkloadError::InvalidDemand(format!(
                "serial fraction {serial_fraction} outside [0, 1]"
            )));
        }
        if max_alloc == 0 {
            return Err(WorkloadError::InvalidDemand("max_alloc must be >= 1".into()));
        }
        let points = (1..=max_alloc)
            .map(|g| {
                let g_f = g as f64;
                (g, size * (serial_fraction + (1.0 - serial_fraction) / g_f))
            })
            .collect();
        Self::new(points)
    }

    pub fn points(&self) -> &[(u32, f64)] {
        &self.points
    }

    pub fn max_alloc(&self) -> u32 {
        self.points[self.points.len() - 1].0
    }

    /// Execution time at the minimum allocation.
    pub fn min_exec_time(&self) -> f64 {
        self.points[0].1
    }

    /// Tabulated execution time, if `alloc` is a table entry.
    pub fn exec_time(&self, alloc: u32) -> Option<f64> {
        self.points
            .binary_search_by_key(&alloc, |p| p.0)
            .ok()
            .map(|i| self.points[i].1)
    }

    /// Speedup relative to one unit at a fractional allocation.
    pub fn speedup(&self, g: f64) -> Result<f64, WorkloadError> {
        if !(g > 0.0) || g > self.max_alloc() as f64 {
            return Err(WorkloadError::AllocationOutOfRange {
                requested: g,
                max_alloc: self.max_alloc(),
            });
        }
        Ok(self.speedup_at(g))
    }

    /// Unchecked speedup: `g <= 0` maps to 0, `g` above the table saturates.
    pub(crate) fn speedup_at(&self, g: f64) -> f64 {
        if g <= 0.0 {
            return 0.0;
        }
        if g <= 1.0 {
            return g;
        }
        let base = self.points[0].1;
        let last = self.points[self.points.len() - 1];
        if g >= last.0 as f64 {
            return base / last.1;
        }
        // First entry with allocation >= g; always at index >= 1 here.
        let hi = self.points.partition_point(|p| (p.0 as f64) < g);
        let (a_hi, e_hi) = self.points[hi];
        if a_hi as f64 == g {
            return base / e_hi;
        }
        let (a_lo, e_lo) = self.points[hi - 1];
        let s_lo = base / e_lo;
        let s_hi = base / e_hi;
        let frac = (g - a_lo as f64) / (a_hi as f64 - a_lo as f64);
        s_lo + frac * (s_hi - s_lo)
    }

    /// Resource efficiency `exec(1) / (n * exec(n))` at an integer allocation.
    pub fn efficiency(&self, n: u32) -> Result<f64, WorkloadError> {
        if n == 0 || n > self.max_alloc() {
            return Err(WorkloadError::AllocationOutOfRange {
                requested: n as f64,
                max_alloc: self.max_alloc(),
            });
        }
        Ok(self.speedup_at(n as f64) / n as f64)
    }

    /// Largest tabulated allocation whose efficiency is at least `zeta_min`.
    pub fn demand_cap(&self, zeta_min: f64) -> u32 {
        let base = self.points[0].1;
        self.points
            .iter()
            .rev()
            .find(|&&(alloc, exec)| base / (alloc as f64 * exec) >= zeta_min)
            .map_or(1, |p| p.0)
    }

    pub fn is_linear(&self) -> bool {
        let base = self.points[0].1;
        self.points
            .iter()
            .all(|&(a, e)| (base / (a as f64 * e) - 1.0).abs() <= SCALING_SLACK)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point() -> DemandFunction {
        DemandFunction::new(vec![(1, 100.0), (2, 60.0)]).unwrap()
    }

    #[test]
    fn linear_speedup_is_identity() {
        let df = DemandFunction::linear(10.0, 8).unwrap();
        assert_eq!(df.speedup(4.0).unwrap(), 4.0);
        assert_eq!(df.speedup(1.0).unwrap(), 1.0);
        for n in 1..=8 {
            assert!((df.efficiency(n).unwrap() - 1.0).abs() < 1e-15);
        }
        assert_eq!(df.demand_cap(1.0), 8);
    }

    #[test]
    fn tabulated_speedup_and_interpolation() {
        let df = two_point();
        assert!((df.speedup(2.0).unwrap() - 100.0 / 60.0).abs() < 1e-12);
        // midpoint between s(1)=1 and s(2)=5/3
        assert!((df.speedup(1.5).unwrap() - 4.0 / 3.0).abs() < 1e-12);
        assert!((df.speedup(0.25).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(df.speedup_at(0.0), 0.0);
    }

    #[test]
    fn speedup_rejects_over_allocation() {
        assert!(matches!(
            two_point().speedup(2.5),
            Err(WorkloadError::AllocationOutOfRange { .. })
        ));
        assert!(two_point().speedup(0.0).is_err());
    }

    #[test]
    fn efficiency_values() {
        let df = two_point();
        assert_eq!(df.efficiency(1).unwrap(), 1.0);
        assert!((df.efficiency(2).unwrap() - 100.0 / 120.0).abs() < 1e-12);
    }

    #[test]
    fn demand_cap_values() {
        let df = two_point();
        assert_eq!(df.demand_cap(0.9), 1);
        assert_eq!(df.demand_cap(0.8), 2);
        assert_eq!(df.demand_cap(0.0), 2);
        assert_eq!(df.demand_cap(1.0), 1);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(DemandFunction::new(vec![]).is_err());
        assert!(DemandFunction::new(vec![(2, 5.0)]).is_err());
        assert!(DemandFunction::new(vec![(1, 5.0), (2, 6.0)]).is_err());
        assert!(DemandFunction::new(vec![(1, 10.0), (2, 4.0)]).is_err());
        assert!(DemandFunction::new(vec![(1, -1.0)]).is_err());
        assert!(DemandFunction::new(vec![(1, 10.0), (1, 9.0)]).is_err());
    }

    #[test]
    fn amdahl_table_is_valid_and_sublinear() {
        let df = DemandFunction::amdahl(100.0, 8, 0.1).unwrap();
        assert_eq!(df.max_alloc(), 8);
        assert!(df.efficiency(8).unwrap() < 1.0);
        assert!(!df.is_linear());
        assert!(DemandFunction::amdahl(100.0, 8, 0.0).unwrap().is_linear());
    }
}
