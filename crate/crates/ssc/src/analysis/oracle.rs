//! Brute-force grid oracles.
//!
//! These deliberately know nothing about the closed forms they
//! cross-validate: they scan a regular grid, pruning only by the current
//! best value (every norm here dominates the per-scalar absolute
//! difference, so a single scalar already at distance ≥ best can be
//! skipped).

use crate::error::{Error, Result};
use crate::par;
use crate::space::{CoordVector, SpaceFamily};

/// A scalar grid `lo, lo+step, …, ≤ hi`, applied to every scalar axis.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || hi < lo {
            return Err(Error::InvalidParameter(format!(
                "bad grid: [{lo}, {hi}] step {step}"
            )));
        }
        Ok(GridSpec { lo, hi, step })
    }

    pub fn values(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|k| self.lo + k as f64 * self.step).collect()
    }

    fn snap(&self, x: f64) -> f64 {
        let k = ((x - self.lo) / self.step).round();
        let count = ((self.hi - self.lo) / self.step + 1e-9).floor();
        self.lo + k.clamp(0.0, count) * self.step
    }
}

struct Scan<'a> {
    family: &'a SpaceFamily,
    u: &'a [CoordVector],
    pred: &'a (dyn Fn(&[CoordVector]) -> bool + Sync),
    values: Vec<f64>,
}

impl Scan<'_> {
    /// Fill coordinate `ci` scalar-by-scalar, pruning against `best`.
    fn scan_coord(
        &self,
        ci: usize,
        scalar: usize,
        y: &mut Vec<CoordVector>,
        max_so_far: f64,
        best: &mut f64,
    ) {
        let space = self.family.space_at(ci + 1);
        if scalar == space.dim {
            let d = space.dist(&self.u[ci], &y[ci]);
            let m = max_so_far.max(d);
            if m >= *best {
                return;
            }
            if ci + 1 == self.u.len() {
                if (self.pred)(y) {
                    *best = m;
                }
            } else {
                y.push(self.family.space_at(ci + 2).zero());
                self.scan_next_coord(ci + 1, y, m, best);
                y.pop();
            }
            return;
        }
        let us = self.u[ci].0[scalar];
        for &v in &self.values {
            if (v - us).abs() >= *best {
                continue;
            }
            y[ci].0[scalar] = v;
            self.scan_coord(ci, scalar + 1, y, max_so_far, best);
        }
    }

    fn scan_next_coord(&self, ci: usize, y: &mut Vec<CoordVector>, max_so_far: f64, best: &mut f64) {
        self.scan_coord(ci, 0, y, max_so_far, best);
    }

    /// Cheap upper bound: vary one scalar at a time, everything else
    /// snapped to the grid point nearest `u`.
    fn axis_init(&self, grid: &GridSpec) -> f64 {
        let snapped: Vec<CoordVector> = self
            .u
            .iter()
            .map(|c| CoordVector(c.0.iter().map(|&x| grid.snap(x)).collect()))
            .collect();
        let mut best = f64::INFINITY;
        let mut y = snapped.clone();
        for ci in 0..self.u.len() {
            let dim = y[ci].dim();
            for s in 0..dim {
                let keep = y[ci].0[s];
                for &v in &self.values {
                    y[ci].0[s] = v;
                    if (self.pred)(&y) {
                        let d = (0..self.u.len())
                            .map(|i| self.family.space_at(i + 1).dist(&self.u[i], &y[i]))
                            .fold(0.0f64, f64::max);
                        best = best.min(d);
                    }
                }
                y[ci].0[s] = keep;
            }
        }
        best
    }
}

fn set_distance_outer(
    family: &SpaceFamily,
    u: &[CoordVector],
    pred: &(dyn Fn(&[CoordVector]) -> bool + Sync),
    grid: &GridSpec,
    parallel: bool,
) -> Result<f64> {
    assert!(!u.is_empty());
    let scan = Scan {
        family,
        u,
        pred,
        values: grid.values(),
    };
    let init = scan.axis_init(grid);
    let first_axis = scan.values.clone();
    let body = |k: usize| -> f64 {
        let mut best = init;
        let mut y: Vec<CoordVector> = vec![family.space_at(1).zero()];
        y[0].0[0] = first_axis[k];
        // remaining scalars of coordinate 1, then the rest
        scan.scan_coord(0, 1, &mut y, 0.0, &mut best);
        best
    };
    let best = if parallel {
        par::min_f64(first_axis.len(), body)
    } else {
        par::min_f64_seq(first_axis.len(), body)
    };
    if best.is_infinite() {
        return Err(Error::Infeasible);
    }
    Ok(best)
}

/// Minimum of `d_n(u, y)` over grid points `y` with `pred(y)` true, where
/// `d_n` is the coordinate-wise max of per-space norm distances.
/// Error is bounded by the grid cell diameter.
pub fn brute_force_set_distance(
    family: &SpaceFamily,
    u: &[CoordVector],
    pred: &(dyn Fn(&[CoordVector]) -> bool + Sync),
    grid: &GridSpec,
) -> Result<f64> {
    set_distance_outer(family, u, pred, grid, true)
}

/// Sequential variant (benchmark baseline).
pub fn brute_force_set_distance_seq(
    family: &SpaceFamily,
    u: &[CoordVector],
    pred: &(dyn Fn(&[CoordVector]) -> bool + Sync),
    grid: &GridSpec,
) -> Result<f64> {
    set_distance_outer(family, u, pred, grid, false)
}

/// `sup f − inf f` over the grid box `∏ [u_s − radius, u_s + radius]`,
/// an oracle for the oscillation of functions that factor through the
/// first `n` coordinates.
pub fn brute_force_oscillation(
    family: &SpaceFamily,
    f: &(dyn Fn(&[CoordVector]) -> f64 + Sync),
    u: &[CoordVector],
    radius: f64,
    step: f64,
) -> f64 {
    let mut points = vec![u.to_vec()];
    for ci in 0..u.len() {
        let dim = family.space_at(ci + 1).dim;
        for s in 0..dim {
            let mut next = Vec::new();
            for p in &points {
                let base = u[ci].0[s];
                let count = (2.0 * radius / step).floor() as usize + 1;
                for k in 0..count {
                    let mut q = p.clone();
                    q[ci].0[s] = base - radius + k as f64 * step;
                    next.push(q);
                }
            }
            points = next;
        }
    }
    let lo = par::min_f64(points.len(), |i| f(&points[i]));
    let hi = par::max_f64(points.len(), |i| f(&points[i]));
    hi - lo
}
