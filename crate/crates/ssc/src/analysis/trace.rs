//! Finite-coordinate traces of subsets of σ-products.
//!
//! A set `W ⊆ σ(a)` is nearly open when every trace
//! `W_{T₀} = {z : a_{T₀}^z ∈ W}` is open in the finite product. Traces are
//! carried either as analytic unions of per-coordinate regions (certifiable)
//! or as black-box membership tests (probed on a grid).

use std::sync::Arc;

use rand::Rng;

use crate::construct::ClaimedSet;
use crate::error::{Error, Result};
use crate::sample::rng_from_seed;
use crate::space::{Ambient, CoordSpace, CoordVector, SparsePoint};

/// Region in one factor space.
#[derive(Debug, Clone)]
pub enum CoordRegion {
    OpenBall { center: CoordVector, radius: f64 },
    ClosedBall { center: CoordVector, radius: f64 },
    Point(CoordVector),
    Whole,
}

impl CoordRegion {
    pub fn is_open(&self) -> bool {
        matches!(self, CoordRegion::OpenBall { .. } | CoordRegion::Whole)
    }

    pub fn contains(&self, space: &CoordSpace, v: &CoordVector) -> bool {
        match self {
            CoordRegion::OpenBall { center, radius } => space.dist(center, v) < *radius,
            CoordRegion::ClosedBall { center, radius } => space.dist(center, v) <= *radius,
            CoordRegion::Point(p) => p == v,
            CoordRegion::Whole => true,
        }
    }

    /// `radius − dist(v, center)` for open regions; how far `v` sits inside.
    /// Capped so that eventually-constant tails give finite radii.
    fn interior_margin(&self, space: &CoordSpace, v: &CoordVector) -> f64 {
        const CAP: f64 = 2.0;
        match self {
            CoordRegion::OpenBall { center, radius } => (radius - space.dist(center, v)).min(CAP),
            CoordRegion::Whole => CAP,
            // non-open regions have empty interior
            CoordRegion::ClosedBall { .. } | CoordRegion::Point(_) => f64::NEG_INFINITY,
        }
    }
}

/// A product `∏_{i≤n} R_i` of per-coordinate regions.
#[derive(Debug, Clone)]
pub struct ProductRegion {
    pub coords: Vec<CoordRegion>,
}

impl ProductRegion {
    pub fn is_open(&self) -> bool {
        self.coords.iter().all(CoordRegion::is_open)
    }

    pub fn contains(&self, amb: &Ambient, z: &[CoordVector]) -> bool {
        self.coords.len() == z.len()
            && self
                .coords
                .iter()
                .zip(z)
                .enumerate()
                .all(|(i, (r, v))| r.contains(amb.family.space_at(i + 1), v))
    }
}

type TraceMembership = Arc<dyn Fn(&[CoordVector]) -> bool + Send + Sync>;

/// Trace of the set at one horizon: a finite union of product regions, or a
/// black-box membership test.
#[derive(Clone)]
pub enum TraceDescription {
    Analytic(Vec<ProductRegion>),
    BlackBox(TraceMembership),
}

impl std::fmt::Debug for TraceDescription {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TraceDescription::Analytic(rs) => write!(f, "Analytic({} regions)", rs.len()),
            TraceDescription::BlackBox(_) => write!(f, "BlackBox"),
        }
    }
}

/// `n ↦` description of `W_{{1..n}}`.
#[derive(Clone)]
pub struct TraceFamily {
    gen: Arc<dyn Fn(usize) -> TraceDescription + Send + Sync>,
}

impl std::fmt::Debug for TraceFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TraceFamily")
    }
}

impl TraceFamily {
    pub fn new(gen: impl Fn(usize) -> TraceDescription + Send + Sync + 'static) -> Self {
        TraceFamily { gen: Arc::new(gen) }
    }

    pub fn at(&self, n: usize) -> TraceDescription {
        (self.gen)(n)
    }

    pub fn contains(&self, amb: &Ambient, n: usize, z: &[CoordVector]) -> bool {
        match self.at(n) {
            TraceDescription::Analytic(regions) => regions.iter().any(|r| r.contains(amb, z)),
            TraceDescription::BlackBox(f) => f(z),
        }
    }

    /// Traces of a claimed discontinuity set. A ball product contributes its
    /// first-`n` balls when the anchor satisfies the tail of the product
    /// (otherwise that ball's trace is empty).
    pub fn from_claimed(amb: &Ambient, claimed: &ClaimedSet) -> Result<TraceFamily> {
        match claimed {
            ClaimedSet::Balls(balls) => {
                let mut data: Vec<(Vec<(CoordVector, f64)>, Vec<(usize, f64, CoordVector, CoordVector)>)> =
                    Vec::new();
                for bp in balls {
                    let mut per_coord = Vec::new();
                    let horizon = bp.center.max_support().max(1) + 8;
                    for i in 1..=horizon {
                        per_coord.push((amb.coordinate(&bp.center, i)?, bp.radii.at(i)));
                    }
                    // tail check data: support of the center beyond any n
                    let mut tail = Vec::new();
                    for j in bp.center.support() {
                        tail.push((
                            j,
                            bp.radii.at(j),
                            amb.anchor_coordinate(bp.anchor, j)?,
                            amb.coordinate(&bp.center, j)?,
                        ));
                    }
                    data.push((per_coord, tail));
                }
                let family = amb.family.clone();
                Ok(TraceFamily::new(move |n| {
                    let mut regions = Vec::new();
                    for (per_coord, tail) in &data {
                        let tail_ok = tail.iter().all(|(j, r, aj, wj)| {
                            *j <= n || family.space_at(*j).dist(aj, wj) < *r
                        });
                        if !tail_ok {
                            continue;
                        }
                        let coords = (1..=n)
                            .map(|i| {
                                let (c, r) = per_coord
                                    .get(i - 1)
                                    .cloned()
                                    .unwrap_or_else(|| {
                                        (family.space_at(i).zero(), per_coord.last().unwrap().1)
                                    });
                                CoordRegion::OpenBall {
                                    center: c,
                                    radius: r,
                                }
                            })
                            .collect();
                        regions.push(ProductRegion { coords });
                    }
                    TraceDescription::Analytic(regions)
                }))
            }
            ClaimedSet::Everything => Ok(TraceFamily::new(|n| {
                TraceDescription::Analytic(vec![ProductRegion {
                    coords: vec![CoordRegion::Whole; n],
                }])
            })),
            ClaimedSet::Unspecified => Err(Error::InvalidParameter(
                "function has no claimed discontinuity set".into(),
            )),
        }
    }

    /// `G_n = ∏ B(0, half)` — the open cube/ball family used by the radii
    /// extension examples.
    pub fn cube(amb: &Ambient, half: f64) -> TraceFamily {
        let family = amb.family.clone();
        TraceFamily::new(move |n| {
            TraceDescription::Analytic(vec![ProductRegion {
                coords: (1..=n)
                    .map(|i| CoordRegion::OpenBall {
                        center: family.space_at(i).zero(),
                        radius: half,
                    })
                    .collect(),
            }])
        })
    }

    /// Trace family of the singleton `{p}`.
    pub fn singleton(amb: &Ambient, p: &SparsePoint) -> Result<TraceFamily> {
        let horizon = p.max_support().max(1) + 8;
        let coords: Vec<CoordVector> = (1..=horizon)
            .map(|i| amb.coordinate(p, i))
            .collect::<Result<_>>()?;
        Ok(TraceFamily::new(move |n| {
            // beyond the support the trace is exactly the point's prefix
            let m = n.min(coords.len());
            TraceDescription::Analytic(vec![ProductRegion {
                coords: coords[..m]
                    .iter()
                    .map(|c| CoordRegion::Point(c.clone()))
                    .collect(),
            }])
        }))
    }

    /// Trace family of a closed-ball product around `p`.
    pub fn closed_ball_product(amb: &Ambient, p: &SparsePoint, radius: f64) -> Result<TraceFamily> {
        let horizon = p.max_support().max(1) + 8;
        let coords: Vec<CoordVector> = (1..=horizon)
            .map(|i| amb.coordinate(p, i))
            .collect::<Result<_>>()?;
        Ok(TraceFamily::new(move |n| {
            let m = n.min(coords.len());
            TraceDescription::Analytic(vec![ProductRegion {
                coords: coords[..m]
                    .iter()
                    .map(|c| CoordRegion::ClosedBall {
                        center: c.clone(),
                        radius,
                    })
                    .collect(),
            }])
        }))
    }

    pub fn black_box(f: impl Fn(usize, &[CoordVector]) -> bool + Send + Sync + 'static) -> Self {
        let f = Arc::new(f);
        TraceFamily::new(move |n| {
            let f = Arc::clone(&f);
            TraceDescription::BlackBox(Arc::new(move |z| f(n, z)))
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub enum TraceMode {
    Analytic,
    Grid { step: f64 },
}

#[derive(Debug, Clone)]
pub enum TraceStatus {
    Open,
    NotOpenAt(Vec<CoordVector>),
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct TraceVerdict {
    pub n: usize,
    pub status: TraceStatus,
    pub certified: bool,
}

impl TraceVerdict {
    pub fn is_open(&self) -> bool {
        matches!(self.status, TraceStatus::Open)
    }
}

/// Check openness of each trace `W_{{1..n}}`, `n ≤ horizon`.
///
/// Analytic mode certifies: unions of open regions are open, and any
/// point or closed-ball component witnesses non-openness at its center.
/// Grid mode probes members of a black-box trace for interior δ-balls.
pub fn nearly_open_trace_check(
    amb: &Ambient,
    traces: &TraceFamily,
    horizon: usize,
    mode: TraceMode,
) -> Result<Vec<TraceVerdict>> {
    let mut out = Vec::new();
    for n in 1..=horizon {
        let verdict = match (traces.at(n), mode) {
            (TraceDescription::Analytic(regions), _) => {
                match regions.iter().find(|r| !r.is_open()) {
                    None => TraceVerdict {
                        n,
                        status: TraceStatus::Open,
                        certified: true,
                    },
                    Some(bad) => {
                        let witness = bad
                            .coords
                            .iter()
                            .enumerate()
                            .map(|(i, r)| match r {
                                CoordRegion::OpenBall { center, .. }
                                | CoordRegion::ClosedBall { center, .. } => center.clone(),
                                CoordRegion::Point(p) => p.clone(),
                                CoordRegion::Whole => amb.family.space_at(i + 1).zero(),
                            })
                            .collect();
                        TraceVerdict {
                            n,
                            status: TraceStatus::NotOpenAt(witness),
                            certified: true,
                        }
                    }
                }
            }
            (TraceDescription::BlackBox(members), TraceMode::Grid { step }) => {
                grid_probe(amb, &*members, n, step)?
            }
            (TraceDescription::BlackBox(_), TraceMode::Analytic) => TraceVerdict {
                n,
                status: TraceStatus::Inconclusive,
                certified: false,
            },
        };
        out.push(verdict);
    }
    Ok(out)
}

/// Grid probe of a black-box trace over `[-2, 2]` per scalar axis: each
/// sampled member must admit a sampled δ-ball inside the set, δ down to
/// the resolution `step`.
fn grid_probe(
    amb: &Ambient,
    members: &(dyn Fn(&[CoordVector]) -> bool + Sync),
    n: usize,
    step: f64,
) -> Result<TraceVerdict> {
    let mut rng = rng_from_seed(n as u64);
    let coarse = 0.25f64;
    let mut sample_points = Vec::new();
    // coarse member scan
    let axis: Vec<f64> = {
        let count = (4.0 / coarse) as usize + 1;
        (0..count).map(|k| -2.0 + k as f64 * coarse).collect()
    };
    let dims: Vec<usize> = (1..=n).map(|i| amb.family.space_at(i).dim).collect();
    let total: usize = dims.iter().sum();
    let mut idx = vec![0usize; total];
    loop {
        let mut z = Vec::new();
        let mut k = 0;
        for &d in &dims {
            z.push(CoordVector(
                (0..d).map(|s| axis[idx[k + s]]).collect::<Vec<f64>>(),
            ));
            k += d;
        }
        if members(&z) {
            sample_points.push(z);
        }
        // odometer
        let mut carry = true;
        for digit in idx.iter_mut() {
            *digit += 1;
            if *digit < axis.len() {
                carry = false;
                break;
            }
            *digit = 0;
        }
        if carry {
            break;
        }
    }
    for z in &sample_points {
        let mut ok = false;
        let mut delta = 1.0f64;
        'search: while delta >= step {
            let mut inside = true;
            for _ in 0..64 {
                let y: Vec<CoordVector> = z
                    .iter()
                    .map(|c| {
                        CoordVector(
                            c.0.iter()
                                .map(|&x| x + rng.gen_range(-delta..delta))
                                .collect::<Vec<f64>>(),
                        )
                    })
                    .collect();
                if !members(&y) {
                    inside = false;
                    break;
                }
            }
            if inside {
                ok = true;
                break 'search;
            }
            delta /= 2.0;
        }
        if !ok {
            return Ok(TraceVerdict {
                n,
                status: TraceStatus::NotOpenAt(z.clone()),
                certified: false,
            });
        }
    }
    Ok(TraceVerdict {
        n,
        status: TraceStatus::Open,
        certified: false,
    })
}

/// Deterministic radii extension along a nearly open trace family.
///
/// Closed boxes `F_j = ∏_{k≤N+j−1} B[x_k, r_k]` are kept strictly inside
/// successive traces: the first radii take half the per-coordinate interior
/// margin at `x`, and each new radius takes half of the (positive) margin
/// between `F_j × {0}` and the complement of the next trace, capped by the
/// previous radius so the sequence decreases.
pub fn radii_extension(
    amb: &Ambient,
    traces: &TraceFamily,
    x: &SparsePoint,
    horizon: usize,
) -> Result<Vec<f64>> {
    let n0 = x.max_support().max(1);
    if horizon < n0 {
        return Err(Error::InvalidParameter(
            "horizon must reach the point's support".into(),
        ));
    }
    let coords: Vec<CoordVector> = (1..=horizon)
        .map(|i| amb.coordinate(x, i))
        .collect::<Result<_>>()?;

    let analytic = |n: usize| -> Result<Vec<ProductRegion>> {
        match traces.at(n) {
            TraceDescription::Analytic(r) => Ok(r),
            TraceDescription::BlackBox(_) => Err(Error::InvalidParameter(
                "radii extension needs an analytic trace description".into(),
            )),
        }
    };

    let mut radii: Vec<f64> = Vec::new();

    // base stage: F_1 = ∏_{k≤N} B[x_k, m_k/2] inside the best region of G_N
    let base_regions = analytic(n0)?;
    let mut best: Option<Vec<f64>> = None;
    for region in &base_regions {
        if region.coords.len() != n0 {
            continue;
        }
        let margins: Vec<f64> = region
            .coords
            .iter()
            .enumerate()
            .map(|(i, r)| r.interior_margin(amb.family.space_at(i + 1), &coords[i]))
            .collect();
        let m = margins.iter().cloned().fold(f64::INFINITY, f64::min);
        if m > 0.0
            && best
                .as_ref()
                .map(|b| m > b.iter().cloned().fold(f64::INFINITY, f64::min))
                .unwrap_or(true)
        {
            best = Some(margins);
        }
    }
    let margins = best.ok_or(Error::NotNearlyOpen {
        horizon: n0,
        margin: 0.0,
    })?;
    radii.extend(margins.iter().map(|m| m / 2.0));

    // inductive stages: half of min(previous radius, margin of F_j × {0})
    for n in (n0 + 1)..=horizon {
        let regions = analytic(n)?;
        let mut best_margin = f64::NEG_INFINITY;
        for region in &regions {
            if region.coords.len() != n {
                continue;
            }
            let mut margin = f64::INFINITY;
            for (i, r) in region.coords.iter().enumerate() {
                let center_margin = r.interior_margin(amb.family.space_at(i + 1), &coords[i]);
                let shrink = radii.get(i).copied().unwrap_or(0.0);
                margin = margin.min(center_margin - shrink);
            }
            best_margin = best_margin.max(margin);
        }
        if !(best_margin > 0.0) {
            return Err(Error::NotNearlyOpen {
                horizon: n,
                margin: best_margin,
            });
        }
        let prev = *radii.last().unwrap();
        radii.push(best_margin.min(prev) / 2.0);
    }
    Ok(radii)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{NormKind, SpaceFamily, ZERO_ANCHOR};

    fn line() -> Ambient {
        Ambient::new(SpaceFamily::uniform(CoordSpace::new(1, NormKind::L2)))
    }

    #[test]
    fn cube_radii_halving() {
        let amb = line();
        let g = TraceFamily::cube(&amb, 1.0);
        let x = amb.base_point(ZERO_ANCHOR).unwrap();
        let r = radii_extension(&amb, &g, &x, 3).unwrap();
        assert_eq!(r, vec![0.5, 0.25, 0.125]);
    }

    #[test]
    fn boundary_point_is_rejected() {
        let amb = line();
        let g = TraceFamily::cube(&amb, 1.0);
        let x = amb
            .point(
                ZERO_ANCHOR,
                [(1usize, CoordVector(vec![1.0]))].into_iter().collect(),
            )
            .unwrap();
        assert!(matches!(
            radii_extension(&amb, &g, &x, 3),
            Err(Error::NotNearlyOpen { .. })
        ));
    }

    #[test]
    fn open_cube_trace_passes_and_singleton_fails() {
        let amb = line();
        let g = TraceFamily::cube(&amb, 1.0);
        let verdicts = nearly_open_trace_check(&amb, &g, 3, TraceMode::Analytic).unwrap();
        assert!(verdicts.iter().all(|v| v.is_open() && v.certified));

        let p = amb.base_point(ZERO_ANCHOR).unwrap();
        let s = TraceFamily::singleton(&amb, &p).unwrap();
        let verdicts = nearly_open_trace_check(&amb, &s, 2, TraceMode::Analytic).unwrap();
        assert!(verdicts.iter().all(|v| !v.is_open() && v.certified));

        let c = TraceFamily::closed_ball_product(&amb, &p, 0.5).unwrap();
        let verdicts = nearly_open_trace_check(&amb, &c, 2, TraceMode::Analytic).unwrap();
        assert!(verdicts.iter().all(|v| !v.is_open() && v.certified));
    }

    #[test]
    fn grid_mode_detects_non_open_black_box() {
        let amb = line();
        // closed unit interval at n = 1: boundary member 1.0 has no interior ball
        let bb = TraceFamily::black_box(|_n, z: &[CoordVector]| z[0].0[0].abs() <= 1.0);
        let verdicts =
            nearly_open_trace_check(&amb, &bb, 1, TraceMode::Grid { step: 1e-3 }).unwrap();
        assert!(matches!(verdicts[0].status, TraceStatus::NotOpenAt(_)));

        let open = TraceFamily::black_box(|_n, z: &[CoordVector]| z[0].0[0].abs() < 10.0);
        let verdicts =
            nearly_open_trace_check(&amb, &open, 1, TraceMode::Grid { step: 1e-3 }).unwrap();
        assert!(verdicts[0].is_open());
    }
}
