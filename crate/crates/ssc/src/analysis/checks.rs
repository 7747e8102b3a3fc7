//! Continuity checkers: strong separate continuity, separate continuity,
//! constancy on σ-components, the finite-coordinate continuity criterion,
//! and the structural witness/neighborhood constructions for ball functions.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use crate::construct::{classify_region, h_transform, BallProduct, Evaluable, RegionTag};
use crate::error::{Error, Result};
use crate::sample::{random_point_in_box, rng_from_seed};
use crate::space::{Ambient, BoxNeighborhood, CoordVector, SparsePoint};

/// Net of shrinking box neighborhoods used by the samplers.
#[derive(Debug, Clone, Copy)]
pub struct NetSpec {
    /// Number of shrinking levels.
    pub levels: usize,
    /// Box radius at level 0.
    pub base_radius: f64,
    /// Multiplicative radius decay per level.
    pub shrink: f64,
    /// Extra constrained indices beyond the level number.
    pub horizon_offset: usize,
    /// Random points drawn per level.
    pub samples_per_level: usize,
    /// Gap below which behaviour counts as continuous.
    pub tol: f64,
}

impl Default for NetSpec {
    fn default() -> Self {
        NetSpec {
            levels: 6,
            base_radius: 0.5,
            shrink: 0.25,
            horizon_offset: 2,
            samples_per_level: 64,
            tol: 1e-2,
        }
    }
}

impl NetSpec {
    pub fn radius(&self, level: usize) -> f64 {
        self.base_radius * self.shrink.powi(level as i32)
    }

    pub fn horizon(&self, level: usize) -> usize {
        level + 1 + self.horizon_offset
    }

    /// Box of the net at `level`, centered at `x`, constraining the first
    /// `horizon(level)` indices together with the support of `x`.
    pub fn level_box(&self, x: &SparsePoint, level: usize) -> Result<BoxNeighborhood> {
        let r = self.radius(level);
        let mut constraints = BTreeMap::new();
        for n in 1..=self.horizon(level) {
            constraints.insert(n, r);
        }
        for n in x.support() {
            constraints.insert(n, r);
        }
        BoxNeighborhood::new(x.clone(), constraints)
    }
}

/// Per-level supremum of `|f(y) − f(y with coordinate t reset to x_t)|`.
#[derive(Debug, Clone)]
pub struct SscReport {
    pub per_level_sup: Vec<f64>,
    pub worst_index: usize,
    pub pass: bool,
}

/// Strong separate continuity of `f` at `x`: resetting any single
/// coordinate of a nearby point back to `x`'s value must move the value of
/// `f` by an amount that vanishes as the point approaches `x`.
pub fn ssc_check(
    amb: &Ambient,
    f: &dyn Evaluable,
    x: &SparsePoint,
    net: &NetSpec,
    seed: u64,
) -> Result<SscReport> {
    let mut rng = rng_from_seed(seed);
    let mut per_level_sup = Vec::new();
    let mut worst_index = 0usize;
    for level in 0..net.levels {
        let bx = net.level_box(x, level)?;
        let indices: BTreeSet<usize> = bx.constrained_indices();
        let mut sup = 0.0f64;
        for _ in 0..net.samples_per_level {
            let y = random_point_in_box(amb, &bx, &mut rng, &[])?;
            let fy = f.eval(amb, &y)?;
            for &t in &indices {
                let yt = amb.with_coordinate(&y, t, amb.coordinate(x, t)?)?;
                let gap = (fy - f.eval(amb, &yt)?).abs();
                if gap > sup {
                    sup = gap;
                    worst_index = t;
                }
            }
        }
        per_level_sup.push(sup);
    }
    let pass = per_level_sup.last().copied().unwrap_or(0.0) < net.tol;
    Ok(SscReport {
        per_level_sup,
        worst_index,
        pass,
    })
}

/// Final-level oscillation of `f` along each single coordinate at `x`.
#[derive(Debug, Clone)]
pub struct SepReport {
    pub per_index_final: BTreeMap<usize, f64>,
    pub pass: bool,
}

/// Separate continuity of `f` at `x`: continuity in each variable with the
/// others frozen. For each coordinate, perturb only that coordinate within
/// shrinking radii and require the value gap at the finest level to fall
/// below the tolerance.
pub fn separate_continuity_check(
    amb: &Ambient,
    f: &dyn Evaluable,
    x: &SparsePoint,
    net: &NetSpec,
    seed: u64,
) -> Result<SepReport> {
    let mut rng = rng_from_seed(seed);
    let fx = f.eval(amb, x)?;
    let horizon = net.horizon(net.levels - 1).max(x.max_support());
    let mut per_index_final = BTreeMap::new();
    for t in 1..=horizon {
        let mut last = 0.0f64;
        for level in 0..net.levels {
            let r = net.radius(level);
            let mut constraints = BTreeMap::new();
            constraints.insert(t, r);
            let bx = BoxNeighborhood::new(x.clone(), constraints)?;
            let mut sup = 0.0f64;
            for _ in 0..net.samples_per_level {
                let y = random_point_in_box(amb, &bx, &mut rng, &[])?;
                sup = sup.max((f.eval(amb, &y)? - fx).abs());
            }
            last = sup;
        }
        per_index_final.insert(t, last);
    }
    let pass = per_index_final.values().all(|&g| g < net.tol);
    Ok(SepReport {
        per_index_final,
        pass,
    })
}

/// Verdict of the component-constancy check.
#[derive(Debug, Clone)]
pub enum SContVerdict {
    /// All sampled points of the component agreed with `f(x)`.
    Constant { samples: usize },
    /// A same-component point with a different value.
    Varies { witness: SparsePoint, gap: f64 },
}

impl SContVerdict {
    pub fn is_constant(&self) -> bool {
        matches!(self, SContVerdict::Constant { .. })
    }
}

/// Constancy of `f` on the σ-component of `x`: sample points that differ
/// from `x` in finitely many coordinates, at several magnitudes, and
/// compare values. Constancy on components is exactly continuity with
/// respect to the topology whose open sets absorb single-coordinate
/// changes.
pub fn s_continuity_check(
    amb: &Ambient,
    f: &dyn Evaluable,
    x: &SparsePoint,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<SContVerdict> {
    let mut rng = rng_from_seed(seed);
    let fx = f.eval(amb, x)?;
    let magnitudes = [1e-3, 1e-1, 1.0, 10.0, 1e3];
    for k in 0..samples {
        let mut y = x.clone();
        let changes = rng.gen_range(1..=4usize);
        for _ in 0..changes {
            let n = rng.gen_range(1..=(x.max_support().max(4) + 4));
            let space = amb.family.space_at(n);
            let mag = magnitudes[k % magnitudes.len()];
            let v = CoordVector(
                (0..space.dim)
                    .map(|_| rng.gen_range(-mag..=mag))
                    .collect::<Vec<f64>>(),
            );
            y = amb.with_coordinate(&y, n, amb.coordinate(x, n)?.add(&v))?;
        }
        let gap = (f.eval(amb, &y)? - fx).abs();
        if gap > tol {
            return Ok(SContVerdict::Varies { witness: y, gap });
        }
    }
    Ok(SContVerdict::Constant { samples })
}

/// `min_{1≤i≤n} |‖z_i‖_i − 1|` of a transformed point; coordinates off the
/// support contribute distance 1 (the zero vector to the unit sphere).
pub fn interior_rho(amb: &Ambient, z: &SparsePoint, n: usize) -> Result<f64> {
    let mut m = f64::INFINITY;
    for i in 1..=n.max(1) {
        let zi = amb.coordinate(z, i)?;
        m = m.min(amb.family.space_at(i).dist_to_unit_sphere(&zi));
    }
    Ok(m)
}

/// Structural discontinuity witness for a ball function at an interior
/// point `u`: override coordinate `n + m` with a value outside its ball at
/// relative distance `ρ = interior_rho` from the sphere, so the function
/// value jumps from `0` to exactly `ρ` while the first `n + m − 1`
/// coordinates are untouched.
pub fn escape_witness(
    amb: &Ambient,
    bp: &BallProduct,
    u: &SparsePoint,
    m: usize,
) -> Result<(SparsePoint, f64)> {
    if m == 0 {
        return Err(Error::ZeroIndex);
    }
    let z = h_transform(amb, u, bp)?;
    if !matches!(classify_region(amb, &z)?, RegionTag::Interior) {
        return Err(Error::Precondition(
            "witness construction needs an interior point".into(),
        ));
    }
    let n = z.max_support().max(1);
    let rho = interior_rho(amb, &z, n)?;
    debug_assert!(rho > 0.0 && rho <= 1.0);
    let k = n + m;
    let space = amb.family.space_at(k);
    let wk = amb.coordinate(&bp.center, k)?;
    let escape = wk.add(&space.unit().scale(bp.radii.at(k) * (1.0 + rho)));
    let witness = amb.with_coordinate(u, k, escape)?;
    Ok((witness, rho))
}

/// Continuity neighborhood for a ball function at a point `u` of the
/// escape region: a box on which `|f(x) − f(u)| < ε`.
///
/// With least escape index `n`: on the sphere (`‖z_n‖ = 1`) the box sits
/// over the ball-product center with a tight constraint at `n` only; off
/// the sphere (`‖z_n‖ > 1`) the box pins each of the first `n` coordinates
/// of `u` inside its region with margin to spare.
pub fn continuity_neighborhood(
    amb: &Ambient,
    bp: &BallProduct,
    u: &SparsePoint,
    eps: f64,
) -> Result<BoxNeighborhood> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    if eps > 1.0 {
        return Ok(BoxNeighborhood::whole_space(u.clone()));
    }
    let z = h_transform(amb, u, bp)?;
    let n = match classify_region(amb, &z)? {
        RegionTag::Escape(n) => n,
        RegionTag::Interior => {
            return Err(Error::Precondition(
                "continuity neighborhood needs an escape-region point".into(),
            ))
        }
    };
    let zn_norm = amb.family.space_at(n).norm(&amb.coordinate(&z, n)?);
    if (zn_norm - 1.0).abs() < 1e-12 {
        // on the sphere: center the box over the ball-product center,
        // keeping u's n-th coordinate, and pin only coordinate n tightly
        let mut center = bp.center.clone();
        center = amb.with_coordinate(&center, n, amb.coordinate(u, n)?)?;
        let mut constraints = BTreeMap::new();
        for i in 1..n {
            constraints.insert(i, bp.radii.at(i));
        }
        constraints.insert(n, 0.9 * eps * bp.radii.at(n));
        BoxNeighborhood::new(center, constraints)
    } else {
        // off the sphere: pin u's first n coordinates with enough margin
        // that the escape index and a value gap below ε are preserved
        let mut constraints = BTreeMap::new();
        for i in 1..n {
            let zi_norm = amb.family.space_at(i).norm(&amb.coordinate(&z, i)?);
            let delta = (0.4 * eps).min((1.0 - zi_norm) / 2.0);
            constraints.insert(i, delta * bp.radii.at(i));
        }
        let delta_n = (0.4 * eps).min((zn_norm - 1.0) / 2.0);
        constraints.insert(n, delta_n * bp.radii.at(n));
        BoxNeighborhood::new(u.clone(), constraints)
    }
}

/// Sampled validation of [`continuity_neighborhood`]: the largest observed
/// `|f(x) − f(u)|` over random points of the box (including far-coordinate
/// overrides), which the caller compares against ε.
pub fn continuity_box_check(
    amb: &Ambient,
    bp: &BallProduct,
    u: &SparsePoint,
    eps: f64,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let bx = continuity_neighborhood(amb, bp, u, eps)?;
    let f = crate::construct::build_ball_function(bp.clone());
    let fu = f.evaluate(amb, u)?;
    let mut rng = rng_from_seed(seed);
    let far = bx.max_constrained().max(u.max_support()) + 3;
    let mut worst = 0.0f64;
    for k in 0..samples {
        let extra: Vec<(usize, CoordVector)> = if k % 3 == 0 {
            let space = amb.family.space_at(far);
            let c = amb.coordinate(&bp.center, far)?;
            let v = c.add(&space.unit().scale(bp.radii.at(far) * rng.gen_range(0.0..3.0)));
            vec![(far, v)]
        } else {
            Vec::new()
        };
        let x = random_point_in_box(amb, &bx, &mut rng, &extra)?;
        worst = worst.max((f.evaluate(amb, &x)? - fu).abs());
    }
    Ok(worst)
}

/// Outcome of the finite-coordinate continuity criterion search.
#[derive(Debug, Clone)]
pub struct FiniteCriterionResult {
    /// Witnessing index set and box, when the search succeeds.
    pub found: Option<(BTreeSet<usize>, BoxNeighborhood)>,
    /// Number of (index set, box) configurations examined.
    pub configurations: usize,
    pub eps: f64,
}

impl FiniteCriterionResult {
    pub fn is_found(&self) -> bool {
        self.found.is_some()
    }
}

/// Continuity criterion at `a`: search for a finite index set `T₀` and a
/// box `U` around `a` such that resetting the `T₀`-coordinates of any
/// sampled `x ∈ U` back to `a` leaves the value within ε of `f(a)`.
/// Success is evidence of continuity at `a`; exhaustion of the search
/// budget is evidence against it.
///
/// The sample pool per box mixes random in-box points, far-coordinate
/// escape probes built from the function's ball products, and points of
/// other σ-components when the function accepts them.
pub fn finite_criterion_check(
    amb: &Ambient,
    f: &crate::construct::ConstructedFunction,
    a: &SparsePoint,
    eps: f64,
    budget: usize,
    seed: u64,
) -> Result<FiniteCriterionResult> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    let mut rng = rng_from_seed(seed);
    let fa = f.evaluate(amb, a)?;
    let box_radii = [f64::INFINITY, 1.0, 0.25, 0.0625];

    // sample pools, one per box
    let mut pools: Vec<Vec<SparsePoint>> = Vec::new();
    for &r in &box_radii {
        let bx = if r.is_finite() {
            let mut constraints = BTreeMap::new();
            for n in 1..=budget {
                constraints.insert(n, r);
            }
            for n in a.support() {
                constraints.insert(n, r);
            }
            BoxNeighborhood::new(a.clone(), constraints)?
        } else {
            BoxNeighborhood::whole_space(a.clone())
        };
        let mut pool = Vec::new();
        if r.is_finite() {
            for _ in 0..24 {
                pool.push(random_point_in_box(amb, &bx, &mut rng, &[])?);
            }
            // deterministic per-axis extremes: single-coordinate
            // sensitivity cannot hide between random draws
            for j in bx.constrained_indices() {
                let space = amb.family.space_at(j);
                let c = amb.coordinate(a, j)?;
                for sign in [-1.0, 1.0] {
                    let v = c.add(&space.unit().scale(sign * 0.999 * r));
                    pool.push(amb.with_coordinate(a, j, v)?);
                }
            }
        } else {
            // the whole space: unconstrained points with large excursions
            for _ in 0..24 {
                let mut p = a.clone();
                for _ in 0..rng.gen_range(1..=3usize) {
                    let n = rng.gen_range(1..=budget + 2);
                    let space = amb.family.space_at(n);
                    let v = CoordVector(
                        (0..space.dim)
                            .map(|_| rng.gen_range(-5.0f64..5.0))
                            .collect::<Vec<f64>>(),
                    );
                    p = amb.with_coordinate(&p, n, v)?;
                }
                pool.push(p);
            }
            for j in 1..=budget {
                let space = amb.family.space_at(j);
                let c = amb.coordinate(a, j)?;
                for sign in [-1.0, 1.0] {
                    let v = c.add(&space.unit().scale(sign * 3.0));
                    pool.push(amb.with_coordinate(a, j, v)?);
                }
            }
        }
        // far-coordinate escape probes: in-box points overridden beyond the
        // budget at a sphere-avoiding distance from each ball's center
        for bp in f.balls() {
            if bp.anchor != a.anchor {
                continue;
            }
            for m in 1..=2usize {
                let far = budget + m;
                let space = amb.family.space_at(far);
                let c = amb.coordinate(&bp.center, far)?;
                let v = c.add(&space.unit().scale(bp.radii.at(far) * 1.5));
                let base = random_point_in_box(amb, &bx, &mut rng, &[(far, v)])?;
                pool.push(base);
            }
        }
        // other components, pulled inside the box by matching its
        // constrained coordinates
        if f.anchor().is_none() {
            for id in amb.anchor_ids() {
                if id == a.anchor {
                    continue;
                }
                let mut p = amb.base_point(id)?;
                for n in bx.constrained_indices() {
                    p = amb.with_coordinate(&p, n, amb.coordinate(a, n)?)?;
                }
                pool.push(p);
            }
        }
        pools.push(pool);
    }

    let indices: Vec<usize> = (1..=budget).collect();
    let mut configurations = 0usize;
    for size in 0..=budget {
        for t0 in subsets_of_size(&indices, size) {
            for (bi, pool) in pools.iter().enumerate() {
                configurations += 1;
                let mut ok = true;
                for x in pool {
                    let mut y = x.clone();
                    for &t in &t0 {
                        y = amb.with_coordinate(&y, t, amb.coordinate(a, t)?)?;
                    }
                    match f.evaluate(amb, &y) {
                        Ok(v) => {
                            if (v - fa).abs() >= eps {
                                ok = false;
                                break;
                            }
                        }
                        // points outside the function's domain don't count
                        Err(Error::AnchorMismatch { .. }) => continue,
                        Err(e) => return Err(e),
                    }
                }
                if ok {
                    let r = box_radii[bi];
                    let bx = if r.is_finite() {
                        let mut constraints = BTreeMap::new();
                        for n in 1..=budget {
                            constraints.insert(n, r);
                        }
                        for n in a.support() {
                            constraints.insert(n, r);
                        }
                        BoxNeighborhood::new(a.clone(), constraints)?
                    } else {
                        BoxNeighborhood::whole_space(a.clone())
                    };
                    return Ok(FiniteCriterionResult {
                        found: Some((t0, bx)),
                        configurations,
                        eps,
                    });
                }
            }
        }
    }
    Ok(FiniteCriterionResult {
        found: None,
        configurations,
        eps,
    })
}

/// All `size`-element subsets of `items`, in lexicographic order.
fn subsets_of_size(items: &[usize], size: usize) -> Vec<BTreeSet<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(
        items: &[usize],
        size: usize,
        start: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<BTreeSet<usize>>,
    ) {
        if current.len() == size {
            out.push(current.iter().copied().collect());
            return;
        }
        for i in start..items.len() {
            current.push(items[i]);
            rec(items, size, i + 1, current, out);
            current.pop();
        }
    }
    rec(items, size, 0, &mut current, &mut out);
    out
}
