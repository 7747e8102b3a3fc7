//! Seeded random generators for points, vectors, and ball products.
//!
//! All randomness in the crate flows through `ChaCha8Rng` seeded explicitly,
//! so every check is reproducible from its seed.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::construct::{BallProduct, RadiiSeq};
use crate::error::Result;
use crate::space::{Ambient, AnchorId, BoxNeighborhood, CoordSpace, CoordVector, SparsePoint};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A direction of norm 1 in the given factor space.
pub fn random_direction(rng: &mut ChaCha8Rng, space: &CoordSpace) -> CoordVector {
    loop {
        // Gaussian-ish via sum of uniforms is enough here; normalize in the
        // space's own norm.
        let v = CoordVector(
            (0..space.dim)
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect::<Vec<f64>>(),
        );
        let n = space.norm(&v);
        if n > 1e-6 {
            return v.scale(1.0 / n);
        }
    }
}

/// A vector with `‖v − center‖ < r` (rejection from the bounding cube).
pub fn random_in_ball(
    rng: &mut ChaCha8Rng,
    space: &CoordSpace,
    center: &CoordVector,
    r: f64,
) -> CoordVector {
    loop {
        let v = CoordVector(
            (0..space.dim)
                .map(|_| rng.gen_range(-r..r))
                .collect::<Vec<f64>>(),
        );
        if space.norm(&v) < r {
            return center.add(&v);
        }
    }
}

/// A point of the box: the center with constrained coordinates perturbed
/// within their radii. Extra unconstrained indices may be overridden via
/// `extra` pairs of (index, value).
pub fn random_point_in_box(
    amb: &Ambient,
    bx: &BoxNeighborhood,
    rng: &mut ChaCha8Rng,
    extra: &[(usize, CoordVector)],
) -> Result<SparsePoint> {
    let mut p = bx.center.clone();
    for (&n, &r) in &bx.constraints {
        let space = amb.family.space_at(n);
        let c = amb.coordinate(&bx.center, n)?;
        p = amb.with_coordinate(&p, n, random_in_ball(rng, space, &c, r * 0.999))?;
    }
    for (n, v) in extra {
        p = amb.with_coordinate(&p, *n, v.clone())?;
    }
    Ok(p)
}

/// A random ball product over `anchor`: center finitely supported over the
/// anchor, radii bounded away from zero so continuity evidence converges at
/// desk-scale net depths.
pub fn random_ball_product(
    amb: &Ambient,
    anchor: AnchorId,
    rng: &mut ChaCha8Rng,
) -> Result<BallProduct> {
    let support = rng.gen_range(1..=3usize);
    let mut overrides = BTreeMap::new();
    for _ in 0..support {
        let n = rng.gen_range(1..=4usize);
        let space = amb.family.space_at(n);
        let c = amb.anchor_coordinate(anchor, n)?;
        overrides.insert(n, random_in_ball(rng, space, &c, 1.5));
    }
    let center = amb.point(anchor, overrides)?;
    let prefix_len = rng.gen_range(0..=3usize);
    let prefix: Vec<f64> = (0..prefix_len)
        .map(|_| rng.gen_range(0.4..1.6))
        .collect();
    let tail = rng.gen_range(0.4..1.6);
    BallProduct::new(anchor, center, RadiiSeq::new(prefix, tail)?)
}

/// A point of `W = ∏ B(w_n, r_n) ∩ σ(a)`: overrides every index of the
/// center's support (plus a few more) with values well inside the balls, so
/// the transformed point sits in the open unit-ball product.
pub fn sample_w_member(
    amb: &Ambient,
    bp: &BallProduct,
    rng: &mut ChaCha8Rng,
) -> Result<SparsePoint> {
    let mut p = bp.center.clone();
    let extra = rng.gen_range(0..=2usize);
    let horizon = bp.center.max_support().max(1) + extra;
    for n in 1..=horizon {
        if !rng.gen_bool(0.7) && amb.coordinate(&p, n)? == amb.coordinate(&bp.center, n)? {
            continue;
        }
        let space = amb.family.space_at(n);
        let c = amb.coordinate(&bp.center, n)?;
        let r = bp.radii.at(n);
        // keep ‖h(x)_n‖ ≤ 0.8 so ρ ≥ 0.2 at sampled points
        p = amb.with_coordinate(&p, n, random_in_ball(rng, space, &c, r * 0.8))?;
    }
    Ok(p)
}

/// A point of `C = σ(a) ∖ W'` in the escape region: the transformed point
/// leaves the unit ball at a chosen coordinate, comfortably off the sphere.
pub fn sample_c_member(
    amb: &Ambient,
    bp: &BallProduct,
    rng: &mut ChaCha8Rng,
) -> Result<SparsePoint> {
    let mut p = sample_w_member(amb, bp, rng)?;
    let n = rng.gen_range(1..=bp.center.max_support().max(1) + 2);
    let space = amb.family.space_at(n);
    let c = amb.coordinate(&bp.center, n)?;
    let dir = random_direction(rng, space);
    let mag = rng.gen_range(1.3..2.5);
    p = amb.with_coordinate(&p, n, c.add(&dir.scale(mag * bp.radii.at(n))))?;
    Ok(p)
}
