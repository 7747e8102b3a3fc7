//! Two-sided oscillation estimation at a point: a sampled upper spread
//! over a shrinking net of boxes, and a certified lower bound from witness
//! pairs that survive every box of the net.

use crate::analysis::checks::{escape_witness, NetSpec};
use crate::construct::{classify_region, h_transform, ConstructedFunction, RegionTag};
use crate::error::{Error, Result};
use crate::sample::{random_point_in_box, rng_from_seed};
use crate::space::{Ambient, SparsePoint};

/// Two points close to the reference in every box of the net whose values
/// differ by `gap`.
#[derive(Debug, Clone)]
pub struct WitnessPair {
    pub x: SparsePoint,
    pub y: SparsePoint,
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OscVerdict {
    /// The certified lower bound exceeds the tolerance.
    Discontinuous,
    /// Sampling found no spread above the tolerance at the finest level.
    LikelyContinuous,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct OscillationEstimate {
    /// Sampled `sup − inf` per level, forced nonincreasing.
    pub per_level_upper: Vec<f64>,
    /// Final-level sampled spread.
    pub sampled_upper: f64,
    /// Largest value gap achieved by a witness family that lives beyond
    /// every constrained index of the net, hence inside every box.
    pub certified_lower: f64,
    pub best_pair: Option<WitnessPair>,
    pub verdict: OscVerdict,
}

/// Witness pairs that survive the whole net: far-coordinate escapes for
/// each ball product the point sits inside, probes at a couple of far
/// offsets, and points of other σ-components matched on every constrained
/// coordinate. A family only counts if it reproduces at two different far
/// offsets, so it extends past any given horizon.
fn certified_pairs(
    amb: &Ambient,
    f: &ConstructedFunction,
    u: &SparsePoint,
    net: &NetSpec,
) -> Result<Vec<WitnessPair>> {
    let max_constrained = net.horizon(net.levels - 1).max(u.max_support());
    let fu = f.evaluate(amb, u)?;
    let mut pairs = Vec::new();

    for bp in f.balls() {
        if bp.anchor != u.anchor {
            continue;
        }
        let z = h_transform(amb, u, bp)?;
        if !matches!(classify_region(amb, &z)?, RegionTag::Interior) {
            continue;
        }
        let n = z.max_support().max(1);
        let offsets = [max_constrained + 1 - n.min(max_constrained), max_constrained + 4];
        let mut gap = f64::INFINITY;
        let mut witness = None;
        for m in offsets {
            let (w, _rho) = escape_witness(amb, bp, u, m.max(1))?;
            let g = (f.evaluate(amb, &w)? - fu).abs();
            if g < gap {
                gap = g;
                witness = Some(w);
            }
        }
        if let Some(w) = witness {
            pairs.push(WitnessPair {
                x: u.clone(),
                y: w,
                gap,
            });
        }
    }

    for id in amb.anchor_ids() {
        if id == u.anchor {
            continue;
        }
        // match the other component on every index the net ever constrains,
        // plus a deeper horizon, to show the family persists
        let mut gap = f64::INFINITY;
        let mut witness = None;
        for depth in [max_constrained, max_constrained + 4] {
            let mut p = amb.base_point(id)?;
            for n in 1..=depth {
                p = amb.with_coordinate(&p, n, amb.coordinate(u, n)?)?;
            }
            match f.evaluate(amb, &p) {
                Ok(v) => {
                    let g = (v - fu).abs();
                    if g < gap {
                        gap = g;
                        witness = Some(p);
                    }
                }
                Err(Error::AnchorMismatch { .. }) => {
                    gap = f64::INFINITY;
                    witness = None;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if let Some(w) = witness {
            pairs.push(WitnessPair {
                x: u.clone(),
                y: w,
                gap,
            });
        }
    }

    Ok(pairs)
}

/// Estimate the oscillation of `f` at `u` over a shrinking net of boxes.
///
/// The sampled upper series tracks `sup − inf` of the value over random
/// points of each level's box; the certified lower bound comes from
/// witness pairs unconstrained by any box of the net. The verdict compares
/// both sides against the net tolerance.
pub fn oscillation_estimate(
    amb: &Ambient,
    f: &ConstructedFunction,
    u: &SparsePoint,
    net: &NetSpec,
    seed: u64,
) -> Result<OscillationEstimate> {
    let mut rng = rng_from_seed(seed);
    let fu = f.evaluate(amb, u)?;
    let pairs = certified_pairs(amb, f, u, net)?;
    let best_pair = pairs
        .iter()
        .max_by(|a, b| a.gap.total_cmp(&b.gap))
        .cloned();
    let certified_lower = best_pair.as_ref().map(|p| p.gap).unwrap_or(0.0);

    let mut per_level_upper = Vec::new();
    let mut running = f64::INFINITY;
    for level in 0..net.levels {
        let bx = net.level_box(u, level)?;
        let mut lo = fu;
        let mut hi = fu;
        for pair in &pairs {
            // witness points live inside every box of the net
            for p in [&pair.x, &pair.y] {
                if let Ok(v) = f.evaluate(amb, p) {
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
        }
        for _ in 0..net.samples_per_level {
            let y = random_point_in_box(amb, &bx, &mut rng, &[])?;
            let v = f.evaluate(amb, &y)?;
            lo = lo.min(v);
            hi = hi.max(v);
        }
        running = running.min(hi - lo);
        per_level_upper.push(running);
    }
    let sampled_upper = running;

    let verdict = if certified_lower > net.tol {
        OscVerdict::Discontinuous
    } else if sampled_upper < net.tol {
        OscVerdict::LikelyContinuous
    } else {
        OscVerdict::Inconclusive
    };

    Ok(OscillationEstimate {
        per_level_upper,
        sampled_upper,
        certified_lower,
        best_pair,
        verdict,
    })
}
