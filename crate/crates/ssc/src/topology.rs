//! 𝒮-topology probing: σ-components, 𝒮-openness, projective symmetry,
//! and the coordinated-topology limit check.
//!
//! 𝒮-openness of an arbitrary predicate is only semi-decidable, so probe
//! verdicts are labeled: a structural description (a union of σ-components)
//! certifies its verdict, everything else is evidence from randomized
//! single-coordinate mutations.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::Rng;

use crate::error::Result;
use crate::sample::{random_direction, rng_from_seed};
use crate::space::{Ambient, BoxNeighborhood, SparsePoint};

/// Structural tag of a set description.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredicateTag {
    BallProductUnion,
    ComponentUnion,
    BlackBox,
}

type MembershipFn = dyn Fn(&Ambient, &SparsePoint) -> bool + Send + Sync;

/// An evaluable membership test with a structural description tag and
/// optional component representatives (used by the density constructor).
#[derive(Clone)]
pub struct SetPredicate {
    pub tag: PredicateTag,
    members: Arc<MembershipFn>,
    pub representatives: Vec<SparsePoint>,
}

impl SetPredicate {
    pub fn new(
        tag: PredicateTag,
        members: impl Fn(&Ambient, &SparsePoint) -> bool + Send + Sync + 'static,
    ) -> Self {
        SetPredicate {
            tag,
            members: Arc::new(members),
            representatives: Vec::new(),
        }
    }

    pub fn with_representatives(mut self, reps: Vec<SparsePoint>) -> Self {
        self.representatives = reps;
        self
    }

    /// The union of the σ-components of the given representatives.
    pub fn component_union(reps: Vec<SparsePoint>) -> Self {
        let anchors: Vec<_> = reps.iter().map(|r| r.anchor).collect();
        SetPredicate::new(PredicateTag::ComponentUnion, move |_amb, x| {
            anchors.contains(&x.anchor)
        })
        .with_representatives(reps)
    }

    /// Membership in a τ-box, as a predicate.
    pub fn from_box(bx: BoxNeighborhood) -> Self {
        SetPredicate::new(PredicateTag::BlackBox, move |amb, x| {
            amb.box_contains(&bx, x).unwrap_or(false)
        })
    }

    pub fn contains(&self, amb: &Ambient, x: &SparsePoint) -> bool {
        (self.members)(amb, x)
    }

    pub fn negation(&self) -> SetPredicate {
        let inner = Arc::clone(&self.members);
        SetPredicate {
            tag: PredicateTag::BlackBox,
            members: Arc::new(move |amb, x| !(inner)(amb, x)),
            representatives: Vec::new(),
        }
    }
}

impl std::fmt::Debug for SetPredicate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SetPredicate")
            .field("tag", &self.tag)
            .field("representatives", &self.representatives.len())
            .finish()
    }
}

/// Parameters of randomized σ₁ probing.
#[derive(Debug, Clone)]
pub struct MutationProbe {
    pub seed: u64,
    pub per_point_mutations: usize,
    pub magnitudes: Vec<f64>,
}

impl Default for MutationProbe {
    fn default() -> Self {
        MutationProbe {
            seed: 0,
            per_point_mutations: 8,
            magnitudes: vec![1e-3, 1e-1, 1.0, 10.0, 1e3],
        }
    }
}

impl MutationProbe {
    pub fn with_seed(seed: u64) -> Self {
        MutationProbe {
            seed,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certainty {
    Certified,
    Evidence,
}

/// Outcome of a randomized probe. PASS is evidence, not proof, unless the
/// predicate's structure certifies it.
#[derive(Debug, Clone)]
pub enum ProbeVerdict {
    Pass(Certainty),
    Counterexample {
        member: SparsePoint,
        mutant: SparsePoint,
    },
}

impl ProbeVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, ProbeVerdict::Pass(_))
    }
}

/// Single-coordinate mutations of `x`: override one index, inside and
/// outside the current support, at each probe magnitude.
fn mutations(
    amb: &Ambient,
    x: &SparsePoint,
    probe: &MutationProbe,
    salt: u64,
) -> Result<Vec<SparsePoint>> {
    let mut rng = rng_from_seed(probe.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let support: Vec<usize> = x.support().collect();
    let mut out = Vec::new();
    for k in 0..probe.per_point_mutations {
        let idx = if k % 2 == 0 && !support.is_empty() {
            support[rng.gen_range(0..support.len())]
        } else {
            x.max_support() + 1 + rng.gen_range(0..8usize)
        };
        let space = amb.family.space_at(idx);
        let dir = random_direction(&mut rng, space);
        for &mag in &probe.magnitudes {
            let base = amb.coordinate(x, idx)?;
            out.push(amb.with_coordinate(x, idx, base.add(&dir.scale(mag)))?);
        }
    }
    Ok(out)
}

/// Probe 𝒮-openness: every single-coordinate mutation of a member must be
/// a member.
pub fn s_open_probe(
    amb: &Ambient,
    a: &SetPredicate,
    sample: &[SparsePoint],
    probe: &MutationProbe,
) -> Result<ProbeVerdict> {
    for (i, x) in sample.iter().enumerate() {
        if !a.contains(amb, x) {
            continue;
        }
        for y in mutations(amb, x, probe, i as u64)? {
            if !a.contains(amb, &y) {
                return Ok(ProbeVerdict::Counterexample {
                    member: x.clone(),
                    mutant: y,
                });
            }
        }
    }
    let certainty = if a.tag == PredicateTag::ComponentUnion {
        Certainty::Certified
    } else {
        Certainty::Evidence
    };
    Ok(ProbeVerdict::Pass(certainty))
}

/// Verdict of probing a set and its complement together: 𝒮-open sets have
/// 𝒮-open complements, so the two probes must agree.
#[derive(Debug, Clone)]
pub enum ClosureVerdict {
    Pass(Certainty),
    Inconsistent {
        set: ProbeVerdict,
        complement: ProbeVerdict,
    },
}

impl ClosureVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, ClosureVerdict::Pass(_))
    }
}

pub fn complement_closure_check(
    amb: &Ambient,
    a: &SetPredicate,
    sample: &[SparsePoint],
    probe: &MutationProbe,
) -> Result<ClosureVerdict> {
    let direct = s_open_probe(amb, a, sample, probe)?;
    let complement = s_open_probe(amb, &a.negation(), sample, probe)?;
    match (&direct, &complement) {
        (ProbeVerdict::Pass(c), ProbeVerdict::Pass(_)) => Ok(ClosureVerdict::Pass(*c)),
        (ProbeVerdict::Counterexample { .. }, ProbeVerdict::Counterexample { .. }) => {
            Ok(ClosureVerdict::Pass(Certainty::Evidence))
        }
        _ => Ok(ClosureVerdict::Inconsistent {
            set: direct,
            complement,
        }),
    }
}

/// Group points by σ-component. Groups are disjoint and exhaustive.
pub fn component_partition(amb: &Ambient, points: &[SparsePoint]) -> Vec<Vec<SparsePoint>> {
    let mut groups: Vec<Vec<SparsePoint>> = Vec::new();
    for p in points {
        match groups
            .iter_mut()
            .find(|g| amb.same_component(&g[0], p))
        {
            Some(g) => g.push(p.clone()),
            None => groups.push(vec![p.clone()]),
        }
    }
    groups
}

/// Check `x_t^a ∈ A` for sampled members `x` and sampled indices `t`.
pub fn projective_symmetry_check(
    amb: &Ambient,
    a_set: &SetPredicate,
    a: &SparsePoint,
    sample: &[SparsePoint],
    probe: &MutationProbe,
) -> Result<ProbeVerdict> {
    let mut rng = rng_from_seed(probe.seed);
    for x in sample {
        if !a_set.contains(amb, x) {
            continue;
        }
        let mut indices: BTreeSet<usize> = x.support().chain(a.support()).collect();
        for _ in 0..probe.per_point_mutations {
            indices.insert(rng.gen_range(1..=x.max_support().max(4) + 4));
        }
        for t in indices {
            let y = amb.splice_one(x, t, a)?;
            if !a_set.contains(amb, &y) {
                return Ok(ProbeVerdict::Counterexample {
                    member: x.clone(),
                    mutant: y,
                });
            }
        }
    }
    Ok(ProbeVerdict::Pass(Certainty::Evidence))
}

/// Result of the coordinated-topology limit check at one index.
#[derive(Debug, Clone)]
pub enum CoordinatedVerdict {
    Pass { delta: f64 },
    Fail,
}

/// Find δ > 0 on the grid such that perturbing only coordinate `t` of `a`
/// within δ keeps the spliced point inside the target box. For Tychonoff
/// boxes the analytic answer is the box radius at `t` (or any δ when `t` is
/// unconstrained).
pub fn coordinated_limit_check(
    amb: &Ambient,
    a: &SparsePoint,
    t: usize,
    target: &BoxNeighborhood,
    radius_grid: &[f64],
    seed: u64,
) -> Result<CoordinatedVerdict> {
    let mut rng = rng_from_seed(seed);
    let space = amb.family.space_at(t);
    let at = amb.coordinate(a, t)?;
    let mut grid: Vec<f64> = radius_grid.to_vec();
    grid.sort_by(|x, y| y.partial_cmp(x).unwrap());
    'delta: for &delta in &grid {
        for _ in 0..32 {
            let dir = random_direction(&mut rng, space);
            let mag: f64 = rng.gen_range(0.0..delta * 0.999);
            let y = amb.with_coordinate(a, t, at.add(&dir.scale(mag)))?;
            if !amb.box_contains(target, &y)? {
                continue 'delta;
            }
        }
        return Ok(CoordinatedVerdict::Pass { delta });
    }
    Ok(CoordinatedVerdict::Fail)
}

/// Density constructor (a testable restatement of "𝒮-open sets are dense"):
/// given a nonempty component union and a τ-box, splice a representative's
/// constrained coordinates to the box center. The result lies in both sets.
pub fn component_point_in_box(
    amb: &Ambient,
    a: &SetPredicate,
    bx: &BoxNeighborhood,
) -> Result<Option<SparsePoint>> {
    for rep in &a.representatives {
        let y = amb.splice(rep, &bx.constrained_indices(), &bx.center)?;
        if a.contains(amb, &y) && amb.box_contains(bx, &y)? {
            return Ok(Some(y));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{CoordSpace, CoordVector, NormKind, SpaceFamily, ZERO_ANCHOR};
    use std::collections::BTreeMap;

    fn line_two_anchors() -> Ambient {
        let mut amb = Ambient::new(SpaceFamily::uniform(CoordSpace::new(1, NormKind::L2)));
        amb.add_anchor(
            "a",
            [(1usize, CoordVector(vec![9.0]))].into_iter().collect(),
        )
        .unwrap();
        amb
    }

    fn pt(amb: &Ambient, pairs: &[(usize, f64)]) -> SparsePoint {
        let overrides: BTreeMap<usize, CoordVector> = pairs
            .iter()
            .map(|&(n, v)| (n, CoordVector(vec![v])))
            .collect();
        amb.point(ZERO_ANCHOR, overrides).unwrap()
    }

    #[test]
    fn component_predicate_is_s_open() {
        let amb = line_two_anchors();
        let x0 = amb.base_point(ZERO_ANCHOR).unwrap();
        let a = SetPredicate::component_union(vec![x0.clone()]);
        let sample = vec![x0, pt(&amb, &[(2, 1.0)]), pt(&amb, &[(5, -3.0)])];
        let v = s_open_probe(&amb, &a, &sample, &MutationProbe::with_seed(1)).unwrap();
        assert!(matches!(v, ProbeVerdict::Pass(Certainty::Certified)));
        let c = complement_closure_check(&amb, &a, &sample, &MutationProbe::with_seed(1)).unwrap();
        assert!(c.passed());
    }

    #[test]
    fn coordinate_ball_is_not_s_open() {
        let amb = line_two_anchors();
        let a = SetPredicate::new(PredicateTag::BlackBox, |amb: &Ambient, x: &SparsePoint| {
            let v = amb.coordinate(x, 1).unwrap();
            amb.family.space_at(1).norm(&v) < 1.0
        });
        // one member and one complement member near the boundary so both
        // probes can find escapes
        let sample = vec![pt(&amb, &[]), pt(&amb, &[(1, 1.5)])];
        let v = s_open_probe(&amb, &a, &sample, &MutationProbe::with_seed(2)).unwrap();
        assert!(matches!(v, ProbeVerdict::Counterexample { .. }));
        // ... and both directions fail consistently
        let c = complement_closure_check(&amb, &a, &sample, &MutationProbe::with_seed(2)).unwrap();
        assert!(c.passed());
    }

    #[test]
    fn empty_and_whole_space_pass() {
        let amb = line_two_anchors();
        let empty = SetPredicate::new(PredicateTag::BlackBox, |_: &Ambient, _: &SparsePoint| false);
        let whole = SetPredicate::new(PredicateTag::BlackBox, |_: &Ambient, _: &SparsePoint| true);
        let sample = vec![pt(&amb, &[]), pt(&amb, &[(3, 2.0)])];
        assert!(s_open_probe(&amb, &empty, &sample, &MutationProbe::with_seed(3))
            .unwrap()
            .passed());
        assert!(s_open_probe(&amb, &whole, &sample, &MutationProbe::with_seed(3))
            .unwrap()
            .passed());
    }

    #[test]
    fn partition_groups_by_anchor() {
        let amb = line_two_anchors();
        let a = amb.anchor_by_name("a").unwrap();
        let pts = vec![
            pt(&amb, &[]),
            pt(&amb, &[(1, 1.0)]),
            pt(&amb, &[(2, 1.0)]),
            amb.base_point(a).unwrap(),
            amb.point(a, [(3, CoordVector(vec![1.0]))].into_iter().collect())
                .unwrap(),
        ];
        let groups = component_partition(&amb, &pts);
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].len(), 3);
        assert_eq!(groups[1].len(), 2);
        assert!(component_partition(&amb, &[]).is_empty());
    }

    #[test]
    fn boxes_are_projectively_symmetric_about_their_center() {
        let amb = line_two_anchors();
        let center = pt(&amb, &[(1, 0.3)]);
        let bx = BoxNeighborhood::new(
            center.clone(),
            [(1usize, 1.0f64), (2usize, 0.5f64)].into_iter().collect(),
        )
        .unwrap();
        let a = SetPredicate::from_box(bx.clone());
        let sample = vec![pt(&amb, &[(1, 0.5), (2, 0.2), (7, 100.0)]), center.clone()];
        let v =
            projective_symmetry_check(&amb, &a, &center, &sample, &MutationProbe::with_seed(4))
                .unwrap();
        assert!(v.passed());
    }

    #[test]
    fn unit_sphere_sum_set_is_not_projectively_symmetric() {
        let amb = line_two_anchors();
        let a = SetPredicate::new(PredicateTag::BlackBox, |amb: &Ambient, x: &SparsePoint| {
            let n1 = amb
                .family
                .space_at(1)
                .norm(&amb.coordinate(x, 1).unwrap());
            let n2 = amb
                .family
                .space_at(2)
                .norm(&amb.coordinate(x, 2).unwrap());
            (n1 + n2 - 1.0).abs() < 1e-12
        });
        let origin = pt(&amb, &[]);
        let member = pt(&amb, &[(1, 1.0)]);
        let v = projective_symmetry_check(
            &amb,
            &a,
            &origin,
            &[member],
            &MutationProbe::with_seed(5),
        )
        .unwrap();
        assert!(matches!(v, ProbeVerdict::Counterexample { .. }));
    }

    #[test]
    fn coordinated_limit_finds_box_radius() {
        let amb = line_two_anchors();
        let a = pt(&amb, &[]);
        let grid = [1.0, 0.5, 0.3, 0.1];
        // box constrains only t with radius 0.3
        let bx = BoxNeighborhood::new(a.clone(), [(1usize, 0.3f64)].into_iter().collect()).unwrap();
        match coordinated_limit_check(&amb, &a, 1, &bx, &grid, 7).unwrap() {
            CoordinatedVerdict::Pass { delta } => assert_eq!(delta, 0.3),
            CoordinatedVerdict::Fail => panic!("expected pass"),
        }
        // box constrains a different index: any δ works
        let bx2 = BoxNeighborhood::new(a.clone(), [(2usize, 0.1f64)].into_iter().collect()).unwrap();
        match coordinated_limit_check(&amb, &a, 1, &bx2, &grid, 7).unwrap() {
            CoordinatedVerdict::Pass { delta } => assert_eq!(delta, 1.0),
            CoordinatedVerdict::Fail => panic!("expected pass"),
        }
        // box constrains t (0.3) and index 2 (1.0): δ = 0.3
        let bx3 = BoxNeighborhood::new(
            a.clone(),
            [(1usize, 0.3f64), (2usize, 1.0f64)].into_iter().collect(),
        )
        .unwrap();
        match coordinated_limit_check(&amb, &a, 1, &bx3, &grid, 7).unwrap() {
            CoordinatedVerdict::Pass { delta } => assert_eq!(delta, 0.3),
            CoordinatedVerdict::Fail => panic!("expected pass"),
        }
    }

    #[test]
    fn density_constructor_succeeds() {
        let amb = line_two_anchors();
        let a_id = amb.anchor_by_name("a").unwrap();
        let rep = amb.base_point(a_id).unwrap();
        let a = SetPredicate::component_union(vec![rep]);
        let bx = BoxNeighborhood::new(
            pt(&amb, &[(1, 5.0)]),
            [(1usize, 0.25f64), (3usize, 0.25f64)].into_iter().collect(),
        )
        .unwrap();
        let y = component_point_in_box(&amb, &a, &bx).unwrap().unwrap();
        assert!(a.contains(&amb, &y));
        assert!(amb.box_contains(&bx, &y).unwrap());
    }
}
