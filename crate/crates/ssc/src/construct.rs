//! Evaluable functions on σ-products with a prescribed discontinuity set.
//!
//! The central construction takes a ball product
//! `W = (∏ B(w_n, r_n)) ∩ σ(a)`, rescales it onto the unit-ball product via
//! the coordinate-wise map `h(x)_n = (x_n − w_n)/r_n`, and measures the
//! distance from the first escape region to its complement in the `d_n`
//! metric. The resulting function is strongly separately continuous,
//! vanishes on `W`, and is discontinuous exactly on `W`. Finite unions of
//! ball products are handled by a geometrically weighted sum, and an
//! indicator of a σ-component gives the everywhere-discontinuous example.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::space::{Ambient, AnchorId, SparsePoint, ZERO_ANCHOR};

/// Positive radii: explicit prefix, then a constant tail value.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiiSeq {
    prefix: Vec<f64>,
    tail: f64,
}

impl RadiiSeq {
    pub fn new(prefix: Vec<f64>, tail: f64) -> Result<Self> {
        for &r in prefix.iter().chain(std::iter::once(&tail)) {
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::RadiusNonpositive(r));
            }
        }
        Ok(RadiiSeq { prefix, tail })
    }

    pub fn constant(r: f64) -> Result<Self> {
        Self::new(Vec::new(), r)
    }

    pub fn at(&self, n: usize) -> f64 {
        assert!(n >= 1);
        self.prefix.get(n - 1).copied().unwrap_or(self.tail)
    }

    pub fn prefix(&self) -> &[f64] {
        &self.prefix
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }
}

/// `W = (∏ B(w_n, r_n)) ∩ σ(a)`.
#[derive(Debug, Clone)]
pub struct BallProduct {
    pub anchor: AnchorId,
    pub center: SparsePoint,
    pub radii: RadiiSeq,
}

impl BallProduct {
    pub fn new(anchor: AnchorId, center: SparsePoint, radii: RadiiSeq) -> Result<Self> {
        if center.anchor != anchor {
            return Err(Error::AnchorMismatch {
                expected: anchor.0,
                got: center.anchor.0,
            });
        }
        Ok(BallProduct {
            anchor,
            center,
            radii,
        })
    }

    /// Membership in `W`. Off the supports of `x` and the center both agree
    /// with the anchor, so only finitely many indices need checking; a point
    /// of another anchor is outside `σ(a)` and hence outside `W`.
    pub fn contains(&self, amb: &Ambient, x: &SparsePoint) -> Result<bool> {
        if x.anchor != self.anchor {
            return Ok(false);
        }
        let idx: BTreeSet<usize> = x.support().chain(self.center.support()).collect();
        for n in idx {
            let xn = amb.coordinate(x, n)?;
            let wn = amb.coordinate(&self.center, n)?;
            if amb.family.space_at(n).dist(&xn, &wn) >= self.radii.at(n) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Position of a transformed point relative to the unit-ball product: inside
/// all open unit balls, or escaped at the least coordinate with norm ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionTag {
    Interior,
    Escape(usize),
}

/// `h(x)_n = (x_n − w_n)/r_n`, finitely supported over the zero anchor.
pub fn h_transform(amb: &Ambient, x: &SparsePoint, bp: &BallProduct) -> Result<SparsePoint> {
    if x.anchor != bp.anchor {
        return Err(Error::AnchorMismatch {
            expected: bp.anchor.0,
            got: x.anchor.0,
        });
    }
    let idx: BTreeSet<usize> = x.support().chain(bp.center.support()).collect();
    let mut overrides = BTreeMap::new();
    for n in idx {
        let xn = amb.coordinate(x, n)?;
        let wn = amb.coordinate(&bp.center, n)?;
        let z = xn.sub(&wn).scale(1.0 / bp.radii.at(n));
        overrides.insert(n, z);
    }
    amb.point(ZERO_ANCHOR, overrides)
}

/// Inverse of [`h_transform`]: `x_n = w_n + r_n · z_n` over `bp`'s anchor.
pub fn h_inverse(amb: &Ambient, z: &SparsePoint, bp: &BallProduct) -> Result<SparsePoint> {
    let idx: BTreeSet<usize> = z.support().chain(bp.center.support()).collect();
    let mut overrides = BTreeMap::new();
    for n in idx {
        let zn = amb.coordinate(z, n)?;
        let wn = amb.coordinate(&bp.center, n)?;
        overrides.insert(n, wn.add(&zn.scale(bp.radii.at(n))));
    }
    amb.point(bp.anchor, overrides)
}

/// Scan support indices in increasing order; off-support coordinates are
/// zero (norm 0 < 1) and can never be the escape index.
pub fn classify_region(amb: &Ambient, z: &SparsePoint) -> Result<RegionTag> {
    debug_assert_eq!(z.anchor, ZERO_ANCHOR);
    for n in z.support() {
        let zn = amb.coordinate(z, n)?;
        if amb.family.space_at(n).norm(&zn) >= 1.0 {
            return Ok(RegionTag::Escape(n));
        }
    }
    Ok(RegionTag::Interior)
}

/// The escape-distance function on the transformed space: for a point that
/// first leaves the unit-ball product at coordinate `n`, the distance (in
/// `d_n`) to the complement of the escape region, which collapses to
/// `min_{1≤i≤n} |‖z_i‖ − 1|`; zero on the interior.
pub fn evaluate_g(amb: &Ambient, z: &SparsePoint) -> Result<f64> {
    match classify_region(amb, z)? {
        RegionTag::Interior => Ok(0.0),
        RegionTag::Escape(n) => {
            let mut m = f64::INFINITY;
            let mut covered = 0usize;
            for i in z.support().take_while(|&i| i <= n) {
                let zi = amb.coordinate(z, i)?;
                m = m.min(amb.family.space_at(i).dist_to_unit_sphere(&zi));
                covered += 1;
            }
            if covered < n {
                // some coordinate below n is off-support, i.e. the zero
                // vector, at distance exactly 1 from the sphere
                m = m.min(1.0);
            }
            Ok(m)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgebraOp {
    Add,
    Sub,
    Mul,
    Abs,
    Min,
    Max,
}

/// Structural description of a claimed discontinuity set.
#[derive(Debug, Clone)]
pub enum ClaimedSet {
    /// Finite union of ball products over a common anchor.
    Balls(Vec<BallProduct>),
    /// The whole space (σ-component indicators are everywhere
    /// discontinuous).
    Everything,
    /// Nothing claimed.
    Unspecified,
}

#[derive(Debug, Clone)]
pub enum FunctionKind {
    /// Single ball product: `min(g(h(x)), 1)`.
    BallFunction(BallProduct),
    /// Finite union: `Σ_{m=1..M} 2^{−m} f_m(x)`.
    UnionFunction(Vec<BallProduct>),
    /// `inside` on the base point's σ-component, `outside` elsewhere.
    ComponentIndicator {
        base: SparsePoint,
        inside: f64,
        outside: f64,
    },
    /// Pointwise algebra of children.
    Algebra {
        op: AlgebraOp,
        children: Vec<ConstructedFunction>,
    },
    /// Finite weighted sum with a declared uniform tail bound.
    Series {
        weights: Vec<f64>,
        children: Vec<ConstructedFunction>,
        tail_bound: f64,
    },
    /// `‖x_t‖_t` — a continuous function of one coordinate (plumbing for
    /// checker calibration).
    CoordNorm { index: usize },
}

/// An evaluable function together with its claimed discontinuity set.
#[derive(Debug, Clone)]
pub struct ConstructedFunction {
    pub kind: FunctionKind,
    pub claimed_discontinuity: ClaimedSet,
}

/// `f(x) = min(g(h(x)), 1)` for a single ball product; range `[0, 1]`,
/// zero on `W`, discontinuous exactly on `W`.
pub fn build_ball_function(bp: BallProduct) -> ConstructedFunction {
    ConstructedFunction {
        claimed_discontinuity: ClaimedSet::Balls(vec![bp.clone()]),
        kind: FunctionKind::BallFunction(bp),
    }
}

/// Weighted sum `Σ 2^{−m} f_m` over a finite union of ball products; the
/// claimed discontinuity set is the union of the claims of the children.
pub fn build_union_function(balls: Vec<BallProduct>) -> Result<ConstructedFunction> {
    if balls.is_empty() {
        return Err(Error::EmptyUnion);
    }
    let anchor = balls[0].anchor;
    for bp in &balls {
        if bp.anchor != anchor {
            return Err(Error::AnchorMismatch {
                expected: anchor.0,
                got: bp.anchor.0,
            });
        }
    }
    Ok(ConstructedFunction {
        claimed_discontinuity: ClaimedSet::Balls(balls.clone()),
        kind: FunctionKind::UnionFunction(balls),
    })
}

pub fn build_component_indicator(
    base: SparsePoint,
    inside: f64,
    outside: f64,
) -> ConstructedFunction {
    ConstructedFunction {
        claimed_discontinuity: ClaimedSet::Everything,
        kind: FunctionKind::ComponentIndicator {
            base,
            inside,
            outside,
        },
    }
}

pub fn build_coord_norm(index: usize) -> ConstructedFunction {
    ConstructedFunction {
        claimed_discontinuity: ClaimedSet::Unspecified,
        kind: FunctionKind::CoordNorm { index },
    }
}

pub fn build_algebra(op: AlgebraOp, children: Vec<ConstructedFunction>) -> Result<ConstructedFunction> {
    let arity_ok = match op {
        AlgebraOp::Abs => children.len() == 1,
        _ => children.len() == 2,
    };
    if !arity_ok {
        return Err(Error::InvalidParameter(format!(
            "algebra op {op:?} got {} children",
            children.len()
        )));
    }
    Ok(ConstructedFunction {
        claimed_discontinuity: ClaimedSet::Unspecified,
        kind: FunctionKind::Algebra { op, children },
    })
}

pub fn build_series(
    weights: Vec<f64>,
    children: Vec<ConstructedFunction>,
    tail_bound: f64,
) -> Result<ConstructedFunction> {
    if weights.len() != children.len() {
        return Err(Error::InvalidParameter(
            "series weights and children lengths differ".into(),
        ));
    }
    Ok(ConstructedFunction {
        claimed_discontinuity: ClaimedSet::Unspecified,
        kind: FunctionKind::Series {
            weights,
            children,
            tail_bound,
        },
    })
}

/// Anything that can be evaluated at a sparse point.
pub trait Evaluable: Sync {
    fn eval(&self, amb: &Ambient, x: &SparsePoint) -> Result<f64>;
}

impl ConstructedFunction {
    /// The anchor this function is defined over, or `None` if it accepts
    /// points of any anchor.
    pub fn anchor(&self) -> Option<AnchorId> {
        match &self.kind {
            FunctionKind::BallFunction(bp) => Some(bp.anchor),
            FunctionKind::UnionFunction(balls) => balls.first().map(|b| b.anchor),
            FunctionKind::ComponentIndicator { .. } | FunctionKind::CoordNorm { .. } => None,
            FunctionKind::Algebra { children, .. } => {
                children.iter().find_map(|c| c.anchor())
            }
            FunctionKind::Series { children, .. } => children.iter().find_map(|c| c.anchor()),
        }
    }

    /// The ball products of a ball or union function.
    pub fn balls(&self) -> &[BallProduct] {
        match &self.kind {
            FunctionKind::BallFunction(bp) => std::slice::from_ref(bp),
            FunctionKind::UnionFunction(balls) => balls,
            _ => &[],
        }
    }

    pub fn evaluate(&self, amb: &Ambient, x: &SparsePoint) -> Result<f64> {
        match &self.kind {
            FunctionKind::BallFunction(bp) => {
                let z = h_transform(amb, x, bp)?;
                Ok(evaluate_g(amb, &z)?.min(1.0))
            }
            FunctionKind::UnionFunction(balls) => self.evaluate_union_partial(amb, x, balls.len()),
            FunctionKind::ComponentIndicator {
                base,
                inside,
                outside,
            } => {
                if amb.same_component(x, base) {
                    Ok(*inside)
                } else {
                    Ok(*outside)
                }
            }
            FunctionKind::Algebra { op, children } => {
                let a = children[0].evaluate(amb, x)?;
                match op {
                    AlgebraOp::Abs => Ok(a.abs()),
                    AlgebraOp::Add => Ok(a + children[1].evaluate(amb, x)?),
                    AlgebraOp::Sub => Ok(a - children[1].evaluate(amb, x)?),
                    AlgebraOp::Mul => Ok(a * children[1].evaluate(amb, x)?),
                    AlgebraOp::Min => Ok(a.min(children[1].evaluate(amb, x)?)),
                    AlgebraOp::Max => Ok(a.max(children[1].evaluate(amb, x)?)),
                }
            }
            FunctionKind::Series {
                weights, children, ..
            } => {
                let mut s = 0.0;
                for (w, c) in weights.iter().zip(children) {
                    s += w * c.evaluate(amb, x)?;
                }
                Ok(s)
            }
            FunctionKind::CoordNorm { index } => {
                let v = amb.coordinate(x, *index)?;
                Ok(amb.family.space_at(*index).norm(&v))
            }
        }
    }

    /// Partial sum `Σ_{m=1..m_max} 2^{−m} f_m(x)` of a union function.
    pub fn evaluate_union_partial(
        &self,
        amb: &Ambient,
        x: &SparsePoint,
        m_max: usize,
    ) -> Result<f64> {
        let balls = self.balls();
        let mut s = 0.0;
        for (i, bp) in balls.iter().take(m_max).enumerate() {
            let z = h_transform(amb, x, bp)?;
            let fm = evaluate_g(amb, &z)?.min(1.0);
            s += fm / 2f64.powi(i as i32 + 1);
        }
        Ok(s)
    }
}

impl Evaluable for ConstructedFunction {
    fn eval(&self, amb: &Ambient, x: &SparsePoint) -> Result<f64> {
        self.evaluate(amb, x)
    }
}

/// Wrap a closure as an [`Evaluable`] (test and probe plumbing).
pub struct FnEvaluable<F>(pub F);

impl<F> Evaluable for FnEvaluable<F>
where
    F: Fn(&Ambient, &SparsePoint) -> Result<f64> + Sync,
{
    fn eval(&self, amb: &Ambient, x: &SparsePoint) -> Result<f64> {
        self.0(amb, x)
    }
}
