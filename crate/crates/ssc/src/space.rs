//! Sparse points of σ-products, splices, σ-components, and product metrics.
//!
//! Points are stored as an anchor label plus a finite coordinate-override
//! map; two points see the same σ-component exactly when they share an
//! anchor. Coordinate indices are 1-based throughout, matching the usual
//! `σ_n`, `d_n` conventions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Norm evaluated coordinate-wise on each factor space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    L1,
    L2,
    Linf,
}

/// One factor space: a finite-dimensional normed space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordSpace {
    pub dim: usize,
    #[serde(alias = "norm")]
    pub norm_kind: NormKind,
}

impl CoordSpace {
    pub fn new(dim: usize, norm_kind: NormKind) -> Self {
        assert!(dim >= 1, "coordinate spaces have dimension >= 1");
        CoordSpace { dim, norm_kind }
    }

    pub fn zero(&self) -> CoordVector {
        CoordVector(vec![0.0; self.dim])
    }

    pub fn norm(&self, v: &CoordVector) -> f64 {
        assert_eq!(v.dim(), self.dim, "coordinate vector dimension mismatch");
        match self.norm_kind {
            NormKind::L1 => v.0.iter().map(|x| x.abs()).sum(),
            NormKind::L2 => v.0.iter().map(|x| x * x).sum::<f64>().sqrt(),
            NormKind::Linf => v.0.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    pub fn dist(&self, a: &CoordVector, b: &CoordVector) -> f64 {
        self.norm(&a.sub(b))
    }

    /// Distance from `v` to the unit sphere `{x : ‖x‖ = 1}`.
    ///
    /// For any norm this is `|‖v‖ − 1|`: the segment from `v` toward (or away
    /// from) `v/‖v‖` realizes it. The closed form is cross-validated against
    /// a sphere-sampling oracle in the test suite.
    pub fn dist_to_unit_sphere(&self, v: &CoordVector) -> f64 {
        (self.norm(v) - 1.0).abs()
    }

    /// First standard basis vector; has norm 1 for every [`NormKind`].
    pub fn unit(&self) -> CoordVector {
        let mut e = vec![0.0; self.dim];
        e[0] = 1.0;
        CoordVector(e)
    }
}

/// The countable product structure: finitely many explicit factors followed
/// by a repeated tail factor, so every index `n >= 1` resolves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceFamily {
    pub prefix: Vec<CoordSpace>,
    pub tail: CoordSpace,
}

impl SpaceFamily {
    pub fn uniform(space: CoordSpace) -> Self {
        SpaceFamily {
            prefix: Vec::new(),
            tail: space,
        }
    }

    /// Descriptor for coordinate `n` (1-based).
    pub fn space_at(&self, n: usize) -> &CoordSpace {
        assert!(n >= 1, "coordinate indices are 1-based");
        self.prefix.get(n - 1).unwrap_or(&self.tail)
    }
}

/// A vector in one factor space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoordVector(pub Vec<f64>);

impl CoordVector {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn sub(&self, other: &CoordVector) -> CoordVector {
        assert_eq!(self.dim(), other.dim());
        CoordVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &CoordVector) -> CoordVector {
        assert_eq!(self.dim(), other.dim());
        CoordVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, s: f64) -> CoordVector {
        CoordVector(self.0.iter().map(|a| a * s).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| *x == 0.0)
    }
}

impl fmt::Display for CoordVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Opaque σ-component label. Anchor 0 is always the zero anchor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AnchorId(pub usize);

pub const ZERO_ANCHOR: AnchorId = AnchorId(0);

/// A base point: finitely many nonzero coordinate values over the all-zero
/// point. Distinct anchors model distinct σ-components by declaration.
#[derive(Debug, Clone)]
pub struct Anchor {
    pub name: String,
    values: BTreeMap<usize, CoordVector>,
}

impl Anchor {
    pub fn values(&self) -> &BTreeMap<usize, CoordVector> {
        &self.values
    }
}

/// A point of `σ(anchor)`: finite overrides on top of the anchor's values.
/// Canonical form stores no override equal to the anchor's coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsePoint {
    pub anchor: AnchorId,
    overrides: BTreeMap<usize, CoordVector>,
}

impl SparsePoint {
    pub fn overrides(&self) -> &BTreeMap<usize, CoordVector> {
        &self.overrides
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.overrides.keys().copied()
    }

    pub fn max_support(&self) -> usize {
        self.overrides.keys().next_back().copied().unwrap_or(0)
    }
}

/// A basic Tychonoff neighborhood: open balls around the center's
/// coordinates at finitely many indices.
#[derive(Debug, Clone)]
pub struct BoxNeighborhood {
    pub center: SparsePoint,
    pub constraints: BTreeMap<usize, f64>,
}

impl BoxNeighborhood {
    pub fn new(center: SparsePoint, constraints: BTreeMap<usize, f64>) -> Result<Self> {
        for (&n, &r) in &constraints {
            if n == 0 {
                return Err(Error::ZeroIndex);
            }
            if !(r > 0.0) {
                return Err(Error::RadiusNonpositive(r));
            }
        }
        Ok(BoxNeighborhood {
            center,
            constraints,
        })
    }

    pub fn whole_space(center: SparsePoint) -> Self {
        BoxNeighborhood {
            center,
            constraints: BTreeMap::new(),
        }
    }

    pub fn constrained_indices(&self) -> BTreeSet<usize> {
        self.constraints.keys().copied().collect()
    }

    pub fn max_constrained(&self) -> usize {
        self.constraints.keys().next_back().copied().unwrap_or(0)
    }
}

/// Number of coordinates at which two points differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Defect {
    Finite(usize),
    Infinite,
}

impl Defect {
    pub fn is_finite(&self) -> bool {
        matches!(self, Defect::Finite(_))
    }
}

/// The product together with its anchor table. All point operations live
/// here so that coordinate lookup is total.
#[derive(Debug, Clone)]
pub struct Ambient {
    pub family: SpaceFamily,
    anchors: Vec<Anchor>,
}

impl Ambient {
    /// New ambient product with only the zero anchor.
    pub fn new(family: SpaceFamily) -> Self {
        Ambient {
            family,
            anchors: vec![Anchor {
                name: "zero".to_string(),
                values: BTreeMap::new(),
            }],
        }
    }

    /// Register a new σ-component base point. Values equal to zero are
    /// dropped so the anchor is canonically finitely supported.
    pub fn add_anchor(
        &mut self,
        name: impl Into<String>,
        values: BTreeMap<usize, CoordVector>,
    ) -> Result<AnchorId> {
        let mut canon = BTreeMap::new();
        for (n, v) in values {
            if n == 0 {
                return Err(Error::ZeroIndex);
            }
            self.check_dim(n, &v)?;
            if !v.is_zero() {
                canon.insert(n, v);
            }
        }
        let id = AnchorId(self.anchors.len());
        self.anchors.push(Anchor {
            name: name.into(),
            values: canon,
        });
        Ok(id)
    }

    pub fn anchor(&self, id: AnchorId) -> Result<&Anchor> {
        self.anchors.get(id.0).ok_or(Error::UnknownAnchor(id.0))
    }

    pub fn anchor_ids(&self) -> impl Iterator<Item = AnchorId> {
        (0..self.anchors.len()).map(AnchorId)
    }

    pub fn anchor_by_name(&self, name: &str) -> Option<AnchorId> {
        self.anchors
            .iter()
            .position(|a| a.name == name)
            .map(AnchorId)
    }

    fn check_dim(&self, n: usize, v: &CoordVector) -> Result<()> {
        let expected = self.family.space_at(n).dim;
        if v.dim() != expected {
            return Err(Error::DimensionMismatch {
                index: n,
                expected,
                got: v.dim(),
            });
        }
        if !v.is_finite() {
            return Err(Error::NonFinite(
                v.0.iter().copied().find(|x| !x.is_finite()).unwrap_or(f64::NAN),
            ));
        }
        Ok(())
    }

    /// Anchor coordinate at `n`; the zero vector where unlisted.
    pub fn anchor_coordinate(&self, id: AnchorId, n: usize) -> Result<CoordVector> {
        let anchor = self.anchor(id)?;
        Ok(anchor
            .values
            .get(&n)
            .cloned()
            .unwrap_or_else(|| self.family.space_at(n).zero()))
    }

    /// Canonical point constructor: validates dimensions and strips
    /// overrides that equal the anchor's value.
    pub fn point(
        &self,
        anchor: AnchorId,
        overrides: BTreeMap<usize, CoordVector>,
    ) -> Result<SparsePoint> {
        self.anchor(anchor)?;
        let mut canon = BTreeMap::new();
        for (n, v) in overrides {
            if n == 0 {
                return Err(Error::ZeroIndex);
            }
            self.check_dim(n, &v)?;
            if v != self.anchor_coordinate(anchor, n)? {
                canon.insert(n, v);
            }
        }
        Ok(SparsePoint {
            anchor,
            overrides: canon,
        })
    }

    pub fn base_point(&self, anchor: AnchorId) -> Result<SparsePoint> {
        self.point(anchor, BTreeMap::new())
    }

    /// Coordinate of `x` at `n`: the override if present, else the anchor.
    pub fn coordinate(&self, x: &SparsePoint, n: usize) -> Result<CoordVector> {
        assert!(n >= 1, "coordinate indices are 1-based");
        match x.overrides.get(&n) {
            Some(v) => Ok(v.clone()),
            None => self.anchor_coordinate(x.anchor, n),
        }
    }

    /// Replace coordinate `n` of `x` (canonicalizing).
    pub fn with_coordinate(&self, x: &SparsePoint, n: usize, v: CoordVector) -> Result<SparsePoint> {
        let mut overrides = x.overrides.clone();
        overrides.insert(n, v);
        self.point(x.anchor, overrides)
    }

    /// The splice `a_S^x`: coordinates of `x` on `S`, of `a` elsewhere.
    /// The result lives in `a`'s component.
    pub fn splice(
        &self,
        a: &SparsePoint,
        s: &BTreeSet<usize>,
        x: &SparsePoint,
    ) -> Result<SparsePoint> {
        let mut overrides = a.overrides.clone();
        for &t in s {
            if t == 0 {
                return Err(Error::ZeroIndex);
            }
            overrides.insert(t, self.coordinate(x, t)?);
        }
        self.point(a.anchor, overrides)
    }

    /// Single-index splice `a_t^x`.
    pub fn splice_one(&self, a: &SparsePoint, t: usize, x: &SparsePoint) -> Result<SparsePoint> {
        let s: BTreeSet<usize> = [t].into_iter().collect();
        self.splice(a, &s, x)
    }

    /// Number of coordinates at which `x` and `y` differ. Points of
    /// distinct anchors differ in infinitely many coordinates by the
    /// modeling convention.
    pub fn defect(&self, x: &SparsePoint, y: &SparsePoint) -> Defect {
        if x.anchor != y.anchor {
            return Defect::Infinite;
        }
        // Canonical form over a shared anchor: coordinates differ exactly
        // where the override maps disagree.
        let mut count = 0;
        let keys: BTreeSet<usize> = x.support().chain(y.support()).collect();
        for n in keys {
            if x.overrides.get(&n) != y.overrides.get(&n) {
                count += 1;
            }
        }
        Defect::Finite(count)
    }

    pub fn same_component(&self, x: &SparsePoint, y: &SparsePoint) -> bool {
        self.defect(x, y).is_finite()
    }

    pub fn in_sigma_n(&self, x: &SparsePoint, y: &SparsePoint, n: usize) -> bool {
        match self.defect(x, y) {
            Defect::Finite(d) => d <= n,
            Defect::Infinite => false,
        }
    }

    /// `d_n(x, y) = max_{1≤i≤n} ‖x_i − y_i‖_i`.
    pub fn dist_d_n(&self, x: &SparsePoint, y: &SparsePoint, n: usize) -> Result<f64> {
        assert!(n >= 1);
        let mut m = 0.0f64;
        for i in 1..=n {
            let xi = self.coordinate(x, i)?;
            let yi = self.coordinate(y, i)?;
            m = m.max(self.family.space_at(i).dist(&xi, &yi));
        }
        Ok(m)
    }

    /// Open-ball membership at every constrained index. Points of any
    /// anchor may qualify: a τ-box constrains only finitely many
    /// coordinates.
    pub fn box_contains(&self, u: &BoxNeighborhood, x: &SparsePoint) -> Result<bool> {
        for (&n, &r) in &u.constraints {
            let cn = self.coordinate(&u.center, n)?;
            let xn = self.coordinate(x, n)?;
            if self.family.space_at(n).dist(&cn, &xn) >= r {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
