//! Shapes, intersection predicates, and the deterministic object order shared
//! by every structure in this crate.
//!
//! All shapes are closed: touching boundaries count as intersecting. The
//! object order (enclosing-cube size, then center lexicographically, then id)
//! is a strict total order on valid objects and replaces general-position
//! assumptions everywhere ties would otherwise be ambiguous.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Highest supported dimension. Fixed-size storage keeps objects `Copy`.
pub const MAX_DIM: usize = 4;

/// A point in 1 to 4 dimensions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    coords: [f64; MAX_DIM],
    dim: u8,
}

impl Point {
    pub fn new(coords: &[f64]) -> Result<Self> {
        if coords.is_empty() || coords.len() > MAX_DIM {
            return Err(Error::InvalidGeometry(format!(
                "point dimension {} outside 1..={MAX_DIM}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidGeometry("non-finite coordinate".into()));
        }
        let mut buf = [0.0; MAX_DIM];
        buf[..coords.len()].copy_from_slice(coords);
        Ok(Point {
            coords: buf,
            dim: coords.len() as u8,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim as usize]
    }

    /// Raw fixed-width storage; slots past `dim()` are zero.
    pub(crate) fn raw(&self) -> &[f64; MAX_DIM] {
        &self.coords
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        Point::new(&v).map_err(serde::de::Error::custom)
    }
}

/// Geometric payload of an object.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum Shape {
    Rect { lo: Point, hi: Point },
    Ball { center: Point, radius: f64 },
}

/// An identified geometric object. Construct through [`FatObject::rect`] or
/// [`FatObject::ball`] so the shape invariants (finite coordinates, positive
/// size, matching dimensions) hold for every live value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FatObjectWire")]
pub struct FatObject {
    id: u64,
    #[serde(flatten)]
    shape: Shape,
}

#[derive(Deserialize)]
struct FatObjectWire {
    id: u64,
    #[serde(flatten)]
    shape: Shape,
}

impl TryFrom<FatObjectWire> for FatObject {
    type Error = Error;

    fn try_from(w: FatObjectWire) -> Result<Self> {
        match w.shape {
            Shape::Rect { lo, hi } => {
                FatObject::rect(w.id, lo.coords(), hi.coords())
            }
            Shape::Ball { center, radius } => {
                FatObject::ball(w.id, center.coords(), radius)
            }
        }
    }
}

impl FatObject {
    /// Axis-aligned closed box `[lo, hi]`. Every extent must be nonnegative
    /// and at least one must be positive.
    pub fn rect(id: u64, lo: &[f64], hi: &[f64]) -> Result<Self> {
        let lo = Point::new(lo)?;
        let hi = Point::new(hi)?;
        if lo.dim() != hi.dim() {
            return Err(Error::DimensionMismatch {
                left: lo.dim(),
                right: hi.dim(),
            });
        }
        let mut max_extent = 0.0f64;
        for k in 0..lo.dim() {
            let extent = hi.coords()[k] - lo.coords()[k];
            if extent < 0.0 {
                return Err(Error::InvalidGeometry(format!(
                    "rect {id} has hi < lo on axis {k}"
                )));
            }
            max_extent = max_extent.max(extent);
        }
        if max_extent <= 0.0 {
            return Err(Error::InvalidGeometry(format!("rect {id} has zero size")));
        }
        Ok(FatObject {
            id,
            shape: Shape::Rect { lo, hi },
        })
    }

    /// Closed ball with positive radius.
    pub fn ball(id: u64, center: &[f64], radius: f64) -> Result<Self> {
        let center = Point::new(center)?;
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::InvalidGeometry(format!(
                "ball {id} has non-positive radius {radius}"
            )));
        }
        Ok(FatObject {
            id,
            shape: Shape::Ball { center, radius },
        })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dimension(&self) -> usize {
        match &self.shape {
            Shape::Rect { lo, .. } => lo.dim(),
            Shape::Ball { center, .. } => center.dim(),
        }
    }

    /// Center and side length of the minimal enclosing axis-aligned hypercube.
    pub fn enclosing_cube(&self) -> EnclosingCube {
        match &self.shape {
            Shape::Rect { lo, hi } => {
                let d = lo.dim();
                let mut center = [0.0; MAX_DIM];
                let mut size = 0.0f64;
                for (k, c) in center.iter_mut().enumerate().take(d) {
                    *c = 0.5 * (lo.coords()[k] + hi.coords()[k]);
                    size = size.max(hi.coords()[k] - lo.coords()[k]);
                }
                EnclosingCube {
                    center: Point {
                        coords: center,
                        dim: d as u8,
                    },
                    size,
                }
            }
            Shape::Ball { center, radius } => EnclosingCube {
                center: *center,
                size: 2.0 * radius,
            },
        }
    }

    /// Closed-shape intersection test. Errors on a dimension mismatch.
    pub fn intersects(&self, other: &FatObject) -> Result<bool> {
        if self.dimension() != other.dimension() {
            return Err(Error::DimensionMismatch {
                left: self.dimension(),
                right: other.dimension(),
            });
        }
        Ok(self.intersects_unchecked(other))
    }

    /// Same as [`intersects`](Self::intersects) for objects already known to
    /// share a dimension.
    pub fn intersects_unchecked(&self, other: &FatObject) -> bool {
        debug_assert_eq!(self.dimension(), other.dimension());
        match (&self.shape, &other.shape) {
            (Shape::Rect { lo: alo, hi: ahi }, Shape::Rect { lo: blo, hi: bhi }) => {
                rects_intersect(alo.coords(), ahi.coords(), blo.coords(), bhi.coords())
            }
            (Shape::Ball { center: ac, radius: ar }, Shape::Ball { center: bc, radius: br }) => {
                let r = ar + br;
                dist2(ac.coords(), bc.coords()) <= r * r
            }
            (Shape::Rect { lo, hi }, Shape::Ball { center, radius })
            | (Shape::Ball { center, radius }, Shape::Rect { lo, hi }) => {
                rect_ball_intersect(lo.coords(), hi.coords(), center.coords(), *radius)
            }
        }
    }

    /// Relation of this object to a closed hypercube: contained, disjoint, or
    /// crossing the boundary.
    pub fn classify_vs_cube(&self, cube: &EnclosingCube) -> CubeRelation {
        debug_assert_eq!(self.dimension(), cube.center.dim());
        match &self.shape {
            Shape::Rect { lo, hi } => {
                let mut inside = true;
                for k in 0..lo.dim() {
                    let (clo, chi) = (cube.lo(k), cube.hi(k));
                    if hi.coords()[k] < clo || lo.coords()[k] > chi {
                        return CubeRelation::Outside;
                    }
                    inside &= lo.coords()[k] >= clo && hi.coords()[k] <= chi;
                }
                if inside {
                    CubeRelation::Inside
                } else {
                    CubeRelation::Crossing
                }
            }
            Shape::Ball { center, radius } => {
                let mut inside = true;
                let mut d2 = 0.0;
                for k in 0..center.dim() {
                    let (clo, chi) = (cube.lo(k), cube.hi(k));
                    let c = center.coords()[k];
                    inside &= c - radius >= clo && c + radius <= chi;
                    let gap = c - c.clamp(clo, chi);
                    d2 += gap * gap;
                }
                if d2 > radius * radius {
                    CubeRelation::Outside
                } else if inside {
                    CubeRelation::Inside
                } else {
                    CubeRelation::Crossing
                }
            }
        }
    }

    /// Total order key of this object; see [`object_order`].
    pub fn order_key(&self) -> OrderKey {
        let cube = self.enclosing_cube();
        OrderKey {
            size: cube.size,
            center: *cube.center.raw(),
            id: self.id,
        }
    }
}

pub(crate) fn rects_intersect(alo: &[f64], ahi: &[f64], blo: &[f64], bhi: &[f64]) -> bool {
    alo.iter()
        .zip(ahi)
        .zip(blo.iter().zip(bhi))
        .all(|((al, ah), (bl, bh))| al <= bh && bl <= ah)
}

fn rect_ball_intersect(lo: &[f64], hi: &[f64], center: &[f64], radius: f64) -> bool {
    let mut d2 = 0.0;
    for k in 0..lo.len() {
        let gap = center[k] - center[k].clamp(lo[k], hi[k]);
        d2 += gap * gap;
    }
    d2 <= radius * radius
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Axis-aligned closed hypercube given by center and side length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnclosingCube {
    pub center: Point,
    pub size: f64,
}

impl EnclosingCube {
    pub fn new(center: Point, size: f64) -> Self {
        EnclosingCube { center, size }
    }

    pub fn lo(&self, k: usize) -> f64 {
        self.center.coords()[k] - 0.5 * self.size
    }

    pub fn hi(&self, k: usize) -> f64 {
        self.center.coords()[k] + 0.5 * self.size
    }

    /// Concentric cube with the side length scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        EnclosingCube {
            center: self.center,
            size: self.size * factor,
        }
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        debug_assert_eq!(self.center.dim(), p.dim());
        (0..p.dim()).all(|k| p.coords()[k] >= self.lo(k) && p.coords()[k] <= self.hi(k))
    }
}

/// How an object sits relative to a closed cube.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CubeRelation {
    Inside,
    Outside,
    Crossing,
}

/// Key realizing the object order: enclosing-cube size, then cube center
/// lexicographically, then id. Strictly total on objects with distinct ids.
#[derive(Clone, Copy, Debug)]
pub struct OrderKey {
    size: f64,
    center: [f64; MAX_DIM],
    id: u64,
}

impl OrderKey {
    pub fn id(&self) -> u64 {
        self.id
    }
}

impl Ord for OrderKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size
            .total_cmp(&other.size)
            .then_with(|| {
                self.center
                    .iter()
                    .zip(&other.center)
                    .map(|(a, b)| a.total_cmp(b))
                    .find(|o| *o != Ordering::Equal)
                    .unwrap_or(Ordering::Equal)
            })
            .then_with(|| self.id.cmp(&other.id))
    }
}

impl PartialOrd for OrderKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for OrderKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for OrderKey {}

/// The deterministic scan order used by every greedy pass and tie-break.
pub fn object_order(a: &FatObject, b: &FatObject) -> Ordering {
    a.order_key().cmp(&b.order_key())
}

/// Family of objects a structure stores. Determines the ambient dimension and
/// the fatness constant `f` (any size-`r` box meets at most `f` pairwise
/// disjoint objects of size at least `r`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeClass {
    /// Axis-aligned boxes in the plane; `f = 4`.
    Squares,
    /// Axis-aligned boxes in `d` dimensions, `1 <= d <= 4`; `f = 2^d`.
    Hypercubes(u8),
    /// Closed disks in the plane; `f = 5`.
    Disks,
}

impl ShapeClass {
    pub fn dimension(&self) -> usize {
        match self {
            ShapeClass::Squares | ShapeClass::Disks => 2,
            ShapeClass::Hypercubes(d) => *d as usize,
        }
    }

    pub fn fatness(&self) -> u32 {
        match self {
            ShapeClass::Squares => 4,
            ShapeClass::Hypercubes(d) => 1 << d,
            ShapeClass::Disks => 5,
        }
    }

    /// Approximation factor `1 / f` of the greedy independent set.
    pub fn beta(&self) -> f64 {
        1.0 / f64::from(self.fatness())
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ShapeClass::Hypercubes(d) if !(1..=MAX_DIM as u8).contains(d) => {
                Err(Error::InvalidGeometry(format!(
                    "hypercube dimension {d} outside 1..={MAX_DIM}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Whether an object has the shape kind and dimension of this class.
    pub fn accepts(&self, o: &FatObject) -> bool {
        if o.dimension() != self.dimension() {
            return false;
        }
        matches!(
            (self, o.shape()),
            (ShapeClass::Squares | ShapeClass::Hypercubes(_), Shape::Rect { .. })
                | (ShapeClass::Disks, Shape::Ball { .. })
        )
    }

    pub(crate) fn check(&self, o: &FatObject) -> Result<()> {
        if self.accepts(o) {
            Ok(())
        } else {
            Err(Error::ShapeClassMismatch {
                id: o.id(),
                class: self.to_string(),
            })
        }
    }
}

impl fmt::Display for ShapeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeClass::Squares => write!(f, "squares"),
            ShapeClass::Hypercubes(d) => write!(f, "hypercubes:{d}"),
            ShapeClass::Disks => write!(f, "disks"),
        }
    }
}

impl FromStr for ShapeClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let class = match s {
            "squares" => ShapeClass::Squares,
            "disks" => ShapeClass::Disks,
            _ => match s.strip_prefix("hypercubes:") {
                Some(d) => ShapeClass::Hypercubes(d.parse().map_err(|_| {
                    Error::InvalidGeometry(format!("bad hypercube dimension in {s:?}"))
                })?),
                None => {
                    return Err(Error::InvalidGeometry(format!(
                        "unknown shape class {s:?} (expected squares, hypercubes:D, disks)"
                    )))
                }
            },
        };
        class.validate()?;
        Ok(class)
    }
}
