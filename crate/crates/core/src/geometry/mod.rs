//! Planar segments and the crossing predicate used by the no-crossing-lines
//! propagators.

mod index;

pub use index::{SpatialIndex, DEFAULT_LEAF_CAPACITY};

use std::cmp::Ordering;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn of_segment(p: Point, q: Point) -> Self {
        Self {
            min: Point::new(p.x.min(q.x), p.y.min(q.y)),
            max: Point::new(p.x.max(q.x), p.y.max(q.y)),
        }
    }

    pub fn union(&self, other: &Rect) -> Rect {
        Rect {
            min: Point::new(self.min.x.min(other.min.x), self.min.y.min(other.min.y)),
            max: Point::new(self.max.x.max(other.max.x), self.max.y.max(other.max.y)),
        }
    }

    /// Closed-box intersection.
    pub fn intersects(&self, other: &Rect) -> bool {
        self.min.x <= other.max.x
            && other.min.x <= self.max.x
            && self.min.y <= other.max.y
            && other.min.y <= self.max.y
    }

    pub fn contains(&self, other: &Rect) -> bool {
        self.min.x <= other.min.x
            && self.min.y <= other.min.y
            && other.max.x <= self.max.x
            && other.max.y <= self.max.y
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn center(&self) -> Point {
        Point::new(
            (self.min.x + self.max.x) / 2.0,
            (self.min.y + self.max.y) / 2.0,
        )
    }
}

/// The segment between two cities, tagged with the edge it represents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub p: Point,
    pub q: Point,
    pub id: (usize, usize),
}

impl Segment {
    pub fn new(p: Point, q: Point, id: (usize, usize)) -> Self {
        Self { p, q, id }
    }

    pub fn bbox(&self) -> Rect {
        Rect::of_segment(self.p, self.q)
    }
}

/// Determinants with magnitude at or below this count as collinear. Integer
/// TSPLIB coordinates give exact determinants, so this only matters for
/// fractional input.
pub const ORIENTATION_EPS: f64 = 1e-9;

/// Sign of the turn `a → b → c`.
pub fn orientation(a: Point, b: Point, c: Point) -> Ordering {
    let det = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    if det > ORIENTATION_EPS {
        Ordering::Greater
    } else if det < -ORIENTATION_EPS {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

/// True iff the segments meet at a point interior to both.
///
/// Shared endpoints, an endpoint touching the other segment, and collinear
/// overlap are not crossings.
pub fn segments_cross(a: &Segment, b: &Segment) -> bool {
    let o1 = orientation(a.p, a.q, b.p);
    let o2 = orientation(a.p, a.q, b.q);
    let o3 = orientation(b.p, b.q, a.p);
    let o4 = orientation(b.p, b.q, a.q);
    let opposite = |x: Ordering, y: Ordering| {
        matches!(
            (x, y),
            (Ordering::Less, Ordering::Greater) | (Ordering::Greater, Ordering::Less)
        )
    };
    opposite(o1, o2) && opposite(o3, o4)
}
