//! Exact geometric primitives: points, segments and the predicates every
//! envelope routine is built on.
//!
//! Everything here is exact. Intersection tests use closed-segment
//! semantics; excluding particular contact points is the caller's business.

mod rational;

use std::cmp::Ordering;

use thiserror::Error;

pub use rational::{rational_parse, Rational, RationalParseError};

/// Identifier of an input segment, carried through to envelope edges.
pub type SourceId = usize;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(Rational::from_integer(x), Rational::from_integer(y))
    }

    pub fn translate(&self, dx: &Rational, dy: &Rational) -> Point {
        Point::new(&self.x + dx, &self.y + dy)
    }
}

/// Lexicographic: by `x`, then `y`.
impl Ord for Point {
    fn cmp(&self, other: &Self) -> Ordering {
        self.x.cmp(&other.x).then_with(|| self.y.cmp(&other.y))
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeomError {
    #[error("segment has zero length")]
    ZeroLength,
    #[error("segment is vertical")]
    Vertical,
    #[error("x = {x} lies outside the segment's span [{lo}, {hi}]")]
    OutOfSpan {
        x: Box<Rational>,
        lo: Box<Rational>,
        hi: Box<Rational>,
    },
}

/// A closed segment stored with `a < b` lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
    pub id: SourceId,
}

impl Segment {
    pub fn new(p: Point, q: Point, id: SourceId) -> Result<Self, GeomError> {
        match p.cmp(&q) {
            Ordering::Less => Ok(Segment { a: p, b: q, id }),
            Ordering::Greater => Ok(Segment { a: q, b: p, id }),
            Ordering::Equal => Err(GeomError::ZeroLength),
        }
    }

    pub fn is_vertical(&self) -> bool {
        self.a.x == self.b.x
    }

    /// `None` for vertical segments.
    pub fn slope(&self) -> Option<Rational> {
        slope_between(&self.a, &self.b)
    }

    pub fn translate(&self, dx: &Rational, dy: &Rational) -> Segment {
        Segment {
            a: self.a.translate(dx, dy),
            b: self.b.translate(dx, dy),
            id: self.id,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum IntersectionResult {
    None,
    Point(Point),
    /// Collinear contact of positive length, from `start` to `end` (`start < end`).
    Overlap {
        start: Point,
        end: Point,
    },
}

impl IntersectionResult {
    pub fn is_none(&self) -> bool {
        matches!(self, IntersectionResult::None)
    }

    /// True if the contact set contains a point other than `p`.
    pub fn touches_other_than(&self, p: &Point) -> bool {
        match self {
            IntersectionResult::None => false,
            IntersectionResult::Point(q) => q != p,
            IntersectionResult::Overlap { .. } => true,
        }
    }
}

pub(crate) fn slope_between(p: &Point, q: &Point) -> Option<Rational> {
    if p.x == q.x {
        None
    } else {
        Some((&q.y - &p.y) / (&q.x - &p.x))
    }
}

/// Sign of `(b - a) x (c - a)`: +1 counterclockwise, 0 collinear, -1 clockwise.
pub fn orientation(a: &Point, b: &Point, c: &Point) -> i8 {
    let lhs = (&b.x - &a.x) * (&c.y - &a.y);
    let rhs = (&b.y - &a.y) * (&c.x - &a.x);
    match lhs.cmp(&rhs) {
        Ordering::Greater => 1,
        Ordering::Equal => 0,
        Ordering::Less => -1,
    }
}

pub fn segment_intersection(s: &Segment, t: &Segment) -> IntersectionResult {
    intersect_closed(&s.a, &s.b, &t.a, &t.b)
}

fn ordered<'a>(p: &'a Point, q: &'a Point) -> (&'a Point, &'a Point) {
    if q < p {
        (q, p)
    } else {
        (p, q)
    }
}

/// Intersection of the closed segments `p1p2` and `q1q2`, in any orientation.
/// Degenerate (single point) inputs are not supported.
pub(crate) fn intersect_closed(
    p1: &Point,
    p2: &Point,
    q1: &Point,
    q2: &Point,
) -> IntersectionResult {
    let (p1, p2) = ordered(p1, p2);
    let (q1, q2) = ordered(q1, q2);

    // Cheap rejection on the bounding boxes.
    if p2.x < q1.x || q2.x < p1.x {
        return IntersectionResult::None;
    }
    let (plo, phi) = (p1.y.min_ref(&p2.y), p1.y.max_ref(&p2.y));
    let (qlo, qhi) = (q1.y.min_ref(&q2.y), q1.y.max_ref(&q2.y));
    if phi < qlo || qhi < plo {
        return IntersectionResult::None;
    }

    let o1 = orientation(p1, p2, q1);
    let o2 = orientation(p1, p2, q2);
    if o1 == o2 && o1 != 0 {
        return IntersectionResult::None;
    }
    if o1 == 0 && o2 == 0 {
        let lo = p1.max(q1);
        let hi = p2.min(q2);
        return match lo.cmp(hi) {
            Ordering::Less => IntersectionResult::Overlap {
                start: lo.clone(),
                end: hi.clone(),
            },
            Ordering::Equal => IntersectionResult::Point(lo.clone()),
            Ordering::Greater => IntersectionResult::None,
        };
    }
    let o3 = orientation(q1, q2, p1);
    let o4 = orientation(q1, q2, p2);
    if o3 == o4 && o3 != 0 {
        return IntersectionResult::None;
    }
    // The supporting lines meet in exactly one point, which lies on both.
    if o1 == 0 {
        return IntersectionResult::Point(q1.clone());
    }
    if o2 == 0 {
        return IntersectionResult::Point(q2.clone());
    }
    if o3 == 0 {
        return IntersectionResult::Point(p1.clone());
    }
    if o4 == 0 {
        return IntersectionResult::Point(p2.clone());
    }
    let (dx, dy) = (&p2.x - &p1.x, &p2.y - &p1.y);
    let (ex, ey) = (&q2.x - &q1.x, &q2.y - &q1.y);
    let denom = &dx * &ey - &dy * &ex;
    let numer = (&q1.x - &p1.x) * &ey - (&q1.y - &p1.y) * &ex;
    let t = numer / denom;
    IntersectionResult::Point(Point::new(&p1.x + &(&t * &dx), &p1.y + &(&t * &dy)))
}

/// Intersection of the upward vertical ray from `origin` with the closed segment `s`.
pub fn ray_up_intersection(origin: &Point, s: &Segment) -> IntersectionResult {
    ray_up_closed(origin, &s.a, &s.b)
}

pub(crate) fn ray_up_closed(origin: &Point, p: &Point, q: &Point) -> IntersectionResult {
    let (p, q) = ordered(p, q);
    if origin.x < p.x || origin.x > q.x {
        return IntersectionResult::None;
    }
    if p.x == q.x {
        // Vertical segment on the ray's line; p.y < q.y.
        if q.y < origin.y {
            return IntersectionResult::None;
        }
        let start = p.y.max_ref(&origin.y);
        return if *start == q.y {
            IntersectionResult::Point(q.clone())
        } else {
            IntersectionResult::Overlap {
                start: Point::new(origin.x.clone(), start.clone()),
                end: q.clone(),
            }
        };
    }
    let y = line_value(p, q, &origin.x);
    if y >= origin.y {
        IntersectionResult::Point(Point::new(origin.x.clone(), y))
    } else {
        IntersectionResult::None
    }
}

/// Orders segments by direction; vertical segments compare as slope +inf.
pub fn compare_slopes(s: &Segment, t: &Segment) -> Ordering {
    match (s.is_vertical(), t.is_vertical()) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Greater,
        (false, true) => Ordering::Less,
        (false, false) => {
            // Canonical orientation keeps both dx positive.
            let lhs = (&s.b.y - &s.a.y) * (&t.b.x - &t.a.x);
            let rhs = (&t.b.y - &t.a.y) * (&s.b.x - &s.a.x);
            lhs.cmp(&rhs)
        }
    }
}

/// Exact `y` of the supporting line of a non-vertical segment at `x` in its span.
pub fn eval_at(s: &Segment, x: &Rational) -> Result<Rational, GeomError> {
    if s.is_vertical() {
        return Err(GeomError::Vertical);
    }
    if x < &s.a.x || x > &s.b.x {
        return Err(GeomError::OutOfSpan {
            x: Box::new(x.clone()),
            lo: Box::new(s.a.x.clone()),
            hi: Box::new(s.b.x.clone()),
        });
    }
    Ok(line_value(&s.a, &s.b, x))
}

/// Value at `x` of the non-vertical line through `p` and `q`.
pub(crate) fn line_value(p: &Point, q: &Point, x: &Rational) -> Rational {
    if x == &p.x {
        return p.y.clone();
    }
    if x == &q.x {
        return q.y.clone();
    }
    &p.y + &((&q.y - &p.y) * (x - &p.x) / (&q.x - &p.x))
}
