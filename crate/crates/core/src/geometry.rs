//! Convex-region arithmetic for belief sets.
//!
//! Every approximation made here is an outer approximation: arcs and discs are
//! replaced by circumscribed polygons, inner arcs by their chords. A region
//! produced from an exact set therefore always contains that set, and the only
//! way a tracked position can leave its region is a violated motion bound.
//!
//! Regions are kept convex. Besides proper polygons (three or more vertices,
//! counterclockwise, no collinear triples) a region may be `Empty`, a single
//! point, or a segment. Segments appear as displacement sets of a ball with an
//! exactly known heading and are never produced by intersecting two regions
//! that both have positive area.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{DenoiseError, Result};

/// Tolerance, in meters, of half-plane and collinearity tests.
pub const EPS: f64 = 1e-9;

/// Clipping results below this area (m²) collapse to `Empty`.
pub const DEGENERATE_AREA: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Point at distance `r` along global direction `theta` (radians).
    pub fn polar(r: f64, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(r * c, r * s)
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    /// Direction of the vector in radians, in (-π, π].
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

/// Signed distance of `p` from the directed line `a -> b`; positive on the left.
fn side(a: Point2, b: Point2, p: Point2) -> f64 {
    let edge = b - a;
    let len = edge.norm();
    if len == 0.0 {
        return -p.distance(a);
    }
    edge.cross(p - a) / len
}

fn distance_to_segment(a: Point2, b: Point2, p: Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

fn shoelace(vertices: &[Point2]) -> f64 {
    if vertices.len() < 3 {
        return 0.0;
    }
    let origin = vertices[0];
    let mut twice = 0.0;
    for w in vertices[1..].windows(2) {
        twice += (w[0] - origin).cross(w[1] - origin);
    }
    0.5 * twice
}

/// Shape classification of a [`ConvexRegion`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionShape {
    Empty,
    Point,
    Segment,
    Polygon,
}

/// Closed convex polygon, stored as counterclockwise vertices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvexRegion {
    vertices: Vec<Point2>,
    area: f64,
}

impl ConvexRegion {
    pub fn empty() -> Self {
        Self {
            vertices: Vec::new(),
            area: 0.0,
        }
    }

    pub fn point(p: Point2) -> Self {
        Self {
            vertices: vec![p],
            area: 0.0,
        }
    }

    /// Axis-aligned rectangle spanned by two corners.
    pub fn rectangle(a: Point2, b: Point2) -> Result<Self> {
        convex_hull(&[
            Point2::new(a.x, a.y),
            Point2::new(b.x, a.y),
            Point2::new(b.x, b.y),
            Point2::new(a.x, b.y),
        ])
    }

    /// Builds a region from already-cleaned hull vertices.
    fn from_hull(vertices: Vec<Point2>) -> Self {
        let area = shoelace(&vertices);
        Self { vertices, area }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn shape(&self) -> RegionShape {
        match self.vertices.len() {
            0 => RegionShape::Empty,
            1 => RegionShape::Point,
            2 => RegionShape::Segment,
            _ => RegionShape::Polygon,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Shoelace area; zero for every degenerate shape.
    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn perimeter(&self) -> f64 {
        match self.vertices.len() {
            0 | 1 => 0.0,
            2 => 2.0 * self.vertices[0].distance(self.vertices[1]),
            n => (0..n)
                .map(|i| self.vertices[i].distance(self.vertices[(i + 1) % n]))
                .sum(),
        }
    }

    /// Area centroid. Points and segments return their own center.
    pub fn centroid(&self) -> Result<Point2> {
        match self.shape() {
            RegionShape::Empty => Err(DenoiseError::EmptyRegion),
            RegionShape::Point => Ok(self.vertices[0]),
            RegionShape::Segment => Ok((self.vertices[0] + self.vertices[1]) * 0.5),
            RegionShape::Polygon => {
                let origin = self.vertices[0];
                let (mut cx, mut cy, mut twice) = (0.0, 0.0, 0.0);
                for w in self.vertices[1..].windows(2) {
                    let (p, q) = (w[0] - origin, w[1] - origin);
                    let c = p.cross(q);
                    twice += c;
                    cx += (p.x + q.x) * c;
                    cy += (p.y + q.y) * c;
                }
                if twice.abs() < f64::MIN_POSITIVE {
                    let n = self.vertices.len() as f64;
                    let sum = self.vertices.iter().fold(Point2::ORIGIN, |acc, &v| acc + v);
                    return Ok(sum * (1.0 / n));
                }
                Ok(origin + Point2::new(cx, cy) * (1.0 / (3.0 * twice)))
            }
        }
    }

    /// Midpoint of the axis-aligned bounding box.
    pub fn bbox_midpoint(&self) -> Result<Point2> {
        let (lo, hi) = self.bounding_box().ok_or(DenoiseError::EmptyRegion)?;
        Ok((lo + hi) * 0.5)
    }

    pub fn bounding_box(&self) -> Option<(Point2, Point2)> {
        let first = *self.vertices.first()?;
        Some(self.vertices.iter().fold((first, first), |(lo, hi), v| {
            (
                Point2::new(lo.x.min(v.x), lo.y.min(v.y)),
                Point2::new(hi.x.max(v.x), hi.y.max(v.y)),
            )
        }))
    }

    /// Closed-set membership with a 1e-9 m tolerance.
    pub fn contains(&self, p: Point2) -> bool {
        match self.vertices.len() {
            0 => false,
            1 => self.vertices[0].distance(p) <= EPS,
            2 => distance_to_segment(self.vertices[0], self.vertices[1], p) <= EPS,
            n => (0..n).all(|i| side(self.vertices[i], self.vertices[(i + 1) % n], p) >= -EPS),
        }
    }

    pub fn translate(&self, offset: Point2) -> Self {
        Self {
            vertices: self.vertices.iter().map(|&v| v + offset).collect(),
            area: self.area,
        }
    }
}

/// Convex hull (Andrew's monotone chain) with collinear points removed.
///
/// Ties are broken lexicographically by (x, y). Points closer than 1e-9 m to
/// the line through their neighbours are dropped.
pub fn convex_hull(points: &[Point2]) -> Result<ConvexRegion> {
    if points.is_empty() {
        return Err(DenoiseError::ConstraintViolation(
            "convex hull of an empty point set".into(),
        ));
    }
    if let Some(bad) = points.iter().find(|p| !p.is_finite()) {
        return Err(DenoiseError::ConstraintViolation(format!(
            "non-finite point ({}, {})",
            bad.x, bad.y
        )));
    }
    Ok(ConvexRegion::from_hull(hull_vertices(points.to_vec())))
}

fn hull_vertices(mut pts: Vec<Point2>) -> Vec<Point2> {
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup_by(|a, b| a.distance(*b) <= EPS);
    if pts.len() < 3 {
        return pts;
    }

    // Pops the middle point unless `o -> a -> b` is a strict left turn.
    fn keeps_left_turn(o: Point2, a: Point2, b: Point2) -> bool {
        side(o, b, a) < -EPS
    }

    let mut hull: Vec<Point2> = Vec::with_capacity(pts.len() + 1);
    for &p in pts.iter() {
        while hull.len() >= 2 && !keeps_left_turn(hull[hull.len() - 2], hull[hull.len() - 1], p) {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len
            && !keeps_left_turn(hull[hull.len() - 2], hull[hull.len() - 1], p)
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();

    if hull.len() == 2 && hull[0].distance(hull[1]) <= EPS {
        hull.truncate(1);
    }
    hull
}

/// Exact convex intersection by Sutherland-Hodgman clipping.
pub fn intersect(a: &ConvexRegion, b: &ConvexRegion) -> ConvexRegion {
    use RegionShape::*;
    match (a.shape(), b.shape()) {
        (Empty, _) | (_, Empty) => ConvexRegion::empty(),
        (Point, _) => point_filter(a, b),
        (_, Point) => point_filter(b, a),
        (Segment, Segment) => segment_segment(a.vertices(), b.vertices()),
        (Segment, Polygon) => clip(a.vertices(), b.vertices(), false),
        (Polygon, Segment) => clip(b.vertices(), a.vertices(), false),
        (Polygon, Polygon) => clip(a.vertices(), b.vertices(), true),
    }
}

fn point_filter(point: &ConvexRegion, other: &ConvexRegion) -> ConvexRegion {
    if other.contains(point.vertices()[0]) {
        point.clone()
    } else {
        ConvexRegion::empty()
    }
}

fn clip(subject: &[Point2], clipper: &[Point2], drop_slivers: bool) -> ConvexRegion {
    let mut output: Vec<Point2> = subject.to_vec();
    let n = clipper.len();
    for i in 0..n {
        if output.is_empty() {
            break;
        }
        let (p, q) = (clipper[i], clipper[(i + 1) % n]);
        let input = std::mem::take(&mut output);
        let m = input.len();
        for j in 0..m {
            let s = input[j];
            let e = input[(j + 1) % m];
            let (ds, de) = (side(p, q, s), side(p, q, e));
            let (s_in, e_in) = (ds >= -EPS, de >= -EPS);
            if s_in {
                output.push(s);
            }
            if s_in != e_in && (ds - de).abs() > 0.0 {
                let t = ds / (ds - de);
                output.push(s + (e - s) * t);
            }
        }
    }
    if output.is_empty() {
        return ConvexRegion::empty();
    }
    let region = ConvexRegion::from_hull(hull_vertices(output));
    if drop_slivers && region.area() < DEGENERATE_AREA {
        return ConvexRegion::empty();
    }
    region
}

fn segment_segment(a: &[Point2], b: &[Point2]) -> ConvexRegion {
    let (sa, sb) = (
        ConvexRegion::from_hull(a.to_vec()),
        ConvexRegion::from_hull(b.to_vec()),
    );
    let mut pts: Vec<Point2> = a.iter().copied().filter(|&p| sb.contains(p)).collect();
    pts.extend(b.iter().copied().filter(|&p| sa.contains(p)));
    let (d1, d2) = (a[1] - a[0], b[1] - b[0]);
    let denom = d1.cross(d2);
    if denom.abs() > 0.0 {
        let t = (b[0] - a[0]).cross(d2) / denom;
        let candidate = a[0] + d1 * t;
        if sa.contains(candidate) && sb.contains(candidate) {
            pts.push(candidate);
        }
    }
    if pts.is_empty() {
        ConvexRegion::empty()
    } else {
        ConvexRegion::from_hull(hull_vertices(pts))
    }
}

/// Exact Minkowski sum, the hull of all pairwise vertex sums.
pub fn minkowski_sum(a: &ConvexRegion, b: &ConvexRegion) -> Result<ConvexRegion> {
    if a.is_empty() || b.is_empty() {
        return Err(DenoiseError::EmptyRegion);
    }
    if b.vertices.len() == 1 {
        return Ok(a.translate(b.vertices[0]));
    }
    if a.vertices.len() == 1 {
        return Ok(b.translate(a.vertices[0]));
    }
    let sums: Vec<Point2> = a
        .vertices
        .iter()
        .flat_map(|&p| b.vertices.iter().map(move |&q| p + q))
        .collect();
    Ok(ConvexRegion::from_hull(hull_vertices(sums)))
}

/// Regular `steps`-gon circumscribing the closed disc of `radius` about the origin.
pub fn circumscribed_disc(radius: f64, steps: usize) -> Result<ConvexRegion> {
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(DenoiseError::ConstraintViolation(format!(
            "disc radius must be finite and non-negative, got {radius}"
        )));
    }
    if steps < 3 {
        return Err(DenoiseError::ConstraintViolation(format!(
            "disc needs at least 3 sides, got {steps}"
        )));
    }
    if radius == 0.0 {
        return Ok(ConvexRegion::point(Point2::ORIGIN));
    }
    let half = PI / steps as f64;
    let outer = radius / half.cos();
    let pts: Vec<Point2> = (0..steps)
        .map(|i| Point2::polar(outer, TAU * i as f64 / steps as f64))
        .collect();
    convex_hull(&pts)
}

/// Outer approximation of the Minkowski sum of `r` with a closed disc.
pub fn dilate(r: &ConvexRegion, radius: f64, disc_steps: usize) -> Result<ConvexRegion> {
    if r.is_empty() {
        return Err(DenoiseError::EmptyRegion);
    }
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(DenoiseError::ConstraintViolation(format!(
            "dilation radius must be finite and non-negative, got {radius}"
        )));
    }
    if disc_steps < 4 {
        return Err(DenoiseError::ConstraintViolation(format!(
            "disc_steps must be at least 4, got {disc_steps}"
        )));
    }
    if radius == 0.0 {
        return Ok(r.clone());
    }
    minkowski_sum(r, &circumscribed_disc(radius, disc_steps)?)
}

/// Annular wedge: radii in `[r_lo, r_hi]`, global directions in `[theta_lo, theta_hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sector {
    pub origin: Point2,
    pub r_lo: f64,
    pub r_hi: f64,
    pub theta_lo: f64,
    pub theta_hi: f64,
}

impl Sector {
    pub fn new(origin: Point2, r_lo: f64, r_hi: f64, theta_lo: f64, theta_hi: f64) -> Result<Self> {
        let s = Self {
            origin,
            r_lo,
            r_hi,
            theta_lo,
            theta_hi,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.origin.is_finite()
            && [self.r_lo, self.r_hi, self.theta_lo, self.theta_hi]
                .iter()
                .all(|v| v.is_finite());
        if !finite {
            return Err(DenoiseError::ConstraintViolation(
                "sector has non-finite fields".into(),
            ));
        }
        if self.r_lo < 0.0 || self.r_lo >= self.r_hi {
            return Err(DenoiseError::ConstraintViolation(format!(
                "sector radii must satisfy 0 <= r_lo < r_hi, got [{}, {}]",
                self.r_lo, self.r_hi
            )));
        }
        let width = self.width();
        if width <= 0.0 || width > FRAC_PI_2 + 1e-12 {
            return Err(DenoiseError::ConstraintViolation(format!(
                "sector angular width must lie in (0, pi/2], got {width}"
            )));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.theta_hi - self.theta_lo
    }

    /// Area of the exact annular wedge.
    pub fn exact_area(&self) -> f64 {
        0.5 * self.width() * (self.r_hi * self.r_hi - self.r_lo * self.r_lo)
    }

    /// Membership in the exact (curved) wedge.
    pub fn contains_exact(&self, p: Point2) -> bool {
        let rel = p - self.origin;
        let r = rel.norm();
        if r < self.r_lo || r > self.r_hi {
            return false;
        }
        if r == 0.0 {
            return true;
        }
        let offset = (rel.angle() - self.theta_lo).rem_euclid(TAU);
        offset <= self.width()
    }
}

/// Conservative polygon for a sector.
///
/// The outer arc becomes `arc_steps` chords pushed out to the circumscribing
/// radius `r_hi / cos(δ/2)`, where δ is the angle subtended by one chord. The
/// inner arc becomes its chord; with `r_lo = 0` the wedge is a fan from the
/// origin.
pub fn sector_to_polygon(s: &Sector, arc_steps: usize) -> Result<ConvexRegion> {
    s.validate()?;
    if arc_steps == 0 {
        return Err(DenoiseError::ConstraintViolation(
            "arc_steps must be at least 1".into(),
        ));
    }
    let step = s.width() / arc_steps as f64;
    let outer = s.r_hi / (0.5 * step).cos();
    let mut pts = Vec::with_capacity(arc_steps + 3);
    if s.r_lo > 0.0 {
        pts.push(s.origin + Point2::polar(s.r_lo, s.theta_lo));
        pts.push(s.origin + Point2::polar(s.r_lo, s.theta_hi));
    } else {
        pts.push(s.origin);
    }
    for i in 0..=arc_steps {
        let theta = if i == arc_steps {
            s.theta_hi
        } else {
            s.theta_lo + step * i as f64
        };
        pts.push(s.origin + Point2::polar(outer, theta));
    }
    convex_hull(&pts)
}
