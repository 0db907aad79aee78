//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use rand::Rng;
use ss2d_denoise::geometry::{convex_hull, ConvexRegion, Point2, Sector};

/// Uniform sample from the exact annular wedge.
pub fn sample_wedge<R: Rng>(s: &Sector, rng: &mut R) -> Point2 {
    let r = rng.gen_range(s.r_lo * s.r_lo..=s.r_hi * s.r_hi).sqrt();
    let theta = rng.gen_range(s.theta_lo..=s.theta_hi);
    s.origin + Point2::polar(r, theta)
}

pub fn random_sector<R: Rng>(rng: &mut R) -> Sector {
    let origin = Point2::new(rng.gen_range(-50.0..50.0), rng.gen_range(-30.0..30.0));
    let r_lo = if rng.gen_bool(0.1) {
        0.0
    } else {
        rng.gen_range(0.0..40.0)
    };
    let r_hi = r_lo + rng.gen_range(0.01..5.0);
    let theta_lo = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    let width = rng.gen_range(0.001..std::f64::consts::FRAC_PI_2);
    Sector::new(origin, r_lo, r_hi, theta_lo, theta_lo + width).unwrap()
}

/// Convex polygon with vertices on a random ellipse.
pub fn random_convex<R: Rng>(rng: &mut R, center_spread: f64, n: usize) -> ConvexRegion {
    let c = Point2::new(
        rng.gen_range(-center_spread..=center_spread),
        rng.gen_range(-center_spread..=center_spread),
    );
    let (ax, ay) = (rng.gen_range(0.5..3.0), rng.gen_range(0.5..3.0));
    let tilt: f64 = rng.gen_range(0.0..std::f64::consts::PI);
    let pts: Vec<Point2> = (0..n)
        .map(|_| {
            let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let (x, y) = (ax * t.cos(), ay * t.sin());
            c + Point2::new(
                x * tilt.cos() - y * tilt.sin(),
                x * tilt.sin() + y * tilt.cos(),
            )
        })
        .collect();
    convex_hull(&pts).unwrap()
}

/// Half-plane membership against raw counterclockwise vertices.
pub fn inside_ccw(vertices: &[Point2], p: Point2) -> bool {
    let n = vertices.len();
    (0..n).all(|i| {
        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
        (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) >= 0.0
    })
}

pub fn bbox(vertices: &[Point2]) -> (Point2, Point2) {
    vertices.iter().fold(
        (
            Point2::new(f64::MAX, f64::MAX),
            Point2::new(f64::MIN, f64::MIN),
        ),
        |(lo, hi), v| {
            (
                Point2::new(lo.x.min(v.x), lo.y.min(v.y)),
                Point2::new(hi.x.max(v.x), hi.y.max(v.y)),
            )
        },
    )
}

/// Rejection-sampling estimate of the area of `a ∩ b` and the fraction of
/// the sampling box it covers.
pub fn mc_intersection_area<R: Rng>(
    a: &ConvexRegion,
    b: &ConvexRegion,
    samples: usize,
    rng: &mut R,
) -> (f64, f64) {
    let (alo, ahi) = bbox(a.vertices());
    let (blo, bhi) = bbox(b.vertices());
    let lo = Point2::new(alo.x.max(blo.x), alo.y.max(blo.y));
    let hi = Point2::new(ahi.x.min(bhi.x), ahi.y.min(bhi.y));
    if lo.x >= hi.x || lo.y >= hi.y {
        return (0.0, 0.0);
    }
    let hits = (0..samples)
        .filter(|_| {
            let p = Point2::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
            inside_ccw(a.vertices(), p) && inside_ccw(b.vertices(), p)
        })
        .count();
    let frac = hits as f64 / samples as f64;
    (frac * (hi.x - lo.x) * (hi.y - lo.y), frac)
}
