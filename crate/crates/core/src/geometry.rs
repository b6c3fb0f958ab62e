//! Planar geometry shared by the engine, perception and validation.
//!
//! World frame: x east, y north, heading counterclockwise from +x in radians.

use serde::{Deserialize, Serialize};

/// Point or vector in the plane, serialized as `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Vec2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Vec2 { x, y }
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Vec2 { x: c, y: s }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn scale(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }

    pub fn distance(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    /// Express a world-frame point in a frame located at `origin` with `heading`.
    pub fn to_local(self, origin: Vec2, heading: f64) -> Vec2 {
        let d = self - origin;
        let (s, c) = heading.sin_cos();
        Vec2::new(c * d.x + s * d.y, -s * d.x + c * d.y)
    }

    pub fn to_world(self, origin: Vec2, heading: f64) -> Vec2 {
        let (s, c) = heading.sin_cos();
        Vec2::new(origin.x + c * self.x - s * self.y, origin.y + s * self.x + c * self.y)
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Position plus heading.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pose2D {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl Pose2D {
    pub const fn new(x: f64, y: f64, heading: f64) -> Self {
        Pose2D { x, y, heading }
    }

    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }
}

/// Wrap an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut r = a.rem_euclid(two_pi);
    if r > std::f64::consts::PI {
        r -= two_pi;
    }
    r
}

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub min: Vec2,
    pub max: Vec2,
}

impl Rect {
    pub fn new(min: Vec2, max: Vec2) -> Self {
        Rect { min, max }
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn center(&self) -> Vec2 {
        (self.min + self.max).scale(0.5)
    }

    pub fn corners(&self) -> [Vec2; 4] {
        [
            self.min,
            Vec2::new(self.max.x, self.min.y),
            self.max,
            Vec2::new(self.min.x, self.max.y),
        ]
    }

    /// Euclidean distance from `p` to the rectangle (0 inside).
    pub fn distance_to(&self, p: Vec2) -> f64 {
        let dx = (self.min.x - p.x).max(0.0).max(p.x - self.max.x);
        let dy = (self.min.y - p.y).max(0.0).max(p.y - self.max.y);
        dx.hypot(dy)
    }
}

/// Oriented bounding box: center, half extents along its own axes, heading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Obb {
    pub center: Vec2,
    pub half_length: f64,
    pub half_width: f64,
    pub heading: f64,
}

impl Obb {
    pub fn new(center: Vec2, half_length: f64, half_width: f64, heading: f64) -> Self {
        Obb {
            center,
            half_length,
            half_width,
            heading,
        }
    }

    pub fn from_pose(pose: &Pose2D, length: f64, width: f64) -> Self {
        Obb::new(pose.position(), length * 0.5, width * 0.5, pose.heading)
    }

    pub fn axes(&self) -> [Vec2; 2] {
        let u = Vec2::from_angle(self.heading);
        [u, u.perp()]
    }

    pub fn corners(&self) -> [Vec2; 4] {
        let [u, v] = self.axes();
        let a = u.scale(self.half_length);
        let b = v.scale(self.half_width);
        let c = self.center;
        [c + a + b, c - a + b, c - a - b, c + a - b]
    }

    /// Half-length of the projection of this box onto unit `axis`.
    fn projected_radius(&self, axis: Vec2) -> f64 {
        let [u, v] = self.axes();
        self.half_length * u.dot(axis).abs() + self.half_width * v.dot(axis).abs()
    }

    pub fn contains(&self, p: Vec2) -> bool {
        let l = p.to_local(self.center, self.heading);
        l.x.abs() <= self.half_length && l.y.abs() <= self.half_width
    }

    pub fn bounding_radius(&self) -> f64 {
        self.half_length.hypot(self.half_width)
    }
}

/// Minimum overlap depth across the four candidate separating axes, or `None`
/// when some axis separates the boxes. Touching boxes report `Some(0.0)`.
pub fn obb_penetration(a: &Obb, b: &Obb) -> Option<f64> {
    let d = b.center - a.center;
    let [a0, a1] = a.axes();
    let [b0, b1] = b.axes();
    let mut depth = f64::INFINITY;
    for axis in [a0, a1, b0, b1] {
        let overlap = a.projected_radius(axis) + b.projected_radius(axis) - d.dot(axis).abs();
        if overlap < 0.0 {
            return None;
        }
        depth = depth.min(overlap);
    }
    Some(depth)
}

/// Separating-axis overlap test; boundary contact counts as overlap.
pub fn obb_overlap(a: &Obb, b: &Obb) -> bool {
    obb_penetration(a, b).is_some()
}

/// Distance along the ray `origin + t*dir` (unit `dir`) to the first boundary
/// hit of `obb`, or `None`. Origins inside the box return `Some(0.0)`.
pub fn ray_obb(origin: Vec2, dir: Vec2, obb: &Obb) -> Option<f64> {
    // slab test in the box frame
    let o = origin.to_local(obb.center, obb.heading);
    let (s, c) = obb.heading.sin_cos();
    let d = Vec2::new(c * dir.x + s * dir.y, -s * dir.x + c * dir.y);
    let mut t_min = f64::NEG_INFINITY;
    let mut t_max = f64::INFINITY;
    for (oc, dc, h) in [(o.x, d.x, obb.half_length), (o.y, d.y, obb.half_width)] {
        if dc.abs() < 1e-12 {
            if oc.abs() > h {
                return None;
            }
        } else {
            let t1 = (-h - oc) / dc;
            let t2 = (h - oc) / dc;
            let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
            t_min = t_min.max(lo);
            t_max = t_max.min(hi);
            if t_min > t_max {
                return None;
            }
        }
    }
    if t_max < 0.0 {
        return None;
    }
    Some(t_min.max(0.0))
}

/// True when the closed segment `p`-`q` touches `obb`.
pub fn segment_hits_obb(p: Vec2, q: Vec2, obb: &Obb) -> bool {
    let d = q - p;
    let len = d.norm();
    if len < 1e-12 {
        return obb.contains(p);
    }
    match ray_obb(p, d.scale(1.0 / len), obb) {
        Some(t) => t <= len,
        None => false,
    }
}

fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab.scale(t))
}

/// Euclidean gap between two boxes; 0 when they overlap.
pub fn obb_distance(a: &Obb, b: &Obb) -> f64 {
    if obb_overlap(a, b) {
        return 0.0;
    }
    let ca = a.corners();
    let cb = b.corners();
    let mut best = f64::INFINITY;
    for i in 0..4 {
        let (a0, a1) = (ca[i], ca[(i + 1) % 4]);
        let (b0, b1) = (cb[i], cb[(i + 1) % 4]);
        for p in cb {
            best = best.min(point_segment_distance(p, a0, a1));
        }
        for p in ca {
            best = best.min(point_segment_distance(p, b0, b1));
        }
    }
    best
}

/// Even-odd point in polygon; points on the boundary may land either side.
pub fn polygon_contains(poly: &[Vec2], p: Vec2) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Closest point on a polyline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolylineProjection {
    /// Arc length from the first vertex.
    pub station: f64,
    /// Signed lateral offset, positive to the left of the travel direction.
    pub offset: f64,
    pub point: Vec2,
    /// Unit tangent of the segment containing `point`.
    pub tangent: Vec2,
}

pub fn polyline_length(pts: &[Vec2]) -> f64 {
    pts.windows(2).map(|w| w[0].distance(w[1])).sum()
}

pub fn project_onto_polyline(pts: &[Vec2], p: Vec2) -> Option<PolylineProjection> {
    let mut best: Option<(f64, PolylineProjection)> = None;
    let mut station = 0.0;
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let ab = b - a;
        let len = ab.norm();
        if len < 1e-12 {
            continue;
        }
        let tangent = ab.scale(1.0 / len);
        let t = (p - a).dot(tangent).clamp(0.0, len);
        let q = a + tangent.scale(t);
        let dist = p.distance(q);
        if best.as_ref().is_none_or(|(d, _)| dist < *d) {
            best = Some((
                dist,
                PolylineProjection {
                    station: station + t,
                    offset: tangent.cross(p - a),
                    point: q,
                    tangent,
                },
            ));
        }
        station += len;
    }
    best.map(|(_, proj)| proj)
}

/// Point and unit tangent at arc length `s` (clamped to the polyline).
pub fn polyline_point_at(pts: &[Vec2], s: f64) -> Option<(Vec2, Vec2)> {
    let mut remaining = s.max(0.0);
    let mut last = None;
    for w in pts.windows(2) {
        let ab = w[1] - w[0];
        let len = ab.norm();
        if len < 1e-12 {
            continue;
        }
        let tangent = ab.scale(1.0 / len);
        if remaining <= len {
            return Some((w[0] + tangent.scale(remaining), tangent));
        }
        remaining -= len;
        last = Some((w[1], tangent));
    }
    last
}
