//! Convex-polygon primitives.
//!
//! Everything the enclosure method needs from planar geometry: support
//! functions, regularity of a direction, the local frame at the contact
//! vertex, and assembly of a convex hull from support samples.
//!
//! Conventions, fixed once for the whole crate:
//!
//! * polygons are stored counter-clockwise;
//! * a [`Direction`] carries `ω = (cos φ, sin φ)` and `ω⊥ = (sin φ, −cos φ)`,
//!   the clockwise rotation of `ω`, so that `det(ω, ω⊥) = −1`;
//! * outward normals of a polygon are clockwise rotations of edge tangents.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default regularity tolerance, relative to the polygon diameter.
pub const DEFAULT_ANGLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Self) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Self) -> f64 {
        (self - other).norm()
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s)
    }

    /// Counter-clockwise rotation by a quarter turn.
    pub fn perp_ccw(self) -> Self {
        Self::new(-self.y, self.x)
    }

    /// Clockwise rotation by a quarter turn.
    pub fn perp_cw(self) -> Self {
        Self::new(self.y, -self.x)
    }

    pub fn lerp(self, other: Self, s: f64) -> Self {
        self + (other - self).scale(s)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Point2 {
    fn from(v: [f64; 2]) -> Self {
        Self::new(v[0], v[1])
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

impl Add for Point2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Point2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}

/// A unit direction `ω` together with its partner `ω⊥`.
///
/// Only the angle is stored, so the pair `(ω, ω⊥)` always has determinant
/// `−1`; the mirrored pair cannot be represented.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    angle: f64,
}

impl Direction {
    pub fn new(angle: f64) -> Self {
        Self { angle }
    }

    pub fn from_degrees(deg: f64) -> Self {
        Self::new(deg.to_radians())
    }

    /// `n` directions uniformly spaced on the circle, starting at angle 0.
    pub fn uniform(n: usize) -> Vec<Self> {
        (0..n)
            .map(|i| Self::new(2.0 * PI * i as f64 / n as f64))
            .collect()
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn omega(&self) -> Point2 {
        let (s, c) = self.angle.sin_cos();
        Point2::new(c, s)
    }

    pub fn omega_perp(&self) -> Point2 {
        let (s, c) = self.angle.sin_cos();
        Point2::new(s, -c)
    }
}

/// Half-plane description `{x : x·ω ≤ h}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportSample {
    pub direction: Direction,
    pub h: f64,
}

/// Local description of a polygon at the vertex touched by a supporting line.
///
/// Angles `p` and `q` are the directions of the two incident edges measured
/// in the positively oriented frame `(ω⊥, ω)`; `theta` is the outside
/// opening angle, swept counter-clockwise from the `p` edge to the `q` edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexFrame {
    pub x0: Point2,
    pub vertex_index: usize,
    pub theta: f64,
    pub p: f64,
    pub q: f64,
    pub a: Point2,
    pub a_perp: Point2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point2>", into = "Vec<Point2>")]
pub struct Polygon {
    vertices: Vec<Point2>,
}

impl TryFrom<Vec<Point2>> for Polygon {
    type Error = Error;
    fn try_from(v: Vec<Point2>) -> Result<Self> {
        Polygon::new(v)
    }
}

impl From<Polygon> for Vec<Point2> {
    fn from(p: Polygon) -> Self {
        p.vertices
    }
}

impl Polygon {
    /// Validates a counter-clockwise simple vertex loop.
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Structure(format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if let Some(p) = vertices.iter().find(|p| !p.is_finite()) {
            return Err(Error::Structure(format!("non-finite vertex {p:?}")));
        }
        let n = vertices.len();
        let scale = bounding_scale(&vertices);
        for i in 0..n {
            for j in (i + 1)..n {
                if vertices[i].dist(vertices[j]) <= 1e-14 * scale {
                    return Err(Error::Structure(format!(
                        "repeated vertex at indices {i} and {j}"
                    )));
                }
            }
        }
        let area = signed_area(&vertices);
        if area <= 0.0 {
            return Err(Error::Structure(
                "vertices must be ordered counter-clockwise".into(),
            ));
        }
        let poly = Self { vertices };
        if !poly.is_simple() {
            return Err(Error::Structure("polygon is self-intersecting".into()));
        }
        Ok(poly)
    }

    /// Like [`Polygon::new`] but additionally requires strict convexity.
    pub fn convex(vertices: Vec<Point2>) -> Result<Self> {
        let poly = Self::new(vertices)?;
        if !poly.is_convex() {
            return Err(Error::Structure("polygon is not strictly convex".into()));
        }
        Ok(poly)
    }

    /// Regular `n`-gon with a vertex at angle `phase` from the center.
    pub fn regular(n: usize, circumradius: f64, center: Point2, phase: f64) -> Result<Self> {
        if !(circumradius > 0.0) {
            return Err(Error::Structure("circumradius must be positive".into()));
        }
        let vertices = (0..n)
            .map(|i| {
                let a = phase + 2.0 * PI * i as f64 / n as f64;
                center + Point2::new(a.cos(), a.sin()) * circumradius
            })
            .collect();
        Self::convex(vertices)
    }

    /// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        Self::convex(vec![
            Point2::new(x0, y0),
            Point2::new(x1, y0),
            Point2::new(x1, y1),
            Point2::new(x0, y1),
        ])
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, i: usize) -> Point2 {
        let n = self.vertices.len();
        self.vertices[i % n]
    }

    /// Edges as `(start, end)` pairs in counter-clockwise order.
    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.dist(b)).sum()
    }

    pub fn centroid(&self) -> Point2 {
        let mut cx = 0.0;
        let mut cy = 0.0;
        for (a, b) in self.edges() {
            let w = a.cross(b);
            cx += (a.x + b.x) * w;
            cy += (a.y + b.y) * w;
        }
        let a6 = 6.0 * self.area();
        Point2::new(cx / a6, cy / a6)
    }

    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let mut d: f64 = 0.0;
        for i in 0..v.len() {
            for j in (i + 1)..v.len() {
                d = d.max(v[i].dist(v[j]));
            }
        }
        d
    }

    pub fn is_convex(&self) -> bool {
        let n = self.vertices.len();
        let scale = bounding_scale(&self.vertices);
        (0..n).all(|i| {
            let a = self.vertex(i);
            let b = self.vertex(i + 1);
            let c = self.vertex(i + 2);
            (b - a).cross(c - b) > 1e-14 * scale * scale
        })
    }

    fn is_simple(&self) -> bool {
        let n = self.vertices.len();
        if n == 3 {
            return true;
        }
        for i in 0..n {
            let (a, b) = (self.vertex(i), self.vertex(i + 1));
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (c, d) = (self.vertex(j), self.vertex(j + 1));
                if segments_intersect(a, b, c, d) {
                    return false;
                }
            }
        }
        true
    }

    /// Outward unit normal of edge `i` (from vertex `i` to `i + 1`).
    pub fn edge_normal(&self, i: usize) -> Point2 {
        let t = self.vertex(i + 1) - self.vertex(i);
        t.perp_cw() * (1.0 / t.norm())
    }

    /// Winding-number test; points on the boundary count as inside.
    pub fn contains(&self, p: Point2) -> bool {
        self.boundary_distance(p) <= 1e-12 * bounding_scale(&self.vertices)
            || winding_number(&self.vertices, p) != 0
    }

    /// Distance from `p` to the polygon boundary.
    pub fn boundary_distance(&self, p: Point2) -> f64 {
        self.edges()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Distance from `p` to the closed region (zero inside).
    pub fn region_distance(&self, p: Point2) -> f64 {
        if winding_number(&self.vertices, p) != 0 {
            0.0
        } else {
            self.boundary_distance(p)
        }
    }

    pub fn translate(&self, s: Point2) -> Self {
        Self {
            vertices: self.vertices.iter().map(|&v| v + s).collect(),
        }
    }

    /// Scaling about `center` by `factor > 0`.
    pub fn scale_about(&self, center: Point2, factor: f64) -> Self {
        Self {
            vertices: self
                .vertices
                .iter()
                .map(|&v| center + (v - center) * factor)
                .collect(),
        }
    }

    /// Reflection across the x-axis; re-reversed so the result stays
    /// counter-clockwise.
    pub fn reflect_x(&self) -> Self {
        let mut vertices: Vec<Point2> = self
            .vertices
            .iter()
            .map(|v| Point2::new(v.x, -v.y))
            .collect();
        vertices.reverse();
        Self { vertices }
    }

    /// Minimum distance between the boundaries of two polygons.
    pub fn boundary_separation(&self, other: &Polygon) -> f64 {
        let mut d = f64::INFINITY;
        for (a, b) in self.edges() {
            for (c, e) in other.edges() {
                if segments_intersect(a, b, c, e) {
                    return 0.0;
                }
                d = d
                    .min(point_segment_distance(a, c, e))
                    .min(point_segment_distance(b, c, e))
                    .min(point_segment_distance(c, a, b))
                    .min(point_segment_distance(e, a, b));
            }
        }
        d
    }
}

fn bounding_scale(v: &[Point2]) -> f64 {
    v.iter().map(|p| p.x.abs().max(p.y.abs())).fold(1.0, f64::max)
}

fn signed_area(v: &[Point2]) -> f64 {
    let n = v.len();
    (0..n).map(|i| v[i].cross(v[(i + 1) % n])).sum::<f64>() * 0.5
}

fn winding_number(v: &[Point2], p: Point2) -> i32 {
    let n = v.len();
    let mut wn = 0;
    for i in 0..n {
        let a = v[i];
        let b = v[(i + 1) % n];
        let side = (b - a).cross(p - a);
        if a.y <= p.y {
            if b.y > p.y && side > 0.0 {
                wn += 1;
            }
        } else if b.y <= p.y && side < 0.0 {
            wn -= 1;
        }
    }
    wn
}

pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let s = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a + ab * s)
}

fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let o1 = (b - a).cross(c - a);
    let o2 = (b - a).cross(d - a);
    let o3 = (d - c).cross(a - c);
    let o4 = (d - c).cross(b - c);
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0))
        && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0))
    {
        return true;
    }
    let on = |p: Point2, q: Point2, r: Point2, o: f64| {
        o == 0.0
            && r.x >= p.x.min(q.x)
            && r.x <= p.x.max(q.x)
            && r.y >= p.y.min(q.y)
            && r.y <= p.y.max(q.y)
    };
    on(a, b, c, o1) || on(a, b, d, o2) || on(c, d, a, o3) || on(c, d, b, o4)
}

/// `h_P(ω) = max_x x·ω`, attained at a vertex.
pub fn support_function(poly: &Polygon, d: Direction) -> f64 {
    let w = d.omega();
    poly.vertices()
        .iter()
        .map(|v| v.dot(w))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Gap between the largest and second-largest vertex projection, relative to
/// the diameter. Zero exactly on edge-normal directions.
pub fn regularity_margin(poly: &Polygon, d: Direction) -> f64 {
    let w = d.omega();
    let (mut first, mut second) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for v in poly.vertices() {
        let s = v.dot(w);
        if s > first {
            second = first;
            first = s;
        } else if s > second {
            second = s;
        }
    }
    (first - second) / poly.diameter()
}

/// True iff the supporting line `x·ω = h_P(ω)` touches a single vertex.
pub fn is_regular(poly: &Polygon, d: Direction, angle_tol: f64) -> bool {
    let w = d.omega();
    let h = support_function(poly, d);
    let tol = angle_tol * poly.diameter();
    poly.vertices().iter().filter(|v| h - v.dot(w) <= tol).count() == 1
}

fn frame_angle(e: Point2, d: Direction) -> f64 {
    e.dot(d.omega()).atan2(e.dot(d.omega_perp()))
}

pub fn vertex_frame(poly: &Polygon, d: Direction) -> Result<VertexFrame> {
    vertex_frame_with_tol(poly, d, DEFAULT_ANGLE_TOL)
}

pub fn vertex_frame_with_tol(poly: &Polygon, d: Direction, angle_tol: f64) -> Result<VertexFrame> {
    if !is_regular(poly, d, angle_tol) {
        return Err(Error::Regularity {
            angle: d.angle(),
            reason: "the supporting line touches an edge".into(),
        });
    }
    let w = d.omega();
    let n = poly.len();
    let i = (0..n)
        .max_by(|&a, &b| poly.vertex(a).dot(w).total_cmp(&poly.vertex(b).dot(w)))
        .expect("polygon has vertices");
    let x0 = poly.vertex(i);
    let p = frame_angle(poly.vertex(i + n - 1) - x0, d);
    let q = frame_angle(poly.vertex(i + 1) - x0, d);
    let theta = 2.0 * PI + q - p;
    let (sp, cp) = p.sin_cos();
    let a = d.omega_perp() * cp + w * sp;
    let a_perp = d.omega_perp() * (-sp) + w * cp;
    Ok(VertexFrame {
        x0,
        vertex_index: i,
        theta,
        p,
        q,
        a,
        a_perp,
    })
}

/// Intersection of the half-planes `{x·ω_i ≤ h_i}`.
///
/// Half-planes are sorted by angle (duplicates keep the tightest bound) and
/// clipped one by one against a large seed box. Vertices closer than `1e-9`
/// times the result's scale are merged and collinear vertices dropped, so
/// redundant constraints never leave a trace in the output.
pub fn hull_from_support(samples: &[SupportSample]) -> Result<Polygon> {
    if samples.len() < 3 {
        return Err(Error::Coverage(format!(
            "need at least 3 support samples, got {}",
            samples.len()
        )));
    }
    if let Some(s) = samples.iter().find(|s| !s.h.is_finite()) {
        return Err(Error::Structure(format!("non-finite support value {s:?}")));
    }

    let mut planes: Vec<(f64, Point2, f64)> = samples
        .iter()
        .map(|s| {
            let a = s.direction.angle().rem_euclid(2.0 * PI);
            (a, s.direction.omega(), s.h)
        })
        .collect();
    planes.sort_by(|a, b| a.0.total_cmp(&b.0));
    planes.dedup_by(|b, a| {
        if (b.0 - a.0).abs() < 1e-12 {
            a.2 = a.2.min(b.2);
            true
        } else {
            false
        }
    });

    let max_gap = planes
        .windows(2)
        .map(|w| w[1].0 - w[0].0)
        .chain(std::iter::once(
            planes[0].0 + 2.0 * PI - planes[planes.len() - 1].0,
        ))
        .fold(0.0, f64::max);
    if planes.len() < 3 || max_gap >= PI - 1e-12 {
        return Err(Error::Coverage(format!(
            "directions leave an angular gap of {max_gap:.4} rad (must be < π)"
        )));
    }

    let hmax = planes.iter().map(|p| p.2.abs()).fold(1.0, f64::max);
    let big = 1e6 * hmax;
    // each vertex carries the line of the edge leaving it
    let mut poly: Vec<(Point2, Line)> = vec![
        (Point2::new(-big, -big), (Point2::new(0.0, -1.0), big)),
        (Point2::new(big, -big), (Point2::new(1.0, 0.0), big)),
        (Point2::new(big, big), (Point2::new(0.0, 1.0), big)),
        (Point2::new(-big, big), (Point2::new(-1.0, 0.0), big)),
    ];
    for &(_, w, h) in &planes {
        poly = clip_half_plane(&poly, (w, h));
        if poly.len() < 3 {
            return Err(Error::Inconsistent(
                "half-plane intersection is empty".into(),
            ));
        }
    }
    if poly.iter().any(|(p, _)| p.x.abs().max(p.y.abs()) >= 0.5 * big) {
        return Err(Error::Coverage("half-plane intersection is unbounded".into()));
    }

    let pts: Vec<Point2> = poly.into_iter().map(|(p, _)| p).collect();
    let scale = pts
        .iter()
        .map(|p| p.x.abs().max(p.y.abs()))
        .fold(hmax, f64::max);
    let merged = simplify_loop(pts, 1e-9 * scale);
    if merged.len() < 3 {
        return Err(Error::Inconsistent(
            "half-plane intersection is degenerate".into(),
        ));
    }
    Polygon::convex(merged)
}

/// `{x : x·w = h}` as `(w, h)`.
type Line = (Point2, f64);

fn line_intersection(a: Line, b: Line) -> Option<Point2> {
    let det = a.0.cross(b.0);
    if det.abs() < 1e-15 {
        return None;
    }
    Some(Point2::new(
        (a.1 * b.0.y - b.1 * a.0.y) / det,
        (a.0.x * b.1 - b.0.x * a.1) / det,
    ))
}

/// Sutherland–Hodgman step; new vertices are exact line intersections, so
/// their accuracy does not depend on the size of the seed box.
fn clip_half_plane(poly: &[(Point2, Line)], cut: Line) -> Vec<(Point2, Line)> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let (a, edge) = poly[i];
        let (b, _) = poly[(i + 1) % n];
        let fa = a.dot(cut.0) - cut.1;
        let fb = b.dot(cut.0) - cut.1;
        if fa <= 0.0 {
            out.push((a, if fa == 0.0 && fb > 0.0 { cut } else { edge }));
        }
        if (fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0) {
            let x = line_intersection(edge, cut).unwrap_or_else(|| a.lerp(b, fa / (fa - fb)));
            // leaving the region starts an edge on the cut line
            out.push((x, if fa < 0.0 { cut } else { edge }));
        }
    }
    out
}

fn simplify_loop(mut pts: Vec<Point2>, tol: f64) -> Vec<Point2> {
    loop {
        let n = pts.len();
        if n < 3 {
            return pts;
        }
        let mut removed = false;
        for i in 0..n {
            let prev = pts[(i + n - 1) % n];
            let cur = pts[i];
            let next = pts[(i + 1) % n];
            let close = cur.dist(next) <= tol;
            let len = prev.dist(next);
            let collinear = len > 0.0 && ((cur - prev).cross(next - prev)).abs() / len <= tol;
            if close || collinear {
                pts.remove(i);
                removed = true;
                break;
            }
        }
        if !removed {
            return pts;
        }
    }
}

/// Symmetric Hausdorff distance between two convex polygonal regions.
///
/// For convex sets the distance to the other region is convex along edges,
/// so the supremum is attained at a vertex.
pub fn hausdorff_distance(p: &Polygon, q: &Polygon) -> f64 {
    let directed = |a: &Polygon, b: &Polygon| {
        a.vertices()
            .iter()
            .map(|&v| b.region_distance(v))
            .fold(0.0, f64::max)
    };
    directed(p, q).max(directed(q, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Polygon {
        Polygon::rectangle(-0.5, -0.5, 0.5, 0.5).unwrap()
    }

    #[test]
    fn direction_pair_has_negative_determinant() {
        for i in 0..16 {
            let d = Direction::new(0.37 * i as f64);
            let (w, wp) = (d.omega(), d.omega_perp());
            assert!((w.norm() - 1.0).abs() < 1e-15);
            assert!((wp.norm() - 1.0).abs() < 1e-15);
            assert!(w.dot(wp).abs() < 1e-15);
            assert!((w.cross(wp) + 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn support_function_examples() {
        let sq = square();
        assert_eq!(support_function(&sq, Direction::new(0.0)), 0.5);
        let h = support_function(&sq, Direction::new(PI / 4.0));
        assert!((h - 0.5f64.sqrt()).abs() < 1e-15);
        let tri = Polygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ])
        .unwrap();
        assert!((support_function(&tri, Direction::new(PI / 2.0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_polygons() {
        let cw = vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(1.0, 0.0),
        ];
        assert!(matches!(Polygon::new(cw), Err(Error::Structure(_))));
        let two = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)];
        assert!(Polygon::new(two).is_err());
        let bowtie = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ];
        assert!(Polygon::new(bowtie).is_err());
        let repeated = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ];
        assert!(Polygon::new(repeated).is_err());
        let dent = vec![
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(1.0, 0.5),
            Point2::new(2.0, 2.0),
            Point2::new(0.0, 2.0),
        ];
        assert!(Polygon::new(dent.clone()).is_ok());
        assert!(Polygon::convex(dent).is_err());
    }

    #[test]
    fn regularity_examples() {
        let sq = square();
        assert!(!is_regular(&sq, Direction::new(0.0), DEFAULT_ANGLE_TOL));
        assert!(is_regular(&sq, Direction::new(PI / 4.0), DEFAULT_ANGLE_TOL));
        assert!(is_regular(&sq, Direction::new(PI / 6.0), DEFAULT_ANGLE_TOL));
        assert_eq!(regularity_margin(&sq, Direction::new(0.0)), 0.0);
        assert!((regularity_margin(&sq, Direction::new(PI / 4.0)) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn frame_at_square_corner() {
        let f = vertex_frame(&square(), Direction::new(PI / 4.0)).unwrap();
        assert!(f.x0.dist(Point2::new(0.5, 0.5)) < 1e-15);
        assert!((f.theta - 1.5 * PI).abs() < 1e-12);
        assert!((f.p + PI / 4.0).abs() < 1e-12);
        assert!((f.q + 0.75 * PI).abs() < 1e-12);
        // a points along the p-edge, which runs straight down from the corner
        assert!(f.a.dist(Point2::new(0.0, -1.0)) < 1e-12);
        assert!((f.a.cross(f.a_perp) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn frame_at_pi_over_three_by_brute_force() {
        let sq = square();
        let d = Direction::new(PI / 3.0);
        let f = vertex_frame(&sq, d).unwrap();
        // brute force: scan angles in the (ω⊥, ω) frame for the edge rays
        let dirs: Vec<f64> = (0..3_600_000)
            .map(|i| -PI + 2.0 * PI * i as f64 / 3_600_000.0)
            .collect();
        let ray_hits = |target: Point2| {
            dirs.iter()
                .copied()
                .min_by(|&a, &b| {
                    let ea = d.omega_perp() * a.cos() + d.omega() * a.sin();
                    let eb = d.omega_perp() * b.cos() + d.omega() * b.sin();
                    ea.dist(target).total_cmp(&eb.dist(target))
                })
                .unwrap()
        };
        // corner (0.5, 0.5) again; incident edges point down and left
        let p_bf = ray_hits(Point2::new(0.0, -1.0));
        let q_bf = ray_hits(Point2::new(-1.0, 0.0));
        assert!((f.p - p_bf).abs() < 1e-5, "{} vs {}", f.p, p_bf);
        assert!((f.q - q_bf).abs() < 1e-5, "{} vs {}", f.q, q_bf);
        assert!((f.p - f.q - (2.0 * PI - f.theta)).abs() < 1e-12);
        assert!((f.p - f.q - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn hexagon_outside_angle() {
        let hex = Polygon::regular(6, 1.0, Point2::default(), 0.1).unwrap();
        for i in 0..50 {
            let d = Direction::new(0.013 + 0.1257 * i as f64);
            if !is_regular(&hex, d, DEFAULT_ANGLE_TOL) {
                continue;
            }
            let f = vertex_frame(&hex, d).unwrap();
            assert!((f.theta - 4.0 * PI / 3.0).abs() < 1e-12);
            assert!(-PI < f.q && f.q < f.p && f.p < 0.0);
        }
    }

    #[test]
    fn frame_rejects_edge_normal() {
        assert!(matches!(
            vertex_frame(&square(), Direction::new(0.0)),
            Err(Error::Regularity { .. })
        ));
    }

    #[test]
    fn hull_examples() {
        let axes: Vec<SupportSample> = Direction::uniform(4)
            .into_iter()
            .map(|direction| SupportSample { direction, h: 0.5 })
            .collect();
        let hull = hull_from_support(&axes).unwrap();
        assert_eq!(hull.len(), 4);
        assert!(hausdorff_distance(&hull, &square()) < 1e-12);

        let eight: Vec<SupportSample> = Direction::uniform(8)
            .into_iter()
            .map(|direction| SupportSample {
                direction,
                h: support_function(&square(), direction),
            })
            .collect();
        let hull = hull_from_support(&eight).unwrap();
        assert_eq!(hull.len(), 4);
        assert!(hausdorff_distance(&hull, &square()) < 1e-12);
    }

    #[test]
    fn hull_triangle_circumscribing_unit_disc() {
        let samples: Vec<SupportSample> = Direction::uniform(3)
            .into_iter()
            .map(|direction| SupportSample { direction, h: 1.0 })
            .collect();
        let hull = hull_from_support(&samples).unwrap();
        assert_eq!(hull.len(), 3);
        // Each vertex solves a 2x2 system ω_i·x = 1, ω_j·x = 1.
        let dirs = Direction::uniform(3);
        let mut expected = Vec::new();
        for i in 0..3 {
            let (a, b) = (dirs[i].omega(), dirs[(i + 1) % 3].omega());
            let det = a.x * b.y - a.y * b.x;
            expected.push(Point2::new((b.y - a.y) / det, (a.x - b.x) / det));
        }
        for e in expected {
            assert!(hull.vertices().iter().any(|v| v.dist(e) < 1e-12));
            assert!((e.norm() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn hull_errors() {
        let half: Vec<SupportSample> = [0.0, 0.5, 1.0]
            .iter()
            .map(|&a| SupportSample {
                direction: Direction::new(a),
                h: 1.0,
            })
            .collect();
        assert!(matches!(hull_from_support(&half), Err(Error::Coverage(_))));
        let empty: Vec<SupportSample> = Direction::uniform(4)
            .into_iter()
            .map(|direction| SupportSample { direction, h: -1.0 })
            .collect();
        assert!(matches!(
            hull_from_support(&empty),
            Err(Error::Inconsistent(_))
        ));
    }

    #[test]
    fn hausdorff_examples() {
        let sq = square();
        assert_eq!(hausdorff_distance(&sq, &sq), 0.0);
        let shifted = sq.translate(Point2::new(0.1, 0.0));
        assert!((hausdorff_distance(&sq, &shifted) - 0.1).abs() < 1e-12);
        let big = Polygon::rectangle(-0.6, -0.6, 0.6, 0.6).unwrap();
        let expected = brute_force_boundary_hausdorff(&sq, &big, 4000);
        assert!((expected - 0.1 * 2f64.sqrt()).abs() < 1e-6);
        assert!((hausdorff_distance(&sq, &big) - expected).abs() < 1e-6);
    }

    fn sample_boundary(p: &Polygon, per_edge: usize) -> Vec<Point2> {
        p.edges()
            .flat_map(|(a, b)| (0..per_edge).map(move |i| a.lerp(b, i as f64 / per_edge as f64)))
            .collect()
    }

    fn brute_force_boundary_hausdorff(p: &Polygon, q: &Polygon, per_edge: usize) -> f64 {
        let sp = sample_boundary(p, per_edge);
        let sq = sample_boundary(q, per_edge);
        let directed = |a: &[Point2], b: &[Point2]| {
            a.iter()
                .map(|x| b.iter().map(|y| x.dist(*y)).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max)
        };
        directed(&sp, &sq).max(directed(&sq, &sp))
    }

    #[test]
    fn edge_normal_scan_counts_edges() {
        let polys = [
            (square(), 10_000usize),
            (Polygon::regular(8, 1.0, Point2::default(), PI / 8.0).unwrap(), 10_000),
            (Polygon::regular(6, 1.0, Point2::default(), PI / 6.0).unwrap(), 12_000),
        ];
        for (p, n) in polys {
            let fails = Direction::uniform(n)
                .into_iter()
                .filter(|&d| !is_regular(&p, d, DEFAULT_ANGLE_TOL))
                .count();
            assert_eq!(fails, p.len());
        }
    }

    #[test]
    fn hull_reproduces_polygon_from_vertex_normals() {
        let hex = Polygon::regular(6, 0.8, Point2::new(0.2, -0.1), 0.3).unwrap();
        let samples: Vec<SupportSample> = (0..hex.len())
            .map(|i| {
                let n = hex.edge_normal(i);
                let direction = Direction::new(n.y.atan2(n.x));
                SupportSample {
                    direction,
                    h: support_function(&hex, direction),
                }
            })
            .collect();
        let hull = hull_from_support(&samples).unwrap();
        assert_eq!(hull.len(), 6);
        for v in hex.vertices() {
            assert!(hull.vertices().iter().any(|w| w.dist(*v) < 1e-9));
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn convex_polygon() -> impl Strategy<Value = Polygon> {
            (3usize..9, prop::collection::vec(0.0f64..1.0, 9), 0.2f64..2.0, -1.0f64..1.0, -1.0f64..1.0)
                .prop_map(|(n, jitter, r, cx, cy)| {
                    // jittered angles on an ellipse stay strictly convex
                    let mut angles: Vec<f64> = (0..n)
                        .map(|i| 2.0 * PI * (i as f64 + 0.8 * jitter[i]) / n as f64)
                        .collect();
                    angles.sort_by(f64::total_cmp);
                    let v = angles
                        .iter()
                        .map(|a| Point2::new(cx + r * a.cos(), cy + 0.6 * r * a.sin()))
                        .collect();
                    Polygon::convex(v).unwrap()
                })
        }

        proptest! {
            #[test]
            fn support_matches_dense_sampling(p in convex_polygon(), phi in 0.0f64..(2.0 * PI)) {
                let d = Direction::new(phi);
                let dense = sample_boundary(&p, 2000)
                    .iter()
                    .map(|x| x.dot(d.omega()))
                    .fold(f64::NEG_INFINITY, f64::max);
                // the vertices are among the samples, so the agreement is exact
                prop_assert!((support_function(&p, d) - dense).abs() <= 1e-12 * p.diameter());
            }

            #[test]
            fn support_is_positively_homogeneous(p in convex_polygon(), phi in 0.0f64..(2.0 * PI), s in 0.1f64..5.0) {
                let d = Direction::new(phi);
                let scaled = p.scale_about(Point2::default(), s);
                let lhs = support_function(&scaled, d);
                let rhs = s * support_function(&p, d);
                prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
            }

            #[test]
            fn frame_invariants_hold(p in convex_polygon(), phi in 0.0f64..(2.0 * PI)) {
                let d = Direction::new(phi);
                prop_assume!(is_regular(&p, d, DEFAULT_ANGLE_TOL));
                let f = vertex_frame(&p, d).unwrap();
                prop_assert!(PI < f.theta && f.theta < 2.0 * PI);
                prop_assert!(-PI < f.q && f.q < f.p && f.p < 0.0);
                prop_assert!((f.p - f.q - (2.0 * PI - f.theta)).abs() < 1e-12);
            }

            #[test]
            fn hull_contains_polygon(p in convex_polygon(), n in 3usize..40, phase in 0.0f64..1.0) {
                let samples: Vec<SupportSample> = (0..n)
                    .map(|i| {
                        let direction = Direction::new(phase + 2.0 * PI * i as f64 / n as f64);
                        SupportSample { direction, h: support_function(&p, direction) }
                    })
                    .collect();
                let hull = hull_from_support(&samples).unwrap();
                for v in p.vertices() {
                    prop_assert!(hull.region_distance(*v) <= 1e-9);
                }
            }

            #[test]
            fn hausdorff_is_symmetric(p in convex_polygon(), q in convex_polygon()) {
                let a = hausdorff_distance(&p, &q);
                let b = hausdorff_distance(&q, &p);
                prop_assert_eq!(a, b);
            }
        }
    }
}
