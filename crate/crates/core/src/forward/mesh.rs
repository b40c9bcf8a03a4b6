//! Interface-fitted triangulation of the domain.
//!
//! The mesh has two zones:
//!
//! * an outer annulus of rings that are scaled copies of the subdivided
//!   boundary of Ω, joined by quads split along alternating diagonals. Every
//!   ring has the same node count, so the discrete operator there is nearly
//!   invariant under the rotational symmetry of the boundary sampling;
//! * an inner zone, bounded by the innermost ring, triangulated by a
//!   constrained Delaunay triangulation whose constraints are the ring and
//!   the subdivided inclusion boundary, with geometric grading (ratio 1/2)
//!   towards every inclusion vertex.
//!
//! Errors produced near ∂Ω are strongly amplified by the exponentially growing
//! probes, which is why the region next to the boundary is kept structured.

use std::f64::consts::PI;

use spade::{ConstrainedDelaunayTriangulation, Triangulation};

use crate::error::{Error, Result};
use crate::forward::scene::Scene;
use crate::geometry::{Point2, Polygon};

/// Ratio of target tangential spacing on ∂Ω to `h_target`; the annulus quads
/// then have diagonals no longer than `h_target`.
pub(crate) const TANGENTIAL_FACTOR: f64 = 1.0 / 1.4;
/// Radial spacing of the rings relative to the local tangential spacing.
const RADIAL_ASPECT: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Inclusion,
    Background,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryEdge {
    pub a: usize,
    pub b: usize,
    pub normal: Point2,
    /// Index of the edge of Ω containing this mesh edge.
    pub omega_edge: usize,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub nodes: Vec<Point2>,
    /// Counter-clockwise node triples.
    pub triangles: Vec<[usize; 3]>,
    pub regions: Vec<Region>,
    /// Closed loop around ∂Ω, counter-clockwise.
    pub boundary_edges: Vec<BoundaryEdge>,
    /// Nodes on ∂D in counter-clockwise order, starting at the first inclusion vertex.
    pub interface_loop: Vec<usize>,
    /// Node index of each inclusion vertex.
    pub inclusion_vertex_nodes: Vec<usize>,
}

impl Mesh {
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let (pa, pb, pc) = (self.nodes[a], self.nodes[b], self.nodes[c]);
        0.5 * (pb - pa).cross(pc - pa)
    }

    pub fn centroid(&self, t: usize) -> Point2 {
        let [a, b, c] = self.triangles[t];
        (self.nodes[a] + self.nodes[b] + self.nodes[c]) * (1.0 / 3.0)
    }

    pub fn diameter_of(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let (pa, pb, pc) = (self.nodes[a], self.nodes[b], self.nodes[c]);
        pa.dist(pb).max(pb.dist(pc)).max(pc.dist(pa))
    }

    /// Smallest interior angle over all triangles, in radians.
    pub fn min_angle(&self) -> f64 {
        let mut best = PI;
        for &[a, b, c] in &self.triangles {
            let p = [self.nodes[a], self.nodes[b], self.nodes[c]];
            for i in 0..3 {
                let u = p[(i + 1) % 3] - p[i];
                let v = p[(i + 2) % 3] - p[i];
                let ang = u.cross(v).abs().atan2(u.dot(v));
                best = best.min(ang);
            }
        }
        best
    }

    /// Smallest triangle diameter among triangles with a node within `radius` of `p`.
    pub fn min_diameter_near(&self, p: Point2, radius: f64) -> f64 {
        (0..self.triangles.len())
            .filter(|&t| self.triangles[t].iter().any(|&i| self.nodes[i].dist(p) <= radius))
            .map(|t| self.diameter_of(t))
            .fold(f64::INFINITY, f64::min)
    }

    /// Boundary node sequence following the loop.
    pub fn boundary_loop(&self) -> Vec<usize> {
        self.boundary_edges.iter().map(|e| e.a).collect()
    }

    /// Sorted, deduplicated list of undirected edges.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = self
            .triangles
            .iter()
            .flat_map(|&[a, b, c]| [(a, b), (b, c), (c, a)])
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        e.sort_unstable();
        e.dedup();
        e
    }

    /// Mirror image under `y ↦ −y`, with orientation restored.
    pub fn reflect_x(&self) -> Mesh {
        let nodes = self.nodes.iter().map(|p| Point2::new(p.x, -p.y)).collect();
        let triangles = self.triangles.iter().map(|&[a, b, c]| [a, c, b]).collect();
        let mut boundary_edges: Vec<BoundaryEdge> = self
            .boundary_edges
            .iter()
            .map(|e| BoundaryEdge {
                a: e.b,
                b: e.a,
                normal: Point2::new(e.normal.x, -e.normal.y),
                omega_edge: e.omega_edge,
            })
            .collect();
        boundary_edges.reverse();
        let mut interface_loop = self.interface_loop.clone();
        interface_loop.reverse();
        interface_loop.rotate_right(1);
        Mesh {
            nodes,
            triangles,
            regions: self.regions.clone(),
            boundary_edges,
            interface_loop,
            inclusion_vertex_nodes: self.inclusion_vertex_nodes.clone(),
        }
    }
}

/// Gauge of `x` with respect to the convex polygon `omega` scaled about `c`.
fn gauge(omega: &Polygon, c: Point2, x: Point2) -> f64 {
    (0..omega.len())
        .map(|i| {
            let n = omega.edge_normal(i);
            (x - c).dot(n) / (omega.vertex(i) - c).dot(n)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Parameters along an inclusion edge of length `len`: uniform spacing at
/// most `h`, plus `depth` halvings of the first spacing towards each end.
fn edge_params(len: f64, h: f64, depth: u32) -> (Vec<f64>, f64) {
    let n_mid = ((len / h).ceil() as usize).max(1);
    let he = len / n_mid as f64;
    let mut t: Vec<f64> = (1..n_mid).map(|i| he * i as f64).collect();
    for j in 1..=depth {
        let d = he * 0.5f64.powi(j as i32);
        t.push(d);
        t.push(len - d);
    }
    t.sort_by(f64::total_cmp);
    t.dedup_by(|b, a| (*b - *a).abs() < 1e-9 * he);
    (t, he)
}

/// Builds the interface-fitted mesh for `scene`.
///
/// `h_target` bounds the element diameter away from the inclusion corners;
/// `grading_depth` is the number of halvings of the local size towards each
/// inclusion vertex.
pub fn build_mesh(scene: &Scene, h_target: f64, grading_depth: u32) -> Result<Mesh> {
    if !(h_target > 0.0) || !h_target.is_finite() {
        return Err(Error::Config(format!("h_target must be positive, got {h_target}")));
    }
    let omega = scene.omega();
    let incl = scene.inclusion();
    let c = omega.centroid();

    // Boundary sampling: m_e points per edge of Ω.
    let h_t = h_target * TANGENTIAL_FACTOR;
    let mut boundary = Vec::new();
    let mut boundary_edge_of = Vec::new();
    for (e, (a, b)) in omega.edges().enumerate() {
        let m = ((a.dist(b) / h_t).ceil() as usize).max(1);
        for i in 0..m {
            boundary.push(a.lerp(b, i as f64 / m as f64));
            boundary_edge_of.push(e);
        }
    }
    let m_ring = boundary.len();
    if m_ring > 200_000 {
        return Err(Error::Config("h_target too small for this domain".into()));
    }
    let r_mean = boundary.iter().map(|p| p.dist(c)).sum::<f64>() / m_ring as f64;
    let delta = omega.perimeter() / (m_ring as f64 * r_mean);

    let g_max = incl
        .vertices()
        .iter()
        .map(|&v| gauge(omega, c, v))
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    if g_max >= 1.0 - 1e-9 {
        return Err(Error::Geometry("inclusion touches the outer boundary".into()));
    }
    let s_in = (1.3 * g_max)
        .max(g_max + 6.0 * delta)
        .min(g_max + 0.5 * (1.0 - g_max));
    let ratio = 1.0 + RADIAL_ASPECT * delta;
    let n_rings = ((1.0 / s_in).ln() / ratio.ln()).ceil().max(1.0) as usize;
    let ring_scale = |j: usize| -> f64 {
        if j == n_rings {
            1.0
        } else {
            s_in.powf(1.0 - j as f64 / n_rings as f64)
        }
    };
    let ring_point = |j: usize, i: usize| -> Point2 {
        if j == n_rings {
            boundary[i]
        } else {
            c + (boundary[i] - c) * ring_scale(j)
        }
    };

    // Inner zone point set.
    let inner_poly = omega.scale_about(c, s_in);
    let h_in = omega.perimeter() * s_in / m_ring as f64;
    let mut pts: Vec<Point2> = (0..m_ring).map(|i| ring_point(0, i)).collect();
    let mut constraints: Vec<[usize; 2]> = (0..m_ring).map(|i| [i, (i + 1) % m_ring]).collect();

    let nv = incl.len();
    let mut interface_pts = Vec::new();
    let mut vertex_pos = Vec::with_capacity(nv);
    let mut local_h = vec![f64::INFINITY; nv];
    for (k, (a, b)) in incl.edges().enumerate() {
        let len = a.dist(b);
        let (ts, he) = edge_params(len, h_in, grading_depth);
        local_h[k] = local_h[k].min(he);
        local_h[(k + 1) % nv] = local_h[(k + 1) % nv].min(he);
        vertex_pos.push(interface_pts.len());
        interface_pts.push(a);
        for t in ts {
            interface_pts.push(a.lerp(b, t / len));
        }
    }
    let iface_start = pts.len();
    let n_iface = interface_pts.len();
    pts.extend(interface_pts.iter().copied());
    constraints.extend((0..n_iface).map(|i| [iface_start + i, iface_start + (i + 1) % n_iface]));

    // Graded rings around each inclusion vertex, kept off the edges.
    if grading_depth > 0 {
        for k in 0..nv {
            let v = incl.vertex(k);
            let prev = incl.vertex(k + nv - 1);
            let next = incl.vertex(k + 1);
            let a_next = (next - v).y.atan2((next - v).x);
            let a_prev = (prev - v).y.atan2((prev - v).x);
            // interior sector runs ccw from the next edge to the previous edge
            let interior = (a_prev - a_next).rem_euclid(2.0 * PI);
            let sectors = [(a_next, interior), (a_prev, 2.0 * PI - interior)];
            for j in 0..=grading_depth {
                let r = local_h[k] * 0.5f64.powi(j as i32);
                for &(start, width) in &sectors {
                    let n_sub = ((width / (PI / 4.0)).round() as usize).max(2);
                    for s in 1..n_sub {
                        let ang = start + width * s as f64 / n_sub as f64;
                        pts.push(v + Point2::new(ang.cos(), ang.sin()) * r);
                    }
                }
            }
        }
    }

    // Background triangular lattice centred on c.
    let row = h_in * 3f64.sqrt() / 2.0;
    let extent = inner_poly
        .vertices()
        .iter()
        .map(|p| p.dist(c))
        .fold(0.0, f64::max);
    let nj = (extent / row).ceil() as i64 + 1;
    let ni = (extent / h_in).ceil() as i64 + 2;
    let grade_clear = |p: Point2| {
        (0..nv).all(|k| {
            let need = if grading_depth > 0 { 1.5 * local_h[k] } else { 0.0 };
            p.dist(incl.vertex(k)) >= need
        })
    };
    for j in -nj..=nj {
        let shift = if j.rem_euclid(2) == 1 { 0.5 * h_in } else { 0.0 };
        for i in -ni..=ni {
            let p = c + Point2::new(i as f64 * h_in + shift, j as f64 * row);
            if gauge(omega, c, p) >= s_in {
                continue;
            }
            if inner_poly.boundary_distance(p) < 0.7 * h_in {
                continue;
            }
            if incl.boundary_distance(p) < 0.6 * h_in {
                continue;
            }
            if !grade_clear(p) {
                continue;
            }
            pts.push(p);
        }
    }

    let spade_pts: Vec<spade::Point2<f64>> = pts.iter().map(|p| spade::Point2::new(p.x, p.y)).collect();
    let cdt = ConstrainedDelaunayTriangulation::<spade::Point2<f64>>::bulk_load_cdt(spade_pts, constraints)
        .map_err(|e| Error::Mesh(format!("triangulation failed: {e:?}")))?;
    if cdt.num_vertices() != pts.len() {
        return Err(Error::Mesh("duplicate points in the inner zone".into()));
    }

    // The ring is only convex up to rounding, so the triangulation of its
    // convex hull may contain slivers outside the constraint loop. They are
    // found by flooding from the hull across non-constraint edges.
    let mut outside = vec![false; cdt.num_all_faces()];
    let mut stack: Vec<_> = Vec::new();
    for face in cdt.inner_faces() {
        for e in face.adjacent_edges() {
            if e.rev().face().is_outer() && !e.is_constraint_edge() {
                stack.push(face);
            }
        }
    }
    while let Some(face) = stack.pop() {
        let id = face.fix().index();
        if outside[id] {
            continue;
        }
        outside[id] = true;
        for e in face.adjacent_edges() {
            if e.is_constraint_edge() {
                continue;
            }
            if let Some(next) = e.rev().face().as_inner() {
                if !outside[next.fix().index()] {
                    stack.push(next);
                }
            }
        }
    }

    let mut nodes = pts;
    let mut triangles = Vec::new();
    for face in cdt.inner_faces() {
        if outside[face.fix().index()] {
            continue;
        }
        let vs = face.vertices();
        let mut tri = [vs[0].fix().index(), vs[1].fix().index(), vs[2].fix().index()];
        let area = (nodes[tri[1]] - nodes[tri[0]]).cross(nodes[tri[2]] - nodes[tri[0]]);
        if area < 0.0 {
            tri.swap(1, 2);
        }
        triangles.push(tri);
    }

    // Annulus.
    let n_inner = nodes.len();
    let idx = |j: usize, i: usize| -> usize {
        let i = i % m_ring;
        if j == 0 {
            i
        } else {
            n_inner + (j - 1) * m_ring + i
        }
    };
    for j in 1..=n_rings {
        for i in 0..m_ring {
            nodes.push(ring_point(j, i));
        }
    }
    // parity counted from the start of each side keeps the pattern periodic
    // under the symmetry of a regular Ω whatever the per-side count
    let mut local = vec![0usize; m_ring];
    for i in 1..m_ring {
        if boundary_edge_of[i] == boundary_edge_of[i - 1] {
            local[i] = local[i - 1] + 1;
        }
    }
    for j in 0..n_rings {
        for i in 0..m_ring {
            let (a, b, cc, d) = (idx(j, i), idx(j, i + 1), idx(j + 1, i + 1), idx(j + 1, i));
            // outer ring lies to the right of the inner ring's ccw direction
            if (local[i] + j) % 2 == 0 {
                triangles.push([a, cc, b]);
                triangles.push([a, d, cc]);
            } else {
                triangles.push([a, d, b]);
                triangles.push([b, d, cc]);
            }
        }
    }
    for t in triangles.iter_mut() {
        let area = (nodes[t[1]] - nodes[t[0]]).cross(nodes[t[2]] - nodes[t[0]]);
        if area < 0.0 {
            t.swap(1, 2);
        }
    }

    let regions = triangles
        .iter()
        .map(|&[a, b, cc]| {
            let centroid = (nodes[a] + nodes[b] + nodes[cc]) * (1.0 / 3.0);
            if incl.contains(centroid) {
                Region::Inclusion
            } else {
                Region::Background
            }
        })
        .collect();

    let boundary_edges = (0..m_ring)
        .map(|i| BoundaryEdge {
            a: idx(n_rings, i),
            b: idx(n_rings, i + 1),
            normal: omega.edge_normal(boundary_edge_of[i]),
            omega_edge: boundary_edge_of[i],
        })
        .collect();

    let interface_loop: Vec<usize> = (0..n_iface).map(|i| iface_start + i).collect();
    let inclusion_vertex_nodes = vertex_pos.iter().map(|&p| iface_start + p).collect();

    let mesh = Mesh {
        nodes,
        triangles,
        regions,
        boundary_edges,
        interface_loop,
        inclusion_vertex_nodes,
    };
    if let Some(t) = (0..mesh.triangles.len()).find(|&t| mesh.triangle_area(t) <= 0.0) {
        return Err(Error::Mesh(format!("degenerate triangle {t}")));
    }
    Ok(mesh)
}
