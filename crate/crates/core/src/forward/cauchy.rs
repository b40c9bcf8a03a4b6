//! Boundary measurements: voltage and current sampled along ∂Ω.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::fem::FieldSolution;
use crate::forward::scene::BoundaryCurrent;
use crate::geometry::Point2;

/// Sampled Cauchy data on a closed counter-clockwise loop.
///
/// Consecutive nodes are joined by straight segments, including the closing
/// segment from the last node back to the first. A node may be repeated at a
/// corner of ∂Ω so that each side carries its own value of the current, which
/// is discontinuous there; the zero-length segment between the copies
/// contributes nothing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyData {
    pub boundary_nodes: Vec<Point2>,
    pub u: Vec<f64>,
    pub g: Vec<f64>,
    pub weights: Vec<f64>,
    pub scene_digest: String,
    /// Standard deviation of additive noise on `u`, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_std: Option<f64>,
}

/// Trapezoidal weights for the closed polyline through `nodes`.
pub fn trapezoid_weights(nodes: &[Point2]) -> Vec<f64> {
    let n = nodes.len();
    (0..n)
        .map(|i| 0.5 * (nodes[(i + n - 1) % n].dist(nodes[i]) + nodes[i].dist(nodes[(i + 1) % n])))
        .collect()
}

impl CauchyData {
    pub fn new(boundary_nodes: Vec<Point2>, u: Vec<f64>, g: Vec<f64>, scene_digest: String) -> Result<Self> {
        let weights = trapezoid_weights(&boundary_nodes);
        let cd = Self {
            boundary_nodes,
            u,
            g,
            weights,
            scene_digest,
            noise_std: None,
        };
        cd.validate()?;
        Ok(cd)
    }

    pub fn len(&self) -> usize {
        self.boundary_nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundary_nodes.is_empty()
    }

    /// Checks lengths, finiteness, positive weights and counter-clockwise order.
    pub fn validate(&self) -> Result<()> {
        let n = self.boundary_nodes.len();
        if n < 3 {
            return Err(Error::Data(format!("need at least 3 boundary nodes, got {n}")));
        }
        if self.u.len() != n || self.g.len() != n || self.weights.len() != n {
            return Err(Error::Data("boundary arrays have mismatched lengths".into()));
        }
        let finite = self.boundary_nodes.iter().all(|p| p.is_finite())
            && self.u.iter().chain(&self.g).chain(&self.weights).all(|v| v.is_finite());
        if !finite {
            return Err(Error::Data("non-finite boundary data".into()));
        }
        if self.weights.iter().any(|&w| w < 0.0) {
            return Err(Error::Data("negative quadrature weight".into()));
        }
        if self.signed_area() <= 0.0 {
            return Err(Error::Data("boundary loop must be counter-clockwise".into()));
        }
        Ok(())
    }

    pub fn signed_area(&self) -> f64 {
        let p = &self.boundary_nodes;
        let n = p.len();
        0.5 * (0..n).map(|i| p[i].cross(p[(i + 1) % n])).sum::<f64>()
    }

    /// `∮ g` by the stored weights.
    pub fn total_flux(&self) -> f64 {
        self.g.iter().zip(&self.weights).map(|(g, w)| g * w).sum()
    }

    /// `∮ |u|` scale used for tolerances.
    pub fn perimeter(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn max_abs_u(&self) -> f64 {
        self.u.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Segments `(i, i+1)` with their outward unit normal; zero-length ones are skipped.
    pub fn segments(&self) -> impl Iterator<Item = (usize, usize, Point2)> + '_ {
        let n = self.len();
        (0..n).filter_map(move |i| {
            let j = (i + 1) % n;
            let t = self.boundary_nodes[j] - self.boundary_nodes[i];
            let len = t.norm();
            (len > 0.0).then(|| (i, j, t.perp_cw() * (1.0 / len)))
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("cauchy data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cd: Self = serde_json::from_str(text)?;
        cd.validate()?;
        Ok(cd)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Reads the boundary trace of `sol` and pairs it with the prescribed current.
pub fn extract_cauchy(sol: &FieldSolution, current: &BoundaryCurrent, scene_digest: &str) -> Result<CauchyData> {
    let mesh = &sol.mesh;
    let edges = &mesh.boundary_edges;
    if edges.is_empty() {
        return Err(Error::Data("mesh has no boundary".into()));
    }
    let mut nodes = Vec::with_capacity(edges.len() + 64);
    let mut u = Vec::with_capacity(nodes.capacity());
    let mut g = Vec::with_capacity(nodes.capacity());
    // start at the first edge of a side of Ω so that corners fall between runs
    let n = edges.len();
    let start = (0..n)
        .find(|&i| edges[i].omega_edge != edges[(i + n - 1) % n].omega_edge)
        .unwrap_or(0);
    for s in 0..n {
        let e = edges[(start + s) % n];
        let next = edges[(start + s + 1) % n];
        nodes.push(mesh.nodes[e.a]);
        u.push(sol.u[e.a]);
        g.push(current.eval(mesh.nodes[e.a], e.normal));
        if next.omega_edge != e.omega_edge || next.a != e.b {
            nodes.push(mesh.nodes[e.b]);
            u.push(sol.u[e.b]);
            g.push(current.eval(mesh.nodes[e.b], e.normal));
        }
    }
    CauchyData::new(nodes, u, g, scene_digest.to_string())
}
