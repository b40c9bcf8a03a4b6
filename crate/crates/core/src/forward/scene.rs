//! Experiment description: domain, inclusion, contrast and driving current.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{Point2, Polygon};

/// Prescribed Neumann current on the outer boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCurrent {
    /// `g = ν·d`, the flux of the uniform field `d·x`.
    Linear { direction: Point2 },
    /// `g = cos(nθ)` with `θ` the polar angle about `center`.
    Mode { n: u32, center: Point2 },
}

impl BoundaryCurrent {
    pub fn eval(&self, x: Point2, normal: Point2) -> f64 {
        match *self {
            BoundaryCurrent::Linear { direction } => normal.dot(direction),
            BoundaryCurrent::Mode { n, center } => {
                let r = x - center;
                (n as f64 * r.y.atan2(r.x)).cos()
            }
        }
    }

    /// True when `g` is constant along each straight boundary edge.
    pub fn is_piecewise_constant(&self) -> bool {
        matches!(self, BoundaryCurrent::Linear { .. })
    }

    /// Mirror image under `y ↦ −y`.
    pub fn reflect_x(&self) -> Self {
        match *self {
            BoundaryCurrent::Linear { direction } => BoundaryCurrent::Linear {
                direction: Point2::new(direction.x, -direction.y),
            },
            BoundaryCurrent::Mode { n, center } => BoundaryCurrent::Mode {
                n,
                center: Point2::new(center.x, -center.y),
            },
        }
    }
}

/// ∮ g ds over a polygon, 8-point Gauss–Legendre per edge.
pub fn boundary_integral(poly: &Polygon, current: &BoundaryCurrent) -> f64 {
    let (nodes, weights) = crate::quadrature::gauss_legendre(8);
    let mut total = 0.0;
    for (i, (a, b)) in poly.edges().enumerate() {
        let len = a.dist(b);
        let nrm = poly.edge_normal(i);
        for (s, w) in nodes.iter().zip(&weights) {
            total += 0.5 * len * w * current.eval(a.lerp(b, 0.5 * (s + 1.0)), nrm);
        }
    }
    total
}

/// A validated experiment: conductivity `k` on the inclusion, 1 elsewhere.
#[derive(Debug, Clone)]
pub struct Scene {
    omega: Polygon,
    inclusion: Polygon,
    k: f64,
    current: BoundaryCurrent,
    satisfies_restriction: bool,
    margin: f64,
}

impl Scene {
    /// `k = 1` is accepted on purpose: it is the "no inclusion" control run.
    pub fn new(omega: Polygon, inclusion: Polygon, k: f64, current: BoundaryCurrent) -> Result<Self> {
        if !omega.is_convex() {
            return Err(Error::Config("domain polygon must be convex".into()));
        }
        if !inclusion.is_convex() {
            return Err(Error::Config("inclusion polygon must be convex".into()));
        }
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::Config(format!("conductivity contrast must be positive, got {k}")));
        }
        if let BoundaryCurrent::Linear { direction } = current {
            if !direction.is_finite() || direction.norm() == 0.0 {
                return Err(Error::Config("linear current needs a nonzero direction".into()));
            }
        }
        let inside = inclusion.vertices().iter().all(|&v| omega.contains(v));
        let margin = omega.boundary_separation(&inclusion);
        if !inside || margin <= 1e-6 * omega.diameter() {
            return Err(Error::Geometry(
                "inclusion must lie strictly inside the domain".into(),
            ));
        }
        let flux = boundary_integral(&omega, &current);
        let scale = omega.perimeter();
        if flux.abs() > 1e-9 * scale {
            return Err(Error::Data(format!(
                "prescribed current is not compatible: ∮g = {flux:.3e}"
            )));
        }
        let satisfies_restriction = inclusion.diameter() < margin;
        Ok(Self {
            omega,
            inclusion,
            k,
            current,
            satisfies_restriction,
            margin,
        })
    }

    /// Ω = regular 64-gon of circumradius 3, D = [−½, ½]², k = 2, g = ν·(1, 0).
    pub fn default_square() -> Self {
        SceneFile::default_square()
            .build()
            .expect("bundled default scene is valid")
    }

    /// Concentric discs approximated by regular polygons, driven by `cos(nθ)`.
    pub fn concentric_disc(
        r_out: f64,
        rho: f64,
        k: f64,
        n: u32,
        outer_segments: usize,
        inner_segments: usize,
    ) -> Result<Self> {
        if !(0.0 < rho && rho < r_out) {
            return Err(Error::Geometry(format!(
                "need 0 < rho < R_out, got rho = {rho}, R_out = {r_out}"
            )));
        }
        let omega = Polygon::regular(outer_segments, r_out, Point2::default(), 0.0)?;
        let inclusion = Polygon::regular(inner_segments, rho, Point2::default(), 0.0)?;
        Self::new(
            omega,
            inclusion,
            k,
            BoundaryCurrent::Mode {
                n,
                center: Point2::default(),
            },
        )
    }

    pub fn omega(&self) -> &Polygon {
        &self.omega
    }

    pub fn inclusion(&self) -> &Polygon {
        &self.inclusion
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn current(&self) -> &BoundaryCurrent {
        &self.current
    }

    /// Whether `diam D < dist(D, ∂Ω)` holds.
    pub fn satisfies_restriction(&self) -> bool {
        self.satisfies_restriction
    }

    /// `dist(D, ∂Ω)`.
    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn with_k(&self, k: f64) -> Result<Self> {
        Self::new(self.omega.clone(), self.inclusion.clone(), k, self.current)
    }

    pub fn translate(&self, s: Point2) -> Result<Self> {
        let current = match self.current {
            BoundaryCurrent::Mode { n, center } => BoundaryCurrent::Mode { n, center: center + s },
            c => c,
        };
        Self::new(self.omega.translate(s), self.inclusion.translate(s), self.k, current)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum OmegaSpec {
    RegularPolygon {
        n: usize,
        circumradius: f64,
        center: [f64; 2],
    },
    Polygon {
        vertices: Vec<[f64; 2]>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclusionSpec {
    pub vertices: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CurrentSpec {
    Linear { direction: [f64; 2] },
    Mode { n: u32 },
}

/// On-disk scene document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneFile {
    pub omega: OmegaSpec,
    pub inclusion: InclusionSpec,
    pub k: f64,
    pub current: CurrentSpec,
}

impl SceneFile {
    pub fn default_square() -> Self {
        Self {
            omega: OmegaSpec::RegularPolygon {
                n: 64,
                circumradius: 3.0,
                center: [0.0, 0.0],
            },
            inclusion: InclusionSpec {
                vertices: vec![[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]],
            },
            k: 2.0,
            current: CurrentSpec::Linear {
                direction: [1.0, 0.0],
            },
        }
    }

    pub fn build(&self) -> Result<Scene> {
        let omega = match &self.omega {
            OmegaSpec::RegularPolygon {
                n,
                circumradius,
                center,
            } => Polygon::regular(*n, *circumradius, (*center).into(), 0.0),
            OmegaSpec::Polygon { vertices } => {
                Polygon::new(vertices.iter().map(|&v| v.into()).collect())
            }
        }
        .map_err(|e| Error::Config(format!("domain: {e}")))?;
        let inclusion = Polygon::new(self.inclusion.vertices.iter().map(|&v| v.into()).collect())
            .map_err(|e| Error::Config(format!("inclusion: {e}")))?;
        let current = match self.current {
            CurrentSpec::Linear { direction } => BoundaryCurrent::Linear {
                direction: direction.into(),
            },
            CurrentSpec::Mode { n } => BoundaryCurrent::Mode {
                n,
                center: omega.centroid(),
            },
        };
        Scene::new(omega, inclusion, self.k, current)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }

    /// SHA-256 of the compact JSON form; stable under re-serialization.
    pub fn digest(&self) -> String {
        let compact = serde_json::to_string(self).expect("scene serializes");
        hex::encode(Sha256::digest(compact.as_bytes()))
    }
}
