//! Reconstruction of a polygonal conductivity inclusion from a single
//! boundary measurement with exponentially growing harmonic probes.
//!
//! The crate is split along the pipeline:
//!
//! * [`geometry`]: convex polygons, support functions, vertex frames and
//!   hull assembly from support samples;
//! * [`forward`]: synthetic data from an interface-fitted P1 finite element
//!   solve, plus a concentric-disc analytic oracle;
//! * [`probe`]: the probe `e^{τx·(ω+iω⊥)}`, the boundary indicator and its
//!   inclusion-side counterpart;
//! * [`spectrum`]: corner exponents of the transmission problem and power-law
//!   decay fits;
//! * [`reconstruction`]: per-direction support estimates and hull recovery.

pub mod error;
pub mod forward;
pub mod geometry;
pub mod probe;
pub mod quadrature;
pub mod reconstruction;
pub mod special;
pub mod spectrum;

pub use error::{Error, Result};
pub use geometry::{Direction, Point2, Polygon, SupportSample, VertexFrame};
