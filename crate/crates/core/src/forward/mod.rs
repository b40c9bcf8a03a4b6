//! Synthetic measurement generation.

pub mod cauchy;
pub mod disc;
pub mod fem;
pub mod mesh;
pub mod scene;

pub use cauchy::{extract_cauchy, CauchyData};
pub use disc::{analytic_disc_cauchy, disc_trace_error, DiscSolution};
pub use fem::{solve_transmission, FieldSolution};
pub use mesh::{build_mesh, Mesh, Region};
pub use scene::{BoundaryCurrent, Scene, SceneFile};

/// Default mesh size used by the CLI and the test suite.
pub const DEFAULT_H: f64 = 0.08;
/// Default number of grading levels towards each inclusion vertex.
pub const DEFAULT_GRADING: u32 = 4;
