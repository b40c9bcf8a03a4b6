use thiserror::Error;

/// Errors raised anywhere in the forward/inverse pipeline.
///
/// Variants are grouped by the stage that can raise them so that the CLI can
/// map them onto its exit-code contract.
#[derive(Debug, Error)]
pub enum Error {
    /// A polygon or other structural input violates its invariants.
    #[error("invalid structure: {0}")]
    Structure(String),

    /// A direction is not regular with respect to a polygon.
    #[error("direction {angle} rad is not regular: {reason}")]
    Regularity { angle: f64, reason: String },

    /// Half-plane samples do not bound a region.
    #[error("insufficient angular coverage: {0}")]
    Coverage(String),

    /// Half-plane samples have an empty intersection.
    #[error("inconsistent support samples: {0}")]
    Inconsistent(String),

    /// Scene geometry is degenerate (e.g. inclusion touches the outer boundary).
    #[error("geometry error: {0}")]
    Geometry(String),

    /// Scene or experiment configuration is invalid.
    #[error("configuration error: {0}")]
    Config(String),

    /// Measurement data are malformed or incompatible.
    #[error("data error: {0}")]
    Data(String),

    /// An iterative method failed to converge.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// An exponent would overflow double precision.
    #[error("range error: exponent {exponent:.3} exceeds {limit}; shift t closer to the data")]
    Range { exponent: f64, limit: f64 },

    /// The mesh does not resolve a requested curve.
    #[error("mesh error: {0}")]
    Mesh(String),

    /// Every indicator sample sits below the noise floor.
    #[error("no usable signal: {0}")]
    Signal(String),

    /// A fit window has too few samples.
    #[error("fit window error: {0}")]
    Window(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
