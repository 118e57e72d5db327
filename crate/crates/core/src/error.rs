use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("point lies on the discontinuity (within tolerance)")]
    OnDiscontinuity,

    #[error("point outside element")]
    OutOfElement,

    #[error("iteration did not converge: {0}")]
    NonConvergence(String),

    #[error("Schwarz-Christoffel parameter solve failed: residual {residual:.3e}")]
    ScSolverFailure { residual: f64 },

    #[error("prevertex crowding detected (min gap {gap:.3e} rad); simplify the polygon")]
    Crowding { gap: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("crack growth direction undefined (K_I = K_II = 0)")]
    NoDirection,

    #[error("parameter outside validity range: {0}")]
    OutOfValidity(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
