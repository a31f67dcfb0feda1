use thiserror::Error;

/// Errors produced by the laboratory's numerical routines.
#[derive(Debug, Error)]
pub enum LabError {
    /// An argument lies outside the set on which the object is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A documented precondition of an operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The geometric region is empty, disconnected or otherwise unusable.
    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),

    /// A stencil arm reaches past the available boundary information.
    #[error("stencil needs boundary data: {0}")]
    NeedsBoundary(String),

    /// The iterative solver hit its sweep limit.
    #[error("solver did not converge after {iterations} sweeps (residual {residual:e})")]
    Nonconvergence {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    /// A probe scale is below what the grid can resolve.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// A probe ray or point left the domain.
    #[error("geometry error: {0}")]
    Geometry(String),

    /// No constants satisfy the constraint system.
    #[error("infeasible constraint system; binding constraint: {constraint}")]
    Infeasible { constraint: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl LabError {
    /// Short machine-readable tag, used in structured error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            LabError::Domain(_) => "domain",
            LabError::Precondition(_) => "precondition",
            LabError::DegenerateDomain(_) => "degenerate_domain",
            LabError::NeedsBoundary(_) => "needs_boundary",
            LabError::Nonconvergence { .. } => "nonconvergence",
            LabError::Resolution(_) => "resolution",
            LabError::Geometry(_) => "geometry",
            LabError::Infeasible { .. } => "infeasible",
            LabError::Parse(_) => "parse",
            LabError::Io(_) => "io",
            LabError::Csv(_) => "csv",
            LabError::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
