use thiserror::Error;

/// Errors raised by body construction, integration, balancing and the CLI.
#[derive(Debug, Error)]
pub enum FunkError {
    #[error("the zero vector has no Minkowski value")]
    ZeroVector,

    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("point {point:?} is not interior: L = {value}, allowed at most {limit}")]
    InteriorViolation {
        point: Vec<f64>,
        value: f64,
        limit: f64,
    },

    #[error("metric tensor is not positive definite at direction {direction:?} (min eigenvalue {min_eigenvalue:e})")]
    Regularity {
        direction: Vec<f64>,
        min_eigenvalue: f64,
    },

    #[error("derivatives of order {required} are not available analytically (body provides {available}); enable finite-difference mode")]
    DerivativeOrder { required: usize, available: usize },

    #[error("Cartan tensor fails y^k C_ijk = 0 at {direction:?}: residual {residual:e}")]
    CartanConsistency { direction: Vec<f64>, residual: f64 },

    #[error("multi-index order {order} exceeds the cap {cap}")]
    OrderCap { order: usize, cap: usize },

    #[error("point {point:?} lies outside the Taylor validity region (L(q) = {forward}, L(-q) = {backward}, limit {limit})")]
    OutsideTaylorDomain {
        point: Vec<f64>,
        forward: f64,
        backward: f64,
        limit: f64,
    },

    #[error("root finding failed along {direction:?}: {reason}")]
    RootFinding { direction: Vec<f64>, reason: String },

    #[error("balancing did not converge after {iterations} iterations (|grad r| = {grad_norm:e})")]
    NotConverged { iterations: usize, grad_norm: f64 },

    #[error("Monte Carlo acceptance rate {0:e} is below 1e-3; bounding box too loose")]
    BoundingBox(f64),

    #[error("finite-difference step {0:e} underflows at the evaluation point")]
    StepUnderflow(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl FunkError {
    /// Short machine-readable tag used on the CLI diagnostic stream.
    pub fn kind(&self) -> &'static str {
        match self {
            FunkError::ZeroVector => "zero_vector",
            FunkError::InvalidBody(_) => "invalid_body",
            FunkError::DimensionMismatch { .. } => "dimension_mismatch",
            FunkError::UnsupportedDimension(_) => "unsupported_dimension",
            FunkError::InteriorViolation { .. } => "interior_violation",
            FunkError::Regularity { .. } => "regularity",
            FunkError::DerivativeOrder { .. } => "derivative_order",
            FunkError::CartanConsistency { .. } => "cartan_consistency",
            FunkError::OrderCap { .. } => "order_cap",
            FunkError::OutsideTaylorDomain { .. } => "outside_taylor_domain",
            FunkError::RootFinding { .. } => "root_finding",
            FunkError::NotConverged { .. } => "not_converged",
            FunkError::BoundingBox(_) => "bounding_box",
            FunkError::StepUnderflow(_) => "step_underflow",
            FunkError::InvalidParameter(_) => "invalid_parameter",
            FunkError::Config(_) => "config",
            FunkError::Io(_) => "io",
            FunkError::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, FunkError>;
