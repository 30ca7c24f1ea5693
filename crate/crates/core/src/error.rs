use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("coincident points (distance {distance:e})")]
    CoincidentPoints { distance: f64 },
    #[error("point lies outside the half plane: {0}")]
    SideViolation(String),
    #[error("quadrature did not converge within {budget} evaluations (error estimate {estimate:e})")]
    QuadratureNonConvergence { budget: usize, estimate: f64 },
    #[error("zero-length argument")]
    ZeroLength,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("window error: {0}")]
    Window(String),
    #[error("degenerate mesh: {0}")]
    DegenerateMesh(String),
    #[error("degenerate wavenumber pair: {0}")]
    DegeneratePair(String),
    #[error("unsupported operator: {0}")]
    UnsupportedOperator(String),
    #[error("singular matrix (pivot {pivot:e}, scale {scale:e})")]
    SingularMatrix { pivot: f64, scale: f64 },
    #[error("GMRES did not reach tolerance {tol:e} (residual {residual:e})")]
    NotConverged { tol: f64, residual: f64 },
    #[error("source lies on or too close to the surface (distance {distance:e})")]
    SourceOnSurface { distance: f64 },
    #[error("target too close to the surface (distance {distance:e}, minimum {minimum:e})")]
    TooClose { distance: f64, minimum: f64 },
    #[error("grazing incidence (alpha = {alpha:e})")]
    GrazingIncidence { alpha: f64 },
    #[error("probe mesh under-resolves the field: {0}")]
    MeshTooCoarse(String),
    #[error("measurement segment height {c} does not clear the surfaces (max f = {f_plus})")]
    SegmentTooLow { c: f64, f_plus: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
