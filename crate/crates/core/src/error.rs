use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown flux `{0}`")]
    UnknownFlux(String),

    #[error("flux `{flux}`: {message}")]
    FluxParameter { flux: String, message: String },

    #[error("flux `{flux}` returned a non-finite value at x = {x:?}, k = {k}")]
    NonFiniteFlux { flux: String, x: [f64; 2], k: f64 },

    #[error("x = {0:?} is a declared singular point of the flux")]
    SingularPoint([f64; 2]),

    #[error("adaptive quadrature on [{a}, {b}] did not reach tolerance {tol:e} within depth {depth}")]
    QuadratureNonConvergent { a: f64, b: f64, tol: f64, depth: u32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("bad time window: {0}")]
    BadWindow(String),

    #[error("CFL violation: {0}")]
    CflViolation(String),

    #[error("solution blew up at t = {t}: |u| = {value} exceeds {limit}")]
    BlowUp { t: f64, value: f64, limit: f64 },

    #[error("scheme `{scheme}` does not support flux `{flux}`")]
    UnsupportedScheme { scheme: String, flux: String },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("test-function support exceeds the field domain: {0}")]
    SupportExceedsDomain(String),

    #[error("missing time levels: {0}")]
    MissingTimeLevels(String),

    #[error("cone is empty at the first stored level (R - t N = {0})")]
    EmptyCone(f64),

    #[error("sample point x = {x:?}, t = {t} lies next to a detected discontinuity")]
    SampleNearShock { x: [f64; 2], t: f64 },

    #[error("config error at {context}: {message}")]
    Config { context: String, message: String },

    #[error("run directory {0} already exists (use --force to overwrite)")]
    RunExists(PathBuf),

    #[error("field file {path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
