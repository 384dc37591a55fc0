use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("non-finite symbol value at t={t}, x={x:?}, xi={xi:?}")]
    NonFiniteSample { t: f64, x: Vec<f64>, xi: Vec<f64> },
    #[error("no frequency lattice points with |xi| >= {threshold}; enlarge the grid or lower the threshold")]
    EmptyEllipticityRegion { threshold: f64 },
    #[error("weight must be strictly positive; entry {index} is {value}")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("power iteration stalled after {iterations} iterations: estimate {estimate:.6e}, residual {residual:.3e}")]
    NonConvergence { iterations: usize, estimate: f64, residual: f64 },
    #[error("time interval reversed: t'={t1} < t={t0}")]
    TimeOrder { t0: f64, t1: f64 },
    #[error("t={t} outside [{lo}, {hi}]")]
    OutsideRange { t: f64, lo: f64, hi: f64 },
    #[error("reference solver: {0}")]
    Reference(String),
    #[error("{op} supports dim {supported} only, grid has dim {dim}")]
    UnsupportedDim { op: &'static str, dim: usize, supported: usize },
    #[error("rate fit needs at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("atlas: {0}")]
    Atlas(String),
    #[error("{0}")]
    Invalid(String),
}
