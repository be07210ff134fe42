use thiserror::Error;

/// Errors raised by the analytic modules, the grid machinery and the oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("level n = {n} is not bound (s_n = {s})")]
    NotBound { n: usize, s: f64 },

    #[error("singular point at ({x1}, {x2})")]
    SingularPoint { x1: f64, x2: f64 },

    #[error("field supplies derivatives up to order {available}, order {required} is required")]
    MissingDerivative { required: u8, available: u8 },

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("Gram matrix is ill-conditioned (condition number {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("diagonal entries c[{i}][{i}] and c[{j}][{j}] coincide ({value})")]
    DegenerateDiagonal { i: usize, j: usize, value: f64 },

    #[error("index {n} is not admissible: {reason}")]
    Inadmissible { n: usize, reason: String },

    #[error("potential is not separable for a = {a} (requires a = -0.5)")]
    NotSeparable { a: f64 },

    #[error("image norm vanished (ratio {ratio:.3e} to the input norm)")]
    NullImage { ratio: f64 },

    #[error("eigensolver did not converge after {iterations} iterations (worst residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("valid mask is empty")]
    EmptyMask,

    #[error("potential is not finite at grid node ({x1}, {x2})")]
    SingularNode { x1: f64, x2: f64 },

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("convergence study needs at least {need} levels, got {got}")]
    InsufficientLevels { got: usize, need: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
