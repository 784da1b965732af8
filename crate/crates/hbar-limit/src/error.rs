use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("hbar must be positive and finite, got {0}")]
    InvalidHbar(f64),
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("only one degree of freedom is supported, got {0}")]
    UnsupportedDof(usize),
    #[error("operands live on different spaces (hbar {left_hbar}, dim {left_dim} vs hbar {right_hbar}, dim {right_dim})")]
    SpaceMismatch { left_hbar: f64, left_dim: usize, right_hbar: f64, right_dim: usize },
    #[error("matrix is {rows}x{cols}, space dimension is {dim}")]
    ShapeMismatch { rows: usize, cols: usize, dim: usize },
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("resolvent needs a non-real spectral parameter")]
    RealSpectralParameter,
    #[error("operator is not self-adjoint (relative residual {0:e})")]
    NotSelfAdjoint(f64),
    #[error("point ({x}, {p}) lies outside the sampled window of half-width {half_width}")]
    OutsideWindow { x: f64, p: f64, half_width: f64 },
    #[error("{op} is not available for {form}")]
    Unsupported { op: &'static str, form: String },
    #[error("trajectory left the radius {bound} at t = {time}")]
    FlowEscaped { time: f64, bound: f64 },
    #[error("dimension policy asks for {needed} levels, above the cap of {cap}")]
    DimensionPolicy { needed: usize, cap: usize },
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("invalid parameter `{key}`: {reason}")]
    InvalidParameter { key: String, reason: String },
    #[error("unknown parameter `{key}` for {kind}; valid keys: {valid}")]
    UnknownParameter { key: String, kind: String, valid: String },
    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),
}
