use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("structure constants are not associative (e{i} e{j} e{k}, component {q}, residual {residual:e})")]
    NonAssociative { i: usize, j: usize, k: usize, q: usize, residual: f64 },
    #[error("bad unit: {0}")]
    BadUnit(String),
    #[error("malformed algebra spec: {0}")]
    MalformedSpec(String),
    #[error("operands belong to different algebras")]
    AlgebraMismatch,
    #[error("algebra is not a division algebra")]
    NotDivisionAlgebra,
    #[error("element is singular (not invertible)")]
    SingularElement,
    #[error("norm is only a pseudo-norm")]
    PseudoNorm,
    #[error("rescale factor must be positive")]
    NonPositiveFactor,
    #[error("unknown basis map `{0}`")]
    UnknownBasisMap(String),
    #[error("expected {expected} arguments, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("composition requires identity slot maps")]
    UnsupportedSlotMap,
    #[error("map is not skew-symmetric (residual {residual:e})")]
    NotSkew { residual: f64 },
    #[error("size {n} exceeds the limit {max}")]
    TooLarge { n: usize, max: usize },
    #[error("basis-map family cannot express the map (residual {residual:e})")]
    DeficientFamily { residual: f64 },
    #[error("non-finite value encountered")]
    NonFinite,
    #[error("form is not integrable (symmetry residual {residual:e})")]
    NotIntegrable { residual: f64 },
    #[error("quadrature did not converge within {panels} panels")]
    NoConvergence { panels: usize },
    #[error("form is not certified integrable")]
    NotCertified,
    #[error("path is not closed")]
    NotClosed,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
