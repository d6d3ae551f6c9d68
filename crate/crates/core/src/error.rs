use thiserror::Error;

use crate::complex::Simplex;

pub type Result<T, E = HdxError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HdxError {
    #[error("complex has no top simplices")]
    EmptyComplex,
    #[error("top simplices have mixed dimensions ({first} and {other})")]
    MixedDimension { first: isize, other: isize },
    #[error("simplex {0:?} repeats a vertex")]
    InvalidSimplex(Vec<u32>),
    #[error("top simplex {0} listed twice")]
    DuplicateTopSimplex(Simplex),
    #[error("weight {index} is not positive")]
    NonPositiveWeight { index: usize },
    #[error("expected {expected} custom weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("weights do not fit the exact integer representation (common denominator too large)")]
    WeightOverflow,
    #[error("simplex {0} is not a cell of the complex")]
    SimplexNotInComplex(Simplex),
    #[error("dimension {k} outside the valid range [{min}, {max}]")]
    BadDimension { k: isize, min: isize, max: isize },
    #[error("no differential leaves dimension {k} (the top dimension)")]
    TopDimension { k: isize },
    #[error("localizing a {k}-cochain at a {j}-simplex needs k - j - 1 >= 0")]
    BadDimensions { k: isize, j: isize },
    #[error("cochain belongs to a different complex")]
    ComplexMismatch,
    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("graph has a single vertex and no positive eigenvalue")]
    SingleVertex,
    #[error("link of {0} has a disconnected 1-skeleton")]
    DisconnectedLink(Simplex),
    #[error("vertex subset must be nonempty and proper")]
    EmptyOrFullSubset,
    #[error("enumeration of 2^{log2} elements exceeds the cap of {cap}")]
    CapExceeded { log2: u32, cap: u64 },
    #[error("operation is undefined for the zero cochain")]
    ZeroCochain,
    #[error("epsilon must lie in (0, 1], got {0}")]
    BadEpsilon(String),
    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),
    #[error("bad arguments: {0}")]
    BadArgs(String),
    #[error("unsupported field order q = {0} (supported: 2, 3)")]
    UnsupportedQ(u32),
    #[error("no top cells survived sampling")]
    EmptyTopLevel,
    #[error("k = {0} is not supported here")]
    BadK(isize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}
