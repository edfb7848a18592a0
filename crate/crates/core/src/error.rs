use thiserror::Error;

/// Errors produced by the q-Vandermonde kernels.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QvError {
    /// `q = 0`: the solver path needs `q^{-1}` and `V_0` is singular for `n >= 3`.
    #[error("q = 0 is not supported")]
    ZeroQ,
    /// `q^j = 1` for the reported (smallest) `j`, so `(q;q)_j` vanishes.
    #[error("q is degenerate: q^{j} = 1 (j = {j})")]
    DegenerateQ { j: usize },
    #[error("index ({i}, {j}) out of range for dimension {n}")]
    IndexError { i: usize, j: usize, n: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("parse error at position {position}: {message}")]
    ParseError { position: usize, message: String },
    #[error("diagonal factor D[{0}] is zero")]
    SingularD(usize),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("dimension {n} exceeds the densification cap {cap}")]
    DenseCapExceeded { n: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, QvError>;
