//! Structured linear algebra for the q-Vandermonde matrix `V_q[i][j] = q^{ij}`.
//!
//! The crate builds the explicit `V_q = L D L^T` factorization, where
//! `L = P_q T_q P_q^{-1}` is a diagonal similarity of the lower-triangular
//! Toeplitz matrix `T_q` with first column `1/(q;q)_k`, and uses the closed
//! form `(T_q)^{-1} = D_{q^{-1}} T_{q^{-1}} D_q` to solve `V_q x = b` in
//! O(n^2) with only diagonal scalings and Toeplitz matvecs.
//!
//! Everything is generic over [`scalar::Scalar`]: exact rationals for
//! bit-exact identity checks, and `Complex64` for the DFT regime
//! `q = exp(-2 pi i / n)`.
//!
//! ```
//! use qvand::prelude::*;
//!
//! let q = Rational::from_ratio(3, 5);
//! let f = factorize(q.clone(), 6, 0.0)?;
//! let b: Vec<Rational> = (1..=6).map(Rational::from_i64).collect();
//! let x = solve(&f, &b)?.x;
//! assert_eq!(build_vandermonde(&q, 6)?.matvec(&x)?, b);
//! # Ok::<(), qvand::QvError>(())
//! ```
//!
//! The `book/` directory at the repository root walks through the pieces;
//! its code listings are compiled as doctests of this crate.

pub mod bench;
pub mod cli;
pub mod dense;
pub mod error;
pub mod factor;
pub mod qcore;
pub mod scalar;
pub mod solve;
pub mod structmat;
pub mod verify;

#[cfg(doctest)]
mod book;

pub use error::{QvError, Result};

pub mod prelude {
    pub use crate::dense::DenseMatrix;
    pub use crate::error::{QvError, Result};
    pub use crate::factor::{banded_product, build_vandermonde, factorize, QVFactorization, Residual};
    pub use crate::qcore::{check_not_in_a_n, gaussian_binomial, qpochhammer, QPochTable, DEFAULT_EPS};
    pub use crate::scalar::{Backend, Complex64, Rational, Scalar};
    pub use crate::solve::{apply_l_inverse, apply_lt_inverse, dense_solve_oracle, solve, SolveReport};
    pub use crate::structmat::{
        apply_shift_power, build_dq_power, build_pq, build_tq, invert_tq, toeplitz_product,
        DiagonalOp, LowerToeplitz, ShiftPower,
    };
}
