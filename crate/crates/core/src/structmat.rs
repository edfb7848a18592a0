//! Structured operators: lower-triangular Toeplitz matrices stored by their
//! first column, diagonal matrices, and powers of the down-shift `S`.
//!
//! Lower-triangular Toeplitz matrices of size `n` are the truncated power
//! series in `S`, so they commute and their product is the truncated
//! convolution of first columns. `T_q` has first column `1/(q;q)_k`; its
//! inverse has the closed form `T_{q^{-1}} (I - S)`, which equals the
//! similarity `D_{q^{-1}} T_{q^{-1}} D_q`.
//!
//! ```
//! use qvand::qcore::QPochTable;
//! use qvand::scalar::{Rational, Scalar};
//! use qvand::structmat::{build_tq, invert_tq, toeplitz_product, LowerToeplitz};
//!
//! let tbl = QPochTable::build(Rational::from_i64(2), 3, 0.0).unwrap();
//! let tq = build_tq(&tbl);
//! let inv = invert_tq(&tbl).unwrap();
//! assert_eq!(toeplitz_product(&tq, &inv).unwrap(), LowerToeplitz::identity(3));
//! ```

use std::cell::RefCell;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::dense::DenseMatrix;
use crate::error::{QvError, Result};
use crate::qcore::QPochTable;
use crate::scalar::{Complex64, Scalar};

/// Dimension at which float matvecs switch to FFT convolution.
pub const DEFAULT_FFT_THRESHOLD: usize = 512;

/// Selects the matvec kernel. Exact backends always use the direct loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatvecStrategy {
    pub fft_threshold: usize,
}

impl MatvecStrategy {
    pub const BASELINE: Self = Self {
        fft_threshold: usize::MAX,
    };

    pub fn with_threshold(fft_threshold: usize) -> Self {
        Self { fft_threshold }
    }
}

impl Default for MatvecStrategy {
    fn default() -> Self {
        Self {
            fft_threshold: DEFAULT_FFT_THRESHOLD,
        }
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(QvError::DimensionMismatch { expected, found })
    }
}

/// Lower-triangular Toeplitz operator, `A[i][j] = col[i - j]` for `i >= j`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerToeplitz<S> {
    col: Vec<S>,
    unit: bool,
}

impl<S: Scalar> LowerToeplitz<S> {
    pub fn from_column(col: Vec<S>) -> Self {
        assert!(!col.is_empty(), "dimension must be positive");
        let unit = col[0] == S::one();
        Self { col, unit }
    }

    pub fn identity(n: usize) -> Self {
        let mut col = vec![S::zero(); n];
        col[0] = S::one();
        Self::from_column(col)
    }

    pub fn n(&self) -> usize {
        self.col.len()
    }

    pub fn column(&self) -> &[S] {
        &self.col
    }

    pub fn into_column(self) -> Vec<S> {
        self.col
    }

    /// Whether the main diagonal is 1.
    pub fn is_unit(&self) -> bool {
        self.unit
    }

    pub fn entry(&self, i: usize, j: usize) -> S {
        if i >= j {
            self.col[i - j].clone()
        } else {
            S::zero()
        }
    }

    pub fn matvec(&self, x: &[S]) -> Result<Vec<S>> {
        self.matvec_with(x, MatvecStrategy::default())
    }

    pub fn matvec_with(&self, x: &[S], strategy: MatvecStrategy) -> Result<Vec<S>> {
        check_len(self.n(), x.len())?;
        if self.n() >= strategy.fft_threshold {
            if let Some(mut full) = S::fast_convolve(&self.col, x) {
                full.truncate(self.n());
                return Ok(full);
            }
        }
        Ok(self.matvec_direct(x))
    }

    /// `y[i] = sum_{j <= i} col[i - j] x[j]`, the O(n^2) loop.
    pub fn matvec_direct(&self, x: &[S]) -> Vec<S> {
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut acc = S::zero();
                for j in 0..=i {
                    if !x[j].is_zero() {
                        acc += &self.col[i - j].mul_ref(&x[j]);
                    }
                }
                acc
            })
            .collect()
    }

    /// Product with the transpose (an upper Toeplitz matrix), computed as a
    /// correlation against the same first column.
    pub fn matvec_transposed(&self, x: &[S]) -> Result<Vec<S>> {
        self.matvec_transposed_with(x, MatvecStrategy::default())
    }

    pub fn matvec_transposed_with(&self, x: &[S], strategy: MatvecStrategy) -> Result<Vec<S>> {
        let n = self.n();
        check_len(n, x.len())?;
        if n >= strategy.fft_threshold {
            let reversed: Vec<S> = x.iter().rev().cloned().collect();
            if let Some(full) = S::fast_convolve(&self.col, &reversed) {
                return Ok((0..n).map(|j| full[n - 1 - j].clone()).collect());
            }
        }
        Ok(self.matvec_transposed_direct(x))
    }

    pub fn matvec_transposed_direct(&self, x: &[S]) -> Vec<S> {
        let n = self.n();
        (0..n)
            .map(|j| {
                let mut acc = S::zero();
                for i in j..n {
                    if !x[i].is_zero() {
                        acc += &self.col[i - j].mul_ref(&x[i]);
                    }
                }
                acc
            })
            .collect()
    }

    /// Right multiplication by `I - S`: `c[k] - c[k - 1]`.
    pub fn times_one_minus_shift(&self) -> Self {
        let mut col = self.col.clone();
        for k in (1..col.len()).rev() {
            col[k] -= &self.col[k - 1];
        }
        Self::from_column(col)
    }

    pub fn dense(&self) -> DenseMatrix<S> {
        let n = self.n();
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                m.set(i, j, self.col[i - j].clone());
            }
        }
        m
    }
}

/// Diagonal matrix stored as its diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalOp<S> {
    diag: Vec<S>,
}

impl<S: Scalar> DiagonalOp<S> {
    pub fn new(diag: Vec<S>) -> Self {
        Self { diag }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(vec![S::one(); n])
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[S] {
        &self.diag
    }

    pub fn apply(&self, x: &[S]) -> Result<Vec<S>> {
        check_len(self.n(), x.len())?;
        Ok(self.diag.iter().zip(x).map(|(d, v)| d.mul_ref(v)).collect())
    }

    /// Entrywise inverse; `SingularD(i)` names the first zero entry.
    pub fn inverse(&self) -> Result<Self> {
        self.diag
            .iter()
            .enumerate()
            .map(|(i, d)| d.try_recip().ok_or(QvError::SingularD(i)))
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        check_len(self.n(), other.n())?;
        Ok(Self::new(
            self.diag
                .iter()
                .zip(&other.diag)
                .map(|(a, b)| a.mul_ref(b))
                .collect(),
        ))
    }

    pub fn dense(&self) -> DenseMatrix<S> {
        DenseMatrix::from_diagonal(&self.diag)
    }
}

/// `S^j` at dimension `n`: ones on sub-diagonal `j`, zero once `j >= n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftPower {
    pub n: usize,
    pub j: usize,
}

impl ShiftPower {
    pub fn apply<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>> {
        check_len(self.n, x.len())?;
        Ok(apply_shift_power(self.j, x))
    }

    pub fn dense<S: Scalar>(&self) -> DenseMatrix<S> {
        let mut m = DenseMatrix::zeros(self.n, self.n);
        for i in self.j..self.n {
            m.set(i, i - self.j, S::one());
        }
        m
    }
}

/// `y[i] = x[i - j]` for `i >= j`, zero otherwise.
pub fn apply_shift_power<S: Scalar>(j: usize, x: &[S]) -> Vec<S> {
    let n = x.len();
    (0..n)
        .map(|i| if i >= j { x[i - j].clone() } else { S::zero() })
        .collect()
}

/// `T_q`, first column `1/(q;q)_k`.
pub fn build_tq<S: Scalar>(tbl: &QPochTable<S>) -> LowerToeplitz<S> {
    LowerToeplitz::from_column(tbl.inverses().to_vec())
}

/// `P_q = diag((q;q)_i)`.
pub fn build_pq<S: Scalar>(tbl: &QPochTable<S>) -> DiagonalOp<S> {
    DiagonalOp::new(tbl.values().to_vec())
}

/// `D_{q^m} = diag(q^{m i})`. `q = 0` is rejected for every `m`.
pub fn build_dq_power<S: Scalar>(q: &S, m: i64, n: usize) -> Result<DiagonalOp<S>> {
    let base = q.try_recip().ok_or(QvError::ZeroQ)?;
    let base = if m < 0 { base } else { q.clone() };
    let step = base.powu(m.unsigned_abs() as usize);
    let mut diag = Vec::with_capacity(n);
    let mut acc = S::one();
    for i in 0..n {
        if i > 0 {
            acc = acc.mul_ref(&step);
        }
        diag.push(acc.clone());
    }
    Ok(DiagonalOp::new(diag))
}

/// Product of two lower-triangular Toeplitz operators, truncated at `n`.
pub fn toeplitz_product<S: Scalar>(
    a: &LowerToeplitz<S>,
    b: &LowerToeplitz<S>,
) -> Result<LowerToeplitz<S>> {
    check_len(a.n(), b.n())?;
    Ok(LowerToeplitz::from_column(a.matvec_direct(b.column())))
}

/// `(T_q)^{-1} = T_{q^{-1}} (I - S)`, first column
/// `c[0] = 1`, `c[k] = 1/(q^{-1};q^{-1})_k - 1/(q^{-1};q^{-1})_{k-1}`.
pub fn invert_tq<S: Scalar>(tbl: &QPochTable<S>) -> Result<LowerToeplitz<S>> {
    let recip = tbl.reciprocal()?;
    Ok(build_tq(&recip).times_one_minus_shift())
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plans(size: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(size), p.plan_fft_inverse(size))
    })
}

/// Full linear convolution of two complex sequences via zero-padded FFT.
pub fn fft_convolve(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let len = a.len() + b.len() - 1;
    let size = len.next_power_of_two();
    let (fwd, inv) = plans(size);
    let zero = Complex64::new(0.0, 0.0);
    let mut fa = a.to_vec();
    fa.resize(size, zero);
    let mut fb = b.to_vec();
    fb.resize(size, zero);
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inv.process(&mut fa);
    let scale = 1.0 / size as f64;
    fa.truncate(len);
    for x in &mut fa {
        *x *= scale;
    }
    fa
}
