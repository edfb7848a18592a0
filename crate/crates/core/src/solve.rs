//! Solving `V_q x = b` in O(n^2) from the factorization.
//!
//! With `L = P_q T_q P_q^{-1}` and `T_q^{-1} = D_{q^{-1}} T_{q^{-1}} D_q`,
//!
//! ```text
//! L^{-1}   = P_q D_{q^{-1}} T_{q^{-1}} D_q P_q^{-1}
//! L^{-T}   = P_q^{-1} D_q T_{q^{-1}}^T D_{q^{-1}} P_q
//! x        = L^{-T} D^{-1} L^{-1} b
//! ```
//!
//! so a solve is eight diagonal scalings, one diagonal inversion and two
//! Toeplitz matvecs. No triangular substitution is performed.
//!
//! ```
//! use qvand::factor::factorize;
//! use qvand::scalar::{Rational, Scalar};
//! use qvand::solve::solve;
//!
//! let f = factorize(Rational::from_i64(2), 2, 0.0).unwrap();
//! let report = solve(&f, &[Rational::from_i64(1), Rational::from_i64(0)]).unwrap();
//! assert_eq!(report.x, vec![Rational::from_i64(2), Rational::from_i64(-1)]);
//! ```

use malachite_base::num::arithmetic::traits::Lcm;
use malachite_nz::integer::Integer;
use malachite_nz::natural::Natural;
use serde::Serialize;

use crate::dense::DenseMatrix;
use crate::error::{QvError, Result};
use crate::factor::{build_vandermonde, QVFactorization};
use crate::scalar::{Backend, Complex64, Rational, Scalar};
use crate::structmat::DiagonalOp;

/// Work performed by one solve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CostCounters {
    pub toeplitz_matvecs: usize,
    pub diagonal_scalings: usize,
    pub diagonal_inversions: usize,
    pub substitutions: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport<S> {
    pub x: Vec<S>,
    pub backend: Backend,
    /// `||V x - b||_2 / ||b||_2`, float backend only.
    pub residual_norm: Option<f64>,
    pub cost_counters: CostCounters,
}

/// Serialized form: `x` as scalar strings; `residual_norm` omitted when absent.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReportJson {
    pub x: Vec<String>,
    pub backend: Backend,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_norm: Option<f64>,
    pub cost_counters: CostCounters,
}

impl<S: Scalar> SolveReport<S> {
    pub fn to_json(&self) -> SolveReportJson {
        SolveReportJson {
            x: self.x.iter().map(Scalar::to_text).collect(),
            backend: self.backend,
            residual_norm: self.residual_norm,
            cost_counters: self.cost_counters,
        }
    }
}

fn scale<S: Scalar>(d: &DiagonalOp<S>, x: &[S], counters: &mut CostCounters) -> Result<Vec<S>> {
    counters.diagonal_scalings += 1;
    d.apply(x)
}

fn check_rhs<S: Scalar>(f: &QVFactorization<S>, b: &[S]) -> Result<()> {
    if b.len() == f.n() {
        Ok(())
    } else {
        Err(QvError::DimensionMismatch {
            expected: f.n(),
            found: b.len(),
        })
    }
}

fn l_inverse<S: Scalar>(
    f: &QVFactorization<S>,
    b: &[S],
    counters: &mut CostCounters,
) -> Result<Vec<S>> {
    check_rhs(f, b)?;
    let y = scale(f.p_inv(), b, counters)?;
    let y = scale(f.dq(), &y, counters)?;
    counters.toeplitz_matvecs += 1;
    let y = f.tq_recip().matvec(&y)?;
    let y = scale(f.dq_inv(), &y, counters)?;
    scale(f.p(), &y, counters)
}

fn lt_inverse<S: Scalar>(
    f: &QVFactorization<S>,
    b: &[S],
    counters: &mut CostCounters,
) -> Result<Vec<S>> {
    check_rhs(f, b)?;
    let y = scale(f.p(), b, counters)?;
    let y = scale(f.dq_inv(), &y, counters)?;
    counters.toeplitz_matvecs += 1;
    let y = f.tq_recip().matvec_transposed(&y)?;
    let y = scale(f.dq(), &y, counters)?;
    scale(f.p_inv(), &y, counters)
}

/// `L^{-1} b`.
pub fn apply_l_inverse<S: Scalar>(f: &QVFactorization<S>, b: &[S]) -> Result<Vec<S>> {
    l_inverse(f, b, &mut CostCounters::default())
}

/// `L^{-T} b`.
pub fn apply_lt_inverse<S: Scalar>(f: &QVFactorization<S>, b: &[S]) -> Result<Vec<S>> {
    lt_inverse(f, b, &mut CostCounters::default())
}

/// `x = L^{-T} D^{-1} L^{-1} b`.
pub fn solve<S: Scalar>(f: &QVFactorization<S>, b: &[S]) -> Result<SolveReport<S>> {
    check_rhs(f, b)?;
    let mut counters = CostCounters::default();
    let y = l_inverse(f, b, &mut counters)?;
    counters.diagonal_inversions += 1;
    let y = f.d_inv()?.apply(&y)?;
    let x = lt_inverse(f, &y, &mut counters)?;

    let residual_norm = match S::BACKEND {
        Backend::Exact => None,
        Backend::Complex => Some(relative_residual(f.q(), &x, b)?),
    };
    Ok(SolveReport {
        x,
        backend: S::BACKEND,
        residual_norm,
        cost_counters: counters,
    })
}

/// `||V_q x - b||_2 / ||b||_2`, with `V_q x` formed row by row in O(n^2)
/// without storing `V_q`.
pub fn relative_residual<S: Scalar>(q: &S, x: &[S], b: &[S]) -> Result<f64> {
    let n = b.len();
    if x.len() != n {
        return Err(QvError::DimensionMismatch {
            expected: n,
            found: x.len(),
        });
    }
    let mut num = 0.0;
    let mut row_step = S::one();
    for bi in b {
        let mut entry = S::one();
        let mut acc = S::zero();
        for (j, xj) in x.iter().enumerate() {
            if j > 0 {
                entry = entry.mul_ref(&row_step);
            }
            acc += &entry.mul_ref(xj);
        }
        let m = (acc - bi.clone()).magnitude();
        num += m * m;
        row_step = row_step.mul_ref(q);
    }
    let den: f64 = b.iter().map(|v| v.magnitude().powi(2)).sum();
    Ok((num / den).sqrt())
}

/// Dense Gaussian elimination used as an independent reference.
pub trait DenseOracle: Scalar {
    fn dense_solve(v: &DenseMatrix<Self>, b: &[Self]) -> Result<Vec<Self>>;
}

pub fn dense_solve_oracle<S: DenseOracle>(v: &DenseMatrix<S>, b: &[S]) -> Result<Vec<S>> {
    S::dense_solve(v, b)
}

/// Convenience: build `V_q` and solve it densely.
pub fn dense_solve_vandermonde<S: DenseOracle>(q: &S, b: &[S]) -> Result<Vec<S>> {
    let v = build_vandermonde(q, b.len())?;
    dense_solve_oracle(&v, b)
}

fn check_square<S: Scalar>(v: &DenseMatrix<S>, b: &[S]) -> Result<()> {
    if v.rows() != v.cols() {
        return Err(QvError::DimensionMismatch {
            expected: v.rows(),
            found: v.cols(),
        });
    }
    if b.len() != v.rows() {
        return Err(QvError::DimensionMismatch {
            expected: v.rows(),
            found: b.len(),
        });
    }
    Ok(())
}

/// Fraction-free (Bareiss) elimination over the integers.
///
/// Each row of `[V | b]` is first scaled by the lcm of its denominators;
/// after elimination every division is exact in `Z`, and the final back
/// substitution is done in rationals.
impl DenseOracle for Rational {
    fn dense_solve(v: &DenseMatrix<Self>, b: &[Self]) -> Result<Vec<Self>> {
        check_square(v, b)?;
        let n = v.rows();
        let mut rows: Vec<Vec<Integer>> = (0..n)
            .map(|i| {
                let entries: Vec<&Rational> = v.row(i).iter().chain(std::iter::once(&b[i])).collect();
                let lcm = entries
                    .iter()
                    .fold(Natural::from(1u32), |acc, r| acc.lcm(r.denominator_ref()));
                entries
                    .into_iter()
                    .map(|r| {
                        let scaled = Integer::from(r.numerator_ref() * (&lcm / r.denominator_ref()));
                        if *r < 0u32 {
                            -scaled
                        } else {
                            scaled
                        }
                    })
                    .collect()
            })
            .collect();

        let mut prev = Integer::from(1u32);
        for k in 0..n {
            let pivot = (k..n)
                .find(|&i| rows[i][k] != 0u32)
                .ok_or(QvError::SingularMatrix)?;
            rows.swap(k, pivot);
            let (head, tail) = rows.split_at_mut(k + 1);
            let pr = &head[k];
            for row in tail.iter_mut() {
                for j in (k + 1)..=n {
                    let val = &pr[k] * &row[j] - &row[k] * &pr[j];
                    row[j] = val / &prev;
                }
                row[k] = Integer::from(0u32);
            }
            prev = rows[k][k].clone();
        }

        let mut x = vec![Rational::from(0u32); n];
        for i in (0..n).rev() {
            let mut acc = Rational::from(&rows[i][n]);
            for j in (i + 1)..n {
                acc -= Rational::from(&rows[i][j]) * &x[j];
            }
            x[i] = acc / Rational::from(&rows[i][i]);
        }
        Ok(x)
    }
}

/// Partial pivoting; a pivot below `1e-14 * max|V|` is reported singular.
impl DenseOracle for Complex64 {
    fn dense_solve(v: &DenseMatrix<Self>, b: &[Self]) -> Result<Vec<Self>> {
        check_square(v, b)?;
        let n = v.rows();
        let threshold = 1e-14 * v.max_abs();
        let w = n + 1;
        let mut a: Vec<Complex64> = Vec::with_capacity(n * w);
        for i in 0..n {
            a.extend_from_slice(v.row(i));
            a.push(b[i]);
        }
        for k in 0..n {
            let (pivot, mag) = (k..n)
                .map(|i| (i, a[i * w + k].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(mag > threshold) {
                return Err(QvError::SingularMatrix);
            }
            if pivot != k {
                for j in 0..w {
                    a.swap(k * w + j, pivot * w + j);
                }
            }
            let (head, tail) = a.split_at_mut((k + 1) * w);
            let pr = &head[k * w..];
            let inv = 1.0 / pr[k];
            for row in tail.chunks_exact_mut(w) {
                let factor = row[k] * inv;
                if factor == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (r, p) in row[k + 1..].iter_mut().zip(&pr[k + 1..w]) {
                    *r -= factor * p;
                }
                row[k] = Complex64::new(0.0, 0.0);
            }
        }
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for i in (0..n).rev() {
            let mut acc = a[i * w + n];
            for j in (i + 1)..n {
                acc -= a[i * w + j] * x[j];
            }
            x[i] = acc / a[i * w + i];
        }
        Ok(x)
    }
}
