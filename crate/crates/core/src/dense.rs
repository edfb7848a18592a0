//! Row-major dense matrices, used only for verification and display.

use crate::error::{QvError, Result};
use crate::scalar::Scalar;

/// Default ceiling on the dimension of any densified verification product.
pub const DEFAULT_DENSE_CAP: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> DenseMatrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for row in rows {
            if row.len() != n_cols {
                return Err(QvError::DimensionMismatch {
                    expected: n_cols,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self {
            rows: n_rows,
            cols: n_cols,
            data,
        })
    }

    pub fn from_diagonal(diag: &[S]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m.set(i, i, d.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// Matrix product; zero entries of `self` are skipped, so triangular
    /// operands cost about a third of a full product.
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(QvError::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    out.data[i * rhs.cols + j] += &a.mul_ref(b);
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[S]) -> Result<Vec<S>> {
        if x.len() != self.cols {
            return Err(QvError::DimensionMismatch {
                expected: self.cols,
                found: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for (a, b) in self.row(i).iter().zip(x) {
                    acc += &a.mul_ref(b);
                }
                acc
            })
            .collect())
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(QvError::DimensionMismatch {
                expected: self.rows * self.cols,
                found: rhs.rows * rhs.cols,
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        })
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(QvError::DimensionMismatch {
                expected: self.rows * self.cols,
                found: rhs.rows * rhs.cols,
            });
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
        Ok(out)
    }

    pub fn scaled(&self, c: &S) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.mul_ref(c)).collect(),
        }
    }

    /// Scales row `i` by `d[i]` (left multiplication by a diagonal).
    pub fn scale_rows(&self, d: &[S]) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[i * self.cols + j] *= &d[i];
            }
        }
        out
    }

    /// Scales column `j` by `d[j]` (right multiplication by a diagonal).
    pub fn scale_cols(&self, d: &[S]) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[i * self.cols + j] *= &d[j];
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data
            .iter()
            .map(|v| {
                let m = v.magnitude();
                m * m
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Row-major nested arrays of scalar strings.
    pub fn to_text_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(Scalar::to_text).collect())
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self.to_text_rows())
    }

    pub fn from_text_rows(rows: &[Vec<String>]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|t| S::parse_text(t)).collect::<Result<Vec<S>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(parsed)
    }
}

/// Fails with `DenseCapExceeded` when `n` is above `cap`.
pub fn check_dense_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(QvError::DenseCapExceeded { n, cap })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn m(rows: &[&[i64]]) -> DenseMatrix<Rational> {
        DenseMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Rational::from_i64(v)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn product_and_transpose() {
        let a = m(&[&[1, 2], &[3, 4]]);
        let b = m(&[&[0, 1], &[1, 0]]);
        assert_eq!(a.matmul(&b).unwrap(), m(&[&[2, 1], &[4, 3]]));
        assert_eq!(a.transpose(), m(&[&[1, 3], &[2, 4]]));
        assert!(a.sub(&a).unwrap().is_zero());
        assert!(a.matmul(&m(&[&[1, 2, 3]])).is_err());
    }

    #[test]
    fn json_dump_round_trips() {
        let a = DenseMatrix::from_rows(vec![
            vec![Rational::from_ratio(1, 2), Rational::from_i64(-3)],
            vec![Rational::from_i64(0), Rational::from_ratio(-7, 9)],
        ])
        .unwrap();
        let rows = a.to_text_rows();
        assert_eq!(rows, vec![vec!["1/2", "-3"], vec!["0", "-7/9"]]);
        assert_eq!(DenseMatrix::from_text_rows(&rows).unwrap(), a);
    }

    #[test]
    fn ragged_rows_rejected() {
        let err = DenseMatrix::<Rational>::from_rows(vec![vec![Rational::from_i64(1)], vec![]]);
        assert!(matches!(err, Err(QvError::DimensionMismatch { .. })));
    }
}
