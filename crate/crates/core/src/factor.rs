//! `LDL^T` factorization of the q-Vandermonde matrix `V_q[i][j] = q^{ij}`.
//!
//! For `q` outside the degenerate set, `V_q = L D L^T` with
//!
//! * `L = P_q T_q P_q^{-1}`, whose entries are the Gaussian binomials
//!   `(q;q)_i / ((q;q)_j (q;q)_{i-j})`;
//! * `D = diag((-1)^i q^{i(i-1)/2} (q;q)_i)`.
//!
//! `L` is kept in that composition form (two diagonals and one Toeplitz
//! column, O(n) memory) and only densified on request.
//!
//! ```
//! use qvand::factor::factorize;
//! use qvand::scalar::{Rational, Scalar};
//!
//! let f = factorize(Rational::from_i64(2), 3, 0.0).unwrap();
//! assert_eq!(f.d().diag(), &[1, 1, 6].map(Rational::from_i64));
//! assert!(f.residual().unwrap().is_exact_zero());
//! ```

use std::sync::OnceLock;

use serde::Serialize;

use crate::dense::{check_dense_cap, DenseMatrix, DEFAULT_DENSE_CAP};
use crate::error::{QvError, Result};
use crate::qcore::{gaussian_binomial, triangular_powers, QPochTable};
use crate::scalar::{alternate, Backend, Scalar};
use crate::structmat::{
    build_dq_power, build_pq, build_tq, DiagonalOp, LowerToeplitz,
};

/// `V_q` with `V[i][j] = q^{ij}`; row `i` is a running product of `q^i`.
pub fn build_vandermonde<S: Scalar>(q: &S, n: usize) -> Result<DenseMatrix<S>> {
    if q.is_zero() {
        return Err(QvError::ZeroQ);
    }
    let mut powers = Vec::with_capacity(n);
    let mut acc = S::one();
    for i in 0..n {
        if i > 0 {
            acc = acc.mul_ref(q);
        }
        powers.push(acc.clone());
    }
    let mut v = DenseMatrix::zeros(n, n);
    for i in 0..n {
        let mut entry = S::one();
        for j in 0..=i {
            if j > 0 {
                entry = entry.mul_ref(&powers[i]);
            }
            v.set(i, j, entry.clone());
            v.set(j, i, entry.clone());
        }
    }
    Ok(v)
}

/// The factorization `V_q = L D L^T` with `L = P_q T_q P_q^{-1}`.
#[derive(Debug)]
pub struct QVFactorization<S> {
    q: S,
    tbl: QPochTable<S>,
    p: DiagonalOp<S>,
    p_inv: DiagonalOp<S>,
    tq: LowerToeplitz<S>,
    d: DiagonalOp<S>,
    // Pieces of L^{-1} = P_q D_{q^{-1}} T_{q^{-1}} D_q P_q^{-1}.
    tq_recip: LowerToeplitz<S>,
    dq: DiagonalOp<S>,
    dq_inv: DiagonalOp<S>,
    d_inv: OnceLock<DiagonalOp<S>>,
}

/// Builds the factorization after the `q = 0` and degeneracy guards.
pub fn factorize<S: Scalar>(q: S, n: usize, eps: f64) -> Result<QVFactorization<S>> {
    let tbl = QPochTable::build(q.clone(), n, eps)?;
    let tbl_recip = tbl.reciprocal()?;

    let tri = triangular_powers(&q, n);
    let d = DiagonalOp::new(
        (0..n)
            .map(|i| alternate(i, tri[i].mul_ref(tbl.qfac(i))))
            .collect(),
    );

    Ok(QVFactorization {
        p: build_pq(&tbl),
        p_inv: DiagonalOp::new(tbl.inverses().to_vec()),
        tq: build_tq(&tbl),
        tq_recip: build_tq(&tbl_recip),
        dq: build_dq_power(&q, 1, n)?,
        dq_inv: build_dq_power(&q, -1, n)?,
        d,
        d_inv: OnceLock::new(),
        q,
        tbl,
    })
}

impl<S: Scalar> QVFactorization<S> {
    pub fn q(&self) -> &S {
        &self.q
    }

    pub fn n(&self) -> usize {
        self.tbl.n()
    }

    pub fn backend(&self) -> Backend {
        S::BACKEND
    }

    pub fn table(&self) -> &QPochTable<S> {
        &self.tbl
    }

    pub fn p(&self) -> &DiagonalOp<S> {
        &self.p
    }

    pub fn p_inv(&self) -> &DiagonalOp<S> {
        &self.p_inv
    }

    pub fn tq(&self) -> &LowerToeplitz<S> {
        &self.tq
    }

    /// `T_{q^{-1}}`.
    pub fn tq_recip(&self) -> &LowerToeplitz<S> {
        &self.tq_recip
    }

    /// `D_q = diag(q^i)`.
    pub fn dq(&self) -> &DiagonalOp<S> {
        &self.dq
    }

    /// `D_{q^{-1}} = diag(q^{-i})`.
    pub fn dq_inv(&self) -> &DiagonalOp<S> {
        &self.dq_inv
    }

    pub fn d(&self) -> &DiagonalOp<S> {
        &self.d
    }

    /// `D^{-1}`, computed on first use and cached.
    pub fn d_inv(&self) -> Result<&DiagonalOp<S>> {
        if let Some(inv) = self.d_inv.get() {
            return Ok(inv);
        }
        let inv = self.d.inverse()?;
        Ok(self.d_inv.get_or_init(|| inv))
    }

    fn check_index(&self, i: usize, j: usize) -> Result<()> {
        if j > i || i >= self.n() {
            Err(QvError::IndexError { i, j, n: self.n() })
        } else {
            Ok(())
        }
    }

    /// `L[i][j]`, the Gaussian binomial, for `j <= i < n`.
    pub fn l_entry(&self, i: usize, j: usize) -> Result<S> {
        gaussian_binomial(i, j, &self.tbl)
    }

    /// `L[i][j]` read off the composition `P_q T_q P_q^{-1}`.
    pub fn l_entry_composed(&self, i: usize, j: usize) -> Result<S> {
        self.check_index(i, j)?;
        Ok(self.p.diag()[i].mul_ref(&self.tq.column()[i - j]) * self.p_inv.diag()[j].clone())
    }

    pub fn d_entry(&self, i: usize) -> Result<S> {
        self.check_index(i, 0)?;
        Ok(self.d.diag()[i].clone())
    }

    pub fn dense_l(&self) -> DenseMatrix<S> {
        self.tq
            .dense()
            .scale_rows(self.p.diag())
            .scale_cols(self.p_inv.diag())
    }

    /// `L D L^T`, densified.
    pub fn dense_product(&self) -> DenseMatrix<S> {
        let l = self.dense_l();
        l.scale_cols(self.d.diag())
            .matmul(&l.transpose())
            .expect("square factors")
    }

    /// `V_q - L D L^T` summarized per backend; capped at `n <= 256`.
    pub fn residual(&self) -> Result<Residual> {
        self.residual_with_cap(DEFAULT_DENSE_CAP)
    }

    pub fn residual_with_cap(&self, cap: usize) -> Result<Residual> {
        check_dense_cap(self.n(), cap)?;
        let v = build_vandermonde(&self.q, self.n())?;
        let diff = v.sub(&self.dense_product())?;
        Ok(match S::BACKEND {
            Backend::Exact => Residual::Exact {
                zero: diff.is_zero(),
                max_abs: diff.max_abs(),
            },
            Backend::Complex => Residual::Relative(diff.frobenius() / v.frobenius()),
        })
    }
}

/// Outcome of densified verification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Residual {
    /// Exact backend: whether every entry vanished, and the largest entry.
    Exact { zero: bool, max_abs: f64 },
    /// Float backend: `||R||_F / ||V||_F`.
    Relative(f64),
}

impl Residual {
    pub fn is_exact_zero(&self) -> bool {
        matches!(self, Residual::Exact { zero: true, .. })
    }

    /// Worst deviation as a double (0 for an exact zero).
    pub fn deviation(&self) -> f64 {
        match *self {
            Residual::Exact { max_abs, .. } => max_abs,
            Residual::Relative(r) => r,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match *self {
            Residual::Exact { zero: true, .. } => "exact-zero".into(),
            Residual::Exact { zero: false, .. } => "exact-nonzero".into(),
            Residual::Relative(r) => serde_json::json!(r),
        }
    }
}

/// JSON dump: `{ "q", "n", "L"?, "D", "backend", "residual"? }`.
#[derive(Debug, Clone, Serialize)]
pub struct FactorDump {
    pub q: String,
    pub n: usize,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<Vec<Vec<String>>>,
    #[serde(rename = "D")]
    pub d: Vec<String>,
    pub backend: Backend,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<serde_json::Value>,
}

impl<S: Scalar> QVFactorization<S> {
    pub fn dump(&self, include_l: bool, residual: Option<Residual>) -> FactorDump {
        FactorDump {
            q: self.q.to_text(),
            n: self.n(),
            l: include_l.then(|| self.dense_l().to_text_rows()),
            d: self.d.diag().iter().map(Scalar::to_text).collect(),
            backend: S::BACKEND,
            residual: residual.map(|r| r.to_json()),
        }
    }
}

/// `T_q D_{q^{-m}} T_{q^{-1}} D_{q^m}` in closed form: a unit lower Toeplitz
/// band with `(q^{1-m};q)_j / (q;q)_j` on sub-diagonal `j < m`.
#[derive(Debug, Clone)]
pub struct BandedToeplitzResult<S> {
    m: usize,
    q: S,
    tbl: QPochTable<S>,
    toeplitz: LowerToeplitz<S>,
}

pub fn banded_product<S: Scalar>(
    q: S,
    m: usize,
    n: usize,
    eps: f64,
) -> Result<BandedToeplitzResult<S>> {
    assert!(m >= 1, "band parameter must be positive");
    let tbl = QPochTable::build(q.clone(), n, eps)?;
    let q_inv = q.try_recip().ok_or(QvError::ZeroQ)?;
    let z = q_inv.powu(m - 1);
    let mut col = vec![S::zero(); n];
    let mut poch = S::one();
    let mut term = z;
    for (j, c) in col.iter_mut().enumerate().take(m.min(n)) {
        if j > 0 {
            poch = poch.mul_ref(&(S::one() - term.clone()));
            term = term.mul_ref(&q);
        }
        *c = poch.mul_ref(tbl.qfac_inv(j));
    }
    Ok(BandedToeplitzResult {
        m,
        q,
        tbl,
        toeplitz: LowerToeplitz::from_column(col),
    })
}

impl<S: Scalar> BandedToeplitzResult<S> {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn toeplitz(&self) -> &LowerToeplitz<S> {
        &self.toeplitz
    }

    /// Sub-diagonals `j < m` whose closed-form coefficient is exactly zero.
    pub fn zero_band_coefficients(&self) -> Vec<usize> {
        self.toeplitz
            .column()
            .iter()
            .enumerate()
            .take(self.m)
            .filter(|(_, c)| c.is_zero())
            .map(|(j, _)| j)
            .collect()
    }

    /// The left side applied as an operator chain to each unit vector:
    /// `D_{q^m}`, then `T_{q^{-1}}`, then `D_{q^{-m}}`, then `T_q`.
    pub fn composed_dense(&self) -> Result<DenseMatrix<S>> {
        let n = self.toeplitz.n();
        let m = i64::try_from(self.m).expect("band parameter fits in i64");
        let tq = build_tq(&self.tbl);
        let tq_recip = build_tq(&self.tbl.reciprocal()?);
        let d_pos = build_dq_power(&self.q, m, n)?;
        let d_neg = build_dq_power(&self.q, -m, n)?;
        let mut out = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![S::zero(); n];
            e[j] = S::one();
            let y = d_pos.apply(&e)?;
            let y = tq_recip.matvec(&y)?;
            let y = d_neg.apply(&y)?;
            let y = tq.matvec(&y)?;
            for (i, v) in y.into_iter().enumerate() {
                out.set(i, j, v);
            }
        }
        Ok(out)
    }

    /// Whether the operator chain reproduces the closed form, within `eps`
    /// on the float backend.
    pub fn verify(&self, eps: f64) -> Result<bool> {
        let composed = self.composed_dense()?;
        let closed = self.toeplitz.dense();
        let diff = composed.sub(&closed)?;
        Ok(match S::BACKEND {
            Backend::Exact => diff.is_zero(),
            Backend::Complex => diff.max_abs() <= eps,
        })
    }
}
