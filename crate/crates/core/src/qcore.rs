//! q-Pochhammer symbols, Gaussian binomials and the degeneracy guard.

use crate::error::{QvError, Result};
use crate::scalar::{alternate, Scalar};

/// Tolerance used by the float guard `|q^j - 1| <= eps`.
pub const DEFAULT_EPS: f64 = 1e-10;

/// `(z;q)_k = (1 - z)(1 - zq)...(1 - zq^{k-1})`, with `(z;q)_0 = 1`.
pub fn qpochhammer<S: Scalar>(z: &S, q: &S, k: usize) -> S {
    let mut acc = S::one();
    let mut term = z.clone();
    for l in 0..k {
        if l > 0 {
            term = term.mul_ref(q);
        }
        acc = acc.mul_ref(&(S::one() - term.clone()));
    }
    acc
}

/// Rejects `q = 0` and any `q` with `q^j = 1` for some `1 <= j <= n - 1`.
///
/// Powers are formed by iterated multiplication so the float guard sees the
/// same rounding as the table recurrence. On failure the smallest offending
/// `j` is reported.
pub fn check_not_in_a_n<S: Scalar>(q: &S, n: usize, eps: f64) -> Result<()> {
    if q.is_zero() {
        return Err(QvError::ZeroQ);
    }
    let one = S::one();
    let mut power = S::one();
    for j in 1..n {
        power = power.mul_ref(q);
        if power.near(&one, eps) {
            return Err(QvError::DegenerateQ { j });
        }
    }
    Ok(())
}

/// `(q;q)_0 .. (q;q)_{n-1}` and their reciprocals.
#[derive(Debug, Clone, PartialEq)]
pub struct QPochTable<S> {
    q: S,
    n: usize,
    qfac: Vec<S>,
    qfac_inv: Vec<S>,
}

impl<S: Scalar> QPochTable<S> {
    /// Builds the table after running the degeneracy guard.
    pub fn build(q: S, n: usize, eps: f64) -> Result<Self> {
        assert!(n >= 1, "dimension must be positive");
        check_not_in_a_n(&q, n, eps)?;
        Self::from_recurrence(q, n)
    }

    fn from_recurrence(q: S, n: usize) -> Result<Self> {
        let mut qfac = Vec::with_capacity(n);
        let mut qfac_inv = Vec::with_capacity(n);
        let mut acc = S::one();
        let mut power = S::one();
        for i in 0..n {
            if i > 0 {
                power = power.mul_ref(&q);
                acc = acc.mul_ref(&(S::one() - power.clone()));
            }
            let inv = acc.try_recip().ok_or(QvError::DegenerateQ { j: i })?;
            qfac.push(acc.clone());
            qfac_inv.push(inv);
        }
        Ok(Self {
            q,
            n,
            qfac,
            qfac_inv,
        })
    }

    /// Table for `q^{-1}` at the same dimension.
    ///
    /// `q^{-j} = 1` iff `q^j = 1`, so no second guard is run; an exactly
    /// vanishing product still surfaces as `DegenerateQ`.
    pub fn reciprocal(&self) -> Result<Self> {
        let q_inv = self.q.try_recip().ok_or(QvError::ZeroQ)?;
        Self::from_recurrence(q_inv, self.n)
    }

    pub fn q(&self) -> &S {
        &self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `(q;q)_i`.
    pub fn qfac(&self, i: usize) -> &S {
        &self.qfac[i]
    }

    /// `1 / (q;q)_i`.
    pub fn qfac_inv(&self, i: usize) -> &S {
        &self.qfac_inv[i]
    }

    pub fn values(&self) -> &[S] {
        &self.qfac
    }

    pub fn inverses(&self) -> &[S] {
        &self.qfac_inv
    }
}

/// Gaussian binomial `(q;q)_i / ((q;q)_j (q;q)_{i-j})` for `0 <= j <= i < n`.
pub fn gaussian_binomial<S: Scalar>(i: usize, j: usize, tbl: &QPochTable<S>) -> Result<S> {
    if j > i || i >= tbl.n() {
        return Err(QvError::IndexError { i, j, n: tbl.n() });
    }
    Ok(tbl.qfac(i).mul_ref(tbl.qfac_inv(j)) * tbl.qfac_inv(i - j).clone())
}

/// `q^{k(k-1)/2}` for `k = 0..count` by a running product (the exponent
/// grows by `k` at step `k + 1`).
pub fn triangular_powers<S: Scalar>(q: &S, count: usize) -> Vec<S> {
    let mut out = Vec::with_capacity(count);
    let mut acc = S::one();
    let mut step = S::one();
    for k in 0..count {
        if k > 0 {
            acc = acc.mul_ref(&step);
            step = step.mul_ref(q);
        }
        out.push(acc.clone());
    }
    out
}

/// Right side of the finite sum identity
/// `sum_k (-1)^k q^{k(k-1)/2} (q;q)_i (q;q)_j / ((q;q)_k (q;q)_{i-k} (q;q)_{j-k})`,
/// which equals `q^{ij}` whenever `q` is outside the degenerate set.
pub fn finite_sum_rhs<S: Scalar>(tbl: &QPochTable<S>, tri: &[S], i: usize, j: usize) -> S {
    let lead = tbl.qfac(i).mul_ref(tbl.qfac(j));
    let mut sum = S::zero();
    for k in 0..=i.min(j) {
        let term = tri[k]
            .mul_ref(tbl.qfac_inv(k))
            .mul_ref(tbl.qfac_inv(i - k))
            .mul_ref(tbl.qfac_inv(j - k));
        if k % 2 == 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
    }
    sum.mul_ref(&lead)
}

/// `(1/q;1/q)_j` predicted from `(q;q)_j` as `(-1)^j q^{-j(j+1)/2} (q;q)_j`.
pub fn reciprocal_qpoch_predicted<S: Scalar>(q: &S, j: usize) -> Result<S> {
    let q_inv = q.try_recip().ok_or(QvError::ZeroQ)?;
    let exp = j * (j + 1) / 2;
    Ok(alternate(j, q_inv.powu(exp).mul_ref(&qpochhammer(q, q, j))))
}
