//! Identity suites: each checks one closed-form identity against an
//! independently computed side and reports the worst deviation.
//!
//! On the exact backend a suite passes only on bit-exact equality and the
//! deviation is the largest absolute entry of the difference. On the float
//! backend the deviation is relative to the largest expected entry and is
//! compared with a tolerance.

use rand::Rng;

use crate::dense::DenseMatrix;
use crate::error::Result;
use crate::factor::{banded_product, build_vandermonde, factorize, Residual};
use crate::qcore::{finite_sum_rhs, qpochhammer, reciprocal_qpoch_predicted, triangular_powers, QPochTable};
use crate::scalar::{alternate, Backend, Scalar};
use crate::solve::solve;
use crate::structmat::{
    build_dq_power, build_tq, invert_tq, toeplitz_product, LowerToeplitz, ShiftPower,
};

/// Float tolerance used when none is given.
pub const DEFAULT_FLOAT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub name: String,
    pub passed: bool,
    pub deviation: f64,
}

impl SuiteOutcome {
    pub fn line(&self) -> String {
        format!(
            "{}: {}, deviation {}",
            self.name,
            if self.passed { "pass" } else { "FAIL" },
            self.deviation
        )
    }
}

/// Accumulates entrywise comparisons for one suite.
#[derive(Debug)]
struct Tally {
    exact_equal: bool,
    max_diff: f64,
    max_ref: f64,
}

impl Tally {
    fn new() -> Self {
        Self {
            exact_equal: true,
            max_diff: 0.0,
            max_ref: 0.0,
        }
    }

    fn push<S: Scalar>(&mut self, got: &S, expected: &S) {
        if got != expected {
            self.exact_equal = false;
            self.max_diff = self.max_diff.max((got.clone() - expected.clone()).magnitude());
        }
        self.max_ref = self.max_ref.max(expected.magnitude());
    }

    fn push_dense<S: Scalar>(&mut self, got: &DenseMatrix<S>, expected: &DenseMatrix<S>) {
        for i in 0..expected.rows() {
            for (g, e) in got.row(i).iter().zip(expected.row(i)) {
                self.push(g, e);
            }
        }
    }

    fn finish<S: Scalar>(self, name: &str, tol: f64) -> SuiteOutcome {
        let (passed, deviation) = match S::BACKEND {
            Backend::Exact => (self.exact_equal, self.max_diff),
            Backend::Complex => {
                let dev = if self.max_ref > 0.0 {
                    self.max_diff / self.max_ref
                } else {
                    self.max_diff
                };
                (dev <= tol, dev)
            }
        };
        SuiteOutcome {
            name: name.to_string(),
            passed,
            deviation,
        }
    }
}

/// `V_q = L D L^T`.
pub fn ldlt_suite<S: Scalar>(q: &S, n: usize, eps: f64, tol: f64, cap: usize) -> Result<SuiteOutcome> {
    let f = factorize(q.clone(), n, eps)?;
    let res = f.residual_with_cap(cap)?;
    let passed = match res {
        Residual::Exact { zero, .. } => zero,
        Residual::Relative(r) => r <= tol,
    };
    Ok(SuiteOutcome {
        name: "ldlt-residual".into(),
        passed,
        deviation: res.deviation(),
    })
}

/// `T_q T_{q^{-1}}` has an all-ones first column.
pub fn h_matrix_suite<S: Scalar>(tbl: &QPochTable<S>, tol: f64) -> Result<SuiteOutcome> {
    let h = toeplitz_product(&build_tq(tbl), &build_tq(&tbl.reciprocal()?))?;
    let mut t = Tally::new();
    for c in h.column() {
        t.push(c, &S::one());
    }
    Ok(t.finish::<S>("toeplitz-h-matrix", tol))
}

/// `T_q (T_q)^{-1} = I` for the closed-form inverse.
pub fn inverse_identity_suite<S: Scalar>(tbl: &QPochTable<S>, tol: f64) -> Result<SuiteOutcome> {
    let prod = toeplitz_product(&build_tq(tbl), &invert_tq(tbl)?)?;
    let id = LowerToeplitz::identity(tbl.n());
    let mut t = Tally::new();
    for (g, e) in prod.column().iter().zip(id.column()) {
        t.push(g, e);
    }
    Ok(t.finish::<S>("toeplitz-inverse", tol))
}

/// Dense `D_{q^{-1}} T_{q^{-1}} D_q` equals the closed-form inverse.
pub fn inverse_similarity_suite<S: Scalar>(tbl: &QPochTable<S>, tol: f64) -> Result<SuiteOutcome> {
    let n = tbl.n();
    let d_neg = build_dq_power(tbl.q(), -1, n)?;
    let d_pos = build_dq_power(tbl.q(), 1, n)?;
    let similar = build_tq(&tbl.reciprocal()?)
        .dense()
        .scale_rows(d_neg.diag())
        .scale_cols(d_pos.diag());
    let mut t = Tally::new();
    t.push_dense(&similar, &invert_tq(tbl)?.dense());
    Ok(t.finish::<S>("inverse-similarity", tol))
}

/// Banded product for `m = 1..=m_max`: the operator chain matches the closed
/// form and nothing survives on sub-diagonals `>= m`.
pub fn banded_suite<S: Scalar>(q: &S, n: usize, m_max: usize, eps: f64, tol: f64) -> Result<SuiteOutcome> {
    let mut t = Tally::new();
    for m in 1..=m_max {
        let band = banded_product(q.clone(), m, n, eps)?;
        let composed = band.composed_dense()?;
        t.push_dense(&composed, &band.toeplitz().dense());
        for i in 0..n {
            for j in 0..n {
                if i < j || i - j >= m {
                    t.push(composed.get(i, j), &S::zero());
                }
            }
        }
    }
    Ok(t.finish::<S>("banded-product", tol))
}

/// `q^{ij}` equals the finite sum for `0 <= i, j < n`.
pub fn finite_sum_suite<S: Scalar>(tbl: &QPochTable<S>, tol: f64) -> SuiteOutcome {
    let n = tbl.n();
    let tri = triangular_powers(tbl.q(), n);
    let v = build_vandermonde(tbl.q(), n).expect("table guarantees q != 0");
    let mut t = Tally::new();
    for i in 0..n {
        for j in 0..n {
            t.push(&finite_sum_rhs(tbl, &tri, i, j), v.get(i, j));
        }
    }
    t.finish::<S>("finite-sum", tol)
}

/// `(1/q;1/q)_j = (-1)^j q^{-j(j+1)/2} (q;q)_j` for `0 <= j < count`.
pub fn reciprocal_suite<S: Scalar>(q: &S, count: usize, tol: f64) -> Result<SuiteOutcome> {
    let q_inv = q.try_recip().ok_or(crate::error::QvError::ZeroQ)?;
    let mut t = Tally::new();
    for j in 0..count {
        t.push(
            &qpochhammer(&q_inv, &q_inv, j),
            &reciprocal_qpoch_predicted(q, j)?,
        );
    }
    Ok(t.finish::<S>("reciprocal-qpochhammer", tol))
}

/// `T_q = I + sum_j S^j / (q;q)_j` and
/// `T_{q^{-1}} = I + sum_j (-1)^j q^{j(j-1)/2} (qS)^j / (q;q)_j`, rebuilt densely.
pub fn series_suite<S: Scalar>(tbl: &QPochTable<S>, tol: f64) -> Result<SuiteOutcome> {
    let n = tbl.n();
    let q = tbl.q();
    let tri = triangular_powers(q, n);
    let mut tq = DenseMatrix::identity(n);
    let mut tq_recip = DenseMatrix::identity(n);
    for j in 1..n {
        let shift = ShiftPower { n, j }.dense::<S>();
        let a = tbl.qfac_inv(j).clone();
        let b = alternate(j, tri[j].mul_ref(&q.powu(j)).mul_ref(&a));
        tq = tq.add(&shift.scaled(&a))?;
        tq_recip = tq_recip.add(&shift.scaled(&b))?;
    }
    let mut t = Tally::new();
    t.push_dense(&tq, &build_tq(tbl).dense());
    t.push_dense(&tq_recip, &build_tq(&tbl.reciprocal()?).dense());
    Ok(t.finish::<S>("toeplitz-series", tol))
}

/// Structured solve of `V_q x = V_q x0` recovers `x0` for a seeded random `x0`.
pub fn solve_roundtrip_suite<S: Scalar>(
    q: &S,
    n: usize,
    eps: f64,
    tol: f64,
    rng: &mut impl Rng,
) -> Result<SuiteOutcome> {
    let f = factorize(q.clone(), n, eps)?;
    let x0: Vec<S> = (0..n)
        .map(|_| S::from_ratio(rng.gen_range(-50..=50), rng.gen_range(1..=20)))
        .collect();
    let b = build_vandermonde(q, n)?.matvec(&x0)?;
    let rep = solve(&f, &b)?;
    let mut t = Tally::new();
    for (g, e) in rep.x.iter().zip(&x0) {
        t.push(g, e);
    }
    let mut out = t.finish::<S>("solve-roundtrip", tol);
    if let Some(res) = rep.residual_norm {
        out.deviation = res;
        out.passed = res <= tol;
    }
    Ok(out)
}

/// Every suite for one `(q, n)`; banded products use `m = 1..=min(n, m_max)`.
pub fn run_all<S: Scalar>(
    q: &S,
    n: usize,
    eps: f64,
    m_max: usize,
    tol: f64,
    cap: usize,
    rng: &mut impl Rng,
) -> Result<Vec<SuiteOutcome>> {
    let tbl = QPochTable::build(q.clone(), n, eps)?;
    Ok(vec![
        ldlt_suite(q, n, eps, tol, cap)?,
        h_matrix_suite(&tbl, tol)?,
        inverse_identity_suite(&tbl, tol)?,
        inverse_similarity_suite(&tbl, tol)?,
        banded_suite(q, n, m_max.min(n), eps, tol)?,
        finite_sum_suite(&tbl, tol),
        reciprocal_suite(q, n, tol)?,
        series_suite(&tbl, tol)?,
        solve_roundtrip_suite(q, n, eps, tol, rng)?,
    ])
}
