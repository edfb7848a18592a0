//! Timing helpers for the structured-vs-dense benchmark.

use std::f64::consts::PI;
use std::time::Instant;

use rand::Rng;

use crate::error::Result;
use crate::factor::{build_vandermonde, factorize};
use crate::qcore::DEFAULT_EPS;
use crate::scalar::Complex64;
use crate::solve::{dense_solve_oracle, relative_residual, solve};

/// Version tag written as the first CSV line.
pub const CSV_HEADER_COMMENT: &str = "# qvand-bench v1";
pub const CSV_COLUMNS: &str = "n,structured_solve_seconds,dense_oracle_seconds,residual";
pub const MIN_REPS: usize = 5;

/// `e^{-2 pi i / n}`, the DFT root.
pub fn dft_root(n: usize) -> Complex64 {
    Complex64::from_polar(1.0, -2.0 * PI / n as f64)
}

/// Random vector with unit 2-norm.
pub fn random_unit_vector(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Median wall time of `reps` runs of `f`, in seconds.
pub fn median_seconds<T>(reps: usize, mut f: impl FnMut() -> T) -> f64 {
    let mut times: Vec<f64> = (0..reps.max(1))
        .map(|_| {
            let start = Instant::now();
            std::hint::black_box(f());
            start.elapsed().as_secs_f64()
        })
        .collect();
    times.sort_by(f64::total_cmp);
    times[times.len() / 2]
}

/// Least-squares slope of `log t` against `log n`.
pub fn loglog_slope(ns: &[usize], times: &[f64]) -> f64 {
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub structured_seconds: f64,
    pub dense_seconds: f64,
    /// `||V x - b|| / ||b||` of the structured solution.
    pub residual: f64,
}

impl BenchRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{:e},{:e},{:e}",
            self.n, self.structured_seconds, self.dense_seconds, self.residual
        )
    }
}

/// Times factorize+solve against build+dense elimination at one size.
pub fn bench_row(q: Complex64, n: usize, reps: usize, rng: &mut impl Rng) -> Result<BenchRow> {
    let b = random_unit_vector(rng, n);
    let f = factorize(q, n, DEFAULT_EPS)?;
    let x = solve(&f, &b)?.x;
    let residual = relative_residual(&q, &x, &b)?;

    let structured_seconds = median_seconds(reps, || {
        let f = factorize(q, n, DEFAULT_EPS).expect("guard already passed");
        solve(&f, &b).expect("dimensions match")
    });
    let dense_seconds = median_seconds(reps, || {
        let v = build_vandermonde(&q, n).expect("q != 0");
        dense_solve_oracle(&v, &b)
    });
    Ok(BenchRow {
        n,
        structured_seconds,
        dense_seconds,
        residual,
    })
}

/// Parses `a:b` (doubling from `a` up to `b`) or a comma list `a,b,c`.
pub fn parse_ladder(text: &str) -> Option<Vec<usize>> {
    if let Some((lo, hi)) = text.split_once(':') {
        let (lo, hi) = (lo.trim().parse::<usize>().ok()?, hi.trim().parse::<usize>().ok()?);
        if lo == 0 || hi < lo {
            return None;
        }
        let mut out = Vec::new();
        let mut n = lo;
        while n <= hi {
            out.push(n);
            n = n.checked_mul(2)?;
        }
        return Some(out);
    }
    let out: Option<Vec<usize>> = text
        .split(',')
        .map(|t| t.trim().parse::<usize>().ok().filter(|&n| n > 0))
        .collect();
    out.filter(|v| !v.is_empty())
}
