//! Command-line front end: `factor`, `solve`, `verify`, `bench`.
//!
//! Exit codes: 0 success, 1 usage/parse/I-O/dimension errors, 2 when `q` is
//! rejected (`q = 0` or degenerate), 3 when a verification suite fails.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bench::{self, BenchRow, CSV_COLUMNS, CSV_HEADER_COMMENT, MIN_REPS};
use crate::dense::DEFAULT_DENSE_CAP;
use crate::error::QvError;
use crate::factor::factorize;
use crate::qcore::DEFAULT_EPS;
use crate::scalar::{Backend, Complex64, Rational, Scalar};
use crate::solve::{solve, DenseOracle};
use crate::verify::{run_all, DEFAULT_FLOAT_TOL};

/// Overrides the densification cap used by `factor --check` and `verify`.
pub const DENSE_CAP_ENV: &str = "QVAND_DENSE_CAP";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CommandKind {
    Factor,
    Solve,
    Verify,
    Bench,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Exact,
    Complex,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Exact => Backend::Exact,
            BackendArg::Complex => Backend::Complex,
        }
    }
}

/// Structured linear algebra for q-Vandermonde matrices.
#[derive(Debug, Clone, Parser)]
#[command(name = "qvand", version)]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: CommandKind,
    /// q as `p/q`, `p`, or `[re,im]`.
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    /// Matrix dimension.
    #[arg(long)]
    pub n: Option<usize>,
    /// Defaults to `complex` when q is written `[re,im]` (or with --dft), else `exact`.
    #[arg(long, value_enum)]
    pub backend: Option<BackendArg>,
    /// Float degeneracy guard: reject q when |q^j - 1| <= eps.
    #[arg(long, default_value_t = DEFAULT_EPS)]
    pub eps: f64,
    /// Largest band parameter checked by `verify`.
    #[arg(long, default_value_t = 8)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Include the LDL^T residual in the `factor` dump.
    #[arg(long)]
    pub check: bool,
    /// Include dense L in the `factor` dump.
    #[arg(long)]
    pub dense_l: bool,
    /// Use q = exp(-2 pi i / n) (complex backend).
    #[arg(long)]
    pub dft: bool,
    /// Right-hand side for `solve`: JSON array of scalar strings (stdin if absent).
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Bench sizes: `lo:hi` (doubling) or `a,b,c`.
    #[arg(long, default_value = "128:2048")]
    pub ladder: String,
    /// Bench repetitions per size (median reported, at least 5).
    #[arg(long, default_value_t = MIN_REPS)]
    pub reps: usize,
}

#[derive(Debug)]
enum CliError {
    /// q rejected by the guards.
    Guard(QvError),
    Usage(String),
    VerifyFailed,
}

impl From<QvError> for CliError {
    fn from(e: QvError) -> Self {
        match e {
            QvError::ZeroQ | QvError::DegenerateQ { .. } => CliError::Guard(e),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Usage(format!("I/O error: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return 1;
            }
            let _ = write!(stdout, "{e}");
            return 0;
        }
    };
    match execute(&cfg, stdout) {
        Ok(()) => 0,
        Err(CliError::Guard(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            1
        }
        Err(CliError::VerifyFailed) => {
            let _ = writeln!(stderr, "error: verification failed");
            3
        }
    }
}

fn execute(cfg: &RunConfig, stdout: &mut dyn Write) -> CliResult<()> {
    if cfg.command == CommandKind::Bench {
        let text = cmd_bench(cfg)?;
        return emit(cfg, stdout, &text);
    }
    match resolve_backend(cfg)? {
        Backend::Exact => dispatch::<Rational>(cfg, stdout),
        Backend::Complex => dispatch::<Complex64>(cfg, stdout),
    }
}

fn resolve_backend(cfg: &RunConfig) -> CliResult<Backend> {
    let explicit = cfg.backend.map(Backend::from);
    if cfg.dft {
        return match explicit {
            Some(Backend::Exact) => Err(CliError::Usage("--dft requires the complex backend".into())),
            _ => Ok(Backend::Complex),
        };
    }
    Ok(explicit.unwrap_or_else(|| match &cfg.q {
        Some(q) if q.trim_start().starts_with('[') => Backend::Complex,
        _ => Backend::Exact,
    }))
}

fn dense_cap() -> CliResult<usize> {
    match std::env::var(DENSE_CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{DENSE_CAP_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_DENSE_CAP),
    }
}

fn require_n(cfg: &RunConfig) -> CliResult<usize> {
    match cfg.n {
        Some(0) => Err(CliError::Usage("--n must be at least 1".into())),
        Some(n) => Ok(n),
        None => Err(CliError::Usage("--n is required".into())),
    }
}

fn resolve_q<S: Scalar>(cfg: &RunConfig, n: usize) -> CliResult<S> {
    if cfg.dft {
        let root = bench::dft_root(n);
        return S::parse_text(&root.to_text()).map_err(CliError::from);
    }
    let text = cfg
        .q
        .as_deref()
        .ok_or_else(|| CliError::Usage("--q (or --dft) is required".into()))?;
    S::parse_text(text.trim()).map_err(|e| CliError::Usage(format!("--q: {e}")))
}

fn emit(cfg: &RunConfig, stdout: &mut dyn Write, text: &str) -> CliResult<()> {
    match &cfg.out {
        Some(path) => fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn dispatch<S: Scalar + DenseOracle>(cfg: &RunConfig, stdout: &mut dyn Write) -> CliResult<()> {
    let text = match cfg.command {
        CommandKind::Factor => cmd_factor::<S>(cfg)?,
        CommandKind::Solve => cmd_solve::<S>(cfg)?,
        CommandKind::Verify => {
            let (text, passed) = cmd_verify::<S>(cfg)?;
            emit(cfg, stdout, &text)?;
            return if passed { Ok(()) } else { Err(CliError::VerifyFailed) };
        }
        CommandKind::Bench => unreachable!("bench is dispatched before backend selection"),
    };
    emit(cfg, stdout, &text)
}

fn cmd_factor<S: Scalar>(cfg: &RunConfig) -> CliResult<String> {
    let n = require_n(cfg)?;
    let q = resolve_q::<S>(cfg, n)?;
    let f = factorize(q, n, cfg.eps)?;
    let residual = if cfg.check {
        Some(f.residual_with_cap(dense_cap()?)?)
    } else {
        None
    };
    let dump = f.dump(cfg.dense_l, residual);
    Ok(serde_json::to_string_pretty(&dump).expect("serializable") + "\n")
}

fn read_vector<S: Scalar>(cfg: &RunConfig) -> CliResult<Vec<S>> {
    let raw = match &cfg.input {
        Some(path) => fs::read_to_string(path)?,
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    let items: Vec<String> = serde_json::from_str(&raw)
        .map_err(|e| CliError::Usage(format!("right-hand side must be a JSON array of strings: {e}")))?;
    items
        .iter()
        .map(|t| S::parse_text(t.trim()).map_err(CliError::from))
        .collect()
}

fn cmd_solve<S: Scalar>(cfg: &RunConfig) -> CliResult<String> {
    let b = read_vector::<S>(cfg)?;
    let n = match cfg.n {
        Some(_) => require_n(cfg)?,
        None if b.is_empty() => return Err(CliError::Usage("empty right-hand side".into())),
        None => b.len(),
    };
    if b.len() != n {
        return Err(QvError::DimensionMismatch {
            expected: n,
            found: b.len(),
        }
        .into());
    }
    let q = resolve_q::<S>(cfg, n)?;
    let f = factorize(q, n, cfg.eps)?;
    let report = solve(&f, &b)?;
    Ok(serde_json::to_string_pretty(&report.to_json()).expect("serializable") + "\n")
}

fn cmd_verify<S: Scalar>(cfg: &RunConfig) -> CliResult<(String, bool)> {
    let n = require_n(cfg)?;
    let q = resolve_q::<S>(cfg, n)?;
    let tol = match S::BACKEND {
        Backend::Exact => 0.0,
        Backend::Complex => DEFAULT_FLOAT_TOL,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let outcomes = run_all(&q, n, cfg.eps, cfg.m.max(1), tol, dense_cap()?, &mut rng)?;
    let mut text = format!(
        "# qvand-verify q={} n={} backend={} seed={}\n",
        q.to_text(),
        n,
        S::BACKEND.as_str(),
        cfg.seed
    );
    for o in &outcomes {
        text.push_str(&o.line());
        text.push('\n');
    }
    Ok((text, outcomes.iter().all(|o| o.passed)))
}

fn cmd_bench(cfg: &RunConfig) -> CliResult<String> {
    if cfg.backend == Some(BackendArg::Exact) {
        return Err(CliError::Usage("bench requires complex backend".into()));
    }
    let ladder = bench::parse_ladder(&cfg.ladder)
        .ok_or_else(|| CliError::Usage(format!("invalid --ladder {:?}", cfg.ladder)))?;
    if cfg.reps < MIN_REPS {
        return Err(CliError::Usage(format!("--reps must be at least {MIN_REPS}")));
    }
    let fixed_q = match (&cfg.q, cfg.dft) {
        (Some(text), false) => Some(
            Complex64::parse_text(text.trim()).map_err(|e| CliError::Usage(format!("--q: {e}")))?,
        ),
        _ => None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut text = format!("{CSV_HEADER_COMMENT}\n# seed={}\n{CSV_COLUMNS}\n", cfg.seed);
    for &n in &ladder {
        let q = fixed_q.unwrap_or_else(|| bench::dft_root(n));
        let row: BenchRow = bench::bench_row(q, n, cfg.reps, &mut rng)?;
        text.push_str(&row.csv_line());
        text.push('\n');
    }
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("qvand").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn backend_inference() {
        let cfg = RunConfig::try_parse_from(["qvand", "factor", "--q", "[0.0,0.0]"]).unwrap();
        assert_eq!(resolve_backend(&cfg).unwrap(), Backend::Complex);
        let cfg = RunConfig::try_parse_from(["qvand", "factor", "--q", "-3/4"]).unwrap();
        assert_eq!(resolve_backend(&cfg).unwrap(), Backend::Exact);
        let cfg = RunConfig::try_parse_from(["qvand", "factor", "--dft", "--backend", "exact"]).unwrap();
        assert!(resolve_backend(&cfg).is_err());
    }

    #[test]
    fn factor_check() {
        let (code, out, _) = run_args(&["factor", "--q", "2", "--n", "3", "--backend", "exact", "--check"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["D"], serde_json::json!(["1", "1", "6"]));
        assert_eq!(v["residual"], "exact-zero");
        assert!(v.get("L").is_none());
    }

    #[test]
    fn guard_exit_codes() {
        let (code, _, err) = run_args(&["factor", "--q", "1", "--n", "2"]);
        assert_eq!(code, 2);
        assert!(err.contains("j = 1"), "{err}");
        let (code, _, err) = run_args(&["factor", "--q", "[0.0,0.0]", "--n", "4"]);
        assert_eq!(code, 2);
        assert!(err.contains("q = 0"), "{err}");
        let (code, _, _) = run_args(&["verify", "--q", "1", "--n", "4"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_args(&["factor", "--q", "x", "--n", "2"]).0, 1);
        assert_eq!(run_args(&["factor", "--q", "2"]).0, 1);
        assert_eq!(run_args(&["factor", "--q", "2", "--n", "0"]).0, 1);
        assert_eq!(run_args(&["frobnicate"]).0, 1);
        let (code, _, err) = run_args(&["bench", "--backend", "exact"]);
        assert_eq!(code, 1);
        assert!(err.contains("bench requires complex backend"));
    }
}
