//! Field elements.
//!
//! Every kernel in the crate is generic over [`Scalar`]. Two realizations are
//! provided: [`Rational`] (exact, arbitrary precision) and [`Complex64`]
//! (IEEE double complex). The exact backend compares with `==`; the float
//! backend compares against a tolerance.
//!
//! Both realizations share one text format:
//!
//! * exact: `p/q` or `p`, optional leading `-`, decimal digits (`q > 0`);
//! * complex: `[re,im]` with `re`, `im` in decimal floating notation.
//!
//! ```
//! use qvand::scalar::{Complex64, Rational, Scalar};
//!
//! let r = Rational::parse_text("-3/4").unwrap();
//! assert_eq!(r.to_text(), "-3/4");
//! let z = Complex64::parse_text("[0.5,-0.5]").unwrap();
//! assert_eq!(z, Complex64::new(0.5, -0.5));
//! ```

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use malachite_base::num::arithmetic::traits::{Abs, Pow, Reciprocal};
use malachite_base::num::conversion::traits::RoundingFrom;
use malachite_base::rounding_modes::RoundingMode;
use malachite_nz::natural::Natural;
use serde::{Deserialize, Serialize};

use crate::error::{QvError, Result};

pub use num_complex::Complex64;

/// Exact arbitrary-precision rational, always in lowest terms.
pub type Rational = malachite_q::Rational;

/// Which realization a computation ran on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Complex,
}

impl Backend {
    pub fn as_str(self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Complex => "complex",
        }
    }
}

impl std::str::FromStr for Backend {
    type Err = QvError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Backend::Exact),
            "complex" => Ok(Backend::Complex),
            _ => Err(QvError::ParseError {
                position: 0,
                message: format!("unknown backend {s:?} (expected exact|complex)"),
            }),
        }
    }
}

/// A field element usable by all structured kernels.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
    + for<'a> DivAssign<&'a Self>
{
    const BACKEND: Backend;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn is_zero(&self) -> bool;
    /// Absolute value as a double (lossy for huge rationals).
    fn magnitude(&self) -> f64;
    /// `|self - other| <= eps`; exact backends ignore `eps` and use equality.
    fn near(&self, other: &Self, eps: f64) -> bool;
    fn parse_text(text: &str) -> Result<Self>;
    fn to_text(&self) -> String;

    fn mul_ref(&self, rhs: &Self) -> Self;

    /// `self^k`. The default multiplies `k` times, matching the rounding of
    /// the running products used elsewhere; exact backends may shortcut.
    fn powu(&self, k: usize) -> Self {
        pow_iter(self, k)
    }

    fn try_recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Self::one() / self.clone())
        }
    }

    fn from_i64(v: i64) -> Self {
        Self::from_ratio(v, 1)
    }

    /// Full linear convolution `a * b`, when the backend has a fast path.
    fn fast_convolve(_a: &[Self], _b: &[Self]) -> Option<Vec<Self>> {
        None
    }
}

/// `base^k` by iterated multiplication.
pub fn pow_iter<S: Scalar>(base: &S, k: usize) -> S {
    let mut acc = S::one();
    for _ in 0..k {
        acc = acc.mul_ref(base);
    }
    acc
}

/// `(-1)^k x`, by negation rather than multiplication.
pub fn alternate<S: Scalar>(k: usize, x: S) -> S {
    if k.is_multiple_of(2) {
        x
    } else {
        -x
    }
}

/// `(-1)^k` as a scalar.
pub fn sign<S: Scalar>(k: usize) -> S {
    if k.is_multiple_of(2) {
        S::one()
    } else {
        -S::one()
    }
}

fn parse_err(position: usize, message: impl Into<String>) -> QvError {
    QvError::ParseError {
        position,
        message: message.into(),
    }
}

fn parse_digits(text: &str, offset: usize) -> Result<Natural> {
    if text.is_empty() {
        return Err(parse_err(offset, "expected decimal digits"));
    }
    if let Some(p) = text.bytes().position(|b| !b.is_ascii_digit()) {
        return Err(parse_err(offset + p, "expected decimal digit"));
    }
    Ok(text.parse::<Natural>().expect("validated digits"))
}

fn parse_rational(text: &str) -> Result<Rational> {
    let (negative, body, start) = match text.strip_prefix('-') {
        Some(rest) => (true, rest, 1),
        None => (false, text, 0),
    };
    let (num, den) = match body.find('/') {
        Some(slash) => {
            let num = parse_digits(&body[..slash], start)?;
            let den = parse_digits(&body[slash + 1..], start + slash + 1)?;
            if den == 0u32 {
                return Err(parse_err(start + slash + 1, "zero denominator"));
            }
            (num, den)
        }
        None => (parse_digits(body, start)?, Natural::from(1u32)),
    };
    Ok(Rational::from_sign_and_naturals(!negative, num, den))
}

fn parse_float(text: &str, offset: usize) -> Result<f64> {
    if text.is_empty() {
        return Err(parse_err(offset, "expected a number"));
    }
    if let Some(p) = text
        .bytes()
        .position(|b| !(b.is_ascii_digit() || matches!(b, b'.' | b'e' | b'E' | b'+' | b'-')))
    {
        return Err(parse_err(offset + p, "unexpected character in number"));
    }
    text.parse::<f64>()
        .map_err(|e| parse_err(offset, format!("invalid number {text:?}: {e}")))
}

impl Scalar for Rational {
    const BACKEND: Backend = Backend::Exact;

    fn zero() -> Self {
        Rational::from(0u32)
    }

    fn one() -> Self {
        Rational::from(1u32)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::from_signeds(num, den)
    }

    fn is_zero(&self) -> bool {
        *self == 0u32
    }

    fn magnitude(&self) -> f64 {
        rational_to_f64(&self.abs())
    }

    fn near(&self, other: &Self, _eps: f64) -> bool {
        self == other
    }

    fn parse_text(text: &str) -> Result<Self> {
        parse_rational(text)
    }

    fn to_text(&self) -> String {
        self.to_string()
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn try_recip(&self) -> Option<Self> {
        (!Scalar::is_zero(self)).then(|| self.reciprocal())
    }

    fn powu(&self, k: usize) -> Self {
        self.pow(k as u64)
    }
}

impl Scalar for Complex64 {
    const BACKEND: Backend = Backend::Complex;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }

    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }

    fn near(&self, other: &Self, eps: f64) -> bool {
        (self - other).norm() <= eps
    }

    /// Accepts `[re,im]`; a bare real (`-0.5`, `3/4`) is read as `re + 0i`.
    fn parse_text(text: &str) -> Result<Self> {
        if let Some(inner) = text.strip_prefix('[') {
            let inner = inner
                .strip_suffix(']')
                .ok_or_else(|| parse_err(text.len(), "expected closing ']'"))?;
            let comma = inner
                .find(',')
                .ok_or_else(|| parse_err(1 + inner.len(), "expected ',' between parts"))?;
            let re = parse_float(&inner[..comma], 1)?;
            let im = parse_float(&inner[comma + 1..], comma + 2)?;
            return Ok(Complex64::new(re, im));
        }
        if text.contains('/') {
            let r = parse_rational(text)?;
            return Ok(Complex64::new(rational_to_f64(&r), 0.0));
        }
        Ok(Complex64::new(parse_float(text, 0)?, 0.0))
    }

    fn to_text(&self) -> String {
        format!("[{:?},{:?}]", self.re, self.im)
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn fast_convolve(a: &[Self], b: &[Self]) -> Option<Vec<Self>> {
        Some(crate::structmat::fft_convolve(a, b))
    }
}

/// Nearest double; saturates to infinity for out-of-range magnitudes.
pub fn rational_to_f64(r: &Rational) -> f64 {
    f64::rounding_from(r, RoundingMode::Nearest).0
}

/// Parse a text scalar for the given backend; a thin dispatch used by the CLI.
pub fn parse_scalar<S: Scalar>(text: &str) -> Result<S> {
    S::parse_text(text.trim())
}

pub fn format_scalar<S: Scalar>(s: &S) -> String {
    s.to_text()
}
