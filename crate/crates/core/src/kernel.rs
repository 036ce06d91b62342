//! Scalar abstraction shared by the engine, the family generators and the oracles.
//!
//! Three evaluation modes are supported: IEEE doubles, exact big rationals and
//! complex doubles. Generic code is written against [`Scalar`]; the dynamic
//! [`ScalarValue`] enum is used at the boundaries (CLI parsing, oracles, reports)
//! where the mode is only known at run time.

use std::fmt;
use std::ops::Neg;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Evaluation mode of a scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Float64,
    BigRational,
    Complex64,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Float64 => "float",
            Mode::BigRational => "rational",
            Mode::Complex64 => "complex",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("mode mismatch: {left} vs {right}")]
    ModeMismatch { left: Mode, right: Mode },
    #[error("division by exact zero")]
    DivisionByZero,
    #[error("zero denominator in ratio")]
    ZeroDenominator,
    #[error("value is not finite")]
    NotFinite,
    #[error("value has a nonzero imaginary part")]
    NotReal,
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
    #[error("cannot parse {text:?} as a {mode} scalar: {reason}")]
    Parse {
        text: String,
        mode: Mode,
        reason: String,
    },
}

/// Relative/absolute tolerance pair used by every comparison in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl ToleranceSpec {
    /// Both tolerances zero: only exact equality passes.
    pub const EXACT: ToleranceSpec = ToleranceSpec {
        rel_tol: 0.0,
        abs_tol: 0.0,
    };

    pub const DEFAULT: ToleranceSpec = ToleranceSpec {
        rel_tol: 1e-12,
        abs_tol: 1e-14,
    };

    /// Builds a tolerance; at least one component must be strictly positive.
    /// Use [`ToleranceSpec::EXACT`] for exact comparison.
    pub fn new(rel_tol: f64, abs_tol: f64) -> Result<Self, KernelError> {
        let ok = |t: f64| t.is_finite() && t >= 0.0;
        if !ok(rel_tol) || !ok(abs_tol) {
            return Err(KernelError::InvalidTolerance(format!(
                "rel_tol={rel_tol}, abs_tol={abs_tol} must be finite and nonnegative"
            )));
        }
        if rel_tol == 0.0 && abs_tol == 0.0 {
            return Err(KernelError::InvalidTolerance(
                "at least one of rel_tol, abs_tol must be positive".into(),
            ));
        }
        Ok(ToleranceSpec { rel_tol, abs_tol })
    }

    pub fn relative(rel_tol: f64) -> Result<Self, KernelError> {
        Self::new(rel_tol, 0.0)
    }

    pub fn is_exact(&self) -> bool {
        self.rel_tol == 0.0 && self.abs_tol == 0.0
    }

    /// Multiplies both components by `factor`.
    pub fn scaled(&self, factor: f64) -> ToleranceSpec {
        ToleranceSpec {
            rel_tol: self.rel_tol * factor,
            abs_tol: self.abs_tol * factor,
        }
    }
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Field element the engine and generators are generic over.
pub trait Scalar:
    Num + Neg<Output = Self> + Clone + fmt::Debug + PartialEq + Send + Sync + 'static
{
    const MODE: Mode;

    /// Converts an exact rational into this mode (rounding for floating modes).
    fn from_rational(r: &BigRational) -> Self;

    fn to_value(&self) -> ScalarValue;

    fn from_value(v: &ScalarValue) -> Result<Self, KernelError>;

    /// `|self|` as a double.
    fn magnitude(&self) -> f64;

    /// `|self - other|`, compared against `tol` as described on [`nearly_equal`].
    fn nearly_equal(&self, other: &Self, tol: &ToleranceSpec) -> bool;

    /// Division that refuses an exact zero divisor.
    fn checked_div(&self, rhs: &Self) -> Result<Self, KernelError> {
        if rhs.is_zero() {
            Err(KernelError::DivisionByZero)
        } else {
            Ok(self.clone() / rhs.clone())
        }
    }

    /// Floating modes report true when the value is large enough that the
    /// forward recurrence should rescale.
    fn needs_rescale(&self) -> bool {
        false
    }

    /// Multiplies by the engine's power-of-two rescale factor.
    fn rescaled(&self) -> Self {
        self.clone()
    }

    fn is_finite_value(&self) -> bool {
        true
    }

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(v)))
    }
}

/// Scalars that support the modified Lentz algorithm.
pub trait FloatScalar: Scalar + Copy {
    /// Replacement for an exactly-zero intermediate.
    const TINY: f64;
    fn tiny() -> Self;
}

const RESCALE_THRESHOLD: f64 = 1.157_920_892_373_162e77; // 2^256
const RESCALE_FACTOR: f64 = 8.636_168_555_094_445e-78; // 2^-256

fn float_nearly_equal(diff: f64, a: f64, b: f64, tol: &ToleranceSpec) -> bool {
    diff <= tol.abs_tol || diff <= tol.rel_tol * a.max(b)
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float64;

    fn from_rational(r: &BigRational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }

    fn to_value(&self) -> ScalarValue {
        ScalarValue::Float64(*self)
    }

    fn from_value(v: &ScalarValue) -> Result<Self, KernelError> {
        match v {
            ScalarValue::Float64(x) => Ok(*x),
            other => Err(KernelError::ModeMismatch {
                left: Mode::Float64,
                right: other.mode(),
            }),
        }
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn nearly_equal(&self, other: &Self, tol: &ToleranceSpec) -> bool {
        if self == other {
            return true;
        }
        float_nearly_equal((self - other).abs(), self.abs(), other.abs(), tol)
    }

    fn needs_rescale(&self) -> bool {
        self.abs() > RESCALE_THRESHOLD
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }

    fn rescaled(&self) -> Self {
        self * RESCALE_FACTOR
    }
}

impl FloatScalar for f64 {
    const TINY: f64 = 1e-300;
    fn tiny() -> Self {
        Self::TINY
    }
}

impl Scalar for Complex64 {
    const MODE: Mode = Mode::Complex64;

    fn from_rational(r: &BigRational) -> Self {
        Complex64::new(f64::from_rational(r), 0.0)
    }

    fn to_value(&self) -> ScalarValue {
        ScalarValue::Complex64(*self)
    }

    fn from_value(v: &ScalarValue) -> Result<Self, KernelError> {
        match v {
            ScalarValue::Complex64(x) => Ok(*x),
            other => Err(KernelError::ModeMismatch {
                left: Mode::Complex64,
                right: other.mode(),
            }),
        }
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }

    fn nearly_equal(&self, other: &Self, tol: &ToleranceSpec) -> bool {
        if self == other {
            return true;
        }
        float_nearly_equal((self - other).norm(), self.norm(), other.norm(), tol)
    }

    fn needs_rescale(&self) -> bool {
        self.l1_norm() > RESCALE_THRESHOLD
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }

    fn rescaled(&self) -> Self {
        self * RESCALE_FACTOR
    }
}

impl FloatScalar for Complex64 {
    const TINY: f64 = 1e-300;
    fn tiny() -> Self {
        Complex64::new(Self::TINY, 0.0)
    }
}

impl Scalar for BigRational {
    const MODE: Mode = Mode::BigRational;

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn to_value(&self) -> ScalarValue {
        ScalarValue::Rational(self.clone())
    }

    fn from_value(v: &ScalarValue) -> Result<Self, KernelError> {
        match v {
            ScalarValue::Rational(x) => Ok(x.clone()),
            other => Err(KernelError::ModeMismatch {
                left: Mode::BigRational,
                right: other.mode(),
            }),
        }
    }

    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }

    fn nearly_equal(&self, other: &Self, tol: &ToleranceSpec) -> bool {
        if self == other {
            return true;
        }
        if tol.is_exact() {
            return false;
        }
        // Compared exactly: every finite double is a rational.
        let diff = (self - other).abs();
        let abs_tol = BigRational::from_f64(tol.abs_tol).unwrap_or_else(BigRational::zero);
        let rel_tol = BigRational::from_f64(tol.rel_tol).unwrap_or_else(BigRational::zero);
        let scale = std::cmp::max(self.abs(), other.abs());
        diff <= abs_tol || diff <= rel_tol * scale
    }
}

/// A scalar whose mode is decided at run time.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarValue {
    Float64(f64),
    Rational(BigRational),
    Complex64(Complex64),
}

impl ScalarValue {
    pub fn mode(&self) -> Mode {
        match self {
            ScalarValue::Float64(_) => Mode::Float64,
            ScalarValue::Rational(_) => Mode::BigRational,
            ScalarValue::Complex64(_) => Mode::Complex64,
        }
    }

    pub fn zero(mode: Mode) -> ScalarValue {
        match mode {
            Mode::Float64 => ScalarValue::Float64(0.0),
            Mode::BigRational => ScalarValue::Rational(BigRational::zero()),
            Mode::Complex64 => ScalarValue::Complex64(Complex64::zero()),
        }
    }

    pub fn from_rational(r: &BigRational, mode: Mode) -> ScalarValue {
        match mode {
            Mode::Float64 => ScalarValue::Float64(f64::from_rational(r)),
            Mode::BigRational => ScalarValue::Rational(r.clone()),
            Mode::Complex64 => ScalarValue::Complex64(Complex64::from_rational(r)),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ScalarValue::Float64(x) => *x == 0.0,
            ScalarValue::Rational(r) => r.is_zero(),
            ScalarValue::Complex64(c) => c.is_zero(),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            ScalarValue::Float64(x) => x.is_finite(),
            ScalarValue::Rational(_) => true,
            ScalarValue::Complex64(c) => c.is_finite(),
        }
    }

    pub fn magnitude(&self) -> f64 {
        match self {
            ScalarValue::Float64(x) => x.magnitude(),
            ScalarValue::Rational(r) => r.magnitude(),
            ScalarValue::Complex64(c) => c.magnitude(),
        }
    }

    /// Real part as a double; errors for complex values with a nonzero
    /// imaginary part.
    pub fn to_real_f64(&self) -> Result<f64, KernelError> {
        match self {
            ScalarValue::Float64(x) => Ok(*x),
            ScalarValue::Rational(r) => Ok(f64::from_rational(r)),
            ScalarValue::Complex64(c) if c.im == 0.0 => Ok(c.re),
            ScalarValue::Complex64(_) => Err(KernelError::NotReal),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            ScalarValue::Complex64(c) => *c,
            ScalarValue::Float64(x) => Complex64::new(*x, 0.0),
            ScalarValue::Rational(r) => Complex64::from_rational(r),
        }
    }

    /// The exact rational this value denotes. Doubles convert without
    /// rounding; complex values must be real.
    pub fn to_exact_rational(&self) -> Result<BigRational, KernelError> {
        let from_f64 = |x: f64| BigRational::from_float(x).ok_or(KernelError::NotFinite);
        match self {
            ScalarValue::Rational(r) => Ok(r.clone()),
            ScalarValue::Float64(x) => from_f64(*x),
            ScalarValue::Complex64(c) if c.im == 0.0 => from_f64(c.re),
            ScalarValue::Complex64(_) => Err(KernelError::NotReal),
        }
    }

    fn binary(
        &self,
        rhs: &ScalarValue,
        ff: impl FnOnce(f64, f64) -> f64,
        rr: impl FnOnce(&BigRational, &BigRational) -> BigRational,
        cc: impl FnOnce(Complex64, Complex64) -> Complex64,
    ) -> Result<ScalarValue, KernelError> {
        match (self, rhs) {
            (ScalarValue::Float64(a), ScalarValue::Float64(b)) => {
                Ok(ScalarValue::Float64(ff(*a, *b)))
            }
            (ScalarValue::Rational(a), ScalarValue::Rational(b)) => {
                Ok(ScalarValue::Rational(rr(a, b)))
            }
            (ScalarValue::Complex64(a), ScalarValue::Complex64(b)) => {
                Ok(ScalarValue::Complex64(cc(*a, *b)))
            }
            (a, b) => Err(KernelError::ModeMismatch {
                left: a.mode(),
                right: b.mode(),
            }),
        }
    }

    pub fn add(&self, rhs: &ScalarValue) -> Result<ScalarValue, KernelError> {
        self.binary(rhs, |a, b| a + b, |a, b| a + b, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &ScalarValue) -> Result<ScalarValue, KernelError> {
        self.binary(rhs, |a, b| a - b, |a, b| a - b, |a, b| a - b)
    }

    pub fn mul(&self, rhs: &ScalarValue) -> Result<ScalarValue, KernelError> {
        self.binary(rhs, |a, b| a * b, |a, b| a * b, |a, b| a * b)
    }

    pub fn div(&self, rhs: &ScalarValue) -> Result<ScalarValue, KernelError> {
        if rhs.is_zero() {
            // Mode check still takes precedence.
            if self.mode() != rhs.mode() {
                return Err(KernelError::ModeMismatch {
                    left: self.mode(),
                    right: rhs.mode(),
                });
            }
            return Err(KernelError::DivisionByZero);
        }
        self.binary(rhs, |a, b| a / b, |a, b| a / b, |a, b| a / b)
    }

    pub fn neg(&self) -> ScalarValue {
        match self {
            ScalarValue::Float64(x) => ScalarValue::Float64(-x),
            ScalarValue::Rational(r) => ScalarValue::Rational(-r),
            ScalarValue::Complex64(c) => ScalarValue::Complex64(-c),
        }
    }

    /// Parses `text` in the requested mode.
    ///
    /// Rational mode accepts only integers and `p/q` fractions; decimals are
    /// rejected rather than approximated. Float mode accepts decimals and
    /// `p/q`. Complex mode accepts `a+bi` forms as well as real inputs.
    pub fn parse(text: &str, mode: Mode) -> Result<ScalarValue, KernelError> {
        let text = text.trim();
        let err = |reason: &str| KernelError::Parse {
            text: text.to_string(),
            mode,
            reason: reason.to_string(),
        };
        match mode {
            Mode::BigRational => parse_fraction(text)
                .map(ScalarValue::Rational)
                .ok_or_else(|| err("expected an integer or p/q fraction (decimals are not exact)")),
            Mode::Float64 => {
                if let Some(r) = parse_fraction(text) {
                    return Ok(ScalarValue::Float64(f64::from_rational(&r)));
                }
                let x: f64 = text
                    .parse()
                    .map_err(|_| err("expected a decimal number or p/q"))?;
                if !x.is_finite() {
                    return Err(err("value is not finite"));
                }
                Ok(ScalarValue::Float64(x))
            }
            Mode::Complex64 => {
                if let Some(r) = parse_fraction(text) {
                    return Ok(ScalarValue::Complex64(Complex64::from_rational(&r)));
                }
                let c =
                    Complex64::from_str(text).map_err(|_| err("expected a+bi, bi, a, or p/q"))?;
                if !c.is_finite() {
                    return Err(err("value is not finite"));
                }
                Ok(ScalarValue::Complex64(c))
            }
        }
    }
}

fn parse_fraction(text: &str) -> Option<BigRational> {
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num = BigInt::from_str(num).ok()?;
    let den = BigInt::from_str(den).ok()?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

impl fmt::Display for ScalarValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarValue::Float64(x) => f.write_str(&format_f64(*x)),
            ScalarValue::Rational(r) => f.write_str(&format_rational(r)),
            ScalarValue::Complex64(c) => {
                let sign = if c.im.is_sign_negative() { '-' } else { '+' };
                write!(f, "{}{}{}i", format_f64(c.re), sign, format_f64(c.im.abs()))
            }
        }
    }
}

/// Exact fraction text: `p/q`, or `p` when the denominator is one.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Formats a double with 17 significant digits (enough to round-trip),
/// positional for moderate exponents, trailing zeros trimmed.
pub fn format_f64(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("exponent digits");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    if !(-6..21).contains(&exp) {
        let trimmed = trim_fraction(&format!("{}.{}", &digits[..1], &digits[1..]));
        return format!("{sign}{trimmed}e{exp}");
    }
    let body = if exp < 0 {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    } else {
        let int_len = exp as usize + 1;
        if int_len >= digits.len() {
            format!("{}{}", digits, "0".repeat(int_len - digits.len()))
        } else {
            format!("{}.{}", &digits[..int_len], &digits[int_len..])
        }
    };
    format!("{sign}{}", trim_fraction(&body))
}

fn trim_fraction(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// `true` iff `|a−b| ≤ abs_tol` or `|a−b| ≤ rel_tol·max(|a|,|b|)`.
/// Rational values are compared exactly; with [`ToleranceSpec::EXACT`] only
/// equal values pass.
pub fn nearly_equal(
    a: &ScalarValue,
    b: &ScalarValue,
    tol: &ToleranceSpec,
) -> Result<bool, KernelError> {
    match (a, b) {
        (ScalarValue::Float64(x), ScalarValue::Float64(y)) => Ok(x.nearly_equal(y, tol)),
        (ScalarValue::Rational(x), ScalarValue::Rational(y)) => Ok(x.nearly_equal(y, tol)),
        (ScalarValue::Complex64(x), ScalarValue::Complex64(y)) => Ok(x.nearly_equal(y, tol)),
        (a, b) => Err(KernelError::ModeMismatch {
            left: a.mode(),
            right: b.mode(),
        }),
    }
}

/// `num/den` in the requested mode.
pub fn scalar_from_ratio(num: i64, den: i64, mode: Mode) -> Result<ScalarValue, KernelError> {
    if den == 0 {
        return Err(KernelError::ZeroDenominator);
    }
    Ok(ScalarValue::from_rational(&ratio(num, den), mode))
}

/// Shorthand for an exact `num/den`. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `true` when `r` is an integer.
pub fn is_integer(r: &BigRational) -> bool {
    r.denom().is_one()
}
