//! Reference values for the closed-form side of every fraction.
//!
//! Nothing here touches the continued-fraction machinery. Integer exponents
//! with rational arguments are evaluated in exact rational arithmetic; other
//! inputs use the platform's `pow`, `atan`, `tan`, `atanh` and `exp_m1`.

use std::f64::consts::FRAC_PI_2;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::families::{Exponent, Family, FamilySpec, TAN_POLE_GUARD};
use crate::kernel::{KernelError, Mode, Scalar, ScalarValue};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("no {0} oracle in {1} mode")]
    UnsupportedMode(&'static str, Mode),
}

/// How an oracle value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    ClosedForm,
    ExactRational,
    TruncatedSeries,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub value: ScalarValue,
    pub method: OracleMethod,
    /// Series terms summed; zero for the other methods.
    pub terms_used: usize,
}

impl OracleResult {
    fn exact(r: BigRational) -> Self {
        OracleResult {
            value: ScalarValue::Rational(r),
            method: OracleMethod::ExactRational,
            terms_used: 0,
        }
    }

    fn closed(value: ScalarValue) -> Self {
        OracleResult {
            value,
            method: OracleMethod::ClosedForm,
            terms_used: 0,
        }
    }

    fn float(x: f64) -> Self {
        Self::closed(ScalarValue::Float64(x))
    }
}

/// Whether a removable singularity (z = 0, v = 0) may be filled with its
/// limit value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Limit {
    Reject,
    Allow,
}

fn domain(msg: impl Into<String>) -> OracleError {
    OracleError::Domain(msg.into())
}

fn one_plus(r: &BigRational) -> BigRational {
    BigRational::one() + r
}

/// `r^n` for an integer exponent; `None` when `r = 0` and `n < 0`.
fn int_pow(r: &BigRational, n: &BigInt) -> Option<BigRational> {
    let e = n.abs().to_u32()?;
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= r;
    }
    if n.is_negative() {
        if acc.is_zero() {
            return None;
        }
        acc = acc.recip();
    }
    Some(acc)
}

fn real(v: &ScalarValue, what: &'static str) -> Result<f64, OracleError> {
    match v {
        ScalarValue::Complex64(_) => Err(OracleError::UnsupportedMode(what, Mode::Complex64)),
        other => Ok(other.to_real_f64()?),
    }
}

/// `(1+x)^n`.
pub fn binomial_power(n: &Exponent, x: &ScalarValue) -> Result<OracleResult, OracleError> {
    let nr = n.as_rational();
    match x {
        ScalarValue::Rational(xr) if n.is_integer() => int_pow(&one_plus(xr), nr.numer())
            .map(OracleResult::exact)
            .ok_or_else(|| domain("(1+x)^n with x = -1 and n < 0")),
        ScalarValue::Complex64(c) => {
            let base = Complex64::one() + c;
            if base.is_zero() && n.to_f64() <= 0.0 {
                return Err(domain("(1+x)^n with x = -1 and n <= 0"));
            }
            let value = match nr.to_integer().to_i32().filter(|_| n.is_integer()) {
                Some(k) => base.powi(k),
                None => base.powf(n.to_f64()),
            };
            Ok(OracleResult::closed(ScalarValue::Complex64(value)))
        }
        _ => {
            let base = 1.0 + x.to_real_f64()?;
            if n.is_integer() {
                if base == 0.0 && nr.is_negative() {
                    return Err(domain("(1+x)^n with x = -1 and n < 0"));
                }
            } else if base.is_nan() || base <= 0.0 {
                return Err(domain("(1+x)^n with non-integer n requires 1+x > 0"));
            }
            Ok(OracleResult::float(base.powf(n.to_f64())))
        }
    }
}

/// `nz[(1+z)^n + (1−z)^n] / [(1+z)^n − (1−z)^n]` for `0 < |z| < 1`, `n ≠ 0`.
pub fn symmetric_lhs(
    n: &Exponent,
    z: &ScalarValue,
    limit: Limit,
) -> Result<OracleResult, OracleError> {
    if n.as_rational().is_zero() {
        return Err(domain("n = 0 makes the expression 0/0; use log_ratio_lhs"));
    }
    if z.is_zero() {
        return match limit {
            Limit::Allow => Ok(OracleResult {
                value: ScalarValue::from_rational(&BigRational::one(), z.mode()),
                method: if z.mode() == Mode::BigRational {
                    OracleMethod::ExactRational
                } else {
                    OracleMethod::ClosedForm
                },
                terms_used: 0,
            }),
            Limit::Reject => Err(domain("z = 0 makes the expression 0/0 (limit 1)")),
        };
    }
    if z.magnitude().is_nan() || z.magnitude() >= 1.0 {
        return Err(domain("symmetric form requires |z| < 1"));
    }
    match z {
        ScalarValue::Rational(zr) if n.is_integer() => {
            let k = n.as_rational().numer();
            let plus = int_pow(&one_plus(zr), k).expect("1+z ≠ 0");
            let minus = int_pow(&(BigRational::one() - zr), k).expect("1-z ≠ 0");
            let num = n.as_rational() * zr * (&plus + &minus);
            Ok(OracleResult::exact(num / (plus - minus)))
        }
        ScalarValue::Complex64(c) => {
            let nf = n.to_f64();
            let plus = (Complex64::one() + c).powf(nf);
            let minus = (Complex64::one() - c).powf(nf);
            let value = c * nf * (plus + minus) / (plus - minus);
            Ok(OracleResult::closed(ScalarValue::Complex64(value)))
        }
        _ => {
            let zf = z.to_real_f64()?;
            let nf = n.to_f64();
            let plus = (1.0 + zf).powf(nf);
            let minus = (1.0 - zf).powf(nf);
            Ok(OracleResult::float(
                nf * zf * (plus + minus) / (plus - minus),
            ))
        }
    }
}

/// `tan(n·arctan t)`.
///
/// Integer `n` with rational `t` is exact: `tan nφ = Im(1+it)^n / Re(1+it)^n`.
pub fn tan_multiple_lhs(n: &Exponent, t: &ScalarValue) -> Result<OracleResult, OracleError> {
    if let (ScalarValue::Rational(tr), Some(m)) = (t, n.abs_integer()) {
        // (1+it)^m expanded binomially.
        let mut re = BigRational::zero();
        let mut im = BigRational::zero();
        let mut binom = BigInt::one();
        let mut power = BigRational::one();
        for k in 0..=m {
            let term = BigRational::from_integer(binom.clone()) * &power;
            match k % 4 {
                0 => re += term,
                1 => im += term,
                2 => re -= term,
                _ => im -= term,
            }
            binom = binom * BigInt::from(m - k) / BigInt::from(k + 1);
            power *= tr;
        }
        if re.is_zero() {
            return Err(OracleError::Pole(format!(
                "tan({}·arctan t) is infinite",
                n.as_rational()
            )));
        }
        let value = im / re;
        let value = if n.as_rational().is_negative() {
            -value
        } else {
            value
        };
        return Ok(OracleResult::exact(value));
    }
    let tf = real(t, "tan-multiple")?;
    let angle = n.to_f64() * tf.atan();
    if angle.cos() == 0.0 {
        return Err(OracleError::Pole(format!("tan({angle}) is infinite")));
    }
    Ok(OracleResult::float(angle.tan()))
}

/// `arctan t`.
pub fn arctan_lhs(t: &ScalarValue) -> Result<OracleResult, OracleError> {
    if let ScalarValue::Rational(r) = t {
        if r.is_zero() {
            return Ok(OracleResult::exact(BigRational::zero()));
        }
    }
    Ok(OracleResult::float(real(t, "arctan")?.atan()))
}

/// `tan θ`, refusing θ near an odd multiple of π/2.
pub fn tan_lhs(theta: &ScalarValue) -> Result<OracleResult, OracleError> {
    if let ScalarValue::Rational(r) = theta {
        if r.is_zero() {
            return Ok(OracleResult::exact(BigRational::zero()));
        }
    }
    let th = real(theta, "tan")?;
    let odd = ((th / FRAC_PI_2 - 1.0) / 2.0).round() * 2.0 + 1.0;
    if (th - odd * FRAC_PI_2).abs() < TAN_POLE_GUARD {
        return Err(OracleError::Pole(format!("tan is infinite near {odd}·π/2")));
    }
    Ok(OracleResult::float(th.tan()))
}

/// `ln((1+z)/(1−z))` for `|z| < 1`.
pub fn log_ratio_lhs(z: &ScalarValue) -> Result<OracleResult, OracleError> {
    let zf = real(z, "log-ratio")?;
    if zf.is_nan() || zf.abs() >= 1.0 {
        return Err(domain("log-ratio requires |z| < 1"));
    }
    if let ScalarValue::Rational(r) = z {
        if r.is_zero() {
            return Ok(OracleResult::exact(BigRational::zero()));
        }
    }
    Ok(OracleResult::float(2.0 * zf.atanh()))
}

/// `v(e^{2v}+1)/(e^{2v}−1)`, i.e. `v·coth v`.
pub fn coth_scaled_lhs(v: &ScalarValue, limit: Limit) -> Result<OracleResult, OracleError> {
    let vf = real(v, "coth-scaled")?;
    if vf == 0.0 {
        return match limit {
            Limit::Allow => Ok(OracleResult {
                value: ScalarValue::from_rational(&BigRational::one(), v.mode()),
                method: if v.mode() == Mode::BigRational {
                    OracleMethod::ExactRational
                } else {
                    OracleMethod::ClosedForm
                },
                terms_used: 0,
            }),
            Limit::Reject => Err(domain("v = 0 makes the expression 0/0 (limit 1)")),
        };
    }
    // Even in v; past |v| = 20 the factor (e^{2v}+1)/(e^{2v}−1) is 1 to
    // well below double precision.
    let a = vf.abs();
    if a > 20.0 {
        return Ok(OracleResult::float(a));
    }
    let e = (2.0 * a).exp_m1();
    Ok(OracleResult::float(a * (e + 2.0) / e))
}

/// Ratio of `Σ_{k<terms} v^{2k}/(2k)!` to `Σ_{k<terms} v^{2k}/(2k+1)!`.
pub fn series_ratio_coth(v: &ScalarValue, terms: usize) -> Result<OracleResult, OracleError> {
    if terms < 1 {
        return Err(domain("series_ratio_coth needs at least one term"));
    }
    let value = match v {
        ScalarValue::Rational(r) => ScalarValue::Rational(series_ratio(r.clone(), terms)),
        ScalarValue::Float64(x) => ScalarValue::Float64(series_ratio(*x, terms)),
        ScalarValue::Complex64(c) => ScalarValue::Complex64(series_ratio(*c, terms)),
    };
    Ok(OracleResult {
        value,
        method: OracleMethod::TruncatedSeries,
        terms_used: terms,
    })
}

fn series_ratio<T: Scalar>(v: T, terms: usize) -> T {
    let v_sq = v.clone() * v;
    let mut even = T::one();
    let mut odd = T::one();
    let mut num = T::one();
    let mut den = T::one();
    for k in 1..terms {
        let two_k = (2 * k) as i64;
        even = even * v_sq.clone() / T::from_i64((two_k - 1) * two_k);
        odd = odd * v_sq.clone() / T::from_i64(two_k * (two_k + 1));
        num = num + even.clone();
        den = den + odd.clone();
    }
    num / den
}

/// The oracle that matches `spec`'s family, if one exists in its mode.
pub fn family_oracle(spec: &FamilySpec) -> Option<Result<OracleResult, OracleError>> {
    let n = match spec.exponent() {
        Ok(n) => n,
        Err(e) => return Some(Err(OracleError::Domain(e.to_string()))),
    };
    let complex = spec.mode() == Mode::Complex64;
    let arg = &spec.arg;
    let need_n = || n.clone().expect("validated exponent");
    Some(match spec.family {
        Family::LagrangeBinomial | Family::UniformBinomial => binomial_power(&need_n(), arg),
        Family::SymmetricBinomial => symmetric_lhs(&need_n(), arg, Limit::Allow),
        _ if complex => return None,
        Family::TanMultiple => tan_multiple_lhs(&need_n(), arg),
        Family::ArcTan => arctan_lhs(arg),
        Family::Tan => tan_lhs(arg),
        Family::LogRatio => log_ratio_lhs(arg),
        Family::CothScaled => coth_scaled_lhs(arg, Limit::Allow),
    })
}

/// Absolute and relative error of `value` against `reference`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorPair {
    pub abs: f64,
    pub rel: f64,
}

/// Exact when both sides are rational; otherwise in double precision.
pub fn compare_values(value: &ScalarValue, reference: &ScalarValue) -> ErrorPair {
    let (abs, scale) = match (value, reference) {
        (ScalarValue::Rational(a), ScalarValue::Rational(b)) => {
            let diff = (a - b).abs();
            if diff.is_zero() {
                return ErrorPair { abs: 0.0, rel: 0.0 };
            }
            let rel = if b.is_zero() {
                f64::INFINITY
            } else {
                (&diff / b.abs()).to_f64().unwrap_or(f64::INFINITY)
            };
            return ErrorPair {
                abs: diff.to_f64().unwrap_or(f64::INFINITY),
                rel,
            };
        }
        (ScalarValue::Complex64(_), _) | (_, ScalarValue::Complex64(_)) => {
            let a = value.to_complex();
            let b = reference.to_complex();
            ((a - b).norm(), b.norm())
        }
        _ => {
            let a = value.to_real_f64().unwrap_or(f64::NAN);
            let b = reference.to_real_f64().unwrap_or(f64::NAN);
            ((a - b).abs(), b.abs())
        }
    };
    let rel = if abs == 0.0 { 0.0 } else { abs / scale };
    ErrorPair { abs, rel }
}
