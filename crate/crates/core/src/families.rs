//! Generators for the binomial-power continued fractions and their limiting
//! forms.
//!
//! Every coefficient that depends on the exponent `n` is computed in exact
//! rational arithmetic and only then converted to the evaluation mode, so an
//! integer `n` always yields an exact zero numerator.
//!
//! `TanMultiple`, `ArcTan`, `Tan` and `LogRatio` are full fractions
//! `N / D`: they are stored with `b0 = 0`, `a1 = N` and the levels of `D`
//! shifted down by one.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::engine::{
    convergents, eval_backward, eval_convergents, eval_lentz, CfStream, CfTerm, Convergents,
    EvalError, EvalReport,
};
use crate::kernel::{is_integer, KernelError, Mode, Scalar, ScalarValue, ToleranceSpec};

/// Distance from an odd multiple of π/2 inside which `tan_cf` refuses θ.
pub const TAN_POLE_GUARD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("family {0} takes no exponent n")]
    UnexpectedExponent(Family),
    #[error("family {0} requires an exponent n")]
    MissingExponent(Family),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
}

/// The eight continued-fraction families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    LagrangeBinomial,
    UniformBinomial,
    SymmetricBinomial,
    TanMultiple,
    ArcTan,
    Tan,
    LogRatio,
    CothScaled,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::LagrangeBinomial,
        Family::UniformBinomial,
        Family::SymmetricBinomial,
        Family::TanMultiple,
        Family::ArcTan,
        Family::Tan,
        Family::LogRatio,
        Family::CothScaled,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::LagrangeBinomial => "lagrange-binomial",
            Family::UniformBinomial => "uniform-binomial",
            Family::SymmetricBinomial => "symmetric-binomial",
            Family::TanMultiple => "tan-multiple",
            Family::ArcTan => "arctan",
            Family::Tan => "tan",
            Family::LogRatio => "log-ratio",
            Family::CothScaled => "coth-scaled",
        }
    }

    pub fn takes_exponent(self) -> bool {
        matches!(
            self,
            Family::LagrangeBinomial
                | Family::UniformBinomial
                | Family::SymmetricBinomial
                | Family::TanMultiple
        )
    }

    /// Name of the argument in the closed form (x, z, t, θ or v).
    pub fn arg_name(self) -> &'static str {
        match self {
            Family::LagrangeBinomial | Family::UniformBinomial => "x",
            Family::SymmetricBinomial | Family::LogRatio => "z",
            Family::TanMultiple | Family::ArcTan => "t",
            Family::Tan => "theta",
            Family::CothScaled => "v",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| FamilyError::UnknownFamily(s.to_string()))
    }
}

/// Exponent `n`, always held as an exact rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exponent(BigRational);

impl Exponent {
    pub fn new(n: BigRational) -> Self {
        Exponent(n)
    }

    pub fn integer(n: i64) -> Self {
        Exponent(BigRational::from_integer(n.into()))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Exponent(crate::kernel::ratio(num, den))
    }

    /// Exact rational of a scalar; doubles convert without rounding.
    pub fn from_value(v: &ScalarValue) -> Result<Self, KernelError> {
        v.to_exact_rational().map(Exponent)
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn is_integer(&self) -> bool {
        is_integer(&self.0)
    }

    /// `|n|` when `n` is an integer that fits in `u64`.
    pub fn abs_integer(&self) -> Option<u64> {
        self.is_integer()
            .then(|| self.0.numer().abs().to_u64())
            .flatten()
    }

    pub fn to_f64(&self) -> f64 {
        f64::from_rational(&self.0)
    }

    pub fn squared(&self) -> BigRational {
        &self.0 * &self.0
    }
}

fn int(k: usize) -> BigRational {
    BigRational::from_integer(k.into())
}

/// Lagrange's fraction for `(1+x)^n`:
/// `1 + nx/(1 + (1−n)x/(2 + (1+n)x/(3 + (2−n)x/(2 + (2+n)x/(5 + …)))))`.
///
/// Level 1 is `(nx, 1)`; for `k ≥ 1`, level `2k` is `((k−n)x, 2)` and level
/// `2k+1` is `((k+n)x, 2k+1)`.
pub fn lagrange_binomial<T: Scalar>(n: &Exponent, x: T) -> CfStream<T> {
    let n = n.as_rational().clone();
    CfStream::new(T::one(), move |level| {
        let (coef, b) = if level == 1 {
            (n.clone(), T::one())
        } else if level % 2 == 0 {
            (int(level / 2) - &n, T::from_i64(2))
        } else {
            (int(level / 2) + &n, T::from_i64(level as i64))
        };
        CfTerm::new(T::from_rational(&coef) * x.clone(), b)
    })
}

/// The rebracketed binomial fraction with a uniform law:
/// `1 + nx/(1 + (1−n)x/2 + ((n²−1)x²/4)/(3(1+x/2) + ((n²−4)x²/4)/(5(1+x/2) + …)))`.
pub fn uniform_binomial<T: Scalar>(n: &Exponent, x: T) -> CfStream<T> {
    let n = n.as_rational().clone();
    let n_sq = &n * &n;
    let half = crate::kernel::ratio(1, 2);
    let quarter = crate::kernel::ratio(1, 4);
    let shift = T::one() + T::from_rational(&half) * x.clone();
    CfStream::new(T::one(), move |level| {
        if level == 1 {
            let b1 = T::one() + T::from_rational(&((int(1) - &n) * &half)) * x.clone();
            return CfTerm::new(T::from_rational(&n) * x.clone(), b1);
        }
        let j = int(level - 1);
        let coef = (&n_sq - &j * &j) * &quarter;
        CfTerm::new(
            T::from_rational(&coef) * x.clone() * x.clone(),
            T::from_i64(2 * level as i64 - 1) * shift.clone(),
        )
    })
}

/// `1 + (n²−1)z²/(3 + (n²−4)z²/(5 + …))`, equal to
/// `nz[(1+z)^n + (1−z)^n] / [(1+z)^n − (1−z)^n]`. Only `n²` enters.
pub fn symmetric_binomial<T: Scalar>(n: &Exponent, z: T) -> CfStream<T> {
    let n_sq = n.squared();
    let z_sq = z.clone() * z;
    CfStream::new(T::one(), move |k| {
        let kk = int(k);
        CfTerm::new(
            T::from_rational(&(&n_sq - &kk * &kk)) * z_sq.clone(),
            T::from_i64(2 * k as i64 + 1),
        )
    })
}

/// Wraps a denominator fraction `1 + α_1/(3 + α_2/(5 + …))` as
/// `numerator / (denominator)`.
fn full_fraction<T: Scalar>(
    numerator: T,
    denominator_numerators: impl Fn(usize) -> T + Send + Sync + 'static,
) -> CfStream<T> {
    CfStream::new(T::zero(), move |level| {
        if level == 1 {
            CfTerm::new(numerator.clone(), T::one())
        } else {
            let k = level - 1;
            CfTerm::new(denominator_numerators(k), T::from_i64(2 * k as i64 + 1))
        }
    })
}

/// `tan(nφ) = nt/(1 − (n²−1)t²/(3 − (n²−4)t²/(5 − …)))` with `t = tan φ`.
///
/// A zero denominator (a pole of `tan nφ`) shows up at evaluation as
/// [`EvalError::PoleAtTruncation`] or a non-finite value.
pub fn tan_multiple<T: Scalar>(n: &Exponent, t: T) -> CfStream<T> {
    let n_sq = n.squared();
    let minus_t_sq = -(t.clone() * t.clone());
    let lead = T::from_rational(n.as_rational()) * t;
    full_fraction(lead, move |k| {
        let kk = int(k);
        T::from_rational(&(&n_sq - &kk * &kk)) * minus_t_sq.clone()
    })
}

/// `arctan t = t/(1 + t²/(3 + 4t²/(5 + 9t²/(7 + …))))`.
pub fn arctan_cf<T: Scalar>(t: T) -> CfStream<T> {
    let t_sq = t.clone() * t.clone();
    full_fraction(t, move |k| T::from_i64((k * k) as i64) * t_sq.clone())
}

fn real_part<T: Scalar>(v: &T) -> Option<f64> {
    v.to_value().to_real_f64().ok()
}

/// `tan θ = θ/(1 − θ²/(3 − θ²/(5 − …)))`.
///
/// Rejects real θ within [`TAN_POLE_GUARD`] of an odd multiple of π/2.
pub fn tan_cf<T: Scalar>(theta: T) -> Result<CfStream<T>, FamilyError> {
    if let Some(th) = real_part(&theta) {
        let odd = ((th / FRAC_PI_2 - 1.0) / 2.0).round() * 2.0 + 1.0;
        let distance = (th - odd * FRAC_PI_2).abs();
        if distance < TAN_POLE_GUARD {
            return Err(FamilyError::Domain(format!(
                "theta = {th} is within {TAN_POLE_GUARD:e} of the tangent pole {odd}·π/2"
            )));
        }
    }
    let minus_sq = -(theta.clone() * theta.clone());
    Ok(full_fraction(theta, move |_| minus_sq.clone()))
}

/// `ln((1+z)/(1−z)) = 2z/(1 − z²/(3 − 4z²/(5 − 9z²/(7 − …))))` for `|z| < 1`.
pub fn log_ratio_cf<T: Scalar>(z: T) -> Result<CfStream<T>, FamilyError> {
    if z.magnitude().is_nan() || z.magnitude() >= 1.0 {
        return Err(FamilyError::Domain(format!(
            "log-ratio requires |z| < 1, got |z| = {}",
            z.magnitude()
        )));
    }
    let minus_sq = -(z.clone() * z.clone());
    let lead = T::from_i64(2) * z;
    Ok(full_fraction(lead, move |k| {
        T::from_i64((k * k) as i64) * minus_sq.clone()
    }))
}

/// `v·coth v = v(e^{2v}+1)/(e^{2v}−1) = 1 + v²/(3 + v²/(5 + v²/(7 + …)))`.
pub fn coth_scaled_cf<T: Scalar>(v: T) -> CfStream<T> {
    let v_sq = v.clone() * v;
    CfStream::new(T::one(), move |k| {
        CfTerm::new(v_sq.clone(), T::from_i64(2 * k as i64 + 1))
    })
}

/// One family together with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    pub family: Family,
    pub n: Option<ScalarValue>,
    pub arg: ScalarValue,
}

impl FamilySpec {
    pub fn new(
        family: Family,
        n: Option<ScalarValue>,
        arg: ScalarValue,
    ) -> Result<Self, FamilyError> {
        let spec = FamilySpec { family, n, arg };
        spec.validate()?;
        Ok(spec)
    }

    pub fn mode(&self) -> Mode {
        self.arg.mode()
    }

    pub fn validate(&self) -> Result<(), FamilyError> {
        match (&self.n, self.family.takes_exponent()) {
            (Some(_), false) => return Err(FamilyError::UnexpectedExponent(self.family)),
            (None, true) => return Err(FamilyError::MissingExponent(self.family)),
            _ => {}
        }
        if !self.arg.is_finite() {
            return Err(KernelError::NotFinite.into());
        }
        if let Some(n) = &self.n {
            if n.mode() != self.arg.mode() {
                return Err(KernelError::ModeMismatch {
                    left: n.mode(),
                    right: self.arg.mode(),
                }
                .into());
            }
            Exponent::from_value(n)?;
        }
        Ok(())
    }

    pub fn exponent(&self) -> Result<Option<Exponent>, FamilyError> {
        self.n
            .as_ref()
            .map(|n| Exponent::from_value(n).map_err(FamilyError::from))
            .transpose()
    }

    /// Builds the stream in the argument's mode.
    pub fn build(&self) -> Result<DynStream, FamilyError> {
        self.validate()?;
        Ok(match &self.arg {
            ScalarValue::Float64(x) => DynStream::Float(self.build_typed(*x)?),
            ScalarValue::Rational(x) => DynStream::Rational(self.build_typed(x.clone())?),
            ScalarValue::Complex64(x) => DynStream::Complex(self.build_typed(*x)?),
        })
    }

    /// Builds the stream for a statically known mode.
    pub fn build_typed<T: Scalar>(&self, arg: T) -> Result<CfStream<T>, FamilyError> {
        let n = self.exponent()?;
        let n = || n.clone().ok_or(FamilyError::MissingExponent(self.family));
        Ok(match self.family {
            Family::LagrangeBinomial => lagrange_binomial(&n()?, arg),
            Family::UniformBinomial => uniform_binomial(&n()?, arg),
            Family::SymmetricBinomial => symmetric_binomial(&n()?, arg),
            Family::TanMultiple => tan_multiple(&n()?, arg),
            Family::ArcTan => arctan_cf(arg),
            Family::Tan => tan_cf(arg)?,
            Family::LogRatio => log_ratio_cf(arg)?,
            Family::CothScaled => coth_scaled_cf(arg),
        })
    }

    /// Level at which the fraction provably terminates, for integer `n`.
    pub fn predicted_termination(&self) -> Option<usize> {
        let n = self.exponent().ok()??;
        let m = n.abs_integer()? as usize;
        let negative = n.as_rational().is_negative();
        match self.family {
            Family::LagrangeBinomial if m == 0 => Some(1),
            Family::LagrangeBinomial if negative => Some(2 * m + 1),
            Family::LagrangeBinomial => Some(2 * m),
            Family::UniformBinomial if m == 0 => Some(1),
            Family::UniformBinomial => Some(m + 1),
            Family::SymmetricBinomial if m == 0 => None,
            Family::SymmetricBinomial => Some(m),
            Family::TanMultiple if m == 0 => Some(1),
            Family::TanMultiple => Some(m + 1),
            _ => None,
        }
    }
}

/// Evaluation algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Convergents,
    Lentz,
    Backward,
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "convergents" => Ok(Method::Convergents),
            "lentz" => Ok(Method::Lentz),
            "backward" => Ok(Method::Backward),
            other => Err(format!("unknown method {other:?}")),
        }
    }
}

/// A stream whose mode is chosen at run time.
#[derive(Debug, Clone)]
pub enum DynStream {
    Float(CfStream<f64>),
    Rational(CfStream<BigRational>),
    Complex(CfStream<Complex64>),
}

fn report_to_value<T: Scalar>(r: EvalReport<T>) -> EvalReport<ScalarValue> {
    EvalReport {
        value: r.value.to_value(),
        depth_used: r.depth_used,
        converged: r.converged,
        terminated: r.terminated,
        residual: r.residual,
        tiny_substitutions: r.tiny_substitutions,
    }
}

fn convergents_to_value<T: Scalar>(c: Convergents<T>) -> Convergents<ScalarValue> {
    Convergents {
        items: c
            .items
            .into_iter()
            .map(|c| crate::engine::Convergent {
                p: c.p.to_value(),
                q: c.q.to_value(),
                k: c.k,
            })
            .collect(),
        terminated_at: c.terminated_at,
    }
}

fn backward_report<T: Scalar>(cf: &CfStream<T>, depth: usize) -> Result<EvalReport<T>, EvalError> {
    let value = eval_backward(cf, depth)?;
    let terminated_at = cf.termination_level(depth + 1);
    let depth_used = terminated_at.map_or(depth, |m| m - 1);
    Ok(EvalReport {
        value,
        depth_used,
        converged: terminated_at.is_some(),
        terminated: terminated_at.is_some(),
        residual: 0.0,
        tiny_substitutions: 0,
    })
}

impl DynStream {
    pub fn mode(&self) -> Mode {
        match self {
            DynStream::Float(_) => Mode::Float64,
            DynStream::Rational(_) => Mode::BigRational,
            DynStream::Complex(_) => Mode::Complex64,
        }
    }

    /// Evaluates with `method`. `depth` is the level bound (`max_depth` for
    /// the iterative methods, the truncation depth for `Backward`).
    pub fn evaluate(
        &self,
        method: Method,
        tol: &ToleranceSpec,
        depth: usize,
    ) -> Result<EvalReport<ScalarValue>, EvalError> {
        match (self, method) {
            (DynStream::Float(cf), Method::Convergents) => {
                eval_convergents(cf, tol, depth).map(report_to_value)
            }
            (DynStream::Rational(cf), Method::Convergents) => {
                eval_convergents(cf, tol, depth).map(report_to_value)
            }
            (DynStream::Complex(cf), Method::Convergents) => {
                eval_convergents(cf, tol, depth).map(report_to_value)
            }
            (DynStream::Float(cf), Method::Lentz) => {
                eval_lentz(cf, tol, depth).map(report_to_value)
            }
            (DynStream::Complex(cf), Method::Lentz) => {
                eval_lentz(cf, tol, depth).map(report_to_value)
            }
            (DynStream::Rational(_), Method::Lentz) => {
                Err(EvalError::UnsupportedMode(Mode::BigRational))
            }
            (DynStream::Float(cf), Method::Backward) => {
                backward_report(cf, depth).map(report_to_value)
            }
            (DynStream::Rational(cf), Method::Backward) => {
                backward_report(cf, depth).map(report_to_value)
            }
            (DynStream::Complex(cf), Method::Backward) => {
                backward_report(cf, depth).map(report_to_value)
            }
        }
    }

    pub fn convergents(&self, depth: usize) -> Convergents<ScalarValue> {
        match self {
            DynStream::Float(cf) => convergents_to_value(convergents(cf, depth)),
            DynStream::Rational(cf) => convergents_to_value(convergents(cf, depth)),
            DynStream::Complex(cf) => convergents_to_value(convergents(cf, depth)),
        }
    }

    pub fn termination_level(&self, limit: usize) -> Option<usize> {
        match self {
            DynStream::Float(cf) => cf.termination_level(limit),
            DynStream::Rational(cf) => cf.termination_level(limit),
            DynStream::Complex(cf) => cf.termination_level(limit),
        }
    }
}

/// Exact zero test of a stream's numerator at `level`, for any mode.
pub fn numerator_is_zero(stream: &DynStream, level: usize) -> bool {
    match stream {
        DynStream::Float(cf) => cf.term(level).a.is_zero(),
        DynStream::Rational(cf) => cf.term(level).a.is_zero(),
        DynStream::Complex(cf) => cf.term(level).a.is_zero(),
    }
}
