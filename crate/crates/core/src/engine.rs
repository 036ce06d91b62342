//! Continued fractions `b0 + a1/(b1 + a2/(b2 + …))`: representation,
//! convergents, evaluation (forward recurrence, modified Lentz, backward
//! folding), tails and equivalence transformations.
//!
//! A zero partial numerator is the only termination signal. Level `m` with
//! `a_m = 0` cuts the fraction off, so its value is convergent `m − 1`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::kernel::{FloatScalar, KernelError, Scalar, ToleranceSpec};

/// Default level bound for every evaluator.
pub const DEFAULT_MAX_DEPTH: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("pole at truncation depth {depth}: q_{depth} = 0")]
    PoleAtTruncation { depth: usize },
    #[error("depth must be at least {min}, got {got}")]
    InvalidDepth { min: usize, got: usize },
    #[error("zero scale factor at level {level}")]
    ZeroScaleFactor { level: usize },
    #[error("leading scale factor c_0 must be 1")]
    LeadingScaleNotOne,
    #[error("evaluator does not support {0} mode")]
    UnsupportedMode(crate::kernel::Mode),
}

/// One level `(a_k, b_k)` of a continued fraction.
#[derive(Debug, Clone, PartialEq)]
pub struct CfTerm<T> {
    pub a: T,
    pub b: T,
}

impl<T> CfTerm<T> {
    pub fn new(a: T, b: T) -> Self {
        CfTerm { a, b }
    }
}

type TermFn<T> = dyn Fn(usize) -> CfTerm<T> + Send + Sync;

/// A lazily generated continued fraction.
///
/// Levels are produced by a pure function of the level index, so asking for
/// level `k` twice gives the same term. Finite fractions report a zero
/// numerator past their last level.
pub struct CfStream<T> {
    b0: T,
    terms: Arc<TermFn<T>>,
}

impl<T: Clone> Clone for CfStream<T> {
    fn clone(&self) -> Self {
        CfStream {
            b0: self.b0.clone(),
            terms: Arc::clone(&self.terms),
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for CfStream<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let preview: Vec<_> = (1..=4).map(|k| (self.terms)(k)).collect();
        f.debug_struct("CfStream")
            .field("b0", &self.b0)
            .field("terms", &preview)
            .finish_non_exhaustive()
    }
}

impl<T: Scalar> CfStream<T> {
    /// `terms(k)` must return level `k ≥ 1`.
    pub fn new(b0: T, terms: impl Fn(usize) -> CfTerm<T> + Send + Sync + 'static) -> Self {
        CfStream {
            b0,
            terms: Arc::new(terms),
        }
    }

    /// A fraction with the given levels `1..=terms.len()`.
    pub fn finite(b0: T, terms: Vec<CfTerm<T>>) -> Self {
        Self::new(b0, move |k| {
            terms
                .get(k - 1)
                .cloned()
                .unwrap_or_else(|| CfTerm::new(T::zero(), T::one()))
        })
    }

    pub fn b0(&self) -> &T {
        &self.b0
    }

    /// Level `k` (1-based).
    pub fn term(&self, k: usize) -> CfTerm<T> {
        assert!(k >= 1, "continued fraction levels start at 1");
        (self.terms)(k)
    }

    /// `b_k`, with `b_0` the leading term.
    pub fn denominator(&self, k: usize) -> T {
        if k == 0 {
            self.b0.clone()
        } else {
            self.term(k).b
        }
    }

    /// Levels `1, 2, …` without end.
    pub fn terms(&self) -> impl Iterator<Item = CfTerm<T>> + '_ {
        (1..).map(move |k| self.term(k))
    }

    /// First level `≤ limit` with a zero partial numerator.
    pub fn termination_level(&self, limit: usize) -> Option<usize> {
        (1..=limit).find(|&k| self.term(k).a.is_zero())
    }

    pub fn convergents(&self) -> ConvergentIter<T> {
        ConvergentIter::new(self.clone())
    }
}

/// Numerator/denominator pair of the fraction truncated after level `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Convergent<T> {
    pub p: T,
    pub q: T,
    pub k: usize,
}

impl<T: Scalar> Convergent<T> {
    /// `p/q`, or `None` at a pole of the truncation.
    pub fn value(&self) -> Option<T> {
        self.p.checked_div(&self.q).ok()
    }

    pub fn is_pole(&self) -> bool {
        self.q.is_zero()
    }
}

/// Forward three-term recurrence
/// `p_k = b_k p_{k−1} + a_k p_{k−2}`, `q_k = b_k q_{k−1} + a_k q_{k−2}`,
/// seeded with `p_{−1} = 1, q_{−1} = 0, p_0 = b0, q_0 = 1`.
///
/// Floating modes rescale all four state values by 2^-256 once any exceeds
/// 2^256; the ratio `p/q` is unaffected. The iterator ends at the first
/// zero partial numerator.
pub struct ConvergentIter<T> {
    cf: CfStream<T>,
    prev: (T, T),
    cur: (T, T),
    next_level: usize,
    terminated_at: Option<usize>,
}

impl<T: Scalar> ConvergentIter<T> {
    fn new(cf: CfStream<T>) -> Self {
        let b0 = cf.b0.clone();
        ConvergentIter {
            cf,
            prev: (T::one(), T::zero()),
            cur: (b0, T::one()),
            next_level: 0,
            terminated_at: None,
        }
    }

    /// Level of the zero numerator, once it has been reached.
    pub fn terminated_at(&self) -> Option<usize> {
        self.terminated_at
    }
}

impl<T: Scalar> Iterator for ConvergentIter<T> {
    type Item = Convergent<T>;

    fn next(&mut self) -> Option<Convergent<T>> {
        if self.terminated_at.is_some() {
            return None;
        }
        let k = self.next_level;
        if k > 0 {
            let CfTerm { a, b } = self.cf.term(k);
            if a.is_zero() {
                self.terminated_at = Some(k);
                return None;
            }
            let p = b.clone() * self.cur.0.clone() + a.clone() * self.prev.0.clone();
            let q = b * self.cur.1.clone() + a * self.prev.1.clone();
            self.prev = std::mem::replace(&mut self.cur, (p, q));
            if self.cur.0.needs_rescale() || self.cur.1.needs_rescale() {
                self.cur = (self.cur.0.rescaled(), self.cur.1.rescaled());
                self.prev = (self.prev.0.rescaled(), self.prev.1.rescaled());
            }
        }
        self.next_level += 1;
        Some(Convergent {
            p: self.cur.0.clone(),
            q: self.cur.1.clone(),
            k,
        })
    }
}

/// Convergents `0..=depth`, cut short at termination.
#[derive(Debug, Clone, PartialEq)]
pub struct Convergents<T> {
    pub items: Vec<Convergent<T>>,
    /// Level of the zero partial numerator, if one was met within `depth + 1` levels.
    pub terminated_at: Option<usize>,
}

impl<T> Convergents<T> {
    pub fn last(&self) -> &Convergent<T> {
        self.items.last().expect("convergent 0 always exists")
    }

    pub fn terminated(&self) -> bool {
        self.terminated_at.is_some()
    }
}

/// Convergents `0..=min(depth, termination level − 1)`.
///
/// The level right after `depth` is also inspected, so a fraction whose
/// numerator vanishes at `depth + 1` reports termination.
pub fn convergents<T: Scalar>(cf: &CfStream<T>, depth: usize) -> Convergents<T> {
    let mut iter = cf.convergents();
    let items: Vec<_> = iter.by_ref().take(depth + 1).collect();
    let mut terminated_at = iter.terminated_at();
    if terminated_at.is_none() && cf.term(depth + 1).a.is_zero() {
        terminated_at = Some(depth + 1);
    }
    Convergents {
        items,
        terminated_at,
    }
}

/// Outcome of an iterative evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport<T> {
    pub value: T,
    /// Level of the last convergent consumed.
    pub depth_used: usize,
    pub converged: bool,
    pub terminated: bool,
    /// Relative change of the last step (absolute when the value is zero);
    /// zero when terminated.
    pub residual: f64,
    /// Steps where Lentz replaced an exact zero by the tiny value.
    pub tiny_substitutions: usize,
}

fn relative_change<T: Scalar>(new: &T, old: &T) -> f64 {
    let diff = (new.clone() - old.clone()).magnitude();
    let scale = new.magnitude();
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

fn require_depth(max_depth: usize) -> Result<(), EvalError> {
    if max_depth < 1 {
        Err(EvalError::InvalidDepth {
            min: 1,
            got: max_depth,
        })
    } else {
        Ok(())
    }
}

/// Runs the forward recurrence until two successive convergent values are
/// `nearly_equal` under `tol`, the fraction terminates, or `max_depth`
/// levels are used.
pub fn eval_convergents<T: Scalar>(
    cf: &CfStream<T>,
    tol: &ToleranceSpec,
    max_depth: usize,
) -> Result<EvalReport<T>, EvalError> {
    require_depth(max_depth)?;
    let mut iter = cf.convergents();
    let first = iter.next().expect("convergent 0");
    let mut last_value = first.value();
    let mut last = first;
    let mut residual = f64::INFINITY;

    for conv in iter.by_ref().take(max_depth) {
        let value = conv.value();
        if let (Some(v), Some(prev)) = (&value, &last_value) {
            residual = relative_change(v, prev);
            if v.nearly_equal(prev, tol) {
                return Ok(EvalReport {
                    value: v.clone(),
                    depth_used: conv.k,
                    converged: true,
                    terminated: false,
                    residual,
                    tiny_substitutions: 0,
                });
            }
        } else {
            residual = f64::INFINITY;
        }
        last_value = value;
        last = conv;
    }

    let terminated = iter.terminated_at().is_some();
    let value = last_value.ok_or(EvalError::PoleAtTruncation { depth: last.k })?;
    Ok(EvalReport {
        value,
        depth_used: last.k,
        converged: terminated,
        terminated,
        residual: if terminated { 0.0 } else { residual },
        tiny_substitutions: 0,
    })
}

/// Modified Lentz evaluation with tiny-value substitution.
///
/// A fraction with `b0 = 0` is evaluated as `a1 / T`, where `T` is the tail
/// starting at level 1, so that the tiny seed never multiplies into the
/// result.
pub fn eval_lentz<T: FloatScalar>(
    cf: &CfStream<T>,
    tol: &ToleranceSpec,
    max_depth: usize,
) -> Result<EvalReport<T>, EvalError> {
    require_depth(max_depth)?;
    let b0 = *cf.b0();
    let first = cf.term(1);
    if first.a.is_zero() {
        return Ok(EvalReport {
            value: b0,
            depth_used: 0,
            converged: true,
            terminated: true,
            residual: 0.0,
            tiny_substitutions: 0,
        });
    }

    let leading_zero = b0.is_zero();
    let (seed, first_level) = if leading_zero { (first.b, 2) } else { (b0, 1) };
    let finish = |f: T| if leading_zero { first.a / f } else { f };

    let mut substitutions = 0;
    let mut tiny_if_zero = |x: T| {
        if x.is_zero() {
            substitutions += 1;
            T::tiny()
        } else {
            x
        }
    };

    let mut f = tiny_if_zero(seed);
    let mut c = f;
    let mut d = T::zero();
    let mut prev = finish(f);
    let mut depth_used = first_level - 1;
    let mut residual = f64::INFINITY;
    let mut outcome = None;

    for k in first_level..=max_depth {
        let CfTerm { a, b } = cf.term(k);
        if a.is_zero() {
            outcome = Some((true, true));
            residual = 0.0;
            break;
        }
        d = tiny_if_zero(b + a * d);
        c = tiny_if_zero(b + a / c);
        d = T::one() / d;
        f = f * c * d;
        let value = finish(f);
        depth_used = k;
        residual = relative_change(&value, &prev);
        let done = value.nearly_equal(&prev, tol);
        prev = value;
        if done {
            outcome = Some((true, false));
            break;
        }
    }

    let (converged, terminated) = outcome.unwrap_or((false, false));
    if !prev.is_finite_value() {
        return Err(EvalError::PoleAtTruncation { depth: depth_used });
    }
    Ok(EvalReport {
        value: prev,
        depth_used,
        converged,
        terminated,
        residual,
        tiny_substitutions: substitutions,
    })
}

/// Value of the fraction truncated at `depth`, folded from the bottom level
/// up with the tail beyond `depth` taken as zero.
pub fn eval_backward<T: Scalar>(cf: &CfStream<T>, depth: usize) -> Result<T, EvalError> {
    require_depth(depth)?;
    let mut terms = Vec::with_capacity(depth);
    for k in 1..=depth {
        let term = cf.term(k);
        if term.a.is_zero() {
            break;
        }
        terms.push(term);
    }
    let mut acc = match terms.last() {
        Some(t) => t.b.clone(),
        None => return Ok(cf.b0.clone()),
    };
    for k in (1..=terms.len()).rev() {
        let below = if k == 1 {
            cf.b0.clone()
        } else {
            terms[k - 2].b.clone()
        };
        acc = below + terms[k - 1].a.checked_div(&acc)?;
    }
    Ok(acc)
}

/// The sub-fraction `b_s + a_{s+1}/(b_{s+1} + …)` starting at level `s`.
pub fn tail<T: Scalar>(cf: &CfStream<T>, start_level: usize) -> Result<CfStream<T>, EvalError> {
    if start_level < 1 {
        return Err(EvalError::InvalidDepth {
            min: 1,
            got: start_level,
        });
    }
    let inner = cf.clone();
    Ok(CfStream::new(cf.term(start_level).b, move |k| {
        inner.term(start_level + k)
    }))
}

/// Scale factors `c_0, c_1, …` for [`equivalence_transform`].
#[derive(Debug, Clone, PartialEq)]
pub enum ScaleFactors<T> {
    /// `c_0 = 1` and `c_k = c` for every `k ≥ 1`.
    Uniform(T),
    /// Explicit `c_0, c_1, …, c_m` with `c_0 = 1`; levels past `m` use 1.
    Sequence(Vec<T>),
}

impl<T: Scalar> ScaleFactors<T> {
    fn get(&self, k: usize) -> T {
        match self {
            ScaleFactors::Uniform(_) if k == 0 => T::one(),
            ScaleFactors::Uniform(c) => c.clone(),
            ScaleFactors::Sequence(cs) => cs.get(k).cloned().unwrap_or_else(T::one),
        }
    }

    fn validate(&self) -> Result<(), EvalError> {
        match self {
            ScaleFactors::Uniform(c) if c.is_zero() => Err(EvalError::ZeroScaleFactor { level: 1 }),
            ScaleFactors::Uniform(_) => Ok(()),
            ScaleFactors::Sequence(cs) => {
                if let Some(level) = cs.iter().position(|c| c.is_zero()) {
                    return Err(EvalError::ZeroScaleFactor { level });
                }
                match cs.first() {
                    Some(c0) if !c0.is_one() => Err(EvalError::LeadingScaleNotOne),
                    _ => Ok(()),
                }
            }
        }
    }
}

/// `a'_k = c_k c_{k−1} a_k`, `b'_k = c_k b_k`. Every convergent value is
/// unchanged.
pub fn equivalence_transform<T: Scalar>(
    cf: &CfStream<T>,
    scales: ScaleFactors<T>,
) -> Result<CfStream<T>, EvalError> {
    scales.validate()?;
    let inner = cf.clone();
    Ok(CfStream::new(cf.b0.clone(), move |k| {
        let CfTerm { a, b } = inner.term(k);
        let ck = scales.get(k);
        CfTerm::new(ck.clone() * scales.get(k - 1) * a, ck * b)
    }))
}

/// Multiplies the value of the whole fraction by `factor` (scales `b0` and
/// `a1`).
pub fn scale_value<T: Scalar>(cf: &CfStream<T>, factor: T) -> CfStream<T> {
    let inner = cf.clone();
    let lead = factor.clone();
    CfStream::new(factor * cf.b0.clone(), move |k| {
        let term = inner.term(k);
        if k == 1 {
            CfTerm::new(lead.clone() * term.a, term.b)
        } else {
            term
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::ratio;
    use num_rational::BigRational;
    use num_traits::Zero;

    fn q(n: i64, d: i64) -> BigRational {
        ratio(n, d)
    }

    fn all_zero(b0: f64) -> CfStream<f64> {
        CfStream::new(b0, |_| CfTerm::new(0.0, 1.0))
    }

    /// 1 + 1/(1 + 1/(1 + …)) → golden ratio.
    fn golden() -> CfStream<f64> {
        CfStream::new(1.0, |_| CfTerm::new(1.0, 1.0))
    }

    #[test]
    fn all_zero_numerators_give_single_convergent() {
        let c = convergents(&all_zero(7.0), 10);
        assert_eq!(
            c.items,
            vec![Convergent {
                p: 7.0,
                q: 1.0,
                k: 0
            }]
        );
        assert_eq!(c.terminated_at, Some(1));

        let r = eval_lentz(&all_zero(7.0), &ToleranceSpec::DEFAULT, 10).unwrap();
        assert_eq!(r.value, 7.0);
        assert!(r.terminated && r.converged);
        let r = eval_convergents(&all_zero(7.0), &ToleranceSpec::DEFAULT, 10).unwrap();
        assert_eq!((r.value, r.depth_used, r.terminated), (7.0, 0, true));
    }

    #[test]
    fn termination_just_past_depth_is_reported() {
        let cf = CfStream::finite(1.0, vec![CfTerm::new(1.0, 2.0)]);
        let c = convergents(&cf, 1);
        assert_eq!(c.items.len(), 2);
        assert_eq!(c.terminated_at, Some(2));
        assert_eq!(c.last().value(), Some(1.5));
    }

    #[test]
    fn golden_ratio_three_ways() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let tol = ToleranceSpec::relative(1e-14).unwrap();
        let a = eval_convergents(&golden(), &tol, 200).unwrap();
        let b = eval_lentz(&golden(), &tol, 200).unwrap();
        assert!(a.converged && b.converged);
        assert!((a.value - phi).abs() < 1e-14);
        assert!((b.value - phi).abs() < 1e-14);
        assert!((eval_backward(&golden(), 60).unwrap() - phi).abs() < 1e-15);
    }

    #[test]
    fn non_convergence_is_reported() {
        let tol = ToleranceSpec::relative(1e-30).unwrap();
        let r = eval_convergents(&golden(), &tol, 5).unwrap();
        assert!(!r.converged);
        assert_eq!(r.depth_used, 5);
        let r = eval_lentz(&golden(), &tol, 5).unwrap();
        assert!(!r.converged);
        assert_eq!(r.depth_used, 5);
        assert!(r.residual > 0.0);
    }

    #[test]
    fn zero_max_depth_is_rejected() {
        assert!(matches!(
            eval_convergents(&golden(), &ToleranceSpec::DEFAULT, 0),
            Err(EvalError::InvalidDepth { .. })
        ));
        assert!(eval_lentz(&golden(), &ToleranceSpec::DEFAULT, 0).is_err());
        assert!(eval_backward(&golden(), 0).is_err());
        assert!(tail(&golden(), 0).is_err());
    }

    #[test]
    fn backward_depth_one() {
        let cf = CfStream::finite(q(2, 1), vec![CfTerm::new(q(3, 1), q(5, 1))]);
        assert_eq!(eval_backward(&cf, 1).unwrap(), q(13, 5));
        assert_eq!(eval_backward(&cf, 4).unwrap(), q(13, 5));
    }

    #[test]
    fn backward_reports_division_by_zero() {
        // 1 + 1/(0 + 1/0): the bottom level is an exact zero.
        let cf = CfStream::finite(
            q(1, 1),
            vec![CfTerm::new(q(1, 1), q(0, 1)), CfTerm::new(q(1, 1), q(0, 1))],
        );
        assert!(matches!(
            eval_backward(&cf, 2),
            Err(EvalError::Kernel(KernelError::DivisionByZero))
        ));
    }

    #[test]
    fn pole_at_final_level_is_an_error_but_intermediate_poles_are_kept() {
        // 0 + 1/(0 + 1/(1)) : q_1 = 0, q_2 = 1.
        let cf = CfStream::finite(
            q(0, 1),
            vec![CfTerm::new(q(1, 1), q(0, 1)), CfTerm::new(q(1, 1), q(1, 1))],
        );
        let c = convergents(&cf, 2);
        assert!(c.items[1].is_pole());
        assert_eq!(c.items[2].value(), Some(q(1, 1)));
        let r = eval_convergents(&cf, &ToleranceSpec::EXACT, 5).unwrap();
        assert_eq!(r.value, q(1, 1));
        assert!(r.terminated);

        assert_eq!(
            eval_convergents(&cf, &ToleranceSpec::EXACT, 1).unwrap_err(),
            EvalError::PoleAtTruncation { depth: 1 }
        );
    }

    #[test]
    fn lentz_substitutes_tiny_for_zero_denominators() {
        // 1 + 1/(0 + 1/(2)) = 1 + 2 = 3, and b1 = 0 forces a substitution.
        let cf = CfStream::finite(1.0, vec![CfTerm::new(1.0, 0.0), CfTerm::new(1.0, 2.0)]);
        let r = eval_lentz(&cf, &ToleranceSpec::DEFAULT, 10).unwrap();
        assert!(r.terminated);
        assert!(r.tiny_substitutions > 0);
        assert!((r.value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rescaling_keeps_float_recurrence_finite() {
        // Huge numerators overflow unscaled p, q long before 400 levels.
        let cf = CfStream::new(1.0, |k| CfTerm::new(1e6 * k as f64, 1.0));
        let c = convergents(&cf, 400);
        assert!(c.items.iter().all(|c| c.p.is_finite() && c.q.is_finite()));
        let last = c.last().value().unwrap();
        let reference = eval_backward(&cf, 400).unwrap();
        assert!((last - reference).abs() <= 1e-12 * reference.abs());
    }

    #[test]
    fn tail_shifts_levels() {
        let cf = CfStream::new(q(0, 1), |k| {
            CfTerm::new(q(k as i64, 1), q(10 + k as i64, 1))
        });
        let t = tail(&cf, 3).unwrap();
        assert_eq!(t.b0(), &q(13, 1));
        assert_eq!(t.term(1), CfTerm::new(q(4, 1), q(14, 1)));
        assert_eq!(tail(&cf, 1).unwrap().b0(), &cf.term(1).b);
    }

    #[test]
    fn identity_scales_leave_stream_unchanged() {
        let cf = CfStream::new(q(1, 1), |k| {
            CfTerm::new(q(k as i64, 2), q(2 * k as i64 + 1, 1))
        });
        let same = equivalence_transform(&cf, ScaleFactors::Uniform(q(1, 1))).unwrap();
        assert_eq!(same.b0(), cf.b0());
        for k in 1..10 {
            assert_eq!(same.term(k), cf.term(k));
        }
    }

    #[test]
    fn scale_sequences_are_validated() {
        let cf = golden();
        assert_eq!(
            equivalence_transform(&cf, ScaleFactors::Uniform(0.0)).unwrap_err(),
            EvalError::ZeroScaleFactor { level: 1 }
        );
        assert_eq!(
            equivalence_transform(&cf, ScaleFactors::Sequence(vec![1.0, 2.0, 0.0])).unwrap_err(),
            EvalError::ZeroScaleFactor { level: 2 }
        );
        assert_eq!(
            equivalence_transform(&cf, ScaleFactors::Sequence(vec![2.0])).unwrap_err(),
            EvalError::LeadingScaleNotOne
        );
    }

    #[test]
    fn per_level_scales_preserve_convergents() {
        let cf = CfStream::new(q(1, 1), |k| CfTerm::new(q(1, k as i64), q(k as i64, 1)));
        let cs = vec![q(1, 1), q(2, 1), q(-1, 3), q(5, 7)];
        let t = equivalence_transform(&cf, ScaleFactors::Sequence(cs)).unwrap();
        let a = convergents(&cf, 8);
        let b = convergents(&t, 8);
        for (x, y) in a.items.iter().zip(&b.items) {
            assert_eq!(x.value(), y.value());
        }
    }

    #[test]
    fn scale_value_multiplies_the_value() {
        let cf = CfStream::new(q(1, 1), |k| CfTerm::new(q(1, 1), q(k as i64, 1)));
        let scaled = scale_value(&cf, q(3, 2));
        for d in 1..6 {
            assert_eq!(
                eval_backward(&scaled, d).unwrap(),
                eval_backward(&cf, d).unwrap() * q(3, 2)
            );
        }
    }

    #[test]
    fn convergents_of_empty_stream() {
        let cf = CfStream::finite(q(5, 1), vec![]);
        let c = convergents(&cf, 0);
        assert_eq!(c.items.len(), 1);
        assert!(c.terminated());
        assert!(c.items[0].q == BigRational::from_integer(1.into()));
        assert!(!c.items[0].p.is_zero());
    }
}
