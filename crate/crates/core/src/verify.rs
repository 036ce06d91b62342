//! Identity suite behind `cfkit verify`.
//!
//! Each group checks one family of identities at fixed sample points and
//! reports the measured error next to the tolerance it was held to. Groups
//! are independent and run on separate threads; results come back in group
//! order.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::engine::{
    convergents, equivalence_transform, eval_backward, eval_convergents, eval_lentz, scale_value,
    tail, CfStream, CfTerm, ScaleFactors, DEFAULT_MAX_DEPTH,
};
use crate::families::{
    arctan_cf, coth_scaled_cf, lagrange_binomial, log_ratio_cf, symmetric_binomial, tan_cf,
    tan_multiple, uniform_binomial, Exponent, Family, FamilySpec,
};
use crate::kernel::{ratio, Mode, Scalar, ScalarValue, ToleranceSpec};
use crate::oracle::{
    binomial_power, coth_scaled_lhs, log_ratio_lhs, series_ratio_coth, symmetric_lhs,
    tan_multiple_lhs, Limit,
};

/// Group names accepted by `--only`.
pub const GROUPS: [&str; 13] = [
    "termination",
    "n-negation",
    "tail",
    "cross-family",
    "substitution",
    "equivalence",
    "imaginary",
    "tangent-multiple",
    "limits",
    "series-ratio",
    "determinant",
    "backward",
    "lentz-agreement",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub group: &'static str,
    pub name: String,
    pub mode: String,
    pub passed: bool,
    /// Measured error (relative unless the name says otherwise).
    pub error: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Run only this group.
    pub only: Option<String>,
    /// Run only checks in this mode.
    pub mode: Option<Mode>,
    /// Tolerance handed to iterative evaluators.
    pub tol: ToleranceSpec,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            only: None,
            mode: None,
            tol: ToleranceSpec::DEFAULT,
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("unknown verify group {0:?}; known groups: {known}", known = GROUPS.join(", "))]
pub struct UnknownGroup(pub String);

/// Runs the selected groups.
pub fn run_suite(opts: &VerifyOptions) -> Result<Vec<CheckResult>, UnknownGroup> {
    if let Some(only) = &opts.only {
        if !GROUPS.contains(&only.as_str()) {
            return Err(UnknownGroup(only.clone()));
        }
    }
    let selected: Vec<&'static str> = GROUPS
        .iter()
        .copied()
        .filter(|g| opts.only.as_deref().is_none_or(|o| o == *g))
        .collect();

    let per_group: Vec<Vec<CheckResult>> = std::thread::scope(|s| {
        let handles: Vec<_> = selected
            .iter()
            .map(|&g| s.spawn(move || run_group(g, opts)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("verify group panicked"))
            .collect()
    });

    Ok(per_group
        .into_iter()
        .flatten()
        .filter(|c| opts.mode.is_none_or(|m| c.mode == m.to_string()))
        .collect())
}

fn run_group(group: &'static str, opts: &VerifyOptions) -> Vec<CheckResult> {
    let mut out = Checks {
        group,
        items: vec![],
    };
    match group {
        "termination" => termination(&mut out),
        "n-negation" => n_negation(&mut out),
        "tail" => tail_identity(&mut out, opts),
        "cross-family" => cross_family(&mut out, opts),
        "substitution" => substitution(&mut out, opts),
        "equivalence" => equivalence(&mut out),
        "imaginary" => imaginary(&mut out, opts),
        "tangent-multiple" => tangent_multiple(&mut out, opts),
        "limits" => limits(&mut out),
        "series-ratio" => series(&mut out, opts),
        "determinant" => determinant(&mut out),
        "backward" => backward(&mut out),
        "lentz-agreement" => lentz_agreement(&mut out, opts),
        _ => unreachable!("group list is closed"),
    }
    out.items
}

struct Checks {
    group: &'static str,
    items: Vec<CheckResult>,
}

impl Checks {
    fn push(&mut self, name: impl Into<String>, mode: Mode, error: f64, tolerance: f64) {
        self.items.push(CheckResult {
            group: self.group,
            name: name.into(),
            mode: mode.to_string(),
            passed: error <= tolerance,
            error,
            tolerance,
        });
    }

    /// Exact comparison of rationals; the reported error is relative.
    fn exact(&mut self, name: impl Into<String>, got: &BigRational, want: &BigRational) {
        let err = crate::oracle::compare_values(
            &ScalarValue::Rational(got.clone()),
            &ScalarValue::Rational(want.clone()),
        )
        .rel;
        let name = name.into();
        self.items.push(CheckResult {
            group: self.group,
            name,
            mode: Mode::BigRational.to_string(),
            passed: got == want,
            error: err,
            tolerance: 0.0,
        });
    }

    /// A yes/no property; error is 0 when it holds and 1 otherwise.
    fn holds(&mut self, name: impl Into<String>, mode: Mode, ok: bool) {
        self.push(name, mode, if ok { 0.0 } else { 1.0 }, 0.0);
    }

    fn rel(&mut self, name: impl Into<String>, mode: Mode, got: f64, want: f64, tol: f64) {
        let err = rel_err(got, want);
        self.push(name, mode, err, tol);
    }
}

fn rel_err(got: f64, want: f64) -> f64 {
    if got == want {
        0.0
    } else if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}

fn q(n: i64, d: i64) -> BigRational {
    ratio(n, d)
}

/// Exact terminated value of a rational stream.
fn exact_value(cf: &CfStream<BigRational>) -> Option<(BigRational, usize)> {
    let c = convergents(cf, 200);
    let level = c.terminated_at?;
    Some((c.last().value()?, level))
}

/// Converged Lentz value at the suite tolerance.
fn lentz_value(cf: &CfStream<f64>, tol: &ToleranceSpec) -> f64 {
    match eval_lentz(cf, tol, DEFAULT_MAX_DEPTH) {
        Ok(r) if r.converged => r.value,
        _ => f64::NAN,
    }
}

fn float_oracle(r: Result<crate::oracle::OracleResult, crate::oracle::OracleError>) -> f64 {
    r.ok()
        .and_then(|r| r.value.to_real_f64().ok())
        .unwrap_or(f64::NAN)
}

fn termination(out: &mut Checks) {
    let one = BigRational::one();
    for n in [1, -1] {
        for z in [q(1, 3), q(2, 5), q(1, 2), q(-3, 7)] {
            let cf = symmetric_binomial(&Exponent::integer(n), z.clone());
            let name = format!("symmetric n={n} z={z} = 1");
            match exact_value(&cf) {
                Some((v, level)) => {
                    out.exact(name, &v, &one);
                    out.holds(
                        format!("symmetric n={n} z={z} terminates at level 1"),
                        Mode::BigRational,
                        level == 1,
                    );
                }
                None => out.holds(name, Mode::BigRational, false),
            }
        }
    }
    for n in [2, -2] {
        for z in [q(1, 3), q(2, 5)] {
            let want = &one + &z * &z;
            let got = exact_value(&symmetric_binomial(&Exponent::integer(n), z.clone()));
            out.exact(
                format!("symmetric n={n} z={z} = 1+z^2"),
                &got.map(|g| g.0).unwrap_or_default(),
                &want,
            );
        }
    }
    for n in [3, -3] {
        for z in [q(1, 2), q(1, 4)] {
            let z2 = &z * &z;
            let want = q(3, 1) * (&one + q(3, 1) * &z2) / (q(3, 1) + &z2);
            let got = exact_value(&symmetric_binomial(&Exponent::integer(n), z.clone()));
            out.exact(
                format!("symmetric n={n} z={z} = 3(1+3z^2)/(3+z^2)"),
                &got.map(|g| g.0).unwrap_or_default(),
                &want,
            );
        }
    }
    for n in [-3i64, -2, -1, 1, 2, 3] {
        for x in [q(1, 2), q(1, 3), q(-1, 4)] {
            let cf = lagrange_binomial(&Exponent::integer(n), x.clone());
            let want = binomial_power(&Exponent::integer(n), &ScalarValue::Rational(x.clone()))
                .ok()
                .and_then(|r| BigRational::from_value(&r.value).ok());
            match (exact_value(&cf), want) {
                (Some((v, level)), Some(want)) => {
                    out.exact(format!("lagrange n={n} x={x} = (1+x)^n"), &v, &want);
                    let predicted = if n > 0 { 2 * n } else { 2 * n.abs() + 1 } as usize;
                    out.holds(
                        format!("lagrange n={n} x={x} terminates at level {predicted}"),
                        Mode::BigRational,
                        level == predicted,
                    );
                }
                _ => out.holds(
                    format!("lagrange n={n} x={x} = (1+x)^n"),
                    Mode::BigRational,
                    false,
                ),
            }
        }
    }
    for n in 1i64..=6 {
        let level = symmetric_binomial(&Exponent::integer(n), 0.45).termination_level(100);
        out.holds(
            format!("symmetric n={n} terminates at level {n}"),
            Mode::Float64,
            level == Some(n as usize),
        );
    }
    for n in (-4i64..=4).filter(|n| *n != 0) {
        let predicted = if n > 0 { 2 * n } else { 2 * n.abs() + 1 } as usize;
        let level = lagrange_binomial(&Exponent::integer(n), 0.3).termination_level(100);
        out.holds(
            format!("lagrange n={n} terminates at level {predicted}"),
            Mode::Float64,
            level == Some(predicted),
        );
    }
}

fn n_negation(out: &mut Checks) {
    for n in [q(1, 2), q(5, 2), q(3, 1), q(7, 3)] {
        let plus = symmetric_binomial(&Exponent::new(n.clone()), q(2, 7));
        let minus = symmetric_binomial(&Exponent::new(-n.clone()), q(2, 7));
        let same = plus.b0() == minus.b0() && (1..=30).all(|k| plus.term(k) == minus.term(k));
        out.holds(
            format!("symmetric terms n=±{n} identical (levels 1..30)"),
            Mode::BigRational,
            same,
        );
        let a = eval_backward(&plus, 30).ok();
        let b = eval_backward(&minus, 30).ok();
        out.holds(
            format!("symmetric value n=±{n} equal at depth 30"),
            Mode::BigRational,
            a.is_some() && a == b,
        );

        let fp = symmetric_binomial(&Exponent::new(n.clone()), 0.3);
        let fm = symmetric_binomial(&Exponent::new(-n.clone()), 0.3);
        out.holds(
            format!("symmetric terms n=±{n} identical (levels 1..30)"),
            Mode::Float64,
            (1..=30).all(|k| fp.term(k) == fm.term(k)),
        );
    }
    for n in [2i64, 3, 5] {
        for z in [q(1, 2), q(1, 3), q(-2, 5)] {
            let zv = ScalarValue::Rational(z.clone());
            let a = symmetric_lhs(&Exponent::integer(n), &zv, Limit::Reject);
            let b = symmetric_lhs(&Exponent::integer(-n), &zv, Limit::Reject);
            match (a, b) {
                (Ok(a), Ok(b)) => out.exact(
                    format!("closed form n=±{n} z={z} equal"),
                    &BigRational::from_value(&a.value).unwrap_or_default(),
                    &BigRational::from_value(&b.value).unwrap_or_default(),
                ),
                _ => out.holds(
                    format!("closed form n=±{n} z={z} equal"),
                    Mode::BigRational,
                    false,
                ),
            }
        }
    }
}

/// `A = 1 + (1−n)x/2 + ((n²−1)x²/4)/(B + (1+n)x/2)` and its analogues for
/// consecutive odd tails of Lagrange's fraction.
fn rebracketed<T: Scalar>(n: &T, x: &T, j: i64, lead: T, next_tail: T) -> T {
    let jj = T::from_i64(j);
    let two = T::from_i64(2);
    let four = T::from_i64(4);
    lead + (jj.clone() - n.clone()) * x.clone() / two.clone()
        + ((n.clone() * n.clone() - jj.clone() * jj.clone()) * x.clone() * x.clone() / four)
            / (next_tail + (jj + n.clone()) * x.clone() / two)
}

fn tail_identity(out: &mut Checks, opts: &VerifyOptions) {
    let n = Exponent::ratio(1, 2);
    let (nf, x) = (0.5, 0.25);
    let cf = lagrange_binomial(&n, x);
    let tails: Vec<f64> = [1, 3, 5, 7]
        .iter()
        .map(|&s| lentz_value(&tail(&cf, s).expect("level ≥ 1"), &opts.tol))
        .collect();
    let power = float_oracle(binomial_power(&n, &ScalarValue::Float64(x)));
    out.rel(
        "1 + nx/A = (1+x)^n, n=1/2 x=1/4",
        Mode::Float64,
        1.0 + nf * x / tails[0],
        power,
        1e-11,
    );
    for (j, name) in [(1, "A"), (2, "B"), (3, "C")] {
        let lead = (2 * j - 1) as f64;
        let want = rebracketed(&nf, &x, j, lead, tails[j as usize]);
        out.rel(
            format!("{name} rebracketed through the next odd tail, n=1/2 x=1/4"),
            Mode::Float64,
            tails[j as usize - 1],
            want,
            1e-11,
        );
    }
    // Truncated tails satisfy the same algebra exactly.
    let nr = q(1, 2);
    let xr = q(1, 4);
    let cf = lagrange_binomial(&Exponent::new(nr.clone()), xr.clone());
    for depth in [4, 9, 16] {
        for j in 1i64..=3 {
            let start = (2 * j - 1) as usize;
            let here = eval_backward(&tail(&cf, start).unwrap(), depth + 2);
            let next = eval_backward(&tail(&cf, start + 2).unwrap(), depth);
            match (here, next) {
                (Ok(here), Ok(next)) => {
                    let want = rebracketed(&nr, &xr, j, q(2 * j - 1, 1), next);
                    out.exact(
                        format!("tail at level {start} rebracketed exactly, depth {depth}"),
                        &here,
                        &want,
                    );
                }
                _ => out.holds(
                    format!("tail at level {start} rebracketed exactly, depth {depth}"),
                    Mode::BigRational,
                    false,
                ),
            }
        }
    }
    // The leading term of each odd tail is the interrupted denominator 2j−1.
    for (start, lead) in [(1usize, 1i64), (3, 3), (5, 5), (7, 7)] {
        let t = tail(&cf, start).unwrap();
        out.exact(
            format!("tail at level {start} leads with {lead}"),
            t.b0(),
            &q(lead, 1),
        );
    }
}

fn cross_family(out: &mut Checks, opts: &VerifyOptions) {
    for (nn, nd, x) in [(1i64, 2i64, 0.25), (1, 3, 0.3), (-5, 2, 0.4), (7, 4, -0.3)] {
        let n = Exponent::ratio(nn, nd);
        let label = format!("n={nn}/{nd} x={x}");
        let power = float_oracle(binomial_power(&n, &ScalarValue::Float64(x)));
        let lag = lentz_value(&lagrange_binomial(&n, x), &opts.tol);
        let uni = lentz_value(&uniform_binomial(&n, x), &opts.tol);
        out.rel(
            format!("lagrange = (1+x)^n, {label}"),
            Mode::Float64,
            lag,
            power,
            1e-11,
        );
        out.rel(
            format!("uniform = (1+x)^n, {label}"),
            Mode::Float64,
            uni,
            power,
            1e-11,
        );
        out.rel(
            format!("lagrange = uniform, {label}"),
            Mode::Float64,
            lag,
            uni,
            1e-11,
        );
        let z = x / (2.0 + x);
        let sym = lentz_value(&symmetric_binomial(&n, z), &opts.tol);
        let lhs = float_oracle(symmetric_lhs(&n, &ScalarValue::Float64(z), Limit::Reject));
        out.rel(
            format!("symmetric at z=x/(2+x) = closed form, {label}"),
            Mode::Float64,
            sym,
            lhs,
            1e-11,
        );
        // P = ((1+z)/(1−z))^n = (1+x)^n, and S = nz(P+1)/(P−1) inverts to P = (S+nz)/(S−nz).
        let nf = n.to_f64();
        let rebuilt = (sym + nf * z) / (sym - nf * z);
        out.rel(
            format!("symmetric value recovers (1+x)^n, {label}"),
            Mode::Float64,
            rebuilt,
            power,
            1e-11,
        );
    }
    for (n, z) in [
        (Exponent::ratio(5, 2), 0.3),
        (Exponent::ratio(1, 3), -0.2),
        (Exponent::ratio(7, 4), 0.5),
    ] {
        let sym = lentz_value(&symmetric_binomial(&n, z), &opts.tol);
        let lhs = float_oracle(symmetric_lhs(&n, &ScalarValue::Float64(z), Limit::Reject));
        out.rel(
            format!("symmetric = closed form, n={} z={z}", n.as_rational()),
            Mode::Float64,
            sym,
            lhs,
            1e-12,
        );
    }
}

/// The fraction `(1+y) + Σ (n²−k²)y² / ((2k+1)(1+y))`, obtained from the
/// uniform fraction with `x = 2y` after moving `(1+2y)^n − 1` to the left.
pub fn substituted_stream<T: Scalar>(n: &Exponent, y: T) -> CfStream<T> {
    let n_sq = n.squared();
    let y_sq = y.clone() * y.clone();
    let shift = T::one() + y;
    CfStream::new(shift.clone(), move |k| {
        let kk = BigRational::from_integer(k.into());
        CfTerm::new(
            T::from_rational(&(&n_sq - &kk * &kk)) * y_sq.clone(),
            T::from_i64(2 * k as i64 + 1) * shift.clone(),
        )
    })
}

/// The substituted stream divided through by `1+y`: the equivalence
/// transform with `c_k = 1/(1+y)` followed by scaling the whole value.
pub fn divided_stream<T: Scalar>(n: &Exponent, y: T) -> CfStream<T> {
    let inv = T::one() / (T::one() + y.clone());
    let transformed = equivalence_transform(
        &substituted_stream(n, y),
        ScaleFactors::Uniform(inv.clone()),
    )
    .expect("1/(1+y) is nonzero");
    scale_value(&transformed, inv)
}

fn substitution(out: &mut Checks, opts: &VerifyOptions) {
    for (nn, nd, y) in [
        (1i64, 2i64, 0.125f64),
        (5, 2, 0.2),
        (-1, 3, 0.3),
        (7, 4, 0.05),
    ] {
        let n = Exponent::ratio(nn, nd);
        let nf = n.to_f64();
        let label = format!("n={nn}/{nd} y={y}");
        let p = (1.0 + 2.0 * y).powf(nf);
        let uniform_2y = lentz_value(&uniform_binomial(&n, 2.0 * y), &opts.tol);
        out.rel(
            format!("uniform at x=2y = (1+2y)^n, {label}"),
            Mode::Float64,
            uniform_2y,
            p,
            1e-11,
        );
        let lhs = nf * y * (1.0 + p) / (p - 1.0);
        let s4 = lentz_value(&substituted_stream(&n, y), &opts.tol);
        out.rel(
            format!("ny(1+P)/(P-1) = substituted fraction, {label}"),
            Mode::Float64,
            s4,
            lhs,
            1e-11,
        );
        let s5 = lentz_value(&divided_stream(&n, y), &opts.tol);
        out.rel(
            format!("ny(1+P)/(P-1) = (1+y)·divided fraction, {label}"),
            Mode::Float64,
            (1.0 + y) * s5,
            lhs,
            1e-11,
        );
    }
}

fn equivalence(out: &mut Checks) {
    for (n, y) in [(q(1, 2), q(1, 5)), (q(5, 2), q(2, 7)), (q(3, 1), q(1, 3))] {
        let e = Exponent::new(n.clone());
        let s4 = substituted_stream(&e, y.clone());
        let c = BigRational::one() / (BigRational::one() + &y);
        let t = equivalence_transform(&s4, ScaleFactors::Uniform(c.clone())).unwrap();
        let a = convergents(&s4, 20);
        let b = convergents(&t, 20);
        let same = a.items.len() == b.items.len()
            && a.items
                .iter()
                .zip(&b.items)
                .all(|(u, v)| u.value() == v.value());
        out.holds(
            format!("c_k=1/(1+y) preserves convergents 0..20, n={n} y={y}"),
            Mode::BigRational,
            same,
        );

        // Divided form: numerators (n²−k²)y²/(1+y)², denominators 2k+1.
        let s5 = divided_stream(&e, y.clone());
        let nsq = &n * &n;
        let levelwise = s5.b0().is_one()
            && (1..=20).all(|k| {
                let kk = q(k as i64, 1);
                s5.term(k)
                    == CfTerm::new(
                        (&nsq - &kk * &kk) * &y * &y * &c * &c,
                        q(2 * k as i64 + 1, 1),
                    )
            });
        out.holds(
            format!("divided fraction has the odd-denominator form, n={n} y={y}"),
            Mode::BigRational,
            levelwise,
        );

        // And it is the symmetric fraction at z = y/(1+y).
        let sym = symmetric_binomial(&e, &y * &c);
        let same_as_sym = s5.b0() == sym.b0() && (1..=20).all(|k| s5.term(k) == sym.term(k));
        out.holds(
            format!("divided fraction = symmetric at z=y/(1+y), n={n} y={y}"),
            Mode::BigRational,
            same_as_sym,
        );
    }
    let sym = symmetric_binomial(&Exponent::ratio(1, 2), q(1, 5));
    let cs = vec![q(1, 1), q(3, 1), q(-2, 7), q(5, 1)];
    let t = equivalence_transform(&sym, ScaleFactors::Sequence(cs)).unwrap();
    let (a, b) = (convergents(&sym, 3), convergents(&t, 3));
    out.exact(
        "convergent 3 preserved under c=(1,3,-2/7,5), symmetric n=1/2 z=1/5",
        &b.last().value().unwrap_or_default(),
        &a.last().value().unwrap_or_default(),
    );
}

fn imaginary(out: &mut Checks, opts: &VerifyOptions) {
    for (n, t) in [
        (Exponent::ratio(5, 2), 0.4),
        (Exponent::ratio(3, 2), 0.2),
        (Exponent::ratio(7, 3), 0.3),
    ] {
        let label = format!("n={} t={t}", n.as_rational());
        let cf = symmetric_binomial(&n, Complex64::new(0.0, t));
        let value = eval_lentz(&cf, &opts.tol, DEFAULT_MAX_DEPTH)
            .ok()
            .filter(|r| r.converged)
            .map(|r| r.value)
            .unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        let nf = n.to_f64();
        let want = nf * t / (nf * t.atan()).tan();
        out.push(
            format!("|Im| at z=it, {label} (absolute)"),
            Mode::Complex64,
            value.im.abs(),
            1e-12,
        );
        out.push(
            format!("Re at z=it = nt/tan(n·arctan t), {label} (absolute)"),
            Mode::Complex64,
            (value.re - want).abs(),
            1e-10,
        );
    }
}

fn tangent_multiple(out: &mut Checks, opts: &VerifyOptions) {
    let exact = |n: i64, t: BigRational| {
        exact_value(&tan_multiple(&Exponent::integer(n), t))
            .map(|v| v.0)
            .unwrap_or_default()
    };
    let t = q(1, 4);
    out.exact(
        "n=2 t=1/4 = 2t/(1-t^2) = 8/15",
        &exact(2, t.clone()),
        &(q(2, 1) * &t / (q(1, 1) - &t * &t)),
    );
    let t = q(1, 5);
    let t3 = &t * &t * &t;
    out.exact(
        "n=3 t=1/5 = (3t-t^3)/(1-3t^2) = 37/55",
        &exact(3, t.clone()),
        &((q(3, 1) * &t - t3) / (q(1, 1) - q(3, 1) * &t * &t)),
    );
    for (n, t) in [(2i64, q(2, 3)), (4, q(1, 7)), (-5, q(3, 10)), (6, q(1, 2))] {
        let want = tan_multiple_lhs(&Exponent::integer(n), &ScalarValue::Rational(t.clone()))
            .ok()
            .and_then(|r| BigRational::from_value(&r.value).ok())
            .unwrap_or_default();
        out.exact(
            format!("n={n} t={t} = tan(n·arctan t)"),
            &exact(n, t),
            &want,
        );
    }
    for (n, t) in [
        (Exponent::ratio(5, 2), 0.2),
        (Exponent::ratio(1, 3), 0.7),
        (Exponent::ratio(-3, 2), 0.5),
    ] {
        let got = lentz_value(&tan_multiple(&n, t), &opts.tol);
        let want = float_oracle(tan_multiple_lhs(&n, &ScalarValue::Float64(t)));
        out.rel(
            format!("n={} t={t} = tan(n·arctan t)", n.as_rational()),
            Mode::Float64,
            got,
            want,
            1e-11,
        );
    }
    // Vanishing n: tan(nφ)/n → φ, the arctan fraction.
    for t in [0.5, 1.0, 2.0] {
        let n = Exponent::new(BigRational::from_float(1e-6).unwrap());
        let tan_n_phi = lentz_value(&tan_multiple(&n, t), &opts.tol);
        let angle = tan_n_phi.atan() / n.to_f64();
        let phi = lentz_value(&arctan_cf(t), &opts.tol);
        out.push(
            format!("angle from n=1e-6 multiple = arctan fraction, t={t} (absolute)"),
            Mode::Float64,
            (angle - phi).abs(),
            1e-5,
        );
    }
}

fn limits(out: &mut Checks) {
    let depth_check =
        |out: &mut Checks, name: &str, cf: CfStream<f64>, depth: usize, want: f64, tol: f64| {
            let got = eval_backward(&cf, depth).unwrap_or(f64::NAN);
            out.push(
                format!("{name} at depth {depth} (absolute)"),
                Mode::Float64,
                (got - want).abs(),
                tol,
            );
        };
    depth_check(
        out,
        "arctan(1) = pi/4",
        arctan_cf(1.0),
        50,
        std::f64::consts::FRAC_PI_4,
        1e-12,
    );
    depth_check(out, "arctan(2)", arctan_cf(2.0), 60, 2f64.atan(), 1e-11);
    depth_check(
        out,
        "arctan(-0.3)",
        arctan_cf(-0.3),
        20,
        (-0.3f64).atan(),
        1e-14,
    );
    depth_check(out, "tan(1)", tan_cf(1.0).unwrap(), 30, 1f64.tan(), 1e-12);
    depth_check(
        out,
        "tan(pi/4) = 1",
        tan_cf(std::f64::consts::FRAC_PI_4).unwrap(),
        30,
        1.0,
        1e-12,
    );
    depth_check(
        out,
        "tan(1.5)",
        tan_cf(1.5).unwrap(),
        40,
        1.5f64.tan(),
        1e-10,
    );
    depth_check(
        out,
        "log-ratio(1/3) = ln 2",
        log_ratio_cf(1.0 / 3.0).unwrap(),
        40,
        std::f64::consts::LN_2,
        1e-12,
    );
    depth_check(
        out,
        "log-ratio(1/2) = ln 3",
        log_ratio_cf(0.5).unwrap(),
        40,
        3f64.ln(),
        1e-11,
    );
    let coth1 = float_oracle(coth_scaled_lhs(&ScalarValue::Float64(1.0), Limit::Reject));
    depth_check(
        out,
        "coth-scaled(1) = coth 1",
        coth_scaled_cf(1.0),
        20,
        coth1,
        1e-13,
    );
    let coth3 = float_oracle(coth_scaled_lhs(&ScalarValue::Float64(3.0), Limit::Reject));
    depth_check(
        out,
        "coth-scaled(3) = 3 coth 3",
        coth_scaled_cf(3.0),
        30,
        coth3,
        1e-13,
    );
    let ln = float_oracle(log_ratio_lhs(&ScalarValue::Float64(-0.9)));
    depth_check(
        out,
        "log-ratio(-0.9)",
        log_ratio_cf(-0.9).unwrap(),
        200,
        ln,
        1e-11,
    );
    // Zero arguments collapse to the leading term exactly.
    let zero = BigRational::zero();
    let exact_or_default =
        |cf: CfStream<BigRational>| exact_value(&cf).map(|v| v.0).unwrap_or_else(|| q(99, 1));
    out.exact(
        "arctan(0) = 0",
        &exact_or_default(arctan_cf(zero.clone())),
        &zero,
    );
    out.exact(
        "tan(0) = 0",
        &exact_or_default(tan_cf(zero.clone()).unwrap()),
        &zero,
    );
    out.exact(
        "log-ratio(0) = 0",
        &exact_or_default(log_ratio_cf(zero.clone()).unwrap()),
        &zero,
    );
    out.exact(
        "coth-scaled(0) = 1",
        &exact_or_default(coth_scaled_cf(zero)),
        &q(1, 1),
    );
}

fn series(out: &mut Checks, opts: &VerifyOptions) {
    for v in [0.3, 0.7, 1.0] {
        let lhs = float_oracle(coth_scaled_lhs(&ScalarValue::Float64(v), Limit::Reject));
        let s = float_oracle(series_ratio_coth(&ScalarValue::Float64(v), 20));
        out.rel(
            format!("series ratio (20 terms) = v coth v, v={v}"),
            Mode::Float64,
            s,
            lhs,
            1e-12,
        );
        let cf = lentz_value(&coth_scaled_cf(v), &opts.tol);
        out.rel(
            format!("fraction = series ratio (20 terms), v={v}"),
            Mode::Float64,
            cf,
            s,
            1e-12,
        );
    }
    let got = series_ratio_coth(&ScalarValue::Rational(q(1, 2)), 3)
        .ok()
        .and_then(|r| BigRational::from_value(&r.value).ok())
        .unwrap_or_default();
    let want = (q(1, 1) + q(1, 8) + q(1, 384)) / (q(1, 1) + q(1, 24) + q(1, 1920));
    out.exact("three-term series ratio at v=1/2", &got, &want);
}

/// Rational sample points for all eight families (non-integer n so the
/// fractions do not terminate).
pub fn rational_samples() -> Vec<FamilySpec> {
    let r = |n: i64, d: i64| ScalarValue::Rational(q(n, d));
    let spec = |family, n: Option<ScalarValue>, arg| {
        FamilySpec::new(family, n, arg).expect("valid sample")
    };
    vec![
        spec(Family::LagrangeBinomial, Some(r(1, 2)), r(1, 4)),
        spec(Family::UniformBinomial, Some(r(1, 3)), r(3, 10)),
        spec(Family::SymmetricBinomial, Some(r(5, 2)), r(3, 10)),
        spec(Family::TanMultiple, Some(r(5, 2)), r(1, 5)),
        spec(Family::ArcTan, None, r(1, 1)),
        spec(Family::Tan, None, r(1, 1)),
        spec(Family::LogRatio, None, r(1, 3)),
        spec(Family::CothScaled, None, r(1, 1)),
    ]
}

/// Float sample points for all eight families, inside each convergence domain.
pub fn float_samples() -> Vec<FamilySpec> {
    let f = ScalarValue::Float64;
    let spec = |family, n: Option<f64>, arg: f64| {
        FamilySpec::new(family, n.map(f), f(arg)).expect("valid sample")
    };
    vec![
        spec(Family::LagrangeBinomial, Some(0.5), 0.25),
        spec(Family::LagrangeBinomial, Some(-2.5), 0.6),
        spec(Family::UniformBinomial, Some(1.0 / 3.0), 0.3),
        spec(Family::UniformBinomial, Some(0.75), -0.4),
        spec(Family::SymmetricBinomial, Some(2.5), 0.3),
        spec(Family::SymmetricBinomial, Some(-0.7), 0.8),
        spec(Family::TanMultiple, Some(2.5), 0.2),
        spec(Family::TanMultiple, Some(0.3), 1.5),
        spec(Family::ArcTan, None, 1.0),
        spec(Family::ArcTan, None, 3.0),
        spec(Family::Tan, None, 1.0),
        spec(Family::Tan, None, -2.0),
        spec(Family::LogRatio, None, 1.0 / 3.0),
        spec(Family::LogRatio, None, 0.9),
        spec(Family::CothScaled, None, 1.0),
        spec(Family::CothScaled, None, 5.0),
    ]
}

fn describe(spec: &FamilySpec) -> String {
    match &spec.n {
        Some(n) => format!(
            "{} n={} {}={}",
            spec.family,
            n,
            spec.family.arg_name(),
            spec.arg
        ),
        None => format!("{} {}={}", spec.family, spec.family.arg_name(), spec.arg),
    }
}

/// `p_k q_{k−1} − p_{k−1} q_k = (−1)^{k−1} ∏_{i≤k} a_i`, with `p_{−1}=1, q_{−1}=0`.
pub fn determinant_holds(cf: &CfStream<BigRational>, levels: usize) -> bool {
    let c = convergents(cf, levels);
    let mut prev = (BigRational::one(), BigRational::zero());
    let mut product = BigRational::one();
    for conv in &c.items {
        if conv.k > 0 {
            product *= cf.term(conv.k).a;
        }
        let lhs = &conv.p * &prev.1 - &prev.0 * &conv.q;
        let rhs = if conv.k % 2 == 1 {
            product.clone()
        } else {
            -product.clone()
        };
        if lhs != rhs {
            return false;
        }
        prev = (conv.p.clone(), conv.q.clone());
    }
    true
}

fn determinant(out: &mut Checks) {
    for spec in rational_samples() {
        let ok = match &spec.arg {
            ScalarValue::Rational(r) => spec
                .build_typed(r.clone())
                .map(|cf| determinant_holds(&cf, 20))
                .unwrap_or(false),
            _ => false,
        };
        out.holds(
            format!("determinant identity levels 1..20, {}", describe(&spec)),
            Mode::BigRational,
            ok,
        );
    }
}

fn backward(out: &mut Checks) {
    for spec in rational_samples() {
        let ScalarValue::Rational(r) = &spec.arg else {
            continue;
        };
        let Ok(cf) = spec.build_typed(r.clone()) else {
            out.holds(
                format!("backward = forward, {}", describe(&spec)),
                Mode::BigRational,
                false,
            );
            continue;
        };
        let ok = (1..=20).all(|d| {
            let fwd = convergents(&cf, d).last().value();
            let bwd = eval_backward(&cf, d).ok();
            fwd.is_some() && fwd == bwd
        });
        out.holds(
            format!(
                "backward = forward convergent, depths 1..20, {}",
                describe(&spec)
            ),
            Mode::BigRational,
            ok,
        );
    }
}

fn lentz_agreement(out: &mut Checks, opts: &VerifyOptions) {
    let band = opts.tol.scaled(10.0);
    for spec in float_samples() {
        let ScalarValue::Float64(x) = spec.arg else {
            continue;
        };
        let name = format!("lentz = convergents within 10x tol, {}", describe(&spec));
        let Ok(cf) = spec.build_typed(x) else {
            out.holds(name, Mode::Float64, false);
            continue;
        };
        let a = eval_lentz(&cf, &opts.tol, DEFAULT_MAX_DEPTH);
        let b = eval_convergents(&cf, &opts.tol, DEFAULT_MAX_DEPTH);
        match (a, b) {
            (Ok(a), Ok(b)) if a.converged && b.converged => {
                let err = rel_err(a.value, b.value);
                let ok = a.value.nearly_equal(&b.value, &band);
                out.items.push(CheckResult {
                    group: out.group,
                    name,
                    mode: Mode::Float64.to_string(),
                    passed: ok,
                    error: err,
                    tolerance: band.rel_tol,
                });
            }
            _ => out.holds(name, Mode::Float64, false),
        }
    }
}
