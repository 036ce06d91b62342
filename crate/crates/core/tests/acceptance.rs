//! Acceptance suite: one PASS/FAIL line per criterion.

use std::process::{Command, Output};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use cfkit::engine::{
    convergents, equivalence_transform, eval_backward, eval_convergents, eval_lentz, tail,
    CfStream, ScaleFactors, DEFAULT_MAX_DEPTH,
};
use cfkit::families::{
    arctan_cf, coth_scaled_cf, lagrange_binomial, log_ratio_cf, symmetric_binomial, tan_cf,
    tan_multiple, uniform_binomial, Exponent,
};
use cfkit::kernel::{ratio, Scalar, ScalarValue, ToleranceSpec};
use cfkit::oracle::{
    binomial_power, coth_scaled_lhs, series_ratio_coth, symmetric_lhs, tan_multiple_lhs, Limit,
};
use cfkit::verify::{determinant_holds, float_samples, rational_samples, substituted_stream};

/// Failures collected while checking one criterion.
#[derive(Default)]
struct Outcome {
    checks: usize,
    failures: Vec<String>,
}

impl Outcome {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn exact(&mut self, label: &str, got: Option<BigRational>, want: &BigRational) {
        let ok = got.as_ref() == Some(want);
        self.check(ok, || format!("{label}: got {got:?}, want {want}"));
    }

    fn rel(&mut self, label: &str, got: f64, want: f64, tol: f64) {
        let err = rel_err(got, want);
        self.check(err <= tol, || {
            format!("{label}: got {got:e}, want {want:e}, rel err {err:e} > {tol:e}")
        });
    }
}

fn rel_err(got: f64, want: f64) -> f64 {
    let diff = (got - want).abs();
    if diff == 0.0 {
        0.0
    } else if want == 0.0 {
        diff
    } else if diff.is_nan() {
        f64::INFINITY
    } else {
        diff / want.abs()
    }
}

fn q(n: i64, d: i64) -> BigRational {
    ratio(n, d)
}

/// Exact value of a terminating rational fraction and its termination level.
fn terminated_value(cf: &CfStream<BigRational>) -> (Option<BigRational>, Option<usize>) {
    let c = convergents(cf, 200);
    match c.terminated_at {
        Some(level) => (c.last().value(), Some(level)),
        None => (None, None),
    }
}

fn lentz(cf: &CfStream<f64>, tol: &ToleranceSpec) -> f64 {
    match eval_lentz(cf, tol, DEFAULT_MAX_DEPTH) {
        Ok(r) if r.converged => r.value,
        _ => f64::NAN,
    }
}

fn oracle_f64(r: Result<cfkit::oracle::OracleResult, cfkit::oracle::OracleError>) -> f64 {
    r.ok()
        .and_then(|r| r.value.to_real_f64().ok())
        .unwrap_or(f64::NAN)
}

fn tol_1e12() -> ToleranceSpec {
    ToleranceSpec::relative(1e-12).expect("positive tolerance")
}

fn exact_termination() -> Outcome {
    let mut out = Outcome::default();
    let one = BigRational::one();
    for n in [1, -1] {
        for z in [q(1, 3), q(2, 5), q(1, 2), q(-3, 7), q(7, 3), q(0, 1)] {
            let (v, _) = terminated_value(&symmetric_binomial(&Exponent::integer(n), z.clone()));
            out.exact(&format!("n={n} z={z}"), v, &one);
        }
    }
    for n in [2, -2] {
        for z in [q(1, 3), q(2, 5)] {
            let want = &one + &z * &z;
            let (v, _) = terminated_value(&symmetric_binomial(&Exponent::integer(n), z.clone()));
            out.exact(&format!("n={n} z={z}"), v, &want);
        }
    }
    for n in [3, -3] {
        for z in [q(1, 2), q(1, 4)] {
            let z2 = &z * &z;
            let want = q(3, 1) * (&one + q(3, 1) * &z2) / (q(3, 1) + &z2);
            let (v, _) = terminated_value(&symmetric_binomial(&Exponent::integer(n), z.clone()));
            out.exact(&format!("n={n} z={z}"), v, &want);
        }
    }
    out
}

fn lagrange_exactness() -> Outcome {
    let mut out = Outcome::default();
    for n in [-3i64, -2, -1, 1, 2, 3] {
        for x in [q(1, 2), q(1, 3), q(-1, 4)] {
            let base = BigRational::one() + &x;
            let want = if n > 0 {
                base.pow(n as i32)
            } else {
                base.pow(-n as i32).recip()
            };
            let (v, level) = terminated_value(&lagrange_binomial(&Exponent::integer(n), x.clone()));
            out.exact(&format!("n={n} x={x}"), v, &want);
            let predicted = if n > 0 {
                2 * n as usize
            } else {
                2 * n.unsigned_abs() as usize + 1
            };
            out.check(level == Some(predicted), || {
                format!("n={n} x={x}: terminated at {level:?}, predicted {predicted}")
            });
        }
    }
    out
}

fn cross_family_chain() -> Outcome {
    let mut out = Outcome::default();
    let n = Exponent::ratio(1, 2);
    let (nf, x) = (0.5, 0.25);
    let tol = tol_1e12();
    let power = oracle_f64(binomial_power(&n, &ScalarValue::Float64(x)));
    out.rel(
        "lagrange",
        lentz(&lagrange_binomial(&n, x), &tol),
        power,
        1e-11,
    );
    out.rel(
        "uniform",
        lentz(&uniform_binomial(&n, x), &tol),
        power,
        1e-11,
    );
    let z = x / (2.0 + x);
    let sym = lentz(&symmetric_binomial(&n, z), &tol);
    let lhs = oracle_f64(symmetric_lhs(&n, &ScalarValue::Float64(z), Limit::Reject));
    out.rel("symmetric vs symmetric_lhs", sym, lhs, 1e-11);
    // (1+z)/(1−z) = 1+x, so the symmetric value is nz((1+x)^n + 1)/((1+x)^n − 1).
    out.rel(
        "symmetric vs binomial chain",
        sym,
        nf * z * (power + 1.0) / (power - 1.0),
        1e-11,
    );
    out
}

fn tangent_multiples() -> Outcome {
    let mut out = Outcome::default();
    for (n, t, want) in [(2, q(1, 4), q(8, 15)), (3, q(1, 5), q(37, 55))] {
        let (v, _) = terminated_value(&tan_multiple(&Exponent::integer(n), t.clone()));
        out.exact(&format!("n={n} t={t}"), v, &want);
    }
    let n = Exponent::ratio(5, 2);
    let cf = lentz(&tan_multiple(&n, 0.2), &tol_1e12());
    let lhs = oracle_f64(tan_multiple_lhs(&n, &ScalarValue::Float64(0.2)));
    out.rel("n=5/2 t=0.2", cf, lhs, 1e-11);
    out
}

/// Convergent `depth` of a float fraction.
fn convergent_at(cf: &CfStream<f64>, depth: usize) -> f64 {
    convergents(cf, depth).last().value().unwrap_or(f64::NAN)
}

fn limit_families() -> Outcome {
    let mut out = Outcome::default();
    let e2 = 2f64.exp();
    type Case = (&'static str, CfStream<f64>, f64, usize, f64);
    let cases: [Case; 4] = [
        (
            "arctan(1)",
            arctan_cf(1.0),
            std::f64::consts::FRAC_PI_4,
            50,
            1e-12,
        ),
        (
            "tan(1)",
            tan_cf(1.0).expect("away from poles"),
            1f64.tan(),
            30,
            1e-12,
        ),
        (
            "log-ratio(1/3)",
            log_ratio_cf(1.0 / 3.0).expect("|z| < 1"),
            std::f64::consts::LN_2,
            40,
            1e-12,
        ),
        (
            "coth-scaled(1)",
            coth_scaled_cf(1.0),
            (e2 + 1.0) / (e2 - 1.0),
            20,
            1e-13,
        ),
    ];
    for (label, cf, want, depth, tol) in cases {
        out.rel(
            &format!("{label} at depth {depth}"),
            convergent_at(&cf, depth),
            want,
            tol,
        );
    }
    out
}

fn imaginary_axis() -> Outcome {
    let mut out = Outcome::default();
    let (n, t) = (Exponent::ratio(5, 2), 0.4);
    let z = Complex64::new(0.0, t);
    let value = match eval_lentz(&symmetric_binomial(&n, z), &tol_1e12(), DEFAULT_MAX_DEPTH) {
        Ok(r) if r.converged => r.value,
        _ => Complex64::new(f64::NAN, f64::NAN),
    };
    let nf = n.to_f64();
    let want = nf * t / (nf * t.atan()).tan();
    out.check(value.im.abs() < 1e-12, || {
        format!("|Im| = {:e}", value.im.abs())
    });
    out.check((value.re - want).abs() < 1e-10, || {
        format!("Re = {}, want {want}", value.re)
    });
    out
}

fn series_ratio() -> Outcome {
    let mut out = Outcome::default();
    let series = oracle_f64(series_ratio_coth(&ScalarValue::Float64(0.7), 20));
    let lhs = oracle_f64(coth_scaled_lhs(&ScalarValue::Float64(0.7), Limit::Reject));
    out.check((series - lhs).abs() <= 1e-12, || {
        format!("v=0.7: series {series}, lhs {lhs}")
    });
    // 1 + v²/2! + v⁴/4! over 1 + v²/3! + v⁴/5! at v = 1/2.
    let hand = (q(1, 1) + q(1, 8) + q(1, 384)) / (q(1, 1) + q(1, 24) + q(1, 1920));
    let got = series_ratio_coth(&ScalarValue::Rational(q(1, 2)), 3)
        .ok()
        .map(|r| r.value);
    out.check(got == Some(ScalarValue::Rational(hand.clone())), || {
        format!("v=1/2, 3 terms: got {got:?}, want {hand}")
    });
    out
}

fn rational_streams() -> Vec<(String, CfStream<BigRational>)> {
    rational_samples()
        .into_iter()
        .map(|spec| {
            let ScalarValue::Rational(arg) = &spec.arg else {
                panic!("rational sample in {} mode", spec.mode())
            };
            let cf = spec.build_typed(arg.clone()).expect("valid sample");
            (
                format!("{} {}={}", spec.family, spec.family.arg_name(), arg),
                cf,
            )
        })
        .collect()
}

fn engine_properties() -> Outcome {
    let mut out = Outcome::default();
    let streams = rational_streams();
    out.check(streams.len() == 8, || {
        format!("{} rational samples, expected 8", streams.len())
    });
    for (label, cf) in &streams {
        out.check(determinant_holds(cf, 20), || {
            format!("determinant identity fails: {label}")
        });
    }

    let y = q(1, 5);
    let c = BigRational::one() / (BigRational::one() + &y);
    let mut equiv_cases: Vec<(String, CfStream<BigRational>)> = streams.clone();
    for n in [q(1, 2), q(5, 2), q(3, 1)] {
        equiv_cases.push((
            format!("substituted n={n} y={y}"),
            substituted_stream(&Exponent::new(n), y.clone()),
        ));
    }
    for (label, cf) in &equiv_cases {
        let t =
            equivalence_transform(cf, ScaleFactors::Uniform(c.clone())).expect("nonzero factor");
        let a = convergents(cf, 20);
        let b = convergents(&t, 20);
        let same = a.items.len() == b.items.len()
            && a.items
                .iter()
                .zip(&b.items)
                .all(|(u, v)| u.value() == v.value());
        out.check(same, || {
            format!("equivalence transform changes convergents: {label}")
        });
    }

    for (label, cf) in &streams {
        for depth in 1..=20 {
            let forward = convergents(cf, depth).last().value();
            let backward = eval_backward(cf, depth).ok();
            out.check(forward.is_some() && forward == backward, || {
                format!("backward != forward at depth {depth}: {label}")
            });
        }
    }

    let tol = ToleranceSpec::DEFAULT;
    let band = tol.scaled(10.0);
    for spec in float_samples() {
        let ScalarValue::Float64(x) = spec.arg else {
            continue;
        };
        let cf = spec.build_typed(x).expect("valid sample");
        let a = eval_lentz(&cf, &tol, DEFAULT_MAX_DEPTH);
        let b = eval_convergents(&cf, &tol, DEFAULT_MAX_DEPTH);
        let ok = matches!((&a, &b), (Ok(a), Ok(b)) if a.converged && b.converged
            && a.value.nearly_equal(&b.value, &band));
        out.check(ok, || {
            format!(
                "lentz vs convergents: {} {}={x}: {a:?} {b:?}",
                spec.family,
                spec.family.arg_name()
            )
        });
    }
    out
}

fn tail_identity() -> Outcome {
    let mut out = Outcome::default();
    let n = Exponent::ratio(1, 2);
    let (nf, x) = (0.5, 0.25);
    let cf = lagrange_binomial(&n, x);
    let tol = tol_1e12();
    let a = lentz(&tail(&cf, 1).expect("level 1"), &tol);
    let b = lentz(&tail(&cf, 3).expect("level 3"), &tol);
    let rebracketed =
        1.0 + (1.0 - nf) * x / 2.0 + ((nf * nf - 1.0) * x * x / 4.0) / (b + (1.0 + nf) * x / 2.0);
    out.rel("A rebracketed through B", a, rebracketed, 1e-11);
    out.rel(
        "1 + nx/A = (1+x)^n",
        1.0 + nf * x / a,
        (1.0 + x).powf(nf),
        1e-11,
    );
    out
}

fn cfkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfkit"))
        .args(args)
        .output()
        .expect("run cfkit")
}

fn csv_records(text: &str) -> Result<(csv::StringRecord, Vec<csv::StringRecord>), csv::Error> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let rows = reader.records().collect::<Result<Vec<_>, _>>()?;
    Ok((headers, rows))
}

fn field<'a>(
    headers: &csv::StringRecord,
    row: &'a csv::StringRecord,
    name: &str,
) -> Option<&'a str> {
    headers
        .iter()
        .position(|h| h == name)
        .and_then(|i| row.get(i))
}

fn parse_rational(text: &str) -> Option<BigRational> {
    match text.split_once('/') {
        Some((p, q)) => Some(BigRational::new(
            p.parse::<BigInt>().ok()?,
            q.parse::<BigInt>().ok()?,
        )),
        None => Some(BigRational::from_integer(text.parse::<BigInt>().ok()?)),
    }
}

fn cli_contract() -> Outcome {
    let mut out = Outcome::default();

    let run = cfkit(&[
        "eval",
        "--family",
        "symmetric-binomial",
        "--n",
        "2",
        "--arg",
        "1/3",
        "--mode",
        "rational",
    ]);
    let stdout = String::from_utf8_lossy(&run.stdout).into_owned();
    let parsed = csv_records(&stdout).ok().and_then(|(h, rows)| {
        let row = rows.first()?;
        Some((
            field(&h, row, "value")?.to_owned(),
            field(&h, row, "terminated")?.to_owned(),
        ))
    });
    out.check(run.status.code() == Some(0), || {
        format!("eval symmetric: exit {:?}", run.status.code())
    });
    out.check(parsed == Some(("10/9".into(), "true".into())), || {
        format!("eval symmetric: (value, terminated) = {parsed:?}")
    });

    let run = cfkit(&[
        "eval", "--family", "arctan", "--arg", "1", "--method", "lentz", "--tol", "1e-12",
    ]);
    let stdout = String::from_utf8_lossy(&run.stdout).into_owned();
    let value = csv_records(&stdout)
        .ok()
        .and_then(|(h, rows)| field(&h, rows.first()?, "value")?.parse::<f64>().ok())
        .unwrap_or(f64::NAN);
    out.check(run.status.code() == Some(0), || {
        format!("eval arctan: exit {:?}", run.status.code())
    });
    out.check((value - std::f64::consts::FRAC_PI_4).abs() <= 1e-12, || {
        format!("eval arctan: value {value}")
    });

    let run = cfkit(&["eval", "--family", "log-ratio", "--arg", "1.5"]);
    let stderr = String::from_utf8_lossy(&run.stderr).into_owned();
    out.check(run.status.code() == Some(1), || {
        format!("eval log-ratio 1.5: exit {:?}", run.status.code())
    });
    out.check(stderr.contains("|z| < 1"), || {
        format!("eval log-ratio 1.5: stderr {stderr:?}")
    });

    // Float table: header is bit-exact and every value round-trips to p/q.
    let run = cfkit(&[
        "table",
        "--family",
        "coth-scaled",
        "--arg",
        "1",
        "--depth",
        "10",
    ]);
    let stdout = String::from_utf8_lossy(&run.stdout).into_owned();
    out.check(
        stdout.lines().next() == Some("k,p,q,value,abs_err,rel_err"),
        || format!("table header: {:?}", stdout.lines().next()),
    );
    out.check(!stdout.contains('\r'), || "table output contains CR".into());
    let expected = convergents(&coth_scaled_cf(1.0), 10);
    match csv_records(&stdout) {
        Ok((h, rows)) => {
            out.check(rows.len() == expected.items.len(), || {
                format!("table rows: {}", rows.len())
            });
            for (row, conv) in rows.iter().zip(&expected.items) {
                let value = field(&h, row, "value").and_then(|v| v.parse::<f64>().ok());
                let p = field(&h, row, "p").and_then(|v| v.parse::<f64>().ok());
                let q = field(&h, row, "q").and_then(|v| v.parse::<f64>().ok());
                out.check(
                    value == conv.value() && p == Some(conv.p) && q == Some(conv.q),
                    || format!("table row k={}: {row:?} vs {conv:?}", conv.k),
                );
            }
        }
        Err(e) => out.check(false, || format!("table CSV does not parse: {e}")),
    }

    // Rational table: p and q round-trip as exact fractions.
    let run = cfkit(&[
        "table",
        "--family",
        "lagrange-binomial",
        "--n",
        "1/2",
        "--arg",
        "1/4",
        "--mode",
        "rational",
        "--depth",
        "8",
    ]);
    let stdout = String::from_utf8_lossy(&run.stdout).into_owned();
    let cf = lagrange_binomial(&Exponent::ratio(1, 2), q(1, 4));
    let expected = convergents(&cf, 8);
    match csv_records(&stdout) {
        Ok((h, rows)) => {
            out.check(rows.len() == expected.items.len(), || {
                format!("rational table rows: {}", rows.len())
            });
            for (row, conv) in rows.iter().zip(&expected.items) {
                let p = field(&h, row, "p").and_then(parse_rational);
                let q = field(&h, row, "q").and_then(parse_rational);
                let exact = p.as_ref() == Some(&conv.p) && q.as_ref() == Some(&conv.q);
                let value = field(&h, row, "value").and_then(|v| v.parse::<f64>().ok());
                let decimal = value == conv.value().map(|v| f64::from_rational(&v));
                out.check(exact && decimal, || {
                    format!("rational table row k={}: {row:?}", conv.k)
                });
            }
        }
        Err(e) => out.check(false, || format!("rational table CSV does not parse: {e}")),
    }
    if expected.items.iter().any(|c| c.q.is_zero()) {
        out.check(false, || "unexpected pole in rational table".into());
    }
    out
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("1 exact termination fixtures", exact_termination),
        (
            "2 lagrange fraction exactness and termination level",
            lagrange_exactness,
        ),
        ("3 cross-family chain", cross_family_chain),
        ("4 tangent multiples", tangent_multiples),
        ("5 limit families", limit_families),
        ("6 imaginary-axis reality", imaginary_axis),
        ("7 series ratio", series_ratio),
        ("8 engine properties", engine_properties),
        ("9 tail identity", tail_identity),
        ("10 cli contract", cli_contract),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = check();
        if outcome.failures.is_empty() {
            println!("PASS  criterion {name} ({} checks)", outcome.checks);
        } else {
            failed += 1;
            println!(
                "FAIL  criterion {name} ({}/{} checks failed)",
                outcome.failures.len(),
                outcome.checks
            );
            for f in &outcome.failures {
                println!("        {f}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
