//! Command-line front end: `eval`, `table`, `verify` and `compare`.
//!
//! Exit codes: 0 success, 1 usage or domain error (and a failing verify
//! run), 2 non-convergence.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::engine::{EvalError, EvalReport, DEFAULT_MAX_DEPTH};
use crate::families::{Family, FamilyError, FamilySpec, Method};
use crate::kernel::{format_f64, KernelError, Mode, Scalar, ScalarValue, ToleranceSpec};
use crate::oracle::{compare_values, family_oracle, OracleError, OracleResult};
use crate::verify::{run_suite, UnknownGroup, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;

/// CSV header of `table` output.
pub const TABLE_HEADER: &str = "k,p,q,value,abs_err,rel_err";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Verify(#[from] UnknownGroup),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Parser, Debug)]
#[command(
    name = "cfkit",
    version,
    about = "Continued fractions for binomial powers and their limits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one fraction and print the evaluation report.
    Eval(EvalArgs),
    /// Print every convergent up to --depth with errors against the closed form.
    Table(DepthArgs),
    /// Run the identity suite.
    Verify(VerifyArgs),
    /// Print fraction value, closed-form value and relative error for depths 1..=--depth.
    Compare(DepthArgs),
}

#[derive(Args, Debug)]
struct FamilyArgs {
    /// lagrange-binomial, uniform-binomial, symmetric-binomial, tan-multiple,
    /// arctan, tan, log-ratio or coth-scaled.
    #[arg(long)]
    family: String,
    /// Exponent n (families with an exponent only).
    #[arg(long, allow_hyphen_values = true)]
    n: Option<String>,
    /// The family's argument (x, z, t, theta or v).
    #[arg(long, allow_hyphen_values = true)]
    arg: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Float)]
    mode: ModeArg,
}

#[derive(Args, Debug)]
struct ToleranceArgs {
    /// Relative tolerance.
    #[arg(long, default_value_t = ToleranceSpec::DEFAULT.rel_tol)]
    tol: f64,
    /// Absolute tolerance.
    #[arg(long, default_value_t = ToleranceSpec::DEFAULT.abs_tol)]
    abs_tol: f64,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Convergents)]
    method: MethodArg,
    /// Level bound; the truncation depth for --method backward.
    #[arg(long)]
    depth: Option<usize>,
    #[command(flatten)]
    tol: ToleranceArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct DepthArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long)]
    depth: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Run a single group.
    #[arg(long)]
    only: Option<String>,
    /// Keep only checks in this mode.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[command(flatten)]
    tol: ToleranceArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ModeArg {
    Float,
    Rational,
    Complex,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Float => Mode::Float64,
            ModeArg::Rational => Mode::BigRational,
            ModeArg::Complex => Mode::Complex64,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum MethodArg {
    Convergents,
    Lentz,
    Backward,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Convergents => Method::Convergents,
            MethodArg::Lentz => Method::Lentz,
            MethodArg::Backward => Method::Backward,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubcommandKind {
    Eval,
    Table,
    Compare,
}

/// Validated settings for `eval`, `table` and `compare`.
#[derive(Debug, Clone)]
pub struct CommandConfig {
    pub subcommand: SubcommandKind,
    pub family: FamilySpec,
    pub method: Method,
    pub depth: Option<usize>,
    pub tol: ToleranceSpec,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl CommandConfig {
    pub fn mode(&self) -> Mode {
        self.family.mode()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.method == Method::Backward && self.depth.is_none() {
            return Err(CliError::Usage("--method backward requires --depth".into()));
        }
        if self.method == Method::Lentz && self.mode() == Mode::BigRational {
            return Err(CliError::Usage(
                "--method lentz is not available in rational mode; use convergents or backward"
                    .into(),
            ));
        }
        if self.subcommand == SubcommandKind::Eval && self.depth == Some(0) {
            return Err(CliError::Usage(
                "--depth must be at least 1 for eval".into(),
            ));
        }
        self.family.validate()?;
        Ok(())
    }
}

fn tolerance(args: &ToleranceArgs, mode: Mode) -> Result<ToleranceSpec, CliError> {
    if args.tol == 0.0 && args.abs_tol == 0.0 && mode == Mode::BigRational {
        return Ok(ToleranceSpec::EXACT);
    }
    Ok(ToleranceSpec::new(args.tol, args.abs_tol)?)
}

fn family_spec(args: &FamilyArgs) -> Result<FamilySpec, CliError> {
    let family: Family = args.family.parse()?;
    let mode: Mode = args.mode.into();
    let n = args
        .n
        .as_deref()
        .map(|n| ScalarValue::parse(n, mode))
        .transpose()?;
    let arg = ScalarValue::parse(&args.arg, mode)?;
    Ok(FamilySpec::new(family, n, arg)?)
}

/// Text of a scalar: exact fraction for rationals, 17 significant digits
/// otherwise.
fn exact_text(v: &ScalarValue) -> String {
    v.to_string()
}

/// Decimal text of a scalar (rationals are rounded to the nearest double).
fn decimal_text(v: &ScalarValue) -> String {
    match v {
        ScalarValue::Rational(r) => format_f64(<f64 as Scalar>::from_rational(r)),
        other => other.to_string(),
    }
}

#[derive(Debug, Serialize)]
struct EvalOutput {
    value: String,
    depth_used: usize,
    converged: bool,
    terminated: bool,
    residual: f64,
}

/// One line of `table` output.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct TableRow {
    pub k: usize,
    pub p: String,
    pub q: String,
    pub value: String,
    pub abs_err: Option<String>,
    pub rel_err: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct CompareRow {
    pub depth: usize,
    pub cf_value: String,
    pub oracle_value: String,
    pub rel_err: Option<String>,
}

#[derive(Debug, Serialize)]
struct Params {
    n: Option<String>,
    arg: String,
    mode: String,
}

#[derive(Debug, Serialize)]
struct TableDocument<R> {
    family: String,
    params: Params,
    rows: Vec<R>,
}

fn params(spec: &FamilySpec) -> Params {
    Params {
        n: spec.n.as_ref().map(exact_text),
        arg: exact_text(&spec.arg),
        mode: spec.mode().to_string(),
    }
}

fn write_rows<R: Serialize>(
    out: &mut dyn Write,
    format: Format,
    spec: Option<&FamilySpec>,
    rows: Vec<R>,
) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(out);
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        Format::Json => {
            match spec {
                Some(spec) => serde_json::to_writer_pretty(
                    &mut *out,
                    &TableDocument {
                        family: spec.family.to_string(),
                        params: params(spec),
                        rows,
                    },
                )?,
                None => serde_json::to_writer_pretty(&mut *out, &rows)?,
            }
            writeln!(out)?;
        }
    }
    Ok(())
}

fn oracle_for(spec: &FamilySpec) -> Option<OracleResult> {
    family_oracle(spec).and_then(Result::ok)
}

/// `eval`: evaluates once and reports. Returns the exit code.
pub fn run_eval(config: &CommandConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    config.validate()?;
    let stream = config.family.build()?;
    let depth = config.depth.unwrap_or(DEFAULT_MAX_DEPTH);
    let report: EvalReport<ScalarValue> = stream.evaluate(config.method, &config.tol, depth)?;
    let output = EvalOutput {
        value: exact_text(&report.value),
        depth_used: report.depth_used,
        converged: report.converged,
        terminated: report.terminated,
        residual: report.residual,
    };
    match config.format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut *out);
            w.serialize(&output)?;
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &output)?;
            writeln!(out)?;
        }
    }
    // Backward folding has no convergence test; it always reports its depth.
    let ok = report.converged || config.method == Method::Backward;
    Ok(if ok { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

/// Rows for `table`: one per convergent up to the depth or termination.
pub fn table_rows(spec: &FamilySpec, depth: usize) -> Result<Vec<TableRow>, CliError> {
    let stream = spec.build()?;
    let oracle = oracle_for(spec);
    let convs = stream.convergents(depth);
    Ok(convs
        .items
        .iter()
        .map(|c| {
            let value = c.p.div(&c.q).ok();
            let errs = match (&value, &oracle) {
                (Some(v), Some(o)) => Some(compare_values(v, &o.value)),
                _ => None,
            };
            TableRow {
                k: c.k,
                p: exact_text(&c.p),
                q: exact_text(&c.q),
                value: value.as_ref().map(decimal_text).unwrap_or_default(),
                abs_err: errs.map(|e| format_f64(e.abs)),
                rel_err: errs.map(|e| format_f64(e.rel)),
            }
        })
        .collect())
}

pub fn run_table(config: &CommandConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    config.validate()?;
    let depth = config
        .depth
        .ok_or_else(|| CliError::Usage("table requires --depth".into()))?;
    let rows = table_rows(&config.family, depth)?;
    write_rows(out, config.format, Some(&config.family), rows)?;
    Ok(EXIT_OK)
}

/// Rows for `compare`: truncated value against the closed form for depths
/// `1..=depth`. Past termination the terminated value repeats.
pub fn compare_rows(spec: &FamilySpec, depth: usize) -> Result<Vec<CompareRow>, CliError> {
    let oracle = match family_oracle(spec) {
        None => {
            return Err(CliError::Usage(format!(
                "no closed form available for {} in {} mode",
                spec.family,
                spec.mode()
            )))
        }
        Some(r) => r?,
    };
    let stream = spec.build()?;
    let convs = stream.convergents(depth);
    let last = convs.last().clone();
    Ok((1..=depth)
        .map(|d| {
            let conv = convs.items.get(d).unwrap_or(&last);
            let value = conv.p.div(&conv.q).ok();
            CompareRow {
                depth: d,
                cf_value: value.as_ref().map(exact_text).unwrap_or_default(),
                oracle_value: exact_text(&oracle.value),
                rel_err: value.map(|v| format_f64(compare_values(&v, &oracle.value).rel)),
            }
        })
        .collect())
}

pub fn run_compare(config: &CommandConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    config.validate()?;
    let depth = config
        .depth
        .ok_or_else(|| CliError::Usage("compare requires --depth".into()))?;
    let rows = compare_rows(&config.family, depth)?;
    write_rows(out, config.format, Some(&config.family), rows)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct VerifyRow {
    group: &'static str,
    check: String,
    mode: String,
    status: &'static str,
    error: String,
    tolerance: String,
}

pub fn run_verify(
    opts: &VerifyOptions,
    format: Format,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let results = run_suite(opts)?;
    let all_passed = results.iter().all(|c| c.passed);
    let rows: Vec<VerifyRow> = results
        .into_iter()
        .map(|c| VerifyRow {
            group: c.group,
            check: c.name,
            mode: c.mode,
            status: if c.passed { "PASS" } else { "FAIL" },
            error: format_f64(c.error),
            tolerance: format_f64(c.tolerance),
        })
        .collect();
    write_rows(out, format, None, rows)?;
    Ok(if all_passed { EXIT_OK } else { EXIT_USAGE })
}

fn open_output(path: &Option<PathBuf>) -> Result<Option<File>, CliError> {
    Ok(match path {
        Some(p) => Some(File::create(p)?),
        None => None,
    })
}

fn dispatch(cli: Cli, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let (config, output) = match cli.command {
        Command::Verify(args) => {
            let mode = args.mode.map(Mode::from);
            let opts = VerifyOptions {
                only: args.only,
                mode,
                tol: ToleranceSpec::new(args.tol.tol, args.tol.abs_tol)?,
            };
            let mut file = open_output(&args.output.output)?;
            let out: &mut dyn Write = match file.as_mut() {
                Some(f) => f,
                None => stdout,
            };
            return run_verify(&opts, args.output.format, out);
        }
        Command::Eval(args) => {
            let family = family_spec(&args.family)?;
            let tol = tolerance(&args.tol, family.mode())?;
            (
                CommandConfig {
                    subcommand: SubcommandKind::Eval,
                    family,
                    method: args.method.into(),
                    depth: args.depth,
                    tol,
                    format: args.output.format,
                    output: args.output.output.clone(),
                },
                args.output.output,
            )
        }
        Command::Table(args) => (
            depth_config(SubcommandKind::Table, &args)?,
            args.output.output,
        ),
        Command::Compare(args) => (
            depth_config(SubcommandKind::Compare, &args)?,
            args.output.output,
        ),
    };
    config.validate()?;
    let mut file = open_output(&output)?;
    let out: &mut dyn Write = match file.as_mut() {
        Some(f) => f,
        None => stdout,
    };
    match config.subcommand {
        SubcommandKind::Eval => run_eval(&config, out),
        SubcommandKind::Table => run_table(&config, out),
        SubcommandKind::Compare => run_compare(&config, out),
    }
}

fn depth_config(subcommand: SubcommandKind, args: &DepthArgs) -> Result<CommandConfig, CliError> {
    Ok(CommandConfig {
        subcommand,
        family: family_spec(&args.family)?,
        method: Method::Convergents,
        depth: Some(args.depth),
        tol: ToleranceSpec::DEFAULT,
        format: args.output.format,
        output: args.output.output.clone(),
    })
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return code;
        }
    };
    match dispatch(cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}
