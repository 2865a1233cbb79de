//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or domain error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;
use std::io::{self, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::exact::{self, BigRational, ExactSpec};
use crate::ortho::{self, Family, FamilySpec, Param};
use crate::param_deriv;
use crate::suite::{self, Execution, SuiteReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "orthoderiv",
    version,
    about = "Parameter derivatives of classical orthogonal polynomials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate P_n(z), or the sequence P_0..P_n with --sequence.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        sequence: bool,
    },
    /// Expansion coefficients a_nk of the parameter derivative.
    Dcoeffs {
        #[command(flatten)]
        common: Common,
    },
    /// The parameter derivative of P_n at z.
    Dparam {
        #[command(flatten)]
        common: Common,
    },
    /// Run the verification sweeps.
    Verify {
        #[arg(long, default_value_t = 12)]
        max_n: usize,
        #[arg(long, value_enum, default_value_t = Mode::All)]
        mode: Mode,
        /// Worker threads for the sweeps (1 runs sequentially).
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long, value_enum)]
    wrt: Option<WrtArg>,
    #[arg(long)]
    n: usize,
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    /// Use the exact rational engine.
    #[arg(long)]
    exact: bool,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Laguerre,
    Gegenbauer,
    Jacobi,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum WrtArg {
    Alpha,
    Beta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Float,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Float,
    Exact,
}

impl Engine {
    fn name(self) -> &'static str {
        match self {
            Engine::Float => "float",
            Engine::Exact => "exact",
        }
    }
}

/// A float, or exact rational text `p/q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Float(f64),
    Exact(String),
}

impl Scalar {
    fn exact(x: &BigRational) -> Self {
        Scalar::Exact(exact::format_rational(x))
    }

    fn parse(text: &str, engine: Engine) -> Result<Self, String> {
        match engine {
            Engine::Exact => Ok(Scalar::Exact(text.to_string())),
            Engine::Float => text
                .parse()
                .map(Scalar::Float)
                .map_err(|_| format!("bad float {text:?}")),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // Debug is the shortest representation that round-trips.
            Scalar::Float(v) => write!(f, "{v:?}"),
            Scalar::Exact(s) => f.write_str(s),
        }
    }
}

/// One output record of `eval`, `dparam` and `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalReport {
    pub family: Family,
    pub parameters: BTreeMap<String, Scalar>,
    pub n: usize,
    pub z: Option<Scalar>,
    pub result: Option<Scalar>,
    pub engine: Engine,
    pub checks_passed: Option<usize>,
}

pub const REPORT_CSV_HEADER: [&str; 7] = [
    "family",
    "parameters",
    "n",
    "z",
    "result",
    "engine",
    "checks_passed",
];

impl EvalReport {
    pub fn csv_fields(&self) -> Vec<String> {
        let params: Vec<String> = self
            .parameters
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        vec![
            self.family.name().to_string(),
            params.join(";"),
            self.n.to_string(),
            self.z.as_ref().map(Scalar::to_string).unwrap_or_default(),
            self.result
                .as_ref()
                .map(Scalar::to_string)
                .unwrap_or_default(),
            self.engine.name().to_string(),
            self.checks_passed
                .map(|c| c.to_string())
                .unwrap_or_default(),
        ]
    }

    /// Inverse of [`EvalReport::csv_fields`].
    pub fn from_csv_fields(fields: &[&str]) -> Result<Self, String> {
        let [family, params, n, z, result, engine, checks] = fields else {
            return Err(format!(
                "expected {} fields, got {}",
                REPORT_CSV_HEADER.len(),
                fields.len()
            ));
        };
        let family = Family::ALL
            .into_iter()
            .find(|f| f.name() == *family)
            .ok_or_else(|| format!("unknown family {family:?}"))?;
        let engine = match *engine {
            "float" => Engine::Float,
            "exact" => Engine::Exact,
            other => return Err(format!("unknown engine {other:?}")),
        };
        let optional = |text: &str| {
            (!text.is_empty())
                .then(|| Scalar::parse(text, engine))
                .transpose()
        };
        let mut parameters = BTreeMap::new();
        for item in params.split(';').filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| format!("bad parameter {item:?}"))?;
            parameters.insert(k.to_string(), Scalar::parse(v, engine)?);
        }
        Ok(Self {
            family,
            parameters,
            n: n.parse().map_err(|_| format!("bad degree {n:?}"))?,
            z: optional(z)?,
            result: optional(result)?,
            engine,
            checks_passed: (!checks.is_empty())
                .then(|| checks.parse().map_err(|_| format!("bad count {checks:?}")))
                .transpose()?,
        })
    }
}

/// One row of `dcoeffs` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientRecord {
    pub family: Family,
    pub parameters: BTreeMap<String, Scalar>,
    pub wrt: Param,
    pub n: usize,
    pub k: usize,
    pub coefficient: Scalar,
    pub engine: Engine,
}

#[derive(Debug)]
struct UsageError(String);

impl From<Error> for UsageError {
    fn from(e: Error) -> Self {
        UsageError(e.to_string())
    }
}

impl From<io::Error> for UsageError {
    fn from(e: io::Error) -> Self {
        UsageError(e.to_string())
    }
}

impl From<csv::Error> for UsageError {
    fn from(e: csv::Error) -> Self {
        UsageError(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, UsageError>;

/// Parses `args` (program name first), writes the command output to `out`
/// and diagnostics to `err`, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Eval { common, sequence } => cmd_eval(&common, sequence, out).map(|()| EXIT_OK),
        Command::Dcoeffs { common } => cmd_dcoeffs(&common, out).map(|()| EXIT_OK),
        Command::Dparam { common } => cmd_dparam(&common, out).map(|()| EXIT_OK),
        Command::Verify {
            max_n,
            mode,
            jobs,
            format,
        } => cmd_verify(max_n, mode, jobs, format, out, err),
    };
    match outcome {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn parse_float(flag: &str, text: &str) -> CliResult<f64> {
    if let Ok(v) = text.parse::<f64>() {
        return Ok(v);
    }
    exact::parse_rational(text)
        .map(|r| exact::to_f64(&r))
        .map_err(|_| UsageError(format!("--{flag}: cannot parse {text:?} as a real number")))
}

fn parse_exact(flag: &str, text: &str) -> CliResult<BigRational> {
    exact::parse_rational(text).map_err(|_| {
        UsageError(format!(
            "--{flag}: {text:?} is not an exact rational (use p/q, an integer or a decimal)"
        ))
    })
}

/// Parameter text for each family parameter, checked against the family.
struct RawParams<'a> {
    family: Family,
    alpha: Option<&'a str>,
    beta: Option<&'a str>,
    lambda: Option<&'a str>,
    wrt: Param,
}

impl<'a> RawParams<'a> {
    fn new(c: &'a Common, need_wrt: bool) -> CliResult<Self> {
        let family = match c.family {
            FamilyArg::Laguerre => Family::Laguerre,
            FamilyArg::Gegenbauer => Family::Gegenbauer,
            FamilyArg::Jacobi => Family::Jacobi,
        };
        let reject = |flag: &str, given: bool| {
            if given {
                Err(UsageError(format!(
                    "--{flag} does not apply to the {family} family"
                )))
            } else {
                Ok(())
            }
        };
        let require = |flag: &str, v: Option<&'a String>| {
            v.map(String::as_str)
                .ok_or_else(|| UsageError(format!("the {family} family requires --{flag}")))
        };
        let wrt = match (family, c.wrt) {
            (Family::Laguerre, Some(WrtArg::Beta)) => {
                return Err(UsageError(
                    "laguerre derivatives are taken wrt alpha".into(),
                ))
            }
            (Family::Laguerre, _) => Param::Alpha,
            (Family::Gegenbauer, w) => {
                reject("wrt", w.is_some())?;
                Param::Lambda
            }
            (Family::Jacobi, Some(WrtArg::Alpha)) => Param::Alpha,
            (Family::Jacobi, Some(WrtArg::Beta)) => Param::Beta,
            (Family::Jacobi, None) if need_wrt => {
                return Err(UsageError(
                    "the jacobi family requires --wrt alpha|beta".into(),
                ))
            }
            (Family::Jacobi, None) => Param::Alpha,
        };
        let mut raw = RawParams {
            family,
            alpha: None,
            beta: None,
            lambda: None,
            wrt,
        };
        match family {
            Family::Laguerre => {
                reject("beta", c.beta.is_some())?;
                reject("lambda", c.lambda.is_some())?;
                // The Laguerre row does not depend on alpha, so it defaults to 0.
                raw.alpha = Some(c.alpha.as_deref().unwrap_or("0"));
            }
            Family::Gegenbauer => {
                reject("alpha", c.alpha.is_some())?;
                reject("beta", c.beta.is_some())?;
                raw.lambda = Some(require("lambda", c.lambda.as_ref())?);
            }
            Family::Jacobi => {
                reject("lambda", c.lambda.is_some())?;
                raw.alpha = Some(require("alpha", c.alpha.as_ref())?);
                raw.beta = Some(require("beta", c.beta.as_ref())?);
            }
        }
        Ok(raw)
    }

    fn float(&self) -> CliResult<FamilySpec> {
        let get = |flag, v: Option<&str>| parse_float(flag, v.unwrap_or_default());
        Ok(match self.family {
            Family::Laguerre => FamilySpec::laguerre(get("alpha", self.alpha)?)?,
            Family::Gegenbauer => FamilySpec::gegenbauer(get("lambda", self.lambda)?)?,
            Family::Jacobi => {
                FamilySpec::jacobi(get("alpha", self.alpha)?, get("beta", self.beta)?, self.wrt)?
            }
        })
    }

    fn exact(&self) -> CliResult<ExactSpec> {
        let get = |flag, v: Option<&str>| parse_exact(flag, v.unwrap_or_default());
        Ok(match self.family {
            Family::Laguerre => ExactSpec::laguerre(get("alpha", self.alpha)?)?,
            Family::Gegenbauer => ExactSpec::gegenbauer(get("lambda", self.lambda)?)?,
            Family::Jacobi => {
                ExactSpec::jacobi(get("alpha", self.alpha)?, get("beta", self.beta)?, self.wrt)?
            }
        })
    }
}

fn float_params(spec: &FamilySpec) -> BTreeMap<String, Scalar> {
    spec.parameters()
        .into_iter()
        .map(|(k, v)| (k.to_string(), Scalar::Float(v)))
        .collect()
}

fn exact_params(spec: &ExactSpec) -> BTreeMap<String, Scalar> {
    spec.parameters()
        .into_iter()
        .map(|(k, v)| (k.to_string(), Scalar::exact(v)))
        .collect()
}

fn require_z(c: &Common) -> CliResult<&str> {
    c.z.as_deref()
        .ok_or_else(|| UsageError("this command requires --z".into()))
}

fn cmd_eval(c: &Common, sequence: bool, out: &mut dyn Write) -> CliResult<()> {
    let raw = RawParams::new(c, false)?;
    let z_text = require_z(c)?;
    let degrees: Vec<usize> = if sequence {
        (0..=c.n).collect()
    } else {
        vec![c.n]
    };
    let reports: Vec<EvalReport> = if c.exact {
        let spec = raw.exact()?;
        let z = parse_exact("z", z_text)?;
        degrees
            .iter()
            .map(|&k| EvalReport {
                family: spec.family(),
                parameters: exact_params(&spec),
                n: k,
                z: Some(Scalar::exact(&z)),
                result: Some(Scalar::exact(&exact::exact_poly(&spec, k).eval(&z))),
                engine: Engine::Exact,
                checks_passed: None,
            })
            .collect()
    } else {
        let spec = raw.float()?;
        let z = finite_z(parse_float("z", z_text)?)?;
        let values = ortho::eval_sequence(&spec, c.n, z);
        degrees
            .iter()
            .map(|&k| EvalReport {
                family: spec.family(),
                parameters: float_params(&spec),
                n: k,
                z: Some(Scalar::Float(z)),
                result: Some(Scalar::Float(values[k])),
                engine: Engine::Float,
                checks_passed: None,
            })
            .collect()
    };
    write_reports(&reports, c.format, out)
}

fn finite_z(z: f64) -> CliResult<f64> {
    if z.is_finite() {
        Ok(z)
    } else {
        Err(UsageError(format!("--z must be finite, got {z}")))
    }
}

fn cmd_dparam(c: &Common, out: &mut dyn Write) -> CliResult<()> {
    let raw = RawParams::new(c, true)?;
    let z_text = require_z(c)?;
    let report = if c.exact {
        let spec = raw.exact()?;
        let z = parse_exact("z", z_text)?;
        EvalReport {
            family: spec.family(),
            parameters: exact_params(&spec),
            n: c.n,
            z: Some(Scalar::exact(&z)),
            result: Some(Scalar::exact(
                &exact::exact_param_derivative(&spec, c.n).eval(&z),
            )),
            engine: Engine::Exact,
            checks_passed: None,
        }
    } else {
        let spec = raw.float()?;
        let z = finite_z(parse_float("z", z_text)?)?;
        EvalReport {
            family: spec.family(),
            parameters: float_params(&spec),
            n: c.n,
            z: Some(Scalar::Float(z)),
            result: Some(Scalar::Float(param_deriv::param_derivative_eval(
                &spec, c.n, z,
            )?)),
            engine: Engine::Float,
            checks_passed: None,
        }
    };
    write_reports(&[report], c.format, out)
}

fn cmd_dcoeffs(c: &Common, out: &mut dyn Write) -> CliResult<()> {
    let raw = RawParams::new(c, true)?;
    if c.z.is_some() {
        return Err(UsageError("dcoeffs does not take --z".into()));
    }
    let (family, parameters, coeffs, engine) = if c.exact {
        let spec = raw.exact()?;
        let row = exact::exact_coefficient_row(&spec, c.n);
        (
            spec.family(),
            exact_params(&spec),
            row.iter().map(Scalar::exact).collect::<Vec<_>>(),
            Engine::Exact,
        )
    } else {
        let spec = raw.float()?;
        let row = param_deriv::coefficients(&spec, c.n)?;
        (
            spec.family(),
            float_params(&spec),
            row.coeffs.into_iter().map(Scalar::Float).collect(),
            Engine::Float,
        )
    };
    let records: Vec<CoefficientRecord> = coeffs
        .into_iter()
        .enumerate()
        .map(|(k, coefficient)| CoefficientRecord {
            family,
            parameters: parameters.clone(),
            wrt: raw.wrt,
            n: c.n,
            k,
            coefficient,
            engine,
        })
        .collect();
    match c.format {
        Format::Table => {
            let mut rows = vec![vec!["k".to_string(), "a_nk".to_string()]];
            rows.extend(
                records
                    .iter()
                    .map(|r| vec![r.k.to_string(), r.coefficient.to_string()]),
            );
            write_table(&rows, out)
        }
        Format::Json => write_json_lines(&records, out),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record([
                "family",
                "parameters",
                "wrt",
                "n",
                "k",
                "coefficient",
                "engine",
            ])?;
            for r in &records {
                let params: Vec<String> = r
                    .parameters
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect();
                w.write_record([
                    r.family.name().to_string(),
                    params.join(";"),
                    r.wrt.name().to_string(),
                    r.n.to_string(),
                    r.k.to_string(),
                    r.coefficient.to_string(),
                    r.engine.name().to_string(),
                ])?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

fn run_suites(max_n: usize, mode: Mode, exec: Execution) -> Vec<(Engine, SuiteReport)> {
    let mut reports = Vec::new();
    if mode != Mode::Float {
        reports.push((Engine::Exact, suite::exact_suite(max_n, exec)));
    }
    if mode != Mode::Exact {
        reports.extend(
            suite::float_suites(max_n, exec)
                .into_iter()
                .map(|r| (Engine::Float, r)),
        );
    }
    reports
}

/// `EXIT_OK` when every suite passed, otherwise `EXIT_VERIFY_FAILED`.
pub fn verify_exit_code<'a>(reports: impl IntoIterator<Item = &'a SuiteReport>) -> i32 {
    if reports.into_iter().all(SuiteReport::passed) {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    }
}

fn cmd_verify(
    max_n: usize,
    mode: Mode,
    jobs: Option<usize>,
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult<i32> {
    let suites = match jobs {
        Some(0) => return Err(UsageError("--jobs must be at least 1".into())),
        Some(1) => run_suites(max_n, mode, Execution::Sequential),
        #[cfg(feature = "parallel")]
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| UsageError(e.to_string()))?
            .install(|| run_suites(max_n, mode, Execution::Parallel)),
        #[cfg(not(feature = "parallel"))]
        Some(_) => run_suites(max_n, mode, Execution::Sequential),
        None => run_suites(max_n, mode, Execution::default()),
    };
    let passed = verify_exit_code(suites.iter().map(|(_, s)| s)) == EXIT_OK;
    let first_failure = suites.iter().find_map(|(_, s)| s.first_failure.clone());

    if format == Format::Table {
        let mut rows = vec![["suite", "family", "passed", "failed"]
            .map(String::from)
            .to_vec()];
        for (_, s) in &suites {
            for t in &s.tallies {
                if t.passed + t.failed > 0 {
                    rows.push(vec![
                        s.name.to_string(),
                        t.family.name().to_string(),
                        t.passed.to_string(),
                        t.failed.to_string(),
                    ]);
                }
            }
        }
        write_table(&rows, out)?;
        let total: usize = suites.iter().map(|(_, s)| s.checks()).sum();
        if passed {
            writeln!(out, "pass ({total} checks)")?;
        } else {
            writeln!(out, "FAIL")?;
        }
        if let Some(c) = &first_failure {
            writeln!(out, "first counterexample: {c}")?;
        }
    } else {
        let mut reports = Vec::new();
        for engine in [Engine::Exact, Engine::Float] {
            let of_engine: Vec<&SuiteReport> = suites
                .iter()
                .filter(|(e, _)| *e == engine)
                .map(|(_, s)| s)
                .collect();
            if of_engine.is_empty() {
                continue;
            }
            for family in Family::ALL {
                let count = of_engine
                    .iter()
                    .flat_map(|s| s.tallies.iter())
                    .filter(|t| t.family == family)
                    .map(|t| t.passed)
                    .sum();
                reports.push(EvalReport {
                    family,
                    parameters: BTreeMap::new(),
                    n: max_n,
                    z: None,
                    result: None,
                    engine,
                    checks_passed: Some(count),
                });
            }
        }
        write_reports(&reports, format, out)?;
        if let Some(c) = &first_failure {
            writeln!(err, "first counterexample: {c}")?;
        }
    }
    Ok(if passed { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn write_reports(reports: &[EvalReport], format: Format, out: &mut dyn Write) -> CliResult<()> {
    match format {
        Format::Table => {
            let mut rows = vec![REPORT_CSV_HEADER.map(String::from).to_vec()];
            for r in reports {
                let mut fields = r.csv_fields();
                fields[1] = fields[1].replace(';', ",");
                rows.push(fields);
            }
            write_table(&rows, out)
        }
        Format::Json => write_json_lines(reports, out),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(REPORT_CSV_HEADER)?;
            for r in reports {
                w.write_record(r.csv_fields())?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

fn write_json_lines<T: Serialize>(records: &[T], out: &mut dyn Write) -> CliResult<()> {
    for r in records {
        let line = serde_json::to_string(r).map_err(|e| UsageError(e.to_string()))?;
        writeln!(out, "{line}")?;
    }
    Ok(())
}

fn write_table(rows: &[Vec<String>], out: &mut dyn Write) -> CliResult<()> {
    let columns = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..columns)
        .map(|i| {
            rows.iter()
                .filter_map(|r| r.get(i))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    for row in rows {
        let mut line = String::new();
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            line.push_str(cell);
            line.extend(std::iter::repeat_n(' ', widths[i] - cell.chars().count()));
        }
        writeln!(out, "{}", line.trim_end())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_ok(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["orthoderiv"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    fn json_result(args: &[&str]) -> Scalar {
        let mut argv = args.to_vec();
        argv.extend(["--format", "json"]);
        let (code, out, err) = run_ok(&argv);
        assert_eq!(code, 0, "{err}");
        let report: EvalReport = serde_json::from_str(out.lines().next().unwrap()).unwrap();
        report.result.unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(
            json_result(&["eval", "--family", "laguerre", "--alpha", "0", "--n", "2", "--z", "0"]),
            Scalar::Float(1.0)
        );
        assert_eq!(
            json_result(&[
                "eval",
                "--family",
                "gegenbauer",
                "--lambda",
                "1",
                "--n",
                "0",
                "--z",
                "0.3"
            ]),
            Scalar::Float(1.0)
        );
        assert_eq!(
            json_result(&[
                "eval", "--family", "jacobi", "--alpha", "1", "--beta", "1", "--n", "2", "--z", "1"
            ]),
            Scalar::Float(3.0)
        );
    }

    #[test]
    fn dparam_examples() {
        assert_eq!(
            json_result(&[
                "dparam", "--family", "laguerre", "--alpha", "0.7", "--n", "1", "--z", "5"
            ]),
            Scalar::Float(1.0)
        );
        assert_eq!(
            json_result(&[
                "dparam",
                "--family",
                "gegenbauer",
                "--lambda",
                "2",
                "--n",
                "1",
                "--z",
                "0.25"
            ]),
            Scalar::Float(0.5)
        );
        let v = json_result(&[
            "dparam", "--family", "jacobi", "--alpha", "0", "--beta", "0", "--wrt", "alpha", "--n",
            "1", "--z", "0.4",
        ]);
        let Scalar::Float(v) = v else {
            panic!("float engine")
        };
        assert!((v - 0.7).abs() <= 1e-15);
    }

    #[test]
    fn exact_engine_prints_fractions() {
        let r = json_result(&[
            "dparam",
            "--family",
            "gegenbauer",
            "--lambda",
            "1/2",
            "--n",
            "2",
            "--z",
            "1/3",
            "--exact",
        ]);
        // d/dλ C_2^λ(z) = (4λ+2) z² − 1 at λ = 1/2, z = 1/3.
        assert_eq!(r, Scalar::Exact("-5/9".into()));
        let r = json_result(&[
            "eval", "--family", "laguerre", "--alpha", "-1/4", "--n", "1", "--z", "2", "--exact",
        ]);
        assert_eq!(r, Scalar::Exact("-5/4".into()));
    }

    #[test]
    fn table_is_aligned() {
        let (code, out, _) = run_ok(&["dcoeffs", "--family", "laguerre", "--n", "3", "--exact"]);
        assert_eq!(code, 0);
        assert_eq!(out, "k  a_nk\n0  1/3\n1  1/2\n2  1\n3  0\n");
    }

    #[test]
    fn usage_and_domain_errors_exit_two() {
        let (code, _, err) = run_ok(&[
            "eval",
            "--family",
            "gegenbauer",
            "--lambda",
            "0",
            "--n",
            "2",
            "--z",
            "0.1",
        ]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("lambda > -1/2 and lambda != 0"), "{err}");
        let (code, _, err) = run_ok(&[
            "dcoeffs", "--family", "jacobi", "--alpha", "0", "--beta", "0", "--n", "2",
        ]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--wrt"), "{err}");
        let (code, _, _) = run_ok(&["eval", "--family", "hermite", "--n", "2", "--z", "0"]);
        assert_eq!(code, EXIT_USAGE);
        let (code, _, err) = run_ok(&[
            "eval", "--family", "laguerre", "--alpha", "1e3", "--n", "1", "--z", "0", "--exact",
        ]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--alpha"), "{err}");
        let (code, _, _) = run_ok(&["verify", "--jobs", "0"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn csv_round_trip() {
        let report = EvalReport {
            family: Family::Jacobi,
            parameters: [
                ("alpha".to_string(), Scalar::Exact("-3/4".into())),
                ("beta".to_string(), Scalar::Exact("2".into())),
            ]
            .into_iter()
            .collect(),
            n: 4,
            z: Some(Scalar::Exact("1/7".into())),
            result: Some(Scalar::Exact("-11/3".into())),
            engine: Engine::Exact,
            checks_passed: None,
        };
        let fields = report.csv_fields();
        let refs: Vec<&str> = fields.iter().map(String::as_str).collect();
        assert_eq!(EvalReport::from_csv_fields(&refs).unwrap(), report);
    }
}
