//! Command-line front end for the hbar-limit convergence experiments.
//!
//! `parse_invocation` turns argv into validated experiment configurations,
//! `emit_report` writes one report as CSV or JSON, and `run_suite` runs a set
//! of kinds into a directory with a summary and an exit code.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use hbar_limit::limits::{
    kind_names, run_experiment, ConvergenceReport, ExperimentConfig, ExperimentKind, HbarSchedule, ParamType,
};

/// Exit codes of the binary.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_VERDICT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

pub const CSV_HEADER: [&str; 8] = ["experiment", "hbar", "dim", "metric", "value", "reference", "defect", "rate_flag"];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    /// Help or version text requested; not an error for the exit code.
    #[error("{0}")]
    Help(String),
    #[error(transparent)]
    Experiment(#[from] hbar_limit::Error),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("serialization failed: {0}")]
    Serialize(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Help(_) => EXIT_PASS,
            CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_RUNTIME,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    /// One experiment; output to `out` or stdout.
    Run { config: ExperimentConfig, out: Option<PathBuf> },
    List,
    Describe { kind: ExperimentKind },
    /// Every selected kind; one file each plus summary.csv under `out`.
    Suite { configs: Vec<ExperimentConfig>, out: PathBuf },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CliInvocation {
    pub command: Command,
    pub format: Format,
}

#[derive(Parser, Debug)]
#[command(name = "hbar-limit", version, about = "Convergence experiments for the classical limit hbar -> 0")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run one experiment kind and write its convergence table.
    Run {
        /// Experiment kind (see `list`).
        #[arg(long, short = 'e')]
        experiment: String,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// List the experiment kinds.
    List,
    /// Show the parameters of one kind with their defaults.
    Describe { kind: String },
    /// Run every kind at its defaults; exit 0 iff every verdict passes.
    Suite {
        /// Output directory.
        #[arg(long, default_value = "hbar-limit-suite")]
        out: PathBuf,
        /// Comma-separated subset of kinds.
        #[arg(long)]
        kinds: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Comma-separated decreasing hbar values, e.g. 1,0.5,0.25 or 1/64.
    #[arg(long)]
    hbar: Option<String>,
    /// Parameter override key=value; in `suite`, kind.key=value.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Seed for sampled modulus angles.
    #[arg(long)]
    seed: Option<u64>,
    /// Fixed Fock dimension instead of the policy.
    #[arg(long)]
    dim: Option<usize>,
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn split_override(s: &str) -> Result<(&str, &str), CliError> {
    s.split_once('=')
        .filter(|(k, _)| !k.trim().is_empty())
        .map(|(k, v)| (k.trim(), v.trim()))
        .ok_or_else(|| usage(format!("override `{s}` is not of the form key=value")))
}

fn build_config(kind: ExperimentKind, common: &Common, overrides: &[(&str, &str)]) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::new(kind);
    if let Some(h) = &common.hbar {
        let s: HbarSchedule = h.parse().map_err(|e| usage(format!("--hbar `{h}`: {e}")))?;
        cfg = cfg.with_schedule(s);
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    cfg.dim_override = common.dim;
    for (k, v) in overrides {
        cfg.set(k, v).map_err(usage)?;
    }
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn parse_kind(s: &str) -> Result<ExperimentKind, CliError> {
    s.trim().parse().map_err(usage)
}

/// Parses argv (without the program name) into a validated invocation. Help
/// and version requests come back as `CliError::Help` carrying clap's text.
pub fn parse_invocation<I, S>(argv: I) -> Result<CliInvocation, CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = std::iter::once(std::ffi::OsString::from("hbar-limit")).chain(argv.into_iter().map(Into::into));
    let cli = Cli::try_parse_from(args).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => CliError::Help(e.render().to_string()),
        _ => CliError::Usage(e.render().to_string()),
    })?;
    match cli.command {
        Cmd::Run { experiment, out, common } => {
            let kind = parse_kind(&experiment)?;
            let ov = common.overrides.iter().map(|s| split_override(s)).collect::<Result<Vec<_>, _>>()?;
            let config = build_config(kind, &common, &ov)?;
            Ok(CliInvocation { command: Command::Run { config, out }, format: common.format })
        }
        Cmd::List => Ok(CliInvocation { command: Command::List, format: Format::Csv }),
        Cmd::Describe { kind } => Ok(CliInvocation { command: Command::Describe { kind: parse_kind(&kind)? }, format: Format::Csv }),
        Cmd::Suite { out, kinds, common } => {
            let kinds: Vec<ExperimentKind> = match &kinds {
                Some(list) => list.split(',').filter(|s| !s.trim().is_empty()).map(parse_kind).collect::<Result<_, _>>()?,
                None => ExperimentKind::ALL.to_vec(),
            };
            if kinds.is_empty() {
                return Err(usage(format!("--kinds selects nothing; valid kinds: {}", kind_names())));
            }
            let mut per_kind: Vec<Vec<(&str, &str)>> = vec![Vec::new(); kinds.len()];
            for s in &common.overrides {
                let (k, v) = split_override(s)?;
                let (kind, key) = k
                    .split_once('.')
                    .ok_or_else(|| usage(format!("suite override `{s}` must be kind.key=value")))?;
                let kind = parse_kind(kind)?;
                let slot = kinds
                    .iter()
                    .position(|&x| x == kind)
                    .ok_or_else(|| usage(format!("override `{s}` names a kind that is not selected")))?;
                per_kind[slot].push((key, v));
            }
            let configs = kinds
                .iter()
                .zip(&per_kind)
                .map(|(&k, ov)| build_config(k, &common, ov))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(CliInvocation { command: Command::Suite { configs, out }, format: common.format })
        }
    }
}

/// Shortest decimal with at most 12 significant digits; scientific notation
/// outside [1e-5, 1e12).
pub fn format_number(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "NaN".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim(&format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim(mant))
    }
}

pub fn render_csv(report: &ConvergenceReport) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let ser = |e: csv::Error| CliError::Serialize(e.to_string());
    w.write_record(CSV_HEADER).map_err(ser)?;
    let kind = report.kind.name();
    for r in &report.rows {
        let reference = r.reference.map(format_number).unwrap_or_default();
        w.write_record([
            kind,
            &format_number(r.hbar),
            &r.dim.to_string(),
            &r.metric,
            &format_number(r.value),
            &reference,
            &format_number(r.defect),
            if r.rate_flag { "true" } else { "false" },
        ])
        .map_err(ser)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Serialize(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Serialize(e.to_string()))
}

pub fn render_json(report: &ConvergenceReport) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(report).map_err(|e| CliError::Serialize(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn render(report: &ConvergenceReport, format: Format) -> Result<String, CliError> {
    match format {
        Format::Csv => render_csv(report),
        Format::Json => render_json(report),
    }
}

/// Writes to a temporary file next to `path` and renames it into place, so a
/// failed run leaves no partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(path))?;
    tmp.write_all(contents).map_err(io_err(path))?;
    tmp.as_file().sync_all().map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e.error })?;
    Ok(())
}

/// Writes the report to `path`, or to stdout when `path` is None.
pub fn emit_report(report: &ConvergenceReport, format: Format, path: Option<&Path>) -> Result<(), CliError> {
    let text = render(report, format)?;
    match path {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(io_err(Path::new("<stdout>"))),
    }
}

pub struct SuiteOutcome {
    pub reports: Vec<ConvergenceReport>,
    pub exit_code: i32,
    /// Kinds whose verdict failed, in run order.
    pub failing: Vec<ExperimentKind>,
}

pub const SUMMARY_HEADER: [&str; 6] = ["experiment", "polarity", "verdict", "primary_metric", "rate", "failed_checks"];

fn render_summary(reports: &[ConvergenceReport]) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let ser = |e: csv::Error| CliError::Serialize(e.to_string());
    w.write_record(SUMMARY_HEADER).map_err(ser)?;
    for r in reports {
        let failed: Vec<&str> = r.verdict.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        w.write_record([
            r.kind.name(),
            &format!("{:?}", r.verdict.polarity).to_lowercase(),
            if r.verdict.passed { "pass" } else { "fail" },
            &r.primary_metric,
            &r.rate.map(format_number).unwrap_or_default(),
            &failed.join(";"),
        ])
        .map_err(ser)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Serialize(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Serialize(e.to_string()))
}

/// Runs every config in order, writing `<kind>.<ext>` per kind and
/// `summary.csv` into `out`. Exit code 0 iff every verdict passed.
pub fn run_suite(configs: &[ExperimentConfig], out: &Path, format: Format) -> Result<SuiteOutcome, CliError> {
    std::fs::create_dir_all(out).map_err(io_err(out))?;
    let mut reports = Vec::with_capacity(configs.len());
    for cfg in configs {
        let report = run_experiment(cfg)?;
        let path = out.join(format!("{}.{}", cfg.kind.name(), format.extension()));
        emit_report(&report, format, Some(&path))?;
        reports.push(report);
    }
    write_atomic(&out.join("summary.csv"), render_summary(&reports)?.as_bytes())?;
    let failing: Vec<ExperimentKind> = reports.iter().filter(|r| !r.verdict.passed).map(|r| r.kind).collect();
    let exit_code = if failing.is_empty() { EXIT_PASS } else { EXIT_VERDICT_FAILED };
    Ok(SuiteOutcome { reports, exit_code, failing })
}

fn type_name(ty: ParamType) -> String {
    match ty {
        ParamType::Number => "number".into(),
        ParamType::Positive => "positive number".into(),
        ParamType::Count => "count".into(),
        ParamType::OddCount => "odd count >= 33".into(),
        ParamType::Counts => "counts".into(),
        ParamType::Numbers => "numbers".into(),
        ParamType::Point => "point x:p".into(),
        ParamType::Points => "points x:p,...".into(),
        ParamType::Complex => "complex re:im".into(),
        ParamType::Atoms => "atoms w@x:p,...".into(),
        ParamType::Choices(c) => format!("subset of {}", c.join("|")),
    }
}

pub fn list_text() -> String {
    let mut s = String::new();
    for k in ExperimentKind::ALL {
        let tag = if k.polarity() == hbar_limit::limits::Polarity::Negative { " (counterexample)" } else { "" };
        let _ = writeln!(s, "{:<28}{}{tag}", k.name(), k.description());
    }
    s
}

pub fn describe_text(kind: ExperimentKind) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}: {}", kind.name(), kind.description());
    let sched: Vec<String> = kind.default_schedule().values().iter().map(|v| format_number(*v)).collect();
    let _ = writeln!(s, "default hbar schedule: {}", sched.join(","));
    for p in kind.params() {
        let _ = writeln!(s, "  {:<20} {:<22} default {:<28} {}", p.key, type_name(p.ty), p.default, p.help);
    }
    s
}

/// Executes an invocation and returns the process exit code.
pub fn execute(inv: &CliInvocation) -> Result<i32, CliError> {
    match &inv.command {
        Command::List => {
            print!("{}", list_text());
            Ok(EXIT_PASS)
        }
        Command::Describe { kind } => {
            print!("{}", describe_text(*kind));
            Ok(EXIT_PASS)
        }
        Command::Run { config, out } => {
            let report = run_experiment(config)?;
            emit_report(&report, inv.format, out.as_deref())?;
            for c in report.verdict.checks.iter().filter(|c| !c.passed) {
                eprintln!("FAIL {}: {} ({})", report.kind, c.name, c.detail);
            }
            Ok(if report.verdict.passed { EXIT_PASS } else { EXIT_VERDICT_FAILED })
        }
        Command::Suite { configs, out } => {
            let outcome = run_suite(configs, out, inv.format)?;
            for r in &outcome.reports {
                eprintln!("{:<28}{}", r.kind.name(), if r.verdict.passed { "pass" } else { "FAIL" });
                for c in r.verdict.checks.iter().filter(|c| !c.passed) {
                    eprintln!("    {}: {}", c.name, c.detail);
                }
            }
            if !outcome.failing.is_empty() {
                let names: Vec<&str> = outcome.failing.iter().map(|k| k.name()).collect();
                eprintln!("failing kinds: {}", names.join(", "));
            }
            Ok(outcome.exit_code)
        }
    }
}
