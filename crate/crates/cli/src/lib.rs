//! The `lg` command-line driver.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use lambda_g::analyze::{
    check_subformula_property, check_subject_reduction, normal_report, parallel_form_report,
    AnalysisReport, NORMAL, PARALLEL, SUBFORMULA, SUBJECT_REDUCTION,
};
use lambda_g::frontend::{parse_program, parse_term, pretty, print_program, Program};
use lambda_g::kernel::{alpha_eq, free_vars, Path, Term};
use lambda_g::rewrite::{ReductionStep, RuleTag};
use lambda_g::strategy::{
    normalize_into, normalize_master, NormError, StrategyConfig, TraceSink, DEFAULT_MAX_STEPS,
};
use lambda_g::typing::TypeEnv;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_TYPE: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;
pub const EXIT_CHECK: i32 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TraceFormat {
    None,
    Text,
    Jsonl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Check {
    Subformula,
    Parallel,
    Normal,
    SubjectReduction,
}

#[derive(Debug, Parser)]
#[command(
    name = "lg",
    version,
    about = "Type check, normalize and analyze parallel lambda terms"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct EngineArgs {
    /// Give up after this many reduction steps.
    #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
    pub max_steps: usize,
    /// Normalize independent branches concurrently.
    #[arg(long)]
    pub parallel: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the type of the main term.
    Check { file: PathBuf },
    /// Print the normal form of the main term.
    Normalize {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = TraceFormat::None)]
        trace: TraceFormat,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Normalize, then run metatheory checks on the result.
    Analyze {
        file: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Check::Subformula, Check::Parallel, Check::Normal, Check::SubjectReduction])]
        checks: Vec<Check>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Rewrite the file in canonical layout.
    Fmt { file: PathBuf },
}

/// Everything a run depends on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliConfig {
    pub command: CommandKind,
    pub file: PathBuf,
    pub max_steps: usize,
    pub parallel: bool,
    pub trace: TraceFormat,
    pub checks: Vec<Check>,
    pub format: ReportFormat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Check,
    Normalize,
    Analyze,
    Fmt,
}

impl From<Cli> for CliConfig {
    fn from(cli: Cli) -> Self {
        let base = |command, file| CliConfig {
            command,
            file,
            max_steps: DEFAULT_MAX_STEPS,
            parallel: false,
            trace: TraceFormat::None,
            checks: Vec::new(),
            format: ReportFormat::Text,
        };
        match cli.command {
            Command::Check { file } => base(CommandKind::Check, file),
            Command::Fmt { file } => base(CommandKind::Fmt, file),
            Command::Normalize {
                file,
                trace,
                engine,
            } => CliConfig {
                max_steps: engine.max_steps,
                parallel: engine.parallel,
                trace,
                ..base(CommandKind::Normalize, file)
            },
            Command::Analyze {
                file,
                checks,
                format,
                engine,
            } => CliConfig {
                max_steps: engine.max_steps,
                parallel: engine.parallel,
                checks,
                format,
                ..base(CommandKind::Analyze, file)
            },
        }
    }
}

/// One line of a `jsonl` trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: usize,
    pub rule: String,
    pub path: Path,
    pub term: String,
}

impl TraceRecord {
    pub fn new(step: usize, s: &ReductionStep) -> Self {
        TraceRecord {
            step,
            rule: s.rule.to_string(),
            path: s.path.clone(),
            term: pretty(&s.after),
        }
    }
}

struct StreamSink<'w> {
    out: &'w mut dyn Write,
    format: TraceFormat,
    count: usize,
}

impl TraceSink for StreamSink<'_> {
    fn record(&mut self, step: ReductionStep) {
        self.count += 1;
        let _ = match self.format {
            TraceFormat::None => Ok(()),
            TraceFormat::Text => writeln!(
                self.out,
                "{:>6} {:<14} {:?}  {}",
                self.count, step.rule, step.path, step.after
            ),
            TraceFormat::Jsonl => {
                let rec = TraceRecord::new(self.count, &step);
                writeln!(
                    self.out,
                    "{}",
                    serde_json::to_string(&rec).expect("records serialize")
                )
            }
        };
    }
}

fn load(cfg: &CliConfig, err: &mut dyn Write) -> Result<(String, Program), i32> {
    let src = fs::read_to_string(&cfg.file).map_err(|e| {
        let _ = writeln!(err, "error: cannot read {}: {e}", cfg.file.display());
        EXIT_PARSE
    })?;
    let program = parse_program(&src).map_err(|e| {
        let _ = writeln!(err, "{}:{e}", cfg.file.display());
        EXIT_PARSE
    })?;
    Ok((src, program))
}

fn typecheck(program: &Program, cfg: &CliConfig, err: &mut dyn Write) -> Result<(), i32> {
    program.check().map(|_| ()).map_err(|e| {
        let _ = writeln!(err, "{}: type error: {e}", cfg.file.display());
        EXIT_TYPE
    })
}

fn norm_failure(e: NormError, err: &mut dyn Write) -> i32 {
    let _ = writeln!(err, "error: {e}");
    match e {
        NormError::BudgetExceeded { .. } => EXIT_BUDGET,
        NormError::Type(_) => EXIT_TYPE,
        _ => EXIT_CHECK,
    }
}

/// Execute one command. Output goes to `out`, diagnostics to `err`; returns the exit code.
pub fn run(cfg: &CliConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (_, program) = match load(cfg, err) {
        Ok(p) => p,
        Err(code) => return code,
    };
    if cfg.command == CommandKind::Fmt {
        return match fs::write(&cfg.file, print_program(&program)) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(err, "error: cannot write {}: {e}", cfg.file.display());
                EXIT_PARSE
            }
        };
    }
    if let Err(code) = typecheck(&program, cfg, err) {
        return code;
    }
    let strategy = StrategyConfig {
        max_steps: cfg.max_steps,
        parallel: cfg.parallel,
    };
    match cfg.command {
        CommandKind::Check => {
            let ty = program.check().expect("checked above");
            let _ = writeln!(out, "{ty}");
            EXIT_OK
        }
        CommandKind::Normalize => {
            let mut sink = StreamSink {
                out,
                format: cfg.trace,
                count: 0,
            };
            match normalize_into(&program.main, &program.engine(), strategy, &mut sink) {
                Ok((nf, _)) => {
                    let _ = writeln!(sink.out, "{nf}");
                    EXIT_OK
                }
                Err(e) => norm_failure(e, err),
            }
        }
        CommandKind::Analyze => {
            let engine = program.engine();
            let normalized = match normalize_master(&program.main, &engine, strategy) {
                Ok(n) => n,
                Err(e) => return norm_failure(e, err),
            };
            match analysis(&program, &normalized.term, &normalized.trace, &cfg.checks) {
                Ok(report) => {
                    let _ = match cfg.format {
                        ReportFormat::Text => write!(out, "{report}"),
                        ReportFormat::Json => writeln!(out, "{}", report_json(&report)),
                    };
                    if report.passed() {
                        EXIT_OK
                    } else {
                        EXIT_CHECK
                    }
                }
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    EXIT_CHECK
                }
            }
        }
        CommandKind::Fmt => unreachable!(),
    }
}

/// Run the selected checks on a normal form and the trace that produced it.
pub fn analysis(
    program: &Program,
    nf: &Term,
    trace: &[ReductionStep],
    checks: &[Check],
) -> Result<AnalysisReport, lambda_g::analyze::AnalysisError> {
    let mut report = AnalysisReport::new(nf.clone());
    let mut checks = checks.to_vec();
    checks.sort();
    checks.dedup();
    for c in checks {
        let part = match c {
            Check::Subformula => {
                let env = TypeEnv::from(free_vars(nf).map_err(lambda_g::typing::TypeError::from)?);
                check_subformula_property(nf, &env)?
            }
            Check::Parallel => parallel_form_report(nf),
            Check::Normal => normal_report(nf, &program.engine()),
            Check::SubjectReduction => {
                check_subject_reduction(trace, &program.env(), &program.engine())?
            }
        };
        report.extend(part);
    }
    Ok(report)
}

#[derive(Serialize)]
struct CheckJson<'a> {
    name: &'a str,
    passed: bool,
    path: Option<&'a Path>,
    detail: &'a str,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    subject: String,
    passed: bool,
    checks: Vec<CheckJson<'a>>,
}

pub fn report_json(report: &AnalysisReport) -> String {
    let json = ReportJson {
        subject: pretty(&report.subject),
        passed: report.passed(),
        checks: report
            .checks
            .iter()
            .map(|c| CheckJson {
                name: &c.name,
                passed: c.passed,
                path: c.witness.as_ref(),
                detail: &c.detail,
            })
            .collect(),
    };
    serde_json::to_string(&json).expect("reports serialize")
}

/// Check names as accepted by `--checks`.
pub fn check_name(c: Check) -> &'static str {
    match c {
        Check::Subformula => SUBFORMULA,
        Check::Parallel => PARALLEL,
        Check::Normal => NORMAL,
        Check::SubjectReduction => SUBJECT_REDUCTION,
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ReplayError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("step {step}: {message}")]
    Diverged { step: usize, message: String },
}

/// Re-apply the steps of a `jsonl` trace to the program's main term, checking every
/// recorded term. Lines that are not JSON objects are ignored. Returns the final term.
pub fn replay_jsonl(program: &Program, trace: &str) -> Result<Term, ReplayError> {
    let engine = program.engine();
    engine.avoid_names_in(&program.main);
    let mut t = program.main.clone();
    let mut expected_step = 1;
    for (i, line) in trace.lines().enumerate() {
        if !line.trim_start().starts_with('{') {
            continue;
        }
        let rec: TraceRecord = serde_json::from_str(line).map_err(|e| ReplayError::Malformed {
            line: i + 1,
            message: e.to_string(),
        })?;
        let diverged = |message: String| ReplayError::Diverged {
            step: rec.step,
            message,
        };
        if rec.step != expected_step {
            return Err(diverged(format!("expected step {expected_step}")));
        }
        let rule: RuleTag = rec
            .rule
            .parse()
            .map_err(|e: lambda_g::rewrite::UnknownRule| diverged(e.to_string()))?;
        t = engine
            .apply(&t, &rec.path, rule)
            .map_err(|e| diverged(e.to_string()))?;
        if pretty(&t) != rec.term {
            let recorded = parse_term(&rec.term, program).map_err(|e| diverged(e.to_string()))?;
            if !alpha_eq(&recorded, &t) {
                return Err(diverged(
                    "replayed term differs from the recorded one".into(),
                ));
            }
        }
        expected_step += 1;
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(args: &[&str]) -> CliConfig {
        CliConfig::from(Cli::try_parse_from(args).unwrap())
    }

    #[test]
    fn analyze_defaults_to_every_check() {
        let cfg = config(&["lg", "analyze", "x.lg"]);
        assert_eq!(cfg.command, CommandKind::Analyze);
        assert_eq!(cfg.checks.len(), 4);
        assert_eq!(cfg.max_steps, DEFAULT_MAX_STEPS);
        assert_eq!(cfg.format, ReportFormat::Text);
    }

    #[test]
    fn flags_are_carried_over() {
        let cfg = config(&[
            "lg",
            "normalize",
            "--trace",
            "jsonl",
            "--max-steps",
            "7",
            "--parallel",
            "x.lg",
        ]);
        assert_eq!(cfg.trace, TraceFormat::Jsonl);
        assert_eq!(cfg.max_steps, 7);
        assert!(cfg.parallel);
        let cfg = config(&[
            "lg",
            "analyze",
            "--checks",
            "normal,subject-reduction",
            "x.lg",
        ]);
        assert_eq!(cfg.checks, vec![Check::Normal, Check::SubjectReduction]);
    }

    #[test]
    fn unknown_values_are_rejected() {
        assert!(Cli::try_parse_from(["lg", "analyze", "--checks", "bogus", "x.lg"]).is_err());
        assert!(Cli::try_parse_from(["lg", "normalize", "--trace", "xml", "x.lg"]).is_err());
    }

    #[test]
    fn replay_rejects_misnumbered_steps() {
        let program = parse_program("const t : Bool; main = (\\x:Bool. x) t;").unwrap();
        let bad = r#"{"step":2,"rule":"Beta","path":[],"term":"t"}"#;
        assert!(matches!(
            replay_jsonl(&program, bad),
            Err(ReplayError::Malformed { .. } | ReplayError::Diverged { .. })
        ));
        let good = r#"{"step":1,"rule":"Beta","path":[],"term":"t"}"#;
        assert_eq!(pretty(&replay_jsonl(&program, good).unwrap()), "t");
    }
}
