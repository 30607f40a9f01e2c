use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use flingo_core::ast::{signature_of, Program, Signature};
use flingo_core::difftest::{
    diff_check_with, fuzz, project_model, run_external_solver, DiffOptions, DiffReport, Features,
    GenParams, Verdict, SOLVER_ENV,
};
use flingo_core::emitter::{emit_models, EmitOptions, JsonModel, ModelFormat, SurrogateStyle};
use flingo_core::parser::{bounds_directive, parse_program, render_program};
use flingo_core::rewriter::PipelineOptions;
use flingo_core::semantics::{EngineError, EngineOptions, DEFAULT_BUDGET};
use flingo_core::{compile, solve, Error};

const EXIT_FAILURE: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_INTERNAL: u8 = 3;
const EXIT_UNSAT: u8 = 20;

#[derive(Parser, Debug)]
#[command(
    name = "flingo",
    version,
    about = "Translate flingo programs to clingcon and check the translation",
    after_help = "Exit codes: 0 success, 1 usage/parse error or mismatch, 2 search budget exceeded, \
                  3 internal error, 20 no stable model (solve).\n\
                  The default integer bounds [-8, 8] are far smaller than clingcon's own \
                  (-2^30+1 to 2^30-1) because the reference solver enumerates exhaustively. \
                  A `% bounds: <min> <max>` comment in the input overrides them."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Smallest integer value
    #[arg(long, global = true, allow_negative_numbers = true)]
    min_int: Option<i64>,
    /// Largest integer value
    #[arg(long, global = true, allow_negative_numbers = true)]
    max_int: Option<i64>,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Limit on the estimated search space of the reference solver
    #[arg(long, global = true)]
    budget: Option<f64>,
    /// Print the program after every translation step
    #[arg(long, global = true)]
    trace: bool,
    /// Leave out the definedness step (negative control for the checker)
    #[arg(long, global = true, hide = true)]
    skip_step7: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Translate a program into clingcon input
    Translate {
        file: Option<PathBuf>,
        /// Name surrogate atoms after their content
        #[arg(long)]
        readable: bool,
    },
    /// Enumerate stable models with the reference solver
    Solve {
        file: Option<PathBuf>,
        /// Stop after N models (0 = all)
        #[arg(long, default_value_t = 0)]
        models: usize,
    },
    /// Compare a program's models with those of its translation
    Check {
        files: Vec<PathBuf>,
        /// Also run the solver named by FLINGO_CLINGCON on the translation
        #[arg(long)]
        external: bool,
    },
    /// Check randomly generated programs
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        count: usize,
        /// Constructs to leave out of generated programs
        #[arg(long, value_enum, value_delimiter = ',')]
        without: Vec<Feature>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Feature {
    Sum,
    Sus,
    Min,
    Max,
    Df,
    In,
    Assign,
    Cond,
    Neg,
    Choice,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Engine(EngineError::BudgetExceeded { .. }) => EXIT_BUDGET,
            Error::Emit(_) => EXIT_INTERNAL,
            _ => EXIT_FAILURE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: EXIT_FAILURE,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn read_input(file: Option<&PathBuf>) -> io::Result<String> {
    match file {
        Some(path) => std::fs::read_to_string(path),
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

impl Cli {
    /// Bounds from the flags, then the input's `% bounds:` comment, then the
    /// given defaults.
    fn bounds(&self, text: &str, default: (i64, i64)) -> Result<Signature, Failure> {
        let (lo, hi) = bounds_directive(text).unwrap_or(default);
        let sig = Signature::new(self.min_int.unwrap_or(lo), self.max_int.unwrap_or(hi))
            .map_err(Error::from)?;
        Ok(sig)
    }

    fn engine(&self, models: usize) -> EngineOptions {
        EngineOptions {
            budget: Some(self.budget.unwrap_or(DEFAULT_BUDGET)),
            max_models: models,
            ..Default::default()
        }
    }

    fn diff_options(&self) -> DiffOptions {
        DiffOptions {
            pipeline: PipelineOptions {
                skip_step7: self.skip_step7,
            },
            source: self.engine(0),
            ..DiffOptions::default()
        }
    }

    fn model_format(&self) -> ModelFormat {
        match self.format {
            Format::Text => ModelFormat::Text,
            Format::Json => ModelFormat::Json,
        }
    }
}

#[derive(Serialize)]
struct JsonTranslation<'a> {
    program: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Vec<JsonStep>>,
}

#[derive(Serialize)]
struct JsonStep {
    step: String,
    program: String,
}

#[derive(Serialize)]
struct JsonReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    source: Option<String>,
    verdict: &'static str,
    expected: Vec<JsonModel>,
    actual: Vec<JsonModel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reproducer: Option<String>,
}

impl JsonReport {
    fn new(source: Option<String>, r: &DiffReport) -> Self {
        JsonReport {
            source,
            verdict: verdict_word(r.verdict),
            expected: r.expected.iter().map(JsonModel::from).collect(),
            actual: r.actual.iter().map(JsonModel::from).collect(),
            reproducer: r.reproducer.clone(),
        }
    }
}

fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Match => "match",
        Verdict::Mismatch => "mismatch",
        Verdict::BudgetSkip => "budget-skip",
    }
}

fn translate(cli: &Cli, file: Option<&PathBuf>, readable: bool, out: &mut impl Write) -> Outcome {
    let text = read_input(file)?;
    let sig = cli.bounds(&text, (-8, 8))?;
    let p = parse_program(&text).map_err(Error::from)?;
    let emit = EmitOptions {
        surrogate_style: if readable {
            SurrogateStyle::Readable
        } else {
            SurrogateStyle::Numbered
        },
        min_int: sig.min_int,
        max_int: sig.max_int,
        ..EmitOptions::default()
    };
    let (program, trace) = compile(
        &p,
        &sig,
        PipelineOptions {
            skip_step7: cli.skip_step7,
        },
        &emit,
    )?;
    match cli.format {
        Format::Text => {
            if cli.trace {
                write!(out, "{trace}")?;
                writeln!(out, "%% emitted")?;
            }
            write!(out, "{program}")?;
        }
        Format::Json => {
            let trace = cli.trace.then(|| {
                trace
                    .snapshots
                    .iter()
                    .map(|(step, p)| JsonStep {
                        step: step.clone(),
                        program: render_program(p),
                    })
                    .collect()
            });
            let json = serde_json::to_string(&JsonTranslation {
                program: &program,
                trace,
            })
            .expect("serializable");
            writeln!(out, "{json}")?;
        }
    }
    Ok(0)
}

fn solve_cmd(cli: &Cli, file: Option<&PathBuf>, models: usize, out: &mut impl Write) -> Outcome {
    let text = read_input(file)?;
    let sig = cli.bounds(&text, (-8, 8))?;
    let p = parse_program(&text).map_err(Error::from)?;
    let found = solve(&p, &sig, &cli.engine(models))?;
    write!(out, "{}", emit_models(&found, cli.model_format()))?;
    Ok(if found.is_empty() { EXIT_UNSAT } else { 0 })
}

fn check(cli: &Cli, files: &[PathBuf], external: bool, out: &mut impl Write) -> Outcome {
    let inputs: Vec<(Option<String>, String)> = if files.is_empty() {
        vec![(None, read_input(None)?)]
    } else {
        files
            .iter()
            .map(|f| Ok((Some(f.display().to_string()), read_input(Some(f))?)))
            .collect::<io::Result<_>>()?
    };
    let opts = cli.diff_options();
    let mut failed = false;
    let mut json = Vec::new();
    for (name, text) in &inputs {
        let sig = cli.bounds(text, (-8, 8))?;
        let p = parse_program(text).map_err(Error::from)?;
        let report = diff_check_with(&p, &sig, &opts).map_err(Error::from)?;
        failed |= report.is_mismatch();
        match cli.format {
            Format::Text => {
                if let Some(name) = name {
                    writeln!(out, "== {name}")?;
                }
                write!(out, "{report}")?;
                if cli.trace {
                    if let Some(trace) = &report.trace {
                        write!(out, "{trace}")?;
                    }
                }
            }
            Format::Json => json.push(JsonReport::new(name.clone(), &report)),
        }
        if external {
            failed |= !check_external(&p, &sig, &report, out)?;
        }
    }
    if cli.format == Format::Json {
        writeln!(
            out,
            "{}",
            serde_json::to_string(&json).expect("serializable")
        )?;
    }
    Ok(if failed { EXIT_FAILURE } else { 0 })
}

/// Runs the external solver on the translation and compares its projected
/// models with the reference reading. Diagnostics go to stderr.
fn check_external(
    p: &Program,
    sig: &Signature,
    report: &DiffReport,
    out: &mut impl Write,
) -> Result<bool, Failure> {
    let emit = EmitOptions {
        min_int: sig.min_int,
        max_int: sig.max_int,
        ..EmitOptions::default()
    };
    let (program, _) = compile(p, sig, PipelineOptions::default(), &emit)?;
    let models = run_external_solver(&program, sig.min_int, sig.max_int).map_err(|e| Failure {
        code: EXIT_FAILURE,
        message: e.to_string(),
    })?;
    let Some(models) = models else {
        eprintln!("flingo: {SOLVER_ENV} is not set; skipping the external solver");
        return Ok(true);
    };
    let source = sig
        .union(&signature_of(p, sig.min_int, sig.max_int).map_err(Error::from)?)
        .map_err(Error::from)?;
    let mut projected: Vec<_> = models.iter().map(|m| project_model(m, &source)).collect();
    projected.sort();
    projected.dedup();
    let agrees = projected == report.expected;
    let word = if agrees { "match" } else { "MISMATCH" };
    writeln!(out, "external: {word} ({} models)", projected.len())?;
    Ok(agrees)
}

fn fuzz_cmd(
    cli: &Cli,
    seed: u64,
    count: usize,
    without: &[Feature],
    out: &mut impl Write,
) -> Outcome {
    let mut features = Features::ALL;
    for f in without {
        match f {
            Feature::Sum => features.sum = false,
            Feature::Sus => features.sus = false,
            Feature::Min => features.min = false,
            Feature::Max => features.max = false,
            Feature::Df => features.df = false,
            Feature::In => features.in_choice = false,
            Feature::Assign => features.assign = false,
            Feature::Cond => features.conditional = false,
            Feature::Neg => features.negation = false,
            Feature::Choice => features.choice = false,
        }
    }
    let defaults = GenParams::default();
    let sig = cli.bounds("", (defaults.min_int, defaults.max_int))?;
    let params = GenParams {
        seed,
        min_int: sig.min_int,
        max_int: sig.max_int,
        features,
        ..defaults
    };
    let start = Instant::now();
    let reports = fuzz(&params, count, &cli.diff_options()).map_err(Error::from)?;
    let count_of = |v: Verdict| reports.iter().filter(|r| r.verdict == v).count();
    let mismatches = count_of(Verdict::Mismatch);
    match cli.format {
        Format::Text => {
            for (i, r) in reports.iter().enumerate().filter(|(_, r)| r.is_mismatch()) {
                writeln!(out, "== seed {}", seed.wrapping_add(i as u64))?;
                write!(out, "{r}")?;
                if cli.trace {
                    if let Some(trace) = &r.trace {
                        write!(out, "{trace}")?;
                    }
                }
            }
            writeln!(
                out,
                "fuzz: {count} programs, {} match, {mismatches} mismatch, {} budget-skip in {:.2}s",
                count_of(Verdict::Match),
                count_of(Verdict::BudgetSkip),
                start.elapsed().as_secs_f64()
            )?;
        }
        Format::Json => {
            let json: Vec<JsonReport> = reports
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    JsonReport::new(Some(format!("seed {}", seed.wrapping_add(i as u64))), r)
                })
                .collect();
            writeln!(
                out,
                "{}",
                serde_json::to_string(&json).expect("serializable")
            )?;
        }
    }
    Ok(if mismatches > 0 { EXIT_FAILURE } else { 0 })
}

fn run(cli: &Cli) -> Outcome {
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let code = match &cli.command {
        Command::Translate { file, readable } => translate(cli, file.as_ref(), *readable, &mut out),
        Command::Solve { file, models } => solve_cmd(cli, file.as_ref(), *models, &mut out),
        Command::Check { files, external } => check(cli, files, *external, &mut out),
        Command::Fuzz {
            seed,
            count,
            without,
        } => fuzz_cmd(cli, *seed, *count, without, &mut out),
    }?;
    out.flush()?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_FAILURE } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("flingo: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
