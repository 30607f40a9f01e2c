use std::io::Write;
use std::process::{Command, Stdio};

use thiserror::Error;

use crate::ast::{IntVarName, PropAtomName};
use crate::emitter::parse_legend;
use crate::semantics::{surrogate_name, ExtValue, Valuation, Variable};

/// Environment variable naming a clingcon-compatible executable.
pub const SOLVER_ENV: &str = "FLINGO_CLINGCON";

#[derive(Debug, Error)]
pub enum ExternalError {
    #[error("solver exited with {status}: {stderr}")]
    SolverCrash { status: String, stderr: String },
    #[error("cannot run solver: {0}")]
    Io(#[from] std::io::Error),
    #[error("unreadable solver output: {0}")]
    Output(String),
}

/// Runs the configured solver on an emitted program and returns all models,
/// with surrogate names mapped back to the atoms of the legend. `Ok(None)`
/// when no solver is configured.
pub fn run_external_solver(
    text: &str,
    min_int: i64,
    max_int: i64,
) -> Result<Option<Vec<Valuation>>, ExternalError> {
    let Some(exe) = std::env::var_os(SOLVER_ENV).filter(|s| !s.is_empty()) else {
        return Ok(None);
    };
    let mut child = Command::new(exe)
        .arg(format!("--min-int={min_int}"))
        .arg(format!("--max-int={max_int}"))
        .arg("0")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()?;
    child
        .stdin
        .take()
        .expect("piped stdin")
        .write_all(text.as_bytes())?;
    let out = child.wait_with_output()?;
    // clingo-style exit codes: 10 satisfiable, 20 unsatisfiable, 30 exhausted
    if !matches!(out.status.code(), Some(0 | 10 | 20 | 30)) {
        return Err(ExternalError::SolverCrash {
            status: out.status.to_string(),
            stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
        });
    }
    let stdout = String::from_utf8_lossy(&out.stdout);
    parse_models(&stdout, text).map(Some)
}

fn parse_models(stdout: &str, program: &str) -> Result<Vec<Valuation>, ExternalError> {
    let legend = parse_legend(program);
    let mut models: Vec<Valuation> = Vec::new();
    let mut lines = stdout.lines().peekable();
    while let Some(line) = lines.next() {
        if !line.starts_with("Answer:") {
            continue;
        }
        let mut m = Valuation::new();
        let atoms = lines.next().unwrap_or("");
        let mut tokens: Vec<&str> = atoms.split_whitespace().collect();
        if lines.peek().is_some_and(|l| l.trim() == "Assignment:") {
            lines.next();
            tokens.extend(lines.next().unwrap_or("").split_whitespace());
        }
        for tok in tokens {
            match tok.split_once('=') {
                Some((name, value)) => {
                    let x = IntVarName::new_internal(name)
                        .map_err(|e| ExternalError::Output(e.to_string()))?;
                    let n: i64 = value
                        .parse()
                        .map_err(|_| ExternalError::Output(tok.to_string()))?;
                    m.set(Variable::Int(x), ExtValue::Int(n));
                }
                None => {
                    let q = PropAtomName::new_internal(tok)
                        .map_err(|e| ExternalError::Output(e.to_string()))?;
                    let q = legend.get(&q).map_or(q, surrogate_name);
                    m.set(Variable::Prop(q), ExtValue::True);
                }
            }
        }
        models.push(m);
    }
    models.sort();
    models.dedup();
    Ok(models)
}
