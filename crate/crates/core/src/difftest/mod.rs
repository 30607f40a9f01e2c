//! Differential testing of the rewriter: the stable models of a program read
//! directly in the logic are compared with the projected stable models of its
//! clingcon translation.

mod external;
mod gen;

use std::fmt;

use crate::ast::*;
use crate::parser::render_program;
use crate::rewriter::{
    def_atom, expand_abbreviations, translate_with, PipelineOptions, PipelineTrace, RewriteError,
};
use crate::semantics::{
    mu_translate, stable_models_with, tau_translate, EngineError, EngineOptions, TranslateError,
    Valuation, Variable,
};

pub use external::{run_external_solver, ExternalError, SOLVER_ENV};
pub use gen::{fuzz, random_program, Features, GenParams};

/// Keeps only the variables of `sig`: fresh symbols and `def(x)` atoms are
/// dropped, and an integer variable survives only if `def(x)` holds.
pub fn project_model(m: &Valuation, sig: &Signature) -> Valuation {
    let mut out = Valuation::new();
    for (var, val) in m.pairs() {
        match var {
            Variable::Prop(q) if sig.prop_vars.contains(q) => out.set(var.clone(), val),
            Variable::Int(x) if sig.int_vars.contains(x) && m.prop(&def_atom(x)) => {
                out.set(var.clone(), val)
            }
            _ => {}
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Match,
    Mismatch,
    BudgetSkip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffReport {
    pub program: String,
    pub expected: Vec<Valuation>,
    pub actual: Vec<Valuation>,
    pub verdict: Verdict,
    /// Pipeline snapshots of the (minimized) failing program.
    pub trace: Option<PipelineTrace>,
    /// Smallest rule subset found that still mismatches.
    pub reproducer: Option<String>,
}

impl DiffReport {
    pub fn is_mismatch(&self) -> bool {
        self.verdict == Verdict::Mismatch
    }
}

impl fmt::Display for DiffReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = match self.verdict {
            Verdict::Match => "match",
            Verdict::Mismatch => "MISMATCH",
            Verdict::BudgetSkip => "budget-skip",
        };
        writeln!(
            f,
            "verdict: {verdict} ({} expected, {} actual)",
            self.expected.len(),
            self.actual.len()
        )?;
        if self.verdict == Verdict::Mismatch {
            writeln!(f, "program:\n{}", self.program.trim_end())?;
            let show = |f: &mut fmt::Formatter<'_>, label: &str, ms: &[Valuation]| -> fmt::Result {
                writeln!(f, "{label}:")?;
                for m in ms {
                    writeln!(f, "  {{{}}}", crate::emitter::model_line(m))?;
                }
                Ok(())
            };
            show(f, "expected", &self.expected)?;
            show(f, "actual", &self.actual)?;
            if let Some(r) = &self.reproducer {
                writeln!(f, "reproducer:\n{}", r.trim_end())?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffOptions {
    pub pipeline: PipelineOptions,
    /// Engine settings for the direct reading of the source program.
    pub source: EngineOptions,
    /// Engine settings for the translated program, which has many more
    /// variables but is pruned far better.
    pub target: EngineOptions,
    /// Delta-debug mismatches down to a minimal rule subset.
    pub minimize: bool,
}

pub const DEFAULT_TARGET_BUDGET: f64 = 1e30;

impl Default for DiffOptions {
    fn default() -> Self {
        Self {
            pipeline: PipelineOptions::default(),
            source: EngineOptions::default(),
            target: EngineOptions {
                budget: Some(DEFAULT_TARGET_BUDGET),
                ..EngineOptions::default()
            },
            minimize: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiffError {
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Translate(#[from] TranslateError),
}

/// Expected models, projected actual models, and the pipeline trace.
type Sides = (Vec<Valuation>, Vec<Valuation>, PipelineTrace);

/// Both sides' model sets, or `None` when either exceeds its budget.
fn both_sides(
    p: &Program,
    sig: &Signature,
    opts: &DiffOptions,
) -> Result<Option<Sides>, DiffError> {
    let source_sig = sig
        .union(&signature_of(p, sig.min_int, sig.max_int).map_err(RewriteError::from)?)
        .map_err(RewriteError::from)?;
    let expanded = expand_abbreviations(p)?;
    let fl = mu_translate(&expanded, &source_sig)?;
    let (target, trace) = translate_with(p, &source_sig, opts.pipeline)?;
    let bounds = Signature::new(sig.min_int, sig.max_int).expect("bounds already validated");
    let cl = tau_translate(&target, &bounds)?;
    let expected = match stable_models_with(&fl, &opts.source) {
        Ok(ms) => ms,
        Err(EngineError::BudgetExceeded { .. }) => return Ok(None),
    };
    let actual = match stable_models_with(&cl, &opts.target) {
        Ok(ms) => ms,
        Err(EngineError::BudgetExceeded { .. }) => return Ok(None),
    };
    let mut actual: Vec<Valuation> = actual
        .iter()
        .map(|m| project_model(m, &source_sig))
        .collect();
    actual.sort();
    actual.dedup();
    Ok(Some((expected, actual, trace)))
}

pub fn diff_check(p: &Program, sig: &Signature) -> Result<DiffReport, DiffError> {
    diff_check_with(p, sig, &DiffOptions::default())
}

pub fn diff_check_with(
    p: &Program,
    sig: &Signature,
    opts: &DiffOptions,
) -> Result<DiffReport, DiffError> {
    let program = render_program(p);
    let Some((expected, actual, trace)) = both_sides(p, sig, opts)? else {
        return Ok(DiffReport {
            program,
            expected: vec![],
            actual: vec![],
            verdict: Verdict::BudgetSkip,
            trace: None,
            reproducer: None,
        });
    };
    if expected == actual {
        return Ok(DiffReport {
            program,
            expected,
            actual,
            verdict: Verdict::Match,
            trace: None,
            reproducer: None,
        });
    }
    let (reproducer, trace) = if opts.minimize {
        let small = minimize(p, sig, opts);
        let trace = translate_with(&small, sig, opts.pipeline)
            .map(|(_, t)| t)
            .unwrap_or(trace);
        (Some(render_program(&small)), trace)
    } else {
        (None, trace)
    };
    Ok(DiffReport {
        program,
        expected,
        actual,
        verdict: Verdict::Mismatch,
        trace: Some(trace),
        reproducer,
    })
}

fn mismatches(p: &Program, sig: &Signature, opts: &DiffOptions) -> bool {
    matches!(both_sides(p, sig, opts), Ok(Some((e, a, _))) if e != a)
}

/// Delta debugging over whole rules: repeatedly drops chunks of rules while
/// the mismatch persists.
pub fn minimize(p: &Program, sig: &Signature, opts: &DiffOptions) -> Program {
    let mut rules = p.rules.clone();
    let mut chunks = 2usize;
    while rules.len() >= 2 {
        let size = rules.len().div_ceil(chunks);
        let mut reduced = false;
        for start in (0..rules.len()).step_by(size) {
            let mut candidate = rules.clone();
            candidate.drain(start..(start + size).min(rules.len()));
            if mismatches(&Program::new(candidate.clone()), sig, opts) {
                rules = candidate;
                chunks = (chunks - 1).max(2);
                reduced = true;
                break;
            }
        }
        if !reduced {
            if size == 1 {
                break;
            }
            chunks = (chunks * 2).min(rules.len());
        }
    }
    if rules.len() == 1 && mismatches(&Program::default(), sig, opts) {
        rules.clear();
    }
    Program::new(rules)
}
