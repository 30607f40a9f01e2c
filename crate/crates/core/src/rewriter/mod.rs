//! Translation of ground flingo programs into the clingcon fragment.
//!
//! The translation is a sequence of eight passes, each a function from
//! [`Program`] to [`Program`]. [`translate`] runs them in order and records
//! every intermediate program in a [`PipelineTrace`].

mod steps;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::ast::*;
use crate::parser::render_program;

pub use steps::{
    expand_abbreviations, step1_guard_and_strictify, step2_name_conditions,
    step3_eliminate_conditions, step4_expand_abbreviations, step5_tag_head_body, step6_compile_min,
    step7_link_definedness, step8_rename_df,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("assignment `{0}` may only appear in a rule head")]
    AssignInBody(String),
    #[error("atom `{0}` clashes with the definedness atom of integer variable `{1}`")]
    DefCollision(String, String),
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

/// The kinds of fresh symbols introduced by the passes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FreshKind {
    Cond,
    Term,
    Def,
    Member,
    MinVar,
}

impl FreshKind {
    fn stem(self) -> &'static str {
        match self {
            FreshKind::Cond => "cond",
            FreshKind::Term => "y",
            FreshKind::Def => "def",
            FreshKind::Member => "member",
            FreshKind::MinVar => "m",
        }
    }
}

/// Source of fresh names `__flingo_<stem>_<n>`, one counter per kind.
#[derive(Debug, Clone, Default)]
pub struct FreshGen {
    counters: BTreeMap<FreshKind, u64>,
}

impl FreshGen {
    pub fn new() -> Self {
        Self::default()
    }

    fn next(&mut self, kind: FreshKind) -> String {
        let n = self.counters.entry(kind).or_insert(0);
        *n += 1;
        format!("{RESERVED_PREFIX}{}_{}", kind.stem(), n)
    }

    pub fn prop(&mut self, kind: FreshKind) -> PropAtomName {
        PropAtomName::from_trusted(self.next(kind))
    }

    pub fn int(&mut self, kind: FreshKind) -> IntVarName {
        IntVarName::from_trusted(self.next(kind))
    }
}

/// Name of the propositional atom standing for `&df(x)` after the last pass.
pub fn def_atom(x: &IntVarName) -> PropAtomName {
    PropAtomName::from_trusted(format!("def({x})"))
}

pub const STEP_NAMES: [&str; 9] = [
    "input",
    "guard and strictify",
    "name conditions",
    "eliminate conditions",
    "expand abbreviations",
    "tag head and body",
    "compile min",
    "link definedness",
    "rename df",
];

/// Every program seen by the pipeline: the input followed by one snapshot
/// per pass.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PipelineTrace {
    pub snapshots: Vec<(String, Program)>,
}

impl PipelineTrace {
    fn push(&mut self, step: &str, p: &Program) {
        self.snapshots.push((step.to_string(), p.clone()));
    }
}

impl fmt::Display for PipelineTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (name, p)) in self.snapshots.iter().enumerate() {
            writeln!(f, "%% step {i}: {name}")?;
            f.write_str(&render_program(p))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PipelineOptions {
    /// Leaves out the definedness links of pass 7. Only useful as a negative
    /// control for differential testing.
    pub skip_step7: bool,
}

pub fn translate(p: &Program, sig: &Signature) -> Result<(Program, PipelineTrace), RewriteError> {
    translate_with(p, sig, PipelineOptions::default())
}

pub fn translate_with(
    p: &Program,
    sig: &Signature,
    opts: PipelineOptions,
) -> Result<(Program, PipelineTrace), RewriteError> {
    let sig = sig.union(&signature_of(p, sig.min_int, sig.max_int)?)?;
    check_def_collisions(&sig)?;
    let mut g = FreshGen::new();
    let mut trace = PipelineTrace::default();
    trace.push(STEP_NAMES[0], p);
    let mut cur = step1_guard_and_strictify(p);
    trace.push(STEP_NAMES[1], &cur);
    cur = step2_name_conditions(&cur, &mut g);
    trace.push(STEP_NAMES[2], &cur);
    cur = step3_eliminate_conditions(&cur, &mut g, &sig);
    trace.push(STEP_NAMES[3], &cur);
    cur = step4_expand_abbreviations(&cur)?;
    trace.push(STEP_NAMES[4], &cur);
    cur = step5_tag_head_body(&cur);
    trace.push(STEP_NAMES[5], &cur);
    cur = step6_compile_min(&cur, &mut g, &sig);
    trace.push(STEP_NAMES[6], &cur);
    if !opts.skip_step7 {
        cur = step7_link_definedness(&cur, &sig);
    }
    trace.push(STEP_NAMES[7], &cur);
    cur = step8_rename_df(&cur);
    trace.push(STEP_NAMES[8], &cur);
    Ok((cur, trace))
}

fn check_def_collisions(sig: &Signature) -> Result<(), RewriteError> {
    for x in &sig.int_vars {
        let d = def_atom(x);
        if sig.prop_vars.contains(&d) {
            return Err(RewriteError::DefCollision(d.to_string(), x.to_string()));
        }
    }
    Ok(())
}
