//! Parsing, compilation and reference semantics for flingo, a constraint ASP
//! language with partial integer variables, targeting clingcon.

pub mod ast;
pub mod difftest;
pub mod emitter;
pub mod parser;
pub mod rewriter;
pub mod semantics;

use thiserror::Error;

use ast::{signature_of, Program, Signature, SignatureError};
use difftest::DiffError;
use emitter::{emit_clingcon, EmitError, EmitOptions};
use parser::ParseError;
use rewriter::{
    expand_abbreviations, translate_with, PipelineOptions, PipelineTrace, RewriteError,
};
use semantics::{
    mu_translate, stable_models_with, EngineError, EngineOptions, TranslateError, Valuation,
};

/// Any failure of the end-to-end entry points.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    /// The pipeline produced something outside the target fragment.
    #[error("internal error: {0}")]
    Emit(#[from] EmitError),
    #[error(transparent)]
    Diff(#[from] DiffError),
}

/// Stable models of a program under the flingo reading, with the program's
/// own variables added to `sig`.
pub fn solve(p: &Program, sig: &Signature, opts: &EngineOptions) -> Result<Vec<Valuation>, Error> {
    let sig = sig.union(&signature_of(p, sig.min_int, sig.max_int)?)?;
    let th = mu_translate(&expand_abbreviations(p)?, &sig)?;
    Ok(stable_models_with(&th, opts)?)
}

/// Translates a program and renders the result as clingcon input.
pub fn compile(
    p: &Program,
    sig: &Signature,
    pipeline: PipelineOptions,
    emit: &EmitOptions,
) -> Result<(String, PipelineTrace), Error> {
    let (out, trace) = translate_with(p, sig, pipeline)?;
    Ok((emit_clingcon(&out, emit)?, trace))
}
