//! Rendering of translated programs as clingcon input, and of stable models
//! as text or JSON.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ast::*;
use crate::parser::{parse_atom_with, render_atom, render_program, ParseOptions};
use crate::semantics::{ExtValue, Valuation, Variable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmitError {
    #[error("`{0}` is not in the clingcon fragment")]
    NotClingconFragment(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SurrogateStyle {
    /// `__flingo_sus_body_3`
    #[default]
    Numbered,
    /// Derived from the atom text, e.g. `__flingo_sus_body_x_y_le_3`.
    Readable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmitOptions {
    pub surrogate_style: SurrogateStyle,
    /// Appends the recommended `--min-int`/`--max-int` flags as a comment.
    pub include_domain_directives: bool,
    pub min_int: i64,
    pub max_int: i64,
}

impl Default for EmitOptions {
    fn default() -> Self {
        Self {
            surrogate_style: SurrogateStyle::Numbered,
            include_domain_directives: false,
            min_int: -8,
            max_int: 8,
        }
    }
}

fn readable_stem(a: &AggregateAtom) -> String {
    let mut s = String::new();
    for e in &a.elements {
        let _ = write!(s, "_{}", product_word(e.product()));
    }
    let rel = match a.relation {
        Relation::Le => "le",
        Relation::Eq => "eq",
        Relation::Ne => "ne",
        Relation::Lt => "lt",
        Relation::Gt => "gt",
        Relation::Ge => "ge",
    };
    let _ = write!(s, "_{rel}_{}", product_word(&a.rhs));
    s
}

fn product_word(p: &ProductTerm) -> String {
    let n = if p.coefficient < 0 {
        format!("m{}", p.coefficient.unsigned_abs())
    } else {
        p.coefficient.to_string()
    };
    let Some(x) = &p.variable else { return n };
    let var: String = x
        .as_str()
        .trim_start_matches(RESERVED_PREFIX)
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect();
    match p.coefficient {
        1 => var,
        _ => format!("{n}_{var}"),
    }
}

/// Assigns every distinct tagged atom of `p` a propositional name, in order
/// of first occurrence.
fn surrogates(p: &Program, style: SurrogateStyle) -> Vec<(Atom, PropAtomName)> {
    let mut names: HashMap<&Atom, PropAtomName> = HashMap::new();
    let mut taken: HashMap<String, &Atom> = HashMap::new();
    let mut out = Vec::new();
    let mut all: Vec<&Atom> = Vec::new();
    for r in &p.rules {
        if let Head::Atom(a) = &r.head {
            all.push(a);
        }
        all.extend(r.body.iter().map(|l| &l.atom));
    }
    for a in all {
        let Atom::Constraint(ConstraintAtom::Aggregate(agg)) = a else {
            continue;
        };
        let Some(tag) = agg.tag else { continue };
        if names.contains_key(a) {
            continue;
        }
        let prefix = format!("{RESERVED_PREFIX}{}_{}", agg.op.keyword(), tag.keyword());
        let mut name = match style {
            SurrogateStyle::Numbered => format!("{prefix}_{}", out.len() + 1),
            SurrogateStyle::Readable => format!("{prefix}{}", readable_stem(agg)),
        };
        if taken.contains_key(&name) {
            let mut h = DefaultHasher::new();
            a.hash(&mut h);
            name = format!("{name}_{:016x}", h.finish());
        }
        let name = PropAtomName::from_trusted(name);
        taken.insert(name.to_string(), a);
        names.insert(a, name.clone());
        out.push((a.clone(), name));
    }
    out
}

fn check_fragment(a: &Atom) -> Result<(), EmitError> {
    match a {
        Atom::Prop(_) => Ok(()),
        Atom::Constraint(ConstraintAtom::Aggregate(agg))
            if agg.tag.is_some() && !agg.assign && !agg.has_conditions() =>
        {
            Ok(())
        }
        Atom::Constraint(ConstraintAtom::Aggregate(agg))
            if agg.op == AggOp::Sum && !agg.assign && !agg.has_conditions() =>
        {
            Ok(())
        }
        _ => Err(EmitError::NotClingconFragment(render_atom(a))),
    }
}

/// Renders a clingcon-fragment program. Tagged atoms become propositional
/// atoms, listed in a leading comment legend.
pub fn emit_clingcon(p: &Program, opts: &EmitOptions) -> Result<String, EmitError> {
    for r in &p.rules {
        if let Head::Atom(a) = &r.head {
            check_fragment(a)?;
        }
        for l in &r.body {
            check_fragment(&l.atom)?;
        }
    }
    let table = surrogates(p, opts.surrogate_style);
    let lookup: HashMap<&Atom, &PropAtomName> = table.iter().map(|(a, n)| (a, n)).collect();
    let swap = |a: &Atom| {
        lookup
            .get(a)
            .map_or_else(|| a.clone(), |n| Atom::Prop((*n).clone()))
    };
    let rules = p
        .rules
        .iter()
        .map(|r| Rule {
            head: match &r.head {
                Head::Atom(a) => Head::Atom(swap(a)),
                h => h.clone(),
            },
            body: r
                .body
                .iter()
                .map(|l| Literal {
                    atom: swap(&l.atom),
                    negation: l.negation,
                })
                .collect(),
        })
        .collect();
    let mut out = String::new();
    for (a, n) in &table {
        let _ = writeln!(out, "% {n} := {}", render_atom(a));
    }
    out.push_str(&render_program(&Program::new(rules)));
    if opts.include_domain_directives {
        let _ = writeln!(
            out,
            "% clingcon flags: --min-int={} --max-int={}",
            opts.min_int, opts.max_int
        );
    }
    Ok(out)
}

/// Reads back the surrogate legend of an emitted program.
pub fn parse_legend(text: &str) -> BTreeMap<PropAtomName, Atom> {
    let mut out = BTreeMap::new();
    for line in text.lines() {
        let Some(rest) = line.strip_prefix("% ") else {
            continue;
        };
        let Some((name, atom)) = rest.split_once(" := ") else {
            continue;
        };
        let Ok(name) = PropAtomName::new_internal(name) else {
            continue;
        };
        if let Ok(a) = parse_atom_with(atom, ParseOptions::internal()) {
            out.insert(name, a);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModelFormat {
    #[default]
    Text,
    Json,
}

/// One model in the JSON output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonModel {
    pub props: Vec<String>,
    pub ints: BTreeMap<String, i64>,
}

impl From<&Valuation> for JsonModel {
    fn from(v: &Valuation) -> Self {
        let mut props = Vec::new();
        let mut ints = BTreeMap::new();
        for (var, val) in v.pairs() {
            match (var, val) {
                (Variable::Prop(q), _) => props.push(q.to_string()),
                (Variable::Int(x), ExtValue::Int(n)) => {
                    ints.insert(x.to_string(), n);
                }
                _ => {}
            }
        }
        props.sort();
        Self { props, ints }
    }
}

/// The canonical one-line form of a model: true atoms and `x=n` pairs,
/// sorted by variable name.
pub fn model_line(v: &Valuation) -> String {
    let mut tokens: Vec<(String, String)> = v
        .pairs()
        .map(|(var, val)| match val {
            ExtValue::Int(n) => (var.name().to_string(), format!("{}={n}", var.name())),
            _ => (var.name().to_string(), var.name().to_string()),
        })
        .collect();
    tokens.sort();
    tokens
        .into_iter()
        .map(|(_, t)| t)
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn emit_models(models: &[Valuation], format: ModelFormat) -> String {
    match format {
        ModelFormat::Text => {
            if models.is_empty() {
                return "UNSATISFIABLE\n".to_string();
            }
            let mut lines: Vec<String> = models.iter().map(model_line).collect();
            lines.sort();
            lines.into_iter().map(|l| l + "\n").collect()
        }
        ModelFormat::Json => {
            let mut ms: Vec<(String, JsonModel)> =
                models.iter().map(|m| (model_line(m), m.into())).collect();
            ms.sort_by(|a, b| a.0.cmp(&b.0));
            let ms: Vec<JsonModel> = ms.into_iter().map(|(_, m)| m).collect();
            serde_json::to_string(&ms).expect("models serialize") + "\n"
        }
    }
}
