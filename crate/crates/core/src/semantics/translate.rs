use thiserror::Error;

use super::{AggKind, Basic, Formula, HtcAtom, HtcTerm, HtcTheory, Variable};
use crate::ast::*;
use crate::parser::render_atom;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("`{0}` must be expanded before translation")]
    UnexpandedAbbreviation(String),
    #[error("`{0}` is not in the clingcon fragment")]
    NotClingconFragment(String),
    #[error("`{0}` is a rewriter surrogate and cannot appear in a source program")]
    Surrogate(String),
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

fn int_var(x: &IntVarName) -> Variable {
    Variable::Int(x.clone())
}

fn basic(p: &ProductTerm) -> Basic<Variable> {
    Basic {
        coefficient: p.coefficient,
        variable: p.variable.as_ref().map(int_var),
    }
}

fn prop(q: &PropAtomName) -> Formula<Variable> {
    Formula::Atom(HtcAtom::Prop(Variable::Prop(q.clone())))
}

fn literal(l: &Literal, atom: Formula<Variable>) -> Formula<Variable> {
    match l.negation {
        Negation::None => atom,
        Negation::Not => Formula::not(atom),
        Negation::NotNot => Formula::not(Formula::not(atom)),
    }
}

fn rule_formula(
    r: &Rule,
    mut atom: impl FnMut(&Atom) -> Result<Formula<Variable>, TranslateError>,
) -> Result<Formula<Variable>, TranslateError> {
    let mut body = Vec::with_capacity(r.body.len() + 1);
    for l in &r.body {
        body.push(literal(l, atom(&l.atom)?));
    }
    let head = match &r.head {
        Head::Atom(a) => atom(a)?,
        Head::Falsity => Formula::Falsity,
        Head::Choice(q) => {
            body.push(Formula::not(Formula::not(prop(q))));
            prop(q)
        }
    };
    Ok(Formula::implies(Formula::conj(body), head))
}

/// The propositional name that stands for a tagged atom in the target
/// program: its rendered text.
pub fn surrogate_name(a: &Atom) -> PropAtomName {
    PropAtomName::from_trusted(render_atom(a))
}

fn mu_atom(a: &Atom, sig: &Signature) -> Result<Formula<Variable>, TranslateError> {
    let c = match a {
        Atom::Prop(q) => return Ok(prop(q)),
        Atom::Constraint(c) => c,
    };
    let agg = match c {
        ConstraintAtom::Defined(x) => return Ok(Formula::Atom(HtcAtom::Df(int_var(x)))),
        ConstraintAtom::In { .. } => {
            return Err(TranslateError::UnexpandedAbbreviation(render_atom(a)))
        }
        ConstraintAtom::Aggregate(agg) => agg,
    };
    if agg.tag.is_some() {
        return Err(TranslateError::Surrogate(render_atom(a)));
    }
    let kind = match (agg.op, agg.assign) {
        (_, true) | (AggOp::Max, _) => {
            return Err(TranslateError::UnexpandedAbbreviation(render_atom(a)))
        }
        (AggOp::Sum, _) => AggKind::Sum,
        (AggOp::Sus, _) => AggKind::Sus,
        (AggOp::Min, _) => AggKind::Min,
    };
    let neutral = agg.op.neutral(sig.min_int, sig.max_int);
    let mut elements = Vec::with_capacity(agg.elements.len());
    for e in &agg.elements {
        elements.push(match e {
            FlingoTerm::Product(p) => HtcTerm::Basic(basic(p)),
            FlingoTerm::Conditional(ct) => {
                let mut cond = Vec::with_capacity(ct.condition.len());
                for l in &ct.condition {
                    cond.push(literal(l, mu_atom(&l.atom, sig)?));
                }
                HtcTerm::Conditional {
                    then: Some(basic(&ct.head)),
                    otherwise: Some(Basic::constant(neutral)),
                    cond: Box::new(Formula::conj(cond)),
                }
            }
        });
    }
    Ok(Formula::Atom(HtcAtom::Agg {
        kind,
        elements,
        relation: agg.relation,
        rhs: basic(&agg.rhs),
    }))
}

/// The flingo theory of a program: one implication per rule plus
/// `&df(q) → q` for every atom and `&df(x) → &int(x)` for every integer
/// variable. The signature is `sig` extended with the program's variables.
pub fn mu_translate(p: &Program, sig: &Signature) -> Result<HtcTheory, TranslateError> {
    let signature = sig.union(&signature_of(p, sig.min_int, sig.max_int)?)?;
    let mut formulas =
        Vec::with_capacity(p.rules.len() + signature.prop_vars.len() + signature.int_vars.len());
    for r in &p.rules {
        formulas.push(rule_formula(r, |a| mu_atom(a, &signature))?);
    }
    for q in &signature.prop_vars {
        let v = Variable::Prop(q.clone());
        formulas.push(Formula::implies(Formula::Atom(HtcAtom::Df(v)), prop(q)));
    }
    for x in &signature.int_vars {
        formulas.push(Formula::implies(
            Formula::Atom(HtcAtom::Df(int_var(x))),
            Formula::Atom(HtcAtom::Int(int_var(x))),
        ));
    }
    Ok(HtcTheory {
        formulas,
        signature,
    })
}

fn tau_atom(a: &Atom) -> Result<Formula<Variable>, TranslateError> {
    match a {
        Atom::Prop(q) => Ok(prop(q)),
        Atom::Constraint(ConstraintAtom::Aggregate(agg)) if agg.tag.is_some() => {
            Ok(prop(&surrogate_name(a)))
        }
        Atom::Constraint(ConstraintAtom::Aggregate(agg))
            if agg.op == AggOp::Sum && !agg.assign && !agg.has_conditions() =>
        {
            // The clingcon reading of `&sum` is the strict one.
            let elements = agg
                .elements
                .iter()
                .map(|e| HtcTerm::Basic(basic(e.product())))
                .collect();
            Ok(Formula::Atom(HtcAtom::Agg {
                kind: AggKind::Sus,
                elements,
                relation: agg.relation,
                rhs: basic(&agg.rhs),
            }))
        }
        _ => Err(TranslateError::NotClingconFragment(render_atom(a))),
    }
}

fn tau_signature(p: &Program, sig: &Signature) -> Result<Signature, TranslateError> {
    let mut out = sig.clone();
    let visit = |a: &Atom, out: &mut Signature| match a {
        Atom::Prop(q) => {
            out.prop_vars.insert(q.clone());
        }
        Atom::Constraint(ConstraintAtom::Aggregate(agg)) if agg.tag.is_some() => {
            out.prop_vars.insert(surrogate_name(a));
        }
        Atom::Constraint(c) => {
            for x in constraint_int_vars(c) {
                out.int_vars.insert(x.clone());
            }
        }
    };
    for r in &p.rules {
        match &r.head {
            Head::Atom(a) => visit(a, &mut out),
            Head::Choice(q) => {
                out.prop_vars.insert(q.clone());
            }
            Head::Falsity => {}
        }
        for l in &r.body {
            visit(&l.atom, &mut out);
        }
    }
    out.check_disjoint()?;
    Ok(out)
}

/// The clingcon theory of a program in the target fragment: one implication
/// per rule, `&df(q) → q` for every atom, and the fact `&int(x)` for every
/// integer variable. Tagged atoms are read as propositional atoms named by
/// their text.
pub fn tau_translate(p: &Program, sig: &Signature) -> Result<HtcTheory, TranslateError> {
    let signature = tau_signature(p, sig)?;
    let mut formulas =
        Vec::with_capacity(p.rules.len() + signature.prop_vars.len() + signature.int_vars.len());
    for r in &p.rules {
        formulas.push(rule_formula(r, tau_atom)?);
    }
    for q in &signature.prop_vars {
        let v = Variable::Prop(q.clone());
        formulas.push(Formula::implies(Formula::Atom(HtcAtom::Df(v)), prop(q)));
    }
    for x in &signature.int_vars {
        formulas.push(Formula::Atom(HtcAtom::Int(int_var(x))));
    }
    Ok(HtcTheory {
        formulas,
        signature,
    })
}
