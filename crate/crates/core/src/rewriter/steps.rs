use std::collections::HashSet;

use super::{def_atom, FreshGen, FreshKind, RewriteError};
use crate::ast::*;
use crate::parser::render_atom;

fn map_atoms(p: &Program, mut f: impl FnMut(&Atom, Tag) -> Atom) -> Program {
    let rules = p
        .rules
        .iter()
        .map(|r| Rule {
            head: match &r.head {
                Head::Atom(a) => Head::Atom(f(a, Tag::Head)),
                h => h.clone(),
            },
            body: r
                .body
                .iter()
                .map(|l| Literal {
                    atom: f(&l.atom, Tag::Body),
                    negation: l.negation,
                })
                .collect(),
        })
        .collect();
    Program::new(rules)
}

/// Head and body atoms in program order, each with its position.
fn atoms(p: &Program) -> impl Iterator<Item = (&Atom, Tag)> {
    p.rules.iter().flat_map(|r| {
        let head = match &r.head {
            Head::Atom(a) => Some((a, Tag::Head)),
            _ => None,
        };
        head.into_iter()
            .chain(r.body.iter().map(|l| (&l.atom, Tag::Body)))
    })
}

fn df_lits<'a>(xs: impl IntoIterator<Item = &'a IntVarName>) -> Vec<Literal> {
    xs.into_iter()
        .map(|x| Literal::pos(Atom::df(x.clone())))
        .collect()
}

fn sus(tag: Option<Tag>, elements: Vec<ProductTerm>, relation: Relation, rhs: ProductTerm) -> Atom {
    let mut a = AggregateAtom::new(
        AggOp::Sus,
        elements.into_iter().map(FlingoTerm::Product).collect(),
        relation,
        rhs,
    );
    a.tag = tag;
    Atom::agg(a)
}

fn aggregate(a: &Atom) -> Option<&AggregateAtom> {
    match a {
        Atom::Constraint(ConstraintAtom::Aggregate(agg)) => Some(agg),
        _ => None,
    }
}

fn products(agg: &AggregateAtom) -> Vec<ProductTerm> {
    agg.elements.iter().map(|e| e.product().clone()).collect()
}

/// Adds `&df` guards for the variables of every term of a non-strict atom and
/// turns `&sum` into `&sus`. Constant terms need no guard and stay as they are.
pub fn step1_guard_and_strictify(p: &Program) -> Program {
    map_atoms(p, |a, _| {
        let Some(agg) = aggregate(a).filter(|agg| agg.op != AggOp::Sus) else {
            return a.clone();
        };
        let elements = agg
            .elements
            .iter()
            .map(|e| match e {
                FlingoTerm::Product(s) => match &s.variable {
                    None => e.clone(),
                    Some(x) => FlingoTerm::Conditional(ConditionalTerm {
                        head: s.clone(),
                        condition: df_lits([x]),
                    }),
                },
                FlingoTerm::Conditional(c) => {
                    let mut condition = c.condition.clone();
                    for l in df_lits(&c.head.variable) {
                        if !condition.contains(&l) {
                            condition.push(l);
                        }
                    }
                    FlingoTerm::Conditional(ConditionalTerm {
                        head: c.head.clone(),
                        condition,
                    })
                }
            })
            .collect();
        let op = if agg.op == AggOp::Sum {
            AggOp::Sus
        } else {
            agg.op
        };
        Atom::agg(AggregateAtom {
            op,
            elements,
            ..agg.clone()
        })
    })
}

/// Replaces every condition by a fresh atom defined by the condition.
pub fn step2_name_conditions(p: &Program, g: &mut FreshGen) -> Program {
    let mut added = Vec::new();
    let mut out = map_atoms(p, |a, _| {
        let Some(agg) = aggregate(a).filter(|agg| agg.has_conditions()) else {
            return a.clone();
        };
        let elements = agg
            .elements
            .iter()
            .map(|e| match e {
                FlingoTerm::Product(_) => e.clone(),
                FlingoTerm::Conditional(c) => {
                    let q = g.prop(FreshKind::Cond);
                    added.push(Rule::new(
                        Head::Atom(Atom::Prop(q.clone())),
                        c.condition.clone(),
                    ));
                    FlingoTerm::Conditional(ConditionalTerm {
                        head: c.head.clone(),
                        condition: vec![Literal::pos(Atom::Prop(q))],
                    })
                }
            })
            .collect();
        Atom::agg(AggregateAtom {
            elements,
            ..agg.clone()
        })
    });
    out.rules.extend(added);
    out
}

/// Replaces each `s : a` by a fresh integer variable that equals `s` when
/// `a` holds and the neutral element of the enclosing operation otherwise.
pub fn step3_eliminate_conditions(p: &Program, g: &mut FreshGen, sig: &Signature) -> Program {
    let mut added = Vec::new();
    let mut out = map_atoms(p, |a, _| {
        let Some(agg) = aggregate(a).filter(|agg| agg.has_conditions()) else {
            return a.clone();
        };
        let neutral = agg.op.neutral(sig.min_int, sig.max_int);
        let elements = agg
            .elements
            .iter()
            .map(|e| match e {
                FlingoTerm::Product(_) => e.clone(),
                FlingoTerm::Conditional(c) => {
                    let y = g.int(FreshKind::Term);
                    let yt = ProductTerm::var(y.clone());
                    let cond = c.condition.clone();
                    let is_true =
                        |extra: Vec<Literal>| cond.iter().cloned().chain(extra).collect::<Vec<_>>();
                    let defines = |body| {
                        Rule::new(
                            Head::Atom(sus(None, vec![c.head.clone()], Relation::Eq, yt.clone())),
                            body,
                        )
                    };
                    added.push(defines(is_true(df_lits(&c.head.variable))));
                    added.push(defines(is_true(df_lits([&y]))));
                    added.push(Rule::new(
                        Head::Atom(sus(
                            None,
                            vec![ProductTerm::constant(neutral)],
                            Relation::Eq,
                            yt.clone(),
                        )),
                        cond.iter().map(negate_literal).collect(),
                    ));
                    if let [Literal {
                        atom: Atom::Prop(q),
                        negation: Negation::None,
                    }] = cond.as_slice()
                    {
                        added.push(Rule::new(Head::Choice(q.clone()), df_lits([&y])));
                    }
                    FlingoTerm::Product(yt)
                }
            })
            .collect();
        Atom::agg(AggregateAtom {
            elements,
            ..agg.clone()
        })
    });
    out.rules.extend(added);
    out
}

fn negate_literal(l: &Literal) -> Literal {
    let negation = match l.negation {
        Negation::None | Negation::NotNot => Negation::Not,
        Negation::Not => Negation::NotNot,
    };
    Literal {
        atom: l.atom.clone(),
        negation,
    }
}

fn max_to_min(a: Atom) -> Atom {
    match a {
        Atom::Constraint(ConstraintAtom::Aggregate(agg)) if agg.op == AggOp::Max => {
            Atom::agg(AggregateAtom {
                op: AggOp::Min,
                elements: agg.elements.iter().map(FlingoTerm::negated).collect(),
                relation: dual_relation(agg.relation),
                rhs: negate_product(&agg.rhs),
                ..agg
            })
        }
        a => a,
    }
}

/// Expands `&in` choices and `=:` assignments into plain rules and rewrites
/// `&max` atoms as `&min` atoms over negated terms.
pub fn step4_expand_abbreviations(p: &Program) -> Result<Program, RewriteError> {
    let mut rules = Vec::with_capacity(p.rules.len());
    for r in &p.rules {
        let mut body = Vec::with_capacity(r.body.len());
        for l in &r.body {
            if let Atom::Constraint(c) = &l.atom {
                if c.is_assignment() {
                    return Err(RewriteError::AssignInBody(render_atom(&l.atom)));
                }
            }
            body.push(Literal {
                atom: max_to_min(l.atom.clone()),
                negation: l.negation,
            });
        }
        match &r.head {
            Head::Atom(Atom::Constraint(ConstraintAtom::In {
                lower,
                upper,
                target,
            })) => {
                let mut guarded = body;
                guarded.extend(df_lits(&product_vars([lower, upper])));
                for (bound, rel) in [(lower, Relation::Le), (upper, Relation::Ge)] {
                    let head = sus(None, vec![bound.clone()], rel, target.clone());
                    rules.push(Rule::new(Head::Atom(head), guarded.clone()));
                }
            }
            Head::Atom(Atom::Constraint(ConstraintAtom::Aggregate(agg))) if agg.assign => {
                body.extend(df_lits(&product_vars(
                    agg.elements.iter().map(FlingoTerm::product),
                )));
                let eq = AggregateAtom {
                    relation: Relation::Eq,
                    assign: false,
                    ..agg.clone()
                };
                rules.push(Rule::new(Head::Atom(max_to_min(Atom::agg(eq))), body));
            }
            Head::Atom(a) => rules.push(Rule::new(Head::Atom(max_to_min(a.clone())), body)),
            h => rules.push(Rule::new(h.clone(), body)),
        }
    }
    Ok(Program::new(rules))
}

/// The abbreviation expansion on its own, for reading a source program
/// directly in the logic.
pub fn expand_abbreviations(p: &Program) -> Result<Program, RewriteError> {
    step4_expand_abbreviations(p)
}

/// Marks every `&sus` and `&min` atom as a head or body surrogate.
pub fn step5_tag_head_body(p: &Program) -> Program {
    map_atoms(p, |a, pos| match aggregate(a) {
        Some(agg) if agg.tag.is_none() && matches!(agg.op, AggOp::Sus | AggOp::Min) => {
            Atom::agg(AggregateAtom {
                tag: Some(pos),
                ..agg.clone()
            })
        }
        _ => a.clone(),
    })
}

/// Distinct tagged atoms with operation `op`, in order of first occurrence.
fn tagged(p: &Program, op: AggOp) -> Vec<AggregateAtom> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (a, _) in atoms(p) {
        if let Some(agg) = aggregate(a) {
            if agg.op == op && agg.tag.is_some() && seen.insert(agg) {
                out.push(agg.clone());
            }
        }
    }
    out
}

/// Defines every tagged `&min` atom through a fresh variable holding the
/// minimum of its terms.
pub fn step6_compile_min(p: &Program, g: &mut FreshGen, sig: &Signature) -> Program {
    let mut out = p.clone();
    for agg in tagged(p, AggOp::Min) {
        let m = g.int(FreshKind::MinVar);
        let mt = ProductTerm::var(m.clone());
        let def = Atom::Prop(g.prop(FreshKind::Def));
        let member = Atom::Prop(g.prop(FreshKind::Member));
        let rules = &mut out.rules;
        rules.push(Rule::new(
            Head::Falsity,
            vec![Literal::pos(def.clone()), Literal::neg(member.clone())],
        ));
        rules.push(Rule::new(
            Head::Atom(sus(
                Some(Tag::Head),
                vec![ProductTerm::constant(sig.max_int)],
                Relation::Eq,
                mt.clone(),
            )),
            vec![Literal::neg(def.clone())],
        ));
        for s in products(&agg) {
            rules.push(Rule::new(Head::Atom(def.clone()), df_lits(&s.variable)));
            rules.push(Rule::new(
                Head::Atom(Atom::df(m.clone())),
                vec![Literal::pos(def.clone())],
            ));
            let below = sus(Some(Tag::Body), vec![s.clone()], Relation::Lt, mt.clone());
            rules.push(Rule::new(Head::Falsity, vec![Literal::pos(below)]));
            let equal = sus(Some(Tag::Body), vec![s], Relation::Eq, mt.clone());
            rules.push(Rule::new(
                Head::Atom(member.clone()),
                vec![Literal::pos(equal)],
            ));
        }
        let tag = agg.tag.expect("tagged");
        let via_m = sus(Some(tag), vec![mt], agg.relation, agg.rhs.clone());
        let original = Atom::agg(agg);
        rules.push(match tag {
            Tag::Head => Rule::new(Head::Atom(via_m), vec![Literal::pos(original)]),
            Tag::Body => Rule::new(Head::Atom(original), vec![Literal::pos(via_m)]),
        });
    }
    out
}

/// Ties each tagged `&sus` surrogate to the genuine `&sum` constraint over
/// the same terms, and fixes undefined variables to 0.
pub fn step7_link_definedness(p: &Program, sig: &Signature) -> Program {
    let mut out = p.clone();
    let mut vars = sig.int_vars.clone();
    for (a, _) in atoms(p) {
        if let Atom::Constraint(c) = a {
            vars.extend(constraint_int_vars(c).into_iter().cloned());
        }
    }
    for x in &vars {
        let zero = AggregateAtom::new(
            AggOp::Sum,
            vec![FlingoTerm::Product(ProductTerm::constant(0))],
            Relation::Eq,
            ProductTerm::var(x.clone()),
        );
        out.rules.push(Rule::new(
            Head::Atom(Atom::agg(zero)),
            vec![Literal::neg(Atom::df(x.clone()))],
        ));
    }
    for agg in tagged(p, AggOp::Sus) {
        let all_vars: Vec<IntVarName> = product_vars(
            agg.elements
                .iter()
                .map(FlingoTerm::product)
                .chain([&agg.rhs]),
        );
        let genuine = Atom::agg(AggregateAtom {
            op: AggOp::Sum,
            tag: None,
            ..agg.clone()
        });
        let tag = agg.tag.expect("tagged");
        let surrogate = Atom::agg(agg);
        match tag {
            Tag::Head => {
                out.rules.push(Rule::new(
                    Head::Falsity,
                    vec![Literal::pos(surrogate.clone()), Literal::neg(genuine)],
                ));
                for x in all_vars {
                    out.rules.push(Rule::new(
                        Head::Atom(Atom::df(x)),
                        vec![Literal::pos(surrogate.clone())],
                    ));
                }
            }
            Tag::Body => {
                let mut body = vec![Literal::pos(genuine)];
                body.extend(df_lits(&all_vars));
                out.rules.push(Rule::new(Head::Atom(surrogate), body));
            }
        }
    }
    out
}

/// Replaces `&df(x)` by the propositional atom `def(x)`.
pub fn step8_rename_df(p: &Program) -> Program {
    map_atoms(p, |a, _| match a {
        Atom::Constraint(ConstraintAtom::Defined(x)) => Atom::Prop(def_atom(x)),
        _ => a.clone(),
    })
}
