#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;

use flingo_core::ast::*;
use flingo_core::difftest::{random_program, Features, GenParams};
use flingo_core::parser::parse_program;
use flingo_core::semantics::*;

pub const MIN: i64 = -2;
pub const MAX: i64 = 2;

pub fn bounds() -> Signature {
    Signature::new(MIN, MAX).unwrap()
}

/// A clingcon-fragment program: `&sum` atoms without conditions, negation,
/// choice rules.
pub fn clingcon_program(seed: u64, n_int: usize, n_prop: usize, n_rules: usize) -> Program {
    random_program(&GenParams {
        seed,
        n_prop_vars: n_prop,
        n_int_vars: n_int,
        n_rules,
        min_int: MIN,
        max_int: MAX,
        features: Features::CLINGCON,
        ..GenParams::default()
    })
}

/// `P*`: every `&sum` replaced by `&sus`.
pub fn star(p: &Program) -> Program {
    let fix = |a: &Atom| match a {
        Atom::Constraint(ConstraintAtom::Aggregate(agg)) if agg.op == AggOp::Sum => {
            Atom::agg(AggregateAtom {
                op: AggOp::Sus,
                ..agg.clone()
            })
        }
        other => other.clone(),
    };
    let rules = p
        .rules
        .iter()
        .map(|r| Rule {
            head: match &r.head {
                Head::Atom(a) => Head::Atom(fix(a)),
                h => h.clone(),
            },
            body: r
                .body
                .iter()
                .map(|l| Literal {
                    atom: fix(&l.atom),
                    negation: l.negation,
                })
                .collect(),
        })
        .collect();
    Program::new(rules)
}

/// The facts `&sum{x} = x` for every integer variable of `sig`.
pub fn self_facts(sig: &Signature) -> Program {
    let text: String = sig
        .int_vars
        .iter()
        .map(|x| format!("&sum{{ {x} }} = {x}.\n", x = x.as_str()))
        .collect();
    parse_program(&text).unwrap()
}

pub fn union(p: &Program, q: &Program) -> Program {
    Program::new(p.rules.iter().chain(&q.rules).cloned().collect())
}

pub fn sig_of(p: &Program) -> Signature {
    signature_of(p, MIN, MAX).unwrap()
}

pub fn all_ints_defined(m: &Valuation, sig: &Signature) -> bool {
    sig.int_vars.iter().all(|x| m.int(x).is_some())
}

/// A random `t` over the signature and a random `h ⊆ t`.
pub fn random_ht(rng: &mut impl Rng, sig: &Signature) -> (Valuation, Valuation) {
    let mut h = Valuation::new();
    let mut t = Valuation::new();
    for q in &sig.prop_vars {
        if rng.gen_bool(0.5) {
            t.set(Variable::Prop(q.clone()), ExtValue::True);
            if rng.gen_bool(0.5) {
                h.set(Variable::Prop(q.clone()), ExtValue::True);
            }
        }
    }
    for x in &sig.int_vars {
        if rng.gen_bool(0.8) {
            let k = rng.gen_range(sig.min_int..=sig.max_int);
            t.set(Variable::Int(x.clone()), ExtValue::Int(k));
            if rng.gen_bool(0.6) {
                h.set(Variable::Int(x.clone()), ExtValue::Int(k));
            }
        }
    }
    (h, t)
}

/// A pair `&sum{T} ≺ s`, `&sus{T} ≺ s` over the same random elements.
pub fn random_atom_pair(rng: &mut impl Rng) -> (AggregateAtom, AggregateAtom) {
    let props = ["a", "b"];
    let ints = ["x", "y"];
    let product = |rng: &mut dyn rand::RngCore| {
        if rng.gen_bool(0.3) {
            ProductTerm::constant(rng.gen_range(MIN..=MAX))
        } else {
            let x = IntVarName::new(*ints.choose(rng).unwrap()).unwrap();
            ProductTerm::scaled(*[1, -1, 2].choose(rng).unwrap(), x)
        }
    };
    let n = rng.gen_range(0..=3);
    let elements = (0..n)
        .map(|_| {
            let head = product(rng);
            if rng.gen_bool(0.4) {
                let condition = (0..rng.gen_range(1..=2))
                    .map(|_| {
                        let q = PropAtomName::new(*props.choose(rng).unwrap()).unwrap();
                        let negation = *[
                            Negation::None,
                            Negation::None,
                            Negation::Not,
                            Negation::NotNot,
                        ]
                        .choose(rng)
                        .unwrap();
                        Literal {
                            atom: Atom::Prop(q),
                            negation,
                        }
                    })
                    .collect();
                FlingoTerm::Conditional(ConditionalTerm { head, condition })
            } else {
                FlingoTerm::Product(head)
            }
        })
        .collect();
    let relation = *Relation::ALL.choose(rng).unwrap();
    let rhs = product(rng);
    let c1 = AggregateAtom::new(AggOp::Sum, elements, relation, rhs);
    let c2 = AggregateAtom {
        op: AggOp::Sus,
        ..c1.clone()
    };
    (c1, c2)
}

/// `μ(c)` as a formula, taken from the translation of `:- c.`.
pub fn mu_of(a: &AggregateAtom, sig: &Signature) -> Formula<Variable> {
    let p = Program::new(vec![Rule::new(
        Head::Falsity,
        vec![Literal::pos(Atom::agg(a.clone()))],
    )]);
    let th = mu_translate(&p, sig).unwrap();
    match &th.formulas[0] {
        Formula::Implies(body, _) => (**body).clone(),
        f => panic!("unexpected rule shape {f:?}"),
    }
}

/// Whether some condition of the atom is undecided at `⟨h,t⟩`: false at h,
/// true at t.
pub fn has_undecided_condition(
    a: &AggregateAtom,
    h: &Valuation,
    t: &Valuation,
    sig: &Signature,
) -> bool {
    let Formula::Atom(HtcAtom::Agg { elements, .. }) = mu_of(a, sig) else {
        panic!("not an aggregate");
    };
    elements.iter().any(|e| match e {
        HtcTerm::Conditional { cond, .. } => {
            !satisfies(h, t, cond, sig) && satisfies(t, t, cond, sig)
        }
        HtcTerm::Basic(_) => false,
    })
}

/// The signature `{a, b, x, y}` over `[MIN, MAX]`.
pub fn small_sig() -> Signature {
    let mut sig = bounds();
    for q in ["a", "b"] {
        sig.prop_vars.insert(PropAtomName::new(q).unwrap());
    }
    for x in ["x", "y"] {
        sig.int_vars.insert(IntVarName::new(x).unwrap());
    }
    sig
}

fn random_basic(rng: &mut impl Rng, sig: &Signature) -> Basic<Variable> {
    let ints: Vec<&IntVarName> = sig.int_vars.iter().collect();
    if ints.is_empty() || rng.gen_bool(0.3) {
        Basic::constant(rng.gen_range(sig.min_int..=sig.max_int))
    } else {
        Basic {
            coefficient: *[1, -1, 2].choose(rng).unwrap(),
            variable: Some(Variable::Int((*ints.choose(rng).unwrap()).clone())),
        }
    }
}

/// A random formula over propositional atoms, `&df` and `&sus` atoms.
pub fn random_strict_formula(rng: &mut impl Rng, sig: &Signature, depth: u32) -> Formula<Variable> {
    if depth == 0 || rng.gen_bool(0.3) {
        let props: Vec<&PropAtomName> = sig.prop_vars.iter().collect();
        let ints: Vec<&IntVarName> = sig.int_vars.iter().collect();
        return match rng.gen_range(0..4) {
            0 => Formula::Falsity,
            1 => Formula::Atom(HtcAtom::Prop(Variable::Prop(
                (*props.choose(rng).unwrap()).clone(),
            ))),
            2 => Formula::Atom(HtcAtom::Df(Variable::Int(
                (*ints.choose(rng).unwrap()).clone(),
            ))),
            _ => Formula::Atom(HtcAtom::Agg {
                kind: AggKind::Sus,
                elements: (0..rng.gen_range(0..=2))
                    .map(|_| HtcTerm::Basic(random_basic(rng, sig)))
                    .collect(),
                relation: *Relation::ALL.choose(rng).unwrap(),
                rhs: random_basic(rng, sig),
            }),
        };
    }
    let l = random_strict_formula(rng, sig, depth - 1);
    let r = random_strict_formula(rng, sig, depth - 1);
    match rng.gen_range(0..3) {
        0 => Formula::And(Box::new(l), Box::new(r)),
        1 => Formula::Or(Box::new(l), Box::new(r)),
        _ => Formula::implies(l, r),
    }
}
