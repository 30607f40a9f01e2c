use num_bigint::BigInt;

use super::{AggKind, Basic, ExtValue, Formula, HtcAtom, HtcTerm, Valuation, Variable};
use crate::ast::{Relation, Signature};

/// Read access to a valuation, keyed by whatever variable type the formulas
/// use: names for public entry points, dense indices inside the engine.
pub trait Env<V> {
    fn value(&self, v: &V) -> ExtValue;
}

impl Env<Variable> for Valuation {
    fn value(&self, v: &Variable) -> ExtValue {
        self.get(v)
    }
}

impl Env<usize> for [ExtValue] {
    fn value(&self, v: &usize) -> ExtValue {
        self[*v]
    }
}

/// Integer domain bounds, needed for the neutral element of `min`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub min_int: i64,
    pub max_int: i64,
}

impl From<&Signature> for Bounds {
    fn from(sig: &Signature) -> Self {
        Bounds {
            min_int: sig.min_int,
            max_int: sig.max_int,
        }
    }
}

fn basic_value<V, E: Env<V> + ?Sized>(v: &E, b: &Basic<V>) -> Option<i128> {
    match &b.variable {
        None => Some(b.coefficient as i128),
        Some(x) => match v.value(x) {
            ExtValue::Int(k) => Some(b.coefficient as i128 * k as i128),
            _ => None,
        },
    }
}

/// `⟨h,t⟩ ⊨ φ` following the clauses of the satisfaction relation; an
/// implication is checked in both worlds.
pub fn satisfies_in<V, E: Env<V> + ?Sized>(h: &E, t: &E, f: &Formula<V>, b: Bounds) -> bool {
    match f {
        Formula::Falsity => false,
        Formula::Atom(a) => atom_holds_ht(h, t, a, b),
        Formula::And(l, r) => satisfies_in(h, t, l, b) && satisfies_in(h, t, r, b),
        Formula::Or(l, r) => satisfies_in(h, t, l, b) || satisfies_in(h, t, r, b),
        Formula::Implies(l, r) => {
            let here = !satisfies_in(h, t, l, b) || satisfies_in(h, t, r, b);
            if !here {
                return false;
            }
            if std::ptr::addr_eq(h, t) {
                return true;
            }
            !satisfies_in(t, t, l, b) || satisfies_in(t, t, r, b)
        }
    }
}

/// Replaces a conditional term by `s1`, `s2`, or the undefined value.
fn eval_term<'a, V, E: Env<V> + ?Sized>(
    h: &E,
    t: &E,
    term: &'a HtcTerm<V>,
    b: Bounds,
) -> Option<&'a Basic<V>> {
    match term {
        HtcTerm::Basic(s) => Some(s),
        HtcTerm::Conditional {
            then,
            otherwise,
            cond,
        } => {
            if satisfies_in(h, t, cond, b) {
                then.as_ref()
            } else if !satisfies_in(t, t, cond, b) {
                otherwise.as_ref()
            } else {
                None
            }
        }
    }
}

fn atom_holds_ht<V, E: Env<V> + ?Sized>(h: &E, t: &E, a: &HtcAtom<V>, b: Bounds) -> bool {
    match a {
        HtcAtom::Prop(p) => h.value(p) == ExtValue::True,
        HtcAtom::Df(x) => h.value(x).is_defined(),
        HtcAtom::Int(x) => matches!(h.value(x), ExtValue::Int(_)),
        HtcAtom::Agg {
            kind,
            elements,
            relation,
            rhs,
        } => {
            let Some(rhs) = basic_value(h, rhs) else {
                return false;
            };
            let mut values = elements
                .iter()
                .map(|e| eval_term(h, t, e, b).and_then(|s| basic_value(h, s)));
            match kind {
                AggKind::Sus => {
                    let mut all = Vec::with_capacity(elements.len());
                    for v in values {
                        match v {
                            Some(v) => all.push(v),
                            None => return false,
                        }
                    }
                    compare_sum(&all, *relation, rhs)
                }
                AggKind::Sum => {
                    let all: Vec<i128> = values.map(|v| v.unwrap_or(0)).collect();
                    compare_sum(&all, *relation, rhs)
                }
                AggKind::Min => {
                    let neutral = b.max_int as i128;
                    let min = values
                        .by_ref()
                        .map(|v| v.unwrap_or(neutral))
                        .min()
                        .unwrap_or(neutral);
                    relation.holds(min, rhs)
                }
            }
        }
    }
}

/// `Σ values ≺ rhs` without overflow.
fn compare_sum(values: &[i128], r: Relation, rhs: i128) -> bool {
    let mut acc: i128 = 0;
    for v in values {
        match acc.checked_add(*v) {
            Some(s) => acc = s,
            None => {
                let total: BigInt = values.iter().map(|v| BigInt::from(*v)).sum();
                return r.holds(total, BigInt::from(rhs));
            }
        }
    }
    r.holds(acc, rhs)
}

/// Evaluates a conditional term at `⟨h,t⟩`: `then` if the condition holds at
/// `⟨h,t⟩`, `otherwise` if it fails at `⟨t,t⟩`, undefined (`None`) in between.
pub fn eval_cterm(
    h: &Valuation,
    t: &Valuation,
    ct: &HtcTerm<Variable>,
    sig: &Signature,
) -> Option<Basic<Variable>> {
    eval_term(h, t, ct, sig.into()).cloned()
}

/// `v(s)` for a basic term, computed without overflow; `None` stands for
/// the undefined value, both as input and as result.
pub fn term_value(v: &Valuation, s: Option<&Basic<Variable>>) -> Option<i128> {
    s.and_then(|s| basic_value(v, s))
}

/// `v^fun(s)`: the value of `s` if defined, the neutral element otherwise.
pub fn term_value_defaulted(
    v: &Valuation,
    s: Option<&Basic<Variable>>,
    fun: crate::ast::AggOp,
    sig: &Signature,
) -> i128 {
    s.and_then(|s| basic_value(v, s))
        .unwrap_or(fun.neutral(sig.min_int, sig.max_int) as i128)
}

/// Membership of `v` in the denotation of an atom. Conditional terms, if any,
/// are evaluated at `⟨v,v⟩`.
pub fn atom_holds(v: &Valuation, a: &HtcAtom<Variable>, sig: &Signature) -> bool {
    atom_holds_ht(v, v, a, sig.into())
}

pub fn satisfies(h: &Valuation, t: &Valuation, f: &Formula<Variable>, sig: &Signature) -> bool {
    satisfies_in(h, t, f, sig.into())
}
