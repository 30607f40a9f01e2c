//! Reference semantics: valuations, satisfaction in the logic of
//! here-and-there with constraints, the two translations into theories, and
//! exhaustive enumeration of stable models over a finite integer domain.

mod engine;
mod eval;
mod translate;

use std::collections::BTreeMap;
use std::fmt;

use crate::ast::{IntVarName, PropAtomName, Relation, Signature};

pub use engine::{
    ht_models, ht_models_with, stable_models, stable_models_with, statespace_estimate, EngineError,
    EngineOptions, DEFAULT_BUDGET,
};
pub use eval::{
    atom_holds, eval_cterm, satisfies, satisfies_in, term_value, term_value_defaulted, Bounds, Env,
};
pub use translate::{mu_translate, surrogate_name, tau_translate, TranslateError};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variable {
    Prop(PropAtomName),
    Int(IntVarName),
}

impl Variable {
    pub fn name(&self) -> &str {
        match self {
            Variable::Prop(p) => p.as_str(),
            Variable::Int(x) => x.as_str(),
        }
    }

    pub fn is_int(&self) -> bool {
        matches!(self, Variable::Int(_))
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An element of the extended domain: an integer, the truth mark, or
/// the undefined value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum ExtValue {
    Int(i64),
    True,
    #[default]
    Undef,
}

impl ExtValue {
    pub fn is_defined(self) -> bool {
        self != ExtValue::Undef
    }
}

/// A valuation over a signature. Variables not stored are undefined, so two
/// valuations are equal exactly when their sets of defined pairs are.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Valuation {
    pairs: BTreeMap<Variable, ExtValue>,
}

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, v: &Variable) -> ExtValue {
        self.pairs.get(v).copied().unwrap_or(ExtValue::Undef)
    }

    pub fn set(&mut self, v: Variable, value: ExtValue) {
        if value.is_defined() {
            self.pairs.insert(v, value);
        } else {
            self.pairs.remove(&v);
        }
    }

    pub fn with(mut self, v: Variable, value: ExtValue) -> Self {
        self.set(v, value);
        self
    }

    pub fn with_prop(self, p: &str) -> Self {
        let name = PropAtomName::new_internal(p).expect("valid atom name");
        self.with(Variable::Prop(name), ExtValue::True)
    }

    pub fn with_int(self, x: &str, k: i64) -> Self {
        let name = IntVarName::new_internal(x).expect("valid variable name");
        self.with(Variable::Int(name), ExtValue::Int(k))
    }

    pub fn prop(&self, p: &PropAtomName) -> bool {
        self.get(&Variable::Prop(p.clone())) == ExtValue::True
    }

    pub fn int(&self, x: &IntVarName) -> Option<i64> {
        match self.get(&Variable::Int(x.clone())) {
            ExtValue::Int(k) => Some(k),
            _ => None,
        }
    }

    /// The defined pairs, in variable order.
    pub fn pairs(&self) -> impl Iterator<Item = (&Variable, ExtValue)> {
        self.pairs.iter().map(|(k, v)| (k, *v))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `self ⊆ other` on the set-of-pairs view.
    pub fn is_subset_of(&self, other: &Valuation) -> bool {
        self.pairs
            .iter()
            .all(|(k, v)| other.pairs.get(k) == Some(v))
    }

    /// True if every defined value respects the variable's kind and the bounds.
    pub fn is_well_formed(&self, sig: &Signature) -> bool {
        self.pairs.iter().all(|(k, v)| match (k, v) {
            (Variable::Prop(_), ExtValue::True) => true,
            (Variable::Int(_), ExtValue::Int(n)) => sig.min_int <= *n && *n <= sig.max_int,
            _ => false,
        })
    }
}

/// An ht-interpretation `⟨h,t⟩` with `h ⊆ t`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HtInterpretation {
    pub h: Valuation,
    pub t: Valuation,
}

impl HtInterpretation {
    /// Returns `None` unless `h ⊆ t`.
    pub fn new(h: Valuation, t: Valuation) -> Option<Self> {
        h.is_subset_of(&t).then_some(Self { h, t })
    }
}

/// `n` or `n*x`, the basic terms of the logic.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Basic<V> {
    pub coefficient: i64,
    pub variable: Option<V>,
}

impl<V> Basic<V> {
    pub fn constant(n: i64) -> Self {
        Self {
            coefficient: n,
            variable: None,
        }
    }

    pub fn map<W>(&self, f: &mut impl FnMut(&V) -> W) -> Basic<W> {
        Basic {
            coefficient: self.coefficient,
            variable: self.variable.as_ref().map(f),
        }
    }
}

/// A basic term or a conditional term `(s1 | s2 : φ)`. `None` branches stand
/// for the undefined value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum HtcTerm<V> {
    Basic(Basic<V>),
    Conditional {
        then: Option<Basic<V>>,
        otherwise: Option<Basic<V>>,
        cond: Box<Formula<V>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AggKind {
    Sum,
    Sus,
    Min,
}

impl AggKind {
    pub fn keyword(self) -> &'static str {
        match self {
            AggKind::Sum => "sum",
            AggKind::Sus => "sus",
            AggKind::Min => "min",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum HtcAtom<V> {
    Prop(V),
    Df(V),
    Int(V),
    Agg {
        kind: AggKind,
        elements: Vec<HtcTerm<V>>,
        relation: Relation,
        rhs: Basic<V>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula<V> {
    Falsity,
    Atom(HtcAtom<V>),
    And(Box<Formula<V>>, Box<Formula<V>>),
    Or(Box<Formula<V>>, Box<Formula<V>>),
    Implies(Box<Formula<V>>, Box<Formula<V>>),
}

impl<V> Formula<V> {
    /// `⊤`, written as `⊥ → ⊥`.
    pub fn top() -> Self {
        Formula::Implies(Box::new(Formula::Falsity), Box::new(Formula::Falsity))
    }

    pub fn atom(a: HtcAtom<V>) -> Self {
        Formula::Atom(a)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Self) -> Self {
        Formula::Implies(Box::new(f), Box::new(Formula::Falsity))
    }

    pub fn implies(l: Self, r: Self) -> Self {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    /// Left-nested conjunction; the empty conjunction is `⊤`.
    pub fn conj(items: impl IntoIterator<Item = Self>) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::top(),
            Some(first) => it.fold(first, |acc, f| Formula::And(Box::new(acc), Box::new(f))),
        }
    }

    pub fn disj(items: impl IntoIterator<Item = Self>) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::Falsity,
            Some(first) => it.fold(first, |acc, f| Formula::Or(Box::new(acc), Box::new(f))),
        }
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Formula::Implies(l, r) if matches!(**l, Formula::Falsity) && matches!(**r, Formula::Falsity))
    }

    pub fn map<W>(&self, f: &mut impl FnMut(&V) -> W) -> Formula<W> {
        match self {
            Formula::Falsity => Formula::Falsity,
            Formula::Atom(a) => Formula::Atom(map_atom(a, f)),
            Formula::And(l, r) => Formula::And(Box::new(l.map(f)), Box::new(r.map(f))),
            Formula::Or(l, r) => Formula::Or(Box::new(l.map(f)), Box::new(r.map(f))),
            Formula::Implies(l, r) => Formula::Implies(Box::new(l.map(f)), Box::new(r.map(f))),
        }
    }

    /// Visits every variable occurrence, conditions included.
    pub fn for_each_var(&self, f: &mut impl FnMut(&V)) {
        match self {
            Formula::Falsity => {}
            Formula::Atom(a) => atom_vars(a, f),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.for_each_var(f);
                r.for_each_var(f);
            }
        }
    }
}

fn map_atom<V, W>(a: &HtcAtom<V>, f: &mut impl FnMut(&V) -> W) -> HtcAtom<W> {
    match a {
        HtcAtom::Prop(v) => HtcAtom::Prop(f(v)),
        HtcAtom::Df(v) => HtcAtom::Df(f(v)),
        HtcAtom::Int(v) => HtcAtom::Int(f(v)),
        HtcAtom::Agg {
            kind,
            elements,
            relation,
            rhs,
        } => HtcAtom::Agg {
            kind: *kind,
            elements: elements
                .iter()
                .map(|t| match t {
                    HtcTerm::Basic(b) => HtcTerm::Basic(b.map(f)),
                    HtcTerm::Conditional {
                        then,
                        otherwise,
                        cond,
                    } => HtcTerm::Conditional {
                        then: then.as_ref().map(|b| b.map(f)),
                        otherwise: otherwise.as_ref().map(|b| b.map(f)),
                        cond: Box::new(cond.map(f)),
                    },
                })
                .collect(),
            relation: *relation,
            rhs: rhs.map(f),
        },
    }
}

fn atom_vars<V>(a: &HtcAtom<V>, f: &mut impl FnMut(&V)) {
    match a {
        HtcAtom::Prop(v) | HtcAtom::Df(v) | HtcAtom::Int(v) => f(v),
        HtcAtom::Agg { elements, rhs, .. } => {
            for t in elements {
                match t {
                    HtcTerm::Basic(b) => b.variable.iter().for_each(&mut *f),
                    HtcTerm::Conditional {
                        then,
                        otherwise,
                        cond,
                    } => {
                        for b in then.iter().chain(otherwise.iter()) {
                            b.variable.iter().for_each(&mut *f);
                        }
                        cond.for_each_var(f);
                    }
                }
            }
            rhs.variable.iter().for_each(f);
        }
    }
}

/// A set of formulas together with the signature they range over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HtcTheory {
    pub formulas: Vec<Formula<Variable>>,
    pub signature: Signature,
}

impl HtcTheory {
    /// Variables mentioned by the formulas but missing from the signature.
    pub fn unknown_variables(&self) -> Vec<Variable> {
        let mut out = Vec::new();
        for f in &self.formulas {
            f.for_each_var(&mut |v: &Variable| {
                let known = match v {
                    Variable::Prop(p) => self.signature.prop_vars.contains(p),
                    Variable::Int(x) => self.signature.int_vars.contains(x),
                };
                if !known && !out.contains(v) {
                    out.push(v.clone());
                }
            });
        }
        out
    }
}
