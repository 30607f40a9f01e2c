//! Exhaustive model enumeration.
//!
//! Candidate `t` valuations are enumerated by depth-first search with forward
//! checking: a formula is evaluated as soon as all of its variables are
//! assigned, and a formula with a single open variable filters that
//! variable's domain. Each classical model `t` is then tested for minimality
//! by a second search over the valuations `h ⊂ t`.
//!
//! Theories made of rules over a fully defined integer part (what the
//! clingcon translation produces) admit two exact shortcuts: every true atom
//! needs a rule body that holds, and minimality reduces to a least fixpoint.

use std::collections::BTreeSet;

use thiserror::Error;

use super::eval::{satisfies_in, Bounds};
use super::{
    ExtValue, Formula, HtInterpretation, HtcAtom, HtcTerm, HtcTheory, Valuation, Variable,
};
use crate::ast::Signature;

/// Default limit on the estimated search space.
pub const DEFAULT_BUDGET: f64 = 1e7;

#[derive(Debug, Clone, PartialEq)]
pub struct EngineOptions {
    /// Reject theories whose estimated search space exceeds this; `None`
    /// disables the check.
    pub budget: Option<f64>,
    /// Stop after this many stable models; 0 means all.
    pub max_models: usize,
    /// Use the support and fixpoint shortcuts when the theory allows them.
    pub shortcuts: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self {
            budget: Some(DEFAULT_BUDGET),
            max_models: 0,
            shortcuts: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("search space of about {estimate:.3e} valuations exceeds the budget of {budget:.3e}")]
    BudgetExceeded { estimate: f64, budget: f64 },
}

/// `(domain + 2)^|ints| · 2^|props|` for the signature.
pub fn statespace_estimate(sig: &Signature) -> f64 {
    let dom = sig.domain_size() as f64 + 2.0;
    dom.powf(sig.int_vars.len() as f64) * 2f64.powf(sig.prop_vars.len() as f64)
}

fn check_budget(sig: &Signature, opts: &EngineOptions) -> Result<(), EngineError> {
    if let Some(budget) = opts.budget {
        let estimate = statespace_estimate(sig);
        if estimate > budget {
            return Err(EngineError::BudgetExceeded { estimate, budget });
        }
    }
    Ok(())
}

struct Compiled {
    vars: Vec<Variable>,
    formulas: Vec<Formula<usize>>,
    fvars: Vec<Vec<usize>>,
    bounds: Bounds,
    n_int: usize,
}

impl Compiled {
    /// Integer variables first, then atoms; anything the signature misses is
    /// appended.
    fn new(th: &HtcTheory) -> Self {
        let mut vars: Vec<Variable> = th
            .signature
            .int_vars
            .iter()
            .cloned()
            .map(Variable::Int)
            .collect();
        let mut extra_ints = BTreeSet::new();
        let mut extra_props = BTreeSet::new();
        for f in &th.formulas {
            f.for_each_var(&mut |v: &Variable| match v {
                Variable::Int(x) if !th.signature.int_vars.contains(x) => {
                    extra_ints.insert(v.clone());
                }
                Variable::Prop(p) if !th.signature.prop_vars.contains(p) => {
                    extra_props.insert(v.clone());
                }
                _ => {}
            });
        }
        vars.extend(extra_ints);
        let n_int = vars.len();
        vars.extend(th.signature.prop_vars.iter().cloned().map(Variable::Prop));
        vars.extend(extra_props);
        let index: std::collections::HashMap<&Variable, usize> =
            vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let formulas: Vec<Formula<usize>> = th
            .formulas
            .iter()
            .map(|f| f.map(&mut |v: &Variable| index[v]))
            .collect();
        let mut c = Compiled {
            vars,
            formulas: Vec::new(),
            fvars: Vec::new(),
            bounds: (&th.signature).into(),
            n_int,
        };
        for f in formulas {
            c.push(f);
        }
        c
    }

    fn push(&mut self, f: Formula<usize>) {
        let mut vs = Vec::new();
        f.for_each_var(&mut |v: &usize| vs.push(*v));
        vs.sort_unstable();
        vs.dedup();
        self.formulas.push(f);
        self.fvars.push(vs);
    }

    fn t_domains(&self) -> Vec<Vec<ExtValue>> {
        let ints: Vec<ExtValue> = std::iter::once(ExtValue::Undef)
            .chain((self.bounds.min_int..=self.bounds.max_int).map(ExtValue::Int))
            .collect();
        (0..self.vars.len())
            .map(|i| {
                if i < self.n_int {
                    ints.clone()
                } else {
                    vec![ExtValue::Undef, ExtValue::True]
                }
            })
            .collect()
    }

    fn valuation(&self, values: &[ExtValue]) -> Valuation {
        let mut v = Valuation::new();
        for (var, val) in self.vars.iter().zip(values) {
            v.set(var.clone(), *val);
        }
        v
    }
}

/// Depth-first search over per-variable domains with forward checking.
/// `check(values, f)` must only read the variables of formula `f`; `visit`
/// returns false to stop the search.
struct Search<'a, C, V> {
    fvars: &'a [Vec<usize>],
    watch: Vec<Vec<usize>>,
    check: C,
    visit: V,
    values: Vec<ExtValue>,
    assigned: Vec<bool>,
    domains: Vec<Vec<ExtValue>>,
    open: Vec<usize>,
}

fn search<C, V>(fvars: &[Vec<usize>], domains: Vec<Vec<ExtValue>>, check: C, visit: V)
where
    C: FnMut(&[ExtValue], usize) -> bool,
    V: FnMut(&[ExtValue]) -> bool,
{
    let n = domains.len();
    let mut watch = vec![Vec::new(); n];
    for (f, vs) in fvars.iter().enumerate() {
        for &v in vs {
            watch[v].push(f);
        }
    }
    let mut s = Search {
        fvars,
        watch,
        check,
        visit,
        values: vec![ExtValue::Undef; n],
        assigned: vec![false; n],
        domains,
        open: fvars.iter().map(Vec::len).collect(),
    };
    for f in 0..fvars.len() {
        match s.open[f] {
            0 => {
                if !(s.check)(&s.values, f) {
                    return;
                }
            }
            1 => {
                let u = s.fvars[f][0];
                s.filter(u, f);
                if s.domains[u].is_empty() {
                    return;
                }
            }
            _ => {}
        }
    }
    s.descend();
}

impl<C, V> Search<'_, C, V>
where
    C: FnMut(&[ExtValue], usize) -> bool,
    V: FnMut(&[ExtValue]) -> bool,
{
    /// Removes the values of `u` that falsify `f`; returns the old domain if
    /// anything changed.
    fn filter(&mut self, u: usize, f: usize) -> Option<Vec<ExtValue>> {
        let old = self.domains[u].clone();
        let mut kept = Vec::with_capacity(old.len());
        for &val in &old {
            self.values[u] = val;
            if (self.check)(&self.values, f) {
                kept.push(val);
            }
        }
        self.values[u] = ExtValue::Undef;
        if kept.len() == old.len() {
            None
        } else {
            self.domains[u] = kept;
            Some(old)
        }
    }

    fn pick(&self) -> Option<usize> {
        let mut first = None;
        for v in 0..self.values.len() {
            if self.assigned[v] {
                continue;
            }
            if self.domains[v].len() <= 1 {
                return Some(v);
            }
            first.get_or_insert(v);
        }
        first
    }

    fn descend(&mut self) -> bool {
        let Some(v) = self.pick() else {
            return (self.visit)(&self.values);
        };
        let candidates = self.domains[v].clone();
        for val in candidates {
            self.values[v] = val;
            self.assigned[v] = true;
            for i in 0..self.watch[v].len() {
                let f = self.watch[v][i];
                self.open[f] -= 1;
            }
            let mut trail: Vec<(usize, Vec<ExtValue>)> = Vec::new();
            let mut ok = true;
            for i in 0..self.watch[v].len() {
                let f = self.watch[v][i];
                match self.open[f] {
                    0 => {
                        if !(self.check)(&self.values, f) {
                            ok = false;
                            break;
                        }
                    }
                    1 => {
                        let u = *self.fvars[f]
                            .iter()
                            .find(|&&u| !self.assigned[u])
                            .expect("one open variable");
                        if let Some(old) = self.filter(u, f) {
                            trail.push((u, old));
                        }
                        if self.domains[u].is_empty() {
                            ok = false;
                            break;
                        }
                    }
                    _ => {}
                }
            }
            let go_on = !ok || self.descend();
            for (u, old) in trail.into_iter().rev() {
                self.domains[u] = old;
            }
            for i in 0..self.watch[v].len() {
                let f = self.watch[v][i];
                self.open[f] += 1;
            }
            self.assigned[v] = false;
            self.values[v] = ExtValue::Undef;
            if !go_on {
                return false;
            }
        }
        true
    }
}

#[derive(Debug, Clone)]
enum Lit {
    Pos(HtcAtom<usize>),
    /// `¬a` or `¬¬a`; decided by the there-world alone.
    Neg(Formula<usize>),
}

#[derive(Debug, Clone)]
struct RuleShape {
    body: Vec<Lit>,
    head: Option<HtcAtom<usize>>,
}

fn shape_body(f: &Formula<usize>, out: &mut Vec<Lit>) -> bool {
    match f {
        _ if f.is_top() => true,
        Formula::And(l, r) => shape_body(l, out) && shape_body(r, out),
        Formula::Atom(a) => {
            out.push(Lit::Pos(a.clone()));
            true
        }
        Formula::Implies(inner, bot) if matches!(**bot, Formula::Falsity) => {
            let ok = match &**inner {
                Formula::Atom(_) => true,
                Formula::Implies(a, bot2) => {
                    matches!(**a, Formula::Atom(_)) && matches!(**bot2, Formula::Falsity)
                }
                _ => false,
            };
            if ok {
                out.push(Lit::Neg(f.clone()));
            }
            ok
        }
        _ => false,
    }
}

fn has_conditional(a: &HtcAtom<usize>) -> bool {
    matches!(a, HtcAtom::Agg { elements, .. } if elements.iter().any(|e| matches!(e, HtcTerm::Conditional { .. })))
}

/// Recognises theories made of rules `body → head` over a fully defined
/// integer part: every integer variable has a fact `&int(x)`, and no atom
/// has conditional terms.
fn rule_shapes(c: &Compiled) -> Option<Vec<RuleShape>> {
    let mut total = vec![false; c.n_int];
    let mut shapes = Vec::with_capacity(c.formulas.len());
    for f in &c.formulas {
        match f {
            Formula::Atom(HtcAtom::Int(x)) if *x < c.n_int => {
                total[*x] = true;
                shapes.push(RuleShape {
                    body: Vec::new(),
                    head: None,
                });
            }
            Formula::Implies(body, head) => {
                let mut lits = Vec::new();
                if !shape_body(body, &mut lits) {
                    return None;
                }
                let head = match &**head {
                    Formula::Falsity => None,
                    Formula::Atom(a) => Some(a.clone()),
                    _ => return None,
                };
                let atoms = lits
                    .iter()
                    .filter_map(|l| match l {
                        Lit::Pos(a) => Some(a),
                        Lit::Neg(_) => None,
                    })
                    .chain(head.iter());
                for a in atoms {
                    if has_conditional(a) {
                        return None;
                    }
                }
                shapes.push(RuleShape { body: lits, head });
            }
            _ => return None,
        }
    }
    total.iter().all(|&b| b).then_some(shapes)
}

fn is_prop_head(c: &Compiled, a: &HtcAtom<usize>) -> Option<usize> {
    match a {
        HtcAtom::Prop(p) if *p >= c.n_int => Some(*p),
        _ => None,
    }
}

/// `p → ⋁ bodies`, over the rules with head `p` other than `&df(p) → p`.
fn support_formulas(c: &Compiled, shapes: &[RuleShape]) -> Vec<Formula<usize>> {
    let mut bodies: Vec<Vec<Formula<usize>>> = vec![Vec::new(); c.vars.len()];
    for (f, shape) in c.formulas.iter().zip(shapes) {
        let Some(p) = shape.head.as_ref().and_then(|h| is_prop_head(c, h)) else {
            continue;
        };
        if matches!(shape.body.as_slice(), [Lit::Pos(HtcAtom::Df(q))] if *q == p) {
            continue;
        }
        let Formula::Implies(body, _) = f else {
            unreachable!()
        };
        bodies[p].push((**body).clone());
    }
    (c.n_int..c.vars.len())
        .map(|p| {
            Formula::implies(
                Formula::Atom(HtcAtom::Prop(p)),
                Formula::disj(std::mem::take(&mut bodies[p])),
            )
        })
        .collect()
}

/// With the integer part fixed, `t` is stable iff the least set of atoms
/// closed under the rules whose there-world conditions hold equals the true
/// atoms of `t`.
fn fixpoint_is_stable(c: &Compiled, shapes: &[RuleShape], t: &[ExtValue]) -> bool {
    let n = c.vars.len();
    let mut h: Vec<ExtValue> = t.to_vec();
    for v in h.iter_mut().skip(c.n_int) {
        *v = ExtValue::Undef;
    }
    let pos_prop = |a: &HtcAtom<usize>| match a {
        HtcAtom::Prop(p) | HtcAtom::Df(p) if *p >= c.n_int => Some(*p),
        _ => None,
    };
    let active: Vec<&RuleShape> = shapes
        .iter()
        .filter(|s| s.head.as_ref().and_then(|h| is_prop_head(c, h)).is_some())
        .filter(|s| {
            s.body.iter().all(|l| match l {
                Lit::Pos(a) if pos_prop(a).is_some() => true,
                Lit::Pos(a) => satisfies_in(t, t, &Formula::Atom(a.clone()), c.bounds),
                Lit::Neg(f) => satisfies_in(t, t, f, c.bounds),
            })
        })
        .collect();
    let mut changed = true;
    while changed {
        changed = false;
        for s in &active {
            let p = is_prop_head(c, s.head.as_ref().unwrap()).unwrap();
            if h[p] == ExtValue::True {
                continue;
            }
            let fires = s.body.iter().all(|l| match l {
                Lit::Pos(a) => pos_prop(a).is_none_or(|q| h[q] == ExtValue::True),
                Lit::Neg(_) => true,
            });
            if fires {
                h[p] = ExtValue::True;
                changed = true;
            }
        }
    }
    (c.n_int..n).all(|p| h[p] == t[p])
}

/// Searches for `h ⊂ t` with `⟨h,t⟩ ⊨ T`.
fn has_smaller_model(c: &Compiled, t: &[ExtValue]) -> bool {
    let domains: Vec<Vec<ExtValue>> = t
        .iter()
        .map(|&v| {
            if v.is_defined() {
                vec![ExtValue::Undef, v]
            } else {
                vec![ExtValue::Undef]
            }
        })
        .collect();
    let mut found = false;
    search(
        &c.fvars,
        domains,
        |h, f| satisfies_in(h, t, &c.formulas[f], c.bounds),
        |h| {
            if h != t {
                found = true;
                return false;
            }
            true
        },
    );
    found
}

pub fn stable_models(th: &HtcTheory) -> Result<Vec<Valuation>, EngineError> {
    stable_models_with(th, &EngineOptions::default())
}

/// Stable models of the theory in canonical order.
pub fn stable_models_with(
    th: &HtcTheory,
    opts: &EngineOptions,
) -> Result<Vec<Valuation>, EngineError> {
    check_budget(&th.signature, opts)?;
    let mut c = Compiled::new(th);
    let shapes = if opts.shortcuts {
        rule_shapes(&c)
    } else {
        None
    };
    let n_theory = c.formulas.len();
    if let Some(shapes) = &shapes {
        for f in support_formulas(&c, shapes) {
            c.push(f);
        }
    }
    let mut found = BTreeSet::new();
    search(
        &c.fvars,
        c.t_domains(),
        |t, f| satisfies_in(t, t, &c.formulas[f], c.bounds),
        |t| {
            let stable = match &shapes {
                Some(shapes) => fixpoint_is_stable(&c, &shapes[..n_theory], t),
                None => !has_smaller_model(&c, t),
            };
            if stable {
                found.insert(c.valuation(t));
            }
            opts.max_models == 0 || found.len() < opts.max_models
        },
    );
    Ok(found.into_iter().collect())
}

pub fn ht_models(th: &HtcTheory) -> Result<Vec<HtInterpretation>, EngineError> {
    ht_models_with(th, &EngineOptions::default())
}

/// Every top-level implication must hold classically in the there-world.
fn there_condition(f: &Formula<usize>, t: &[ExtValue], b: Bounds) -> bool {
    match f {
        Formula::Implies(..) => satisfies_in(t, t, f, b),
        Formula::And(l, r) => there_condition(l, t, b) && there_condition(r, t, b),
        _ => true,
    }
}

/// All ht-models `⟨h,t⟩` of the theory in canonical order.
pub fn ht_models_with(
    th: &HtcTheory,
    opts: &EngineOptions,
) -> Result<Vec<HtInterpretation>, EngineError> {
    check_budget(&th.signature, opts)?;
    let c = Compiled::new(th);
    let mut out = BTreeSet::new();
    search(
        &c.fvars,
        c.t_domains(),
        |t, f| there_condition(&c.formulas[f], t, c.bounds),
        |t| {
            let domains: Vec<Vec<ExtValue>> = t
                .iter()
                .map(|&v| {
                    if v.is_defined() {
                        vec![ExtValue::Undef, v]
                    } else {
                        vec![ExtValue::Undef]
                    }
                })
                .collect();
            let tv = c.valuation(t);
            search(
                &c.fvars,
                domains,
                |h, f| satisfies_in(h, t, &c.formulas[f], c.bounds),
                |h| {
                    out.insert(HtInterpretation {
                        h: c.valuation(h),
                        t: tv.clone(),
                    });
                    true
                },
            );
            true
        },
    );
    Ok(out.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{IntVarName, PropAtomName};

    fn sig(min: i64, max: i64) -> Signature {
        Signature::new(min, max).unwrap()
    }

    #[test]
    fn empty_theory_over_one_variable_has_five_ht_models() {
        let mut s = sig(0, 1);
        s.int_vars.insert(IntVarName::new("x").unwrap());
        let th = HtcTheory {
            formulas: vec![],
            signature: s,
        };
        assert_eq!(ht_models(&th).unwrap().len(), 5);
        assert_eq!(stable_models(&th).unwrap(), vec![Valuation::new()]);
    }

    #[test]
    fn falsity_has_no_models() {
        let th = HtcTheory {
            formulas: vec![Formula::Falsity],
            signature: sig(0, 1),
        };
        assert!(ht_models(&th).unwrap().is_empty());
        assert!(stable_models(&th).unwrap().is_empty());
    }

    #[test]
    fn budget_is_checked_first() {
        let mut s = sig(-100, 100);
        for i in 0..5 {
            s.int_vars.insert(IntVarName::new(format!("x{i}")).unwrap());
        }
        let th = HtcTheory {
            formulas: vec![],
            signature: s,
        };
        assert!(matches!(
            stable_models(&th),
            Err(EngineError::BudgetExceeded { .. })
        ));
        let opts = EngineOptions {
            budget: Some(1e12),
            max_models: 1,
            ..Default::default()
        };
        assert_eq!(stable_models_with(&th, &opts).unwrap().len(), 1);
    }

    #[test]
    fn even_loop_through_negation() {
        let a = || {
            Formula::Atom(HtcAtom::Prop(Variable::Prop(
                PropAtomName::new("a").unwrap(),
            )))
        };
        let b = || {
            Formula::Atom(HtcAtom::Prop(Variable::Prop(
                PropAtomName::new("b").unwrap(),
            )))
        };
        let mut s = sig(0, 0);
        s.prop_vars.insert(PropAtomName::new("a").unwrap());
        s.prop_vars.insert(PropAtomName::new("b").unwrap());
        let th = HtcTheory {
            formulas: vec![
                Formula::implies(Formula::not(b()), a()),
                Formula::implies(Formula::not(a()), b()),
            ],
            signature: s,
        };
        let models = stable_models(&th).unwrap();
        assert_eq!(
            models,
            vec![
                Valuation::new().with_prop("a"),
                Valuation::new().with_prop("b")
            ]
        );
        let plain = stable_models_with(
            &th,
            &EngineOptions {
                shortcuts: false,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(models, plain);
    }

    #[test]
    fn positive_loop_is_unfounded() {
        let a = || {
            Formula::Atom(HtcAtom::Prop(Variable::Prop(
                PropAtomName::new("a").unwrap(),
            )))
        };
        let mut s = sig(0, 0);
        s.prop_vars.insert(PropAtomName::new("a").unwrap());
        let th = HtcTheory {
            formulas: vec![Formula::implies(a(), a())],
            signature: s,
        };
        assert_eq!(stable_models(&th).unwrap(), vec![Valuation::new()]);
    }
}
