//! Abstract syntax shared by every pass: ground flingo programs, the clingcon
//! target fragment, and signatures.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Prefix reserved for symbols introduced by the rewriter.
pub const RESERVED_PREFIX: &str = "__flingo_";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NameError {
    #[error("empty name")]
    Empty,
    #[error("`{0}` is not a ground lowercase identifier")]
    Malformed(String),
    #[error("`{0}` uses the reserved prefix `{RESERVED_PREFIX}`")]
    Reserved(String),
}

/// Checks that `s` is a ground clingo-style term: `_*[a-z][A-Za-z0-9_']*`
/// optionally applied to a parenthesised list of ground terms or integers.
fn validate_name(s: &str, allow_reserved: bool) -> Result<(), NameError> {
    if s.is_empty() {
        return Err(NameError::Empty);
    }
    let bytes = s.as_bytes();
    let mut pos = 0;
    if !ground_term(bytes, &mut pos, false) || pos != bytes.len() {
        return Err(NameError::Malformed(s.to_string()));
    }
    if !allow_reserved && mentions_reserved(s) {
        return Err(NameError::Reserved(s.to_string()));
    }
    Ok(())
}

/// True if any identifier inside `s` starts with the reserved prefix.
pub fn mentions_reserved(s: &str) -> bool {
    s.match_indices(RESERVED_PREFIX)
        .any(|(i, _)| i == 0 || matches!(s.as_bytes()[i - 1], b'(' | b','))
}

fn ground_term(b: &[u8], pos: &mut usize, allow_int: bool) -> bool {
    if allow_int {
        let start = *pos;
        if *pos < b.len() && b[*pos] == b'-' {
            *pos += 1;
        }
        let digits = *pos;
        while *pos < b.len() && b[*pos].is_ascii_digit() {
            *pos += 1;
        }
        if *pos > digits {
            return true;
        }
        *pos = start;
    }
    while *pos < b.len() && b[*pos] == b'_' {
        *pos += 1;
    }
    if *pos >= b.len() || !b[*pos].is_ascii_lowercase() {
        return false;
    }
    while *pos < b.len() && (b[*pos].is_ascii_alphanumeric() || b[*pos] == b'_' || b[*pos] == b'\'')
    {
        *pos += 1;
    }
    if *pos < b.len() && b[*pos] == b'(' {
        *pos += 1;
        loop {
            if !ground_term(b, pos, true) {
                return false;
            }
            match b.get(*pos) {
                Some(b',') => *pos += 1,
                Some(b')') => {
                    *pos += 1;
                    return true;
                }
                _ => return false,
            }
        }
    }
    true
}

macro_rules! name_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(String);

        impl $name {
            /// Validates a user-facing name; reserved-prefix names are rejected.
            pub fn new(s: impl Into<String>) -> Result<Self, NameError> {
                let s = s.into();
                validate_name(&s, false)?;
                Ok(Self(s))
            }

            /// Like [`Self::new`] but admits the rewriter's reserved prefix.
            pub fn new_internal(s: impl Into<String>) -> Result<Self, NameError> {
                let s = s.into();
                validate_name(&s, true)?;
                Ok(Self(s))
            }

            pub(crate) fn from_trusted(s: String) -> Self {
                Self(s)
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }

            pub fn is_reserved(&self) -> bool {
                mentions_reserved(&self.0)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

name_type!(
    /// An integer variable such as `x` or `tariff(steel,eu)`.
    IntVarName
);
name_type!(
    /// A propositional atom name; same lexical shape as [`IntVarName`].
    PropAtomName
);

/// `n`, `x`, or `n*x`. A bare variable has coefficient 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProductTerm {
    pub coefficient: i64,
    pub variable: Option<IntVarName>,
}

impl ProductTerm {
    pub fn constant(n: i64) -> Self {
        Self {
            coefficient: n,
            variable: None,
        }
    }

    pub fn var(x: IntVarName) -> Self {
        Self {
            coefficient: 1,
            variable: Some(x),
        }
    }

    pub fn scaled(n: i64, x: IntVarName) -> Self {
        Self {
            coefficient: n,
            variable: Some(x),
        }
    }
}

/// Flips the sign of the coefficient; the variable is kept.
pub fn negate_product(s: &ProductTerm) -> ProductTerm {
    ProductTerm {
        coefficient: s.coefficient.wrapping_neg(),
        variable: s.variable.clone(),
    }
}

/// `s : l_1, ..., l_n`. The condition holds propositional literals in source
/// programs; the rewriter may add `&df` literals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConditionalTerm {
    pub head: ProductTerm,
    pub condition: Vec<Literal>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FlingoTerm {
    Product(ProductTerm),
    Conditional(ConditionalTerm),
}

impl FlingoTerm {
    pub fn product(&self) -> &ProductTerm {
        match self {
            FlingoTerm::Product(p) => p,
            FlingoTerm::Conditional(c) => &c.head,
        }
    }

    pub fn negated(&self) -> FlingoTerm {
        match self {
            FlingoTerm::Product(p) => FlingoTerm::Product(negate_product(p)),
            FlingoTerm::Conditional(c) => FlingoTerm::Conditional(ConditionalTerm {
                head: negate_product(&c.head),
                condition: c.condition.clone(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AggOp {
    Sum,
    Sus,
    Min,
    Max,
}

impl AggOp {
    pub const ALL: [AggOp; 4] = [AggOp::Sum, AggOp::Sus, AggOp::Min, AggOp::Max];

    pub fn keyword(self) -> &'static str {
        match self {
            AggOp::Sum => "sum",
            AggOp::Sus => "sus",
            AggOp::Min => "min",
            AggOp::Max => "max",
        }
    }

    /// The neutral element `0^fun` over the domain `[min_int, max_int]`.
    pub fn neutral(self, min_int: i64, max_int: i64) -> i64 {
        match self {
            AggOp::Sum | AggOp::Sus => 0,
            AggOp::Min => max_int,
            AggOp::Max => min_int,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ne,
    Lt,
    Gt,
    Ge,
}

impl Relation {
    pub const ALL: [Relation; 6] = [
        Relation::Le,
        Relation::Eq,
        Relation::Ne,
        Relation::Lt,
        Relation::Gt,
        Relation::Ge,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ne => "!=",
            Relation::Lt => "<",
            Relation::Gt => ">",
            Relation::Ge => ">=",
        }
    }

    pub fn holds<T: Ord>(self, lhs: T, rhs: T) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ne => lhs != rhs,
            Relation::Lt => lhs < rhs,
            Relation::Gt => lhs > rhs,
            Relation::Ge => lhs >= rhs,
        }
    }
}

/// The relation `≻` with `a ≺ b  ⟺  -a ≻ -b`.
pub fn dual_relation(r: Relation) -> Relation {
    match r {
        Relation::Le => Relation::Ge,
        Relation::Ge => Relation::Le,
        Relation::Lt => Relation::Gt,
        Relation::Gt => Relation::Lt,
        Relation::Eq | Relation::Ne => r,
    }
}

/// Head/body annotation attached to surrogate atoms by the rewriter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    Head,
    Body,
}

impl Tag {
    pub fn keyword(self) -> &'static str {
        match self {
            Tag::Head => "head",
            Tag::Body => "body",
        }
    }
}

/// `&fun{t_1; ...; t_n} ≺ s`, or `&fun{...} =: s` when `assign` is set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AggregateAtom {
    pub op: AggOp,
    pub tag: Option<Tag>,
    pub elements: Vec<FlingoTerm>,
    pub relation: Relation,
    pub rhs: ProductTerm,
    pub assign: bool,
}

impl AggregateAtom {
    pub fn new(op: AggOp, elements: Vec<FlingoTerm>, relation: Relation, rhs: ProductTerm) -> Self {
        Self {
            op,
            tag: None,
            elements,
            relation,
            rhs,
            assign: false,
        }
    }

    pub fn has_conditions(&self) -> bool {
        self.elements
            .iter()
            .any(|e| matches!(e, FlingoTerm::Conditional(_)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstraintAtom {
    Aggregate(AggregateAtom),
    /// `&df{x}`
    Defined(IntVarName),
    /// `&in{lower..upper} =: target`
    In {
        lower: ProductTerm,
        upper: ProductTerm,
        target: ProductTerm,
    },
}

impl ConstraintAtom {
    pub fn is_assignment(&self) -> bool {
        match self {
            ConstraintAtom::Aggregate(a) => a.assign,
            ConstraintAtom::In { .. } => true,
            ConstraintAtom::Defined(_) => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Prop(PropAtomName),
    Constraint(ConstraintAtom),
}

impl Atom {
    pub fn df(x: IntVarName) -> Atom {
        Atom::Constraint(ConstraintAtom::Defined(x))
    }

    pub fn agg(a: AggregateAtom) -> Atom {
        Atom::Constraint(ConstraintAtom::Aggregate(a))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Negation {
    #[default]
    None,
    Not,
    NotNot,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub negation: Negation,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Self {
            atom,
            negation: Negation::None,
        }
    }

    pub fn neg(atom: Atom) -> Self {
        Self {
            atom,
            negation: Negation::Not,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Head {
    Atom(Atom),
    Falsity,
    /// `{p}`
    Choice(PropAtomName),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub head: Head,
    pub body: Vec<Literal>,
}

impl Rule {
    pub fn new(head: Head, body: Vec<Literal>) -> Self {
        Self { head, body }
    }

    pub fn fact(atom: Atom) -> Self {
        Self {
            head: Head::Atom(atom),
            body: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Program {
    pub rules: Vec<Rule>,
}

impl Program {
    pub fn new(rules: Vec<Rule>) -> Self {
        Self { rules }
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

/// Propositional and integer variables plus the integer domain bounds.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    pub prop_vars: BTreeSet<PropAtomName>,
    pub int_vars: BTreeSet<IntVarName>,
    pub min_int: i64,
    pub max_int: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("`{0}` is used both as a propositional atom and as an integer variable")]
    KindConflict(String),
    #[error("empty integer domain [{min_int}, {max_int}]")]
    EmptyDomain { min_int: i64, max_int: i64 },
}

impl Signature {
    pub fn new(min_int: i64, max_int: i64) -> Result<Self, SignatureError> {
        if min_int > max_int {
            return Err(SignatureError::EmptyDomain { min_int, max_int });
        }
        Ok(Self {
            prop_vars: BTreeSet::new(),
            int_vars: BTreeSet::new(),
            min_int,
            max_int,
        })
    }

    /// Number of integer values in the domain.
    pub fn domain_size(&self) -> u128 {
        (self.max_int as i128 - self.min_int as i128 + 1) as u128
    }

    /// Union of the variable sets; bounds are taken from `self`.
    pub fn union(&self, other: &Signature) -> Result<Signature, SignatureError> {
        let mut out = self.clone();
        out.prop_vars.extend(other.prop_vars.iter().cloned());
        out.int_vars.extend(other.int_vars.iter().cloned());
        out.check_disjoint()?;
        Ok(out)
    }

    pub(crate) fn check_disjoint(&self) -> Result<(), SignatureError> {
        for p in &self.prop_vars {
            if self.int_vars.iter().any(|x| x.as_str() == p.as_str()) {
                return Err(SignatureError::KindConflict(p.to_string()));
            }
        }
        Ok(())
    }
}

/// Collects the variables of `p`, split by the role they play.
pub fn signature_of(p: &Program, min_int: i64, max_int: i64) -> Result<Signature, SignatureError> {
    let mut sig = Signature::new(min_int, max_int)?;
    for rule in &p.rules {
        match &rule.head {
            Head::Atom(a) => collect_atom(a, &mut sig),
            Head::Falsity => {}
            Head::Choice(q) => {
                sig.prop_vars.insert(q.clone());
            }
        }
        for lit in &rule.body {
            collect_atom(&lit.atom, &mut sig);
        }
    }
    sig.check_disjoint()?;
    Ok(sig)
}

fn collect_atom(atom: &Atom, sig: &mut Signature) {
    match atom {
        Atom::Prop(q) => {
            sig.prop_vars.insert(q.clone());
        }
        Atom::Constraint(c) => {
            for x in constraint_int_vars(c) {
                sig.int_vars.insert(x.clone());
            }
            if let ConstraintAtom::Aggregate(a) = c {
                for e in &a.elements {
                    if let FlingoTerm::Conditional(ct) = e {
                        for l in &ct.condition {
                            collect_atom(&l.atom, sig);
                        }
                    }
                }
            }
        }
    }
}

/// Integer variables occurring in elements and right-hand side, in order of
/// first occurrence, without duplicates. Conditions are not inspected.
pub fn constraint_int_vars(c: &ConstraintAtom) -> Vec<&IntVarName> {
    let mut out: Vec<&IntVarName> = Vec::new();
    match c {
        ConstraintAtom::Aggregate(a) => {
            for e in &a.elements {
                push_var(&mut out, e.product());
            }
            push_var(&mut out, &a.rhs);
        }
        ConstraintAtom::Defined(x) => {
            if !out.contains(&x) {
                out.push(x);
            }
        }
        ConstraintAtom::In {
            lower,
            upper,
            target,
        } => {
            push_var(&mut out, lower);
            push_var(&mut out, upper);
            push_var(&mut out, target);
        }
    }
    out
}

fn push_var<'a>(out: &mut Vec<&'a IntVarName>, p: &'a ProductTerm) {
    if let Some(x) = &p.variable {
        if !out.contains(&x) {
            out.push(x);
        }
    }
}

/// Integer variables of a sequence of product terms, first occurrence order.
pub fn product_vars<'a>(terms: impl IntoIterator<Item = &'a ProductTerm>) -> Vec<IntVarName> {
    let mut out: Vec<&IntVarName> = Vec::new();
    for t in terms {
        push_var(&mut out, t);
    }
    out.into_iter().cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(s: &str) -> IntVarName {
        IntVarName::new(s).unwrap()
    }

    #[test]
    fn names_validate() {
        assert!(IntVarName::new("tariff(steel,eu)").is_ok());
        assert!(IntVarName::new("f(g(a),-3)").is_ok());
        assert!(IntVarName::new("X").is_err());
        assert!(IntVarName::new("").is_err());
        assert!(IntVarName::new("f(X)").is_err());
        assert!(matches!(
            IntVarName::new("__flingo_y_1"),
            Err(NameError::Reserved(_))
        ));
        assert!(matches!(
            IntVarName::new("def(__flingo_y_1)"),
            Err(NameError::Reserved(_))
        ));
        assert!(IntVarName::new_internal("__flingo_y_1").is_ok());
        assert!(IntVarName::new("_a").is_ok());
    }

    #[test]
    fn negate_product_examples() {
        assert_eq!(
            negate_product(&ProductTerm::scaled(3, x("x"))),
            ProductTerm::scaled(-3, x("x"))
        );
        assert_eq!(
            negate_product(&ProductTerm::constant(0)),
            ProductTerm::constant(0)
        );
        assert_eq!(
            negate_product(&ProductTerm::var(x("x"))),
            ProductTerm::scaled(-1, x("x"))
        );
    }

    #[test]
    fn dual_relation_table() {
        assert_eq!(dual_relation(Relation::Le), Relation::Ge);
        assert_eq!(dual_relation(Relation::Eq), Relation::Eq);
        assert_eq!(dual_relation(Relation::Lt), Relation::Gt);
        assert_eq!(dual_relation(Relation::Ne), Relation::Ne);
        for r in Relation::ALL {
            assert_eq!(dual_relation(dual_relation(r)), r);
        }
    }

    #[test]
    fn dual_relation_matches_negation() {
        for r in Relation::ALL {
            for a in -3i64..=3 {
                for b in -3i64..=3 {
                    assert_eq!(r.holds(a, b), dual_relation(r).holds(-a, -b));
                }
            }
        }
    }

    #[test]
    fn neutral_elements() {
        assert_eq!(AggOp::Sum.neutral(-5, 5), 0);
        assert_eq!(AggOp::Sus.neutral(-5, 5), 0);
        assert_eq!(AggOp::Min.neutral(-5, 5), 5);
        assert_eq!(AggOp::Max.neutral(-5, 5), -5);
    }

    #[test]
    fn empty_program_signature() {
        let sig = signature_of(&Program::default(), -1, 1).unwrap();
        assert!(sig.prop_vars.is_empty());
        assert!(sig.int_vars.is_empty());
        assert!(signature_of(&Program::default(), 2, 1).is_err());
    }
}
