use std::fmt::Write;

use crate::ast::*;

pub fn render_product(p: &ProductTerm) -> String {
    match (&p.variable, p.coefficient) {
        (None, n) => n.to_string(),
        (Some(x), 1) => x.to_string(),
        (Some(x), -1) => format!("-{x}"),
        (Some(x), n) => format!("{n}*{x}"),
    }
}

fn render_term(t: &FlingoTerm) -> String {
    match t {
        FlingoTerm::Product(p) => render_product(p),
        FlingoTerm::Conditional(c) => {
            let cond: Vec<String> = c.condition.iter().map(render_literal).collect();
            format!("{} : {}", render_product(&c.head), cond.join(", "))
        }
    }
}

pub fn render_atom(a: &Atom) -> String {
    match a {
        Atom::Prop(p) => p.to_string(),
        Atom::Constraint(ConstraintAtom::Defined(x)) => format!("&df{{{x}}}"),
        Atom::Constraint(ConstraintAtom::In {
            lower,
            upper,
            target,
        }) => format!(
            "&in{{ {}..{} }} =: {}",
            render_product(lower),
            render_product(upper),
            render_product(target)
        ),
        Atom::Constraint(ConstraintAtom::Aggregate(agg)) => {
            let mut s = format!("&{}", agg.op.keyword());
            if let Some(tag) = agg.tag {
                let _ = write!(s, "({})", tag.keyword());
            }
            if agg.elements.is_empty() {
                s.push_str("{}");
            } else {
                let elems: Vec<String> = agg.elements.iter().map(render_term).collect();
                let _ = write!(s, "{{ {} }}", elems.join("; "));
            }
            let rel = if agg.assign {
                "=:"
            } else {
                agg.relation.symbol()
            };
            let _ = write!(s, " {rel} {}", render_product(&agg.rhs));
            s
        }
    }
}

pub fn render_literal(l: &Literal) -> String {
    let prefix = match l.negation {
        Negation::None => "",
        Negation::Not => "not ",
        Negation::NotNot => "not not ",
    };
    format!("{prefix}{}", render_atom(&l.atom))
}

pub fn render_rule(r: &Rule) -> String {
    let head = match &r.head {
        Head::Atom(a) => render_atom(a),
        Head::Falsity => String::new(),
        Head::Choice(p) => format!("{{{p}}}"),
    };
    let body: Vec<String> = r.body.iter().map(render_literal).collect();
    match (&r.head, body.is_empty()) {
        (Head::Falsity, true) => ":- .".to_string(),
        (Head::Falsity, false) => format!(":- {}.", body.join(", ")),
        (_, true) => format!("{head}."),
        (_, false) => format!("{head} :- {}.", body.join(", ")),
    }
}

/// One rule per line; the empty program renders as the empty string.
pub fn render_program(p: &Program) -> String {
    let mut out = String::new();
    for r in &p.rules {
        out.push_str(&render_rule(r));
        out.push('\n');
    }
    out
}
