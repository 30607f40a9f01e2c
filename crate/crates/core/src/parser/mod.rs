//! Concrete syntax for ground flingo programs and the clingcon target fragment.
//!
//! ```text
//! program := (rule ".")*
//! rule    := head (":-" body)? | ":-" body
//! head    := atom | "{" propatom "}"
//! body    := literal ("," literal)*
//! literal := ("not" ("not")?)? atom
//! catom   := "&" op "{" elems "}" (rel product | "=:" product)
//!          | "&df" "{" intvar "}"
//!          | "&in" "{" product ".." product "}" "=:" product
//! product := int | intvar | int "*" intvar | "-" product
//! ```
//!
//! In internal mode the parser also accepts the rewriter's output: reserved
//! `__flingo_` names, tagged atoms such as `&sus(head){...}`, and `&df`
//! literals inside conditions.

mod lexer;
mod render;

use std::fmt;

use thiserror::Error;

use crate::ast::*;
use lexer::{tokenize, Spanned, Token};

pub use render::{render_atom, render_literal, render_product, render_program, render_rule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub expected: Vec<String>,
}

impl ParseError {
    fn new(span: SourceSpan, message: String, expected: Vec<String>) -> Self {
        Self {
            span,
            message,
            expected,
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}",
            self.span.line, self.span.column, self.message
        )?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Accept rewriter-only syntax (reserved names, tags, `&df` in conditions).
    pub internal: bool,
}

impl ParseOptions {
    pub fn internal() -> Self {
        Self { internal: true }
    }
}

/// Parses user-facing flingo source.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    parse_program_with(text, ParseOptions::default())
}

pub fn parse_program_with(text: &str, opts: ParseOptions) -> Result<Program, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        opts,
    };
    let mut rules = Vec::new();
    while !p.at(&Token::Eof) {
        rules.push(p.rule()?);
    }
    Ok(Program::new(rules))
}

/// The integer bounds declared by a `% bounds: <min> <max>` comment line, if
/// the text has one.
pub fn bounds_directive(text: &str) -> Option<(i64, i64)> {
    text.lines().find_map(|line| {
        let rest = line
            .trim()
            .strip_prefix('%')?
            .trim()
            .strip_prefix("bounds:")?;
        let mut it = rest.split_whitespace().map(str::parse::<i64>);
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(lo)), Some(Ok(hi)), None) => Some((lo, hi)),
            _ => None,
        }
    })
}

/// Parses a single atom, as found in emitter legends.
pub fn parse_atom_with(text: &str, opts: ParseOptions) -> Result<Atom, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        opts,
    };
    let atom = p.atom(Position::Head)?;
    p.expect(&Token::Eof)?;
    Ok(atom)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Position {
    Head,
    Body,
    Condition,
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
    opts: ParseOptions,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].token
    }

    fn peek2(&self) -> &Token {
        let i = (self.pos + 1).min(self.tokens.len() - 1);
        &self.tokens[i].token
    }

    fn span(&self) -> SourceSpan {
        self.tokens[self.pos].span
    }

    fn at(&self, t: &Token) -> bool {
        self.peek() == t
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].token.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Token) -> bool {
        if self.at(t) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        let tok = self.peek();
        if let Token::Variable(v) = tok {
            return Err(ParseError::new(
                self.span(),
                format!("`{v}` looks like a first-order variable; first-order variables unsupported (ground the program first)"),
                expected.iter().map(|s| s.to_string()).collect(),
            ));
        }
        Err(ParseError::new(
            self.span(),
            format!("unexpected {tok}"),
            expected.iter().map(|s| format!("`{s}`")).collect(),
        ))
    }

    fn expect(&mut self, t: &Token) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            self.error(&[t.text()])
        }
    }

    fn rule(&mut self) -> Result<Rule, ParseError> {
        let head = if self.at(&Token::If) {
            Head::Falsity
        } else if self.eat(&Token::LBrace) {
            let q = self.name()?;
            self.expect(&Token::RBrace)?;
            Head::Choice(self.prop_name(q)?)
        } else {
            Head::Atom(self.atom(Position::Head)?)
        };
        let mut body = Vec::new();
        if self.eat(&Token::If) {
            if !self.at(&Token::Dot) {
                body.push(self.literal(Position::Body)?);
                while self.eat(&Token::Comma) {
                    body.push(self.literal(Position::Body)?);
                }
            }
        } else if head == Head::Falsity {
            return self.error(&[":-"]);
        }
        if !self.eat(&Token::Dot) {
            return if matches!(head, Head::Falsity) || !body.is_empty() {
                self.error(&[",", "."])
            } else {
                self.error(&[":-", "."])
            };
        }
        Ok(Rule { head, body })
    }

    fn literal(&mut self, pos: Position) -> Result<Literal, ParseError> {
        let mut negation = Negation::None;
        if self.is_not() {
            self.bump();
            negation = Negation::Not;
            if self.is_not() {
                self.bump();
                negation = Negation::NotNot;
            }
        }
        let start = self.span();
        let atom = self.atom(pos)?;
        if let Atom::Constraint(c) = &atom {
            if c.is_assignment() {
                return Err(ParseError::new(
                    start,
                    "`=:` and `&in` are only allowed in rule heads".into(),
                    vec![],
                ));
            }
        }
        Ok(Literal { atom, negation })
    }

    fn is_not(&self) -> bool {
        matches!(self.peek(), Token::Ident(s) if s == "not")
            && !matches!(
                self.peek2(),
                Token::LParen
                    | Token::Dot
                    | Token::Comma
                    | Token::Semi
                    | Token::RBrace
                    | Token::If
                    | Token::Eof
            )
    }

    fn atom(&mut self, pos: Position) -> Result<Atom, ParseError> {
        match self.peek() {
            Token::Amp => self.constraint_atom(pos),
            Token::Ident(_) => {
                let n = self.name()?;
                Ok(Atom::Prop(self.prop_name(n)?))
            }
            _ => self.error(&["&", "identifier"]),
        }
    }

    fn constraint_atom(&mut self, pos: Position) -> Result<Atom, ParseError> {
        let start = self.span();
        self.expect(&Token::Amp)?;
        let kw = match self.bump() {
            Token::Ident(s) => s,
            _ => {
                self.pos -= 1;
                return self.error(&["sum", "sus", "min", "max", "df", "in"]);
            }
        };
        if pos == Position::Condition && kw != "df" {
            return Err(ParseError::new(
                start,
                "conditions may only contain propositional literals".into(),
                vec![],
            ));
        }
        match kw.as_str() {
            "df" => {
                if pos == Position::Condition && !self.opts.internal {
                    return Err(ParseError::new(
                        start,
                        "conditions may only contain propositional literals".into(),
                        vec![],
                    ));
                }
                self.expect(&Token::LBrace)?;
                let x = self.name()?;
                let x = self.int_name(x)?;
                self.expect(&Token::RBrace)?;
                Ok(Atom::df(x))
            }
            "in" => {
                self.expect(&Token::LBrace)?;
                let lower = self.product()?;
                self.expect(&Token::DotDot)?;
                let upper = self.product()?;
                self.expect(&Token::RBrace)?;
                self.expect(&Token::Assign)?;
                let target = self.product()?;
                Ok(Atom::Constraint(ConstraintAtom::In {
                    lower,
                    upper,
                    target,
                }))
            }
            "sum" | "sus" | "min" | "max" => {
                let op = match kw.as_str() {
                    "sum" => AggOp::Sum,
                    "sus" => AggOp::Sus,
                    "min" => AggOp::Min,
                    _ => AggOp::Max,
                };
                let mut tag = None;
                if self.opts.internal && self.eat(&Token::LParen) {
                    tag = Some(match self.bump() {
                        Token::Ident(s) if s == "head" => Tag::Head,
                        Token::Ident(s) if s == "body" => Tag::Body,
                        _ => {
                            self.pos -= 1;
                            return self.error(&["head", "body"]);
                        }
                    });
                    self.expect(&Token::RParen)?;
                }
                self.expect(&Token::LBrace)?;
                let mut elements = Vec::new();
                if !self.at(&Token::RBrace) {
                    elements.push(self.term()?);
                    while self.eat(&Token::Semi) {
                        elements.push(self.term()?);
                    }
                }
                if !self.at(&Token::RBrace) {
                    return self.error(&[";", "}", ":"]);
                }
                self.bump();
                let (relation, assign) = match self.peek() {
                    Token::Assign => (Relation::Eq, true),
                    Token::Le => (Relation::Le, false),
                    Token::Eq => (Relation::Eq, false),
                    Token::Ne => (Relation::Ne, false),
                    Token::Lt => (Relation::Lt, false),
                    Token::Gt => (Relation::Gt, false),
                    Token::Ge => (Relation::Ge, false),
                    _ => return self.error(&["<=", "=", "!=", "<", ">", ">=", "=:"]),
                };
                self.bump();
                let rhs = self.product()?;
                Ok(Atom::agg(AggregateAtom {
                    op,
                    tag,
                    elements,
                    relation,
                    rhs,
                    assign,
                }))
            }
            other => Err(ParseError::new(
                start,
                format!("unknown constraint atom `&{other}`"),
                ["sum", "sus", "min", "max", "df", "in"]
                    .iter()
                    .map(|s| format!("`{s}`"))
                    .collect(),
            )),
        }
    }

    fn term(&mut self) -> Result<FlingoTerm, ParseError> {
        let head = self.product()?;
        if !self.eat(&Token::Colon) {
            return Ok(FlingoTerm::Product(head));
        }
        let mut condition = vec![self.literal(Position::Condition)?];
        while self.eat(&Token::Comma) {
            condition.push(self.literal(Position::Condition)?);
        }
        Ok(FlingoTerm::Conditional(ConditionalTerm { head, condition }))
    }

    fn product(&mut self) -> Result<ProductTerm, ParseError> {
        let start = self.span();
        if self.eat(&Token::Minus) {
            if let Token::Int(n) = *self.peek() {
                self.bump();
                let value = -(n as i128);
                let coefficient = i64::try_from(value).map_err(|_| out_of_range(start))?;
                return self.product_tail(coefficient, start);
            }
            let inner = self.product()?;
            let coefficient = inner
                .coefficient
                .checked_neg()
                .ok_or_else(|| out_of_range(start))?;
            return Ok(ProductTerm {
                coefficient,
                variable: inner.variable,
            });
        }
        match self.peek().clone() {
            Token::Int(n) => {
                self.bump();
                let coefficient = i64::try_from(n).map_err(|_| out_of_range(start))?;
                self.product_tail(coefficient, start)
            }
            Token::Ident(_) => {
                let n = self.name()?;
                Ok(ProductTerm::var(self.int_name(n)?))
            }
            _ => self.error(&["integer", "identifier", "-"]),
        }
    }

    fn product_tail(
        &mut self,
        coefficient: i64,
        _start: SourceSpan,
    ) -> Result<ProductTerm, ParseError> {
        if self.eat(&Token::Star) {
            let n = self.name()?;
            let x = self.int_name(n)?;
            Ok(ProductTerm::scaled(coefficient, x))
        } else {
            Ok(ProductTerm::constant(coefficient))
        }
    }

    /// A ground name such as `tariff(steel,eu)`, returned in canonical text form.
    fn name(&mut self) -> Result<(String, SourceSpan), ParseError> {
        let start = self.span();
        let mut out = String::new();
        self.name_into(&mut out)?;
        Ok((out, start))
    }

    fn name_into(&mut self, out: &mut String) -> Result<(), ParseError> {
        match self.peek().clone() {
            Token::Ident(s) => {
                self.bump();
                out.push_str(&s);
                if self.eat(&Token::LParen) {
                    out.push('(');
                    loop {
                        self.argument_into(out)?;
                        if self.eat(&Token::Comma) {
                            out.push(',');
                        } else {
                            self.expect(&Token::RParen)?;
                            out.push(')');
                            break;
                        }
                    }
                }
                Ok(())
            }
            _ => self.error(&["identifier"]),
        }
    }

    fn argument_into(&mut self, out: &mut String) -> Result<(), ParseError> {
        if self.eat(&Token::Minus) {
            out.push('-');
            return match self.bump() {
                Token::Int(n) => {
                    out.push_str(&n.to_string());
                    Ok(())
                }
                _ => {
                    self.pos -= 1;
                    self.error(&["integer"])
                }
            };
        }
        if let Token::Int(n) = *self.peek() {
            self.bump();
            out.push_str(&n.to_string());
            return Ok(());
        }
        self.name_into(out)
    }

    fn check_reserved(&self, name: &str, span: SourceSpan) -> Result<(), ParseError> {
        if !self.opts.internal && mentions_reserved(name) {
            return Err(ParseError::new(
                span,
                format!("`{name}` uses the reserved prefix `{RESERVED_PREFIX}`"),
                vec![],
            ));
        }
        Ok(())
    }

    fn prop_name(&self, (s, span): (String, SourceSpan)) -> Result<PropAtomName, ParseError> {
        self.check_reserved(&s, span)?;
        Ok(PropAtomName::from_trusted(s))
    }

    fn int_name(&self, (s, span): (String, SourceSpan)) -> Result<IntVarName, ParseError> {
        self.check_reserved(&s, span)?;
        Ok(IntVarName::from_trusted(s))
    }
}

fn out_of_range(span: SourceSpan) -> ParseError {
    ParseError::new(span, "integer literal is out of range".into(), vec![])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(s: &str) -> IntVarName {
        IntVarName::new(s).unwrap()
    }
    fn p(s: &str) -> PropAtomName {
        PropAtomName::new(s).unwrap()
    }

    #[test]
    fn bounds_comment() {
        assert_eq!(bounds_directive("% bounds: -5 5\na."), Some((-5, 5)));
        assert_eq!(bounds_directive("a.\n  %bounds: 0 30"), Some((0, 30)));
        assert_eq!(bounds_directive("% bounds: 1"), None);
        assert_eq!(bounds_directive("a."), None);
    }

    #[test]
    fn program_nine() {
        let prog = parse_program("{a}. &sum{x} = 1 :- a.").unwrap();
        assert_eq!(prog.rules.len(), 2);
        assert_eq!(prog.rules[0], Rule::new(Head::Choice(p("a")), vec![]));
        assert_eq!(
            prog.rules[1],
            Rule::new(
                Head::Atom(Atom::agg(AggregateAtom::new(
                    AggOp::Sum,
                    vec![FlingoTerm::Product(ProductTerm::var(x("x")))],
                    Relation::Eq,
                    ProductTerm::constant(1)
                ))),
                vec![Literal::pos(Atom::Prop(p("a")))]
            )
        );
    }

    #[test]
    fn empty_input() {
        assert_eq!(parse_program("").unwrap(), Program::default());
        assert_eq!(
            parse_program("  % only a comment\n").unwrap(),
            Program::default()
        );
    }

    #[test]
    fn conditional_term() {
        let prog = parse_program("a :- &sum{ x : p } = 0. p.").unwrap();
        let Atom::Constraint(ConstraintAtom::Aggregate(agg)) = &prog.rules[0].body[0].atom else {
            panic!()
        };
        assert_eq!(
            agg.elements,
            vec![FlingoTerm::Conditional(ConditionalTerm {
                head: ProductTerm::var(x("x")),
                condition: vec![Literal::pos(Atom::Prop(p("p")))]
            })]
        );
    }

    #[test]
    fn products() {
        let prog = parse_program("&sum{ -x; 3*y; -2*z; -4; 5; --w } = -z.").unwrap();
        let Head::Atom(Atom::Constraint(ConstraintAtom::Aggregate(agg))) = &prog.rules[0].head
        else {
            panic!()
        };
        let got: Vec<_> = agg.elements.iter().map(|e| e.product().clone()).collect();
        assert_eq!(
            got,
            vec![
                ProductTerm::scaled(-1, x("x")),
                ProductTerm::scaled(3, x("y")),
                ProductTerm::scaled(-2, x("z")),
                ProductTerm::constant(-4),
                ProductTerm::constant(5),
                ProductTerm::scaled(1, x("w")),
            ]
        );
        assert_eq!(agg.rhs, ProductTerm::scaled(-1, x("z")));
    }

    #[test]
    fn structured_names() {
        let prog = parse_program("&sum{ tariff(steel, eu) } = 0.").unwrap();
        let sig = signature_of(&prog, 0, 1).unwrap();
        assert!(sig.int_vars.contains(&x("tariff(steel,eu)")));
    }

    #[test]
    fn assignment_and_choice_heads() {
        let prog = parse_program("&sus{x;y} =: z. &in{1..3} =: w.").unwrap();
        assert!(matches!(
            &prog.rules[0].head,
            Head::Atom(Atom::Constraint(ConstraintAtom::Aggregate(a))) if a.assign
        ));
        assert!(matches!(
            &prog.rules[1].head,
            Head::Atom(Atom::Constraint(ConstraintAtom::In { .. }))
        ));
    }

    #[test]
    fn assignment_in_body_rejected() {
        let err = parse_program("a :- &sus{x} =: z.").unwrap_err();
        assert!(err.message.contains("only allowed in rule heads"));
        assert!(parse_program("a :- &in{1..2} =: z.").is_err());
    }

    #[test]
    fn first_order_variables_rejected() {
        let err = parse_program("p(X) :- q(X).").unwrap_err();
        assert!(
            err.message.contains("first-order variables unsupported"),
            "{err}"
        );
        let err = parse_program("&sum{ X } = 1.").unwrap_err();
        assert!(
            err.message.contains("first-order variables unsupported"),
            "{err}"
        );
    }

    #[test]
    fn reserved_prefix() {
        assert!(parse_program("__flingo_cond_1.").is_err());
        assert!(parse_program("&sum{ __flingo_y_1 } = 1.").is_err());
        assert!(parse_program("a :- def(__flingo_y_1).").is_err());
        assert!(parse_program_with("__flingo_cond_1.", ParseOptions::internal()).is_ok());
    }

    #[test]
    fn tags_only_internal() {
        assert!(parse_program("a :- &sus(body){ x } = 1.").is_err());
        let prog =
            parse_program_with("a :- &sus(body){ x } = 1.", ParseOptions::internal()).unwrap();
        let Atom::Constraint(ConstraintAtom::Aggregate(agg)) = &prog.rules[0].body[0].atom else {
            panic!()
        };
        assert_eq!(agg.tag, Some(Tag::Body));
    }

    #[test]
    fn df_in_condition_only_internal() {
        assert!(parse_program("a :- &sum{ x : &df{x} } = 1.").is_err());
        assert!(
            parse_program_with("a :- &sum{ x : &df{x} } = 1.", ParseOptions::internal()).is_ok()
        );
        assert!(parse_program("a :- &sum{ x : &sum{y}=1 } = 1.").is_err());
    }

    #[test]
    fn negations_and_constraints() {
        let prog = parse_program(":- not a. b :- not not c, d. :- .").unwrap();
        assert_eq!(prog.rules[0].head, Head::Falsity);
        assert_eq!(prog.rules[0].body[0].negation, Negation::Not);
        assert_eq!(prog.rules[1].body[0].negation, Negation::NotNot);
        assert_eq!(prog.rules[1].body[1].negation, Negation::None);
        assert!(prog.rules[2].body.is_empty());
    }

    #[test]
    fn errors_carry_spans_and_expectations() {
        let text = "a :- b\nc.";
        let err = parse_program(text).unwrap_err();
        assert_eq!(err.span.line, 2);
        assert!(err.span.end <= text.len());
        assert!(err.expected.iter().any(|e| e.contains('.')));

        let err = parse_program("&sum{x} 3.").unwrap_err();
        assert!(err.expected.iter().any(|e| e.contains("<=")));
        assert!(parse_program("a").is_err());
        assert!(parse_program("&foo{x} = 1.").is_err());
        assert!(parse_program("&sum{ 2*3 } = 1.").is_err());
        assert!(parse_program("&sum{ x*2 } = 1.").is_err());
    }

    #[test]
    fn extreme_literals() {
        let prog = parse_program("&sum{ -9223372036854775808*x } = 9223372036854775807.").unwrap();
        let Head::Atom(Atom::Constraint(ConstraintAtom::Aggregate(agg))) = &prog.rules[0].head
        else {
            panic!()
        };
        assert_eq!(agg.elements[0].product().coefficient, i64::MIN);
        assert!(parse_program("&sum{ 9223372036854775808 } = 1.").is_err());
    }
}
