use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{diff_check_with, DiffError, DiffOptions, DiffReport};
use crate::ast::*;

/// Which constructs the generator may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Features {
    pub sum: bool,
    pub sus: bool,
    pub min: bool,
    pub max: bool,
    pub df: bool,
    pub in_choice: bool,
    pub assign: bool,
    pub conditional: bool,
    pub negation: bool,
    pub choice: bool,
}

impl Features {
    pub const ALL: Features = Features {
        sum: true,
        sus: true,
        min: true,
        max: true,
        df: true,
        in_choice: true,
        assign: true,
        conditional: true,
        negation: true,
        choice: true,
    };

    /// Normal logic programs only.
    pub const PROPOSITIONAL: Features = Features {
        sum: false,
        sus: false,
        min: false,
        max: false,
        df: false,
        in_choice: false,
        assign: false,
        conditional: false,
        negation: true,
        choice: true,
    };

    /// What the clingcon reading accepts: `&sum` without conditions, plus
    /// negation and choice rules.
    pub const CLINGCON: Features = Features {
        sum: true,
        ..Features::PROPOSITIONAL
    };

    fn ops(&self) -> Vec<AggOp> {
        let mut ops = Vec::new();
        for (on, op) in [
            (self.sum, AggOp::Sum),
            (self.sus, AggOp::Sus),
            (self.min, AggOp::Min),
            (self.max, AggOp::Max),
        ] {
            if on {
                ops.push(op);
            }
        }
        ops
    }
}

impl Default for Features {
    fn default() -> Self {
        Features::ALL
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenParams {
    pub seed: u64,
    pub n_prop_vars: usize,
    pub n_int_vars: usize,
    pub n_rules: usize,
    pub max_body_len: usize,
    pub max_elems: usize,
    pub min_int: i64,
    pub max_int: i64,
    pub features: Features,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            seed: 0,
            n_prop_vars: 2,
            n_int_vars: 2,
            n_rules: 4,
            max_body_len: 2,
            max_elems: 2,
            min_int: -2,
            max_int: 2,
            features: Features::ALL,
        }
    }
}

const PROPS: [&str; 6] = ["a", "b", "c", "d", "e", "f"];
const INTS: [&str; 6] = ["x", "y", "z", "u", "v", "w"];

struct Gen<'a> {
    rng: ChaCha8Rng,
    params: &'a GenParams,
    props: Vec<PropAtomName>,
    ints: Vec<IntVarName>,
    ops: Vec<AggOp>,
}

fn name(pool: &[&str], prefix: char, i: usize) -> String {
    pool.get(i)
        .map_or_else(|| format!("{prefix}{i}"), |s| s.to_string())
}

impl Gen<'_> {
    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn prop(&mut self) -> PropAtomName {
        self.props.choose(&mut self.rng).expect("props").clone()
    }

    fn int(&mut self) -> IntVarName {
        self.ints.choose(&mut self.rng).expect("ints").clone()
    }

    fn constant(&mut self) -> i64 {
        self.rng
            .gen_range(self.params.min_int..=self.params.max_int)
    }

    fn product(&mut self) -> ProductTerm {
        if self.ints.is_empty() || self.chance(0.25) {
            return ProductTerm::constant(self.constant());
        }
        let coefficient = *[1, 1, 1, -1, 2].choose(&mut self.rng).expect("nonempty");
        ProductTerm::scaled(coefficient, self.int())
    }

    fn negation(&mut self) -> Negation {
        if !self.params.features.negation {
            return Negation::None;
        }
        match self.rng.gen_range(0..6) {
            0 | 1 => Negation::Not,
            2 => Negation::NotNot,
            _ => Negation::None,
        }
    }

    fn prop_literal(&mut self) -> Literal {
        Literal {
            atom: Atom::Prop(self.prop()),
            negation: self.negation(),
        }
    }

    fn term(&mut self) -> FlingoTerm {
        let head = self.product();
        if self.params.features.conditional && !self.props.is_empty() && self.chance(0.35) {
            let n = self.rng.gen_range(1..=2);
            let condition = (0..n).map(|_| self.prop_literal()).collect();
            FlingoTerm::Conditional(ConditionalTerm { head, condition })
        } else {
            FlingoTerm::Product(head)
        }
    }

    fn aggregate(&mut self, assign: bool) -> Option<AggregateAtom> {
        let op = *self.ops.choose(&mut self.rng)?;
        let n = self
            .rng
            .gen_range(0..=self.params.max_elems)
            .max(usize::from(assign));
        let elements = (0..n).map(|_| self.term()).collect();
        let relation = *Relation::ALL.choose(&mut self.rng).expect("nonempty");
        let rhs = if assign {
            ProductTerm::var(self.int())
        } else if self.chance(0.6) {
            ProductTerm::constant(self.constant())
        } else {
            self.product()
        };
        let mut a = AggregateAtom::new(op, elements, relation, rhs);
        a.assign = assign;
        if assign {
            a.relation = Relation::Eq;
        }
        Some(a)
    }

    fn constraint_atom(&mut self) -> Option<Atom> {
        if self.ints.is_empty() {
            return None;
        }
        if self.params.features.df && self.chance(0.2) {
            return Some(Atom::df(self.int()));
        }
        self.aggregate(false).map(Atom::agg)
    }

    fn body(&mut self, min_len: usize) -> Vec<Literal> {
        let n = self
            .rng
            .gen_range(min_len.min(self.params.max_body_len)..=self.params.max_body_len);
        (0..n)
            .filter_map(|_| {
                if !self.props.is_empty() && (self.ints.is_empty() || self.chance(0.55)) {
                    Some(self.prop_literal())
                } else {
                    let atom = self.constraint_atom()?;
                    Some(Literal {
                        atom,
                        negation: self.negation(),
                    })
                }
            })
            .collect()
    }

    fn head(&mut self) -> Head {
        let f = self.params.features;
        let has_props = !self.props.is_empty();
        let has_ints = !self.ints.is_empty();
        let roll = self.rng.gen_range(0..100);
        match roll {
            0..=9 => Head::Falsity,
            10..=24 if f.choice && has_props => Head::Choice(self.prop()),
            25..=34 if f.in_choice && has_ints => {
                let lo = self.constant();
                let hi = self.constant();
                let (lower, upper) = if self.chance(0.8) {
                    (
                        ProductTerm::constant(lo.min(hi)),
                        ProductTerm::constant(lo.max(hi)),
                    )
                } else {
                    (self.product(), self.product())
                };
                Head::Atom(Atom::Constraint(ConstraintAtom::In {
                    lower,
                    upper,
                    target: ProductTerm::var(self.int()),
                }))
            }
            35..=44 if f.assign && has_ints && !self.ops.is_empty() => {
                Head::Atom(Atom::agg(self.aggregate(true).expect("ops")))
            }
            45..=69 if has_ints && (!self.ops.is_empty() || f.df) => match self.constraint_atom() {
                Some(a) => Head::Atom(a),
                None => Head::Falsity,
            },
            _ if has_props => Head::Atom(Atom::Prop(self.prop())),
            _ => self.constraint_atom().map_or(Head::Falsity, Head::Atom),
        }
    }
}

/// A random ground program; the same parameters always give the same program.
pub fn random_program(params: &GenParams) -> Program {
    let f = params.features;
    let uses_ints = f.sum || f.sus || f.min || f.max || f.df || f.in_choice || f.assign;
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(params.seed),
        params,
        props: (0..params.n_prop_vars)
            .map(|i| PropAtomName::new(name(&PROPS, 'p', i)).expect("valid"))
            .collect(),
        ints: if uses_ints {
            (0..params.n_int_vars)
                .map(|i| IntVarName::new(name(&INTS, 'x', i)).expect("valid"))
                .collect()
        } else {
            Vec::new()
        },
        ops: f.ops(),
    };
    let rules = (0..params.n_rules)
        .map(|_| {
            let head = g.head();
            // an integrity constraint without a body would make the program inconsistent
            let body = g.body(usize::from(head == Head::Falsity));
            Rule::new(head, body)
        })
        .collect();
    Program::new(rules)
}

/// Generates and checks `count` programs with seeds `params.seed + i`, in
/// parallel; reports come back in seed order.
pub fn fuzz(
    params: &GenParams,
    count: usize,
    opts: &DiffOptions,
) -> Result<Vec<DiffReport>, DiffError> {
    let sig = Signature::new(params.min_int, params.max_int)
        .map_err(crate::rewriter::RewriteError::from)?;
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let p = random_program(&GenParams {
                seed: params.seed.wrapping_add(i),
                ..params.clone()
            });
            diff_check_with(&p, &sig, opts)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_program, render_program};

    #[test]
    fn same_seed_same_program() {
        let p = GenParams {
            seed: 42,
            ..Default::default()
        };
        assert_eq!(random_program(&p), random_program(&p));
        let q = GenParams {
            seed: 43,
            ..Default::default()
        };
        assert_ne!(
            render_program(&random_program(&p)),
            render_program(&random_program(&q))
        );
    }

    #[test]
    fn propositional_features_give_normal_programs() {
        for seed in 0..50 {
            let p = random_program(&GenParams {
                seed,
                features: Features::PROPOSITIONAL,
                ..Default::default()
            });
            let sig = signature_of(&p, -2, 2).unwrap();
            assert!(sig.int_vars.is_empty());
        }
    }

    #[test]
    fn generated_programs_reparse() {
        for seed in 0..300 {
            let p = random_program(&GenParams {
                seed,
                ..Default::default()
            });
            let text = render_program(&p);
            assert_eq!(parse_program(&text).unwrap(), p, "{text}");
            assert!(signature_of(&p, -2, 2).is_ok());
        }
    }

    #[test]
    fn count_zero_is_empty() {
        assert!(fuzz(&GenParams::default(), 0, &DiffOptions::default())
            .unwrap()
            .is_empty());
    }
}
