mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use flingo_core::ast::*;
use flingo_core::semantics::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

prop_compose! {
    fn clingcon()(seed in any::<u64>(), n_int in 0usize..=2, n_prop in 0usize..=2, n_rules in 1usize..=4) -> Program {
        clingcon_program(seed, n_int, n_prop, n_rules)
    }
}

fn cl(p: &Program, sig: &Signature) -> HtcTheory {
    tau_translate(p, sig).unwrap()
}

fn fl(p: &Program, sig: &Signature) -> HtcTheory {
    mu_translate(p, sig).unwrap()
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn clingcon_ht_models_are_flingo_ht_models(p in clingcon()) {
        let sig = sig_of(&p);
        let cl_models = ht_models(&cl(&p, &sig)).unwrap();
        let fl_models = ht_models(&fl(&star(&p), &sig)).unwrap();
        for m in &cl_models {
            prop_assert!(fl_models.contains(m), "{m:?}");
        }
    }

    #[test]
    fn defined_flingo_stable_models_are_clingcon_stable_models(p in clingcon()) {
        let sig = sig_of(&p);
        let cl_models = stable_models(&cl(&p, &sig)).unwrap();
        for m in stable_models(&fl(&star(&p), &sig)).unwrap() {
            if all_ints_defined(&m, &sig) {
                prop_assert!(cl_models.contains(&m), "{m:?}");
            }
        }
    }

    #[test]
    fn self_facts_make_flingo_agree_with_clingcon(p in clingcon()) {
        let sig = sig_of(&p);
        let f = self_facts(&sig);
        let c = cl(&p, &sig);
        let a = fl(&union(&star(&p), &f), &sig);
        let b = fl(&union(&p, &f), &sig);
        let stable = stable_models(&c).unwrap();
        prop_assert_eq!(&stable, &stable_models(&a).unwrap());
        prop_assert_eq!(&stable, &stable_models(&b).unwrap());
        let ht = ht_models(&c).unwrap();
        prop_assert_eq!(&ht, &ht_models(&a).unwrap());
        prop_assert_eq!(&ht, &ht_models(&b).unwrap());
    }

    #[test]
    fn clingcon_is_monotonic_in_constraint_facts(p in clingcon(), seed in any::<u64>(), n in 1usize..=2) {
        let f = clingcon_program(seed, 2, 0, n);
        let pf = union(&p, &f);
        let sig = sig_of(&pf);
        let smaller = stable_models(&cl(&p, &sig)).unwrap();
        for m in stable_models(&cl(&pf, &sig)).unwrap() {
            prop_assert!(smaller.contains(&m), "{m:?}");
        }
    }

    #[test]
    fn stable_models_are_models(seed in any::<u64>()) {
        let p = flingo_core::difftest::random_program(&flingo_core::difftest::GenParams {
            seed,
            features: flingo_core::difftest::Features { in_choice: false, assign: false, max: false, ..Default::default() },
            ..Default::default()
        });
        let th = fl(&p, &bounds());
        for t in stable_models(&th).unwrap() {
            for f in &th.formulas {
                prop_assert!(satisfies(&t, &t, f, &th.signature));
            }
        }
    }
}

fn var_name(i: usize, ints: bool) -> Variable {
    if ints {
        Variable::Int(IntVarName::new(["x", "y"][i]).unwrap())
    } else {
        Variable::Prop(PropAtomName::new(["a", "b"][i]).unwrap())
    }
}

fn basic() -> impl Strategy<Value = Basic<Variable>> {
    prop_oneof![
        (MIN..=MAX).prop_map(Basic::constant),
        (prop::sample::select(vec![1i64, -1, 2]), 0usize..2).prop_map(|(k, i)| Basic {
            coefficient: k,
            variable: Some(var_name(i, true))
        }),
    ]
}

fn strict_formula() -> impl Strategy<Value = Formula<Variable>> {
    let leaf = prop_oneof![
        Just(Formula::Falsity),
        (0usize..2).prop_map(|i| Formula::Atom(HtcAtom::Prop(var_name(i, false)))),
        (0usize..2).prop_map(|i| Formula::Atom(HtcAtom::Df(var_name(i, true)))),
        (
            prop::collection::vec(basic(), 0..=2),
            prop::sample::select(Relation::ALL.to_vec()),
            basic()
        )
            .prop_map(|(es, relation, rhs)| Formula::Atom(HtcAtom::Agg {
                kind: AggKind::Sus,
                elements: es.into_iter().map(HtcTerm::Basic).collect(),
                relation,
                rhs,
            })),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone())
                .prop_map(|(l, r)| Formula::And(Box::new(l), Box::new(r))),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::Or(Box::new(l), Box::new(r))),
            (inner.clone(), inner).prop_map(|(l, r)| Formula::implies(l, r)),
        ]
    })
}

fn strict_sig() -> Signature {
    small_sig()
}

proptest! {
    #![proptest_config(config(1000))]

    #[test]
    fn strict_fragment_is_persistent(f in strict_formula(), seed in any::<u64>()) {
        let sig = strict_sig();
        let (h, t) = random_ht(&mut ChaCha8Rng::seed_from_u64(seed), &sig);
        if satisfies(&h, &t, &f, &sig) {
            prop_assert!(satisfies(&t, &t, &f, &sig));
        }
    }

    #[test]
    fn sum_and_sus_agree_when_conditions_are_decided(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (c1, c2) = random_atom_pair(&mut rng);
        let sig = strict_sig();
        let (mut h, mut t) = random_ht(&mut rng, &sig);
        for x in &sig.int_vars {
            let k = t.int(x).unwrap_or(0);
            h.set(Variable::Int(x.clone()), ExtValue::Int(k));
            t.set(Variable::Int(x.clone()), ExtValue::Int(k));
        }
        prop_assume!(!has_undecided_condition(&c1, &h, &t, &sig));
        prop_assert_eq!(satisfies(&h, &t, &mu_of(&c1, &sig), &sig), satisfies(&h, &t, &mu_of(&c2, &sig), &sig));
    }
}

#[test]
fn sum_and_sus_differ_on_an_undecided_condition() {
    let sig = strict_sig();
    let p =
        flingo_core::parser::parse_program(":- &sum{ 1 : a } = 0. :- &sus{ 1 : a } = 0.").unwrap();
    let atom = |i: usize| match &p.rules[i].body[0].atom {
        Atom::Constraint(ConstraintAtom::Aggregate(a)) => a.clone(),
        _ => unreachable!(),
    };
    let (h, t) = (Valuation::new(), Valuation::new().with_prop("a"));
    assert!(has_undecided_condition(&atom(0), &h, &t, &sig));
    assert!(satisfies(&h, &t, &mu_of(&atom(0), &sig), &sig));
    assert!(!satisfies(&h, &t, &mu_of(&atom(1), &sig), &sig));
}

#[test]
fn sum_is_not_persistent() {
    let sig = Signature::new(-20, 20).unwrap();
    let x = Variable::Int(IntVarName::new("x").unwrap());
    let f = Formula::Atom(HtcAtom::Agg {
        kind: AggKind::Sum,
        elements: vec![HtcTerm::Basic(Basic {
            coefficient: 1,
            variable: Some(x),
        })],
        relation: Relation::Le,
        rhs: Basic::constant(3),
    });
    let (h, t) = (Valuation::new(), Valuation::new().with_int("x", 10));
    assert!(satisfies(&h, &t, &f, &sig));
    assert!(!satisfies(&t, &t, &f, &sig));
}
