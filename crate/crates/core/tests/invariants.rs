use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use flingo_core::ast::*;
use flingo_core::difftest::*;
use flingo_core::emitter::{emit_clingcon, EmitOptions};
use flingo_core::parser::{parse_program, parse_program_with, render_program, ParseOptions};
use flingo_core::rewriter::{step1_guard_and_strictify, step8_rename_df, translate};
use flingo_core::semantics::{tau_translate, ExtValue, Valuation, Variable};

fn features() -> impl Strategy<Value = Features> {
    prop::array::uniform10(any::<bool>()).prop_map(|b| Features {
        sum: b[0],
        sus: b[1],
        min: b[2],
        max: b[3],
        df: b[4],
        in_choice: b[5],
        assign: b[6],
        conditional: b[7],
        negation: b[8],
        choice: b[9],
    })
}

prop_compose! {
    fn params()(
        seed in any::<u64>(),
        n_prop_vars in 0usize..=3,
        n_int_vars in 0usize..=3,
        n_rules in 0usize..=6,
        features in features(),
    ) -> GenParams {
        GenParams { seed, n_prop_vars, n_int_vars, n_rules, features, ..GenParams::default() }
    }
}

fn sig() -> Signature {
    Signature::new(-2, 2).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, ..ProptestConfig::default() })]

    #[test]
    fn negate_product_is_an_involution(k in -1000i64..1000, var in any::<bool>()) {
        let s = if var { ProductTerm::scaled(k, IntVarName::new("x").unwrap()) } else { ProductTerm::constant(k) };
        prop_assert_eq!(negate_product(&negate_product(&s)), s);
    }

    #[test]
    fn dual_relation_is_an_involution(r in prop::sample::select(Relation::ALL.to_vec())) {
        prop_assert_eq!(dual_relation(dual_relation(r)), r);
    }

    #[test]
    fn render_then_parse_is_identity(params in params()) {
        let p = random_program(&params);
        let text = render_program(&p);
        prop_assert_eq!(parse_program(&text).unwrap(), p);
    }

    #[test]
    fn signature_ignores_rule_order(params in params(), shuffle in any::<u64>()) {
        let p = random_program(&params);
        let mut rules = p.rules.clone();
        rules.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle));
        let q = Program::new(rules);
        prop_assert_eq!(signature_of(&p, -2, 2).unwrap(), signature_of(&q, -2, 2).unwrap());
    }

    #[test]
    fn parse_errors_point_into_the_input(params in params(), cut in any::<prop::sample::Index>(), junk in "[(){}:;=.&!<>,a-zA-Z0-9 ]{1,3}") {
        let text = render_program(&random_program(&params));
        let at = cut.index(text.len() + 1);
        let at = (0..=at).rev().find(|&i| text.is_char_boundary(i)).unwrap();
        let mutated = format!("{}{junk}{}", &text[..at], &text[at..]);
        if let Err(e) = parse_program(&mutated) {
            prop_assert!(e.span.start <= e.span.end && e.span.end <= mutated.len(), "{e:?}");
        }
    }

    #[test]
    fn translation_stays_in_the_target_fragment(params in params()) {
        let p = random_program(&params);
        let (out, trace) = translate(&p, &sig()).unwrap();
        prop_assert_eq!(trace.snapshots.len(), 9);
        prop_assert!(tau_translate(&out, &sig()).is_ok());
        let opts = EmitOptions::default();
        let text = emit_clingcon(&out, &opts).unwrap();
        prop_assert_eq!(&text, &emit_clingcon(&translate(&p, &sig()).unwrap().0, &opts).unwrap());
        prop_assert!(parse_program_with(&text, ParseOptions::internal()).is_ok());
    }

    #[test]
    fn fresh_names_never_meet_user_names(params in params()) {
        let p = random_program(&params);
        let user = signature_of(&p, -2, 2).unwrap();
        let (out, _) = translate(&p, &sig()).unwrap();
        let target = signature_of(&out, -2, 2).unwrap();
        for q in target.prop_vars.difference(&user.prop_vars) {
            prop_assert!(q.is_reserved() || q.as_str().starts_with("def("), "{q}");
        }
        for x in target.int_vars.difference(&user.int_vars) {
            prop_assert!(x.is_reserved(), "{x}");
        }
    }

    #[test]
    fn steps_one_and_eight_are_idempotent(params in params()) {
        let p = random_program(&params);
        let once = step1_guard_and_strictify(&p);
        prop_assert_eq!(step1_guard_and_strictify(&once), once);
        let (out, _) = translate(&p, &sig()).unwrap();
        prop_assert_eq!(step8_rename_df(&out), out);
    }

    #[test]
    fn projection_is_idempotent(props in prop::collection::vec(any::<bool>(), 3), ints in prop::collection::vec(prop::option::of(-2i64..=2), 3), defs in prop::collection::vec(any::<bool>(), 3)) {
        let mut s = sig();
        let mut m = Valuation::new();
        for (i, q) in ["a", "b", "__flingo_cond_1"].iter().enumerate() {
            let name = PropAtomName::new_internal(*q).unwrap();
            if !name.is_reserved() {
                s.prop_vars.insert(name.clone());
            }
            if props[i] {
                m.set(Variable::Prop(name), ExtValue::True);
            }
        }
        for (i, x) in ["x", "y", "z"].iter().enumerate() {
            let name = IntVarName::new(*x).unwrap();
            s.int_vars.insert(name.clone());
            if let Some(k) = ints[i] {
                m.set(Variable::Int(name), ExtValue::Int(k));
                if defs[i] {
                    m.set(Variable::Prop(PropAtomName::new_internal(format!("def({x})")).unwrap()), ExtValue::True);
                }
            }
        }
        let once = project_model(&m, &s);
        let mut again = once.clone();
        for x in &s.int_vars {
            if once.int(x).is_some() {
                again.set(Variable::Prop(PropAtomName::new_internal(format!("def({})", x.as_str())).unwrap()), ExtValue::True);
            }
        }
        prop_assert_eq!(project_model(&again, &s), once);
    }
}

#[test]
fn generator_covers_conditions_and_sums() {
    let mut both = 0;
    for seed in 0..1000 {
        let p = random_program(&GenParams {
            seed,
            ..GenParams::default()
        });
        let text = render_program(&p);
        both += usize::from(text.contains("&sum") && text.contains(" : "));
    }
    assert!(both > 100, "{both}");
}

#[test]
fn minimized_reproducers_still_mismatch() {
    let reports = fuzz(&GenParams::default(), 60, &DiffOptions::default()).unwrap();
    let mut seen = 0;
    for r in reports.iter().filter(|r| r.is_mismatch()) {
        let small = parse_program(r.reproducer.as_deref().unwrap()).unwrap();
        assert!(small.rules.len() <= parse_program(&r.program).unwrap().rules.len());
        assert!(diff_check(&small, &sig()).unwrap().is_mismatch(), "{r}");
        seen += 1;
    }
    assert!(seen > 0);
}

#[test]
fn fuzz_reports_come_back_in_seed_order() {
    let params = GenParams {
        seed: 7,
        ..GenParams::default()
    };
    let reports = fuzz(
        &params,
        20,
        &DiffOptions {
            minimize: false,
            ..DiffOptions::default()
        },
    )
    .unwrap();
    for (i, r) in reports.iter().enumerate() {
        let p = random_program(&GenParams {
            seed: 7 + i as u64,
            ..params.clone()
        });
        assert_eq!(r.program, render_program(&p));
    }
}
