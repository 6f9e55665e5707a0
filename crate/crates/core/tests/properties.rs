use cardqe::harness::{generate_axioms, random_formula, FormulaSpec, SchemaInstanceSpec};
use cardqe::model::{eval_qf, random_assignment, EpBounds, SampleMode};
use cardqe::qe::{decide, eliminate_all, eliminate_all_dnf, equivalent, Theory};
use cardqe::syntax::{parse, print};
use cardqe::{Formula, Level, Var};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn level() -> impl Strategy<Value = Level> {
    prop_oneof![Just(Level::L1), Just(Level::L2), Just(Level::L3)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printing_round_trips(seed in any::<u64>(), level in level()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_formula(&mut rng, &FormulaSpec::new(level));
        let text = print(&f);
        prop_assert_eq!(parse(&text).unwrap(), f.rectify());
    }

    #[test]
    fn both_engines_agree(seed in any::<u64>(), level in level()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut spec = FormulaSpec::new(level);
        spec.max_size = 8;
        let f = random_formula(&mut rng, &spec);
        let theory = Theory::for_level(level);
        let a = eliminate_all(&f, theory).unwrap();
        let b = eliminate_all_dnf(&f, theory).unwrap();
        prop_assert!(a.level() <= f.level() && b.level() <= f.level());
        prop_assert!(equivalent(&a, &b).unwrap().equivalent, "{} vs {}", a, b);
        prop_assert!(equivalent(&a, &f).unwrap().equivalent);
    }

    #[test]
    fn elimination_is_idempotent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_formula(&mut rng, &FormulaSpec::new(Level::L3));
        let once = eliminate_all(&f, Theory::T3).unwrap();
        prop_assert_eq!(eliminate_all(&once, Theory::T3).unwrap(), once);
    }
}

/// Universal axioms hold at every sampled point of the model.
#[test]
fn axiom_matrices_hold_on_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let bounds = EpBounds {
        max_transient: 6,
        max_period: 4,
    };
    for a in generate_axioms(&SchemaInstanceSpec::new(Theory::T3, 4)) {
        let mut body = &a.formula;
        let mut vars = Vec::<Var>::new();
        while let Formula::Forall(v, inner) = body {
            vars.push(v.clone());
            body = inner;
        }
        if !body.is_quantifier_free() {
            continue;
        }
        for _ in 0..30 {
            let sigma = random_assignment(&mut rng, &vars, bounds, SampleMode::All);
            assert!(eval_qf(body, &sigma).unwrap(), "[{}] {} at {sigma}", a.family, a.formula);
        }
    }
}

#[test]
fn decisions_do_not_depend_on_the_theory_above_the_level() {
    let cases = [
        ("E x (C[3](x) & ~C[4](x))", true),
        ("A x (C[1](x) | x = 0)", true),
        ("A x E y (y <= x & C[1](y) & ~C[2](y) | x = 0)", true),
    ];
    for (text, want) in cases {
        let f = parse(text).unwrap();
        for t in [Theory::T1, Theory::T2, Theory::T3] {
            assert_eq!(decide(&f, t).unwrap().value, want, "{text} in {t}");
        }
    }
}
