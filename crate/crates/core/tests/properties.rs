use monocat::interchange::{adjacent_exchanges, canonical, interchange_equivalent};
use monocat::rewrite::{apply, rewrites, ExpansionLimits};
use monocat::search::{equal, explore_states};
use monocat::suite::random_term;
use monocat::{
    parse_expr, snake_term, FunctorError, Mode, PrimeSpec, RationalSpec, SearchCaps, Term,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_caps() -> SearchCaps {
    SearchCaps {
        max_gen_count: 6,
        max_width: 5,
        max_index_n: 2,
        max_states: 5_000,
    }
}

fn arb_term() -> impl Strategy<Value = Term> {
    (any::<u64>(), 0usize..=3, 0usize..=5).prop_map(|(seed, source, len)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_term(&mut rng, source, len, &small_caps())
    })
}

fn same_image(spec: &RationalSpec, a: &Term, b: &Term) -> bool {
    match (spec.eval_term(a), spec.eval_term(b)) {
        (Ok(x), Ok(y)) => x == y,
        (Err(FunctorError::TooLarge { .. }), _) | (_, Err(FunctorError::TooLarge { .. })) => true,
        _ => false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rewriting_preserves_the_image(t in arb_term(), pick in any::<prop::sample::Index>(), seed in 1u64..6) {
        let spec = RationalSpec::random(2, seed);
        let options = rewrites(&t, Mode::C, Some(ExpansionLimits::from(&small_caps())));
        prop_assume!(!options.is_empty());
        let r = &options[pick.index(options.len())];
        prop_assert!(same_image(&spec, &t, &r.result), "{} then {}", t, r.step);
    }

    #[test]
    fn recorded_steps_replay(t in arb_term(), pick in any::<prop::sample::Index>()) {
        let options = rewrites(&t, Mode::C, Some(ExpansionLimits::from(&small_caps())));
        prop_assume!(!options.is_empty());
        let r = &options[pick.index(options.len())];
        prop_assert_eq!(apply(&t, &r.step).unwrap(), r.result.clone());
    }

    #[test]
    fn d_rewrites_keep_generator_count(t in arb_term()) {
        for r in rewrites(&t, Mode::D, None) {
            prop_assert_eq!(r.result.gen_count(), t.gen_count());
        }
    }

    #[test]
    fn exchanges_stay_in_the_class(t in arb_term()) {
        let c = canonical(&t);
        prop_assert_eq!(canonical(&c), c.clone());
        for u in adjacent_exchanges(&t) {
            prop_assert!(interchange_equivalent(&u, &t));
            prop_assert_eq!(canonical(&u), c.clone());
        }
    }

    #[test]
    fn render_parses_back(t in arb_term()) {
        prop_assert_eq!(parse_expr(&t.render()).unwrap(), t);
    }

    #[test]
    fn interchange_preserves_the_image(t in arb_term()) {
        let spec = RationalSpec::random(2, 9);
        prop_assert!(same_image(&spec, &t, &canonical(&t)));
    }
}

#[test]
fn found_paths_verify() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let caps = small_caps();
    let mut found = 0;
    for _ in 0..200 {
        let (source, len) = (rng.gen_range(0..=2), rng.gen_range(1..=3));
        let t = random_term(&mut rng, source, len, &caps);
        let options = rewrites(&t, Mode::C, Some(ExpansionLimits::from(&caps)));
        if options.is_empty() {
            continue;
        }
        let target = options[rng.gen_range(0..options.len())].result.clone();
        if let Some(path) = equal(&t, &target, Mode::C, &caps).unwrap().path() {
            path.verify().unwrap();
            assert_eq!(path.end(), &target);
            found += 1;
        }
    }
    assert!(found > 100);
}

#[test]
fn explored_states_keep_the_identity_image() {
    let caps = SearchCaps {
        max_gen_count: 4,
        ..SearchCaps::default()
    };
    let exploration = explore_states(&snake_term(), Mode::C, &caps, Some(2));
    assert!(!exploration.report.identity_found);
    let q = RationalSpec::random(2, 4);
    let p = PrimeSpec::random(3, 4);
    for t in &exploration.states {
        assert!(q.eval_term(t).unwrap().is_identity(), "{t}");
        assert!(p.eval_term(t).unwrap().is_identity(), "{t}");
    }
}

#[test]
fn exploration_is_independent_of_threads() {
    let caps = SearchCaps {
        max_gen_count: 4,
        ..SearchCaps::default()
    };
    let runs: Vec<_> = [Some(1), Some(3), Some(8)]
        .into_iter()
        .map(|n| explore_states(&snake_term(), Mode::C, &caps, n))
        .collect();
    assert!(runs.windows(2).all(|w| w[0].states == w[1].states));
    assert!(runs
        .windows(2)
        .all(|w| w[0].fingerprint() == w[1].fingerprint()));
}
