//! Stochastic regime: fiber optimizers, the four deciders, the full-support
//! bridge to the static regime, and the support-sensitivity fixtures.

mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{random_stochastic, worked_example, xor_problem};
use relevance_kit::deciders::find_minimum_sufficient;
use relevance_kit::model::{
    is_sufficient_oracle, quotient, rat, relevant_set, Answer, CoordSet, DecisionProblem,
    OptSet, Witness,
};
use relevance_kit::stochastic::{
    check_decisiveness, check_preservation, check_preservation_with, check_stoch_anchor,
    check_stoch_anchor_preservation, fiber_optimizer, find_stoch_minimum, StochFamily,
    StochasticProblem, ZeroMassPolicy,
};

#[test]
fn worked_example_numbers_are_bit_exact() {
    let sp = worked_example();
    let fo = fiber_optimizer(&sp, &CoordSet::empty());
    let entry = &fo.entries[&Vec::new()];
    assert_eq!(entry.cond_utilities, vec![rat(1, 1), rat(2, 1)]);
    assert_eq!(entry.optset, OptSet::new(vec![1])); // {b}
    // preservation fails at s₁ where Opt = {a}
    let pres = check_preservation(&sp, &CoordSet::empty());
    assert_eq!(pres.answer, Answer::No);
    assert_eq!(pres.witness, Some(Witness::State(0)));
    // the single fiber has a unique optimum, so ∅ is decisive
    assert!(check_decisiveness(&sp, &CoordSet::empty()).is_yes());
    // and anchor preservation fails too: the only fiber fails at s₁
    assert_eq!(
        check_stoch_anchor_preservation(&sp, &CoordSet::empty()).answer,
        Answer::No
    );
}

#[test]
fn point_mass_conditioning_collapses_to_the_pointwise_optimizer() {
    let base = xor_problem();
    for star in 0..base.num_states() {
        let dist: Vec<_> =
            (0..base.num_states()).map(|s| rat((s == star) as i64, 1)).collect();
        let sp = StochasticProblem::new(base.clone(), dist).unwrap();
        for i in CoordSet::all_subsets(base.num_coords()) {
            let fo = fiber_optimizer(&sp, &i);
            assert_eq!(fo.entries.len(), 1);
            let entry = fo.entries.values().next().unwrap();
            assert_eq!(entry.optset, base.opt_index(star));
        }
        // at I=∅ the support is one state: anchor preservation holds iff the
        // fiber optimizer (= Opt(s*)) matches every state it covers; here
        // the fiber covers all states, and the others differ
        let ap = check_stoch_anchor_preservation(&sp, &CoordSet::empty());
        assert_eq!(ap.answer, Answer::No);
    }
}

#[test]
fn uniform_xor_fibers_tie_exactly_at_one_half() {
    // the recorded outcome of both readings: at exact arithmetic the
    // conditional utilities tie at 1/2, so the fiber OptSet is {even, odd}
    // while each pointwise optimizer is a singleton — the literal
    // definitions therefore answer NO for preservation and NO for
    // decisiveness at I = {0}
    let sp = StochasticProblem::uniform(xor_problem()).unwrap();
    let i = CoordSet::new(vec![0]);
    let fo = fiber_optimizer(&sp, &i);
    for entry in fo.entries.values() {
        assert_eq!(entry.cond_utilities, vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(entry.optset, OptSet::new(vec![0, 1]));
    }
    assert_eq!(check_preservation(&sp, &i).answer, Answer::No);
    assert_eq!(check_decisiveness(&sp, &i).answer, Answer::No);
}

#[test]
fn full_support_bridge_static_sufficiency_iff_preservation() {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    for _ in 0..300 {
        let sp = random_stochastic(&mut rng, 3, 3, 3);
        for i in CoordSet::all_subsets(sp.base().num_coords()) {
            let static_suff = is_sufficient_oracle(sp.base(), &i).is_yes();
            let preserving = check_preservation(&sp, &i).is_yes();
            assert_eq!(static_suff, preserving, "bridge failed at {i:?}");
            // preservation ⇒ relevance containment
            if preserving {
                assert!(relevant_set(sp.base()).is_subset_of(&i));
            }
        }
    }
}

#[test]
fn full_support_preservation_partition_equals_the_quotient() {
    let mut rng = ChaCha8Rng::seed_from_u64(83);
    let mut checked = 0;
    for _ in 0..300 {
        let sp = random_stochastic(&mut rng, 3, 3, 3);
        for i in CoordSet::all_subsets(sp.base().num_coords()) {
            if !check_preservation(&sp, &i).is_yes() {
                continue;
            }
            checked += 1;
            let q = quotient(sp.base());
            let fo = fiber_optimizer(&sp, &i);
            for (idx, s) in sp.base().states().enumerate() {
                let alpha = relevance_kit::model::project(&s, &i);
                let fiber_opt = fo.optset_at(&alpha).expect("full support");
                assert_eq!(fiber_opt, &q.class_optset[q.class_of[idx]]);
            }
        }
    }
    assert!(checked > 0, "suite never exercised a preserving subset");
}

#[test]
fn singleton_constant_fibers_preserve_under_any_distribution() {
    // Opt ≡ {0} with strict pointwise gaps: preservation holds for every P,
    // including zero-heavy ones
    let base = DecisionProblem::from_fn(
        vec!["best".into(), "worse".into()],
        vec![2, 2],
        |a, s| rat(if a == 0 { 5 } else { s as i64 }, 1),
    )
    .unwrap();
    let dists = [
        vec![rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1)],
        vec![rat(1, 7), rat(2, 7), rat(4, 7), rat(0, 1)],
        vec![rat(1, 4); 4],
    ];
    for dist in dists {
        let sp = StochasticProblem::new(base.clone(), dist).unwrap();
        for i in CoordSet::all_subsets(2) {
            assert!(check_preservation(&sp, &i).is_yes());
        }
    }
}

#[test]
fn static_but_not_stochastic_fixture_is_zero_probability_sensitive() {
    // three states, two actions: a pointwise tie at the third state that the
    // asymmetric P silences entirely. Statically {0} is (trivially) the full
    // coordinate set, hence sufficient; under the strict zero-mass reading
    // the preservation decider answers NO because the tie fiber carries no
    // probability and hence no defined conditional optimizer. Under the
    // default skip reading it answers YES with a note: the recorded
    // both-readings outcome.
    let base = DecisionProblem::new(
        vec!["a".into(), "b".into()],
        vec![3],
        vec![
            rat(2, 1), rat(0, 1), rat(1, 1), // U(a, ·)
            rat(1, 1), rat(3, 1), rat(1, 1), // U(b, ·): tie with a at s₃
        ],
    )
    .unwrap();
    let sp = StochasticProblem::new(
        base,
        vec![rat(2, 3), rat(1, 3), rat(0, 1)],
    )
    .unwrap();
    let i = CoordSet::new(vec![0]);
    assert!(is_sufficient_oracle(sp.base(), &i).is_yes());
    let skip = check_preservation_with(&sp, &i, ZeroMassPolicy::Skip);
    assert_eq!(skip.answer, Answer::Yes);
    assert!(skip.note.as_deref().unwrap().contains("zero-mass"));
    let strict = check_preservation_with(&sp, &i, ZeroMassPolicy::Strict);
    assert_eq!(strict.answer, Answer::No);
    assert_eq!(strict.witness, Some(Witness::State(2)));
    assert!(strict.note.as_deref().unwrap().contains("strict"));
}

#[test]
fn decisiveness_implies_anchor_and_all_ties_anchor_nothing() {
    let mut rng = ChaCha8Rng::seed_from_u64(97);
    for _ in 0..200 {
        let sp = random_stochastic(&mut rng, 3, 3, 3);
        for i in CoordSet::all_subsets(sp.base().num_coords()) {
            if check_decisiveness(&sp, &i).is_yes() {
                assert!(check_stoch_anchor(&sp, &i).is_yes());
            }
        }
    }
    // U ≡ 0: every fiber ties over all actions
    let flat = DecisionProblem::from_fn(
        vec!["a".into(), "b".into()],
        vec![2, 2],
        |_, _| rat(0, 1),
    )
    .unwrap();
    let sp = StochasticProblem::uniform(flat).unwrap();
    for i in CoordSet::all_subsets(2) {
        assert_eq!(check_stoch_anchor(&sp, &i).answer, Answer::No);
        assert_eq!(check_decisiveness(&sp, &i).answer, Answer::No);
    }
}

#[test]
fn stochastic_minimum_preservation_matches_static_minimum_under_full_support() {
    let mut rng = ChaCha8Rng::seed_from_u64(113);
    for _ in 0..150 {
        let sp = random_stochastic(&mut rng, 3, 3, 3);
        let n = sp.base().num_coords();
        for k in 0..=n {
            let stoch = find_stoch_minimum(&sp, k, StochFamily::Preservation).unwrap();
            let stat = find_minimum_sufficient(sp.base(), k);
            assert_eq!(stoch.answer, stat.answer);
        }
        // k = n is always YES for preservation
        assert!(find_stoch_minimum(&sp, n, StochFamily::Preservation).unwrap().is_yes());
    }
}

#[test]
fn stochastic_step_counts_respect_their_linear_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(131);
    for _ in 0..200 {
        let sp = random_stochastic(&mut rng, 4, 3, 3);
        let s = sp.base().num_states() as u64;
        for i in CoordSet::all_subsets(sp.base().num_coords()) {
            assert!(check_preservation(&sp, &i).steps <= 3 * s);
            assert!(check_decisiveness(&sp, &i).steps <= 2 * s);
            assert!(check_stoch_anchor(&sp, &i).steps <= 2 * s);
            assert!(check_stoch_anchor_preservation(&sp, &i).steps <= 3 * s);
        }
    }
}

#[test]
fn distribution_validation_rejects_malformed_inputs() {
    use relevance_kit::stochastic::StochError;
    let base = xor_problem();
    assert!(matches!(
        StochasticProblem::new(base.clone(), vec![rat(1, 1)]),
        Err(StochError::DistributionLength { expected: 4, got: 1 })
    ));
    assert!(matches!(
        StochasticProblem::new(
            base.clone(),
            vec![rat(2, 1), rat(-1, 1), rat(0, 1), rat(0, 1)]
        ),
        Err(StochError::NegativeProbability { state: 1 })
    ));
    assert!(matches!(
        StochasticProblem::new(
            base,
            vec![rat(1, 2), rat(1, 2), rat(1, 2), rat(0, 1)]
        ),
        Err(StochError::BadTotalMass { .. })
    ));
}
