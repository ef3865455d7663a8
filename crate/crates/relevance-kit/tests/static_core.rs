//! Core model: optimizer map, sufficiency/relevance oracles, the collapse
//! between relevant sets and minimum sufficient sets, quotients, and the
//! counted static deciders.

mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{random_problem, xor_problem};
use relevance_kit::deciders::{
    check_anchor, check_sufficiency, check_sufficiency_with, find_minimum_sufficient,
    find_minimum_sufficient_with, steps_report, MinimumMode, Query, SufficiencyStrategy,
};
use relevance_kit::model::{
    factor_through, is_sufficient_oracle, minimum_sufficient_set, quotient, rat,
    relevant_coordinates, relevant_set, Answer, CoordSet, DecisionProblem, Factorization,
    State, Witness,
};

#[test]
fn state_indexing_round_trips_and_is_mixed_radix() {
    let p = DecisionProblem::from_fn(
        vec!["a".into()],
        vec![2, 3, 2],
        |_, _| rat(0, 1),
    )
    .unwrap();
    assert_eq!(p.num_states(), 12);
    // coordinate 0 is least significant
    assert_eq!(p.index_of(&State::new(vec![1, 0, 0])).unwrap(), 1);
    assert_eq!(p.index_of(&State::new(vec![0, 1, 0])).unwrap(), 2);
    assert_eq!(p.index_of(&State::new(vec![0, 0, 1])).unwrap(), 6);
    for idx in 0..p.num_states() {
        assert_eq!(p.index_of(&p.state_of(idx)).unwrap(), idx);
    }
}

#[test]
fn optset_ties_are_exact_and_sorted() {
    let p = DecisionProblem::new(
        vec!["x".into(), "y".into(), "z".into()],
        vec![1],
        vec![rat(2, 4), rat(1, 2), rat(1, 3)],
    )
    .unwrap();
    // 2/4 and 1/2 tie exactly; 1/3 loses
    assert_eq!(p.opt_index(0).actions(), &[0, 1]);
}

#[test]
fn xor_problem_has_both_coordinates_relevant_and_nothing_smaller_suffices() {
    let p = xor_problem();
    assert_eq!(relevant_set(&p), CoordSet::full(2));
    assert_eq!(minimum_sufficient_set(&p), CoordSet::full(2));
    assert!(is_sufficient_oracle(&p, &CoordSet::full(2)).is_yes());
    assert!(!is_sufficient_oracle(&p, &CoordSet::new(vec![0])).is_yes());
    assert!(!is_sufficient_oracle(&p, &CoordSet::new(vec![1])).is_yes());
    assert!(!is_sufficient_oracle(&p, &CoordSet::empty()).is_yes());
    // no anchor either: every single-coordinate fiber mixes both parities
    assert_eq!(check_anchor(&p, &CoordSet::new(vec![0])).answer, Answer::No);
    // but the full set trivially anchors
    assert!(check_anchor(&p, &CoordSet::full(2)).is_yes());
}

#[test]
fn sufficiency_strategies_agree_and_witnesses_check_out() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let p = random_problem(&mut rng, 4, 3, 3);
        for i in CoordSet::all_subsets(p.num_coords()) {
            let fiber = check_sufficiency_with(&p, &i, SufficiencyStrategy::FiberGrouped);
            let pairwise = check_sufficiency_with(&p, &i, SufficiencyStrategy::Pairwise);
            assert_eq!(fiber.answer, pairwise.answer);
            if let Some(Witness::Pair { s, s_prime }) = fiber.witness {
                let (a, b) = (p.state_of(s), p.state_of(s_prime));
                for &c in i.members() {
                    assert_eq!(a.coords[c], b.coords[c]);
                }
                assert_ne!(p.opt_index(s), p.opt_index(s_prime));
            }
        }
    }
}

#[test]
fn collapse_relevant_set_equals_lattice_minimum_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..300 {
        let p = random_problem(&mut rng, 4, 3, 3);
        let relevant = relevant_set(&p);
        // the relevant set is sufficient and is contained in every
        // sufficient set (so it is the unique minimum)
        assert!(is_sufficient_oracle(&p, &relevant).is_yes());
        for i in CoordSet::all_subsets(p.num_coords()) {
            let sufficient = is_sufficient_oracle(&p, &i).is_yes();
            assert_eq!(
                sufficient,
                relevant.is_subset_of(&i),
                "collapse failed for {i:?} on {p:?}"
            );
        }
        // both minimum modes find a set of the same (minimum) size
        let collapse = find_minimum_sufficient_with(&p, p.num_coords(), MinimumMode::Collapse);
        let lattice = find_minimum_sufficient_with(&p, p.num_coords(), MinimumMode::Lattice);
        let size_of = |v: &relevance_kit::model::Verdict| match &v.witness {
            Some(Witness::Coords(c)) => c.len(),
            other => panic!("expected coordinate witness, got {other:?}"),
        };
        assert_eq!(size_of(&collapse), size_of(&lattice));
    }
}

#[test]
fn relevance_witnesses_differ_only_at_their_coordinate() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    for _ in 0..200 {
        let p = random_problem(&mut rng, 4, 3, 3);
        for r in relevant_coordinates(&p) {
            let (s, t) = r.witness;
            let (a, b) = (p.state_of(s), p.state_of(t));
            let diff: Vec<usize> = (0..p.num_coords())
                .filter(|&c| a.coords[c] != b.coords[c])
                .collect();
            assert_eq!(diff, vec![r.coord]);
            assert_ne!(p.opt_index(s), p.opt_index(t));
        }
    }
}

#[test]
fn anchor_yields_lexicographically_first_constant_fiber() {
    // Opt is constant on the fiber x0 = 1 but not on x0 = 0
    let p = DecisionProblem::from_fn(
        vec!["a".into(), "b".into()],
        vec![2, 2],
        |a, s| {
            if s & 1 == 1 {
                rat((a == 0) as i64, 1)
            } else {
                rat(((a == 0) == (s < 2)) as i64, 1)
            }
        },
    )
    .unwrap();
    let v = check_anchor(&p, &CoordSet::new(vec![0]));
    assert!(v.is_yes());
    match v.witness {
        Some(Witness::Anchor(assignment)) => {
            assert_eq!(assignment.coords, CoordSet::new(vec![0]));
            assert_eq!(assignment.digits, vec![1]);
        }
        other => panic!("expected anchor witness, got {other:?}"),
    }
    assert_eq!(check_sufficiency(&p, &CoordSet::new(vec![0])).answer, Answer::No);
}

#[test]
fn quotient_classes_partition_by_optset_and_factoring_works() {
    let p = xor_problem();
    let q = quotient(&p);
    assert_eq!(q.num_classes(), 2);
    for idx in 0..p.num_states() {
        assert_eq!(q.class_optset[q.class_of[idx]], p.opt_index(idx));
    }
    // parity map respects the quotient, so it factors
    let parity: Vec<usize> = (0..4).map(|s| (s & 1) ^ (s >> 1 & 1)).collect();
    match factor_through(&p, &parity) {
        Factorization::Factors(psi) => {
            assert_eq!(psi.len(), 2);
            assert_ne!(psi[&0], psi[&1]);
        }
        Factorization::Refusal { .. } => panic!("parity should factor"),
    }
    // the first-coordinate map merges states across classes: refusal with a
    // concrete violating pair
    let coord0: Vec<usize> = (0..4).map(|s| s & 1).collect();
    match factor_through(&p, &coord0) {
        Factorization::Refusal { s, s_prime } => {
            assert_eq!(coord0[s], coord0[s_prime]);
            assert_ne!(p.opt_index(s), p.opt_index(s_prime));
        }
        Factorization::Factors(_) => panic!("coordinate 0 must not factor"),
    }
}

#[test]
fn step_reports_stay_within_their_declared_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for _ in 0..200 {
        let p = random_problem(&mut rng, 4, 3, 3);
        let i = CoordSet::new(vec![0]);
        // steps_report asserts steps ≤ bound internally
        for query in [
            Query::Sufficiency { i: i.clone(), strategy: SufficiencyStrategy::Pairwise },
            Query::Sufficiency { i: i.clone(), strategy: SufficiencyStrategy::FiberGrouped },
            Query::Anchor { i: i.clone() },
            Query::Minimum { k: 1, mode: MinimumMode::Collapse },
            Query::Minimum { k: 1, mode: MinimumMode::Lattice },
        ] {
            let row = steps_report(&p, &query);
            assert!(row.steps <= row.bound);
            assert_eq!(row.margin, row.bound - row.steps);
        }
    }
}

#[test]
fn minimum_sufficient_answer_threshold_respects_k() {
    let p = xor_problem();
    assert_eq!(find_minimum_sufficient(&p, 1).answer, Answer::No);
    assert_eq!(find_minimum_sufficient(&p, 2).answer, Answer::Yes);
}

#[test]
fn single_state_and_single_action_edge_cases() {
    // one action: Opt is always {0}; everything is sufficient
    let p = DecisionProblem::from_fn(vec!["only".into()], vec![3, 2], |_, s| rat(s as i64, 1))
        .unwrap();
    assert!(is_sufficient_oracle(&p, &CoordSet::empty()).is_yes());
    assert_eq!(relevant_set(&p), CoordSet::empty());
    // size-1 domains contribute nothing
    let q = DecisionProblem::from_fn(
        vec!["a".into(), "b".into()],
        vec![1, 2],
        |a, s| rat(((a == 0) == (s == 0)) as i64, 1),
    )
    .unwrap();
    assert_eq!(relevant_set(&q), CoordSet::new(vec![1]));
}
