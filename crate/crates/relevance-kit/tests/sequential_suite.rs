//! Sequential regime: exact finite-horizon backup, the induced optimizer in
//! both modes, the sequential deciders, and the one-shot-versus-temporal
//! counterexample fixture.

mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{random_problem, xor_problem};
use relevance_kit::deciders::{check_sufficiency, MinimumMode};
use relevance_kit::model::{
    rat, relevant_set, Answer, CoordSet, DecisionProblem, OptSet, Witness,
};
use relevance_kit::sequential::{
    check_seq_anchor, check_seq_sufficiency, find_seq_minimum, find_seq_minimum_with,
    induced_optimizer, SeqMode, SequentialProblem,
};
use relevance_kit::stochastic::{check_decisiveness, check_preservation, StochasticProblem};

fn one() -> relevance_kit::model::Rational {
    rat(1, 1)
}

#[test]
fn immediate_mode_and_zero_horizon_backup_match_the_base_optimizer() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..100 {
        let base = random_problem(&mut rng, 3, 3, 3);
        let imm = SequentialProblem::immediate(base.clone());
        let identity: Vec<Vec<Vec<(usize, _)>>> = (0..base.num_actions())
            .map(|_| (0..base.num_states()).map(|s| vec![(s, one())]).collect())
            .collect();
        let h0 = SequentialProblem::new(base.clone(), identity, 0, None, SeqMode::Backup)
            .unwrap();
        for sq in [&imm, &h0] {
            let io = induced_optimizer(sq);
            for s in 0..base.num_states() {
                assert_eq!(io.optsets[s], base.opt_index(s));
            }
        }
        // verdicts match the static decider in immediate mode
        for i in CoordSet::all_subsets(base.num_coords()) {
            assert_eq!(
                check_seq_sufficiency(&imm, &i).answer,
                check_sufficiency(&base, &i).answer
            );
        }
    }
}

#[test]
fn deterministic_chain_flips_the_optimizer_at_horizon_one() {
    // two states {low, high}; immediate utilities prefer "stay" at low, but
    // "jump" moves to high where everything pays 10
    let base = DecisionProblem::new(
        vec!["stay".into(), "jump".into()],
        vec![2],
        vec![
            rat(1, 1),
            rat(10, 1), // stay: low pays 1, high pays 10
            rat(0, 1),
            rat(10, 1), // jump: low pays 0, high pays 10
        ],
    )
    .unwrap();
    let transitions = vec![
        vec![vec![(0, one())], vec![(1, one())]], // stay keeps position
        vec![vec![(1, one())], vec![(1, one())]], // jump goes high
    ];
    let imm_opt = base.opt_index(0);
    assert_eq!(imm_opt, OptSet::new(vec![0])); // stay wins immediately at low
    let sq =
        SequentialProblem::new(base, transitions, 1, None, SeqMode::Backup).unwrap();
    // Q₁(stay, low) = V₀(low) = 1; Q₁(jump, low) = V₀(high) = 10
    let q = sq.backup_values();
    assert_eq!(q[0], rat(1, 1));
    assert_eq!(q[2], rat(10, 1));
    let io = induced_optimizer(&sq);
    assert_eq!(io.optsets[0], OptSet::new(vec![1])); // flip to jump
}

#[test]
fn backup_values_stay_within_the_utility_range() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    use rand::Rng;
    for _ in 0..60 {
        let base = random_problem(&mut rng, 3, 2, 3);
        let num_states = base.num_states();
        // random deterministic transitions
        let transitions: Vec<Vec<Vec<(usize, _)>>> = (0..base.num_actions())
            .map(|_| {
                (0..num_states)
                    .map(|_| vec![(rng.gen_range(0..num_states), one())])
                    .collect()
            })
            .collect();
        let horizon = rng.gen_range(0..4);
        let sq =
            SequentialProblem::new(base.clone(), transitions, horizon, None, SeqMode::Backup)
                .unwrap();
        let lo = base.utilities().iter().min().unwrap();
        let hi = base.utilities().iter().max().unwrap();
        for v in sq.backup_values() {
            assert!(&v >= lo && &v <= hi);
        }
    }
}

/// Four chain states: two latent-bit entry states with identical immediate
/// utilities, a rewarding sink, and a dead sink. One-shot, no information
/// distinguishes the entries; at horizon 1 the hidden bit decides which
/// action reaches the reward.
fn latent_bit_fixture() -> SequentialProblem {
    // states: 0 = entry₀, 1 = entry₁, 2 = reward, 3 = dead
    let base = DecisionProblem::new(
        vec!["left".into(), "right".into()],
        vec![4],
        vec![
            rat(0, 1), rat(0, 1), rat(1, 1), rat(0, 1), // left
            rat(0, 1), rat(0, 1), rat(1, 1), rat(0, 1), // right
        ],
    )
    .unwrap();
    let transitions = vec![
        // left: entry₀ → reward, entry₁ → dead; sinks loop
        vec![vec![(2, one())], vec![(3, one())], vec![(2, one())], vec![(3, one())]],
        // right: entry₀ → dead, entry₁ → reward
        vec![vec![(3, one())], vec![(2, one())], vec![(2, one())], vec![(3, one())]],
    ];
    SequentialProblem::new(base, transitions, 1, None, SeqMode::Backup).unwrap()
}

#[test]
fn stochastic_but_not_sequential_fixture_splits_as_claimed() {
    let sq = latent_bit_fixture();
    // one-shot: every state ties both actions, so ∅ is statically
    // sufficient, stochastically preserving, and trivially non-decisive
    let sp = StochasticProblem::uniform(sq.base().clone()).unwrap();
    let empty = CoordSet::empty();
    assert!(check_sufficiency(sq.base(), &empty).is_yes());
    assert!(check_preservation(&sp, &empty).is_yes());
    assert_eq!(check_decisiveness(&sp, &empty).answer, Answer::No);
    // horizon 1: the hidden bit routes into the reward, so Opt_seq differs
    // across the two entry states and ∅ fails
    let v = check_seq_sufficiency(&sq, &empty);
    assert_eq!(v.answer, Answer::No);
    match v.witness {
        Some(Witness::Pair { s, s_prime }) => {
            let io = induced_optimizer(&sq);
            assert_ne!(io.optsets[s], io.optsets[s_prime]);
        }
        other => panic!("expected pair witness, got {other:?}"),
    }
    // the latent coordinate is everything: minimum is the full singleton
    let min = find_seq_minimum(&sq, 0);
    assert_eq!(min.answer, Answer::No);
}

#[test]
fn seq_minimum_modes_agree_and_collapse_matches_induced_relevance() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    use rand::Rng;
    for _ in 0..60 {
        let base = random_problem(&mut rng, 3, 2, 3);
        let num_states = base.num_states();
        let transitions: Vec<Vec<Vec<(usize, _)>>> = (0..base.num_actions())
            .map(|_| {
                (0..num_states)
                    .map(|_| vec![(rng.gen_range(0..num_states), one())])
                    .collect()
            })
            .collect();
        let sq = SequentialProblem::new(
            base,
            transitions,
            rng.gen_range(0..3),
            None,
            SeqMode::Backup,
        )
        .unwrap();
        let n = sq.base().num_coords();
        let collapse = find_seq_minimum_with(&sq, n, MinimumMode::Collapse);
        let lattice = find_seq_minimum_with(&sq, n, MinimumMode::Lattice);
        let size_of = |v: &relevance_kit::model::Verdict| match &v.witness {
            Some(Witness::Coords(c)) => c.len(),
            other => panic!("expected coordinate witness, got {other:?}"),
        };
        assert_eq!(size_of(&collapse), size_of(&lattice));
        // collapse shortcut names exactly the relevant set of Opt_seq
        if let Some(Witness::Coords(c)) = &collapse.witness {
            assert_eq!(*c, relevant_set(&sq.induced_problem()));
        }
        // k=0 slice agrees with sufficiency of ∅
        assert_eq!(
            find_seq_minimum(&sq, 0).answer,
            check_seq_sufficiency(&sq, &CoordSet::empty()).answer
        );
    }
}

#[test]
fn seq_anchor_behaves_at_the_extremes_and_steps_fit_bounds() {
    let sq = latent_bit_fixture();
    let n = sq.base().num_coords();
    // I = all coordinates: singleton classes always anchor
    assert!(check_seq_anchor(&sq, &CoordSet::full(n)).is_yes());
    // I = ∅: single class, constancy fails on this fixture
    assert_eq!(check_seq_anchor(&sq, &CoordSet::empty()).answer, Answer::No);
    // pairwise sequential sufficiency keeps the |S|² certificate
    let s = sq.base().num_states() as u64;
    let v = check_seq_sufficiency(&sq, &CoordSet::empty());
    assert!(v.steps <= s * s);
}

#[test]
fn two_coordinate_backup_instance_has_minimum_exactly_coordinate_zero() {
    // coordinate 0 routes to reward/dead at t=1; coordinate 1 is noise
    let base = DecisionProblem::from_fn(
        vec!["left".into(), "right".into()],
        vec![4, 2],
        |_, s| rat((s % 4 == 2) as i64, 1), // reward only in position 2
    )
    .unwrap();
    let pos = |s: usize| s % 4;
    let with_pos = |s: usize, p: usize| (s / 4) * 4 + p;
    let route = |a: usize, s: usize| -> usize {
        match pos(s) {
            0 => with_pos(s, if a == 0 { 2 } else { 3 }),
            1 => with_pos(s, if a == 0 { 3 } else { 2 }),
            p => with_pos(s, p),
        }
    };
    let transitions: Vec<Vec<Vec<(usize, _)>>> = (0..2)
        .map(|a| (0..8).map(|s| vec![(route(a, s), one())]).collect())
        .collect();
    let sq = SequentialProblem::new(base, transitions, 1, None, SeqMode::Backup).unwrap();
    let min = find_seq_minimum_with(&sq, 1, MinimumMode::Lattice);
    assert_eq!(min.answer, Answer::Yes);
    assert_eq!(min.witness, Some(Witness::Coords(CoordSet::new(vec![0]))));
}

#[test]
fn transition_validation_catches_bad_rows() {
    use relevance_kit::sequential::SeqError;
    let base = xor_problem();
    let mut transitions: Vec<Vec<Vec<(usize, _)>>> = (0..2)
        .map(|_| (0..4).map(|s| vec![(s, one())]).collect())
        .collect();
    transitions[0][1] = vec![(0, rat(1, 2))];
    assert!(matches!(
        SequentialProblem::new(base.clone(), transitions.clone(), 1, None, SeqMode::Backup),
        Err(SeqError::RowMass { action: 0, state: 1, .. })
    ));
    transitions[0][1] = vec![(9, one())];
    assert!(matches!(
        SequentialProblem::new(base.clone(), transitions, 1, None, SeqMode::Backup),
        Err(SeqError::TargetOutOfRange { target: 9, num_states: 4 })
    ));
    let short: Vec<Vec<Vec<(usize, _)>>> = vec![vec![vec![(0, one())]; 4]];
    assert!(matches!(
        SequentialProblem::new(base, short, 1, None, SeqMode::Backup),
        Err(SeqError::TransitionShape)
    ));
}
