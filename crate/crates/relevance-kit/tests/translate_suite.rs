//! Applied translators: configuration cores, one-step partially observed
//! coarsenings, and hyperparameter redundancy.

use relevance_kit::model::{
    is_sufficient_oracle, rat, Answer, CoordSet, OptSet, Witness,
};
use relevance_kit::stochastic::fiber_optimizer;
use relevance_kit::translate::{
    config_case_study, hyperparam_worked_instance, pomdp_worked_instance, translate_config,
    translate_hyperparam, translate_pomdp, HyperparamModel, PomdpModel,
    TranslateError,
};

#[test]
fn config_case_study_core_is_exactly_the_write_and_replica_parameters() {
    let model = config_case_study();
    let t = translate_config(&model).unwrap();
    assert_eq!(t.core, vec!["p2".to_string(), "p3".to_string()]);
    assert_eq!(t.core_coords, CoordSet::new(vec![1, 2]));
    // the cache parameter is droppable: the core alone is sufficient, and
    // nothing smaller is
    assert!(is_sufficient_oracle(&t.problem, &t.core_coords).is_yes());
    assert!(!is_sufficient_oracle(&t.problem, &CoordSet::new(vec![1])).is_yes());
    assert!(!is_sufficient_oracle(&t.problem, &CoordSet::new(vec![2])).is_yes());
    assert!(!is_sufficient_oracle(&t.problem, &CoordSet::new(vec![0, 1])).is_yes());
}

#[test]
fn config_translation_validates_its_inputs() {
    let mut model = config_case_study();
    model.target = vec![];
    assert!(matches!(translate_config(&model), Err(TranslateError::Shape(_))));
    let mut model = config_case_study();
    model.target = vec![9];
    assert!(matches!(translate_config(&model), Err(TranslateError::Shape(_))));
    let mut model = config_case_study();
    model.scores[0].pop();
    assert!(matches!(translate_config(&model), Err(TranslateError::Shape(_))));
}

#[test]
fn config_core_respects_single_behavior_targets() {
    // targeting only write safety: a single action makes everything
    // sufficient, so the core is empty
    let mut model = config_case_study();
    model.target = vec![1];
    let t = translate_config(&model).unwrap();
    assert!(t.core.is_empty());
    assert!(is_sufficient_oracle(&t.problem, &CoordSet::empty()).is_yes());
}

#[test]
fn pomdp_worked_instance_reproduces_the_expected_numbers() {
    let model = pomdp_worked_instance();
    let t = translate_pomdp(&model).unwrap();
    // coarse expectations are exactly 1 and 2; the coarse optimizer is {b}
    let fo = fiber_optimizer(&t.stochastic, &CoordSet::new(vec![0]));
    assert_eq!(fo.entries.len(), 1);
    let entry = fo.entries.values().next().unwrap();
    assert_eq!(entry.cond_utilities, vec![rat(1, 1), rat(2, 1)]);
    assert_eq!(entry.optset, OptSet::new(vec![1]));
    // but the fully observed optimizer at s₁ is {a}: preservation fails
    let s1_encoded = t.encoding[0];
    assert_eq!(
        t.stochastic.base().opt_index(s1_encoded),
        OptSet::new(vec![0])
    );
    assert_eq!(t.verdict.answer, Answer::No);
    assert!(matches!(t.verdict.witness, Some(Witness::State(_))));
}

#[test]
fn pomdp_identity_coarsening_preserves() {
    let mut model = pomdp_worked_instance();
    model.coarsening = vec![0, 1]; // keep both observations distinct
    let t = translate_pomdp(&model).unwrap();
    assert_eq!(t.verdict.answer, Answer::Yes);
    // encoded utilities agree with the original rewards
    for (s, &enc) in t.encoding.iter().enumerate() {
        for a in 0..model.actions.len() {
            assert_eq!(t.stochastic.base().utility(a, enc), &model.rewards[a][s]);
        }
    }
    // encoded prior mass matches
    for (s, &enc) in t.encoding.iter().enumerate() {
        assert_eq!(t.stochastic.prob(enc), &model.prior[s]);
    }
}

#[test]
fn pomdp_uneven_classes_are_padded_with_zero_mass() {
    // three states, labels {0: s0, s1} and {1: s2}: class sizes 2 and 1
    let model = PomdpModel {
        num_states: 3,
        actions: vec!["x".into(), "y".into()],
        num_observations: 3,
        prior: vec![rat(1, 2), rat(1, 4), rat(1, 4)],
        obs: vec![0, 1, 2],
        rewards: vec![
            vec![rat(1, 1), rat(1, 1), rat(0, 1)],
            vec![rat(0, 1), rat(0, 1), rat(2, 1)],
        ],
        coarsening: vec![0, 0, 1],
    };
    let t = translate_pomdp(&model).unwrap();
    let base = t.stochastic.base();
    assert_eq!(base.num_states(), 4); // 2 labels × class size 2
    // total mass of encoded real states is 1; the padding slot carries none
    let encoded: std::collections::BTreeSet<usize> = t.encoding.iter().copied().collect();
    for s in 0..base.num_states() {
        if !encoded.contains(&s) {
            assert_eq!(t.stochastic.prob(s), &rat(0, 1));
        }
    }
    // label coordinate is preserving here: within label 0 both states agree
    // on Opt = {x}, and label 1 picks {y}
    assert_eq!(t.verdict.answer, Answer::Yes);
}

#[test]
fn pomdp_translation_validates_its_inputs() {
    let mut model = pomdp_worked_instance();
    model.obs = vec![0, 5];
    assert!(matches!(translate_pomdp(&model), Err(TranslateError::Shape(_))));
    let mut model = pomdp_worked_instance();
    model.prior.pop();
    assert!(matches!(translate_pomdp(&model), Err(TranslateError::Shape(_))));
    let mut model = pomdp_worked_instance();
    model.rewards[0].pop();
    assert!(matches!(translate_pomdp(&model), Err(TranslateError::Shape(_))));
}

#[test]
fn hyperparam_gamma_independent_returns_are_redundant() {
    let model = hyperparam_worked_instance();
    let v = translate_hyperparam(&model).unwrap();
    assert_eq!(v.answer, Answer::Yes);
    assert!(v.note.as_deref().unwrap().contains("redundant"));
}

#[test]
fn hyperparam_gamma_dependence_is_caught_with_a_witness() {
    let mut model = hyperparam_worked_instance();
    // make γ matter in environment 0: boost a single (α=0, γ=1, ε=0) point
    let (da, _, _) = model.domains;
    let h_star = 0 + da * 1; // α=0, γ=1, ε=0
    let best = model.returns[0].iter().max().unwrap().clone();
    model.returns[0][h_star] = best + rat(1, 1);
    let v = translate_hyperparam(&model).unwrap();
    assert_eq!(v.answer, Answer::No);
    // the witness shares its (α, ε) slice with the unique optimum but is
    // itself non-optimal
    match v.witness {
        Some(Witness::State(h)) => {
            assert_ne!(h, h_star);
            assert_eq!(h % da, h_star % da);
            assert!(model.returns[0][h] < model.returns[0][h_star]);
        }
        other => panic!("expected state witness, got {other:?}"),
    }
}

#[test]
fn hyperparam_translation_validates_its_inputs() {
    let model = HyperparamModel {
        envs: vec!["e".into()],
        domains: (0, 1, 1),
        returns: vec![vec![]],
    };
    assert!(matches!(translate_hyperparam(&model), Err(TranslateError::Shape(_))));
    let mut model = hyperparam_worked_instance();
    model.returns.pop();
    assert!(matches!(translate_hyperparam(&model), Err(TranslateError::Shape(_))));
}
