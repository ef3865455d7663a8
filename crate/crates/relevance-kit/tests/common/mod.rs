//! Shared fixtures and random-instance generators for the test suites.
#![allow(dead_code)]

use rand::Rng;

use relevance_kit::model::{rat, DecisionProblem};
use relevance_kit::stochastic::StochasticProblem;

/// Random instance: n ≤ max_coords coordinates with domains ≤ max_domain,
/// ≤ max_actions actions, integer utilities in 0..=2.
pub fn random_problem(
    rng: &mut impl Rng,
    max_coords: usize,
    max_domain: usize,
    max_actions: usize,
) -> DecisionProblem {
    let n = rng.gen_range(1..=max_coords);
    let domains: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=max_domain)).collect();
    let num_actions = rng.gen_range(1..=max_actions);
    let actions = (0..num_actions).map(|a| format!("a{a}")).collect();
    DecisionProblem::from_fn(actions, domains, |_, _| rat(rng.gen_range(0..=2), 1))
        .expect("well-formed")
}

/// Two Boolean coordinates; action "odd" is optimal exactly when the parity
/// is 1, action "even" otherwise. Both coordinates are relevant.
pub fn xor_problem() -> DecisionProblem {
    DecisionProblem::from_fn(
        vec!["even".into(), "odd".into()],
        vec![2, 2],
        |a, s| {
            let parity = (s & 1) ^ (s >> 1 & 1);
            if (a == 1) == (parity == 1) {
                rat(1, 1)
            } else {
                rat(0, 1)
            }
        },
    )
    .expect("well-formed")
}

/// The two-state worked example: U(a) = (2, 0), U(b) = (1, 3), uniform.
pub fn worked_example() -> StochasticProblem {
    let base = DecisionProblem::new(
        vec!["a".into(), "b".into()],
        vec![2],
        vec![rat(2, 1), rat(0, 1), rat(1, 1), rat(3, 1)],
    )
    .expect("well-formed");
    StochasticProblem::uniform(base).expect("uniform")
}

/// Random full-support stochastic wrapper around a random problem.
pub fn random_stochastic(
    rng: &mut impl Rng,
    max_coords: usize,
    max_domain: usize,
    max_actions: usize,
) -> StochasticProblem {
    let base = random_problem(rng, max_coords, max_domain, max_actions);
    let weights: Vec<i64> =
        (0..base.num_states()).map(|_| rng.gen_range(1..=4)).collect();
    let total: i64 = weights.iter().sum();
    let dist = weights
        .into_iter()
        .map(|w| rat(w, total))
        .collect();
    StochasticProblem::new(base, dist).expect("full support")
}
