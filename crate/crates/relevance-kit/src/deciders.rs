//! Counted explicit-state searches for the three static queries —
//! sufficiency, anchor, minimum — with witness extraction and step-count
//! certification.
//!
//! Step units: one OptSet computation or one OptSet equality comparison,
//! except minimum-set lattice mode, whose steps count whole sufficiency
//! checks (its declared bound is 2ⁿ checks).

use std::collections::BTreeMap;

use crate::model::{
    fibers, is_sufficient_oracle, project, relevant_coordinates, Answer, Assignment, CoordSet,
    DecisionProblem, OptSet, Verdict, Witness,
};

/// Which search the sufficiency decider runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SufficiencyStrategy {
    /// Naive double loop over state pairs; steps ≤ |S|²·|A|² units.
    Pairwise,
    /// Single pass grouping states by projection; steps ≤ 2·|S|·|A| units.
    FiberGrouped,
}

/// Which search the minimum-set decider runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinimumMode {
    /// Compute the relevant set and compare its size against k.
    Collapse,
    /// Scan the subset lattice for a smallest sufficient set (≤ 2ⁿ checks).
    Lattice,
}

/// Decide whether I is sufficient, with the default fiber-grouped strategy.
pub fn check_sufficiency(problem: &DecisionProblem, i: &CoordSet) -> Verdict {
    check_sufficiency_with(problem, i, SufficiencyStrategy::FiberGrouped)
}

pub fn check_sufficiency_with(
    problem: &DecisionProblem,
    i: &CoordSet,
    strategy: SufficiencyStrategy,
) -> Verdict {
    match strategy {
        SufficiencyStrategy::FiberGrouped => is_sufficient_oracle(problem, i),
        SufficiencyStrategy::Pairwise => check_sufficiency_pairwise(problem, i),
    }
}

fn check_sufficiency_pairwise(problem: &DecisionProblem, i: &CoordSet) -> Verdict {
    let mut steps = 0u64;
    let num_states = problem.num_states();
    let keys: Vec<Vec<usize>> =
        problem.states().map(|s| project(&s, i)).collect();
    let mut opts: Vec<Option<OptSet>> = vec![None; num_states];
    let mut opt_of = |idx: usize, steps: &mut u64, problem: &DecisionProblem| -> OptSet {
        // memoized so the step count reflects distinct computations
        if opts[idx].is_none() {
            opts[idx] = Some(problem.opt_index(idx));
            *steps += 1;
        }
        opts[idx].clone().unwrap()
    };
    for s in 0..num_states {
        for t in (s + 1)..num_states {
            if keys[s] != keys[t] {
                continue;
            }
            let opt_s = opt_of(s, &mut steps, problem);
            let opt_t = opt_of(t, &mut steps, problem);
            steps += 1;
            if opt_s != opt_t {
                return Verdict::no_with(Witness::Pair { s, s_prime: t }, steps);
            }
        }
    }
    Verdict { answer: Answer::Yes, witness: None, steps, note: None }
}

/// Decide whether some assignment α to I has Opt constant on its fiber;
/// the witness is the lexicographically first such α. Steps ≤ 2·|S|.
pub fn check_anchor(problem: &DecisionProblem, i: &CoordSet) -> Verdict {
    let mut steps = 0u64;
    let groups = fibers(problem, i);
    // constant-OptSet status per fiber, in lexicographic key order
    for (alpha, states) in &groups {
        let mut constant = true;
        let first_opt = problem.opt_index(states[0]);
        steps += 1;
        for &idx in &states[1..] {
            let opt = problem.opt_index(idx);
            steps += 1;
            steps += 1;
            if opt != first_opt {
                constant = false;
                break;
            }
        }
        if constant {
            return Verdict::yes_with(
                Witness::Anchor(Assignment { coords: i.clone(), digits: alpha.clone() }),
                steps,
            );
        }
    }
    Verdict { answer: Answer::No, witness: None, steps, note: None }
}

/// Decide whether a sufficient set of size ≤ k exists (collapse mode).
pub fn find_minimum_sufficient(problem: &DecisionProblem, k: usize) -> Verdict {
    find_minimum_sufficient_with(problem, k, MinimumMode::Collapse)
}

pub fn find_minimum_sufficient_with(
    problem: &DecisionProblem,
    k: usize,
    mode: MinimumMode,
) -> Verdict {
    match mode {
        MinimumMode::Collapse => {
            // Opt per state (|S| computations) plus one comparison per
            // single-coordinate flip examined by the relevance scan.
            let relevant = relevant_coordinates(problem);
            let spread: u64 = problem
                .domains()
                .iter()
                .map(|&d| (d as u64).saturating_sub(1))
                .sum();
            let steps = problem.num_states() as u64 * (1 + spread);
            let set = CoordSet::new(relevant.into_iter().map(|r| r.coord).collect());
            let answer = if set.len() <= k { Answer::Yes } else { Answer::No };
            Verdict { answer, witness: Some(Witness::Coords(set)), steps, note: None }
        }
        MinimumMode::Lattice => {
            let n = problem.num_coords();
            let mut checks = 0u64;
            for size in 0..=n {
                for subset in CoordSet::all_subsets(n) {
                    if subset.len() != size {
                        continue;
                    }
                    checks += 1;
                    if is_sufficient_oracle(problem, &subset).is_yes() {
                        let answer = if size <= k { Answer::Yes } else { Answer::No };
                        return Verdict {
                            answer,
                            witness: Some(Witness::Coords(subset)),
                            steps: checks,
                            note: None,
                        };
                    }
                }
            }
            unreachable!("the full coordinate set is always sufficient");
        }
    }
}

/// Which query a steps report instruments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Query {
    Sufficiency { i: CoordSet, strategy: SufficiencyStrategy },
    Anchor { i: CoordSet },
    Minimum { k: usize, mode: MinimumMode },
}

/// One row of the step-bound certification table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepsRow {
    pub query: String,
    pub num_states: usize,
    pub num_actions: usize,
    pub steps: u64,
    pub bound: u64,
    pub margin: u64,
    pub verdict: Verdict,
}

/// Run a query and report its steps against the declared bound
/// (margin = bound − steps must be ≥ 0; the constants are explicit here).
pub fn steps_report(problem: &DecisionProblem, query: &Query) -> StepsRow {
    let s = problem.num_states() as u64;
    let a = problem.num_actions() as u64;
    let n = problem.num_coords() as u64;
    let (name, verdict, bound) = match query {
        Query::Sufficiency { i, strategy } => {
            let verdict = check_sufficiency_with(problem, i, *strategy);
            let (name, bound) = match strategy {
                SufficiencyStrategy::Pairwise => ("sufficiency/pairwise", s * s * a * a),
                SufficiencyStrategy::FiberGrouped => ("sufficiency/fiber", 2 * s * a),
            };
            (name, verdict, bound)
        }
        Query::Anchor { i } => ("anchor", check_anchor(problem, i), 2 * s),
        Query::Minimum { k, mode } => {
            let verdict = find_minimum_sufficient_with(problem, *k, *mode);
            let spread: u64 = problem
                .domains()
                .iter()
                .map(|&d| (d as u64).saturating_sub(1))
                .sum();
            let (name, bound) = match mode {
                MinimumMode::Collapse => ("minimum/collapse", s * (1 + spread)),
                MinimumMode::Lattice => ("minimum/lattice", 1u64 << n),
            };
            (name, verdict, bound)
        }
    };
    assert!(verdict.steps <= bound, "step bound violated: {} > {}", verdict.steps, bound);
    StepsRow {
        query: name.to_string(),
        num_states: problem.num_states(),
        num_actions: problem.num_actions(),
        steps: verdict.steps,
        bound,
        margin: bound - verdict.steps,
        verdict,
    }
}

/// Group states by projection value, exposed for witness replay.
pub fn fiber_map(problem: &DecisionProblem, i: &CoordSet) -> BTreeMap<Vec<usize>, Vec<usize>> {
    fibers(problem, i)
}
