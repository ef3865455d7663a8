//! Finite decision problems, projections, the optimizer map, sufficiency and
//! relevance oracles, and the optimizer quotient.

use std::collections::BTreeMap;

use num::BigRational;
use thiserror::Error;

/// Exact rational utility value.
pub type Rational = BigRational;

/// Convenience constructor for a rational from machine integers.
pub fn rat(numer: i64, denom: i64) -> Rational {
    BigRational::new(numer.into(), denom.into())
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("problem must have at least one action")]
    NoActions,
    #[error("coordinate {coord} has empty domain")]
    EmptyDomain { coord: usize },
    #[error("expected {expected} utility entries, got {got}")]
    UtilityCount { expected: usize, got: usize },
    #[error("coordinate index {coord} out of range for {n} coordinates")]
    CoordOutOfRange { coord: usize, n: usize },
    #[error("digit {digit} out of range for coordinate {coord} (domain size {size})")]
    DigitOutOfRange { coord: usize, digit: usize, size: usize },
    #[error("state has {got} coordinates, problem has {expected}")]
    StateLength { expected: usize, got: usize },
    #[error("state index {index} out of range ({num_states} states)")]
    StateOutOfRange { index: usize, num_states: usize },
}

/// A state given by its digits; coordinate 0 is least significant in the
/// mixed-radix index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State {
    pub coords: Vec<usize>,
}

impl State {
    pub fn new(coords: Vec<usize>) -> Self {
        State { coords }
    }
}

/// A sorted, duplicate-free set of coordinate indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct CoordSet {
    members: Vec<usize>,
}

impl CoordSet {
    pub fn new(mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        CoordSet { members }
    }

    pub fn empty() -> Self {
        CoordSet { members: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        CoordSet { members: (0..n).collect() }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, coord: usize) -> bool {
        self.members.binary_search(&coord).is_ok()
    }

    pub fn is_subset_of(&self, other: &CoordSet) -> bool {
        self.members.iter().all(|c| other.contains(*c))
    }

    pub fn with(&self, coord: usize) -> CoordSet {
        let mut m = self.members.clone();
        m.push(coord);
        CoordSet::new(m)
    }

    pub fn without(&self, coord: usize) -> CoordSet {
        CoordSet {
            members: self.members.iter().copied().filter(|c| *c != coord).collect(),
        }
    }

    /// Every subset of {0, …, n−1} in mask order (∅ first).
    pub fn all_subsets(n: usize) -> impl Iterator<Item = CoordSet> {
        assert!(n < usize::BITS as usize, "subset lattice too large");
        (0usize..(1 << n)).map(move |mask| {
            CoordSet::new((0..n).filter(|i| mask >> i & 1 == 1).collect())
        })
    }
}

/// The nonempty set of actions attaining the exact maximum utility,
/// canonically sorted so set equality is list equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OptSet {
    actions: Vec<usize>,
}

impl OptSet {
    pub fn new(mut actions: Vec<usize>) -> Self {
        actions.sort_unstable();
        actions.dedup();
        OptSet { actions }
    }

    pub fn actions(&self) -> &[usize] {
        &self.actions
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_singleton(&self) -> bool {
        self.actions.len() == 1
    }

    pub fn contains(&self, action: usize) -> bool {
        self.actions.binary_search(&action).is_ok()
    }
}

/// Yes/no outcome of a decider.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Answer {
    Yes,
    No,
}

/// Evidence attached to a verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// Two state indices with equal projection but different OptSets.
    Pair { s: usize, s_prime: usize },
    /// An anchor assignment to a coordinate set.
    Anchor(Assignment),
    /// A coordinate set (e.g. the minimum sufficient set).
    Coords(CoordSet),
    /// A single offending state index.
    State(usize),
    /// A fiber value (projection digits) witnessing a bad fiber.
    Fiber(Vec<usize>),
    /// A fiber value together with its unique optimal action.
    FiberAction { alpha: Vec<usize>, action: usize },
}

/// A partial assignment: one digit per member of a coordinate set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub coords: CoordSet,
    /// Digits in the order of `coords.members()`.
    pub digits: Vec<usize>,
}

/// Decision + witness + certified step count.
///
/// A step is one OptSet computation or one OptSet equality comparison
/// (fiber-optimizer computations count as OptSet computations in the
/// stochastic deciders).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub answer: Answer,
    pub witness: Option<Witness>,
    pub steps: u64,
    /// Free-form qualifier (e.g. how zero-mass fibers were treated).
    pub note: Option<String>,
}

impl Verdict {
    pub fn yes(steps: u64) -> Self {
        Verdict { answer: Answer::Yes, witness: None, steps, note: None }
    }

    pub fn yes_with(witness: Witness, steps: u64) -> Self {
        Verdict { answer: Answer::Yes, witness: Some(witness), steps, note: None }
    }

    pub fn no_with(witness: Witness, steps: u64) -> Self {
        Verdict { answer: Answer::No, witness: Some(witness), steps, note: None }
    }

    pub fn is_yes(&self) -> bool {
        self.answer == Answer::Yes
    }
}

/// A finite decision problem: actions, coordinate domains, and an exact
/// rational utility table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionProblem {
    actions: Vec<String>,
    domains: Vec<usize>,
    /// Row-major by action: utilities[a * num_states + s].
    utilities: Vec<Rational>,
}

impl DecisionProblem {
    pub fn new(
        actions: Vec<String>,
        domains: Vec<usize>,
        utilities: Vec<Rational>,
    ) -> Result<Self, ModelError> {
        if actions.is_empty() {
            return Err(ModelError::NoActions);
        }
        for (coord, &size) in domains.iter().enumerate() {
            if size == 0 {
                return Err(ModelError::EmptyDomain { coord });
            }
        }
        let num_states: usize = domains.iter().product();
        let expected = actions.len() * num_states;
        if utilities.len() != expected {
            return Err(ModelError::UtilityCount { expected, got: utilities.len() });
        }
        Ok(DecisionProblem { actions, domains, utilities })
    }

    /// Build from a utility function over (action index, state index).
    pub fn from_fn(
        actions: Vec<String>,
        domains: Vec<usize>,
        mut u: impl FnMut(usize, usize) -> Rational,
    ) -> Result<Self, ModelError> {
        let num_states: usize = domains.iter().product();
        let num_actions = actions.len();
        let mut utilities = Vec::with_capacity(num_actions * num_states);
        for a in 0..num_actions {
            for s in 0..num_states {
                utilities.push(u(a, s));
            }
        }
        DecisionProblem::new(actions, domains, utilities)
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn domains(&self) -> &[usize] {
        &self.domains
    }

    pub fn num_coords(&self) -> usize {
        self.domains.len()
    }

    pub fn num_states(&self) -> usize {
        self.domains.iter().product()
    }

    pub fn utility(&self, action: usize, state: usize) -> &Rational {
        &self.utilities[action * self.num_states() + state]
    }

    pub fn utilities(&self) -> &[Rational] {
        &self.utilities
    }

    /// Mixed-radix index of a state (coordinate 0 least significant).
    pub fn index_of(&self, s: &State) -> Result<usize, ModelError> {
        if s.coords.len() != self.domains.len() {
            return Err(ModelError::StateLength {
                expected: self.domains.len(),
                got: s.coords.len(),
            });
        }
        let mut index = 0usize;
        let mut stride = 1usize;
        for (coord, (&digit, &size)) in s.coords.iter().zip(&self.domains).enumerate() {
            if digit >= size {
                return Err(ModelError::DigitOutOfRange { coord, digit, size });
            }
            index += digit * stride;
            stride *= size;
        }
        Ok(index)
    }

    /// Digits of the state with the given mixed-radix index.
    pub fn state_of(&self, index: usize) -> State {
        debug_assert!(index < self.num_states());
        let mut rest = index;
        let coords = self
            .domains
            .iter()
            .map(|&size| {
                let digit = rest % size;
                rest /= size;
                digit
            })
            .collect();
        State::new(coords)
    }

    /// All states in ascending mixed-radix index order.
    pub fn states(&self) -> impl Iterator<Item = State> + '_ {
        (0..self.num_states()).map(|i| self.state_of(i))
    }

    /// Opt(s): the actions attaining the exact maximum utility at state `s`.
    pub fn opt_index(&self, state: usize) -> OptSet {
        let mut best: Vec<usize> = vec![0];
        for a in 1..self.num_actions() {
            match self.utility(a, state).cmp(self.utility(best[0], state)) {
                std::cmp::Ordering::Greater => best = vec![a],
                std::cmp::Ordering::Equal => best.push(a),
                std::cmp::Ordering::Less => {}
            }
        }
        OptSet::new(best)
    }

    pub fn opt(&self, s: &State) -> Result<OptSet, ModelError> {
        Ok(self.opt_index(self.index_of(s)?))
    }
}

/// s_I: the digits of `s` at the indices of `I`, in I's sorted order.
pub fn project(s: &State, i: &CoordSet) -> Vec<usize> {
    i.members().iter().map(|&c| s.coords[c]).collect()
}

/// Group all states by their I-projection; returns (projection key → state
/// indices) in deterministic key order.
pub fn fibers(problem: &DecisionProblem, i: &CoordSet) -> BTreeMap<Vec<usize>, Vec<usize>> {
    let mut groups: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (idx, s) in problem.states().enumerate() {
        groups.entry(project(&s, i)).or_default().push(idx);
    }
    groups
}

/// Definitional sufficiency oracle: YES iff all states agreeing on I have
/// identical OptSets. Fiber-grouped single pass; steps count OptSet
/// computations plus OptSet comparisons (≤ 2·|S|).
pub fn is_sufficient_oracle(problem: &DecisionProblem, i: &CoordSet) -> Verdict {
    let mut steps = 0u64;
    // first state index and OptSet seen per fiber
    let mut seen: BTreeMap<Vec<usize>, (usize, OptSet)> = BTreeMap::new();
    for (idx, s) in problem.states().enumerate() {
        let key = project(&s, i);
        let opt = problem.opt_index(idx);
        steps += 1;
        match seen.get(&key) {
            None => {
                seen.insert(key, (idx, opt));
            }
            Some((first, first_opt)) => {
                steps += 1;
                if *first_opt != opt {
                    return Verdict::no_with(Witness::Pair { s: *first, s_prime: idx }, steps);
                }
            }
        }
    }
    Verdict::yes(steps)
}

/// A relevant coordinate together with one witnessing state pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelevantCoordinate {
    pub coord: usize,
    /// State indices differing only at `coord` with different OptSets.
    pub witness: (usize, usize),
}

/// Brute force over all (s, i, v): coordinate i is relevant iff some state s
/// and digit v ≠ s_i satisfy Opt(s) ≠ Opt(s[i:=v]).
pub fn relevant_coordinates(problem: &DecisionProblem) -> Vec<RelevantCoordinate> {
    let opts: Vec<OptSet> = (0..problem.num_states())
        .map(|idx| problem.opt_index(idx))
        .collect();
    let mut result = Vec::new();
    'coords: for coord in 0..problem.num_coords() {
        for (idx, s) in problem.states().enumerate() {
            for v in 0..problem.domains()[coord] {
                if v == s.coords[coord] {
                    continue;
                }
                let mut t = s.clone();
                t.coords[coord] = v;
                let t_idx = problem.index_of(&t).expect("digit within domain");
                if opts[idx] != opts[t_idx] {
                    result.push(RelevantCoordinate { coord, witness: (idx, t_idx) });
                    continue 'coords;
                }
            }
        }
    }
    result
}

/// The coordinate set underlying a relevance report.
pub fn relevant_set(problem: &DecisionProblem) -> CoordSet {
    CoordSet::new(relevant_coordinates(problem).into_iter().map(|r| r.coord).collect())
}

/// The unique minimum sufficient set, which equals the relevant set.
pub fn minimum_sufficient_set(problem: &DecisionProblem) -> CoordSet {
    let result = relevant_set(problem);
    #[cfg(debug_assertions)]
    {
        debug_assert!(is_sufficient_oracle(problem, &result).is_yes());
        for &c in result.members() {
            debug_assert!(!is_sufficient_oracle(problem, &result.without(c)).is_yes());
        }
    }
    result
}

/// The optimizer quotient S / ∼_Opt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quotient {
    /// class id per state index.
    pub class_of: Vec<usize>,
    /// first (lowest-index) state of each class.
    pub representatives: Vec<usize>,
    /// canonical OptSet of each class.
    pub class_optset: Vec<OptSet>,
}

impl Quotient {
    pub fn num_classes(&self) -> usize {
        self.representatives.len()
    }
}

/// Partition states by OptSet equality; class ids are assigned in order of
/// first appearance (ascending state index).
pub fn quotient(problem: &DecisionProblem) -> Quotient {
    let mut by_optset: BTreeMap<OptSet, usize> = BTreeMap::new();
    let mut class_of = Vec::with_capacity(problem.num_states());
    let mut representatives = Vec::new();
    let mut class_optset = Vec::new();
    for idx in 0..problem.num_states() {
        let opt = problem.opt_index(idx);
        let id = match by_optset.get(&opt) {
            Some(&id) => id,
            None => {
                let id = representatives.len();
                representatives.push(idx);
                class_optset.push(opt.clone());
                by_optset.insert(opt, id);
                id
            }
        };
        class_of.push(id);
    }
    Quotient { class_of, representatives, class_optset }
}

/// Outcome of attempting to factor the quotient projection through a map φ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Factorization {
    /// The unique ψ with π = ψ∘φ, as label → class id.
    Factors(BTreeMap<usize, usize>),
    /// φ merges two states in different quotient classes.
    Refusal { s: usize, s_prime: usize },
}

/// If φ (state index → label) respects ∼_Opt, return the unique ψ with
/// π = ψ∘φ; otherwise return a violating pair.
pub fn factor_through(problem: &DecisionProblem, phi: &[usize]) -> Factorization {
    assert_eq!(phi.len(), problem.num_states(), "phi must be total on S");
    let q = quotient(problem);
    let mut psi: BTreeMap<usize, usize> = BTreeMap::new();
    let mut first_state: BTreeMap<usize, usize> = BTreeMap::new();
    for (idx, &label) in phi.iter().enumerate() {
        match psi.get(&label) {
            None => {
                psi.insert(label, q.class_of[idx]);
                first_state.insert(label, idx);
            }
            Some(&class) => {
                if class != q.class_of[idx] {
                    return Factorization::Refusal {
                        s: first_state[&label],
                        s_prime: idx,
                    };
                }
            }
        }
    }
    Factorization::Factors(psi)
}
