//! Certification layer: the inspection-counting adversary argument, the
//! approximation-threshold decider, budget-limited certifiers with honest
//! abstention and witness replay, and the relevance partition for
//! externalized coordinates.

use std::cell::RefCell;
use std::collections::BTreeSet;

use num::BigRational;
use thiserror::Error;

use crate::circuit::{CircuitError, Formula};
use crate::deciders::{check_anchor, check_sufficiency, find_minimum_sufficient};
use crate::model::{
    fibers, project, rat, Answer, CoordSet, DecisionProblem, Verdict, Witness,
};
use crate::reductions::{gadget_shifted, shifted_optimum};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertifyError {
    #[error("circuit error: {0}")]
    Circuit(#[from] CircuitError),
    #[error("approximation factor {rho} is outside the gap regime 1 ≤ ρ ≤ {max}")]
    OutOfGap { rho: usize, max: usize },
    #[error("malformed certification input: {0}")]
    Shape(String),
}

/// A utility table that can only be read through a counting wrapper; every
/// (action, state) inspection is recorded.
pub struct SlotOracle {
    problem: DecisionProblem,
    inspected: RefCell<BTreeSet<(usize, usize)>>,
}

impl SlotOracle {
    pub fn new(problem: DecisionProblem) -> Self {
        SlotOracle { problem, inspected: RefCell::new(BTreeSet::new()) }
    }

    pub fn num_actions(&self) -> usize {
        self.problem.num_actions()
    }

    pub fn num_states(&self) -> usize {
        self.problem.num_states()
    }

    pub fn domains(&self) -> &[usize] {
        self.problem.domains()
    }

    /// The only read path; records the inspection.
    pub fn utility(&self, action: usize, state: usize) -> BigRational {
        self.inspected.borrow_mut().insert((action, state));
        self.problem.utility(action, state).clone()
    }

    pub fn inspected(&self) -> BTreeSet<(usize, usize)> {
        self.inspected.borrow().clone()
    }

    /// States whose (action 1) entry was never read.
    pub fn uninspected_states_for_action(&self, action: usize) -> Vec<usize> {
        let seen = self.inspected.borrow();
        (0..self.problem.num_states())
            .filter(|&s| !seen.contains(&(action, s)))
            .collect()
    }
}

/// The hidden-slot family over n Boolean coordinates (coordinate 0 is the
/// distinguished flag, coordinates 1..n are slots).
///
/// YES instance: U(a₀,·) = 1, U(a₁,·) = 0, so Opt ≡ {a₀} and {0} is
/// sufficient. NO instance at slot z*: identical except U(a₁, (1, z*)) = 2,
/// which flips Opt at one state of the flag-1 fiber, so {0} is insufficient.
pub fn slot_yes_instance(n: usize) -> DecisionProblem {
    DecisionProblem::from_fn(
        vec!["a0".into(), "a1".into()],
        vec![2; n],
        |a, _| if a == 0 { rat(1, 1) } else { rat(0, 1) },
    )
    .expect("well-formed")
}

pub fn slot_no_instance(n: usize, z_star: usize) -> DecisionProblem {
    // state index of (flag = 1, slots = z*): flag is coordinate 0
    let flipped = 1 + 2 * z_star;
    DecisionProblem::from_fn(vec!["a0".into(), "a1".into()], vec![2; n], |a, s| {
        if a == 0 {
            rat(1, 1)
        } else if s == flipped {
            rat(2, 1)
        } else {
            rat(0, 1)
        }
    })
    .expect("well-formed")
}

/// Outcome of one adversary round against a probing decider.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdversaryOutcome {
    /// The decider inspected every slot entry, so no agreeing NO instance
    /// exists; the adversary refuses.
    Refusal { inspected_slots: usize },
    /// The decider left slot z* unread; the NO instance at z* agrees with
    /// every inspected entry yet has the opposite correct answer.
    Fooled {
        z_star: usize,
        answer_on_yes: Answer,
        answer_on_no: Answer,
        /// True iff the decider gave the same answer on both — i.e. it is
        /// provably wrong on one of two instances it cannot distinguish.
        indistinguishable: bool,
    },
}

/// Run a probing decider (which may only read utilities through the oracle)
/// on the YES instance of the hidden-slot family, then try to fool it.
///
/// The decider answers whether {0} is sufficient. If any slot entry of
/// action a₁ in the flag-1 half went unread, the NO instance at that slot is
/// consistent with everything the decider saw, so a decider that answered
/// from those reads alone answers identically on an instance with the
/// opposite truth. This certifies the 2^{n−1} inspection lower bound.
pub fn adversary_game(
    n: usize,
    decider: &dyn Fn(&SlotOracle, &CoordSet) -> Answer,
) -> AdversaryOutcome {
    assert!(n >= 2, "the slot family needs a flag and at least one slot");
    let i = CoordSet::new(vec![0]);
    let oracle = SlotOracle::new(slot_yes_instance(n));
    let answer_on_yes = decider(&oracle, &i);
    let num_slots = 1usize << (n - 1);
    // slot z's critical entry is (a₁, flag-1 state of z)
    let seen = oracle.inspected();
    let unread: Vec<usize> =
        (0..num_slots).filter(|&z| !seen.contains(&(1, 1 + 2 * z))).collect();
    match unread.first() {
        None => AdversaryOutcome::Refusal { inspected_slots: num_slots },
        Some(&z_star) => {
            let no_oracle = SlotOracle::new(slot_no_instance(n, z_star));
            let answer_on_no = decider(&no_oracle, &i);
            AdversaryOutcome::Fooled {
                z_star,
                answer_on_yes,
                answer_on_no,
                indistinguishable: answer_on_yes == answer_on_no,
            }
        }
    }
}

/// The agree/disagree bit a slot-inspection checker learns for slot z: true
/// iff Opt((0, z)) = Opt((1, z)).
pub fn slot_transcript_bit(problem: &DecisionProblem, z: usize) -> bool {
    problem.opt_index(2 * z) == problem.opt_index(1 + 2 * z)
}

/// For an inspected slot set of size < 2^{n−1}, produce a YES/NO instance
/// pair that is transcript-identical on every inspected slot yet has
/// opposite truth for "is {0} sufficient", together with the separating
/// slot. Returns None when every slot was inspected (the adversary refuses).
pub fn adversary_pair(
    n: usize,
    inspected: &BTreeSet<usize>,
) -> Option<(DecisionProblem, DecisionProblem, usize)> {
    assert!(n >= 2, "the slot family needs a flag and at least one slot");
    let num_slots = 1usize << (n - 1);
    let z_star = (0..num_slots).find(|z| !inspected.contains(z))?;
    Some((slot_yes_instance(n), slot_no_instance(n, z_star), z_star))
}

/// A sufficiency decider that reads only through the oracle (fiber-grouped
/// scan); sound, complete, and it reads every entry it needs.
pub fn probing_sufficiency_decider(oracle: &SlotOracle, i: &CoordSet) -> Answer {
    // rebuild OptSets from oracle reads only
    let shape = DecisionProblem::from_fn(
        (0..oracle.num_actions()).map(|a| format!("a{a}")).collect(),
        oracle.domains().to_vec(),
        |_, _| rat(0, 1),
    )
    .expect("well-formed");
    let mut seen: std::collections::BTreeMap<Vec<usize>, crate::model::OptSet> =
        std::collections::BTreeMap::new();
    for (idx, s) in shape.states().enumerate() {
        let values: Vec<BigRational> =
            (0..oracle.num_actions()).map(|a| oracle.utility(a, idx)).collect();
        let best = values.iter().max().expect("actions nonempty");
        let opt = crate::model::OptSet::new(
            values
                .iter()
                .enumerate()
                .filter(|(_, v)| *v == best)
                .map(|(a, _)| a)
                .collect(),
        );
        let key = project(&s, i);
        match seen.get(&key) {
            None => {
                seen.insert(key, opt);
            }
            Some(first) => {
                if *first != opt {
                    return Answer::No;
                }
            }
        }
    }
    Answer::Yes
}

/// Decide TAUTOLOGY through any ρ-approximate minimizer of the shifted
/// family: in the gap regime 1 ≤ ρ ≤ n (n = formula variables), the family's
/// optimum is 1 on tautologies and n+1 otherwise, so "approximate optimum
/// ≤ ρ" is already exact. Here the approximate minimizer is instantiated by
/// the exact one (any ρ-factor answer lies in the same gap side).
pub fn threshold_decider(f: &Formula, rho: usize) -> Result<Verdict, CertifyError> {
    let n = f.num_vars();
    if rho < 1 || rho > n {
        return Err(CertifyError::OutOfGap { rho, max: n });
    }
    let gadget = gadget_shifted(f)?;
    let optimum = shifted_optimum(&gadget)?;
    let answer = if optimum <= rho { Answer::Yes } else { Answer::No };
    Ok(Verdict {
        answer,
        witness: None,
        steps: 0,
        note: Some(format!("shifted-family optimum = {optimum}, threshold ρ = {rho}")),
    })
}

/// Which query a budgeted certifier ran.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertQuery {
    Sufficiency { i: CoordSet },
    Anchor { i: CoordSet },
    Minimum { k: usize },
}

/// Certifier output: a replayed verdict, or an honest abstention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Decided(Verdict),
    Abstain { steps_needed: u64, budget: u64 },
}

impl Outcome {
    pub fn is_abstain(&self) -> bool {
        matches!(self, Outcome::Abstain { .. })
    }
}

/// Runs counted deciders and emits a verdict only when the certified step
/// count fits the budget and the attached witness replays against the
/// instance; otherwise abstains. The underlying deciders are deterministic,
/// so outcomes are monotone in the budget: once decided, a larger budget
/// yields the identical verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetedCertifier {
    pub budget: u64,
}

impl BudgetedCertifier {
    pub fn new(budget: u64) -> Self {
        BudgetedCertifier { budget }
    }

    pub fn run(&self, problem: &DecisionProblem, query: &CertQuery) -> Outcome {
        let verdict = match query {
            CertQuery::Sufficiency { i } => check_sufficiency(problem, i),
            CertQuery::Anchor { i } => check_anchor(problem, i),
            CertQuery::Minimum { k } => find_minimum_sufficient(problem, *k),
        };
        if verdict.steps > self.budget {
            return Outcome::Abstain { steps_needed: verdict.steps, budget: self.budget };
        }
        assert!(
            replay_witness(problem, query, &verdict),
            "witness replay failed; refusing to certify"
        );
        Outcome::Decided(verdict)
    }
}

/// Independently re-check a verdict's witness against the instance.
pub fn replay_witness(problem: &DecisionProblem, query: &CertQuery, v: &Verdict) -> bool {
    match (query, v.answer, &v.witness) {
        (CertQuery::Sufficiency { i }, Answer::No, Some(Witness::Pair { s, s_prime })) => {
            let a = problem.state_of(*s);
            let b = problem.state_of(*s_prime);
            project(&a, i) == project(&b, i)
                && problem.opt_index(*s) != problem.opt_index(*s_prime)
        }
        (CertQuery::Sufficiency { .. }, Answer::Yes, None) => true,
        (CertQuery::Anchor { i }, Answer::Yes, Some(Witness::Anchor(assignment))) => {
            if assignment.coords != *i {
                return false;
            }
            let groups = fibers(problem, i);
            match groups.get(&assignment.digits) {
                None => false,
                Some(states) => {
                    let first = problem.opt_index(states[0]);
                    states.iter().all(|&s| problem.opt_index(s) == first)
                }
            }
        }
        (CertQuery::Anchor { .. }, Answer::No, None) => true,
        (CertQuery::Minimum { k }, answer, Some(Witness::Coords(set))) => {
            let sufficient = crate::model::is_sufficient_oracle(problem, set).is_yes();
            let size_ok = match answer {
                Answer::Yes => set.len() <= *k,
                Answer::No => set.len() > *k,
            };
            sufficient && size_ok
        }
        _ => false,
    }
}

/// Relevant coordinates split by an externalized-machinery boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalizedReport {
    /// Relevant coordinates the agent's machinery occupies.
    pub internal: CoordSet,
    /// Relevant coordinates outside the machinery.
    pub external: CoordSet,
}

/// Partition the relevant set by membership in the machinery coordinates.
pub fn externalized_relevance(
    problem: &DecisionProblem,
    machine_coords: &CoordSet,
) -> ExternalizedReport {
    let relevant = crate::model::relevant_set(problem);
    let (internal, external): (Vec<usize>, Vec<usize>) = relevant
        .members()
        .iter()
        .partition(|&&c| machine_coords.contains(c));
    ExternalizedReport {
        internal: CoordSet::new(internal),
        external: CoordSet::new(external),
    }
}

/// One row of the benchmark table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRow {
    pub instance: String,
    pub regime: String,
    pub query: String,
    pub num_states: usize,
    pub num_coords: usize,
    pub steps: u64,
    pub budget: u64,
    pub outcome: String,
}

pub fn bench_csv_header() -> &'static str {
    "instance,regime,query,num_states,num_coords,steps,budget,outcome"
}

impl BenchRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.instance,
            self.regime,
            self.query,
            self.num_states,
            self.num_coords,
            self.steps,
            self.budget,
            self.outcome
        )
    }
}
