//! Distributions over states, conditional fiber optimizers, and the four
//! stochastic deciders: preservation, decisiveness, anchor, and minimum —
//! plus the full-support bridge checks used in tests.

use std::collections::BTreeMap;

use num::{BigRational, One, Zero};
use thiserror::Error;

use crate::model::{
    project, Answer, CoordSet, DecisionProblem, OptSet, Rational, Verdict, Witness,
};

/// Default cap on n for the subset-lattice minimum search.
pub const DEFAULT_LATTICE_BUDGET: usize = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StochError {
    #[error("distribution has {got} entries, problem has {expected} states")]
    DistributionLength { expected: usize, got: usize },
    #[error("probability of state {state} is negative")]
    NegativeProbability { state: usize },
    #[error("probabilities sum to {sum}, expected 1")]
    BadTotalMass { sum: String },
    #[error("support is empty")]
    EmptySupport,
    #[error("lattice search needs 2^{n} subsets, budget allows n ≤ {budget}")]
    Capacity { n: usize, budget: usize },
}

/// A decision problem together with an exact rational distribution over its
/// states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StochasticProblem {
    base: DecisionProblem,
    dist: Vec<Rational>,
}

impl StochasticProblem {
    pub fn new(base: DecisionProblem, dist: Vec<Rational>) -> Result<Self, StochError> {
        if dist.len() != base.num_states() {
            return Err(StochError::DistributionLength {
                expected: base.num_states(),
                got: dist.len(),
            });
        }
        let mut sum = BigRational::zero();
        for (state, p) in dist.iter().enumerate() {
            if p < &BigRational::zero() {
                return Err(StochError::NegativeProbability { state });
            }
            sum += p;
        }
        if !sum.is_one() {
            return Err(StochError::BadTotalMass { sum: sum.to_string() });
        }
        if dist.iter().all(|p| p.is_zero()) {
            return Err(StochError::EmptySupport);
        }
        Ok(StochasticProblem { base, dist })
    }

    /// The uniform distribution over all states.
    pub fn uniform(base: DecisionProblem) -> Result<Self, StochError> {
        let n = base.num_states();
        let p = BigRational::new(1.into(), (n as i64).into());
        StochasticProblem::new(base, vec![p; n])
    }

    pub fn base(&self) -> &DecisionProblem {
        &self.base
    }

    pub fn dist(&self) -> &[Rational] {
        &self.dist
    }

    pub fn prob(&self, state: usize) -> &Rational {
        &self.dist[state]
    }

    /// True if every state has positive probability.
    pub fn full_support(&self) -> bool {
        self.dist.iter().all(|p| p > &BigRational::zero())
    }
}

/// Conditional expected utilities and OptSet for one positive-mass fiber.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberEntry {
    pub mass: Rational,
    pub states: Vec<usize>,
    /// Conditional expectation E[U(a,S) | S_I = α] per action.
    pub cond_utilities: Vec<Rational>,
    pub optset: OptSet,
}

/// Opt^stoch_I: one entry per positive-mass fiber value α, in lexicographic
/// order of α.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberOptimizer {
    pub entries: BTreeMap<Vec<usize>, FiberEntry>,
}

impl FiberOptimizer {
    pub fn optset_at(&self, alpha: &[usize]) -> Option<&OptSet> {
        self.entries.get(alpha).map(|e| &e.optset)
    }
}

/// Compute the conditional fiber optimizer for every positive-mass fiber of I.
pub fn fiber_optimizer(sp: &StochasticProblem, i: &CoordSet) -> FiberOptimizer {
    let base = sp.base();
    let mut grouped: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (idx, s) in base.states().enumerate() {
        grouped.entry(project(&s, i)).or_default().push(idx);
    }
    let mut entries = BTreeMap::new();
    for (alpha, states) in grouped {
        let mass: Rational = states.iter().map(|&s| sp.prob(s).clone()).sum();
        if mass.is_zero() {
            continue;
        }
        let cond_utilities: Vec<Rational> = (0..base.num_actions())
            .map(|a| {
                let weighted: Rational = states
                    .iter()
                    .map(|&s| sp.prob(s) * base.utility(a, s))
                    .sum();
                weighted / &mass
            })
            .collect();
        let best = cond_utilities.iter().max().expect("actions nonempty");
        let optset = OptSet::new(
            cond_utilities
                .iter()
                .enumerate()
                .filter(|(_, u)| *u == best)
                .map(|(a, _)| a)
                .collect(),
        );
        entries.insert(alpha, FiberEntry { mass, states, cond_utilities, optset });
    }
    FiberOptimizer { entries }
}

/// How states in zero-mass fibers are treated by preservation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroMassPolicy {
    /// Zero-mass fibers are skipped (vacuously preserved). Default.
    Skip,
    /// Any state inside a zero-mass fiber makes the answer NO.
    Strict,
}

/// Preservation: YES iff Opt^stoch_I(s_I) = Opt(s) for every state in a
/// positive-mass fiber. Steps ≤ 3·|S| (one fiber-optimizer computation per
/// fiber, one OptSet computation and one comparison per state).
pub fn check_preservation(sp: &StochasticProblem, i: &CoordSet) -> Verdict {
    check_preservation_with(sp, i, ZeroMassPolicy::Skip)
}

pub fn check_preservation_with(
    sp: &StochasticProblem,
    i: &CoordSet,
    policy: ZeroMassPolicy,
) -> Verdict {
    let base = sp.base();
    let fo = fiber_optimizer(sp, i);
    let mut steps = fo.entries.len() as u64;
    let mut skipped_zero_mass = false;
    for (idx, s) in base.states().enumerate() {
        let alpha = project(&s, i);
        match fo.entries.get(&alpha) {
            None => {
                if policy == ZeroMassPolicy::Strict {
                    let mut v = Verdict::no_with(Witness::State(idx), steps);
                    v.note = Some("state lies in a zero-mass fiber (strict mode)".into());
                    return v;
                }
                skipped_zero_mass = true;
            }
            Some(entry) => {
                let opt = base.opt_index(idx);
                steps += 2;
                if entry.optset != opt {
                    return Verdict::no_with(Witness::State(idx), steps);
                }
            }
        }
    }
    let mut v = Verdict::yes(steps);
    if skipped_zero_mass {
        v.note = Some("zero-mass fibers skipped (vacuously preserved)".into());
    }
    v
}

/// Decisiveness: YES iff every positive-mass fiber's conditional OptSet is a
/// singleton. Steps ≤ 2·|S|.
pub fn check_decisiveness(sp: &StochasticProblem, i: &CoordSet) -> Verdict {
    let fo = fiber_optimizer(sp, i);
    let mut steps = 0u64;
    for (alpha, entry) in &fo.entries {
        steps += 2;
        if !entry.optset.is_singleton() {
            return Verdict::no_with(Witness::Fiber(alpha.clone()), steps);
        }
    }
    Verdict::yes(steps)
}

/// Stochastic anchor sufficiency: YES iff some positive-mass fiber has a
/// singleton conditional OptSet; witness = (α, the action). Steps ≤ 2·|S|·|A|.
pub fn check_stoch_anchor(sp: &StochasticProblem, i: &CoordSet) -> Verdict {
    let fo = fiber_optimizer(sp, i);
    let mut steps = 0u64;
    for (alpha, entry) in &fo.entries {
        steps += 2;
        if entry.optset.is_singleton() {
            return Verdict::yes_with(
                Witness::FiberAction {
                    alpha: alpha.clone(),
                    action: entry.optset.actions()[0],
                },
                steps,
            );
        }
    }
    Verdict { answer: Answer::No, witness: None, steps, note: None }
}

/// Which checker the stochastic minimum search drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StochFamily {
    Preservation,
    Decisiveness,
}

/// Subset-lattice search: YES iff some I with |I| ≤ k passes the family's
/// checker. Steps count checker calls (≤ 2ⁿ).
pub fn find_stoch_minimum(
    sp: &StochasticProblem,
    k: usize,
    family: StochFamily,
) -> Result<Verdict, StochError> {
    find_stoch_minimum_with_budget(sp, k, family, DEFAULT_LATTICE_BUDGET)
}

pub fn find_stoch_minimum_with_budget(
    sp: &StochasticProblem,
    k: usize,
    family: StochFamily,
    budget: usize,
) -> Result<Verdict, StochError> {
    let n = sp.base().num_coords();
    if n > budget {
        return Err(StochError::Capacity { n, budget });
    }
    let mut checks = 0u64;
    for size in 0..=n {
        for subset in CoordSet::all_subsets(n) {
            if subset.len() != size {
                continue;
            }
            checks += 1;
            let pass = match family {
                StochFamily::Preservation => check_preservation(sp, &subset).is_yes(),
                StochFamily::Decisiveness => check_decisiveness(sp, &subset).is_yes(),
            };
            if pass {
                let answer = if size <= k { Answer::Yes } else { Answer::No };
                return Ok(Verdict {
                    answer,
                    witness: Some(Witness::Coords(subset)),
                    steps: checks,
                    note: None,
                });
            }
        }
    }
    // preservation always holds at I = full set only under full conditioning
    // of positive-mass states; decisiveness can fail everywhere (ties), so a
    // completed scan is a NO with no witness.
    Ok(Verdict { answer: Answer::No, witness: None, steps: checks, note: None })
}

/// Stochastic anchor preservation: YES iff some positive-mass fiber
/// preserves the pointwise optimizer at each of its states (equivalently,
/// some anchor state s₀ exists whose I-fiber preserves). Steps ≤ 3·|S|.
pub fn check_stoch_anchor_preservation(sp: &StochasticProblem, i: &CoordSet) -> Verdict {
    let base = sp.base();
    let fo = fiber_optimizer(sp, i);
    let mut steps = fo.entries.len() as u64;
    for entry in fo.entries.values() {
        let mut preserved = true;
        for &idx in &entry.states {
            let opt = base.opt_index(idx);
            steps += 2;
            if entry.optset != opt {
                preserved = false;
                break;
            }
        }
        if preserved {
            return Verdict::yes_with(Witness::State(entry.states[0]), steps);
        }
    }
    Verdict { answer: Answer::No, witness: None, steps, note: None }
}
