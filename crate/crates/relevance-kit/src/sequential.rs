//! Sequential decision problems with transitions and a finite horizon; the
//! induced optimizer (immediate and horizon-backup modes) and the sequential
//! sufficiency / anchor / minimum deciders.

use num::{BigRational, One, Zero};
use thiserror::Error;

use crate::deciders::{
    check_anchor, check_sufficiency_with, find_minimum_sufficient_with, MinimumMode,
    SufficiencyStrategy,
};
use crate::model::{CoordSet, DecisionProblem, OptSet, Rational, Verdict};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeqError {
    #[error("transition table must have one row per (action, state)")]
    TransitionShape,
    #[error("transition row for action {action}, state {state} sums to {sum}, expected 1")]
    RowMass { action: usize, state: usize, sum: String },
    #[error("transition row for action {action}, state {state} has a negative probability")]
    NegativeProbability { action: usize, state: usize },
    #[error("transition target {target} out of range ({num_states} states)")]
    TargetOutOfRange { target: usize, num_states: usize },
    #[error("lattice search needs 2^{n} subsets, budget allows n ≤ {budget}")]
    Capacity { n: usize, budget: usize },
}

/// How the one-step optimizer is induced from the sequential model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeqMode {
    /// Opt_seq = Opt of the base problem; transitions and horizon ignored.
    Immediate,
    /// Opt_seq(s) = argmax_a Q_H(a,s) under exact finite-horizon backup.
    Backup,
}

/// A finite decision problem with a transition kernel, a horizon, and an
/// (unused by the deciders, but carried) observation labeling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequentialProblem {
    base: DecisionProblem,
    /// transitions[action][state] = sparse row of (target state, probability).
    transitions: Vec<Vec<Vec<(usize, Rational)>>>,
    horizon: usize,
    pub observations: Option<Vec<String>>,
    pub mode: SeqMode,
}

impl SequentialProblem {
    pub fn new(
        base: DecisionProblem,
        transitions: Vec<Vec<Vec<(usize, Rational)>>>,
        horizon: usize,
        observations: Option<Vec<String>>,
        mode: SeqMode,
    ) -> Result<Self, SeqError> {
        let num_states = base.num_states();
        if transitions.len() != base.num_actions()
            || transitions.iter().any(|rows| rows.len() != num_states)
        {
            return Err(SeqError::TransitionShape);
        }
        for (action, rows) in transitions.iter().enumerate() {
            for (state, row) in rows.iter().enumerate() {
                let mut sum = BigRational::zero();
                for (target, p) in row {
                    if *target >= num_states {
                        return Err(SeqError::TargetOutOfRange {
                            target: *target,
                            num_states,
                        });
                    }
                    if p < &BigRational::zero() {
                        return Err(SeqError::NegativeProbability { action, state });
                    }
                    sum += p;
                }
                if !sum.is_one() {
                    return Err(SeqError::RowMass { action, state, sum: sum.to_string() });
                }
            }
        }
        Ok(SequentialProblem { base, transitions, horizon, observations, mode })
    }

    /// An immediate-mode wrapper around a one-shot problem (identity
    /// transitions, horizon 0).
    pub fn immediate(base: DecisionProblem) -> Self {
        let num_states = base.num_states();
        let identity_row =
            |s: usize| vec![(s, BigRational::one())];
        let transitions = (0..base.num_actions())
            .map(|_| (0..num_states).map(identity_row).collect())
            .collect();
        SequentialProblem {
            base,
            transitions,
            horizon: 0,
            observations: None,
            mode: SeqMode::Immediate,
        }
    }

    pub fn base(&self) -> &DecisionProblem {
        &self.base
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn transitions(&self) -> &[Vec<Vec<(usize, Rational)>>] {
        &self.transitions
    }

    /// Exact finite-horizon action values: Q₀ = U,
    /// Q_t(a,s) = Σ_{s'} T(a,s)(s')·V_{t−1}(s'), V_t(s) = max_a Q_t(a,s).
    /// Returns Q_H as a table indexed like the base utilities.
    pub fn backup_values(&self) -> Vec<Rational> {
        let num_states = self.base.num_states();
        let num_actions = self.base.num_actions();
        let mut q: Vec<Rational> = self.base.utilities().to_vec();
        for _ in 0..self.horizon {
            let v: Vec<Rational> = (0..num_states)
                .map(|s| {
                    (0..num_actions)
                        .map(|a| q[a * num_states + s].clone())
                        .max()
                        .expect("actions nonempty")
                })
                .collect();
            let mut next = Vec::with_capacity(q.len());
            for a in 0..num_actions {
                for s in 0..num_states {
                    let value: Rational = self.transitions[a][s]
                        .iter()
                        .map(|(t, p)| p * &v[*t])
                        .sum();
                    next.push(value);
                }
            }
            q = next;
        }
        q
    }

    /// The explicit one-step problem whose Opt equals Opt_seq under the
    /// configured mode. The sequential deciders run on this problem.
    pub fn induced_problem(&self) -> DecisionProblem {
        match self.mode {
            SeqMode::Immediate => self.base.clone(),
            SeqMode::Backup => DecisionProblem::new(
                self.base.actions().to_vec(),
                self.base.domains().to_vec(),
                self.backup_values(),
            )
            .expect("base problem is well-formed"),
        }
    }
}

/// Opt_seq per state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedOptimizer {
    pub optsets: Vec<OptSet>,
}

pub fn induced_optimizer(sq: &SequentialProblem) -> InducedOptimizer {
    let induced = sq.induced_problem();
    InducedOptimizer {
        optsets: (0..induced.num_states()).map(|s| induced.opt_index(s)).collect(),
    }
}

/// Sufficiency of Opt_seq under I-projection. Pairwise scan keeps the
/// certified |S|² bound; fiber-grouped is the fast mode.
pub fn check_seq_sufficiency(sq: &SequentialProblem, i: &CoordSet) -> Verdict {
    check_seq_sufficiency_with(sq, i, SufficiencyStrategy::Pairwise)
}

pub fn check_seq_sufficiency_with(
    sq: &SequentialProblem,
    i: &CoordSet,
    strategy: SufficiencyStrategy,
) -> Verdict {
    check_sufficiency_with(&sq.induced_problem(), i, strategy)
}

/// Anchor sufficiency for Opt_seq: some I-agreement class on which Opt_seq
/// is constant. Steps ≤ 2·|S|.
pub fn check_seq_anchor(sq: &SequentialProblem, i: &CoordSet) -> Verdict {
    check_anchor(&sq.induced_problem(), i)
}

/// Minimum sequentially sufficient set: collapse shortcut via the relevant
/// coordinates of Opt_seq, or the subset-lattice scan (≤ 2ⁿ checks).
pub fn find_seq_minimum(sq: &SequentialProblem, k: usize) -> Verdict {
    find_seq_minimum_with(sq, k, MinimumMode::Collapse)
}

pub fn find_seq_minimum_with(
    sq: &SequentialProblem,
    k: usize,
    mode: MinimumMode,
) -> Verdict {
    find_minimum_sufficient_with(&sq.induced_problem(), k, mode)
}
