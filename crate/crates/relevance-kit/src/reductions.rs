//! Constructive gadget generators for the hardness reductions, each paired
//! with an oracle-backed verification harness.
//!
//! Every invented constant in these constructions is gated by
//! [`verify_gadget`], which compares the target decider's answer against an
//! independent brute-force oracle on the source instance.

use num::{BigInt, BigRational, One};

use crate::circuit::{
    count_satisfying, eval_qbf_oracle, expand, instance_length, is_tautology_oracle,
    BoolCircuit, CircuitError, Formula, Gate, Qbf, Quant, SuccinctProblem,
};
use crate::deciders::{check_anchor, check_sufficiency, find_minimum_sufficient};
use crate::model::{minimum_sufficient_set, rat, CoordSet, DecisionProblem, Rational};
use crate::sequential::{check_seq_sufficiency, SeqMode, SequentialProblem};
use crate::stochastic::{check_decisiveness, find_stoch_minimum, StochFamily, StochasticProblem};

/// The generated instance, in whichever regime the reduction targets.
#[derive(Debug, Clone)]
pub enum GadgetInstance {
    Explicit(DecisionProblem),
    Succinct(SuccinctProblem),
    Stochastic(StochasticProblem),
    Sequential(SequentialProblem),
}

/// The query the gadget's equivalence property is about.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GadgetQuery {
    Sufficiency { i: CoordSet },
    Anchor { i: CoordSet },
    /// Minimum sufficient set; the gadget's property classifies the optimum.
    Minimum,
    StochDecisiveness { i: CoordSet },
    /// Minimum stochastically decisive set.
    StochMinimum,
    SeqSufficiency { i: CoordSet },
}

/// Exact size accounting for the reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Accounting {
    /// Gate/entry count of the source instance.
    pub input_size: usize,
    /// Gate/entry count of the emitted instance.
    pub output_size: usize,
    pub coord_count: usize,
}

/// What the gadget was generated from (kept for verification).
#[derive(Debug, Clone)]
pub enum GadgetSource {
    Formula(Formula),
    Qbf(Qbf),
    SetCover { universe: usize, sets: Vec<Vec<usize>> },
}

#[derive(Debug, Clone)]
pub struct GadgetOutput {
    pub instance: GadgetInstance,
    pub query: GadgetQuery,
    pub accounting: Accounting,
    pub source: GadgetSource,
}

fn two_pow(e: usize) -> BigInt {
    BigInt::one() << e
}

/// Append `extra` to a circuit, yielding g ∧ base-output style compositions.
fn circuit_and(a: &BoolCircuit, b: &BoolCircuit) -> BoolCircuit {
    let mut gates = a.gates.clone();
    let offset = gates.len();
    for g in &b.gates {
        gates.push(match *g {
            Gate::Input(i) => Gate::Input(i),
            Gate::Const(c) => Gate::Const(c),
            Gate::Not(x) => Gate::Not(x + offset),
            Gate::And(x, y) => Gate::And(x + offset, y + offset),
            Gate::Or(x, y) => Gate::Or(x + offset, y + offset),
        });
    }
    let b_out = b.output + offset;
    gates.push(Gate::And(a.output, b_out));
    let output = gates.len() - 1;
    BoolCircuit { gates, output }
}

fn circuit_not(a: &BoolCircuit) -> BoolCircuit {
    let mut gates = a.gates.clone();
    gates.push(Gate::Not(a.output));
    let output = gates.len() - 1;
    BoolCircuit { gates, output }
}

/// XOR of inputs 0..n-1 built from and/or/not gates.
fn parity_circuit(n: usize) -> BoolCircuit {
    assert!(n >= 1);
    let mut gates = vec![Gate::Input(0)];
    let mut acc = 0usize;
    for i in 1..n {
        gates.push(Gate::Input(i));
        let x = gates.len() - 1;
        // acc XOR x = (acc ∨ x) ∧ ¬(acc ∧ x)
        gates.push(Gate::Or(acc, x));
        let or = gates.len() - 1;
        gates.push(Gate::And(acc, x));
        let and = gates.len() - 1;
        gates.push(Gate::Not(and));
        let nand = gates.len() - 1;
        gates.push(Gate::And(or, nand));
        acc = gates.len() - 1;
    }
    BoolCircuit { gates, output: acc }
}

/// TAUTOLOGY → static sufficiency of ∅.
///
/// States are {reference} ∪ {0,1}ⁿ realized as n Boolean coordinates plus a
/// selector coordinate (index n); selector = 1 rows replicate the reference.
/// Property: ∅ is sufficient iff the formula is a tautology.
pub fn gadget_tautology(f: &Formula) -> GadgetOutput {
    let n = f.num_vars();
    let phi = f.to_circuit();
    let input_size = phi.size();
    let selector = BoolCircuit::input(n);
    let open_accept = circuit_and(&circuit_not(&selector), &phi);
    let sp = SuccinctProblem {
        n: n + 1,
        actions: vec!["accept".into(), "reject".into()],
        terms: vec![
            vec![(selector, rat(1, 1)), (open_accept, rat(1, 1))],
            vec![],
        ],
    };
    let output_size = instance_length(&sp);
    GadgetOutput {
        instance: GadgetInstance::Succinct(sp),
        query: GadgetQuery::Sufficiency { i: CoordSet::empty() },
        accounting: Accounting { input_size, output_size, coord_count: n + 1 },
        source: GadgetSource::Formula(f.clone()),
    }
}

/// ∃x⃗∀y⃗-SAT → anchor sufficiency on the ∃-coordinates.
///
/// U(YES, (x,y)) = 2·φ(x,y); U(NO, (x,y)) = 1 if y = 0^m else 0. An anchor
/// assignment to the x-coordinates exists iff ∃x∀y φ is true. A prefix with
/// no universal block is padded with one dummy universal variable.
pub fn gadget_exists_forall(q: &Qbf) -> Result<GadgetOutput, CircuitError> {
    q.validate()?;
    // shape: one ∃-block followed by one ∀-block
    let mut seen_forall = false;
    for &(quant, _) in &q.prefix {
        match quant {
            Quant::Forall => seen_forall = true,
            Quant::Exists if seen_forall => {
                return Err(CircuitError::Shape(
                    "prefix is not one ∃-block followed by one ∀-block".into(),
                ))
            }
            Quant::Exists => {}
        }
    }
    let mut q = q.clone();
    if !seen_forall {
        // dummy universal variable preserves the ∃∀ truth value
        let dummy = q.matrix.num_vars() + 1;
        match &mut q.matrix {
            Formula::Cnf { num_vars, .. } | Formula::Circuit { num_vars, .. } => {
                *num_vars = dummy;
            }
        }
        q.prefix.push((Quant::Forall, dummy));
    }
    let n = q.matrix.num_vars();
    let input_size = q.prefix.len() + q.matrix.to_circuit().size();
    let exists_coords: Vec<usize> = q
        .prefix
        .iter()
        .filter(|(quant, _)| *quant == Quant::Exists)
        .map(|&(_, v)| v - 1)
        .collect();
    let forall_coords: Vec<usize> = q
        .prefix
        .iter()
        .filter(|(quant, _)| *quant == Quant::Forall)
        .map(|&(_, v)| v - 1)
        .collect();
    // NO-action indicator: all universal coordinates are 0
    let mut no_circuit = BoolCircuit::constant(true);
    for &c in &forall_coords {
        no_circuit = circuit_and(&no_circuit, &circuit_not(&BoolCircuit::input(c)));
    }
    let sp = SuccinctProblem {
        n,
        actions: vec!["yes".into(), "no".into()],
        terms: vec![
            vec![(q.matrix.to_circuit(), rat(2, 1))],
            vec![(no_circuit, rat(1, 1))],
        ],
    };
    let output_size = instance_length(&sp);
    Ok(GadgetOutput {
        instance: GadgetInstance::Succinct(sp),
        query: GadgetQuery::Anchor { i: CoordSet::new(exists_coords) },
        accounting: Accounting { input_size, output_size, coord_count: n },
        source: GadgetSource::Qbf(q),
    })
}

/// MAJSAT → stochastic decisiveness of ∅ under the uniform distribution.
///
/// U(accept, s) = 1[φ(s)]; U(hold_L, s) = U(hold_R, s) = 1/2 − 2^{−(n+1)}.
/// ∅ is decisive iff #sat(φ) ≥ 2^{n−1}.
pub fn gadget_majsat(f: &Formula) -> Result<GadgetOutput, CircuitError> {
    let n = f.num_vars();
    if n == 0 {
        return Err(CircuitError::Shape("majsat gadget needs at least one variable".into()));
    }
    let phi = f.to_circuit();
    let input_size = phi.size();
    let hold = BigRational::new(two_pow(n) - 1, two_pow(n + 1));
    let sp = SuccinctProblem {
        n,
        actions: vec!["accept".into(), "hold_l".into(), "hold_r".into()],
        terms: vec![
            vec![(phi, rat(1, 1))],
            vec![(BoolCircuit::constant(true), hold.clone())],
            vec![(BoolCircuit::constant(true), hold)],
        ],
    };
    let output_size = instance_length(&sp);
    let base = expand(&sp)?;
    let stoch = StochasticProblem::uniform(base)
        .map_err(|e| CircuitError::Shape(e.to_string()))?;
    Ok(GadgetOutput {
        instance: GadgetInstance::Stochastic(stoch),
        query: GadgetQuery::StochDecisiveness { i: CoordSet::empty() },
        accounting: Accounting { input_size, output_size, coord_count: n },
        source: GadgetSource::Formula(f.clone()),
    })
}

/// State ids for the TQBF gadget's sequential instance.
struct TqbfLayout {
    prefix_len: usize,
}

impl TqbfLayout {
    fn node(&self, depth: usize, bits: usize) -> usize {
        (1usize << depth) - 1 + bits
    }
    fn root_entry(&self) -> usize {
        (1usize << (self.prefix_len + 1)) - 1
    }
    fn plateau(&self) -> usize {
        self.root_entry() + 1
    }
    fn chain(&self, j: usize) -> usize {
        // j in 1..=prefix_len+1
        self.plateau() + j
    }
    fn num_states(&self) -> usize {
        self.chain(self.prefix_len + 1) + 1
    }
}

/// TQBF → sequential sufficiency of ∅ in backup mode.
///
/// The game tree of the prefix is laid out as states (depth, partial
/// assignment); bit-setting actions resolve ∃-levels, uniform transitions
/// resolve ∀-levels. A horizon equal to the prefix length plus one acts as a
/// clock: only runs started at the dedicated entry state harvest the matrix
/// truth, while runs started deeper overshoot onto a constant-1 plateau.
/// `bail` always moves to a decaying chain whose value at the entry state's
/// clock is 1 − 2^{−(m+2)} (m = number of ∀-variables). Hence Opt_seq is
/// constant (= the in-tree actions) iff the QBF is true.
pub fn gadget_tqbf(q: &Qbf) -> Result<GadgetOutput, CircuitError> {
    q.validate()?;
    let layout = TqbfLayout { prefix_len: q.prefix.len() };
    let l = q.prefix.len();
    let m = q.prefix.iter().filter(|(quant, _)| *quant == Quant::Forall).count();
    let num_states = layout.num_states();
    let num_vars = q.matrix.num_vars();
    let input_size = l + q.matrix.to_circuit().size();

    // β₁ = 1 − 2^{−(m+2)} (the bail yardstick at the entry clock);
    // β_j = 2^{−(m+j)} for j ≥ 2 (floors far below every game value gap).
    let beta = |j: usize| -> Rational {
        if j == 1 {
            BigRational::new(two_pow(m + 2) - 1, two_pow(m + 2))
        } else {
            BigRational::new(1.into(), two_pow(m + j))
        }
    };

    // terminal utility: matrix truth under the assignment the path encodes
    let mut utilities: Vec<Rational> = Vec::new();
    let terminal_truth = |bits: usize| -> Result<bool, CircuitError> {
        let mut assignment = vec![false; num_vars];
        for (pos, &(_, var)) in q.prefix.iter().enumerate() {
            assignment[var - 1] = bits >> pos & 1 == 1;
        }
        q.matrix.eval(&assignment)
    };
    let mut state_utility = vec![rat(0, 1); num_states];
    for bits in 0..1usize << l {
        state_utility[layout.node(l, bits)] =
            if terminal_truth(bits)? { rat(1, 1) } else { rat(0, 1) };
    }
    state_utility[layout.plateau()] = rat(1, 1);
    for j in 1..=l + 1 {
        state_utility[layout.chain(j)] = beta(j);
    }
    // all four actions share the terminal utility of each state
    let actions = vec!["go".to_string(), "set0".into(), "set1".into(), "bail".into()];
    for _ in 0..actions.len() {
        utilities.extend(state_utility.iter().cloned());
    }
    let base = DecisionProblem::new(actions.clone(), vec![num_states], utilities)
        .map_err(|e| CircuitError::Shape(e.to_string()))?;

    let one = || BigRational::one();
    let half = || rat(1, 2);
    let bail_target = layout.chain(l + 1);
    let mut transitions: Vec<Vec<Vec<(usize, Rational)>>> =
        vec![vec![Vec::new(); num_states]; actions.len()];
    for (a, rows) in transitions.iter_mut().enumerate() {
        let is_bail = a == 3;
        for (s, row) in rows.iter_mut().enumerate() {
            if is_bail {
                *row = vec![(bail_target, one())];
                continue;
            }
            *row = if s == layout.root_entry() {
                vec![(layout.node(0, 0), one())]
            } else if s == layout.plateau() {
                vec![(layout.plateau(), one())]
            } else if s == layout.chain(1) {
                vec![(layout.plateau(), one())]
            } else if s > layout.plateau() {
                let j = s - layout.plateau();
                vec![(layout.chain(j - 1), one())]
            } else {
                // a game node: find its depth
                let mut depth = 0;
                while (1usize << (depth + 1)) - 1 <= s {
                    depth += 1;
                }
                let bits = s - ((1usize << depth) - 1);
                if depth == l {
                    vec![(layout.plateau(), one())]
                } else {
                    let child = |b: usize| layout.node(depth + 1, bits | b << depth);
                    match q.prefix[depth].0 {
                        Quant::Forall => vec![(child(0), half()), (child(1), half())],
                        Quant::Exists => {
                            // go acts as set0; set1 picks the other child
                            let b = if a == 2 { 1 } else { 0 };
                            vec![(child(b), one())]
                        }
                    }
                }
            };
        }
    }
    let sq = SequentialProblem::new(base, transitions, l + 1, None, SeqMode::Backup)
        .map_err(|e| CircuitError::Shape(e.to_string()))?;
    Ok(GadgetOutput {
        instance: GadgetInstance::Sequential(sq),
        query: GadgetQuery::SeqSufficiency { i: CoordSet::empty() },
        accounting: Accounting {
            input_size,
            output_size: num_states,
            coord_count: 1,
        },
        source: GadgetSource::Qbf(q.clone()),
    })
}

/// Coverage bitmask of one universe element.
fn coverage_mask(sets: &[Vec<usize>], element: usize) -> usize {
    sets.iter()
        .enumerate()
        .filter(|(_, s)| s.contains(&element))
        .fold(0, |mask, (i, _)| mask | 1 << i)
}

/// SET-COVER → minimum stochastically decisive set.
///
/// One Boolean coordinate per set; element u embeds as the state whose
/// coordinate i equals 1 exactly when set i covers u, all false-states share
/// the all-zero state, and the distribution is uniform over these 2u slots
/// (zero elsewhere). A coordinate set is decisive iff the indexed sets
/// cover, so the minimum decisive size equals the minimum cover size.
/// Infeasible families (some element in no set) map to an all-ties instance
/// that is never decisive.
pub fn gadget_setcover(
    universe: usize,
    sets: &[Vec<usize>],
) -> Result<GadgetOutput, CircuitError> {
    if universe == 0 {
        return Err(CircuitError::Shape("universe must be nonempty".into()));
    }
    for (i, s) in sets.iter().enumerate() {
        if let Some(&e) = s.iter().find(|&&e| e >= universe) {
            return Err(CircuitError::Shape(format!(
                "set {i} contains element {e} outside the universe"
            )));
        }
    }
    let m = sets.len();
    let input_size = universe + sets.iter().map(|s| s.len()).sum::<usize>();
    let num_states = 1usize << m;
    let actions: Vec<String> =
        ["acc_false", "acc_true", "hold_l", "hold_r"].map(String::from).to_vec();
    let infeasible = (0..universe).any(|e| coverage_mask(sets, e) == 0);
    let stoch = if infeasible {
        let base = DecisionProblem::from_fn(actions, vec![2; m], |_, _| rat(0, 1))
            .map_err(|e| CircuitError::Shape(e.to_string()))?;
        StochasticProblem::uniform(base).map_err(|e| CircuitError::Shape(e.to_string()))?
    } else {
        let profiles: Vec<usize> = (0..universe).map(|e| coverage_mask(sets, e)).collect();
        let theta = BigRational::new(
            (2 * universe as i64 + 1).into(),
            (2 * universe as i64 + 2).into(),
        );
        let base = DecisionProblem::from_fn(actions, vec![2; m], |a, s| match a {
            0 => {
                if s == 0 {
                    rat(1, 1)
                } else {
                    rat(0, 1)
                }
            }
            1 => {
                if s != 0 && profiles.contains(&s) {
                    rat(1, 1)
                } else {
                    rat(0, 1)
                }
            }
            _ => theta.clone(),
        })
        .map_err(|e| CircuitError::Shape(e.to_string()))?;
        let slot = BigRational::new(1.into(), (2 * universe as i64).into());
        let mut dist = vec![rat(0, 1); num_states];
        dist[0] = BigRational::new(universe.into(), (2 * universe as i64).into());
        for &p in &profiles {
            dist[p] += &slot;
        }
        StochasticProblem::new(base, dist).map_err(|e| CircuitError::Shape(e.to_string()))?
    };
    Ok(GadgetOutput {
        instance: GadgetInstance::Stochastic(stoch),
        query: GadgetQuery::StochMinimum,
        accounting: Accounting { input_size, output_size: num_states, coord_count: m },
        source: GadgetSource::SetCover { universe, sets: sets.to_vec() },
    })
}

/// Shifted approximation-gap family: minimum sufficient size is exactly 1
/// (the gate coordinate, index n) on tautologies and exactly n+1 otherwise.
///
/// Behind a closed gate the optimizer is constantly {reject}; the open
/// branch optimizes {accept} on satisfying assignments and splits falsifying
/// assignments between {reject} and {mark} by parity, so any falsifying
/// assignment makes every formula coordinate relevant.
pub fn gadget_shifted(f: &Formula) -> Result<GadgetOutput, CircuitError> {
    let n = f.num_vars();
    if n == 0 {
        return Err(CircuitError::Shape("shifted gadget needs at least one variable".into()));
    }
    let phi = f.to_circuit();
    let input_size = phi.size();
    let gate = BoolCircuit::input(n);
    let par = parity_circuit(n);
    let open_sat = circuit_and(&gate, &phi);
    let open_unsat = circuit_and(&gate, &circuit_not(&phi));
    let sp = SuccinctProblem {
        n: n + 1,
        actions: vec!["accept".into(), "reject".into(), "mark".into()],
        terms: vec![
            vec![(open_sat, rat(2, 1))],
            vec![
                (circuit_not(&gate), rat(1, 1)),
                (circuit_and(&open_unsat, &circuit_not(&par)), rat(1, 1)),
            ],
            vec![(circuit_and(&open_unsat, &par), rat(1, 1))],
        ],
    };
    let output_size = instance_length(&sp);
    Ok(GadgetOutput {
        instance: GadgetInstance::Succinct(sp),
        query: GadgetQuery::Minimum,
        accounting: Accounting { input_size, output_size, coord_count: n + 1 },
        source: GadgetSource::Formula(f.clone()),
    })
}

/// Size accounting for the 3-SAT → TAUTOLOGY chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainAccounting {
    pub m_in: usize,
    pub m_out: usize,
    pub coord_count: usize,
}

/// 3-SAT → TAUTOLOGY chain: negate the CNF and feed the tautology gadget.
/// Reports m_out ≤ 3·m_in under the gate metric (for 3-CNF inputs).
pub fn gadget_3sat_chain(f: &Formula) -> Result<(GadgetOutput, ChainAccounting), CircuitError> {
    if !matches!(f, Formula::Cnf { .. }) {
        return Err(CircuitError::Shape("chain input must be CNF".into()));
    }
    let m_in = f.to_circuit().size();
    let negated = f.negated();
    let gadget = gadget_tautology(&negated);
    let m_out = gadget.accounting.output_size - gadget.instance_action_count() - (f.num_vars() + 1);
    let accounting = ChainAccounting {
        m_in,
        m_out,
        coord_count: gadget.accounting.coord_count,
    };
    Ok((gadget, accounting))
}

impl GadgetOutput {
    fn instance_action_count(&self) -> usize {
        match &self.instance {
            GadgetInstance::Explicit(p) => p.num_actions(),
            GadgetInstance::Succinct(sp) => sp.actions.len(),
            GadgetInstance::Stochastic(sp) => sp.base().num_actions(),
            GadgetInstance::Sequential(sq) => sq.base().num_actions(),
        }
    }
}

/// Oracle-vs-decider comparison for one gadget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub pass: bool,
    pub source_answer: String,
    pub target_answer: String,
}

/// Run the source-problem oracle and the target decider; PASS iff they
/// agree on the gadget's declared equivalence property.
pub fn verify_gadget(g: &GadgetOutput) -> Result<VerifyReport, CircuitError> {
    let (source_holds, source_desc): (bool, String) = match (&g.source, &g.query) {
        (GadgetSource::Formula(f), GadgetQuery::Sufficiency { .. })
        | (GadgetSource::Formula(f), GadgetQuery::Minimum) => {
            let t = is_tautology_oracle(f)?;
            (t, format!("tautology = {t}"))
        }
        (GadgetSource::Formula(f), GadgetQuery::StochDecisiveness { .. }) => {
            let count = count_satisfying(f)?;
            let majority = count >= 1usize << (f.num_vars() - 1);
            (majority, format!("#sat = {count}, majority = {majority}"))
        }
        (GadgetSource::Qbf(q), _) => {
            let t = eval_qbf_oracle(q)?;
            (t, format!("qbf = {t}"))
        }
        (GadgetSource::SetCover { universe, sets }, _) => {
            let min = min_cover_size(*universe, sets);
            (min.is_some(), format!("min cover = {min:?}"))
        }
        _ => return Err(CircuitError::Shape("unsupported gadget combination".into())),
    };

    let (target_holds, target_desc): (bool, String) = match (&g.instance, &g.query) {
        (GadgetInstance::Succinct(sp), GadgetQuery::Sufficiency { i }) => {
            let p = expand(sp)?;
            let v = check_sufficiency(&p, i);
            (v.is_yes(), format!("sufficiency({i:?}) = {:?}", v.answer))
        }
        (GadgetInstance::Succinct(sp), GadgetQuery::Anchor { i }) => {
            let p = expand(sp)?;
            let v = check_anchor(&p, i);
            (v.is_yes(), format!("anchor({i:?}) = {:?}", v.answer))
        }
        (GadgetInstance::Succinct(sp), GadgetQuery::Minimum) => {
            let p = expand(sp)?;
            let min = minimum_sufficient_set(&p);
            let n = sp.n - 1;
            let optimum = min.len();
            if optimum != 1 && optimum != n + 1 {
                return Ok(VerifyReport {
                    pass: false,
                    source_answer: source_desc,
                    target_answer: format!("optimum = {optimum}, outside {{1, {}}}", n + 1),
                });
            }
            (optimum == 1, format!("optimum = {optimum}"))
        }
        (GadgetInstance::Stochastic(sp), GadgetQuery::StochDecisiveness { i }) => {
            let v = check_decisiveness(sp, i);
            (v.is_yes(), format!("decisiveness({i:?}) = {:?}", v.answer))
        }
        (GadgetInstance::Stochastic(sp), GadgetQuery::StochMinimum) => {
            let GadgetSource::SetCover { universe, sets } = &g.source else {
                return Err(CircuitError::Shape("stoch-minimum gadget without cover source".into()));
            };
            let min_cover = min_cover_size(*universe, sets);
            let n = sp.base().num_coords();
            let mut min_decisive = None;
            for k in 0..=n {
                let v = find_stoch_minimum(sp, k, StochFamily::Decisiveness)
                    .map_err(|e| CircuitError::Shape(e.to_string()))?;
                if v.is_yes() {
                    min_decisive = Some(k);
                    break;
                }
            }
            return Ok(VerifyReport {
                pass: min_decisive == min_cover,
                source_answer: source_desc,
                target_answer: format!("min decisive = {min_decisive:?}"),
            });
        }
        (GadgetInstance::Sequential(sq), GadgetQuery::SeqSufficiency { i }) => {
            let v = check_seq_sufficiency(sq, i);
            (v.is_yes(), format!("seq sufficiency({i:?}) = {:?}", v.answer))
        }
        _ => return Err(CircuitError::Shape("unsupported gadget combination".into())),
    };

    Ok(VerifyReport {
        pass: source_holds == target_holds,
        source_answer: source_desc,
        target_answer: target_desc,
    })
}

/// Exact minimum cover size by subset enumeration (None if infeasible).
pub fn min_cover_size(universe: usize, sets: &[Vec<usize>]) -> Option<usize> {
    let masks: Vec<u64> = (0..universe)
        .map(|e| {
            sets.iter()
                .enumerate()
                .filter(|(_, s)| s.contains(&e))
                .fold(0u64, |m, (i, _)| m | 1 << i)
        })
        .collect();
    let m = sets.len();
    let mut best: Option<usize> = None;
    for pick in 0u64..1 << m {
        if masks.iter().all(|&em| em & pick != 0) {
            let size = pick.count_ones() as usize;
            if best.map_or(true, |b| size < b) {
                best = Some(size);
            }
        }
    }
    best
}

/// Cross-check that a verdict over a minimum query classifies the shifted
/// family's optimum; exposed for the threshold decider.
pub fn shifted_optimum(g: &GadgetOutput) -> Result<usize, CircuitError> {
    let GadgetInstance::Succinct(sp) = &g.instance else {
        return Err(CircuitError::Shape("not a shifted gadget".into()));
    };
    let p = expand(sp)?;
    let v = find_minimum_sufficient(&p, 0);
    match v.witness {
        Some(crate::model::Witness::Coords(c)) => Ok(c.len()),
        _ => Err(CircuitError::Shape("minimum decider returned no set".into())),
    }
}
