//! Succinct encoding: Boolean circuits, per-action weighted-circuit
//! utilities, instance-length accounting, DIMACS/QDIMACS parsing, and the
//! exhaustive tautology / QBF oracles used to validate gadgets.

use num::{BigRational, Zero};
use thiserror::Error;

use crate::model::{DecisionProblem, Rational};

/// Default cap on |A|·2ⁿ table entries when expanding a succinct problem.
pub const DEFAULT_EXPAND_BUDGET: usize = 1 << 20;
/// Default variable cap for the truth-table tautology oracle.
pub const DEFAULT_FORMULA_ORACLE_BUDGET: usize = 20;
/// Default variable cap for the game-tree QBF oracle.
pub const DEFAULT_QBF_ORACLE_BUDGET: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("malformed circuit: {0}")]
    Format(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("capacity exceeded: {need} {unit} > budget {budget}")]
    Capacity { need: usize, budget: usize, unit: &'static str },
    #[error("malformed instance: {0}")]
    Shape(String),
}

/// One gate of a Boolean circuit; operands refer to earlier gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Input(usize),
    Const(bool),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
}

/// A Boolean circuit as a topologically ordered gate list with one output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoolCircuit {
    pub gates: Vec<Gate>,
    pub output: usize,
}

impl BoolCircuit {
    /// A circuit computing the constant `b`.
    pub fn constant(b: bool) -> Self {
        BoolCircuit { gates: vec![Gate::Const(b)], output: 0 }
    }

    /// A circuit returning input `i` directly.
    pub fn input(i: usize) -> Self {
        BoolCircuit { gates: vec![Gate::Input(i)], output: 0 }
    }

    /// Gate count, including input and constant gates.
    pub fn size(&self) -> usize {
        self.gates.len()
    }

    /// Check topology: every operand refers to an earlier gate, inputs are
    /// below `n`, and the output index is valid.
    pub fn validate(&self, n: usize) -> Result<(), CircuitError> {
        if self.gates.is_empty() {
            return Err(CircuitError::Format("circuit has no gates".into()));
        }
        for (pos, gate) in self.gates.iter().enumerate() {
            let check = |g: usize| {
                if g >= pos {
                    Err(CircuitError::Format(format!(
                        "gate {pos} references gate {g} which is not earlier"
                    )))
                } else {
                    Ok(())
                }
            };
            match *gate {
                Gate::Input(i) => {
                    if i >= n {
                        return Err(CircuitError::Format(format!(
                            "gate {pos} reads input {i} but n = {n}"
                        )));
                    }
                }
                Gate::Const(_) => {}
                Gate::Not(g) => check(g)?,
                Gate::And(g, h) | Gate::Or(g, h) => {
                    check(g)?;
                    check(h)?;
                }
            }
        }
        if self.output >= self.gates.len() {
            return Err(CircuitError::Format(format!(
                "output index {} out of range",
                self.output
            )));
        }
        Ok(())
    }
}

/// Evaluate a circuit on a bit vector; one forward pass, each gate once.
pub fn eval_circuit(c: &BoolCircuit, s: &[bool]) -> Result<bool, CircuitError> {
    c.validate(s.len())?;
    let mut values: Vec<bool> = Vec::with_capacity(c.gates.len());
    for gate in &c.gates {
        let v = match *gate {
            Gate::Input(i) => s[i],
            Gate::Const(b) => b,
            Gate::Not(g) => !values[g],
            Gate::And(g, h) => values[g] && values[h],
            Gate::Or(g, h) => values[g] || values[h],
        };
        values.push(v);
    }
    Ok(values[c.output])
}

/// A propositional formula: a CNF clause list or an arbitrary circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    /// Clauses of nonzero signed literals over variables 1..=num_vars.
    Cnf { num_vars: usize, clauses: Vec<Vec<i64>> },
    Circuit { num_vars: usize, circuit: BoolCircuit },
}

impl Formula {
    pub fn num_vars(&self) -> usize {
        match self {
            Formula::Cnf { num_vars, .. } | Formula::Circuit { num_vars, .. } => *num_vars,
        }
    }

    /// Evaluate under an assignment; bit i is the value of variable i+1.
    pub fn eval(&self, bits: &[bool]) -> Result<bool, CircuitError> {
        match self {
            Formula::Cnf { clauses, .. } => Ok(clauses.iter().all(|clause| {
                clause.iter().any(|&lit| {
                    let var = lit.unsigned_abs() as usize - 1;
                    bits[var] == (lit > 0)
                })
            })),
            Formula::Circuit { circuit, .. } => eval_circuit(circuit, bits),
        }
    }

    /// Compile to a circuit: or-of-literals per clause, and-of-clauses.
    pub fn to_circuit(&self) -> BoolCircuit {
        match self {
            Formula::Circuit { circuit, .. } => circuit.clone(),
            Formula::Cnf { clauses, .. } => {
                let mut gates = Vec::new();
                let mut clause_outputs = Vec::new();
                for clause in clauses {
                    let mut lit_gates = Vec::new();
                    for &lit in clause {
                        let var = lit.unsigned_abs() as usize - 1;
                        gates.push(Gate::Input(var));
                        let mut g = gates.len() - 1;
                        if lit < 0 {
                            gates.push(Gate::Not(g));
                            g = gates.len() - 1;
                        }
                        lit_gates.push(g);
                    }
                    let out = match lit_gates.split_first() {
                        None => {
                            gates.push(Gate::Const(false));
                            gates.len() - 1
                        }
                        Some((&first, rest)) => {
                            let mut acc = first;
                            for &g in rest {
                                gates.push(Gate::Or(acc, g));
                                acc = gates.len() - 1;
                            }
                            acc
                        }
                    };
                    clause_outputs.push(out);
                }
                let output = match clause_outputs.split_first() {
                    None => {
                        gates.push(Gate::Const(true));
                        gates.len() - 1
                    }
                    Some((&first, rest)) => {
                        let mut acc = first;
                        for &g in rest {
                            gates.push(Gate::And(acc, g));
                            acc = gates.len() - 1;
                        }
                        acc
                    }
                };
                BoolCircuit { gates, output }
            }
        }
    }

    /// The negation, as a circuit formula.
    pub fn negated(&self) -> Formula {
        let mut circuit = self.to_circuit();
        circuit.gates.push(Gate::Not(circuit.output));
        circuit.output = circuit.gates.len() - 1;
        Formula::Circuit { num_vars: self.num_vars(), circuit }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quant {
    Exists,
    Forall,
}

/// A prenex quantified Boolean formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Qbf {
    /// (quantifier, 1-based variable) in prefix order; each variable once.
    pub prefix: Vec<(Quant, usize)>,
    pub matrix: Formula,
}

impl Qbf {
    pub fn validate(&self) -> Result<(), CircuitError> {
        let mut seen = vec![false; self.matrix.num_vars() + 1];
        for &(_, v) in &self.prefix {
            if v == 0 || v > self.matrix.num_vars() {
                return Err(CircuitError::Shape(format!(
                    "quantified variable {v} out of range"
                )));
            }
            if seen[v] {
                return Err(CircuitError::Shape(format!("variable {v} quantified twice")));
            }
            seen[v] = true;
        }
        // matrix variables must all be quantified
        for v in 1..=self.matrix.num_vars() {
            if !seen[v] {
                return Err(CircuitError::Shape(format!("variable {v} is free")));
            }
        }
        Ok(())
    }
}

/// Per-action weighted Boolean circuits over {0,1}ⁿ:
/// U(a,s) = Σ_j w_j · eval(c_j, s).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuccinctProblem {
    pub n: usize,
    pub actions: Vec<String>,
    /// terms[a] is the list of (circuit, weight) pairs for action a.
    pub terms: Vec<Vec<(BoolCircuit, Rational)>>,
}

impl SuccinctProblem {
    pub fn validate(&self) -> Result<(), CircuitError> {
        if self.actions.is_empty() {
            return Err(CircuitError::Shape("no actions".into()));
        }
        if self.terms.len() != self.actions.len() {
            return Err(CircuitError::Shape("one term list per action required".into()));
        }
        for terms in &self.terms {
            for (c, _) in terms {
                c.validate(self.n)?;
            }
        }
        Ok(())
    }

    /// Evaluate U(a, s) directly from the circuits.
    pub fn utility(&self, action: usize, bits: &[bool]) -> Result<Rational, CircuitError> {
        let mut total = BigRational::zero();
        for (circuit, weight) in &self.terms[action] {
            if eval_circuit(circuit, bits)? {
                total += weight;
            }
        }
        Ok(total)
    }
}

/// L = |A| + n + total gate count across all terms (Boolean domains
/// contribute log₂ 2 = 1 each).
pub fn instance_length(sp: &SuccinctProblem) -> usize {
    let gates: usize = sp
        .terms
        .iter()
        .flat_map(|ts| ts.iter().map(|(c, _)| c.size()))
        .sum();
    sp.actions.len() + sp.n + gates
}

/// Expand to an explicit table with all domains of size 2.
pub fn expand(sp: &SuccinctProblem) -> Result<DecisionProblem, CircuitError> {
    expand_with_budget(sp, DEFAULT_EXPAND_BUDGET)
}

pub fn expand_with_budget(
    sp: &SuccinctProblem,
    budget: usize,
) -> Result<DecisionProblem, CircuitError> {
    sp.validate()?;
    let num_states = 1usize
        .checked_shl(sp.n as u32)
        .ok_or(CircuitError::Capacity { need: usize::MAX, budget, unit: "table entries" })?;
    let entries = num_states
        .checked_mul(sp.actions.len())
        .ok_or(CircuitError::Capacity { need: usize::MAX, budget, unit: "table entries" })?;
    if entries > budget {
        return Err(CircuitError::Capacity { need: entries, budget, unit: "table entries" });
    }
    let mut utilities = Vec::with_capacity(entries);
    for a in 0..sp.actions.len() {
        for s in 0..num_states {
            let bits: Vec<bool> = (0..sp.n).map(|i| s >> i & 1 == 1).collect();
            utilities.push(sp.utility(a, &bits)?);
        }
    }
    DecisionProblem::new(sp.actions.clone(), vec![2; sp.n], utilities)
        .map_err(|e| CircuitError::Shape(e.to_string()))
}

/// Exhaustive truth-table tautology check (≤ budget variables).
pub fn is_tautology_oracle(f: &Formula) -> Result<bool, CircuitError> {
    is_tautology_oracle_with_budget(f, DEFAULT_FORMULA_ORACLE_BUDGET)
}

pub fn is_tautology_oracle_with_budget(
    f: &Formula,
    budget: usize,
) -> Result<bool, CircuitError> {
    let n = f.num_vars();
    if n > budget {
        return Err(CircuitError::Capacity { need: n, budget, unit: "variables" });
    }
    for mask in 0usize..1 << n {
        let bits: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        if !f.eval(&bits)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Count of satisfying assignments (used by the MAJSAT harness).
pub fn count_satisfying(f: &Formula) -> Result<usize, CircuitError> {
    let n = f.num_vars();
    if n > DEFAULT_FORMULA_ORACLE_BUDGET {
        return Err(CircuitError::Capacity {
            need: n,
            budget: DEFAULT_FORMULA_ORACLE_BUDGET,
            unit: "variables",
        });
    }
    let mut count = 0;
    for mask in 0usize..1 << n {
        let bits: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        if f.eval(&bits)? {
            count += 1;
        }
    }
    Ok(count)
}

/// Exhaustive game-tree QBF evaluation (≤ budget variables).
pub fn eval_qbf_oracle(q: &Qbf) -> Result<bool, CircuitError> {
    eval_qbf_oracle_with_budget(q, DEFAULT_QBF_ORACLE_BUDGET)
}

pub fn eval_qbf_oracle_with_budget(q: &Qbf, budget: usize) -> Result<bool, CircuitError> {
    q.validate()?;
    let n = q.matrix.num_vars();
    if n > budget {
        return Err(CircuitError::Capacity { need: n, budget, unit: "variables" });
    }
    fn go(q: &Qbf, level: usize, bits: &mut Vec<bool>) -> Result<bool, CircuitError> {
        if level == q.prefix.len() {
            return q.matrix.eval(bits);
        }
        let (quant, var) = q.prefix[level];
        let mut outcomes = [false, false];
        for (slot, value) in [false, true].into_iter().enumerate() {
            bits[var - 1] = value;
            outcomes[slot] = go(q, level + 1, bits)?;
        }
        Ok(match quant {
            Quant::Exists => outcomes[0] || outcomes[1],
            Quant::Forall => outcomes[0] && outcomes[1],
        })
    }
    let mut bits = vec![false; n];
    go(q, 0, &mut bits)
}

/// Parse DIMACS CNF text.
pub fn parse_dimacs(text: &str) -> Result<Formula, CircuitError> {
    let (num_vars, num_clauses, clauses) = parse_clause_body(text, false)?.0;
    check_clause_count(num_clauses, clauses.len(), text)?;
    Ok(Formula::Cnf { num_vars, clauses })
}

/// Parse QDIMACS text into a prenex QBF. Unquantified variables are bound
/// existentially at the outermost level, per the QDIMACS convention.
pub fn parse_qdimacs(text: &str) -> Result<Qbf, CircuitError> {
    let ((num_vars, num_clauses, clauses), prefix) = parse_clause_body(text, true)?;
    check_clause_count(num_clauses, clauses.len(), text)?;
    let mut quantified = vec![false; num_vars + 1];
    for &(_, v) in &prefix {
        quantified[v] = true;
    }
    let mut full_prefix: Vec<(Quant, usize)> = (1..=num_vars)
        .filter(|&v| !quantified[v])
        .map(|v| (Quant::Exists, v))
        .collect();
    full_prefix.extend(prefix);
    let q = Qbf { prefix: full_prefix, matrix: Formula::Cnf { num_vars, clauses } };
    q.validate()?;
    Ok(q)
}

type ClauseBody = (usize, usize, Vec<Vec<i64>>);

fn parse_clause_body(
    text: &str,
    allow_quants: bool,
) -> Result<(ClauseBody, Vec<(Quant, usize)>), CircuitError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut prefix: Vec<(Quant, usize)> = Vec::new();
    for (line_no, raw) in text.lines().enumerate() {
        let line = line_no + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') || trimmed.starts_with('%') {
            continue;
        }
        if trimmed.starts_with('p') {
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if fields.len() != 4 || fields[1] != "cnf" {
                return Err(CircuitError::Parse {
                    line,
                    message: format!("bad header {trimmed:?}"),
                });
            }
            let nv = fields[2].parse().map_err(|_| CircuitError::Parse {
                line,
                message: format!("bad variable count {:?}", fields[2]),
            })?;
            let nc = fields[3].parse().map_err(|_| CircuitError::Parse {
                line,
                message: format!("bad clause count {:?}", fields[3]),
            })?;
            header = Some((nv, nc));
            continue;
        }
        if trimmed.starts_with('e') || trimmed.starts_with('a') {
            if !allow_quants {
                return Err(CircuitError::Parse {
                    line,
                    message: "quantifier line in plain DIMACS".into(),
                });
            }
            let quant = if trimmed.starts_with('e') { Quant::Exists } else { Quant::Forall };
            let mut terminated = false;
            for tok in trimmed[1..].split_whitespace() {
                let v: i64 = tok.parse().map_err(|_| CircuitError::Parse {
                    line,
                    message: format!("bad quantifier token {tok:?}"),
                })?;
                if v == 0 {
                    terminated = true;
                    break;
                }
                if v < 0 {
                    return Err(CircuitError::Parse {
                        line,
                        message: "negative variable in quantifier line".into(),
                    });
                }
                prefix.push((quant, v as usize));
            }
            if !terminated {
                return Err(CircuitError::Parse {
                    line,
                    message: "quantifier line not zero-terminated".into(),
                });
            }
            continue;
        }
        let (num_vars, _) = header.ok_or(CircuitError::Parse {
            line,
            message: "clause before header".into(),
        })?;
        for tok in trimmed.split_whitespace() {
            let lit: i64 = tok.parse().map_err(|_| CircuitError::Parse {
                line,
                message: format!("bad literal {tok:?}"),
            })?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                if lit.unsigned_abs() as usize > num_vars {
                    return Err(CircuitError::Parse {
                        line,
                        message: format!("literal {lit} exceeds variable count {num_vars}"),
                    });
                }
                current.push(lit);
            }
        }
    }
    let (num_vars, num_clauses) = header.ok_or(CircuitError::Parse {
        line: text.lines().count().max(1),
        message: "missing header".into(),
    })?;
    if !current.is_empty() {
        return Err(CircuitError::Parse {
            line: text.lines().count(),
            message: "final clause not zero-terminated".into(),
        });
    }
    Ok(((num_vars, num_clauses, clauses), prefix))
}

fn check_clause_count(declared: usize, got: usize, text: &str) -> Result<(), CircuitError> {
    if declared != got {
        return Err(CircuitError::Parse {
            line: text.lines().count(),
            message: format!("header declares {declared} clauses, found {got}"),
        });
    }
    Ok(())
}

/// Serialize a CNF formula back to DIMACS text.
pub fn to_dimacs(f: &Formula) -> Result<String, CircuitError> {
    match f {
        Formula::Cnf { num_vars, clauses } => {
            let mut out = format!("p cnf {} {}\n", num_vars, clauses.len());
            for clause in clauses {
                for lit in clause {
                    out.push_str(&lit.to_string());
                    out.push(' ');
                }
                out.push_str("0\n");
            }
            Ok(out)
        }
        Formula::Circuit { .. } => {
            Err(CircuitError::Shape("only CNF formulas serialize to DIMACS".into()))
        }
    }
}

/// Serialize a QBF with a CNF matrix back to QDIMACS text.
pub fn to_qdimacs(q: &Qbf) -> Result<String, CircuitError> {
    let Formula::Cnf { num_vars, clauses } = &q.matrix else {
        return Err(CircuitError::Shape("only CNF matrices serialize to QDIMACS".into()));
    };
    let mut out = format!("p cnf {} {}\n", num_vars, clauses.len());
    // merge consecutive same-quantifier variables into one line
    let mut i = 0;
    while i < q.prefix.len() {
        let (quant, _) = q.prefix[i];
        let mut j = i;
        while j < q.prefix.len() && q.prefix[j].0 == quant {
            j += 1;
        }
        out.push(match quant {
            Quant::Exists => 'e',
            Quant::Forall => 'a',
        });
        for &(_, v) in &q.prefix[i..j] {
            out.push(' ');
            out.push_str(&v.to_string());
        }
        out.push_str(" 0\n");
        i = j;
    }
    for clause in clauses {
        for lit in clause {
            out.push_str(&lit.to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    Ok(out)
}
