//! Succinct encoding: circuit evaluation, CNF compilation, expansion,
//! instance-length accounting, DIMACS/QDIMACS parsing, and the exhaustive
//! oracles.

use relevance_kit::circuit::{
    count_satisfying, eval_circuit, eval_qbf_oracle, expand, expand_with_budget,
    instance_length, is_tautology_oracle, parse_dimacs, parse_qdimacs, to_dimacs, to_qdimacs,
    BoolCircuit, CircuitError, Formula, Gate, Qbf, Quant, SuccinctProblem,
};
use relevance_kit::model::rat;

fn bits_of(mask: usize, n: usize) -> Vec<bool> {
    (0..n).map(|i| mask >> i & 1 == 1).collect()
}

#[test]
fn circuit_evaluation_matches_hand_computation() {
    // (x0 ∧ ¬x1) ∨ x2
    let c = BoolCircuit {
        gates: vec![
            Gate::Input(0),
            Gate::Input(1),
            Gate::Not(1),
            Gate::And(0, 2),
            Gate::Input(2),
            Gate::Or(3, 4),
        ],
        output: 5,
    };
    for mask in 0..8 {
        let bits = bits_of(mask, 3);
        let expected = (bits[0] && !bits[1]) || bits[2];
        assert_eq!(eval_circuit(&c, &bits).unwrap(), expected);
    }
}

#[test]
fn circuit_validation_rejects_forward_references_and_bad_inputs() {
    let forward = BoolCircuit { gates: vec![Gate::Not(0)], output: 0 };
    assert!(forward.validate(1).is_err());
    let oob = BoolCircuit { gates: vec![Gate::Input(3)], output: 0 };
    assert!(oob.validate(2).is_err());
}

#[test]
fn cnf_compilation_agrees_with_direct_evaluation_on_all_assignments() {
    let formulas = [
        Formula::Cnf { num_vars: 3, clauses: vec![vec![1, -2], vec![2, 3], vec![-1, -3]] },
        Formula::Cnf { num_vars: 2, clauses: vec![] },        // empty CNF ≡ true
        Formula::Cnf { num_vars: 2, clauses: vec![vec![]] },  // empty clause ≡ false
    ];
    for f in &formulas {
        let c = f.to_circuit();
        let neg = f.negated();
        for mask in 0..1usize << f.num_vars() {
            let bits = bits_of(mask, f.num_vars());
            assert_eq!(f.eval(&bits).unwrap(), eval_circuit(&c, &bits).unwrap());
            assert_eq!(neg.eval(&bits).unwrap(), !f.eval(&bits).unwrap());
        }
    }
}

#[test]
fn expansion_matches_direct_utility_and_counts_length() {
    // U(accept, s) = 2·[x0 ∧ x1] + 1/3·[x0]; U(reject, s) = 1
    let and = BoolCircuit {
        gates: vec![Gate::Input(0), Gate::Input(1), Gate::And(0, 1)],
        output: 2,
    };
    let sp = SuccinctProblem {
        n: 2,
        actions: vec!["accept".into(), "reject".into()],
        terms: vec![
            vec![(and, rat(2, 1)), (BoolCircuit::input(0), rat(1, 3))],
            vec![(BoolCircuit::constant(true), rat(1, 1))],
        ],
    };
    // |A| + n + gates = 2 + 2 + (3 + 1 + 1)
    assert_eq!(instance_length(&sp), 9);
    let p = expand(&sp).unwrap();
    assert_eq!(p.num_states(), 4);
    for s in 0..4 {
        let bits = bits_of(s, 2);
        for a in 0..2 {
            assert_eq!(p.utility(a, s), &sp.utility(a, &bits).unwrap());
        }
    }
    // state 3 = (1,1): accept = 2 + 1/3 beats reject = 1
    assert_eq!(p.opt_index(3).actions(), &[0]);
    // state 0: accept = 0 loses to reject
    assert_eq!(p.opt_index(0).actions(), &[1]);
}

#[test]
fn expansion_respects_its_budget() {
    let sp = SuccinctProblem {
        n: 10,
        actions: vec!["a".into()],
        terms: vec![vec![(BoolCircuit::constant(true), rat(1, 1))]],
    };
    assert!(matches!(
        expand_with_budget(&sp, 512),
        Err(CircuitError::Capacity { need: 1024, budget: 512, .. })
    ));
    assert!(expand_with_budget(&sp, 1024).is_ok());
}

#[test]
fn tautology_oracle_and_counting_agree_with_truth_tables() {
    let taut = Formula::Cnf { num_vars: 1, clauses: vec![vec![1, -1]] };
    assert!(is_tautology_oracle(&taut).unwrap());
    let f = Formula::Cnf { num_vars: 2, clauses: vec![vec![1, 2]] };
    assert!(!is_tautology_oracle(&f).unwrap());
    assert_eq!(count_satisfying(&f).unwrap(), 3);
    assert_eq!(count_satisfying(&taut).unwrap(), 2);
}

#[test]
fn qbf_oracle_handles_alternation() {
    // ∀x∃y (x ↔ y): true
    let matrix = Formula::Cnf { num_vars: 2, clauses: vec![vec![-1, 2], vec![1, -2]] };
    let q = Qbf {
        prefix: vec![(Quant::Forall, 1), (Quant::Exists, 2)],
        matrix: matrix.clone(),
    };
    assert!(eval_qbf_oracle(&q).unwrap());
    // ∃y∀x (x ↔ y): false
    let q2 = Qbf { prefix: vec![(Quant::Exists, 2), (Quant::Forall, 1)], matrix };
    assert!(!eval_qbf_oracle(&q2).unwrap());
}

#[test]
fn dimacs_round_trip_and_error_reporting() {
    let text = "c a comment\np cnf 3 2\n1 -2 0\n2 3 -1 0\n";
    let f = parse_dimacs(text).unwrap();
    assert_eq!(
        f,
        Formula::Cnf { num_vars: 3, clauses: vec![vec![1, -2], vec![2, 3, -1]] }
    );
    let round = parse_dimacs(&to_dimacs(&f).unwrap()).unwrap();
    assert_eq!(round, f);

    // clause spanning lines
    let spanning = "p cnf 2 1\n1\n2 0\n";
    assert_eq!(
        parse_dimacs(spanning).unwrap(),
        Formula::Cnf { num_vars: 2, clauses: vec![vec![1, 2]] }
    );

    for bad in [
        "p cnf 2 1\n1 2\n",            // unterminated clause
        "p cnf 2 2\n1 0\n",            // clause count mismatch
        "1 0\np cnf 1 1\n",            // clause before header
        "p cnf 1 1\n2 0\n",            // literal out of range
        "p dnf 1 0\n",                 // bad header
    ] {
        assert!(parse_dimacs(bad).is_err(), "accepted {bad:?}");
    }
}

#[test]
fn qdimacs_round_trip_binds_free_variables_existentially() {
    let text = "p cnf 3 2\ne 1 0\na 2 0\n1 2 0\n-3 0\n";
    let q = parse_qdimacs(text).unwrap();
    // variable 3 is unquantified: bound ∃ at the outermost level
    assert_eq!(q.prefix, vec![
        (Quant::Exists, 3),
        (Quant::Exists, 1),
        (Quant::Forall, 2),
    ]);
    let round = parse_qdimacs(&to_qdimacs(&q).unwrap()).unwrap();
    assert_eq!(round, q);
    assert!(parse_qdimacs("p cnf 2 1\ne 1 1 0\n1 0\n").is_err()); // quantified twice
}

#[test]
fn oracle_budgets_are_enforced() {
    let big = Formula::Cnf { num_vars: 25, clauses: vec![vec![1]] };
    assert!(matches!(
        is_tautology_oracle(&big),
        Err(CircuitError::Capacity { need: 25, budget: 20, .. })
    ));
    let q = Qbf {
        prefix: (1..=20).map(|v| (Quant::Exists, v)).collect(),
        matrix: Formula::Cnf { num_vars: 20, clauses: vec![vec![1]] },
    };
    assert!(matches!(
        eval_qbf_oracle(&q),
        Err(CircuitError::Capacity { need: 20, budget: 16, .. })
    ));
}
