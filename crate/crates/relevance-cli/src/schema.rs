//! On-disk JSON forms of every instance kind: exact rationals as
//! "numerator/denominator" strings, a `schema` version field, and lossless
//! conversions to and from the in-memory types.

use anyhow::{anyhow, bail, Context, Result};
use num::{BigInt, BigRational};
use serde::{Deserialize, Serialize};

use relevance_kit::circuit::{BoolCircuit, Gate, SuccinctProblem};
use relevance_kit::model::{DecisionProblem, Rational};
use relevance_kit::sequential::{SeqMode, SequentialProblem};
use relevance_kit::stochastic::StochasticProblem;
use relevance_kit::tractable::{PairwiseUtility, TensorRankUtility, TreeDecomposition, TreeUtility};

pub const SCHEMA_VERSION: u32 = 1;

pub fn parse_rational(text: &str) -> Result<Rational> {
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text.trim(), "1"),
    };
    let num: BigInt = num.parse().with_context(|| format!("bad numerator in {text:?}"))?;
    let den: BigInt = den.parse().with_context(|| format!("bad denominator in {text:?}"))?;
    if den == BigInt::from(0) {
        bail!("zero denominator in {text:?}");
    }
    Ok(BigRational::new(num, den))
}

pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn parse_vec(texts: &[String]) -> Result<Vec<Rational>> {
    texts.iter().map(|t| parse_rational(t)).collect()
}

fn format_vec(values: &[Rational]) -> Vec<String> {
    values.iter().map(format_rational).collect()
}

/// One gate of a serialized circuit: ["input", i] | ["const", b] |
/// ["not", g] | ["and", g, h] | ["or", g, h].
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase", tag = "op")]
pub enum GateJson {
    Input { index: usize },
    Const { value: bool },
    Not { of: usize },
    And { left: usize, right: usize },
    Or { left: usize, right: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CircuitJson {
    pub gates: Vec<GateJson>,
    pub output: usize,
}

impl CircuitJson {
    pub fn to_circuit(&self) -> BoolCircuit {
        let gates = self
            .gates
            .iter()
            .map(|g| match *g {
                GateJson::Input { index } => Gate::Input(index),
                GateJson::Const { value } => Gate::Const(value),
                GateJson::Not { of } => Gate::Not(of),
                GateJson::And { left, right } => Gate::And(left, right),
                GateJson::Or { left, right } => Gate::Or(left, right),
            })
            .collect();
        BoolCircuit { gates, output: self.output }
    }

    pub fn from_circuit(c: &BoolCircuit) -> Self {
        let gates = c
            .gates
            .iter()
            .map(|g| match *g {
                Gate::Input(index) => GateJson::Input { index },
                Gate::Const(value) => GateJson::Const { value },
                Gate::Not(of) => GateJson::Not { of },
                Gate::And(left, right) => GateJson::And { left, right },
                Gate::Or(left, right) => GateJson::Or { left, right },
            })
            .collect();
        CircuitJson { gates, output: c.output }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct TermJson {
    pub circuit: CircuitJson,
    pub weight: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct TransitionEntryJson {
    pub target: usize,
    pub probability: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct BinaryTermJson {
    pub i: usize,
    pub j: usize,
    /// table[a][d_i][d_j].
    pub table: Vec<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct DecompositionJson {
    pub bags: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
}

/// The on-disk instance file; `kind` selects which optional body is present.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InstanceBody {
    Explicit {
        actions: Vec<String>,
        domains: Vec<usize>,
        /// Row-major: utilities[a * num_states + s].
        utilities: Vec<String>,
    },
    Succinct {
        n: usize,
        actions: Vec<String>,
        terms: Vec<Vec<TermJson>>,
    },
    Stochastic {
        actions: Vec<String>,
        domains: Vec<usize>,
        utilities: Vec<String>,
        distribution: Vec<String>,
    },
    Sequential {
        actions: Vec<String>,
        domains: Vec<usize>,
        utilities: Vec<String>,
        /// transitions[action][state] = sparse probability rows.
        transitions: Vec<Vec<Vec<TransitionEntryJson>>>,
        horizon: usize,
        mode: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        observations: Option<Vec<String>>,
    },
    Tensor {
        actions: Vec<String>,
        domains: Vec<usize>,
        weights: Vec<String>,
        action_factors: Vec<Vec<String>>,
        coord_factors: Vec<Vec<Vec<String>>>,
    },
    Tree {
        actions: Vec<String>,
        domains: Vec<usize>,
        parent: Vec<Option<usize>>,
        /// tables[i][a][digit][parent_digit].
        tables: Vec<Vec<Vec<Vec<String>>>>,
    },
    Pairwise {
        actions: Vec<String>,
        domains: Vec<usize>,
        unary: Vec<Vec<Vec<String>>>,
        binary: Vec<BinaryTermJson>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        decomposition: Option<DecompositionJson>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct InstanceFile {
    pub schema: u32,
    #[serde(flatten)]
    pub body: InstanceBody,
}

/// A fully decoded instance.
pub enum Instance {
    Explicit(DecisionProblem),
    Succinct(SuccinctProblem),
    Stochastic(StochasticProblem),
    Sequential(SequentialProblem),
    Tensor(TensorRankUtility),
    Tree(TreeUtility),
    Pairwise(PairwiseUtility, Option<TreeDecomposition>),
}

impl InstanceFile {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let file: InstanceFile = serde_json::from_str(&text)
            .with_context(|| format!("parsing {}", path.display()))?;
        if file.schema != SCHEMA_VERSION {
            bail!("unsupported schema version {} (expected {SCHEMA_VERSION})", file.schema);
        }
        Ok(file)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn decode(&self) -> Result<Instance> {
        Ok(match &self.body {
            InstanceBody::Explicit { actions, domains, utilities } => {
                Instance::Explicit(DecisionProblem::new(
                    actions.clone(),
                    domains.clone(),
                    parse_vec(utilities)?,
                )?)
            }
            InstanceBody::Succinct { n, actions, terms } => {
                let terms = terms
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|t| Ok((t.circuit.to_circuit(), parse_rational(&t.weight)?)))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                let sp = SuccinctProblem { n: *n, actions: actions.clone(), terms };
                sp.validate()?;
                Instance::Succinct(sp)
            }
            InstanceBody::Stochastic { actions, domains, utilities, distribution } => {
                let base = DecisionProblem::new(
                    actions.clone(),
                    domains.clone(),
                    parse_vec(utilities)?,
                )?;
                Instance::Stochastic(StochasticProblem::new(base, parse_vec(distribution)?)?)
            }
            InstanceBody::Sequential {
                actions,
                domains,
                utilities,
                transitions,
                horizon,
                mode,
                observations,
            } => {
                let base = DecisionProblem::new(
                    actions.clone(),
                    domains.clone(),
                    parse_vec(utilities)?,
                )?;
                let transitions = transitions
                    .iter()
                    .map(|rows| {
                        rows.iter()
                            .map(|row| {
                                row.iter()
                                    .map(|e| {
                                        Ok((e.target, parse_rational(&e.probability)?))
                                    })
                                    .collect::<Result<Vec<_>>>()
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                let mode = match mode.as_str() {
                    "immediate" => SeqMode::Immediate,
                    "backup" => SeqMode::Backup,
                    other => bail!("unknown sequential mode {other:?}"),
                };
                Instance::Sequential(SequentialProblem::new(
                    base,
                    transitions,
                    *horizon,
                    observations.clone(),
                    mode,
                )?)
            }
            InstanceBody::Tensor { actions, domains, weights, action_factors, coord_factors } => {
                let t = TensorRankUtility {
                    actions: actions.clone(),
                    domains: domains.clone(),
                    weights: parse_vec(weights)?,
                    action_factors: action_factors
                        .iter()
                        .map(|row| parse_vec(row))
                        .collect::<Result<Vec<_>>>()?,
                    coord_factors: coord_factors
                        .iter()
                        .map(|per| per.iter().map(|g| parse_vec(g)).collect::<Result<Vec<_>>>())
                        .collect::<Result<Vec<_>>>()?,
                };
                t.validate().map_err(|e| anyhow!("{e}"))?;
                Instance::Tensor(t)
            }
            InstanceBody::Tree { actions, domains, parent, tables } => {
                let tables = tables
                    .iter()
                    .map(|per_action| {
                        per_action
                            .iter()
                            .map(|per_digit| {
                                per_digit
                                    .iter()
                                    .map(|col| parse_vec(col))
                                    .collect::<Result<Vec<_>>>()
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                let t = TreeUtility {
                    actions: actions.clone(),
                    domains: domains.clone(),
                    parent: parent.clone(),
                    tables,
                };
                t.validate().map_err(|e| anyhow!("{e}"))?;
                Instance::Tree(t)
            }
            InstanceBody::Pairwise { actions, domains, unary, binary, decomposition } => {
                let unary = unary
                    .iter()
                    .map(|per_action| {
                        per_action.iter().map(|row| parse_vec(row)).collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                let binary = binary
                    .iter()
                    .map(|b| {
                        let table = b
                            .table
                            .iter()
                            .map(|rows| {
                                rows.iter().map(|r| parse_vec(r)).collect::<Result<Vec<_>>>()
                            })
                            .collect::<Result<Vec<_>>>()?;
                        Ok((b.i, b.j, table))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let pw = PairwiseUtility {
                    actions: actions.clone(),
                    domains: domains.clone(),
                    unary,
                    binary,
                };
                pw.validate().map_err(|e| anyhow!("{e}"))?;
                let decomp = decomposition.as_ref().map(|d| TreeDecomposition {
                    bags: d.bags.clone(),
                    edges: d.edges.clone(),
                });
                Instance::Pairwise(pw, decomp)
            }
        })
    }

    pub fn from_explicit(p: &DecisionProblem) -> Self {
        InstanceFile {
            schema: SCHEMA_VERSION,
            body: InstanceBody::Explicit {
                actions: p.actions().to_vec(),
                domains: p.domains().to_vec(),
                utilities: format_vec(p.utilities()),
            },
        }
    }

    pub fn from_succinct(sp: &SuccinctProblem) -> Self {
        InstanceFile {
            schema: SCHEMA_VERSION,
            body: InstanceBody::Succinct {
                n: sp.n,
                actions: sp.actions.clone(),
                terms: sp
                    .terms
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|(c, w)| TermJson {
                                circuit: CircuitJson::from_circuit(c),
                                weight: format_rational(w),
                            })
                            .collect()
                    })
                    .collect(),
            },
        }
    }

    pub fn from_stochastic(sp: &StochasticProblem) -> Self {
        let base = sp.base();
        let distribution =
            (0..base.num_states()).map(|s| format_rational(sp.prob(s))).collect();
        InstanceFile {
            schema: SCHEMA_VERSION,
            body: InstanceBody::Stochastic {
                actions: base.actions().to_vec(),
                domains: base.domains().to_vec(),
                utilities: format_vec(base.utilities()),
                distribution,
            },
        }
    }

    pub fn from_gadget(instance: &relevance_kit::reductions::GadgetInstance) -> Self {
        use relevance_kit::reductions::GadgetInstance as G;
        match instance {
            G::Explicit(p) => Self::from_explicit(p),
            G::Succinct(sp) => Self::from_succinct(sp),
            G::Stochastic(sp) => Self::from_stochastic(sp),
            G::Sequential(sq) => Self::from_sequential(sq),
        }
    }

    pub fn from_sequential(sq: &SequentialProblem) -> Self {
        let base = sq.base();
        let transitions = sq
            .transitions()
            .iter()
            .map(|rows| {
                rows.iter()
                    .map(|row| {
                        row.iter()
                            .map(|(target, p)| TransitionEntryJson {
                                target: *target,
                                probability: format_rational(p),
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        InstanceFile {
            schema: SCHEMA_VERSION,
            body: InstanceBody::Sequential {
                actions: base.actions().to_vec(),
                domains: base.domains().to_vec(),
                utilities: format_vec(base.utilities()),
                transitions,
                horizon: sq.horizon(),
                mode: match sq.mode {
                    SeqMode::Immediate => "immediate".into(),
                    SeqMode::Backup => "backup".into(),
                },
                observations: sq.observations.clone(),
            },
        }
    }
}

/// Set-cover source file for the set-cover reduction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverFile {
    pub schema: u32,
    pub universe: usize,
    pub sets: Vec<Vec<usize>>,
}

impl CoverFile {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let file: CoverFile = serde_json::from_str(&text)
            .with_context(|| format!("parsing {}", path.display()))?;
        if file.schema != SCHEMA_VERSION {
            bail!("unsupported schema version {} (expected {SCHEMA_VERSION})", file.schema);
        }
        Ok(file)
    }
}

/// Translator inputs: a configuration model, a one-step partially observed
/// model, or a hyperparameter grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TranslationBody {
    Config {
        parameters: Vec<(String, usize)>,
        behaviors: Vec<String>,
        scores: Vec<Vec<String>>,
        target: Vec<usize>,
    },
    Pomdp {
        num_states: usize,
        actions: Vec<String>,
        num_observations: usize,
        prior: Vec<String>,
        obs: Vec<usize>,
        rewards: Vec<Vec<String>>,
        coarsening: Vec<usize>,
    },
    Hyperparam {
        envs: Vec<String>,
        domains: (usize, usize, usize),
        returns: Vec<Vec<String>>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TranslationFile {
    pub schema: u32,
    #[serde(flatten)]
    pub body: TranslationBody,
}

impl TranslationFile {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let file: TranslationFile = serde_json::from_str(&text)
            .with_context(|| format!("parsing {}", path.display()))?;
        if file.schema != SCHEMA_VERSION {
            bail!("unsupported schema version {} (expected {SCHEMA_VERSION})", file.schema);
        }
        Ok(file)
    }

    pub fn to_config(&self) -> Result<relevance_kit::translate::ConfigModel> {
        match &self.body {
            TranslationBody::Config { parameters, behaviors, scores, target } => {
                Ok(relevance_kit::translate::ConfigModel {
                    parameters: parameters.clone(),
                    behaviors: behaviors.clone(),
                    scores: scores
                        .iter()
                        .map(|row| row.iter().map(|t| parse_rational(t)).collect())
                        .collect::<Result<Vec<_>>>()?,
                    target: target.clone(),
                })
            }
            _ => bail!("input file is not a configuration model"),
        }
    }

    pub fn to_pomdp(&self) -> Result<relevance_kit::translate::PomdpModel> {
        match &self.body {
            TranslationBody::Pomdp {
                num_states,
                actions,
                num_observations,
                prior,
                obs,
                rewards,
                coarsening,
            } => Ok(relevance_kit::translate::PomdpModel {
                num_states: *num_states,
                actions: actions.clone(),
                num_observations: *num_observations,
                prior: prior.iter().map(|t| parse_rational(t)).collect::<Result<Vec<_>>>()?,
                obs: obs.clone(),
                rewards: rewards
                    .iter()
                    .map(|row| row.iter().map(|t| parse_rational(t)).collect())
                    .collect::<Result<Vec<_>>>()?,
                coarsening: coarsening.clone(),
            }),
            _ => bail!("input file is not a one-step partially observed model"),
        }
    }

    pub fn to_hyperparam(&self) -> Result<relevance_kit::translate::HyperparamModel> {
        match &self.body {
            TranslationBody::Hyperparam { envs, domains, returns } => {
                Ok(relevance_kit::translate::HyperparamModel {
                    envs: envs.clone(),
                    domains: *domains,
                    returns: returns
                        .iter()
                        .map(|row| row.iter().map(|t| parse_rational(t)).collect())
                        .collect::<Result<Vec<_>>>()?,
                })
            }
            _ => bail!("input file is not a hyperparameter model"),
        }
    }
}
