//! Command-line front end: exact relevance queries over instance files,
//! hardness gadget generation, applied translators, and bench CSV output.
//!
//! Exit codes: 0 = YES, 1 = NO, 2 = ABSTAIN, 3 = usage error, 4 = runtime
//! error (parse failures, capacity overruns, shape errors).

use relevance_cli::schema;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use relevance_kit::certify::{
    bench_csv_header, slot_no_instance, slot_yes_instance, BenchRow, BudgetedCertifier,
    CertQuery, Outcome,
};
use relevance_kit::circuit::{
    expand_with_budget, parse_dimacs, parse_qdimacs, DEFAULT_EXPAND_BUDGET,
};
use relevance_kit::deciders::{check_anchor, check_sufficiency, find_minimum_sufficient};
use relevance_kit::model::{
    quotient, rat, Answer, Assignment, CoordSet, DecisionProblem, Verdict, Witness,
};
use relevance_kit::reductions::{
    gadget_3sat_chain, gadget_exists_forall, gadget_majsat, gadget_setcover, gadget_shifted,
    gadget_tautology, gadget_tqbf, verify_gadget, GadgetOutput,
};
use relevance_kit::sequential::{
    check_seq_anchor, check_seq_sufficiency, find_seq_minimum, SequentialProblem,
};
use relevance_kit::stochastic::{
    check_decisiveness, check_preservation, check_stoch_anchor_preservation,
    find_stoch_minimum_with_budget, StochFamily, StochasticProblem, DEFAULT_LATTICE_BUDGET,
};
use relevance_kit::translate::{translate_config, translate_hyperparam, translate_pomdp};

use schema::{CoverFile, Instance, InstanceFile, TranslationFile};

const EXIT_YES: u8 = 0;
const EXIT_NO: u8 = 1;
const EXIT_ABSTAIN: u8 = 2;
const EXIT_USAGE: u8 = 3;
const EXIT_ERROR: u8 = 4;

#[derive(Parser)]
#[command(
    name = "relevance-kit",
    version,
    about = "Exact relevance and sufficiency queries over finite decision problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a coordinate set is sufficient.
    Check {
        instance: PathBuf,
        /// Comma-separated coordinate indices (empty string = empty set).
        #[arg(long, value_delimiter = ',', num_args = 0.., default_value = "")]
        set: Vec<String>,
        /// Route through the budgeted certifier; abstains when exceeded.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Decide whether some sufficient set of size at most k exists.
    Min {
        instance: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Decide anchored sufficiency of a coordinate set.
    Anchor {
        instance: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 0.., default_value = "")]
        set: Vec<String>,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Print the optimizer partition of the state space.
    Quotient {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Distribution-aware queries on stochastic instances.
    Stoch {
        #[command(subcommand)]
        query: StochCmd,
    },
    /// Horizon-aware queries on sequential instances.
    Seq {
        #[command(subcommand)]
        query: SeqCmd,
    },
    /// Generate a hardness gadget from a source formula or set family.
    Reduce {
        kind: ReduceKind,
        source: PathBuf,
        /// Write the generated instance file here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Check the gadget's equivalence against the source oracle.
        #[arg(long)]
        verify: bool,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Translate an applied model and answer its induced query.
    Translate {
        kind: TranslateKind,
        input: PathBuf,
        /// Write the induced instance file here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Emit a deterministic step-count CSV over a generated suite.
    Bench {
        /// Comma-separated regimes: static, stochastic, sequential, all, none.
        #[arg(long, default_value = "all")]
        regimes: String,
        /// Maximum flag-family size.
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Add budgeted-certifier rows across a doubling budget ladder.
        #[arg(long)]
        budget_sweep: bool,
    },
}

#[derive(Subcommand)]
enum StochCmd {
    /// Does conditioning on the set preserve every state's optimizer?
    Preserve {
        instance: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 0.., default_value = "")]
        set: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Does every fiber of the set have a unique conditional optimum?
    Decisive {
        instance: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 0.., default_value = "")]
        set: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Does some positive-mass fiber of the set preserve its optimizers?
    Anchor {
        instance: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 0.., default_value = "")]
        set: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Is there a preserving/decisive set of size at most k?
    Min {
        instance: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = MinFamily::Preservation)]
        family: MinFamily,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MinFamily {
    Preservation,
    Decisiveness,
}

#[derive(Subcommand)]
enum SeqCmd {
    /// Is the set sufficient for the horizon-induced optimizer?
    Check {
        instance: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 0.., default_value = "")]
        set: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Anchored sufficiency for the horizon-induced optimizer.
    Anchor {
        instance: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 0.., default_value = "")]
        set: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Is there a horizon-sufficient set of size at most k?
    Min {
        instance: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReduceKind {
    Tautology,
    EaSat,
    Majsat,
    Tqbf,
    Setcover,
    Shifted,
    EthChain,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TranslateKind {
    Config,
    Pomdp,
    Hyperparam,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

/// RELEVANCE_KIT_BUDGET overrides the default capacity budgets (table
/// entries for succinct expansion, coordinate count for lattice searches).
fn env_budget() -> Result<Option<usize>> {
    match std::env::var("RELEVANCE_KIT_BUDGET") {
        Ok(text) => Ok(Some(
            text.parse().with_context(|| format!("bad RELEVANCE_KIT_BUDGET {text:?}"))?,
        )),
        Err(_) => Ok(None),
    }
}

fn parse_set(parts: &[String]) -> Result<CoordSet> {
    let mut coords = Vec::new();
    for p in parts {
        let p = p.trim();
        if p.is_empty() {
            continue;
        }
        coords.push(p.parse::<usize>().with_context(|| format!("bad coordinate {p:?}"))?);
    }
    Ok(CoordSet::new(coords))
}

/// Flatten any instance kind to an explicit problem for static queries.
fn static_problem(inst: Instance) -> Result<DecisionProblem> {
    Ok(match inst {
        Instance::Explicit(p) => p,
        Instance::Succinct(sp) => {
            let budget = env_budget()?.unwrap_or(DEFAULT_EXPAND_BUDGET);
            expand_with_budget(&sp, budget)?
        }
        Instance::Stochastic(sp) => sp.base().clone(),
        Instance::Sequential(sq) => sq.induced_problem(),
        Instance::Tensor(t) => t.to_problem()?,
        Instance::Tree(t) => t.to_problem()?,
        Instance::Pairwise(pw, _) => pw.to_problem()?,
    })
}

fn load_stochastic(path: &Path) -> Result<StochasticProblem> {
    match InstanceFile::load(path)?.decode()? {
        Instance::Stochastic(sp) => Ok(sp),
        _ => bail!("{} is not a stochastic instance", path.display()),
    }
}

fn load_sequential(path: &Path) -> Result<SequentialProblem> {
    match InstanceFile::load(path)?.decode()? {
        Instance::Sequential(sq) => Ok(sq),
        _ => bail!("{} is not a sequential instance", path.display()),
    }
}

fn witness_text(w: &Witness) -> String {
    match w {
        Witness::Pair { s, s_prime } => format!("pair of states {s} and {s_prime}"),
        Witness::Anchor(Assignment { coords, digits }) => {
            format!("anchor assignment {:?} = {:?}", coords.members(), digits)
        }
        Witness::Coords(c) => format!("coordinate set {:?}", c.members()),
        Witness::State(s) => format!("state {s}"),
        Witness::Fiber(alpha) => format!("fiber {alpha:?}"),
        Witness::FiberAction { alpha, action } => {
            format!("fiber {alpha:?} with unique optimum {action}")
        }
    }
}

fn witness_json(w: &Witness) -> serde_json::Value {
    match w {
        Witness::Pair { s, s_prime } => json!({"type": "pair", "s": s, "s_prime": s_prime}),
        Witness::Anchor(Assignment { coords, digits }) => {
            json!({"type": "anchor", "coords": coords.members(), "digits": digits})
        }
        Witness::Coords(c) => json!({"type": "coords", "coords": c.members()}),
        Witness::State(s) => json!({"type": "state", "state": s}),
        Witness::Fiber(alpha) => json!({"type": "fiber", "alpha": alpha}),
        Witness::FiberAction { alpha, action } => {
            json!({"type": "fiber_action", "alpha": alpha, "action": action})
        }
    }
}

fn emit_verdict(query: &str, v: &Verdict, format: Format) -> u8 {
    let answer = match v.answer {
        Answer::Yes => "yes",
        Answer::No => "no",
    };
    match format {
        Format::Human => {
            println!("{query}: {}", answer.to_uppercase());
            if let Some(w) = &v.witness {
                println!("witness: {}", witness_text(w));
            }
            println!("steps: {}", v.steps);
            if let Some(note) = &v.note {
                println!("note: {note}");
            }
        }
        Format::Json => {
            let value = json!({
                "query": query,
                "answer": answer,
                "witness": v.witness.as_ref().map(witness_json),
                "steps": v.steps,
                "note": v.note,
            });
            println!("{}", serde_json::to_string_pretty(&value).unwrap());
        }
        Format::Csv => {
            println!("query,answer,steps");
            println!("{query},{answer},{}", v.steps);
        }
    }
    match v.answer {
        Answer::Yes => EXIT_YES,
        Answer::No => EXIT_NO,
    }
}

fn emit_abstain(query: &str, steps_needed: u64, budget: u64, format: Format) -> u8 {
    match format {
        Format::Human => {
            println!("{query}: ABSTAIN (needs {steps_needed} steps, budget {budget})");
        }
        Format::Json => {
            let value = json!({
                "query": query,
                "answer": "abstain",
                "steps_needed": steps_needed,
                "budget": budget,
            });
            println!("{}", serde_json::to_string_pretty(&value).unwrap());
        }
        Format::Csv => {
            println!("query,answer,steps");
            println!("{query},abstain,{steps_needed}");
        }
    }
    EXIT_ABSTAIN
}

/// Run a static query, optionally through the budgeted certifier.
fn run_static(
    problem: &DecisionProblem,
    query: CertQuery,
    budget: Option<u64>,
    format: Format,
) -> u8 {
    let name = match &query {
        CertQuery::Sufficiency { .. } => "sufficiency",
        CertQuery::Anchor { .. } => "anchor",
        CertQuery::Minimum { .. } => "minimum",
    };
    match budget {
        None => {
            let v = match &query {
                CertQuery::Sufficiency { i } => check_sufficiency(problem, i),
                CertQuery::Anchor { i } => check_anchor(problem, i),
                CertQuery::Minimum { k } => find_minimum_sufficient(problem, *k),
            };
            emit_verdict(name, &v, format)
        }
        Some(b) => match BudgetedCertifier::new(b).run(problem, &query) {
            Outcome::Decided(v) => emit_verdict(name, &v, format),
            Outcome::Abstain { steps_needed, budget } => {
                emit_abstain(name, steps_needed, budget, format)
            }
        },
    }
}

fn run(cli: Cli) -> Result<u8> {
    Ok(match cli.command {
        Command::Check { instance, set, budget, format } => {
            let inst = InstanceFile::load(&instance)?.decode()?;
            let i = parse_set(&set)?;
            // pairwise instances carrying a decomposition take the bag DP
            // route instead of expanding the state space
            if let (Instance::Pairwise(pw, Some(decomp)), None) = (&inst, budget) {
                let report =
                    relevance_kit::tractable::check_sufficiency_treewidth(pw, decomp, &i)?;
                return Ok(emit_verdict("sufficiency", &report.verdict, format));
            }
            let p = static_problem(inst)?;
            run_static(&p, CertQuery::Sufficiency { i }, budget, format)
        }
        Command::Min { instance, k, budget, format } => {
            let p = static_problem(InstanceFile::load(&instance)?.decode()?)?;
            run_static(&p, CertQuery::Minimum { k }, budget, format)
        }
        Command::Anchor { instance, set, budget, format } => {
            let p = static_problem(InstanceFile::load(&instance)?.decode()?)?;
            let i = parse_set(&set)?;
            run_static(&p, CertQuery::Anchor { i }, budget, format)
        }
        Command::Quotient { instance, format } => {
            let p = static_problem(InstanceFile::load(&instance)?.decode()?)?;
            let q = quotient(&p);
            match format {
                Format::Human => {
                    println!("states: {}", p.num_states());
                    println!("classes: {}", q.num_classes());
                    for (id, rep) in q.representatives.iter().enumerate() {
                        println!(
                            "class {id}: representative {rep}, optimizer {:?}",
                            q.class_optset[id].actions()
                        );
                    }
                }
                Format::Json => {
                    let classes: Vec<_> = q
                        .representatives
                        .iter()
                        .enumerate()
                        .map(|(id, rep)| {
                            json!({
                                "id": id,
                                "representative": rep,
                                "optimizer": q.class_optset[id].actions(),
                            })
                        })
                        .collect();
                    let value = json!({
                        "num_states": p.num_states(),
                        "num_classes": q.num_classes(),
                        "class_of": q.class_of,
                        "classes": classes,
                    });
                    println!("{}", serde_json::to_string_pretty(&value).unwrap());
                }
                Format::Csv => {
                    println!("class,representative,optimizer");
                    for (id, rep) in q.representatives.iter().enumerate() {
                        let opt: Vec<String> =
                            q.class_optset[id].actions().iter().map(|a| a.to_string()).collect();
                        println!("{id},{rep},{}", opt.join(";"));
                    }
                }
            }
            EXIT_YES
        }
        Command::Stoch { query } => match query {
            StochCmd::Preserve { instance, set, format } => {
                let sp = load_stochastic(&instance)?;
                let v = check_preservation(&sp, &parse_set(&set)?);
                emit_verdict("stochastic preservation", &v, format)
            }
            StochCmd::Decisive { instance, set, format } => {
                let sp = load_stochastic(&instance)?;
                let v = check_decisiveness(&sp, &parse_set(&set)?);
                emit_verdict("stochastic decisiveness", &v, format)
            }
            StochCmd::Anchor { instance, set, format } => {
                let sp = load_stochastic(&instance)?;
                let v = check_stoch_anchor_preservation(&sp, &parse_set(&set)?);
                emit_verdict("stochastic anchor", &v, format)
            }
            StochCmd::Min { instance, k, family, format } => {
                let sp = load_stochastic(&instance)?;
                let family = match family {
                    MinFamily::Preservation => StochFamily::Preservation,
                    MinFamily::Decisiveness => StochFamily::Decisiveness,
                };
                let budget = env_budget()?.unwrap_or(DEFAULT_LATTICE_BUDGET);
                let v = find_stoch_minimum_with_budget(&sp, k, family, budget)?;
                emit_verdict("stochastic minimum", &v, format)
            }
        },
        Command::Seq { query } => match query {
            SeqCmd::Check { instance, set, format } => {
                let sq = load_sequential(&instance)?;
                let v = check_seq_sufficiency(&sq, &parse_set(&set)?);
                emit_verdict("sequential sufficiency", &v, format)
            }
            SeqCmd::Anchor { instance, set, format } => {
                let sq = load_sequential(&instance)?;
                let v = check_seq_anchor(&sq, &parse_set(&set)?);
                emit_verdict("sequential anchor", &v, format)
            }
            SeqCmd::Min { instance, k, format } => {
                let sq = load_sequential(&instance)?;
                let v = find_seq_minimum(&sq, k);
                emit_verdict("sequential minimum", &v, format)
            }
        },
        Command::Reduce { kind, source, out, verify, format } => {
            run_reduce(kind, &source, out.as_deref(), verify, format)?
        }
        Command::Translate { kind, input, out, format } => {
            run_translate(kind, &input, out.as_deref(), format)?
        }
        Command::Bench { regimes, n, seed, budget_sweep } => {
            run_bench(&regimes, n, seed, budget_sweep)?
        }
    })
}

fn read_source(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn run_reduce(
    kind: ReduceKind,
    source: &Path,
    out: Option<&Path>,
    verify: bool,
    format: Format,
) -> Result<u8> {
    let mut chain = None;
    let gadget: GadgetOutput = match kind {
        ReduceKind::Tautology => gadget_tautology(&parse_dimacs(&read_source(source)?)?),
        ReduceKind::EaSat => gadget_exists_forall(&parse_qdimacs(&read_source(source)?)?)?,
        ReduceKind::Majsat => gadget_majsat(&parse_dimacs(&read_source(source)?)?)?,
        ReduceKind::Tqbf => gadget_tqbf(&parse_qdimacs(&read_source(source)?)?)?,
        ReduceKind::Setcover => {
            let cover = CoverFile::load(source)?;
            gadget_setcover(cover.universe, &cover.sets)?
        }
        ReduceKind::Shifted => gadget_shifted(&parse_dimacs(&read_source(source)?)?)?,
        ReduceKind::EthChain => {
            let (g, acc) = gadget_3sat_chain(&parse_dimacs(&read_source(source)?)?)?;
            chain = Some(acc);
            g
        }
    };
    if let Some(path) = out {
        let file = InstanceFile::from_gadget(&gadget.instance);
        std::fs::write(path, file.to_json()?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let report = verify.then(|| verify_gadget(&gadget)).transpose()?;
    let acc = &gadget.accounting;
    match format {
        Format::Human => {
            println!("query: {:?}", gadget.query);
            println!(
                "accounting: input {} -> output {} over {} coordinates",
                acc.input_size, acc.output_size, acc.coord_count
            );
            if let Some(c) = &chain {
                println!(
                    "chain: m_in {} m_out {} (bound 3*m_in = {}), coords {}",
                    c.m_in,
                    c.m_out,
                    3 * c.m_in,
                    c.coord_count
                );
            }
            if let Some(r) = &report {
                println!(
                    "verify: {} (source {}, target {})",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.source_answer,
                    r.target_answer
                );
            }
        }
        Format::Json | Format::Csv => {
            let value = json!({
                "query": format!("{:?}", gadget.query),
                "input_size": acc.input_size,
                "output_size": acc.output_size,
                "coord_count": acc.coord_count,
                "chain": chain.as_ref().map(|c| json!({
                    "m_in": c.m_in,
                    "m_out": c.m_out,
                    "coord_count": c.coord_count,
                })),
                "verify": report.as_ref().map(|r| json!({
                    "pass": r.pass,
                    "source_answer": r.source_answer,
                    "target_answer": r.target_answer,
                })),
            });
            println!("{}", serde_json::to_string_pretty(&value).unwrap());
        }
    }
    Ok(match report {
        Some(r) if !r.pass => EXIT_NO,
        _ => EXIT_YES,
    })
}

fn run_translate(
    kind: TranslateKind,
    input: &Path,
    out: Option<&Path>,
    format: Format,
) -> Result<u8> {
    let file = TranslationFile::load(input)?;
    match kind {
        TranslateKind::Config => {
            let t = translate_config(&file.to_config()?)?;
            if let Some(path) = out {
                std::fs::write(path, InstanceFile::from_explicit(&t.problem).to_json()?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            match format {
                Format::Human => {
                    println!("behavior-preserving core: {:?}", t.core);
                    println!("core coordinates: {:?}", t.core_coords.members());
                }
                Format::Json | Format::Csv => {
                    let value = json!({
                        "core": t.core,
                        "core_coords": t.core_coords.members(),
                    });
                    println!("{}", serde_json::to_string_pretty(&value).unwrap());
                }
            }
            Ok(EXIT_YES)
        }
        TranslateKind::Pomdp => {
            let t = translate_pomdp(&file.to_pomdp()?)?;
            if let Some(path) = out {
                std::fs::write(path, InstanceFile::from_stochastic(&t.stochastic).to_json()?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(emit_verdict("coarsening preserves the optimizer", &t.verdict, format))
        }
        TranslateKind::Hyperparam => {
            let v = translate_hyperparam(&file.to_hyperparam()?)?;
            if out.is_some() {
                bail!("--out is not supported for hyperparameter translation");
            }
            Ok(emit_verdict("third hyperparameter is redundant", &v, format))
        }
    }
}

/// A small deterministic instance pool: the flag families plus seeded
/// random tables, shared by every regime so rows line up across regimes.
fn bench_pool(n: usize, seed: u64) -> Vec<(String, DecisionProblem)> {
    let mut pool = Vec::new();
    for size in 2..=n.max(2) {
        pool.push((format!("flag-yes-n{size}"), slot_yes_instance(size)));
        pool.push((format!("flag-no-n{size}"), slot_no_instance(size, 0)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for idx in 0..4usize {
        let coords = rng.gen_range(1..=n.max(1).min(4));
        let domains: Vec<usize> = (0..coords).map(|_| rng.gen_range(1..=3)).collect();
        let num_states: usize = domains.iter().product();
        let num_actions = rng.gen_range(1..=3);
        let actions = (0..num_actions).map(|a| format!("a{a}")).collect();
        let utilities = (0..num_actions * num_states)
            .map(|_| rat(rng.gen_range(0..=2), 1))
            .collect();
        let p = DecisionProblem::new(actions, domains, utilities)
            .expect("generated tables are well-shaped");
        pool.push((format!("random-{idx}"), p));
    }
    pool
}

fn outcome_label(v: &Verdict) -> &'static str {
    match v.answer {
        Answer::Yes => "decided-yes",
        Answer::No => "decided-no",
    }
}

fn run_bench(regimes: &str, n: usize, seed: u64, budget_sweep: bool) -> Result<u8> {
    let wanted: Vec<&str> = regimes
        .split(',')
        .map(|r| r.trim())
        .filter(|r| !r.is_empty() && *r != "none")
        .collect();
    let enabled = |name: &str| {
        wanted.iter().any(|r| *r == "all" || *r == name)
    };
    for r in &wanted {
        if !matches!(*r, "all" | "static" | "stochastic" | "sequential") {
            bail!("unknown regime {r:?}");
        }
    }
    println!("{}", bench_csv_header());
    let pool = bench_pool(n, seed);
    let mut rows = Vec::new();
    if enabled("static") {
        for (name, p) in &pool {
            let s = p.num_states() as u64;
            let a = p.num_actions() as u64;
            let flag = CoordSet::new(vec![0]);
            let v = check_sufficiency(p, &flag);
            rows.push(BenchRow {
                instance: name.clone(),
                regime: "static".into(),
                query: "sufficiency".into(),
                num_states: p.num_states(),
                num_coords: p.num_coords(),
                steps: v.steps,
                budget: s * s * a * a,
                outcome: outcome_label(&v).into(),
            });
            let v = check_anchor(p, &flag);
            rows.push(BenchRow {
                instance: name.clone(),
                regime: "static".into(),
                query: "anchor".into(),
                num_states: p.num_states(),
                num_coords: p.num_coords(),
                steps: v.steps,
                budget: 2 * s,
                outcome: outcome_label(&v).into(),
            });
            let v = find_minimum_sufficient(p, 1);
            rows.push(BenchRow {
                instance: name.clone(),
                regime: "static".into(),
                query: "minimum".into(),
                num_states: p.num_states(),
                num_coords: p.num_coords(),
                steps: v.steps,
                budget: (1u64 << p.num_coords()) * s * s,
                outcome: outcome_label(&v).into(),
            });
        }
    }
    if enabled("stochastic") {
        for (name, p) in &pool {
            let s = p.num_states() as u64;
            let uniform = vec![rat(1, p.num_states() as i64); p.num_states()];
            let sp = StochasticProblem::new(p.clone(), uniform)?;
            let flag = CoordSet::new(vec![0]);
            for (query, v, bound) in [
                ("preservation", check_preservation(&sp, &flag), 3 * s),
                ("decisiveness", check_decisiveness(&sp, &flag), 2 * s),
                ("anchor", check_stoch_anchor_preservation(&sp, &flag), 3 * s),
            ] {
                rows.push(BenchRow {
                    instance: name.clone(),
                    regime: "stochastic".into(),
                    query: query.into(),
                    num_states: p.num_states(),
                    num_coords: p.num_coords(),
                    steps: v.steps,
                    budget: bound,
                    outcome: outcome_label(&v).into(),
                });
            }
        }
    }
    if enabled("sequential") {
        for (name, p) in &pool {
            let s = p.num_states() as u64;
            let sq = SequentialProblem::immediate(p.clone());
            let v = check_seq_sufficiency(&sq, &CoordSet::new(vec![0]));
            rows.push(BenchRow {
                instance: name.clone(),
                regime: "sequential".into(),
                query: "sufficiency".into(),
                num_states: p.num_states(),
                num_coords: p.num_coords(),
                steps: v.steps,
                budget: s * s,
                outcome: outcome_label(&v).into(),
            });
        }
    }
    if budget_sweep {
        let p = slot_no_instance(n.max(2), 0);
        let query = CertQuery::Sufficiency { i: CoordSet::new(vec![0]) };
        let mut budget = 0u64;
        loop {
            let outcome = match BudgetedCertifier::new(budget).run(&p, &query) {
                Outcome::Decided(v) => {
                    rows.push(BenchRow {
                        instance: format!("flag-no-n{}", n.max(2)),
                        regime: "certify".into(),
                        query: "sufficiency".into(),
                        num_states: p.num_states(),
                        num_coords: p.num_coords(),
                        steps: v.steps,
                        budget,
                        outcome: outcome_label(&v).into(),
                    });
                    true
                }
                Outcome::Abstain { steps_needed, .. } => {
                    rows.push(BenchRow {
                        instance: format!("flag-no-n{}", n.max(2)),
                        regime: "certify".into(),
                        query: "sufficiency".into(),
                        num_states: p.num_states(),
                        num_coords: p.num_coords(),
                        steps: steps_needed,
                        budget,
                        outcome: "abstain".into(),
                    });
                    false
                }
            };
            if outcome {
                break;
            }
            budget = if budget == 0 { 1 } else { budget * 2 };
        }
    }
    for row in &rows {
        println!("{}", row.to_csv());
    }
    Ok(EXIT_YES)
}
