//! Translators from applied shapes — configuration models, one-step
//! partially observed problems, hyperparameter grids — into the kit's query
//! language, plus the worked instances used as fixtures.

use num::BigRational;
use thiserror::Error;

use crate::model::{
    minimum_sufficient_set, rat, Answer, CoordSet, DecisionProblem, ModelError, Rational,
    Verdict, Witness,
};
use crate::stochastic::{check_preservation, StochError, StochasticProblem};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TranslateError {
    #[error("model error: {0}")]
    Model(#[from] ModelError),
    #[error("stochastic error: {0}")]
    Stoch(#[from] StochError),
    #[error("malformed translation input: {0}")]
    Shape(String),
}

/// A service-configuration model: parameters with finite domains, observable
/// behaviors with per-configuration scores, and the target behaviors a
/// simplification must preserve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigModel {
    /// (name, domain size) per parameter; parameter i is coordinate i.
    pub parameters: Vec<(String, usize)>,
    pub behaviors: Vec<String>,
    /// scores[b][config index] with configs in mixed-radix order.
    pub scores: Vec<Vec<Rational>>,
    /// Indices into `behaviors`: which behaviors the target must preserve.
    pub target: Vec<usize>,
}

/// Result of translating a configuration model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigTranslation {
    /// Actions = target behaviors; Opt(config) = best-scoring target
    /// behaviors at that configuration.
    pub problem: DecisionProblem,
    /// The behavior-preserving core: parameters whose coordinates form the
    /// minimum sufficient set.
    pub core: Vec<String>,
    pub core_coords: CoordSet,
}

/// Which parameter subsets preserve the optimal-behavior set? Translate to
/// a decision problem whose actions are the target behaviors; the minimum
/// sufficient set of the induced problem is exactly the core.
pub fn translate_config(model: &ConfigModel) -> Result<ConfigTranslation, TranslateError> {
    if model.target.is_empty() {
        return Err(TranslateError::Shape("target behavior set is empty".into()));
    }
    let domains: Vec<usize> = model.parameters.iter().map(|(_, d)| *d).collect();
    let num_configs: usize = domains.iter().product();
    for &b in &model.target {
        if b >= model.behaviors.len() {
            return Err(TranslateError::Shape(format!("target behavior {b} unknown")));
        }
    }
    if model.scores.len() != model.behaviors.len()
        || model.scores.iter().any(|row| row.len() != num_configs)
    {
        return Err(TranslateError::Shape("score table has wrong shape".into()));
    }
    let actions: Vec<String> =
        model.target.iter().map(|&b| model.behaviors[b].clone()).collect();
    let problem = DecisionProblem::from_fn(actions, domains, |a, s| {
        model.scores[model.target[a]][s].clone()
    })?;
    let core_coords = minimum_sufficient_set(&problem);
    let core = core_coords
        .members()
        .iter()
        .map(|&c| model.parameters[c].0.clone())
        .collect();
    Ok(ConfigTranslation { problem, core, core_coords })
}

/// The three-parameter case study: cache mode affects only latency, the
/// retry policy only write safety, replicas write safety and cost; the
/// target preserves write safety and cost and is indifferent to latency.
pub fn config_case_study() -> ConfigModel {
    // coordinates: p1 cache {off,on}, p2 retry {1,3}, p3 replicas {1,2}
    let domains = [2usize, 2, 2];
    let num_configs: usize = domains.iter().product();
    let digit = |s: usize, i: usize| s >> i & 1; // all domains Boolean
    let latency: Vec<Rational> =
        (0..num_configs).map(|s| rat(digit(s, 0) as i64, 1)).collect();
    let write_safe: Vec<Rational> = (0..num_configs)
        .map(|s| rat((digit(s, 1) + digit(s, 2)) as i64, 1))
        .collect();
    let cost_ok: Vec<Rational> = (0..num_configs).map(|_| rat(1, 1)).collect();
    ConfigModel {
        parameters: vec![
            ("p1".into(), 2),
            ("p2".into(), 2),
            ("p3".into(), 2),
        ],
        behaviors: vec!["latency-ok".into(), "write-safe".into(), "cost-ok".into()],
        scores: vec![latency, write_safe, cost_ok],
        target: vec![1, 2],
    }
}

/// A one-step partially observed problem: prior over hidden states, an
/// observation map, per-action rewards, and a coarsening of observations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PomdpModel {
    pub num_states: usize,
    pub actions: Vec<String>,
    pub num_observations: usize,
    pub prior: Vec<Rational>,
    /// obs[s] = observation of state s.
    pub obs: Vec<usize>,
    /// rewards[a][s].
    pub rewards: Vec<Vec<Rational>>,
    /// coarsening[o] = coarse label of observation o.
    pub coarsening: Vec<usize>,
}

/// Result of translating a one-step POMDP.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PomdpTranslation {
    /// Coordinate 0 = coarse label φ(s), coordinate 1 = index within the
    /// label class. Class padding duplicates a real member with zero mass,
    /// so it can neither create nor hide a preservation violation.
    pub stochastic: StochasticProblem,
    /// encoded state index per original state.
    pub encoding: Vec<usize>,
    /// Preservation of the label coordinate: YES iff
    /// Opt_full(s) = Opt_obs(φ(s)) for every state.
    pub verdict: Verdict,
}

/// φ = coarsening ∘ obs is preserving iff the label coordinate of the
/// encoded problem passes the stochastic preservation check.
pub fn translate_pomdp(model: &PomdpModel) -> Result<PomdpTranslation, TranslateError> {
    let s_count = model.num_states;
    if s_count == 0 {
        return Err(TranslateError::Shape("no states".into()));
    }
    if model.prior.len() != s_count || model.obs.len() != s_count {
        return Err(TranslateError::Shape("prior/observation length mismatch".into()));
    }
    if model.obs.iter().any(|&o| o >= model.num_observations) {
        return Err(TranslateError::Shape("observation out of range".into()));
    }
    if model.coarsening.len() != model.num_observations {
        return Err(TranslateError::Shape("coarsening length mismatch".into()));
    }
    if model.rewards.len() != model.actions.len()
        || model.rewards.iter().any(|row| row.len() != s_count)
    {
        return Err(TranslateError::Shape("reward table has wrong shape".into()));
    }
    let labels: Vec<usize> = model.obs.iter().map(|&o| model.coarsening[o]).collect();
    let num_labels = labels.iter().max().map_or(1, |&l| l + 1);
    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); num_labels];
    for (s, &l) in labels.iter().enumerate() {
        classes[l].push(s);
    }
    let max_class = classes.iter().map(|c| c.len()).max().unwrap_or(1).max(1);
    // encoded state index of (label l, slot j), coordinate 0 least significant
    let enc = |l: usize, j: usize| l + num_labels * j;
    let num_encoded = num_labels * max_class;
    let mut utilities: Vec<Rational> =
        vec![BigRational::from_integer(0.into()); model.actions.len() * num_encoded];
    let mut dist: Vec<Rational> = vec![rat(0, 1); num_encoded];
    for (l, class) in classes.iter().enumerate() {
        for j in 0..max_class {
            // padding slots replicate the class's first member (zero mass);
            // empty classes keep zero utilities in an all-zero-mass fiber
            let member = match class.get(j).or_else(|| class.first()) {
                Some(&m) => m,
                None => continue,
            };
            for (a, row) in model.rewards.iter().enumerate() {
                utilities[a * num_encoded + enc(l, j)] = row[member].clone();
            }
            if j < class.len() {
                dist[enc(l, j)] = model.prior[class[j]].clone();
            }
        }
    }
    let base = DecisionProblem::new(
        model.actions.clone(),
        vec![num_labels, max_class],
        utilities,
    )?;
    let stochastic = StochasticProblem::new(base, dist)?;
    let verdict = check_preservation(&stochastic, &CoordSet::new(vec![0]));
    let encoding = (0..s_count)
        .map(|s| {
            let l = labels[s];
            let j = classes[l].iter().position(|&m| m == s).expect("member");
            enc(l, j)
        })
        .collect();
    Ok(PomdpTranslation { stochastic, encoding, verdict })
}

/// The two-state worked instance: uniform prior, r(a,s₁)=2, r(b,s₁)=1,
/// r(a,s₂)=0, r(b,s₂)=3, observations fully coarsened to one symbol. The
/// coarse expectations are E[r(a)] = 1 and E[r(b)] = 2, so the coarse
/// optimizer is {b} while Opt_full(s₁) = {a}: preservation fails.
pub fn pomdp_worked_instance() -> PomdpModel {
    PomdpModel {
        num_states: 2,
        actions: vec!["a".into(), "b".into()],
        num_observations: 2,
        prior: vec![rat(1, 2), rat(1, 2)],
        obs: vec![0, 1],
        rewards: vec![vec![rat(2, 1), rat(0, 1)], vec![rat(1, 1), rat(3, 1)]],
        coarsening: vec![0, 0],
    }
}

/// A hyperparameter grid H = X_α × X_γ × X_ε with expected return f_e per
/// environment e.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperparamModel {
    pub envs: Vec<String>,
    /// (|X_α|, |X_γ|, |X_ε|); α is coordinate 0, γ coordinate 1, ε
    /// coordinate 2 of the grid's mixed-radix index.
    pub domains: (usize, usize, usize),
    /// returns[e][h] over the grid in mixed-radix order.
    pub returns: Vec<Vec<Rational>>,
}

impl HyperparamModel {
    pub fn grid_size(&self) -> usize {
        self.domains.0 * self.domains.1 * self.domains.2
    }
}

/// γ-redundancy: for every environment e and grid point h,
/// h ∈ Opt_e ⇔ some h₀ ∈ Opt_e agrees with h on (α, ε), where
/// Opt_e = argmax over the grid of f_e. Equivalently each Opt_e is a union
/// of full γ-fibers over its (α, ε) projections. The NO-witness is a
/// non-optimal grid point sharing its (α, ε) slice with an optimum.
pub fn translate_hyperparam(model: &HyperparamModel) -> Result<Verdict, TranslateError> {
    let grid = model.grid_size();
    if grid == 0 {
        return Err(TranslateError::Shape("empty grid".into()));
    }
    if model.returns.len() != model.envs.len()
        || model.returns.iter().any(|row| row.len() != grid)
    {
        return Err(TranslateError::Shape("return table has wrong shape".into()));
    }
    let (da, dg, _) = model.domains;
    let pi = |h: usize| -> (usize, usize) {
        let alpha = h % da;
        let epsilon = h / (da * dg);
        (alpha, epsilon)
    };
    let mut steps = 0u64;
    for (e, f) in model.returns.iter().enumerate() {
        let best = f.iter().max().expect("grid nonempty");
        let opt: Vec<usize> =
            (0..grid).filter(|&h| &f[h] == best).collect();
        let projections: std::collections::BTreeSet<(usize, usize)> =
            opt.iter().map(|&h| pi(h)).collect();
        for h in 0..grid {
            steps += 1;
            if opt.binary_search(&h).is_err() && projections.contains(&pi(h)) {
                let mut v = Verdict::no_with(Witness::State(h), steps);
                v.note = Some(format!(
                    "environment {} has a non-optimal point sharing an (α, ε) slice with an optimum",
                    model.envs[e]
                ));
                return Ok(v);
            }
        }
    }
    let mut v = Verdict { answer: Answer::Yes, witness: None, steps, note: None };
    v.note = Some("γ is redundant: every optimum set is a union of γ-fibers".into());
    Ok(v)
}

/// A grid where f_e ignores γ entirely, so γ is redundant.
pub fn hyperparam_worked_instance() -> HyperparamModel {
    let domains = (2usize, 3usize, 2usize);
    let grid = domains.0 * domains.1 * domains.2;
    let value = |e: usize, h: usize| -> Rational {
        let alpha = h % domains.0;
        let epsilon = h / (domains.0 * domains.1);
        // γ-independent by construction
        rat((alpha * (e + 1) + epsilon * 2) as i64, 1)
    };
    HyperparamModel {
        envs: vec!["cartpole".into(), "gridworld".into()],
        domains,
        returns: (0..2).map(|e| (0..grid).map(|h| value(e, h)).collect()).collect(),
    }
}
