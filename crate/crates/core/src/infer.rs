//! Joint inference: scoring expressions from relevance and pair scores,
//! answer constraints, beam search over monotonic trees, and w_rel tuning.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{derive_labels, Problem};
use crate::expr::{lca_map, monotonize, ExprTree, LcaLabel, Op};
use crate::features::{FeatureConfig, FeatureContext, FeatureError};
use crate::learn::{score_pair, score_rel, LinearModel};
use crate::rational::Rational;
use crate::schema::{analyze, extract_question, SchemaError, WhKind};

pub const DEFAULT_BEAM_WIDTH: usize = 200;
pub const W_REL_GRID: [f64; 7] = [1e-6, 1e-4, 1e-2, 1.0, 1e2, 1e4, 1e6];

#[derive(Debug, Error)]
pub enum InferError {
    #[error("too few quantities: need at least 2, found {0}")]
    TooFewQuantities(usize),
    #[error("every candidate divides by zero")]
    NoEvaluableCandidate,
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error(transparent)]
    Features(#[from] FeatureError),
    #[error("problem {0} has no gold tree to build oracle scores from")]
    NoGold(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Constraint {
    /// Reject negative answers; zero passes.
    Positive,
    /// Require whole-number answers to "how many" questions.
    Integral,
}

impl Constraint {
    pub const ALL: [Constraint; 2] = [Constraint::Positive, Constraint::Integral];

    pub fn name(self) -> &'static str {
        match self {
            Constraint::Positive => "positive",
            Constraint::Integral => "integral",
        }
    }
}

impl FromStr for Constraint {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Constraint::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| format!("unknown constraint {s:?}"))
    }
}

/// Parses `positive,integral`, `all` or `none`.
pub fn parse_constraints(s: &str) -> Result<BTreeSet<Constraint>, String> {
    match s.trim() {
        "none" | "" => Ok(BTreeSet::new()),
        "all" => Ok(Constraint::ALL.into_iter().collect()),
        list => list.split(',').map(|c| c.trim().parse()).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceConfig {
    pub beam_width: usize,
    pub w_rel: f64,
    pub constraints: BTreeSet<Constraint>,
    pub w_rel_grid: Vec<f64>,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        InferenceConfig {
            beam_width: DEFAULT_BEAM_WIDTH,
            w_rel: 1.0,
            constraints: Constraint::ALL.into_iter().collect(),
            w_rel_grid: W_REL_GRID.to_vec(),
        }
    }
}

/// Rel score per quantity and Pair score per (i < j, label).
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    pub rel: Vec<f64>,
    pub pair: BTreeMap<(usize, usize), [f64; 6]>,
}

impl ScoreTable {
    pub fn zeros(n: usize) -> Self {
        let mut pair = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                pair.insert((i, j), [0.0; 6]);
            }
        }
        ScoreTable { rel: vec![0.0; n], pair }
    }

    /// Pair score of `(i, j)` with `label` read from `i`'s side.
    pub fn pair_score(&self, i: usize, j: usize, label: LcaLabel) -> f64 {
        if i < j {
            self.pair[&(i, j)][label.index()]
        } else {
            self.pair[&(j, i)][label.reverse().index()]
        }
    }

    pub fn set_pair(&mut self, i: usize, j: usize, label: LcaLabel, score: f64) {
        let (key, label) = if i < j { ((i, j), label) } else { ((j, i), label.reverse()) };
        self.pair.entry(key).or_insert([0.0; 6])[label.index()] = score;
    }

    fn pairs_within(&self, t: &ExprTree) -> f64 {
        lca_map(t).into_iter().map(|((i, j), l)| self.pair[&(i, j)][l.index()]).sum()
    }
}

impl fmt::Display for ScoreTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "quantity\tRel")?;
        for (i, r) in self.rel.iter().enumerate() {
            writeln!(f, "q{i}\t{r:.4}")?;
        }
        write!(f, "pair")?;
        for l in LcaLabel::ALL {
            write!(f, "\t{l}")?;
        }
        writeln!(f)?;
        for ((i, j), s) in &self.pair {
            write!(f, "(q{i},q{j})")?;
            for x in s {
                write!(f, "\t{x:.4}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Source of Rel and Pair scores for a problem.
pub trait Scorer: Sync {
    fn table(&self, p: &Problem) -> Result<ScoreTable, InferError>;
}

impl<F> Scorer for F
where
    F: Fn(&Problem) -> ScoreTable + Sync,
{
    fn table(&self, p: &Problem) -> Result<ScoreTable, InferError> {
        Ok(self(p))
    }
}

/// Rel = 1 on gold-irrelevant quantities, Pair = 1 on gold labels, 0 elsewhere.
pub struct OracleScorer;

impl Scorer for OracleScorer {
    fn table(&self, p: &Problem) -> Result<ScoreTable, InferError> {
        let labels = derive_labels(p).ok_or_else(|| InferError::NoGold(p.id.clone()))?;
        let mut t = ScoreTable::zeros(p.quantities.len());
        for (q, relevant) in labels.relevance {
            t.rel[q] = if relevant { 0.0 } else { 1.0 };
        }
        for ((i, j), l) in labels.lca {
            t.set_pair(i, j, l, 1.0);
        }
        Ok(t)
    }
}

/// All scores zero.
pub struct ZeroScorer;

impl Scorer for ZeroScorer {
    fn table(&self, p: &Problem) -> Result<ScoreTable, InferError> {
        Ok(ScoreTable::zeros(p.quantities.len()))
    }
}

/// Scores from trained classifiers. Without a relevance model every quantity
/// is taken as relevant; labels the pair model never saw score `-inf`.
#[derive(Debug, Clone)]
pub struct LearnedScorer {
    pub rel: Option<LinearModel>,
    pub pair: LinearModel,
    pub features: FeatureConfig,
}

impl Scorer for LearnedScorer {
    fn table(&self, p: &Problem) -> Result<ScoreTable, InferError> {
        let a = analyze(p)?;
        let ctx = FeatureContext::new(p, &a.schemas, a.question.as_ref(), self.features.clone());
        let n = p.quantities.len();
        let mut t = ScoreTable::zeros(n);
        for q in &p.quantities {
            t.rel[q.index] = match &self.rel {
                Some(m) => score_rel(m, &ctx.relevance(q)),
                None => f64::NEG_INFINITY,
            };
        }
        for i in 0..n {
            for j in i + 1..n {
                let fv = ctx.lca(&p.quantities[i], &p.quantities[j])?;
                let mut s = [0.0; 6];
                for l in LcaLabel::ALL {
                    s[l.index()] = score_pair(&self.pair, &fv, l.name()).unwrap_or(f64::NEG_INFINITY);
                }
                t.pair.insert((i, j), s);
            }
        }
        Ok(t)
    }
}

/// w_rel * sum of Rel over unused quantities + sum of Pair over used pairs.
pub fn score_with_table(tree: &ExprTree, table: &ScoreTable, w_rel: f64) -> f64 {
    let used = tree.leaf_set();
    let rel: f64 = (0..table.rel.len()).filter(|q| !used.contains(q)).map(|q| table.rel[q]).sum();
    w_rel * rel + table.pairs_within(tree)
}

pub fn score_expression(tree: &ExprTree, p: &Problem, scorer: &dyn Scorer, w_rel: f64) -> Result<f64, InferError> {
    Ok(score_with_table(tree, &scorer.table(p)?, w_rel))
}

fn check_value(value: &Rational, wh: Option<WhKind>, active: &BTreeSet<Constraint>) -> bool {
    if active.contains(&Constraint::Positive) && value.is_negative() {
        return false;
    }
    if active.contains(&Constraint::Integral) && wh == Some(WhKind::HowMany) && !value.denom().is_one() {
        return false;
    }
    true
}

pub fn satisfies_constraints(tree: &ExprTree, p: &Problem, active: &BTreeSet<Constraint>) -> bool {
    let wh = extract_question(p).ok().map(|q| q.wh_kind);
    match tree.evaluate(&p.values()) {
        Ok(v) => check_value(&v, wh, active),
        Err(_) => false,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub tree: ExprTree,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct StateKey {
    irrelevant: Vec<usize>,
    terms: Vec<String>,
}

#[derive(Debug, Clone)]
struct BeamState {
    irrelevant: Vec<usize>,
    /// Sorted by serialization.
    terms: Vec<ExprTree>,
    rel: f64,
    score: f64,
    key: StateKey,
}

impl BeamState {
    fn new(irrelevant: Vec<usize>, mut terms: Vec<ExprTree>, rel: f64, table: &ScoreTable) -> Self {
        terms.sort_by_cached_key(|t| t.to_string());
        let score = rel + terms.iter().map(|t| table.pairs_within(t)).sum::<f64>();
        let key = StateKey { irrelevant: irrelevant.clone(), terms: terms.iter().map(|t| t.to_string()).collect() };
        BeamState { irrelevant, terms, rel, score, key }
    }

    fn expand(&self, table: &ScoreTable, values: &[Rational]) -> Vec<BeamState> {
        let mut out = Vec::new();
        let m = self.terms.len();
        for a in 0..m {
            for b in a + 1..m {
                let rest: Vec<ExprTree> = (0..m).filter(|&k| k != a && k != b).map(|k| self.terms[k].clone()).collect();
                let (ta, tb) = (&self.terms[a], &self.terms[b]);
                for op in Op::ALL {
                    let orders: &[(&ExprTree, &ExprTree)] =
                        if op.is_commutative() { &[(ta, tb)] } else { &[(ta, tb), (tb, ta)] };
                    for (l, r) in orders {
                        let joined = monotonize(&ExprTree::node(op, (*l).clone(), (*r).clone()));
                        if joined.evaluate(values).is_err() {
                            continue;
                        }
                        let mut terms = rest.clone();
                        terms.push(joined);
                        out.push(BeamState::new(self.irrelevant.clone(), terms, self.rel, table));
                    }
                }
            }
        }
        out
    }
}

/// Sorts by score descending, then key ascending, after merging duplicates.
fn prune(states: Vec<BeamState>, k: usize) -> Vec<BeamState> {
    let mut best: HashMap<StateKey, BeamState> = HashMap::new();
    for s in states {
        match best.get(&s.key) {
            Some(old) if old.score.total_cmp(&s.score).is_ge() => {}
            _ => {
                best.insert(s.key.clone(), s);
            }
        }
    }
    let mut v: Vec<BeamState> = best.into_values().collect();
    v.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.key.cmp(&b.key)));
    v.truncate(k);
    v
}

/// Beam search over a precomputed score table.
pub fn beam_search_table(
    p: &Problem,
    table: &ScoreTable,
    config: &InferenceConfig,
) -> Result<Vec<Candidate>, InferError> {
    let n = p.quantities.len();
    if n < 2 {
        return Err(InferError::TooFewQuantities(n));
    }
    let k = config.beam_width.max(1);
    let values = p.values();
    let mut initial = Vec::new();
    for mask in 0u64..(1u64 << n) {
        let irrelevant: Vec<usize> = (0..n).filter(|&q| mask & (1 << q) != 0).collect();
        if n - irrelevant.len() < 2 {
            continue;
        }
        let rel = config.w_rel * irrelevant.iter().map(|&q| table.rel[q]).sum::<f64>();
        let terms = (0..n).filter(|&q| mask & (1 << q) == 0).map(ExprTree::Leaf).collect();
        initial.push(BeamState::new(irrelevant, terms, rel, table));
    }
    let mut beam = prune(initial, k);
    while beam.iter().any(|s| s.terms.len() > 1) {
        let next: Vec<BeamState> = beam
            .par_iter()
            .flat_map_iter(|s| if s.terms.len() == 1 { vec![s.clone()] } else { s.expand(table, &values) })
            .collect();
        beam = prune(next, k);
    }
    let mut out: Vec<(String, Candidate)> = beam
        .into_iter()
        .map(|s| {
            let tree = s.terms.into_iter().next().expect("complete state");
            (tree.to_string(), Candidate { tree, score: s.score })
        })
        .collect();
    out.sort_by(|a, b| b.1.score.total_cmp(&a.1.score).then_with(|| a.0.cmp(&b.0)));
    Ok(out.into_iter().map(|(_, c)| c).collect())
}

pub fn beam_search(p: &Problem, scorer: &dyn Scorer, config: &InferenceConfig) -> Result<Vec<Candidate>, InferError> {
    beam_search_table(p, &scorer.table(p)?, config)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub tree: ExprTree,
    pub value: Rational,
    pub score: f64,
    /// 0-based position in the final beam.
    pub rank: usize,
    /// Whether the tree passes the active constraints.
    pub satisfied: bool,
}

/// First beam entry that passes the constraints, else the top entry.
pub fn select(p: &Problem, beam: &[Candidate], constraints: &BTreeSet<Constraint>) -> Result<Solution, InferError> {
    let wh = extract_question(p).ok().map(|q| q.wh_kind);
    let values = p.values();
    let mut first = None;
    for (rank, c) in beam.iter().enumerate() {
        let Ok(value) = c.tree.evaluate(&values) else { continue };
        let satisfied = check_value(&value, wh, constraints);
        let sol = Solution { tree: c.tree.clone(), value, score: c.score, rank, satisfied };
        if satisfied {
            return Ok(sol);
        }
        first.get_or_insert(sol);
    }
    first.ok_or(InferError::NoEvaluableCandidate)
}

pub fn solve_table(p: &Problem, table: &ScoreTable, config: &InferenceConfig) -> Result<Solution, InferError> {
    let beam = beam_search_table(p, table, config)?;
    select(p, &beam, &config.constraints)
}

pub fn solve(p: &Problem, scorer: &dyn Scorer, config: &InferenceConfig) -> Result<Solution, InferError> {
    solve_table(p, &scorer.table(p)?, config)
}

/// Whether `solve` gets the gold answer; unsolvable problems count as wrong.
pub fn solves_correctly(p: &Problem, table: &ScoreTable, config: &InferenceConfig) -> bool {
    solve_table(p, table, config).is_ok_and(|s| s.value == p.answer)
}

/// Grid value with the best training solve accuracy; ties go to the smaller value.
pub fn tune_w_rel(train: &[Problem], scorer: &dyn Scorer, config: &InferenceConfig) -> Result<f64, InferError> {
    let tables: Vec<(&Problem, ScoreTable)> = train
        .iter()
        .filter(|p| p.quantities.len() >= 2)
        .map(|p| scorer.table(p).map(|t| (p, t)))
        .collect::<Result<_, _>>()?;
    let mut grid = config.w_rel_grid.clone();
    grid.sort_by(f64::total_cmp);
    let mut best = (usize::MAX, f64::NAN);
    for w in grid {
        let cfg = InferenceConfig { w_rel: w, ..config.clone() };
        let hits = tables.par_iter().filter(|(p, t)| solves_correctly(p, t, &cfg)).count();
        if best.0 == usize::MAX || hits > best.0 {
            best = (hits, w);
        }
    }
    Ok(if best.0 == usize::MAX { config.w_rel } else { best.1 })
}
