//! Training pipelines, fold-based cross-validation and ablation reports.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{derive_labels, Problem};
use crate::expr::LcaLabel;
use crate::features::{FeatureConfig, FeatureContext, FeatureError, FeatureGroup, FeatureVector};
use crate::infer::{
    solves_correctly, tune_w_rel, Constraint, InferError, InferenceConfig, LearnedScorer, ScoreTable, Scorer,
};
use crate::learn::{train, LearnError, TrainerConfig, IRRELEVANT, RELEVANT};
use crate::schema::{analyze, SchemaError};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("cross-validation needs at least two folds, found {0:?}")]
    MissingFolds(Vec<i64>),
    #[error("problem {0} has no gold tree")]
    MissingGold(String),
    #[error("no quantity pairs to train the LCA classifier on")]
    NoPairExamples,
    #[error("unknown ablation group {0:?}")]
    UnknownGroup(String),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error(transparent)]
    Infer(#[from] InferError),
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error(transparent)]
    Features(#[from] FeatureError),
}

/// Everything that determines a training + inference run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub trainer: TrainerConfig,
    pub inference: InferenceConfig,
    /// Pick w_rel from the grid by training accuracy instead of using `inference.w_rel`.
    pub tune_w_rel: bool,
    #[serde(with = "dropped_groups")]
    pub features: FeatureConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            trainer: TrainerConfig::default(),
            inference: InferenceConfig::default(),
            tune_w_rel: true,
            features: FeatureConfig::default(),
        }
    }
}

mod dropped_groups {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(c: &FeatureConfig, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(c.dropped.iter().map(|g| g.name()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<FeatureConfig, D::Error> {
        let names: Vec<String> = Vec::deserialize(d)?;
        let groups = names.iter().map(|n| n.parse::<FeatureGroup>()).collect::<Result<Vec<_>, _>>();
        groups.map(FeatureConfig::dropping).map_err(serde::de::Error::custom)
    }
}

pub type Examples = Vec<(FeatureVector, String)>;

/// Relevance examples over all quantities and LCA examples over pairs of
/// gold-relevant quantities.
pub fn training_examples(problems: &[Problem], features: &FeatureConfig) -> Result<(Examples, Examples), EvalError> {
    let mut rel = Vec::new();
    let mut pair = Vec::new();
    for p in problems {
        let labels = derive_labels(p).ok_or_else(|| EvalError::MissingGold(p.id.clone()))?;
        let a = analyze(p)?;
        let ctx = FeatureContext::new(p, &a.schemas, a.question.as_ref(), features.clone());
        for q in &p.quantities {
            let y = if labels.relevance[&q.index] { RELEVANT } else { IRRELEVANT };
            rel.push((ctx.relevance(q), y.to_string()));
        }
        for (&(i, j), l) in &labels.lca {
            pair.push((ctx.lca(&p.quantities[i], &p.quantities[j])?, l.name().to_string()));
        }
    }
    Ok((rel, pair))
}

/// Trains both classifiers. Relevance is skipped (every quantity relevant)
/// when the data has no irrelevant quantities; the pair classifier covers
/// the labels present in the data.
pub fn train_models(problems: &[Problem], config: &PipelineConfig) -> Result<LearnedScorer, EvalError> {
    let (rel, pair) = training_examples(problems, &config.features)?;
    if pair.is_empty() {
        return Err(EvalError::NoPairExamples);
    }
    let has = |ex: &Examples, c: &str| ex.iter().any(|(_, y)| y == c);
    let rel_model = if has(&rel, IRRELEVANT) && has(&rel, RELEVANT) {
        Some(train(&rel, &[IRRELEVANT, RELEVANT], config.trainer)?)
    } else {
        None
    };
    let labels: Vec<&str> = LcaLabel::ALL.iter().map(|l| l.name()).filter(|l| has(&pair, l)).collect();
    let pair_model = train(&pair, &labels, config.trainer)?;
    Ok(LearnedScorer { rel: rel_model, pair: pair_model, features: config.features.clone() })
}

/// Raw counts behind the report ratios.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub quantities: usize,
    pub quantities_correct: usize,
    pub rel_problems: usize,
    pub rel_problems_correct: usize,
    pub pairs: usize,
    pub pairs_correct: usize,
    pub lca_problems: usize,
    pub lca_problems_correct: usize,
    pub problems: usize,
    pub solved: usize,
}

impl Counts {
    fn add(&mut self, o: &Counts) {
        self.quantities += o.quantities;
        self.quantities_correct += o.quantities_correct;
        self.rel_problems += o.rel_problems;
        self.rel_problems_correct += o.rel_problems_correct;
        self.pairs += o.pairs;
        self.pairs_correct += o.pairs_correct;
        self.lca_problems += o.lca_problems;
        self.lca_problems_correct += o.lca_problems_correct;
        self.problems += o.problems;
        self.solved += o.solved;
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub relevance_relax: f64,
    pub relevance_strict: f64,
    pub lca_relax: f64,
    pub lca_strict: f64,
    pub solve_accuracy: f64,
}

impl From<&Counts> for Metrics {
    fn from(c: &Counts) -> Self {
        Metrics {
            relevance_relax: ratio(c.quantities_correct, c.quantities),
            relevance_strict: ratio(c.rel_problems_correct, c.rel_problems),
            lca_relax: ratio(c.pairs_correct, c.pairs),
            lca_strict: ratio(c.lca_problems_correct, c.lca_problems),
            solve_accuracy: ratio(c.solved, c.problems),
        }
    }
}

/// Predicted label: highest pair score, ties to the earlier label.
pub fn predicted_label(scores: &[f64; 6]) -> LcaLabel {
    LcaLabel::ALL.into_iter().fold(LcaLabel::Plus, |b, l| if scores[l.index()] > scores[b.index()] { l } else { b })
}

/// Scores one problem: relevance decisions, LCA decisions on gold pairs, solve.
pub fn evaluate_problem(p: &Problem, table: &ScoreTable, config: &InferenceConfig) -> Result<Counts, EvalError> {
    let labels = derive_labels(p).ok_or_else(|| EvalError::MissingGold(p.id.clone()))?;
    let mut c = Counts { problems: 1, ..Counts::default() };
    let rel_ok = labels.relevance.iter().filter(|(&q, &relevant)| (table.rel[q] <= 0.0) == relevant).count();
    c.quantities = labels.relevance.len();
    c.quantities_correct = rel_ok;
    c.rel_problems = 1;
    c.rel_problems_correct = usize::from(rel_ok == c.quantities);
    c.pairs = labels.lca.len();
    c.pairs_correct = labels.lca.iter().filter(|(k, &l)| predicted_label(&table.pair[k]) == l).count();
    if c.pairs > 0 {
        c.lca_problems = 1;
        c.lca_problems_correct = usize::from(c.pairs_correct == c.pairs);
    }
    c.solved = usize::from(solves_correctly(p, table, config));
    Ok(c)
}

/// Micro-averaged metrics of a scorer on a problem set.
pub fn evaluate(
    problems: &[Problem],
    scorer: &dyn Scorer,
    config: &InferenceConfig,
) -> Result<(Counts, Metrics), EvalError> {
    let per: Vec<Counts> =
        problems.par_iter().map(|p| evaluate_problem(p, &scorer.table(p)?, config)).collect::<Result<_, _>>()?;
    let mut total = Counts::default();
    per.iter().for_each(|c| total.add(c));
    let m = Metrics::from(&total);
    Ok((total, m))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: i64,
    pub w_rel: f64,
    pub counts: Counts,
    pub metrics: Metrics,
    /// Problems the classifiers were trained on.
    pub train_ids: Vec<String>,
    /// Problems w_rel was tuned on.
    pub tune_ids: Vec<String>,
    pub test_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Ablation tag; "none" for the full system.
    pub dropped: String,
    pub relevance_relax: f64,
    pub relevance_strict: f64,
    pub lca_relax: f64,
    pub lca_strict: f64,
    pub solve_accuracy: f64,
    pub counts: Counts,
    pub folds: Vec<FoldReport>,
    pub config: PipelineConfig,
}

fn run_fold(problems: &[Problem], fold: i64, config: &PipelineConfig) -> Result<FoldReport, EvalError> {
    let (train_set, test_set): (Vec<Problem>, Vec<Problem>) = problems.iter().cloned().partition(|p| p.fold != fold);
    let scorer = train_models(&train_set, config)?;
    let w_rel =
        if config.tune_w_rel { tune_w_rel(&train_set, &scorer, &config.inference)? } else { config.inference.w_rel };
    let inference = InferenceConfig { w_rel, ..config.inference.clone() };
    let (counts, metrics) = evaluate(&test_set, &scorer, &inference)?;
    let ids = |v: &[Problem]| v.iter().map(|p| p.id.clone()).collect::<Vec<_>>();
    Ok(FoldReport {
        fold,
        w_rel,
        counts,
        metrics,
        train_ids: ids(&train_set),
        tune_ids: if config.tune_w_rel { ids(&train_set) } else { Vec::new() },
        test_ids: ids(&test_set),
    })
}

/// Cross-validation over the folds recorded in the corpus.
pub fn cross_validate(problems: &[Problem], config: &PipelineConfig) -> Result<EvalReport, EvalError> {
    if let Some(p) = problems.iter().find(|p| p.gold_tree.is_none()) {
        return Err(EvalError::MissingGold(p.id.clone()));
    }
    let folds: BTreeSet<i64> = problems.iter().map(|p| p.fold).collect();
    if folds.len() < 2 {
        return Err(EvalError::MissingFolds(folds.into_iter().collect()));
    }
    let folds: Vec<FoldReport> =
        folds.into_par_iter().map(|f| run_fold(problems, f, config)).collect::<Result<_, _>>()?;
    let mut counts = Counts::default();
    folds.iter().for_each(|f| counts.add(&f.counts));
    let m = Metrics::from(&counts);
    Ok(EvalReport {
        dropped: "none".to_string(),
        relevance_relax: m.relevance_relax,
        relevance_strict: m.relevance_strict,
        lca_relax: m.lca_relax,
        lca_strict: m.lca_strict,
        solve_accuracy: m.solve_accuracy,
        counts,
        folds,
        config: config.clone(),
    })
}

/// One ablation row: a feature group switched off, or a constraint setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Ablation {
    None,
    Feature(FeatureGroup),
    /// Active constraint set: positive only, integral only, both, or neither.
    Constraints(ConstraintSetting),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ConstraintSetting {
    All,
    Positive,
    Integral,
    None,
}

impl ConstraintSetting {
    pub const ALL: [ConstraintSetting; 4] =
        [ConstraintSetting::All, ConstraintSetting::Positive, ConstraintSetting::Integral, ConstraintSetting::None];

    pub fn name(self) -> &'static str {
        match self {
            ConstraintSetting::All => "all",
            ConstraintSetting::Positive => "positive",
            ConstraintSetting::Integral => "integral",
            ConstraintSetting::None => "none",
        }
    }

    pub fn active(self) -> BTreeSet<Constraint> {
        match self {
            ConstraintSetting::All => Constraint::ALL.into_iter().collect(),
            ConstraintSetting::Positive => [Constraint::Positive].into_iter().collect(),
            ConstraintSetting::Integral => [Constraint::Integral].into_iter().collect(),
            ConstraintSetting::None => BTreeSet::new(),
        }
    }
}

impl Ablation {
    /// Every row, full system first.
    pub fn all_rows() -> Vec<Ablation> {
        let mut rows = vec![Ablation::None];
        rows.extend(FeatureGroup::ALL.into_iter().map(Ablation::Feature));
        rows.extend(ConstraintSetting::ALL.into_iter().map(Ablation::Constraints));
        rows
    }

    pub fn apply(self, base: &PipelineConfig) -> PipelineConfig {
        let mut c = base.clone();
        match self {
            Ablation::None => {}
            Ablation::Feature(g) => {
                c.features.dropped.insert(g);
            }
            Ablation::Constraints(s) => c.inference.constraints = s.active(),
        }
        c
    }
}

impl fmt::Display for Ablation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ablation::None => f.write_str("none"),
            Ablation::Feature(g) => write!(f, "{g}"),
            Ablation::Constraints(s) => write!(f, "constraints:{}", s.name()),
        }
    }
}

/// `none`, `rel:unit|np|misc`, `lca:individual|pair|question` (or the bare
/// group name), `constraints:positive|integral|all|none`.
impl FromStr for Ablation {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || EvalError::UnknownGroup(s.to_string());
        if s == "none" {
            return Ok(Ablation::None);
        }
        if let Some(rest) = s.strip_prefix("constraints:") {
            return ConstraintSetting::ALL
                .into_iter()
                .find(|c| c.name() == rest)
                .map(Ablation::Constraints)
                .ok_or_else(unknown);
        }
        s.parse::<FeatureGroup>().map(Ablation::Feature).map_err(|_| unknown())
    }
}

pub fn ablate(problems: &[Problem], base: &PipelineConfig, rows: &[Ablation]) -> Result<Vec<EvalReport>, EvalError> {
    rows.iter()
        .map(|row| {
            let mut report = cross_validate(problems, &row.apply(base))?;
            report.dropped = row.to_string();
            Ok(report)
        })
        .collect()
}

/// Label distribution of a corpus, for reports.
pub fn label_histogram(problems: &[Problem]) -> BTreeMap<String, usize> {
    let mut h = BTreeMap::new();
    for p in problems {
        if let Some(labels) = derive_labels(p) {
            for l in labels.lca.values() {
                *h.entry(l.name().to_string()).or_insert(0) += 1;
            }
            let irrelevant = labels.relevance.values().filter(|r| !**r).count();
            *h.entry(IRRELEVANT.to_string()).or_insert(0) += irrelevant;
        }
    }
    h
}
