//! Sparse indicator features for the relevance and LCA classifiers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::corpus::{Problem, Quantity};
use crate::schema::{normalize, span_head, QuantitySchema, QuestionSpan};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeatureError {
    #[error("quantity {0} must precede quantity {1} in the text")]
    OrderViolation(usize, usize),
    #[error("unknown feature group {0:?}")]
    UnknownGroup(String),
}

/// Named feature values; absent names are zero.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureVector(pub BTreeMap<String, f64>);

impl FeatureVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, name: impl Into<String>, value: f64) {
        self.0.insert(name.into(), value);
    }

    pub fn flag(&mut self, name: impl Into<String>) {
        self.set(name, 1.0);
    }

    pub fn get(&self, name: &str) -> f64 {
        self.0.get(name).copied().unwrap_or(0.0)
    }

    pub fn has(&self, name: &str) -> bool {
        self.get(name) != 0.0
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, a: f64) -> FeatureVector {
        FeatureVector(self.0.iter().map(|(k, v)| (k.clone(), v * a)).collect())
    }

    /// Adds `f&g` with value `min(f, g)` for every pair of present features.
    fn add_conjunctions(&mut self) {
        let base: Vec<(String, f64)> =
            self.0.iter().filter(|(_, v)| **v != 0.0).map(|(k, v)| (k.clone(), *v)).collect();
        for (x, (f, fv)) in base.iter().enumerate() {
            for (g, gv) in &base[x + 1..] {
                self.set(conjunction_name(f, g), fv.min(*gv));
            }
        }
    }
}

/// Order-normalized conjunction name.
pub fn conjunction_name(f: &str, g: &str) -> String {
    if f <= g {
        format!("{f}&{g}")
    } else {
        format!("{g}&{f}")
    }
}

/// Sorted `name\tvalue` lines.
impl fmt::Display for FeatureVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.0 {
            writeln!(f, "{k}\t{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureGroup {
    /// UNIT_IN_QUESTION, OTHER_UNIT_BETTER, NUM_MAX_MATCH_QUANTITIES.
    RelUnit,
    /// NP_IN_QUESTION, OTHER_NP_BETTER.
    RelNp,
    /// NUM_QUANTITIES.
    RelMisc,
    /// Per-quantity verb, rate and neighborhood features.
    LcaIndividual,
    /// SAME_*, RATE_COMPONENT_MATCH_*, VALUE_I_GREATER.
    LcaPair,
    /// QUESTION_*.
    LcaQuestion,
}

impl FeatureGroup {
    pub const ALL: [FeatureGroup; 6] = [
        FeatureGroup::RelUnit,
        FeatureGroup::RelNp,
        FeatureGroup::RelMisc,
        FeatureGroup::LcaIndividual,
        FeatureGroup::LcaPair,
        FeatureGroup::LcaQuestion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FeatureGroup::RelUnit => "rel:unit",
            FeatureGroup::RelNp => "rel:np",
            FeatureGroup::RelMisc => "rel:misc",
            FeatureGroup::LcaIndividual => "lca:individual",
            FeatureGroup::LcaPair => "lca:pair",
            FeatureGroup::LcaQuestion => "lca:question",
        }
    }
}

impl fmt::Display for FeatureGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Accepts `rel:unit` style names and the bare suffixes.
impl FromStr for FeatureGroup {
    type Err = FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FeatureGroup::ALL
            .into_iter()
            .find(|g| g.name() == s || g.name().split_once(':').map(|(_, b)| b) == Some(s))
            .ok_or_else(|| FeatureError::UnknownGroup(s.to_string()))
    }
}

/// Which groups are switched off.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeatureConfig {
    pub dropped: BTreeSet<FeatureGroup>,
}

impl FeatureConfig {
    pub fn dropping(groups: impl IntoIterator<Item = FeatureGroup>) -> Self {
        FeatureConfig { dropped: groups.into_iter().collect() }
    }

    fn on(&self, g: FeatureGroup) -> bool {
        !self.dropped.contains(&g)
    }
}

/// Adverb and comparative tags picked up by the neighborhood features.
pub const NEIGHBOR_POS: [&str; 4] = ["RB", "RBR", "RBS", "JJR"];
pub const NEIGHBOR_WINDOW: usize = 5;

fn question_words(p: &Problem, question: Option<&QuestionSpan>) -> BTreeSet<String> {
    question
        .map(|q| p.tokens[q.span.clone()].iter().map(|t| normalize(&t.text)).filter(|w| !w.is_empty()).collect())
        .unwrap_or_default()
}

/// Per-problem state shared by all feature calls on that problem.
pub struct FeatureContext<'a> {
    pub problem: &'a Problem,
    pub schemas: &'a [QuantitySchema],
    pub question: Option<&'a QuestionSpan>,
    pub config: FeatureConfig,
    words: BTreeSet<String>,
    unit_matches: Vec<usize>,
    np_matches: Vec<usize>,
}

impl<'a> FeatureContext<'a> {
    pub fn new(
        problem: &'a Problem,
        schemas: &'a [QuantitySchema],
        question: Option<&'a QuestionSpan>,
        config: FeatureConfig,
    ) -> Self {
        let words = question_words(problem, question);
        let in_q = |i: usize| words.contains(&normalize(&problem.tokens[i].text));
        let unit_matches = schemas.iter().map(|s| s.unit_tokens.iter().filter(|&&u| in_q(u)).count()).collect();
        let np_matches = schemas
            .iter()
            .map(|s| s.related_nps.iter().filter(|r| in_q(span_head(&problem.tokens, r))).count())
            .collect();
        FeatureContext { problem, schemas, question, config, words, unit_matches, np_matches }
    }

    fn in_question(&self, token: usize) -> bool {
        self.words.contains(&normalize(&self.problem.tokens[token].text))
    }

    fn schema(&self, q: &Quantity) -> &QuantitySchema {
        &self.schemas[q.index]
    }

    pub fn relevance(&self, q: &Quantity) -> FeatureVector {
        let mut fv = FeatureVector::new();
        let i = q.index;
        if self.config.on(FeatureGroup::RelUnit) {
            let own = self.unit_matches[i];
            if own > 0 {
                fv.flag("UNIT_IN_QUESTION");
            }
            if self.unit_matches.iter().any(|&m| m > own) {
                fv.flag("OTHER_UNIT_BETTER");
            }
            let max = self.unit_matches.iter().copied().max().unwrap_or(0);
            if max > 0 {
                let k = self.unit_matches.iter().filter(|&&m| m == max).count();
                fv.flag(format!("NUM_MAX_MATCH_QUANTITIES={k}"));
            }
        }
        if self.config.on(FeatureGroup::RelNp) {
            let own = self.np_matches[i];
            if own > 0 {
                fv.flag("NP_IN_QUESTION");
            }
            if self.np_matches.iter().any(|&m| m > own) {
                fv.flag("OTHER_NP_BETTER");
            }
        }
        if self.config.on(FeatureGroup::RelMisc) {
            match self.problem.quantities.len() {
                0 | 1 => {}
                2 => fv.flag("NUM_QUANTITIES=2"),
                3 => fv.flag("NUM_QUANTITIES=3"),
                _ => fv.flag("NUM_QUANTITIES=4+"),
            }
        }
        fv.add_conjunctions();
        fv
    }

    fn individual(&self, q: &Quantity, side: &str, fv: &mut FeatureVector) {
        let p = self.problem;
        let s = self.schema(q);
        if let Some(v) = s.verb {
            fv.flag(format!("VERB_{side}={}", p.tokens[v].lemma_or_text()));
        }
        if let Some(rate) = &s.rate {
            fv.flag(format!("IS_RATE_{side}"));
            if rate.unit_a.clone().chain(rate.unit_b.clone()).any(|t| self.in_question(t)) {
                fv.flag(format!("RATE_UNIT_IN_QUESTION_{side}"));
            }
        }
        let pos = q.token_position;
        let sentence = p.sentence_range(p.sentence_of(pos));
        let lo = pos.saturating_sub(NEIGHBOR_WINDOW).max(sentence.start);
        let hi = (pos + NEIGHBOR_WINDOW + 1).min(sentence.end);
        for t in lo..hi {
            let tok = &p.tokens[t];
            if t != pos && NEIGHBOR_POS.contains(&tok.pos.as_str()) {
                let w = normalize(&tok.text);
                if !w.is_empty() {
                    fv.flag(format!("NEIGHBOR_{side}={w}"));
                }
            }
        }
    }

    pub fn lca(&self, qi: &Quantity, qj: &Quantity) -> Result<FeatureVector, FeatureError> {
        if qi.token_position >= qj.token_position {
            return Err(FeatureError::OrderViolation(qi.index, qj.index));
        }
        let p = self.problem;
        let (si, sj) = (self.schema(qi), self.schema(qj));
        let mut fv = FeatureVector::new();
        if self.config.on(FeatureGroup::LcaIndividual) {
            self.individual(qi, "i", &mut fv);
            self.individual(qj, "j", &mut fv);
        }
        if self.config.on(FeatureGroup::LcaPair) {
            if let (Some(vi), Some(vj)) = (si.verb, sj.verb) {
                if p.tokens[vi].lemma_or_text() == p.tokens[vj].lemma_or_text() {
                    fv.flag("SAME_VERB");
                }
                if vi == vj {
                    fv.flag("SAME_VERB_MENTION");
                }
            }
            let unit = |s: &QuantitySchema| s.unit_head.map(|u| normalize(&p.tokens[u].text));
            let (ui, uj) = (unit(si), unit(sj));
            if ui.is_some() && ui == uj {
                fv.flag("SAME_UNIT");
            }
            for (rated, other) in [(si, &uj), (sj, &ui)] {
                let (Some(rate), Some(other)) = (&rated.rate, other) else {
                    continue;
                };
                let matches = |r: &std::ops::Range<usize>| r.clone().any(|t| &normalize(&p.tokens[t].text) == other);
                if matches(&rate.unit_a) {
                    fv.flag("RATE_COMPONENT_MATCH_a");
                }
                if matches(&rate.unit_b) {
                    fv.flag("RATE_COMPONENT_MATCH_b");
                }
            }
            if qi.value > qj.value {
                fv.flag("VALUE_I_GREATER");
            }
        }
        if self.config.on(FeatureGroup::LcaQuestion) {
            let has = |ws: &[&str]| ws.iter().any(|w| self.words.contains(*w));
            if has(&["more", "less", "than"]) {
                fv.flag("QUESTION_COMPARE");
            }
            if has(&["each", "one"]) {
                fv.flag("QUESTION_RATE");
            }
        }
        fv.add_conjunctions();
        Ok(fv)
    }
}

pub fn relevance_features(
    p: &Problem,
    schemas: &[QuantitySchema],
    question: Option<&QuestionSpan>,
    q: &Quantity,
) -> FeatureVector {
    FeatureContext::new(p, schemas, question, FeatureConfig::default()).relevance(q)
}

pub fn lca_features(
    p: &Problem,
    schemas: &[QuantitySchema],
    question: Option<&QuestionSpan>,
    qi: &Quantity,
    qj: &Quantity,
) -> Result<FeatureVector, FeatureError> {
    FeatureContext::new(p, schemas, question, FeatureConfig::default()).lca(qi, qj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::schema::analyze;

    fn with_ctx<T>(p: &Problem, f: impl FnOnce(&FeatureContext) -> T) -> T {
        let a = analyze(p).unwrap();
        let ctx = FeatureContext::new(p, &a.schemas, a.question.as_ref(), FeatureConfig::default());
        f(&ctx)
    }

    #[test]
    fn example_three_distractor() {
        let p = fixtures::apple_pile_problem();
        let (f11, f8) = with_ctx(&p, |c| (c.relevance(&p.quantities[1]), c.relevance(&p.quantities[0])));
        assert!(f11.has("UNIT_IN_QUESTION"));
        assert!(!f11.has("NP_IN_QUESTION"));
        assert!(f11.has("OTHER_NP_BETTER"));
        assert!(f8.has("NP_IN_QUESTION"));
        assert!(f8.has("NUM_QUANTITIES=3"));
    }

    #[test]
    fn two_quantities_and_empty_schema() {
        let p = fixtures::tom_job_problem();
        let f = with_ctx(&p, |c| c.relevance(&p.quantities[0]));
        assert!(f.has("NUM_QUANTITIES=2"));
        let p = fixtures::synthetic_problem("x", "What ?", &["3", "4"], None);
        let a = analyze(&p).unwrap();
        let mut bare = a.schemas.clone();
        for s in &mut bare {
            s.unit_tokens.clear();
            s.related_nps.clear();
        }
        let f = relevance_features(&p, &bare, a.question.as_ref(), &p.quantities[0]);
        assert_eq!(f.iter().map(|(k, _)| k).collect::<Vec<_>>(), ["NUM_QUANTITIES=2"]);
    }

    #[test]
    fn neighbor_more_and_rate_match() {
        let p = fixtures::mini_corpus().into_iter().find(|p| p.id == "add-0").unwrap();
        let f = with_ctx(&p, |c| c.lca(&p.quantities[0], &p.quantities[1]).unwrap());
        assert!(f.has("NEIGHBOR_j=more"));
        assert!(f.has("SAME_UNIT"));
        let p = fixtures::bookcase_problem();
        let f = with_ctx(&p, |c| c.lca(&p.quantities[0], &p.quantities[2]).unwrap());
        assert!(f.has("IS_RATE_i"));
        assert!(f.has("RATE_COMPONENT_MATCH_b"));
        assert!(f.has("VERB_i=have") && f.has("SAME_VERB"));
    }

    #[test]
    fn identical_schemas_and_value_order() {
        let p = fixtures::synthetic_problem("x", "How many items ?", &["3", "4"], None);
        let a = analyze(&p).unwrap();
        let mut schemas = a.schemas.clone();
        schemas[1] = QuantitySchema { quantity_index: 1, ..schemas[0].clone() };
        schemas[0].verb = Some(0);
        schemas[1].verb = Some(0);
        let f = lca_features(&p, &schemas, a.question.as_ref(), &p.quantities[0], &p.quantities[1]).unwrap();
        assert!(f.has("SAME_VERB") && f.has("SAME_UNIT"));
        assert!(!f.has("VALUE_I_GREATER"));
        let p = fixtures::synthetic_problem("y", "How many items ?", &["9", "4"], None);
        let a = analyze(&p).unwrap();
        let f = lca_features(&p, &a.schemas, a.question.as_ref(), &p.quantities[0], &p.quantities[1]).unwrap();
        assert!(f.has("VALUE_I_GREATER"));
    }

    #[test]
    fn order_is_enforced() {
        let p = fixtures::tom_job_problem();
        let err = with_ctx(&p, |c| c.lca(&p.quantities[1], &p.quantities[0]));
        assert_eq!(err, Err(FeatureError::OrderViolation(1, 0)));
    }

    #[test]
    fn conjunction_closure() {
        for p in fixtures::mini_corpus().iter().take(15) {
            with_ctx(p, |c| {
                let mut vecs: Vec<FeatureVector> = p.quantities.iter().map(|q| c.relevance(q)).collect();
                for i in 0..p.quantities.len() {
                    for j in i + 1..p.quantities.len() {
                        vecs.push(c.lca(&p.quantities[i], &p.quantities[j]).unwrap());
                    }
                }
                for fv in vecs {
                    let base: Vec<&str> = fv.iter().map(|(k, _)| k).filter(|k| !k.contains('&')).collect();
                    for (x, f) in base.iter().enumerate() {
                        for g in &base[x + 1..] {
                            assert_eq!(fv.get(&conjunction_name(f, g)), fv.get(f).min(fv.get(g)));
                            assert_eq!(conjunction_name(f, g), conjunction_name(g, f));
                        }
                    }
                    let n = base.len();
                    assert_eq!(fv.len(), n + n * n.saturating_sub(1) / 2);
                }
            });
        }
    }

    #[test]
    fn dropping_groups_and_dump() {
        let p = fixtures::bookcase_problem();
        let a = analyze(&p).unwrap();
        let ctx = FeatureContext::new(
            &p,
            &a.schemas,
            a.question.as_ref(),
            FeatureConfig::dropping([FeatureGroup::LcaIndividual]),
        );
        let f = ctx.lca(&p.quantities[0], &p.quantities[2]).unwrap();
        assert!(f.iter().all(|(k, _)| !k.contains("VERB_") && !k.contains("IS_RATE")));
        assert!(f.has("SAME_VERB"));
        let dump = f.to_string();
        let mut lines: Vec<&str> = dump.lines().collect();
        let sorted = {
            let mut s = lines.clone();
            s.sort();
            s
        };
        assert_eq!(lines, sorted);
        lines.dedup();
        assert_eq!(lines.len(), f.len());
        assert_eq!("pair".parse::<FeatureGroup>().unwrap(), FeatureGroup::LcaPair);
        assert_eq!("rel:np".parse::<FeatureGroup>().unwrap(), FeatureGroup::RelNp);
        assert!("bogus".parse::<FeatureGroup>().is_err());
    }
}
