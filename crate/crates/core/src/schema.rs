//! Quantity schemas: associated verb, subject, unit, related noun phrases and
//! rate, plus the question span. Everything is read off the pre-annotated
//! tokens (POS tags, dependency heads, BIO chunk tags).

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Range;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{Problem, Quantity, Token};
use crate::rational::is_numeric;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("head links form a cycle through token {0}")]
    CyclicHeads(usize),
    #[error("no sentence ends with a question mark")]
    NoQuestion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WhKind {
    HowMany,
    HowMuch,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuestionSpan {
    pub span: Range<usize>,
    pub wh_kind: WhKind,
}

/// Rate components: `unit_a` per `unit_b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rate {
    pub unit_a: Range<usize>,
    pub unit_b: Range<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuantitySchema {
    pub quantity_index: usize,
    pub verb: Option<usize>,
    pub subject: Option<Range<usize>>,
    pub unit_tokens: Vec<usize>,
    /// Representative unit token, used for unit and rate matching.
    pub unit_head: Option<usize>,
    pub related_nps: Vec<Range<usize>>,
    pub rate: Option<Rate>,
}

/// A BIO chunk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chunk {
    pub kind: String,
    pub span: Range<usize>,
}

/// Chunks of a token sequence. An `I-` tag that does not continue a chunk of
/// the same kind opens a new one; chunks never cross sentences.
pub fn chunks(tokens: &[Token]) -> Vec<Chunk> {
    let mut out: Vec<Chunk> = Vec::new();
    for (i, t) in tokens.iter().enumerate() {
        let (bio, kind) = match t.chunk.split_once('-') {
            Some((bio, kind)) => (bio, kind),
            None => continue,
        };
        let continues = bio == "I"
            && matches!(out.last(), Some(c) if c.kind == kind && c.span.end == i
                && tokens[i - 1].sentence_id == t.sentence_id);
        if continues {
            out.last_mut().expect("checked above").span.end = i + 1;
        } else {
            out.push(Chunk { kind: kind.to_string(), span: i..i + 1 });
        }
    }
    out
}

pub fn is_verb(t: &Token) -> bool {
    t.pos.starts_with("VB")
}

pub fn is_noun(t: &Token) -> bool {
    t.pos.starts_with("NN") || t.pos == "$"
}

/// Matching form of a token: lowercase with punctuation removed (`$` kept).
pub fn normalize(text: &str) -> String {
    text.chars().filter(|c| c.is_alphanumeric() || *c == '$').flat_map(char::to_lowercase).collect()
}

/// Precomputed structure shared by the per-quantity extractors.
pub struct Annotated<'a> {
    pub problem: &'a Problem,
    pub chunks: Vec<Chunk>,
    chunk_of: Vec<Option<usize>>,
}

impl<'a> Annotated<'a> {
    pub fn new(problem: &'a Problem) -> Self {
        let chunks = chunks(&problem.tokens);
        let mut chunk_of = vec![None; problem.tokens.len()];
        for (c, chunk) in chunks.iter().enumerate() {
            for i in chunk.span.clone() {
                chunk_of[i] = Some(c);
            }
        }
        Annotated { problem, chunks, chunk_of }
    }

    fn tokens(&self) -> &'a [Token] {
        &self.problem.tokens
    }

    pub fn chunk_of(&self, token: usize) -> Option<usize> {
        self.chunk_of[token]
    }

    /// Span of the chunk holding `token`, or the token alone.
    pub fn phrase(&self, token: usize) -> Range<usize> {
        self.chunk_of(token).map_or(token..token + 1, |c| self.chunks[c].span.clone())
    }

    fn own_units(&self, q: &Quantity) -> Vec<usize> {
        let tokens = self.tokens();
        let Some(c) = self.chunk_of(q.token_position) else {
            return Vec::new();
        };
        let keep = |i: &usize| {
            *i != q.token_position && !is_numeric(&tokens[*i].text) && !normalize(&tokens[*i].text).is_empty()
        };
        let mut units: Vec<usize> = self.chunks[c].span.clone().filter(keep).collect();
        // "<q> shelves of mystery books": pull in the NP after "of".
        let end = self.chunks[c].span.end;
        if end < tokens.len()
            && tokens[end].text.eq_ignore_ascii_case("of")
            && tokens[end].sentence_id == tokens[q.token_position].sentence_id
        {
            if let Some(next) = self.chunk_of.get(end + 1).copied().flatten() {
                let chunk = &self.chunks[next];
                if chunk.kind == "NP" && chunk.span.start == end + 1 {
                    units.extend(chunk.span.clone().filter(keep));
                }
            }
        }
        units
    }

    fn own_chunk_units(&self, q: &Quantity) -> Vec<usize> {
        let phrase = self.phrase(q.token_position);
        self.own_units(q).into_iter().filter(|i| phrase.contains(i)).collect()
    }
}

/// First verb reached by following head links up from the quantity token.
pub fn associated_verb(p: &Problem, q: &Quantity) -> Result<Option<usize>, SchemaError> {
    let mut cur = p.tokens[q.token_position].head_index();
    let mut steps = 0;
    while let Some(i) = cur {
        if is_verb(&p.tokens[i]) {
            return Ok(Some(i));
        }
        steps += 1;
        if steps > p.tokens.len() {
            return Err(SchemaError::CyclicHeads(i));
        }
        cur = p.tokens[i].head_index();
    }
    Ok(None)
}

/// Unit tokens of `q`, with the neighbor fallback for bare numbers.
pub fn unit_tokens(p: &Problem, q: &Quantity) -> Vec<usize> {
    unit_tokens_in(&Annotated::new(p), q)
}

fn unit_tokens_in(a: &Annotated, q: &Quantity) -> Vec<usize> {
    let own = a.own_units(q);
    if !own.is_empty() {
        return own;
    }
    let mut others: Vec<&Quantity> = a.problem.quantities.iter().filter(|o| o.index != q.index).collect();
    // Nearest by token distance; the stable sort keeps the earlier one on ties.
    others.sort_by_key(|o| o.token_position.abs_diff(q.token_position));
    others.into_iter().map(|o| a.own_units(o)).find(|u| !u.is_empty()).unwrap_or_default()
}

fn unit_head_in(a: &Annotated, q: &Quantity, units: &[usize]) -> Option<usize> {
    let tokens = a.tokens();
    let own = a.own_chunk_units(q);
    let pick = |set: &[usize]| set.iter().rev().copied().find(|&i| is_noun(&tokens[i]));
    pick(&own).or_else(|| pick(units)).or_else(|| own.last().or(units.last()).copied())
}

fn quantities_in_sentence(p: &Problem, sentence: usize) -> usize {
    p.quantities.iter().filter(|q| p.sentence_of(q.token_position) == sentence).count()
}

/// Noun phrases tied to `q` by NP-PP-NP chains, or every other noun phrase of
/// the sentence when `q` is its only quantity.
pub fn related_nps(p: &Problem, q: &Quantity) -> Vec<Range<usize>> {
    related_nps_in(&Annotated::new(p), q)
}

fn related_nps_in(a: &Annotated, q: &Quantity) -> Vec<Range<usize>> {
    let p = a.problem;
    let sentence = p.sentence_of(q.token_position);
    let own = a.chunk_of(q.token_position);
    if quantities_in_sentence(p, sentence) == 1 {
        return a
            .chunks
            .iter()
            .enumerate()
            .filter(|(c, ch)| Some(*c) != own && ch.kind == "NP" && p.sentence_of(ch.span.start) == sentence)
            .map(|(_, ch)| ch.span.clone())
            .collect();
    }
    let Some(own) = own else {
        return Vec::new();
    };
    let adjacent = |x: usize, y: usize| a.chunks[x].span.end == a.chunks[y].span.start;
    let is = |c: usize, kind: &str| a.chunks[c].kind == kind;
    let mut found = BTreeSet::new();
    // Forward: [q NP] [PP] [NP] [PP] [NP] ...
    let mut cur = own;
    while cur + 2 < a.chunks.len()
        && is(cur + 1, "PP")
        && is(cur + 2, "NP")
        && adjacent(cur, cur + 1)
        && adjacent(cur + 1, cur + 2)
    {
        found.insert(cur + 2);
        cur += 2;
    }
    // Backward: ... [NP] [PP] [q NP]
    let mut cur = own;
    while cur >= 2 && is(cur - 1, "PP") && is(cur - 2, "NP") && adjacent(cur - 1, cur) && adjacent(cur - 2, cur - 1) {
        found.insert(cur - 2);
        cur -= 2;
    }
    found
        .into_iter()
        .filter(|&c| p.sentence_of(a.chunks[c].span.start) == sentence)
        .map(|c| a.chunks[c].span.clone())
        .collect()
}

/// Head token of a span: its last noun, else its last token.
pub fn span_head(tokens: &[Token], span: &Range<usize>) -> usize {
    span.clone().rev().find(|&i| is_noun(&tokens[i])).unwrap_or(span.end - 1)
}

fn single(i: usize) -> Range<usize> {
    i..i + 1
}

/// Rate components of `q`, if a rate trigger applies within its sentence.
pub fn detect_rate(p: &Problem, q: &Quantity) -> Option<Rate> {
    detect_rate_in(&Annotated::new(p), q)
}

fn detect_rate_in(a: &Annotated, q: &Quantity) -> Option<Rate> {
    let tokens = a.tokens();
    let sentence = a.problem.sentence_range(a.problem.sentence_of(q.token_position));
    let lower = |i: usize| tokens[i].text.to_lowercase();
    let qpos = q.token_position;

    // "<q> <unit_a> per <unit_b>" and "<q> <unit_a> a <unit_b>".
    let mut unit_a = None;
    let mut i = qpos + 1;
    while i < sentence.end && i <= qpos + 5 {
        let word = lower(i);
        if unit_a.is_some() && matches!(word.as_str(), "per" | "a" | "an") {
            let b = (i + 1..sentence.end.min(i + 4))
                .take_while(|&k| is_noun(&tokens[k]) || tokens[k].pos == "JJ")
                .filter(|&k| is_noun(&tokens[k]))
                .last();
            if let (Some(ua), Some(ub)) = (unit_a, b) {
                return Some(Rate { unit_a: single(ua), unit_b: single(ub) });
            }
            break;
        }
        if is_noun(&tokens[i]) {
            unit_a = Some(i);
        } else if !matches!(tokens[i].pos.as_str(), "JJ" | "JJR" | "DT") {
            break;
        }
        i += 1;
    }

    // "<q>-<unit_a> <unit_b>", e.g. "4-dollar toys".
    if qpos + 2 < sentence.end && tokens[qpos + 1].text == "-" && !is_numeric(&tokens[qpos + 2].text) {
        let ua = qpos + 2;
        if let Some(ub) = (ua + 1..sentence.end.min(ua + 4)).find(|&k| is_noun(&tokens[k])) {
            return Some(Rate { unit_a: single(ua), unit_b: single(ub) });
        }
    }

    // "each <unit_b> ... <q> <unit_a>" anywhere in the sentence.
    let own = a.own_chunk_units(q);
    let ua = own.iter().rev().copied().find(|&k| is_noun(&tokens[k]))?;
    for e in sentence.clone() {
        if !matches!(lower(e).as_str(), "each" | "every") || a.phrase(e).contains(&qpos) {
            continue;
        }
        let ub = if e + 1 < sentence.end && lower(e + 1) == "of" {
            // "each of the shelves"
            a.chunk_of(e + 2).filter(|_| e + 2 < sentence.end).map(|c| span_head(tokens, &a.chunks[c].span))
        } else {
            (e + 1..sentence.end)
                .take_while(|&k| is_noun(&tokens[k]) || tokens[k].pos.starts_with("JJ"))
                .filter(|&k| is_noun(&tokens[k]))
                .last()
        };
        if let Some(ub) = ub.filter(|&ub| ub != ua && is_noun(&tokens[ub])) {
            return Some(Rate { unit_a: single(ua), unit_b: single(ub) });
        }
    }
    None
}

/// The question: the last sentence ending in "?", starting at its "how" when
/// one is present and cut before a trailing "if"/"when" clause.
pub fn extract_question(p: &Problem) -> Result<QuestionSpan, SchemaError> {
    let tokens = &p.tokens;
    let last = (0..tokens.len()).rev().find(|&i| {
        tokens[i].text == "?" && (i + 1 == tokens.len() || tokens[i + 1].sentence_id != tokens[i].sentence_id)
    });
    let end_q = last.ok_or(SchemaError::NoQuestion)?;
    let sentence = p.sentence_range(tokens[end_q].sentence_id);
    let lower = |i: usize| tokens[i].text.to_lowercase();
    let mut start = sentence.start;
    if let Some(how) = (sentence.start..end_q).find(|&i| lower(i) == "how") {
        start = how;
    }
    let mut end = end_q;
    if let Some(cut) = (start + 1..end_q).find(|&i| matches!(lower(i).as_str(), "if" | "when")) {
        end = cut;
        while end > start + 1 && normalize(&tokens[end - 1].text).is_empty() {
            end -= 1;
        }
    }
    let first_two = (start + 1 < end).then(|| (lower(start), lower(start + 1)));
    let wh_kind = match first_two.as_ref().map(|(a, b)| (a.as_str(), b.as_str())) {
        Some(("how", "many")) => WhKind::HowMany,
        Some(("how", "much")) => WhKind::HowMuch,
        _ => WhKind::Other,
    };
    Ok(QuestionSpan { span: start..end, wh_kind })
}

fn subject_of(a: &Annotated, verb: usize) -> Option<Range<usize>> {
    a.tokens().iter().position(|t| t.head_index() == Some(verb) && t.deprel.starts_with("nsubj")).map(|s| a.phrase(s))
}

pub fn extract_schema(p: &Problem, q: &Quantity) -> Result<QuantitySchema, SchemaError> {
    extract_schema_in(&Annotated::new(p), q)
}

fn extract_schema_in(a: &Annotated, q: &Quantity) -> Result<QuantitySchema, SchemaError> {
    let verb = associated_verb(a.problem, q)?;
    let subject = verb.and_then(|v| subject_of(a, v));
    let unit_tokens = unit_tokens_in(a, q);
    let unit_head = unit_head_in(a, q, &unit_tokens);
    let schema = QuantitySchema {
        quantity_index: q.index,
        verb,
        subject,
        unit_head,
        related_nps: related_nps_in(a, q),
        rate: detect_rate_in(a, q),
        unit_tokens,
    };
    debug_assert!(schema.in_bounds(a.problem.tokens.len()));
    Ok(schema)
}

impl QuantitySchema {
    pub fn in_bounds(&self, n: usize) -> bool {
        let span_ok = |r: &Range<usize>| r.start < r.end && r.end <= n;
        self.verb.is_none_or(|v| v < n)
            && self.subject.as_ref().is_none_or(span_ok)
            && self.unit_tokens.iter().all(|&u| u < n)
            && self.unit_head.is_none_or(|u| u < n)
            && self.related_nps.iter().all(span_ok)
            && self.rate.as_ref().is_none_or(|r| span_ok(&r.unit_a) && span_ok(&r.unit_b))
    }
}

/// Schemas for every quantity plus the question, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Analysis {
    pub schemas: Vec<QuantitySchema>,
    pub question: Option<QuestionSpan>,
}

pub fn analyze(p: &Problem) -> Result<Analysis, SchemaError> {
    let a = Annotated::new(p);
    let schemas = p.quantities.iter().map(|q| extract_schema_in(&a, q)).collect::<Result<_, _>>()?;
    let question = match extract_question(p) {
        Ok(q) => Some(q),
        Err(SchemaError::NoQuestion) => None,
        Err(e) => return Err(e),
    };
    Ok(Analysis { schemas, question })
}

/// Human-readable schema lines, one per quantity.
pub struct SchemaDump<'a> {
    pub problem: &'a Problem,
    pub analysis: &'a Analysis,
}

impl fmt::Display for SchemaDump<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let toks = &self.problem.tokens;
        let words = |r: &Range<usize>| toks[r.clone()].iter().map(|t| t.text.as_str()).collect::<Vec<_>>().join(" ");
        match &self.analysis.question {
            Some(q) => writeln!(f, "{}\tquestion={:?}\twh={:?}", self.problem.id, words(&q.span), q.wh_kind)?,
            None => writeln!(f, "{}\tquestion=none", self.problem.id)?,
        }
        for s in &self.analysis.schemas {
            let units: Vec<&str> = s.unit_tokens.iter().map(|&u| toks[u].text.as_str()).collect();
            let nps: Vec<String> = s.related_nps.iter().map(&words).collect();
            write!(f, "q{}={}", s.quantity_index, self.problem.quantity_text(s.quantity_index))?;
            write!(f, "\tverb={}", s.verb.map_or("-", |v| toks[v].text.as_str()))?;
            write!(f, "\tsubject={}", s.subject.as_ref().map_or("-".to_string(), words))?;
            write!(f, "\tunits=[{}]", units.join(" "))?;
            write!(f, "\tnps=[{}]", nps.join(" | "))?;
            match &s.rate {
                Some(r) => writeln!(f, "\trate={}/{}", words(&r.unit_a), words(&r.unit_b))?,
                None => writeln!(f, "\trate=-")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::ProblemRecord;
    use crate::fixtures;

    fn texts(p: &Problem, idx: &[usize]) -> Vec<String> {
        idx.iter().map(|&i| p.tokens[i].text.clone()).collect()
    }

    fn words(p: &Problem, r: &Range<usize>) -> String {
        p.tokens[r.clone()].iter().map(|t| t.text.as_str()).collect::<Vec<_>>().join(" ")
    }

    /// Builds a one-sentence problem from "word/POS/head/deprel/chunk" items;
    /// quantities are the CD tokens.
    fn sentence(items: &[&str]) -> Problem {
        let mut tokens = Vec::new();
        let mut quantities = Vec::new();
        for (i, item) in items.iter().enumerate() {
            let f: Vec<&str> = item.split('/').collect();
            if f[1] == "CD" {
                quantities.push(crate::corpus::QuantityRecord {
                    index: quantities.len(),
                    value: f[0].into(),
                    token: i,
                });
            }
            tokens.push(Token {
                text: f[0].into(),
                pos: f[1].into(),
                head: f[2].parse().unwrap(),
                deprel: f[3].into(),
                chunk: f[4].into(),
                sentence_id: 0,
                lemma: None,
            });
        }
        let rec = ProblemRecord {
            id: "s".into(),
            text: String::new(),
            tokens,
            quantities,
            answer: "0".into(),
            gold_tree: None,
            fold: 0,
        };
        Problem::from_record(rec).unwrap()
    }

    #[test]
    fn chunking_follows_bio_tags() {
        let p = fixtures::apple_pile_problem();
        let c = chunks(&p.tokens);
        assert_eq!(c[0].kind, "NP");
        assert_eq!(words(&p, &c[0].span), "There");
        assert_eq!(words(&p, &c[2].span), "8 apples");
    }

    #[test]
    fn verbs_from_head_walk() {
        let p = fixtures::tom_job_problem();
        let v = associated_verb(&p, &p.quantities[0]).unwrap().unwrap();
        assert_eq!(p.tokens[v].text, "had");
        let frag = sentence(&["5/CD/1/nummod/B-NP", "apples/NNS/-1/root/I-NP"]);
        assert_eq!(associated_verb(&frag, &frag.quantities[0]).unwrap(), None);
        let direct = sentence(&["Add/VB/-1/root/B-VP", "5/CD/0/dobj/B-NP"]);
        assert_eq!(associated_verb(&direct, &direct.quantities[0]).unwrap(), Some(0));
    }

    #[test]
    fn cyclic_heads_are_reported() {
        let mut p = sentence(&["5/CD/1/nummod/B-NP", "apples/NNS/-1/root/I-NP"]);
        p.tokens[1].head = 0;
        assert!(matches!(associated_verb(&p, &p.quantities[0]), Err(SchemaError::CyclicHeads(_))));
        assert!(analyze(&p).is_err());
    }

    #[test]
    fn units_with_of_extension_and_fallback() {
        let p = fixtures::bookcase_problem();
        assert_eq!(texts(&p, &unit_tokens(&p, &p.quantities[2])), ["shelves", "mystery", "books"]);
        let p = fixtures::tom_job_problem();
        assert_eq!(texts(&p, &unit_tokens(&p, &p.quantities[0])), ["$"]);
        let p = fixtures::apple_pile_problem();
        // "a package of 11": bare number, nearest with units is "5 apples".
        assert_eq!(texts(&p, &unit_tokens(&p, &p.quantities[1])), ["apples"]);
    }

    #[test]
    fn fallback_ties_prefer_earlier_quantity() {
        let p = sentence(&[
            "3/CD/1/nummod/B-NP",
            "cats/NNS/-1/root/I-NP",
            "and/CC/1/cc/O",
            "4/CD/1/conj/B-NP",
            "and/CC/1/cc/O",
            "then/RB/1/advmod/B-ADVP",
            "5/CD/7/nummod/B-NP",
            "dogs/NNS/1/conj/I-NP",
        ]);
        assert_eq!(texts(&p, &unit_tokens(&p, &p.quantities[1])), ["cats"]);
    }

    #[test]
    fn related_noun_phrases() {
        let p = fixtures::apple_pile_problem();
        let nps: Vec<String> = related_nps(&p, &p.quantities[0]).iter().map(|r| words(&p, r)).collect();
        assert_eq!(nps, ["There", "a pile", "the desk"]);
        let nps: Vec<String> = related_nps(&p, &p.quantities[2]).iter().map(|r| words(&p, r)).collect();
        assert!(nps.contains(&"the pile".to_string()));
        // Two quantities, NP-PP-NP only.
        let p = sentence(&[
            "3/CD/1/nummod/B-NP",
            "apples/NNS/-1/root/I-NP",
            "in/IN/1/prep/B-PP",
            "the/DT/4/det/B-NP",
            "bag/NN/2/pobj/I-NP",
            "and/CC/1/cc/O",
            "4/CD/7/nummod/B-NP",
            "pears/NNS/1/conj/I-NP",
        ]);
        let nps: Vec<String> = related_nps(&p, &p.quantities[0]).iter().map(|r| words(&p, r)).collect();
        assert_eq!(nps, ["the bag"]);
        assert!(related_nps(&p, &p.quantities[1]).is_empty());
    }

    #[test]
    fn rates() {
        let p = sentence(&[
            "He/PRP/1/nsubj/B-NP",
            "drove/VBD/-1/root/B-VP",
            "7/CD/3/nummod/B-NP",
            "kilometers/NNS/1/dobj/I-NP",
            "per/IN/3/prep/B-PP",
            "hour/NN/4/pobj/B-NP",
        ]);
        let r = detect_rate(&p, &p.quantities[0]).unwrap();
        assert_eq!((words(&p, &r.unit_a), words(&p, &r.unit_b)), ("kilometers".into(), "hour".into()));
        let p = sentence(&[
            "Each/DT/1/det/B-NP",
            "egg/NN/2/nsubj/I-NP",
            "costs/VBZ/-1/root/B-VP",
            "2/CD/4/nummod/B-NP",
            "dollars/NNS/2/dobj/I-NP",
        ]);
        let r = detect_rate(&p, &p.quantities[0]).unwrap();
        assert_eq!((words(&p, &r.unit_a), words(&p, &r.unit_b)), ("dollars".into(), "egg".into()));
        let p = sentence(&[
            "She/PRP/1/nsubj/B-NP",
            "bought/VBD/-1/root/B-VP",
            "4/CD/4/nummod/B-NP",
            "-/HYPH/2/punct/I-NP",
            "dollar/NN/5/compound/I-NP",
            "toys/NNS/1/dobj/I-NP",
        ]);
        let r = detect_rate(&p, &p.quantities[0]).unwrap();
        assert_eq!((words(&p, &r.unit_a), words(&p, &r.unit_b)), ("dollar".into(), "toys".into()));
        let p = sentence(&[
            "He/PRP/1/nsubj/B-NP",
            "walks/VBZ/-1/root/B-VP",
            "3/CD/3/nummod/B-NP",
            "miles/NNS/1/dobj/I-NP",
            "a/DT/5/det/B-NP",
            "day/NN/1/npadvmod/I-NP",
        ]);
        let r = detect_rate(&p, &p.quantities[0]).unwrap();
        assert_eq!((words(&p, &r.unit_a), words(&p, &r.unit_b)), ("miles".into(), "day".into()));
        let p = fixtures::tom_job_problem();
        assert!(detect_rate(&p, &p.quantities[0]).is_none());
        let p = fixtures::apple_pile_problem();
        assert!(p.quantities.iter().all(|q| detect_rate(&p, q).is_none()));
    }

    #[test]
    fn bookcase_rate_uses_each() {
        let p = fixtures::bookcase_problem();
        let s = extract_schema(&p, &p.quantities[0]).unwrap();
        let r = s.rate.unwrap();
        assert_eq!((words(&p, &r.unit_a), words(&p, &r.unit_b)), ("books".into(), "shelves".into()));
        assert!(extract_schema(&p, &p.quantities[2]).unwrap().rate.is_none());
    }

    #[test]
    fn questions() {
        let p = fixtures::bookcase_problem();
        let q = extract_question(&p).unwrap();
        assert_eq!(words(&p, &q.span), "how many books did she have in total");
        assert_eq!(q.wh_kind, WhKind::HowMany);
        let p = sentence(&[
            "How/WRB/1/advmod/B-ADVP",
            "much/JJ/5/dobj/B-NP",
            "will/MD/5/aux/B-VP",
            "John/NNP/5/nsubj/B-NP",
            "have/VB/5/aux/B-VP",
            "pay/VB/-1/root/I-VP",
            "if/IN/8/mark/B-SBAR",
            "he/PRP/8/nsubj/B-NP",
            "wants/VBZ/5/advcl/B-VP",
            "7/CD/10/nummod/B-NP",
            "oranges/NNS/8/dobj/I-NP",
            "?/./5/punct/O",
        ]);
        let q = extract_question(&p).unwrap();
        assert_eq!(words(&p, &q.span), "How much will John have pay");
        assert_eq!(q.wh_kind, WhKind::HowMuch);
        let p = sentence(&["5/CD/1/nummod/B-NP", "apples/NNS/-1/root/I-NP", "././1/punct/O"]);
        assert_eq!(extract_question(&p), Err(SchemaError::NoQuestion));
    }

    #[test]
    fn example_two_schema() {
        let p = fixtures::tom_job_problem();
        let s = extract_schema(&p, &p.quantities[0]).unwrap();
        assert_eq!(p.tokens[s.verb.unwrap()].text, "had");
        assert_eq!(words(&p, &s.subject.unwrap()), "Tom");
        assert_eq!(texts(&p, &s.unit_tokens), ["$"]);
        let frag = sentence(&["5/CD/1/nummod/B-NP", "apples/NNS/-1/root/I-NP"]);
        let s = extract_schema(&frag, &frag.quantities[0]).unwrap();
        assert!(s.verb.is_none() && s.subject.is_none());
    }

    #[test]
    fn whole_corpus_is_in_bounds_and_deterministic() {
        for p in fixtures::mini_corpus() {
            let a = analyze(&p).unwrap();
            assert!(a.question.is_some(), "{}", p.id);
            for s in &a.schemas {
                assert!(s.in_bounds(p.tokens.len()));
                assert!(!s.unit_tokens.contains(&p.quantities[s.quantity_index].token_position));
            }
            assert_eq!(analyze(&p).unwrap(), a);
            let dump = SchemaDump { problem: &p, analysis: &a }.to_string();
            assert_eq!(dump.lines().count(), p.quantities.len() + 1);
        }
    }
}
