//! Bundled annotated corpora and small problem builders for tests and demos.

use crate::corpus::{parse_corpus, Problem, ProblemRecord, QuantityRecord, Token};
use crate::expr::ExprTree;
use crate::rational::{parse_decimal, to_decimal_string};

/// Hand-annotated mini-corpus, three folds, every LCA label represented.
pub const MINI_CORPUS: &str = include_str!("../data/mini_corpus.jsonl");

/// Two-quantity problems whose LCA labels are decided only by the verb of the
/// second quantity.
pub const VERB_ONLY_CORPUS: &str = include_str!("../data/verb_only.jsonl");

pub fn mini_corpus() -> Vec<Problem> {
    parse_corpus(MINI_CORPUS, true).expect("bundled mini-corpus is valid").problems
}

pub fn verb_only_corpus() -> Vec<Problem> {
    parse_corpus(VERB_ONLY_CORPUS, true).expect("bundled verb-only corpus is valid").problems
}

fn bundled(id: &str) -> Problem {
    mini_corpus().into_iter().find(|p| p.id == id).unwrap_or_else(|| panic!("no bundled problem {id}"))
}

/// Bookcase problem: 9 books per shelf, 2 types, 3 and 5 shelves; answer 72.
pub fn bookcase_problem() -> Problem {
    bundled("bookcase")
}

/// $74 last week, $86 now; answer 12.
pub fn tom_job_problem() -> Problem {
    bundled("tom-job")
}

/// 8 apples plus 5 added, with a package size of 11 as a distractor.
pub fn apple_pile_problem() -> Problem {
    bundled("apple-pile")
}

/// A problem with minimal annotations: one sentence `"<v> items ."` per value,
/// then the whitespace-tokenized question. The answer is the value of `gold`
/// (or 0 without one).
pub fn synthetic_problem(id: &str, question: &str, values: &[&str], gold: Option<&str>) -> Problem {
    let token = |text: &str, pos: &str, head: i64, deprel: &str, chunk: &str, sentence_id: usize| Token {
        text: text.to_string(),
        pos: pos.to_string(),
        head,
        deprel: deprel.to_string(),
        chunk: chunk.to_string(),
        sentence_id,
        lemma: None,
    };
    let mut tokens = Vec::new();
    let mut quantities = Vec::new();
    for (i, v) in values.iter().enumerate() {
        let at = tokens.len();
        tokens.push(token(v, "CD", at as i64 + 1, "nummod", "B-NP", i));
        tokens.push(token("items", "NNS", -1, "root", "I-NP", i));
        tokens.push(token(".", ".", at as i64 + 1, "punct", "O", i));
        quantities.push(QuantityRecord { index: i, value: v.to_string(), token: at });
    }
    let root = tokens.len() as i64;
    for (k, w) in question.split_whitespace().enumerate() {
        let pos = if w == "?" {
            "."
        } else if k == 0 {
            "WRB"
        } else {
            "NN"
        };
        let (head, deprel) = if k == 0 { (-1, "root") } else { (root, "dep") };
        tokens.push(token(w, pos, head, deprel, "O", values.len()));
    }
    let answer = match gold {
        Some(g) => {
            let t: ExprTree = g.parse().expect("valid gold tree");
            let vals: Vec<_> = values.iter().map(|v| parse_decimal(v).expect("numeric value")).collect();
            to_decimal_string(&t.evaluate(&vals).expect("gold evaluates"))
        }
        None => "0".to_string(),
    };
    let text = tokens.iter().map(|t| t.text.as_str()).collect::<Vec<_>>().join(" ");
    let rec = ProblemRecord {
        id: id.to_string(),
        text,
        tokens,
        quantities,
        answer,
        gold_tree: gold.map(str::to_string),
        fold: 0,
    };
    Problem::from_record(rec).expect("synthetic problem is valid")
}
