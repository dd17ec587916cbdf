//! End-to-end acceptance checks. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use monotree::corpus::{load_corpus, Problem};
use monotree::eval::{cross_validate, label_histogram, train_models, PipelineConfig};
use monotree::expr::rewrite::rewrite_closure;
use monotree::expr::{enumerate_trees, is_monotonic, lca_map, monotonize, random_tree, root_chain, ExprTree, LcaLabel};
use monotree::fixtures::{self, synthetic_problem};
use monotree::infer::{beam_search, solve, InferenceConfig, OracleScorer, ScoreTable};
use monotree::rational::{from_int, Rational};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let n: i64 = rng.gen_range(1..=1000) * if rng.gen_bool(0.5) { 1 } else { -1 };
    from_int(n) / from_int(rng.gen_range(1..=1000))
}

fn monotonize_preserves_value() -> Outcome {
    let failures: usize = (0..10_000u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(k);
            let leaves = rng.gen_range(1..=6);
            let t = random_tree(&mut rng, &(0..leaves).collect::<Vec<_>>());
            let m = monotonize(&t);
            let mut bad = usize::from(!is_monotonic(&m));
            for _ in 0..20 {
                let values: Vec<Rational> = (0..leaves).map(|_| random_rational(&mut rng)).collect();
                // Exact equality whenever the original is defined.
                if let Ok(v) = t.evaluate(&values) {
                    bad += usize::from(m.evaluate(&values).ok() != Some(v));
                }
            }
            bad
        })
        .sum();
    outcome(failures == 0, format!("10000 trees x 20 assignments, {failures} violations"))
}

/// Monotone members of the rewrite closure, plus the monotonized form of every member.
fn monotone_family(t: &ExprTree) -> Vec<ExprTree> {
    let closure = rewrite_closure(t, usize::MAX);
    let mut out: Vec<ExprTree> = closure.iter().filter(|x| is_monotonic(x)).cloned().collect();
    out.extend(closure.iter().map(monotonize));
    out
}

fn instance_set() -> Vec<ExprTree> {
    let mut trees: Vec<ExprTree> = enumerate_trees(&[0, 1, 2, 3], None).unwrap().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    trees.extend((0..200).map(|_| random_tree(&mut rng, &[0, 1, 2, 3, 4])));
    trees
}

fn lca_uniqueness(instances: &[ExprTree]) -> Outcome {
    let (violations, checked): (usize, usize) = instances
        .par_iter()
        .map(|t| {
            let family = monotone_family(t);
            let first = lca_map(&family[0]);
            (family.iter().filter(|x| lca_map(x) != first).count(), family.len())
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    outcome(
        violations == 0,
        format!("{} expressions, {checked} monotone trees, {violations} violations", instances.len()),
    )
}

fn chain_signature(t: &ExprTree) -> (Option<String>, Vec<String>) {
    match root_chain(t) {
        None => (None, vec![t.to_string()]),
        Some(c) => {
            let mut terms: Vec<String> = c
                .terms
                .iter()
                .map(|term| format!("{:?}|{:?}|{:?}", term.role, term.tree.leaf_set(), lca_map(&term.tree)))
                .collect();
            terms.sort();
            (Some(format!("{:?}", c.kind)), terms)
        }
    }
}

fn chain_invariance(instances: &[ExprTree]) -> Outcome {
    let violations: usize = instances
        .par_iter()
        .map(|t| {
            let family = monotone_family(t);
            let first = chain_signature(&family[0]);
            family.iter().filter(|x| chain_signature(x) != first).count()
        })
        .sum();
    outcome(violations == 0, format!("{} expressions, {violations} violations", instances.len()))
}

fn oracle_equivalence(problems: &[Problem]) -> Outcome {
    let config = InferenceConfig { beam_width: 1_000_000, ..InferenceConfig::default() };
    let misses: Vec<&str> = problems
        .par_iter()
        .filter(|p| {
            let gold = p.gold_tree.as_ref().expect("bundled problems carry gold");
            match solve(p, &OracleScorer, &config) {
                Ok(s) => s.value != p.answer || lca_map(&s.tree) != lca_map(gold),
                Err(_) => true,
            }
        })
        .map(|p| p.id.as_str())
        .collect();
    let labels: BTreeSet<LcaLabel> =
        problems.iter().flat_map(|p| lca_map(p.gold_tree.as_ref().unwrap()).into_values()).collect();
    let pass = misses.is_empty() && problems.len() >= 30 && labels.len() == 6;
    outcome(
        pass,
        format!(
            "{}/{} exact, {} labels covered, misses {misses:?}",
            problems.len() - misses.len(),
            problems.len(),
            labels.len()
        ),
    )
}

/// Problems whose best unconstrained tree is negative or fractional while the
/// runner-up is the gold tree.
fn constraint_problems() -> Vec<(Problem, ScoreTable)> {
    (0..20)
        .map(|k| {
            let a = 3 + k;
            let b = a + 4 + 2 * k;
            if k % 2 == 0 {
                let p = synthetic_problem(
                    &format!("neg-{k}"),
                    "how many more items are there ?",
                    &[&a.to_string(), &b.to_string()],
                    Some("(- q1 q0)"),
                );
                let mut t = ScoreTable::zeros(2);
                t.set_pair(0, 1, LcaLabel::Minus, 2.0);
                t.set_pair(0, 1, LcaLabel::MinusReverse, 1.0);
                (p, t)
            } else {
                let p = synthetic_problem(
                    &format!("frac-{k}"),
                    "how many items are there ?",
                    &[&(2 * a + 1).to_string(), "2"],
                    Some("(* q0 q1)"),
                );
                let mut t = ScoreTable::zeros(2);
                t.set_pair(0, 1, LcaLabel::Div, 2.0);
                t.set_pair(0, 1, LcaLabel::Times, 1.0);
                (p, t)
            }
        })
        .collect()
}

fn constraint_efficacy() -> Outcome {
    let set = constraint_problems();
    let accuracy = |config: &InferenceConfig| {
        set.iter()
            .filter(|(p, t)| {
                let table = t.clone();
                let scorer = move |_: &Problem| table.clone();
                solve(p, &scorer, config).is_ok_and(|s| s.value == p.answer)
            })
            .count()
    };
    let on = accuracy(&InferenceConfig::default());
    let off = accuracy(&InferenceConfig { constraints: BTreeSet::new(), ..InferenceConfig::default() });
    outcome(on > off, format!("solved with constraints {on}/20, without {off}/20"))
}

fn learned_cv(problems: &[Problem]) -> Outcome {
    match cross_validate(problems, &PipelineConfig::default()) {
        Ok(r) => outcome(
            r.relevance_relax >= 0.9 && r.lca_relax >= 0.8 && r.solve_accuracy >= 0.8,
            format!(
                "relevance relax {:.3} (>= 0.9), lca relax {:.3} (>= 0.8), solve {:.3} (>= 0.8); strict {:.3}/{:.3}",
                r.relevance_relax, r.lca_relax, r.solve_accuracy, r.relevance_strict, r.lca_strict
            ),
        ),
        Err(e) => outcome(false, format!("error: {e}")),
    }
}

fn beam_monotonicity(problems: &[Problem]) -> Outcome {
    let scorer = match train_models(problems, &PipelineConfig::default()) {
        Ok(s) => s,
        Err(e) => return outcome(false, format!("training failed: {e}")),
    };
    let wide = InferenceConfig { beam_width: 200, ..InferenceConfig::default() };
    let narrow = InferenceConfig { beam_width: 5, ..InferenceConfig::default() };
    let sample = &problems[..50.min(problems.len())];
    let violations: Vec<&str> = sample
        .par_iter()
        .filter(|p| {
            let top = |c: &InferenceConfig| beam_search(p, &scorer, c).ok().and_then(|b| b.first().map(|x| x.score));
            match (top(&wide), top(&narrow)) {
                (Some(w), Some(n)) => w < n,
                _ => true,
            }
        })
        .map(|p| p.id.as_str())
        .collect();
    outcome(
        sample.len() == 50 && violations.is_empty(),
        format!("{} problems, violations {violations:?}", sample.len()),
    )
}

/// Optional external dataset named by MONOTREE_DATASET.
fn dataset_report() -> Outcome {
    let Ok(path) = std::env::var("MONOTREE_DATASET") else {
        return outcome(true, "skipped (set MONOTREE_DATASET to a corpus file)");
    };
    let problems = match load_corpus(&path, false) {
        Ok(c) => c.problems,
        Err(e) => return outcome(false, format!("{path}: {e}")),
    };
    match cross_validate(&problems, &PipelineConfig::default()) {
        Ok(r) => outcome(
            true,
            format!(
                "{path}: {} problems, relevance {:.3}/{:.3}, lca {:.3}/{:.3}, solve {:.3}, labels {:?}",
                problems.len(),
                r.relevance_relax,
                r.relevance_strict,
                r.lca_relax,
                r.lca_strict,
                r.solve_accuracy,
                label_histogram(&problems)
            ),
        ),
        Err(e) => outcome(false, format!("{path}: {e}")),
    }
}

fn run(name: &str, budget: Duration, check: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = check();
    let took = start.elapsed();
    let pass = o.pass && took <= budget;
    println!(
        "[{}] {name}: {} ({:.1}s, budget {}s)",
        if pass { "PASS" } else { "FAIL" },
        o.detail,
        took.as_secs_f64(),
        budget.as_secs()
    );
    pass
}

fn main() -> ExitCode {
    let mini = fixtures::mini_corpus();
    let instances = instance_set();
    let results = [
        run("monotonize is monotone and value-preserving", Duration::from_secs(60), monotonize_preserves_value),
        run("lca labels are unique across rewrites", Duration::from_secs(300), || lca_uniqueness(&instances)),
        run("root chain kind and terms are invariant", Duration::from_secs(300), || chain_invariance(&instances)),
        run("oracle inference reproduces gold", Duration::from_secs(30), || oracle_equivalence(&mini)),
        run("constraints strictly improve accuracy", Duration::from_secs(60), constraint_efficacy),
        run("learned 3-fold cross-validation", Duration::from_secs(300), || learned_cv(&mini)),
        run("wider beam never scores lower", Duration::from_secs(120), || beam_monotonicity(&mini)),
        run("external dataset report", Duration::from_secs(3600), dataset_report),
    ];
    let passed = results.iter().filter(|p| **p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
