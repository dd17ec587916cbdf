//! One-vs-all linear classifiers trained with hinge-loss SGD, and their text
//! model format.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::FeatureVector;

pub const MODEL_HEADER: &str = "monotree-model v1";
pub const IRRELEVANT: &str = "IRRELEVANT";
pub const RELEVANT: &str = "RELEVANT";
const BIAS_KEY: &str = "<bias>";

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("class {0} has no training examples")]
    EmptyClass(String),
    #[error("example labelled {0}, which is not a requested class")]
    UnrequestedLabel(String),
    #[error("model has no class {0}")]
    UnknownLabel(String),
    #[error("model file has header {0:?}, expected {MODEL_HEADER:?}")]
    VersionMismatch(String),
    #[error("model file line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("model io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainerConfig {
    pub epochs: usize,
    /// Step size at epoch `t` (1-based) is `learning_rate / t`.
    pub learning_rate: f64,
    pub regularization: f64,
    pub seed: u64,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        TrainerConfig { epochs: 50, learning_rate: 0.1, regularization: 1e-4, seed: 13 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub classes: Vec<String>,
    /// One sparse weight map per class, aligned with `classes`.
    pub weights: Vec<BTreeMap<String, f64>>,
    pub bias: Vec<f64>,
    pub config: TrainerConfig,
}

impl LinearModel {
    /// A model with the given classes and all-zero parameters.
    pub fn zero(classes: &[&str], config: TrainerConfig) -> Self {
        LinearModel {
            classes: classes.iter().map(|c| c.to_string()).collect(),
            weights: vec![BTreeMap::new(); classes.len()],
            bias: vec![0.0; classes.len()],
            config,
        }
    }

    pub fn class_index(&self, label: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == label)
    }

    fn margin_at(&self, c: usize, fv: &FeatureVector) -> f64 {
        let w = &self.weights[c];
        fv.iter().map(|(k, v)| w.get(k).map_or(0.0, |x| x * v)).sum::<f64>() + self.bias[c]
    }

    /// Raw margin of `label`.
    pub fn margin(&self, fv: &FeatureVector, label: &str) -> Result<f64, LearnError> {
        let c = self.class_index(label).ok_or_else(|| LearnError::UnknownLabel(label.to_string()))?;
        Ok(self.margin_at(c, fv))
    }

    pub fn margins(&self, fv: &FeatureVector) -> Vec<f64> {
        (0..self.classes.len()).map(|c| self.margin_at(c, fv)).collect()
    }

    /// Highest-margin class; ties go to the earlier class.
    pub fn predict(&self, fv: &FeatureVector) -> &str {
        let m = self.margins(fv);
        let best = (0..m.len()).fold(0, |b, c| if m[c] > m[b] { c } else { b });
        &self.classes[best]
    }

    /// Softmax over the class margins.
    pub fn probabilities(&self, fv: &FeatureVector) -> Vec<f64> {
        let m = self.margins(fv);
        let top = m.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = m.iter().map(|x| (x - top).exp()).collect();
        let z: f64 = e.iter().sum();
        e.into_iter().map(|x| x / z).collect()
    }

    pub fn accuracy(&self, examples: &[(FeatureVector, String)]) -> f64 {
        if examples.is_empty() {
            return 0.0;
        }
        let hits = examples.iter().filter(|(fv, y)| self.predict(fv) == y).count();
        hits as f64 / examples.len() as f64
    }
}

/// Relevance score: IRRELEVANT margin minus RELEVANT margin, so that higher
/// means more likely irrelevant. Missing classes count as zero margin.
pub fn score_rel(model: &LinearModel, fv: &FeatureVector) -> f64 {
    let m = |label| model.margin(fv, label).unwrap_or(0.0);
    m(IRRELEVANT) - m(RELEVANT)
}

pub fn score_pair(model: &LinearModel, fv: &FeatureVector, label: &str) -> Result<f64, LearnError> {
    model.margin(fv, label)
}

/// Trains a one-vs-all model over `classes`. Every class needs at least one
/// example and every example must carry one of the classes.
pub fn train(
    examples: &[(FeatureVector, String)],
    classes: &[&str],
    config: TrainerConfig,
) -> Result<LinearModel, LearnError> {
    for c in classes {
        if !examples.iter().any(|(_, y)| y == c) {
            return Err(LearnError::EmptyClass(c.to_string()));
        }
    }
    // Dense feature ids in name order keep the arithmetic order fixed.
    let mut names: Vec<&str> = examples.iter().flat_map(|(fv, _)| fv.iter().map(|(k, _)| k)).collect();
    names.sort_unstable();
    names.dedup();
    let id: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let mut data: Vec<(Vec<(usize, f64)>, usize)> = Vec::with_capacity(examples.len());
    for (fv, y) in examples {
        let label = classes.iter().position(|c| c == y).ok_or_else(|| LearnError::UnrequestedLabel(y.clone()))?;
        data.push((fv.iter().map(|(k, v)| (id[k], v)).collect(), label));
    }

    let mut model = LinearModel::zero(classes, config);
    for c in 0..classes.len() {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut order: Vec<usize> = (0..data.len()).collect();
        // w = scale * v, so the L2 shrink is O(1) per step.
        let mut v = vec![0.0f64; names.len()];
        let mut scale = 1.0f64;
        let mut b = 0.0f64;
        for epoch in 1..=config.epochs {
            order.shuffle(&mut rng);
            let eta = config.learning_rate / epoch as f64;
            for &k in &order {
                let (x, label) = &data[k];
                let y = if *label == c { 1.0 } else { -1.0 };
                let m = scale * x.iter().map(|&(f, val)| v[f] * val).sum::<f64>() + b;
                scale *= 1.0 - eta * config.regularization;
                if scale < 1e-9 {
                    v.iter_mut().for_each(|w| *w *= scale);
                    scale = 1.0;
                }
                if y * m < 1.0 {
                    for &(f, val) in x {
                        v[f] += eta * y * val / scale;
                    }
                    b += eta * y;
                }
            }
        }
        model.weights[c] =
            names.iter().zip(&v).filter(|(_, w)| **w != 0.0).map(|(n, w)| (n.to_string(), w * scale)).collect();
        model.bias[c] = b;
    }
    Ok(model)
}

/// Versioned text form: a header, the class list, the trainer settings, then
/// one `class\tfeature\tweight` line per parameter.
pub fn model_to_string(model: &LinearModel) -> String {
    let mut out = String::new();
    out.push_str(MODEL_HEADER);
    out.push('\n');
    out.push_str(&format!("classes\t{}\n", model.classes.join("\t")));
    let c = &model.config;
    out.push_str(&format!("config\t{}\t{}\t{}\t{}\n", c.epochs, c.learning_rate, c.regularization, c.seed));
    for (k, class) in model.classes.iter().enumerate() {
        out.push_str(&format!("{class}\t{BIAS_KEY}\t{}\n", model.bias[k]));
        for (f, w) in &model.weights[k] {
            out.push_str(&format!("{class}\t{f}\t{w}\n"));
        }
    }
    out
}

pub fn model_from_str(text: &str) -> Result<LinearModel, LearnError> {
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, l)| l).unwrap_or("");
    if header != MODEL_HEADER {
        return Err(LearnError::VersionMismatch(header.to_string()));
    }
    let bad = |line: usize, msg: &str| LearnError::Format { line: line + 1, msg: msg.to_string() };
    let (n, classes_line) = lines.next().ok_or_else(|| bad(1, "missing class list"))?;
    let classes: Vec<String> = match classes_line.split('\t').collect::<Vec<_>>().as_slice() {
        ["classes", rest @ ..] => rest.iter().map(|s| s.to_string()).collect(),
        _ => return Err(bad(n, "expected class list")),
    };
    let (n, config_line) = lines.next().ok_or_else(|| bad(2, "missing config"))?;
    let config = match config_line.split('\t').collect::<Vec<_>>().as_slice() {
        ["config", e, lr, reg, seed] => TrainerConfig {
            epochs: e.parse().map_err(|_| bad(n, "bad epochs"))?,
            learning_rate: lr.parse().map_err(|_| bad(n, "bad learning rate"))?,
            regularization: reg.parse().map_err(|_| bad(n, "bad regularization"))?,
            seed: seed.parse().map_err(|_| bad(n, "bad seed"))?,
        },
        _ => return Err(bad(n, "expected config")),
    };
    let names: Vec<&str> = classes.iter().map(String::as_str).collect();
    let mut model = LinearModel::zero(&names, config);
    for (n, line) in lines {
        if line.is_empty() {
            continue;
        }
        let [class, feature, weight] = line.split('\t').collect::<Vec<_>>()[..] else {
            return Err(bad(n, "expected class, feature and weight"));
        };
        let c = model.class_index(class).ok_or_else(|| bad(n, "unknown class"))?;
        let w: f64 = weight.parse().map_err(|_| bad(n, "bad weight"))?;
        if feature == BIAS_KEY {
            model.bias[c] = w;
        } else {
            model.weights[c].insert(feature.to_string(), w);
        }
    }
    Ok(model)
}

pub fn save_model(model: &LinearModel, path: impl AsRef<Path>) -> Result<(), LearnError> {
    fs::write(path, model_to_string(model))?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<LinearModel, LearnError> {
    model_from_str(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::derive_labels;
    use crate::features::{FeatureConfig, FeatureContext};
    use crate::fixtures;
    use crate::schema::analyze;
    use proptest::prelude::*;

    fn fv(pairs: &[(&str, f64)]) -> FeatureVector {
        let mut v = FeatureVector::new();
        for (k, x) in pairs {
            v.set(*k, *x);
        }
        v
    }

    fn points() -> Vec<(FeatureVector, String)> {
        vec![
            (fv(&[("x", 1.0), ("y", 2.0)]), "A".into()),
            (fv(&[("x", 2.0), ("y", 1.5)]), "A".into()),
            (fv(&[("x", -1.0), ("y", -2.0)]), "B".into()),
            (fv(&[("x", -2.0), ("y", -0.5)]), "B".into()),
        ]
    }

    fn relevance_examples() -> Vec<(FeatureVector, String)> {
        let mut out = Vec::new();
        for p in fixtures::mini_corpus() {
            let a = analyze(&p).unwrap();
            let labels = derive_labels(&p).unwrap();
            let ctx = FeatureContext::new(&p, &a.schemas, a.question.as_ref(), FeatureConfig::default());
            for q in &p.quantities {
                let y = if labels.relevance[&q.index] { RELEVANT } else { IRRELEVANT };
                out.push((ctx.relevance(q), y.to_string()));
            }
        }
        out
    }

    #[test]
    fn separable_points() {
        let m = train(&points(), &["A", "B"], TrainerConfig::default()).unwrap();
        assert_eq!(m.accuracy(&points()), 1.0);
        for (x, y) in points() {
            let best = ["A", "B"]
                .into_iter()
                .max_by(|a, b| score_pair(&m, &x, a).unwrap().total_cmp(&score_pair(&m, &x, b).unwrap()));
            assert_eq!(best.unwrap(), y);
        }
    }

    #[test]
    fn training_is_deterministic() {
        let a = train(&points(), &["A", "B"], TrainerConfig::default()).unwrap();
        let b = train(&points(), &["A", "B"], TrainerConfig::default()).unwrap();
        assert_eq!(model_to_string(&a), model_to_string(&b));
    }

    #[test]
    fn missing_class_is_an_error() {
        assert!(
            matches!(train(&points(), &["A", "B", "C"], TrainerConfig::default()), Err(LearnError::EmptyClass(c)) if c == "C")
        );
        assert!(matches!(train(&points(), &["A"], TrainerConfig::default()), Err(LearnError::UnrequestedLabel(_))));
    }

    #[test]
    fn zero_model_scores() {
        let m = LinearModel::zero(&[IRRELEVANT, RELEVANT], TrainerConfig::default());
        assert_eq!(score_rel(&m, &fv(&[("a", 1.0)])), 0.0);
        let labels: Vec<&str> = crate::expr::LcaLabel::ALL.iter().map(|l| l.name()).collect();
        let m = LinearModel::zero(&labels, TrainerConfig::default());
        for l in &labels {
            assert_eq!(score_pair(&m, &fv(&[("a", 1.0)]), l).unwrap(), 0.0);
        }
        assert!(matches!(score_pair(&m, &fv(&[]), "NOPE"), Err(LearnError::UnknownLabel(_))));
        let p = m.probabilities(&fv(&[("a", 1.0)]));
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn relevance_sign_convention() {
        let mut m = LinearModel::zero(&[IRRELEVANT, RELEVANT], TrainerConfig::default());
        m.weights[0].insert("d".into(), 2.0);
        assert!(score_rel(&m, &fv(&[("d", 1.0)])) > 0.0);
        // Linear in the vector with zero bias.
        let x = fv(&[("d", 1.5)]);
        assert_eq!(score_rel(&m, &x.scaled(3.0)), 3.0 * score_rel(&m, &x));
    }

    #[test]
    fn trained_softmax_sums_to_one() {
        let m = train(&points(), &["A", "B"], TrainerConfig::default()).unwrap();
        for (x, _) in points() {
            assert!((m.probabilities(&x).iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mini_corpus_relevance_fits() {
        let ex = relevance_examples();
        let m = train(&ex, &[IRRELEVANT, RELEVANT], TrainerConfig::default()).unwrap();
        assert!(m.accuracy(&ex) >= 0.95, "{}", m.accuracy(&ex));
        let p = fixtures::apple_pile_problem();
        let a = analyze(&p).unwrap();
        let ctx = FeatureContext::new(&p, &a.schemas, a.question.as_ref(), FeatureConfig::default());
        assert!(score_rel(&m, &ctx.relevance(&p.quantities[1])) > score_rel(&m, &ctx.relevance(&p.quantities[0])));
    }

    #[test]
    fn duplicating_examples_keeps_separation() {
        let mut doubled = points();
        doubled.extend(points());
        let m = train(&doubled, &["A", "B"], TrainerConfig::default()).unwrap();
        assert_eq!(m.accuracy(&points()), 1.0);
    }

    #[test]
    fn bad_model_files() {
        assert!(matches!(model_from_str("monotree-model v9\n"), Err(LearnError::VersionMismatch(_))));
        assert!(matches!(model_from_str(""), Err(LearnError::VersionMismatch(_))));
        let bad = format!("{MODEL_HEADER}\nclasses\tA\nconfig\t1\t0.1\t0.1\t1\nB\tx\t1\n");
        assert!(matches!(model_from_str(&bad), Err(LearnError::Format { line: 4, .. })));
    }

    #[test]
    fn file_round_trip() {
        let m = train(&relevance_examples(), &[IRRELEVANT, RELEVANT], TrainerConfig::default()).unwrap();
        let dir = std::env::temp_dir().join(format!("monotree-learn-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("rel.model");
        save_model(&m, &path).unwrap();
        assert_eq!(load_model(&path).unwrap(), m);
        fs::remove_dir_all(dir).ok();
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn round_trip_preserves_scores(values in proptest::collection::vec(-5.0f64..5.0, 6)) {
            let m = train(&points(), &["A", "B"], TrainerConfig::default()).unwrap();
            let again = model_from_str(&model_to_string(&m)).unwrap();
            let names = ["x", "y", "z", "x&y", "w", "q"];
            let v = fv(&names.iter().copied().zip(values.iter().copied()).collect::<Vec<_>>());
            for c in ["A", "B"] {
                prop_assert_eq!(m.margin(&v, c).unwrap().to_bits(), again.margin(&v, c).unwrap().to_bits());
            }
        }
    }
}
