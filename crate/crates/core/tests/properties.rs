use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use monotree::corpus::parse_problem;
use monotree::expr::{canonicalize, is_monotonic, lca_map, monotonize, random_tree, ExprTree};
use monotree::fixtures;
use monotree::infer::{beam_search, InferenceConfig, ScoreTable};
use monotree::rational::from_int;

fn tree_from(seed: u64, leaves: usize) -> ExprTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_tree(&mut rng, &(0..leaves).collect::<Vec<_>>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn monotonize_is_idempotent(seed in any::<u64>(), leaves in 1usize..=6) {
        let m = monotonize(&tree_from(seed, leaves));
        prop_assert!(is_monotonic(&m));
        prop_assert_eq!(monotonize(&m), m);
    }

    #[test]
    fn canonical_form_keeps_labels_and_value(seed in any::<u64>(), leaves in 2usize..=6) {
        let m = monotonize(&tree_from(seed, leaves));
        let c = canonicalize(&m);
        prop_assert_eq!(lca_map(&c), lca_map(&m));
        let values: Vec<_> = (0..leaves).map(|k| from_int(2 * k as i64 + 3)).collect();
        prop_assert_eq!(c.evaluate(&values).ok(), m.evaluate(&values).ok());
    }

    #[test]
    fn prefix_text_round_trips(seed in any::<u64>(), leaves in 1usize..=6) {
        let t = tree_from(seed, leaves);
        prop_assert_eq!(t.to_string().parse::<ExprTree>().unwrap(), t);
    }

    #[test]
    fn beam_output_is_sorted_and_monotone(scores in proptest::collection::vec(-3.0f64..3.0, 6 * 6 + 4), width in 1usize..30) {
        let p = fixtures::bookcase_problem();
        let mut table = ScoreTable::zeros(4);
        table.rel = scores[..4].to_vec();
        let mut k = 4;
        for i in 0..4 {
            for j in i + 1..4 {
                for l in monotree::expr::LcaLabel::ALL {
                    table.set_pair(i, j, l, scores[k % scores.len()]);
                    k += 1;
                }
            }
        }
        let scorer = move |_: &monotree::corpus::Problem| table.clone();
        let beam = beam_search(&p, &scorer, &InferenceConfig { beam_width: width, ..InferenceConfig::default() }).unwrap();
        prop_assert!(!beam.is_empty());
        prop_assert!(beam.windows(2).all(|w| w[0].score >= w[1].score));
        prop_assert!(beam.iter().all(|c| is_monotonic(&c.tree) && c.tree.leaf_count() >= 2));
    }
}

#[test]
fn bundled_records_round_trip() {
    for p in fixtures::mini_corpus().into_iter().chain(fixtures::verb_only_corpus()) {
        assert_eq!(parse_problem(&p.to_json_line()).unwrap(), p);
    }
}
