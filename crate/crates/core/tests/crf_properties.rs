use docmine::crf::{load_model, save_model, Crf, FeatureKind, FeatureTemplate, FeatureVector, LabeledSequence};
use proptest::prelude::*;

const FEATURES: [&str; 6] = ["f=0", "f=1", "f=2", "f=3", "g=a", "g=b"];

fn model(n_labels: usize, weights: &[f64]) -> Crf<f64> {
    let labels = (0..n_labels).map(|i| format!("L{i}")).collect();
    let templates = vec![FeatureTemplate::new("f", FeatureKind::Categorical, "f"), FeatureTemplate::new("g", FeatureKind::Categorical, "g")];
    let mut m = Crf::new("test", labels, templates, FEATURES.iter().map(|s| s.to_string()).collect()).unwrap();
    let n = m.num_params();
    m.set_params(&weights[..n]).unwrap();
    m
}

fn sequence(picks: &[(usize, bool)]) -> Vec<FeatureVector> {
    picks
        .iter()
        .map(|&(f, g)| vec![FEATURES[f % 4].to_string(), if g { "g=a" } else { "g=b" }.to_string()])
        .collect()
}

fn all_paths(n: usize, l: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|p| (0..l).map(move |y| [p.clone(), vec![y]].concat())).collect();
    }
    out
}

fn names(m: &Crf<f64>, path: &[usize]) -> Vec<String> {
    path.iter().map(|&i| m.labels()[i].clone()).collect()
}

fn instance() -> impl Strategy<Value = (usize, Vec<f64>, Vec<(usize, bool)>)> {
    (2usize..=4, prop::collection::vec(-3.0f64..3.0, 6 * 4 + 16), prop::collection::vec((0usize..4, any::<bool>()), 1..=6))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn viterbi_matches_brute_force((l, w, picks) in instance()) {
        let m = model(l, &w);
        let seq = sequence(&picks);
        let best = m.viterbi_decode(&seq).unwrap();
        let best_refs: Vec<&str> = best.iter().map(String::as_str).collect();
        let best_score = m.score(&seq, &best_refs).unwrap();
        let max = all_paths(seq.len(), l)
            .iter()
            .map(|p| {
                let n = names(&m, p);
                m.score(&seq, &n.iter().map(String::as_str).collect::<Vec<_>>()).unwrap()
            })
            .fold(f64::MIN, f64::max);
        prop_assert!((best_score - max).abs() < 1e-9);
    }

    #[test]
    fn marginals_sum_to_one((l, w, picks) in instance()) {
        let m = model(l, &w);
        for row in m.marginals(&sequence(&picks)).unwrap() {
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn path_probabilities_sum_to_one((l, w, picks) in instance()) {
        let m = model(l, &w);
        let seq = sequence(&picks);
        let total: f64 = all_paths(seq.len(), l)
            .iter()
            .map(|p| {
                let n = names(&m, p);
                m.log_probability(&seq, &n.iter().map(String::as_str).collect::<Vec<_>>()).unwrap().exp()
            })
            .sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn constant_unary_shift_keeps_argmax((l, w, picks) in instance(), c in -5.0f64..5.0) {
        let m = model(l, &w);
        let seq = sequence(&picks);
        let mut shifted = m.clone();
        // "g" features fire once per position, so shifting one of them for
        // every label shifts every path by the same amount per position
        for label in m.labels() {
            let old = m.unary_weight("g=a", label).unwrap();
            shifted.set_unary_weight("g=a", label, old + c).unwrap();
        }
        prop_assert_eq!(m.viterbi_decode(&seq).unwrap(), shifted.viterbi_decode(&seq).unwrap());
        let path: Vec<String> = m.viterbi_decode(&seq).unwrap();
        let refs: Vec<&str> = path.iter().map(String::as_str).collect();
        let hits = picks.iter().filter(|(_, g)| *g).count() as f64;
        let diff = shifted.score(&seq, &refs).unwrap() - m.score(&seq, &refs).unwrap();
        prop_assert!((diff - c * hits).abs() < 1e-9);
    }

    #[test]
    fn gradient_matches_finite_differences((l, w, picks) in instance(), gold in prop::collection::vec(0usize..4, 6)) {
        let m = model(l, &w);
        let seq = sequence(&picks);
        let labels: Vec<String> = (0..seq.len()).map(|i| m.labels()[gold[i] % l].clone()).collect();
        let data = vec![LabeledSequence::new(seq, labels)];
        let (_, grad) = m.log_likelihood_and_gradient(&data, 0.5).unwrap();
        let params = m.params();
        let h = 1e-5;
        for k in 0..params.len() {
            let at = |d: f64| {
                let mut p = params.clone();
                p[k] += d;
                let mut mm = m.clone();
                mm.set_params(&p).unwrap();
                mm.log_likelihood_and_gradient(&data, 0.5).unwrap().0
            };
            let numeric = (at(h) - at(-h)) / (2.0 * h);
            let rel = (numeric - grad[k]).abs() / numeric.abs().max(grad[k].abs()).max(1e-3);
            prop_assert!(rel < 1e-4, "param {k}: analytic {} numeric {numeric}", grad[k]);
        }
    }

    #[test]
    fn save_load_round_trip((l, w, _picks) in instance()) {
        let m = model(l, &w);
        prop_assert_eq!(load_model::<f64>(&save_model(&m)).unwrap(), m);
    }
}
