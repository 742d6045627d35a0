use docmine::eval::{micro_average, token_score, TokenMetrics};
use proptest::prelude::*;

fn text() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(vec!["a", "B", "c", "d", "e"]), 0..12).prop_map(|w| w.join(" "))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn precision_and_recall_swap(a in text(), b in text()) {
        let ab: TokenMetrics = token_score(&a, &b);
        let ba: TokenMetrics = token_score(&b, &a);
        prop_assert_eq!(ab.precision, ba.recall);
        prop_assert_eq!(ab.recall, ba.precision);
        prop_assert_eq!(ab.f_score, ba.f_score);
    }

    #[test]
    fn micro_average_is_additive(raw in prop::collection::vec((text(), text()), 1..6)) {
        // tokens are tagged per document so no match can cross documents
        let tag = |i: usize, s: &str| s.split_whitespace().map(|w| format!("{w}{i}")).collect::<Vec<_>>().join(" ");
        let pairs: Vec<(String, String)> = raw.iter().enumerate().map(|(i, (p, g))| (tag(i, p), tag(i, g))).collect();
        let per_doc: Vec<TokenMetrics> = pairs.iter().map(|(p, g)| token_score(p, g)).collect();
        let joined_p = pairs.iter().map(|(p, _)| p.as_str()).collect::<Vec<_>>().join(" ");
        let joined_g = pairs.iter().map(|(_, g)| g.as_str()).collect::<Vec<_>>().join(" ");
        let whole: TokenMetrics = token_score(&joined_p, &joined_g);
        let avg = micro_average(&per_doc);
        prop_assert_eq!((avg.tp, avg.fp, avg.fn_), (whole.tp, whole.fp, whole.fn_));
        prop_assert!((avg.f_score - whole.f_score).abs() < 1e-12);
    }

    #[test]
    fn metrics_stay_in_unit_range(a in text(), b in text()) {
        let m: TokenMetrics = token_score(&a, &b);
        for v in [m.precision, m.recall, m.f_score] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }
}
