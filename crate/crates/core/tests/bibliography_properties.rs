use docmine::bibliography::{extract_citations, map_citations_to_references, split_references, LinkMethod, RefLine};
use proptest::prelude::*;

fn fragment() -> impl Strategy<Value = String> {
    prop::sample::select(vec![
        "Kumar et al. [12]",
        "Lopez [3]",
        "Singh et al.[4]",
        "(Lopez, 2009)",
        "Lopez et al., 2009a",
        "Lopez et al. (2010)",
        "Lopez and Romary (2015)",
        "Lopez & Romary, 2015",
        "Lopez 2009",
        "Lopez, (2009b)",
        "[1, 5, 7]",
        "[2]",
        "we",
        "showed that",
        "the",
        "In 2012",
        "Table 3",
        "results",
    ])
    .prop_map(String::from)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn citations_are_sorted_and_disjoint(parts in prop::collection::vec(fragment(), 0..20)) {
        let text = parts.join(" ");
        let found = extract_citations(&text);
        for w in found.windows(2) {
            prop_assert!(w[0].char_span.1 <= w[1].char_span.0);
        }
        for c in &found {
            prop_assert_eq!(&text[c.char_span.0..c.char_span.1], c.matched_text.as_str());
            prop_assert!((1..=16).contains(&c.style_id));
            if c.is_indexed() {
                prop_assert!(!c.indices.is_empty());
            } else {
                prop_assert!(c.year.is_some());
            }
        }
    }

    #[test]
    fn index_links_point_at_cited_numbers(parts in prop::collection::vec(fragment(), 0..20), n in 1usize..10) {
        let refs = split_references(&(1..=n).map(|i| RefLine { text: format!("[{i}] A. Author. Title. 2001."), x: 72.0 }).collect::<Vec<_>>());
        let cites = extract_citations(&parts.join(" "));
        for l in map_citations_to_references(&cites, &refs) {
            if l.method == LinkMethod::Index {
                let r = &refs[l.reference.unwrap()];
                prop_assert!(cites[l.citation].indices.contains(&r.index.unwrap()));
            }
        }
    }

    #[test]
    fn splitting_keeps_all_text(words in prop::collection::vec(prop::sample::select(vec!["Smith", "J.", "2004.", "Parsing", "[1]", "[2]", "3.", "of", "text"]), 1..40), indents in prop::collection::vec(any::<bool>(), 40)) {
        let lines: Vec<RefLine> = words
            .chunks(4)
            .zip(&indents)
            .map(|(w, &ind)| RefLine { text: w.join(" "), x: if ind { 84.0 } else { 72.0 } })
            .collect();
        let refs = split_references(&lines);
        let norm = |s: &str| s.split_whitespace().collect::<Vec<_>>().join(" ");
        let joined = refs.iter().map(|r| r.raw_text.as_str()).collect::<Vec<_>>().join(" ");
        let input = lines.iter().map(|l| l.text.as_str()).collect::<Vec<_>>().join(" ");
        prop_assert_eq!(norm(&joined), norm(&input));
    }
}
