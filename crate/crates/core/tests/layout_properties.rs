use docmine::chunker::{chunk_page, ChunkParams};
use docmine::ingest::{parse_rich_xml, write_rich_xml};
use docmine::model::{Document, Line, Page, Token};
use docmine::synth::{generate_document, Style};
use proptest::prelude::*;

fn token(text: &str, x: f64, y: f64, font: f64, bold: bool) -> Token {
    Token {
        text: text.into(),
        page_no: 1,
        x,
        y,
        width: text.len() as f64 * font * 0.5,
        height: font,
        font_size: font,
        bold,
        italic: false,
        font_name: "Times".into(),
        sup_flag: false,
    }
}

/// Lines of (word count, vertical gap before, font, bold).
fn page(lines: &[(usize, f64, f64, bool)]) -> Page {
    let mut y = 72.0;
    let built = lines
        .iter()
        .enumerate()
        .map(|(i, &(n, gap, font, bold))| {
            y += gap;
            let tokens = (0..n).map(|k| token(&format!("w{i}x{k}&<"), 72.0 + k as f64 * 40.0, y, font, bold)).collect();
            Line::new(tokens)
        })
        .collect();
    Page::new(1, 612.0, 792.0, built)
}

fn lines() -> impl Strategy<Value = Vec<(usize, f64, f64, bool)>> {
    prop::collection::vec((1usize..8, 11.0f64..40.0, prop::sample::select(vec![9.0, 10.0, 12.0]), any::<bool>()), 0..30)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn rich_xml_round_trips(spec in lines()) {
        let doc = Document { source_id: String::new(), pages: vec![page(&spec)] };
        let (back, report) = parse_rich_xml(write_rich_xml(&doc).as_bytes()).unwrap();
        prop_assert_eq!(report.token_count, doc.token_count());
        let texts = |d: &Document| d.pages.iter().flat_map(|p| p.tokens().map(|t| (t.text.clone(), t.x, t.y, t.font_size, t.bold))).collect::<Vec<_>>();
        prop_assert_eq!(texts(&back), texts(&doc));
    }

    #[test]
    fn chunks_partition_the_page(spec in lines(), gap_factor in 1.1f64..4.0) {
        let p = page(&spec);
        let chunks = chunk_page(&p, &ChunkParams { gap_factor, ..Default::default() });
        let from_chunks: Vec<&Token> = chunks.iter().flat_map(|c| &c.tokens).collect();
        let stream: Vec<&Token> = p.tokens().collect();
        prop_assert_eq!(from_chunks, stream);
        prop_assert!(chunks.iter().all(|c| !c.tokens.is_empty()));
    }

    #[test]
    fn raising_gap_factor_never_adds_chunks(spec in lines(), a in 1.1f64..4.0, b in 1.1f64..4.0) {
        let p = page(&spec);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let count = |g: f64| chunk_page(&p, &ChunkParams { gap_factor: g, font_jump: 0.99, boldness_break: false }).len();
        prop_assert!(count(hi) <= count(lo));
    }
}

#[test]
fn synthetic_documents_round_trip_through_the_writer() {
    for (i, style) in Style::ALL.into_iter().enumerate() {
        let d = generate_document(style, 100 + i as u64);
        let (doc, _) = parse_rich_xml(d.xml.as_bytes()).unwrap();
        let again = write_rich_xml(&doc);
        let (doc2, _) = parse_rich_xml(again.as_bytes()).unwrap();
        assert_eq!(doc, doc2);
    }
}
