//! Section headings and section bodies, URLs, footnotes, and figure and
//! table captions.

use once_cell::sync::Lazy;
use regex::Regex;

use crate::crf::{Crf, CrfError};
use crate::features::{body_font_size, footnote_features, heading_features, parse_enumeration, Enumeration, FOOTNOTE, HEADING};
use crate::model::{join_tokens, median, Chunk, Document, Token};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct SectionHeading {
    pub text: String,
    pub enumeration: Option<Enumeration>,
    pub chunk_index: usize,
    pub level: usize,
}

impl SectionHeading {
    pub fn from_chunk(chunk: &Chunk, chunk_index: usize) -> Self {
        let text = chunk.plain_text();
        let enumeration = text.split_whitespace().next().and_then(parse_enumeration);
        let level = enumeration.as_ref().map_or(1, |e| e.depth.max(1));
        SectionHeading { text, enumeration, chunk_index, level }
    }

    /// Heading text without its enumeration.
    pub fn title(&self) -> &str {
        if self.enumeration.is_some() {
            self.text.split_once(' ').map_or("", |(_, rest)| rest.trim())
        } else {
            &self.text
        }
    }
}

/// A heading and the chunks up to the next heading. Chunks before the first
/// heading form a section without a heading.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub heading: Option<SectionHeading>,
    /// Indices into the document's chunk list, ascending.
    pub body_chunks: Vec<usize>,
}

impl Section {
    /// Body text, one chunk per line, superscripts excluded.
    pub fn text(&self, chunks: &[Chunk]) -> String {
        self.body_chunks.iter().map(|&i| chunks[i].plain_text()).collect::<Vec<_>>().join("\n")
    }
}

pub fn label_headings<T: Scalar>(chunks: &[Chunk], model: &Crf<T>) -> Result<Vec<SectionHeading>, CrfError> {
    if chunks.is_empty() {
        return Ok(Vec::new());
    }
    let body = body_font_size(chunks);
    let features: Vec<_> = chunks.iter().map(|c| heading_features(c, body)).collect();
    let labels = model.viterbi_decode(&features)?;
    Ok(labels
        .iter()
        .enumerate()
        .filter(|(_, l)| *l == HEADING)
        .map(|(i, _)| SectionHeading::from_chunk(&chunks[i], i))
        .collect())
}

/// Assigns every non-heading chunk to the section of the closest preceding
/// heading.
pub fn map_sections(chunk_count: usize, headings: &[SectionHeading]) -> Vec<Section> {
    let mut sections = Vec::new();
    let first = headings.first().map_or(chunk_count, |h| h.chunk_index.min(chunk_count));
    if first > 0 || headings.is_empty() {
        sections.push(Section { heading: None, body_chunks: (0..first).collect() });
    }
    for (i, h) in headings.iter().enumerate() {
        let end = headings.get(i + 1).map_or(chunk_count, |n| n.chunk_index).min(chunk_count);
        let start = (h.chunk_index + 1).min(end);
        sections.push(Section { heading: Some(h.clone()), body_chunks: (start..end).collect() });
    }
    sections
}

/// Scheme, then one or more URL characters or percent escapes. The `$-_`
/// range covers digits, upper case letters and most URL punctuation.
pub const URL_PATTERN: &str = r"https?://(?:[a-zA-Z]|[0-9]|[$-_@.&+]|[!*\(\),]|(?:%[0-9a-fA-F][0-9a-fA-F]))+";

static URL: Lazy<Regex> = Lazy::new(|| Regex::new(URL_PATTERN).unwrap());

fn trim_url(mut url: &str) -> &str {
    loop {
        let before = url.len();
        url = url.trim_end_matches(['.', ',', ';', ':']);
        for (open, close) in [('(', ')'), ('[', ']')] {
            if url.ends_with(close) && url.matches(close).count() > url.matches(open).count() {
                url = &url[..url.len() - 1];
            }
        }
        if url.len() == before {
            return url;
        }
    }
}

pub fn extract_urls(text: &str) -> Vec<String> {
    URL.find_iter(text)
        .map(|m| trim_url(m.as_str()))
        .filter(|u| u.len() > u.find("://").unwrap_or(0) + 3)
        .map(String::from)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Footnote {
    pub marker: Option<String>,
    pub text: String,
    pub page_no: u32,
    pub chunk_index: usize,
}

/// Top of the chunk lies in the lower half of the page.
pub fn in_lower_half(chunk: &Chunk, page_height: f64) -> bool {
    chunk.bbox.y_min > page_height / 2.0
}

fn leading_marker(tokens: &[Token]) -> Option<(String, usize)> {
    let first = tokens.first()?;
    if first.sup_flag {
        return Some((first.text.clone(), 1));
    }
    let short_symbol = first.text.chars().count() <= 2 && first.text.chars().all(|c| !c.is_alphanumeric());
    short_symbol.then(|| (first.text.clone(), 1))
}

/// Splits a footnote chunk at lines that open with a superscript marker.
pub fn split_footnotes(chunk: &Chunk, chunk_index: usize) -> Vec<Footnote> {
    let mut groups: Vec<Vec<&Token>> = Vec::new();
    for line in chunk.lines() {
        let opens = line.first().is_some_and(|t| t.sup_flag);
        if opens || groups.is_empty() {
            groups.push(Vec::new());
        }
        groups.last_mut().unwrap().extend(line);
    }
    groups
        .into_iter()
        .map(|g| {
            let owned: Vec<Token> = g.into_iter().cloned().collect();
            let (marker, skip) = leading_marker(&owned).map_or((None, 0), |(m, n)| (Some(m), n));
            Footnote {
                marker,
                text: join_tokens(owned[skip..].iter().filter(|t| !t.sup_flag)),
                page_no: chunk.page_no,
                chunk_index,
            }
        })
        .filter(|f| !f.text.is_empty())
        .collect()
}

pub fn extract_footnotes<T: Scalar>(doc: &Document, chunks: &[Chunk], model: &Crf<T>) -> Result<Vec<Footnote>, CrfError> {
    let mut out = Vec::new();
    for page in &doc.pages {
        let idx: Vec<usize> = (0..chunks.len()).filter(|&i| chunks[i].page_no == page.number).collect();
        if idx.is_empty() {
            continue;
        }
        let page_font = median(page.tokens().filter(|t| !t.sup_flag).map(|t| t.font_size).collect()).unwrap_or(10.0);
        let features: Vec<_> = idx.iter().map(|&i| footnote_features(&chunks[i], page.height, page_font)).collect();
        let labels = model.viterbi_decode(&features)?;
        for (&i, label) in idx.iter().zip(&labels) {
            if label == FOOTNOTE && in_lower_half(&chunks[i], page.height) {
                out.extend(split_footnotes(&chunks[i], i));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaptionKind {
    Figure,
    Table,
}

impl CaptionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CaptionKind::Figure => "figure",
            CaptionKind::Table => "table",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaptionHeading {
    pub kind: CaptionKind,
    /// Keyword and number, e.g. `Figure 2`.
    pub label: String,
    pub text: String,
    pub chunk_index: usize,
}

pub const FIGURE_KEYWORDS: [&str; 4] = ["FIGURE", "Figure", "FIG.", "Fig."];
pub const TABLE_KEYWORDS: [&str; 2] = ["Table", "TABLE"];

/// Caption for a chunk that opens with a figure or table keyword.
pub fn caption_heading(chunk: &Chunk, chunk_index: usize) -> Option<CaptionHeading> {
    let words: Vec<&Token> = chunk.tokens.iter().filter(|t| !t.sup_flag).collect();
    let first = words.first()?.text.as_str();
    let kind = if FIGURE_KEYWORDS.contains(&first) {
        CaptionKind::Figure
    } else if TABLE_KEYWORDS.contains(&first) {
        CaptionKind::Table
    } else {
        return None;
    };
    let label = match words.get(1) {
        Some(t) => format!("{first} {}", t.text.trim_end_matches([':', '.'])),
        None => first.to_string(),
    };
    let mixed = words.iter().any(|t| t.bold) && words.iter().any(|t| !t.bold);
    let text = if kind == CaptionKind::Table && mixed && words[0].bold {
        join_tokens(words.iter().copied().take_while(|t| t.bold))
    } else {
        join_tokens(words.iter().copied())
    };
    Some(CaptionHeading { kind, label, text, chunk_index })
}

pub fn extract_caption_headings(chunks: &[Chunk]) -> Vec<CaptionHeading> {
    chunks.iter().enumerate().filter_map(|(i, c)| caption_heading(c, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::EnumKind;
    use crate::model::testutil::tok;

    fn chunk(words: &[(&str, bool)], y: f64, font: f64) -> Chunk {
        let mut x = 72.0;
        let tokens = words
            .iter()
            .map(|(w, b)| {
                let t = tok(w, x, y, font, *b);
                x += t.width + 3.0;
                t
            })
            .collect();
        Chunk::new(tokens, vec![0]).unwrap()
    }

    fn plain(text: &str) -> Chunk {
        let words: Vec<(&str, bool)> = text.split(' ').map(|w| (w, false)).collect();
        chunk(&words, 100.0, 10.0)
    }

    #[test]
    fn heading_levels() {
        let h = SectionHeading::from_chunk(&plain("2 Framework overview"), 3);
        assert_eq!(h.enumeration.as_ref().unwrap().kind, EnumKind::Arabic);
        assert_eq!((h.level, h.title()), (1, "Framework overview"));
        assert_eq!(SectionHeading::from_chunk(&plain("2.1 Chunking"), 0).level, 2);
        let h = SectionHeading::from_chunk(&plain("Conclusions"), 0);
        assert_eq!((h.level, h.enumeration.is_none(), h.title()), (1, true, "Conclusions"));
    }

    fn heading_at(i: usize) -> SectionHeading {
        SectionHeading { text: "H".into(), enumeration: None, chunk_index: i, level: 1 }
    }

    #[test]
    fn section_mapping() {
        let s = map_sections(6, &[heading_at(1), heading_at(5)]);
        assert_eq!(s.len(), 3);
        assert_eq!(s[0].body_chunks, vec![0]);
        assert_eq!(s[1].body_chunks, vec![2, 3, 4]);
        assert!(s[2].body_chunks.is_empty());
        let s = map_sections(3, &[]);
        assert_eq!((s.len(), s[0].heading.is_none(), s[0].body_chunks.len()), (1, true, 3));
        let s = map_sections(4, &[heading_at(0), heading_at(1)]);
        assert_eq!(s.len(), 2);
        assert!(s[0].body_chunks.is_empty());
    }

    #[test]
    fn urls() {
        assert_eq!(extract_urls("see http://scholar.google.com for"), ["http://scholar.google.com"]);
        let u = "https://data.epo.org/publication-server/?lg=en";
        assert_eq!(extract_urls(u), [u]);
        assert!(extract_urls("no links here").is_empty());
        assert_eq!(extract_urls("(at http://x.org/a_(b)) and http://y.org."), ["http://x.org/a_(b)", "http://y.org"]);
        assert_eq!(extract_urls("http://a.org/%20x,"), ["http://a.org/%20x"]);
    }

    #[test]
    fn footnote_splitting() {
        let mut sup = tok("1", 72.0, 700.0, 6.0, false);
        sup.sup_flag = true;
        let mut sup2 = tok("2", 72.0, 712.0, 6.0, false);
        sup2.sup_flag = true;
        let tokens = vec![
            sup,
            tok("http://www.citeulike.org/", 76.0, 702.0, 8.0, false),
            sup2,
            tok("Second", 76.0, 714.0, 8.0, false),
            tok("note", 110.0, 714.0, 8.0, false),
        ];
        let c = Chunk::new(tokens, vec![0, 2]).unwrap();
        let f = split_footnotes(&c, 7);
        assert_eq!(f.len(), 2);
        assert_eq!((f[0].marker.as_deref(), f[0].text.as_str()), (Some("1"), "http://www.citeulike.org/"));
        assert_eq!((f[1].marker.as_deref(), f[1].text.as_str(), f[1].chunk_index), (Some("2"), "Second note", 7));
        assert!(in_lower_half(&c, 792.0));
        assert!(!in_lower_half(&plain("top"), 792.0));
    }

    #[test]
    fn captions() {
        let c = plain("Figure 2: Screenshot of pdf2xml tool output.");
        let h = caption_heading(&c, 0).unwrap();
        assert_eq!((h.kind, h.label.as_str(), h.text.as_str()), (CaptionKind::Figure, "Figure 2", "Figure 2: Screenshot of pdf2xml tool output."));
        let t = chunk(&[("Table", true), ("1:", true), ("Generic", true), ("set", true), ("AN", false), ("et", false), ("al.", false)], 100.0, 10.0);
        let h = caption_heading(&t, 1).unwrap();
        assert_eq!((h.kind, h.text.as_str()), (CaptionKind::Table, "Table 1: Generic set"));
        assert!(caption_heading(&plain("The figure shows"), 0).is_none());
        let chunks = vec![c, plain("body"), t];
        let once = extract_caption_headings(&chunks);
        assert_eq!(once.iter().map(|h| h.chunk_index).collect::<Vec<_>>(), [0, 2]);
        assert_eq!(once, extract_caption_headings(&chunks));
    }
}
