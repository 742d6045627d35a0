//! Reference section location, reference splitting, citation instances and
//! citation to reference links.

use once_cell::sync::Lazy;
use regex::{Captures, Regex};
use thiserror::Error;

use crate::features::EnumKind;
use crate::model::{join_tokens, Chunk};
use crate::structure::Section;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BibliographyError {
    #[error("no reference section")]
    NoReferenceSection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    /// Number printed as `[n]` or `n.` in front of the entry.
    pub index: Option<u32>,
    pub raw_text: String,
    /// First capitalized word of the entry; advisory only.
    pub first_author_last: Option<String>,
    pub year: Option<i32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CitationInstance {
    /// Citation style, 1 to 16; see [`CITATION_STYLES`].
    pub style_id: u8,
    pub matched_text: String,
    pub authors: Vec<String>,
    pub year: Option<i32>,
    pub year_suffix: Option<String>,
    pub indices: Vec<u32>,
    /// Byte range within the text of the section it was found in.
    pub char_span: (usize, usize),
    /// Index of that section in the document's section list.
    pub section: usize,
}

impl CitationInstance {
    pub fn is_indexed(&self) -> bool {
        !self.indices.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkMethod {
    Index,
    AuthorYear,
    Unresolved,
}

impl LinkMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            LinkMethod::Index => "index",
            LinkMethod::AuthorYear => "author-year",
            LinkMethod::Unresolved => "unresolved",
        }
    }
}

/// Link from a citation to a reference, both given as positions in the
/// document's citation and reference lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CitationLink {
    pub citation: usize,
    pub reference: Option<usize>,
    pub method: LinkMethod,
    /// Several references matched equally well; the earliest was chosen.
    pub ambiguous: bool,
}

fn is_reference_heading(title: &str) -> bool {
    let t = title.trim().to_lowercase();
    t.starts_with("references") || t.starts_with("bibliography")
}

fn is_appendix(section: &Section) -> bool {
    section.heading.as_ref().is_some_and(|h| {
        h.title().to_lowercase().starts_with("appendix") || h.enumeration.as_ref().is_some_and(|e| e.kind == EnumKind::Alpha)
    })
}

/// The reference section and every chunk of reference material: its body
/// plus the chunks of later sections up to an appendix.
pub fn locate_reference_section(sections: &[Section]) -> Result<(usize, Vec<usize>), BibliographyError> {
    let start = sections
        .iter()
        .position(|s| s.heading.as_ref().is_some_and(|h| is_reference_heading(h.title())))
        .ok_or(BibliographyError::NoReferenceSection)?;
    let mut chunks = sections[start].body_chunks.clone();
    for s in &sections[start + 1..] {
        if is_appendix(s) {
            break;
        }
        if let Some(h) = &s.heading {
            chunks.push(h.chunk_index);
        }
        chunks.extend(&s.body_chunks);
    }
    Ok((start, chunks))
}

/// One printed line of reference material.
#[derive(Debug, Clone, PartialEq)]
pub struct RefLine {
    pub text: String,
    /// x of the first token.
    pub x: f64,
}

pub fn reference_lines(chunks: &[Chunk], indices: &[usize]) -> Vec<RefLine> {
    indices
        .iter()
        .flat_map(|&i| chunks[i].lines())
        .filter_map(|line| {
            let words: Vec<_> = line.iter().filter(|t| !t.sup_flag).collect();
            let first = words.first()?;
            Some(RefLine { text: join_tokens(words.iter().copied()), x: first.x })
        })
        .collect()
}

static BRACKET_INDEX: Lazy<Regex> = Lazy::new(|| Regex::new(r"^\[(\d{1,4})\]").unwrap());
static DOT_INDEX: Lazy<Regex> = Lazy::new(|| Regex::new(r"^(\d{1,4})\.(?:\s|$)").unwrap());
static YEAR: Lazy<Regex> = Lazy::new(|| Regex::new(r"\b(\d{4})[a-z]?\b").unwrap());
static CAP_WORD: Lazy<Regex> = Lazy::new(|| Regex::new(r"\b[A-Z][a-zA-Z'\-]*[a-z][a-zA-Z'\-]*\b").unwrap());

/// Largest x shift between a reference's first line and its continuation.
const INDENT_MIN: f64 = 2.0;
/// Lines further apart than this belong to different columns.
const COLUMN_REACH: f64 = 60.0;

/// First four-digit number in [1500, 2100].
pub fn first_year(text: &str) -> Option<i32> {
    YEAR.captures_iter(text)
        .filter_map(|c| c[1].parse::<i32>().ok())
        .find(|y| (1500..=2100).contains(y))
}

fn reference_from(lines: &[&RefLine]) -> Reference {
    let raw_text = lines.iter().map(|l| l.text.as_str()).collect::<Vec<_>>().join(" ");
    let (index, body) = if let Some(c) = BRACKET_INDEX.captures(&raw_text) {
        (c[1].parse().ok(), &raw_text[c.get(0).unwrap().end()..])
    } else if let Some(c) = DOT_INDEX.captures(&raw_text) {
        (c[1].parse().ok(), &raw_text[c.get(0).unwrap().end()..])
    } else {
        (None, raw_text.as_str())
    };
    let first_author_last = CAP_WORD.find(body).map(|m| m.as_str().to_string());
    let year = first_year(body);
    Reference { index: index.filter(|&i| i >= 1), first_author_last, year, raw_text }
}

/// Splits reference lines into entries: at `[n]` prefixes, else at `n.`
/// prefixes counting up from 1, else at lines flush with the column margin
/// when other lines are indented.
pub fn split_references(lines: &[RefLine]) -> Vec<Reference> {
    if lines.is_empty() {
        return Vec::new();
    }
    let starts: Vec<bool> = if lines.iter().any(|l| BRACKET_INDEX.is_match(&l.text)) {
        lines.iter().map(|l| BRACKET_INDEX.is_match(&l.text)).collect()
    } else if let Some(s) = dot_index_starts(lines) {
        s
    } else {
        let margin = |x: f64| lines.iter().map(|l| l.x).filter(|&o| (o - x).abs() <= COLUMN_REACH).fold(x, f64::min);
        lines.iter().map(|l| l.x <= margin(l.x) + INDENT_MIN).collect()
    };
    let mut refs = Vec::new();
    let mut current: Vec<&RefLine> = Vec::new();
    for (line, start) in lines.iter().zip(starts) {
        if start && !current.is_empty() {
            refs.push(reference_from(&current));
            current.clear();
        }
        current.push(line);
    }
    if !current.is_empty() {
        refs.push(reference_from(&current));
    }
    refs
}

fn dot_index_starts(lines: &[RefLine]) -> Option<Vec<bool>> {
    let mut next = 1u32;
    let mut starts = Vec::with_capacity(lines.len());
    for l in lines {
        let n = DOT_INDEX.captures(&l.text).and_then(|c| c[1].parse::<u32>().ok());
        let start = n == Some(next);
        if start {
            next += 1;
        }
        starts.push(start);
    }
    (next > 2).then_some(starts)
}

/// Words that look like author names to the patterns but never are.
const NOT_AUTHORS: &[&str] = &[
    "A", "About", "After", "Algorithm", "Also", "An", "And", "Appendix", "April", "As", "At", "August", "Before", "But",
    "By", "Chapter", "Conference", "Dec", "December", "During", "Eq", "Equation", "Feb", "February", "Fig", "Figure",
    "For", "From", "However", "If", "In", "It", "Jan", "January", "July", "June", "Mar", "March", "May", "Nov",
    "November", "Oct", "October", "On", "Page", "Part", "Proceedings", "Section", "See", "Sep", "September", "Since",
    "Spring", "Step", "Summer", "Table", "The", "Then", "This", "Thus", "To", "Until", "Version", "Vol", "Volume", "We",
    "When", "While", "Winter", "With", "Year",
];

const AN: &str = r"\b([A-Z][a-zA-Z]*)";
const Y: &str = r"(\d{4})([a-z])?\b";
const I: &str = r"(\d{1,3}(?: *, *\d{1,3})*)";

/// The citation styles in application order. Each entry is the style id, the
/// printed form and its pattern; `AN` is an author surname, `Y` a year and
/// `I` a reference index.
pub static CITATION_STYLES: Lazy<Vec<(u8, &'static str, Regex)>> = Lazy::new(|| {
    let styles: [(u8, &str, String); 16] = [
        (1, "<AN> et al. [<I>]", format!(r"{AN} et al\. \[{I}\]")),
        (2, "<AN> [<I>]", format!(r"{AN} \[{I}\]")),
        (3, "<AN> et al.<spaces>[<I>]", format!(r"{AN} et al\.(?: {{2,}})?\[{I}\]")),
        (4, "<AN> et al., <Y><I>", format!(r"{AN} et al\., (\d{{4}})([a-z])\b")),
        (5, "<AN> et al., <Y>", format!(r"{AN} et al\., {Y}")),
        (6, "<AN> et al., (<Y>)", format!(r"{AN} et al\., \({Y}\)")),
        (7, "<AN> et al. <Y>", format!(r"{AN} et al\. {Y}")),
        (8, "<AN> et al. (<Y>)", format!(r"{AN} et al\. \({Y}\)")),
        (9, "<AN> and <AN> (<Y>)", format!(r"{AN} and ([A-Z][a-zA-Z]*) \({Y}\)")),
        (10, "<AN> & <AN> (<Y>)", format!(r"{AN} & ([A-Z][a-zA-Z]*) \({Y}\)")),
        (11, "<AN> and <AN>, <Y>", format!(r"{AN} and ([A-Z][a-zA-Z]*), {Y}")),
        (12, "<AN> & <AN>, <Y>", format!(r"{AN} & ([A-Z][a-zA-Z]*), {Y}")),
        (13, "<AN>, <Y>", format!(r"{AN}, {Y}")),
        (14, "<AN> <Y>", format!(r"{AN} {Y}")),
        (15, "<AN>, (<Y><I>)", format!(r"{AN},? \((\d{{4}})([a-z]*)\)")),
        (16, "[<I>, <I>, ...]", format!(r"\[{I}\]")),
    ];
    styles.into_iter().map(|(id, form, re)| (id, form, Regex::new(&re).unwrap())).collect()
});

fn parse_indices(s: &str) -> Vec<u32> {
    s.split(',').filter_map(|p| p.trim().parse().ok()).collect()
}

fn instance(style_id: u8, c: &Captures<'_>) -> Option<CitationInstance> {
    let m = c.get(0)?;
    let mut authors = Vec::new();
    let mut year = None;
    let mut year_suffix = None;
    let mut indices = Vec::new();
    match style_id {
        1..=3 => {
            authors.push(c[1].to_string());
            indices = parse_indices(&c[2]);
        }
        9..=12 => {
            authors.extend([c[1].to_string(), c[2].to_string()]);
            year = c[3].parse().ok();
            year_suffix = c.get(4).map(|s| s.as_str().to_string());
        }
        16 => indices = parse_indices(&c[1]),
        _ => {
            authors.push(c[1].to_string());
            year = c[2].parse().ok();
            year_suffix = c.get(3).map(|s| s.as_str().to_string()).filter(|s| !s.is_empty());
        }
    }
    if authors.iter().any(|a| NOT_AUTHORS.contains(&a.as_str())) {
        return None;
    }
    if let Some(y) = year {
        if !(1500..=2100).contains(&y) {
            return None;
        }
    }
    if indices.is_empty() && year.is_none() {
        return None;
    }
    Some(CitationInstance {
        style_id,
        matched_text: m.as_str().to_string(),
        authors,
        year,
        year_suffix,
        indices,
        char_span: (m.start(), m.end()),
        section: 0,
    })
}

/// Citation instances in `text`, sorted by position. Styles are tried in
/// order and a match is dropped if it overlaps an earlier style's match.
pub fn extract_citations(text: &str) -> Vec<CitationInstance> {
    let mut found: Vec<CitationInstance> = Vec::new();
    for (id, _, re) in CITATION_STYLES.iter() {
        let mut pos = 0;
        while pos <= text.len() {
            let Some(c) = re.captures_at(text, pos) else { break };
            let m = c.get(0).unwrap();
            let free = found.iter().all(|f| m.end() <= f.char_span.0 || m.start() >= f.char_span.1);
            match instance(*id, &c).filter(|_| free) {
                Some(inst) => {
                    found.push(inst);
                    pos = m.end().max(m.start() + 1);
                }
                None => {
                    // retry just past the start of the rejected match
                    pos = m.start() + text[m.start()..].chars().next().map_or(1, char::len_utf8);
                }
            }
        }
    }
    found.sort_by_key(|c| c.char_span);
    found
}

fn word_in(haystack: &str, word: &str) -> bool {
    let h = haystack.to_lowercase();
    let w = word.to_lowercase();
    h.match_indices(&w).any(|(i, _)| {
        let before = h[..i].chars().next_back().is_none_or(|c| !c.is_alphanumeric());
        let after = h[i + w.len()..].chars().next().is_none_or(|c| !c.is_alphanumeric());
        before && after
    })
}

fn author_year_candidates(cite: &CitationInstance, refs: &[Reference]) -> Vec<(usize, bool)> {
    let (Some(year), Some(surname)) = (cite.year, cite.authors.first()) else { return Vec::new() };
    let year_str = year.to_string();
    refs.iter()
        .enumerate()
        .filter_map(|(i, r)| {
            if r.year != Some(year) {
                return None;
            }
            let at = r.raw_text.find(&year_str)?;
            if !word_in(&r.raw_text[..at], surname) {
                return None;
            }
            let suffix = cite.year_suffix.as_deref().unwrap_or("");
            let tail = &r.raw_text[at + 4..];
            let suffix_match = !suffix.is_empty() && tail.starts_with(suffix);
            Some((i, suffix_match))
        })
        .collect()
}

/// Indexed citations link to the reference with the same number, one link
/// per index; others link by year and a surname before the year.
pub fn map_citations_to_references(citations: &[CitationInstance], refs: &[Reference]) -> Vec<CitationLink> {
    let any_indexed_refs = refs.iter().any(|r| r.index.is_some());
    let mut links = Vec::new();
    for (ci, c) in citations.iter().enumerate() {
        if c.is_indexed() {
            for &idx in &c.indices {
                let target = if any_indexed_refs {
                    refs.iter().position(|r| r.index == Some(idx))
                } else {
                    (idx >= 1 && (idx as usize) <= refs.len()).then(|| idx as usize - 1)
                };
                links.push(CitationLink {
                    citation: ci,
                    reference: target,
                    method: if target.is_some() { LinkMethod::Index } else { LinkMethod::Unresolved },
                    ambiguous: false,
                });
            }
            continue;
        }
        let cands = author_year_candidates(c, refs);
        let chosen = cands.iter().find(|(_, s)| *s).or(cands.first()).map(|(i, _)| *i);
        let ambiguous = cands.len() > 1 && cands.iter().filter(|(_, s)| *s).count() != 1;
        links.push(CitationLink {
            citation: ci,
            reference: chosen,
            method: if chosen.is_some() { LinkMethod::AuthorYear } else { LinkMethod::Unresolved },
            ambiguous: chosen.is_some() && ambiguous,
        });
    }
    links
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::SectionHeading;

    fn rl(text: &str, x: f64) -> RefLine {
        RefLine { text: text.into(), x }
    }

    fn section(text: Option<&str>, at: usize, body: std::ops::Range<usize>) -> Section {
        let heading = text.map(|t| {
            let enumeration = t.split(' ').next().and_then(crate::features::parse_enumeration);
            SectionHeading { text: t.into(), enumeration, chunk_index: at, level: 1 }
        });
        Section { heading, body_chunks: body.collect() }
    }

    #[test]
    fn locate() {
        let s = vec![section(None, 0, 0..2), section(Some("1 Intro"), 2, 3..5), section(Some("References"), 5, 6..9)];
        assert_eq!(locate_reference_section(&s).unwrap(), (2, vec![6, 7, 8]));
        let s = vec![section(Some("6 Bibliography"), 0, 1..3), section(Some("Misc"), 3, 4..5), section(Some("Appendix"), 5, 6..7)];
        assert_eq!(locate_reference_section(&s).unwrap(), (0, vec![1, 2, 3, 4]));
        let s = vec![section(Some("1 Intro"), 0, 1..2)];
        assert_eq!(locate_reference_section(&s), Err(BibliographyError::NoReferenceSection));
    }

    #[test]
    fn split_bracketed() {
        let refs = split_references(&[rl("[1] Foo, A. 2001.", 72.0), rl("more text", 72.0), rl("[2] Bar, B. 1999.", 72.0)]);
        assert_eq!(refs.len(), 2);
        assert_eq!((refs[0].index, refs[1].index), (Some(1), Some(2)));
        assert_eq!(refs[0].raw_text, "[1] Foo, A. 2001. more text");
        assert_eq!((refs[0].year, refs[0].first_author_last.as_deref()), (Some(2001), Some("Foo")));
    }

    #[test]
    fn split_dotted() {
        let refs = split_references(&[rl("1. Alpha 2001.", 72.0), rl("3. continued", 72.0), rl("2. Beta 2002.", 72.0)]);
        assert_eq!(refs.len(), 2);
        assert_eq!(refs[0].raw_text, "1. Alpha 2001. 3. continued");
    }

    #[test]
    fn split_hanging_indent() {
        let lines = [
            rl("Lopez, P. 2009. GROBID: combining", 72.0),
            rl("automatic extraction.", 82.0),
            rl("Singh, M. 2016. OCR++.", 72.0),
            rl("Zhang, Q. 2010. Another", 320.0),
            rl("paper title.", 330.0),
        ];
        let refs = split_references(&lines);
        assert_eq!(refs.len(), 3);
        assert!(refs.iter().all(|r| r.index.is_none()));
        assert_eq!(refs[2].raw_text, "Zhang, Q. 2010. Another paper title.");
        let r = split_references(&[rl("Patrice Lopez. 2009. GROBID", 72.0)]);
        assert_eq!(r[0].first_author_last.as_deref(), Some("Patrice"));
    }

    fn styles(text: &str) -> Vec<(u8, String)> {
        extract_citations(text).into_iter().map(|c| (c.style_id, c.matched_text)).collect()
    }

    #[test]
    fn citation_styles() {
        let c = extract_citations("Kumar et al. [12] showed");
        assert_eq!((c[0].style_id, c[0].indices.clone()), (1, vec![12]));
        let c = extract_citations("GROBID (Lopez, 2009) is");
        assert_eq!((c[0].style_id, c[0].authors.clone(), c[0].year), (13, vec!["Lopez".to_string()], Some(2009)));
        let c = extract_citations("as in [4, 7]");
        assert_eq!((c[0].style_id, c[0].indices.clone()), (16, vec![4, 7]));
        assert_eq!(styles("Kumar [12]"), [(2, "Kumar [12]".into())]);
        assert_eq!(styles("Kumar et al.[3]"), [(3, "Kumar et al.[3]".into())]);
        assert_eq!(styles("Kumar et al.  [3]"), [(3, "Kumar et al.  [3]".into())]);
        assert_eq!(styles("Kumar et al., 2009a"), [(4, "Kumar et al., 2009a".into())]);
        assert_eq!(styles("Kumar et al., 2009"), [(5, "Kumar et al., 2009".into())]);
        assert_eq!(styles("Kumar et al., (2009)"), [(6, "Kumar et al., (2009)".into())]);
        assert_eq!(styles("Kumar et al. 2009"), [(7, "Kumar et al. 2009".into())]);
        assert_eq!(styles("Kumar et al. (2009)"), [(8, "Kumar et al. (2009)".into())]);
        assert_eq!(styles("Kumar and Singh (2009)"), [(9, "Kumar and Singh (2009)".into())]);
        assert_eq!(styles("Kumar & Singh (2009)"), [(10, "Kumar & Singh (2009)".into())]);
        assert_eq!(styles("Kumar and Singh, 2009"), [(11, "Kumar and Singh, 2009".into())]);
        assert_eq!(styles("Kumar & Singh, 2009"), [(12, "Kumar & Singh, 2009".into())]);
        assert_eq!(styles("Kumar 2009"), [(14, "Kumar 2009".into())]);
        assert_eq!(styles("Kumar (2009b)"), [(15, "Kumar (2009b)".into())]);
        assert_eq!(styles("Kumar, (2009)"), [(15, "Kumar, (2009)".into())]);
    }

    #[test]
    fn negatives() {
        assert!(extract_citations("In 2009 we saw").is_empty());
        assert!(extract_citations("see Table 2009").is_empty());
        assert!(extract_citations("costs 12,000 in total").is_empty());
        assert!(extract_citations("Kumar 1234").is_empty());
        assert!(extract_citations("no brackets here").is_empty());
    }

    #[test]
    fn spans_are_ordered_and_disjoint() {
        let text = "Kumar et al. [1] and Lopez (2009) and [2, 3].";
        let c = extract_citations(text);
        assert_eq!(c.len(), 3);
        for w in c.windows(2) {
            assert!(w[0].char_span.1 <= w[1].char_span.0);
        }
        for ci in &c {
            assert_eq!(&text[ci.char_span.0..ci.char_span.1], ci.matched_text);
        }
    }

    #[test]
    fn linking() {
        let refs: Vec<Reference> = (1..=5).map(|i| split_references(&[rl(&format!("[{i}] Author{i} X. 200{i}."), 72.0)]).remove(0)).collect();
        let cites = extract_citations("see [3] and [9]");
        let links = map_citations_to_references(&cites, &refs);
        assert_eq!((links[0].reference, links[0].method), (Some(2), LinkMethod::Index));
        assert_eq!((links[1].reference, links[1].method), (None, LinkMethod::Unresolved));

        let refs = split_references(&[
            rl("Lopez, P. 2009a. GROBID.", 72.0),
            rl("Lopez, P. 2009b. Other.", 72.0),
            rl("Smith, J. 2009. Third.", 72.0),
        ]);
        let cites = extract_citations("GROBID (Lopez, 2009b) and Smith (2009) and Lopez 2009 and Nobody 2010");
        let links = map_citations_to_references(&cites, &refs);
        assert_eq!((links[0].reference, links[0].method, links[0].ambiguous), (Some(1), LinkMethod::AuthorYear, false));
        assert_eq!(links[1].reference, Some(2));
        assert_eq!((links[2].reference, links[2].ambiguous), (Some(0), true));
        assert_eq!(links[3].method, LinkMethod::Unresolved);
    }
}
