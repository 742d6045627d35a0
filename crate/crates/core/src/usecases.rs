//! Dataset-link curation and section-wise citation distribution.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::lexicon::trim_punct;
use crate::pipeline::{ExtractionResult, SectionText};
use crate::structure::extract_urls;

/// Generic section categories, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GenericSection {
    Background,
    Datasets,
    Method,
    ResultEvaluation,
    DiscussionConclusion,
    Other,
}

impl GenericSection {
    pub const ALL: [GenericSection; 6] = [
        GenericSection::Background,
        GenericSection::Datasets,
        GenericSection::Method,
        GenericSection::ResultEvaluation,
        GenericSection::DiscussionConclusion,
        GenericSection::Other,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GenericSection::Background => "Background",
            GenericSection::Datasets => "Datasets",
            GenericSection::Method => "Method",
            GenericSection::ResultEvaluation => "Result/Evaluation",
            GenericSection::DiscussionConclusion => "Discussion/Conclusion",
            GenericSection::Other => "Other",
        }
    }

    pub fn parse(s: &str) -> Option<GenericSection> {
        let s = s.trim();
        GenericSection::ALL.into_iter().find(|g| g.name().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for GenericSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SectionMapError {
    #[error("section map line {line}: expected heading<TAB>generic")]
    Syntax { line: usize },
    #[error("section map line {line}: unknown generic section {name:?}")]
    UnknownGeneric { line: usize, name: String },
}

const DEFAULT_MAP: [(&str, GenericSection); 21] = [
    ("introduction", GenericSection::Background),
    ("related work", GenericSection::Background),
    ("background", GenericSection::Background),
    ("datasets", GenericSection::Datasets),
    ("dataset", GenericSection::Datasets),
    ("data sets", GenericSection::Datasets),
    ("data", GenericSection::Datasets),
    ("corpus", GenericSection::Datasets),
    ("methodology", GenericSection::Method),
    ("method", GenericSection::Method),
    ("methods", GenericSection::Method),
    ("results", GenericSection::ResultEvaluation),
    ("result", GenericSection::ResultEvaluation),
    ("evaluation", GenericSection::ResultEvaluation),
    ("metrics", GenericSection::ResultEvaluation),
    ("discussion", GenericSection::DiscussionConclusion),
    ("conclusion", GenericSection::DiscussionConclusion),
    ("conclusions", GenericSection::DiscussionConclusion),
    ("acknowledgment", GenericSection::DiscussionConclusion),
    ("acknowledgments", GenericSection::DiscussionConclusion),
    ("acknowledgements", GenericSection::DiscussionConclusion),
];

/// Specific heading to generic section. Keys are lowercased; lookups strip
/// the enumeration and trailing punctuation first.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionMap {
    entries: Vec<(String, GenericSection)>,
}

impl Default for SectionMap {
    fn default() -> Self {
        SectionMap { entries: DEFAULT_MAP.iter().map(|(k, g)| (k.to_string(), *g)).collect() }
    }
}

fn normalize(heading: &str) -> String {
    heading.split_whitespace().map(|w| trim_punct(w).to_lowercase()).filter(|w| !w.is_empty()).collect::<Vec<_>>().join(" ")
}

impl SectionMap {
    pub fn empty() -> Self {
        SectionMap { entries: Vec::new() }
    }

    /// Parses `heading<TAB>generic` lines on top of the default mapping.
    /// Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, SectionMapError> {
        let mut map = SectionMap::default();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (heading, generic) = line.split_once('\t').ok_or(SectionMapError::Syntax { line: i + 1 })?;
            let g = GenericSection::parse(generic)
                .ok_or_else(|| SectionMapError::UnknownGeneric { line: i + 1, name: generic.trim().to_string() })?;
            map.insert(heading, g);
        }
        Ok(map)
    }

    pub fn insert(&mut self, heading: &str, generic: GenericSection) {
        let key = normalize(heading);
        self.entries.retain(|(k, _)| *k != key);
        self.entries.push((key, generic));
    }

    /// Exact match on the normalized heading, else the longest key whose
    /// words open the heading (the last key word may take a plural `s`).
    pub fn lookup(&self, heading_title: &str) -> Option<GenericSection> {
        let h = normalize(heading_title);
        if let Some((_, g)) = self.entries.iter().find(|(k, _)| *k == h) {
            return Some(*g);
        }
        let words: Vec<&str> = h.split(' ').collect();
        self.entries
            .iter()
            .filter(|(k, _)| {
                let kw: Vec<&str> = k.split(' ').collect();
                kw.len() <= words.len()
                    && kw.iter().zip(&words).enumerate().all(|(i, (a, b))| {
                        a == b || (i + 1 == kw.len() && b.strip_suffix('s') == Some(a))
                    })
            })
            .max_by_key(|(k, _)| k.len())
            .map(|(_, g)| *g)
    }

    /// Generic category of every section. Unmapped top-level headings are
    /// Method when a Background heading precedes them and a Result heading
    /// follows, else Other. Deeper headings inherit from their parent, and
    /// front matter is Other.
    pub fn classify(&self, sections: &[SectionText]) -> Vec<GenericSection> {
        let direct: Vec<Option<GenericSection>> =
            sections.iter().map(|s| s.heading.as_ref().and_then(|h| self.lookup(h.title()))).collect();
        let top = |i: usize| sections[i].heading.as_ref().is_some_and(|h| h.level <= 1);
        let mut out = Vec::with_capacity(sections.len());
        let mut parent = GenericSection::Other;
        for i in 0..sections.len() {
            let g = match (&sections[i].heading, direct[i]) {
                (None, _) => GenericSection::Other,
                (Some(_), Some(g)) => g,
                (Some(_), None) if !top(i) => parent,
                (Some(_), None) => {
                    let before = (0..i).any(|j| top(j) && direct[j] == Some(GenericSection::Background));
                    let after = (i + 1..sections.len()).any(|j| top(j) && direct[j] == Some(GenericSection::ResultEvaluation));
                    if before && after {
                        GenericSection::Method
                    } else {
                        GenericSection::Other
                    }
                }
            };
            if top(i) {
                parent = g;
            }
            out.push(g);
        }
        out
    }
}

const DATASET_TOKENS: [&str; 3] = ["datasets", "data", "dumps"];

/// A URL kept by dataset curation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetLink {
    pub url: String,
    pub source_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DatasetReport {
    pub articles: usize,
    /// Unique URLs across all articles.
    pub total_links: usize,
    pub links: Vec<DatasetLink>,
}

impl DatasetReport {
    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<10} {:>12} {:>14}\n{:<10} {:>12} {:>14}\n",
            "articles", "total_links", "dataset_links", self.articles, self.total_links, self.links.len()
        );
        for l in &self.links {
            out.push_str(&format!("{}\t{}\n", l.url, l.source_id));
        }
        out
    }
}

/// URLs from sections mapped to Datasets (body text or footnotes whose
/// marker appears in the body), plus any URL containing a dataset token as
/// a substring. Deduplicated across the corpus, first occurrence kept.
pub fn curate_dataset_links(results: &[ExtractionResult], map: &SectionMap) -> DatasetReport {
    let mut seen = HashSet::new();
    let mut all = HashSet::new();
    let mut links = Vec::new();
    for r in results {
        let mut keep: Vec<String> = Vec::new();
        let classes = map.classify(&r.sections);
        for (s, g) in r.sections.iter().zip(&classes) {
            if *g != GenericSection::Datasets {
                continue;
            }
            for p in &s.paragraphs {
                keep.extend(extract_urls(p));
            }
            let markers: HashSet<&str> = s.markers.iter().map(String::as_str).collect();
            for f in &r.footnotes {
                if f.marker.as_deref().is_some_and(|m| markers.contains(m)) {
                    keep.extend(extract_urls(&f.text));
                }
            }
        }
        for u in &r.urls {
            all.insert(u.clone());
            let lower = u.to_lowercase();
            if DATASET_TOKENS.iter().any(|t| lower.contains(t)) {
                keep.push(u.clone());
            }
        }
        for u in keep {
            all.insert(u.clone());
            if seen.insert(u.clone()) {
                links.push(DatasetLink { url: u, source_id: r.source_id.clone() });
            }
        }
    }
    DatasetReport { articles: results.len(), total_links: all.len(), links }
}

/// Citation counts per generic section.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CitationHistogram {
    pub counts: HashMap<GenericSection, usize>,
}

impl CitationHistogram {
    pub fn get(&self, g: GenericSection) -> usize {
        self.counts.get(&g).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn merge(&mut self, other: &CitationHistogram) {
        for (g, n) in &other.counts {
            *self.counts.entry(*g).or_insert(0) += n;
        }
    }

    pub fn table(&self) -> String {
        GenericSection::ALL.iter().map(|g| format!("{:<22} {:>6}\n", g.name(), self.get(*g))).collect()
    }
}

/// Counts each citation instance under its owning section's category.
pub fn section_citation_distribution(result: &ExtractionResult, map: &SectionMap) -> CitationHistogram {
    let classes = map.classify(&result.sections);
    let mut h = CitationHistogram::default();
    for c in &result.citation_instances {
        if let Some(g) = classes.get(c.section) {
            *h.counts.entry(*g).or_insert(0) += 1;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bibliography::extract_citations;
    use crate::structure::{Footnote, SectionHeading};

    fn heading(text: &str) -> SectionHeading {
        let words: Vec<&str> = text.split_whitespace().collect();
        let enumeration = words.first().and_then(|w| crate::features::parse_enumeration(w));
        let level = enumeration.as_ref().map_or(1, |e| e.depth.max(1));
        SectionHeading { text: text.into(), enumeration, chunk_index: 0, level }
    }

    fn section(h: &str, body: &str) -> SectionText {
        SectionText { heading: Some(heading(h)), paragraphs: vec![body.into()], markers: Vec::new(), is_references: false }
    }

    #[test]
    fn lookup_rules() {
        let m = SectionMap::default();
        assert_eq!(m.lookup("Related Work"), Some(GenericSection::Background));
        assert_eq!(m.lookup("RELATED WORK"), Some(GenericSection::Background));
        assert_eq!(m.lookup("Acknowledgment"), Some(GenericSection::DiscussionConclusion));
        assert_eq!(m.lookup("Conclusions and Future Work"), Some(GenericSection::DiscussionConclusion));
        assert_eq!(m.lookup("Metrics"), Some(GenericSection::ResultEvaluation));
        assert_eq!(m.lookup("Database Design"), None);
        assert_eq!(heading("3.1 Evaluation").title(), "Evaluation");
    }

    #[test]
    fn method_between_background_and_results() {
        let m = SectionMap::default();
        let secs = vec![
            section("1 Introduction", ""),
            section("2 Our Parser", ""),
            section("2.1 Details", ""),
            section("3 Results", ""),
            section("4 Appendix Notes", ""),
        ];
        let c = m.classify(&secs);
        use GenericSection::*;
        assert_eq!(c, vec![Background, Method, Method, ResultEvaluation, Other]);
    }

    #[test]
    fn editable_map() {
        let m = SectionMap::parse("# custom\nOur Parser\tDatasets\n").unwrap();
        assert_eq!(m.lookup("our parser"), Some(GenericSection::Datasets));
        assert!(SectionMap::parse("x\tBanana").is_err());
        assert!(SectionMap::parse("no tab").is_err());
    }

    #[test]
    fn dataset_curation() {
        let mut a = ExtractionResult { source_id: "a".into(), ..Default::default() };
        a.sections = vec![section("Methods", "see http://x.org/tool and http://x.org/datasets/v1"), {
            let mut s = section("Datasets", "we use a corpus");
            s.markers = vec!["3".into()];
            s
        }];
        a.footnotes = vec![Footnote { marker: Some("3".into()), text: "http://x.org/corpus".into(), page_no: 1, chunk_index: 0 }];
        a.urls = vec!["http://x.org/tool".into(), "http://x.org/datasets/v1".into(), "http://x.org/corpus".into()];
        let b = ExtractionResult { source_id: "b".into(), urls: vec!["http://x.org/datasets/v1".into()], ..Default::default() };
        let r = curate_dataset_links(&[a, b], &SectionMap::default());
        let urls: Vec<&str> = r.links.iter().map(|l| l.url.as_str()).collect();
        assert_eq!(urls, vec!["http://x.org/corpus", "http://x.org/datasets/v1"]);
        assert_eq!((r.articles, r.total_links), (2, 3));
    }

    #[test]
    fn citation_histogram() {
        let mut r = ExtractionResult::default();
        r.sections = vec![section("Related Work", "as in [1], [2] and [3]."), section("Acknowledgment", "thanks to [4].")];
        for (i, s) in r.sections.iter().enumerate() {
            r.citation_instances.extend(extract_citations(&s.text()).into_iter().map(|mut c| {
                c.section = i;
                c
            }));
        }
        let h = section_citation_distribution(&r, &SectionMap::default());
        assert_eq!(h.get(GenericSection::Background), 3);
        assert_eq!(h.get(GenericSection::DiscussionConclusion), 1);
        assert_eq!(h.total(), 4);
        assert_eq!(section_citation_distribution(&ExtractionResult::default(), &SectionMap::default()).total(), 0);
    }
}
