//! End-to-end extraction, its configuration, and the construction of
//! training sequences from annotated documents.

use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::bibliography::{
    extract_citations, locate_reference_section, map_citations_to_references, reference_lines, split_references,
    CitationInstance, CitationLink, Reference,
};
use crate::chunker::{chunk_document, ChunkParams, ChunkParamsError};
use crate::crf::{load_model, train, CrfError, FeatureTemplate, LabeledSequence, TrainConfig};
use crate::eval::{GroundTruth, GtAuthor};
use crate::features::{
    author_templates, body_font_size, footnote_features, footnote_labels, footnote_templates, heading_features,
    heading_labels, heading_templates, title_labels, title_templates, HeaderView, Lexicons, FOOTNOTE, HEADING, OTHER,
    TARGET,
};
use crate::ingest::{parse_rich_xml_with, IngestError, IngestOptions, IngestReport};
use crate::lexicon::Lexicon;
use crate::metadata::{
    attach_affiliations, author_window, extract_affiliations, extract_author_names, extract_emails, largest_font_chunk,
    map_authors_to_emails, title_positions_with_fallback, title_text, Affiliation, AuthorRecord, EmailAddress,
    MetadataParams,
};
use crate::model::{median, Chunk, Document, Token};
use crate::structure::{
    extract_caption_headings, extract_footnotes, extract_urls, label_headings, map_sections, CaptionHeading, CaptionKind,
    Footnote, SectionHeading,
};
use crate::CrfModel;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Crf(#[from] CrfError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("config line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("bad value for {key}: {value:?}")]
    BadValue { key: String, value: String },
    #[error("referenced file does not exist: {0}")]
    MissingFile(PathBuf),
    #[error(transparent)]
    Chunk(#[from] ChunkParamsError),
}

/// The four sequence-labeling tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Task {
    Title,
    Author,
    Heading,
    Footnote,
}

impl Task {
    pub const ALL: [Task; 4] = [Task::Title, Task::Author, Task::Heading, Task::Footnote];

    pub fn as_str(self) -> &'static str {
        match self {
            Task::Title => "title",
            Task::Author => "author",
            Task::Heading => "heading",
            Task::Footnote => "footnote",
        }
    }

    pub fn parse(s: &str) -> Option<Task> {
        Task::ALL.into_iter().find(|t| t.as_str() == s)
    }

    pub fn labels(self) -> Vec<String> {
        match self {
            Task::Title | Task::Author => title_labels(),
            Task::Heading => heading_labels(),
            Task::Footnote => footnote_labels(),
        }
    }

    pub fn templates(self) -> Vec<FeatureTemplate> {
        match self {
            Task::Title => title_templates(),
            Task::Author => author_templates(),
            Task::Heading => heading_templates(),
            Task::Footnote => footnote_templates(),
        }
    }
}

/// Flat `key = value` settings; `#` starts a comment. Relative paths are
/// resolved against the config file's directory.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PipelineConfig {
    pub chunk: ChunkParams,
    pub metadata: MetadataParams,
    pub ingest: IngestOptions,
    pub models: HashMap<String, PathBuf>,
    pub cue_lexicon: Option<PathBuf>,
    pub country_gazetteer: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub section_map: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

impl PipelineConfig {
    pub fn parse(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let mut cfg = PipelineConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax { line: i + 1, message: "expected key = value".into() });
            };
            let (key, value) = (key.trim(), value.trim());
            let bad = || ConfigError::BadValue { key: key.into(), value: value.into() };
            let num = || value.parse::<f64>().map_err(|_| bad());
            let int = || value.parse::<usize>().map_err(|_| bad());
            let flag = || match value {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                _ => Err(bad()),
            };
            let path = || base.join(value);
            match key {
                "gap_factor" => cfg.chunk.gap_factor = num()?,
                "font_jump" => cfg.chunk.font_jump = num()?,
                "boldness_break" => cfg.chunk.boldness_break = flag()?,
                "author_window" => cfg.metadata.author_window = int()?,
                "max_author_run" => cfg.metadata.max_author_run = int()?,
                "author_gap_factor" => cfg.metadata.author_gap_factor = num()?,
                "dehyphenate" => cfg.ingest.dehyphenate = flag()?,
                "sup_font_ratio" => cfg.ingest.sup_font_ratio = num()?,
                "sup_raise" => cfg.ingest.sup_raise = num()?,
                "lexicon.cues" => cfg.cue_lexicon = Some(path()),
                "lexicon.countries" => cfg.country_gazetteer = Some(path()),
                "lexicon.stopwords" => cfg.stopwords = Some(path()),
                "section_map" => cfg.section_map = Some(path()),
                "out_dir" => cfg.out_dir = Some(path()),
                k if k.starts_with("model.") && Task::parse(&k[6..]).is_some() => {
                    cfg.models.insert(k[6..].to_string(), path());
                }
                _ => return Err(ConfigError::UnknownKey(key.into())),
            }
        }
        cfg.chunk.validate()?;
        cfg.check_files()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|source| PipelineError::Io { path: path.into(), source })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Ok(Self::parse(&text, base)?)
    }

    fn check_files(&self) -> Result<(), ConfigError> {
        let files = self.models.values().chain([&self.cue_lexicon, &self.country_gazetteer, &self.stopwords, &self.section_map].into_iter().flatten());
        for f in files {
            if !f.exists() {
                return Err(ConfigError::MissingFile(f.clone()));
            }
        }
        Ok(())
    }

    pub fn lexicons(&self) -> Result<Lexicons, PipelineError> {
        let mut lex = Lexicons::default();
        let read = |p: &PathBuf| std::fs::read_to_string(p).map_err(|source| PipelineError::Io { path: p.clone(), source });
        if let Some(p) = &self.cue_lexicon {
            lex.cues = Lexicon::parse(&read(p)?, true);
        }
        if let Some(p) = &self.country_gazetteer {
            lex.countries = Lexicon::parse(&read(p)?, true);
        }
        if let Some(p) = &self.stopwords {
            lex.stopwords = Lexicon::parse(&read(p)?, false);
        }
        Ok(lex)
    }
}

/// One trained labeler per task.
#[derive(Debug, Clone, PartialEq)]
pub struct Models {
    pub title: CrfModel,
    pub author: CrfModel,
    pub heading: CrfModel,
    pub footnote: CrfModel,
}

const PRETRAINED: [(&str, &[u8]); 4] = [
    ("title", include_bytes!("../models/title.crf")),
    ("author", include_bytes!("../models/author.crf")),
    ("heading", include_bytes!("../models/heading.crf")),
    ("footnote", include_bytes!("../models/footnote.crf")),
];

impl Models {
    /// Models bundled with the library.
    pub fn pretrained() -> Result<Models, CrfError> {
        let m = |i: usize| load_model::<f64>(PRETRAINED[i].1);
        Ok(Models { title: m(0)?, author: m(1)?, heading: m(2)?, footnote: m(3)? })
    }

    pub fn get(&self, task: Task) -> &CrfModel {
        match task {
            Task::Title => &self.title,
            Task::Author => &self.author,
            Task::Heading => &self.heading,
            Task::Footnote => &self.footnote,
        }
    }

    pub fn set(&mut self, task: Task, model: CrfModel) {
        match task {
            Task::Title => self.title = model,
            Task::Author => self.author = model,
            Task::Heading => self.heading = model,
            Task::Footnote => self.footnote = model,
        }
    }

    /// Pretrained models, replaced by any model files named in the config.
    pub fn from_config(cfg: &PipelineConfig) -> Result<Models, PipelineError> {
        let mut models = Models::pretrained()?;
        for task in Task::ALL {
            if let Some(p) = cfg.models.get(task.as_str()) {
                let bytes = std::fs::read(p).map_err(|source| PipelineError::Io { path: p.clone(), source })?;
                models.set(task, load_model(&bytes)?);
            }
        }
        Ok(models)
    }
}

/// A section's body as text.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionText {
    /// Absent for text before the first heading.
    pub heading: Option<SectionHeading>,
    /// One entry per body chunk, excluding captions and footnotes.
    pub paragraphs: Vec<String>,
    /// Superscript markers printed in the body.
    pub markers: Vec<String>,
    pub is_references: bool,
}

impl SectionText {
    /// Paragraphs joined by newlines; citation spans index into this.
    pub fn text(&self) -> String {
        self.paragraphs.join("\n")
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExtractionResult {
    pub source_id: String,
    pub title: String,
    pub authors: Vec<AuthorRecord>,
    pub emails: Vec<EmailAddress>,
    pub affiliations: Vec<Affiliation>,
    pub sections: Vec<SectionText>,
    pub urls: Vec<String>,
    pub footnotes: Vec<Footnote>,
    pub captions: Vec<CaptionHeading>,
    pub references: Vec<Reference>,
    pub citation_instances: Vec<CitationInstance>,
    /// Links between `citation_instances` and `references`, by position.
    pub citations: Vec<CitationLink>,
}

impl ExtractionResult {
    /// The result restated in ground-truth form, for scoring.
    pub fn to_ground_truth(&self) -> GroundTruth {
        let mut gt = GroundTruth { title: (!self.title.is_empty()).then(|| self.title.clone()), ..Default::default() };
        for r in &self.authors {
            let n = &r.name;
            gt.authors.push(GtAuthor { first: n.first.clone(), middle: n.middle.clone(), last: n.last.clone() });
            if let Some(e) = &r.email {
                gt.author_emails.push((n.full_name(), e.address()));
            }
        }
        gt.emails = self.emails.iter().map(EmailAddress::address).collect();
        gt.affiliations = self.affiliations.iter().map(|a| a.text.clone()).collect();
        gt.section_headings = self.sections.iter().filter_map(|s| s.heading.as_ref().map(|h| h.text.clone())).collect();
        for c in &self.captions {
            match c.kind {
                CaptionKind::Figure => gt.figure_headings.push(c.text.clone()),
                CaptionKind::Table => gt.table_headings.push(c.text.clone()),
            }
        }
        gt.urls = self.urls.clone();
        gt.footnotes = self.footnotes.iter().map(|f| f.text.clone()).collect();
        gt.references = self.references.iter().map(|r| r.raw_text.clone()).collect();
        gt.citations = self.citation_instances.iter().map(|c| c.matched_text.clone()).collect();
        for l in &self.citations {
            if let Some(r) = l.reference {
                gt.cite_refs.push((self.citation_instances[l.citation].matched_text.clone(), r + 1));
            }
        }
        gt
    }
}

/// Runs every extraction step over a document.
#[derive(Debug, Clone)]
pub struct Extractor {
    pub models: Models,
    pub lexicons: Lexicons,
    pub config: PipelineConfig,
}

fn token_key(t: &Token) -> (u32, u64, u64) {
    (t.page_no, t.x.to_bits(), t.y.to_bits())
}

impl Extractor {
    pub fn new(models: Models, lexicons: Lexicons, config: PipelineConfig) -> Self {
        Extractor { models, lexicons, config }
    }

    pub fn from_config(config: PipelineConfig) -> Result<Self, PipelineError> {
        Ok(Extractor { models: Models::from_config(&config)?, lexicons: config.lexicons()?, config })
    }

    pub fn extract_bytes(&self, bytes: &[u8], source_id: &str) -> Result<(ExtractionResult, IngestReport), PipelineError> {
        let (mut doc, report) = parse_rich_xml_with(bytes, &self.config.ingest)?;
        doc.source_id = source_id.to_string();
        Ok((self.extract(&doc)?, report))
    }

    pub fn extract(&self, doc: &Document) -> Result<ExtractionResult, PipelineError> {
        let mut result = ExtractionResult { source_id: doc.source_id.clone(), ..Default::default() };
        let chunks = chunk_document(doc, &self.config.chunk);
        if chunks.is_empty() {
            return Ok(result);
        }
        let lex = &self.lexicons;
        let view = HeaderView::new(&chunks, lex);

        let title_pos = title_positions_with_fallback(&view, &chunks, &self.models.title)?;
        let title_tokens: Vec<Token> = title_pos.iter().map(|&p| view.token(p).clone()).collect();
        result.title = title_text(&title_tokens);
        let names = extract_author_names(&view, &title_pos, &self.models.author, lex, &self.config.metadata)?;
        result.emails = extract_emails(doc);

        let footnotes = extract_footnotes(doc, &chunks, &self.models.footnote)?;
        let captions = extract_caption_headings(&chunks);
        let title_chunks: HashSet<usize> = title_pos.iter().map(|&p| view.stream[p].chunk).collect();
        let not_heading: HashSet<usize> = footnotes
            .iter()
            .map(|f| f.chunk_index)
            .chain(captions.iter().map(|c| c.chunk_index))
            .chain(title_chunks.iter().copied())
            .collect();
        let headings: Vec<SectionHeading> = label_headings(&chunks, &self.models.heading)?
            .into_iter()
            .filter(|h| !not_heading.contains(&h.chunk_index))
            .collect();

        let first_page = chunks[0].page_no;
        let header_end = headings
            .first()
            .map(|h| h.chunk_index)
            .filter(|&i| chunks[i].page_no == first_page)
            .unwrap_or_else(|| chunks.iter().take_while(|c| c.page_no == first_page).count());
        let name_keys: HashSet<_> = names.iter().flat_map(|n| n.source_tokens.iter().map(token_key)).collect();
        // running heads above the title are not affiliations
        let title_start = title_pos.iter().min().copied().unwrap_or(0);
        let excluded: HashSet<usize> = (0..view.stream.len())
            .filter(|&p| p < title_start || title_pos.contains(&p) || name_keys.contains(&token_key(view.token(p))))
            .collect();
        result.affiliations = extract_affiliations(&view, &chunks, header_end, &excluded, lex);
        let mut records = map_authors_to_emails(&names, &result.emails);
        attach_affiliations(&mut records, &result.affiliations);
        result.authors = records;

        let sections = map_sections(chunks.len(), &headings);
        let (ref_section, ref_chunks) = match locate_reference_section(&sections) {
            Ok((i, c)) => (Some(i), c),
            Err(_) => (None, Vec::new()),
        };
        let footnote_chunks: HashSet<usize> = footnotes.iter().map(|f| f.chunk_index).collect();
        let ref_lines_from: Vec<usize> = ref_chunks.iter().copied().filter(|i| !footnote_chunks.contains(i)).collect();
        result.references = split_references(&reference_lines(&chunks, &ref_lines_from));
        let ref_set: HashSet<usize> = ref_chunks.iter().copied().collect();
        let skip: HashSet<usize> =
            footnote_chunks.iter().copied().chain(captions.iter().map(|c| c.chunk_index)).chain(ref_set.iter().copied()).collect();

        for (si, s) in sections.iter().enumerate() {
            if s.heading.as_ref().is_some_and(|h| ref_set.contains(&h.chunk_index)) {
                continue;
            }
            let is_references = Some(si) == ref_section;
            let body: Vec<&Chunk> = s.body_chunks.iter().filter(|i| !skip.contains(i)).map(|&i| &chunks[i]).collect();
            let section = SectionText {
                heading: s.heading.clone(),
                paragraphs: body.iter().map(|c| c.plain_text()).collect(),
                markers: body.iter().flat_map(|c| c.tokens.iter().filter(|t| t.sup_flag).map(|t| t.text.clone())).collect(),
                is_references,
            };
            if !is_references {
                let index = result.sections.len();
                result.citation_instances.extend(extract_citations(&section.text()).into_iter().map(|mut c| {
                    c.section = index;
                    c
                }));
            }
            result.sections.push(section);
        }

        let mut seen = HashSet::new();
        for c in &chunks {
            for u in extract_urls(&c.plain_text()) {
                if seen.insert(u.clone()) {
                    result.urls.push(u);
                }
            }
        }
        result.citations = map_citations_to_references(&result.citation_instances, &result.references);
        result.footnotes = footnotes;
        result.captions = captions;
        Ok(result)
    }
}

fn norm_word(w: &str) -> String {
    w.trim_end_matches([',', ';']).to_lowercase()
}

fn norm_text(s: &str) -> String {
    s.split_whitespace().map(str::to_lowercase).collect::<Vec<_>>().join(" ")
}

/// First run of `positions` whose words equal `gold`, superscripts skipped.
fn find_run(view: &HeaderView<'_>, positions: &[usize], gold: &[String]) -> Option<Vec<usize>> {
    if gold.is_empty() {
        return None;
    }
    let words: Vec<usize> = positions.iter().copied().filter(|&p| !view.token(p).sup_flag).collect();
    words
        .windows(gold.len())
        .find(|w| w.iter().zip(gold).all(|(&p, g)| norm_word(&view.token(p).text) == *g))
        .map(<[usize]>::to_vec)
}

fn gold_words(s: &str) -> Vec<String> {
    s.split_whitespace().map(norm_word).collect()
}

/// Gold title positions in the stream: the title words anywhere on page 1,
/// else the largest-font chunk.
fn gold_title_positions(view: &HeaderView<'_>, chunks: &[Chunk], gt: &GroundTruth) -> Vec<usize> {
    let page1: Vec<usize> = (0..view.stream.len()).filter(|&p| chunks[view.stream[p].chunk].page_no == chunks[0].page_no).collect();
    gt.title
        .as_deref()
        .and_then(|t| find_run(view, &page1, &gold_words(t)))
        .unwrap_or_else(|| largest_font_chunk(view, chunks))
}

fn labeled(features: Vec<Vec<String>>, flags: &[bool], on: &str) -> LabeledSequence {
    let labels = flags.iter().map(|&f| if f { on } else { OTHER }.to_string()).collect();
    LabeledSequence::new(features, labels)
}

/// Training sequences for one task from one annotated document.
pub fn training_sequences(
    task: Task,
    doc: &Document,
    gt: &GroundTruth,
    config: &PipelineConfig,
    lex: &Lexicons,
) -> Vec<LabeledSequence> {
    let chunks = chunk_document(doc, &config.chunk);
    if chunks.is_empty() {
        return Vec::new();
    }
    match task {
        Task::Title => {
            let view = HeaderView::new(&chunks, lex);
            let first: Vec<usize> = (0..view.first_chunk_len).collect();
            let gold = gt.title.as_deref().and_then(|t| find_run(&view, &first, &gold_words(t))).unwrap_or_default();
            let flags: Vec<bool> = first.iter().map(|p| gold.contains(p)).collect();
            vec![labeled(view.title_features(), &flags, TARGET)]
        }
        Task::Author => {
            let view = HeaderView::new(&chunks, lex);
            let title = gold_title_positions(&view, &chunks, gt);
            let window = author_window(&view, &title, config.metadata.author_window);
            if window.is_empty() {
                return Vec::new();
            }
            let mut gold = HashSet::new();
            for a in &gt.authors {
                if let Some(run) = find_run(&view, &window, &gold_words(&a.full_name())) {
                    gold.extend(run);
                }
            }
            let flags: Vec<bool> = window.iter().map(|p| gold.contains(p)).collect();
            let title_end_line = title.iter().max().map(|&p| view.stream[p].line);
            vec![labeled(view.author_features(&window, title_end_line, lex), &flags, TARGET)]
        }
        Task::Heading => {
            let mut wanted: HashMap<String, usize> = HashMap::new();
            for h in &gt.section_headings {
                *wanted.entry(norm_text(h)).or_insert(0) += 1;
            }
            let body = body_font_size(&chunks);
            let flags: Vec<bool> = chunks
                .iter()
                .map(|c| match wanted.get_mut(&norm_text(&c.plain_text())) {
                    Some(n) if *n > 0 => {
                        *n -= 1;
                        true
                    }
                    _ => false,
                })
                .collect();
            vec![labeled(chunks.iter().map(|c| heading_features(c, body)).collect(), &flags, HEADING)]
        }
        Task::Footnote => {
            let gold: Vec<String> = gt.footnotes.iter().map(|f| norm_text(f)).filter(|f| !f.is_empty()).collect();
            doc.pages
                .iter()
                .filter_map(|page| {
                    let on_page: Vec<&Chunk> = chunks.iter().filter(|c| c.page_no == page.number).collect();
                    if on_page.is_empty() {
                        return None;
                    }
                    let font = median(page.tokens().filter(|t| !t.sup_flag).map(|t| t.font_size).collect()).unwrap_or(10.0);
                    let features = on_page.iter().map(|c| footnote_features(c, page.height, font)).collect();
                    let flags: Vec<bool> = on_page
                        .iter()
                        .map(|c| {
                            let text = norm_text(&c.plain_text());
                            gold.iter().any(|g| text.contains(g.as_str()))
                        })
                        .collect();
                    Some(labeled(features, &flags, FOOTNOTE))
                })
                .collect()
        }
    }
}

/// Trains one task's model on annotated documents.
pub fn train_task(
    task: Task,
    corpus: &[(Document, GroundTruth)],
    config: &PipelineConfig,
    lex: &Lexicons,
    train_config: &TrainConfig,
) -> Result<CrfModel, CrfError> {
    let data: Vec<LabeledSequence> =
        corpus.iter().flat_map(|(doc, gt)| training_sequences(task, doc, gt, config, lex)).filter(|s| !s.is_empty()).collect();
    train(task.as_str(), &data, &task.labels(), &task.templates(), train_config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing() {
        let cfg = PipelineConfig::parse("# comment\ngap_factor = 2.0\ndehyphenate=yes\nauthor_window = 80\n", Path::new(".")).unwrap();
        assert_eq!((cfg.chunk.gap_factor, cfg.ingest.dehyphenate, cfg.metadata.author_window), (2.0, true, 80));
        assert!(matches!(PipelineConfig::parse("banana = 1", Path::new(".")), Err(ConfigError::UnknownKey(_))));
        assert!(matches!(PipelineConfig::parse("gap_factor", Path::new(".")), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(PipelineConfig::parse("gap_factor = x", Path::new(".")), Err(ConfigError::BadValue { .. })));
        assert!(matches!(PipelineConfig::parse("gap_factor = 0.5", Path::new(".")), Err(ConfigError::Chunk(_))));
        assert!(matches!(PipelineConfig::parse("model.title = /nonexistent/x.crf", Path::new(".")), Err(ConfigError::MissingFile(_))));
    }

    #[test]
    fn pretrained_models_load() {
        let m = Models::pretrained().unwrap();
        assert_eq!(m.title.task_name(), "title");
        assert_eq!(m.footnote.labels(), footnote_labels());
    }

    #[test]
    fn tasks() {
        assert_eq!(Task::parse("heading"), Some(Task::Heading));
        assert_eq!(Task::parse("banana"), None);
    }
}
