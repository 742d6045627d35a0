//! Seeded generator of synthetic articles in the rich XML schema, each with
//! its exact ground truth.

use std::collections::HashSet;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::eval::{GroundTruth, GtAuthor};
use crate::ingest::write_rich_xml;
use crate::model::{Document, Line, Page, Token};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("unknown style {0:?}; expected single-numbered, single-unnumbered, two-column-indexed or two-column-author-year")]
    UnknownStyle(String),
}

/// Layout templates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Style {
    /// One column, arabic section numbers, `n.` references, indexed citations.
    SingleNumbered,
    /// One column, plain headings, hanging-indent references, author-year citations.
    SingleUnnumbered,
    /// Two columns, roman upper-case headings, `[n]` references, indexed citations.
    TwoColumnIndexed,
    /// Two columns, arabic section numbers, hanging-indent references, author-year citations.
    TwoColumnAuthorYear,
}

impl Style {
    pub const ALL: [Style; 4] = [Style::SingleNumbered, Style::SingleUnnumbered, Style::TwoColumnIndexed, Style::TwoColumnAuthorYear];

    pub fn id(self) -> &'static str {
        match self {
            Style::SingleNumbered => "single-numbered",
            Style::SingleUnnumbered => "single-unnumbered",
            Style::TwoColumnIndexed => "two-column-indexed",
            Style::TwoColumnAuthorYear => "two-column-author-year",
        }
    }

    pub fn parse(id: &str) -> Result<Style, SynthError> {
        Style::ALL.into_iter().find(|s| s.id() == id).ok_or_else(|| SynthError::UnknownStyle(id.to_string()))
    }

    fn two_column(self) -> bool {
        matches!(self, Style::TwoColumnIndexed | Style::TwoColumnAuthorYear)
    }

    fn indexed(self) -> bool {
        matches!(self, Style::SingleNumbered | Style::TwoColumnIndexed)
    }
}

/// A generated article.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDocument {
    pub style: Style,
    pub xml: String,
    pub ground_truth: GroundTruth,
}

const PAGE_W: f64 = 612.0;
const PAGE_H: f64 = 792.0;
const SUP_FONT: f64 = 6.0;
const SUP_RAISE: f64 = 3.5;
const BODY: Font = Font { size: 10.0, bold: false, italic: false };
const SMALL: Font = Font { size: 9.0, bold: false, italic: false };
const NOTE: Font = Font { size: 8.0, bold: false, italic: false };
const PARAGRAPH_GAP: f64 = 10.0;

#[derive(Debug, Clone, Copy)]
struct Font {
    size: f64,
    bold: bool,
    italic: bool,
}

impl Font {
    fn pitch(self) -> f64 {
        self.size * 1.2
    }

    fn bold(size: f64) -> Font {
        Font { size, bold: true, italic: false }
    }
}

#[derive(Debug, Clone)]
struct Piece {
    text: String,
    sup: bool,
    /// No space before this piece.
    glue: bool,
    /// Extra horizontal space before this piece.
    pad: f64,
    /// Footnote anchored here.
    note: Option<usize>,
}

impl Piece {
    fn word(text: impl Into<String>) -> Piece {
        Piece { text: text.into(), sup: false, glue: false, pad: 0.0, note: None }
    }

    fn sup(text: impl Into<String>) -> Piece {
        Piece { text: text.into(), sup: true, glue: true, pad: 0.0, note: None }
    }

    fn width(&self, font: Font) -> f64 {
        self.text.chars().count() as f64 * if self.sup { SUP_FONT } else { font.size } * 0.5
    }
}

/// Pieces that are never split across lines.
type Unit = Vec<Piece>;

fn words(text: &str) -> Vec<Unit> {
    text.split_whitespace().map(|w| vec![Piece::word(w)]).collect()
}

fn space(font: Font) -> f64 {
    font.size * 0.25
}

fn pieces_width(pieces: &[&Piece], font: Font) -> f64 {
    pieces
        .iter()
        .enumerate()
        .map(|(i, p)| p.width(font) + p.pad + if i > 0 && !p.glue { space(font) } else { 0.0 })
        .sum()
}

/// Greedy line filling; the first line gets `first_width`, the rest `width`.
fn wrap(units: &[Unit], font: Font, first_width: f64, width: f64) -> Vec<Vec<Piece>> {
    let mut lines: Vec<Vec<Piece>> = Vec::new();
    let mut current: Vec<Piece> = Vec::new();
    for u in units {
        let mut trial: Vec<&Piece> = current.iter().collect();
        trial.extend(u.iter());
        let limit = if lines.is_empty() { first_width } else { width };
        if !current.is_empty() && pieces_width(&trial, font) > limit {
            lines.push(std::mem::take(&mut current));
        }
        current.extend(u.iter().cloned());
    }
    if !current.is_empty() {
        lines.push(current);
    }
    lines
}

struct Layout {
    columns: Vec<(f64, f64)>,
    span: (f64, f64),
    top: f64,
    bottom: f64,
    pages: Vec<Vec<Line>>,
    col: usize,
    col_top: f64,
    y: f64,
    reserve: f64,
    notes: Vec<(String, Vec<Unit>)>,
    pending: Vec<usize>,
}

impl Layout {
    fn new(two_column: bool) -> Layout {
        let (columns, span, bottom) = if two_column {
            (vec![(54.0, 300.0), (312.0, 558.0)], (54.0, 558.0), 738.0)
        } else {
            (vec![(72.0, 540.0)], (72.0, 540.0), 720.0)
        };
        Layout { columns, span, top: 72.0, bottom, pages: vec![Vec::new()], col: 0, col_top: 72.0, y: 72.0, reserve: 0.0, notes: Vec::new(), pending: Vec::new() }
    }

    fn column(&self) -> (f64, f64) {
        self.columns[self.col]
    }

    fn width(&self) -> f64 {
        let (a, b) = self.column();
        b - a
    }

    fn emit(&mut self, pieces: &[Piece], font: Font, x0: f64, y: f64) {
        let page_no = self.pages.len() as u32;
        let mut x = x0;
        let mut tokens = Vec::new();
        for (i, p) in pieces.iter().enumerate() {
            if i > 0 && !p.glue {
                x += space(font);
            }
            x += p.pad;
            let w = p.width(font);
            let (size, top, bold) = if p.sup { (SUP_FONT, y + font.size - SUP_RAISE - SUP_FONT, false) } else { (font.size, y, font.bold) };
            let font_name = match (bold, font.italic) {
                (true, _) => "Times-Bold",
                (false, true) => "Times-Italic",
                _ => "Times-Roman",
            };
            tokens.push(Token {
                text: p.text.clone(),
                page_no,
                x,
                y: top,
                width: w,
                height: size,
                font_size: size,
                bold,
                italic: font.italic && !p.sup,
                font_name: font_name.into(),
                sup_flag: false,
            });
            x += w;
        }
        if !tokens.is_empty() {
            self.pages.last_mut().unwrap().push(Line::new(tokens));
        }
    }

    fn next_column(&mut self) {
        self.flush_notes();
        self.col += 1;
        if self.col == self.columns.len() {
            self.pages.push(Vec::new());
            self.col = 0;
            self.col_top = self.top;
        }
        self.y = self.col_top;
        self.reserve = 0.0;
    }

    fn ensure(&mut self, h: f64) {
        if self.y + h > self.bottom - self.reserve && self.y > self.col_top {
            self.next_column();
        }
    }

    fn gap(&mut self, g: f64) {
        if self.y > self.col_top {
            self.y += g;
        }
    }

    fn note_lines(&self, id: usize) -> Vec<Vec<Piece>> {
        let (marker, body) = &self.notes[id];
        let mut units = body.clone();
        if let Some(first) = units.first_mut() {
            first[0].glue = true;
            first.insert(0, Piece { glue: false, ..Piece::sup(marker.clone()) });
        }
        wrap(&units, NOTE, self.width(), self.width())
    }

    /// Lines of text placed in the current column, moving on when full and
    /// reserving room at the column foot for anchored footnotes.
    fn block(&mut self, units: &[Unit], font: Font) {
        let width = self.width();
        for line in wrap(units, font, width, width) {
            let ids: Vec<usize> = line.iter().filter_map(|p| p.note).collect();
            let extra = |l: &Layout| -> f64 {
                let h: f64 = ids.iter().map(|&i| l.note_lines(i).len() as f64 * NOTE.pitch()).sum();
                if ids.is_empty() {
                    0.0
                } else {
                    h + if l.pending.is_empty() { 20.0 } else { 0.0 }
                }
            };
            if self.y + font.pitch() > self.bottom - self.reserve - extra(self) && self.y > self.col_top {
                self.next_column();
            }
            self.reserve += extra(self);
            self.pending.extend(ids);
            let x = self.column().0;
            let y = self.y;
            self.emit(&line, font, x, y);
            self.y += font.pitch();
        }
    }

    fn indented_block(&mut self, units: &[Unit], font: Font, first_indent: f64, rest_indent: f64) {
        let width = self.width();
        let lines = wrap(units, font, width - first_indent, width - rest_indent);
        self.ensure(font.pitch() * lines.len().min(2) as f64);
        for (i, line) in lines.iter().enumerate() {
            self.ensure(font.pitch());
            let x = self.column().0 + if i == 0 { first_indent } else { rest_indent };
            let y = self.y;
            self.emit(line, font, x, y);
            self.y += font.pitch();
        }
    }

    fn flush_notes(&mut self) {
        if self.pending.is_empty() {
            return;
        }
        let mut y = self.bottom - self.reserve + 20.0;
        let x = self.column().0;
        for id in std::mem::take(&mut self.pending) {
            for line in self.note_lines(id) {
                self.emit(&line, NOTE, x, y);
                y += NOTE.pitch();
            }
        }
        self.reserve = 0.0;
    }

    /// A line centered across the full text width, at `self.y`.
    fn centered(&mut self, units: &[Unit], font: Font, max_width: f64) {
        for line in wrap(units, font, max_width, max_width) {
            let refs: Vec<&Piece> = line.iter().collect();
            let w = pieces_width(&refs, font);
            let x = self.span.0 + (self.span.1 - self.span.0 - w) / 2.0;
            let y = self.y;
            self.emit(&line, font, x, y);
            self.y += font.pitch();
        }
    }

    fn finish(mut self) -> Document {
        self.flush_notes();
        let pages = self
            .pages
            .into_iter()
            .enumerate()
            .filter(|(_, lines)| !lines.is_empty())
            .map(|(i, lines)| Page::new(i as u32 + 1, PAGE_W, PAGE_H, lines))
            .collect();
        Document { source_id: String::new(), pages }
    }
}

const FIRST_NAMES: &[&str] = &[
    "Alice", "Maria", "David", "Robert", "Sunil", "Priya", "Elena", "Marco", "Hiroshi", "Ananya", "Thomas", "Sofia",
    "Daniel", "Laura", "Rahul", "Kavya", "Pierre", "Ingrid", "Lucas", "Fatima", "Oliver", "Hannah", "Mateo", "Yusuf",
    "Chloe", "Arjun", "Nadia", "Stefan", "Irene", "Victor", "Helga", "Ramesh", "Teresa", "Gabriel", "Monika", "Felix",
];

const SURNAMES: &[&str] = &[
    "Anderson", "Bauer", "Castillo", "Dasgupta", "Eriksen", "Fischer", "Gonzalez", "Hoffmann", "Iyengar", "Jansen",
    "Kowalski", "Larsen", "Moreau", "Nakamura", "Okafor", "Petrov", "Quintero", "Rossi", "Schmidt", "Tanaka",
    "Umarov", "Vasquez", "Weber", "Xavier", "Yamamoto", "Zimmer", "Acharya", "Bergman", "Chatterjee", "Dubois",
    "Esposito", "Fontaine", "Gallagher", "Halvorsen", "Ibrahim", "Jovanovic", "Kimura", "Lindqvist", "Mukherjee",
    "Novak", "Oliveira", "Pereira", "Ramirez", "Sato", "Thompson", "Ueda", "Volkov", "Wagner", "Yilmaz", "Zhang",
    "Abbott", "Brennan", "Costa", "Delgado", "Ellison", "Ferreira", "Garrison", "Hayward", "Ishikawa", "Kaufman",
    "Lambert", "Marchetti", "Nielsen", "Osborne", "Pellegrini", "Reinholt", "Sorensen", "Takahashi", "Valente",
    "Whitfield", "Barnett", "Caldwell", "Donovan", "Everett", "Fairbanks", "Goldberg", "Hartmann", "Kessler",
    "Lombardi", "Mendoza", "Norrell", "Pickering", "Rasmussen", "Sinclair", "Tremblay", "Vaughan", "Winslow",
    "Ashworth", "Blackwood", "Crawford", "Dempsey", "Faulkner", "Granger", "Holloway", "Kingsley", "Lockhart",
    "Merriman", "Northcott", "Prescott", "Radcliffe", "Stanton", "Thornton", "Underwood", "Whitaker", "Yardley",
];

struct Institution {
    name: &'static str,
    domain: &'static str,
    city: &'static str,
    country: &'static str,
    company: bool,
}

const INSTITUTIONS: &[Institution] = &[
    Institution { name: "Stanford University", domain: "stanford.edu", city: "Stanford", country: "USA", company: false },
    Institution { name: "University of Edinburgh", domain: "ed.ac.uk", city: "Edinburgh", country: "United Kingdom", company: false },
    Institution { name: "Indian Institute of Technology Kharagpur", domain: "iitkgp.ac.in", city: "Kharagpur", country: "India", company: false },
    Institution { name: "Technical University of Munich", domain: "tum.de", city: "Munich", country: "Germany", company: false },
    Institution { name: "University of Tokyo", domain: "u-tokyo.ac.jp", city: "Tokyo", country: "Japan", company: false },
    Institution { name: "University of Toronto", domain: "utoronto.ca", city: "Toronto", country: "Canada", company: false },
    Institution { name: "Tsinghua University", domain: "tsinghua.edu.cn", city: "Beijing", country: "China", company: false },
    Institution { name: "University of Amsterdam", domain: "uva.nl", city: "Amsterdam", country: "Netherlands", company: false },
    Institution { name: "Sapienza University of Rome", domain: "uniroma1.it", city: "Rome", country: "Italy", company: false },
    Institution { name: "University of Melbourne", domain: "unimelb.edu.au", city: "Melbourne", country: "Australia", company: false },
    Institution { name: "Carnegie Mellon University", domain: "cmu.edu", city: "Pittsburgh", country: "USA", company: false },
    Institution { name: "University of Helsinki", domain: "helsinki.fi", city: "Helsinki", country: "Finland", company: false },
    Institution { name: "Imperial College London", domain: "imperial.ac.uk", city: "London", country: "United Kingdom", company: false },
    Institution { name: "Weizmann Institute of Science", domain: "weizmann.ac.il", city: "Rehovot", country: "Israel", company: false },
    Institution { name: "Microsoft Research", domain: "microsoft.com", city: "Redmond", country: "USA", company: true },
    Institution { name: "IBM Research", domain: "ibm.com", city: "Zurich", country: "Switzerland", company: true },
    Institution { name: "Xerox Research Centre", domain: "xrce.com", city: "Grenoble", country: "France", company: true },
    Institution { name: "Bell Laboratories", domain: "bell-labs.com", city: "Murray Hill", country: "USA", company: true },
];

const DEPARTMENTS: &[(&str, &str)] = &[
    ("Department of Computer Science", "cs"),
    ("Department of Computer Science and Engineering", "cse"),
    ("School of Informatics", "inf"),
    ("Department of Linguistics", "ling"),
    ("Department of Electrical Engineering", "ee"),
];

const SUBDOMAINS: &[&str] = &["cs", "ee", "ling", "math", "stat", "inf"];

const VENUES_EVENTS: &[&str] = &[
    "Workshop on Scholarly Document Processing, Lisbon, Portugal",
    "Conference on Digital Libraries, Vienna, Austria",
    "Symposium on Text Mining, Osaka, Japan",
    "Workshop on Mining Scientific Publications, Toronto, Canada",
];

const TITLE_ADJ: &[&str] = &[
    "Robust", "Scalable", "Hybrid", "Unsupervised", "Efficient", "Adaptive", "Interpretable", "Lightweight", "Generic",
    "Structured", "Multilingual", "Incremental", "Neural", "Probabilistic", "Open",
];

const TITLE_NOUNS: &[&str] = &[
    "Framework", "Extraction", "Metadata", "Citation", "Analysis", "Parsing", "Retrieval", "Segmentation",
    "Documents", "Articles", "Models", "Graphs", "Summarization", "Classification", "Alignment", "Annotation",
    "Recognition", "Labeling", "Networks", "Corpora", "Evaluation", "Discovery", "Indexing", "Recommendation",
];

const TITLE_LINKS: &[&str] = &["for", "of", "with", "in", "from", "over"];

const PROSE: &[&str] = &[
    "approach", "model", "results", "method", "features", "articles", "performance", "system", "extraction", "tokens",
    "sequence", "labels", "training", "evaluation", "accuracy", "baseline", "corpus", "annotations", "documents",
    "patterns", "rules", "framework", "precision", "recall", "errors", "heuristics", "layout", "fonts", "sections",
    "headings", "references", "citations", "authors", "affiliations", "analysis", "improves", "shows", "uses",
    "combines", "extracts", "identifies", "outperforms", "requires", "considers", "handles", "captures", "achieves",
    "reduces", "the", "a", "of", "in", "on", "for", "with", "and", "to", "from", "by", "over", "across", "each",
    "several", "many", "robust", "simple", "generic", "structured", "noisy", "large", "small", "different",
    "consistent", "strong", "weak", "manual", "automatic", "hybrid", "scientific", "textual", "visual", "formats",
    "publishers", "styles", "instances", "parameters", "settings", "variants", "components", "modules", "stages",
    "pipeline", "outputs", "inputs", "quality", "coverage", "scores", "experiments", "observations", "improvement",
    "significantly", "further", "often", "usually", "rarely", "clearly", "mostly", "entire", "single", "double",
    "column", "columns", "page", "pages", "lines", "blocks", "chunks", "spacing", "markers", "entries",
];

const STARTERS: &[&str] = &[
    "We", "Our", "This", "These", "Most", "Several", "Such", "Many", "Each", "Further", "Here", "Overall", "Finally",
    "Moreover", "Specifically", "Notably", "Typically", "Unlike",
];

const REF_TITLE_WORDS: &[&str] = &[
    "learning", "extraction", "of", "metadata", "from", "scholarly", "articles", "citation", "analysis", "for",
    "digital", "libraries", "a", "survey", "on", "parsing", "references", "with", "conditional", "random", "fields",
    "layout", "aware", "segmentation", "scientific", "documents", "large", "scale", "author", "disambiguation",
    "header", "information", "the", "role", "text", "mining", "in", "publication", "networks", "graph", "based",
];

const VENUES: &[&str] = &[
    "In Proceedings of the Joint Conference on Digital Libraries",
    "In Proceedings of the Annual Meeting of the Association for Computational Linguistics",
    "In Proceedings of the International Conference on Document Analysis and Recognition",
    "Journal of the American Society for Information Science",
    "International Journal on Digital Libraries",
    "In Proceedings of the Conference on Information and Knowledge Management",
    "Scientometrics",
    "In Proceedings of the Workshop on Mining Scientific Publications",
];

const URL_HOSTS: &[&str] = &["github.com", "www.example.org", "nlp.example.edu", "code.google.com", "bitbucket.org", "sourceforge.net"];
const URL_WORDS: &[&str] = &[
    "parser", "toolkit", "tagger", "crfsuite", "extractor", "segmenter", "labeler", "framework", "scholar", "citeseer",
    "grobid", "pdfminer", "annotator", "pipeline", "release", "project", "software", "models",
];
const DATASET_URL_FORMS: &[&str] = &[
    "http://{h}/datasets/{w}",
    "https://{h}/data/{w}.zip",
    "http://dumps.{h}/{w}",
    "https://{h}/{w}/datasets",
    "http://{h}/open-data/{w}",
];

const METHOD_NAMES: &[&str] = &[
    "Proposed Approach", "System Overview", "Model Architecture", "Feature Design", "Our Framework",
    "Extraction Pipeline", "Problem Formulation", "Experimental Setup",
];
const SUBSECTION_NAMES: &[&str] = &[
    "Preprocessing", "Feature Extraction", "Sequence Labeling", "Rule Design", "Parameter Settings", "Error Analysis",
    "Training Procedure", "Baselines",
];
const DATASET_NAMES: &[&str] = &["Datasets", "Dataset", "Data Sets", "Corpus"];
const RESULT_NAMES: &[&str] = &["Results", "Evaluation", "Results and Analysis"];
const CONCLUSION_NAMES: &[&str] = &["Conclusion", "Conclusions", "Conclusion and Future Work"];

fn to_roman(mut n: usize) -> String {
    let table = [(10, "X"), (9, "IX"), (5, "V"), (4, "IV"), (1, "I")];
    let mut s = String::new();
    for (v, r) in table {
        while n >= v {
            s.push_str(r);
            n -= v;
        }
    }
    s
}

fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    c.next().map(|f| f.to_uppercase().chain(c).collect()).unwrap_or_default()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Intro,
    Related,
    Datasets,
    Method,
    Results,
    Discussion,
    Conclusion,
    Ack,
}

struct RefEntry {
    /// (first name, surname)
    authors: Vec<(String, String)>,
    year: i32,
    suffix: Option<char>,
    title: String,
    venue: String,
    pages: (u32, u32),
}

struct Builder<'r> {
    rng: &'r mut ChaCha8Rng,
    style: Style,
    gt: GroundTruth,
    lay: Layout,
    refs: Vec<RefEntry>,
    urls: HashSet<String>,
    figures: usize,
    tables: usize,
}

impl Builder<'_> {
    fn pick<'a>(&mut self, xs: &'a [&'a str]) -> &'a str {
        xs.choose(self.rng).unwrap()
    }

    fn range(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.random_range(lo..=hi)
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }

    fn filler(&mut self, n: usize) -> Vec<Unit> {
        (0..n).map(|_| vec![Piece::word(self.pick(PROSE))]).collect()
    }

    fn sentence(&mut self, body: Vec<Unit>) -> Vec<Unit> {
        let mut s = vec![vec![Piece::word(self.pick(STARTERS))]];
        s.extend(body);
        if let Some(last) = s.last_mut().and_then(|u| u.last_mut()) {
            last.text.push('.');
        }
        s
    }

    fn plain_sentence(&mut self) -> Vec<Unit> {
        let n = self.range(7, 14);
        let body = self.filler(n);
        self.sentence(body)
    }

    fn unique_url(&mut self, dataset: bool) -> String {
        loop {
            let h = self.pick(URL_HOSTS);
            let w = self.pick(URL_WORDS);
            let w2 = self.pick(URL_WORDS);
            let url = if dataset {
                self.pick(DATASET_URL_FORMS).replace("{h}", h).replace("{w}", w)
            } else if self.chance(0.5) {
                format!("https://{h}/{w}/{w2}")
            } else {
                format!("http://{h}/{w}")
            };
            let lower = url.to_lowercase();
            let tokenish = ["datasets", "data", "dumps"].iter().any(|t| lower.contains(t));
            if tokenish == dataset && self.urls.insert(url.clone()) {
                return url;
            }
        }
    }

    fn record_url(&mut self, url: &str, dataset: bool) {
        self.gt.urls.push(url.to_string());
        if dataset {
            self.gt.dataset_urls.push(url.to_string());
        }
    }

    fn url_sentence(&mut self, url: &str) -> Vec<Unit> {
        let n = self.range(3, 7);
        let mut body = self.filler(n);
        body.push(vec![Piece::word(*["at", "from", "via"].choose(self.rng).unwrap())]);
        body.push(vec![Piece::word(url)]);
        self.sentence(body)
    }

    fn footnote(&mut self, text: Vec<Unit>) -> Piece {
        let id = self.lay.notes.len();
        let marker = (id + 1).to_string();
        let plain: Vec<String> = text.iter().flat_map(|u| u.iter().map(|p| p.text.clone())).collect();
        self.gt.footnotes.push(plain.join(" "));
        self.lay.notes.push((marker.clone(), text));
        Piece { note: Some(id), ..Piece::sup(marker) }
    }

    fn footnote_sentence(&mut self, url: Option<&str>) -> Vec<Unit> {
        let note_text = match url {
            Some(u) => {
                let lead = *["Available at", "Released at", "See", "Downloaded from"].choose(self.rng).unwrap();
                let mut t = words(lead);
                t.push(vec![Piece::word(u)]);
                t
            }
            None => {
                let n = self.range(6, 14);
                let mut t = vec![vec![Piece::word(self.pick(STARTERS))]];
                t.extend(self.filler(n));
                t.last_mut().unwrap()[0].text.push('.');
                t
            }
        };
        let marker = self.footnote(note_text);
        let mut s = self.plain_sentence();
        s.last_mut().unwrap().push(marker);
        s
    }

    fn surname(&self, r: usize) -> &str {
        &self.refs[r].authors[0].1
    }

    fn year_text(&self, r: usize) -> String {
        let e = &self.refs[r];
        format!("{}{}", e.year, e.suffix.map(String::from).unwrap_or_default())
    }

    /// A citation of reference `r`: its printed units, matched text and
    /// whether it is parenthetical.
    fn citation(&mut self, rs: &[usize]) -> (Vec<Unit>, Vec<String>, bool) {
        let r = rs[0];
        let n_auth = self.refs[r].authors.len();
        let sur = self.surname(r).to_string();
        let second = self.refs[r].authors.get(1).map(|a| a.1.clone()).unwrap_or_default();
        let (text, parens) = if self.style.indexed() {
            let idx: Vec<String> = rs.iter().map(|i| (i + 1).to_string()).collect();
            if rs.len() > 1 {
                (format!("[{}]", idx.join(", ")), true)
            } else {
                let i = &idx[0];
                let choices: &[u8] = if n_auth >= 3 { &[1, 3, 16] } else { &[2, 16] };
                match *choices.choose(self.rng).unwrap() {
                    1 => (format!("{sur} et al. [{i}]"), false),
                    2 => (format!("{sur} [{i}]"), false),
                    3 => (format!("{sur} et al.[{i}]"), false),
                    _ => (format!("[{i}]"), true),
                }
            }
        } else {
            let y = self.year_text(r);
            let has_suffix = self.refs[r].suffix.is_some();
            let choices: &[u8] = match n_auth {
                1 => &[13, 14, 15],
                2 => &[9, 10, 11, 12],
                _ if has_suffix => &[4, 5, 6, 7, 8],
                _ => &[5, 6, 7, 8],
            };
            match *choices.choose(self.rng).unwrap() {
                4 | 5 => (format!("{sur} et al., {y}"), true),
                6 => (format!("{sur} et al., ({y})"), false),
                7 => (format!("{sur} et al. {y}"), false),
                8 => (format!("{sur} et al. ({y})"), false),
                9 => (format!("{sur} and {second} ({y})"), false),
                10 => (format!("{sur} & {second} ({y})"), false),
                11 => (format!("{sur} and {second}, {y}"), true),
                12 => (format!("{sur} & {second}, {y}"), true),
                13 => (format!("{sur}, {y}"), true),
                14 => (format!("{sur} {y}"), true),
                _ => {
                    if self.chance(0.5) {
                        (format!("{sur} ({y})"), false)
                    } else {
                        (format!("{sur}, ({y})"), false)
                    }
                }
            }
        };
        for &i in rs {
            self.gt.cite_refs.push((text.clone(), i + 1));
        }
        self.gt.citations.push(text.clone());
        let unit: Unit = text.split(' ').map(Piece::word).collect();
        (vec![unit], vec![text], parens)
    }

    fn citation_sentence(&mut self) -> Vec<Unit> {
        let n = self.refs.len();
        let first = self.range(0, n - 1);
        let multi = self.style.indexed() && self.chance(0.2);
        let rs = if multi {
            let mut other = self.range(0, n - 1);
            if other == first {
                other = (first + 1) % n;
            }
            let mut v = vec![first, other];
            v.sort();
            v
        } else {
            vec![first]
        };
        let (mut cite, _, parens) = self.citation(&rs);
        let k = self.range(3, 7);
        let mut body = self.filler(k);
        if parens {
            if !self.style.indexed() {
                cite[0][0].text.insert(0, '(');
                cite[0].last_mut().unwrap().text.push(')');
            }
            body.extend(cite);
        } else {
            body.push(vec![Piece::word(*["by", "in", "following"].choose(self.rng).unwrap())]);
            body.extend(cite);
            let m = self.range(2, 5);
            body.extend(self.filler(m));
        }
        self.sentence(body)
    }

    fn paragraph(&mut self, sentences: Vec<Vec<Unit>>) {
        let units: Vec<Unit> = sentences.into_iter().flatten().collect();
        self.lay.gap(PARAGRAPH_GAP);
        self.lay.block(&units, BODY);
    }

    fn prose_paragraph(&mut self, cite_p: f64) -> Vec<Vec<Unit>> {
        let n = self.range(4, 8);
        (0..n).map(|_| if self.chance(cite_p) { self.citation_sentence() } else { self.plain_sentence() }).collect()
    }

    fn heading(&mut self, text: &str, size: f64) {
        self.gt.section_headings.push(text.to_string());
        self.lay.gap(14.0);
        self.lay.ensure(size * 1.2 + 3.0 * BODY.pitch());
        self.lay.block(&words(text), Font::bold(size));
        self.lay.y += 2.0;
    }

    fn figure(&mut self) {
        self.figures += 1;
        let n = self.range(6, 14);
        let mut units = vec![vec![Piece::word("Figure")], vec![Piece::word(format!("{}:", self.figures))]];
        units.push(vec![Piece::word(capitalize(self.pick(PROSE)))]);
        units.extend(self.filler(n));
        units.last_mut().unwrap()[0].text.push('.');
        let text: Vec<String> = units.iter().map(|u| u[0].text.clone()).collect();
        self.gt.figure_headings.push(text.join(" "));
        let h = self.range(60, 110) as f64;
        self.lay.gap(PARAGRAPH_GAP);
        self.lay.ensure(h + 3.0 * SMALL.pitch());
        self.lay.y += h;
        self.lay.block(&units, SMALL);
        self.lay.y += 6.0;
    }

    fn table(&mut self) {
        self.tables += 1;
        let n = self.range(5, 10);
        let mut units = vec![vec![Piece::word("Table")], vec![Piece::word(format!("{}:", self.tables))]];
        units.push(vec![Piece::word(capitalize(self.pick(PROSE)))]);
        units.extend(self.filler(n));
        units.last_mut().unwrap()[0].text.push('.');
        let text: Vec<String> = units.iter().map(|u| u[0].text.clone()).collect();
        self.gt.table_headings.push(text.join(" "));
        let rows = self.range(3, 5);
        self.lay.gap(PARAGRAPH_GAP);
        self.lay.ensure(3.0 * SMALL.pitch() + (rows + 1) as f64 * SMALL.pitch());
        self.lay.block(&units, Font::bold(9.0));
        let header = ["Method", "Precision", "Recall", "F-score"];
        let cell_w = self.lay.width() / 4.0;
        let mut grid: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
        let systems = ["Baseline", "Rules", "Labeler", "Hybrid", "Combined", "Oracle"];
        for r in 0..rows {
            let mut row = vec![systems[r % systems.len()].to_string()];
            for _ in 0..3 {
                row.push(format!("0.{}", self.range(40, 99)));
            }
            grid.push(row);
        }
        for row in grid {
            self.lay.ensure(SMALL.pitch());
            let x0 = self.lay.column().0;
            let y = self.lay.y;
            let mut tokens_line: Vec<Piece> = Vec::new();
            let mut x = 0.0;
            for (c, cell) in row.iter().enumerate() {
                let p = Piece::word(cell.clone());
                let target = c as f64 * cell_w;
                let pad = if c == 0 { 0.0 } else { target - x - space(SMALL) };
                x = target + p.width(SMALL);
                tokens_line.push(Piece { pad, ..p });
            }
            self.lay.emit(&tokens_line, SMALL, x0, y);
            self.lay.y += SMALL.pitch();
        }
        self.lay.y += 6.0;
    }
}

fn section_plan(b: &mut Builder<'_>) -> Vec<Kind> {
    let mut plan = vec![Kind::Intro];
    if b.chance(0.6) {
        plan.push(Kind::Related);
    }
    if b.chance(0.6) {
        plan.push(Kind::Datasets);
    }
    let methods = b.range(1, 2);
    plan.extend(std::iter::repeat_n(Kind::Method, methods));
    plan.push(Kind::Results);
    if b.chance(0.4) {
        plan.push(Kind::Discussion);
    }
    plan.push(Kind::Conclusion);
    if b.chance(0.4) {
        plan.push(Kind::Ack);
    }
    while plan.len() > 8 {
        let pos = plan.iter().position(|k| matches!(k, Kind::Discussion | Kind::Related)).unwrap_or(1);
        plan.remove(pos);
    }
    plan
}

fn make_refs(b: &mut Builder<'_>) {
    let n = b.range(12, 24);
    let mut pool: Vec<&str> = SURNAMES.to_vec();
    pool.shuffle(b.rng);
    let mut pool = pool.into_iter();
    for _ in 0..n {
        let k = *[1usize, 2, 2, 3, 3, 4].choose(b.rng).unwrap();
        let authors = (0..k).map(|_| (b.pick(FIRST_NAMES).to_string(), pool.next().unwrap().to_string())).collect();
        let year = b.rng.random_range(1992..=2016);
        let tl = b.range(5, 10);
        let mut title: Vec<String> = (0..tl).map(|_| b.pick(REF_TITLE_WORDS).to_string()).collect();
        title[0] = capitalize(&title[0]);
        let venue = b.pick(VENUES).to_string();
        let p0 = b.rng.random_range(1..400);
        let pages = (p0, p0 + b.rng.random_range(5..15));
        b.refs.push(RefEntry { authors, year, suffix: None, title: title.join(" "), venue, pages });
    }
    if !b.style.indexed() && b.chance(0.5) {
        // a second work by the same first author in the same year
        let src = b.range(0, n - 1);
        let tl = b.range(5, 10);
        let mut title: Vec<String> = (0..tl).map(|_| b.pick(REF_TITLE_WORDS).to_string()).collect();
        title[0] = capitalize(&title[0]);
        let first = b.refs[src].authors[0].clone();
        let mut authors = vec![first];
        let extra = b.range(0, 2);
        authors.extend((0..extra).map(|_| (b.pick(FIRST_NAMES).to_string(), pool.next().unwrap().to_string())));
        let venue = b.pick(VENUES).to_string();
        let year = b.refs[src].year;
        b.refs[src].suffix = Some('a');
        b.refs.push(RefEntry { authors, year, suffix: Some('b'), title: title.join(" "), venue, pages: (10, 20) });
    }
    if !b.style.indexed() {
        b.refs.sort_by(|x, y| (&x.authors[0].1, x.year, x.suffix).cmp(&(&y.authors[0].1, y.year, y.suffix)));
    }
}

fn ref_text(style: Style, i: usize, r: &RefEntry) -> String {
    let initial = |f: &str| format!("{}.", f.chars().next().unwrap());
    let names: Vec<String> = if style.indexed() {
        r.authors.iter().map(|(f, l)| format!("{} {l}", initial(f))).collect()
    } else {
        r.authors
            .iter()
            .enumerate()
            .map(|(k, (f, l))| if k == 0 { format!("{l}, {}", initial(f)) } else { format!("{} {l}", initial(f)) })
            .collect()
    };
    let authors = match names.len() {
        1 => names[0].clone(),
        2 => format!("{} and {}", names[0], names[1]),
        _ => format!("{}, and {}", names[..names.len() - 1].join(", "), names[names.len() - 1]),
    };
    let (p0, p1) = r.pages;
    match style {
        Style::TwoColumnIndexed => format!("[{}] {authors}. {}. {}, pages {p0}-{p1}, {}.", i + 1, r.title, r.venue, r.year),
        Style::SingleNumbered => format!("{}. {authors}. {}. {}, pages {p0}-{p1}, {}.", i + 1, r.title, r.venue, r.year),
        _ => {
            let suffix = r.suffix.map(String::from).unwrap_or_default();
            format!("{authors}. {}{suffix}. {}. {}, pages {p0}-{p1}.", r.year, r.title, r.venue)
        }
    }
}

fn header(b: &mut Builder<'_>) {
    if b.chance(0.3) {
        let event = b.pick(VENUES_EVENTS);
        b.lay.y = 40.0;
        b.lay.centered(&words(event), Font { size: 8.0, bold: false, italic: true }, 460.0);
    }
    // title
    let mut title: Vec<String> = Vec::new();
    match b.range(0, 2) {
        0 => {
            title.push(b.pick(TITLE_ADJ).into());
            title.push(b.pick(TITLE_NOUNS).into());
            title.push(b.pick(TITLE_NOUNS).into());
            title.push(b.pick(TITLE_LINKS).into());
            title.push(b.pick(TITLE_NOUNS).into());
        }
        1 => {
            title.push(format!("{}:", b.pick(TITLE_NOUNS)));
            title.push("A".into());
            title.push(b.pick(TITLE_ADJ).into());
            title.push(b.pick(TITLE_NOUNS).into());
            title.push(b.pick(TITLE_LINKS).into());
            title.push(b.pick(TITLE_ADJ).into());
            title.push(b.pick(TITLE_NOUNS).into());
        }
        _ => {
            title.push("Towards".into());
            title.push(b.pick(TITLE_ADJ).into());
            title.push(b.pick(TITLE_NOUNS).into());
            title.push(b.pick(TITLE_LINKS).into());
            title.push(b.pick(TITLE_NOUNS).into());
            title.push(b.pick(TITLE_NOUNS).into());
            title.push(b.pick(TITLE_LINKS).into());
            title.push(b.pick(TITLE_ADJ).into());
            title.push(b.pick(TITLE_NOUNS).into());
        }
    }
    let title = title.join(" ");
    b.gt.title = Some(title.clone());
    let size = [16.0, 17.0, 18.0][b.range(0, 2)];
    b.lay.y = 76.0;
    b.lay.centered(&words(&title), Font::bold(size), 430.0);
    b.lay.y += 14.0;

    // authors and affiliations
    let grid = b.chance(0.35);
    let n_auth = if grid { b.range(2, 4) } else { b.range(2, 5) };
    let n_aff = if grid { 1 } else { b.range(1, n_auth.min(3)) };
    let mut inst: Vec<usize> = (0..INSTITUTIONS.len()).collect();
    inst.shuffle(b.rng);
    inst.truncate(n_aff);
    let mut firsts = FIRST_NAMES.to_vec();
    firsts.shuffle(b.rng);
    let mut lasts = SURNAMES.to_vec();
    lasts.shuffle(b.rng);

    struct Aff {
        lines: Vec<String>,
        domain: String,
    }
    let affs: Vec<Aff> = inst
        .iter()
        .map(|&i| {
            let it = &INSTITUTIONS[i];
            let place = format!("{}, {}", it.city, it.country);
            if it.company {
                Aff { lines: vec![format!("{}, {place}", it.name)], domain: it.domain.into() }
            } else {
                let (dept, sub) = *DEPARTMENTS.choose(b.rng).unwrap();
                let domain = if b.chance(0.5) { format!("{sub}.{}", it.domain) } else { it.domain.to_string() };
                let lines = if b.chance(0.4) {
                    vec![dept.to_string(), format!("{}, {place}", it.name)]
                } else {
                    vec![format!("{dept}, {}, {place}", it.name)]
                };
                Aff { lines, domain }
            }
        })
        .collect();

    struct Author {
        name: GtAuthor,
        aff: usize,
        user: String,
    }
    let authors: Vec<Author> = (0..n_auth)
        .map(|k| {
            let first = firsts[k].to_string();
            let last = lasts[k].to_string();
            let middle = if b.chance(0.25) { format!("{}.", (b'A' + b.range(0, 25) as u8) as char) } else { String::new() };
            let aff = if k < n_aff { k } else { b.range(0, n_aff - 1) };
            let (fl, ll) = (first.to_lowercase(), last.to_lowercase());
            let user = match b.range(0, 3) {
                0 => ll.clone(),
                1 => fl.clone(),
                2 => format!("{fl}.{ll}"),
                _ => format!("{}{ll}", &fl[..1]),
            };
            Author { name: GtAuthor { first, middle, last }, aff, user }
        })
        .collect();

    let mut name_units: Vec<Unit> = Vec::new();
    for (k, a) in authors.iter().enumerate() {
        let mut unit: Unit = Vec::new();
        if !grid && k + 1 == n_auth && n_auth > 1 {
            name_units.push(vec![Piece::word("and")]);
        }
        for w in [&a.name.first, &a.name.middle, &a.name.last] {
            if !w.is_empty() {
                unit.push(Piece::word(w.clone()));
            }
        }
        if grid && k > 0 {
            unit[0].pad = 30.0;
        }
        if !grid {
            let mut marker = (a.aff + 1).to_string();
            if k + 1 < n_auth {
                marker.push(',');
            }
            unit.push(Piece::sup(marker));
        }
        name_units.push(unit);
        b.gt.authors.push(a.name.clone());
    }
    b.lay.centered(&name_units, Font { size: 11.0, bold: false, italic: false }, 470.0);
    b.lay.y += 10.0;

    for (k, aff) in affs.iter().enumerate() {
        b.gt.affiliations.push(aff.lines.join(" "));
        for (li, line) in aff.lines.iter().enumerate() {
            let mut units = words(line);
            if !grid && li == 0 {
                let mut m = Piece::sup((k + 1).to_string());
                m.glue = false;
                units[0][0].glue = true;
                units[0].insert(0, m);
            }
            b.lay.centered(&units, Font { size: 10.0, bold: false, italic: false }, 480.0);
        }
    }
    b.lay.y += 4.0;

    // emails grouped by domain
    let with_email: Vec<usize> = (0..n_auth).filter(|_| b.chance(0.9)).collect();
    let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
    for &k in &with_email {
        let d = affs[authors[k].aff].domain.clone();
        match groups.iter_mut().find(|(g, _)| *g == d) {
            Some((_, v)) => v.push(k),
            None => groups.push((d, vec![k])),
        }
    }
    let mut email_units: Vec<Unit> = Vec::new();
    for (domain, members) in groups {
        let pattern = if members.len() == 1 { 0 } else { b.range(0, 3) };
        let users: Vec<&str> = members.iter().map(|&k| authors[k].user.as_str()).collect();
        let addresses: Vec<String> = match pattern {
            3 => {
                let subs: Vec<String> = {
                    let mut s = SUBDOMAINS.to_vec();
                    s.shuffle(b.rng);
                    s.iter().take(members.len()).map(|x| x.to_string()).collect()
                };
                let base = domain.split_once('.').filter(|(h, _)| DEPARTMENTS.iter().any(|d| d.1 == *h)).map_or(domain.as_str(), |(_, r)| r);
                let inner: Vec<String> = users.iter().zip(&subs).map(|(u, s)| format!("{u}@{s}")).collect();
                email_units.push(format!("[{}].{base}", inner.join(", ")).split(' ').map(Piece::word).collect());
                users.iter().zip(&subs).map(|(u, s)| format!("{u}@{s}.{base}")).collect()
            }
            0 => {
                for u in &users {
                    email_units.push(vec![Piece::word(format!("{u}@{domain}"))]);
                }
                users.iter().map(|u| format!("{u}@{domain}")).collect()
            }
            p => {
                let (open, close) = if p == 1 { ('{', '}') } else { ('[', ']') };
                email_units.push(format!("{open}{}{close}@{domain}", users.join(", ")).split(' ').map(Piece::word).collect());
                users.iter().map(|u| format!("{u}@{domain}")).collect()
            }
        };
        for (&k, addr) in members.iter().zip(addresses) {
            b.gt.emails.push(addr.clone());
            b.gt.author_emails.push((authors[k].name.full_name(), addr));
        }
    }
    if !email_units.is_empty() {
        b.lay.centered(&email_units, Font { size: 9.0, bold: false, italic: false }, 480.0);
    }
    b.lay.y += 20.0;
    b.lay.col_top = b.lay.y;
}

fn body(b: &mut Builder<'_>) {
    let plan = section_plan(b);
    let numbered = matches!(b.style, Style::SingleNumbered | Style::TwoColumnAuthorYear);
    let roman = b.style == Style::TwoColumnIndexed;
    let head_size = if roman { 11.0 } else { 12.0 };

    b.heading("Abstract", head_size);
    let abs = (0..b.range(4, 6)).map(|_| b.plain_sentence()).collect();
    b.paragraph(abs);

    let n_fig = b.range(1, 3);
    let n_tab = b.range(1, 2);
    let mut method_names = METHOD_NAMES.to_vec();
    method_names.shuffle(b.rng);
    let mut method_names = method_names.into_iter();
    let mut sub_names = SUBSECTION_NAMES.to_vec();
    sub_names.shuffle(b.rng);
    let mut sub_names = sub_names.into_iter();
    let has_datasets = plan.contains(&Kind::Datasets);
    let mut number = 0;
    let mut other_notes = b.range(0, 2);
    let mut plain_urls = b.range(1, 3);
    let mut stray_dataset_url = !has_datasets || b.chance(0.3);

    for (si, kind) in plan.iter().copied().enumerate() {
        let name = match kind {
            Kind::Intro => "Introduction".to_string(),
            Kind::Related => "Related Work".to_string(),
            Kind::Datasets => b.pick(DATASET_NAMES).to_string(),
            Kind::Method => method_names.next().unwrap().to_string(),
            Kind::Results => b.pick(RESULT_NAMES).to_string(),
            Kind::Discussion => "Discussion".to_string(),
            Kind::Conclusion => b.pick(CONCLUSION_NAMES).to_string(),
            Kind::Ack => ["Acknowledgments", "Acknowledgements", "Acknowledgment"][b.range(0, 2)].to_string(),
        };
        let text = if kind == Kind::Ack {
            if roman { name.to_uppercase() } else { name }
        } else {
            number += 1;
            if roman {
                format!("{}. {}", to_roman(number), name.to_uppercase())
            } else if numbered {
                format!("{number} {name}")
            } else {
                name
            }
        };
        b.heading(&text, head_size);

        let cite_p = match kind {
            Kind::Related => 0.7,
            Kind::Intro => 0.5,
            Kind::Ack => 0.0,
            Kind::Conclusion => 0.1,
            _ => 0.25,
        };
        let paragraphs = match kind {
            Kind::Ack => 1,
            Kind::Conclusion | Kind::Discussion => b.range(2, 3),
            _ => b.range(4, 7),
        };
        for p in 0..paragraphs {
            let mut sents = b.prose_paragraph(cite_p);
            match kind {
                Kind::Datasets if p == 0 => {
                    let tokenish = b.chance(0.3);
                    let u = b.unique_url(tokenish);
                    b.record_url(&u, true);
                    sents.insert(1, b.url_sentence(&u));
                }
                Kind::Datasets if p == 1 => {
                    let u = b.unique_url(false);
                    b.record_url(&u, true);
                    sents.push(b.footnote_sentence(Some(&u)));
                }
                Kind::Method | Kind::Results | Kind::Intro if p == 1 && plain_urls > 0 => {
                    plain_urls -= 1;
                    let u = b.unique_url(false);
                    b.record_url(&u, false);
                    if b.chance(0.5) {
                        sents.insert(1, b.url_sentence(&u));
                    } else {
                        sents.push(b.footnote_sentence(Some(&u)));
                    }
                }
                Kind::Method if p == 0 && stray_dataset_url => {
                    stray_dataset_url = false;
                    let u = b.unique_url(true);
                    b.record_url(&u, true);
                    sents.push(b.url_sentence(&u));
                }
                Kind::Intro | Kind::Method | Kind::Discussion if other_notes > 0 && p == 0 => {
                    other_notes -= 1;
                    sents.push(b.footnote_sentence(None));
                }
                _ => {}
            }
            b.paragraph(sents);
            if kind == Kind::Method || kind == Kind::Results {
                if b.figures < n_fig && b.chance(0.6) {
                    b.figure();
                } else if b.tables < n_tab && b.chance(0.5) {
                    b.table();
                }
            }
        }
        if kind == Kind::Method && numbered && b.chance(0.5) {
            for k in 1..=b.range(1, 2) {
                let sub = sub_names.next().unwrap();
                b.heading(&format!("{number}.{k} {sub}"), 11.0);
                for _ in 0..b.range(2, 3) {
                    let sents = b.prose_paragraph(cite_p);
                    b.paragraph(sents);
                }
            }
        }
        let last_body = plan[si + 1..].iter().all(|k| matches!(k, Kind::Conclusion | Kind::Ack | Kind::Discussion));
        if kind == Kind::Results || last_body {
            while b.figures < n_fig {
                b.figure();
            }
            while b.tables < n_tab {
                b.table();
            }
        }
    }

    b.heading(if roman { "REFERENCES" } else { "References" }, head_size);
    let style = b.style;
    let texts: Vec<String> = b.refs.iter().enumerate().map(|(i, r)| ref_text(style, i, r)).collect();
    for t in texts {
        b.gt.references.push(t.clone());
        b.lay.y += 2.0;
        b.lay.indented_block(&words(&t), SMALL, 0.0, 10.0);
    }
}

/// One synthetic article of the given style. Equal inputs give
/// byte-identical output.
pub fn generate_document(style: Style, seed: u64) -> SyntheticDocument {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = Builder {
        rng: &mut rng,
        style,
        gt: GroundTruth::default(),
        lay: Layout::new(style.two_column()),
        refs: Vec::new(),
        urls: HashSet::new(),
        figures: 0,
        tables: 0,
    };
    make_refs(&mut b);
    header(&mut b);
    body(&mut b);
    let Builder { gt, lay, .. } = b;
    let doc = lay.finish();
    SyntheticDocument { style, xml: write_rich_xml(&doc), ground_truth: gt }
}

/// `n` articles cycling through the styles, with ids `doc-0000`, ...
pub fn generate_corpus(n: usize, seed: u64) -> Vec<(String, SyntheticDocument)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let s: u64 = rng.random();
            (format!("doc-{i:04}"), generate_document(Style::ALL[i % Style::ALL.len()], s))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_rich_xml;

    #[test]
    fn styles_parse() {
        for s in Style::ALL {
            assert_eq!(Style::parse(s.id()), Ok(s));
        }
        assert!(Style::parse("banana").is_err());
    }

    #[test]
    fn generation_is_deterministic_and_parses() {
        for s in Style::ALL {
            let a = generate_document(s, 7);
            assert_eq!(a, generate_document(s, 7));
            let (doc, report) = parse_rich_xml(a.xml.as_bytes()).unwrap();
            assert_eq!(report.token_count, doc.token_count());
            assert!(doc.pages.len() >= 2, "{s:?} has {} pages", doc.pages.len());
            let title = a.ground_truth.title.clone().unwrap();
            assert!(!title.is_empty());
            assert!(a.ground_truth.references.len() >= 8);
            assert!(!a.ground_truth.citations.is_empty());
        }
    }

    #[test]
    fn roman_numerals() {
        assert_eq!(to_roman(4), "IV");
        assert_eq!(to_roman(9), "IX");
    }
}
