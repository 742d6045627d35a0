//! Feature extraction for the four sequence-labeling tasks.
//!
//! Title and author models label tokens; heading and footnote models label
//! chunks. The same builders serve training and extraction.

use crate::crf::{decile, FeatureKind, FeatureTemplate, FeatureVector};
use crate::chunker::style_run_end;
use crate::lexicon::{trim_punct, Lexicon};
use crate::model::{median, Chunk, Token};

pub const OTHER: &str = "OTHER";
pub const TARGET: &str = "TARGET";
pub const HEADING: &str = "HEADING";
pub const FOOTNOTE: &str = "FOOTNOTE";

pub fn title_labels() -> Vec<String> {
    vec![OTHER.into(), TARGET.into()]
}

pub fn heading_labels() -> Vec<String> {
    vec![OTHER.into(), HEADING.into()]
}

pub fn footnote_labels() -> Vec<String> {
    vec![OTHER.into(), FOOTNOTE.into()]
}

fn tpl(id: &str, kind: FeatureKind, description: &str) -> FeatureTemplate {
    FeatureTemplate::new(id, kind, description)
}

pub fn title_templates() -> Vec<FeatureTemplate> {
    use FeatureKind::*;
    vec![
        tpl("bias", Boolean, "always on"),
        tpl("bold", Boolean, "token is bold"),
        tpl("sup", Boolean, "token is a superscript"),
        tpl("pos", BucketedReal, "position in the document token stream"),
        tpl("cpos", BucketedReal, "position within the first chunk"),
        tpl("size", BucketedReal, "font size relative to the largest on page 1"),
        tpl("case", Categorical, "case of the first character"),
        tpl("bold_size", Categorical, "boldness and relative size together"),
        tpl("case_next", Categorical, "own case with the next token's case"),
        tpl("case_prev", Categorical, "own case with the previous token's case"),
    ]
}

pub fn author_templates() -> Vec<FeatureTemplate> {
    use FeatureKind::*;
    let mut t = title_templates();
    t.extend([
        tpl("italic", Boolean, "token is italic"),
        tpl("name_word", Boolean, "capitalized alphabetic word or initial"),
        tpl("stop", Boolean, "function word"),
        tpl("cue", Boolean, "affiliation cue word or country"),
        tpl("comma", Boolean, "token ends with a comma"),
        tpl("next_sup", Boolean, "next token on the line is a superscript"),
        tpl("line_cue", Boolean, "line holds an affiliation cue"),
        tpl("line_at", Boolean, "line holds an @"),
        tpl("line_digit", Boolean, "line holds a digit"),
        tpl("line_len", Categorical, "tokens on the line, bucketed"),
        tpl("title_line", Categorical, "lines since the end of the title"),
    ]);
    t
}

pub fn heading_templates() -> Vec<FeatureTemplate> {
    use FeatureKind::*;
    vec![
        tpl("bias", Boolean, "always on"),
        tpl("first", Categorical, "first token, lowercased"),
        tpl("second", Categorical, "second token, lowercased"),
        tpl("bold", BucketedReal, "average boldness of the chunk"),
        tpl("size", BucketedReal, "average font size relative to twice the body size"),
        tpl("larger", Boolean, "average font size above the body size"),
        tpl("enum", Categorical, "enumeration kind and depth of the first token"),
        tpl("len", Categorical, "token count, bucketed"),
        tpl("lines", Categorical, "line count, bucketed"),
        tpl("caps", Boolean, "every word is upper case"),
        tpl("period", Boolean, "last token ends with a period"),
    ]
}

pub fn footnote_templates() -> Vec<FeatureTemplate> {
    use FeatureKind::*;
    vec![
        tpl("bias", Boolean, "always on"),
        tpl("size", BucketedReal, "average font size relative to twice the page median"),
        tpl("smaller", Boolean, "average font size below the page median"),
        tpl("y", BucketedReal, "top of the chunk relative to the page height"),
        tpl("lead_sup", Boolean, "chunk starts with a superscript"),
        tpl("lead_digit", Boolean, "chunk starts with a digit"),
        tpl("bold", Boolean, "mostly bold"),
        tpl("lines", Categorical, "line count, bucketed"),
    ]
}

pub fn case_class(text: &str) -> &'static str {
    match text.chars().next() {
        Some(c) if c.is_uppercase() => "upper",
        Some(c) if c.is_lowercase() => "lower",
        Some(c) if c.is_ascii_digit() => "digit",
        _ => "other",
    }
}

/// A capitalized alphabetic word (hyphens and apostrophes allowed inside) or
/// an initial such as `J.`; a trailing comma is ignored.
pub fn is_name_word(text: &str) -> bool {
    let w = text.trim_end_matches([',', ';']);
    let mut chars = w.chars();
    let Some(first) = chars.next() else { return false };
    if !first.is_uppercase() {
        return false;
    }
    let rest: Vec<char> = chars.collect();
    if rest == ['.'] {
        return true;
    }
    if rest.last().is_some_and(|c| matches!(c, '-' | '\'')) {
        return false;
    }
    rest.iter().all(|c| c.is_alphabetic() || matches!(c, '-' | '\''))
}

/// A single capital followed by a period, as in `J.`.
pub fn is_initial(text: &str) -> bool {
    let mut chars = text.trim_end_matches([',', ';']).chars();
    matches!((chars.next(), chars.next(), chars.next()), (Some(c), Some('.'), None) if c.is_uppercase())
}

/// Lexicons used by feature extraction and the metadata rules.
#[derive(Debug, Clone)]
pub struct Lexicons {
    pub cues: Lexicon,
    pub countries: Lexicon,
    pub stopwords: Lexicon,
}

impl Default for Lexicons {
    fn default() -> Self {
        Lexicons { cues: Lexicon::affiliation_cues(), countries: Lexicon::countries(), stopwords: Lexicon::stopwords() }
    }
}

impl Lexicons {
    pub fn is_cue(&self, word: &str) -> bool {
        let w = trim_punct(word);
        self.cues.contains(w) || self.countries.contains(w)
    }

    /// Cue words and country names found in a word sequence.
    pub fn cues_in<S: AsRef<str>>(&self, words: &[S]) -> Vec<String> {
        let mut found = self.cues.find_in(words);
        found.extend(self.countries.find_in(words));
        found
    }
}

/// A token in document reading order with its chunk and line.
#[derive(Debug, Clone, Copy)]
pub struct StreamToken<'a> {
    pub token: &'a Token,
    pub chunk: usize,
    /// Line id, unique across the document.
    pub line: usize,
}

/// The chunked document flattened to a token stream, with the per-line
/// facts the header features need.
#[derive(Debug, Clone)]
pub struct HeaderView<'a> {
    pub stream: Vec<StreamToken<'a>>,
    pub first_chunk_len: usize,
    page1_max_font: f64,
    line_cue: Vec<bool>,
    line_at: Vec<bool>,
    line_digit: Vec<bool>,
    line_len: Vec<usize>,
}

impl<'a> HeaderView<'a> {
    pub fn new(chunks: &'a [Chunk], lex: &Lexicons) -> Self {
        let mut stream = Vec::new();
        let (mut line_cue, mut line_at, mut line_digit, mut line_len) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for (ci, chunk) in chunks.iter().enumerate() {
            for line in chunk.lines() {
                let id = line_len.len();
                let words: Vec<&str> = line.iter().map(|t| t.text.as_str()).collect();
                line_cue.push(!lex.cues_in(&words).is_empty());
                line_at.push(words.iter().any(|w| w.contains('@')));
                line_digit.push(line.iter().any(|t| !t.sup_flag && t.text.chars().any(|c| c.is_ascii_digit())));
                line_len.push(line.len());
                stream.extend(line.iter().map(|token| StreamToken { token, chunk: ci, line: id }));
            }
        }
        let first_page = chunks.first().map(|c| c.page_no);
        let page1_max_font = chunks
            .iter()
            .filter(|c| Some(c.page_no) == first_page)
            .flat_map(|c| &c.tokens)
            .map(|t| t.font_size)
            .fold(0.0, f64::max);
        let first_chunk_len = if chunks.is_empty() { 0 } else { chunks[..style_run_end(chunks, 0)].iter().map(|c| c.tokens.len()).sum() };
        HeaderView { stream, first_chunk_len, page1_max_font, line_cue, line_at, line_digit, line_len }
    }

    pub fn token(&self, pos: usize) -> &'a Token {
        self.stream[pos].token
    }

    fn base_features(&self, pos: usize, cpos: Option<f64>) -> FeatureVector {
        let t = self.stream[pos].token;
        let mut f = vec!["bias".to_string()];
        if t.bold {
            f.push("bold".into());
        }
        if t.sup_flag {
            f.push("sup".into());
        }
        f.push(format!("pos={}", decile(pos as f64 / self.stream.len() as f64)));
        match cpos {
            Some(c) => f.push(format!("cpos={}", decile(c))),
            None => f.push("cpos=out".into()),
        }
        let size = decile(t.font_size / self.page1_max_font);
        f.push(format!("size={size}"));
        let case = case_class(&t.text);
        f.push(format!("case={case}"));
        f.push(format!("bold_size={}|{size}", t.bold as u8));
        let same_line = |p: usize| self.stream[p].line == self.stream[pos].line;
        let next = (pos + 1 < self.stream.len() && same_line(pos + 1)).then(|| case_class(&self.stream[pos + 1].token.text));
        let prev = (pos > 0 && same_line(pos - 1)).then(|| case_class(&self.stream[pos - 1].token.text));
        f.push(format!("case_next={case}|{}", next.unwrap_or("end")));
        f.push(format!("case_prev={case}|{}", prev.unwrap_or("start")));
        f
    }

    /// Features for every token of the first chunk.
    pub fn title_features(&self) -> Vec<FeatureVector> {
        let n = self.first_chunk_len;
        (0..n).map(|p| self.base_features(p, Some(p as f64 / n as f64))).collect()
    }

    /// Features for the given stream positions; `title_end_line` is the line
    /// id of the title's last line, if any.
    pub fn author_features(&self, positions: &[usize], title_end_line: Option<usize>, lex: &Lexicons) -> Vec<FeatureVector> {
        let n = self.first_chunk_len;
        positions
            .iter()
            .map(|&p| {
                let st = self.stream[p];
                let t = st.token;
                let cpos = (p < n).then(|| p as f64 / n as f64);
                let mut f = self.base_features(p, cpos);
                let mut flag = |on: bool, name: &str| {
                    if on {
                        f.push(name.to_string());
                    }
                };
                flag(t.italic, "italic");
                flag(is_name_word(&t.text), "name_word");
                flag(!is_initial(&t.text) && lex.stopwords.contains(trim_punct(&t.text)), "stop");
                flag(lex.is_cue(&t.text), "cue");
                flag(t.text.ends_with(','), "comma");
                let next_sup = self.stream.get(p + 1).is_some_and(|n| n.line == st.line && n.token.sup_flag);
                flag(next_sup, "next_sup");
                flag(self.line_cue[st.line], "line_cue");
                flag(self.line_at[st.line], "line_at");
                flag(self.line_digit[st.line], "line_digit");
                f.push(format!("line_len={}", bucket(self.line_len[st.line], &[1, 2, 4, 8, 16])));
                let tl = match title_end_line {
                    Some(end) if st.line > end => (st.line - end).min(6).to_string(),
                    Some(_) => "title".to_string(),
                    None => "none".to_string(),
                };
                f.push(format!("title_line={tl}"));
                f
            })
            .collect()
    }
}

/// Label of the first bound that `n` does not exceed, else `>last`.
fn bucket(n: usize, bounds: &[usize]) -> String {
    bounds.iter().find(|&&b| n <= b).map_or_else(|| format!(">{}", bounds[bounds.len() - 1]), |b| format!("<={b}"))
}

/// Enumeration forms at the start of a heading.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumKind {
    Arabic,
    Roman,
    Alpha,
}

impl EnumKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EnumKind::Arabic => "arabic",
            EnumKind::Roman => "roman",
            EnumKind::Alpha => "alpha",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub kind: EnumKind,
    /// The enumeration without a trailing period, e.g. `3.1` or `IV`.
    pub value: String,
    pub depth: usize,
}

fn roman_value(s: &str) -> Option<u32> {
    let digit = |c| match c {
        'I' => Some(1),
        'V' => Some(5),
        'X' => Some(10),
        'L' => Some(50),
        'C' => Some(100),
        _ => None,
    };
    let vals: Vec<u32> = s.chars().map(digit).collect::<Option<_>>()?;
    let mut total = 0;
    for (i, &v) in vals.iter().enumerate() {
        if vals.get(i + 1).is_some_and(|&n| n > v) {
            total -= v as i64;
        } else {
            total += v as i64;
        }
    }
    let total = u32::try_from(total).ok().filter(|&t| t > 0)?;
    (to_roman(total) == s).then_some(total)
}

fn to_roman(mut n: u32) -> String {
    const TABLE: [(u32, &str); 9] =
        [(100, "C"), (90, "XC"), (50, "L"), (40, "XL"), (10, "X"), (9, "IX"), (5, "V"), (4, "IV"), (1, "I")];
    let mut out = String::new();
    for (v, s) in TABLE {
        while n >= v {
            out.push_str(s);
            n -= v;
        }
    }
    out
}

/// Parses `3`, `3.1.`, `IV.`, `A.` or `A.2` forms.
pub fn parse_enumeration(token: &str) -> Option<Enumeration> {
    let body = token.strip_suffix('.').unwrap_or(token);
    if body.is_empty() {
        return None;
    }
    let parts: Vec<&str> = body.split('.').collect();
    let numeric = |p: &str| !p.is_empty() && p.len() <= 2 && p.chars().all(|c| c.is_ascii_digit());
    if parts.iter().all(|p| numeric(p)) {
        return Some(Enumeration { kind: EnumKind::Arabic, value: body.into(), depth: parts.len() });
    }
    if parts.len() == 1 && roman_value(body).is_some() && (body.len() > 1 || matches!(body, "I" | "V" | "X")) {
        return Some(Enumeration { kind: EnumKind::Roman, value: body.into(), depth: 1 });
    }
    let alpha = |p: &str| p.len() == 1 && p.chars().all(|c| c.is_ascii_uppercase());
    if alpha(parts[0]) && parts[1..].iter().all(|p| numeric(p)) && (parts.len() > 1 || token.ends_with('.')) {
        return Some(Enumeration { kind: EnumKind::Alpha, value: body.into(), depth: parts.len() });
    }
    None
}

/// Median font size of the non-superscript tokens across all chunks.
pub fn body_font_size(chunks: &[Chunk]) -> f64 {
    let sizes: Vec<f64> = chunks.iter().flat_map(|c| &c.tokens).filter(|t| !t.sup_flag).map(|t| t.font_size).collect();
    median(sizes).unwrap_or(10.0)
}

fn normalize_word(w: &str) -> String {
    if parse_enumeration(w).is_some() {
        return "<enum>".into();
    }
    let w = trim_punct(w).to_lowercase();
    if w.chars().any(|c| c.is_ascii_digit()) {
        "<num>".into()
    } else {
        w
    }
}

/// Features for one chunk in the heading sequence.
pub fn heading_features(chunk: &Chunk, body_font: f64) -> FeatureVector {
    let words: Vec<&Token> = chunk.tokens.iter().filter(|t| !t.sup_flag).collect();
    let mut f = vec!["bias".to_string()];
    let first = words.first().map(|t| t.text.as_str()).unwrap_or("");
    f.push(format!("first={}", normalize_word(first)));
    match words.get(1) {
        Some(t) => f.push(format!("second={}", normalize_word(&t.text))),
        None => f.push("second=<none>".into()),
    }
    f.push(format!("bold={}", decile(chunk.avg_boldness)));
    f.push(format!("size={}", decile(chunk.avg_font_size / (2.0 * body_font))));
    if chunk.avg_font_size > body_font * 1.05 {
        f.push("larger".into());
    }
    match parse_enumeration(first) {
        Some(e) => f.push(format!("enum={}{}", e.kind.as_str(), e.depth.min(3))),
        None => f.push("enum=none".into()),
    }
    f.push(format!("len={}", bucket(words.len(), &[1, 2, 3, 5, 8, 12, 20])));
    f.push(format!("lines={}", bucket(chunk.line_starts.len(), &[1, 2, 3])));
    let alpha: Vec<&&Token> = words.iter().filter(|t| t.text.chars().any(char::is_alphabetic)).collect();
    if !alpha.is_empty() && alpha.iter().all(|t| !t.text.chars().any(char::is_lowercase)) {
        f.push("caps".into());
    }
    if words.last().is_some_and(|t| t.text.ends_with('.')) && words.len() > 1 {
        f.push("period".into());
    }
    f
}

/// Features for one chunk in a page's footnote sequence.
pub fn footnote_features(chunk: &Chunk, page_height: f64, page_median_font: f64) -> FeatureVector {
    let mut f = vec!["bias".to_string()];
    f.push(format!("size={}", decile(chunk.avg_font_size / (2.0 * page_median_font))));
    if chunk.avg_font_size < page_median_font * 0.95 {
        f.push("smaller".into());
    }
    f.push(format!("y={}", decile(chunk.bbox.y_min / page_height)));
    let first = &chunk.tokens[0];
    if first.sup_flag {
        f.push("lead_sup".into());
    }
    if first.text.starts_with(|c: char| c.is_ascii_digit()) {
        f.push("lead_digit".into());
    }
    if chunk.avg_boldness > 0.5 {
        f.push("bold".into());
    }
    f.push(format!("lines={}", bucket(chunk.line_starts.len(), &[1, 2, 4])));
    f
}
