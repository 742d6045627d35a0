//! Document object model shared by every extraction stage.
//!
//! Coordinates are in points with `y` growing downward from the top of the
//! page. A token's `y` is the top of its box; its baseline is `y + height`.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("empty chunk")]
    EmptyChunk,
    #[error("no content")]
    NoContent,
}

/// One visual word.
#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub text: String,
    pub page_no: u32,
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
    pub font_size: f64,
    pub bold: bool,
    pub italic: bool,
    pub font_name: String,
    /// Superscript flag, computed at ingest.
    pub sup_flag: bool,
}

impl Token {
    pub fn baseline(&self) -> f64 {
        self.y + self.height
    }

    pub fn right(&self) -> f64 {
        self.x + self.width
    }

    pub fn bbox(&self) -> BBox {
        BBox {
            x_min: self.x,
            y_min: self.y,
            x_max: self.x + self.width,
            y_max: self.y + self.height,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl BBox {
    pub fn union(self, other: BBox) -> BBox {
        BBox {
            x_min: self.x_min.min(other.x_min),
            y_min: self.y_min.min(other.y_min),
            x_max: self.x_max.max(other.x_max),
            y_max: self.y_max.max(other.y_max),
        }
    }

    pub fn contains(&self, other: &BBox) -> bool {
        self.x_min <= other.x_min
            && self.y_min <= other.y_min
            && self.x_max >= other.x_max
            && self.y_max >= other.y_max
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }
}

/// One visual line: tokens sharing a page, ordered by `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    pub tokens: Vec<Token>,
    pub baseline_y: f64,
}

impl Line {
    /// Builds a line, sorting tokens by `x` and taking the dominant baseline.
    pub fn new(mut tokens: Vec<Token>) -> Line {
        tokens.sort_by(|a, b| a.x.total_cmp(&b.x));
        let baseline_y = dominant_baseline(&tokens);
        Line { tokens, baseline_y }
    }

    pub fn x_min(&self) -> f64 {
        self.tokens.iter().map(|t| t.x).fold(f64::INFINITY, f64::min)
    }

    pub fn x_max(&self) -> f64 {
        self.tokens.iter().map(Token::right).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn text(&self) -> String {
        join_tokens(self.tokens.iter())
    }
}

/// Most frequent baseline (rounded to 0.1 pt); ties go to the lowest one on
/// the page, which keeps raised superscripts from winning a two-token line.
pub fn dominant_baseline(tokens: &[Token]) -> f64 {
    let mut counts: Vec<(i64, usize)> = Vec::new();
    for t in tokens {
        let key = (t.baseline() * 10.0).round() as i64;
        match counts.iter_mut().find(|(k, _)| *k == key) {
            Some((_, c)) => *c += 1,
            None => counts.push((key, 1)),
        }
    }
    counts
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)))
        .map(|(k, _)| k as f64 / 10.0)
        .unwrap_or(0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Page {
    pub number: u32,
    pub width: f64,
    pub height: f64,
    pub lines: Vec<Line>,
}

impl Page {
    /// Builds a page with lines sorted by ascending baseline (stable).
    pub fn new(number: u32, width: f64, height: f64, mut lines: Vec<Line>) -> Page {
        lines.sort_by(|a, b| a.baseline_y.total_cmp(&b.baseline_y));
        Page { number, width, height, lines }
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.lines.iter().flat_map(|l| l.tokens.iter())
    }

    pub fn median_font_size(&self) -> f64 {
        median(self.tokens().map(|t| t.font_size).collect()).unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Document {
    pub source_id: String,
    pub pages: Vec<Page>,
}

impl Document {
    pub fn token_count(&self) -> usize {
        self.pages.iter().map(|p| p.tokens().count()).sum()
    }
}

/// Reading-order flattening: pages ascending, lines by `y`, tokens by `x`.
pub fn token_stream(doc: &Document) -> Vec<&Token> {
    doc.pages.iter().flat_map(Page::tokens).collect()
}

/// A contiguous, visually coherent group of tokens on one page.
#[derive(Debug, Clone, PartialEq)]
pub struct Chunk {
    pub tokens: Vec<Token>,
    pub page_no: u32,
    pub avg_font_size: f64,
    pub avg_boldness: f64,
    pub bbox: BBox,
    /// Index into `tokens` where each source line starts; always begins with 0.
    pub line_starts: Vec<usize>,
}

impl Chunk {
    pub fn new(tokens: Vec<Token>, line_starts: Vec<usize>) -> Result<Chunk, ModelError> {
        let stats = chunk_stats(&tokens)?;
        let page_no = tokens[0].page_no;
        let mut line_starts = line_starts;
        if line_starts.first() != Some(&0) {
            line_starts.insert(0, 0);
        }
        Ok(Chunk {
            tokens,
            page_no,
            avg_font_size: stats.avg_font_size,
            avg_boldness: stats.avg_boldness,
            bbox: stats.bbox,
            line_starts,
        })
    }

    /// Token slices, one per source line.
    pub fn lines(&self) -> impl Iterator<Item = &[Token]> {
        let n = self.tokens.len();
        self.line_starts.iter().enumerate().map(move |(i, &s)| {
            let e = self.line_starts.get(i + 1).copied().unwrap_or(n);
            &self.tokens[s..e]
        })
    }

    /// Space-joined token text.
    pub fn text(&self) -> String {
        join_tokens(self.tokens.iter())
    }

    /// Space-joined text without superscript tokens.
    pub fn plain_text(&self) -> String {
        join_tokens(self.tokens.iter().filter(|t| !t.sup_flag))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChunkStats {
    pub avg_font_size: f64,
    pub avg_boldness: f64,
    pub bbox: BBox,
}

pub fn chunk_stats(tokens: &[Token]) -> Result<ChunkStats, ModelError> {
    let first = tokens.first().ok_or(ModelError::EmptyChunk)?;
    let n = tokens.len() as f64;
    let avg_font_size = tokens.iter().map(|t| t.font_size).sum::<f64>() / n;
    let avg_boldness = tokens.iter().filter(|t| t.bold).count() as f64 / n;
    let bbox = tokens.iter().skip(1).fold(first.bbox(), |b, t| b.union(t.bbox()));
    Ok(ChunkStats { avg_font_size, avg_boldness, bbox })
}

pub fn join_tokens<'a>(tokens: impl Iterator<Item = &'a Token>) -> String {
    let mut out = String::new();
    for t in tokens {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(&t.text);
    }
    out
}

pub(crate) fn median(mut xs: Vec<f64>) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    Some(if xs.len() % 2 == 0 { (xs[m - 1] + xs[m]) / 2.0 } else { xs[m] })
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;

    pub fn tok(text: &str, x: f64, y: f64, font: f64, bold: bool) -> Token {
        Token {
            text: text.to_string(),
            page_no: 1,
            x,
            y,
            width: text.chars().count() as f64 * font * 0.5,
            height: font,
            font_size: font,
            bold,
            italic: false,
            font_name: "Times".into(),
            sup_flag: false,
        }
    }
}
