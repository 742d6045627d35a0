//! Segmentation of pages into chunks by spacing and style discontinuities.

use thiserror::Error;

use crate::model::{median, Chunk, Document, Line, ModelError, Page, Token};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChunkParamsError {
    #[error("gap_factor must be > 1.0, got {0}")]
    GapFactor(f64),
    #[error("font_jump must lie in (0, 1), got {0}")]
    FontJump(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChunkParams {
    /// Multiplier on the page's median line pitch.
    pub gap_factor: f64,
    /// Relative font-size change that starts a new chunk.
    pub font_jump: f64,
    /// Start a new chunk when line boldness flips.
    pub boldness_break: bool,
}

impl Default for ChunkParams {
    fn default() -> Self {
        ChunkParams { gap_factor: 1.5, font_jump: 0.15, boldness_break: true }
    }
}

impl ChunkParams {
    pub fn validate(&self) -> Result<(), ChunkParamsError> {
        if !(self.gap_factor > 1.0) {
            return Err(ChunkParamsError::GapFactor(self.gap_factor));
        }
        if !(self.font_jump > 0.0 && self.font_jump < 1.0) {
            return Err(ChunkParamsError::FontJump(self.font_jump));
        }
        Ok(())
    }
}

/// Lines of a page grouped into reading-order streams. A single-column page
/// is one stream. On a two-column page, lines crossing the gutter split the
/// page into bands and each band yields its left column, then its right.
pub fn column_streams(page: &Page) -> Vec<Vec<&Line>> {
    let lines: Vec<&Line> = page.lines.iter().filter(|l| !l.tokens.is_empty()).collect();
    let Some(gutter) = find_gutter(&lines) else {
        return if lines.is_empty() { Vec::new() } else { vec![lines] };
    };
    let mut streams = Vec::new();
    let mut left: Vec<&Line> = Vec::new();
    let mut right: Vec<&Line> = Vec::new();
    let mut spanning: Vec<&Line> = Vec::new();
    for line in lines {
        if line.x_min() < gutter && line.x_max() > gutter {
            flush_columns(&mut streams, &mut left, &mut right);
            spanning.push(line);
        } else {
            if !spanning.is_empty() {
                streams.push(std::mem::take(&mut spanning));
            }
            if line.x_max() <= gutter {
                left.push(line);
            } else {
                right.push(line);
            }
        }
    }
    if !spanning.is_empty() {
        streams.push(spanning);
    }
    flush_columns(&mut streams, &mut left, &mut right);
    streams
}

fn flush_columns<'a>(streams: &mut Vec<Vec<&'a Line>>, left: &mut Vec<&'a Line>, right: &mut Vec<&'a Line>) {
    for col in [std::mem::take(left), std::mem::take(right)] {
        if !col.is_empty() {
            streams.push(col);
        }
    }
}

/// x position of the column gutter: the point in the middle half of the
/// content that the fewest lines cross, provided at least three lines lie
/// wholly on each side and crossing lines are a minority.
fn find_gutter(lines: &[&Line]) -> Option<f64> {
    if lines.len() < 6 {
        return None;
    }
    let cmin = lines.iter().map(|l| l.x_min()).fold(f64::INFINITY, f64::min);
    let cmax = lines.iter().map(|l| l.x_max()).fold(f64::NEG_INFINITY, f64::max);
    let content = cmax - cmin;
    if content <= 0.0 {
        return None;
    }
    let center = cmin + content / 2.0;
    // (crossing, -min side, distance from center, x)
    let mut best: Option<(usize, isize, f64, f64)> = None;
    let steps = 200;
    for k in 0..=steps {
        let x = cmin + content * (0.25 + 0.5 * k as f64 / steps as f64);
        let cross = lines.iter().filter(|l| l.x_min() < x && l.x_max() > x).count();
        let left = lines.iter().filter(|l| l.x_max() <= x).count();
        let right = lines.iter().filter(|l| l.x_min() >= x).count();
        if left < 3 || right < 3 || cross >= left.min(right) {
            continue;
        }
        let key = (cross, -(left.min(right) as isize), (x - center).abs(), x);
        if best.is_none_or(|b| (key.0, key.1) < (b.0, b.1) || ((key.0, key.1) == (b.0, b.1) && key.2 < b.2)) {
            best = Some(key);
        }
    }
    let x = best?.3;
    let left_max = lines.iter().map(|l| l.x_max()).filter(|&m| m <= x).fold(f64::NEG_INFINITY, f64::max);
    let right_min = lines.iter().map(|l| l.x_min()).filter(|&m| m >= x).fold(f64::INFINITY, f64::min);
    Some((left_max + right_min) / 2.0)
}

fn line_font(line: &Line) -> f64 {
    let body: Vec<f64> = line.tokens.iter().filter(|t| !t.sup_flag).map(|t| t.font_size).collect();
    median(body)
        .or_else(|| median(line.tokens.iter().map(|t| t.font_size).collect()))
        .unwrap_or(0.0)
}

fn line_bold(line: &Line) -> bool {
    let body: Vec<&Token> = line.tokens.iter().filter(|t| !t.sup_flag).collect();
    let body = if body.is_empty() { line.tokens.iter().collect() } else { body };
    2 * body.iter().filter(|t| t.bold).count() > body.len()
}

/// Median baseline-to-baseline distance between consecutive lines of a stream.
fn median_pitch(streams: &[Vec<&Line>]) -> Option<f64> {
    let pitches: Vec<f64> = streams
        .iter()
        .flat_map(|s| s.windows(2).map(|w| w[1].baseline_y - w[0].baseline_y))
        .filter(|&p| p > 0.0)
        .collect();
    median(pitches)
}

pub fn chunk_page(page: &Page, params: &ChunkParams) -> Vec<Chunk> {
    let streams = column_streams(page);
    let pitch = median_pitch(&streams);
    let mut chunks = Vec::new();
    for stream in &streams {
        let mut tokens: Vec<Token> = Vec::new();
        let mut starts: Vec<usize> = Vec::new();
        let mut prev: Option<&Line> = None;
        for &line in stream {
            let split = match prev {
                None => false,
                Some(p) => {
                    let gap = line.baseline_y - p.baseline_y;
                    let by_gap = pitch.is_some_and(|m| gap > params.gap_factor * m);
                    let (pf, cf) = (line_font(p), line_font(line));
                    let by_font = pf > 0.0 && (cf - pf).abs() / pf > params.font_jump;
                    let by_bold = params.boldness_break && line_bold(p) != line_bold(line);
                    by_gap || by_font || by_bold
                }
            };
            if split && !tokens.is_empty() {
                chunks.push(Chunk::new(std::mem::take(&mut tokens), std::mem::take(&mut starts)).expect("non-empty"));
            }
            starts.push(tokens.len());
            tokens.extend(line.tokens.iter().cloned());
            prev = Some(line);
        }
        if !tokens.is_empty() {
            chunks.push(Chunk::new(tokens, starts).expect("non-empty"));
        }
    }
    chunks
}

/// Chunks of every page, in page order.
pub fn chunk_document(doc: &Document, params: &ChunkParams) -> Vec<Chunk> {
    doc.pages.iter().flat_map(|p| chunk_page(p, params)).collect()
}

/// End (exclusive) of the run of chunks starting at `start` that continue
/// one block split only by its own large line pitch: same page, same font
/// size and boldness, each starting within 1.8 font sizes of the previous
/// baseline.
pub fn style_run_end(chunks: &[Chunk], start: usize) -> usize {
    let mut end = start + 1;
    while let (Some(prev), Some(next)) = (chunks.get(end - 1), chunks.get(end)) {
        let font = prev.avg_font_size;
        let last_baseline = prev.tokens.iter().map(|t| t.baseline()).fold(f64::MIN, f64::max);
        let first_baseline = next.lines().next().map_or(f64::MAX, |l| l.iter().map(|t| t.baseline()).fold(f64::MIN, f64::max));
        let same_style = next.page_no == prev.page_no
            && (next.avg_font_size - font).abs() <= 0.05 * font
            && (next.avg_boldness > 0.5) == (prev.avg_boldness > 0.5);
        let gap = first_baseline - last_baseline;
        if !(same_style && gap > 0.0 && gap <= 1.8 * font) {
            break;
        }
        end += 1;
    }
    end
}

/// First chunk of the first page carrying content.
pub fn first_chunk(doc: &Document, params: &ChunkParams) -> Result<Chunk, ModelError> {
    doc.pages
        .iter()
        .find_map(|p| chunk_page(p, params).into_iter().next())
        .ok_or(ModelError::NoContent)
}
