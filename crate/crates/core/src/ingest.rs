//! Reader and writer for the token-level rich XML format.
//!
//! ```text
//! <DOCUMENT>
//!   <PAGE number="1" width="612" height="792">
//!     <TEXT>
//!       <TOKEN x=".." y=".." width=".." height=".." font-size=".." bold="yes|no"
//!              italic="yes|no" font-name="..">word</TOKEN>
//! ```

use std::fmt::Write as _;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use thiserror::Error;

use crate::model::{Document, Line, Page, Token};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IngestError {
    #[error("input is not UTF-8 (invalid byte at offset {offset})")]
    Utf8 { offset: usize },
    #[error("malformed XML at byte {offset}: {message}")]
    Xml { offset: u64, message: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub token_count: usize,
    pub page_count: usize,
    pub skipped_elements: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IngestOptions {
    /// A superscript is at most this fraction of the page median font size.
    pub sup_font_ratio: f64,
    /// A superscript baseline sits at least this many points above the line's.
    pub sup_raise: f64,
    pub dehyphenate: bool,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions { sup_font_ratio: 0.8, sup_raise: 1.5, dehyphenate: false }
    }
}

const DEFAULT_PAGE_WIDTH: f64 = 612.0;
const DEFAULT_PAGE_HEIGHT: f64 = 792.0;

pub fn parse_rich_xml(bytes: &[u8]) -> Result<(Document, IngestReport), IngestError> {
    parse_rich_xml_with(bytes, &IngestOptions::default())
}

struct PageBuilder {
    width: f64,
    height: f64,
    lines: Vec<Vec<Token>>,
}

struct PendingToken {
    attrs: Vec<(String, String)>,
    text: String,
}

pub fn parse_rich_xml_with(
    bytes: &[u8],
    opts: &IngestOptions,
) -> Result<(Document, IngestReport), IngestError> {
    let src = std::str::from_utf8(bytes)
        .map_err(|e| IngestError::Utf8 { offset: e.valid_up_to() })?;
    let mut reader = Reader::from_str(src);
    let mut report = IngestReport::default();
    let mut pages: Vec<PageBuilder> = Vec::new();
    let mut page: Option<PageBuilder> = None;
    let mut line: Option<Vec<Token>> = None;
    let mut token: Option<PendingToken> = None;
    // depth inside elements we do not understand; their content is ignored
    let mut unknown_depth = 0usize;

    loop {
        let event = reader.read_event().map_err(|e| IngestError::Xml {
            offset: reader.error_position(),
            message: e.to_string(),
        })?;
        match event {
            Event::Eof => break,
            Event::Start(ref e) | Event::Empty(ref e) => {
                let is_empty = matches!(event, Event::Empty(_));
                if unknown_depth > 0 {
                    if !is_empty {
                        unknown_depth += 1;
                    }
                    continue;
                }
                let name = e.name();
                match name.as_ref() {
                    "DOCUMENT" => {}
                    "PAGE" => {
                        let attrs = attributes(e, &reader)?;
                        let width = num_attr(&attrs, "width").unwrap_or_else(|| {
                            report.warnings.push("PAGE without width".into());
                            DEFAULT_PAGE_WIDTH
                        });
                        let height = num_attr(&attrs, "height").unwrap_or_else(|| {
                            report.warnings.push("PAGE without height".into());
                            DEFAULT_PAGE_HEIGHT
                        });
                        let builder = PageBuilder { width, height, lines: Vec::new() };
                        if is_empty {
                            pages.push(builder);
                        } else {
                            page = Some(builder);
                        }
                    }
                    "TEXT" => {
                        if !is_empty {
                            line = Some(Vec::new());
                        }
                    }
                    "TOKEN" => {
                        let pending = PendingToken { attrs: attributes(e, &reader)?, text: String::new() };
                        if is_empty {
                            finish_token(pending, pages.len() + 1, &mut line, &mut page, &mut report);
                        } else {
                            token = Some(pending);
                        }
                    }
                    _ => {
                        report.skipped_elements += 1;
                        if !is_empty {
                            unknown_depth = 1;
                        }
                    }
                }
            }
            Event::End(ref e) => {
                if unknown_depth > 0 {
                    unknown_depth -= 1;
                    continue;
                }
                match e.name().as_ref() {
                    "TOKEN" => {
                        if let Some(pending) = token.take() {
                            finish_token(pending, pages.len() + 1, &mut line, &mut page, &mut report);
                        }
                    }
                    "TEXT" => {
                        if let (Some(l), Some(p)) = (line.take(), page.as_mut()) {
                            if !l.is_empty() {
                                p.lines.push(l);
                            }
                        }
                    }
                    "PAGE" => {
                        if let Some(p) = page.take() {
                            pages.push(p);
                        }
                    }
                    _ => {}
                }
            }
            Event::Text(t) => {
                if unknown_depth == 0 {
                    if let Some(pending) = token.as_mut() {
                        pending.text.push_str(&t.xml10_content());
                    }
                }
            }
            Event::CData(t) => {
                if unknown_depth == 0 {
                    if let Some(pending) = token.as_mut() {
                        pending.text.push_str(&t.xml10_content());
                    }
                }
            }
            Event::GeneralRef(r) => {
                if unknown_depth == 0 {
                    if let Some(pending) = token.as_mut() {
                        let raw = format!("&{};", r.xml10_content());
                        let resolved = quick_xml::escape::unescape(&raw).map_err(|e| IngestError::Xml {
                            offset: reader.buffer_position(),
                            message: e.to_string(),
                        })?;
                        pending.text.push_str(&resolved);
                    }
                }
            }
            _ => {}
        }
    }

    let mut doc = Document::default();
    for (i, builder) in pages.into_iter().enumerate() {
        let number = i as u32 + 1;
        let mut lines: Vec<Line> = builder.lines.into_iter().map(Line::new).collect();
        let median = crate::model::median(lines.iter().flat_map(|l| l.tokens.iter()).map(|t| t.font_size).collect());
        if let Some(median) = median {
            for l in &mut lines {
                let flags = detect_superscript_with(l, median, opts);
                for (t, f) in l.tokens.iter_mut().zip(flags) {
                    t.sup_flag = f;
                }
            }
        }
        let mut p = Page::new(number, builder.width, builder.height, lines);
        if opts.dehyphenate {
            dehyphenate_page(&mut p);
        }
        doc.pages.push(p);
    }
    report.page_count = doc.pages.len();
    report.token_count = doc.token_count();
    Ok((doc, report))
}

fn attributes(e: &BytesStart<'_>, reader: &Reader<&[u8]>) -> Result<Vec<(String, String)>, IngestError> {
    let mut out = Vec::new();
    for a in e.attributes() {
        let a = a.map_err(|err| IngestError::Xml {
            offset: reader.buffer_position(),
            message: err.to_string(),
        })?;
        let value = a.normalized_value(quick_xml::XmlVersion::Implicit1_0).map_err(|err| IngestError::Xml {
            offset: reader.buffer_position(),
            message: err.to_string(),
        })?;
        out.push((a.key.as_ref().to_string(), value.into_owned()));
    }
    Ok(out)
}

fn attr<'a>(attrs: &'a [(String, String)], key: &str) -> Option<&'a str> {
    attrs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

fn num_attr(attrs: &[(String, String)], key: &str) -> Option<f64> {
    attr(attrs, key).and_then(|v| v.trim().parse::<f64>().ok()).filter(|v| v.is_finite())
}

fn finish_token(
    pending: PendingToken,
    page_no: usize,
    line: &mut Option<Vec<Token>>,
    page: &mut Option<PageBuilder>,
    report: &mut IngestReport,
) {
    let attrs = &pending.attrs;
    let missing: Vec<&str> = ["x", "y", "font-size"]
        .into_iter()
        .filter(|k| num_attr(attrs, k).is_none())
        .collect();
    if !missing.is_empty() {
        report.skipped_elements += 1;
        report.warnings.push(format!("TOKEN {:?} skipped: missing {}", pending.text, missing.join(", ")));
        return;
    }
    let text = pending.text.trim().to_string();
    if text.is_empty() {
        report.skipped_elements += 1;
        report.warnings.push("TOKEN skipped: empty text".into());
        return;
    }
    let font_size = num_attr(attrs, "font-size").unwrap_or(0.0);
    if font_size <= 0.0 {
        report.skipped_elements += 1;
        report.warnings.push(format!("TOKEN {text:?} skipped: non-positive font-size"));
        return;
    }
    let token = Token {
        text,
        page_no: page_no as u32,
        x: num_attr(attrs, "x").unwrap_or(0.0),
        y: num_attr(attrs, "y").unwrap_or(0.0),
        width: num_attr(attrs, "width").unwrap_or(0.0).max(0.0),
        height: num_attr(attrs, "height").unwrap_or(0.0).max(0.0),
        font_size,
        bold: attr(attrs, "bold") == Some("yes"),
        italic: attr(attrs, "italic") == Some("yes"),
        font_name: attr(attrs, "font-name").unwrap_or_default().to_string(),
        sup_flag: false,
    };
    match (line.as_mut(), page.as_mut()) {
        (Some(l), _) => l.push(token),
        // a TOKEN directly under PAGE becomes its own line
        (None, Some(p)) => p.lines.push(vec![token]),
        (None, None) => {
            report.skipped_elements += 1;
            report.warnings.push("TOKEN outside PAGE skipped".into());
        }
    }
}

/// Superscript flags for the tokens of `line`.
pub fn detect_superscript(line: &Line, page_median_font: f64) -> Vec<bool> {
    detect_superscript_with(line, page_median_font, &IngestOptions::default())
}

pub fn detect_superscript_with(line: &Line, page_median_font: f64, opts: &IngestOptions) -> Vec<bool> {
    line.tokens
        .iter()
        .map(|t| {
            t.font_size <= opts.sup_font_ratio * page_median_font
                && line.baseline_y - t.baseline() >= opts.sup_raise
        })
        .collect()
}

/// Joins a token ending in "-" at the end of a line with the first token of
/// the next line.
fn dehyphenate_page(page: &mut Page) {
    let mut i = 0;
    while i + 1 < page.lines.len() {
        let ends_with_hyphen = page.lines[i]
            .tokens
            .last()
            .is_some_and(|t| t.text.len() > 1 && t.text.ends_with('-'));
        if ends_with_hyphen && !page.lines[i + 1].tokens.is_empty() {
            let next = page.lines[i + 1].tokens.remove(0);
            let last = page.lines[i].tokens.last_mut().unwrap();
            last.text.pop();
            last.text.push_str(&next.text);
            if page.lines[i + 1].tokens.is_empty() {
                page.lines.remove(i + 1);
                continue;
            }
        }
        i += 1;
    }
}

/// Serializes a document back to the rich XML schema.
pub fn write_rich_xml(doc: &Document) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<DOCUMENT>\n");
    for page in &doc.pages {
        let _ = writeln!(out, "<PAGE number=\"{}\" width=\"{}\" height=\"{}\">", page.number, page.width, page.height);
        for line in &page.lines {
            out.push_str("<TEXT>\n");
            for t in &line.tokens {
                let _ = writeln!(
                    out,
                    "<TOKEN x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" font-size=\"{}\" bold=\"{}\" italic=\"{}\" font-name=\"{}\">{}</TOKEN>",
                    t.x,
                    t.y,
                    t.width,
                    t.height,
                    t.font_size,
                    yes_no(t.bold),
                    yes_no(t.italic),
                    quick_xml::escape::escape(&t.font_name),
                    quick_xml::escape::escape(&t.text),
                );
            }
            out.push_str("</TEXT>\n");
        }
        out.push_str("</PAGE>\n");
    }
    out.push_str("</DOCUMENT>\n");
    out
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}
