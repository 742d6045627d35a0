//! TEI serialization of extraction results.

use std::collections::{HashMap, HashSet};

use crate::metadata::AuthorRecord;
use crate::pipeline::ExtractionResult;
use crate::structure::CaptionKind;

const TEI_NS: &str = "http://www.tei-c.org/ns/1.0";

fn valid_xml_char(c: char) -> bool {
    matches!(c, '\t' | '\n' | '\r') || (c >= ' ' && c != '\u{FFFE}' && c != '\u{FFFF}')
}

/// XML-escapes text and drops characters XML 1.0 cannot carry.
pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars().filter(|&c| valid_xml_char(c)) {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

struct Writer {
    out: String,
    depth: usize,
}

impl Writer {
    fn line(&mut self, s: &str) {
        for _ in 0..self.depth {
            self.out.push_str("  ");
        }
        self.out.push_str(s);
        self.out.push('\n');
    }

    fn open(&mut self, tag: &str, attrs: &[(&str, &str)]) {
        let s = format!("<{tag}{}>", attr_string(attrs));
        self.line(&s);
        self.depth += 1;
    }

    fn close(&mut self, tag: &str) {
        self.depth -= 1;
        self.line(&format!("</{tag}>"));
    }

    fn leaf(&mut self, tag: &str, attrs: &[(&str, &str)], text: &str) {
        let s = format!("<{tag}{}>{}</{tag}>", attr_string(attrs), escape(text));
        self.line(&s);
    }

    fn raw_leaf(&mut self, tag: &str, attrs: &[(&str, &str)], inner: &str) {
        let s = format!("<{tag}{}>{inner}</{tag}>", attr_string(attrs));
        self.line(&s);
    }
}

fn attr_string(attrs: &[(&str, &str)]) -> String {
    attrs.iter().map(|(k, v)| format!(" {k}=\"{}\"", escape(v))).collect()
}

/// `ref-N` identifiers for the reference list: the printed index when
/// present, else the 1-based position. Collisions get a `-k` suffix.
pub fn reference_ids(result: &ExtractionResult) -> Vec<String> {
    let mut used = HashSet::new();
    result
        .references
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let base = format!("ref-{}", r.index.map_or(i + 1, |n| n as usize));
            let mut id = base.clone();
            let mut k = 2;
            while !used.insert(id.clone()) {
                id = format!("{base}-{k}");
                k += 1;
            }
            id
        })
        .collect()
}

fn write_author(w: &mut Writer, a: &AuthorRecord) {
    w.open("author", &[]);
    w.open("persName", &[]);
    if !a.name.first.is_empty() {
        w.leaf("forename", &[("type", "first")], &a.name.first);
    }
    if !a.name.middle.is_empty() {
        w.leaf("forename", &[("type", "middle")], &a.name.middle);
    }
    if !a.name.last.is_empty() {
        w.leaf("surname", &[], &a.name.last);
    }
    w.close("persName");
    if let Some(e) = &a.email {
        w.leaf("email", &[], &e.address());
    }
    if let Some(aff) = &a.affiliation {
        w.leaf("affiliation", &[], &aff.text);
    }
    w.close("author");
}

/// Paragraph markup with citation spans wrapped in pointer elements. Spans
/// that are out of range, overlap, or cut a character are left as text.
fn marked_paragraph(text: &str, spans: &[(usize, usize, String)]) -> String {
    let mut out = String::new();
    let mut pos = 0;
    for (start, end, target) in spans {
        let (start, end) = (*start, *end);
        if start < pos || end > text.len() || start >= end || !text.is_char_boundary(start) || !text.is_char_boundary(end) {
            continue;
        }
        out.push_str(&escape(&text[pos..start]));
        if target.is_empty() {
            out.push_str(&format!("<ref type=\"bibr\">{}</ref>", escape(&text[start..end])));
        } else {
            out.push_str(&format!("<ref type=\"bibr\" target=\"{}\">{}</ref>", escape(target), escape(&text[start..end])));
        }
        pos = end;
    }
    out.push_str(&escape(&text[pos..]));
    out
}

/// Serializes a result as TEI XML: UTF-8, LF line endings, two-space indent.
pub fn export_tei(result: &ExtractionResult) -> String {
    let mut w = Writer { out: String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"), depth: 0 };
    w.open("TEI", &[("xmlns", TEI_NS)]);

    w.open("teiHeader", &[]);
    w.open("fileDesc", &[]);
    w.open("titleStmt", &[]);
    w.leaf("title", &[("level", "a"), ("type", "main")], &result.title);
    w.close("titleStmt");
    w.open("sourceDesc", &[]);
    w.open("biblStruct", &[]);
    w.open("analytic", &[]);
    for a in &result.authors {
        write_author(&mut w, a);
    }
    w.close("analytic");
    w.close("biblStruct");
    if !result.source_id.is_empty() {
        w.leaf("idno", &[("type", "source")], &result.source_id);
    }
    w.close("sourceDesc");
    w.close("fileDesc");
    w.close("teiHeader");

    let ids = reference_ids(result);
    let mut targets: HashMap<usize, Vec<String>> = HashMap::new();
    for l in &result.citations {
        if let Some(id) = l.reference.and_then(|r| ids.get(r)) {
            let t = targets.entry(l.citation).or_default();
            let id = format!("#{id}");
            if !t.contains(&id) {
                t.push(id);
            }
        }
    }
    let mut by_section: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, c) in result.citation_instances.iter().enumerate() {
        by_section.entry(c.section).or_default().push(i);
    }

    w.open("text", &[]);
    w.open("body", &[]);
    for (si, s) in result.sections.iter().enumerate() {
        if s.is_references {
            continue;
        }
        w.open("div", &[]);
        if let Some(h) = &s.heading {
            match &h.enumeration {
                Some(e) => w.leaf("head", &[("n", &e.value)], h.title()),
                None => w.leaf("head", &[], &h.text),
            }
        }
        let mut cites: Vec<(usize, usize, String)> = by_section
            .get(&si)
            .map(|v| {
                v.iter()
                    .map(|&ci| {
                        let c = &result.citation_instances[ci];
                        (c.char_span.0, c.char_span.1, targets.get(&ci).map(|t| t.join(" ")).unwrap_or_default())
                    })
                    .collect()
            })
            .unwrap_or_default();
        cites.sort();
        let mut offset = 0;
        for p in &s.paragraphs {
            let end = offset + p.len();
            let local: Vec<(usize, usize, String)> = cites
                .iter()
                .filter(|(a, b, _)| *a >= offset && *b <= end)
                .map(|(a, b, t)| (a - offset, b - offset, t.clone()))
                .collect();
            w.raw_leaf("p", &[], &marked_paragraph(p, &local));
            offset = end + 1;
        }
        w.close("div");
    }
    for c in &result.captions {
        let attrs: &[(&str, &str)] = match c.kind {
            CaptionKind::Figure => &[],
            CaptionKind::Table => &[("type", "table")],
        };
        w.open("figure", attrs);
        w.leaf("head", &[], &c.text);
        w.close("figure");
    }
    for f in &result.footnotes {
        match &f.marker {
            Some(m) => w.leaf("note", &[("place", "foot"), ("n", m)], &f.text),
            None => w.leaf("note", &[("place", "foot")], &f.text),
        }
    }
    w.close("body");

    w.open("back", &[]);
    if !result.urls.is_empty() {
        w.open("div", &[("type", "links")]);
        w.open("list", &[]);
        for u in &result.urls {
            w.open("item", &[]);
            w.leaf("ptr", &[("target", u)], "");
            w.close("item");
        }
        w.close("list");
        w.close("div");
    }
    w.open("div", &[("type", "references")]);
    w.open("listBibl", &[]);
    for (r, id) in result.references.iter().zip(&ids) {
        w.leaf("bibl", &[("xml:id", id)], &r.raw_text);
    }
    w.close("listBibl");
    w.close("div");
    w.close("back");
    w.close("text");
    w.close("TEI");
    w.out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bibliography::{CitationInstance, CitationLink, LinkMethod, Reference};
    use crate::metadata::{AuthorName, EmailAddress};
    use crate::pipeline::SectionText;

    fn reference(index: Option<u32>, text: &str) -> Reference {
        Reference { index, raw_text: text.into(), first_author_last: None, year: None }
    }

    #[test]
    fn empty_result_is_a_skeleton() {
        let xml = export_tei(&ExtractionResult::default());
        let doc = roxmltree::Document::parse(&xml).unwrap();
        assert_eq!(doc.root_element().tag_name().name(), "TEI");
        assert!(xml.contains("<listBibl>"));
    }

    #[test]
    fn author_with_email() {
        let mut r = ExtractionResult::default();
        r.authors.push(AuthorRecord {
            name: AuthorName { first: "Ada".into(), middle: String::new(), last: "Lovelace".into(), source_tokens: vec![], markers: vec![] },
            email: Some(EmailAddress { user: "ada".into(), domain: "x.org".into(), raw: "ada@x.org".into() }),
            affiliation: None,
        });
        let xml = export_tei(&r);
        assert_eq!(xml.matches("<author>").count(), 1);
        assert_eq!(xml.matches("<email>ada@x.org</email>").count(), 1);
        assert!(!xml.contains("type=\"middle\""));
    }

    #[test]
    fn citation_pointer_and_escaping() {
        let mut r = ExtractionResult::default();
        let text = "A & B [3] <ok>";
        r.sections.push(SectionText { heading: None, paragraphs: vec![text.into()], markers: vec![], is_references: false });
        r.citation_instances.push(CitationInstance {
            style_id: 16,
            matched_text: "[3]".into(),
            authors: vec![],
            year: None,
            year_suffix: None,
            indices: vec![3],
            char_span: (6, 9),
            section: 0,
        });
        r.references = vec![reference(Some(1), "one"), reference(Some(2), "two"), reference(Some(3), "three \u{1} x")];
        r.citations.push(CitationLink { citation: 0, reference: Some(2), method: LinkMethod::Index, ambiguous: false });
        let xml = export_tei(&r);
        assert!(xml.contains("<p>A &amp; B <ref type=\"bibr\" target=\"#ref-3\">[3]</ref> &lt;ok&gt;</p>"), "{xml}");
        assert!(xml.contains("<bibl xml:id=\"ref-3\">three  x</bibl>"));
        roxmltree::Document::parse(&xml).unwrap();
        assert_eq!(xml, export_tei(&r));
    }

    #[test]
    fn colliding_ids_are_suffixed() {
        let r = ExtractionResult {
            references: vec![reference(Some(2), "a"), reference(None, "b"), reference(Some(2), "c")],
            ..Default::default()
        };
        assert_eq!(reference_ids(&r), vec!["ref-2", "ref-2-2", "ref-2-3"]);
    }
}
