//! Title, authors, emails, affiliations, and the author to email mapping.

use std::collections::HashSet;

use once_cell::sync::Lazy;
use regex::Regex;
use thiserror::Error;

use crate::crf::{Crf, CrfError};
use crate::chunker::style_run_end;
use crate::features::{is_initial, is_name_word, HeaderView, Lexicons, TARGET};
use crate::lexicon::trim_punct;
use crate::model::{join_tokens, median, Chunk, Document, Token};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetadataError {
    #[error("empty document")]
    EmptyDocument,
    #[error(transparent)]
    Crf(#[from] CrfError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuthorName {
    pub first: String,
    pub middle: String,
    pub last: String,
    pub source_tokens: Vec<Token>,
    /// Superscript markers printed right after the name.
    pub markers: Vec<String>,
}

impl AuthorName {
    /// First, middle and last joined with spaces; a single-token name
    /// appears once.
    pub fn full_name(&self) -> String {
        if self.source_tokens.len() == 1 {
            return self.first.clone();
        }
        [&self.first, &self.middle, &self.last].iter().filter(|s| !s.is_empty()).map(|s| s.as_str()).collect::<Vec<_>>().join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EmailAddress {
    pub user: String,
    pub domain: String,
    /// The text the address was read from.
    pub raw: String,
}

impl EmailAddress {
    pub fn address(&self) -> String {
        format!("{}@{}", self.user, self.domain)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Affiliation {
    pub text: String,
    pub marker: Option<String>,
    pub matched_cues: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuthorRecord {
    pub name: AuthorName,
    pub email: Option<EmailAddress>,
    pub affiliation: Option<Affiliation>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetadataParams {
    /// Tokens after the title searched for author names.
    pub author_window: usize,
    /// Longer runs of name-labeled tokens are discarded.
    pub max_author_run: usize,
    /// An x-gap this many times the median inter-token gap separates names.
    pub author_gap_factor: f64,
}

impl Default for MetadataParams {
    fn default() -> Self {
        MetadataParams { author_window: 120, max_author_run: 5, author_gap_factor: 2.0 }
    }
}

/// Stream positions of the first chunk's tokens labeled as title.
pub fn title_positions<T: Scalar>(view: &HeaderView<'_>, model: &Crf<T>) -> Result<Vec<usize>, CrfError> {
    if view.first_chunk_len == 0 {
        return Ok(Vec::new());
    }
    let labels = model.viterbi_decode(&view.title_features())?;
    Ok(labels.iter().enumerate().filter(|(_, l)| *l == TARGET).map(|(i, _)| i).collect())
}

/// Stream positions of the page-1 chunk with the largest average font size,
/// together with the chunks continuing it.
pub fn largest_font_chunk(view: &HeaderView<'_>, chunks: &[Chunk]) -> Vec<usize> {
    let Some(first_page) = chunks.first().map(|c| c.page_no) else { return Vec::new() };
    let best = chunks
        .iter()
        .enumerate()
        .filter(|(_, c)| c.page_no == first_page)
        .fold(None::<(usize, f64)>, |best, (i, c)| match best {
            Some((_, f)) if f >= c.avg_font_size => best,
            _ => Some((i, c.avg_font_size)),
        });
    let Some((ci, _)) = best else { return Vec::new() };
    let end = style_run_end(chunks, ci);
    (0..view.stream.len()).filter(|&p| (ci..end).contains(&view.stream[p].chunk)).collect()
}

/// Title positions, falling back to the largest-font chunk on page 1 when
/// the model labels nothing.
pub fn title_positions_with_fallback<T: Scalar>(
    view: &HeaderView<'_>,
    chunks: &[Chunk],
    model: &Crf<T>,
) -> Result<Vec<usize>, CrfError> {
    let pos = title_positions(view, model)?;
    Ok(if pos.is_empty() { largest_font_chunk(view, chunks) } else { pos })
}

/// Tokens of the first chunk labeled as title.
pub fn extract_title<T: Scalar>(doc: &Document, chunks: &[Chunk], model: &Crf<T>) -> Result<Vec<Token>, MetadataError> {
    if doc.token_count() == 0 || chunks.is_empty() {
        return Err(MetadataError::EmptyDocument);
    }
    let lex = Lexicons::default();
    let view = HeaderView::new(chunks, &lex);
    let pos = title_positions(&view, model)?;
    Ok(pos.iter().map(|&p| view.token(p).clone()).collect())
}

/// Title text without superscript markers.
pub fn title_text(tokens: &[Token]) -> String {
    join_tokens(tokens.iter().filter(|t| !t.sup_flag))
}

/// Candidate positions for author names: the first chunk plus `window`
/// tokens after the title, minus the title itself.
pub fn author_window(view: &HeaderView<'_>, title: &[usize], window: usize) -> Vec<usize> {
    let end = title.iter().max().map_or(view.first_chunk_len, |&m| m + 1);
    let title: HashSet<usize> = title.iter().copied().collect();
    let upto = (end + window).min(view.stream.len());
    (0..view.first_chunk_len.max(upto)).filter(|p| (*p < view.first_chunk_len || *p >= end) && !title.contains(p)).collect()
}

pub fn extract_author_names<T: Scalar>(
    view: &HeaderView<'_>,
    title: &[usize],
    model: &Crf<T>,
    lex: &Lexicons,
    params: &MetadataParams,
) -> Result<Vec<AuthorName>, CrfError> {
    let window = author_window(view, title, params.author_window);
    if window.is_empty() {
        return Ok(Vec::new());
    }
    let title_end_line = title.iter().max().map(|&p| view.stream[p].line);
    let labels = model.viterbi_decode(&view.author_features(&window, title_end_line, lex))?;
    let flags: Vec<bool> = labels.iter().map(|l| l == TARGET).collect();
    Ok(author_runs(view, &window, &flags, lex, params))
}

fn strip_name_punct(s: &str) -> &str {
    s.trim_end_matches([',', ';'])
}

/// Groups labeled positions into names and applies the false-positive rules.
pub fn author_runs(
    view: &HeaderView<'_>,
    window: &[usize],
    is_name: &[bool],
    lex: &Lexicons,
    params: &MetadataParams,
) -> Vec<AuthorName> {
    let gaps: Vec<f64> = window
        .windows(2)
        .filter(|w| w[1] == w[0] + 1 && view.stream[w[0]].line == view.stream[w[1]].line)
        .map(|w| view.token(w[1]).x - view.token(w[0]).right())
        .filter(|g| *g >= 0.0)
        .collect();
    let gap_limit = (params.author_gap_factor * median(gaps).unwrap_or(0.0)).max(1.0);

    let mut runs: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    for (i, &p) in window.iter().enumerate() {
        let t = view.token(p);
        if !is_name[i] || t.sup_flag {
            if !current.is_empty() {
                runs.push(std::mem::take(&mut current));
            }
            continue;
        }
        if let Some(&q) = current.last() {
            let prev = view.token(q);
            let split = q + 1 != p
                || view.stream[q].line != view.stream[p].line
                || t.x - prev.right() > gap_limit
                || prev.text.ends_with([',', ';']);
            if split {
                runs.push(std::mem::take(&mut current));
            }
        }
        current.push(p);
    }
    if !current.is_empty() {
        runs.push(current);
    }

    runs.into_iter()
        .filter(|run| {
            run.len() <= params.max_author_run
                && run.iter().all(|&p| {
                    let w = &view.token(p).text;
                    is_name_word(w) && (is_initial(w) || !lex.stopwords.contains(trim_punct(w)))
                })
        })
        .map(|run| {
            let tokens: Vec<Token> = run.iter().map(|&p| view.token(p).clone()).collect();
            let last = *run.last().unwrap();
            let line = view.stream[last].line;
            let markers = (last + 1..view.stream.len())
                .take_while(|&p| view.stream[p].line == line && view.token(p).sup_flag)
                .flat_map(|p| split_markers(&view.token(p).text))
                .collect();
            AuthorName { markers, ..split_name(tokens) }
        })
        .collect()
}

/// Marker symbols in a superscript token such as `1,2` or `*`.
pub fn split_markers(text: &str) -> Vec<String> {
    text.split([',', ' ']).map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}

/// First word is the first name, last word the last name, anything between
/// the middle name.
pub fn split_name(tokens: Vec<Token>) -> AuthorName {
    let words: Vec<String> = tokens.iter().map(|t| strip_name_punct(&t.text).to_string()).collect();
    let (first, middle, last) = match words.len() {
        0 => (String::new(), String::new(), String::new()),
        1 => (words[0].clone(), String::new(), words[0].clone()),
        n => (words[0].clone(), words[1..n - 1].join(" "), words[n - 1].clone()),
    };
    AuthorName { first, middle, last, source_tokens: tokens, markers: Vec::new() }
}

const USER: &str = r"[A-Za-z0-9._%+\-]+";
const DOMAIN: &str = r"[A-Za-z0-9](?:[A-Za-z0-9\-]*[A-Za-z0-9])?(?:\.[A-Za-z0-9](?:[A-Za-z0-9\-]*[A-Za-z0-9])?)+";

/// `{a, b}@dom` and `[a, b]@dom`.
static GROUP_EMAIL: Lazy<Regex> =
    Lazy::new(|| Regex::new(&format!(r"[\{{\[]([^\{{\}}\[\]@]+)[\}}\]]\s*@\s*({DOMAIN})")).unwrap());
/// `[a@sub1, b@sub2].dom`.
static SUBDOMAIN_GROUP_EMAIL: Lazy<Regex> =
    Lazy::new(|| Regex::new(&format!(r"\[([^\[\]]*@[^\[\]]*)\]\s*\.\s*({DOMAIN})")).unwrap());
static PLAIN_EMAIL: Lazy<Regex> = Lazy::new(|| Regex::new(&format!(r"({USER})@({DOMAIN})")).unwrap());
static USER_ONLY: Lazy<Regex> = Lazy::new(|| Regex::new(&format!(r"^{USER}$")).unwrap());
static SUBDOMAIN: Lazy<Regex> = Lazy::new(|| Regex::new(r"^[A-Za-z0-9](?:[A-Za-z0-9.\-]*[A-Za-z0-9])?$").unwrap());

fn clean_user(u: &str) -> Option<&str> {
    let u = u.trim().trim_matches('.');
    USER_ONLY.is_match(u).then_some(u)
}

/// Addresses written in `text`, expanding grouped forms to one address per
/// user.
pub fn expand_email_group(text: &str) -> Vec<EmailAddress> {
    let mut found: Vec<(usize, EmailAddress)> = Vec::new();
    let mut claimed: Vec<(usize, usize)> = Vec::new();
    let free = |claimed: &[(usize, usize)], s: usize, e: usize| claimed.iter().all(|&(a, b)| e <= a || s >= b);

    for c in SUBDOMAIN_GROUP_EMAIL.captures_iter(text) {
        let m = c.get(0).unwrap();
        let domain = &c[2];
        let mut parsed = Vec::new();
        for item in c[1].split(',') {
            let Some((user, sub)) = item.trim().split_once('@') else { continue };
            if let (Some(user), true) = (clean_user(user), SUBDOMAIN.is_match(sub.trim())) {
                parsed.push(EmailAddress { user: user.into(), domain: format!("{}.{domain}", sub.trim()), raw: m.as_str().into() });
            }
        }
        if !parsed.is_empty() {
            claimed.push((m.start(), m.end()));
            found.extend(parsed.into_iter().map(|e| (m.start(), e)));
        }
    }
    for c in GROUP_EMAIL.captures_iter(text) {
        let m = c.get(0).unwrap();
        if !free(&claimed, m.start(), m.end()) {
            continue;
        }
        let users: Vec<&str> = c[1].split([',', ';', '|']).filter_map(clean_user).collect();
        if users.is_empty() {
            continue;
        }
        claimed.push((m.start(), m.end()));
        for u in users {
            found.push((m.start(), EmailAddress { user: u.into(), domain: c[2].into(), raw: m.as_str().into() }));
        }
    }
    for c in PLAIN_EMAIL.captures_iter(text) {
        let m = c.get(0).unwrap();
        if !free(&claimed, m.start(), m.end()) {
            continue;
        }
        let user = c[1].trim_start_matches('.');
        if user.is_empty() {
            continue;
        }
        found.push((m.start(), EmailAddress { user: user.into(), domain: c[2].into(), raw: m.as_str().into() }));
    }
    if found.is_empty() && text.contains('@') {
        log::warn!("no email address could be read from {text:?}");
    }
    found.sort_by_key(|(s, _)| *s);
    found.into_iter().map(|(_, e)| e).collect()
}

/// Addresses on page 1, de-duplicated in order of first occurrence.
pub fn extract_emails(doc: &Document) -> Vec<EmailAddress> {
    let Some(page) = doc.pages.first() else { return Vec::new() };
    let text: Vec<String> = page.lines.iter().map(|l| l.text()).filter(|t| t.contains('@')).collect();
    let mut seen = HashSet::new();
    expand_email_group(&text.join("\n"))
        .into_iter()
        .filter(|e| seen.insert((e.user.clone(), e.domain.clone())))
        .collect()
}

/// Affiliations in the header region: page-1 chunks before `header_end`.
/// Lines holding an `@` or any excluded stream position (title and author
/// tokens) are skipped. A line starting with a superscript starts a new
/// affiliation.
pub fn extract_affiliations(
    view: &HeaderView<'_>,
    chunks: &[Chunk],
    header_end: usize,
    excluded: &HashSet<usize>,
    lex: &Lexicons,
) -> Vec<Affiliation> {
    let Some(first_page) = chunks.first().map(|c| c.page_no) else { return Vec::new() };
    // stream positions grouped by line id
    let mut lines: Vec<(usize, Vec<usize>)> = Vec::new();
    for (p, st) in view.stream.iter().enumerate() {
        if st.chunk >= header_end.min(chunks.len()) || chunks[st.chunk].page_no != first_page {
            continue;
        }
        match lines.last_mut() {
            Some((id, ps)) if *id == st.line => ps.push(p),
            _ => lines.push((st.line, vec![p])),
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    let mut prev_chunk = None;
    for (_, ps) in lines {
        let skip = ps.iter().any(|&p| excluded.contains(&p) || view.token(p).text.contains('@'));
        let chunk = view.stream[ps[0]].chunk;
        let starts_marker = view.token(ps[0]).sup_flag;
        if skip || starts_marker || prev_chunk != Some(chunk) {
            if !current.is_empty() {
                blocks.push(std::mem::take(&mut current));
            }
        }
        prev_chunk = Some(chunk);
        if !skip {
            current.extend(ps);
        }
    }
    if !current.is_empty() {
        blocks.push(current);
    }
    blocks
        .into_iter()
        .filter_map(|ps| {
            let tokens: Vec<&Token> = ps.iter().map(|&p| view.token(p)).collect();
            let words: Vec<&str> = tokens.iter().filter(|t| !t.sup_flag).map(|t| t.text.as_str()).collect();
            let cues = lex.cues_in(&words);
            if cues.is_empty() {
                return None;
            }
            let marker = tokens.first().filter(|t| t.sup_flag).map(|t| t.text.clone());
            Some(Affiliation { text: words.join(" "), marker, matched_cues: cues })
        })
        .collect()
}

fn letters(s: &str) -> String {
    s.chars().filter(|c| c.is_alphanumeric()).flat_map(char::to_lowercase).collect()
}

fn substring_match(name: &AuthorName, email: &EmailAddress) -> bool {
    let user = letters(&email.user);
    [&name.first, &name.last].iter().map(|n| letters(n)).filter(|n| n.chars().count() >= 4).any(|n| user.contains(&n) || (user.chars().count() >= 4 && n.contains(&user)))
}

fn abbreviation_match(name: &AuthorName, email: &EmailAddress) -> bool {
    let user = letters(&email.user);
    let last = letters(&name.last);
    if last.is_empty() {
        return false;
    }
    let initial = |s: &str| letters(s).chars().next();
    let mut all_initials: String = initial(&name.first).into_iter().collect();
    all_initials.extend(name.middle.split_whitespace().filter_map(initial));
    let first_initial: String = initial(&name.first).into_iter().collect();
    user == format!("{all_initials}{last}") || user == format!("{first_initial}{last}")
}

/// Pairs each author with at most one email: substring match first, then
/// initials plus last name, then leftover authors and emails by order of
/// occurrence when their counts are equal.
pub fn map_authors_to_emails(names: &[AuthorName], emails: &[EmailAddress]) -> Vec<AuthorRecord> {
    let mut assigned: Vec<Option<usize>> = vec![None; names.len()];
    let mut used = vec![false; emails.len()];
    let rules: [fn(&AuthorName, &EmailAddress) -> bool; 2] = [substring_match, abbreviation_match];
    for rule in rules {
        for (i, name) in names.iter().enumerate() {
            if assigned[i].is_some() {
                continue;
            }
            if let Some(j) = (0..emails.len()).find(|&j| !used[j] && rule(name, &emails[j])) {
                assigned[i] = Some(j);
                used[j] = true;
            }
        }
    }
    let left_names: Vec<usize> = (0..names.len()).filter(|&i| assigned[i].is_none()).collect();
    let left_emails: Vec<usize> = (0..emails.len()).filter(|&j| !used[j]).collect();
    if left_names.len() == left_emails.len() {
        for (&i, &j) in left_names.iter().zip(&left_emails) {
            assigned[i] = Some(j);
        }
    }
    names
        .iter()
        .zip(assigned)
        .map(|(name, a)| AuthorRecord { name: name.clone(), email: a.map(|j| emails[j].clone()), affiliation: None })
        .collect()
}

/// Attaches affiliations by superscript marker, or the only affiliation when
/// there is exactly one.
pub fn attach_affiliations(records: &mut [AuthorRecord], affiliations: &[Affiliation]) {
    for r in records.iter_mut() {
        r.affiliation = r
            .name
            .markers
            .iter()
            .find_map(|m| affiliations.iter().find(|a| a.marker.as_deref().is_some_and(|am| split_markers(am).contains(m))))
            .cloned();
        if r.affiliation.is_none() && affiliations.len() == 1 {
            r.affiliation = Some(affiliations[0].clone());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::testutil::tok;

    fn name(first: &str, middle: &str, last: &str) -> AuthorName {
        let words: Vec<&str> = [first, middle, last].into_iter().filter(|s| !s.is_empty()).collect();
        split_name(words.iter().map(|w| tok(w, 0.0, 0.0, 10.0, false)).collect())
    }

    fn email(s: &str) -> EmailAddress {
        expand_email_group(s).remove(0)
    }

    #[test]
    fn name_split() {
        let n = name("Krishna", "Sai", "Rohith");
        assert_eq!((n.first.as_str(), n.middle.as_str(), n.last.as_str()), ("Krishna", "Sai", "Rohith"));
        let n = split_name(vec![tok("Plato", 0.0, 0.0, 10.0, false)]);
        assert_eq!((n.first.as_str(), n.middle.as_str(), n.last.as_str()), ("Plato", "", "Plato"));
        assert_eq!(n.full_name(), "Plato");
        let n = split_name(vec![tok("Pawan", 0.0, 0.0, 10.0, false), tok("Goyal,", 0.0, 0.0, 10.0, false)]);
        assert_eq!(n.last, "Goyal");
    }

    #[test]
    fn email_patterns() {
        let addrs = |s: &str| expand_email_group(s).iter().map(EmailAddress::address).collect::<Vec<_>>();
        assert_eq!(addrs("x@y.z"), ["x@y.z"]);
        assert_eq!(addrs("{a, b, c}@cse.dom.com"), ["a@cse.dom.com", "b@cse.dom.com", "c@cse.dom.com"]);
        assert_eq!(addrs("[author4, author5, author6]@cse.domain.com"), ["author4@cse.domain.com", "author5@cse.domain.com", "author6@cse.domain.com"]);
        assert_eq!(addrs("[a@cse, a@ee].dom.com"), ["a@cse.dom.com", "a@ee.dom.com"]);
        assert_eq!(addrs("mail mayank.singh@cse.iitkgp.ernet.in."), ["mayank.singh@cse.iitkgp.ernet.in"]);
        assert!(addrs("broken @ nothing").is_empty());
        let e = email("{p, q}@d.org");
        assert_eq!(e.raw, "{p, q}@d.org");
    }

    #[test]
    fn mapping_rules() {
        let names = vec![name("Mayank", "", "Singh"), name("Pawan", "", "Goyal")];
        let emails = vec![email("pgoyal@dom.in"), email("mayank.singh@cse.iitkgp.ernet.in")];
        let r = map_authors_to_emails(&names, &emails);
        assert_eq!(r[0].email.as_ref().unwrap().user, "mayank.singh");
        assert_eq!(r[1].email.as_ref().unwrap().user, "pgoyal");

        let names = vec![name("Ann", "", "Lee"), name("Bo", "", "Wu")];
        let emails = vec![email("x1@d.org"), email("x2@d.org")];
        let r = map_authors_to_emails(&names, &emails);
        assert_eq!(r[0].email.as_ref().unwrap().user, "x1");
        assert_eq!(r[1].email.as_ref().unwrap().user, "x2");

        let emails = vec![email("x1@d.org")];
        assert!(map_authors_to_emails(&names, &emails).iter().all(|r| r.email.is_none()));
    }

    fn header_chunks() -> Vec<Chunk> {
        let line = |y: f64, words: &[&str], font: f64, bold: bool, x0: f64| {
            let mut x = x0;
            words
                .iter()
                .map(|w| {
                    let t = tok(w, x, y, font, bold);
                    x += t.width + 3.0;
                    t
                })
                .collect::<Vec<_>>()
        };
        let title = line(60.0, &["OCR++:", "A", "Robust", "Framework"], 17.0, true, 150.0);
        let mut names = line(90.0, &["Mayank", "Singh"], 11.0, false, 150.0);
        names.extend(line(90.0, &["Pawan", "Goyal"], 11.0, false, 330.0));
        let mut marked = line(105.0, &["Acme", "Research", "Labs"], 10.0, false, 160.0);
        let mut sup = tok("1", 150.0, 102.0, 6.0, false);
        sup.sup_flag = true;
        marked.insert(0, sup);
        let mut aff = line(118.0, &["Indian", "Institute", "of", "Technology,", "Kharagpur,", "India"], 10.0, false, 160.0);
        let mut sup2 = tok("2", 150.0, 115.0, 6.0, false);
        sup2.sup_flag = true;
        aff.insert(0, sup2);
        let mail = line(131.0, &["{mayank,pawan}@cse.iitkgp.ernet.in"], 10.0, false, 150.0);
        let abs = line(160.0, &["Abstract"], 12.0, true, 150.0);
        let n = marked.len();
        vec![
            Chunk::new(title, vec![0]).unwrap(),
            Chunk::new(names, vec![0]).unwrap(),
            Chunk::new([marked, aff, mail].concat(), vec![0, n, n + 7]).unwrap(),
            Chunk::new(abs, vec![0]).unwrap(),
        ]
    }

    #[test]
    fn runs_split_on_wide_gaps_and_drop_noise() {
        let chunks = header_chunks();
        let lex = Lexicons::default();
        let view = HeaderView::new(&chunks, &lex);
        let window: Vec<usize> = (4..view.stream.len()).collect();
        // label the two names, the affiliation words and "721302"-style noise as names
        let flags: Vec<bool> = window.iter().map(|&p| p < 8 || (9..12).contains(&p) || (13..19).contains(&p)).collect();
        let names = author_runs(&view, &window, &flags, &lex, &MetadataParams::default());
        let full: Vec<String> = names.iter().map(|n| n.full_name()).collect();
        assert_eq!(full[..2], ["Mayank Singh", "Pawan Goyal"]);
        // "Indian Institute of Technology, ..." has a stopword and is dropped
        assert!(!full.iter().any(|f| f.contains("Institute")));
    }

    #[test]
    fn digit_runs_dropped() {
        let toks = vec![tok("IIT", 10.0, 10.0, 10.0, false), tok("Kharagpur", 30.0, 10.0, 10.0, false), tok("721302", 90.0, 10.0, 10.0, false)];
        let chunks = vec![Chunk::new(toks, vec![0]).unwrap()];
        let lex = Lexicons::default();
        let view = HeaderView::new(&chunks, &lex);
        assert!(author_runs(&view, &[0, 1, 2], &[true, true, true], &lex, &MetadataParams::default()).is_empty());
    }

    #[test]
    fn affiliations_in_header() {
        let chunks = header_chunks();
        let lex = Lexicons::default();
        let view = HeaderView::new(&chunks, &lex);
        let excluded: HashSet<usize> = (0..8).collect();
        let affs = extract_affiliations(&view, &chunks, 3, &excluded, &lex);
        assert_eq!(affs.len(), 2, "{affs:?}");
        assert_eq!(affs[0].marker.as_deref(), Some("1"));
        assert_eq!(affs[0].text, "Acme Research Labs");
        assert_eq!(affs[1].matched_cues, ["Institute", "India"]);
        assert_eq!(affs[1].marker.as_deref(), Some("2"));
    }

    #[test]
    fn window_covers_first_chunk_and_following_tokens() {
        let chunks = header_chunks();
        let lex = Lexicons::default();
        let view = HeaderView::new(&chunks, &lex);
        let w = author_window(&view, &[0, 1, 2, 3], 5);
        assert_eq!(w, vec![4, 5, 6, 7, 8]);
        let w = author_window(&view, &[], 3);
        assert_eq!(w, vec![0, 1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn emails_from_document() {
        let mut doc = Document::default();
        let l = crate::model::Line::new(vec![tok("{a,b}@x.org", 10.0, 10.0, 10.0, false), tok("a@x.org", 100.0, 10.0, 10.0, false)]);
        doc.pages.push(crate::model::Page::new(1, 612.0, 792.0, vec![l]));
        let e: Vec<String> = extract_emails(&doc).iter().map(|e| e.address()).collect();
        assert_eq!(e, ["a@x.org", "b@x.org"]);
    }
}
