//! Token-level scoring against ground truth, micro-averaging and corpus
//! splitting.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("train fraction must lie in (0, 1), got {0}")]
    Fraction(f64),
    #[error("ground truth line {line}: {message}")]
    GroundTruth { line: usize, message: String },
}

/// Counts and the scores derived from them.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Metrics<T: Scalar> {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub precision: T,
    pub recall: T,
    pub f_score: T,
}

impl<T: Scalar> Metrics<T> {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        let ratio = |a: usize, b: usize| if b == 0 { T::zero() } else { T::of(a as f64) / T::of(b as f64) };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f_score = if precision + recall == T::zero() {
            T::zero()
        } else {
            T::of(2.0) * precision * recall / (precision + recall)
        };
        Metrics { tp, fp, fn_, precision, recall, f_score }
    }

    /// True when there was nothing to predict and nothing was predicted.
    pub fn is_empty(&self) -> bool {
        self.tp + self.fp + self.fn_ == 0
    }
}

pub type TokenMetrics = Metrics<f64>;

fn bag(items: impl Iterator<Item = String>) -> HashMap<String, usize> {
    let mut m = HashMap::new();
    for i in items {
        *m.entry(i).or_insert(0) += 1;
    }
    m
}

/// Multiset overlap between two bags of items.
pub fn bag_metrics<T: Scalar>(predicted: &HashMap<String, usize>, gold: &HashMap<String, usize>) -> Metrics<T> {
    let tp: usize = predicted.iter().map(|(k, &n)| n.min(gold.get(k).copied().unwrap_or(0))).sum();
    let np: usize = predicted.values().sum();
    let ng: usize = gold.values().sum();
    Metrics::from_counts(tp, np - tp, ng - tp)
}

fn tokens(s: &str) -> impl Iterator<Item = String> + '_ {
    s.split_whitespace().map(str::to_lowercase)
}

/// Lowercased whitespace tokens compared as multisets.
pub fn token_score<T: Scalar>(predicted: &str, gold: &str) -> Metrics<T> {
    bag_metrics(&bag(tokens(predicted)), &bag(tokens(gold)))
}

/// Sums the counts, then scores once.
pub fn micro_average<T: Scalar>(per_doc: &[Metrics<T>]) -> Metrics<T> {
    let (tp, fp, fn_) = per_doc.iter().fold((0, 0, 0), |(a, b, c), m| (a + m.tp, b + m.fp, c + m.fn_));
    Metrics::from_counts(tp, fp, fn_)
}

/// Seeded shuffle; the first `ceil(fraction * n)` ids train.
pub fn split_corpus<S: Clone>(ids: &[S], train_fraction: f64, seed: u64) -> Result<(Vec<S>, Vec<S>), EvalError> {
    if ids.is_empty() {
        return Err(EvalError::EmptyCorpus);
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(EvalError::Fraction(train_fraction));
    }
    let mut shuffled = ids.to_vec();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = ((train_fraction * ids.len() as f64).ceil() as usize).min(ids.len());
    let test = shuffled.split_off(n_train);
    Ok((shuffled, test))
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GtAuthor {
    pub first: String,
    pub middle: String,
    pub last: String,
}

impl GtAuthor {
    pub fn full_name(&self) -> String {
        [&self.first, &self.middle, &self.last]
            .iter()
            .filter(|s| !s.is_empty())
            .map(|s| s.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Annotated strings for one document. Read from and written to lines of
/// `FIELD<TAB>value`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroundTruth {
    pub title: Option<String>,
    pub authors: Vec<GtAuthor>,
    pub emails: Vec<String>,
    pub affiliations: Vec<String>,
    pub section_headings: Vec<String>,
    pub figure_headings: Vec<String>,
    pub table_headings: Vec<String>,
    pub urls: Vec<String>,
    /// URLs that point at datasets; each also appears in `urls`.
    pub dataset_urls: Vec<String>,
    pub footnotes: Vec<String>,
    pub references: Vec<String>,
    pub citations: Vec<String>,
    /// (author full name, email address)
    pub author_emails: Vec<(String, String)>,
    /// (citation text, 1-based reference position)
    pub cite_refs: Vec<(String, usize)>,
}

fn clean(v: &str) -> String {
    v.chars().map(|c| if c == '\t' || c == '\n' || c == '\r' { ' ' } else { c }).collect()
}

impl GroundTruth {
    pub fn parse(text: &str) -> Result<GroundTruth, EvalError> {
        let mut gt = GroundTruth::default();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let err = |message: String| EvalError::GroundTruth { line: i + 1, message };
            let fields: Vec<&str> = line.split('\t').collect();
            let arity = |n: usize| {
                if fields.len() == n + 1 {
                    Ok(())
                } else {
                    Err(err(format!("{} expects {n} value(s)", fields[0])))
                }
            };
            let v = || fields[1].to_string();
            match fields[0] {
                "TITLE" => {
                    arity(1)?;
                    gt.title = Some(v());
                }
                "AUTHOR" => {
                    arity(1)?;
                    let parts: Vec<&str> = fields[1].split('|').collect();
                    let [first, middle, last] = parts[..] else {
                        return Err(err("AUTHOR expects first|middle|last".into()));
                    };
                    gt.authors.push(GtAuthor { first: first.into(), middle: middle.into(), last: last.into() });
                }
                "EMAIL" => (arity(1)?, gt.emails.push(v())).1,
                "AFFILIATION" => (arity(1)?, gt.affiliations.push(v())).1,
                "SECTION_HEADING" => (arity(1)?, gt.section_headings.push(v())).1,
                "FIGURE_HEADING" => (arity(1)?, gt.figure_headings.push(v())).1,
                "TABLE_HEADING" => (arity(1)?, gt.table_headings.push(v())).1,
                "URL" => (arity(1)?, gt.urls.push(v())).1,
                "DATASET_URL" => (arity(1)?, gt.dataset_urls.push(v())).1,
                "FOOTNOTE" => (arity(1)?, gt.footnotes.push(v())).1,
                "REFERENCE" => (arity(1)?, gt.references.push(v())).1,
                "CITATION" => (arity(1)?, gt.citations.push(v())).1,
                "AUTHOR_EMAIL" => {
                    arity(2)?;
                    gt.author_emails.push((v(), fields[2].to_string()));
                }
                "CITE_REF" => {
                    arity(2)?;
                    let n = fields[2].parse().map_err(|_| err(format!("bad reference ordinal {:?}", fields[2])))?;
                    gt.cite_refs.push((v(), n));
                }
                other => return Err(err(format!("unknown field {other:?}"))),
            }
        }
        Ok(gt)
    }

    pub fn write(&self) -> String {
        let mut out = String::new();
        let mut put = |field: &str, values: &[&str]| {
            out.push_str(field);
            for v in values {
                out.push('\t');
                out.push_str(&clean(v));
            }
            out.push('\n');
        };
        if let Some(t) = &self.title {
            put("TITLE", &[t]);
        }
        for a in &self.authors {
            let part = |s: &str| s.replace('|', " ");
            put("AUTHOR", &[&format!("{}|{}|{}", part(&a.first), part(&a.middle), part(&a.last))]);
        }
        let lists: [(&str, &Vec<String>); 10] = [
            ("EMAIL", &self.emails),
            ("AFFILIATION", &self.affiliations),
            ("SECTION_HEADING", &self.section_headings),
            ("FIGURE_HEADING", &self.figure_headings),
            ("TABLE_HEADING", &self.table_headings),
            ("URL", &self.urls),
            ("DATASET_URL", &self.dataset_urls),
            ("FOOTNOTE", &self.footnotes),
            ("REFERENCE", &self.references),
            ("CITATION", &self.citations),
        ];
        for (field, values) in lists {
            for v in values {
                put(field, &[v]);
            }
        }
        for (name, email) in &self.author_emails {
            put("AUTHOR_EMAIL", &[name, email]);
        }
        for (cite, n) in &self.cite_refs {
            put("CITE_REF", &[cite, &n.to_string()]);
        }
        out
    }
}

/// Scored subtasks, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subtask {
    Title,
    AuthorFirst,
    AuthorMiddle,
    AuthorLast,
    Email,
    Affiliation,
    SectionHeadings,
    FigureHeadings,
    TableHeadings,
    Urls,
    Footnotes,
    AuthorEmail,
    Citation,
    Reference,
    CitationReference,
}

impl Subtask {
    pub const ALL: [Subtask; 15] = [
        Subtask::Title,
        Subtask::AuthorFirst,
        Subtask::AuthorMiddle,
        Subtask::AuthorLast,
        Subtask::Email,
        Subtask::Affiliation,
        Subtask::SectionHeadings,
        Subtask::FigureHeadings,
        Subtask::TableHeadings,
        Subtask::Urls,
        Subtask::Footnotes,
        Subtask::AuthorEmail,
        Subtask::Citation,
        Subtask::Reference,
        Subtask::CitationReference,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subtask::Title => "Title",
            Subtask::AuthorFirst => "Author First Name",
            Subtask::AuthorMiddle => "Author Middle Name",
            Subtask::AuthorLast => "Author Last Name",
            Subtask::Email => "Email",
            Subtask::Affiliation => "Affiliation",
            Subtask::SectionHeadings => "Section Headings",
            Subtask::FigureHeadings => "Figure headings",
            Subtask::TableHeadings => "Table headings",
            Subtask::Urls => "URLs",
            Subtask::Footnotes => "Footnotes",
            Subtask::AuthorEmail => "Author-Email",
            Subtask::Citation => "Citation",
            Subtask::Reference => "Reference",
            Subtask::CitationReference => "Citation-Reference",
        }
    }

    /// Snake-case key used in machine-readable reports.
    pub fn key(self) -> String {
        self.name().to_lowercase().replace([' ', '-'], "_")
    }
}

fn joined(items: &[String]) -> String {
    items.join(" ")
}

/// Scores every subtask of one document. String fields are scored by
/// tokens; the two pairings are scored as exact pairs.
pub fn score_document<T: Scalar>(predicted: &GroundTruth, gold: &GroundTruth) -> Vec<(Subtask, Metrics<T>)> {
    let names = |gt: &GroundTruth, f: fn(&GtAuthor) -> &String| gt.authors.iter().map(f).cloned().collect::<Vec<_>>();
    Subtask::ALL
        .iter()
        .map(|&s| {
            let m = match s {
                Subtask::Title => token_score(predicted.title.as_deref().unwrap_or(""), gold.title.as_deref().unwrap_or("")),
                Subtask::AuthorFirst => token_score(&joined(&names(predicted, |a| &a.first)), &joined(&names(gold, |a| &a.first))),
                Subtask::AuthorMiddle => token_score(&joined(&names(predicted, |a| &a.middle)), &joined(&names(gold, |a| &a.middle))),
                Subtask::AuthorLast => token_score(&joined(&names(predicted, |a| &a.last)), &joined(&names(gold, |a| &a.last))),
                Subtask::Email => token_score(&joined(&predicted.emails), &joined(&gold.emails)),
                Subtask::Affiliation => token_score(&joined(&predicted.affiliations), &joined(&gold.affiliations)),
                Subtask::SectionHeadings => token_score(&joined(&predicted.section_headings), &joined(&gold.section_headings)),
                Subtask::FigureHeadings => token_score(&joined(&predicted.figure_headings), &joined(&gold.figure_headings)),
                Subtask::TableHeadings => token_score(&joined(&predicted.table_headings), &joined(&gold.table_headings)),
                Subtask::Urls => token_score(&joined(&predicted.urls), &joined(&gold.urls)),
                Subtask::Footnotes => token_score(&joined(&predicted.footnotes), &joined(&gold.footnotes)),
                Subtask::AuthorEmail => {
                    let key = |(n, e): &(String, String)| format!("{}\t{}", n.to_lowercase(), e.to_lowercase());
                    bag_metrics(&bag(predicted.author_emails.iter().map(key)), &bag(gold.author_emails.iter().map(key)))
                }
                Subtask::Citation => token_score(&joined(&predicted.citations), &joined(&gold.citations)),
                Subtask::Reference => token_score(&joined(&predicted.references), &joined(&gold.references)),
                Subtask::CitationReference => {
                    let key = |(c, n): &(String, usize)| format!("{c}\t{n}");
                    bag_metrics(&bag(predicted.cite_refs.iter().map(key)), &bag(gold.cite_refs.iter().map(key)))
                }
            };
            (s, m)
        })
        .collect()
}

/// Micro-averaged metrics per subtask over a corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub documents: usize,
    pub rows: Vec<(Subtask, TokenMetrics)>,
}

impl EvalReport {
    pub fn from_documents(per_doc: &[Vec<(Subtask, TokenMetrics)>]) -> Self {
        let rows = Subtask::ALL
            .iter()
            .map(|&s| {
                let ms: Vec<TokenMetrics> = per_doc.iter().flat_map(|d| d.iter().filter(|(t, _)| *t == s).map(|(_, m)| *m)).collect();
                (s, micro_average(&ms))
            })
            .collect();
        EvalReport { documents: per_doc.len(), rows }
    }

    pub fn get(&self, s: Subtask) -> TokenMetrics {
        self.rows.iter().find(|(t, _)| *t == s).map(|(_, m)| *m).unwrap_or_default()
    }

    /// Aligned plain-text table.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<20} {:>9} {:>9} {:>9} {:>7} {:>7} {:>7}", "Subtask", "Precision", "Recall", "F-Score", "TP", "FP", "FN");
        for (s, m) in &self.rows {
            let _ = writeln!(
                out,
                "{:<20} {:>9.4} {:>9.4} {:>9.4} {:>7} {:>7} {:>7}",
                s.name(),
                m.precision,
                m.recall,
                m.f_score,
                m.tp,
                m.fp,
                m.fn_
            );
        }
        out
    }

    /// `key=value` lines.
    pub fn key_values(&self) -> String {
        let mut out = format!("documents={}\n", self.documents);
        for (s, m) in &self.rows {
            let k = s.key();
            let _ = writeln!(out, "{k}.precision={:.6}\n{k}.recall={:.6}\n{k}.f_score={:.6}", m.precision, m.recall, m.f_score);
            let _ = writeln!(out, "{k}.tp={}\n{k}.fp={}\n{k}.fn={}", m.tp, m.fp, m.fn_);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn token_scores() {
        let m: TokenMetrics = token_score("A b", "a B");
        assert_eq!((m.precision, m.recall, m.f_score), (1.0, 1.0, 1.0));
        let m: TokenMetrics = token_score("a b", "b c");
        assert_eq!((m.precision, m.recall, m.f_score), (0.5, 0.5, 0.5));
        let m: TokenMetrics = token_score("", "a");
        assert_eq!((m.precision, m.recall, m.f_score, m.fn_), (0.0, 0.0, 0.0, 1));
        let m: TokenMetrics = token_score("a a a", "a");
        assert_eq!((m.tp, m.fp, m.fn_), (1, 2, 0));
    }

    #[test]
    fn micro() {
        let a = TokenMetrics::from_counts(1, 1, 0);
        let b = TokenMetrics::from_counts(1, 0, 1);
        let m = micro_average(&[a, b]);
        assert!((m.precision - 2.0 / 3.0).abs() < 1e-12 && (m.recall - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(micro_average(&[a]), a);
        let z: TokenMetrics = micro_average(&[]);
        assert_eq!((z.precision, z.recall, z.f_score), (0.0, 0.0, 0.0));
    }

    #[test]
    fn splits() {
        let ids: Vec<u32> = (0..10).collect();
        let (tr, te) = split_corpus(&ids, 0.2, 42).unwrap();
        assert_eq!((tr.len(), te.len()), (2, 8));
        assert_eq!(split_corpus(&ids, 0.2, 42).unwrap(), (tr, te));
        assert_eq!(split_corpus(&[1, 2, 3], 0.5, 0).unwrap().0.len(), 2);
        assert_eq!(split_corpus::<u32>(&[], 0.5, 0), Err(EvalError::EmptyCorpus));
        assert!(split_corpus(&ids, 1.0, 0).is_err());
    }

    fn sample_gt() -> GroundTruth {
        GroundTruth {
            title: Some("OCR++: A Robust Framework".into()),
            authors: vec![GtAuthor { first: "Krishna".into(), middle: "Sai".into(), last: "Rohith".into() }],
            emails: vec!["a@b.org".into()],
            urls: vec!["http://x.org".into()],
            author_emails: vec![("Krishna Sai Rohith".into(), "a@b.org".into())],
            cite_refs: vec![("[3]".into(), 3)],
            ..Default::default()
        }
    }

    #[test]
    fn ground_truth_round_trip() {
        let gt = sample_gt();
        let text = gt.write();
        assert!(text.starts_with("TITLE\tOCR++: A Robust Framework\nAUTHOR\tKrishna|Sai|Rohith\n"));
        assert_eq!(GroundTruth::parse(&text).unwrap(), gt);
        assert!(matches!(GroundTruth::parse("BANANA\tx"), Err(EvalError::GroundTruth { line: 1, .. })));
        assert!(GroundTruth::parse("AUTHOR\ta|b").is_err());
    }

    #[test]
    fn oracle_scores_one() {
        let gt = sample_gt();
        for (s, m) in score_document::<f64>(&gt, &gt) {
            assert!(m.is_empty() || m.f_score == 1.0, "{s:?}");
        }
        let report = EvalReport::from_documents(&[score_document(&gt, &gt)]);
        assert_eq!(report.get(Subtask::Title).f_score, 1.0);
        assert!(report.table().lines().next().unwrap().starts_with("Subtask"));
        assert!(report.key_values().contains("title.f_score=1.000000"));
    }
}
