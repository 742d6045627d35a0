//! Word lists loaded from plain text: one entry per line, `#` starts a comment.

use std::collections::HashSet;

const AFFILIATION_CUES: &str = include_str!("../data/affiliation_cues.txt");
const COUNTRIES: &str = include_str!("../data/countries.txt");
const STOPWORDS: &str = include_str!("../data/stopwords.txt");

/// A set of single- or multi-word entries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    entries: HashSet<String>,
    case_sensitive: bool,
    max_words: usize,
}

impl Lexicon {
    pub fn parse(text: &str, case_sensitive: bool) -> Self {
        let mut lex = Lexicon { entries: HashSet::new(), case_sensitive, max_words: 0 };
        for line in text.lines() {
            let entry = line.split('#').next().unwrap_or("").split_whitespace().collect::<Vec<_>>().join(" ");
            if !entry.is_empty() {
                lex.insert(&entry);
            }
        }
        lex
    }

    pub fn affiliation_cues() -> Self {
        Self::parse(AFFILIATION_CUES, true)
    }

    pub fn countries() -> Self {
        Self::parse(COUNTRIES, true)
    }

    pub fn stopwords() -> Self {
        Self::parse(STOPWORDS, false)
    }

    fn key(&self, s: &str) -> String {
        if self.case_sensitive {
            s.to_string()
        } else {
            s.to_lowercase()
        }
    }

    pub fn insert(&mut self, entry: &str) {
        self.max_words = self.max_words.max(entry.split_whitespace().count());
        let k = self.key(entry);
        self.entries.insert(k);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains(&self.key(word))
    }

    /// Entries found in a word sequence, longest match first at each position.
    /// Words are compared after trimming surrounding punctuation.
    pub fn find_in<S: AsRef<str>>(&self, words: &[S]) -> Vec<String> {
        let clean: Vec<&str> = words.iter().map(|w| trim_punct(w.as_ref())).collect();
        let mut found = Vec::new();
        let mut i = 0;
        while i < clean.len() {
            let mut step = 1;
            for n in (1..=self.max_words.min(clean.len() - i)).rev() {
                let phrase = clean[i..i + n].join(" ");
                if !phrase.is_empty() && self.contains(&phrase) {
                    found.push(phrase);
                    step = n;
                    break;
                }
            }
            i += step;
        }
        found
    }
}

/// Strips leading and trailing non-alphanumeric characters.
pub fn trim_punct(w: &str) -> &str {
    w.trim_matches(|c: char| !c.is_alphanumeric())
}
