//! Textual model file.
//!
//! ```text
//! OCRPP-CRF 1
//! task<TAB>title
//! labels<TAB>2
//! label<TAB>OTHER
//! ...
//! templates<TAB>n
//! template<TAB>id<TAB>kind<TAB>description
//! features<TAB>n
//! w<TAB>feature<TAB>weight per label...
//! transitions<TAB>L
//! t<TAB>weight per target label...
//! end
//! ```
//!
//! Weights are written in shortest round-trip decimal form, so loading a saved
//! model reproduces it exactly.

use std::fmt::Write as _;

use super::{Crf, CrfError, FeatureKind, FeatureTemplate};
use crate::scalar::Scalar;

pub const MODEL_MAGIC: &str = "OCRPP-CRF";
pub const MODEL_VERSION: u32 = 1;

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some(other) => out.push(other),
            None => out.push('\\'),
        }
    }
    out
}

pub fn save_model<T: Scalar>(model: &Crf<T>) -> Vec<u8> {
    let mut out = String::new();
    let _ = writeln!(out, "{MODEL_MAGIC} {MODEL_VERSION}");
    let _ = writeln!(out, "task\t{}", escape(&model.task_name));
    let _ = writeln!(out, "labels\t{}", model.labels.len());
    for l in &model.labels {
        let _ = writeln!(out, "label\t{}", escape(l));
    }
    let _ = writeln!(out, "templates\t{}", model.templates.len());
    for t in &model.templates {
        let _ = writeln!(out, "template\t{}\t{}\t{}", escape(&t.id), t.kind.as_str(), escape(&t.description));
    }
    let l = model.labels.len();
    let _ = writeln!(out, "features\t{}", model.features.len());
    for (i, f) in model.features.iter().enumerate() {
        let _ = write!(out, "w\t{}", escape(f));
        for w in &model.unary[i * l..(i + 1) * l] {
            let _ = write!(out, "\t{:?}", w.as_f64());
        }
        out.push('\n');
    }
    let _ = writeln!(out, "transitions\t{l}");
    for row in model.transition.chunks(l) {
        out.push('t');
        for w in row {
            let _ = write!(out, "\t{:?}", w.as_f64());
        }
        out.push('\n');
    }
    out.push_str("end\n");
    out.into_bytes()
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<(usize, Vec<&'a str>), CrfError> {
        let (i, line) = self.inner.next().ok_or(CrfError::Truncated)?;
        Ok((i + 1, line.split('\t').collect()))
    }

    /// Next line, which must be `key<TAB>...` with `arity` fields after the key.
    fn expect(&mut self, key: &str, arity: usize) -> Result<(usize, Vec<&'a str>), CrfError> {
        let (n, fields) = self.next()?;
        if fields[0] != key || fields.len() != arity + 1 {
            return Err(CrfError::Malformed { line: n, message: format!("expected {key:?} with {arity} fields") });
        }
        Ok((n, fields[1..].to_vec()))
    }

    fn count(&mut self, key: &str) -> Result<usize, CrfError> {
        let (n, f) = self.expect(key, 1)?;
        f[0].parse().map_err(|_| CrfError::Malformed { line: n, message: format!("bad {key} count") })
    }
}

fn weight<T: Scalar>(s: &str, line: usize) -> Result<T, CrfError> {
    let v: f64 = s.parse().map_err(|_| CrfError::Malformed { line, message: format!("bad weight {s:?}") })?;
    if !v.is_finite() {
        return Err(CrfError::Malformed { line, message: "non-finite weight".into() });
    }
    Ok(T::of(v))
}

pub fn load_model<T: Scalar>(bytes: &[u8]) -> Result<Crf<T>, CrfError> {
    if bytes.is_empty() {
        return Err(CrfError::Truncated);
    }
    let text = std::str::from_utf8(bytes)
        .map_err(|_| CrfError::Malformed { line: 0, message: "not UTF-8".into() })?;
    let mut lines = Lines { inner: text.lines().enumerate() };
    let (_, header) = lines.next()?;
    let header = header.join("\t");
    if header != format!("{MODEL_MAGIC} {MODEL_VERSION}") {
        return Err(CrfError::VersionMismatch(header));
    }
    let task = unescape(lines.expect("task", 1)?.1[0]);

    let n_labels = lines.count("labels")?;
    let mut labels = Vec::with_capacity(n_labels);
    for _ in 0..n_labels {
        labels.push(unescape(lines.expect("label", 1)?.1[0]));
    }

    let n_templates = lines.count("templates")?;
    let mut templates = Vec::with_capacity(n_templates);
    for _ in 0..n_templates {
        let (n, f) = lines.expect("template", 3)?;
        let kind = FeatureKind::parse(f[1])
            .ok_or_else(|| CrfError::Malformed { line: n, message: format!("bad kind {:?}", f[1]) })?;
        templates.push(FeatureTemplate { id: unescape(f[0]), kind, description: unescape(f[2]) });
    }

    let n_features = lines.count("features")?;
    let mut features = Vec::with_capacity(n_features);
    let mut unary = Vec::with_capacity(n_features * n_labels);
    for _ in 0..n_features {
        let (n, f) = lines.expect("w", n_labels + 1)?;
        features.push(unescape(f[0]));
        for s in &f[1..] {
            unary.push(weight::<T>(s, n)?);
        }
    }

    let n_rows = lines.count("transitions")?;
    if n_rows != n_labels {
        return Err(CrfError::Malformed { line: 0, message: "transition table size".into() });
    }
    let mut transition = Vec::with_capacity(n_labels * n_labels);
    for _ in 0..n_rows {
        let (n, f) = lines.expect("t", n_labels)?;
        for s in &f {
            transition.push(weight::<T>(s, n)?);
        }
    }
    let (n, end) = lines.next()?;
    if end != ["end"] {
        return Err(CrfError::Malformed { line: n, message: "expected end".into() });
    }

    let mut model = Crf::new(&task, labels, templates, features)?;
    model.unary = unary;
    model.transition = transition;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Crf<f64> {
        let mut m = Crf::new(
            "heading",
            vec!["OTHER".into(), "HEADING".into()],
            vec![
                FeatureTemplate::new("bold", FeatureKind::Boolean, "avg boldness\tover half"),
                FeatureTemplate::new("first", FeatureKind::Categorical, "first token"),
            ],
            vec!["bold".into(), "first=intro\\duction".into()],
        )
        .unwrap();
        m.set_unary_weight("bold", "HEADING", 0.1 + 0.2).unwrap();
        m.set_unary_weight("first=intro\\duction", "OTHER", -1e-300).unwrap();
        m.set_transition_weight("HEADING", "OTHER", 3.5).unwrap();
        m
    }

    #[test]
    fn round_trip() {
        let m = sample();
        assert_eq!(load_model::<f64>(&save_model(&m)).unwrap(), m);
    }

    #[test]
    fn corrupted_header() {
        let mut bytes = save_model(&sample());
        bytes[2] = b'X';
        assert!(matches!(load_model::<f64>(&bytes), Err(CrfError::VersionMismatch(_))));
        let newer = String::from_utf8(save_model(&sample())).unwrap().replacen("OCRPP-CRF 1", "OCRPP-CRF 2", 1);
        assert!(matches!(load_model::<f64>(newer.as_bytes()), Err(CrfError::VersionMismatch(_))));
    }

    #[test]
    fn truncated() {
        assert_eq!(load_model::<f64>(b"").unwrap_err(), CrfError::Truncated);
        let bytes = save_model(&sample());
        let cut = &bytes[..bytes.len() - 10];
        assert!(matches!(load_model::<f64>(cut), Err(CrfError::Truncated) | Err(CrfError::Malformed { .. })));
        let text = String::from_utf8(bytes).unwrap();
        let without_end = text.trim_end().trim_end_matches("end");
        assert_eq!(load_model::<f64>(without_end.as_bytes()).unwrap_err(), CrfError::Truncated);
    }

    #[test]
    fn f32_round_trip() {
        let m64 = sample();
        let mut m: Crf<f32> = Crf::new("t", m64.labels.clone(), m64.templates.clone(), m64.features.clone()).unwrap();
        m.set_unary_weight("bold", "HEADING", 0.1f32 + 0.2f32).unwrap();
        assert_eq!(load_model::<f32>(&save_model(&m)).unwrap(), m);
    }
}
