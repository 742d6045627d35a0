//! Linear-chain conditional random field.
//!
//! A path `y` over a sequence `x` scores
//! `sum_t sum_{f in x_t} w[f, y_t] + sum_t v[y_{t-1}, y_t]`.
//! There are no start or stop weights. Items carry sparse binary features
//! named `template` (boolean) or `template=value` (bucketed and categorical).

mod io;
mod train;

use std::collections::HashMap;

use thiserror::Error;

use crate::scalar::{log_sum_exp, Scalar};

pub use io::{load_model, save_model, MODEL_MAGIC, MODEL_VERSION};
pub use train::{train, TrainConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CrfError {
    #[error("empty sequence")]
    EmptySequence,
    #[error("empty dataset")]
    EmptyDataset,
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("path length {path} does not match sequence length {sequence}")]
    LengthMismatch { path: usize, sequence: usize },
    #[error("feature {0:?} does not belong to any template")]
    UnknownTemplate(String),
    #[error("duplicate template id {0:?}")]
    DuplicateTemplate(String),
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("model needs at least one label")]
    NoLabels,
    #[error("numeric overflow")]
    NumericOverflow,
    #[error("parameter vector has length {got}, expected {expected}")]
    ParamLength { got: usize, expected: usize },
    #[error("model file version mismatch: {0:?}")]
    VersionMismatch(String),
    #[error("model file truncated")]
    Truncated,
    #[error("malformed model file at line {line}: {message}")]
    Malformed { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureKind {
    Boolean,
    BucketedReal,
    Categorical,
}

impl FeatureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FeatureKind::Boolean => "boolean",
            FeatureKind::BucketedReal => "bucketed-real",
            FeatureKind::Categorical => "categorical",
        }
    }

    pub fn parse(s: &str) -> Option<FeatureKind> {
        match s {
            "boolean" => Some(FeatureKind::Boolean),
            "bucketed-real" => Some(FeatureKind::BucketedReal),
            "categorical" => Some(FeatureKind::Categorical),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FeatureTemplate {
    pub id: String,
    pub kind: FeatureKind,
    pub description: String,
}

impl FeatureTemplate {
    pub fn new(id: &str, kind: FeatureKind, description: &str) -> Self {
        FeatureTemplate { id: id.to_string(), kind, description: description.to_string() }
    }
}

/// Names of the features active at one position.
pub type FeatureVector = Vec<String>;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabeledSequence {
    pub items: Vec<(FeatureVector, String)>,
}

impl LabeledSequence {
    pub fn new(features: Vec<FeatureVector>, labels: Vec<String>) -> Self {
        LabeledSequence { items: features.into_iter().zip(labels).collect() }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn features(&self) -> Vec<FeatureVector> {
        self.items.iter().map(|(f, _)| f.clone()).collect()
    }
}

/// Template id of a feature name (`"case=upper"` -> `"case"`).
pub fn template_of(feature: &str) -> &str {
    feature.split_once('=').map_or(feature, |(t, _)| t)
}

/// Decile bucket of a value expected in `[0, 1]`; out-of-range values clamp.
pub fn decile(v: f64) -> usize {
    if !v.is_finite() || v <= 0.0 {
        return 0;
    }
    ((v * 10.0).floor() as usize).min(9)
}

/// Sequence with interned feature ids, one list per position.
pub(crate) type Encoded = Vec<Vec<usize>>;

#[derive(Debug, Clone, PartialEq)]
pub struct Crf<T: Scalar> {
    task_name: String,
    labels: Vec<String>,
    templates: Vec<FeatureTemplate>,
    features: Vec<String>,
    feature_index: HashMap<String, usize>,
    /// `features.len() * labels.len()`, row per feature.
    unary: Vec<T>,
    /// `labels.len()^2`, indexed `from * L + to`.
    transition: Vec<T>,
}

impl<T: Scalar> Crf<T> {
    /// Zero-weight model over the given feature names.
    pub fn new(
        task_name: &str,
        labels: Vec<String>,
        templates: Vec<FeatureTemplate>,
        features: Vec<String>,
    ) -> Result<Self, CrfError> {
        if labels.is_empty() {
            return Err(CrfError::NoLabels);
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(CrfError::DuplicateLabel(l.clone()));
            }
        }
        for (i, t) in templates.iter().enumerate() {
            if templates[..i].iter().any(|o| o.id == t.id) {
                return Err(CrfError::DuplicateTemplate(t.id.clone()));
            }
        }
        let mut feature_index = HashMap::with_capacity(features.len());
        for (i, f) in features.iter().enumerate() {
            if !templates.iter().any(|t| t.id == template_of(f)) {
                return Err(CrfError::UnknownTemplate(f.clone()));
            }
            feature_index.insert(f.clone(), i);
        }
        let l = labels.len();
        Ok(Crf {
            task_name: task_name.to_string(),
            unary: vec![T::zero(); features.len() * l],
            transition: vec![T::zero(); l * l],
            labels,
            templates,
            features,
            feature_index,
        })
    }

    pub fn task_name(&self) -> &str {
        &self.task_name
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn templates(&self) -> &[FeatureTemplate] {
        &self.templates
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn num_labels(&self) -> usize {
        self.labels.len()
    }

    pub fn num_params(&self) -> usize {
        self.unary.len() + self.transition.len()
    }

    pub fn label_index(&self, label: &str) -> Result<usize, CrfError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| CrfError::UnknownLabel(label.to_string()))
    }

    pub fn unary_weight(&self, feature: &str, label: &str) -> Option<T> {
        let f = *self.feature_index.get(feature)?;
        let l = self.label_index(label).ok()?;
        Some(self.unary[f * self.labels.len() + l])
    }

    pub fn set_unary_weight(&mut self, feature: &str, label: &str, w: T) -> Result<(), CrfError> {
        let f = *self
            .feature_index
            .get(feature)
            .ok_or_else(|| CrfError::UnknownTemplate(feature.to_string()))?;
        let l = self.label_index(label)?;
        let n = self.labels.len();
        self.unary[f * n + l] = w;
        Ok(())
    }

    pub fn transition_weight(&self, from: &str, to: &str) -> Option<T> {
        let (a, b) = (self.label_index(from).ok()?, self.label_index(to).ok()?);
        Some(self.transition[a * self.labels.len() + b])
    }

    pub fn set_transition_weight(&mut self, from: &str, to: &str, w: T) -> Result<(), CrfError> {
        let (a, b) = (self.label_index(from)?, self.label_index(to)?);
        let n = self.labels.len();
        self.transition[a * n + b] = w;
        Ok(())
    }

    /// Flat parameter vector: unary weights followed by transitions.
    pub fn params(&self) -> Vec<T> {
        self.unary.iter().chain(&self.transition).copied().collect()
    }

    pub fn set_params(&mut self, params: &[T]) -> Result<(), CrfError> {
        if params.len() != self.num_params() {
            return Err(CrfError::ParamLength { got: params.len(), expected: self.num_params() });
        }
        let (u, t) = params.split_at(self.unary.len());
        self.unary.copy_from_slice(u);
        self.transition.copy_from_slice(t);
        Ok(())
    }

    /// Interns feature names; features the model has never seen are dropped.
    pub(crate) fn encode(&self, seq: &[FeatureVector]) -> Encoded {
        seq.iter()
            .map(|fs| fs.iter().filter_map(|f| self.feature_index.get(f).copied()).collect())
            .collect()
    }

    /// Per-position label scores, `n * L`.
    fn emissions(&self, enc: &Encoded) -> Vec<T> {
        let l = self.labels.len();
        let mut out = vec![T::zero(); enc.len() * l];
        for (t, feats) in enc.iter().enumerate() {
            let row = &mut out[t * l..(t + 1) * l];
            for &f in feats {
                for (r, &w) in row.iter_mut().zip(&self.unary[f * l..(f + 1) * l]) {
                    *r = *r + w;
                }
            }
        }
        out
    }

    fn path_score(&self, emissions: &[T], path: &[usize]) -> T {
        let l = self.labels.len();
        let mut s = T::zero();
        for (t, &y) in path.iter().enumerate() {
            s = s + emissions[t * l + y];
            if t > 0 {
                s = s + self.transition[path[t - 1] * l + y];
            }
        }
        s
    }

    pub fn score(&self, seq: &[FeatureVector], path: &[&str]) -> Result<T, CrfError> {
        if path.len() != seq.len() {
            return Err(CrfError::LengthMismatch { path: path.len(), sequence: seq.len() });
        }
        let idx = path.iter().map(|p| self.label_index(p)).collect::<Result<Vec<_>, _>>()?;
        let enc = self.encode(seq);
        Ok(self.path_score(&self.emissions(&enc), &idx))
    }

    /// Highest-scoring path. Ties go to the earlier label in `labels()` at
    /// the final position and at every backtrack step.
    pub fn viterbi_decode(&self, seq: &[FeatureVector]) -> Result<Vec<String>, CrfError> {
        if seq.is_empty() {
            return Err(CrfError::EmptySequence);
        }
        let path = self.viterbi_encoded(&self.encode(seq));
        Ok(path.into_iter().map(|i| self.labels[i].clone()).collect())
    }

    pub(crate) fn viterbi_encoded(&self, enc: &Encoded) -> Vec<usize> {
        let l = self.labels.len();
        let n = enc.len();
        if n == 0 {
            return Vec::new();
        }
        let em = self.emissions(enc);
        let mut delta = em[..l].to_vec();
        let mut back = vec![0usize; n * l];
        for t in 1..n {
            let mut next = vec![T::zero(); l];
            for j in 0..l {
                let mut best = 0;
                let mut best_v = delta[0] + self.transition[j];
                for i in 1..l {
                    let v = delta[i] + self.transition[i * l + j];
                    if v > best_v {
                        best_v = v;
                        best = i;
                    }
                }
                back[t * l + j] = best;
                next[j] = best_v + em[t * l + j];
            }
            delta = next;
        }
        let mut last = 0;
        for j in 1..l {
            if delta[j] > delta[last] {
                last = j;
            }
        }
        let mut path = vec![0; n];
        path[n - 1] = last;
        for t in (1..n).rev() {
            path[t - 1] = back[t * l + path[t]];
        }
        path
    }

    /// Log-space forward and backward tables (`n * L` each) and `log Z`.
    fn forward_backward(&self, em: &[T], n: usize) -> (Vec<T>, Vec<T>, T) {
        let l = self.labels.len();
        let mut alpha = vec![T::zero(); n * l];
        let mut beta = vec![T::zero(); n * l];
        alpha[..l].copy_from_slice(&em[..l]);
        let mut buf = vec![T::zero(); l];
        for t in 1..n {
            for j in 0..l {
                for i in 0..l {
                    buf[i] = alpha[(t - 1) * l + i] + self.transition[i * l + j];
                }
                alpha[t * l + j] = log_sum_exp(&buf) + em[t * l + j];
            }
        }
        for t in (0..n - 1).rev() {
            for i in 0..l {
                for j in 0..l {
                    buf[j] = self.transition[i * l + j] + em[(t + 1) * l + j] + beta[(t + 1) * l + j];
                }
                beta[t * l + i] = log_sum_exp(&buf);
            }
        }
        let log_z = log_sum_exp(&alpha[(n - 1) * l..]);
        (alpha, beta, log_z)
    }

    /// Posterior label marginals per position.
    pub fn marginals(&self, seq: &[FeatureVector]) -> Result<Vec<Vec<T>>, CrfError> {
        if seq.is_empty() {
            return Err(CrfError::EmptySequence);
        }
        let enc = self.encode(seq);
        let l = self.labels.len();
        let em = self.emissions(&enc);
        let (alpha, beta, log_z) = self.forward_backward(&em, enc.len());
        if !log_z.is_finite() {
            return Err(CrfError::NumericOverflow);
        }
        Ok((0..enc.len())
            .map(|t| (0..l).map(|j| (alpha[t * l + j] + beta[t * l + j] - log_z).exp()).collect())
            .collect())
    }

    /// `log p(path | seq)`.
    pub fn log_probability(&self, seq: &[FeatureVector], path: &[&str]) -> Result<T, CrfError> {
        if seq.is_empty() {
            return Err(CrfError::EmptySequence);
        }
        let s = self.score(seq, path)?;
        let enc = self.encode(seq);
        let em = self.emissions(&enc);
        let (_, _, log_z) = self.forward_backward(&em, enc.len());
        Ok(s - log_z)
    }

    pub(crate) fn encode_labeled(&self, data: &[LabeledSequence]) -> Result<Vec<(Encoded, Vec<usize>)>, CrfError> {
        data.iter()
            .map(|s| {
                let labels = s.items.iter().map(|(_, l)| self.label_index(l)).collect::<Result<Vec<_>, _>>()?;
                Ok((self.encode(&s.features()), labels))
            })
            .collect()
    }

    /// L2-regularized conditional log-likelihood and its gradient with respect
    /// to `params()`.
    pub fn log_likelihood_and_gradient(
        &self,
        data: &[LabeledSequence],
        l2_lambda: T,
    ) -> Result<(T, Vec<T>), CrfError> {
        if data.is_empty() {
            return Err(CrfError::EmptyDataset);
        }
        let enc = self.encode_labeled(data)?;
        self.objective(&enc, l2_lambda)
    }

    pub(crate) fn objective(&self, data: &[(Encoded, Vec<usize>)], l2_lambda: T) -> Result<(T, Vec<T>), CrfError> {
        let l = self.labels.len();
        let nu = self.unary.len();
        let mut grad = vec![T::zero(); self.num_params()];
        let mut ll = T::zero();
        for (enc, labels) in data {
            let n = enc.len();
            if n == 0 {
                continue;
            }
            let em = self.emissions(enc);
            let (alpha, beta, log_z) = self.forward_backward(&em, n);
            if !log_z.is_finite() {
                return Err(CrfError::NumericOverflow);
            }
            ll = ll + self.path_score(&em, labels) - log_z;
            // empirical counts
            for (t, feats) in enc.iter().enumerate() {
                for &f in feats {
                    grad[f * l + labels[t]] = grad[f * l + labels[t]] + T::one();
                }
                if t > 0 {
                    let k = nu + labels[t - 1] * l + labels[t];
                    grad[k] = grad[k] + T::one();
                }
            }
            // expected counts
            for (t, feats) in enc.iter().enumerate() {
                for j in 0..l {
                    let p = (alpha[t * l + j] + beta[t * l + j] - log_z).exp();
                    for &f in feats {
                        grad[f * l + j] = grad[f * l + j] - p;
                    }
                }
                if t > 0 {
                    for i in 0..l {
                        for j in 0..l {
                            let lp = alpha[(t - 1) * l + i]
                                + self.transition[i * l + j]
                                + em[t * l + j]
                                + beta[t * l + j]
                                - log_z;
                            let k = nu + i * l + j;
                            grad[k] = grad[k] - lp.exp();
                        }
                    }
                }
            }
        }
        let half = T::of(0.5);
        for (g, w) in grad.iter_mut().zip(self.unary.iter().chain(&self.transition)) {
            ll = ll - half * l2_lambda * *w * *w;
            *g = *g - l2_lambda * *w;
        }
        if !ll.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(CrfError::NumericOverflow);
        }
        Ok((ll, grad))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(names: &[&str]) -> FeatureVector {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn toy() -> Crf<f64> {
        Crf::new(
            "toy",
            vec!["O".into(), "T".into()],
            vec![FeatureTemplate::new("bold", FeatureKind::Boolean, "bold token")],
            vec!["bold".into()],
        )
        .unwrap()
    }

    #[test]
    fn zero_weights_score_zero() {
        let m = toy();
        let seq = vec![fv(&["bold"]), fv(&[])];
        assert_eq!(m.score(&seq, &["O", "T"]).unwrap(), 0.0);
        assert_eq!(m.score(&seq, &["T", "T"]).unwrap(), 0.0);
    }

    #[test]
    fn single_term_score() {
        let mut m = toy();
        m.set_unary_weight("bold", "T", 2.0).unwrap();
        assert_eq!(m.score(&[fv(&["bold"])], &["T"]).unwrap(), 2.0);
    }

    #[test]
    fn length_three_hand_sum() {
        let mut m = toy();
        m.set_unary_weight("bold", "T", 2.0).unwrap();
        m.set_unary_weight("bold", "O", -0.5).unwrap();
        m.set_transition_weight("T", "O", 0.25).unwrap();
        m.set_transition_weight("O", "O", 1.5).unwrap();
        let seq = vec![fv(&["bold"]), fv(&["bold"]), fv(&[])];
        // T: 2.0, then T->O 0.25 + O(bold) -0.5, then O->O 1.5 + 0
        assert_eq!(m.score(&seq, &["T", "O", "O"]).unwrap(), 2.0 + 0.25 - 0.5 + 1.5);
    }

    #[test]
    fn score_errors() {
        let m = toy();
        assert_eq!(m.score(&[fv(&[])], &["X"]), Err(CrfError::UnknownLabel("X".into())));
        assert!(matches!(m.score(&[fv(&[])], &["O", "O"]), Err(CrfError::LengthMismatch { .. })));
    }

    #[test]
    fn viterbi_basic_and_tie_break() {
        let mut m = toy();
        assert_eq!(m.viterbi_decode(&[fv(&[]), fv(&[]), fv(&[])]).unwrap(), ["O", "O", "O"]);
        m.set_unary_weight("bold", "T", 1.0).unwrap();
        assert_eq!(m.viterbi_decode(&[fv(&["bold"])]).unwrap(), ["T"]);
        assert_eq!(m.viterbi_decode(&[]), Err(CrfError::EmptySequence));
    }

    #[test]
    fn uniform_model_log_likelihood() {
        let m = toy();
        let data = [LabeledSequence::new(vec![fv(&["bold"])], vec!["T".into()])];
        let (ll, _) = m.log_likelihood_and_gradient(&data, 1.0).unwrap();
        assert!((ll + 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn marginals_sum_to_one() {
        let mut m = toy();
        m.set_unary_weight("bold", "T", 1.3).unwrap();
        m.set_transition_weight("T", "T", -0.7).unwrap();
        for row in m.marginals(&[fv(&["bold"]), fv(&[]), fv(&["bold"])]).unwrap() {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn huge_weights_do_not_overflow() {
        let mut m = toy();
        m.set_unary_weight("bold", "T", 1e6).unwrap();
        let data = [LabeledSequence::new(vec![fv(&["bold"]); 4], vec!["O".into(); 4])];
        let (ll, g) = m.log_likelihood_and_gradient(&data, 0.0).unwrap();
        assert!(ll.is_finite() && g.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn unknown_template_rejected() {
        let err = Crf::<f64>::new("t", vec!["A".into()], vec![], vec!["nope=1".into()]).unwrap_err();
        assert_eq!(err, CrfError::UnknownTemplate("nope=1".into()));
    }

    #[test]
    fn decile_buckets() {
        assert_eq!(decile(0.0), 0);
        assert_eq!(decile(0.05), 0);
        assert_eq!(decile(0.55), 5);
        assert_eq!(decile(1.0), 9);
        assert_eq!(decile(7.0), 9);
        assert_eq!(decile(f64::NAN), 0);
    }

    #[test]
    fn works_in_f32() {
        let mut m: Crf<f32> = Crf::new(
            "toy",
            vec!["O".into(), "T".into()],
            vec![FeatureTemplate::new("bold", FeatureKind::Boolean, "")],
            vec!["bold".into()],
        )
        .unwrap();
        m.set_unary_weight("bold", "T", 2.0).unwrap();
        assert_eq!(m.viterbi_decode(&[fv(&["bold"])]).unwrap(), ["T"]);
    }
}
