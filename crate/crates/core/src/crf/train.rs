use std::collections::BTreeSet;

use super::{template_of, Crf, CrfError, FeatureTemplate, LabeledSequence};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub l2_lambda: f64,
    pub max_iterations: usize,
    pub convergence_tol: f64,
    /// Recorded for reproducibility; weights always start at zero.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { l2_lambda: 1.0, max_iterations: 200, convergence_tol: 1e-5, seed: 0 }
    }
}

const ARMIJO_C: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;

/// Fits a model by batch gradient ascent with a backtracking line search.
///
/// The trial step is the Barzilai-Borwein step from the previous iteration
/// (1.0 on the first), halved until the Armijo condition holds. Training
/// stops once the objective moves by less than `convergence_tol` or after
/// `max_iterations` accepted steps.
pub fn train<T: Scalar>(
    task_name: &str,
    data: &[LabeledSequence],
    labels: &[String],
    templates: &[FeatureTemplate],
    config: &TrainConfig,
) -> Result<Crf<T>, CrfError> {
    if data.is_empty() {
        return Err(CrfError::EmptyDataset);
    }
    let mut features = BTreeSet::new();
    for seq in data {
        for (fs, label) in &seq.items {
            if !labels.contains(label) {
                return Err(CrfError::UnknownLabel(label.clone()));
            }
            for f in fs {
                if !templates.iter().any(|t| t.id == template_of(f)) {
                    return Err(CrfError::UnknownTemplate(f.clone()));
                }
                features.insert(f.clone());
            }
        }
    }
    let mut model = Crf::new(task_name, labels.to_vec(), templates.to_vec(), features.into_iter().collect())?;
    if config.max_iterations == 0 {
        return Ok(model);
    }
    let enc = model.encode_labeled(data)?;
    let lambda = T::of(config.l2_lambda);
    let tol = T::of(config.convergence_tol);
    let c = T::of(ARMIJO_C);
    let two = T::of(2.0);

    let mut w = model.params();
    let (mut f, mut g) = model.objective(&enc, lambda)?;
    let mut step = T::one();
    for _ in 0..config.max_iterations {
        let g_norm2: T = g.iter().map(|&x| x * x).sum();
        if g_norm2 == T::zero() {
            break;
        }
        let mut s = step;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let trial: Vec<T> = w.iter().zip(&g).map(|(&wi, &gi)| wi + s * gi).collect();
            model.set_params(&trial)?;
            match model.objective(&enc, lambda) {
                Ok((ft, gt)) if ft >= f + c * s * g_norm2 => {
                    accepted = Some((trial, ft, gt));
                    break;
                }
                Ok(_) | Err(CrfError::NumericOverflow) => s = s / two,
                Err(e) => return Err(e),
            }
        }
        let Some((w_new, f_new, g_new)) = accepted else {
            model.set_params(&w)?;
            break;
        };
        // Barzilai-Borwein for the ascent direction: s = dw.dw / -(dw.dg)
        let mut dw_dw = T::zero();
        let mut dw_dg = T::zero();
        for i in 0..w.len() {
            let dw = w_new[i] - w[i];
            dw_dw = dw_dw + dw * dw;
            dw_dg = dw_dg + dw * (g_new[i] - g[i]);
        }
        step = if dw_dg < T::zero() { dw_dw / -dw_dg } else { s * two };
        let delta = (f_new - f).abs();
        w = w_new;
        f = f_new;
        g = g_new;
        if delta < tol {
            break;
        }
    }
    model.set_params(&w)?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crf::{FeatureKind, FeatureVector};

    fn templates() -> Vec<FeatureTemplate> {
        vec![
            FeatureTemplate::new("bias", FeatureKind::Boolean, "always on"),
            FeatureTemplate::new("bold", FeatureKind::Boolean, "bold token"),
        ]
    }

    fn labels() -> Vec<String> {
        vec!["OTHER".into(), "TITLE".into()]
    }

    fn item(bold: bool) -> FeatureVector {
        let mut f = vec!["bias".to_string()];
        if bold {
            f.push("bold".into());
        }
        f
    }

    fn separable() -> Vec<LabeledSequence> {
        let pattern = [true, true, false, false, false, true, false];
        vec![LabeledSequence::new(
            pattern.iter().map(|&b| item(b)).collect(),
            pattern.iter().map(|&b| if b { "TITLE" } else { "OTHER" }.to_string()).collect(),
        )]
    }

    #[test]
    fn separable_data_is_fit_exactly() {
        let data = separable();
        let m: Crf<f64> = train("title", &data, &labels(), &templates(), &TrainConfig::default()).unwrap();
        for seq in &data {
            let gold: Vec<&str> = seq.items.iter().map(|(_, l)| l.as_str()).collect();
            assert_eq!(m.viterbi_decode(&seq.features()).unwrap(), gold);
        }
    }

    #[test]
    fn zero_iterations_gives_zero_model() {
        let m: Crf<f64> = train("t", &separable(), &labels(), &templates(), &TrainConfig { max_iterations: 0, ..Default::default() }).unwrap();
        assert!(m.params().iter().all(|&w| w == 0.0));
    }

    #[test]
    fn repeated_sequence_decodes_the_same() {
        let once = separable();
        let twice: Vec<_> = once.iter().chain(&once).cloned().collect();
        let cfg = TrainConfig::default();
        let a: Crf<f64> = train("t", &once, &labels(), &templates(), &cfg).unwrap();
        let b: Crf<f64> = train("t", &twice, &labels(), &templates(), &TrainConfig { l2_lambda: 2.0 * cfg.l2_lambda, ..cfg }).unwrap();
        for (pa, pb) in a.params().iter().zip(b.params()) {
            assert!((pa - pb).abs() < 1e-3, "{pa} vs {pb}");
        }
        let seq = once[0].features();
        assert_eq!(a.viterbi_decode(&seq).unwrap(), b.viterbi_decode(&seq).unwrap());
    }

    #[test]
    fn training_is_deterministic() {
        let cfg = TrainConfig { seed: 7, ..Default::default() };
        let a: Crf<f64> = train("t", &separable(), &labels(), &templates(), &cfg).unwrap();
        let b: Crf<f64> = train("t", &separable(), &labels(), &templates(), &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors() {
        let cfg = TrainConfig::default();
        assert_eq!(train::<f64>("t", &[], &labels(), &templates(), &cfg).unwrap_err(), CrfError::EmptyDataset);
        let bad = vec![LabeledSequence::new(vec![item(true)], vec!["AUTHOR".into()])];
        assert_eq!(train::<f64>("t", &bad, &labels(), &templates(), &cfg).unwrap_err(), CrfError::UnknownLabel("AUTHOR".into()));
    }

    #[test]
    fn objective_improves() {
        let data = separable();
        let m0: Crf<f64> = train("t", &data, &labels(), &templates(), &TrainConfig { max_iterations: 0, ..Default::default() }).unwrap();
        let m1: Crf<f64> = train("t", &data, &labels(), &templates(), &TrainConfig::default()).unwrap();
        let (f0, _) = m0.log_likelihood_and_gradient(&data, 1.0).unwrap();
        let (f1, g1) = m1.log_likelihood_and_gradient(&data, 1.0).unwrap();
        assert!(f1 > f0);
        assert!(g1.iter().map(|g| g * g).sum::<f64>().sqrt() < 1e-2);
    }
}
