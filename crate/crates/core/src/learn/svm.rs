use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::LabeledExample;
use crate::{Error, FeatureVector, Label, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    #[serde(rename = "C")]
    pub c: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            epochs: 200,
            seed: 0,
        }
    }
}

/// Linear soft-margin SVM.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub epochs: usize,
    pub seed: u64,
    pub vocab_hash: String,
}

impl SvmModel {
    pub fn decision(&self, x: &FeatureVector) -> Result<f64> {
        if x.values.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} features", self.weights.len()),
                actual: format!("{} features", x.values.len()),
            });
        }
        if x.vocab_hash != self.vocab_hash {
            return Err(Error::DimensionMismatch {
                expected: format!("vocabulary {}", self.vocab_hash),
                actual: format!("vocabulary {}", x.vocab_hash),
            });
        }
        Ok(dot(&self.weights, &x.values) + self.bias)
    }

    /// Mean hinge loss over labeled examples.
    pub fn hinge_loss(&self, data: &[LabeledExample]) -> Result<f64> {
        let mut total = 0.0;
        for e in data {
            let y = e
                .label
                .sign()
                .ok_or_else(|| Error::Training("unlabeled example".into()))?;
            total += (1.0 - y * self.decision(&e.vector)?).max(0.0);
        }
        Ok(total / data.len().max(1) as f64)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `w.x + b >= 0` is yes.
pub fn predict(model: &SvmModel, x: &FeatureVector) -> Result<Label> {
    Ok(if model.decision(x)? >= 0.0 {
        Label::Yes
    } else {
        Label::No
    })
}

/// Minimizes `0.5 |w|^2 + C sum_i max(0, 1 - y_i (w.x_i + b))` by stochastic
/// subgradient descent.
///
/// Each step uses one example's share of the objective,
/// `lambda/2 |w|^2 + hinge_i` with `lambda = 1 / (C n)`, and step size
/// `1 / (lambda t)`. Every epoch visits all examples in a fresh order drawn
/// from `seed`. The bias is not regularized. Yes maps to +1, no to -1.
pub fn train_linear_svm(train: &[LabeledExample], params: &SvmParams) -> Result<SvmModel> {
    if !(params.c > 0.0) || !params.c.is_finite() {
        return Err(Error::invalid(format!(
            "C must be positive, got {}",
            params.c
        )));
    }
    let Some(first) = train.first() else {
        return Err(Error::Training("empty training set".into()));
    };
    let dim = first.vector.values.len();
    let mut ys = Vec::with_capacity(train.len());
    for e in train {
        let y = e.label.sign().ok_or_else(|| {
            Error::Training(format!("{}: unlabeled example in training set", e.source))
        })?;
        if e.vector.values.len() != dim || e.vector.vocab_hash != first.vector.vocab_hash {
            return Err(Error::DimensionMismatch {
                expected: format!("{dim} features ({})", first.vector.vocab_hash),
                actual: format!(
                    "{} features ({}) in {}",
                    e.vector.values.len(),
                    e.vector.vocab_hash,
                    e.source
                ),
            });
        }
        ys.push(y);
    }
    if !(ys.contains(&1.0) && ys.contains(&-1.0)) {
        return Err(Error::Training(
            "training set needs both yes and no examples".into(),
        ));
    }

    let n = train.len();
    let lambda = 1.0 / (params.c * n as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut t = 0u64;
    for _ in 0..params.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let x = &train[i].vector.values;
            let y = ys[i];
            let margin = y * (dot(&w, x) + b);
            let shrink = 1.0 - eta * lambda;
            w.iter_mut().for_each(|wj| *wj *= shrink);
            if margin < 1.0 {
                // Bias steps are scaled down by n so early steps stay bounded.
                for (wj, xj) in w.iter_mut().zip(x) {
                    *wj += eta * y * xj;
                }
                b += eta * y / n as f64;
            }
        }
    }
    if w.iter().any(|v| !v.is_finite()) || !b.is_finite() {
        return Err(Error::Training("training diverged".into()));
    }
    Ok(SvmModel {
        weights: w,
        bias: b,
        c: params.c,
        epochs: params.epochs,
        seed: params.seed,
        vocab_hash: first.vector.vocab_hash.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(values: Vec<f64>, label: Label) -> LabeledExample {
        LabeledExample {
            vector: FeatureVector {
                vocab_hash: "v".into(),
                values,
            },
            label,
            source: String::new(),
        }
    }

    fn toy() -> Vec<LabeledExample> {
        (0..10)
            .flat_map(|_| {
                [
                    ex(vec![0.0, 1.0], Label::No),
                    ex(vec![1.0, 0.0], Label::Yes),
                ]
            })
            .collect()
    }

    fn model(weights: Vec<f64>, bias: f64) -> SvmModel {
        SvmModel {
            weights,
            bias,
            c: 1.0,
            epochs: 0,
            seed: 0,
            vocab_hash: "v".into(),
        }
    }

    fn fv(values: Vec<f64>) -> FeatureVector {
        FeatureVector {
            vocab_hash: "v".into(),
            values,
        }
    }

    #[test]
    fn predict_sign_rule() {
        let m = model(vec![1.0, 0.0], 0.0);
        assert_eq!(predict(&m, &fv(vec![1.0, 0.0])).unwrap(), Label::Yes);
        assert_eq!(predict(&m, &fv(vec![-1.0, 0.0])).unwrap(), Label::No);
        assert_eq!(predict(&m, &fv(vec![0.0, 5.0])).unwrap(), Label::Yes);
        assert!(predict(&m, &fv(vec![1.0])).is_err());
        let other = FeatureVector {
            vocab_hash: "w".into(),
            values: vec![1.0, 0.0],
        };
        assert!(predict(&m, &other).is_err());
    }

    #[test]
    fn toy_set_is_separated() {
        let data = toy();
        let m = train_linear_svm(&data, &SvmParams::default()).unwrap();
        for e in &data {
            assert_eq!(predict(&m, &e.vector).unwrap(), e.label);
        }
        let loss = m.hinge_loss(&data).unwrap();
        assert_eq!(loss, 0.0);
    }

    #[test]
    fn training_is_deterministic() {
        let data = toy();
        let p = SvmParams {
            seed: 11,
            ..SvmParams::default()
        };
        let a = serde_json::to_string(&train_linear_svm(&data, &p).unwrap()).unwrap();
        let b = serde_json::to_string(&train_linear_svm(&data, &p).unwrap()).unwrap();
        assert_eq!(a, b);
        let back: SvmModel = serde_json::from_str(&a).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), a);
    }

    #[test]
    fn model_json_field_names() {
        let json = serde_json::to_value(model(vec![0.5], -0.25)).unwrap();
        for key in ["weights", "bias", "C", "epochs", "seed", "vocab_hash"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
    }

    #[test]
    fn training_errors() {
        let yes_only: Vec<_> = (0..4).map(|_| ex(vec![1.0], Label::Yes)).collect();
        assert!(train_linear_svm(&yes_only, &SvmParams::default()).is_err());
        assert!(train_linear_svm(&[], &SvmParams::default()).is_err());
        let ragged = vec![ex(vec![1.0], Label::Yes), ex(vec![1.0, 2.0], Label::No)];
        assert!(matches!(
            train_linear_svm(&ragged, &SvmParams::default()),
            Err(Error::DimensionMismatch { .. })
        ));
        let unl = vec![ex(vec![1.0], Label::Yes), ex(vec![1.0], Label::Unlabeled)];
        assert!(train_linear_svm(&unl, &SvmParams::default()).is_err());
        let bad_c = SvmParams {
            c: 0.0,
            ..SvmParams::default()
        };
        assert!(train_linear_svm(&toy(), &bad_c).is_err());
    }

    #[test]
    fn zero_weight_dimensions_do_not_change_predictions() {
        let m = train_linear_svm(&toy(), &SvmParams::default()).unwrap();
        let mut wide = m.clone();
        wide.weights.extend([0.0, 0.0, 0.0]);
        for x in [vec![0.2, 0.9], vec![0.7, 0.1], vec![0.0, 0.0]] {
            let mut padded = x.clone();
            padded.extend([3.0, -1.0, 8.0]);
            assert_eq!(
                predict(&m, &fv(x)).unwrap(),
                predict(&wide, &fv(padded)).unwrap()
            );
        }
    }
}
