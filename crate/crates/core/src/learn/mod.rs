//! Classifiers over pair-frequency features and the per-class report.

mod report;
mod spread;
mod svm;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, FeatureVector, Label, Result};

pub use report::{evaluate, EvaluationReport, ReportRow};
pub use spread::{label_spread, SpreadParams};
pub use svm::{predict, train_linear_svm, SvmModel, SvmParams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub vector: FeatureVector,
    pub label: Label,
    /// Bundle identifier the vector came from.
    pub source: String,
}

/// Seeded train/test split. Unlabeled examples are dropped; after shuffling,
/// the first `ceil(n * test_ratio)` labeled examples form the test set.
pub fn split(
    examples: &[LabeledExample],
    test_ratio: f64,
    seed: u64,
) -> Result<(Vec<LabeledExample>, Vec<LabeledExample>)> {
    if !(test_ratio > 0.0 && test_ratio < 1.0) {
        return Err(Error::invalid(format!(
            "test_ratio must be in (0, 1), got {test_ratio}"
        )));
    }
    let mut labeled: Vec<LabeledExample> = examples
        .iter()
        .filter(|e| e.label.is_labeled())
        .cloned()
        .collect();
    if labeled.is_empty() {
        return Err(Error::Training("no labeled examples to split".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    labeled.shuffle(&mut rng);
    let n_test = ((labeled.len() as f64) * test_ratio).ceil() as usize;
    let train = labeled.split_off(n_test.min(labeled.len()));
    Ok((train, labeled))
}
