use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Label, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub class: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

/// Per-class precision, recall, F1 and support for `no` and `yes`, plus the
/// support-weighted average.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub classes: Vec<ReportRow>,
    pub average: ReportRow,
}

impl EvaluationReport {
    pub fn row(&self, class: Label) -> Option<&ReportRow> {
        self.classes.iter().find(|r| r.class == class.as_str())
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Builds the report. A class that is never predicted gets precision 0; a
/// class with no support gets recall 0.
pub fn evaluate(predicted: &[Label], truth: &[Label]) -> Result<EvaluationReport> {
    if predicted.len() != truth.len() {
        return Err(Error::invalid(format!(
            "{} predictions for {} truth labels",
            predicted.len(),
            truth.len()
        )));
    }
    if predicted.is_empty() {
        return Err(Error::invalid("nothing to evaluate"));
    }
    if let Some(l) = predicted.iter().chain(truth).find(|l| !l.is_labeled()) {
        return Err(Error::invalid(format!("cannot evaluate label {l}")));
    }

    let classes: Vec<ReportRow> = [Label::No, Label::Yes]
        .into_iter()
        .map(|c| {
            let pairs = predicted.iter().zip(truth);
            let tp = pairs.clone().filter(|(p, t)| **p == c && **t == c).count();
            let predicted_c = predicted.iter().filter(|&&p| p == c).count();
            let support = truth.iter().filter(|&&t| t == c).count();
            let precision = ratio(tp, predicted_c);
            let recall = ratio(tp, support);
            let f1 = if precision + recall == 0.0 {
                0.0
            } else {
                2.0 * precision * recall / (precision + recall)
            };
            ReportRow {
                class: c.as_str().to_string(),
                precision,
                recall,
                f1,
                support,
            }
        })
        .collect();

    let total: usize = classes.iter().map(|r| r.support).sum();
    let weighted = |f: fn(&ReportRow) -> f64| {
        classes.iter().map(|r| f(r) * r.support as f64).sum::<f64>() / total as f64
    };
    let average = ReportRow {
        class: "avg / total".to_string(),
        precision: weighted(|r| r.precision),
        recall: weighted(|r| r.recall),
        f1: weighted(|r| r.f1),
        support: total,
    };
    Ok(EvaluationReport { classes, average })
}

impl fmt::Display for EvaluationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .classes
            .iter()
            .map(|r| r.class.len())
            .chain([self.average.class.len()])
            .max()
            .unwrap_or(0);
        let row = |f: &mut fmt::Formatter<'_>, r: &ReportRow| {
            writeln!(
                f,
                "{:>width$} {:>9.2} {:>9.2} {:>9.2} {:>9}",
                r.class, r.precision, r.recall, r.f1, r.support
            )
        };
        writeln!(
            f,
            "{:>width$} {:>9} {:>9} {:>9} {:>9}",
            "", "precision", "recall", "f1-score", "support"
        )?;
        writeln!(f)?;
        for r in &self.classes {
            row(f, r)?;
        }
        writeln!(f)?;
        row(f, &self.average)
    }
}
