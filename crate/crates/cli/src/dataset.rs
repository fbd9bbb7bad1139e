use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use interstitial_core::corpus::{read_bundle, read_manifest_unchecked};
use interstitial_core::features::{
    build_vocabulary, pair_frequencies, parse_html_pairs, vectorize, PairCounts,
};
use interstitial_core::learn::{evaluate, predict, split, train_linear_svm};
use interstitial_core::{
    EvaluationReport, FeatureVector, Label, LabeledExample, ManifestEntry, PairFrequencies,
    SvmModel,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::{HtmlSnapshot, RunConfig};

/// One line of `features.jsonl`.
#[derive(Debug, Serialize, Deserialize)]
pub struct FeatureRow {
    pub source: String,
    #[serde(flatten)]
    pub vector: FeatureVector,
}

/// One line of a predictions or truth file.
#[derive(Debug, Serialize, Deserialize)]
pub struct LabelRow {
    pub source: String,
    pub label: Label,
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).with_context(|| format!("{}:{}", path.display(), i + 1))
        })
        .collect()
}

fn write_jsonl<T: Serialize>(rows: &[T], path: &Path) -> Result<()> {
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    for r in rows {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

fn source_of(entry: &ManifestEntry) -> String {
    entry.bundle_path.to_string_lossy().into_owned()
}

fn snapshot_features(snapshots: &[String], which: HtmlSnapshot) -> PairFrequencies {
    let mut counts = PairCounts::new();
    let chosen = match which {
        HtmlSnapshot::First => &snapshots[..snapshots.len().min(1)],
        HtmlSnapshot::All => snapshots,
    };
    for html in chosen {
        for (pair, n) in parse_html_pairs(html.as_bytes()) {
            *counts.entry(pair).or_default() += n;
        }
    }
    pair_frequencies(&counts)
}

pub fn cmd_features(manifest: &Path, out: &Path, cfg: &RunConfig, json: bool) -> Result<u8> {
    let entries = read_manifest_unchecked(manifest)?;
    let base = manifest.parent().unwrap_or(Path::new(""));
    let mut docs = Vec::new();
    let mut skipped = 0;
    for entry in &entries {
        match read_bundle(&entry.resolve(base)) {
            Ok(bundle) => {
                if bundle.html_snapshots.is_empty() {
                    eprintln!(
                        "warning: {} has no HTML snapshots",
                        entry.bundle_path.display()
                    );
                }
                docs.push((
                    source_of(entry),
                    snapshot_features(&bundle.html_snapshots, cfg.html_snapshot),
                ));
            }
            Err(e) => {
                eprintln!("warning: skipping {}: {e}", entry.bundle_path.display());
                skipped += 1;
            }
        }
    }
    let freqs: Vec<PairFrequencies> = docs.iter().map(|(_, f)| f.clone()).collect();
    let vocab = build_vocabulary(&freqs);
    let rows: Vec<FeatureRow> = docs
        .iter()
        .map(|(source, f)| FeatureRow {
            source: source.clone(),
            vector: vectorize(f, &vocab),
        })
        .collect();

    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let vocab_json = serde_json::json!({ "hash": vocab.hash(), "pairs": vocab.pairs });
    fs::write(
        out.join("vocab.json"),
        serde_json::to_string_pretty(&vocab_json)? + "\n",
    )?;
    write_jsonl(&rows, &out.join("features.jsonl"))?;
    if json {
        println!(
            "{}",
            serde_json::json!({
                "documents": rows.len(),
                "skipped": skipped,
                "vocabulary": vocab.len(),
                "vocab_hash": vocab.hash(),
            })
        );
    } else {
        println!(
            "{} documents ({} skipped), vocabulary of {} pairs",
            rows.len(),
            skipped,
            vocab.len()
        );
    }
    Ok(0)
}

/// Joins feature rows with manifest labels, in feature-file order.
fn labeled_examples(features: &Path, manifest: &Path, use_cv: bool) -> Result<Vec<LabeledExample>> {
    let rows: Vec<FeatureRow> = read_jsonl(features)?;
    let labels: BTreeMap<String, Label> = read_manifest_unchecked(manifest)?
        .iter()
        .filter_map(|e| {
            let label = if use_cv { e.cv_label } else { e.truth_label };
            label.map(|l| (source_of(e), l))
        })
        .collect();
    Ok(rows
        .into_iter()
        .map(|r| LabeledExample {
            label: labels.get(&r.source).copied().unwrap_or(Label::Unlabeled),
            vector: r.vector,
            source: r.source,
        })
        .collect())
}

fn count(examples: &[LabeledExample], label: Label) -> usize {
    examples.iter().filter(|e| e.label == label).count()
}

pub fn cmd_train(
    features: &Path,
    manifest: &Path,
    use_cv: bool,
    out: &Path,
    cfg: &RunConfig,
    json: bool,
) -> Result<u8> {
    let examples = labeled_examples(features, manifest, use_cv)?;
    let (train, test) = split(&examples, cfg.test_ratio, cfg.seed)?;
    let model = train_linear_svm(&train, &cfg.svm())?;
    fs::write(out, serde_json::to_string_pretty(&model)? + "\n")
        .with_context(|| format!("writing {}", out.display()))?;
    let summary = serde_json::json!({
        "train": train.len(),
        "train_yes": count(&train, Label::Yes),
        "train_no": count(&train, Label::No),
        "held_out": test.len(),
        "hinge_loss": model.hinge_loss(&train)?,
    });
    if json {
        println!("{summary}");
    } else {
        println!(
            "trained on {} examples ({} yes, {} no), {} held out, hinge loss {:.4}",
            train.len(),
            count(&train, Label::Yes),
            count(&train, Label::No),
            test.len(),
            model.hinge_loss(&train)?
        );
    }
    Ok(0)
}

/// Scores the held-out part of the same split `train` used.
pub fn eval_model(
    model: &Path,
    features: &Path,
    manifest: &Path,
    use_cv: bool,
    cfg: &RunConfig,
) -> Result<EvaluationReport> {
    let text = fs::read_to_string(model).with_context(|| format!("reading {}", model.display()))?;
    let model: SvmModel =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", model.display()))?;
    let examples = labeled_examples(features, manifest, use_cv)?;
    let (_, test) = split(&examples, cfg.test_ratio, cfg.seed)?;
    let predicted = test
        .iter()
        .map(|e| predict(&model, &e.vector))
        .collect::<interstitial_core::Result<Vec<_>>>()?;
    let truth: Vec<Label> = test.iter().map(|e| e.label).collect();
    Ok(evaluate(&predicted, &truth)?)
}

/// Compares predictions to truth by `source`. Unlabeled truth rows are skipped.
pub fn eval_label_files(predictions: &Path, truth: &Path) -> Result<EvaluationReport> {
    let pred: BTreeMap<String, Label> = read_jsonl::<LabelRow>(predictions)?
        .into_iter()
        .map(|r| (r.source, r.label))
        .collect();
    let mut p = Vec::new();
    let mut t = Vec::new();
    for row in read_jsonl::<LabelRow>(truth)? {
        if !row.label.is_labeled() {
            continue;
        }
        match pred.get(&row.source) {
            Some(&l) if l.is_labeled() => {
                p.push(l);
                t.push(row.label);
            }
            Some(_) => bail!("prediction for {} is unlabeled", row.source),
            None => bail!("no prediction for {}", row.source),
        }
    }
    Ok(evaluate(&p, &t)?)
}
