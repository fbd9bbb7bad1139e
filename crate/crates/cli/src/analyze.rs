use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use interstitial_core::corpus::{
    dedupe_trailing, read_bundle, read_manifest_unchecked, write_manifest,
};
use interstitial_core::heuristics::{analyze_bundle, AnalysisParams};
use interstitial_core::{BundleAnalysis, Label, ManifestEntry};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;

fn analyze_dir(dir: &Path, params: &AnalysisParams, dedupe: bool) -> Result<BundleAnalysis> {
    let mut bundle = read_bundle(dir)?;
    if dedupe {
        bundle = dedupe_trailing(bundle);
    }
    Ok(analyze_bundle(&bundle, params)?)
}

pub fn exit_code(label: Label) -> u8 {
    match label {
        Label::Yes => 0,
        Label::No => 1,
        Label::Unlabeled => 2,
    }
}

pub fn cmd_analyze(dir: &Path, cfg: &RunConfig) -> Result<u8> {
    let params = cfg.analysis()?;
    let analysis = analyze_dir(dir, &params, cfg.dedupe)
        .with_context(|| format!("analyzing {}", dir.display()))?;
    println!("{}", serde_json::to_string_pretty(&analysis)?);
    Ok(exit_code(analysis.label))
}

#[derive(Debug, Default, PartialEq, Eq, Serialize)]
pub struct ScanSummary {
    pub bundles: usize,
    pub yes: usize,
    pub no: usize,
    pub unlabeled: usize,
    pub errors: usize,
}

/// Absolute directory of `path`, for resolving and rewriting bundle paths.
fn parent_dir(path: &Path) -> Result<PathBuf> {
    let parent = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::path::absolute(parent).with_context(|| format!("resolving {}", parent.display()))
}

pub fn scan_entries(
    entries: &[ManifestEntry],
    base: &Path,
    cfg: &RunConfig,
) -> Result<Vec<ManifestEntry>> {
    let params = cfg.analysis()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()?;
    Ok(pool.install(|| {
        entries
            .par_iter()
            .map(|entry| {
                let mut out = entry.clone();
                out.cv_score = None;
                out.cv_label = None;
                out.error = None;
                match analyze_dir(&entry.resolve(base), &params, cfg.dedupe) {
                    Ok(a) => {
                        out.cv_score = Some(a.confidence);
                        out.cv_label = Some(a.label);
                    }
                    Err(e) => out.error = Some(format!("{e:#}")),
                }
                out
            })
            .collect()
    }))
}

pub fn summarize(entries: &[ManifestEntry]) -> ScanSummary {
    let mut s = ScanSummary {
        bundles: entries.len(),
        ..ScanSummary::default()
    };
    for e in entries {
        match (e.cv_label, &e.error) {
            (_, Some(_)) => s.errors += 1,
            (Some(Label::Yes), _) => s.yes += 1,
            (Some(Label::No), _) => s.no += 1,
            _ => s.unlabeled += 1,
        }
    }
    s
}

pub fn cmd_scan(manifest: &Path, out: Option<&Path>, cfg: &RunConfig, json: bool) -> Result<u8> {
    let entries = read_manifest_unchecked(manifest)?;
    let base = parent_dir(manifest)?;
    let mut scanned = scan_entries(&entries, &base, cfg)?;
    match out {
        Some(path) => {
            // Relative bundle paths only stay valid next to the input manifest.
            if parent_dir(path)? != base {
                for e in &mut scanned {
                    e.bundle_path = e.resolve(&base);
                }
            }
            write_manifest(&scanned, path)?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            for e in &scanned {
                writeln!(stdout, "{}", serde_json::to_string(e)?)?;
            }
        }
    }
    let summary = summarize(&scanned);
    if json {
        eprintln!("{}", serde_json::to_string(&summary)?);
    } else {
        eprintln!(
            "scanned {} bundles: {} yes, {} no, {} unlabeled, {} errors",
            summary.bundles, summary.yes, summary.no, summary.unlabeled, summary.errors
        );
    }
    Ok(0)
}
