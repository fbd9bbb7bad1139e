//! On-disk capture bundles and JSONL corpus manifests.
//!
//! Bundle layout:
//!
//! ```text
//! <bundle>/meta.json      {url, viewport_w, viewport_h, scroll_height, step_px, steps, captured_at}
//! <bundle>/shots/NNN.png  one per scroll step, zero-padded, 0-based
//! <bundle>/html/NNN.html  one per step, or html/000.html only, or absent
//! <bundle>/truth.json     optional {has_interstitial, box: [x, y, w, h] | null}
//! ```

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use image::ImageEncoder;
use serde::{Deserialize, Serialize};

use crate::heuristics::label_from_score;
use crate::imaging::RgbRaster;
use crate::{Error, Label, Result};

/// Ground truth shipped with a bundle, when known.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truth {
    pub has_interstitial: bool,
    /// Overlay rectangle `[x, y, w, h]` in viewport pixels.
    #[serde(rename = "box", default)]
    pub bbox: Option<[u32; 4]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct BundleMeta {
    url: String,
    viewport_w: u32,
    viewport_h: u32,
    scroll_height: u32,
    step_px: u32,
    steps: usize,
    captured_at: String,
}

/// Screenshots, page sources and metadata captured for one URL.
#[derive(Clone, Debug, PartialEq)]
pub struct CaptureBundle {
    pub url: String,
    pub viewport: (u32, u32),
    pub scroll_height: u32,
    pub step_px: u32,
    pub captured_at: String,
    pub screenshots: Vec<RgbRaster>,
    /// Empty, one snapshot, or one per screenshot.
    pub html_snapshots: Vec<String>,
    pub truth: Option<Truth>,
}

impl CaptureBundle {
    pub fn validate(&self) -> Result<()> {
        let Some(first) = self.screenshots.first() else {
            return Err(Error::invalid("bundle has no screenshots"));
        };
        if let Some((i, other)) = self
            .screenshots
            .iter()
            .enumerate()
            .find(|(_, s)| s.dimensions() != first.dimensions())
        {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{} (screenshot 0)", first.width(), first.height()),
                actual: format!("{}x{} (screenshot {i})", other.width(), other.height()),
            });
        }
        let n = self.html_snapshots.len();
        if n > 1 && n != self.screenshots.len() {
            return Err(Error::invalid(format!(
                "{n} html snapshots for {} screenshots",
                self.screenshots.len()
            )));
        }
        Ok(())
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::bundle(path, format!("invalid JSON: {e}")))
}

/// Files named `<digits>.<ext>` in `dir`, sorted by index. Indices must run 0..n.
fn numbered_files(dir: &Path, ext: &str) -> Result<Vec<PathBuf>> {
    let mut found = Vec::new();
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().and_then(|e| e.to_str()) != Some(ext) {
            continue;
        }
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or_default();
        if stem.is_empty() || !stem.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::bundle(&path, "file name is not a zero-padded index"));
        }
        let index: usize = stem
            .parse()
            .map_err(|_| Error::bundle(&path, "file index out of range"))?;
        found.push((index, path));
    }
    found.sort();
    for (expected, (index, path)) in found.iter().enumerate() {
        if *index != expected {
            return Err(Error::bundle(
                path,
                format!("expected index {expected}, found {index}"),
            ));
        }
    }
    Ok(found.into_iter().map(|(_, p)| p).collect())
}

pub fn read_png(path: &Path) -> Result<RgbRaster> {
    let img = image::open(path).map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })?;
    let rgb = img.to_rgb8();
    let (w, h) = rgb.dimensions();
    RgbRaster::new(w as usize, h as usize, rgb.into_raw())
}

pub fn write_png(raster: &RgbRaster, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let encoder = image::codecs::png::PngEncoder::new(BufWriter::new(file));
    encoder
        .write_image(
            raster.as_bytes(),
            raster.width() as u32,
            raster.height() as u32,
            image::ExtendedColorType::Rgb8,
        )
        .map_err(|source| Error::Image {
            path: path.to_path_buf(),
            source,
        })
}

/// Loads and validates a bundle directory.
pub fn read_bundle(dir: &Path) -> Result<CaptureBundle> {
    let meta_path = dir.join("meta.json");
    if !meta_path.is_file() {
        return Err(Error::bundle(&meta_path, "missing meta.json"));
    }
    let meta: BundleMeta = read_json(&meta_path)?;

    let shots_dir = dir.join("shots");
    if !shots_dir.is_dir() {
        return Err(Error::bundle(&shots_dir, "missing shots directory"));
    }
    let shot_paths = numbered_files(&shots_dir, "png")?;
    if shot_paths.is_empty() {
        return Err(Error::bundle(&shots_dir, "no screenshots"));
    }
    if shot_paths.len() != meta.steps {
        return Err(Error::bundle(
            &meta_path,
            format!(
                "steps is {} but {} screenshots present",
                meta.steps,
                shot_paths.len()
            ),
        ));
    }
    let mut screenshots = Vec::with_capacity(shot_paths.len());
    for path in &shot_paths {
        let shot = read_png(path)?;
        if let Some(first) = screenshots.first().map(RgbRaster::dimensions) {
            if shot.dimensions() != first {
                return Err(Error::bundle(
                    path,
                    format!(
                        "screenshot is {}x{}, expected {}x{}",
                        shot.width(),
                        shot.height(),
                        first.0,
                        first.1
                    ),
                ));
            }
        }
        screenshots.push(shot);
    }

    let html_dir = dir.join("html");
    let mut html_snapshots = Vec::new();
    if html_dir.is_dir() {
        let paths = numbered_files(&html_dir, "html")?;
        if paths.len() > 1 && paths.len() != screenshots.len() {
            return Err(Error::bundle(
                &html_dir,
                format!(
                    "{} html snapshots for {} screenshots",
                    paths.len(),
                    screenshots.len()
                ),
            ));
        }
        for path in paths {
            let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
            html_snapshots.push(String::from_utf8_lossy(&bytes).into_owned());
        }
    }

    let truth_path = dir.join("truth.json");
    let truth = if truth_path.is_file() {
        Some(read_json(&truth_path)?)
    } else {
        None
    };

    Ok(CaptureBundle {
        url: meta.url,
        viewport: (meta.viewport_w, meta.viewport_h),
        scroll_height: meta.scroll_height,
        step_px: meta.step_px,
        captured_at: meta.captured_at,
        screenshots,
        html_snapshots,
        truth,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Writes a bundle in the directory layout `read_bundle` expects.
pub fn write_bundle(bundle: &CaptureBundle, dir: &Path) -> Result<()> {
    bundle.validate()?;
    let shots = dir.join("shots");
    fs::create_dir_all(&shots).map_err(|e| Error::io(&shots, e))?;
    let meta = BundleMeta {
        url: bundle.url.clone(),
        viewport_w: bundle.viewport.0,
        viewport_h: bundle.viewport.1,
        scroll_height: bundle.scroll_height,
        step_px: bundle.step_px,
        steps: bundle.screenshots.len(),
        captured_at: bundle.captured_at.clone(),
    };
    write_file(
        &dir.join("meta.json"),
        serde_json::to_string_pretty(&meta)?.as_bytes(),
    )?;
    for (i, shot) in bundle.screenshots.iter().enumerate() {
        write_png(shot, &shots.join(format!("{i:03}.png")))?;
    }
    if !bundle.html_snapshots.is_empty() {
        let html = dir.join("html");
        fs::create_dir_all(&html).map_err(|e| Error::io(&html, e))?;
        for (i, doc) in bundle.html_snapshots.iter().enumerate() {
            write_file(&html.join(format!("{i:03}.html")), doc.as_bytes())?;
        }
    }
    if let Some(truth) = &bundle.truth {
        write_file(
            &dir.join("truth.json"),
            serde_json::to_string_pretty(truth)?.as_bytes(),
        )?;
    }
    Ok(())
}

/// Drops trailing screenshots identical to their predecessor, together with
/// their HTML snapshots when those are per step. The first screenshot is
/// always kept.
pub fn dedupe_trailing(mut bundle: CaptureBundle) -> CaptureBundle {
    let per_step =
        bundle.html_snapshots.len() == bundle.screenshots.len() && bundle.screenshots.len() > 1;
    let mut keep = bundle.screenshots.len();
    while keep > 1 && bundle.screenshots[keep - 1] == bundle.screenshots[keep - 2] {
        keep -= 1;
    }
    bundle.screenshots.truncate(keep);
    if per_step {
        bundle.html_snapshots.truncate(keep);
    }
    bundle
}

/// One corpus line: where a bundle lives and what is known about it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Relative paths resolve against the manifest's directory.
    pub bundle_path: PathBuf,
    pub url: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cv_score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cv_label: Option<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth_label: Option<Label>,
    /// Set by a scan when the bundle could not be analyzed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ManifestEntry {
    pub fn new(bundle_path: impl Into<PathBuf>, url: impl Into<String>) -> Self {
        Self {
            bundle_path: bundle_path.into(),
            url: url.into(),
            cv_score: None,
            cv_label: None,
            truth_label: None,
            error: None,
        }
    }

    pub fn resolve(&self, manifest_dir: &Path) -> PathBuf {
        if self.bundle_path.is_absolute() {
            self.bundle_path.clone()
        } else {
            manifest_dir.join(&self.bundle_path)
        }
    }

    fn check(&self, lo: f64, hi: f64) -> std::result::Result<(), String> {
        if self.truth_label == Some(Label::Unlabeled) {
            return Err("truth_label must be yes or no".into());
        }
        if let (Some(score), Some(label)) = (self.cv_score, self.cv_label) {
            let expected = label_from_score(score, lo, hi).map_err(|e| e.to_string())?;
            if expected != label {
                return Err(format!(
                    "cv_label {label} inconsistent with cv_score {score} (expected {expected})"
                ));
            }
        }
        Ok(())
    }
}

/// Reads a JSONL manifest, checking labels against the default thresholds.
pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    read_manifest_with(path, 0.3, 0.75)
}

pub fn read_manifest_with(path: &Path, lo: f64, hi: f64) -> Result<Vec<ManifestEntry>> {
    parse_manifest(path, Some((lo, hi)))
}

/// Reads a manifest without checking `cv_label` against `cv_score`; for
/// callers that are about to overwrite both.
pub fn read_manifest_unchecked(path: &Path) -> Result<Vec<ManifestEntry>> {
    parse_manifest(path, None)
}

fn parse_manifest(path: &Path, thresholds: Option<(f64, f64)>) -> Result<Vec<ManifestEntry>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| Error::Manifest {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        };
        let entry: ManifestEntry = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
        if let Some((lo, hi)) = thresholds {
            entry.check(lo, hi).map_err(err)?;
        }
        entries.push(entry);
    }
    Ok(entries)
}

pub fn write_manifest(entries: &[ManifestEntry], path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for entry in entries {
        serde_json::to_writer(&mut out, entry)?;
        out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}
