//! Line-persistence and mid-region heuristics, and the 0..9 point
//! confidence score used to auto-label a capture bundle.
//!
//! A bundle is a sequence of screenshots taken while scrolling. An overlay
//! stays put in viewport coordinates while the page scrolls underneath, so
//! its bounding lines show up at the same `(rho, theta)` in many frames and
//! the middle of consecutive frames stops changing.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};

use crate::imaging::{
    canny_edges, hough_lines, to_grayscale, CannyParams, HoughParams, PolarLine, RgbRaster,
};
use crate::{CaptureBundle, Error, Label, Result};

/// Reference angle for horizontal lines, as written in the original scoring script.
pub const HORIZONTAL_THETA: f64 = 1.57;

/// Points available from all clauses together.
pub const MAX_POINTS: u8 = 9;

/// Every tunable of the analysis path. Defaults are the published values
/// where one exists.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalysisParams {
    pub canny: CannyParams,
    pub hough: HoughParams,
    /// Tolerance around 1.57 rad for horizontal lines.
    pub theta_tol: f64,
    /// A line "persists" when seen in more than this many images.
    pub persist_min: usize,
    /// Stronger persistence: seen in more than this many images.
    pub persist_strong: usize,
    /// Mid-region matches needed (strictly more than) for the diff clause.
    pub numdiffs_min: usize,
    pub label_lo: f64,
    pub label_hi: f64,
    /// Mean absolute difference tolerated by the mid-region comparison.
    pub diff_tol: f64,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        Self {
            canny: CannyParams::default(),
            hough: HoughParams::default(),
            theta_tol: 0.005,
            persist_min: 1,
            persist_strong: 4,
            numdiffs_min: 2,
            label_lo: 0.3,
            label_hi: 0.75,
            diff_tol: 0.0,
        }
    }
}

impl AnalysisParams {
    pub fn validate(&self) -> Result<()> {
        self.hough.validate()?;
        if !(self.canny.low >= 0.0 && self.canny.low <= self.canny.high) {
            return Err(Error::invalid(
                "canny thresholds must satisfy 0 <= low <= high",
            ));
        }
        if !(self.theta_tol > 0.0) {
            return Err(Error::invalid("theta_tol must be positive"));
        }
        if !(0.0 <= self.label_lo && self.label_lo <= self.label_hi && self.label_hi <= 1.0) {
            return Err(Error::invalid(
                "label thresholds must satisfy 0 <= lo <= hi <= 1",
            ));
        }
        if !(self.diff_tol >= 0.0) {
            return Err(Error::invalid("diff_tol must be non-negative"));
        }
        Ok(())
    }
}

/// Angle within half a bin of zero, i.e. it quantizes to theta bin 0.
pub fn is_vertical(theta: f64, theta_res: f64) -> bool {
    theta.abs() < theta_res / 2.0
}

pub fn is_horizontal(theta: f64, theta_tol: f64) -> bool {
    (HORIZONTAL_THETA - theta).abs() < theta_tol
}

/// Keeps vertical and near-horizontal lines, in input order.
pub fn filter_lines(lines: &[PolarLine], theta_tol: f64, theta_res: f64) -> Vec<PolarLine> {
    lines
        .iter()
        .filter(|l| is_vertical(l.theta, theta_res) || is_horizontal(l.theta, theta_tol))
        .copied()
        .collect()
}

/// A line snapped to accumulator bins, so equal lines from different frames
/// compare equal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuantizedLine {
    pub rho_bin: i64,
    pub theta_bin: i64,
}

impl QuantizedLine {
    pub fn from_line(line: &PolarLine, rho_res: f64, theta_res: f64) -> Self {
        Self {
            rho_bin: (line.rho / rho_res).round() as i64,
            theta_bin: (line.theta / theta_res).round() as i64,
        }
    }

    pub fn theta(&self, theta_res: f64) -> f64 {
        self.theta_bin as f64 * theta_res
    }

    pub fn rho(&self, rho_res: f64) -> f64 {
        self.rho_bin as f64 * rho_res
    }
}

/// Number of images each quantized line appeared in.
#[derive(Clone, Debug, PartialEq)]
pub struct LineCandidateMap {
    rho_res: f64,
    theta_res: f64,
    counts: BTreeMap<QuantizedLine, usize>,
}

impl LineCandidateMap {
    pub fn new(rho_res: f64, theta_res: f64) -> Self {
        Self {
            rho_res,
            theta_res,
            counts: BTreeMap::new(),
        }
    }

    /// Default bins: 1 px by 1 degree.
    pub fn with_default_bins() -> Self {
        Self::new(1.0, PI / 180.0)
    }

    pub fn rho_res(&self) -> f64 {
        self.rho_res
    }

    pub fn theta_res(&self) -> f64 {
        self.theta_res
    }

    /// Sets the image count for a line. A count of zero removes it.
    pub fn set(&mut self, line: QuantizedLine, count: usize) {
        if count == 0 {
            self.counts.remove(&line);
        } else {
            self.counts.insert(line, count);
        }
    }

    pub fn get(&self, line: &QuantizedLine) -> usize {
        self.counts.get(line).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&QuantizedLine, &usize)> {
        self.counts.iter()
    }

    pub fn is_vertical(&self, line: &QuantizedLine) -> bool {
        line.theta_bin == 0
    }

    pub fn is_horizontal(&self, line: &QuantizedLine, theta_tol: f64) -> bool {
        is_horizontal(line.theta(self.theta_res), theta_tol)
    }

    /// Vertical lines seen in more than `min_count` images.
    pub fn persisted_vertical(&self, min_count: usize) -> usize {
        self.iter()
            .filter(|(l, &c)| c > min_count && self.is_vertical(l))
            .count()
    }

    /// Horizontal lines seen in more than `min_count` images.
    pub fn persisted_horizontal(&self, min_count: usize, theta_tol: f64) -> usize {
        self.iter()
            .filter(|(l, &c)| c > min_count && self.is_horizontal(l, theta_tol))
            .count()
    }
}

#[derive(Serialize)]
struct CandidateEntry {
    rho: f64,
    theta: f64,
    rho_bin: i64,
    theta_bin: i64,
    count: usize,
}

impl Serialize for LineCandidateMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.counts.len()))?;
        for (line, &count) in &self.counts {
            seq.serialize_element(&CandidateEntry {
                rho: line.rho(self.rho_res),
                theta: line.theta(self.theta_res),
                rho_bin: line.rho_bin,
                theta_bin: line.theta_bin,
                count,
            })?;
        }
        seq.end()
    }
}

/// Counts, for each quantized line, the number of images containing it.
/// Repeats within one image count once.
pub fn accumulate_candidates(
    per_image_lines: &[Vec<PolarLine>],
    rho_res: f64,
    theta_res: f64,
) -> LineCandidateMap {
    let mut map = LineCandidateMap::new(rho_res, theta_res);
    for lines in per_image_lines {
        let unique: BTreeSet<QuantizedLine> = lines
            .iter()
            .map(|l| QuantizedLine::from_line(l, rho_res, theta_res))
            .collect();
        for q in unique {
            *map.counts.entry(q).or_insert(0) += 1;
        }
    }
    map
}

/// Central window: the middle half of each axis.
fn mid_bounds(len: usize) -> (usize, usize) {
    let margin = len / 4;
    (margin, len - margin)
}

/// Mean absolute per-channel difference over the central 50% x 50% window.
pub fn mid_region_mad(a: &RgbRaster, b: &RgbRaster) -> Result<f64> {
    if a.dimensions() != b.dimensions() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", a.width(), a.height()),
            actual: format!("{}x{}", b.width(), b.height()),
        });
    }
    let (x0, x1) = mid_bounds(a.width());
    let (y0, y1) = mid_bounds(a.height());
    let stride = a.width() * 3;
    let (ab, bb) = (a.as_bytes(), b.as_bytes());
    let mut total: u64 = 0;
    for y in y0..y1 {
        let range = y * stride + x0 * 3..y * stride + x1 * 3;
        total += ab[range.clone()]
            .iter()
            .zip(&bb[range])
            .map(|(&p, &q)| u64::from(p.abs_diff(q)))
            .sum::<u64>();
    }
    let samples = ((x1 - x0) * (y1 - y0) * 3) as f64;
    Ok(total as f64 / samples)
}

/// Whether the middle of two frames is the same, up to `tol` mean absolute difference.
pub fn mid_region_same(a: &RgbRaster, b: &RgbRaster, tol: f64) -> Result<bool> {
    Ok(mid_region_mad(a, b)? <= tol)
}

/// Number of consecutive frame pairs with the same mid-region.
pub fn count_mid_diffs(shots: &[RgbRaster], tol: f64) -> Result<usize> {
    let mut n = 0;
    for pair in shots.windows(2) {
        if mid_region_same(&pair[0], &pair[1], tol)? {
            n += 1;
        }
    }
    Ok(n)
}

/// Which scoring clauses fired.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfidenceClauses {
    /// Some line persisted (+1).
    pub persisted: bool,
    /// Some line persisted strongly (+2).
    pub strongly_persisted: bool,
    /// More than one vertical and more than one horizontal persisted line (+2).
    pub box_persisted: bool,
    /// Same, with strong persistence (+2).
    pub box_strongly_persisted: bool,
    /// Enough frame pairs with identical mid-regions (+2).
    pub mid_region_static: bool,
}

impl ConfidenceClauses {
    pub fn points(&self) -> u8 {
        u8::from(self.persisted)
            + 2 * u8::from(self.strongly_persisted)
            + 2 * u8::from(self.box_persisted)
            + 2 * u8::from(self.box_strongly_persisted)
            + 2 * u8::from(self.mid_region_static)
    }
}

/// Evaluates the scoring clauses. An empty candidate map scores nothing,
/// regardless of `numdiffs`.
pub fn confidence_clauses(
    candidates: &LineCandidateMap,
    numdiffs: usize,
    params: &AnalysisParams,
) -> ConfidenceClauses {
    if candidates.is_empty() {
        return ConfidenceClauses::default();
    }
    let tol = params.theta_tol;
    let any_over = |min: usize| candidates.iter().any(|(_, &c)| c > min);
    let vert = candidates.persisted_vertical(params.persist_min);
    let horz = candidates.persisted_horizontal(params.persist_min, tol);
    let vert_strong = candidates.persisted_vertical(params.persist_strong);
    let horz_strong = candidates.persisted_horizontal(params.persist_strong, tol);
    ConfidenceClauses {
        persisted: any_over(params.persist_min),
        strongly_persisted: any_over(params.persist_strong),
        box_persisted: vert > 1 && horz > 1,
        box_strongly_persisted: vert_strong > 1 && horz_strong > 1,
        mid_region_static: numdiffs > params.numdiffs_min,
    }
}

/// Confidence in `[0, 1]`, always a multiple of 1/9.
pub fn calculate_confidence(
    candidates: &LineCandidateMap,
    numdiffs: usize,
    params: &AnalysisParams,
) -> f64 {
    f64::from(confidence_clauses(candidates, numdiffs, params).points()) / f64::from(MAX_POINTS)
}

/// `no` strictly below `lo`, `yes` strictly above `hi`, otherwise unlabeled.
pub fn label_from_score(score: f64, lo: f64, hi: f64) -> Result<Label> {
    if !(lo <= hi) {
        return Err(Error::invalid(format!(
            "label thresholds inverted: lo={lo} hi={hi}"
        )));
    }
    Ok(if score < lo {
        Label::No
    } else if score > hi {
        Label::Yes
    } else {
        Label::Unlabeled
    })
}

/// Evidence gathered for one bundle.
#[derive(Clone, Debug, Serialize)]
pub struct BundleAnalysis {
    pub url: String,
    pub frames: usize,
    /// Orientation-filtered lines, one list per screenshot.
    pub per_image_lines: Vec<Vec<PolarLine>>,
    pub candidates: LineCandidateMap,
    pub persisted_vertical: usize,
    pub persisted_horizontal: usize,
    pub numdiffs: usize,
    pub clauses: ConfidenceClauses,
    pub points: u8,
    pub confidence: f64,
    pub label: Label,
}

/// Lines found in one screenshot: grayscale, Canny, Hough, orientation filter.
pub fn frame_lines(shot: &RgbRaster, params: &AnalysisParams) -> Result<Vec<PolarLine>> {
    let gray = to_grayscale(shot);
    let edges = canny_edges(&gray, params.canny.low, params.canny.high)?;
    let peaks = hough_lines(&edges, &params.hough)?;
    let lines: Vec<PolarLine> = peaks.into_iter().map(|p| p.line).collect();
    Ok(filter_lines(
        &lines,
        params.theta_tol,
        params.hough.theta_res,
    ))
}

/// Runs the full heuristic pipeline over a bundle.
pub fn analyze_bundle(bundle: &CaptureBundle, params: &AnalysisParams) -> Result<BundleAnalysis> {
    params.validate()?;
    if bundle.screenshots.is_empty() {
        return Err(Error::invalid("bundle has no screenshots"));
    }
    let per_image_lines = bundle
        .screenshots
        .iter()
        .map(|shot| frame_lines(shot, params))
        .collect::<Result<Vec<_>>>()?;
    let candidates = accumulate_candidates(
        &per_image_lines,
        params.hough.rho_res,
        params.hough.theta_res,
    );
    let numdiffs = count_mid_diffs(&bundle.screenshots, params.diff_tol)?;
    let clauses = confidence_clauses(&candidates, numdiffs, params);
    let points = clauses.points();
    let confidence = f64::from(points) / f64::from(MAX_POINTS);
    let label = label_from_score(confidence, params.label_lo, params.label_hi)?;
    Ok(BundleAnalysis {
        url: bundle.url.clone(),
        frames: bundle.screenshots.len(),
        persisted_vertical: candidates.persisted_vertical(params.persist_min),
        persisted_horizontal: candidates.persisted_horizontal(params.persist_min, params.theta_tol),
        per_image_lines,
        candidates,
        numdiffs,
        clauses,
        points,
        confidence,
        label,
    })
}
