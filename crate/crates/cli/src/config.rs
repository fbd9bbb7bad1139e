use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use interstitial_core::heuristics::AnalysisParams;
use interstitial_core::imaging::{CannyParams, HoughParams};
use interstitial_core::learn::SvmParams;
use serde::{Deserialize, Serialize};

/// Which HTML snapshot(s) of a bundle feed the feature extractor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum HtmlSnapshot {
    /// The page as first loaded.
    First,
    /// Pair counts pooled over every snapshot.
    All,
}

/// Every tunable, as read from a `--config` JSON file. Missing keys take
/// the defaults; unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub canny_low: f64,
    pub canny_high: f64,
    pub rho_res: f64,
    pub theta_res: f64,
    pub votes_threshold: u32,
    pub theta_tol: f64,
    pub persist_min: usize,
    pub persist_strong: usize,
    pub numdiffs_min: usize,
    pub label_lo: f64,
    pub label_hi: f64,
    pub diff_tol: f64,
    /// Drop trailing duplicate screenshots before analysis.
    pub dedupe: bool,
    pub seed: u64,
    pub workers: usize,
    pub html_snapshot: HtmlSnapshot,
    #[serde(rename = "C")]
    pub c: f64,
    pub epochs: usize,
    pub test_ratio: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let a = AnalysisParams::default();
        let svm = SvmParams::default();
        Self {
            canny_low: a.canny.low,
            canny_high: a.canny.high,
            rho_res: a.hough.rho_res,
            theta_res: a.hough.theta_res,
            votes_threshold: a.hough.votes_threshold,
            theta_tol: a.theta_tol,
            persist_min: a.persist_min,
            persist_strong: a.persist_strong,
            numdiffs_min: a.numdiffs_min,
            label_lo: a.label_lo,
            label_hi: a.label_hi,
            diff_tol: a.diff_tol,
            dedupe: false,
            seed: svm.seed,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            html_snapshot: HtmlSnapshot::First,
            c: svm.c,
            epochs: svm.epochs,
            test_ratio: 0.3,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn analysis(&self) -> Result<AnalysisParams> {
        let params = AnalysisParams {
            canny: CannyParams {
                low: self.canny_low,
                high: self.canny_high,
            },
            hough: HoughParams {
                rho_res: self.rho_res,
                theta_res: self.theta_res,
                votes_threshold: self.votes_threshold,
            },
            theta_tol: self.theta_tol,
            persist_min: self.persist_min,
            persist_strong: self.persist_strong,
            numdiffs_min: self.numdiffs_min,
            label_lo: self.label_lo,
            label_hi: self.label_hi,
            diff_tol: self.diff_tol,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn svm(&self) -> SvmParams {
        SvmParams {
            c: self.c,
            epochs: self.epochs,
            seed: self.seed,
        }
    }
}
