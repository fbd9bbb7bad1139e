//! Interstitial (overlay / modal) detection for scroll-capture bundles.
//!
//! The crate is split along the pipeline:
//!
//! * [`imaging`]: grayscale, Gaussian smoothing, Canny edges and the Hough line transform.
//! * [`heuristics`]: line persistence, mid-region diffs and the confidence score.
//! * [`features`]: (element, attribute) pair frequencies from HTML snapshots.
//! * [`learn`]: train/test split, linear SVM, label spreading and the evaluation report.
//! * [`corpus`]: on-disk capture bundles and JSONL manifests.
//! * [`synth`]: synthetic bundles with known ground truth.

pub mod corpus;
pub mod error;
pub mod features;
pub mod heuristics;
pub mod imaging;
mod label;
pub mod learn;
pub mod synth;

pub use corpus::{CaptureBundle, ManifestEntry, Truth};
pub use error::{Error, Result};
pub use features::{FeatureVector, PairFrequencies, Vocabulary};
pub use heuristics::{AnalysisParams, BundleAnalysis, LineCandidateMap, QuantizedLine};
pub use imaging::{EdgeRaster, GrayRaster, HoughPeak, PolarLine, RgbRaster};
pub use label::Label;
pub use learn::{EvaluationReport, LabeledExample, SvmModel};
pub use synth::SynthSpec;
