//! Fixtures for the pipeline benchmarks.

use interstitial_core::imaging::{canny_edges, to_grayscale};
use interstitial_core::synth::{generate_bundle, InterstitialSpec, SynthSpec};
use interstitial_core::{CaptureBundle, EdgeRaster, GrayRaster};

/// A bundle of `steps` frames at `viewport`, with an overlay covering the
/// middle of the viewport.
pub fn overlay_bundle(viewport: (u32, u32), steps: usize) -> CaptureBundle {
    let (w, h) = viewport;
    let spec = SynthSpec::new(viewport, steps, 1).with_interstitial(InterstitialSpec::new([
        w / 6,
        h / 6,
        w * 2 / 3,
        h * 2 / 3,
    ]));
    generate_bundle(&spec).expect("fixture spec is valid")
}

pub fn first_gray(bundle: &CaptureBundle) -> GrayRaster {
    to_grayscale(&bundle.screenshots[0])
}

pub fn first_edges(bundle: &CaptureBundle) -> EdgeRaster {
    canny_edges(&first_gray(bundle), 50.0, 150.0).expect("default thresholds are valid")
}

/// The first HTML snapshot repeated until it reaches about `bytes` long.
pub fn html_document(bundle: &CaptureBundle, bytes: usize) -> String {
    let page = bundle
        .html_snapshots
        .first()
        .map(String::as_str)
        .unwrap_or("<p>");
    page.repeat(bytes.div_ceil(page.len().max(1)))
}
