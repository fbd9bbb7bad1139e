use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion, Throughput};
use interstitial_bench::{first_edges, first_gray, html_document, overlay_bundle};
use interstitial_core::features::parse_html_pairs;
use interstitial_core::heuristics::{analyze_bundle, AnalysisParams};
use interstitial_core::imaging::{canny_edges, hough_lines, HoughParams};

fn imaging(c: &mut Criterion) {
    let bundle = overlay_bundle((1280, 800), 1);
    let gray = first_gray(&bundle);
    let edges = first_edges(&bundle);
    let mut g = c.benchmark_group("frame_1280x800");
    g.sample_size(20);
    g.bench_function("canny", |b| {
        b.iter(|| canny_edges(black_box(&gray), 50.0, 150.0).unwrap())
    });
    g.bench_function("hough", |b| {
        b.iter(|| hough_lines(black_box(&edges), &HoughParams::default()).unwrap())
    });
    g.finish();
}

fn bundle(c: &mut Criterion) {
    let bundle = overlay_bundle((1280, 2000), 10);
    let params = AnalysisParams::default();
    let mut g = c.benchmark_group("bundle");
    g.sample_size(10);
    g.bench_function("analyze_10x1280x2000", |b| {
        b.iter(|| analyze_bundle(black_box(&bundle), &params).unwrap())
    });
    g.finish();
}

fn html(c: &mut Criterion) {
    let doc = html_document(&overlay_bundle((320, 200), 1), 1 << 20);
    let mut g = c.benchmark_group("html");
    g.throughput(Throughput::Bytes(doc.len() as u64));
    g.bench_function("parse_pairs_1mib", |b| {
        b.iter(|| parse_html_pairs(black_box(doc.as_bytes())))
    });
    g.finish();
}

criterion_group!(benches, imaging, bundle, html);
criterion_main!(benches);
