use interstitial_core::corpus::{read_bundle, read_manifest, write_bundle};
use interstitial_core::heuristics::{analyze_bundle, AnalysisParams};
use interstitial_core::synth::{
    generate_bundle, generate_corpus, CorpusSpec, InterstitialSpec, SynthSpec,
};
use interstitial_core::Label;

fn params_for(spec: &CorpusSpec) -> AnalysisParams {
    let mut p = AnalysisParams::default();
    p.hough.votes_threshold = spec.votes_threshold();
    p
}

fn small(seed: u64, overlay: bool) -> SynthSpec {
    let spec = SynthSpec::new((640, 400), 6, seed);
    if overlay {
        spec.with_interstitial(InterstitialSpec::new([80, 40, 480, 320]))
    } else {
        spec
    }
}

fn small_params() -> AnalysisParams {
    let mut p = AnalysisParams::default();
    p.hough.votes_threshold = 200;
    p
}

#[test]
fn overlay_bundle_scores_full_marks() {
    let a = analyze_bundle(&generate_bundle(&small(3, true)).unwrap(), &small_params()).unwrap();
    assert_eq!(a.points, 9, "{:?}", a.clauses);
    assert_eq!(a.confidence, 1.0);
    assert_eq!(a.label, Label::Yes);
    assert!(a.persisted_vertical >= 2 && a.persisted_horizontal >= 2);
}

#[test]
fn plain_bundle_scores_no() {
    let a = analyze_bundle(&generate_bundle(&small(3, false)).unwrap(), &small_params()).unwrap();
    assert!(a.confidence < 0.3, "{:?}", a.clauses);
    assert_eq!(a.label, Label::No);
}

#[test]
fn single_screenshot_cannot_persist() {
    let mut spec = small(9, true);
    spec.steps = 1;
    let a = analyze_bundle(&generate_bundle(&spec).unwrap(), &small_params()).unwrap();
    assert!(a.points <= 1, "{:?}", a.clauses);
    assert_eq!(a.numdiffs, 0);
}

#[test]
fn analysis_survives_disk_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = generate_bundle(&small(4, true)).unwrap();
    write_bundle(&bundle, dir.path()).unwrap();
    let back = read_bundle(dir.path()).unwrap();
    assert_eq!(back.screenshots, bundle.screenshots);
    let p = small_params();
    assert_eq!(
        analyze_bundle(&back, &p).unwrap().confidence,
        analyze_bundle(&bundle, &p).unwrap().confidence
    );
}

#[test]
fn generated_corpus_reads_back_and_separates() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = CorpusSpec::new(4, 0.5, 7);
    spec.viewport = (640, 400);
    let entries = generate_corpus(&spec, dir.path()).unwrap();
    assert_eq!(
        read_manifest(&dir.path().join("manifest.jsonl")).unwrap(),
        entries
    );
    let yes = entries
        .iter()
        .filter(|e| e.truth_label == Some(Label::Yes))
        .count();
    assert_eq!(yes, 2);
    let params = params_for(&spec);
    for e in &entries {
        let a = analyze_bundle(&read_bundle(&e.resolve(dir.path())).unwrap(), &params).unwrap();
        assert_eq!(Some(a.label), e.truth_label, "{}: {:?}", e.url, a.clauses);
    }
}

#[test]
fn analysis_is_deterministic() {
    let bundle = generate_bundle(&small(21, true)).unwrap();
    let p = small_params();
    let a = serde_json::to_string(&analyze_bundle(&bundle, &p).unwrap()).unwrap();
    let b = serde_json::to_string(&analyze_bundle(&bundle, &p).unwrap()).unwrap();
    assert_eq!(a, b);
}
