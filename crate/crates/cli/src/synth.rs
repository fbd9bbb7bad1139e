use std::path::Path;

use anyhow::Result;
use interstitial_core::synth::{generate_corpus, CorpusSpec};
use interstitial_core::Label;

pub fn cmd_synth(
    n: usize,
    interstitial_frac: f64,
    out: &Path,
    viewport: (u32, u32),
    steps: usize,
    seed: u64,
    json: bool,
) -> Result<u8> {
    let spec = CorpusSpec {
        viewport,
        steps,
        ..CorpusSpec::new(n, interstitial_frac, seed)
    };
    let entries = generate_corpus(&spec, out)?;
    let yes = entries
        .iter()
        .filter(|e| e.truth_label == Some(Label::Yes))
        .count();
    let threshold = spec.votes_threshold();
    if json {
        println!(
            "{}",
            serde_json::json!({
                "bundles": entries.len(),
                "yes": yes,
                "no": entries.len() - yes,
                "votes_threshold": threshold,
            })
        );
    } else {
        println!(
            "wrote {} bundles ({} yes, {} no) to {}; analyze with --votes-threshold {}",
            entries.len(),
            yes,
            entries.len() - yes,
            out.display(),
            threshold
        );
    }
    Ok(0)
}
