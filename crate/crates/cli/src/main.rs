//! `interstitial`: batch front end for overlay detection on capture bundles.
//!
//! Exit codes: `analyze` returns 0 for yes, 1 for no and 2 for unlabeled.
//! Every command returns 3 on error.

mod analyze;
mod config;
mod dataset;
mod synth;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use config::{HtmlSnapshot, RunConfig};

const EXIT_ERROR: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "interstitial",
    version,
    about = "Detect interstitial overlays in scroll-capture bundles"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every randomized step.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for `scan`.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// JSON file of tunables; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
struct AnalysisArgs {
    #[arg(long)]
    canny_low: Option<f64>,
    #[arg(long)]
    canny_high: Option<f64>,
    #[arg(long)]
    rho_res: Option<f64>,
    /// Angle bin width in radians.
    #[arg(long)]
    theta_res: Option<f64>,
    #[arg(long)]
    votes_threshold: Option<u32>,
    #[arg(long)]
    theta_tol: Option<f64>,
    #[arg(long)]
    persist_min: Option<usize>,
    #[arg(long)]
    persist_strong: Option<usize>,
    #[arg(long)]
    numdiffs_min: Option<usize>,
    #[arg(long)]
    label_lo: Option<f64>,
    #[arg(long)]
    label_hi: Option<f64>,
    #[arg(long)]
    diff_tol: Option<f64>,
    /// Drop trailing duplicate screenshots first.
    #[arg(long, conflicts_with = "no_dedupe")]
    dedupe: bool,
    #[arg(long)]
    no_dedupe: bool,
}

/// Where training and evaluation labels come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum LabelSource {
    /// `truth_label` from the manifest.
    Truth,
    /// `cv_label` written by `scan`.
    Cv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analyze one bundle and print the evidence as JSON.
    Analyze {
        bundle: PathBuf,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
    /// Analyze every bundle in a manifest and write cv_score/cv_label.
    Scan {
        manifest: PathBuf,
        /// Output manifest; stdout when omitted.
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
    /// Extract pair-frequency vectors for every bundle in a manifest.
    Features {
        manifest: PathBuf,
        /// Directory for vocab.json and features.jsonl.
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long, value_enum)]
        html: Option<HtmlSnapshot>,
    },
    /// Train a linear SVM on the training part of a seeded split.
    Train {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, value_enum, default_value = "truth")]
        labels: LabelSource,
        /// Model JSON path.
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long)]
        test_ratio: Option<f64>,
        #[arg(long = "C", visible_alias = "c")]
        c: Option<f64>,
        #[arg(long)]
        epochs: Option<usize>,
    },
    /// Per-class precision, recall and F1.
    ///
    /// Either compare two label files (`--predictions` with `--truth`), or
    /// score a model on the held-out part of the split `train` used.
    Eval {
        /// JSONL of {"source", "label"}.
        #[arg(long, requires = "truth", conflicts_with = "model")]
        predictions: Option<PathBuf>,
        /// JSONL of {"source", "label"}.
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long, requires_all = ["features", "manifest"])]
        model: Option<PathBuf>,
        #[arg(long)]
        features: Option<PathBuf>,
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "truth")]
        labels: LabelSource,
        #[arg(long)]
        test_ratio: Option<f64>,
    },
    /// Generate a synthetic corpus with known ground truth.
    Synth {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        interstitial_frac: f64,
        #[arg(long, short)]
        out: PathBuf,
        /// Viewport as WIDTHxHEIGHT.
        #[arg(long, default_value = "1280x800", value_parser = parse_viewport)]
        viewport: (u32, u32),
        #[arg(long, default_value_t = 6)]
        steps: usize,
    },
}

fn parse_viewport(s: &str) -> Result<(u32, u32), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or("expected WIDTHxHEIGHT")?;
    let parse = |v: &str| v.trim().parse::<u32>().map_err(|e| format!("{v:?}: {e}"));
    Ok((parse(w)?, parse(h)?))
}

/// Layers flags over the config file over the defaults.
fn resolve_config(
    global: &GlobalArgs,
    analysis: Option<&AnalysisArgs>,
) -> anyhow::Result<RunConfig> {
    let mut cfg = RunConfig::load(global.config.as_deref())?;
    macro_rules! take {
        ($src:expr => $($field:ident),*) => {
            $(if let Some(v) = $src.$field { cfg.$field = v; })*
        };
    }
    take!(global => seed, workers);
    if let Some(a) = analysis {
        take!(a => canny_low, canny_high, rho_res, theta_res, votes_threshold, theta_tol,
            persist_min, persist_strong, numdiffs_min, label_lo, label_hi, diff_tol);
        if a.dedupe {
            cfg.dedupe = true;
        }
        if a.no_dedupe {
            cfg.dedupe = false;
        }
    }
    if cfg.workers == 0 {
        anyhow::bail!("--workers must be at least 1");
    }
    Ok(cfg)
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let json = cli.global.json;
    match cli.command {
        Command::Analyze { bundle, analysis } => {
            let cfg = resolve_config(&cli.global, Some(&analysis))?;
            analyze::cmd_analyze(&bundle, &cfg)
        }
        Command::Scan {
            manifest,
            out,
            analysis,
        } => {
            let cfg = resolve_config(&cli.global, Some(&analysis))?;
            analyze::cmd_scan(&manifest, out.as_deref(), &cfg, json)
        }
        Command::Features {
            manifest,
            out,
            html,
        } => {
            let mut cfg = resolve_config(&cli.global, None)?;
            if let Some(h) = html {
                cfg.html_snapshot = h;
            }
            dataset::cmd_features(&manifest, &out, &cfg, json)
        }
        Command::Train {
            features,
            manifest,
            labels,
            out,
            test_ratio,
            c,
            epochs,
        } => {
            let mut cfg = resolve_config(&cli.global, None)?;
            cfg.test_ratio = test_ratio.unwrap_or(cfg.test_ratio);
            cfg.c = c.unwrap_or(cfg.c);
            cfg.epochs = epochs.unwrap_or(cfg.epochs);
            dataset::cmd_train(
                &features,
                &manifest,
                labels == LabelSource::Cv,
                &out,
                &cfg,
                json,
            )
        }
        Command::Eval {
            predictions,
            truth,
            model,
            features,
            manifest,
            labels,
            test_ratio,
        } => {
            let mut cfg = resolve_config(&cli.global, None)?;
            cfg.test_ratio = test_ratio.unwrap_or(cfg.test_ratio);
            let report = match (predictions, truth, model, features, manifest) {
                (Some(p), Some(t), None, _, _) => dataset::eval_label_files(&p, &t)?,
                (None, _, Some(m), Some(f), Some(man)) => {
                    dataset::eval_model(&m, &f, &man, labels == LabelSource::Cv, &cfg)?
                }
                _ => anyhow::bail!("eval needs --predictions with --truth, or --model with --features and --manifest"),
            };
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                print!("{report}");
            }
            Ok(0)
        }
        Command::Synth {
            n,
            interstitial_frac,
            out,
            viewport,
            steps,
        } => {
            let cfg = resolve_config(&cli.global, None)?;
            synth::cmd_synth(n, interstitial_frac, &out, viewport, steps, cfg.seed, json)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_ERROR)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_is_well_formed() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn viewport_parsing() {
        assert_eq!(parse_viewport("1280x800"), Ok((1280, 800)));
        assert!(parse_viewport("1280").is_err());
        assert!(parse_viewport("ax1").is_err());
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(
            &path,
            r#"{"votes_threshold": 100, "seed": 5, "theta_tol": 0.01}"#,
        )
        .unwrap();
        let global = GlobalArgs {
            json: false,
            seed: Some(9),
            workers: Some(2),
            config: Some(path),
        };
        let analysis = AnalysisArgs {
            votes_threshold: Some(250),
            ..AnalysisArgs::default()
        };
        let cfg = resolve_config(&global, Some(&analysis)).unwrap();
        assert_eq!(cfg.votes_threshold, 250);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.workers, 2);
        assert_eq!(cfg.theta_tol, 0.01);
        assert_eq!(cfg.canny_high, 150.0);
    }
}
