//! Synthetic scroll-capture bundles with known ground truth.
//!
//! Pages are drawn as rows of dark "word" bars on a light background, one
//! viewport per scroll step. An interstitial dims everything outside its box
//! and draws a bordered panel at a fixed viewport position in every frame.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{write_bundle, write_manifest};
use crate::imaging::RgbRaster;
use crate::{CaptureBundle, Error, Label, ManifestEntry, Result, Truth};

const BACKGROUND: [u8; 3] = [250, 250, 250];
const PANEL: [u8; 3] = [255, 255, 255];
const BORDER: [u8; 3] = [70, 70, 70];
const BUTTON: [u8; 3] = [40, 110, 220];
const SHADOW: [u8; 3] = [55, 55, 55];

/// Vote threshold for a box of the given width: `min(400, 0.6 * width)`.
///
/// 400 assumes full-size browser screenshots; smaller synthetic viewports
/// would otherwise never reach it.
pub fn scaled_votes_threshold(box_width: u32) -> u32 {
    400.min((0.6 * f64::from(box_width)).floor() as u32)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterstitialSpec {
    /// `[x, y, w, h]` in viewport pixels.
    #[serde(rename = "box")]
    pub bbox: [u32; 4],
    pub border_px: u32,
    /// Width of the flat drop shadow drawn around the box, outside it.
    #[serde(default)]
    pub shadow_px: u32,
    /// Fraction of brightness removed outside the box.
    pub dim_alpha: f64,
}

impl InterstitialSpec {
    pub fn new(bbox: [u32; 4]) -> Self {
        Self {
            bbox,
            border_px: 2,
            shadow_px: 8,
            dim_alpha: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub viewport: (u32, u32),
    pub steps: usize,
    pub seed: u64,
    pub interstitial: Option<InterstitialSpec>,
    /// 0 leaves the page blank; 1 packs text rows tightly.
    pub content_density: f64,
}

impl SynthSpec {
    pub fn new(viewport: (u32, u32), steps: usize, seed: u64) -> Self {
        Self {
            viewport,
            steps,
            seed,
            interstitial: None,
            content_density: 0.7,
        }
    }

    pub fn with_interstitial(mut self, interstitial: InterstitialSpec) -> Self {
        self.interstitial = Some(interstitial);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (vw, vh) = self.viewport;
        if vw == 0 || vh == 0 {
            return Err(Error::invalid("viewport must be non-empty"));
        }
        if self.steps == 0 {
            return Err(Error::invalid("steps must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.content_density) {
            return Err(Error::invalid("content_density must be in [0, 1]"));
        }
        if let Some(i) = &self.interstitial {
            let [x, y, w, h] = i.bbox;
            if w == 0 || h == 0 || x.saturating_add(w) > vw || y.saturating_add(h) > vh {
                return Err(Error::invalid(format!(
                    "box {:?} does not fit in viewport {vw}x{vh}",
                    i.bbox
                )));
            }
            if 2 * i.border_px >= w.min(h) {
                return Err(Error::invalid("border too thick for box"));
            }
            if !(0.0..=1.0).contains(&i.dim_alpha) {
                return Err(Error::invalid("dim_alpha must be in [0, 1]"));
            }
        }
        Ok(())
    }

    pub fn url(&self) -> String {
        format!("https://synth.invalid/page/{:016x}", self.seed)
    }
}

#[derive(Clone, Copy)]
struct Bar {
    x: u32,
    y: u32,
    w: u32,
    h: u32,
    shade: u8,
}

/// Text-like rows covering a page of `page_h` pixels.
fn layout_page(rng: &mut ChaCha8Rng, width: u32, page_h: u32, density: f64) -> Vec<Bar> {
    let mut bars = Vec::new();
    if density <= 0.0 || width < 64 {
        return bars;
    }
    let mut y = rng.gen_range(4..20);
    while y < page_h {
        let h = rng.gen_range(8..=16);
        let mut x = rng.gen_range(width / 50..=width / 8);
        let end = width - rng.gen_range(width / 50..=width / 6);
        while x + 8 < end {
            let w = rng.gen_range(16..=110).min(end - x);
            bars.push(Bar {
                x,
                y,
                w,
                h,
                shade: rng.gen_range(20..=90),
            });
            x += w + rng.gen_range(6..=14);
        }
        let gap = rng.gen_range(6..=12) + ((1.0 - density) * rng.gen_range(0.0..120.0)) as u32;
        y += h + gap;
    }
    bars
}

fn render_frame(bars: &[Bar], width: u32, height: u32, top: u32) -> RgbRaster {
    let mut img =
        RgbRaster::filled(width as usize, height as usize, BACKGROUND).expect("non-empty viewport");
    let bottom = top + height;
    for b in bars.iter().filter(|b| b.y < bottom && b.y + b.h > top) {
        let y0 = b.y.max(top) - top;
        let y1 = (b.y + b.h).min(bottom) - top;
        img.fill_rect(
            b.x as usize,
            y0 as usize,
            (b.x + b.w) as usize,
            y1 as usize,
            [b.shade; 3],
        );
    }
    img
}

fn composite_overlay(img: &mut RgbRaster, spec: &InterstitialSpec) {
    let [bx, by, bw, bh] = spec.bbox.map(|v| v as usize);
    let keep = 1.0 - spec.dim_alpha;
    for y in 0..img.height() {
        for x in 0..img.width() {
            if x >= bx && x < bx + bw && y >= by && y < by + bh {
                continue;
            }
            let p = img.pixel(x, y);
            img.set_pixel(x, y, p.map(|c| (f64::from(c) * keep).round() as u8));
        }
    }
    // The shadow keeps scrolling content away from the border, so the box
    // edges come out identical in every frame.
    let s = spec.shadow_px as usize;
    if s > 0 {
        img.fill_rect(
            bx.saturating_sub(s),
            by.saturating_sub(s),
            bx + bw + s,
            by + bh + s,
            SHADOW,
        );
    }
    let t = spec.border_px as usize;
    img.fill_rect(bx, by, bx + bw, by + bh, BORDER);
    img.fill_rect(bx + t, by + t, bx + bw - t, by + bh - t, PANEL);

    // Static panel content: a heading, a few lines of copy and a button.
    let pad = (bw.min(bh) / 12).max(4);
    let line_h = (bh / 30).max(2);
    img.fill_rect(
        bx + pad,
        by + pad,
        bx + bw / 2,
        by + pad + 2 * line_h,
        [30, 30, 30],
    );
    for i in 0..3 {
        let y = by + pad + (4 + 2 * i) * line_h;
        img.fill_rect(
            bx + pad,
            y,
            bx + bw - pad - (i * bw / 8),
            y + line_h,
            [120, 120, 120],
        );
    }
    let btn_w = (bw / 6).max(4);
    img.fill_rect(
        bx + bw - pad - btn_w,
        by + bh - pad - 3 * line_h,
        bx + bw - pad,
        by + bh - pad,
        BUTTON,
    );
}

fn page_html(rng: &mut ChaCha8Rng, url: &str, overlay: bool) -> String {
    let mut html =
        String::from("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n");
    html.push_str(&format!(
        "<title>{url}</title>\n<link rel=\"stylesheet\" href=\"/site.css\">\n"
    ));
    for i in 0..rng.gen_range(0..4) {
        html.push_str(&format!("<script src=\"/js/{i}.js\" async></script>\n"));
    }
    html.push_str("</head>\n<body class=\"page\">\n<nav id=\"top\">\n");
    for i in 0..rng.gen_range(3..9) {
        html.push_str(&format!(
            "<a href=\"/s/{i}\" class=\"nav-link\">Section {i}</a>\n"
        ));
    }
    html.push_str("</nav>\n<main>\n");
    for i in 0..rng.gen_range(4..16) {
        match rng.gen_range(0..5) {
            0 => html.push_str(&format!("<h2 id=\"h{i}\">Heading</h2>\n")),
            1 => html.push_str(&format!(
                "<img src=\"/img/{i}.jpg\" alt=\"\" width=\"640\" height=\"360\">\n"
            )),
            2 => html.push_str(
                "<p>Lorem ipsum <a href=\"/more\">dolor</a> sit amet.<br>Consectetur.</p>\n",
            ),
            3 => html.push_str("<ul><li>one</li><li>two</li></ul>\n"),
            _ => html.push_str(
                "<div class=\"card\"><span class=\"meta\">2017</span><p>Body text.</p></div>\n",
            ),
        }
    }
    if rng.gen_bool(0.2) {
        html.push_str("<div role=\"complementary\" class=\"aside\"><p>Related</p></div>\n");
    }
    html.push_str("</main>\n<footer><p>&copy; synth</p></footer>\n");
    if overlay {
        html.push_str(
            "<div class=\"modal-backdrop\" data-dismiss=\"modal\"></div>\n\
             <div class=\"modal\" role=\"dialog\" aria-modal=\"true\" aria-labelledby=\"modal-title\" tabindex=\"-1\">\n\
             <h3 id=\"modal-title\">Subscribe</h3>\n<form action=\"/subscribe\" method=\"post\">\n\
             <input type=\"email\" name=\"email\" placeholder=\"you@example.com\">\n\
             <button type=\"submit\" class=\"btn\">Sign up</button>\n</form>\n\
             <button class=\"close\" aria-label=\"Close\">&times;</button>\n</div>\n",
        );
    }
    html.push_str("</body>\n</html>\n");
    html
}

/// Renders a bundle. Identical specs give identical bundles.
pub fn generate_bundle(spec: &SynthSpec) -> Result<CaptureBundle> {
    spec.validate()?;
    let (vw, vh) = spec.viewport;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let page_h = vh * spec.steps as u32;
    let bars = layout_page(&mut rng, vw, page_h, spec.content_density);
    let screenshots = (0..spec.steps as u32)
        .map(|step| {
            let mut frame = render_frame(&bars, vw, vh, step * vh);
            if let Some(i) = &spec.interstitial {
                composite_overlay(&mut frame, i);
            }
            frame
        })
        .collect();
    let url = spec.url();
    let html = page_html(&mut rng, &url, spec.interstitial.is_some());
    Ok(CaptureBundle {
        url,
        viewport: spec.viewport,
        scroll_height: page_h,
        step_px: vh,
        captured_at: "1970-01-01T00:00:00Z".to_string(),
        screenshots,
        html_snapshots: vec![html],
        truth: Some(Truth {
            has_interstitial: spec.interstitial.is_some(),
            bbox: spec.interstitial.map(|i| i.bbox),
        }),
    })
}

/// Parameters of a generated corpus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub n: usize,
    pub interstitial_fraction: f64,
    pub seed: u64,
    pub viewport: (u32, u32),
    pub steps: usize,
}

impl CorpusSpec {
    pub fn new(n: usize, interstitial_fraction: f64, seed: u64) -> Self {
        Self {
            n,
            interstitial_fraction,
            seed,
            viewport: (1280, 800),
            steps: 6,
        }
    }

    /// Boxes always cover the central half of the viewport. Their left edge
    /// lies in `[0.03, 0.23]` of the width and right edge in `[0.77, 0.97]`;
    /// vertically `[0.04, 0.20]` and `[0.80, 0.96]`.
    fn random_box(&self, rng: &mut ChaCha8Rng) -> [u32; 4] {
        let (vw, vh) = (f64::from(self.viewport.0), f64::from(self.viewport.1));
        let frac = |rng: &mut ChaCha8Rng, lo: f64, hi: f64, span: f64| {
            (rng.gen_range(lo..=hi) * span).round() as u32
        };
        let x0 = frac(rng, 0.03, 0.23, vw);
        let x1 = frac(rng, 0.77, 0.97, vw);
        let y0 = frac(rng, 0.04, 0.20, vh);
        let y1 = frac(rng, 0.80, 0.96, vh);
        [x0, y0, x1 - x0, y1 - y0]
    }

    /// Narrowest box the generator can produce.
    pub fn min_box_width(&self) -> u32 {
        let vw = f64::from(self.viewport.0);
        (0.77 * vw).round() as u32 - (0.23 * vw).round() as u32
    }

    /// Corpus-wide vote threshold, [`scaled_votes_threshold`] of the
    /// narrowest possible box.
    pub fn votes_threshold(&self) -> u32 {
        scaled_votes_threshold(self.min_box_width())
    }

    /// Per-bundle specs, in corpus order.
    pub fn bundle_specs(&self) -> Result<Vec<SynthSpec>> {
        if self.n == 0 {
            return Err(Error::invalid("corpus size must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.interstitial_fraction) {
            return Err(Error::invalid("interstitial fraction must be in [0, 1]"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let n_yes = ((self.n as f64) * self.interstitial_fraction).round() as usize;
        let mut order: Vec<usize> = (0..self.n).collect();
        order.shuffle(&mut rng);
        let mut has_box = vec![false; self.n];
        for &i in &order[..n_yes.min(self.n)] {
            has_box[i] = true;
        }
        has_box
            .into_iter()
            .map(|yes| {
                let mut spec = SynthSpec::new(self.viewport, self.steps, rng.gen());
                spec.content_density = rng.gen_range(0.3..=0.9);
                if yes {
                    let mut i = InterstitialSpec::new(self.random_box(&mut rng));
                    i.dim_alpha = rng.gen_range(0.35..=0.7);
                    spec.interstitial = Some(i);
                }
                spec.validate()?;
                Ok(spec)
            })
            .collect()
    }
}

/// Writes `out/bundle_NNNN/` directories and `out/manifest.jsonl`.
pub fn generate_corpus(spec: &CorpusSpec, out: &Path) -> Result<Vec<ManifestEntry>> {
    let specs = spec.bundle_specs()?;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut entries = Vec::with_capacity(specs.len());
    for (i, s) in specs.iter().enumerate() {
        let name = format!("bundle_{i:04}");
        let bundle = generate_bundle(s)?;
        write_bundle(&bundle, &out.join(&name))?;
        let mut entry = ManifestEntry::new(name, bundle.url);
        entry.truth_label = Some(if s.interstitial.is_some() {
            Label::Yes
        } else {
            Label::No
        });
        entries.push(entry);
    }
    write_manifest(&entries, &out.join("manifest.jsonl"))?;
    Ok(entries)
}
