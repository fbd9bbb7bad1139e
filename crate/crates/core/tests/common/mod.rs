//! Reference implementations and fixtures shared by the integration tests
//! and the acceptance harness.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::PI;

use interstitial_core::heuristics::QuantizedLine;
use interstitial_core::imaging::{hough_lines, HoughParams};
use interstitial_core::learn::LabeledExample;
use interstitial_core::{EdgeRaster, FeatureVector, Label, LineCandidateMap};
use rand::seq::SliceRandom;
use rand::Rng;

/// Dense Hough accumulator: a full `(theta, rho)` grid, filled by scanning
/// every pixel of the raster. Returns `(theta_bin, rho_bin, votes)` for the
/// cells at or above `threshold`, in no particular order.
pub fn naive_hough(
    edges: &EdgeRaster,
    rho_res: f64,
    theta_res: f64,
    threshold: u32,
) -> Vec<(usize, i64, u32)> {
    let (w, h) = (edges.width(), edges.height());
    let diag = (w as f64).hypot(h as f64);
    let half = (diag / rho_res).ceil() as i64;
    let mut n_theta = 0usize;
    while (n_theta as f64) * theta_res < PI - 1e-9 * theta_res {
        n_theta += 1;
    }
    let n_theta = n_theta.max(1);
    let mut grid = vec![vec![0u32; (2 * half + 1) as usize]; n_theta];
    for (k, row) in grid.iter_mut().enumerate() {
        let theta = k as f64 * theta_res;
        let (c, s) = (theta.cos(), theta.sin());
        for y in 0..h {
            for x in 0..w {
                if edges.get(x, y) {
                    let rho = x as f64 * c + y as f64 * s;
                    row[((rho / rho_res).round() as i64 + half) as usize] += 1;
                }
            }
        }
    }
    let mut out = Vec::new();
    for (k, row) in grid.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v >= threshold {
                out.push((k, j as i64 - half, v));
            }
        }
    }
    out
}

pub fn random_edges(rng: &mut impl Rng, max_side: usize) -> EdgeRaster {
    let w = rng.gen_range(1..=max_side);
    let h = rng.gen_range(1..=max_side);
    let density: f64 = rng.gen_range(0.0..0.3);
    let mut mask: Vec<bool> = (0..w * h).map(|_| rng.gen_bool(density)).collect();
    // Plant a few straight runs so high thresholds still find something.
    for _ in 0..rng.gen_range(0..4) {
        if rng.gen_bool(0.5) {
            let y = rng.gen_range(0..h);
            mask[y * w..(y + 1) * w].iter_mut().for_each(|m| *m = true);
        } else {
            let x = rng.gen_range(0..w);
            (0..h).for_each(|y| mask[y * w + x] = true);
        }
    }
    EdgeRaster::new(w, h, mask).unwrap()
}

/// Line-for-line port of the heuristics pseudocode: dictionaries keyed by
/// `(rho, theta)`, exact float comparisons included.
pub fn pseudocode_confidence(results: &[((f64, f64), usize)], numdiffs: usize) -> f64 {
    let max_conf = 9.0;
    let mut confidence = 0.0;
    if !results.is_empty() {
        let pruned: Vec<_> = results.iter().filter(|(_, v)| *v > 1).collect();
        let pruned_more: Vec<_> = results.iter().filter(|(_, v)| *v > 4).collect();
        let vert: Vec<_> = pruned
            .iter()
            .filter(|((_, theta), _)| *theta == 0.0)
            .collect();
        let horz: Vec<_> = pruned
            .iter()
            .filter(|((_, theta), _)| (1.57 - *theta).abs() < 0.005)
            .collect();
        let vert_pruned: Vec<_> = vert.iter().filter(|(_, v)| *v > 4).collect();
        let horz_pruned: Vec<_> = horz.iter().filter(|(_, v)| *v > 4).collect();
        if !pruned.is_empty() {
            confidence += 1.0;
        }
        if !pruned_more.is_empty() {
            confidence += 2.0;
        }
        if vert.len() > 1 && horz.len() > 1 {
            confidence += 2.0;
        }
        if vert_pruned.len() > 1 && horz_pruned.len() > 1 {
            confidence += 2.0;
        }
        if numdiffs > 2 {
            confidence += 2.0;
        }
    }
    confidence / max_conf
}

/// Eight candidate lines at one-degree bins: three vertical, three
/// horizontal, one diagonal and one a bin short of horizontal.
pub fn line_pool() -> Vec<QuantizedLine> {
    [
        (10, 0),
        (20, 0),
        (30, 0),
        (10, 90),
        (20, 90),
        (30, 90),
        (5, 45),
        (40, 89),
    ]
    .into_iter()
    .map(|(rho_bin, theta_bin)| QuantizedLine { rho_bin, theta_bin })
    .collect()
}

pub fn build_map(lines: &[(QuantizedLine, usize)]) -> LineCandidateMap {
    let mut map = LineCandidateMap::with_default_bins();
    for &(line, count) in lines {
        map.set(line, count);
    }
    map
}

pub fn map_as_dict(map: &LineCandidateMap) -> Vec<((f64, f64), usize)> {
    map.iter()
        .map(|(l, &c)| ((l.rho(map.rho_res()), l.theta(map.theta_res())), c))
        .collect()
}

/// Every subset of `pool` with at most `max_lines` members, each member
/// given every count in `1..=max_count`.
pub fn enumerate_maps(
    pool: &[QuantizedLine],
    max_lines: usize,
    max_count: usize,
) -> Vec<Vec<(QuantizedLine, usize)>> {
    let mut out = vec![Vec::new()];
    fn rec(
        pool: &[QuantizedLine],
        start: usize,
        max_lines: usize,
        max_count: usize,
        cur: &mut Vec<(QuantizedLine, usize)>,
        out: &mut Vec<Vec<(QuantizedLine, usize)>>,
    ) {
        if cur.len() == max_lines {
            return;
        }
        for i in start..pool.len() {
            for c in 1..=max_count {
                cur.push((pool[i], c));
                out.push(cur.clone());
                rec(pool, i + 1, max_lines, max_count, cur, out);
                cur.pop();
            }
        }
    }
    rec(pool, 0, max_lines, max_count, &mut Vec::new(), &mut out);
    out
}

pub fn random_map(rng: &mut impl Rng) -> Vec<(QuantizedLine, usize)> {
    let mut pool = line_pool();
    for _ in 0..4 {
        pool.push(QuantizedLine {
            rho_bin: rng.gen_range(-50..50),
            theta_bin: *[0, 90, rng.gen_range(0..180)].choose(rng).unwrap(),
        });
    }
    pool.sort();
    pool.dedup();
    pool.shuffle(rng);
    let n = rng.gen_range(0..=pool.len());
    pool[..n]
        .iter()
        .map(|&l| (l, rng.gen_range(1..=8)))
        .collect()
}

const TAGS: &[&str] = &[
    "div", "span", "a", "p", "br", "img", "section", "button", "input", "ul", "li", "form",
];
const ATTRS: &[&str] = &[
    "class",
    "id",
    "href",
    "src",
    "style",
    "role",
    "aria-modal",
    "data-x",
    "type",
    "alt",
];

/// A random, mostly well-formed document with comments, script bodies,
/// end tags and mixed-case names. Always contains at
/// least one start tag.
pub fn random_html(rng: &mut impl Rng) -> String {
    let mut s = String::from("<!DOCTYPE html><html>");
    for _ in 0..rng.gen_range(1..40) {
        match rng.gen_range(0..10) {
            0 => s.push_str("<!-- <div class=\"hidden\"> -->"),
            1 => s.push_str("<script>var t = '<a href=x>';</script>"),
            2 => s.push_str("text & more text"),
            3 => s.push_str("</div>"),
            _ => {
                let mut tag = TAGS.choose(rng).unwrap().to_string();
                if rng.gen_bool(0.2) {
                    tag = tag.to_uppercase();
                }
                s.push('<');
                s.push_str(&tag);
                for _ in 0..rng.gen_range(0..4) {
                    s.push(' ');
                    s.push_str(ATTRS.choose(rng).unwrap());
                    if rng.gen_bool(0.7) {
                        s.push_str("=\"v\"");
                    }
                }
                s.push_str(if rng.gen_bool(0.1) { "/>" } else { ">" });
            }
        }
    }
    s.push_str("</html>");
    s
}

/// `(0,1)` labeled no and `(1,0)` labeled yes, ten copies each.
pub fn toy_set() -> Vec<LabeledExample> {
    (0..10)
        .flat_map(|i| {
            [(vec![0.0, 1.0], Label::No), (vec![1.0, 0.0], Label::Yes)]
                .into_iter()
                .map(move |(values, label)| LabeledExample {
                    vector: FeatureVector {
                        vocab_hash: "toy".into(),
                        values,
                    },
                    label,
                    source: format!("toy{i}-{label}"),
                })
        })
        .collect()
}

/// Reference evaluation: 21 truth-no, 32 truth-yes, everything predicted no.
pub fn all_no_labels() -> (Vec<Label>, Vec<Label>) {
    let truth: Vec<Label> = std::iter::repeat_n(Label::No, 21)
        .chain(std::iter::repeat_n(Label::Yes, 32))
        .collect();
    (vec![Label::No; truth.len()], truth)
}

pub fn counts(map: &LineCandidateMap) -> BTreeMap<QuantizedLine, usize> {
    map.iter().map(|(l, &c)| (*l, c)).collect()
}

/// Checks `hough_lines` against [`naive_hough`] bin for bin, plus the
/// documented output order and bin-centre values.
pub fn check_hough(edges: &EdgeRaster, params: &HoughParams) -> Result<(), String> {
    let got = hough_lines(edges, params).map_err(|e| e.to_string())?;
    for pair in got.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let ordered = a.votes > b.votes
            || (a.votes == b.votes && (a.line.rho, a.line.theta) < (b.line.rho, b.line.theta));
        if !ordered {
            return Err(format!("peaks out of order: {a:?} then {b:?}"));
        }
    }
    let mut got_bins: Vec<(usize, i64, u32)> = got
        .iter()
        .map(|p| {
            let k = (p.line.theta / params.theta_res).round() as usize;
            if p.line.theta != k as f64 * params.theta_res {
                return Err(format!("theta {} is not a bin centre", p.line.theta));
            }
            Ok((k, (p.line.rho / params.rho_res).round() as i64, p.votes))
        })
        .collect::<Result<_, String>>()?;
    let mut want = naive_hough(
        edges,
        params.rho_res,
        params.theta_res,
        params.votes_threshold,
    );
    got_bins.sort();
    want.sort();
    if got_bins != want {
        return Err(format!(
            "{}x{} rho_res={} theta_res={} threshold={}: {} peaks vs {} in the dense accumulator",
            edges.width(),
            edges.height(),
            params.rho_res,
            params.theta_res,
            params.votes_threshold,
            got_bins.len(),
            want.len()
        ));
    }
    Ok(())
}

pub fn random_hough_params(rng: &mut impl Rng) -> HoughParams {
    HoughParams {
        rho_res: *[0.5, 1.0, 1.5, 2.0, 3.0].choose(rng).unwrap(),
        theta_res: PI / f64::from(*[7, 45, 90, 180, 360].choose(rng).unwrap()),
        votes_threshold: rng.gen_range(1..=40),
    }
}
