//! (element, attribute) pair features from raw HTML.
//!
//! The tokenizer is deliberately forgiving: it never fails, only looks at
//! start tags, and skips anything it cannot make sense of.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// `(tag name, attribute name)`, both lowercase. Tags without attributes use
/// an empty attribute name.
pub type Pair = (String, String);

/// Multiset of pairs.
pub type PairCounts = BTreeMap<Pair, usize>;

/// Elements whose content is text, not markup.
const RAW_TEXT: &[&str] = &["script", "style", "textarea", "title"];

fn is_space(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\n' | b'\r' | b'\x0c')
}

fn name_from(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes)
        .chars()
        .filter(|&c| c != char::REPLACEMENT_CHARACTER)
        .flat_map(char::to_lowercase)
        .collect()
}

fn find(hay: &[u8], from: usize, needle: &[u8]) -> Option<usize> {
    hay.get(from..)?
        .windows(needle.len())
        .position(|w| w == needle)
        .map(|p| p + from)
}

/// Position just past the closing `</name` of a raw-text element.
fn skip_raw_text(src: &[u8], from: usize, name: &str) -> usize {
    let mut i = from;
    while let Some(p) = find(src, i, b"</") {
        let after = p + 2;
        let end = after + name.len();
        if end <= src.len()
            && src[after..end].eq_ignore_ascii_case(name.as_bytes())
            && src
                .get(end)
                .is_none_or(|&b| is_space(b) || b == b'>' || b == b'/')
        {
            return end;
        }
        i = after;
    }
    src.len()
}

struct StartTag {
    name: String,
    attrs: Vec<String>,
    end: usize,
}

/// Parses a start tag whose name begins at `i` (just past `<`). Returns
/// `None` when input ends before the tag is closed.
fn start_tag(src: &[u8], mut i: usize) -> Option<StartTag> {
    let n = src.len();
    let name_start = i;
    while i < n && !is_space(src[i]) && src[i] != b'/' && src[i] != b'>' {
        i += 1;
    }
    let name = name_from(&src[name_start..i]);
    let mut attrs: Vec<String> = Vec::new();
    loop {
        while i < n && (is_space(src[i]) || src[i] == b'/') {
            i += 1;
        }
        if i >= n {
            return None;
        }
        if src[i] == b'>' {
            return Some(StartTag {
                name,
                attrs,
                end: i + 1,
            });
        }
        let attr_start = i;
        // A leading '=' belongs to the name.
        i += 1;
        while i < n && !is_space(src[i]) && !matches!(src[i], b'/' | b'>' | b'=') {
            i += 1;
        }
        let attr = name_from(&src[attr_start..i]);
        while i < n && is_space(src[i]) {
            i += 1;
        }
        if i < n && src[i] == b'=' {
            i += 1;
            while i < n && is_space(src[i]) {
                i += 1;
            }
            match src.get(i) {
                Some(&q @ (b'"' | b'\'')) => {
                    let close = src[i + 1..].iter().position(|&b| b == q)?;
                    i += close + 2;
                }
                Some(_) => {
                    while i < n && !is_space(src[i]) && src[i] != b'>' {
                        i += 1;
                    }
                }
                None => return None,
            }
        }
        if !attr.is_empty() && !attrs.contains(&attr) {
            attrs.push(attr);
        }
    }
}

/// Extracts `(tag, attribute)` pairs from every start tag in `html`.
///
/// Comments, doctypes, processing instructions, end tags and the contents
/// of `script`/`style`/`textarea`/`title` are skipped. A tag cut off by the
/// end of input is dropped. Repeated attributes within one tag count once.
pub fn parse_html_pairs(html: &[u8]) -> PairCounts {
    let src = html;
    let n = src.len();
    let mut out = PairCounts::new();
    let mut i = 0;
    while let Some(off) = src[i..].iter().position(|&b| b == b'<') {
        i += off;
        let next = src.get(i + 1).copied();
        match next {
            Some(b'!') => {
                if src[i..].starts_with(b"<!--") {
                    i = find(src, i + 4, b"-->").map_or(n, |p| p + 3);
                } else {
                    i = find(src, i, b">").map_or(n, |p| p + 1);
                }
            }
            Some(b'?') | Some(b'/') => {
                i = find(src, i, b">").map_or(n, |p| p + 1);
            }
            Some(b) if b.is_ascii_alphabetic() => match start_tag(src, i + 1) {
                Some(tag) => {
                    if tag.attrs.is_empty() {
                        *out.entry((tag.name.clone(), String::new())).or_insert(0) += 1;
                    }
                    for attr in tag.attrs {
                        *out.entry((tag.name.clone(), attr)).or_insert(0) += 1;
                    }
                    i = tag.end;
                    if RAW_TEXT.contains(&tag.name.as_str()) {
                        i = skip_raw_text(src, i, &tag.name);
                    }
                }
                None => break,
            },
            _ => i += 1,
        }
        if i >= n {
            break;
        }
    }
    out
}

/// Relative frequency of each pair; sums to one unless empty.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PairFrequencies {
    #[serde(with = "pair_map")]
    pub freqs: BTreeMap<Pair, f64>,
}

impl PairFrequencies {
    pub fn get(&self, tag: &str, attr: &str) -> f64 {
        self.freqs
            .get(&(tag.to_string(), attr.to_string()))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.freqs.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }
}

pub fn pair_frequencies(pairs: &PairCounts) -> PairFrequencies {
    let total: usize = pairs.values().sum();
    let freqs = if total == 0 {
        BTreeMap::new()
    } else {
        pairs
            .iter()
            .map(|(k, &c)| (k.clone(), c as f64 / total as f64))
            .collect()
    };
    PairFrequencies { freqs }
}

/// Pair frequencies of a single document.
pub fn document_features(html: &str) -> PairFrequencies {
    pair_frequencies(&parse_html_pairs(html.as_bytes()))
}

/// Sorted, de-duplicated pairs; the index order of every feature vector.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub pairs: Vec<Pair>,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Hex SHA-256 over `tag \t attr \n` lines.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (tag, attr) in &self.pairs {
            h.update(tag.as_bytes());
            h.update(b"\t");
            h.update(attr.as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }
}

pub fn build_vocabulary(corpus: &[PairFrequencies]) -> Vocabulary {
    let all: BTreeSet<&Pair> = corpus.iter().flat_map(|f| f.freqs.keys()).collect();
    Vocabulary {
        pairs: all.into_iter().cloned().collect(),
    }
}

/// Dense features aligned to a vocabulary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub vocab_hash: String,
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Projects frequencies onto the vocabulary. Pairs outside it are dropped.
pub fn vectorize(freqs: &PairFrequencies, vocab: &Vocabulary) -> FeatureVector {
    FeatureVector {
        vocab_hash: vocab.hash(),
        values: vocab
            .pairs
            .iter()
            .map(|p| freqs.freqs.get(p).copied().unwrap_or(0.0))
            .collect(),
    }
}

/// Serializes pair-keyed maps as `[[tag, attr, value], ...]`.
mod pair_map {
    use super::Pair;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    pub fn serialize<S: Serializer>(map: &BTreeMap<Pair, f64>, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<(&str, &str, f64)> = map
            .iter()
            .map(|((t, a), &v)| (t.as_str(), a.as_str(), v))
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<Pair, f64>, D::Error> {
        let rows: Vec<(String, String, f64)> = Vec::deserialize(d)?;
        Ok(rows.into_iter().map(|(t, a, v)| ((t, a), v)).collect())
    }
}
