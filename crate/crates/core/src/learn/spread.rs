use serde::{Deserialize, Serialize};

use crate::{Error, Label, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpreadParams {
    pub k: usize,
    pub alpha: f64,
    pub iters: usize,
}

impl Default for SpreadParams {
    fn default() -> Self {
        Self {
            k: 7,
            alpha: 0.2,
            iters: 30,
        }
    }
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Label spreading over a symmetric k-nearest-neighbour cosine graph.
///
/// Iterates `F <- alpha S F + (1 - alpha) Y` where `S = D^-1/2 W D^-1/2`,
/// then takes the per-row argmax. Neighbours tied with the k-th best
/// similarity are all kept, which makes the graph independent of input
/// order. Rows with no mass, or an exact tie, come back unlabeled.
pub fn label_spread(
    vectors: &[Vec<f64>],
    labels: &[Label],
    params: &SpreadParams,
) -> Result<Vec<Label>> {
    let n = vectors.len();
    if labels.len() != n {
        return Err(Error::invalid(format!(
            "{n} vectors but {} labels",
            labels.len()
        )));
    }
    if params.k == 0 || params.k >= n {
        return Err(Error::invalid(format!(
            "k must be in 1..{n}, got {}",
            params.k
        )));
    }
    if !(params.alpha > 0.0 && params.alpha < 1.0) {
        return Err(Error::invalid(format!(
            "alpha must be in (0, 1), got {}",
            params.alpha
        )));
    }
    if !labels.contains(&Label::Yes) || !labels.contains(&Label::No) {
        return Err(Error::Training(
            "label spreading needs at least one yes and one no seed".into(),
        ));
    }
    if let Some(v) = vectors.iter().find(|v| v.len() != vectors[0].len()) {
        return Err(Error::DimensionMismatch {
            expected: format!("{} features", vectors[0].len()),
            actual: format!("{} features", v.len()),
        });
    }

    let mut sim = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let s = cosine(&vectors[i], &vectors[j]).max(0.0);
            sim[i * n + j] = s;
            sim[j * n + i] = s;
        }
    }

    let mut w = vec![0.0; n * n];
    for i in 0..n {
        let mut row: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| sim[i * n + j]).collect();
        row.sort_by(|a, b| b.total_cmp(a));
        let cutoff = row[params.k - 1];
        for j in (0..n).filter(|&j| j != i) {
            let s = sim[i * n + j];
            if s > 0.0 && s >= cutoff {
                w[i * n + j] = s;
                w[j * n + i] = s;
            }
        }
    }

    let inv_sqrt_deg: Vec<f64> = (0..n)
        .map(|i| {
            let d: f64 = w[i * n..(i + 1) * n].iter().sum();
            if d > 0.0 {
                1.0 / d.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    for i in 0..n {
        for j in 0..n {
            w[i * n + j] *= inv_sqrt_deg[i] * inv_sqrt_deg[j];
        }
    }

    // Columns: [no, yes].
    let seeds: Vec<[f64; 2]> = labels
        .iter()
        .map(|l| match l {
            Label::No => [1.0, 0.0],
            Label::Yes => [0.0, 1.0],
            Label::Unlabeled => [0.0, 0.0],
        })
        .collect();
    let mut f = seeds.clone();
    for _ in 0..params.iters {
        let next: Vec<[f64; 2]> = (0..n)
            .map(|i| {
                let mut acc = [0.0; 2];
                for j in 0..n {
                    let s = w[i * n + j];
                    if s != 0.0 {
                        acc[0] += s * f[j][0];
                        acc[1] += s * f[j][1];
                    }
                }
                [
                    params.alpha * acc[0] + (1.0 - params.alpha) * seeds[i][0],
                    params.alpha * acc[1] + (1.0 - params.alpha) * seeds[i][1],
                ]
            })
            .collect();
        f = next;
    }

    Ok(f.iter()
        .map(|&[no, yes]| {
            if yes > no {
                Label::Yes
            } else if no > yes {
                Label::No
            } else {
                Label::Unlabeled
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn clusters() -> (Vec<Vec<f64>>, Vec<Label>) {
        let mut v = Vec::new();
        let mut l = Vec::new();
        for i in 0..6 {
            v.push(vec![1.0, 0.05 * i as f64, 0.0]);
            l.push(if i == 0 { Label::No } else { Label::Unlabeled });
        }
        for i in 0..6 {
            v.push(vec![0.0, 0.05 * i as f64, 1.0]);
            l.push(if i == 3 { Label::Yes } else { Label::Unlabeled });
        }
        (v, l)
    }

    /// Dense reference: explicit matrices, same graph construction.
    fn oracle(vectors: &[Vec<f64>], labels: &[Label], p: &SpreadParams) -> Vec<[f64; 2]> {
        let n = vectors.len();
        let cos = |a: &[f64], b: &[f64]| {
            let d: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
            (d / (na * nb)).max(0.0)
        };
        let mut knn = vec![vec![false; n]; n];
        for i in 0..n {
            let mut s: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (cos(&vectors[i], &vectors[j]), j))
                .collect();
            s.sort_by(|a, b| b.0.total_cmp(&a.0));
            let cut = s[p.k - 1].0;
            for (v, j) in s {
                if v >= cut && v > 0.0 {
                    knn[i][j] = true;
                }
            }
        }
        let w: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if knn[i][j] || knn[j][i] {
                            cos(&vectors[i], &vectors[j])
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        let d: Vec<f64> = w.iter().map(|r| r.iter().sum()).collect();
        let y: Vec<[f64; 2]> = labels
            .iter()
            .map(|l| match l {
                Label::No => [1.0, 0.0],
                Label::Yes => [0.0, 1.0],
                Label::Unlabeled => [0.0, 0.0],
            })
            .collect();
        let mut f = y.clone();
        for _ in 0..p.iters {
            f = (0..n)
                .map(|i| {
                    let mut r = [0.0; 2];
                    for c in 0..2 {
                        let sf: f64 = (0..n)
                            .map(|j| w[i][j] / (d[i] * d[j]).sqrt() * f[j][c])
                            .sum();
                        r[c] = p.alpha * sf + (1.0 - p.alpha) * y[i][c];
                    }
                    r
                })
                .collect();
        }
        f
    }

    #[test]
    fn clusters_take_their_seed_label() {
        let (v, l) = clusters();
        let p = SpreadParams {
            k: 3,
            alpha: 0.9,
            iters: 100,
        };
        let out = label_spread(&v, &l, &p).unwrap();
        assert!(out[..6].iter().all(|&x| x == Label::No), "{out:?}");
        assert!(out[6..].iter().all(|&x| x == Label::Yes), "{out:?}");
        let f = oracle(&v, &l, &p);
        for (got, row) in out.iter().zip(&f) {
            let want = if row[1] > row[0] {
                Label::Yes
            } else {
                Label::No
            };
            assert_eq!(*got, want);
        }
    }

    #[test]
    fn small_alpha_keeps_seeds() {
        let (v, l) = clusters();
        let out = label_spread(
            &v,
            &l,
            &SpreadParams {
                k: 3,
                alpha: 1e-9,
                iters: 10,
            },
        )
        .unwrap();
        assert_eq!(out[0], Label::No);
        assert_eq!(out[9], Label::Yes);
    }

    #[test]
    fn rejects_bad_params() {
        let (v, l) = clusters();
        for p in [
            SpreadParams {
                k: 0,
                ..SpreadParams::default()
            },
            SpreadParams {
                k: 12,
                ..SpreadParams::default()
            },
            SpreadParams {
                alpha: 0.0,
                ..SpreadParams::default()
            },
            SpreadParams {
                alpha: 1.0,
                ..SpreadParams::default()
            },
        ] {
            assert!(label_spread(&v, &l, &p).is_err());
        }
        let only_no: Vec<Label> = l
            .iter()
            .map(|&x| if x == Label::Yes { Label::Unlabeled } else { x })
            .collect();
        assert!(label_spread(&v, &only_no, &SpreadParams::default()).is_err());
        assert!(label_spread(&v, &l[1..], &SpreadParams::default()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn permutation_invariant(
            points in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 3), 6..14),
            rot in 1usize..13,
        ) {
            let n = points.len();
            let mut labels = vec![Label::Unlabeled; n];
            labels[0] = Label::No;
            labels[n - 1] = Label::Yes;
            let p = SpreadParams { k: 2, alpha: 0.5, iters: 20 };
            let base = label_spread(&points, &labels, &p).unwrap();
            let perm: Vec<usize> = (0..n).map(|i| (i + rot) % n).rev().collect();
            let pv: Vec<Vec<f64>> = perm.iter().map(|&i| points[i].clone()).collect();
            let pl: Vec<Label> = perm.iter().map(|&i| labels[i]).collect();
            let out = label_spread(&pv, &pl, &p).unwrap();
            for (pos, &i) in perm.iter().enumerate() {
                prop_assert_eq!(out[pos], base[i]);
            }
        }
    }
}
