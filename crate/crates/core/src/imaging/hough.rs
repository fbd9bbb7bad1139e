use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::EdgeRaster;
use crate::{Error, Result};

/// A line in Hough space: `rho = x cos(theta) + y sin(theta)`, with the
/// origin at the top-left pixel and `theta` in `[0, pi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarLine {
    pub rho: f64,
    pub theta: f64,
}

/// An accumulator cell at or above the vote threshold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoughPeak {
    pub line: PolarLine,
    pub votes: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoughParams {
    pub rho_res: f64,
    pub theta_res: f64,
    pub votes_threshold: u32,
}

impl Default for HoughParams {
    fn default() -> Self {
        Self {
            rho_res: 1.0,
            theta_res: PI / 180.0,
            votes_threshold: 400,
        }
    }
}

impl HoughParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho_res > 0.0) || !self.rho_res.is_finite() {
            return Err(Error::invalid(format!(
                "rho_res must be positive, got {}",
                self.rho_res
            )));
        }
        if !(self.theta_res > 0.0) || !(self.theta_res < PI) {
            return Err(Error::invalid(format!(
                "theta_res must be in (0, pi), got {}",
                self.theta_res
            )));
        }
        if self.votes_threshold == 0 {
            return Err(Error::invalid("votes_threshold must be at least 1"));
        }
        Ok(())
    }
}

/// Number of angle bins `k` with `k * theta_res < pi`.
pub fn theta_bin_count(theta_res: f64) -> usize {
    (((PI / theta_res) - 1e-9).ceil() as usize).max(1)
}

/// Standard Hough transform.
///
/// Every edge pixel votes once per angle bin into the rho bin
/// `round(rho / rho_res)`. Cells with at least `votes_threshold` votes are
/// returned at their bin centres, sorted by votes (descending) and then by
/// `(rho, theta)` ascending.
pub fn hough_lines(edges: &EdgeRaster, params: &HoughParams) -> Result<Vec<HoughPeak>> {
    params.validate()?;
    let (w, h) = (edges.width() as f64, edges.height() as f64);
    let diagonal = w.hypot(h);
    let rho_half = (diagonal / params.rho_res).ceil() as i64;
    let n_rho = (2 * rho_half + 1) as usize;
    let n_theta = theta_bin_count(params.theta_res);

    let trig: Vec<(f64, f64)> = (0..n_theta)
        .map(|k| {
            let theta = k as f64 * params.theta_res;
            (theta.cos(), theta.sin())
        })
        .collect();

    let mut acc = vec![0u32; n_theta * n_rho];
    for (x, y) in edges.points() {
        let (x, y) = (x as f64, y as f64);
        for (k, &(c, s)) in trig.iter().enumerate() {
            let rho = x * c + y * s;
            let bin = (rho / params.rho_res).round() as i64 + rho_half;
            acc[k * n_rho + bin as usize] += 1;
        }
    }

    let mut peaks: Vec<HoughPeak> = acc
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= params.votes_threshold)
        .map(|(i, &votes)| {
            let (k, j) = (i / n_rho, i % n_rho);
            let rho = ((j as i64 - rho_half) as f64 * params.rho_res).clamp(-diagonal, diagonal);
            HoughPeak {
                line: PolarLine {
                    rho,
                    theta: k as f64 * params.theta_res,
                },
                votes,
            }
        })
        .collect();
    peaks.sort_by(|a, b| {
        b.votes
            .cmp(&a.votes)
            .then(a.line.rho.total_cmp(&b.line.rho))
            .then(a.line.theta.total_cmp(&b.line.theta))
    });
    Ok(peaks)
}
