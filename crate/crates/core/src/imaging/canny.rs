use serde::{Deserialize, Serialize};

use super::blur::{convolve_fixed, Kernel};
use super::{EdgeRaster, GrayRaster};
use crate::{Error, Result};

const CANNY_SIGMA: f64 = 1.4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CannyParams {
    pub low: f64,
    pub high: f64,
}

impl Default for CannyParams {
    fn default() -> Self {
        Self {
            low: 50.0,
            high: 150.0,
        }
    }
}

/// Canny edge detector.
///
/// Steps: Gaussian blur (sigma 1.4), 3x3 Sobel gradients, non-maximum
/// suppression along one of four quantized gradient directions, then
/// double-threshold hysteresis with 8-connectivity. Magnitudes are on the
/// plain Sobel scale (a hard 0 to 255 step peaks a little above 1000 before
/// smoothing). The one-pixel image border never carries an edge.
///
/// Along the gradient a pixel survives suppression when it is strictly greater
/// than its backward neighbour and not less than its forward neighbour, so a
/// symmetric plateau of two equal maxima yields a single edge pixel.
pub fn canny_edges(img: &GrayRaster, low: f64, high: f64) -> Result<EdgeRaster> {
    if !(low >= 0.0) || !(low <= high) {
        return Err(Error::invalid(format!(
            "canny thresholds must satisfy 0 <= low <= high, got low={low} high={high}"
        )));
    }
    let (w, h) = (img.width(), img.height());
    let mut edges = EdgeRaster::empty(w, h)?;
    if w < 3 || h < 3 {
        return Ok(edges);
    }

    let kernel = Kernel::gaussian(CANNY_SIGMA)?;
    let scale = f64::from(kernel.sum * kernel.sum);
    let smooth = convolve_fixed(img, &kernel);

    // Squared gradient magnitudes stay exact in i64.
    let mut gx = vec![0i32; w * h];
    let mut gy = vec![0i32; w * h];
    let mut mag2 = vec![0i64; w * h];
    for y in 0..h {
        let up = &smooth[y.saturating_sub(1) * w..][..w];
        let mid = &smooth[y * w..][..w];
        let down = &smooth[(y + 1).min(h - 1) * w..][..w];
        let row = y * w;
        let mut put = |x: usize, xm: usize, xp: usize| {
            let dx = (up[xp] + 2 * mid[xp] + down[xp]) - (up[xm] + 2 * mid[xm] + down[xm]);
            let dy = (down[xm] + 2 * down[x] + down[xp]) - (up[xm] + 2 * up[x] + up[xp]);
            gx[row + x] = dx;
            gy[row + x] = dy;
            mag2[row + x] = i64::from(dx) * i64::from(dx) + i64::from(dy) * i64::from(dy);
        };
        put(0, 0, 1);
        for x in 1..w - 1 {
            put(x, x - 1, x + 1);
        }
        put(w - 1, w - 2, w - 1);
    }

    // Non-maximum suppression; interior only.
    let mut thin = vec![0i64; w * h];
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let i = y * w + x;
            let m = mag2[i];
            if m == 0 {
                continue;
            }
            let (back, fwd) = match direction(gx[i], gy[i]) {
                Direction::Horizontal => (i - 1, i + 1),
                Direction::Vertical => (i - w, i + w),
                Direction::Diagonal => (i - w - 1, i + w + 1),
                Direction::AntiDiagonal => (i - w + 1, i + w - 1),
            };
            if m > mag2[back] && m >= mag2[fwd] {
                thin[i] = m;
            }
        }
    }

    // Hysteresis, on squared magnitudes.
    let low2 = (low * scale).powi(2);
    let high2 = (high * scale).powi(2);
    let mut stack = Vec::new();
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let i = y * w + x;
            if thin[i] > 0 && thin[i] as f64 >= high2 && !edges.get(x, y) {
                edges.set(x, y, true);
                stack.push((x, y));
                while let Some((cx, cy)) = stack.pop() {
                    for ny in cy - 1..=cy + 1 {
                        for nx in cx - 1..=cx + 1 {
                            if nx == 0 || ny == 0 || nx == w - 1 || ny == h - 1 {
                                continue;
                            }
                            let v = thin[ny * w + nx];
                            if v > 0 && v as f64 >= low2 && !edges.get(nx, ny) {
                                edges.set(nx, ny, true);
                                stack.push((nx, ny));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(edges)
}

enum Direction {
    /// Gradient along x: compare left/right.
    Horizontal,
    /// Gradient along y: compare up/down.
    Vertical,
    /// Gradient along (1, 1) in image coordinates.
    Diagonal,
    /// Gradient along (1, -1).
    AntiDiagonal,
}

/// Quantizes the gradient angle to the nearest multiple of 45 degrees.
fn direction(gx: i32, gy: i32) -> Direction {
    // tan(22.5 deg) and tan(67.5 deg)
    const TAN_LO: f64 = 0.414_213_562_373_095_03;
    const TAN_HI: f64 = 2.414_213_562_373_095;
    let ax = f64::from(gx).abs();
    let ay = f64::from(gy).abs();
    if ay < ax * TAN_LO {
        Direction::Horizontal
    } else if ay >= ax * TAN_HI {
        Direction::Vertical
    } else if (gx > 0) == (gy > 0) {
        Direction::Diagonal
    } else {
        Direction::AntiDiagonal
    }
}
