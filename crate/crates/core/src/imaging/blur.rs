use super::GrayRaster;
use crate::{Error, Result};

/// Fixed-point weight scale; kernel taps sum to roughly this value. Small
/// enough that both passes and a Sobel on top stay within `i32`.
const WEIGHT_SCALE: f64 = 1024.0;

/// Integer Gaussian taps for radius `ceil(3 sigma)`.
///
/// Integer weights keep the convolution exactly linear, so adding a constant
/// to the input adds exactly `constant * sum^2` to the 2-D result.
pub(crate) struct Kernel {
    pub taps: Vec<i32>,
    pub radius: usize,
    pub sum: i32,
}

impl Kernel {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::invalid(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        let radius = (3.0 * sigma).ceil() as usize;
        let raw: Vec<f64> = (0..=2 * radius)
            .map(|i| {
                let d = i as f64 - radius as f64;
                (-d * d / (2.0 * sigma * sigma)).exp()
            })
            .collect();
        let total: f64 = raw.iter().sum();
        let taps: Vec<i32> = raw
            .iter()
            .map(|g| ((g / total) * WEIGHT_SCALE).round() as i32)
            .collect();
        let sum = taps.iter().sum();
        Ok(Self { taps, radius, sum })
    }
}

/// Separable convolution with edge-clamp borders. Output values carry a
/// scale of `kernel.sum^2`.
pub(crate) fn convolve_fixed(img: &GrayRaster, kernel: &Kernel) -> Vec<i32> {
    let (w, h) = (img.width(), img.height());
    let src = img.as_bytes();
    let r = kernel.radius as isize;
    let clamp = |v: isize, hi: usize| v.clamp(0, hi as isize - 1) as usize;

    let mut horiz = vec![0i32; w * h];
    let taps = &kernel.taps;
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        let out = &mut horiz[y * w..(y + 1) * w];
        for (x, o) in out.iter_mut().enumerate() {
            let lo = x as isize - r;
            let hi = x as isize + r;
            *o = if lo >= 0 && (hi as usize) < w {
                let window = &row[lo as usize..=hi as usize];
                taps.iter()
                    .zip(window)
                    .map(|(&t, &v)| t * i32::from(v))
                    .sum()
            } else {
                taps.iter()
                    .enumerate()
                    .map(|(k, &t)| t * i32::from(row[clamp(lo + k as isize, w)]))
                    .sum()
            };
        }
    }

    let mut out = vec![0i32; w * h];
    for y in 0..h {
        for (k, &t) in kernel.taps.iter().enumerate() {
            let sy = clamp(y as isize + k as isize - r, h);
            let src_row = &horiz[sy * w..(sy + 1) * w];
            let dst_row = &mut out[y * w..(y + 1) * w];
            for (d, &s) in dst_row.iter_mut().zip(src_row) {
                *d += t * s;
            }
        }
    }
    out
}

/// Gaussian smoothing with kernel radius `ceil(3 sigma)` and edge-clamp borders.
pub fn gaussian_blur(img: &GrayRaster, sigma: f64) -> Result<GrayRaster> {
    let kernel = Kernel::gaussian(sigma)?;
    let scale = kernel.sum * kernel.sum;
    let data = convolve_fixed(img, &kernel)
        .into_iter()
        .map(|v| ((v + scale / 2) / scale).clamp(0, 255) as u8)
        .collect();
    GrayRaster::new(img.width(), img.height(), data)
}
