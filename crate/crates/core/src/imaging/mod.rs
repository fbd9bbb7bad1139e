//! Pixel-level primitives: grayscale conversion, Gaussian smoothing, Canny
//! edge detection and the Hough line transform.
//!
//! Everything here is a pure function over in-memory rasters.

mod blur;
mod canny;
mod gray;
mod hough;
mod raster;

pub use blur::gaussian_blur;
pub use canny::{canny_edges, CannyParams};
pub use gray::{gray_to_rgb, to_grayscale};
pub use hough::{hough_lines, theta_bin_count, HoughParams, HoughPeak, PolarLine};
pub use raster::{EdgeRaster, GrayRaster, RgbRaster};
