use super::{GrayRaster, RgbRaster};

/// BT.601 luma: `round(0.299 R + 0.587 G + 0.114 B)`.
pub fn to_grayscale(img: &RgbRaster) -> GrayRaster {
    let data = img
        .pixels()
        .map(|[r, g, b]| {
            let y = 0.299 * f64::from(r) + 0.587 * f64::from(g) + 0.114 * f64::from(b);
            y.round().clamp(0.0, 255.0) as u8
        })
        .collect();
    GrayRaster::new(img.width(), img.height(), data).expect("dimensions preserved")
}

/// Replicates the single channel into R, G and B.
pub fn gray_to_rgb(img: &GrayRaster) -> RgbRaster {
    let data = img.as_bytes().iter().flat_map(|&v| [v, v, v]).collect();
    RgbRaster::new(img.width(), img.height(), data).expect("dimensions preserved")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn one(rgb: [u8; 3]) -> u8 {
        to_grayscale(&RgbRaster::new(1, 1, rgb.to_vec()).unwrap()).get(0, 0)
    }

    #[test]
    fn luma_examples() {
        assert_eq!(one([255, 255, 255]), 255);
        assert_eq!(one([0, 0, 0]), 0);
        // 0.299 * 255 = 76.245
        assert_eq!(one([255, 0, 0]), 76);
        // 0.587 * 255 = 149.685
        assert_eq!(one([0, 255, 0]), 150);
        // 0.114 * 255 = 29.07
        assert_eq!(one([0, 0, 255]), 29);
    }

    proptest! {
        #[test]
        fn gray_round_trip_is_identity(w in 1usize..8, h in 1usize..8, seed in any::<u64>()) {
            let data: Vec<u8> = (0..w * h).map(|i| (seed.wrapping_mul(i as u64 + 7) >> 13) as u8).collect();
            let gray = GrayRaster::new(w, h, data).unwrap();
            let back = to_grayscale(&gray_to_rgb(&gray));
            prop_assert_eq!(back, gray);
        }
    }
}
