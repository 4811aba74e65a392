//! Frequency-tuned saliency: distance of each lightly blurred CIELAB pixel
//! from the image's mean color.

use std::sync::OnceLock;

use super::filters::convolve_separable;
use crate::error::{Error, Result};
use crate::types::{normalize_map, Image, SaliencyMap};

const BINOMIAL5: [f64; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];

// D65 reference white
const XN: f64 = 0.950_47;
const YN: f64 = 1.0;
const ZN: f64 = 1.088_83;

fn srgb_to_linear_table() -> &'static [f64; 256] {
    static TABLE: OnceLock<[f64; 256]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; 256];
        for (i, v) in t.iter_mut().enumerate() {
            let c = i as f64 / 255.0;
            *v = if c <= 0.04045 {
                c / 12.92
            } else {
                ((c + 0.055) / 1.055).powf(2.4)
            };
        }
        t
    })
}

fn lab_f(t: f64) -> f64 {
    const DELTA: f64 = 6.0 / 29.0;
    if t > DELTA * DELTA * DELTA {
        t.cbrt()
    } else {
        t / (3.0 * DELTA * DELTA) + 4.0 / 29.0
    }
}

/// sRGB (8-bit, D65) to CIELAB.
pub fn srgb_to_lab(rgb: [u8; 3]) -> [f64; 3] {
    let lut = srgb_to_linear_table();
    let (r, g, b) = (
        lut[rgb[0] as usize],
        lut[rgb[1] as usize],
        lut[rgb[2] as usize],
    );
    let x = 0.412_456_4 * r + 0.357_576_1 * g + 0.180_437_5 * b;
    let y = 0.212_672_9 * r + 0.715_152_2 * g + 0.072_175_0 * b;
    let z = 0.019_333_9 * r + 0.119_192_0 * g + 0.950_304_1 * b;
    let (fx, fy, fz) = (lab_f(x / XN), lab_f(y / YN), lab_f(z / ZN));
    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

pub fn frequency_tuned(img: &Image) -> Result<SaliencyMap> {
    if img.channels() != 3 {
        return Err(Error::UnsupportedFormat(format!(
            "frequency-tuned detector is defined on color images, got {} channel(s)",
            img.channels()
        )));
    }
    let (w, h) = (img.width(), img.height());
    let n = w * h;
    let mut planes = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for (i, p) in img.pixels().chunks_exact(3).enumerate() {
        let lab = srgb_to_lab([p[0], p[1], p[2]]);
        for c in 0..3 {
            planes[c][i] = lab[c];
        }
    }
    let mean: Vec<f64> = planes
        .iter()
        .map(|p| p.iter().sum::<f64>() / n as f64)
        .collect();
    let blurred: Vec<Vec<f64>> = planes
        .iter()
        .map(|p| convolve_separable(p, w, h, &BINOMIAL5))
        .collect();
    let raw: Vec<f64> = (0..n)
        .map(|i| {
            (0..3)
                .map(|c| {
                    let d = blurred[c][i] - mean[c];
                    d * d
                })
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    normalize_map(w, h, &raw)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lab_reference_colors() {
        let white = srgb_to_lab([255, 255, 255]);
        assert!((white[0] - 100.0).abs() < 0.01 && white[1].abs() < 0.01 && white[2].abs() < 0.01);
        let black = srgb_to_lab([0, 0, 0]);
        assert!(black.iter().all(|v| v.abs() < 1e-9));
        // sRGB red is about (53.24, 80.09, 67.20)
        let red = srgb_to_lab([255, 0, 0]);
        assert!((red[0] - 53.24).abs() < 0.05, "{red:?}");
        assert!((red[1] - 80.09).abs() < 0.05, "{red:?}");
        assert!((red[2] - 67.20).abs() < 0.05, "{red:?}");
    }

    #[test]
    fn constant_color_gives_zeros() {
        let img = Image::from_fn_rgb(17, 9, |_, _| [12, 200, 77]).unwrap();
        let m = frequency_tuned(&img).unwrap();
        assert!(m.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rejects_gray() {
        let img = Image::filled(4, 4, 1, 0).unwrap();
        assert!(matches!(
            frequency_tuned(&img),
            Err(Error::UnsupportedFormat(_))
        ));
    }
}
