//! Multi-scale center-surround contrast on an integral image.
//!
//! For each radius `k` the center mean over a `(2k+1)^2` window is compared
//! against the surround mean over a `(4k+1)^2` window; both on- and off-center
//! responses are summed across scales.

use super::integral::IntegralImage;
use crate::error::{Error, Result};
use crate::types::{normalize_map, Image, SaliencyMap};

pub const DEFAULT_SCALES: [usize; 6] = [1, 2, 3, 4, 5, 6];

/// Center radii actually used on a `w x h` image: radii whose center window
/// would not fit are capped at the largest radius that does, then deduplicated.
pub fn effective_scales(scales: &[usize], w: usize, h: usize) -> Vec<usize> {
    let max_radius = (w.min(h) - 1) / 2;
    let mut out: Vec<usize> = scales
        .iter()
        .map(|&k| k.min(max_radius))
        .filter(|&k| k > 0)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

pub fn fine_grained(gray: &Image, scales: &[usize]) -> Result<SaliencyMap> {
    if gray.channels() != 1 {
        return Err(Error::UnsupportedFormat(format!(
            "fine-grained detector needs a single-channel image, got {} channels",
            gray.channels()
        )));
    }
    let (w, h) = (gray.width(), gray.height());
    let scales = effective_scales(scales, w, h);
    let table = IntegralImage::new(gray)?;
    let mut raw = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for &k in &scales {
                let center = table.clipped_mean(x, y, k);
                let surround = table.clipped_mean(x, y, 2 * k);
                acc += (center - surround).max(0.0) + (surround - center).max(0.0);
            }
            raw[y * w + x] = acc;
        }
    }
    normalize_map(w, h, &raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::saliency::peak;

    #[test]
    fn constant_gives_zeros() {
        let img = Image::filled(20, 15, 1, 131).unwrap();
        let m = fine_grained(&img, &DEFAULT_SCALES).unwrap();
        assert!(m.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_dot_peaks_in_its_neighborhood() {
        let img =
            Image::from_fn_gray(32, 32, |x, y| if (x, y) == (10, 10) { 255 } else { 0 }).unwrap();
        let m = fine_grained(&img, &DEFAULT_SCALES).unwrap();
        // Every pixel within one step of the dot sees it in all center windows,
        // so the 3x3 neighborhood ties up to border clipping of the surround;
        // the least-clipped corner wins.
        let p = peak(&m);
        assert_eq!((p.x, p.y), (11, 11));
        assert!(m.get(10, 10) > 0.99);
    }

    #[test]
    fn scales_shrink_on_small_images() {
        assert_eq!(effective_scales(&DEFAULT_SCALES, 7, 40), vec![1, 2, 3]);
        assert_eq!(
            effective_scales(&DEFAULT_SCALES, 1, 40),
            Vec::<usize>::new()
        );
        assert_eq!(
            effective_scales(&DEFAULT_SCALES, 64, 64),
            DEFAULT_SCALES.to_vec()
        );
    }

    #[test]
    fn tiny_images_do_not_fail() {
        let img = Image::new(1, 3, 1, vec![0, 255, 0]).unwrap();
        let m = fine_grained(&img, &DEFAULT_SCALES).unwrap();
        assert_eq!(m.values(), &[0.0; 3]);
        let img = Image::new(3, 3, 1, vec![0, 0, 0, 0, 255, 0, 0, 0, 0]).unwrap();
        let m = fine_grained(&img, &DEFAULT_SCALES).unwrap();
        // at (1,1) both windows clip to the whole image, so the center scores 0
        assert_eq!(m.get(1, 1), 0.0);
        assert_eq!(m.get(0, 0), 1.0);
    }
}
