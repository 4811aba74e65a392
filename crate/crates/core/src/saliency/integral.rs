//! Summed-area tables.

use crate::error::{Error, Result};
use crate::types::Image;

/// Summed-area table one row and one column larger than its source:
/// `at(x, y)` is the sum of all source pixels strictly above and to the left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralImage {
    width: usize,
    height: usize,
    table: Vec<u64>,
}

impl IntegralImage {
    pub fn new(gray: &Image) -> Result<Self> {
        if gray.channels() != 1 {
            return Err(Error::UnsupportedFormat(format!(
                "integral image needs a single-channel image, got {} channels",
                gray.channels()
            )));
        }
        let (w, h) = (gray.width(), gray.height());
        let stride = w + 1;
        let mut table = vec![0u64; stride * (h + 1)];
        let src = gray.pixels();
        for y in 0..h {
            let mut row_sum = 0u64;
            for x in 0..w {
                row_sum += src[y * w + x] as u64;
                table[(y + 1) * stride + x + 1] = table[y * stride + x + 1] + row_sum;
            }
        }
        Ok(Self {
            width: w,
            height: h,
            table,
        })
    }

    /// Source dimensions.
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// Table entry at column `x`, row `y`, both in `0..=W` / `0..=H`.
    pub fn at(&self, x: usize, y: usize) -> u64 {
        self.table[y * (self.width + 1) + x]
    }

    /// Sum over the inclusive pixel window `[x0, x1] x [y0, y1]`.
    pub fn window_sum(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> u64 {
        debug_assert!(x0 <= x1 && y0 <= y1 && x1 < self.width && y1 < self.height);
        self.at(x1 + 1, y1 + 1) + self.at(x0, y0) - self.at(x1 + 1, y0) - self.at(x0, y1 + 1)
    }

    /// Mean over the square window of `radius` around `(x, y)`, clipped to the
    /// image and divided by the clipped pixel count.
    pub fn clipped_mean(&self, x: usize, y: usize, radius: usize) -> f64 {
        let x0 = x.saturating_sub(radius);
        let y0 = y.saturating_sub(radius);
        let x1 = (x + radius).min(self.width - 1);
        let y1 = (y + radius).min(self.height - 1);
        let count = ((x1 - x0 + 1) * (y1 - y0 + 1)) as f64;
        self.window_sum(x0, y0, x1, y1) as f64 / count
    }
}

pub fn integral_image(gray: &Image) -> Result<IntegralImage> {
    IntegralImage::new(gray)
}
