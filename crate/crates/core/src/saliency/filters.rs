//! Resampling and smoothing on row-major `f64` fields. All borders replicate
//! the edge sample.

/// Bilinear resize with pixel-center alignment. Same-size resizing is exact.
pub fn resize_bilinear(src: &[f64], sw: usize, sh: usize, dw: usize, dh: usize) -> Vec<f64> {
    if sw == dw && sh == dh {
        return src.to_vec();
    }
    let xs: Vec<(usize, usize, f64)> = (0..dw).map(|x| sample_coord(x, sw, dw)).collect();
    let ys: Vec<(usize, usize, f64)> = (0..dh).map(|y| sample_coord(y, sh, dh)).collect();
    let mut out = Vec::with_capacity(dw * dh);
    for &(y0, y1, ty) in &ys {
        for &(x0, x1, tx) in &xs {
            let top = src[y0 * sw + x0] * (1.0 - tx) + src[y0 * sw + x1] * tx;
            let bottom = src[y1 * sw + x0] * (1.0 - tx) + src[y1 * sw + x1] * tx;
            out.push(top * (1.0 - ty) + bottom * ty);
        }
    }
    out
}

fn sample_coord(dst: usize, src_len: usize, dst_len: usize) -> (usize, usize, f64) {
    let pos = ((dst as f64 + 0.5) * src_len as f64 / dst_len as f64 - 0.5)
        .clamp(0.0, (src_len - 1) as f64);
    let i0 = pos.floor() as usize;
    let i1 = (i0 + 1).min(src_len - 1);
    (i0, i1, pos - i0 as f64)
}

/// Separable convolution with a symmetric odd-length kernel.
pub fn convolve_separable(src: &[f64], w: usize, h: usize, kernel: &[f64]) -> Vec<f64> {
    debug_assert!(kernel.len() % 2 == 1);
    let r = (kernel.len() / 2) as isize;
    let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;

    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &kv) in kernel.iter().enumerate() {
                acc += kv * row[clamp(x as isize + k as isize - r, w)];
            }
            tmp[y * w + x] = acc;
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &kv) in kernel.iter().enumerate() {
                acc += kv * tmp[clamp(y as isize + k as isize - r, h) * w + x];
            }
            out[y * w + x] = acc;
        }
    }
    out
}

/// Normalized Gaussian taps with radius `ceil(3 * sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return vec![1.0];
    }
    let r = (3.0 * sigma).ceil() as isize;
    let taps: Vec<f64> = (-r..=r)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.into_iter().map(|t| t / sum).collect()
}

/// 3x3 mean filter.
pub fn box3(src: &[f64], w: usize, h: usize) -> Vec<f64> {
    convolve_separable(src, w, h, &[1.0 / 3.0; 3])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_resize_is_exact() {
        let src: Vec<f64> = (0..12).map(|v| v as f64 * 0.37).collect();
        assert_eq!(resize_bilinear(&src, 4, 3, 4, 3), src);
    }

    #[test]
    fn downsample_by_two_averages_pairs() {
        let src = vec![0.0, 2.0, 4.0, 6.0];
        let out = resize_bilinear(&src, 4, 1, 2, 1);
        assert_eq!(out, vec![1.0, 5.0]);
    }

    #[test]
    fn upsample_constant_stays_constant() {
        let out = resize_bilinear(&[3.5; 4], 2, 2, 7, 5);
        assert!(out.iter().all(|&v| (v - 3.5).abs() < 1e-12));
    }

    #[test]
    fn gaussian_kernel_sums_to_one() {
        let k = gaussian_kernel(2.5);
        assert_eq!(k.len(), 17);
        assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(k[8] > k[7]);
    }

    #[test]
    fn box3_replicates_edges() {
        // 3x1 row [0, 3, 6]: left edge sees (0,0,3), right edge (3,6,6)
        let out = box3(&[0.0, 3.0, 6.0], 3, 1);
        assert!((out[0] - 1.0).abs() < 1e-12);
        assert!((out[1] - 3.0).abs() < 1e-12);
        assert!((out[2] - 5.0).abs() < 1e-12);
    }
}
