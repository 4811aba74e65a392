//! Spectral-residual saliency.
//!
//! The log-amplitude spectrum of a small working image is compared against its
//! local 3x3 average; what remains, recombined with the original phase and
//! transformed back, marks statistically unexpected regions.

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fft::{dft2d, Direction};
use super::filters::{box3, convolve_separable, gaussian_kernel, resize_bilinear};
use crate::error::{Error, Result};
use crate::types::{normalize_map, Image, SaliencyMap};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralResidualParams {
    /// Side of the square working image.
    pub working_size: usize,
    pub blur_sigma: f64,
    pub log_epsilon: f64,
}

impl Default for SpectralResidualParams {
    fn default() -> Self {
        Self {
            working_size: 64,
            blur_sigma: 2.5,
            log_epsilon: 1e-8,
        }
    }
}

pub fn spectral_residual(gray: &Image, params: &SpectralResidualParams) -> Result<SaliencyMap> {
    if gray.channels() != 1 {
        return Err(Error::UnsupportedFormat(format!(
            "spectral-residual detector needs a single-channel image, got {} channels",
            gray.channels()
        )));
    }
    if params.working_size == 0 {
        return Err(Error::InvalidArgument(
            "working size must be positive".into(),
        ));
    }
    let (w, h) = (gray.width(), gray.height());
    let px = gray.pixels();
    // A flat image has a DC-only spectrum; the log floor would turn rounding
    // noise in the empty bins into structure, so short-circuit to the
    // all-zero map.
    if px.iter().all(|&v| v == px[0]) {
        return normalize_map(w, h, &vec![0.0; w * h]);
    }

    let n = params.working_size;
    let field: Vec<f64> = px.iter().map(|&v| v as f64).collect();
    let work = resize_bilinear(&field, w, h, n, n);

    let mut spectrum: Vec<Complex64> = work.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    dft2d(&mut spectrum, n, n, Direction::Forward)?;

    let log_amp: Vec<f64> = spectrum
        .iter()
        .map(|c| (c.norm() + params.log_epsilon).ln())
        .collect();
    let smoothed = box3(&log_amp, n, n);
    let mut residual: Vec<Complex64> = spectrum
        .iter()
        .zip(log_amp.iter().zip(&smoothed))
        .map(|(c, (&l, &s))| Complex64::from_polar((l - s).exp(), c.arg()))
        .collect();
    dft2d(&mut residual, n, n, Direction::Inverse)?;

    let energy: Vec<f64> = residual.iter().map(|c| c.norm_sqr()).collect();
    let blurred = convolve_separable(&energy, n, n, &gaussian_kernel(params.blur_sigma));
    let full = resize_bilinear(&blurred, n, n, w, h);
    normalize_map(w, h, &full)
}
