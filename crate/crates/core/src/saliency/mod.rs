//! Bottom-up saliency detectors and extremum localization.

pub mod fft;
pub mod filters;
pub mod fine_grained;
pub mod frequency_tuned;
pub mod integral;
pub mod spectral;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Image, SaliencyMap};

pub use fine_grained::{fine_grained, DEFAULT_SCALES};
pub use frequency_tuned::frequency_tuned;
pub use integral::{integral_image, IntegralImage};
pub use spectral::{spectral_residual, SpectralResidualParams};

/// Detector identifier as it appears in manifests and on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodTag {
    FineGrained,
    SpectralResidual,
    FrequencyTuned,
}

impl MethodTag {
    pub const ALL: [MethodTag; 3] = [
        MethodTag::FineGrained,
        MethodTag::SpectralResidual,
        MethodTag::FrequencyTuned,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MethodTag::FineGrained => "fine_grained",
            MethodTag::SpectralResidual => "spectral_residual",
            MethodTag::FrequencyTuned => "frequency_tuned",
        }
    }
}

impl fmt::Display for MethodTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MethodTag::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown saliency method `{s}`")))
    }
}

/// A detector together with its tunables.
#[derive(Debug, Clone, PartialEq)]
pub enum SaliencyMethod {
    FineGrained { scales: Vec<usize> },
    SpectralResidual(SpectralResidualParams),
    FrequencyTuned,
}

impl SaliencyMethod {
    pub fn tag(&self) -> MethodTag {
        match self {
            SaliencyMethod::FineGrained { .. } => MethodTag::FineGrained,
            SaliencyMethod::SpectralResidual(_) => MethodTag::SpectralResidual,
            SaliencyMethod::FrequencyTuned => MethodTag::FrequencyTuned,
        }
    }
}

impl Default for SaliencyMethod {
    fn default() -> Self {
        MethodTag::FineGrained.into()
    }
}

impl From<MethodTag> for SaliencyMethod {
    fn from(tag: MethodTag) -> Self {
        match tag {
            MethodTag::FineGrained => SaliencyMethod::FineGrained {
                scales: DEFAULT_SCALES.to_vec(),
            },
            MethodTag::SpectralResidual => {
                SaliencyMethod::SpectralResidual(SpectralResidualParams::default())
            }
            MethodTag::FrequencyTuned => SaliencyMethod::FrequencyTuned,
        }
    }
}

impl FromStr for SaliencyMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse::<MethodTag>().map(Into::into)
    }
}

/// Runs `method` on `img`, returning a normalized map at the input resolution.
/// The gray-level detectors convert color input to luma first.
pub fn detect(method: &SaliencyMethod, img: &Image) -> Result<SaliencyMap> {
    match method {
        SaliencyMethod::FineGrained { scales } => fine_grained(&img.to_luma()?, scales),
        SaliencyMethod::SpectralResidual(params) => spectral_residual(&img.to_luma()?, params),
        SaliencyMethod::FrequencyTuned => frequency_tuned(img),
    }
}

/// Pixel coordinate of a map extremum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PeakLocation {
    pub x: usize,
    pub y: usize,
}

impl PeakLocation {
    pub const fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }

    pub fn center_of(width: usize, height: usize) -> Self {
        Self {
            x: width / 2,
            y: height / 2,
        }
    }
}

/// Location of the maximum; first in row-major order on ties, image center
/// for a constant map.
pub fn peak(map: &SaliencyMap) -> PeakLocation {
    extremum(map, |candidate, best| candidate > best)
}

/// Location of the minimum, with the same tie-break and fallback as [`peak`].
pub fn trough(map: &SaliencyMap) -> PeakLocation {
    extremum(map, |candidate, best| candidate < best)
}

fn extremum(map: &SaliencyMap, better: impl Fn(f64, f64) -> bool) -> PeakLocation {
    let (w, h) = (map.width(), map.height());
    if map.is_constant() {
        return PeakLocation::center_of(w, h);
    }
    let values = map.values();
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if better(v, values[best]) {
            best = i;
        }
    }
    PeakLocation {
        x: best % w,
        y: best / w,
    }
}
