//! Saliency-guided cut-and-paste mixing.
//!
//! A combination ratio `lambda ~ U(0,1)` fixes the patch side lengths. The
//! source patch is placed around the source anchor (the peak, or the trough
//! for the non-salient schemes) and translated, never shrunk, to fit inside
//! the image. It is pasted into the target at the same coordinates or around
//! the target anchor, and the label is interpolated by the exact fraction of
//! target pixels that survive.

pub mod batch;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngState;
use crate::saliency::{detect, peak, trough, MethodTag, PeakLocation, SaliencyMethod};
use crate::types::{Image, LabelVector, SaliencyMap};

pub use batch::{augment_batch, augment_batch_with, BatchConfig, BatchSample, Pairing};

/// Axis-aligned pixel rectangle; zero width or height means "no patch".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PatchRect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl PatchRect {
    pub const fn new(x: usize, y: usize, w: usize, h: usize) -> Self {
        Self { x, y, w, h }
    }

    pub fn area(&self) -> usize {
        self.w * self.h
    }

    pub fn is_empty(&self) -> bool {
        self.w == 0 || self.h == 0
    }

    pub fn contains(&self, p: PeakLocation) -> bool {
        p.x >= self.x && p.x < self.x + self.w && p.y >= self.y && p.y < self.y + self.h
    }

    pub fn fits(&self, width: usize, height: usize) -> bool {
        self.x + self.w <= width && self.y + self.h <= height
    }
}

/// Where the patch is cut from and where it lands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Salient source region pasted at the same coordinates in the target.
    Sal2Corr,
    Sal2Sal,
    Sal2NonSal,
    NonSal2Sal,
    NonSal2NonSal,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::Sal2Corr,
        Scheme::Sal2Sal,
        Scheme::Sal2NonSal,
        Scheme::NonSal2Sal,
        Scheme::NonSal2NonSal,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Sal2Corr => "sal2corr",
            Scheme::Sal2Sal => "sal2sal",
            Scheme::Sal2NonSal => "sal2nonsal",
            Scheme::NonSal2Sal => "nonsal2sal",
            Scheme::NonSal2NonSal => "nonsal2nonsal",
        }
    }

    /// Whether the target image's saliency map is consulted.
    pub fn needs_target_map(self) -> bool {
        self != Scheme::Sal2Corr
    }

    /// Whether the source patch is anchored at the source peak (vs. trough).
    pub fn source_salient(self) -> bool {
        matches!(
            self,
            Scheme::Sal2Corr | Scheme::Sal2Sal | Scheme::Sal2NonSal
        )
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown mixing scheme `{s}`")))
    }
}

/// Complete record of one mixing decision.
#[derive(Debug, Clone, PartialEq)]
pub struct MixPlan {
    pub lambda_raw: f64,
    pub lambda_eff: f64,
    pub src_rect: PatchRect,
    pub tgt_rect: PatchRect,
    pub scheme: Scheme,
    pub method: MethodTag,
    pub src_peak: PeakLocation,
    pub tgt_anchor: Option<PeakLocation>,
}

impl MixPlan {
    /// Checks the plan's structural invariants against a `width x height` image.
    pub fn validate(&self, width: usize, height: usize) -> Result<()> {
        let fail = |msg: String| Err(Error::NumericDomain(msg));
        let (s, t) = (self.src_rect, self.tgt_rect);
        if (s.w, s.h) != (t.w, t.h) {
            return fail(format!("source {s:?} and target {t:?} differ in size"));
        }
        if !s.fits(width, height) || !t.fits(width, height) {
            return fail(format!("rects {s:?} / {t:?} exceed {width}x{height}"));
        }
        if !(self.lambda_raw > 0.0 && self.lambda_raw < 1.0) {
            return fail(format!("lambda_raw {} outside (0, 1)", self.lambda_raw));
        }
        if self.lambda_eff != effective_lambda(s.w, s.h, width, height) {
            return fail(format!(
                "lambda_eff {} inconsistent with {}x{} patch",
                self.lambda_eff, s.w, s.h
            ));
        }
        if !s.is_empty() && !s.contains(self.src_peak) {
            return fail(format!(
                "source rect {s:?} misses anchor {:?}",
                self.src_peak
            ));
        }
        if self.scheme == Scheme::Sal2Corr && s != t {
            return fail(format!("sal2corr rects differ: {s:?} vs {t:?}"));
        }
        Ok(())
    }
}

/// Mixed image, interpolated label and the plan that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedSample {
    pub image: Image,
    pub label: LabelVector,
    pub plan: MixPlan,
}

/// One uniform draw; the combination ratio.
pub fn sample_lambda(rng: &mut RngState) -> f64 {
    rng.uniform()
}

/// Patch side lengths covering about `1 - lambda` of a `width x height` image
/// with the image's aspect ratio.
pub fn patch_dims(width: usize, height: usize, lambda: f64) -> Result<(usize, usize)> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::NumericDomain(format!(
            "lambda {lambda} outside [0, 1]"
        )));
    }
    let side = (1.0 - lambda).sqrt();
    let w = ((width as f64 * side).round() as usize).min(width);
    let h = ((height as f64 * side).round() as usize).min(height);
    Ok((w, h))
}

/// `1 - (w*h)/(W*H)`, rounded once from the exact rational.
pub fn effective_lambda(w: usize, h: usize, width: usize, height: usize) -> f64 {
    let total = width * height;
    (total - w * h) as f64 / total as f64
}

/// Centers a `w x h` rect on `anchor`, then slides it inside the image.
/// The rect keeps its size and still covers the anchor.
pub fn place_rect(
    anchor: PeakLocation,
    w: usize,
    h: usize,
    width: usize,
    height: usize,
) -> PatchRect {
    debug_assert!(w <= width && h <= height);
    if w == 0 || h == 0 {
        return PatchRect::new(anchor.x, anchor.y, 0, 0);
    }
    let x = anchor.x.saturating_sub(w / 2).min(width - w);
    let y = anchor.y.saturating_sub(h / 2).min(height - h);
    PatchRect::new(x, y, w, h)
}

/// Source and target anchors for `scheme`. The target anchor is `None` for
/// [`Scheme::Sal2Corr`], which reuses the source rect's coordinates.
pub fn resolve_anchors(
    scheme: Scheme,
    src_map: &SaliencyMap,
    tgt_map: Option<&SaliencyMap>,
) -> Result<(PeakLocation, Option<PeakLocation>)> {
    let src_anchor = if scheme.source_salient() {
        peak(src_map)
    } else {
        trough(src_map)
    };
    let tgt_anchor = match scheme {
        Scheme::Sal2Corr => None,
        _ => {
            let map = tgt_map.ok_or_else(|| {
                Error::MissingInput(format!("scheme {scheme} needs the target saliency map"))
            })?;
            Some(match scheme {
                Scheme::Sal2Sal | Scheme::NonSal2Sal => peak(map),
                _ => trough(map),
            })
        }
    };
    Ok((src_anchor, tgt_anchor))
}

/// Copies `src_rect` of `src` over `tgt_rect` of `tgt`.
pub fn mix_images(
    src: &Image,
    tgt: &Image,
    src_rect: PatchRect,
    tgt_rect: PatchRect,
) -> Result<Image> {
    if !src.same_shape(tgt) {
        return Err(Error::Shape(format!(
            "source {}x{}x{} vs target {}x{}x{}",
            src.width(),
            src.height(),
            src.channels(),
            tgt.width(),
            tgt.height(),
            tgt.channels()
        )));
    }
    let (width, height, c) = (tgt.width(), tgt.height(), tgt.channels());
    if (src_rect.w, src_rect.h) != (tgt_rect.w, tgt_rect.h) {
        return Err(Error::Shape(format!(
            "patch sizes differ: {src_rect:?} vs {tgt_rect:?}"
        )));
    }
    if !src_rect.fits(width, height) || !tgt_rect.fits(width, height) {
        return Err(Error::Shape(format!(
            "patch {src_rect:?} / {tgt_rect:?} outside {width}x{height}"
        )));
    }
    let mut out = tgt.clone();
    let row_bytes = src_rect.w * c;
    let dst = out.pixels_mut();
    for dy in 0..src_rect.h {
        let s = ((src_rect.y + dy) * width + src_rect.x) * c;
        let d = ((tgt_rect.y + dy) * width + tgt_rect.x) * c;
        dst[d..d + row_bytes].copy_from_slice(&src.pixels()[s..s + row_bytes]);
    }
    Ok(out)
}

/// `lambda * y_t + (1 - lambda) * y_s`.
pub fn mix_labels(y_s: &LabelVector, y_t: &LabelVector, lambda_eff: f64) -> Result<LabelVector> {
    if y_s.len() != y_t.len() {
        return Err(Error::Shape(format!(
            "label lengths {} vs {}",
            y_s.len(),
            y_t.len()
        )));
    }
    if !(0.0..=1.0).contains(&lambda_eff) {
        return Err(Error::NumericDomain(format!(
            "lambda {lambda_eff} outside [0, 1]"
        )));
    }
    let probs = y_s
        .probs()
        .iter()
        .zip(y_t.probs())
        .map(|(&s, &t)| lambda_eff * t + (1.0 - lambda_eff) * s)
        .collect();
    LabelVector::new(probs)
}

/// Full pipeline for one source/target pair. Consumes one draw from `rng`.
#[allow(clippy::too_many_arguments)]
pub fn saliencymix_pair(
    src: &Image,
    y_s: &LabelVector,
    tgt: &Image,
    y_t: &LabelVector,
    scheme: Scheme,
    method: &SaliencyMethod,
    rng: &mut RngState,
) -> Result<AugmentedSample> {
    if !src.same_shape(tgt) {
        return Err(Error::Shape(format!(
            "source {}x{}x{} vs target {}x{}x{}",
            src.width(),
            src.height(),
            src.channels(),
            tgt.width(),
            tgt.height(),
            tgt.channels()
        )));
    }
    let src_map = detect(method, src)?;
    let tgt_map = if scheme.needs_target_map() {
        Some(detect(method, tgt)?)
    } else {
        None
    };
    let lambda = sample_lambda(rng);
    mix_with_maps(
        src,
        y_s,
        tgt,
        y_t,
        scheme,
        method.tag(),
        &src_map,
        tgt_map.as_ref(),
        lambda,
    )
}

/// Same as [`saliencymix_pair`] with the maps and the ratio supplied.
#[allow(clippy::too_many_arguments)]
pub fn mix_with_maps(
    src: &Image,
    y_s: &LabelVector,
    tgt: &Image,
    y_t: &LabelVector,
    scheme: Scheme,
    method: MethodTag,
    src_map: &SaliencyMap,
    tgt_map: Option<&SaliencyMap>,
    lambda_raw: f64,
) -> Result<AugmentedSample> {
    let (width, height) = (src.width(), src.height());
    let (src_anchor, tgt_anchor) = resolve_anchors(scheme, src_map, tgt_map)?;
    let (w, h) = patch_dims(width, height, lambda_raw)?;
    let src_rect = place_rect(src_anchor, w, h, width, height);
    let tgt_rect = match tgt_anchor {
        None => src_rect,
        Some(anchor) => place_rect(anchor, w, h, width, height),
    };
    let image = mix_images(src, tgt, src_rect, tgt_rect)?;
    let lambda_eff = effective_lambda(w, h, width, height);
    let label = mix_labels(y_s, y_t, lambda_eff)?;
    Ok(AugmentedSample {
        image,
        label,
        plan: MixPlan {
            lambda_raw,
            lambda_eff,
            src_rect,
            tgt_rect,
            scheme,
            method,
            src_peak: src_anchor,
            tgt_anchor,
        },
    })
}
