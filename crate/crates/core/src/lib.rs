//! Saliency-guided cut-and-paste data augmentation.
//!
//! A source image's saliency map locates its most (or least) salient pixel; a
//! patch around it, sized by a uniformly drawn combination ratio, is pasted
//! into a target image and the two one-hot labels are interpolated by the
//! exact pixel proportions.
//!
//! ```
//! use saliencymix::{saliencymix_pair, Image, LabelVector, RngState, SaliencyMethod, Scheme};
//!
//! let src = Image::from_fn_rgb(32, 32, |x, y| if x > 20 && y > 20 { [255, 0, 0] } else { [0, 0, 0] }).unwrap();
//! let tgt = Image::filled(32, 32, 3, 128).unwrap();
//! let (ys, yt) = (LabelVector::one_hot(1, 10).unwrap(), LabelVector::one_hot(4, 10).unwrap());
//! let mut rng = RngState::new(7, 0);
//! let out = saliencymix_pair(&src, &ys, &tgt, &yt, Scheme::Sal2Corr, &SaliencyMethod::default(), &mut rng).unwrap();
//! assert!((out.label.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
//! ```

pub mod cli;
pub mod dataset;
pub mod error;
pub mod io;
pub mod mixer;
pub mod rng;
pub mod saliency;
pub mod types;

pub use dataset::{Dataset, DatasetItem};
pub use error::{Error, Result};
pub use mixer::{
    augment_batch, augment_batch_with, mix_images, mix_labels, patch_dims, place_rect,
    resolve_anchors, saliencymix_pair, sample_lambda, AugmentedSample, BatchConfig, BatchSample,
    MixPlan, Pairing, PatchRect, Scheme,
};
pub use rng::{rng_uniform, RngState};
pub use saliency::{detect, peak, trough, MethodTag, PeakLocation, SaliencyMethod};
pub use types::{luma, normalize_map, Image, LabelVector, SaliencyMap};
