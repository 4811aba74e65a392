//! C ABI over the `saliencymix` core.
//!
//! Every entry point returns an [`SmStatus`]; on failure the message is
//! available from [`sm_last_error`] on the calling thread. Batch results live
//! behind the opaque [`SmBatch`] handle and must be released with
//! [`sm_batch_free`]. No function here computes anything the core does not:
//! outputs are bit-identical to the Rust API.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use saliencymix::io::ManifestRecord;
use saliencymix::mixer::batch::augment_batch;
use saliencymix::{BatchConfig, Dataset, Error, Image, MethodTag, Pairing, PatchRect, Scheme};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnsupportedFormat = 3,
    Shape = 4,
    NumericDomain = 5,
    MissingInput = 6,
    EmptyInput = 7,
    Io = 8,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmMethod {
    FineGrained = 0,
    SpectralResidual = 1,
    FrequencyTuned = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmScheme {
    Sal2corr = 0,
    Sal2sal = 1,
    Sal2nonsal = 2,
    Nonsal2sal = 3,
    Nonsal2nonsal = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmPairing {
    Random = 0,
    Permutation = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SmRect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

/// Mirrors one manifest line; item ids are batch indices.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmPlanRecord {
    pub index: u64,
    pub source_index: u64,
    pub target_index: u64,
    pub lambda_raw: f64,
    pub lambda_eff: f64,
    pub src_rect: SmRect,
    pub tgt_rect: SmRect,
    pub scheme: SmScheme,
    pub method: SmMethod,
    pub seed: u64,
    /// False when the sample passed through unmixed.
    pub applied: bool,
}

/// Augmentation settings. Create with [`sm_augmenter_new`].
pub struct SmAugmenter {
    config: BatchConfig,
}

/// Output of [`sm_augment_batch`].
pub struct SmBatch {
    images: Vec<u8>,
    labels: Vec<f64>,
    plans: Vec<SmPlanRecord>,
    records: Vec<ManifestRecord>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> SmStatus {
    match err {
        Error::UnsupportedFormat(_) => SmStatus::UnsupportedFormat,
        Error::NumericDomain(_) => SmStatus::NumericDomain,
        Error::Shape(_) => SmStatus::Shape,
        Error::MissingInput(_) => SmStatus::MissingInput,
        Error::EmptyInput(_) => SmStatus::EmptyInput,
        Error::InvalidArgument(_) | Error::Parse { .. } => SmStatus::InvalidArgument,
        Error::NotFound(_) | Error::CorruptFile { .. } | Error::Io(_) => SmStatus::Io,
    }
}

/// Runs `f`, converting errors and panics into a status plus thread-local message.
fn guarded(f: impl FnOnce() -> Result<(), (SmStatus, String)>) -> SmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            SmStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            SmStatus::Panic
        }
    }
}

fn core_err(e: Error) -> (SmStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (SmStatus, String) {
    (SmStatus::NullPointer, format!("{what} is null"))
}

fn method_from(raw: u32) -> Result<MethodTag, (SmStatus, String)> {
    match raw {
        0 => Ok(MethodTag::FineGrained),
        1 => Ok(MethodTag::SpectralResidual),
        2 => Ok(MethodTag::FrequencyTuned),
        _ => Err((SmStatus::InvalidArgument, format!("unknown method {raw}"))),
    }
}

fn scheme_from(raw: u32) -> Result<Scheme, (SmStatus, String)> {
    Scheme::ALL
        .get(raw as usize)
        .copied()
        .ok_or_else(|| (SmStatus::InvalidArgument, format!("unknown scheme {raw}")))
}

fn method_to(tag: MethodTag) -> SmMethod {
    match tag {
        MethodTag::FineGrained => SmMethod::FineGrained,
        MethodTag::SpectralResidual => SmMethod::SpectralResidual,
        MethodTag::FrequencyTuned => SmMethod::FrequencyTuned,
    }
}

fn scheme_to(s: Scheme) -> SmScheme {
    match s {
        Scheme::Sal2Corr => SmScheme::Sal2corr,
        Scheme::Sal2Sal => SmScheme::Sal2sal,
        Scheme::Sal2NonSal => SmScheme::Sal2nonsal,
        Scheme::NonSal2Sal => SmScheme::Nonsal2sal,
        Scheme::NonSal2NonSal => SmScheme::Nonsal2nonsal,
    }
}

fn rect_to(r: PatchRect) -> SmRect {
    SmRect {
        x: r.x,
        y: r.y,
        w: r.w,
        h: r.h,
    }
}

/// Message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next `sm_*` call on the same thread.
#[no_mangle]
pub extern "C" fn sm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Computes a saliency map of `width * height` doubles into `out`.
///
/// `pixels` holds `height` rows of `width` pixels with `channels` interleaved
/// 8-bit samples (`len` bytes in total). `method` is an [`SmMethod`] value.
///
/// # Safety
/// `pixels` must point to `len` readable bytes and `out` to `out_len`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sm_detect(
    pixels: *const u8,
    len: usize,
    width: usize,
    height: usize,
    channels: usize,
    method: u32,
    out: *mut f64,
    out_len: usize,
) -> SmStatus {
    guarded(|| {
        if pixels.is_null() {
            return Err(null("pixels"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let method = method_from(method)?;
        if len == 0 {
            return Err((SmStatus::EmptyInput, "image buffer is empty".into()));
        }
        // SAFETY: caller guarantees `len` readable bytes.
        let bytes = std::slice::from_raw_parts(pixels, len);
        let img = Image::new(width, height, channels, bytes.to_vec()).map_err(core_err)?;
        if out_len != width * height {
            return Err((
                SmStatus::Shape,
                format!("output holds {out_len} values, map has {}", width * height),
            ));
        }
        let map = saliencymix::detect(&method.into(), &img).map_err(core_err)?;
        // SAFETY: caller guarantees `out_len` writable doubles.
        std::slice::from_raw_parts_mut(out, out_len).copy_from_slice(map.values());
        Ok(())
    })
}

/// Creates an augmenter with random pairing and apply probability 1.
/// `scheme` and `method` are [`SmScheme`] / [`SmMethod`] values.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a handle to release
/// with [`sm_augmenter_free`].
#[no_mangle]
pub unsafe extern "C" fn sm_augmenter_new(
    scheme: u32,
    method: u32,
    seed: u64,
    out: *mut *mut SmAugmenter,
) -> SmStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let config = BatchConfig {
            seed,
            scheme: scheme_from(scheme)?,
            method: method_from(method)?.into(),
            ..BatchConfig::default()
        };
        *out = Box::into_raw(Box::new(SmAugmenter { config }));
        Ok(())
    })
}

/// # Safety
/// `aug` must come from [`sm_augmenter_new`] and not be freed.
#[no_mangle]
pub unsafe extern "C" fn sm_augmenter_set_pairing(aug: *mut SmAugmenter, pairing: u32) -> SmStatus {
    guarded(|| {
        let aug = aug.as_mut().ok_or_else(|| null("augmenter"))?;
        aug.config.pairing = match pairing {
            0 => Pairing::Random,
            1 => Pairing::Permutation,
            p => return Err((SmStatus::InvalidArgument, format!("unknown pairing {p}"))),
        };
        Ok(())
    })
}

/// Probability in [0, 1] that a sample is mixed rather than passed through.
///
/// # Safety
/// `aug` must come from [`sm_augmenter_new`] and not be freed.
#[no_mangle]
pub unsafe extern "C" fn sm_augmenter_set_apply_probability(
    aug: *mut SmAugmenter,
    probability: f64,
) -> SmStatus {
    guarded(|| {
        let aug = aug.as_mut().ok_or_else(|| null("augmenter"))?;
        if !(0.0..=1.0).contains(&probability) {
            return Err((
                SmStatus::InvalidArgument,
                format!("apply probability {probability} outside [0, 1]"),
            ));
        }
        aug.config.apply_probability = probability;
        Ok(())
    })
}

/// # Safety
/// `aug` must come from [`sm_augmenter_new`] and not be freed.
#[no_mangle]
pub unsafe extern "C" fn sm_augmenter_set_threads(
    aug: *mut SmAugmenter,
    threads: usize,
) -> SmStatus {
    guarded(|| {
        let aug = aug.as_mut().ok_or_else(|| null("augmenter"))?;
        aug.config.threads = threads.max(1);
        Ok(())
    })
}

/// # Safety
/// `aug` must be null or come from [`sm_augmenter_new`]; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn sm_augmenter_free(aug: *mut SmAugmenter) {
    if !aug.is_null() {
        drop(Box::from_raw(aug));
    }
}

/// Augments a packed `count x height x width x channels` batch, producing one
/// sample per input element (sample `k` uses the core's per-index draws).
///
/// # Safety
/// `images` must point to `images_len` readable bytes, `labels` to `count`
/// readable values, and `out` must be valid. On success `*out` receives a
/// handle to release with [`sm_batch_free`].
#[no_mangle]
pub unsafe extern "C" fn sm_augment_batch(
    aug: *const SmAugmenter,
    images: *const u8,
    images_len: usize,
    count: usize,
    height: usize,
    width: usize,
    channels: usize,
    labels: *const u32,
    class_count: usize,
    out: *mut *mut SmBatch,
) -> SmStatus {
    guarded(|| {
        let aug = aug.as_ref().ok_or_else(|| null("augmenter"))?;
        if images.is_null() {
            return Err(null("images"));
        }
        if labels.is_null() {
            return Err(null("labels"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: lengths are the caller's contract.
        let pixels = std::slice::from_raw_parts(images, images_len);
        let labels: Vec<usize> = std::slice::from_raw_parts(labels, count)
            .iter()
            .map(|&l| l as usize)
            .collect();
        let dataset =
            Dataset::from_packed(pixels, count, height, width, channels, &labels, class_count)
                .map_err(core_err)?;
        let batch = run_batch(&dataset, &aug.config, count).map_err(core_err)?;
        *out = Box::into_raw(Box::new(batch));
        Ok(())
    })
}

fn run_batch(dataset: &Dataset, base: &BatchConfig, count: usize) -> saliencymix::Result<SmBatch> {
    let config = BatchConfig {
        count,
        ..base.clone()
    };
    let samples = augment_batch(dataset, &config)?;
    let per_image = dataset.shape().map(|(w, h, c)| w * h * c).unwrap_or(0);
    let mut batch = SmBatch {
        images: Vec::with_capacity(count * per_image),
        labels: Vec::with_capacity(count * dataset.class_count()),
        plans: Vec::with_capacity(count),
        records: Vec::with_capacity(count),
    };
    for s in samples {
        let plan = &s.sample.plan;
        batch.images.extend_from_slice(s.sample.image.pixels());
        batch.labels.extend_from_slice(s.sample.label.probs());
        batch.plans.push(SmPlanRecord {
            index: s.index as u64,
            source_index: s.source_index as u64,
            target_index: s.target_index as u64,
            lambda_raw: plan.lambda_raw,
            lambda_eff: plan.lambda_eff,
            src_rect: rect_to(plan.src_rect),
            tgt_rect: rect_to(plan.tgt_rect),
            scheme: scheme_to(plan.scheme),
            method: method_to(plan.method),
            seed: config.seed,
            applied: s.applied,
        });
        batch
            .records
            .push(ManifestRecord::from_sample(&s, dataset, config.seed));
    }
    Ok(batch)
}

/// Number of samples in the batch (0 for a null handle).
///
/// # Safety
/// `batch` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sm_batch_len(batch: *const SmBatch) -> usize {
    batch.as_ref().map_or(0, |b| b.plans.len())
}

/// Mixed images, packed like the input. Borrowed; valid until [`sm_batch_free`].
///
/// # Safety
/// `batch` must be a live handle; `len` may be null.
#[no_mangle]
pub unsafe extern "C" fn sm_batch_images(batch: *const SmBatch, len: *mut usize) -> *const u8 {
    let Some(b) = batch.as_ref() else {
        return ptr::null();
    };
    if let Some(len) = len.as_mut() {
        *len = b.images.len();
    }
    b.images.as_ptr()
}

/// Row-major `count x class_count` soft labels. Borrowed; valid until [`sm_batch_free`].
///
/// # Safety
/// `batch` must be a live handle; `len` may be null.
#[no_mangle]
pub unsafe extern "C" fn sm_batch_labels(batch: *const SmBatch, len: *mut usize) -> *const f64 {
    let Some(b) = batch.as_ref() else {
        return ptr::null();
    };
    if let Some(len) = len.as_mut() {
        *len = b.labels.len();
    }
    b.labels.as_ptr()
}

/// Copies the plan of sample `index` into `out`.
///
/// # Safety
/// `batch` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn sm_batch_plan(
    batch: *const SmBatch,
    index: usize,
    out: *mut SmPlanRecord,
) -> SmStatus {
    guarded(|| {
        let b = batch.as_ref().ok_or_else(|| null("batch"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = *b.plans.get(index).ok_or_else(|| {
            (
                SmStatus::InvalidArgument,
                format!("plan {index} of {}", b.plans.len()),
            )
        })?;
        Ok(())
    })
}

/// The plan of sample `index` as one manifest line (no trailing newline),
/// byte-identical to what the CLI writes. Free with [`sm_string_free`].
///
/// # Safety
/// `batch` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn sm_batch_manifest_line(
    batch: *const SmBatch,
    index: usize,
    out: *mut *mut c_char,
) -> SmStatus {
    guarded(|| {
        let b = batch.as_ref().ok_or_else(|| null("batch"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let record = b.records.get(index).ok_or_else(|| {
            (
                SmStatus::InvalidArgument,
                format!("plan {index} of {}", b.records.len()),
            )
        })?;
        let line = record.to_line().map_err(core_err)?;
        *out = CString::new(line)
            .map_err(|e| (SmStatus::InvalidArgument, e.to_string()))?
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `batch` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn sm_batch_free(batch: *mut SmBatch) {
    if !batch.is_null() {
        drop(Box::from_raw(batch));
    }
}
