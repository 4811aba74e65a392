use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use saliencymix::io::ManifestRecord;
use saliencymix::{
    augment_batch, detect, BatchConfig, Dataset, Image, MethodTag, Pairing, RngState, Scheme,
};
use saliencymix_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(sm_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn packed_batch(count: usize, w: usize, h: usize, c: usize, seed: u64) -> (Vec<u8>, Vec<u32>) {
    let mut rng = RngState::new(seed, 0);
    let mut pixels = Vec::with_capacity(count * w * h * c);
    for k in 0..count {
        // a bright square at a per-image position over noise
        let (bx, by) = (rng.index(w - 4), rng.index(h - 4));
        for y in 0..h {
            for x in 0..w {
                let bright = x >= bx && x < bx + 4 && y >= by && y < by + 4;
                for _ in 0..c {
                    pixels.push(if bright {
                        240
                    } else {
                        (rng.next_u64() >> 59) as u8 + 20 * (k % 3) as u8
                    });
                }
            }
        }
    }
    let labels = (0..count).map(|k| (k % 4) as u32).collect();
    (pixels, labels)
}

struct Augmenter(*mut SmAugmenter);

impl Augmenter {
    fn new(scheme: u32, method: u32, seed: u64) -> Self {
        let mut aug = ptr::null_mut();
        assert_eq!(
            unsafe { sm_augmenter_new(scheme, method, seed, &mut aug) },
            SmStatus::Ok
        );
        Self(aug)
    }

    fn run(
        &self,
        pixels: &[u8],
        labels: &[u32],
        w: usize,
        h: usize,
        c: usize,
        classes: usize,
    ) -> Batch {
        let mut out = ptr::null_mut();
        let status = unsafe {
            sm_augment_batch(
                self.0,
                pixels.as_ptr(),
                pixels.len(),
                labels.len(),
                h,
                w,
                c,
                labels.as_ptr(),
                classes,
                &mut out,
            )
        };
        assert_eq!(status, SmStatus::Ok, "{}", last_error());
        Batch(out)
    }
}

impl Drop for Augmenter {
    fn drop(&mut self) {
        unsafe { sm_augmenter_free(self.0) }
    }
}

struct Batch(*mut SmBatch);

impl Batch {
    fn images(&self) -> &[u8] {
        let mut len = 0;
        let p = unsafe { sm_batch_images(self.0, &mut len) };
        unsafe { std::slice::from_raw_parts(p, len) }
    }

    fn labels(&self) -> &[f64] {
        let mut len = 0;
        let p = unsafe { sm_batch_labels(self.0, &mut len) };
        unsafe { std::slice::from_raw_parts(p, len) }
    }

    fn plan(&self, i: usize) -> SmPlanRecord {
        let mut rec = std::mem::MaybeUninit::uninit();
        assert_eq!(
            unsafe { sm_batch_plan(self.0, i, rec.as_mut_ptr()) },
            SmStatus::Ok
        );
        unsafe { rec.assume_init() }
    }

    fn line(&self, i: usize) -> String {
        let mut s = ptr::null_mut();
        assert_eq!(
            unsafe { sm_batch_manifest_line(self.0, i, &mut s) },
            SmStatus::Ok
        );
        let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
        unsafe { sm_string_free(s) };
        out
    }
}

impl Drop for Batch {
    fn drop(&mut self) {
        unsafe { sm_batch_free(self.0) }
    }
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(sm_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn null_pointers_are_reported() {
    let mut out = [0.0; 4];
    let px = [1u8; 4];
    unsafe {
        assert_eq!(
            sm_detect(ptr::null(), 4, 2, 2, 1, 0, out.as_mut_ptr(), 4),
            SmStatus::NullPointer
        );
        assert!(last_error().contains("pixels"));
        assert_eq!(
            sm_detect(px.as_ptr(), 4, 2, 2, 1, 0, ptr::null_mut(), 4),
            SmStatus::NullPointer
        );
        assert_eq!(
            sm_augmenter_new(0, 0, 1, ptr::null_mut()),
            SmStatus::NullPointer
        );
        assert_eq!(
            sm_augmenter_set_pairing(ptr::null_mut(), 0),
            SmStatus::NullPointer
        );
        assert_eq!(
            sm_augmenter_set_threads(ptr::null_mut(), 2),
            SmStatus::NullPointer
        );
        assert_eq!(
            sm_augmenter_set_apply_probability(ptr::null_mut(), 0.5),
            SmStatus::NullPointer
        );
        let mut batch = ptr::null_mut();
        assert_eq!(
            sm_augment_batch(
                ptr::null(),
                px.as_ptr(),
                4,
                1,
                2,
                2,
                1,
                [0u32].as_ptr(),
                1,
                &mut batch
            ),
            SmStatus::NullPointer
        );
        assert!(batch.is_null());
        assert_eq!(sm_batch_len(ptr::null()), 0);
        assert!(sm_batch_images(ptr::null(), ptr::null_mut()).is_null());
        assert!(sm_batch_labels(ptr::null(), ptr::null_mut()).is_null());
        assert_eq!(
            sm_batch_plan(ptr::null(), 0, ptr::null_mut()),
            SmStatus::NullPointer
        );
        sm_batch_free(ptr::null_mut());
        sm_augmenter_free(ptr::null_mut());
        sm_string_free(ptr::null_mut());
    }
}

#[test]
fn invalid_enums_and_arguments_are_rejected() {
    let mut aug = ptr::null_mut();
    unsafe {
        assert_eq!(
            sm_augmenter_new(5, 0, 1, &mut aug),
            SmStatus::InvalidArgument
        );
        assert!(last_error().contains("scheme"));
        assert_eq!(
            sm_augmenter_new(0, 3, 1, &mut aug),
            SmStatus::InvalidArgument
        );
        assert!(aug.is_null());
        let mut out = [0.0; 4];
        assert_eq!(
            sm_detect([0u8; 4].as_ptr(), 4, 2, 2, 1, 7, out.as_mut_ptr(), 4),
            SmStatus::InvalidArgument
        );
    }
    let a = Augmenter::new(0, 0, 1);
    unsafe {
        assert_eq!(sm_augmenter_set_pairing(a.0, 2), SmStatus::InvalidArgument);
        assert_eq!(
            sm_augmenter_set_apply_probability(a.0, 1.5),
            SmStatus::InvalidArgument
        );
        assert_eq!(
            sm_augmenter_set_apply_probability(a.0, f64::NAN),
            SmStatus::InvalidArgument
        );
        assert_eq!(sm_augmenter_set_apply_probability(a.0, 0.25), SmStatus::Ok);
        assert_eq!(last_error(), "");
    }
}

#[test]
fn detect_errors_map_to_status_codes() {
    let gray = [10u8; 16];
    let mut out = vec![0.0; 16];
    unsafe {
        assert_eq!(
            sm_detect(gray.as_ptr(), 16, 4, 4, 1, 2, out.as_mut_ptr(), 16),
            SmStatus::UnsupportedFormat
        );
        assert_eq!(
            sm_detect(gray.as_ptr(), 16, 4, 4, 1, 0, out.as_mut_ptr(), 15),
            SmStatus::Shape
        );
        assert_eq!(
            sm_detect(gray.as_ptr(), 15, 4, 4, 1, 0, out.as_mut_ptr(), 16),
            SmStatus::Shape
        );
        assert_eq!(
            sm_detect(gray.as_ptr(), 0, 0, 0, 1, 0, out.as_mut_ptr(), 0),
            SmStatus::EmptyInput
        );
    }
}

#[test]
fn detect_matches_core() {
    let (pixels, _) = packed_batch(1, 24, 20, 3, 9);
    let img = Image::new(24, 20, 3, pixels.clone()).unwrap();
    for (raw, tag) in [
        (0, MethodTag::FineGrained),
        (1, MethodTag::SpectralResidual),
        (2, MethodTag::FrequencyTuned),
    ] {
        let mut out = vec![-1.0; 24 * 20];
        let status = unsafe {
            sm_detect(
                pixels.as_ptr(),
                pixels.len(),
                24,
                20,
                3,
                raw,
                out.as_mut_ptr(),
                out.len(),
            )
        };
        assert_eq!(status, SmStatus::Ok);
        assert_eq!(out, detect(&tag.into(), &img).unwrap().values());
    }
}

#[test]
fn batch_matches_core_records() {
    let (w, h, c, n) = (16, 16, 3, 12);
    let (pixels, labels) = packed_batch(n, w, h, c, 3);
    let ulabels: Vec<usize> = labels.iter().map(|&l| l as usize).collect();
    let ds = Dataset::from_packed(&pixels, n, h, w, c, &ulabels, 4).unwrap();
    for (raw, scheme) in Scheme::ALL.into_iter().enumerate() {
        let aug = Augmenter::new(raw as u32, 1, 77);
        unsafe {
            assert_eq!(sm_augmenter_set_pairing(aug.0, 1), SmStatus::Ok);
            assert_eq!(sm_augmenter_set_threads(aug.0, 3), SmStatus::Ok);
        }
        let batch = aug.run(&pixels, &labels, w, h, c, 4);
        let cfg = BatchConfig {
            count: n,
            seed: 77,
            scheme,
            method: MethodTag::SpectralResidual.into(),
            pairing: Pairing::Permutation,
            ..Default::default()
        };
        let core = augment_batch(&ds, &cfg).unwrap();
        assert_eq!(unsafe { sm_batch_len(batch.0) }, n);
        let per = w * h * c;
        for (k, s) in core.iter().enumerate() {
            let line = ManifestRecord::from_sample(s, &ds, 77).to_line().unwrap();
            assert_eq!(batch.line(k), line);
            assert_eq!(
                &batch.images()[k * per..(k + 1) * per],
                s.sample.image.pixels()
            );
            assert_eq!(&batch.labels()[k * 4..(k + 1) * 4], s.sample.label.probs());
            let p = batch.plan(k);
            assert_eq!(p.index, k as u64);
            assert_eq!(
                (p.source_index as usize, p.target_index as usize),
                (s.source_index, s.target_index)
            );
            assert_eq!(p.lambda_eff, s.sample.plan.lambda_eff);
            assert_eq!(p.scheme as u32, raw as u32);
            assert_eq!(p.method, SmMethod::SpectralResidual);
            let r = s.sample.plan.tgt_rect;
            assert_eq!(
                p.tgt_rect,
                SmRect {
                    x: r.x,
                    y: r.y,
                    w: r.w,
                    h: r.h
                }
            );
            assert!(p.applied);
        }
        let mut rec = std::mem::MaybeUninit::uninit();
        assert_eq!(
            unsafe { sm_batch_plan(batch.0, n, rec.as_mut_ptr()) },
            SmStatus::InvalidArgument
        );
    }
}

#[test]
fn zero_apply_probability_passes_targets_through() {
    let (w, h, c, n) = (12, 10, 1, 8);
    let (pixels, labels) = packed_batch(n, w, h, c, 4);
    let aug = Augmenter::new(0, 0, 5);
    assert_eq!(
        unsafe { sm_augmenter_set_apply_probability(aug.0, 0.0) },
        SmStatus::Ok
    );
    let batch = aug.run(&pixels, &labels, w, h, c, 4);
    let per = w * h * c;
    for k in 0..n {
        let p = batch.plan(k);
        assert!(!p.applied);
        assert_eq!(p.lambda_eff, 1.0);
        let t = p.target_index as usize;
        assert_eq!(
            &batch.images()[k * per..(k + 1) * per],
            &pixels[t * per..(t + 1) * per]
        );
        let row = &batch.labels()[k * 4..(k + 1) * 4];
        let mut want = [0.0; 4];
        want[labels[t] as usize] = 1.0;
        assert_eq!(row, want);
    }
}

#[test]
fn batch_labels_sum_to_one_and_shape_errors_surface() {
    let (pixels, labels) = packed_batch(10, 16, 16, 3, 6);
    let aug = Augmenter::new(1, 2, 9);
    let batch = aug.run(&pixels, &labels, 16, 16, 3, 4);
    for row in batch.labels().chunks(4) {
        assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
    }
    let mut out = ptr::null_mut();
    let status = unsafe {
        sm_augment_batch(
            aug.0,
            pixels.as_ptr(),
            pixels.len() - 1,
            10,
            16,
            16,
            3,
            labels.as_ptr(),
            4,
            &mut out,
        )
    };
    assert_ne!(status, SmStatus::Ok);
    assert!(out.is_null());
    assert!(!last_error().is_empty());
    let bad_labels = [9u32; 10];
    let status = unsafe {
        sm_augment_batch(
            aug.0,
            pixels.as_ptr(),
            pixels.len(),
            10,
            16,
            16,
            3,
            bad_labels.as_ptr(),
            4,
            &mut out,
        )
    };
    assert_ne!(status, SmStatus::Ok);
}

#[test]
fn header_is_in_sync_with_exports() {
    let header = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/include/saliencymix.h"
    ))
    .unwrap();
    for name in [
        "sm_last_error",
        "sm_version",
        "sm_detect",
        "sm_augmenter_new",
        "sm_augmenter_set_pairing",
        "sm_augmenter_set_apply_probability",
        "sm_augmenter_set_threads",
        "sm_augmenter_free",
        "sm_augment_batch",
        "sm_batch_len",
        "sm_batch_images",
        "sm_batch_labels",
        "sm_batch_plan",
        "sm_batch_manifest_line",
        "sm_string_free",
        "sm_batch_free",
    ] {
        let declared = [" ", "*"]
            .iter()
            .any(|pre| header.contains(&format!("{pre}{name}(")));
        assert!(declared, "{name} missing from header");
    }
    assert!(header.contains("SM_STATUS_NULL_POINTER = 1"));
    assert!(header.contains("SM_SCHEME_NONSAL2NONSAL = 4"));
}

const C_SMOKE: &str = r#"
#include <stdio.h>
#include <string.h>
#include "saliencymix.h"

int main(void) {
    enum { N = 4, W = 8, H = 8, C = 3 };
    static unsigned char px[N * W * H * C];
    uint32_t labels[N] = {0, 1, 2, 1};
    for (size_t i = 0; i < sizeof px; i++) px[i] = (unsigned char)((i * 37u) % 251u);

    double map[W * H];
    if (sm_detect(px, W * H * C, W, H, C, SM_METHOD_FREQUENCY_TUNED, map, W * H) != SM_STATUS_OK) return 1;
    if (sm_detect(NULL, 0, W, H, C, 0, map, W * H) != SM_STATUS_NULL_POINTER) return 2;

    SmAugmenter *aug = NULL;
    if (sm_augmenter_new(SM_SCHEME_SAL2CORR, SM_METHOD_FINE_GRAINED, 7, &aug) != SM_STATUS_OK) return 3;
    SmBatch *batch = NULL;
    if (sm_augment_batch(aug, px, sizeof px, N, H, W, C, labels, 3, &batch) != SM_STATUS_OK) return 4;
    if (sm_batch_len(batch) != N) return 5;
    SmPlanRecord rec;
    if (sm_batch_plan(batch, 2, &rec) != SM_STATUS_OK || rec.index != 2) return 6;
    char *line = NULL;
    if (sm_batch_manifest_line(batch, 0, &line) != SM_STATUS_OK) return 7;
    printf("%s\n", line);
    sm_string_free(line);
    sm_batch_free(batch);
    sm_augmenter_free(aug);
    printf("ok %s\n", sm_version());
    return 0;
}
"#;

#[test]
fn c_program_links_against_static_library() {
    let Ok(exe) = std::env::current_exe() else {
        return;
    };
    // target/<profile>/deps/<test> -> target/<profile>
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    let lib = profile_dir.join("libsaliencymix_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!(
            "skipping: no C compiler or static library at {}",
            lib.display()
        );
        return;
    }
    let dir = tempfile_dir();
    let src = dir.join("smoke.c");
    std::fs::write(&src, C_SMOKE).unwrap();
    let bin = dir.join("smoke");
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let build = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(
        build.status.success(),
        "{}",
        String::from_utf8_lossy(&build.stderr)
    );
    let run = Command::new(&bin).output().unwrap();
    assert_eq!(
        run.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let text = String::from_utf8(run.stdout).unwrap();
    assert!(text.starts_with("{\"index\":0,\"source_id\":"));
    assert!(text.ends_with(&format!("ok {}\n", env!("CARGO_PKG_VERSION"))));
    let _ = std::fs::remove_dir_all(&dir);
}

fn tempfile_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sm-ffi-smoke-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
