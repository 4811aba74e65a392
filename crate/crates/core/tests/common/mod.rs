#![allow(dead_code)]

use std::path::Path;

use saliencymix::io::cifar::{encode_record, CifarVariant};
use saliencymix::{Image, PeakLocation, RngState};

/// Fixture randomness; independent stream from anything under test.
pub struct Fixtures(RngState);

impl Fixtures {
    pub fn new(seed: u64) -> Self {
        Self(RngState::new(seed ^ 0xF1C7_0000_0000_0000, 0))
    }

    pub fn byte(&mut self) -> u8 {
        (self.0.next_u64() >> 56) as u8
    }

    pub fn range(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        lo + self.0.index(hi_inclusive - lo + 1)
    }

    pub fn gray(&mut self, w: usize, h: usize) -> Image {
        Image::from_fn_gray(w, h, |_, _| self.byte()).unwrap()
    }

    pub fn rgb(&mut self, w: usize, h: usize) -> Image {
        let px = (0..w * h * 3).map(|_| self.byte()).collect();
        Image::new(w, h, 3, px).unwrap()
    }

    /// Smooth random RGB image: a few colored blobs over a noisy background,
    /// closer to natural images than white noise.
    pub fn natural(&mut self, w: usize, h: usize) -> Image {
        let blobs: Vec<(f64, f64, f64, [f64; 3])> = (0..3)
            .map(|_| {
                (
                    self.range(0, w - 1) as f64,
                    self.range(0, h - 1) as f64,
                    self.range(1, (w / 3).max(1)) as f64,
                    [self.byte() as f64, self.byte() as f64, self.byte() as f64],
                )
            })
            .collect();
        let base = [
            self.byte() as f64 * 0.5,
            self.byte() as f64 * 0.5,
            self.byte() as f64 * 0.5,
        ];
        let noise: Vec<u8> = (0..w * h).map(|_| self.byte() / 16).collect();
        Image::from_fn_rgb(w, h, |x, y| {
            let mut c = base;
            for &(cx, cy, r, col) in &blobs {
                let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
                let wgt = (-d2 / (2.0 * r * r)).exp();
                for k in 0..3 {
                    c[k] = c[k] * (1.0 - wgt) + col[k] * wgt;
                }
            }
            let n = noise[y * w + x] as f64;
            [
                (c[0] + n).min(255.0) as u8,
                (c[1] + n).min(255.0) as u8,
                (c[2] + n).min(255.0) as u8,
            ]
        })
        .unwrap()
    }
}

pub const DISK_RADIUS: i64 = 4;

pub fn in_disk(center: PeakLocation, x: usize, y: usize) -> bool {
    let (dx, dy) = (x as i64 - center.x as i64, y as i64 - center.y as i64);
    dx * dx + dy * dy <= DISK_RADIUS * DISK_RADIUS
}

/// 64x64 black RGB image with a white disk of radius 4.
pub fn disk_image(center: PeakLocation) -> Image {
    Image::from_fn_rgb(64, 64, |x, y| {
        if in_disk(center, x, y) {
            [255; 3]
        } else {
            [0; 3]
        }
    })
    .unwrap()
}

/// Disk centers at least 8 px from every border of a 64x64 image.
pub fn disk_centers(seed: u64, n: usize) -> Vec<PeakLocation> {
    let mut f = Fixtures::new(seed);
    (0..n)
        .map(|_| PeakLocation::new(f.range(8, 55), f.range(8, 55)))
        .collect()
}

/// Writes `count` CIFAR-10 records of structured random images.
pub fn write_cifar10_fixture(path: &Path, count: usize, seed: u64) -> Vec<u8> {
    let mut f = Fixtures::new(seed);
    let mut bytes = Vec::with_capacity(count * CifarVariant::Cifar10.record_bytes());
    for i in 0..count {
        let img = f.natural(32, 32);
        bytes.extend(encode_record(&img, i % 10, 0, CifarVariant::Cifar10).unwrap());
    }
    std::fs::write(path, &bytes).unwrap();
    bytes
}
