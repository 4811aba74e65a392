//! CIFAR-10 / CIFAR-100 binary batches.
//!
//! Each record is the label byte(s) followed by 3072 pixel bytes: the 1024
//! red samples, then green, then blue, each plane row-major over 32x32.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::dataset::{Dataset, DatasetItem};
use crate::error::{Error, Result};
use crate::types::Image;

pub const SIDE: usize = 32;
pub const PLANE: usize = SIDE * SIDE;
pub const PIXEL_BYTES: usize = 3 * PLANE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CifarVariant {
    Cifar10,
    /// CIFAR-100 with fine (100-way) labels; the coarse byte is validated and dropped.
    Cifar100Fine,
}

impl CifarVariant {
    pub fn label_bytes(self) -> usize {
        match self {
            CifarVariant::Cifar10 => 1,
            CifarVariant::Cifar100Fine => 2,
        }
    }

    pub fn record_bytes(self) -> usize {
        self.label_bytes() + PIXEL_BYTES
    }

    pub fn class_count(self) -> usize {
        match self {
            CifarVariant::Cifar10 => 10,
            CifarVariant::Cifar100Fine => 100,
        }
    }

    fn names_file(self) -> &'static str {
        match self {
            CifarVariant::Cifar10 => "batches.meta.txt",
            CifarVariant::Cifar100Fine => "fine_label_names.txt",
        }
    }
}

impl fmt::Display for CifarVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CifarVariant::Cifar10 => "cifar10",
            CifarVariant::Cifar100Fine => "cifar100",
        })
    }
}

impl FromStr for CifarVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cifar10" => Ok(CifarVariant::Cifar10),
            "cifar100" | "cifar100-fine" => Ok(CifarVariant::Cifar100Fine),
            _ => Err(Error::InvalidArgument(format!(
                "unknown CIFAR variant `{s}`"
            ))),
        }
    }
}

/// Loads one binary batch file.
pub fn load_cifar(path: impl AsRef<Path>, variant: CifarVariant) -> Result<Dataset> {
    load_cifar_files(&[path.as_ref().to_path_buf()], variant)
}

/// Loads and concatenates several batch files. Item ids are the running
/// record index across all files.
pub fn load_cifar_files(paths: &[PathBuf], variant: CifarVariant) -> Result<Dataset> {
    let mut items = Vec::new();
    for path in paths {
        let bytes = fs::read(path).map_err(|e| Error::io_at(path, e))?;
        decode_records(path, &bytes, variant, &mut items)?;
    }
    let mut ds = Dataset::new(items, variant.class_count())?;
    if let Some(names) = paths.first().and_then(|p| class_names_near(p, variant)) {
        ds = ds.with_class_names(names);
    }
    Ok(ds)
}

fn decode_records(
    path: &Path,
    bytes: &[u8],
    variant: CifarVariant,
    items: &mut Vec<DatasetItem>,
) -> Result<()> {
    let rec = variant.record_bytes();
    if bytes.len() % rec != 0 {
        return Err(Error::CorruptFile {
            path: path.to_path_buf(),
            reason: format!(
                "length {} is not a multiple of the {rec}-byte record size",
                bytes.len()
            ),
        });
    }
    for record in bytes.chunks_exact(rec) {
        let index = items.len();
        let label = match variant {
            CifarVariant::Cifar10 => record[0] as usize,
            CifarVariant::Cifar100Fine => {
                if record[0] >= 20 {
                    return Err(Error::CorruptFile {
                        path: path.to_path_buf(),
                        reason: format!("record {index}: coarse label {} out of range", record[0]),
                    });
                }
                record[1] as usize
            }
        };
        if label >= variant.class_count() {
            return Err(Error::CorruptFile {
                path: path.to_path_buf(),
                reason: format!("record {index}: label {label} out of range"),
            });
        }
        let planar = &record[variant.label_bytes()..];
        let mut interleaved = vec![0u8; PIXEL_BYTES];
        for i in 0..PLANE {
            interleaved[3 * i] = planar[i];
            interleaved[3 * i + 1] = planar[PLANE + i];
            interleaved[3 * i + 2] = planar[2 * PLANE + i];
        }
        items.push(DatasetItem {
            id: index.to_string(),
            image: Image::new(SIDE, SIDE, 3, interleaved)?,
            label,
        });
    }
    Ok(())
}

fn class_names_near(path: &Path, variant: CifarVariant) -> Option<Vec<String>> {
    let text = fs::read_to_string(path.parent()?.join(variant.names_file())).ok()?;
    let names: Vec<String> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect();
    (names.len() == variant.class_count()).then_some(names)
}

/// Serializes one record; the coarse byte of a CIFAR-100 record is `coarse`.
pub fn encode_record(
    image: &Image,
    label: usize,
    coarse: u8,
    variant: CifarVariant,
) -> Result<Vec<u8>> {
    if (image.width(), image.height(), image.channels()) != (SIDE, SIDE, 3) {
        return Err(Error::Shape(format!(
            "CIFAR records are 32x32x3, got {}x{}x{}",
            image.width(),
            image.height(),
            image.channels()
        )));
    }
    if label >= variant.class_count() {
        return Err(Error::InvalidArgument(format!(
            "label {label} out of range for {variant}"
        )));
    }
    let mut out = Vec::with_capacity(variant.record_bytes());
    if variant == CifarVariant::Cifar100Fine {
        out.push(coarse);
    }
    out.push(label as u8);
    for c in 0..3 {
        out.extend(image.pixels().iter().skip(c).step_by(3));
    }
    Ok(out)
}

/// Writes a dataset back to the binary layout. CIFAR-100 coarse bytes are 0.
pub fn write_cifar(dataset: &Dataset, path: impl AsRef<Path>, variant: CifarVariant) -> Result<()> {
    let path = path.as_ref();
    let mut bytes = Vec::with_capacity(dataset.len() * variant.record_bytes());
    for item in dataset.items() {
        bytes.extend(encode_record(&item.image, item.label, 0, variant)?);
    }
    fs::write(path, bytes).map_err(|e| Error::io_at(path, e))
}
