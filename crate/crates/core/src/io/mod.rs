//! Dataset ingestion, image files, manifests and soft-label files.

pub mod cifar;
pub mod image_dir;
pub mod image_file;
pub mod manifest;

use std::io::Write;

pub use cifar::{load_cifar, load_cifar_files, write_cifar, CifarVariant};
pub use image_dir::load_image_dir;
pub use image_file::{
    is_image_file, read_image, saliency_to_image, write_image, write_saliency_png,
};
pub use manifest::{read_manifest, write_manifest, ManifestRecord, ManifestWriter};

use crate::error::Result;
use crate::types::LabelVector;

/// One soft-label line: the sample index, then each class probability in
/// shortest round-trip form, space separated.
pub fn write_soft_label_line(
    out: &mut impl Write,
    index: usize,
    label: &LabelVector,
) -> Result<()> {
    write!(out, "{index}")?;
    for p in label.probs() {
        write!(out, " {p:?}")?;
    }
    writeln!(out)?;
    Ok(())
}
