//! PNG and binary PNM reading and writing for 8-bit gray and RGB rasters.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use image::codecs::png::PngEncoder;
use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{DynamicImage, ExtendedColorType, ImageEncoder, ImageError};

use crate::error::{Error, Result};
use crate::types::{Image, SaliencyMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FileKind {
    Png,
    Pgm,
    Ppm,
}

fn kind_of(path: &Path) -> Result<FileKind> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("png") => Ok(FileKind::Png),
        Some("pgm") => Ok(FileKind::Pgm),
        Some("ppm") => Ok(FileKind::Ppm),
        _ => Err(Error::UnsupportedFormat(format!(
            "{}: expected a .png, .pgm or .ppm file",
            path.display()
        ))),
    }
}

fn map_image_error(path: &Path, err: ImageError) -> Error {
    match err {
        ImageError::IoError(e) => Error::io_at(path, e),
        ImageError::Unsupported(e) => Error::UnsupportedFormat(format!("{}: {e}", path.display())),
        other => Error::CorruptFile {
            path: path.to_path_buf(),
            reason: other.to_string(),
        },
    }
}

pub fn is_image_file(path: &Path) -> bool {
    kind_of(path).is_ok()
}

/// Reads an 8-bit grayscale or RGB image. Any other sample layout, including
/// 16-bit and alpha channels, is rejected.
pub fn read_image(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    kind_of(path)?;
    let decoded = image::ImageReader::open(path)
        .map_err(|e| Error::io_at(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io_at(path, e))?
        .decode()
        .map_err(|e| map_image_error(path, e))?;
    let (w, h) = (decoded.width() as usize, decoded.height() as usize);
    match decoded {
        DynamicImage::ImageLuma8(buf) => Image::new(w, h, 1, buf.into_raw()),
        DynamicImage::ImageRgb8(buf) => Image::new(w, h, 3, buf.into_raw()),
        other => Err(Error::UnsupportedFormat(format!(
            "{}: color type {:?} (only 8-bit gray and RGB are supported)",
            path.display(),
            other.color()
        ))),
    }
}

/// Writes by extension: `.png`, `.pgm` (gray) or `.ppm` (RGB), binary encoding.
pub fn write_image(img: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let kind = kind_of(path)?;
    let color = match img.channels() {
        1 => ExtendedColorType::L8,
        3 => ExtendedColorType::Rgb8,
        c => {
            return Err(Error::UnsupportedFormat(format!(
                "cannot encode {c}-channel image"
            )))
        }
    };
    let subtype = match (kind, img.channels()) {
        (FileKind::Png, _) => None,
        (FileKind::Pgm, 1) => Some(PnmSubtype::Graymap(SampleEncoding::Binary)),
        (FileKind::Ppm, 3) => Some(PnmSubtype::Pixmap(SampleEncoding::Binary)),
        (_, c) => {
            return Err(Error::UnsupportedFormat(format!(
                "{}: {c}-channel image does not match the file extension",
                path.display()
            )))
        }
    };
    let (w, h) = (img.width() as u32, img.height() as u32);
    let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io_at(path, e))?);
    let encoded = match subtype {
        None => PngEncoder::new(&mut out).write_image(img.pixels(), w, h, color),
        Some(sub) => {
            PnmEncoder::new(&mut out)
                .with_subtype(sub)
                .write_image(img.pixels(), w, h, color)
        }
    };
    encoded.map_err(|e| map_image_error(path, e))?;
    out.flush()?;
    Ok(())
}

/// Quantizes a saliency map to 8-bit gray, `round(255 * v)`.
pub fn saliency_to_image(map: &SaliencyMap) -> Image {
    let px = map
        .values()
        .iter()
        .map(|&v| (255.0 * v).round().clamp(0.0, 255.0) as u8)
        .collect();
    Image::new(map.width(), map.height(), 1, px).expect("map dimensions are valid")
}

pub fn write_saliency_png(map: &SaliencyMap, path: impl AsRef<Path>) -> Result<()> {
    write_image(&saliency_to_image(map), path)
}
