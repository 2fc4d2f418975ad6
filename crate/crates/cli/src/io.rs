//! Image decoding, PNG encoding and atomic artifact writes.

use crate::error::{CliError, CliResult};
use colorcurve::{Mask, RasterImage};
use image::{ColorType, DynamicImage, ImageFormat};
use log::warn;
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::Path;

/// Inputs below this size get a warning; the color statistics of small
/// images are noisy.
pub const MIN_MEGAPIXELS: f64 = 0.25;

pub struct LoadedImage {
    pub image: RasterImage,
    /// Hex SHA-256 of the encoded file.
    pub hash: String,
}

pub fn load_image(path: &Path) -> CliResult<LoadedImage> {
    let bytes = std::fs::read(path).map_err(|e| CliError::decode(path, e))?;
    let decoded = image::load_from_memory(&bytes).map_err(|e| CliError::decode(path, e))?;
    let image = to_raster(decoded, path)?;
    if image.megapixels() < MIN_MEGAPIXELS {
        warn!(
            "{}: {:.3} MP is below the recommended {MIN_MEGAPIXELS} MP; color statistics may be unreliable",
            path.display(),
            image.megapixels()
        );
    }
    Ok(LoadedImage {
        image,
        hash: hex::encode(Sha256::digest(&bytes)),
    })
}

fn to_raster(decoded: DynamicImage, path: &Path) -> CliResult<RasterImage> {
    let color = decoded.color();
    if color.has_alpha() {
        warn!("{}: dropping alpha channel", path.display());
    }
    if !matches!(
        color,
        ColorType::Rgb8 | ColorType::Rgba8 | ColorType::L8 | ColorType::La8
    ) {
        warn!("{}: converting {color:?} to 8-bit RGB", path.display());
    }
    let rgb = decoded.to_rgb8();
    let (w, h) = (rgb.width() as usize, rgb.height() as usize);
    RasterImage::from_rgb8(w, h, rgb.as_raw()).map_err(|e| CliError::decode(path, e))
}

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// so readers never observe a partial artifact.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .map_err(|e| CliError::Internal(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

fn encode_png(width: usize, height: usize, data: &[u8], color: ColorType) -> CliResult<Vec<u8>> {
    let mut out = std::io::Cursor::new(Vec::new());
    image::write_buffer_with_format(
        &mut out,
        data,
        width as u32,
        height as u32,
        color,
        ImageFormat::Png,
    )
    .map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(out.into_inner())
}

pub fn write_png(path: &Path, image: &RasterImage) -> CliResult<()> {
    let bytes = encode_png(
        image.width(),
        image.height(),
        &image.to_rgb8(),
        ColorType::Rgb8,
    )?;
    write_atomic(path, &bytes)
}

pub fn write_mask(path: &Path, mask: &Mask) -> CliResult<()> {
    let bytes = encode_png(mask.width(), mask.height(), &mask.to_luma8(), ColorType::L8)?;
    write_atomic(path, &bytes)
}

/// File stem used to name per-probe artifacts.
pub fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".into())
}
