//! IDX image/label ingestion (the MNIST container format), binarized.

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::problems::bars::{BinaryImage, LabeledExample};

const IMAGE_MAGIC: u32 = 0x0000_0803;
const LABEL_MAGIC: u32 = 0x0000_0801;

fn read_u32_be(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf).map_err(|_| Error::TruncatedFile)?;
    Ok(u32::from_be_bytes(buf))
}

/// Parses big-endian IDX image and label files; a pixel at or above
/// `binarize_threshold` becomes black. `positive_label` selects which label
/// byte counts as the positive class.
pub fn load_idx(
    image_path: &Path,
    label_path: &Path,
    binarize_threshold: u8,
    positive_label: u8,
) -> Result<Vec<LabeledExample>> {
    let mut images = BufReader::new(File::open(image_path)?);
    let magic = read_u32_be(&mut images)?;
    if magic != IMAGE_MAGIC {
        return Err(Error::BadMagic(magic));
    }
    let count = read_u32_be(&mut images)? as usize;
    let rows = read_u32_be(&mut images)? as usize;
    let cols = read_u32_be(&mut images)? as usize;

    let mut labels = BufReader::new(File::open(label_path)?);
    let magic = read_u32_be(&mut labels)?;
    if magic != LABEL_MAGIC {
        return Err(Error::BadMagic(magic));
    }
    let label_count = read_u32_be(&mut labels)? as usize;
    if label_count != count {
        return Err(Error::CountMismatch {
            images: count,
            labels: label_count,
        });
    }

    let mut label_bytes = vec![0u8; count];
    labels
        .read_exact(&mut label_bytes)
        .map_err(|_| Error::TruncatedFile)?;

    let mut out = Vec::with_capacity(count);
    let mut pixel_buf = vec![0u8; rows * cols];
    for &label in &label_bytes {
        images
            .read_exact(&mut pixel_buf)
            .map_err(|_| Error::TruncatedFile)?;
        out.push(LabeledExample {
            image: BinaryImage {
                width: cols,
                height: rows,
                pixels: pixel_buf.iter().map(|&p| p >= binarize_threshold).collect(),
            },
            label: label == positive_label,
        });
    }
    Ok(out)
}

/// Writes grayscale images and labels in IDX form; used to build fixtures.
pub fn write_idx(
    image_path: &Path,
    label_path: &Path,
    images: &[Vec<u8>],
    labels: &[u8],
    rows: usize,
    cols: usize,
) -> Result<()> {
    if images.len() != labels.len() {
        return Err(Error::CountMismatch {
            images: images.len(),
            labels: labels.len(),
        });
    }
    let mut img = File::create(image_path)?;
    img.write_all(&IMAGE_MAGIC.to_be_bytes())?;
    img.write_all(&(images.len() as u32).to_be_bytes())?;
    img.write_all(&(rows as u32).to_be_bytes())?;
    img.write_all(&(cols as u32).to_be_bytes())?;
    for image in images {
        img.write_all(image)?;
    }
    let mut lbl = File::create(label_path)?;
    lbl.write_all(&LABEL_MAGIC.to_be_bytes())?;
    lbl.write_all(&(labels.len() as u32).to_be_bytes())?;
    lbl.write_all(labels)?;
    Ok(())
}
