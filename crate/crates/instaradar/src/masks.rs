//! Instance segmentation masks consumed as precomputed 16-bit label PNGs.
//!
//! Pixel value is the instance ID; 0 is background. Instances are disjoint
//! by representation.

use image::{DynamicImage, ImageBuffer, Luma};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MaskError {
    #[error("{path}: {message}")]
    Decode { path: PathBuf, message: String },
    #[error("{path}: expected {expected_width}x{expected_height}, got {width}x{height}")]
    SizeMismatch {
        path: PathBuf,
        expected_width: u32,
        expected_height: u32,
        width: u32,
        height: u32,
    },
    #[error("{path}: expected 16-bit grayscale, got {found}")]
    BitDepthMismatch { path: PathBuf, found: String },
    #[error("{path}: expected single channel, got multi-channel {found}")]
    MultiChannel { path: PathBuf, found: String },
    #[error("unknown instance id {0}")]
    UnknownInstance(u16),
    #[error("label buffer length {0} does not match {1}x{2}")]
    BadBufferLength(usize, u32, u32),
}

/// W x H label image partitioning pixels into background (0) and instances.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceMaskSet {
    width: u32,
    height: u32,
    labels: Vec<u16>,
    instance_ids: Vec<u16>,
}

/// Summary of one instance: population and tight bounding box (inclusive).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Instance {
    pub id: u16,
    pub pixel_count: usize,
    pub bbox: (u32, u32, u32, u32),
}

impl InstanceMaskSet {
    pub fn from_labels(width: u32, height: u32, labels: Vec<u16>) -> Result<Self, MaskError> {
        if labels.len() != width as usize * height as usize {
            return Err(MaskError::BadBufferLength(labels.len(), width, height));
        }
        let mut seen = vec![false; 1 << 16];
        for &l in &labels {
            seen[l as usize] = true;
        }
        let instance_ids = (1..=u16::MAX).filter(|&id| seen[id as usize]).collect();
        Ok(Self { width, height, labels, instance_ids })
    }

    pub fn empty(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            labels: vec![0; width as usize * height as usize],
            instance_ids: Vec::new(),
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Distinct nonzero IDs present, sorted ascending.
    pub fn instance_ids(&self) -> &[u16] {
        &self.instance_ids
    }

    pub fn label(&self, u: u32, v: u32) -> u16 {
        self.labels[v as usize * self.width as usize + u as usize]
    }

    pub fn labels(&self) -> &[u16] {
        &self.labels
    }

    /// One summary per distinct nonzero ID, ascending by ID.
    pub fn instances(&self) -> Vec<Instance> {
        let mut count = vec![0usize; 1 << 16];
        let mut bbox = vec![(u32::MAX, u32::MAX, 0u32, 0u32); 1 << 16];
        for v in 0..self.height {
            for u in 0..self.width {
                let id = self.label(u, v) as usize;
                if id == 0 {
                    continue;
                }
                count[id] += 1;
                let b = &mut bbox[id];
                b.0 = b.0.min(u);
                b.1 = b.1.min(v);
                b.2 = b.2.max(u);
                b.3 = b.3.max(v);
            }
        }
        self.instance_ids
            .iter()
            .map(|&id| Instance {
                id,
                pixel_count: count[id as usize],
                bbox: bbox[id as usize],
            })
            .collect()
    }

    /// Pixels labeled `id`, in row-major order.
    pub fn region_pixels(&self, id: u16) -> Result<impl Iterator<Item = (u32, u32)> + '_, MaskError> {
        if id == 0 || self.instance_ids.binary_search(&id).is_err() {
            return Err(MaskError::UnknownInstance(id));
        }
        let width = self.width;
        Ok(self
            .labels
            .iter()
            .enumerate()
            .filter_map(move |(i, &l)| {
                (l == id).then(|| ((i % width as usize) as u32, (i / width as usize) as u32))
            }))
    }
}

/// Load a 16-bit single-channel label PNG, checking size and format.
pub fn load_masks(path: &Path, expected_size: (u32, u32)) -> Result<InstanceMaskSet, MaskError> {
    let img = image::open(path).map_err(|e| MaskError::Decode {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let (expected_width, expected_height) = expected_size;
    if img.width() != expected_width || img.height() != expected_height {
        return Err(MaskError::SizeMismatch {
            path: path.to_path_buf(),
            expected_width,
            expected_height,
            width: img.width(),
            height: img.height(),
        });
    }
    let gray16 = match img {
        DynamicImage::ImageLuma16(buf) => buf,
        DynamicImage::ImageLuma8(_) => {
            return Err(MaskError::BitDepthMismatch {
                path: path.to_path_buf(),
                found: "8-bit grayscale".into(),
            })
        }
        other => {
            return Err(MaskError::MultiChannel {
                path: path.to_path_buf(),
                found: format!("{:?}", other.color()),
            })
        }
    };
    InstanceMaskSet::from_labels(expected_width, expected_height, gray16.into_raw())
}

/// Write a label image as 16-bit grayscale PNG, the inverse of `load_masks`.
pub fn write_masks(path: &Path, masks: &InstanceMaskSet) -> Result<(), MaskError> {
    let buf: ImageBuffer<Luma<u16>, Vec<u16>> =
        ImageBuffer::from_raw(masks.width, masks.height, masks.labels.clone())
            .expect("label buffer matches dimensions");
    buf.save(path).map_err(|e| MaskError::Decode {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}
