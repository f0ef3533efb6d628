//! Depth evaluation metrics (AbsRel, RMSE), coverage statistics, and the
//! 16-bit depth PNG format.
//!
//! Metrics are computed over the intersection of prediction and ground-truth
//! validity, with coverage reported separately. This differs from
//! dense-prediction evaluation, where every ground-truth pixel is scored:
//! the expanders here output sparse maps, so intersection-plus-coverage
//! keeps comparisons honest.

use crate::depth::{DepthMapError, SparseDepthMap};
use image::{DynamicImage, ImageBuffer, Luma};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Largest depth the PNG format can store: (2^16 - 1) / 256 meters.
pub const DEPTH_PNG_MAX_M: f64 = 255.99609375;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no pixel is valid in both maps")]
    EmptyJointSet,
    #[error("ground truth has no valid pixels")]
    EmptyGroundTruth,
    #[error(transparent)]
    DepthMap(#[from] DepthMapError),
    #[error("depth {0} m exceeds PNG format limit {DEPTH_PNG_MAX_M} m")]
    DepthExceedsFormat(f64),
    #[error("{path}: {message}")]
    Png { path: PathBuf, message: String },
}

/// Per-frame or aggregate metric report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub abs_rel: f64,
    pub rmse: f64,
    pub evaluated_pixels: usize,
    /// Fraction of ground-truth-valid pixels where the prediction was valid.
    pub coverage: f64,
    pub cap: f64,
}

/// Running sums for pooled (multi-frame) metric aggregation. Aggregates are
/// computed from pooled numerators and denominators, not as a mean of
/// per-frame means.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MetricAccumulator {
    pub abs_rel_sum: f64,
    pub sq_err_sum: f64,
    pub joint_count: usize,
    pub gt_count: usize,
    pub cap: f64,
}

impl MetricAccumulator {
    pub fn merge(&self, other: &MetricAccumulator) -> MetricAccumulator {
        MetricAccumulator {
            abs_rel_sum: self.abs_rel_sum + other.abs_rel_sum,
            sq_err_sum: self.sq_err_sum + other.sq_err_sum,
            joint_count: self.joint_count + other.joint_count,
            gt_count: self.gt_count + other.gt_count,
            cap: self.cap.max(other.cap),
        }
    }

    pub fn report(&self) -> Result<MetricReport, EvalError> {
        if self.joint_count == 0 {
            return Err(EvalError::EmptyJointSet);
        }
        Ok(MetricReport {
            abs_rel: self.abs_rel_sum / self.joint_count as f64,
            rmse: (self.sq_err_sum / self.joint_count as f64).sqrt(),
            evaluated_pixels: self.joint_count,
            coverage: self.joint_count as f64 / self.gt_count as f64,
            cap: self.cap,
        })
    }
}

/// Accumulate pixel-level sums for one prediction/ground-truth pair. Both
/// maps are filtered to depths in (0, cap].
pub fn accumulate_metrics(
    pred: &SparseDepthMap,
    gt: &SparseDepthMap,
    cap: f64,
) -> Result<MetricAccumulator, EvalError> {
    pred.same_dimensions(gt)?;
    let mut acc = MetricAccumulator { cap, ..Default::default() };
    for (u, v, d_gt) in gt.iter_valid() {
        if d_gt > cap {
            continue;
        }
        acc.gt_count += 1;
        if let Some(d_pred) = pred.get(u, v) {
            if d_pred > cap {
                continue;
            }
            let err = d_pred - d_gt;
            acc.abs_rel_sum += err.abs() / d_gt;
            acc.sq_err_sum += err * err;
            acc.joint_count += 1;
        }
    }
    if acc.gt_count == 0 {
        return Err(EvalError::EmptyGroundTruth);
    }
    Ok(acc)
}

/// Mean absolute relative error over the joint-valid pixel set.
pub fn abs_rel(pred: &SparseDepthMap, gt: &SparseDepthMap) -> Result<f64, EvalError> {
    let acc = accumulate_metrics(pred, gt, gt.cap())?;
    Ok(acc.report()?.abs_rel)
}

/// Root mean squared error in meters over the joint-valid pixel set.
pub fn rmse(pred: &SparseDepthMap, gt: &SparseDepthMap) -> Result<f64, EvalError> {
    let acc = accumulate_metrics(pred, gt, gt.cap())?;
    Ok(acc.report()?.rmse)
}

/// Both metrics plus coverage over ground-truth-valid pixels.
pub fn evaluate(pred: &SparseDepthMap, gt: &SparseDepthMap) -> Result<MetricReport, EvalError> {
    accumulate_metrics(pred, gt, gt.cap())?.report()
}

/// Write a depth map as 16-bit grayscale PNG. Stored value is
/// round(depth_m * 256); 0 marks an invalid pixel.
pub fn write_depth_png(path: &Path, map: &SparseDepthMap) -> Result<(), EvalError> {
    let mut raw = vec![0u16; map.width() as usize * map.height() as usize];
    for (u, v, d) in map.iter_valid() {
        if d > DEPTH_PNG_MAX_M {
            return Err(EvalError::DepthExceedsFormat(d));
        }
        let stored = (d * 256.0).round() as u32;
        // depths below ~2mm would quantize to the invalid marker; keep the
        // pixel valid at the smallest representable depth
        raw[(v * map.width() + u) as usize] = stored.clamp(1, u16::MAX as u32) as u16;
    }
    let buf: ImageBuffer<Luma<u16>, Vec<u16>> =
        ImageBuffer::from_raw(map.width(), map.height(), raw).expect("buffer matches dimensions");
    buf.save(path).map_err(|e| EvalError::Png {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Exact inverse of `write_depth_png` up to the 1/256 m quantization.
pub fn read_depth_png(path: &Path, cap: f64) -> Result<SparseDepthMap, EvalError> {
    let img = image::open(path).map_err(|e| EvalError::Png {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let gray16 = match img {
        DynamicImage::ImageLuma16(buf) => buf,
        other => {
            return Err(EvalError::Png {
                path: path.to_path_buf(),
                message: format!("expected 16-bit grayscale, got {:?}", other.color()),
            })
        }
    };
    let (width, height) = gray16.dimensions();
    let mut map = SparseDepthMap::new(width, height, cap);
    for (i, &stored) in gray16.as_raw().iter().enumerate() {
        if stored == 0 {
            continue;
        }
        let d = stored as f64 / 256.0;
        if d <= cap {
            let u = (i % width as usize) as u32;
            let v = (i / width as usize) as u32;
            map.set(u, v, d)?;
        }
    }
    Ok(map)
}
