//! Radar depth densification: instance-guided expansion plus the baseline
//! expanders it is compared against (height extension, joint bilateral
//! filter, raw pass-through).

use crate::depth::{DepthMapError, SparseDepthMap};
use crate::geom::CameraIntrinsics;
use crate::masks::InstanceMaskSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default vertical extension for the height-based expander, meters.
pub const DEFAULT_HEIGHT_EXTEND_M: f64 = 1.5;
/// Default JBF window radius, pixels.
pub const DEFAULT_JBF_RADIUS: u32 = 15;
/// Default JBF spatial sigma, pixels.
pub const DEFAULT_JBF_SIGMA_S: f64 = 7.0;
/// Default JBF range sigma, guide intensity levels (0-255).
pub const DEFAULT_JBF_SIGMA_R: f64 = 12.0;

#[derive(Debug, Error)]
pub enum ExpandError {
    #[error(transparent)]
    DepthMap(#[from] DepthMapError),
    #[error("guide image has {0} pixels, expected {1}")]
    GuideSizeMismatch(usize, usize),
    #[error("mask set is {0}x{1}, depth map is {2}x{3}")]
    MaskSizeMismatch(u32, u32, u32, u32),
    #[error("method '{method}' requires {input}")]
    MissingInput { method: &'static str, input: &'static str },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
}

/// Which expander to run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum ExpansionMethod {
    Raw,
    #[serde(rename = "height")]
    HeightExtend { dh: f64 },
    Jbf { radius: u32, sigma_s: f64, sigma_r: f64 },
    Insta,
}

impl ExpansionMethod {
    pub fn validate(&self) -> Result<(), ExpandError> {
        match *self {
            ExpansionMethod::Raw | ExpansionMethod::Insta => Ok(()),
            ExpansionMethod::HeightExtend { dh } => {
                if dh > 0.0 {
                    Ok(())
                } else {
                    Err(ExpandError::BadParameter(format!("dh must be > 0, got {dh}")))
                }
            }
            ExpansionMethod::Jbf { radius, sigma_s, sigma_r } => {
                if radius < 1 {
                    Err(ExpandError::BadParameter("radius must be >= 1".into()))
                } else if sigma_s <= 0.0 || sigma_r <= 0.0 {
                    Err(ExpandError::BadParameter(format!(
                        "sigmas must be positive, got sigma_s={sigma_s} sigma_r={sigma_r}"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// Densification statistics for one expansion run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub input_density: f64,
    pub output_density: f64,
    pub instances_total: usize,
    /// Instances containing at least one valid radar pixel.
    pub instances_filled: usize,
}

/// Instance-guided expansion: fill each instance region with its dominant
/// (nearest) radar depth, then overlay the original radar pixels.
pub fn expand_insta(
    sparse: &SparseDepthMap,
    masks: &InstanceMaskSet,
) -> Result<(SparseDepthMap, ExpansionReport), ExpandError> {
    expand_insta_percentile(sparse, masks, 0.0)
}

/// Variant of `expand_insta` with a configurable dominant-depth percentile.
/// `percentile` 0 selects the minimum (the default rule); 50 the median.
pub fn expand_insta_percentile(
    sparse: &SparseDepthMap,
    masks: &InstanceMaskSet,
    percentile: f64,
) -> Result<(SparseDepthMap, ExpansionReport), ExpandError> {
    if masks.width() != sparse.width() || masks.height() != sparse.height() {
        return Err(ExpandError::MaskSizeMismatch(
            masks.width(),
            masks.height(),
            sparse.width(),
            sparse.height(),
        ));
    }
    if !(0.0..=100.0).contains(&percentile) {
        return Err(ExpandError::BadParameter(format!(
            "percentile must be in [0, 100], got {percentile}"
        )));
    }

    let instances = masks.instances();
    let mut filled: Vec<(u16, f64)> = Vec::new();
    for inst in &instances {
        let mut depths: Vec<f64> = masks
            .region_pixels(inst.id)
            .expect("instance id from scan")
            .filter_map(|(u, v)| sparse.get(u, v))
            .collect();
        if depths.is_empty() {
            continue;
        }
        depths.sort_unstable_by(f64::total_cmp);
        let idx = ((depths.len() - 1) as f64 * percentile / 100.0).floor() as usize;
        filled.push((inst.id, depths[idx]));
    }

    // nearest instances written last so they win should regions ever overlap
    filled.sort_unstable_by(|a, b| b.1.total_cmp(&a.1));

    let mut out = sparse.clone();
    for &(id, dominant) in &filled {
        for (u, v) in masks.region_pixels(id).expect("instance id from scan") {
            out.set(u, v, dominant)?;
        }
    }
    // overlay: original radar pixels keep their own values
    for (u, v, d) in sparse.iter_valid() {
        out.set(u, v, d)?;
    }

    let report = ExpansionReport {
        input_density: sparse.density(),
        output_density: out.density(),
        instances_total: instances.len(),
        instances_filled: filled.len(),
    };
    Ok((out, report))
}

/// Height-based extension: stretch each radar return upward by `dh` meters
/// and fill the projected pixel column at the return's depth. Collisions
/// keep the minimum depth.
pub fn expand_height(
    sparse: &SparseDepthMap,
    k: &CameraIntrinsics,
    dh: f64,
) -> Result<SparseDepthMap, ExpandError> {
    if dh <= 0.0 {
        return Err(ExpandError::BadParameter(format!("dh must be > 0, got {dh}")));
    }
    let mut out = sparse.clone();
    for (u, v, d) in sparse.iter_valid() {
        // +y is down, so "up" in 3D shrinks v; z is unchanged along the
        // vertical segment, keeping the whole column at depth d
        let p = k.backproject(u as f64, v as f64, d).expect("valid depth");
        let v_top_f = (k.fy * (p.y - dh) / d + k.cy).round_ties_even();
        let v_top = v_top_f.max(0.0) as u32;
        for row in v_top..=v {
            out.set_min(u, row, d)?;
        }
    }
    Ok(out)
}

/// Plain joint bilateral filter over the valid pixels: output is the
/// guide-weighted average of samples in the window, so original pixels are
/// smoothed, not preserved verbatim. Pixels whose weight sum falls below
/// 1e-12 stay invalid.
pub fn expand_jbf(
    sparse: &SparseDepthMap,
    guide: &[u8],
    radius: u32,
    sigma_s: f64,
    sigma_r: f64,
) -> Result<SparseDepthMap, ExpandError> {
    let npix = sparse.width() as usize * sparse.height() as usize;
    if guide.len() != npix {
        return Err(ExpandError::GuideSizeMismatch(guide.len(), npix));
    }
    ExpansionMethod::Jbf { radius, sigma_s, sigma_r }.validate()?;

    let (w, h) = (sparse.width() as i64, sparse.height() as i64);
    let r = radius as i64;
    let inv_2ss = 1.0 / (2.0 * sigma_s * sigma_s);
    let inv_2sr = 1.0 / (2.0 * sigma_r * sigma_r);
    let mut out = SparseDepthMap::new(sparse.width(), sparse.height(), sparse.cap());
    for qv in 0..h {
        for qu in 0..w {
            let iq = guide[(qv * w + qu) as usize] as f64;
            // the mean is accumulated relative to the first sample, so a
            // single-sample window (and any constant field) comes out exact
            let mut anchor = None;
            let mut num = 0.0;
            let mut den = 0.0;
            for pv in (qv - r).max(0)..=(qv + r).min(h - 1) {
                for pu in (qu - r).max(0)..=(qu + r).min(w - 1) {
                    let Some(d) = sparse.get(pu as u32, pv as u32) else {
                        continue;
                    };
                    let d0 = *anchor.get_or_insert(d);
                    let ds = ((pu - qu) * (pu - qu) + (pv - qv) * (pv - qv)) as f64;
                    let di = guide[(pv * w + pu) as usize] as f64 - iq;
                    let weight = (-ds * inv_2ss).exp() * (-di * di * inv_2sr).exp();
                    num += weight * (d - d0);
                    den += weight;
                }
            }
            if let Some(d0) = anchor {
                if den >= 1e-12 {
                    let mean = d0 + num / den;
                    out.set(qu as u32, qv as u32, mean.clamp(f64::MIN_POSITIVE, sparse.cap()))?;
                }
            }
        }
    }
    Ok(out)
}

/// Method-specific inputs for the dispatching `expand` entry point.
#[derive(Default)]
pub struct ExpandInputs<'a> {
    pub masks: Option<&'a InstanceMaskSet>,
    pub guide: Option<&'a [u8]>,
    pub intrinsics: Option<&'a CameraIntrinsics>,
}

/// Dispatch to the configured expander. Returns the expanded map and, for
/// the instance-guided method, a populated report (other methods report
/// densities with zero instance counts).
pub fn expand(
    method: &ExpansionMethod,
    sparse: &SparseDepthMap,
    inputs: &ExpandInputs,
) -> Result<(SparseDepthMap, ExpansionReport), ExpandError> {
    method.validate()?;
    let basic_report = |out: &SparseDepthMap| ExpansionReport {
        input_density: sparse.density(),
        output_density: out.density(),
        instances_total: 0,
        instances_filled: 0,
    };
    match *method {
        ExpansionMethod::Raw => {
            let out = sparse.clone();
            let report = basic_report(&out);
            Ok((out, report))
        }
        ExpansionMethod::HeightExtend { dh } => {
            let k = inputs.intrinsics.ok_or(ExpandError::MissingInput {
                method: "height",
                input: "camera intrinsics",
            })?;
            let out = expand_height(sparse, k, dh)?;
            let report = basic_report(&out);
            Ok((out, report))
        }
        ExpansionMethod::Jbf { radius, sigma_s, sigma_r } => {
            let guide = inputs.guide.ok_or(ExpandError::MissingInput {
                method: "jbf",
                input: "guide image",
            })?;
            let out = expand_jbf(sparse, guide, radius, sigma_s, sigma_r)?;
            let report = basic_report(&out);
            Ok((out, report))
        }
        ExpansionMethod::Insta => {
            let masks = inputs.masks.ok_or(ExpandError::MissingInput {
                method: "insta",
                input: "instance masks",
            })?;
            expand_insta(sparse, masks)
        }
    }
}
