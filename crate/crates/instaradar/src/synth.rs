//! Synthetic scene generator: jointly consistent radar sweeps, instance
//! masks, ground-truth depth, guide image, and calibration, deterministic
//! per seed.
//!
//! Objects are fronto-parallel rectangles at constant depth, the regime
//! where instance-guided expansion is analytically exact. Depths are
//! quantized to 1/4 m and per-sweep ego displacement to 1/64 m so the
//! sensor -> ego -> global -> reference chain round-trips without any
//! floating-point residue; with zero radar noise, accumulated points land
//! back on their source pixels at exactly the object depth.

use crate::depth::{DepthMapError, SparseDepthMap, DEFAULT_DEPTH_CAP};
use crate::eval::{write_depth_png, EvalError};
use crate::geom::{CameraIntrinsics, Pose, SensorCalibration};
use crate::masks::{write_masks, InstanceMaskSet, MaskError};
use crate::radar::{write_sweep, RadarError, RadarPoint, RadarSweep};
use nalgebra::Vector3;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Synthetic camera: 352x128 with the principal point at the center.
pub const SYNTH_WIDTH: u32 = 352;
pub const SYNTH_HEIGHT: u32 = 128;
const SYNTH_FOCAL: f64 = 300.0;

/// Time between consecutive sweeps, microseconds (8 Hz).
const SWEEP_PERIOD_US: u64 = 125_000;
const REF_TIMESTAMP_US: u64 = 10_000_000;

const MAX_RESAMPLE_ATTEMPTS: usize = 100;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid scene spec: {0}")]
    BadSpec(String),
    #[error("could not place object {0} after {MAX_RESAMPLE_ATTEMPTS} attempts")]
    ResampleExhausted(usize),
    #[error(transparent)]
    Radar(#[from] RadarError),
    #[error(transparent)]
    Mask(#[from] MaskError),
    #[error(transparent)]
    Depth(#[from] DepthMapError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Parameters of one synthetic scene.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneSpec {
    pub seed: u64,
    pub object_count: usize,
    /// Sampled object depths, meters; quantized to 1/4 m.
    pub depth_range: (f64, f64),
    /// Radar returns per object per sweep.
    pub radar_points_per_object: usize,
    /// Gaussian depth noise applied to radar returns, meters.
    pub radar_noise_sigma: f64,
    /// Forward ego speed, m/s; per-sweep displacement quantized to 1/64 m.
    pub ego_speed: f64,
    pub sweep_count: usize,
}

impl Default for SceneSpec {
    fn default() -> Self {
        Self {
            seed: 0,
            object_count: 6,
            depth_range: (5.0, 60.0),
            radar_points_per_object: 4,
            radar_noise_sigma: 0.0,
            ego_speed: 2.0,
            sweep_count: crate::radar::DEFAULT_SWEEP_COUNT,
        }
    }
}

/// One generated object, fronto-parallel at constant depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneObject {
    pub id: u16,
    pub depth: f64,
    /// Pixel rectangle (x, y, width, height) before occlusion.
    pub rect: (u32, u32, u32, u32),
}

/// A fully generated scene, mutually consistent under the frame chain.
#[derive(Debug, Clone)]
pub struct Scene {
    pub intrinsics: CameraIntrinsics,
    pub cam_to_ego: Pose,
    pub ref_ego_to_global: Pose,
    pub camera_timestamp_us: u64,
    /// Newest-first; index 0 is the reference frame's own sweep.
    pub sweeps: Vec<RadarSweep>,
    pub masks: InstanceMaskSet,
    pub gt: SparseDepthMap,
    /// Flat-shaded grayscale render, one intensity per object.
    pub guide: Vec<u8>,
    pub objects: Vec<SceneObject>,
}

pub fn synth_intrinsics() -> CameraIntrinsics {
    CameraIntrinsics::new(
        SYNTH_FOCAL,
        SYNTH_FOCAL,
        SYNTH_WIDTH as f64 / 2.0,
        SYNTH_HEIGHT as f64 / 2.0,
        SYNTH_WIDTH,
        SYNTH_HEIGHT,
    )
    .expect("fixed synthetic intrinsics are valid")
}

fn quantize(value: f64, step: f64) -> f64 {
    (value / step).round() * step
}

pub fn generate(spec: &SceneSpec) -> Result<Scene, SynthError> {
    let (d_lo, d_hi) = spec.depth_range;
    if !(d_lo > 0.0) || d_hi <= d_lo || d_hi > DEFAULT_DEPTH_CAP {
        return Err(SynthError::BadSpec(format!(
            "depth_range must lie within (0, {DEFAULT_DEPTH_CAP}], got [{d_lo}, {d_hi}]"
        )));
    }
    if spec.sweep_count == 0 {
        return Err(SynthError::BadSpec("sweep_count must be >= 1".into()));
    }
    if spec.radar_noise_sigma < 0.0 {
        return Err(SynthError::BadSpec("radar_noise_sigma must be >= 0".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let k = synth_intrinsics();

    // sample objects with distinct quantized depths
    let mut objects: Vec<SceneObject> = Vec::with_capacity(spec.object_count);
    for j in 0..spec.object_count {
        let mut placed = false;
        for _ in 0..MAX_RESAMPLE_ATTEMPTS {
            let depth = quantize(rng.gen_range(d_lo..=d_hi), 0.25).clamp(0.25, DEFAULT_DEPTH_CAP);
            if objects.iter().any(|o| o.depth == depth) {
                continue;
            }
            let w = rng.gen_range(24..72u32);
            let h = rng.gen_range(20..56u32);
            let cx = rng.gen_range(0..SYNTH_WIDTH) as i64;
            let cy = rng.gen_range(0..SYNTH_HEIGHT) as i64;
            let x0 = (cx - w as i64 / 2).max(0) as u32;
            let y0 = (cy - h as i64 / 2).max(0) as u32;
            let x1 = ((cx + w as i64 / 2) as u32).min(SYNTH_WIDTH - 1);
            let y1 = ((cy + h as i64 / 2) as u32).min(SYNTH_HEIGHT - 1);
            if x1 < x0 || y1 < y0 {
                continue;
            }
            objects.push(SceneObject {
                id: (j + 1) as u16,
                depth,
                rect: (x0, y0, x1 - x0 + 1, y1 - y0 + 1),
            });
            placed = true;
            break;
        }
        if !placed {
            return Err(SynthError::ResampleExhausted(j));
        }
    }

    // rasterize masks, ground truth, and guide: farther objects first so
    // nearer ones occlude
    let mut order: Vec<usize> = (0..objects.len()).collect();
    order.sort_by(|&a, &b| objects[b].depth.total_cmp(&objects[a].depth));
    let mut labels = vec![0u16; (SYNTH_WIDTH * SYNTH_HEIGHT) as usize];
    let mut gt = SparseDepthMap::new(SYNTH_WIDTH, SYNTH_HEIGHT, DEFAULT_DEPTH_CAP);
    let mut guide = vec![60u8; (SYNTH_WIDTH * SYNTH_HEIGHT) as usize];
    for &idx in &order {
        let obj = &objects[idx];
        let (x0, y0, w, h) = obj.rect;
        let shade = 90u8.wrapping_add((obj.id as u32 * 47 % 160) as u8);
        for v in y0..y0 + h {
            for u in x0..x0 + w {
                labels[(v * SYNTH_WIDTH + u) as usize] = obj.id;
                gt.set(u, v, obj.depth)?;
                guide[(v * SYNTH_WIDTH + u) as usize] = shade;
            }
        }
    }
    let masks = InstanceMaskSet::from_labels(SYNTH_WIDTH, SYNTH_HEIGHT, labels)?;

    // visible pixels per object, for radar sampling
    let visible: Vec<Vec<(u32, u32)>> = objects
        .iter()
        .map(|obj| match masks.region_pixels(obj.id) {
            Ok(iter) => iter.collect(),
            Err(_) => Vec::new(), // fully occluded
        })
        .collect();

    // ego translates forward (+z) at ego_speed; displacement per sweep is
    // quantized so the pose chain is exact in f64
    let step = quantize(spec.ego_speed * SWEEP_PERIOD_US as f64 * 1e-6, 1.0 / 64.0);
    let noise = (spec.radar_noise_sigma > 0.0)
        .then(|| Normal::new(0.0, spec.radar_noise_sigma).expect("sigma checked above"));

    let mut sweeps = Vec::with_capacity(spec.sweep_count);
    for i in 0..spec.sweep_count {
        let offset = i as f64 * step;
        let ego_to_global = Pose::from_translation(Vector3::new(0.0, 0.0, -offset));
        let timestamp_us = REF_TIMESTAMP_US - i as u64 * SWEEP_PERIOD_US;
        let mut points = Vec::new();
        for (obj, pixels) in objects.iter().zip(&visible) {
            if pixels.is_empty() {
                continue;
            }
            for _ in 0..spec.radar_points_per_object {
                let &(u, v) = pixels.choose(&mut rng).expect("non-empty pixel list");
                let mut d = obj.depth;
                if let Some(n) = noise {
                    d = (d + n.sample(&mut rng)).clamp(0.25, DEFAULT_DEPTH_CAP);
                }
                let p_ref = k.backproject(u as f64, v as f64, d).expect("positive depth");
                // reference camera frame == global frame here; shift into
                // the sweep's sensor frame
                let p_sensor = Vector3::new(p_ref.x, p_ref.y, p_ref.z + offset);
                points.push(RadarPoint {
                    position: p_sensor,
                    velocity: [0.0, 0.0],
                    rcs: 10.0,
                    timestamp_us,
                });
            }
        }
        sweeps.push(RadarSweep {
            points,
            sensor_to_ego: Pose::identity(),
            ego_to_global,
            timestamp_us,
        });
    }

    Ok(Scene {
        intrinsics: k,
        cam_to_ego: Pose::identity(),
        ref_ego_to_global: Pose::identity(),
        camera_timestamp_us: REF_TIMESTAMP_US,
        sweeps,
        masks,
        gt,
        guide,
        objects,
    })
}

/// Write a scene in the on-disk frame layout the pipeline reads:
/// `<dir>/{camera.png, masks.png, gt_depth.png, calib.json,
/// radar/sweep_NN.csv + .json}` with sweep_00 the newest.
pub fn write_scene(dir: &Path, scene: &Scene) -> Result<(), SynthError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source: std::io::Error| SynthError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io_err(dir))?;

    let camera_path = dir.join("camera.png");
    image::save_buffer(
        &camera_path,
        &scene.guide,
        scene.masks.width(),
        scene.masks.height(),
        image::ColorType::L8,
    )
    .map_err(|e| SynthError::Io {
        path: camera_path.clone(),
        source: std::io::Error::other(e.to_string()),
    })?;

    write_masks(&dir.join("masks.png"), &scene.masks)?;
    write_depth_png(&dir.join("gt_depth.png"), &scene.gt)?;

    let calib = SensorCalibration {
        intrinsics: Some([
            scene.intrinsics.fx,
            scene.intrinsics.fy,
            scene.intrinsics.cx,
            scene.intrinsics.cy,
        ]),
        width: Some(scene.intrinsics.width),
        height: Some(scene.intrinsics.height),
        sensor_to_ego: scene.cam_to_ego.to_row_major(),
        ego_to_global: scene.ref_ego_to_global.to_row_major(),
        timestamp_us: scene.camera_timestamp_us,
    };
    let calib_path = dir.join("calib.json");
    fs::write(&calib_path, serde_json::to_string_pretty(&calib).unwrap())
        .map_err(io_err(&calib_path))?;

    let radar_dir = dir.join("radar");
    fs::create_dir_all(&radar_dir).map_err(io_err(&radar_dir))?;
    for (i, sweep) in scene.sweeps.iter().enumerate() {
        write_sweep(&radar_dir.join(format!("sweep_{i:02}.csv")), sweep)?;
    }
    Ok(())
}
