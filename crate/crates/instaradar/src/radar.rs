//! Radar sweep parsing, multi-sweep accumulation into the reference camera
//! frame, and rasterization to a sparse depth map.
//!
//! Sweep files are CSV with header `x,y,z,vx,vy,rcs,timestamp_us` and a JSON
//! calibration sidecar at the same path with the extension replaced by
//! `.json`.

use crate::depth::SparseDepthMap;
use crate::geom::{CameraIntrinsics, Pose, SensorCalibration};
use nalgebra::Vector3;
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const RADAR_CSV_HEADER: &str = "x,y,z,vx,vy,rcs,timestamp_us";

/// Default number of sweeps accumulated per frame.
pub const DEFAULT_SWEEP_COUNT: usize = 5;

#[derive(Debug, Error)]
pub enum RadarError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: expected header '{RADAR_CSV_HEADER}', got '{found}'")]
    BadHeader { path: PathBuf, found: String },
    #[error("{path}: row {row}, field '{field}': cannot parse '{value}'")]
    BadField {
        path: PathBuf,
        row: usize,
        field: &'static str,
        value: String,
    },
    #[error("{path}: row {row}: expected 7 fields, got {count}")]
    BadColumnCount { path: PathBuf, row: usize, count: usize },
    #[error("missing calibration sidecar {0}")]
    MissingCalibration(PathBuf),
    #[error("{path}: calibration: {message}")]
    BadCalibration { path: PathBuf, message: String },
    #[error("sweep count {requested} out of range: {available} sweeps available, need at least 1")]
    SweepCountOutOfRange { requested: usize, available: usize },
}

/// One radar return in the sensor frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadarPoint {
    pub position: Vector3<f64>,
    /// Compensated radial velocity in the ego plane (vx, vy), m/s.
    pub velocity: [f64; 2],
    /// Radar cross section, dBsm.
    pub rcs: f64,
    pub timestamp_us: u64,
}

/// A timestamped set of radar returns with calibration.
#[derive(Debug, Clone)]
pub struct RadarSweep {
    pub points: Vec<RadarPoint>,
    pub sensor_to_ego: Pose,
    pub ego_to_global: Pose,
    pub timestamp_us: u64,
}

fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

fn parse_float(
    path: &Path,
    row: usize,
    field: &'static str,
    value: &str,
) -> Result<f64, RadarError> {
    value.trim().parse::<f64>().map_err(|_| RadarError::BadField {
        path: path.to_path_buf(),
        row,
        field,
        value: value.to_string(),
    })
}

/// Parse a radar sweep CSV plus its calibration sidecar. Row order is
/// preserved.
pub fn parse_sweep(path: &Path) -> Result<RadarSweep, RadarError> {
    let text = fs::read_to_string(path).map_err(|source| RadarError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    if header.trim_end() != RADAR_CSV_HEADER {
        return Err(RadarError::BadHeader {
            path: path.to_path_buf(),
            found: header.to_string(),
        });
    }

    let mut points = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = i + 2; // 1-based, counting the header
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(RadarError::BadColumnCount {
                path: path.to_path_buf(),
                row,
                count: fields.len(),
            });
        }
        let x = parse_float(path, row, "x", fields[0])?;
        let y = parse_float(path, row, "y", fields[1])?;
        let z = parse_float(path, row, "z", fields[2])?;
        let vx = parse_float(path, row, "vx", fields[3])?;
        let vy = parse_float(path, row, "vy", fields[4])?;
        let rcs = parse_float(path, row, "rcs", fields[5])?;
        let timestamp_us =
            fields[6]
                .trim()
                .parse::<u64>()
                .map_err(|_| RadarError::BadField {
                    path: path.to_path_buf(),
                    row,
                    field: "timestamp_us",
                    value: fields[6].to_string(),
                })?;
        points.push(RadarPoint {
            position: Vector3::new(x, y, z),
            velocity: [vx, vy],
            rcs,
            timestamp_us,
        });
    }

    let sidecar = sidecar_path(path);
    if !sidecar.exists() {
        return Err(RadarError::MissingCalibration(sidecar));
    }
    let calib_text = fs::read_to_string(&sidecar).map_err(|source| RadarError::Io {
        path: sidecar.clone(),
        source,
    })?;
    let calib: SensorCalibration =
        serde_json::from_str(&calib_text).map_err(|e| RadarError::BadCalibration {
            path: sidecar.clone(),
            message: e.to_string(),
        })?;
    let sensor_to_ego = calib.sensor_to_ego().map_err(|e| RadarError::BadCalibration {
        path: sidecar.clone(),
        message: e.to_string(),
    })?;
    let ego_to_global = calib.ego_to_global().map_err(|e| RadarError::BadCalibration {
        path: sidecar.clone(),
        message: e.to_string(),
    })?;

    Ok(RadarSweep {
        points,
        sensor_to_ego,
        ego_to_global,
        timestamp_us: calib.timestamp_us,
    })
}

/// Write a sweep as CSV plus calibration sidecar, the exact inverse of
/// `parse_sweep` (floats use shortest round-trip formatting).
pub fn write_sweep(path: &Path, sweep: &RadarSweep) -> Result<(), RadarError> {
    let mut out = String::from(RADAR_CSV_HEADER);
    out.push('\n');
    for p in &sweep.points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            p.position.x, p.position.y, p.position.z, p.velocity[0], p.velocity[1], p.rcs, p.timestamp_us
        ));
    }
    fs::write(path, out).map_err(|source| RadarError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let calib = SensorCalibration {
        intrinsics: None,
        width: None,
        height: None,
        sensor_to_ego: sweep.sensor_to_ego.to_row_major(),
        ego_to_global: sweep.ego_to_global.to_row_major(),
        timestamp_us: sweep.timestamp_us,
    };
    let sidecar = sidecar_path(path);
    fs::write(&sidecar, serde_json::to_string_pretty(&calib).unwrap()).map_err(|source| {
        RadarError::Io {
            path: sidecar.clone(),
            source,
        }
    })
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AccumulateOptions {
    /// Displace each point by its planar velocity times the time gap to the
    /// reference timestamp before transforming. Off by default.
    pub doppler_compensate: bool,
    /// Reference timestamp, required when doppler_compensate is set.
    pub ref_timestamp_us: u64,
}

/// Transform the points of the newest `n` sweeps into the reference camera
/// frame and concatenate them. Sweeps must be ordered newest-first; the
/// reference frame's own sweep is included in the count.
pub fn accumulate(
    sweeps: &[RadarSweep],
    ref_ego_to_global: &Pose,
    ref_cam_to_ego: &Pose,
    n: usize,
) -> Result<Vec<Vector3<f64>>, RadarError> {
    accumulate_with(sweeps, ref_ego_to_global, ref_cam_to_ego, n, AccumulateOptions::default())
}

pub fn accumulate_with(
    sweeps: &[RadarSweep],
    ref_ego_to_global: &Pose,
    ref_cam_to_ego: &Pose,
    n: usize,
    opts: AccumulateOptions,
) -> Result<Vec<Vector3<f64>>, RadarError> {
    if n == 0 || n > sweeps.len() {
        return Err(RadarError::SweepCountOutOfRange {
            requested: n,
            available: sweeps.len(),
        });
    }
    let global_to_ref_cam = ref_cam_to_ego.invert().compose(&ref_ego_to_global.invert());
    let mut out = Vec::with_capacity(sweeps[..n].iter().map(|s| s.points.len()).sum());
    for sweep in &sweeps[..n] {
        let sensor_to_cam = global_to_ref_cam
            .compose(&sweep.ego_to_global)
            .compose(&sweep.sensor_to_ego);
        for p in &sweep.points {
            let mut pos = p.position;
            if opts.doppler_compensate {
                let dt = (opts.ref_timestamp_us as f64 - p.timestamp_us as f64) * 1e-6;
                // velocity lives in the sweep's ego plane
                let mut ego = sweep.sensor_to_ego.transform_point(&pos);
                ego.x += p.velocity[0] * dt;
                ego.y += p.velocity[1] * dt;
                pos = sweep.sensor_to_ego.invert().transform_point(&ego);
            }
            out.push(sensor_to_cam.transform_point(&pos));
        }
    }
    Ok(out)
}

/// Project camera-frame points to a sparse depth map. Points deeper than
/// `cap` are discarded; same-pixel collisions keep the minimum depth.
pub fn rasterize(points_cam: &[Vector3<f64>], k: &CameraIntrinsics, cap: f64) -> SparseDepthMap {
    let mut map = SparseDepthMap::new(k.width, k.height, cap);
    for p in points_cam {
        if let Some(px) = k.project(p) {
            if px.depth <= cap {
                map.set_min(px.u, px.v, px.depth).expect("projected pixel in bounds");
            }
        }
    }
    map
}
