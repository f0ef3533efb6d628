//! Geometric view transform from image depth to bird's-eye view: depth-bin
//! discretization, frustum generation, depth-distribution lifting, and
//! pillar-style voxel pooling.

use crate::geom::{CameraIntrinsics, GeomError, Pose};
use nalgebra::Vector3;
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Default depth-bin range and count.
pub const DEFAULT_BIN_MIN_M: f64 = 1.0;
pub const DEFAULT_BIN_MAX_M: f64 = 80.0;
pub const DEFAULT_BIN_COUNT: usize = 118;

pub const BEVG_MAGIC: &[u8; 4] = b"BEVG";

#[derive(Debug, Error)]
pub enum BevError {
    #[error("invalid depth bins: {0}")]
    BadBins(String),
    #[error("downsample {downsample} does not divide image size {width}x{height}")]
    NonDivisibleDownsample { downsample: u32, width: u32, height: u32 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("distribution at cell ({u}, {v}) sums to {sum}, expected 1 within 1e-6")]
    NotNormalized { u: u32, v: u32, sum: f64 },
    #[error("invalid grid spec: {0}")]
    BadGridSpec(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Monotonically increasing depth-bin edges, `count + 1` values.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthBins {
    edges: Vec<f64>,
}

impl DepthBins {
    pub fn uniform(d_min: f64, d_max: f64, count: usize) -> Result<Self, BevError> {
        if !(d_min > 0.0) || d_max <= d_min || count == 0 {
            return Err(BevError::BadBins(format!(
                "need 0 < d_min < d_max and count > 0, got [{d_min}, {d_max}] x {count}"
            )));
        }
        let step = (d_max - d_min) / count as f64;
        let mut edges: Vec<f64> = (0..count).map(|i| d_min + i as f64 * step).collect();
        edges.push(d_max);
        Ok(Self { edges })
    }

    pub fn from_edges(edges: Vec<f64>) -> Result<Self, BevError> {
        if edges.len() < 2 || edges[0] <= 0.0 || edges.windows(2).any(|w| w[1] <= w[0]) {
            return Err(BevError::BadBins("edges must be positive and strictly increasing".into()));
        }
        Ok(Self { edges })
    }

    pub fn count(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn center(&self, bin: usize) -> f64 {
        (self.edges[bin] + self.edges[bin + 1]) / 2.0
    }

    /// Bin containing `depth` under half-open intervals, the top edge
    /// exclusive.
    pub fn bin_of(&self, depth: f64) -> Option<usize> {
        if depth < self.edges[0] || depth >= self.edges[self.count()] {
            return None;
        }
        Some(match self.edges.partition_point(|&e| e <= depth) {
            0 => 0,
            i => i - 1,
        })
    }
}

/// Per feature-grid-pixel categorical distribution over depth bins, each
/// pixel summing to 1 within 1e-6. Layout is row-major pixels, bins
/// innermost.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthDistribution {
    width: u32,
    height: u32,
    bins: usize,
    data: Vec<f64>,
}

impl DepthDistribution {
    pub fn new(width: u32, height: u32, bins: usize, data: Vec<f64>) -> Result<Self, BevError> {
        let expected = width as usize * height as usize * bins;
        if data.len() != expected {
            return Err(BevError::DimensionMismatch(format!(
                "distribution has {} entries, expected {expected}",
                data.len()
            )));
        }
        let dist = Self { width, height, bins, data };
        for v in 0..height {
            for u in 0..width {
                let sum: f64 = dist.at(u, v).iter().sum();
                if (sum - 1.0).abs() > 1e-6 {
                    return Err(BevError::NotNormalized { u, v, sum });
                }
            }
        }
        Ok(dist)
    }

    /// One-hot distribution from a sparse depth map sampled at feature-grid
    /// cell centers; cells with no depth (or out-of-range depth) get a
    /// uniform distribution carrying no preference.
    pub fn one_hot_from_depth(
        depth: &crate::depth::SparseDepthMap,
        downsample: u32,
        bins: &DepthBins,
    ) -> Result<Self, BevError> {
        check_downsample(depth.width(), depth.height(), downsample)?;
        let (gw, gh) = (depth.width() / downsample, depth.height() / downsample);
        let nb = bins.count();
        let mut data = vec![0.0; gw as usize * gh as usize * nb];
        for gv in 0..gh {
            for gu in 0..gw {
                // min over the cell's source pixels, matching the
                // rasterizer's nearest-wins rule
                let mut best: Option<f64> = None;
                for dv in 0..downsample {
                    for du in 0..downsample {
                        if let Some(d) = depth.get(gu * downsample + du, gv * downsample + dv) {
                            best = Some(best.map_or(d, |b: f64| b.min(d)));
                        }
                    }
                }
                let base = (gv as usize * gw as usize + gu as usize) * nb;
                match best.and_then(|d| bins.bin_of(d)) {
                    Some(bin) => data[base + bin] = 1.0,
                    None => {
                        for slot in &mut data[base..base + nb] {
                            *slot = 1.0 / nb as f64;
                        }
                    }
                }
            }
        }
        Self::new(gw, gh, nb, data)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn at(&self, u: u32, v: u32) -> &[f64] {
        let base = (v as usize * self.width as usize + u as usize) * self.bins;
        &self.data[base..base + self.bins]
    }
}

/// Dense per-pixel feature map on the feature grid, channels innermost.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    pub width: u32,
    pub height: u32,
    pub channels: usize,
    pub data: Vec<f64>,
}

impl FeatureMap {
    pub fn constant(width: u32, height: u32, channels: usize, value: f64) -> Self {
        Self {
            width,
            height,
            channels,
            data: vec![value; width as usize * height as usize * channels],
        }
    }

    pub fn at(&self, u: u32, v: u32) -> &[f64] {
        let base = (v as usize * self.width as usize + u as usize) * self.channels;
        &self.data[base..base + self.channels]
    }
}

/// One frustum sample: feature-grid cell, depth bin, and the backprojected
/// camera-frame point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrustumPoint {
    pub grid_u: u32,
    pub grid_v: u32,
    pub bin: usize,
    pub point_cam: Vector3<f64>,
}

fn check_downsample(width: u32, height: u32, downsample: u32) -> Result<(), BevError> {
    if downsample == 0 || width % downsample != 0 || height % downsample != 0 {
        return Err(BevError::NonDivisibleDownsample { downsample, width, height });
    }
    Ok(())
}

/// Backproject every feature-grid cell center at every bin-center depth.
/// Order is row-major over cells with bins innermost, which fixes the
/// summation order downstream.
pub fn make_frustum(
    k: &CameraIntrinsics,
    downsample: u32,
    bins: &DepthBins,
) -> Result<Vec<FrustumPoint>, BevError> {
    check_downsample(k.width, k.height, downsample)?;
    let (gw, gh) = (k.width / downsample, k.height / downsample);
    let mut out = Vec::with_capacity(gw as usize * gh as usize * bins.count());
    for gv in 0..gh {
        for gu in 0..gw {
            // source-image coordinates of the cell center
            let u_px = (gu as f64 + 0.5) * downsample as f64 - 0.5;
            let v_px = (gv as f64 + 0.5) * downsample as f64 - 0.5;
            for bin in 0..bins.count() {
                let point_cam = k.backproject(u_px, v_px, bins.center(bin))?;
                out.push(FrustumPoint { grid_u: gu, grid_v: gv, bin, point_cam });
            }
        }
    }
    Ok(out)
}

/// Frustum features: per (cell, bin), a C-vector. Same ordering as
/// `make_frustum`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrustumFeatures {
    pub width: u32,
    pub height: u32,
    pub bins: usize,
    pub channels: usize,
    pub data: Vec<f64>,
}

impl FrustumFeatures {
    pub fn at(&self, u: u32, v: u32, bin: usize) -> &[f64] {
        let base =
            ((v as usize * self.width as usize + u as usize) * self.bins + bin) * self.channels;
        &self.data[base..base + self.channels]
    }
}

/// Outer product of per-pixel features with the depth distribution:
/// frustum_feature(u, v, bin) = dist(u, v, bin) * feature(u, v).
pub fn lift(features: &FeatureMap, dist: &DepthDistribution) -> Result<FrustumFeatures, BevError> {
    if features.width != dist.width || features.height != dist.height {
        return Err(BevError::DimensionMismatch(format!(
            "feature grid {}x{} vs distribution {}x{}",
            features.width, features.height, dist.width, dist.height
        )));
    }
    let mut data =
        Vec::with_capacity(dist.data.len() * features.channels);
    for v in 0..dist.height {
        for u in 0..dist.width {
            let f = features.at(u, v);
            for &p in dist.at(u, v) {
                data.extend(f.iter().map(|&x| p * x));
            }
        }
    }
    Ok(FrustumFeatures {
        width: dist.width,
        height: dist.height,
        bins: dist.bins,
        channels: features.channels,
        data,
    })
}

/// BEV grid extent and resolution in the ego frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BevGridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub resolution: f64,
    pub channels: usize,
}

impl BevGridSpec {
    pub fn validate(&self) -> Result<(usize, usize), BevError> {
        if !(self.resolution > 0.0) || self.channels == 0 {
            return Err(BevError::BadGridSpec(format!(
                "resolution {} and channels {} must be positive",
                self.resolution, self.channels
            )));
        }
        let nx = (self.x_max - self.x_min) / self.resolution;
        let ny = (self.y_max - self.y_min) / self.resolution;
        if nx <= 0.0 || ny <= 0.0 || (nx - nx.round()).abs() > 1e-9 || (ny - ny.round()).abs() > 1e-9 {
            return Err(BevError::BadGridSpec(format!(
                "extent must be a positive integer multiple of resolution, got {nx} x {ny} cells"
            )));
        }
        Ok((nx.round() as usize, ny.round() as usize))
    }
}

/// X x Y grid of C-dimensional feature accumulators, x-major layout.
#[derive(Debug, Clone, PartialEq)]
pub struct BevGrid {
    pub spec: BevGridSpec,
    pub nx: usize,
    pub ny: usize,
    pub data: Vec<f64>,
}

impl BevGrid {
    pub fn zeros(spec: BevGridSpec) -> Result<Self, BevError> {
        let (nx, ny) = spec.validate()?;
        Ok(Self {
            spec,
            nx,
            ny,
            data: vec![0.0; nx * ny * spec.channels],
        })
    }

    pub fn cell(&self, ix: usize, iy: usize) -> &[f64] {
        let base = (ix * self.ny + iy) * self.spec.channels;
        &self.data[base..base + self.spec.channels]
    }

    fn cell_mut(&mut self, ix: usize, iy: usize) -> &mut [f64] {
        let base = (ix * self.ny + iy) * self.spec.channels;
        &mut self.data[base..base + self.spec.channels]
    }

    pub fn total_mass(&self) -> f64 {
        self.data.iter().sum()
    }

    /// Cell-wise addition; the merge step for sharded pooling.
    pub fn merge(&mut self, other: &BevGrid) -> Result<(), BevError> {
        if self.spec != other.spec {
            return Err(BevError::DimensionMismatch("grid specs differ".into()));
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        Ok(())
    }
}

/// Sum features into the BEV cell under each point's ground-plane (x, y),
/// ignoring z. Cells are half-open: a point on a cell's max edge belongs to
/// the next cell, and the grid's global max edge is exclusive. Iteration
/// follows the frustum order, so output is bit-deterministic.
pub fn voxel_pool(
    frustum: &[FrustumPoint],
    features: &FrustumFeatures,
    cam_to_ego: &Pose,
    spec: &BevGridSpec,
) -> Result<BevGrid, BevError> {
    if features.channels != spec.channels {
        return Err(BevError::DimensionMismatch(format!(
            "features have {} channels, grid spec {}",
            features.channels, spec.channels
        )));
    }
    let mut grid = BevGrid::zeros(*spec)?;
    for fp in frustum {
        let ego = cam_to_ego.transform_point(&fp.point_cam);
        if !ego.x.is_finite() || !ego.y.is_finite() {
            continue;
        }
        let fx = ((ego.x - spec.x_min) / spec.resolution).floor();
        let fy = ((ego.y - spec.y_min) / spec.resolution).floor();
        if fx < 0.0 || fy < 0.0 || fx >= grid.nx as f64 || fy >= grid.ny as f64 {
            continue;
        }
        let f = features.at(fp.grid_u, fp.grid_v, fp.bin);
        let cell = grid.cell_mut(fx as usize, fy as usize);
        for (a, b) in cell.iter_mut().zip(f) {
            *a += b;
        }
    }
    Ok(grid)
}

/// Write the BEVG binary: magic, u32 X/Y/C, f32 x_min/y_min/resolution,
/// then X*Y*C little-endian f32 values in x-major order.
pub fn write_bev(path: &Path, grid: &BevGrid) -> Result<(), BevError> {
    let mut bytes = Vec::with_capacity(4 + 3 * 4 + 3 * 4 + grid.data.len() * 4);
    bytes.extend_from_slice(BEVG_MAGIC);
    bytes.extend_from_slice(&(grid.nx as u32).to_le_bytes());
    bytes.extend_from_slice(&(grid.ny as u32).to_le_bytes());
    bytes.extend_from_slice(&(grid.spec.channels as u32).to_le_bytes());
    bytes.extend_from_slice(&(grid.spec.x_min as f32).to_le_bytes());
    bytes.extend_from_slice(&(grid.spec.y_min as f32).to_le_bytes());
    bytes.extend_from_slice(&(grid.spec.resolution as f32).to_le_bytes());
    for &v in &grid.data {
        bytes.extend_from_slice(&(v as f32).to_le_bytes());
    }
    fs::write(path, bytes).map_err(|source| BevError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Inverse of `write_bev` (values come back at f32 precision).
pub fn read_bev(path: &Path) -> Result<BevGrid, BevError> {
    let bytes = fs::read(path).map_err(|source| BevError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let fail = |message: String| BevError::Format { path: path.to_path_buf(), message };
    if bytes.len() < 28 || &bytes[0..4] != BEVG_MAGIC {
        return Err(fail("missing BEVG magic".into()));
    }
    let u32_at = |off: usize| u32::from_le_bytes(bytes[off..off + 4].try_into().unwrap());
    let f32_at = |off: usize| f32::from_le_bytes(bytes[off..off + 4].try_into().unwrap());
    let nx = u32_at(4) as usize;
    let ny = u32_at(8) as usize;
    let channels = u32_at(12) as usize;
    let x_min = f32_at(16) as f64;
    let y_min = f32_at(20) as f64;
    let resolution = f32_at(24) as f64;
    let n = nx * ny * channels;
    if bytes.len() != 28 + 4 * n {
        return Err(fail(format!("expected {} payload bytes, got {}", 4 * n, bytes.len() - 28)));
    }
    let data: Vec<f64> = (0..n).map(|i| f32_at(28 + 4 * i) as f64).collect();
    let spec = BevGridSpec {
        x_min,
        x_max: x_min + resolution * nx as f64,
        y_min,
        y_max: y_min + resolution * ny as f64,
        resolution,
        channels,
    };
    Ok(BevGrid { spec, nx, ny, data })
}
