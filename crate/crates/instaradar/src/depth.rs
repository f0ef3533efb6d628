//! Sparse depth maps: image-sized grids of optional metric depths.

use thiserror::Error;

/// Default maximum valid depth, in meters.
pub const DEFAULT_DEPTH_CAP: f64 = 80.0;

#[derive(Debug, Error)]
pub enum DepthMapError {
    #[error("depth {depth} out of range (0, {cap}]")]
    DepthOutOfRange { depth: f64, cap: f64 },
    #[error("pixel ({u}, {v}) outside {width}x{height} map")]
    PixelOutOfBounds { u: u32, v: u32, width: u32, height: u32 },
    #[error("crop {crop_width}x{crop_height}+{x}+{y} exceeds {width}x{height} map")]
    CropOutOfBounds {
        crop_width: u32,
        crop_height: u32,
        x: u32,
        y: u32,
        width: u32,
        height: u32,
    },
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(u32, u32, u32, u32),
}

/// W x H grid of optional depths in meters. Invalid pixels are stored as 0;
/// every valid depth d satisfies 0 < d <= cap.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseDepthMap {
    width: u32,
    height: u32,
    cap: f64,
    data: Vec<f64>,
}

impl SparseDepthMap {
    pub fn new(width: u32, height: u32, cap: f64) -> Self {
        assert!(cap > 0.0, "depth cap must be positive");
        Self {
            width,
            height,
            cap,
            data: vec![0.0; width as usize * height as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    fn index(&self, u: u32, v: u32) -> usize {
        v as usize * self.width as usize + u as usize
    }

    pub fn get(&self, u: u32, v: u32) -> Option<f64> {
        if u >= self.width || v >= self.height {
            return None;
        }
        let d = self.data[self.index(u, v)];
        (d > 0.0).then_some(d)
    }

    pub fn is_valid(&self, u: u32, v: u32) -> bool {
        self.get(u, v).is_some()
    }

    pub fn set(&mut self, u: u32, v: u32, depth: f64) -> Result<(), DepthMapError> {
        if u >= self.width || v >= self.height {
            return Err(DepthMapError::PixelOutOfBounds {
                u,
                v,
                width: self.width,
                height: self.height,
            });
        }
        if !depth.is_finite() || depth <= 0.0 || depth > self.cap {
            return Err(DepthMapError::DepthOutOfRange { depth, cap: self.cap });
        }
        let i = self.index(u, v);
        self.data[i] = depth;
        Ok(())
    }

    /// Write `depth` only if the pixel is invalid or currently farther.
    pub fn set_min(&mut self, u: u32, v: u32, depth: f64) -> Result<(), DepthMapError> {
        match self.get(u, v) {
            Some(existing) if existing <= depth => Ok(()),
            _ => self.set(u, v, depth),
        }
    }

    pub fn clear(&mut self, u: u32, v: u32) {
        if u < self.width && v < self.height {
            let i = self.index(u, v);
            self.data[i] = 0.0;
        }
    }

    pub fn valid_count(&self) -> usize {
        self.data.iter().filter(|d| **d > 0.0).count()
    }

    /// Fraction of valid pixels.
    pub fn density(&self) -> f64 {
        self.valid_count() as f64 / self.data.len() as f64
    }

    /// Valid pixels in row-major order as (u, v, depth).
    pub fn iter_valid(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        self.data.iter().enumerate().filter_map(move |(i, d)| {
            (*d > 0.0).then(|| {
                let u = (i % self.width as usize) as u32;
                let v = (i / self.width as usize) as u32;
                (u, v, *d)
            })
        })
    }

    pub fn crop(&self, x: u32, y: u32, crop_width: u32, crop_height: u32) -> Result<Self, DepthMapError> {
        if x.checked_add(crop_width).is_none_or(|r| r > self.width)
            || y.checked_add(crop_height).is_none_or(|b| b > self.height)
        {
            return Err(DepthMapError::CropOutOfBounds {
                crop_width,
                crop_height,
                x,
                y,
                width: self.width,
                height: self.height,
            });
        }
        let mut out = Self::new(crop_width, crop_height, self.cap);
        for v in 0..crop_height {
            for u in 0..crop_width {
                let i = self.index(x + u, y + v);
                let j = out.index(u, v);
                out.data[j] = self.data[i];
            }
        }
        Ok(out)
    }

    pub fn same_dimensions(&self, other: &Self) -> Result<(), DepthMapError> {
        if self.width != other.width || self.height != other.height {
            return Err(DepthMapError::DimensionMismatch(
                self.width,
                self.height,
                other.width,
                other.height,
            ));
        }
        Ok(())
    }
}
