//! Rigid-body transforms, pinhole camera model, projection and backprojection.
//!
//! Frame conventions: camera has +z forward, +x right, +y down. Pixel
//! coordinates are (u, v) = (column, row), rounded to nearest with
//! ties-to-even so rasterization is deterministic across platforms.

use nalgebra::{Matrix3, Matrix4, Quaternion, Rotation3, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default near plane for projection, in meters.
pub const DEFAULT_Z_MIN: f64 = 0.1;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("quaternion norm is zero or non-finite")]
    DegenerateQuaternion,
    #[error("invalid intrinsics: {0}")]
    InvalidIntrinsics(String),
    #[error("backprojection requires depth > 0, got {0}")]
    NonPositiveDepth(f64),
    #[error("matrix is not a rigid transform: {0}")]
    NotRigid(String),
}

/// Rigid transform in SE(3): rotation as a unit quaternion plus translation
/// in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    rotation: UnitQuaternion<f64>,
    translation: Vector3<f64>,
}

impl Pose {
    pub fn identity() -> Self {
        Self {
            rotation: UnitQuaternion::identity(),
            translation: Vector3::zeros(),
        }
    }

    /// Construct from quaternion components (w, x, y, z) and translation.
    /// The quaternion is renormalized; a zero or non-finite quaternion is
    /// rejected.
    pub fn new(qw: f64, qx: f64, qy: f64, qz: f64, translation: Vector3<f64>) -> Result<Self, GeomError> {
        let q = Quaternion::new(qw, qx, qy, qz);
        let n = q.norm();
        if !n.is_finite() || n < 1e-12 {
            return Err(GeomError::DegenerateQuaternion);
        }
        Ok(Self {
            rotation: UnitQuaternion::from_quaternion(q),
            translation,
        })
    }

    pub fn from_translation(translation: Vector3<f64>) -> Self {
        Self {
            rotation: UnitQuaternion::identity(),
            translation,
        }
    }

    pub fn from_rotation(rotation: UnitQuaternion<f64>) -> Self {
        Self {
            rotation,
            translation: Vector3::zeros(),
        }
    }

    /// Parse a 4x4 homogeneous matrix given as 16 row-major floats, as found
    /// in calibration files. The upper 3x3 block must be orthonormal within
    /// 1e-6 and the last row must be (0, 0, 0, 1).
    pub fn from_row_major(m: &[f64; 16]) -> Result<Self, GeomError> {
        if m[12].abs() > 1e-9 || m[13].abs() > 1e-9 || m[14].abs() > 1e-9 || (m[15] - 1.0).abs() > 1e-9 {
            return Err(GeomError::NotRigid("last row must be 0 0 0 1".into()));
        }
        let r = Matrix3::new(m[0], m[1], m[2], m[4], m[5], m[6], m[8], m[9], m[10]);
        let err = (r.transpose() * r - Matrix3::identity()).norm();
        if !err.is_finite() || err > 1e-6 {
            return Err(GeomError::NotRigid(format!(
                "rotation block orthonormality residual {err:.3e}"
            )));
        }
        if r.determinant() < 0.0 {
            return Err(GeomError::NotRigid("rotation block is a reflection".into()));
        }
        let rotation = UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix(&r));
        Ok(Self {
            rotation,
            translation: Vector3::new(m[3], m[7], m[11]),
        })
    }

    /// Homogeneous 4x4 matrix, row-major.
    pub fn to_row_major(&self) -> [f64; 16] {
        let m = self.to_matrix();
        let mut out = [0.0; 16];
        for r in 0..4 {
            for c in 0..4 {
                out[4 * r + c] = m[(r, c)];
            }
        }
        out
    }

    pub fn to_matrix(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0)
            .copy_from(self.rotation.to_rotation_matrix().matrix());
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }

    pub fn rotation(&self) -> &UnitQuaternion<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> &Vector3<f64> {
        &self.translation
    }

    /// Composition: the result applies `other` first, then `self`.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn invert(&self) -> Pose {
        let rot_inv = self.rotation.inverse();
        Pose {
            rotation: rot_inv,
            translation: -(rot_inv * self.translation),
        }
    }

    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }
}

/// Pinhole camera model. Focal lengths and principal point in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
}

impl CameraIntrinsics {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64, width: u32, height: u32) -> Result<Self, GeomError> {
        if !(fx > 0.0 && fy > 0.0) {
            return Err(GeomError::InvalidIntrinsics(format!(
                "focal lengths must be positive, got fx={fx} fy={fy}"
            )));
        }
        if width == 0 || height == 0 {
            return Err(GeomError::InvalidIntrinsics("image size must be nonzero".into()));
        }
        if !(0.0..width as f64).contains(&cx) || !(0.0..height as f64).contains(&cy) {
            return Err(GeomError::InvalidIntrinsics(format!(
                "principal point ({cx}, {cy}) outside {width}x{height} image"
            )));
        }
        Ok(Self { fx, fy, cx, cy, width, height })
    }

    /// Project a camera-frame point to an integer pixel with depth. Returns
    /// `None` when the point is closer than `DEFAULT_Z_MIN` or the rounded
    /// pixel falls outside the image.
    pub fn project(&self, pt_cam: &Vector3<f64>) -> Option<PixelDepth> {
        self.project_with_min(pt_cam, DEFAULT_Z_MIN)
    }

    pub fn project_with_min(&self, pt_cam: &Vector3<f64>, z_min: f64) -> Option<PixelDepth> {
        let z = pt_cam.z;
        if !z.is_finite() || z <= z_min {
            return None;
        }
        let u = (self.fx * pt_cam.x / z + self.cx).round_ties_even();
        let v = (self.fy * pt_cam.y / z + self.cy).round_ties_even();
        if u < 0.0 || v < 0.0 || u >= self.width as f64 || v >= self.height as f64 {
            return None;
        }
        Some(PixelDepth {
            u: u as u32,
            v: v as u32,
            depth: z,
        })
    }

    /// Continuous (unrounded) image coordinates of a camera-frame point,
    /// with no bounds check. `None` when z <= z_min.
    pub fn project_unrounded(&self, pt_cam: &Vector3<f64>, z_min: f64) -> Option<(f64, f64, f64)> {
        let z = pt_cam.z;
        if !z.is_finite() || z <= z_min {
            return None;
        }
        Some((self.fx * pt_cam.x / z + self.cx, self.fy * pt_cam.y / z + self.cy, z))
    }

    /// Inverse of `project` for a pixel at a known depth.
    pub fn backproject(&self, u: f64, v: f64, depth: f64) -> Result<Vector3<f64>, GeomError> {
        if !(depth > 0.0) {
            return Err(GeomError::NonPositiveDepth(depth));
        }
        Ok(Vector3::new(
            (u - self.cx) / self.fx * depth,
            (v - self.cy) / self.fy * depth,
            depth,
        ))
    }
}

/// A projected radar/lidar return: integer pixel plus metric depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelDepth {
    pub u: u32,
    pub v: u32,
    pub depth: f64,
}

/// Per-sensor, per-frame calibration record. Cameras carry intrinsics;
/// radar calibration uses the same schema without them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SensorCalibration {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intrinsics: Option<[f64; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub height: Option<u32>,
    pub sensor_to_ego: [f64; 16],
    pub ego_to_global: [f64; 16],
    pub timestamp_us: u64,
}

impl SensorCalibration {
    pub fn camera_intrinsics(&self) -> Result<CameraIntrinsics, GeomError> {
        let [fx, fy, cx, cy] = self.intrinsics.ok_or_else(|| {
            GeomError::InvalidIntrinsics("calibration record has no intrinsics".into())
        })?;
        let width = self
            .width
            .ok_or_else(|| GeomError::InvalidIntrinsics("calibration record has no width".into()))?;
        let height = self
            .height
            .ok_or_else(|| GeomError::InvalidIntrinsics("calibration record has no height".into()))?;
        CameraIntrinsics::new(fx, fy, cx, cy, width, height)
    }

    pub fn sensor_to_ego(&self) -> Result<Pose, GeomError> {
        Pose::from_row_major(&self.sensor_to_ego)
    }

    pub fn ego_to_global(&self) -> Result<Pose, GeomError> {
        Pose::from_row_major(&self.ego_to_global)
    }
}
