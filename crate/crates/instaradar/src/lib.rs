//! Radar depth preprocessing for camera-radar perception: multi-sweep
//! accumulation and projection, instance-guided depth expansion with its
//! baseline expanders, sparse-depth evaluation metrics, and the geometric
//! lift / voxel-pooling view transform to bird's-eye view.

pub mod bev;
pub mod depth;
pub mod eval;
pub mod expand;
pub mod geom;
pub mod masks;
pub mod pipeline;
pub mod radar;
pub mod synth;

pub use depth::{SparseDepthMap, DEFAULT_DEPTH_CAP};
pub use expand::{ExpansionMethod, ExpansionReport};
pub use geom::{CameraIntrinsics, PixelDepth, Pose};
pub use masks::InstanceMaskSet;
pub use radar::{RadarPoint, RadarSweep};
