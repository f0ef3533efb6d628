//! Dataset layout, pipeline configuration, and the frame-parallel command
//! implementations behind the CLI.
//!
//! Frame layout: `<root>/<frame_id>/{camera.png, masks.png, gt_depth.png,
//! calib.json, radar/sweep_00.csv...}`, sweep_00 newest. Per-frame outputs
//! go to distinct paths and aggregate reductions fold in frame order, so
//! results are identical at any parallelism degree.

use crate::bev::{
    lift, make_frustum, voxel_pool, write_bev, BevError, BevGrid, BevGridSpec, DepthBins,
    DepthDistribution, FeatureMap, DEFAULT_BIN_COUNT, DEFAULT_BIN_MAX_M, DEFAULT_BIN_MIN_M,
};
use crate::depth::{SparseDepthMap, DEFAULT_DEPTH_CAP};
use crate::eval::{
    accumulate_metrics, read_depth_png, write_depth_png, MetricAccumulator, MetricReport,
};
use crate::expand::{expand, ExpandInputs, ExpansionMethod, ExpansionReport};
use crate::geom::SensorCalibration;
use crate::masks::load_masks;
use crate::radar::{accumulate, parse_sweep, rasterize, DEFAULT_SWEEP_COUNT};
use crate::synth::{generate, write_scene, SceneSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("frame {frame_id}: {message}")]
    Frame { frame_id: String, message: String },
    #[error("no frames found under {0}")]
    NoFrames(PathBuf),
    #[error("frame sets differ: missing from prediction dir: [{missing_pred}]; missing from ground-truth dir: [{missing_gt}]")]
    FrameSetMismatch { missing_pred: String, missing_gt: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl PipelineError {
    fn frame(frame_id: &str, err: impl std::fmt::Display) -> Self {
        PipelineError::Frame {
            frame_id: frame_id.to_string(),
            message: err.to_string(),
        }
    }
}

/// Crop window: size plus top-left offset in the source image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CropSpec {
    pub width: u32,
    pub height: u32,
    pub x: u32,
    pub y: u32,
}

impl CropSpec {
    /// Parse "WxH+X+Y"; the offset part may be omitted ("WxH" crops at the
    /// origin).
    pub fn parse(s: &str) -> Result<Self, PipelineError> {
        let bad = || PipelineError::Config(format!("cannot parse crop '{s}', expected WxH+X+Y"));
        let (size, offset) = match s.split_once('+') {
            Some((size, rest)) => (size, Some(rest)),
            None => (s, None),
        };
        let (w, h) = size.split_once('x').ok_or_else(bad)?;
        let width = w.parse().map_err(|_| bad())?;
        let height = h.parse().map_err(|_| bad())?;
        let (x, y) = match offset {
            Some(rest) => {
                let (x, y) = rest.split_once('+').ok_or_else(bad)?;
                (x.parse().map_err(|_| bad())?, y.parse().map_err(|_| bad())?)
            }
            None => (0, 0),
        };
        Ok(CropSpec { width, height, x, y })
    }
}

impl std::fmt::Display for CropSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}+{}+{}", self.width, self.height, self.x, self.y)
    }
}

/// Flat pipeline configuration, loadable from JSON; command-line flags
/// override individual fields.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub sweeps_n: usize,
    pub depth_cap_m: f64,
    /// One of raw | height | jbf | insta.
    pub method: String,
    pub dh: f64,
    pub radius: u32,
    pub sigma_s: f64,
    pub sigma_r: f64,
    /// "WxH+X+Y", applied as the last geometric step.
    pub crop: Option<String>,
    /// Worker count; 0 uses all cores.
    pub jobs: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            sweeps_n: DEFAULT_SWEEP_COUNT,
            depth_cap_m: DEFAULT_DEPTH_CAP,
            method: "insta".to_string(),
            dh: crate::expand::DEFAULT_HEIGHT_EXTEND_M,
            radius: crate::expand::DEFAULT_JBF_RADIUS,
            sigma_s: crate::expand::DEFAULT_JBF_SIGMA_S,
            sigma_r: crate::expand::DEFAULT_JBF_SIGMA_R,
            crop: None,
            jobs: 0,
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = fs::read_to_string(path).map_err(|source| PipelineError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))
    }

    pub fn expansion_method(&self) -> Result<ExpansionMethod, PipelineError> {
        let method = match self.method.as_str() {
            "raw" => ExpansionMethod::Raw,
            "height" => ExpansionMethod::HeightExtend { dh: self.dh },
            "jbf" => ExpansionMethod::Jbf {
                radius: self.radius,
                sigma_s: self.sigma_s,
                sigma_r: self.sigma_r,
            },
            "insta" => ExpansionMethod::Insta,
            other => {
                return Err(PipelineError::Config(format!(
                    "unknown method '{other}', expected raw|height|jbf|insta"
                )))
            }
        };
        method
            .validate()
            .map_err(|e| PipelineError::Config(e.to_string()))?;
        if self.sweeps_n == 0 {
            return Err(PipelineError::Config("sweeps_n must be >= 1".into()));
        }
        if !(self.depth_cap_m > 0.0) {
            return Err(PipelineError::Config("depth_cap_m must be positive".into()));
        }
        Ok(method)
    }

    pub fn crop_spec(&self) -> Result<Option<CropSpec>, PipelineError> {
        self.crop.as_deref().map(CropSpec::parse).transpose()
    }
}

/// One dataset frame with all of its input paths.
#[derive(Debug, Clone)]
pub struct FrameRecord {
    pub frame_id: String,
    pub camera_image: PathBuf,
    /// Newest first.
    pub radar_sweeps: Vec<PathBuf>,
    pub masks: PathBuf,
    pub gt_depth: PathBuf,
    pub calib: PathBuf,
}

/// Scan `root` for frame directories (those containing calib.json), sorted
/// by frame id.
pub fn discover_frames(root: &Path) -> Result<Vec<FrameRecord>, PipelineError> {
    let entries = fs::read_dir(root).map_err(|source| PipelineError::Io {
        path: root.to_path_buf(),
        source,
    })?;
    let mut frames = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|source| PipelineError::Io {
            path: root.to_path_buf(),
            source,
        })?;
        let dir = entry.path();
        if !dir.is_dir() || !dir.join("calib.json").exists() {
            continue;
        }
        let frame_id = entry.file_name().to_string_lossy().into_owned();
        let radar_dir = dir.join("radar");
        let mut radar_sweeps = Vec::new();
        if radar_dir.is_dir() {
            for sweep in fs::read_dir(&radar_dir).map_err(|source| PipelineError::Io {
                path: radar_dir.clone(),
                source,
            })? {
                let p = sweep
                    .map_err(|source| PipelineError::Io {
                        path: radar_dir.clone(),
                        source,
                    })?
                    .path();
                if p.extension().is_some_and(|e| e == "csv") {
                    radar_sweeps.push(p);
                }
            }
        }
        radar_sweeps.sort(); // sweep_00 (newest) first
        frames.push(FrameRecord {
            frame_id,
            camera_image: dir.join("camera.png"),
            radar_sweeps,
            masks: dir.join("masks.png"),
            gt_depth: dir.join("gt_depth.png"),
            calib: dir.join("calib.json"),
        });
    }
    if frames.is_empty() {
        return Err(PipelineError::NoFrames(root.to_path_buf()));
    }
    frames.sort_by(|a, b| a.frame_id.cmp(&b.frame_id));
    Ok(frames)
}

fn load_calibration(frame: &FrameRecord) -> Result<SensorCalibration, PipelineError> {
    let text = fs::read_to_string(&frame.calib).map_err(|e| PipelineError::frame(&frame.frame_id, e))?;
    serde_json::from_str(&text)
        .map_err(|e| PipelineError::frame(&frame.frame_id, format!("calib.json: {e}")))
}

/// parse sweeps -> accumulate -> rasterize, without the crop.
pub fn project_frame(frame: &FrameRecord, config: &PipelineConfig) -> Result<SparseDepthMap, PipelineError> {
    let fid = &frame.frame_id;
    let calib = load_calibration(frame)?;
    let k = calib.camera_intrinsics().map_err(|e| PipelineError::frame(fid, e))?;
    let cam_to_ego = calib.sensor_to_ego().map_err(|e| PipelineError::frame(fid, e))?;
    let ego_to_global = calib.ego_to_global().map_err(|e| PipelineError::frame(fid, e))?;
    if frame.radar_sweeps.len() < config.sweeps_n {
        return Err(PipelineError::frame(
            fid,
            format!(
                "have {} radar sweeps, configured sweeps_n is {}",
                frame.radar_sweeps.len(),
                config.sweeps_n
            ),
        ));
    }
    let sweeps = frame.radar_sweeps[..config.sweeps_n]
        .iter()
        .map(|p| parse_sweep(p))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| PipelineError::frame(fid, e))?;
    let points = accumulate(&sweeps, &ego_to_global, &cam_to_ego, config.sweeps_n)
        .map_err(|e| PipelineError::frame(fid, e))?;
    Ok(rasterize(&points, &k, config.depth_cap_m))
}

fn apply_crop(
    map: SparseDepthMap,
    crop: Option<CropSpec>,
    frame_id: &str,
) -> Result<SparseDepthMap, PipelineError> {
    match crop {
        None => Ok(map),
        Some(c) => map
            .crop(c.x, c.y, c.width, c.height)
            .map_err(|e| PipelineError::frame(frame_id, e)),
    }
}

/// Apply the configured expansion method to a full-resolution sparse map.
pub fn expand_frame(
    frame: &FrameRecord,
    config: &PipelineConfig,
    sparse: &SparseDepthMap,
) -> Result<(SparseDepthMap, ExpansionReport), PipelineError> {
    let fid = &frame.frame_id;
    let method = config.expansion_method()?;
    let size = (sparse.width(), sparse.height());

    let masks = match method {
        ExpansionMethod::Insta => {
            Some(load_masks(&frame.masks, size).map_err(|e| PipelineError::frame(fid, e))?)
        }
        _ => None,
    };
    let guide = match method {
        ExpansionMethod::Jbf { .. } => {
            let img = image::open(&frame.camera_image)
                .map_err(|e| PipelineError::frame(fid, e))?
                .into_luma8();
            if img.dimensions() != size {
                return Err(PipelineError::frame(
                    fid,
                    format!(
                        "guide image is {}x{}, depth map is {}x{}",
                        img.width(),
                        img.height(),
                        size.0,
                        size.1
                    ),
                ));
            }
            Some(img.into_raw())
        }
        _ => None,
    };
    let intrinsics = match method {
        ExpansionMethod::HeightExtend { .. } => {
            let calib = load_calibration(frame)?;
            Some(calib.camera_intrinsics().map_err(|e| PipelineError::frame(fid, e))?)
        }
        _ => None,
    };

    let inputs = ExpandInputs {
        masks: masks.as_ref(),
        guide: guide.as_deref(),
        intrinsics: intrinsics.as_ref(),
    };
    expand(&method, sparse, &inputs).map_err(|e| PipelineError::frame(fid, e))
}

fn run_frames<F>(frames: &[FrameRecord], jobs: usize, op: F) -> Vec<Result<(), PipelineError>>
where
    F: Fn(&FrameRecord) -> Result<(), PipelineError> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool construction");
    pool.install(|| frames.par_iter().map(|f| op(f)).collect())
}

fn report_failures(results: Vec<Result<(), PipelineError>>) -> usize {
    let mut failed = 0;
    for r in results {
        if let Err(e) = r {
            eprintln!("error: {e}");
            failed += 1;
        }
    }
    failed
}

fn ensure_out_dir(out: &Path) -> Result<(), PipelineError> {
    fs::create_dir_all(out).map_err(|source| PipelineError::Io {
        path: out.to_path_buf(),
        source,
    })
}

/// `project` subcommand: per frame, write `<out>/<frame_id>.png`. Returns
/// the number of failed frames.
pub fn cmd_project(root: &Path, out: &Path, config: &PipelineConfig) -> Result<usize, PipelineError> {
    config.expansion_method()?; // surfaces config errors before any work
    let crop = config.crop_spec()?;
    let frames = discover_frames(root)?;
    ensure_out_dir(out)?;
    let results = run_frames(&frames, config.jobs, |frame| {
        let map = project_frame(frame, config)?;
        let map = apply_crop(map, crop, &frame.frame_id)?;
        write_depth_png(&out.join(format!("{}.png", frame.frame_id)), &map)
            .map_err(|e| PipelineError::frame(&frame.frame_id, e))
    });
    Ok(report_failures(results))
}

#[derive(Debug, Serialize, Deserialize)]
struct FrameExpansionReport {
    frame_id: String,
    #[serde(flatten)]
    report: ExpansionReport,
}

/// `expand` subcommand. When `depth_dir` is given, full-resolution projected
/// maps are read from `<depth_dir>/<frame_id>.png`; otherwise projection
/// runs in-memory. Expansion happens at full resolution, the crop last.
/// Writes expanded maps plus a reports.jsonl. Returns failed frame count.
pub fn cmd_expand(
    root: &Path,
    depth_dir: Option<&Path>,
    out: &Path,
    config: &PipelineConfig,
) -> Result<usize, PipelineError> {
    config.expansion_method()?;
    let crop = config.crop_spec()?;
    let frames = discover_frames(root)?;
    ensure_out_dir(out)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .expect("thread pool construction");
    let results: Vec<Result<FrameExpansionReport, PipelineError>> = pool.install(|| {
        frames
            .par_iter()
            .map(|frame| {
                let sparse = match depth_dir {
                    Some(dir) => read_depth_png(&dir.join(format!("{}.png", frame.frame_id)), config.depth_cap_m)
                        .map_err(|e| PipelineError::frame(&frame.frame_id, e))?,
                    None => project_frame(frame, config)?,
                };
                let (expanded, report) = expand_frame(frame, config, &sparse)?;
                let expanded = apply_crop(expanded, crop, &frame.frame_id)?;
                write_depth_png(&out.join(format!("{}.png", frame.frame_id)), &expanded)
                    .map_err(|e| PipelineError::frame(&frame.frame_id, e))?;
                Ok(FrameExpansionReport {
                    frame_id: frame.frame_id.clone(),
                    report,
                })
            })
            .collect()
    });

    let mut lines = String::new();
    let mut failed = 0;
    for r in results {
        match r {
            Ok(fr) => {
                lines.push_str(&serde_json::to_string(&fr).unwrap());
                lines.push('\n');
            }
            Err(e) => {
                eprintln!("error: {e}");
                failed += 1;
            }
        }
    }
    let report_path = out.join("reports.jsonl");
    fs::write(&report_path, lines).map_err(|source| PipelineError::Io {
        path: report_path,
        source,
    })?;
    Ok(failed)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FrameMetricReport {
    pub frame_id: String,
    #[serde(flatten)]
    pub report: MetricReport,
}

fn png_stems(dir: &Path) -> Result<Vec<String>, PipelineError> {
    let mut stems = Vec::new();
    for entry in fs::read_dir(dir).map_err(|source| PipelineError::Io {
        path: dir.to_path_buf(),
        source,
    })? {
        let p = entry
            .map_err(|source| PipelineError::Io {
                path: dir.to_path_buf(),
                source,
            })?
            .path();
        if p.extension().is_some_and(|e| e == "png") {
            stems.push(p.file_stem().unwrap().to_string_lossy().into_owned());
        }
    }
    stems.sort();
    Ok(stems)
}

/// `eval` subcommand: JSONL with one object per frame plus one aggregate
/// object computed from pooled sums. Returns (per-frame reports, aggregate).
pub fn cmd_eval(
    pred_dir: &Path,
    gt_dir: &Path,
    cap: f64,
    jobs: usize,
) -> Result<(Vec<FrameMetricReport>, MetricReport), PipelineError> {
    let pred_stems = png_stems(pred_dir)?;
    let gt_stems = png_stems(gt_dir)?;
    if pred_stems != gt_stems {
        let missing_pred: Vec<_> = gt_stems.iter().filter(|s| !pred_stems.contains(s)).cloned().collect();
        let missing_gt: Vec<_> = pred_stems.iter().filter(|s| !gt_stems.contains(s)).cloned().collect();
        return Err(PipelineError::FrameSetMismatch {
            missing_pred: missing_pred.join(", "),
            missing_gt: missing_gt.join(", "),
        });
    }
    if pred_stems.is_empty() {
        return Err(PipelineError::NoFrames(pred_dir.to_path_buf()));
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool construction");
    let accs: Vec<Result<(String, MetricAccumulator), PipelineError>> = pool.install(|| {
        pred_stems
            .par_iter()
            .map(|stem| {
                let pred = read_depth_png(&pred_dir.join(format!("{stem}.png")), cap)
                    .map_err(|e| PipelineError::frame(stem, e))?;
                let gt = read_depth_png(&gt_dir.join(format!("{stem}.png")), cap)
                    .map_err(|e| PipelineError::frame(stem, e))?;
                let acc = accumulate_metrics(&pred, &gt, cap).map_err(|e| PipelineError::frame(stem, e))?;
                Ok((stem.clone(), acc))
            })
            .collect()
    });

    // fold in frame order: the reduction stays identical at any job count
    let mut per_frame = Vec::new();
    let mut total = MetricAccumulator::default();
    for acc in accs {
        let (stem, acc) = acc?;
        total = total.merge(&acc);
        per_frame.push(FrameMetricReport {
            frame_id: stem,
            report: acc.report().map_err(|e| PipelineError::frame("aggregate", e))?,
        });
    }
    let aggregate = total
        .report()
        .map_err(|e| PipelineError::frame("aggregate", e))?;
    Ok((per_frame, aggregate))
}

/// Polynomial fit of the turbo colormap, t in [0, 1].
fn turbo(t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0);
    let r = 34.61 + t * (1176.93 + t * (-10879.38 + t * (33693.43 + t * (-39000.31 + t * 15118.03))));
    let g = 23.31 + t * (559.52 + t * (1234.96 + t * (-3617.18 + t * (1090.71 + t * 721.54))));
    let b = 27.20 + t * (3223.70 + t * (-15448.42 + t * (28142.51 + t * (-22925.29 + t * 6973.80))));
    [
        r.round().clamp(0.0, 255.0) as u8,
        g.round().clamp(0.0, 255.0) as u8,
        b.round().clamp(0.0, 255.0) as u8,
    ]
}

/// `render` subcommand: turbo-mapped color PNG, invalid pixels black,
/// optional disk dilation for point visibility (nearest depth wins on
/// overlap).
pub fn cmd_render(input: &Path, out: &Path, cap: f64, dilate: u32) -> Result<(), PipelineError> {
    let map = read_depth_png(input, cap).map_err(|e| PipelineError::frame(&input.display().to_string(), e))?;
    let (w, h) = (map.width(), map.height());
    let mut depth_buf = vec![f64::INFINITY; (w * h) as usize];
    for (u, v, d) in map.iter_valid() {
        let r = dilate as i64;
        for dv in -r..=r {
            for du in -r..=r {
                if du * du + dv * dv > r * r {
                    continue;
                }
                let (pu, pv) = (u as i64 + du, v as i64 + dv);
                if pu < 0 || pv < 0 || pu >= w as i64 || pv >= h as i64 {
                    continue;
                }
                let i = (pv * w as i64 + pu) as usize;
                if d < depth_buf[i] {
                    depth_buf[i] = d;
                }
            }
        }
    }
    let mut rgb = vec![0u8; (w * h) as usize * 3];
    for (i, &d) in depth_buf.iter().enumerate() {
        if d.is_finite() {
            let c = turbo(d / cap);
            rgb[3 * i..3 * i + 3].copy_from_slice(&c);
        }
    }
    image::save_buffer(out, &rgb, w, h, image::ExtendedColorType::Rgb8).map_err(|e| {
        PipelineError::Io {
            path: out.to_path_buf(),
            source: std::io::Error::other(e.to_string()),
        }
    })
}

/// Options for the `bev-pool` subcommand.
#[derive(Debug, Clone, Copy)]
pub struct BevPoolOptions {
    pub downsample: u32,
    pub bin_min: f64,
    pub bin_max: f64,
    pub bin_count: usize,
    pub grid: BevGridSpec,
}

impl Default for BevPoolOptions {
    fn default() -> Self {
        Self {
            downsample: 8,
            bin_min: DEFAULT_BIN_MIN_M,
            bin_max: DEFAULT_BIN_MAX_M,
            bin_count: DEFAULT_BIN_COUNT,
            grid: BevGridSpec {
                x_min: -51.2,
                x_max: 51.2,
                y_min: -51.2,
                y_max: 51.2,
                resolution: 0.8,
                channels: 1,
            },
        }
    }
}

/// `bev-pool` subcommand: one-hot depth distribution from a depth PNG,
/// unit features, lift + voxel pool, BEVG binary out.
pub fn cmd_bev_pool(
    depth_png: &Path,
    calib_json: Option<&Path>,
    out: &Path,
    cap: f64,
    opts: &BevPoolOptions,
) -> Result<BevGrid, PipelineError> {
    let name = depth_png.display().to_string();
    let map = read_depth_png(depth_png, cap).map_err(|e| PipelineError::frame(&name, e))?;
    let (cam_to_ego, k) = match calib_json {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| PipelineError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            let calib: SensorCalibration = serde_json::from_str(&text)
                .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
            (
                calib.sensor_to_ego().map_err(|e| PipelineError::frame(&name, e))?,
                calib.camera_intrinsics().map_err(|e| PipelineError::frame(&name, e))?,
            )
        }
        None => {
            // no calibration: identity extrinsics and a centered unit-focal
            // camera matching the map size
            let k = crate::geom::CameraIntrinsics::new(
                map.width() as f64,
                map.width() as f64,
                map.width() as f64 / 2.0,
                map.height() as f64 / 2.0,
                map.width(),
                map.height(),
            )
            .map_err(|e| PipelineError::frame(&name, e))?;
            (crate::geom::Pose::identity(), k)
        }
    };
    let run = || -> Result<BevGrid, BevError> {
        let bins = DepthBins::uniform(opts.bin_min, opts.bin_max, opts.bin_count)?;
        let dist = DepthDistribution::one_hot_from_depth(&map, opts.downsample, &bins)?;
        let features = FeatureMap::constant(dist.width(), dist.height(), opts.grid.channels, 1.0);
        let frustum = make_frustum(&k, opts.downsample, &bins)?;
        let lifted = lift(&features, &dist)?;
        voxel_pool(&frustum, &lifted, &cam_to_ego, &opts.grid)
    };
    let grid = run().map_err(|e| PipelineError::frame(&name, e))?;
    write_bev(out, &grid).map_err(|e| PipelineError::frame(&name, e))?;
    Ok(grid)
}

/// `synth` subcommand: write `count` frames under `root`, seeds
/// `base_seed..base_seed+count`.
pub fn cmd_synth(root: &Path, base_seed: u64, count: usize, spec: &SceneSpec) -> Result<(), PipelineError> {
    for i in 0..count {
        let frame_spec = SceneSpec {
            seed: base_seed + i as u64,
            ..*spec
        };
        let scene = generate(&frame_spec)
            .map_err(|e| PipelineError::frame(&format!("frame_{i:04}"), e))?;
        write_scene(&root.join(format!("frame_{i:04}")), &scene)
            .map_err(|e| PipelineError::frame(&format!("frame_{i:04}"), e))?;
    }
    Ok(())
}
