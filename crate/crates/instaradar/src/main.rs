use clap::{Args, Parser, Subcommand};
use instaradar::pipeline::{
    cmd_bev_pool, cmd_eval, cmd_expand, cmd_project, cmd_render, cmd_synth, BevPoolOptions,
    PipelineConfig, PipelineError,
};
use instaradar::synth::SceneSpec;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "instaradar", version, about = "Radar depth expansion and evaluation pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by the pipeline subcommands; command line wins over the
/// config file.
#[derive(Debug, Args)]
struct ConfigArgs {
    /// JSON config file mirroring the pipeline configuration
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker count (0 = all cores)
    #[arg(long)]
    jobs: Option<usize>,
    /// Number of radar sweeps to accumulate (newest first)
    #[arg(long)]
    sweeps: Option<usize>,
    /// Maximum valid depth in meters
    #[arg(long)]
    cap: Option<f64>,
    /// Expansion method: raw | height | jbf | insta
    #[arg(long)]
    method: Option<String>,
    /// Height extension in meters (method=height)
    #[arg(long)]
    dh: Option<f64>,
    /// Filter window radius in pixels (method=jbf)
    #[arg(long)]
    radius: Option<u32>,
    /// Spatial sigma in pixels (method=jbf)
    #[arg(long = "sigma-s")]
    sigma_s: Option<f64>,
    /// Range sigma in guide intensity levels (method=jbf)
    #[arg(long = "sigma-r")]
    sigma_r: Option<f64>,
    /// Crop window WxH+X+Y, applied last
    #[arg(long)]
    crop: Option<String>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<PipelineConfig, PipelineError> {
        let mut config = match &self.config {
            Some(path) => PipelineConfig::load(path)?,
            None => PipelineConfig::default(),
        };
        if let Some(jobs) = self.jobs {
            config.jobs = jobs;
        }
        if let Some(sweeps) = self.sweeps {
            config.sweeps_n = sweeps;
        }
        if let Some(cap) = self.cap {
            config.depth_cap_m = cap;
        }
        if let Some(method) = &self.method {
            config.method = method.clone();
        }
        if let Some(dh) = self.dh {
            config.dh = dh;
        }
        if let Some(radius) = self.radius {
            config.radius = radius;
        }
        if let Some(sigma_s) = self.sigma_s {
            config.sigma_s = sigma_s;
        }
        if let Some(sigma_r) = self.sigma_r {
            config.sigma_r = sigma_r;
        }
        if let Some(crop) = &self.crop {
            config.crop = Some(crop.clone());
        }
        config.expansion_method()?;
        config.crop_spec()?;
        Ok(config)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Project accumulated radar sweeps to per-frame depth PNGs
    Project {
        /// Dataset root with one directory per frame
        #[arg(long)]
        root: PathBuf,
        /// Output directory for depth PNGs
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Expand projected depth maps with the configured method
    Expand {
        #[arg(long)]
        root: PathBuf,
        /// Directory of projected (full-resolution) depth PNGs; when
        /// omitted, projection runs in-memory
        #[arg(long)]
        depth: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Evaluate predicted depth PNGs against ground truth
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        /// Write JSONL here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = instaradar::DEFAULT_DEPTH_CAP)]
        cap: f64,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Render a depth PNG as a turbo-mapped color image
    Render {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = instaradar::DEFAULT_DEPTH_CAP)]
        cap: f64,
        /// Dilate each point by this pixel radius for visibility
        #[arg(long, default_value_t = 0)]
        dilate: u32,
    },
    /// Lift a depth PNG through the one-hot distribution and voxel-pool it
    /// into a BEVG binary
    #[command(name = "bev-pool")]
    BevPool {
        #[arg(long)]
        depth: PathBuf,
        /// Camera calibration JSON; identity extrinsics when omitted
        #[arg(long)]
        calib: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = instaradar::DEFAULT_DEPTH_CAP)]
        cap: f64,
        /// Feature-grid downsample factor (must divide the image size)
        #[arg(long, default_value_t = 8)]
        downsample: u32,
        #[arg(long, default_value_t = instaradar::bev::DEFAULT_BIN_COUNT)]
        bins: usize,
    },
    /// Generate a synthetic dataset in the frame layout
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        frames: usize,
        #[arg(long, default_value_t = 6)]
        objects: usize,
        #[arg(long = "depth-min", default_value_t = 5.0)]
        depth_min: f64,
        #[arg(long = "depth-max", default_value_t = 60.0)]
        depth_max: f64,
        #[arg(long = "points-per-object", default_value_t = 4)]
        points_per_object: usize,
        #[arg(long = "noise-sigma", default_value_t = 0.0)]
        noise_sigma: f64,
        #[arg(long = "ego-speed", default_value_t = 2.0)]
        ego_speed: f64,
        #[arg(long, default_value_t = instaradar::radar::DEFAULT_SWEEP_COUNT)]
        sweeps: usize,
    },
}

fn run() -> Result<usize, PipelineError> {
    match Cli::parse().command {
        Command::Project { root, out, config } => {
            let config = config.resolve()?;
            cmd_project(&root, &out, &config)
        }
        Command::Expand { root, depth, out, config } => {
            let config = config.resolve()?;
            cmd_expand(&root, depth.as_deref(), &out, &config)
        }
        Command::Eval { pred, gt, out, cap, jobs } => {
            let (per_frame, aggregate) = cmd_eval(&pred, &gt, cap, jobs)?;
            let mut lines = String::new();
            for fr in &per_frame {
                lines.push_str(&serde_json::to_string(fr).unwrap());
                lines.push('\n');
            }
            lines.push_str(&format!(
                "{{\"frame_id\":\"aggregate\",{}\n",
                serde_json::to_string(&aggregate).unwrap().trim_start_matches('{')
            ));
            match out {
                Some(path) => std::fs::write(&path, lines).map_err(|source| PipelineError::Io {
                    path,
                    source,
                })?,
                None => print!("{lines}"),
            }
            Ok(0)
        }
        Command::Render { input, out, cap, dilate } => {
            cmd_render(&input, &out, cap, dilate)?;
            Ok(0)
        }
        Command::BevPool { depth, calib, out, cap, downsample, bins } => {
            let opts = BevPoolOptions {
                downsample,
                bin_count: bins,
                ..Default::default()
            };
            cmd_bev_pool(&depth, calib.as_deref(), &out, cap, &opts)?;
            Ok(0)
        }
        Command::Synth {
            out,
            seed,
            frames,
            objects,
            depth_min,
            depth_max,
            points_per_object,
            noise_sigma,
            ego_speed,
            sweeps,
        } => {
            let spec = SceneSpec {
                seed,
                object_count: objects,
                depth_range: (depth_min, depth_max),
                radar_points_per_object: points_per_object,
                radar_noise_sigma: noise_sigma,
                ego_speed,
                sweep_count: sweeps,
            };
            cmd_synth(&out, seed, frames, &spec)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(0) => ExitCode::SUCCESS,
        Ok(failed) => {
            eprintln!("{failed} frame(s) failed");
            ExitCode::from(1)
        }
        Err(e @ PipelineError::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
